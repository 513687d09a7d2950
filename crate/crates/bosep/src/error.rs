use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A raw tensor symmetrized to (numerically) zero, e.g. an antisymmetric input.
    #[error("symmetrization annihilated the input (norm {norm:.3e} < 1e-14)")]
    ZeroSymmetrization { norm: f64 },

    /// A vector or tensor with too small a norm to normalize.
    #[error("cannot normalize a zero vector (norm {norm:.3e})")]
    ZeroNorm { norm: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e} > 1e-10)")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Operation defined for a specific particle number only.
    #[error("unsupported particle number {got} (expected {expected})")]
    ParticleNumber { expected: usize, got: usize },

    #[error("two-boson amplitude matrix is not symmetric (deviation {deviation:.3e} > 1e-12)")]
    NonSymmetricInput { deviation: f64 },

    /// A projector expectation came out with a non-negligible imaginary part,
    /// which indicates a symmetry bug upstream.
    #[error("expectation value has imaginary part {imag:.3e} (threshold 1e-10)")]
    NonRealExpectation { imag: f64 },

    #[error("vector is not a property of the state (residual {residual:.3e} > 1e-6)")]
    NotAProperty { residual: f64 },

    /// No symmetrized product of three single-particle vectors reproduces the state.
    #[error("no constituent triple found (best fidelity {best_fidelity})")]
    NoTriple { best_fidelity: f64 },

    /// Pairwise overlap relations that no actual vector triple can realize.
    #[error("inconsistent pairwise relations in constituent triple")]
    InconsistentGram,

    #[error("unknown catalog entry `{name}`")]
    UnknownName { name: String },

    #[error("invalid input: {reason}")]
    BadParams { reason: String },

    #[error("numerical routine failed: {context}")]
    NumericalFailure { context: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
