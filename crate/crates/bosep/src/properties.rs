//! Expectation profiles of symmetrized rank-one projectors.
//!
//! For a single-particle vector `φ` with projector `P = |φ⟩⟨φ|` and a symmetric
//! `n`-boson state `ψ`, the quantities of interest are the expectations of the
//! symmetrized projectors onto "exactly k particles carry P" (k = 1…n), their sum
//! ("at least one"), and the residual `r(φ) = ‖(I−P)⊗…⊗(I−P) ψ‖² = 1 − ⟨at least one⟩`.
//! `φ` is a complete set of properties of `ψ` exactly when `r(φ) = 0`.
//!
//! All expectations are computed by contracting `P` and `I−P` against one tensor
//! slot at a time; nothing here materializes a `dⁿ × dⁿ` operator. The dense
//! operator construction lives in [`crate::oracle`] for the test suite.

use num_complex::Complex64;

use crate::symstate::{dense_len, BosonicPureState, SingleParticleVector};
use crate::{Error, Result};

/// Imaginary parts above this threshold in a projector expectation indicate a
/// symmetry bug and are reported as [`Error::NonRealExpectation`].
const IMAG_TOL: f64 = 1e-10;

/// A rank-one projector `|φ⟩⟨φ|` built from a normalized single-particle vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyProjector {
    vector: SingleParticleVector,
}

impl PropertyProjector {
    pub fn new(vector: SingleParticleVector) -> Self {
        Self { vector }
    }

    pub fn vector(&self) -> &SingleParticleVector {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }
}

/// Expectations of the symmetrized projectors for a three-boson state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationProfile {
    /// Exactly one particle carries the property.
    pub exactly_one: f64,
    /// Exactly two particles carry the property.
    pub exactly_two: f64,
    /// All three particles carry the property.
    pub exactly_three: f64,
    /// At least one particle carries the property.
    pub at_least_one: f64,
    /// `1 − at_least_one = ‖(I−P)⊗(I−P)⊗(I−P) ψ‖²`.
    pub residual: f64,
}

fn check_dims(psi: &BosonicPureState, proj: &PropertyProjector) -> Result<()> {
    if psi.dim() != proj.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: proj.dim() });
    }
    Ok(())
}

/// Applies `P = |φ⟩⟨φ|` to one slot of a dense tensor.
pub(crate) fn apply_projector_slot(
    t: &[Complex64],
    dim: usize,
    n: usize,
    slot: usize,
    phi: &[Complex64],
) -> Vec<Complex64> {
    // Contract the slot with φ̄, then re-expand along φ.
    let stride = dim.pow((n - 1 - slot) as u32);
    let outer = dense_len(dim, n) / (stride * dim);
    let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * stride * dim + s;
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..dim {
                acc += phi[a].conj() * t[base + a * stride];
            }
            for (i, phv) in phi.iter().enumerate() {
                out[base + i * stride] = phv * acc;
            }
        }
    }
    out
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn real_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() >= IMAG_TOL {
        return Err(Error::NonRealExpectation { imag: z.im });
    }
    Ok(z.re)
}

/// Full expectation profile for a three-boson state.
///
/// With `m_k = ⟨ψ| P^(1)…P^(k) |ψ⟩` (the projector on the first `k` slots),
/// permutation symmetry gives `e₁ = 3(m₁ − 2m₂ + m₃)`, `e₂ = 3(m₂ − m₃)`,
/// `e₃ = m₃`; the residual is computed independently so that the partition
/// identity `e₁ + e₂ + e₃ + r = 1` stays a meaningful cross-check.
pub fn expectation_profile(
    psi: &BosonicPureState,
    proj: &PropertyProjector,
) -> Result<ExpectationProfile> {
    if psi.particles() != 3 {
        return Err(Error::ParticleNumber { expected: 3, got: psi.particles() });
    }
    check_dims(psi, proj)?;
    let d = psi.dim();
    let phi = proj.vector().components();
    let t = psi.dense();
    let t1 = apply_projector_slot(&t, d, 3, 0, phi);
    let t2 = apply_projector_slot(&t1, d, 3, 1, phi);
    let t3 = apply_projector_slot(&t2, d, 3, 2, phi);
    let m1 = real_checked(inner(&t, &t1))?;
    let m2 = real_checked(inner(&t, &t2))?;
    let m3 = real_checked(inner(&t, &t3))?;
    let residual = residual_exact(&t, d, 3, phi);
    Ok(ExpectationProfile {
        exactly_one: 3.0 * (m1 - 2.0 * m2 + m3),
        exactly_two: 3.0 * (m2 - m3),
        exactly_three: m3,
        at_least_one: 1.0 - residual,
        residual,
    })
}

/// Expectation of "at least one particle carries `P`" for two or three bosons.
pub fn at_least_one(psi: &BosonicPureState, proj: &PropertyProjector) -> Result<f64> {
    Ok(1.0 - residual_objective(psi, proj)?)
}

/// The property residual `r(φ) = ‖(I−P)⊗…⊗(I−P) ψ‖²`; zero exactly when `φ`
/// is a complete set of properties of `ψ`.
pub fn residual_objective(psi: &BosonicPureState, proj: &PropertyProjector) -> Result<f64> {
    check_dims(psi, proj)?;
    Ok(residual_exact(&psi.dense(), psi.dim(), psi.particles(), proj.vector().components()))
}

/// Residual as the squared norm of the slot-wise `(I−P)` application.
///
/// Slower than [`residual_value`] but free of the cancellation floor of the
/// moment expansion (about 1e-16), so exact zeros certify down to roughly the
/// square of machine precision.
pub(crate) fn residual_exact(t: &[Complex64], dim: usize, n: usize, phi: &[Complex64]) -> f64 {
    residual_tensor(t, dim, n, phi).iter().map(|z| z.norm_sqr()).sum()
}

/// Residual on a dense tensor, via successive contractions with `φ̄`.
///
/// Writing `v₁ = φ̄·ψ`, `v₂ = φ̄·v₁`, `v₃ = φ̄·v₂` (one slot contracted each time),
/// expanding the product of `(I−P)` factors gives
/// `r = 1 − 3‖v₁‖² + 3‖v₂‖² − |v₃|²` for n = 3 and `r = 1 − 2‖v₁‖² + |v₂|²` for n = 2.
pub(crate) fn residual_value(t: &[Complex64], dim: usize, n: usize, phi: &[Complex64]) -> f64 {
    let mut grad = Vec::new();
    residual_value_impl(t, dim, n, phi, &mut grad, false)
}

/// Residual together with its Wirtinger gradient `g_a = ∂r/∂φ̄_a` (written into
/// `grad`, length `dim`). The real-coordinate gradient is `2g` componentwise.
pub(crate) fn residual_gradient(
    t: &[Complex64],
    dim: usize,
    n: usize,
    phi: &[Complex64],
    grad: &mut Vec<Complex64>,
) -> f64 {
    residual_value_impl(t, dim, n, phi, grad, true)
}

fn residual_value_impl(
    t: &[Complex64],
    dim: usize,
    n: usize,
    phi: &[Complex64],
    grad: &mut Vec<Complex64>,
    want_grad: bool,
) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    match n {
        2 => {
            // v1_j = Σ_i φ̄_i C_ij ; v2 = Σ_j φ̄_j v1_j
            let mut v1 = vec![zero; dim];
            for j in 0..dim {
                let mut acc = zero;
                for i in 0..dim {
                    acc += phi[i].conj() * t[i * dim + j];
                }
                v1[j] = acc;
            }
            let v2: Complex64 = (0..dim).map(|j| phi[j].conj() * v1[j]).sum();
            let m1: f64 = v1.iter().map(|x| x.norm_sqr()).sum();
            let m2 = v2.norm_sqr();
            if want_grad {
                grad.clear();
                grad.resize(dim, zero);
                for a in 0..dim {
                    let mut dm1 = zero;
                    for j in 0..dim {
                        dm1 += t[a * dim + j] * v1[j].conj();
                    }
                    let dm2 = 2.0 * v2.conj() * v1[a];
                    grad[a] = -2.0 * dm1 + dm2;
                }
            }
            1.0 - 2.0 * m1 + m2
        }
        3 => {
            let d2 = dim * dim;
            let mut v1 = vec![zero; d2];
            for jk in 0..d2 {
                let mut acc = zero;
                for i in 0..dim {
                    acc += phi[i].conj() * t[i * d2 + jk];
                }
                v1[jk] = acc;
            }
            let mut v2 = vec![zero; dim];
            for k in 0..dim {
                let mut acc = zero;
                for j in 0..dim {
                    acc += phi[j].conj() * v1[j * dim + k];
                }
                v2[k] = acc;
            }
            let v3: Complex64 = (0..dim).map(|k| phi[k].conj() * v2[k]).sum();
            let m1: f64 = v1.iter().map(|x| x.norm_sqr()).sum();
            let m2: f64 = v2.iter().map(|x| x.norm_sqr()).sum();
            let m3 = v3.norm_sqr();
            if want_grad {
                grad.clear();
                grad.resize(dim, zero);
                for a in 0..dim {
                    let mut dm1 = zero;
                    for jk in 0..d2 {
                        dm1 += t[a * d2 + jk] * v1[jk].conj();
                    }
                    let mut dm2 = zero;
                    for k in 0..dim {
                        dm2 += v1[a * dim + k] * v2[k].conj();
                    }
                    let dm3 = 3.0 * v3.conj() * v2[a];
                    grad[a] = -3.0 * dm1 + 6.0 * dm2 - dm3;
                }
            }
            1.0 - 3.0 * m1 + 3.0 * m2 - m3
        }
        _ => unreachable!("particle number is validated at construction"),
    }
}

/// The residual tensor `(I−P)⊗…⊗(I−P) ψ` itself, for least-squares polishing.
pub(crate) fn residual_tensor(
    t: &[Complex64],
    dim: usize,
    n: usize,
    phi: &[Complex64],
) -> Vec<Complex64> {
    let mut cur = t.to_vec();
    for slot in 0..n {
        let projected = apply_projector_slot(&cur, dim, n, slot, phi);
        for (c, p) in cur.iter_mut().zip(&projected) {
            *c -= p;
        }
    }
    cur
}
