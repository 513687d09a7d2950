//! Permutation-symmetric pure states of two or three bosons.
//!
//! A state of `n` indistinguishable bosons with single-particle dimension `d` is a
//! symmetric tensor `C` with `n` indices. Storage keeps one coefficient per sorted
//! multi-index (one per permutation orbit); the combinatorial weight of each orbit
//! enters at the API boundary, so permutation symmetry is structural rather than a
//! runtime check. The stored coefficient is the value the full tensor takes on
//! *every* member of the orbit, and the squared norm is `Σ weight(o) · |C_o|²`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

/// Norm below which a vector or symmetrized tensor counts as zero.
pub(crate) const ZERO_NORM_TOL: f64 = 1e-14;
/// Allowed deviation of `U†U` from the identity in [`BosonicPureState::change_basis`].
pub(crate) const UNITARY_TOL: f64 = 1e-10;
/// Allowed elementwise deviation from `M = Mᵀ` in [`TwoBosonState::from_matrix`].
pub(crate) const SYMMETRY_TOL: f64 = 1e-12;
/// Squared-norm window inside which normalization is skipped to keep already
/// normalized amplitude lists bit-stable across save/load cycles.
const NORM_SKIP_WINDOW: f64 = 1e-12;

pub(crate) const PERMS2: [[usize; 2]; 2] = [[0, 1], [1, 0]];
pub(crate) const PERMS3: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

pub(crate) fn dense_len(dim: usize, n: usize) -> usize {
    dim.pow(n as u32)
}

pub(crate) fn encode(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

pub(crate) fn decode(mut flat: usize, dim: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for slot in (0..n).rev() {
        idx[slot] = flat % dim;
        flat /= dim;
    }
    idx
}

/// All sorted (non-decreasing) multi-indices for `n` bosons in dimension `dim`.
pub(crate) fn orbit_keys(dim: usize, n: usize) -> Vec<Vec<usize>> {
    let mut keys = Vec::new();
    match n {
        2 => {
            for i in 0..dim {
                for j in i..dim {
                    keys.push(vec![i, j]);
                }
            }
        }
        3 => {
            for i in 0..dim {
                for j in i..dim {
                    for k in j..dim {
                        keys.push(vec![i, j, k]);
                    }
                }
            }
        }
        _ => unreachable!("particle number is validated at construction"),
    }
    keys
}

/// Number of distinct permutations of a sorted multi-index.
pub(crate) fn orbit_weight(sorted: &[usize]) -> usize {
    let n = sorted.len();
    let mut weight = (1..=n).product::<usize>();
    let mut run = 1;
    for w in 1..n {
        if sorted[w] == sorted[w - 1] {
            run += 1;
            weight /= run;
        } else {
            run = 1;
        }
    }
    weight
}

fn sorted_key(idx: &[usize]) -> Vec<usize> {
    let mut key = idx.to_vec();
    key.sort_unstable();
    key
}

fn check_particle_number(n: usize) -> Result<()> {
    if n == 2 || n == 3 {
        Ok(())
    } else {
        Err(Error::ParticleNumber { expected: 3, got: n })
    }
}

/// A normalized single-particle state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleVector {
    amps: DVector<Complex64>,
}

impl SingleParticleVector {
    /// Normalizes `amps`; fails on (numerically) zero input.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let v = DVector::from_vec(amps);
        let norm = v.norm();
        if norm < ZERO_NORM_TOL {
            return Err(Error::ZeroNorm { norm });
        }
        Ok(Self { amps: v.unscale(norm) })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { amps: DVector::from_vec(amps) }
    }

    /// A Haar-random unit vector: normalized standard complex Gaussian.
    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect();
            if let Ok(v) = Self::new(amps) {
                return v;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn components(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|`, which quotients out both global phases.
    pub fn overlap_magnitude(&self, other: &Self) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    /// Whether the two vectors agree as rays: `|⟨a|b⟩| ≥ 1 − tol`.
    pub fn projectively_eq(&self, other: &Self, tol: f64) -> bool {
        match self.overlap_magnitude(other) {
            Ok(m) => m >= 1.0 - tol,
            Err(_) => false,
        }
    }

    /// The vector orthogonal to `self`, defined for `dim == 2` only.
    pub fn orthogonal_qubit(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim() });
        }
        Self::new(vec![-self.amps[1].conj(), self.amps[0].conj()])
    }
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; two uniforms per call is fine at this scale.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A normalized permutation-symmetric pure state of `n ∈ {2, 3}` bosons.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonicPureState {
    dim: usize,
    n: usize,
    coeffs: BTreeMap<Vec<usize>, Complex64>,
}

impl BosonicPureState {
    /// Projects a raw dense tensor (row-major, length `dim^n`) onto the symmetric
    /// subspace and normalizes. Fails with [`Error::ZeroSymmetrization`] when the
    /// projection vanishes, e.g. for an antisymmetric combination.
    pub fn symmetrize(dim: usize, n: usize, raw: &[Complex64]) -> Result<Self> {
        check_particle_number(n)?;
        if raw.len() != dense_len(dim, n) {
            return Err(Error::DimensionMismatch { expected: dense_len(dim, n), got: raw.len() });
        }
        let mut coeffs = BTreeMap::new();
        for key in orbit_keys(dim, n) {
            let mut acc = Complex64::new(0.0, 0.0);
            match n {
                2 => {
                    for perm in &PERMS2 {
                        acc += raw[encode(&[key[perm[0]], key[perm[1]]], dim)];
                    }
                    acc /= 2.0;
                }
                _ => {
                    for perm in &PERMS3 {
                        acc += raw[encode(&[key[perm[0]], key[perm[1]], key[perm[2]]], dim)];
                    }
                    acc /= 6.0;
                }
            }
            coeffs.insert(key, acc);
        }
        let mut state = Self { dim, n, coeffs };
        let norm = state.norm_sq().sqrt();
        if norm < ZERO_NORM_TOL {
            return Err(Error::ZeroSymmetrization { norm });
        }
        state.scale(1.0 / norm);
        Ok(state)
    }

    /// Builds a state from per-orbit amplitudes: each entry gives the full-tensor
    /// value on every member of the orbit of `idx`. Missing orbits are zero.
    /// Normalization is skipped when the input is already normalized to within
    /// 1e-12 in squared norm, so normalized amplitude lists pass through bit-stably.
    pub fn from_orbit_amplitudes(
        dim: usize,
        n: usize,
        entries: &[(Vec<usize>, Complex64)],
    ) -> Result<Self> {
        check_particle_number(n)?;
        let mut coeffs: BTreeMap<Vec<usize>, Complex64> = orbit_keys(dim, n)
            .into_iter()
            .map(|k| (k, Complex64::new(0.0, 0.0)))
            .collect();
        for (idx, value) in entries {
            if idx.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: idx.len() });
            }
            if idx.iter().any(|&i| i >= dim) {
                return Err(Error::DimensionMismatch { expected: dim, got: *idx.iter().max().unwrap() });
            }
            let key = sorted_key(idx);
            let slot = coeffs.get_mut(&key).unwrap();
            if slot.norm() != 0.0 {
                return Err(Error::BadParams {
                    reason: format!("orbit of index {idx:?} specified more than once"),
                });
            }
            *slot = *value;
        }
        let mut state = Self { dim, n, coeffs };
        let norm_sq = state.norm_sq();
        if norm_sq.sqrt() < ZERO_NORM_TOL {
            return Err(Error::ZeroNorm { norm: norm_sq.sqrt() });
        }
        if (norm_sq - 1.0).abs() > NORM_SKIP_WINDOW {
            state.scale(1.0 / norm_sq.sqrt());
        }
        Ok(state)
    }

    /// Normalized symmetrization of `a ⊗ b ⊗ c`, together with the norm of the
    /// symmetric projection before normalization.
    pub fn sym_product3(
        a: &SingleParticleVector,
        b: &SingleParticleVector,
        c: &SingleParticleVector,
    ) -> Result<(Self, f64)> {
        let dim = a.dim();
        if b.dim() != dim || c.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: b.dim().max(c.dim()) });
        }
        let mut raw = vec![Complex64::new(0.0, 0.0); dense_len(dim, 3)];
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    raw[encode(&[i, j, k], dim)] = a.amps[i] * b.amps[j] * c.amps[k];
                }
            }
        }
        let factor = symmetric_projection_norm(dim, 3, &raw);
        let state = Self::symmetrize(dim, 3, &raw)?;
        Ok((state, factor))
    }

    /// A random state: standard complex Gaussian tensor, symmetrized and normalized.
    pub fn random<R: Rng>(dim: usize, n: usize, rng: &mut R) -> Result<Self> {
        check_particle_number(n)?;
        let raw: Vec<Complex64> = (0..dense_len(dim, n))
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        Self::symmetrize(dim, n, &raw)
    }

    /// Two-boson analogue of [`Self::sym_product3`].
    pub fn sym_product2(
        a: &SingleParticleVector,
        b: &SingleParticleVector,
    ) -> Result<(Self, f64)> {
        let dim = a.dim();
        if b.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
        }
        let mut raw = vec![Complex64::new(0.0, 0.0); dense_len(dim, 2)];
        for i in 0..dim {
            for j in 0..dim {
                raw[encode(&[i, j], dim)] = a.amps[i] * b.amps[j];
            }
        }
        let factor = symmetric_projection_norm(dim, 2, &raw);
        let state = Self::symmetrize(dim, 2, &raw)?;
        Ok((state, factor))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    /// Full-tensor amplitude at `idx` (any index order).
    pub fn amplitude(&self, idx: &[usize]) -> Complex64 {
        self.coeffs
            .get(&sorted_key(idx))
            .copied()
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }

    /// Iterates over (sorted multi-index, orbit weight, amplitude).
    pub fn orbits(&self) -> impl Iterator<Item = (&[usize], usize, Complex64)> {
        self.coeffs
            .iter()
            .map(|(k, &c)| (k.as_slice(), orbit_weight(k), c))
    }

    /// The full dense tensor, row-major with length `dim^n`.
    pub fn dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dense_len(self.dim, self.n)];
        for (flat, slot) in out.iter_mut().enumerate() {
            *slot = self.amplitude(&decode(flat, self.dim, self.n));
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| orbit_weight(k) as f64 * c.norm_sqr())
            .sum()
    }

    fn scale(&mut self, s: f64) {
        for c in self.coeffs.values_mut() {
            *c *= s;
        }
    }

    /// `⟨self|other⟩` over the full tensors.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.dim != other.dim || self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| orbit_weight(k) as f64 * c.conj() * other.coeffs[k])
            .sum())
    }

    /// Applies the same unitary to every particle: returns `(U ⊗ … ⊗ U) ψ`.
    pub fn change_basis(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim || u.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: u.nrows() });
        }
        let dev = (u.adjoint() * u - DMatrix::identity(self.dim, self.dim)).norm();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        let mut t = self.dense();
        for slot in 0..self.n {
            t = apply_matrix_slot(&t, self.dim, self.n, slot, u);
        }
        // The result is symmetric in exact arithmetic; re-reading per orbit just
        // averages away rounding noise, and the norm is preserved by unitarity.
        let mut coeffs = BTreeMap::new();
        for key in orbit_keys(self.dim, self.n) {
            let mut acc = Complex64::new(0.0, 0.0);
            let perms: &[&[usize]] = if self.n == 2 {
                &[&PERMS2[0], &PERMS2[1]]
            } else {
                &[&PERMS3[0], &PERMS3[1], &PERMS3[2], &PERMS3[3], &PERMS3[4], &PERMS3[5]]
            };
            for perm in perms {
                let idx: Vec<usize> = perm.iter().map(|&p| key[p]).collect();
                acc += t[encode(&idx, self.dim)];
            }
            coeffs.insert(key, acc / perms.len() as f64);
        }
        Ok(Self { dim: self.dim, n: self.n, coeffs })
    }

    /// Reduced two-boson density matrix after tracing out one particle.
    /// Symmetry makes the result independent of which particle is traced.
    pub fn partial_trace_one(&self) -> Result<ReducedTwoBosonDensity> {
        self.partial_trace_slot(2)
    }

    pub(crate) fn partial_trace_slot(&self, slot: usize) -> Result<ReducedTwoBosonDensity> {
        if self.n != 3 {
            return Err(Error::ParticleNumber { expected: 3, got: self.n });
        }
        let d = self.dim;
        let t = self.dense();
        let mut rho = DMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for m in 0..d {
                            let row_idx = insert_at(&[i, j], slot, m);
                            let col_idx = insert_at(&[k, l], slot, m);
                            acc += t[encode(&row_idx, d)] * t[encode(&col_idx, d)].conj();
                        }
                        rho[(i * d + j, k * d + l)] = acc;
                    }
                }
            }
        }
        Ok(ReducedTwoBosonDensity { dim: d, mat: rho })
    }

    /// The `d × d` symmetric amplitude matrix of a two-boson state.
    pub fn two_boson_matrix(&self) -> Result<TwoBosonState> {
        if self.n != 2 {
            return Err(Error::ParticleNumber { expected: 2, got: self.n });
        }
        let d = self.dim;
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                mat[(i, j)] = self.amplitude(&[i, j]);
            }
        }
        Ok(TwoBosonState { dim: d, mat })
    }

    /// Largest absolute amplitude difference between two states of equal shape.
    pub fn max_amplitude_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim || self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(k, c)| (c - other.coeffs[k]).norm())
            .fold(0.0, f64::max))
    }
}

fn insert_at(pair: &[usize; 2], slot: usize, value: usize) -> Vec<usize> {
    let mut idx = pair.to_vec();
    idx.insert(slot.min(2), value);
    idx
}

fn symmetric_projection_norm(dim: usize, n: usize, raw: &[Complex64]) -> f64 {
    let len = dense_len(dim, n);
    let mut norm_sq = 0.0;
    for flat in 0..len {
        let idx = decode(flat, dim, n);
        let mut acc = Complex64::new(0.0, 0.0);
        match n {
            2 => {
                for perm in &PERMS2 {
                    acc += raw[encode(&[idx[perm[0]], idx[perm[1]]], dim)];
                }
                acc /= 2.0;
            }
            _ => {
                for perm in &PERMS3 {
                    acc += raw[encode(&[idx[perm[0]], idx[perm[1]], idx[perm[2]]], dim)];
                }
                acc /= 6.0;
            }
        }
        norm_sq += acc.norm_sqr();
    }
    norm_sq.sqrt()
}

/// Applies a one-body matrix to the given tensor slot.
pub(crate) fn apply_matrix_slot(
    t: &[Complex64],
    dim: usize,
    n: usize,
    slot: usize,
    m: &DMatrix<Complex64>,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); t.len()];
    for (flat, slot_out) in out.iter_mut().enumerate() {
        let idx = decode(flat, dim, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            let mut src = idx.clone();
            src[slot] = a;
            acc += m[(idx[slot], a)] * t[encode(&src, dim)];
        }
        *slot_out = acc;
    }
    out
}

/// A normalized two-boson state viewed as its symmetric `d × d` amplitude matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBosonState {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl TwoBosonState {
    /// Validates symmetry (`M = Mᵀ` within 1e-12 elementwise) and normalizes the
    /// Frobenius norm.
    pub fn from_matrix(mat: DMatrix<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        let dev = (&mat - mat.transpose()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if dev > SYMMETRY_TOL {
            return Err(Error::NonSymmetricInput { deviation: dev });
        }
        let norm = mat.norm();
        if norm < ZERO_NORM_TOL {
            return Err(Error::ZeroNorm { norm });
        }
        Ok(Self { dim: mat.nrows(), mat: mat.unscale(norm) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// The same state in orbit-amplitude form.
    pub fn to_state(&self) -> Result<BosonicPureState> {
        let mut entries = Vec::new();
        for i in 0..self.dim {
            for j in i..self.dim {
                entries.push((vec![i, j], self.mat[(i, j)]));
            }
        }
        BosonicPureState::from_orbit_amplitudes(self.dim, 2, &entries)
    }

    pub fn from_state(state: &BosonicPureState) -> Result<Self> {
        state.two_boson_matrix()
    }
}

/// Reduced density matrix of two bosons out of three, indexed by pairs `(i, j)`
/// flattened as `i·d + j`.
#[derive(Debug, Clone)]
pub struct ReducedTwoBosonDensity {
    dim: usize,
    mat: DMatrix<Complex64>,
}

impl ReducedTwoBosonDensity {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Eigenvalues in descending order (real, since the matrix is Hermitian).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = self
            .mat
            .clone()
            .try_symmetric_eigen(1e-13, 10_000)
            .ok_or(Error::NumericalFailure { context: "density eigendecomposition" })?;
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(vals)
    }

    /// Checks trace one, Hermiticity, and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let trace: Complex64 = self.mat.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::NumericalFailure { context: "reduced density trace" });
        }
        let herm_dev = (&self.mat - self.mat.adjoint()).norm();
        if herm_dev > 1e-12 {
            return Err(Error::NumericalFailure { context: "reduced density hermiticity" });
        }
        let min = self.eigenvalues()?.last().copied().unwrap_or(0.0);
        if min < -1e-12 {
            return Err(Error::NumericalFailure { context: "reduced density positivity" });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w_qubit() -> BosonicPureState {
        let mut raw = vec![c(0.0, 0.0); 8];
        raw[encode(&[1, 0, 0], 2)] = c(1.0, 0.0);
        BosonicPureState::symmetrize(2, 3, &raw).unwrap()
    }

    #[test]
    fn symmetrize_spreads_single_entry_over_orbit() {
        let w = w_qubit();
        let expect = 1.0 / 3.0_f64.sqrt();
        for idx in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
            assert_relative_eq!(w.amplitude(&idx).re, expect, epsilon = TOL);
            assert_relative_eq!(w.amplitude(&idx).im, 0.0, epsilon = TOL);
        }
        assert_relative_eq!(w.norm_sq(), 1.0, epsilon = TOL);
    }

    #[test]
    fn symmetrize_rejects_antisymmetric_input() {
        let mut raw = vec![c(0.0, 0.0); 4];
        raw[encode(&[0, 1], 2)] = c(1.0, 0.0);
        raw[encode(&[1, 0], 2)] = c(-1.0, 0.0);
        match BosonicPureState::symmetrize(2, 2, &raw) {
            Err(Error::ZeroSymmetrization { .. }) => {}
            other => panic!("expected ZeroSymmetrization, got {other:?}"),
        }
    }

    #[test]
    fn sym_product_matches_explicit_permutation_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = SingleParticleVector::random(3, &mut rng);
            let b = SingleParticleVector::random(3, &mut rng);
            let cc = SingleParticleVector::random(3, &mut rng);
            let (state, factor) = BosonicPureState::sym_product3(&a, &b, &cc).unwrap();
            assert!(factor > 0.0);
            // Direct sum over the six slot orders, then normalized.
            let mut raw = vec![c(0.0, 0.0); 27];
            let vecs = [&a, &b, &cc];
            for perm in &PERMS3 {
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            let (p, q, r) = (
                                vecs[perm[0]].components()[i],
                                vecs[perm[1]].components()[j],
                                vecs[perm[2]].components()[k],
                            );
                            raw[encode(&[i, j, k], 3)] += p * q * r;
                        }
                    }
                }
            }
            let norm: f64 = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for (flat, entry) in raw.iter().enumerate() {
                let idx = decode(flat, 3, 3);
                let diff = (entry / norm - state.amplitude(&idx)).norm();
                assert!(diff < TOL, "mismatch at {idx:?}: {diff}");
            }
        }
    }

    #[test]
    fn sym_product_reproduces_partially_entangled_family() {
        // Sym(φ0 ⊗ φ0 ⊗ Θ) with Θ ∝ (C000/3) φ0 + C100 φ1 has amplitudes
        // C000 on (000) and C100 on the (100) orbit.
        let c000 = 0.8_f64;
        let c100 = ((1.0 - c000 * c000) / 3.0).sqrt();
        let phi0 = SingleParticleVector::basis(2, 0);
        let theta = SingleParticleVector::from_real(&[c000 / 3.0, c100]).unwrap();
        let (state, _) = BosonicPureState::sym_product3(&phi0, &phi0, &theta).unwrap();
        assert_relative_eq!(state.amplitude(&[0, 0, 0]).re, c000, epsilon = 1e-12);
        assert_relative_eq!(state.amplitude(&[1, 0, 0]).re, c100, epsilon = 1e-12);
    }

    #[test]
    fn change_basis_maps_ghz_to_half_amplitudes() {
        let ghz = BosonicPureState::from_orbit_amplitudes(
            2,
            3,
            &[
                (vec![0, 0, 0], c(1.0 / 2.0_f64.sqrt(), 0.0)),
                (vec![1, 1, 1], c(1.0 / 2.0_f64.sqrt(), 0.0)),
            ],
        )
        .unwrap();
        let h = 1.0 / 2.0_f64.sqrt();
        let had = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let rotated = ghz.change_basis(&had).unwrap();
        assert_relative_eq!(rotated.amplitude(&[0, 0, 0]).re, 0.5, epsilon = TOL);
        assert_relative_eq!(rotated.amplitude(&[1, 1, 0]).re, 0.5, epsilon = TOL);
        assert_relative_eq!(rotated.amplitude(&[1, 0, 0]).norm(), 0.0, epsilon = TOL);
        assert_relative_eq!(rotated.amplitude(&[1, 1, 1]).norm(), 0.0, epsilon = TOL);
        assert_relative_eq!(rotated.norm_sq(), 1.0, epsilon = TOL);
    }

    #[test]
    fn change_basis_rejects_non_unitary() {
        let ghz = BosonicPureState::from_orbit_amplitudes(
            2,
            3,
            &[(vec![0, 0, 0], c(1.0, 0.0)), (vec![1, 1, 1], c(1.0, 0.0))],
        )
        .unwrap();
        let bad = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(ghz.change_basis(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn change_basis_round_trip_and_norm_preservation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let state = random_state(3, 3, &mut rng);
            let u = random_unitary(3, &mut rng);
            let rotated = state.change_basis(&u).unwrap();
            assert_relative_eq!(rotated.norm_sq(), 1.0, epsilon = TOL);
            let back = rotated.change_basis(&u.adjoint()).unwrap();
            assert!(state.max_amplitude_diff(&back).unwrap() < TOL);
        }
    }

    #[test]
    fn overlap_examples() {
        let ghz = BosonicPureState::from_orbit_amplitudes(
            2,
            3,
            &[(vec![0, 0, 0], c(1.0, 0.0)), (vec![1, 1, 1], c(1.0, 0.0))],
        )
        .unwrap();
        assert_relative_eq!(ghz.overlap(&ghz).unwrap().re, 1.0, epsilon = TOL);
        let w = w_qubit();
        assert_relative_eq!(ghz.overlap(&w).unwrap().norm(), 0.0, epsilon = TOL);
    }

    #[test]
    fn ghz_qubit_is_sym_product_of_oblique_triple() {
        // In the basis {φ0, φ1} with φ0 = (|0⟩+|1⟩)/√2, φ1 = (|0⟩−|1⟩)/√2 the
        // GHZ state equals Sym(φ0 ⊗ Φ ⊗ Θ) with Θ, Φ = (∓i φ0 + √3 φ1)/2.
        let s = 1.0 / 2.0_f64.sqrt();
        let phi0 = SingleParticleVector::from_real(&[s, s]).unwrap();
        let phi1 = SingleParticleVector::from_real(&[s, -s]).unwrap();
        let mix = |i_sign: f64| {
            let amps: Vec<Complex64> = (0..2)
                .map(|k| {
                    phi0.components()[k] * c(0.0, i_sign * 0.5)
                        + phi1.components()[k] * c(3.0_f64.sqrt() / 2.0, 0.0)
                })
                .collect();
            SingleParticleVector::new(amps).unwrap()
        };
        let theta = mix(-1.0);
        let phi = mix(1.0);
        let (product, _) = BosonicPureState::sym_product3(&phi0, &phi, &theta).unwrap();
        let ghz = BosonicPureState::from_orbit_amplitudes(
            2,
            3,
            &[(vec![0, 0, 0], c(1.0, 0.0)), (vec![1, 1, 1], c(1.0, 0.0))],
        )
        .unwrap();
        assert_relative_eq!(ghz.overlap(&product).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_ghz_qutrit_is_diagonal() {
        let a = 1.0 / 3.0_f64.sqrt();
        let ghz3 = BosonicPureState::from_orbit_amplitudes(
            3,
            3,
            &[
                (vec![0, 0, 0], c(a, 0.0)),
                (vec![1, 1, 1], c(a, 0.0)),
                (vec![2, 2, 2], c(a, 0.0)),
            ],
        )
        .unwrap();
        let rho = ghz3.partial_trace_one().unwrap();
        rho.validate().unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i == j && (i == 0 || i == 4 || i == 8) { 1.0 / 3.0 } else { 0.0 };
                assert_relative_eq!(rho.matrix()[(i, j)].re, expect, epsilon = TOL);
                assert_relative_eq!(rho.matrix()[(i, j)].im, 0.0, epsilon = TOL);
            }
        }
    }

    #[test]
    fn partial_trace_slot_independent_and_w_spectrum() {
        let w = w_qubit();
        let reference = w.partial_trace_one().unwrap();
        for slot in 0..3 {
            let rho = w.partial_trace_slot(slot).unwrap();
            let dev = (rho.matrix() - reference.matrix()).norm();
            assert!(dev < TOL, "slot {slot} deviates by {dev}");
        }
        // Spectrum {2/3, 1/3, 0, 0}.
        let eigs = reference.eigenvalues().unwrap();
        assert_relative_eq!(eigs[0], 2.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(eigs[1], 1.0 / 3.0, epsilon = 1e-10);
        assert!(eigs[2].abs() < 1e-10 && eigs[3].abs() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product_state_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = SingleParticleVector::random(3, &mut rng);
        let (state, _) = BosonicPureState::sym_product3(&a, &a, &a).unwrap();
        let rho = state.partial_trace_one().unwrap();
        rho.validate().unwrap();
        let eigs = rho.eigenvalues().unwrap();
        assert_relative_eq!(eigs[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn two_boson_matrix_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let state = random_state(3, 2, &mut rng);
            let two = state.two_boson_matrix().unwrap();
            let back = two.to_state().unwrap();
            assert!(state.max_amplitude_diff(&back).unwrap() < 1e-14);
        }
    }

    #[test]
    fn from_matrix_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.0), c(0.0, 0.0)],
        );
        assert!(matches!(TwoBosonState::from_matrix(m), Err(Error::NonSymmetricInput { .. })));
    }

    #[test]
    fn random_states_are_normalized_and_symmetric_by_construction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(d, n) in &[(2, 2), (2, 3), (3, 2), (3, 3)] {
            for _ in 0..20 {
                let state = random_state(d, n, &mut rng);
                assert_relative_eq!(state.norm_sq(), 1.0, epsilon = TOL);
                let t = state.dense();
                // Spot-check permutation symmetry of the dense expansion.
                for flat in 0..t.len() {
                    let idx = decode(flat, d, n);
                    let mut rev = idx.clone();
                    rev.reverse();
                    assert_eq!(t[flat], t[encode(&rev, d)]);
                }
            }
        }
    }

    fn random_state(d: usize, n: usize, rng: &mut ChaCha8Rng) -> BosonicPureState {
        BosonicPureState::random(d, n, rng).unwrap()
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        crate::oracle::haar_unitary(d, rng)
    }
}
