//! Decomposing states along their properties.
//!
//! Once a property `φ` of a three-boson state is known, the state factors as
//! `ψ = Sym(φ ⊗ χ)` for a symmetric two-boson cofactor `χ`. This module
//! extracts `χ` by least squares, splits two-boson states into constituent
//! pairs through a Takagi factorization, assembles per-anchor constituent
//! triples with their mutual Gram relations, and fits symmetrized product
//! states `Sym(a ⊗ b ⊗ c)` directly when no anchor-based route applies.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::properties::residual_exact;
use crate::symstate::{BosonicPureState, SingleParticleVector, TwoBosonState};
use crate::{Error, Result};

/// Anchors with residual above this are refused by [`extract_cofactor`].
pub const COFACTOR_RESIDUAL_TOL: f64 = 1e-6;

/// Overlap magnitudes within this of 1 count as equal vectors, within this of
/// 0 as orthogonal ones.
pub const GRAM_TOL: f64 = 1e-7;

/// Takagi values below this do not contribute to the symmetric rank.
pub const SYM_RANK_TOL: f64 = 1e-8;

/// A rank-2 pair whose Takagi values differ by less than this is balanced,
/// which is exactly the orthogonal-constituents case.
const BALANCED_TOL: f64 = 1e-8;

/// Product fits below `1 − FIT_TOL` in fidelity are rejected as no-triple.
pub const FIT_TOL: f64 = 1e-6;

/// Relation between two single-particle vectors, decided on `|⟨φ|χ⟩|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramRelation {
    Equal,
    Orthogonal,
    Oblique,
}

/// Classifies an overlap magnitude into a [`GramRelation`].
pub fn classify_overlap(magnitude: f64) -> GramRelation {
    if magnitude >= 1.0 - GRAM_TOL {
        GramRelation::Equal
    } else if magnitude <= GRAM_TOL {
        GramRelation::Orthogonal
    } else {
        GramRelation::Oblique
    }
}

/// Result of factoring `ψ = Sym(φ ⊗ χ)` at a property `φ`.
#[derive(Debug, Clone)]
pub struct CofactorExtraction {
    pub chi: TwoBosonState,
    /// `‖Sym(φ ⊗ χ*) − ψ‖` before normalizing `χ*`; at an exact property this
    /// is numerical noise, for a near-property it grows like `√r(φ)`.
    pub lsq_residual: f64,
}

/// Extracts the two-boson cofactor of `psi` at the property `phi`.
pub fn extract_cofactor(
    psi: &BosonicPureState,
    phi: &SingleParticleVector,
) -> Result<CofactorExtraction> {
    if psi.particles() != 3 {
        return Err(Error::ParticleNumber { expected: 3, got: psi.particles() });
    }
    let d = psi.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: phi.dim() });
    }
    let t = psi.dense();
    let residual = residual_exact(&t, d, 3, phi.components());
    if residual > COFACTOR_RESIDUAL_TOL {
        return Err(Error::NotAProperty { residual });
    }

    // Unknowns: the orbit coordinates X_{ab} (a ≤ b) of the symmetric cofactor
    // matrix. Each produces the symmetrized tensor
    // T_{ijk} = (φ_i X_{jk} + φ_j X_{ik} + φ_k X_{ij}) / 3.
    let f = phi.components();
    let pairs: Vec<(usize, usize)> =
        (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let mut a_mat = DMatrix::<Complex64>::zeros(t.len(), pairs.len());
    for (col, &(a, b)) in pairs.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut entry = Complex64::new(0.0, 0.0);
                    for (u, v, w) in [(i, j, k), (j, i, k), (k, i, j)] {
                        if (v, w) == (a, b) || (v, w) == (b, a) {
                            entry += f[u];
                        }
                    }
                    a_mat[((i * d + j) * d + k, col)] = entry / 3.0;
                }
            }
        }
    }
    let rhs = DVector::from_column_slice(&t);
    let svd = a_mat.clone().svd(true, true);
    let x = svd
        .solve(&rhs, 1e-12)
        .map_err(|_| Error::NumericalFailure { context: "cofactor least squares" })?;
    let lsq_residual = (&a_mat * &x - &rhs).norm();

    let mut chi_mat = DMatrix::<Complex64>::zeros(d, d);
    for (col, &(a, b)) in pairs.iter().enumerate() {
        chi_mat[(a, b)] = x[col];
        chi_mat[(b, a)] = x[col];
    }
    Ok(CofactorExtraction { chi: TwoBosonState::from_matrix(chi_mat)?, lsq_residual })
}

/// Takagi factorization `M = Σ σ_i u_i u_iᵀ` of a complex symmetric matrix,
/// with `σ_i ≥ 0` descending and complex-orthonormal `u_i`.
#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    pub values: Vec<f64>,
    pub vectors: Vec<SingleParticleVector>,
}

impl TakagiFactorization {
    /// Rebuilds `Σ σ_i u_i u_iᵀ`, mostly for verification.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let d = self.vectors[0].dim();
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for (sigma, u) in self.values.iter().zip(&self.vectors) {
            let c = u.components();
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += *sigma * c[i] * c[j];
                }
            }
        }
        m
    }
}

/// Computes the Takagi factorization through the real symmetric embedding
/// `K = [[X, Y], [Y, −X]]` of `M = X + iY`.
///
/// An eigenvector `(x; y)` of `K` with eigenvalue `σ` gives `u = x + iy` with
/// `M ū = σ u`; negative eigenvalues give Takagi vectors after multiplying by
/// `i`. Eigenvectors of distinct eigenvalues map to complex-orthogonal `u`, and
/// within a degenerate positive cluster real orthonormality already implies
/// complex orthonormality, so walking the spectrum downward with a
/// Gram-Schmidt filter yields the factorization without any gauge fixing.
pub fn takagi_factorize(mat: &DMatrix<Complex64>) -> Result<TakagiFactorization> {
    let d = mat.nrows();
    if mat.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: mat.ncols() });
    }
    let mut deviation: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            deviation = deviation.max((mat[(i, j)] - mat[(j, i)]).norm());
        }
    }
    if deviation > 1e-12 {
        return Err(Error::NonSymmetricInput { deviation });
    }

    let x = mat.map(|z| z.re);
    let y = mat.map(|z| z.im);
    let mut k = DMatrix::<f64>::zeros(2 * d, 2 * d);
    k.view_mut((0, 0), (d, d)).copy_from(&x);
    k.view_mut((0, d), (d, d)).copy_from(&y);
    k.view_mut((d, 0), (d, d)).copy_from(&y);
    k.view_mut((d, d), (d, d)).copy_from(&(-&x));
    let eig = k
        .try_symmetric_eigen(1e-13, 10_000)
        .ok_or(Error::NumericalFailure { context: "takagi eigensolver" })?;

    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(d);
    for idx in order {
        if vectors.len() == d {
            break;
        }
        let lambda = eig.eigenvalues[idx];
        let col = eig.eigenvectors.column(idx);
        let mut u = DVector::<Complex64>::from_fn(d, |i, _| Complex64::new(col[i], col[d + i]));
        if lambda < 0.0 {
            u *= Complex64::new(0.0, 1.0);
        }
        for _ in 0..2 {
            for prev in &vectors {
                let overlap = prev.dotc(&u);
                u -= prev * overlap;
            }
        }
        let norm = u.norm();
        if norm > 0.5 {
            u /= Complex64::new(norm, 0.0);
            values.push(lambda.abs());
            vectors.push(u);
        }
    }
    if vectors.len() != d {
        return Err(Error::NumericalFailure { context: "takagi basis extraction" });
    }
    let vectors = vectors
        .into_iter()
        .map(|v| SingleParticleVector::new(v.iter().copied().collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(TakagiFactorization { values, vectors })
}

/// How a symmetric two-boson state decomposes into a constituent pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Symmetric rank 1: `χ = u ⊗ u`.
    ProductIdentical,
    /// Balanced rank 2: `χ = Sym(a ⊗ b)` with `⟨a|b⟩ = 0`.
    SymOrthogonal,
    /// Unbalanced rank 2: `χ = Sym(a ⊗ b)` with oblique constituents.
    SymOblique,
    /// Symmetric rank 3 or more: no constituent pair exists.
    NonDecomposable,
}

/// Takagi data of a two-boson state together with its decomposition verdict.
#[derive(Debug, Clone)]
pub struct TwoBosonAnalysis {
    pub values: Vec<f64>,
    pub vectors: Vec<SingleParticleVector>,
    pub sym_rank: usize,
    pub verdict: Verdict,
    /// The constituent pair, absent only for [`Verdict::NonDecomposable`].
    pub constituents: Option<(SingleParticleVector, SingleParticleVector)>,
}

/// Decides whether `χ = Sym(a ⊗ b)` and recovers the pair when it exists.
///
/// With Takagi data `χ = λ₁ u₁u₁ᵀ + λ₂ u₂u₂ᵀ` of rank two, the constituents are
/// `a, b = (√λ₁ u₁ ± i √λ₂ u₂)/√(λ₁+λ₂)`, giving `⟨a|b⟩ = (λ₁−λ₂)/(λ₁+λ₂)`;
/// equal values therefore mean an orthogonal pair. The formula is projectively
/// gauge invariant under rotations inside a degenerate Takagi cluster.
pub fn analyze_two_boson(state: &TwoBosonState) -> Result<TwoBosonAnalysis> {
    let takagi = takagi_factorize(state.matrix())?;
    let sym_rank = takagi.values.iter().filter(|&&v| v > SYM_RANK_TOL).count();
    let (verdict, constituents) = match sym_rank {
        0 => return Err(Error::NumericalFailure { context: "two-boson state of rank zero" }),
        1 => {
            let u = takagi.vectors[0].clone();
            (Verdict::ProductIdentical, Some((u.clone(), u)))
        }
        2 => {
            let (l1, l2) = (takagi.values[0], takagi.values[1]);
            let verdict = if (l1 - l2).abs() <= BALANCED_TOL {
                Verdict::SymOrthogonal
            } else {
                Verdict::SymOblique
            };
            let scale = (l1 + l2).sqrt();
            let u1 = takagi.vectors[0].components();
            let u2 = takagi.vectors[1].components();
            let mut a = Vec::with_capacity(u1.len());
            let mut b = Vec::with_capacity(u1.len());
            for (p, q) in u1.iter().zip(u2) {
                let s = l1.sqrt() * p / scale;
                let t = Complex64::new(0.0, 1.0) * l2.sqrt() * q / scale;
                a.push(s + t);
                b.push(s - t);
            }
            (verdict, Some((SingleParticleVector::new(a)?, SingleParticleVector::new(b)?)))
        }
        _ => (Verdict::NonDecomposable, None),
    };
    Ok(TwoBosonAnalysis {
        values: takagi.values,
        vectors: takagi.vectors,
        sym_rank,
        verdict,
        constituents,
    })
}

/// A full product decomposition `ψ = Sym(v₀ ⊗ v₁ ⊗ v₂)` obtained from one
/// anchor property, with the pairwise Gram data of the three vectors.
#[derive(Debug, Clone)]
pub struct ConstituentTriple {
    /// Anchor first, then the cofactor constituents.
    pub vectors: [SingleParticleVector; 3],
    /// `|⟨v₀|v₁⟩|, |⟨v₀|v₂⟩|, |⟨v₁|v₂⟩|`.
    pub overlaps: [f64; 3],
    pub relations: [GramRelation; 3],
    /// `|⟨ψ|Sym(v₀⊗v₁⊗v₂)⟩|²` after normalization; 1 up to numerical noise.
    pub fidelity: f64,
}

/// Builds the constituent triple of `psi` anchored at the property `anchor`.
///
/// Fails with [`Error::NoTriple`] when the cofactor is not decomposable; the
/// reported fidelity is then the weight of its best rank-2 truncation.
pub fn constituent_triple(
    psi: &BosonicPureState,
    anchor: &SingleParticleVector,
) -> Result<ConstituentTriple> {
    let extraction = extract_cofactor(psi, anchor)?;
    let analysis = analyze_two_boson(&extraction.chi)?;
    let (a, b) = match analysis.constituents {
        Some(pair) => pair,
        None => {
            let best_fidelity: f64 =
                analysis.values.iter().take(2).map(|v| v * v).sum();
            return Err(Error::NoTriple { best_fidelity });
        }
    };
    triple_from_vectors(psi, anchor.clone(), a, b)
}

pub(crate) fn triple_from_vectors(
    psi: &BosonicPureState,
    v0: SingleParticleVector,
    v1: SingleParticleVector,
    v2: SingleParticleVector,
) -> Result<ConstituentTriple> {
    let (product, _) = BosonicPureState::sym_product3(&v0, &v1, &v2)?;
    let fidelity = psi.overlap(&product)?.norm_sqr();
    let overlaps = [
        v0.overlap_magnitude(&v1)?,
        v0.overlap_magnitude(&v2)?,
        v1.overlap_magnitude(&v2)?,
    ];
    let relations = [
        classify_overlap(overlaps[0]),
        classify_overlap(overlaps[1]),
        classify_overlap(overlaps[2]),
    ];
    Ok(ConstituentTriple { vectors: [v0, v1, v2], overlaps, relations, fidelity })
}

/// Best symmetrized product approximation found by [`sym_product_fit`].
#[derive(Debug, Clone)]
pub struct TripleFit {
    pub vectors: [SingleParticleVector; 3],
    pub fidelity: f64,
}

/// Fits `ψ ≈ Sym(a ⊗ b ⊗ c)` by maximizing the fidelity
/// `|⟨ψ|Sym(a⊗b⊗c)⟩|² / ‖Sym(a⊗b⊗c)‖²` over unit vectors.
///
/// Each sweep updates one vector at a time; both the numerator and the Gram
/// denominator are quadratic forms in the updated vector, so the optimum is a
/// generalized Rayleigh problem with the closed-form solution `a ∝ H⁻¹ ḡ`.
/// Restarts use independent Haar-random triples. Returns [`Error::NoTriple`]
/// when the best fidelity stays below `1 − FIT_TOL`.
pub fn sym_product_fit(
    psi: &BosonicPureState,
    restarts: usize,
    seed: u64,
) -> Result<TripleFit> {
    if psi.particles() != 3 {
        return Err(Error::ParticleNumber { expected: 3, got: psi.particles() });
    }
    let d = psi.dim();
    let t = psi.dense();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<TripleFit> = None;

    for _ in 0..restarts.max(1) {
        let mut v: [Vec<Complex64>; 3] = [
            SingleParticleVector::random(d, &mut rng).components().to_vec(),
            SingleParticleVector::random(d, &mut rng).components().to_vec(),
            SingleParticleVector::random(d, &mut rng).components().to_vec(),
        ];
        let mut fid = fit_fidelity(&t, d, &v);
        for _ in 0..300 {
            for slot in 0..3 {
                update_slot(&t, d, &mut v, slot);
            }
            let next = fit_fidelity(&t, d, &v);
            if next - fid < 1e-13 {
                fid = next.max(fid);
                break;
            }
            fid = next;
        }
        if best.as_ref().is_none_or(|b| fid > b.fidelity) {
            best = Some(TripleFit {
                vectors: [
                    SingleParticleVector::new(v[0].clone())?,
                    SingleParticleVector::new(v[1].clone())?,
                    SingleParticleVector::new(v[2].clone())?,
                ],
                fidelity: fid,
            });
        }
    }
    let best = best.ok_or(Error::NumericalFailure { context: "product fit produced no result" })?;
    if best.fidelity < 1.0 - FIT_TOL {
        return Err(Error::NoTriple { best_fidelity: best.fidelity });
    }
    Ok(best)
}

fn inner_slice(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨ψ|u⊗v⊗w⟩` with `u` left free on `free_slot`: returns the vector
/// `g_i = Σ conj(C) · (other two vectors)` so that the overlap is `Σ g_i u_i`.
fn contract_conj(t: &[Complex64], d: usize, v: &[Vec<Complex64>; 3], free_slot: usize) -> Vec<Complex64> {
    let mut g = vec![Complex64::new(0.0, 0.0); d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let idx = [i, j, k];
                let mut prod = t[(i * d + j) * d + k].conj();
                for slot in 0..3 {
                    if slot != free_slot {
                        prod *= v[slot][idx[slot]];
                    }
                }
                g[idx[free_slot]] += prod;
            }
        }
    }
    g
}

fn fit_fidelity(t: &[Complex64], d: usize, v: &[Vec<Complex64>; 3]) -> f64 {
    let g = contract_conj(t, d, v, 0);
    let s: Complex64 = g.iter().zip(&v[0]).map(|(x, y)| x * y).sum();
    let ab = inner_slice(&v[0], &v[1]);
    let ac = inner_slice(&v[0], &v[2]);
    let bc = inner_slice(&v[1], &v[2]);
    let den = (1.0
        + ab.norm_sqr()
        + ac.norm_sqr()
        + bc.norm_sqr()
        + 2.0 * (ab * bc * ac.conj()).re)
        / 6.0;
    s.norm_sqr() / den
}

fn update_slot(t: &[Complex64], d: usize, v: &mut [Vec<Complex64>; 3], slot: usize) {
    let g = contract_conj(t, d, v, slot);
    let (p, q) = match slot {
        0 => (&v[1], &v[2]),
        1 => (&v[0], &v[2]),
        _ => (&v[0], &v[1]),
    };
    let pq = inner_slice(p, q);
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut entry = p[i] * p[j].conj() + q[i] * q[j].conj();
            entry += pq * p[i] * q[j].conj() + pq.conj() * q[i] * p[j].conj();
            if i == j {
                entry += 1.0 + pq.norm_sqr();
            }
            h[(i, j)] = entry / 6.0;
        }
    }
    for i in 0..d {
        h[(i, i)] += Complex64::new(1e-12, 0.0);
    }
    let rhs = DVector::from_iterator(d, g.iter().map(|z| z.conj()));
    if let Some(sol) = h.lu().solve(&rhs) {
        let norm = sol.norm();
        if norm > 1e-12 {
            for (target, s) in v[slot].iter_mut().zip(sol.iter()) {
                *target = s / norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propsearch::majorana_roots;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real_vec(amps: &[f64]) -> SingleParticleVector {
        SingleParticleVector::from_real(amps).unwrap()
    }

    fn orbit_state(dim: usize, entries: &[(&[usize], f64)]) -> BosonicPureState {
        let entries: Vec<(Vec<usize>, Complex64)> =
            entries.iter().map(|(k, v)| (k.to_vec(), c(*v, 0.0))).collect();
        BosonicPureState::from_orbit_amplitudes(dim, 3, &entries).unwrap()
    }

    fn random_symmetric(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
        let raw = DMatrix::<Complex64>::from_fn(d, d, |_, _| {
            c(crate::symstate::gaussian(rng), crate::symstate::gaussian(rng))
        });
        let sym = (&raw + raw.transpose()) / c(2.0, 0.0);
        let norm = sym.norm();
        sym / c(norm, 0.0)
    }

    #[test]
    fn gram_relation_thresholds() {
        assert_eq!(classify_overlap(1.0), GramRelation::Equal);
        assert_eq!(classify_overlap(1.0 - 1e-9), GramRelation::Equal);
        assert_eq!(classify_overlap(0.0), GramRelation::Orthogonal);
        assert_eq!(classify_overlap(1e-9), GramRelation::Orthogonal);
        assert_eq!(classify_overlap(0.5), GramRelation::Oblique);
    }

    #[test]
    fn takagi_reconstructs_random_symmetric_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for &d in &[2usize, 3, 4] {
            for _ in 0..15 {
                let m = random_symmetric(d, &mut rng);
                let tak = takagi_factorize(&m).unwrap();
                assert_eq!(tak.values.len(), d);
                for w in tak.values.windows(2) {
                    assert!(w[0] >= w[1] - 1e-12);
                }
                for i in 0..d {
                    for j in 0..d {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        let ov = tak.vectors[i].overlap_magnitude(&tak.vectors[j]).unwrap();
                        assert_relative_eq!(ov, expected, epsilon = 1e-9);
                    }
                }
                assert!((tak.reconstruct() - &m).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn takagi_handles_degenerate_identity() {
        let m = DMatrix::<Complex64>::identity(2, 2) / c(2.0_f64.sqrt(), 0.0);
        let tak = takagi_factorize(&m).unwrap();
        assert_relative_eq!(tak.values[0], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(tak.values[1], 1.0 / 2.0_f64.sqrt(), epsilon = 1e-12);
        assert!((tak.reconstruct() - &m).norm() < 1e-12);
    }

    #[test]
    fn takagi_rejects_asymmetric_input() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(takagi_factorize(&m), Err(Error::NonSymmetricInput { .. })));
    }

    #[test]
    fn w_cofactor_is_orthogonal_pair() {
        let w = orbit_state(2, &[(&[0, 0, 1], 1.0)]);
        let extraction = extract_cofactor(&w, &real_vec(&[1.0, 0.0])).unwrap();
        assert!(extraction.lsq_residual < 1e-10);
        let mat = extraction.chi.matrix();
        // χ = (|01⟩ + |10⟩)/√2.
        let s = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(mat[(0, 1)].re, s, epsilon = 1e-9);
        assert_relative_eq!(mat[(1, 0)].re, s, epsilon = 1e-9);
        assert!(mat[(0, 0)].norm() < 1e-9 && mat[(1, 1)].norm() < 1e-9);
        let analysis = analyze_two_boson(&extraction.chi).unwrap();
        assert_eq!(analysis.verdict, Verdict::SymOrthogonal);
        let (a, b) = analysis.constituents.unwrap();
        let zero = real_vec(&[1.0, 0.0]);
        let one = real_vec(&[0.0, 1.0]);
        assert!(
            (a.projectively_eq(&zero, 1e-9) && b.projectively_eq(&one, 1e-9))
                || (a.projectively_eq(&one, 1e-9) && b.projectively_eq(&zero, 1e-9))
        );
    }

    #[test]
    fn w_anchor_one_gives_identical_pair() {
        let w = orbit_state(2, &[(&[0, 0, 1], 1.0)]);
        let extraction = extract_cofactor(&w, &real_vec(&[0.0, 1.0])).unwrap();
        let analysis = analyze_two_boson(&extraction.chi).unwrap();
        // Cofactor |00⟩: both constituents are |0⟩.
        assert_eq!(analysis.verdict, Verdict::ProductIdentical);
        let (a, b) = analysis.constituents.unwrap();
        assert!(a.projectively_eq(&real_vec(&[1.0, 0.0]), 1e-9));
        assert!(b.projectively_eq(&real_vec(&[1.0, 0.0]), 1e-9));
    }

    #[test]
    fn ghz_cofactor_reproduces_the_other_two_roots() {
        let ghz = orbit_state(2, &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0)]);
        let roots = majorana_roots(&ghz).unwrap();
        assert_eq!(roots.members.len(), 3);
        for anchor_idx in 0..3 {
            let anchor = &roots.members[anchor_idx].vector;
            let triple = constituent_triple(&ghz, anchor).unwrap();
            assert!(triple.fidelity > 1.0 - 1e-9);
            assert_eq!(triple.relations, [GramRelation::Oblique; 3]);
            for overlap in triple.overlaps {
                assert_relative_eq!(overlap, 0.5, epsilon = 1e-7);
            }
            for other in roots.members.iter().map(|m| &m.vector) {
                if other.projectively_eq(anchor, 1e-8) {
                    continue;
                }
                assert!(
                    triple.vectors[1].projectively_eq(other, 1e-7)
                        || triple.vectors[2].projectively_eq(other, 1e-7)
                );
            }
        }
    }

    #[test]
    fn cofactor_refuses_non_property() {
        let c000 = 0.8;
        let c100 = ((1.0 - c000 * c000) / 3.0_f64).sqrt();
        let state = orbit_state(2, &[(&[0, 0, 0], c000), (&[0, 0, 1], c100)]);
        let err = extract_cofactor(&state, &real_vec(&[0.0, 1.0])).unwrap_err();
        match err {
            Error::NotAProperty { residual } => assert_relative_eq!(residual, 0.64, epsilon = 1e-10),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn partially_entangled_family_cofactor_is_oblique() {
        let c000 = 0.8;
        let c100 = ((1.0 - c000 * c000) / 3.0_f64).sqrt();
        let state = orbit_state(2, &[(&[0, 0, 0], c000), (&[0, 0, 1], c100)]);
        let triple = constituent_triple(&state, &real_vec(&[1.0, 0.0])).unwrap();
        assert!(triple.fidelity > 1.0 - 1e-9);
        // Anchor |0⟩ with an oblique pair: the state is partially entangled
        // with two defined properties, not fully separable.
        assert!(triple.relations.contains(&GramRelation::Oblique));
    }

    #[test]
    fn biseparable_family_cofactor_decomposes_obliquely() {
        // The family with equal weights is exactly Sym(|0⟩⊗|1⟩⊗Θ),
        // Θ = (|1⟩+2|2⟩)/√5: one oblique pair orthogonal to the anchor.
        let state = orbit_state(3, &[(&[0, 1, 1], 1.0 / 3.0), (&[0, 1, 2], 1.0 / 3.0)]);
        let triple = constituent_triple(&state, &real_vec(&[1.0, 0.0, 0.0])).unwrap();
        assert!(triple.fidelity > 1.0 - 1e-9);
        let obliques = triple.relations.iter().filter(|r| **r == GramRelation::Oblique).count();
        let orthos =
            triple.relations.iter().filter(|r| **r == GramRelation::Orthogonal).count();
        assert_eq!((obliques, orthos), (1, 2));
        let theta = real_vec(&[0.0, 1.0 / 5.0_f64.sqrt(), 2.0 / 5.0_f64.sqrt()]);
        let one = real_vec(&[0.0, 1.0, 0.0]);
        for expected in [one, theta] {
            assert!(
                triple.vectors[1].projectively_eq(&expected, 1e-7)
                    || triple.vectors[2].projectively_eq(&expected, 1e-7)
            );
        }
    }

    #[test]
    fn rank_three_cofactor_is_refused() {
        // Sym(|0⟩ ⊗ χ) with χ ∝ |00⟩+|11⟩+|22⟩: the cofactor has symmetric
        // rank 3, so no constituent pair exists and the best rank-2
        // truncation carries weight 2/3.
        let d = 3;
        let chi = DMatrix::<Complex64>::identity(d, d);
        let mut t = vec![c(0.0, 0.0); d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut entry = Complex64::new(0.0, 0.0);
                    for (u, v, w) in [(i, j, k), (j, i, k), (k, i, j)] {
                        if u == 0 {
                            entry += chi[(v, w)];
                        }
                    }
                    t[(i * d + j) * d + k] = entry / 3.0;
                }
            }
        }
        let psi = BosonicPureState::symmetrize(d, 3, &t).unwrap();
        let err = constituent_triple(&psi, &real_vec(&[1.0, 0.0, 0.0])).unwrap_err();
        match err {
            Error::NoTriple { best_fidelity } => {
                assert_relative_eq!(best_fidelity, 2.0 / 3.0, epsilon = 1e-9);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn two_boson_ghz_splits_into_circular_pair() {
        let ghz2 = BosonicPureState::from_orbit_amplitudes(
            2,
            2,
            &[(vec![0, 0], c(1.0, 0.0)), (vec![1, 1], c(1.0, 0.0))],
        )
        .unwrap();
        let analysis = analyze_two_boson(&TwoBosonState::from_state(&ghz2).unwrap()).unwrap();
        assert_eq!(analysis.verdict, Verdict::SymOrthogonal);
        let (a, b) = analysis.constituents.unwrap();
        assert!(a.overlap_magnitude(&b).unwrap() < 1e-9);
        let s = 1.0 / 2.0_f64.sqrt();
        let plus_i = SingleParticleVector::new(vec![c(s, 0.0), c(0.0, s)]).unwrap();
        let minus_i = SingleParticleVector::new(vec![c(s, 0.0), c(0.0, -s)]).unwrap();
        assert!(
            (a.projectively_eq(&plus_i, 1e-9) && b.projectively_eq(&minus_i, 1e-9))
                || (a.projectively_eq(&minus_i, 1e-9) && b.projectively_eq(&plus_i, 1e-9))
        );
    }

    #[test]
    fn sym_oblique_pair_recovered() {
        let a = real_vec(&[1.0, 0.0]);
        let b = real_vec(&[1.0 / 2.0_f64.sqrt(), 1.0 / 2.0_f64.sqrt()]);
        let (chi, _) = BosonicPureState::sym_product2(&a, &b).unwrap();
        let analysis = analyze_two_boson(&TwoBosonState::from_state(&chi).unwrap()).unwrap();
        assert_eq!(analysis.verdict, Verdict::SymOblique);
        let (p, q) = analysis.constituents.unwrap();
        assert!(
            (p.projectively_eq(&a, 1e-8) && q.projectively_eq(&b, 1e-8))
                || (p.projectively_eq(&b, 1e-8) && q.projectively_eq(&a, 1e-8))
        );
    }

    #[test]
    fn takagi_pair_formula_reproduces_random_products(){
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let a = SingleParticleVector::random(3, &mut rng);
            let b = SingleParticleVector::random(3, &mut rng);
            let (chi, _) = BosonicPureState::sym_product2(&a, &b).unwrap();
            let analysis = analyze_two_boson(&TwoBosonState::from_state(&chi).unwrap()).unwrap();
            assert!(analysis.sym_rank <= 2);
            let (p, q) = analysis.constituents.unwrap();
            let (rebuilt, _) = BosonicPureState::sym_product2(&p, &q).unwrap();
            assert!(chi.overlap(&rebuilt).unwrap().norm() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn product_fit_succeeds_on_ghz_qubit() {
        let ghz = orbit_state(2, &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0)]);
        let fit = sym_product_fit(&ghz, 24, 5).unwrap();
        assert!(fit.fidelity > 1.0 - 1e-9);
        for i in 0..3 {
            for j in i + 1..3 {
                let ov = fit.vectors[i].overlap_magnitude(&fit.vectors[j]).unwrap();
                assert_relative_eq!(ov, 0.5, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn product_fit_recovers_random_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for trial in 0..8 {
            let a = SingleParticleVector::random(3, &mut rng);
            let b = SingleParticleVector::random(3, &mut rng);
            let c3 = SingleParticleVector::random(3, &mut rng);
            let (psi, _) = BosonicPureState::sym_product3(&a, &b, &c3).unwrap();
            let fit = sym_product_fit(&psi, 16, 700 + trial).unwrap();
            assert!(fit.fidelity > 1.0 - 1e-9, "trial {trial}: {}", fit.fidelity);
        }
    }

    #[test]
    fn product_fit_rejects_ghz_qutrit() {
        let ghz3 = orbit_state(
            3,
            &[(&[0, 0, 0], 1.0), (&[1, 1, 1], 1.0), (&[2, 2, 2], 1.0)],
        );
        match sym_product_fit(&ghz3, 24, 9) {
            Err(Error::NoTriple { best_fidelity }) => {
                assert!(best_fidelity > 0.0 && best_fidelity < 1.0 - FIT_TOL);
            }
            other => panic!("expected no-triple, got {other:?}"),
        }
    }

    #[test]
    fn constituent_triples_cover_w_state_anchors() {
        let w = orbit_state(2, &[(&[0, 0, 1], 1.0)]);
        for anchor in [real_vec(&[1.0, 0.0]), real_vec(&[0.0, 1.0])] {
            let triple = constituent_triple(&w, &anchor).unwrap();
            assert!(triple.fidelity > 1.0 - 1e-9);
            let equals =
                triple.relations.iter().filter(|r| **r == GramRelation::Equal).count();
            let orthos =
                triple.relations.iter().filter(|r| **r == GramRelation::Orthogonal).count();
            assert_eq!((equals, orthos), (1, 2));
        }
    }
}
