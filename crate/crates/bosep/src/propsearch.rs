//! Locating the complete sets of properties of a bosonic pure state.
//!
//! The search problem is: find every single-particle vector `φ` whose residual
//! `r(φ) = ‖(I−P)⊗…⊗(I−P) ψ‖²` vanishes. Two engines are provided.
//!
//! For three qubits the zero set is computed exactly. Writing `φ⊥ = α|0⟩ + β|1⟩`,
//! the condition `⟨φ⊥φ⊥φ⊥|ψ⟩ = 0` is a cubic in `z = β̄/ᾱ` on the projective
//! line, so the properties are read off from the roots, with the root at
//! infinity corresponding to `φ = |0⟩`. Root multiplicities are meaningful and
//! reported.
//!
//! In higher dimensions the residual is minimized from many random starting
//! points: projected gradient descent with Barzilai-Borwein steps on the unit
//! sphere, followed by a Levenberg-Marquardt polish of every basin that lands
//! below [`NEAR_TOL`]. Minima below `tol_property` are accepted as properties;
//! the rest are reported separately as near-misses so that borderline states
//! remain visible instead of silently disappearing.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::properties::{residual_exact, residual_gradient, residual_tensor, residual_value};
use crate::symstate::{dense_len, gaussian, BosonicPureState, SingleParticleVector};
use crate::{Error, Result};

/// Minima with residual below `tol_property` are properties; minima between
/// `tol_property` and this bound are reported as near-misses.
pub const NEAR_TOL: f64 = 1e-4;

/// More accepted properties than this suggests a continuum of zeros rather
/// than an isolated set; the result is flagged, never truncated.
pub const CONTINUUM_LIMIT: usize = 12;

/// Chordal-metric radius used to group nearly coincident polynomial roots.
/// A triple root computed in floating point scatters by roughly the cube root
/// of the coefficient error (about 5e-6 here), well inside this radius.
const CLUSTER_TOL: f64 = 1e-4;

/// Polynomial coefficients below this fraction of the largest one are treated
/// as zero when deciding the projective degree.
const DEG_TOL: f64 = 1e-13;

const FD_STEP: f64 = 1e-7;

/// Tuning knobs for the numeric search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Number of random starting points on the unit sphere.
    pub n_starts: usize,
    /// Iteration cap for each descent.
    pub max_iter: usize,
    /// Residuals at or below this are accepted as exact zeros.
    pub tol_property: f64,
    /// Two vectors with `1 − |⟨φ|χ⟩|` below this are the same property.
    pub dedupe_tol: f64,
    /// Seed for the deterministic start-point stream.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { n_starts: 200, max_iter: 120, tol_property: 1e-9, dedupe_tol: 1e-6, seed: 0 }
    }
}

/// One accepted property (or near-miss) of the searched state.
#[derive(Debug, Clone)]
pub struct PropertyMember {
    pub vector: SingleParticleVector,
    /// Residual at the reported vector.
    pub residual: f64,
    /// Root multiplicity, known only on the exact three-qubit path.
    pub multiplicity: Option<usize>,
}

/// Bookkeeping about how a search ran.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchMeta {
    pub n_starts: usize,
    /// Starts whose descent reached a stationary point before the iteration cap.
    pub n_converged: usize,
    /// Smallest residual seen anywhere, whether or not it qualified as a zero.
    pub min_residual: f64,
    /// Set when more than [`CONTINUUM_LIMIT`] distinct zeros were accepted.
    pub continuum_suspected: bool,
    /// Set when the exact three-qubit root solver produced the result.
    pub exact_qubit_path: bool,
}

/// The outcome of a property search: accepted zeros, near-misses, run metadata.
#[derive(Debug, Clone)]
pub struct PropertySet {
    pub members: Vec<PropertyMember>,
    pub near_members: Vec<PropertyMember>,
    pub meta: SearchMeta,
}

impl PropertySet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The member projectively equal to `v` within `tol`, if any.
    pub fn find_matching(&self, v: &SingleParticleVector, tol: f64) -> Option<&PropertyMember> {
        self.members.iter().find(|m| m.vector.projectively_eq(v, tol))
    }
}

/// Finds all properties of `psi`, choosing the exact qubit solver when it applies.
pub fn find_properties(psi: &BosonicPureState, cfg: &SearchConfig) -> Result<PropertySet> {
    if psi.dim() == 2 && psi.particles() == 3 {
        majorana_roots(psi)
    } else {
        find_properties_numeric(psi, cfg)
    }
}

/// Multistart numeric search over the full single-particle sphere.
pub fn find_properties_numeric(psi: &BosonicPureState, cfg: &SearchConfig) -> Result<PropertySet> {
    let space = SearchSpace { dim: psi.dim(), basis: None };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok(numeric_search(&psi.dense(), psi.dim(), psi.particles(), &space, cfg, &mut rng, &[]))
}

/// Searches the orthogonal complement of `anchor` for further properties.
///
/// The returned set contains `anchor` itself when its residual passes the
/// acceptance threshold, followed by any zeros found with `φ ⊥ anchor`.
pub fn find_property_in_subspace(
    psi: &BosonicPureState,
    anchor: &SingleParticleVector,
    cfg: &SearchConfig,
) -> Result<PropertySet> {
    if anchor.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: anchor.dim() });
    }
    let t = psi.dense();
    let d = psi.dim();
    let n = psi.particles();
    let basis = complement_basis(anchor);
    let space = SearchSpace { dim: d, basis: Some(&basis) };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let r_anchor = residual_exact(&t, d, n, anchor.components());
    let mut seeds = Vec::new();
    if r_anchor <= cfg.tol_property {
        seeds.push(Candidate {
            vector: canonicalized(anchor.components()),
            residual: r_anchor,
            multiplicity: None,
        });
    }
    let mut set = numeric_search(&t, d, n, &space, cfg, &mut rng, &seeds);
    set.meta.min_residual = set.meta.min_residual.min(r_anchor);
    Ok(set)
}

/// Exact property set of a three-qubit state via the roots of its
/// characteristic cubic, with multiplicities.
pub fn majorana_roots(psi: &BosonicPureState) -> Result<PropertySet> {
    if psi.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.dim() });
    }
    if psi.particles() != 3 {
        return Err(Error::ParticleNumber { expected: 3, got: psi.particles() });
    }
    // ⟨φ⊥φ⊥φ⊥|ψ⟩ = Σ_m binom(3,m) C_m ᾱ^{3−m} β̄^m with C_m the amplitude on
    // the index pattern carrying m ones.
    let coeff = [
        psi.amplitude(&[0, 0, 0]),
        psi.amplitude(&[0, 0, 1]) * 3.0,
        psi.amplitude(&[0, 1, 1]) * 3.0,
        psi.amplitude(&[1, 1, 1]),
    ];
    let maxc = coeff.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let deg = coeff
        .iter()
        .rposition(|z| z.norm() > DEG_TOL * maxc)
        .unwrap_or(0);
    let inf_mult = 3 - deg;
    let trimmed = &coeff[..=deg];
    let finite: Vec<Complex64> = match deg {
        0 => Vec::new(),
        1 => vec![-trimmed[0] / trimmed[1]],
        2 => quadratic_roots(trimmed[2], trimmed[1], trimmed[0]).to_vec(),
        3 => {
            monic_cubic_roots(trimmed[2] / trimmed[3], trimmed[1] / trimmed[3], trimmed[0] / trimmed[3])
                .to_vec()
        }
        _ => unreachable!(),
    };

    let t = psi.dense();
    let mut candidates = Vec::new();
    for (center, mult) in cluster_roots(&finite) {
        let z = match mult {
            1 => newton(trimmed, center, 12),
            2 => newton(&poly_deriv(trimmed), center, 12),
            3 => -trimmed[2] / (3.0 * trimmed[3]),
            _ => unreachable!(),
        };
        let vector = root_to_vector(z);
        let residual = residual_exact(&t, 2, 3, vector.components());
        candidates.push(Candidate { vector: canonicalized(vector.components()), residual, multiplicity: Some(mult) });
    }
    if inf_mult > 0 {
        let vector = SingleParticleVector::basis(2, 0);
        let residual = residual_exact(&t, 2, 3, vector.components());
        candidates.push(Candidate { vector, residual, multiplicity: Some(inf_mult) });
    }

    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let deduped = dedupe(candidates, SearchConfig::default().dedupe_tol);
    let min_residual = deduped
        .iter()
        .map(|c| c.residual)
        .fold(f64::INFINITY, f64::min);
    let mut members: Vec<PropertyMember> = deduped
        .into_iter()
        .map(|c| PropertyMember { vector: c.vector, residual: c.residual, multiplicity: c.multiplicity })
        .collect();
    members.sort_by(|a, b| canonical_cmp(a.vector.components(), b.vector.components()));
    Ok(PropertySet {
        members,
        near_members: Vec::new(),
        meta: SearchMeta {
            n_starts: 0,
            n_converged: 0,
            min_residual,
            continuum_suspected: false,
            exact_qubit_path: true,
        },
    })
}

// ---------------------------------------------------------------------------
// Numeric engine
// ---------------------------------------------------------------------------

/// Where the search runs: the full sphere, or `φ = Vξ` over an orthonormal
/// column basis of a subspace.
struct SearchSpace<'a> {
    dim: usize,
    basis: Option<&'a DMatrix<Complex64>>,
}

impl SearchSpace<'_> {
    fn n_params(&self) -> usize {
        self.basis.map_or(self.dim, |v| v.ncols())
    }

    fn map(&self, xi: &[Complex64]) -> Vec<Complex64> {
        match self.basis {
            None => xi.to_vec(),
            Some(v) => {
                let mut phi = vec![Complex64::new(0.0, 0.0); self.dim];
                for (b, x) in xi.iter().enumerate() {
                    for i in 0..self.dim {
                        phi[i] += v[(i, b)] * x;
                    }
                }
                phi
            }
        }
    }

    fn pull(&self, g_phi: &[Complex64]) -> Vec<Complex64> {
        match self.basis {
            None => g_phi.to_vec(),
            Some(v) => {
                let mut g = vec![Complex64::new(0.0, 0.0); v.ncols()];
                for (b, gb) in g.iter_mut().enumerate() {
                    for i in 0..self.dim {
                        *gb += v[(i, b)].conj() * g_phi[i];
                    }
                }
                g
            }
        }
    }
}

struct Candidate {
    vector: SingleParticleVector,
    residual: f64,
    multiplicity: Option<usize>,
}

fn numeric_search(
    t: &[Complex64],
    d: usize,
    n: usize,
    space: &SearchSpace,
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
    seeds: &[Candidate],
) -> PropertySet {
    let np = space.n_params();
    // With one parameter the sphere is a single projective point.
    let n_starts = if np == 1 { 1 } else { cfg.n_starts.max(1) };

    let mut candidates: Vec<Candidate> = seeds
        .iter()
        .map(|c| Candidate { vector: c.vector.clone(), residual: c.residual, multiplicity: c.multiplicity })
        .collect();
    let mut n_converged = 0;
    let mut min_residual = candidates
        .iter()
        .map(|c| c.residual)
        .fold(f64::INFINITY, f64::min);
    let mut best_flat: Option<(Vec<Complex64>, f64)> = None;

    for _ in 0..n_starts {
        let xi0 = random_unit(np, rng);
        let out = descend(t, d, n, space, xi0, cfg.max_iter);
        if out.stationary {
            n_converged += 1;
        }
        if out.residual < NEAR_TOL {
            let (xi, r) = if out.residual > 1e-13 {
                lm_polish(t, d, n, space, &out.xi, 40)
            } else {
                let r = residual_exact(t, d, n, &space.map(&out.xi));
                (out.xi, r)
            };
            min_residual = min_residual.min(r);
            candidates.push(Candidate {
                vector: canonicalized(&space.map(&xi)),
                residual: r,
                multiplicity: None,
            });
        } else {
            min_residual = min_residual.min(out.residual);
            match &best_flat {
                Some((_, rb)) if *rb <= out.residual => {}
                _ => best_flat = Some((out.xi, out.residual)),
            }
        }
    }

    // Polish the best non-candidate basin too, so that `min_residual` is an
    // accurate minimum even when the state has no properties at all.
    if candidates.is_empty() {
        if let Some((xi, _)) = best_flat {
            let (_, r) = lm_polish(t, d, n, space, &xi, 40);
            min_residual = min_residual.min(r);
        }
    }

    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let deduped = dedupe(candidates, cfg.dedupe_tol);
    let mut members = Vec::new();
    let mut near_members = Vec::new();
    for c in deduped {
        let member = PropertyMember { vector: c.vector, residual: c.residual, multiplicity: c.multiplicity };
        if c.residual <= cfg.tol_property {
            members.push(member);
        } else {
            near_members.push(member);
        }
    }
    members.sort_by(|a, b| canonical_cmp(a.vector.components(), b.vector.components()));
    near_members.sort_by(|a, b| canonical_cmp(a.vector.components(), b.vector.components()));
    let continuum_suspected = members.len() > CONTINUUM_LIMIT;
    PropertySet {
        members,
        near_members,
        meta: SearchMeta {
            n_starts,
            n_converged,
            min_residual,
            continuum_suspected,
            exact_qubit_path: false,
        },
    }
}

struct DescentOutcome {
    xi: Vec<Complex64>,
    residual: f64,
    stationary: bool,
}

/// Projected gradient descent on the unit sphere with Barzilai-Borwein steps
/// and an Armijo backtracking safeguard.
fn descend(
    t: &[Complex64],
    d: usize,
    n: usize,
    space: &SearchSpace,
    mut xi: Vec<Complex64>,
    max_iter: usize,
) -> DescentOutcome {
    normalize_slice(&mut xi);
    let mut g_phi = Vec::new();
    let mut r = residual_gradient(t, d, n, &space.map(&xi), &mut g_phi);
    let mut gt = tangent_gradient(&xi, &space.pull(&g_phi));
    let mut gnorm2 = norm_sq_slice(&gt);
    let mut step = 0.1 / gnorm2.sqrt().max(1.0);
    let mut prev: Option<(Vec<Complex64>, Vec<Complex64>)> = None;
    let mut stationary = false;

    for _ in 0..max_iter {
        if r < 1e-15 || gnorm2 < 1e-20 {
            stationary = true;
            break;
        }
        if let Some((pxi, pgt)) = &prev {
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..xi.len() {
                let s = xi[i] - pxi[i];
                let y = gt[i] - pgt[i];
                ss += s.norm_sqr();
                sy += (s.conj() * y).re;
            }
            step = if sy > 1e-18 { (ss / sy).clamp(1e-12, 1e3) } else { (step * 2.0).min(1e3) };
        }
        let mut accepted = false;
        let mut tcur = step;
        for _ in 0..30 {
            let mut cand: Vec<Complex64> = xi.iter().zip(&gt).map(|(x, g)| x - tcur * g).collect();
            if normalize_slice(&mut cand) < 1e-12 {
                tcur *= 0.5;
                continue;
            }
            let rc = residual_value(t, d, n, &space.map(&cand));
            if rc <= r - 1e-4 * tcur * gnorm2 {
                prev = Some((std::mem::replace(&mut xi, cand), std::mem::take(&mut gt)));
                r = rc;
                accepted = true;
                break;
            }
            tcur *= 0.5;
        }
        if !accepted {
            stationary = true;
            break;
        }
        r = residual_gradient(t, d, n, &space.map(&xi), &mut g_phi);
        gt = tangent_gradient(&xi, &space.pull(&g_phi));
        gnorm2 = norm_sq_slice(&gt);
    }
    if gnorm2 < 1e-16 {
        stationary = true;
    }
    DescentOutcome { xi, residual: r, stationary }
}

/// Levenberg-Marquardt refinement of one basin, working on the realified
/// parameters with the unit-norm constraint absorbed into the evaluation.
fn lm_polish(
    t: &[Complex64],
    d: usize,
    n: usize,
    space: &SearchSpace,
    xi0: &[Complex64],
    max_iter: usize,
) -> (Vec<Complex64>, f64) {
    let np = space.n_params();
    let m_res = 2 * dense_len(d, n);
    let mut params = realify(xi0);
    let mut f = lm_eval(t, d, n, space, &params);
    let mut fnorm2: f64 = f.iter().map(|x| x * x).sum();
    let mut lambda = 1e-3;

    for _ in 0..max_iter {
        if fnorm2 < 1e-30 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(m_res, 2 * np);
        for p in 0..2 * np {
            let mut shifted = params.clone();
            shifted[p] += FD_STEP;
            let fp = lm_eval(t, d, n, space, &shifted);
            for row in 0..m_res {
                jac[(row, p)] = (fp[row] - f[row]) / FD_STEP;
            }
        }
        let a = jac.transpose() * &jac;
        let g = jac.transpose() * DVector::from_column_slice(&f);
        if g.norm() < 1e-16 {
            break;
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = a.clone();
            for i in 0..2 * np {
                m[(i, i)] += lambda * a[(i, i)].max(1e-12);
            }
            let delta = match m.lu().solve(&(-&g)) {
                Some(delta) => delta,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = params.iter().zip(delta.iter()).map(|(x, dx)| x + dx).collect();
            let ft = lm_eval(t, d, n, space, &trial);
            let ft2: f64 = ft.iter().map(|x| x * x).sum();
            if ft2 < fnorm2 {
                params = renormalized_params(&trial);
                f = lm_eval(t, d, n, space, &params);
                fnorm2 = f.iter().map(|x| x * x).sum();
                lambda = (lambda * 0.3).max(1e-14);
                improved = true;
                break;
            }
            lambda *= 6.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    let mut xi = complexify(&params);
    normalize_slice(&mut xi);
    (xi, fnorm2)
}

fn lm_eval(t: &[Complex64], d: usize, n: usize, space: &SearchSpace, params: &[f64]) -> Vec<f64> {
    let mut xi = complexify(params);
    normalize_slice(&mut xi);
    let phi = space.map(&xi);
    let res = residual_tensor(t, d, n, &phi);
    let mut out = Vec::with_capacity(2 * res.len());
    for z in res {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

fn realify(xi: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * xi.len());
    for z in xi {
        out.push(z.re);
        out.push(z.im);
    }
    out
}

fn complexify(params: &[f64]) -> Vec<Complex64> {
    params.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

fn renormalized_params(params: &[f64]) -> Vec<f64> {
    let mut xi = complexify(params);
    normalize_slice(&mut xi);
    realify(&xi)
}

/// Riemannian gradient on the sphere: the real gradient `2g` minus its radial
/// component. The phase direction carries no gradient because the residual is
/// phase invariant.
fn tangent_gradient(x: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let radial: f64 = x.iter().zip(g).map(|(a, b)| (a.conj() * b).re).sum::<f64>() * 2.0;
    x.iter().zip(g).map(|(a, b)| 2.0 * b - radial * a).collect()
}

fn norm_sq_slice(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn normalize_slice(v: &mut [Complex64]) -> f64 {
    let norm = norm_sq_slice(v).sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
    norm
}

fn random_unit(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let mut v: Vec<Complex64> =
            (0..len).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
        if normalize_slice(&mut v) > 1e-6 {
            return v;
        }
    }
}

/// Orthonormal basis of the orthogonal complement of `anchor`, as matrix columns.
fn complement_basis(anchor: &SingleParticleVector) -> DMatrix<Complex64> {
    let d = anchor.dim();
    let a = DVector::from_column_slice(anchor.components());
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    for i in 0..d {
        if cols.len() == d - 1 {
            break;
        }
        let mut v = DVector::<Complex64>::zeros(d);
        v[i] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            let overlap = a.dotc(&v);
            v -= &a * overlap;
            for prev in &cols {
                let overlap = prev.dotc(&v);
                v -= prev * overlap;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= Complex64::new(norm, 0.0);
            cols.push(v);
        }
    }
    DMatrix::from_columns(&cols)
}

// ---------------------------------------------------------------------------
// Result assembly
// ---------------------------------------------------------------------------

fn overlap_mag(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}

/// Merges projectively coincident candidates; the input is sorted by residual,
/// so each group is represented by its best vector. Multiplicities add up when
/// the exact solver produced duplicate roots.
fn dedupe(candidates: Vec<Candidate>, tol: f64) -> Vec<Candidate> {
    let mut reps: Vec<Candidate> = Vec::new();
    for c in candidates {
        match reps
            .iter_mut()
            .find(|r| overlap_mag(r.vector.components(), c.vector.components()) >= 1.0 - tol)
        {
            Some(rep) => {
                if let (Some(m), Some(extra)) = (rep.multiplicity.as_mut(), c.multiplicity) {
                    *m += extra;
                }
            }
            None => reps.push(c),
        }
    }
    reps
}

/// Fixes the projective phase so the largest component is real and positive.
fn canonicalized(components: &[Complex64]) -> SingleParticleVector {
    let mut v = components.to_vec();
    normalize_slice(&mut v);
    let mut imax = 0;
    let mut best = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm_sqr();
        if m > best + 1e-15 {
            best = m;
            imax = i;
        }
    }
    let pivot = v[imax];
    let mag = pivot.norm();
    if mag > 0.0 {
        let phase = pivot.conj() / mag;
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
    SingleParticleVector::new(v).expect("normalized components")
}

fn canonical_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

// ---------------------------------------------------------------------------
// Projective cubic solver
// ---------------------------------------------------------------------------

fn root_to_vector(z: Complex64) -> SingleParticleVector {
    SingleParticleVector::new(vec![-z, Complex64::new(1.0, 0.0)]).expect("nonzero by construction")
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        acc = acc * z + a;
    }
    acc
}

fn poly_deriv(coeffs: &[Complex64]) -> Vec<Complex64> {
    (1..coeffs.len()).map(|m| coeffs[m] * m as f64).collect()
}

fn newton(coeffs: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    let deriv = poly_deriv(coeffs);
    for _ in 0..steps {
        let df = poly_eval(&deriv, z);
        if df.norm() < 1e-300 {
            break;
        }
        let dz = poly_eval(coeffs, z) / df;
        z -= dz;
        if dz.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn quadratic_roots(a2: Complex64, a1: Complex64, a0: Complex64) -> [Complex64; 2] {
    let mut s = (a1 * a1 - 4.0 * a2 * a0).sqrt();
    if (a1.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -(a1 + s) / 2.0;
    if q.norm() > 1e-300 {
        [q / a2, a0 / q]
    } else {
        let r = (-a0 / a2).sqrt();
        [r, -r]
    }
}

fn monic_cubic_roots(b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let scale = b.norm().max(c.norm().sqrt()).max(d.norm().cbrt()).max(1e-300);
    if p.norm() <= 1e-13 * scale * scale && q.norm() <= 1e-13 * scale.powi(3) {
        return [-b / 3.0; 3];
    }
    let s = (q * q / 4.0 + p.powu(3) / 27.0).sqrt();
    let c1 = -q / 2.0 + s;
    let c2 = -q / 2.0 - s;
    let u = if c1.norm() >= c2.norm() { c1.cbrt() } else { c2.cbrt() };
    let omega = Complex64::new(-0.5, 0.75_f64.sqrt());
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (k, root) in roots.iter_mut().enumerate() {
        let uk = u * omega.powu(k as u32);
        let t = if uk.norm() > 1e-300 { uk - p / (3.0 * uk) } else { Complex64::new(0.0, 0.0) };
        *root = t - b / 3.0;
    }
    roots
}

fn chordal(z1: Complex64, z2: Complex64) -> f64 {
    (z1 - z2).norm() / ((1.0 + z1.norm_sqr()) * (1.0 + z2.norm_sqr())).sqrt()
}

/// Single-link clustering of roots in the chordal metric; returns arithmetic
/// cluster centers with their sizes.
fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let k = roots.len();
    let mut label: Vec<usize> = (0..k).collect();
    loop {
        let mut merged = false;
        for i in 0..k {
            for j in i + 1..k {
                if label[i] != label[j] && chordal(roots[i], roots[j]) < CLUSTER_TOL {
                    let (keep, drop) = (label[i].min(label[j]), label[i].max(label[j]));
                    for l in label.iter_mut() {
                        if *l == drop {
                            *l = keep;
                        }
                    }
                    merged = true;
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut out = Vec::new();
    for lab in 0..k {
        let group: Vec<Complex64> = (0..k).filter(|&i| label[i] == lab).map(|i| roots[i]).collect();
        if group.is_empty() {
            continue;
        }
        let center = group.iter().sum::<Complex64>() / group.len() as f64;
        out.push((center, group.len()));
    }
    out
}
