//! Dense reference implementations, kept deliberately naive.
//!
//! Everything here materializes full `d^n × d^n` operators or `d^n` vectors and
//! computes by definition, with no shortcuts shared with the production paths.
//! The test suite uses these as an independent check on the slot-contraction
//! routines and on the numerical search.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::symstate::{dense_len, gaussian, SingleParticleVector};

/// Kronecker product of two dense complex matrices.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Rank-one projector `|φ⟩⟨φ|`.
pub fn projector(phi: &SingleParticleVector) -> DMatrix<Complex64> {
    let d = phi.dim();
    let v = DVector::from_column_slice(phi.components());
    let mut p = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            p[(i, j)] = v[i] * v[j].conj();
        }
    }
    p
}

fn chain(ops: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut acc = ops[0].clone();
    for op in &ops[1..] {
        acc = kron(&acc, op);
    }
    acc
}

/// The symmetrized projector onto "exactly `k` of `n` particles carry `P`":
/// the sum over all placements of `k` copies of `P` and `n − k` copies of `I − P`.
pub fn exactly_k_operator(phi: &SingleParticleVector, n: usize, k: usize) -> DMatrix<Complex64> {
    let d = phi.dim();
    let p = projector(phi);
    let q = DMatrix::identity(d, d) - &p;
    let len = dense_len(d, n);
    let mut total = DMatrix::zeros(len, len);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let ops: Vec<DMatrix<Complex64>> = (0..n)
            .map(|slot| if mask & (1 << slot) != 0 { p.clone() } else { q.clone() })
            .collect();
        total += chain(&ops);
    }
    total
}

/// The symmetrized projector onto "at least one particle carries `P`".
pub fn at_least_one_operator(phi: &SingleParticleVector, n: usize) -> DMatrix<Complex64> {
    let mut total = exactly_k_operator(phi, n, 1);
    for k in 2..=n {
        total += exactly_k_operator(phi, n, k);
    }
    total
}

/// `⟨ψ|Op|ψ⟩` for a dense state vector.
pub fn expectation(op: &DMatrix<Complex64>, psi: &[Complex64]) -> Complex64 {
    let v = DVector::from_column_slice(psi);
    v.dotc(&(op * &v))
}

/// `‖(I−P)⊗…⊗(I−P) ψ‖²` computed through the dense operator.
pub fn residual(phi: &SingleParticleVector, n: usize, psi: &[Complex64]) -> f64 {
    expectation(&exactly_k_operator(phi, n, 0), psi).re
}

/// Partial trace of the pure-state density matrix `|ψ⟩⟨ψ|` over one slot of a
/// three-particle state, computed through the full `d³ × d³` matrix.
pub fn partial_trace(psi: &[Complex64], d: usize, traced_slot: usize) -> DMatrix<Complex64> {
    let v = DVector::from_column_slice(psi);
    let full = &v * v.adjoint();
    let kept: Vec<usize> = (0..3).filter(|&s| s != traced_slot).collect();
    let mut rho = DMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 0..d {
                        let mut row = [0usize; 3];
                        let mut col = [0usize; 3];
                        row[kept[0]] = a;
                        row[kept[1]] = b;
                        row[traced_slot] = m;
                        col[kept[0]] = c;
                        col[kept[1]] = e;
                        col[traced_slot] = m;
                        let ri = (row[0] * d + row[1]) * d + row[2];
                        let ci = (col[0] * d + col[1]) * d + col[2];
                        acc += full[(ri, ci)];
                    }
                    rho[(a * d + b, c * d + e)] = acc;
                }
            }
        }
    }
    rho
}

/// A Haar-random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    while cols.len() < d {
        let mut v = DVector::from_iterator(
            d,
            (0..d).map(|_| Complex64::new(gaussian(rng), gaussian(rng))),
        );
        for u in &cols {
            let proj = u.dotc(&v);
            v -= u * proj;
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v.unscale(norm));
        }
    }
    DMatrix::from_columns(&cols)
}
