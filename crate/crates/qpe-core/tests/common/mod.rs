//! Independent oracles shared by the integration tests.
//!
//! Everything here deliberately avoids the library's circuit-synthesis and
//! closed-form code paths: Pauli exponentials come from the cos/sin
//! identity, minimum eigenvalues from shifted power iteration, digitization
//! errors from brute-force grid enumeration.
#![allow(dead_code)] // each test binary uses its own subset

use nalgebra::DMatrix;
use num_complex::Complex64;
use qpe_core::pauli::PauliTerm;
use qpe_core::{ShotHistogram, SpinGlassHamiltonian};

/// exp(−iθP) for a coefficient-free Pauli string via the algebraic identity
/// exp(−iθP) = cos(θ)·I − i·sin(θ)·P, valid because P² = I. The term's
/// coefficient is ignored, matching the gadget contract where the caller
/// folds coefficients into the angle.
pub fn dense_pauli_exponential(term: &PauliTerm, theta: f64) -> DMatrix<Complex64> {
    let unit = PauliTerm::new(term.axes().to_vec(), 1.0).unwrap();
    let h = SpinGlassHamiltonian::from_terms(term.num_sites(), 0, vec![unit]).unwrap();
    let p = h.to_dense_matrix().unwrap();
    let dim = p.nrows();
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    eye * Complex64::new(theta.cos(), 0.0) + p * Complex64::new(0.0, -theta.sin())
}

/// Embed a system unitary as a controlled operator with the control as the
/// highest qubit: block-diagonal(I, U).
pub fn controlled_embed(u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let dim = u.nrows();
    let mut out = DMatrix::<Complex64>::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        out[(i, i)] = Complex64::ONE;
        for j in 0..dim {
            out[(dim + i, dim + j)] = u[(i, j)];
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian matrix by power iteration on the
/// shifted operator cI − M with c = Σ|row sums| bound, so the smallest
/// eigenvalue of M becomes the dominant one.
pub fn power_iteration_min_eigenvalue(m: &DMatrix<Complex64>, iterations: usize) -> f64 {
    let dim = m.nrows();
    let shift: f64 = (0..dim)
        .map(|r| (0..dim).map(|c| m[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    let shifted = &eye * Complex64::new(shift, 0.0) - m;
    let mut v = DMatrix::<Complex64>::from_fn(dim, 1, |r, _| {
        Complex64::new(1.0 + (r as f64) * 0.37, 0.13 * (r as f64 + 1.0))
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut rayleigh = 0.0;
    for _ in 0..iterations {
        let w = &shifted * &v;
        let norm = w.norm();
        v = w / Complex64::new(norm, 0.0);
        rayleigh = norm;
    }
    shift - rayleigh
}

/// Brute-force digitization error: enumerate every decode-grid energy.
pub fn digitization_error_by_enumeration(e0: f64, t: f64, m: usize) -> f64 {
    (0..(1u64 << m))
        .map(|x| {
            let energy = -(2.0 * std::f64::consts::PI / t) * (x as f64) / (1u64 << m) as f64;
            (e0 - energy).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Total-variation distance between two shot histograms.
pub fn tv_distance(a: &ShotHistogram, b: &ShotHistogram) -> f64 {
    let keys: std::collections::BTreeSet<&String> =
        a.counts.keys().chain(b.counts.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.frequency(k) - b.frequency(k)).abs())
        .sum::<f64>()
}

/// Least-squares slope of y against x.
pub fn linear_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
