//! Exact-diagonalization ground truth.
//!
//! Everything here exists to *validate* phase-estimation sampling, never to
//! construct circuits: full Hermitian eigensystems, the degenerate ground
//! space, the initial-state overlap
//!
//!   χ = Σ_{ψ₂ ∈ v₀} |⟨ψ₁|ψ₂⟩|²,
//!
//! the heuristic evolution time t₀ = π / (3·|E|·|J|), and the digitization
//! error of reading an eigenvalue off the m-bit decode grid
//! Ẽ(x) = −(2π/t)·x/2^m.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{prepare_initial_state, StateKind, StateVector};
use crate::error::{Error, Result};
use crate::pauli::SpinGlassHamiltonian;
use crate::seeds;

/// Largest site count for which the full eigensystem is computed.
pub const MAX_DIAG_SITES: usize = 10;

/// Eigenvalues equal within this threshold are treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Phase-bit range over which digitization error is defined.
pub const MAX_PHASE_BITS: usize = 22;

/// Full Hermitian eigensystem, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    eigenvectors: DMatrix<Complex64>,
    degeneracy_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// Ground-state energy E₀ (smallest eigenvalue).
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest |eigenvalue|: the spectral norm of the Hamiltonian.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()))
    }

    /// Eigenvectors whose eigenvalue is within the degeneracy tolerance of
    /// E₀. Never empty.
    pub fn ground_space(&self) -> Vec<DVector<Complex64>> {
        let e0 = self.ground_energy();
        self.eigenvalues
            .iter()
            .enumerate()
            .take_while(|(_, &lam)| (lam - e0).abs() <= self.degeneracy_tolerance)
            .map(|(i, _)| self.eigenvectors.column(i).into_owned())
            .collect()
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.ground_space().len()
    }

    /// Exact propagator e^{−iHt} = V e^{−iΛt} V†.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let dim = self.eigenvalues.len();
        let mut phases = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, &lam) in self.eigenvalues.iter().enumerate() {
            phases[(i, i)] = Complex64::from_polar(1.0, -lam * t);
        }
        &self.eigenvectors * phases * self.eigenvectors.adjoint()
    }
}

/// Full exact diagonalization of the Hamiltonian's dense matrix.
///
/// Guarded to n ≤ 10 (2^10-dimensional dense eigensystem).
pub fn exact_diagonalize(h: &SpinGlassHamiltonian) -> Result<SpectralDecomposition> {
    let n = h.num_sites();
    if n > MAX_DIAG_SITES {
        return Err(Error::resource(format!(
            "exact diagonalization limited to {MAX_DIAG_SITES} sites, got {n}"
        )));
    }
    let m = h.to_dense_matrix()?;
    let hermiticity = (&m - m.adjoint()).norm();
    if hermiticity > 1e-12 {
        return Err(Error::invariant(format!(
            "constructed matrix is not Hermitian (defect {hermiticity:.3e})"
        )));
    }
    let eig = m.symmetric_eigen();
    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        degeneracy_tolerance: DEGENERACY_TOLERANCE,
    })
}

/// Ground-state energy only, via the eigenvalues-only path.
///
/// Cheaper than [`exact_diagonalize`] when no eigenvectors are needed
/// (digitization curves over many instances).
pub fn ground_energy(h: &SpinGlassHamiltonian) -> Result<f64> {
    if h.num_sites() > MAX_DIAG_SITES {
        return Err(Error::resource(format!(
            "exact diagonalization limited to {MAX_DIAG_SITES} sites, got {}",
            h.num_sites()
        )));
    }
    let m = h.to_dense_matrix()?;
    let eigenvalues = m.symmetric_eigenvalues();
    Ok(eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// Squared projection of `state` onto the span of `ground`, clamped to [0, 1].
///
/// `state` must be normalized to 1e−10; the ground vectors are assumed
/// orthonormal (they come from the eigensolver).
pub fn overlap_chi(state: &[Complex64], ground: &[DVector<Complex64>]) -> Result<f64> {
    let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "overlap input must be normalized, got ‖ψ‖ = {norm}"
        )));
    }
    let mut chi = 0.0f64;
    for vec in ground {
        if vec.len() != state.len() {
            return Err(Error::invalid(format!(
                "dimension mismatch: state {} vs eigenvector {}",
                state.len(),
                vec.len()
            )));
        }
        let dot: Complex64 = vec.iter().zip(state).map(|(g, s)| g.conj() * s).sum();
        chi += dot.norm_sqr();
    }
    Ok(chi.clamp(0.0, 1.0))
}

/// Heuristic evolution time t₀ = π / (3·|E|·|J|) with |E| = n(n−1)/2, |J| = 1.
///
/// Uses only the coefficient one-norm, never spectral information, so the
/// choice stays black-box with respect to the Hamiltonian. No aliasing can
/// occur at this time because the one-norm bounds the spectral norm.
pub fn heuristic_time(h: &SpinGlassHamiltonian) -> f64 {
    std::f64::consts::PI / h.coefficient_one_norm()
}

/// Smallest distance from E₀ to any decode-grid energy Ẽ(x) = −(2π/t)·x/2^m,
/// minimized over x ∈ {0, …, 2^m − 1}.
pub fn digitization_error(e0: f64, t: f64, m: usize) -> Result<f64> {
    if !(1..=MAX_PHASE_BITS).contains(&m) {
        return Err(Error::invalid(format!(
            "phase bits must be in 1..={MAX_PHASE_BITS}, got {m}"
        )));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::invalid(format!(
            "time must be positive and finite, got {t}"
        )));
    }
    if t * e0.abs() >= 2.0 * std::f64::consts::PI {
        return Err(Error::PhaseWrap(format!(
            "t·|E₀| = {} exceeds the decodable window 2π",
            t * e0.abs()
        )));
    }
    let grid = (1u64 << m) as f64;
    let spacing = 2.0 * std::f64::consts::PI / t / grid;
    // The closest grid point to E₀ is one of the two integers bracketing
    // −E₀/spacing, clamped into {0, …, 2^m − 1}.
    let x_real = -e0 / spacing;
    let max_x = grid - 1.0;
    let lower = x_real.floor().clamp(0.0, max_x);
    let upper = x_real.ceil().clamp(0.0, max_x);
    let err_at = |x: f64| (e0 + spacing * x).abs();
    Ok(err_at(lower).min(err_at(upper)))
}

/// One row of the digitization-error curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigitizationRow {
    pub n: usize,
    pub m: usize,
    pub t: f64,
    pub error: f64,
}

/// Digitization-error curve for one instance across a range of phase bits.
pub fn digitization_curve(
    h: &SpinGlassHamiltonian,
    t: f64,
    m_range: impl IntoIterator<Item = usize>,
) -> Result<Vec<DigitizationRow>> {
    let e0 = ground_energy(h)?;
    m_range
        .into_iter()
        .map(|m| {
            Ok(DigitizationRow {
                n: h.num_sites(),
                m,
                t,
                error: digitization_error(e0, t, m)?,
            })
        })
        .collect()
}

pub fn write_digitization_csv<W: Write>(rows: &[DigitizationRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["n", "m", "t", "error"])?;
    for r in rows {
        writer.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.t.to_string(),
            r.error.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Overlap of one prepared state against one instance's ground space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapReport {
    pub state_kind: String,
    pub chi: f64,
    pub ground_degeneracy: usize,
    #[serde(rename = "E0")]
    pub e0: f64,
}

/// State kinds admissible in overlap studies: the six circuit-prepared
/// states, plus the exact ground eigenvector as an oracle reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapStateKind {
    Prepared(StateKind),
    ExactGround,
}

impl OverlapStateKind {
    pub fn label(self) -> &'static str {
        match self {
            OverlapStateKind::Prepared(k) => k.label(),
            OverlapStateKind::ExactGround => "exact_ground",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        if label == "exact_ground" {
            return Ok(OverlapStateKind::ExactGround);
        }
        Ok(OverlapStateKind::Prepared(StateKind::parse(label)?))
    }
}

/// Compute χ for a single instance and state kind.
pub fn overlap_report(
    h: &SpinGlassHamiltonian,
    kind: OverlapStateKind,
    state_seed: u64,
) -> Result<OverlapReport> {
    let spectral = exact_diagonalize(h)?;
    let ground = spectral.ground_space();
    let state: StateVector = match kind {
        OverlapStateKind::Prepared(k) => prepare_initial_state(k, h.num_sites(), state_seed)?,
        OverlapStateKind::ExactGround => {
            StateVector::from_amplitudes(ground[0].iter().cloned().collect())?
        }
    };
    let chi = overlap_chi(state.amplitudes(), &ground)?;
    Ok(OverlapReport {
        state_kind: kind.label().to_string(),
        chi,
        ground_degeneracy: ground.len(),
        e0: spectral.ground_energy(),
    })
}

/// Mean χ per state kind over seeded random instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AveragedOverlapRow {
    pub n: usize,
    pub state_kind: String,
    pub mean_chi: f64,
    pub instances: usize,
}

/// Average the overlap of each state kind over `instances` random
/// Hamiltonians on `n` sites.
///
/// Instance seeds and per-instance state seeds derive from `master_seed`;
/// instances are evaluated in parallel but the means accumulate in instance
/// order, so the output is bit-stable for a fixed master seed.
pub fn averaged_overlap(
    n: usize,
    instances: usize,
    kinds: &[OverlapStateKind],
    master_seed: u64,
) -> Result<Vec<AveragedOverlapRow>> {
    if instances == 0 {
        return Err(Error::invalid("need at least one instance"));
    }
    let per_instance: Vec<Vec<f64>> = (0..instances)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let instance_seed = seeds::derive(master_seed, 2 * i as u64);
            let state_seed = seeds::derive(master_seed, 2 * i as u64 + 1);
            let h = SpinGlassHamiltonian::generate(n, instance_seed)?;
            let spectral = exact_diagonalize(&h)?;
            let ground = spectral.ground_space();
            kinds
                .iter()
                .map(|kind| {
                    let state = match kind {
                        OverlapStateKind::Prepared(k) => prepare_initial_state(*k, n, state_seed)?,
                        OverlapStateKind::ExactGround => {
                            StateVector::from_amplitudes(ground[0].iter().cloned().collect())?
                        }
                    };
                    overlap_chi(state.amplitudes(), &ground)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    Ok(kinds
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let sum: f64 = per_instance.iter().map(|row| row[k]).sum();
            AveragedOverlapRow {
                n,
                state_kind: kind.label().to_string(),
                mean_chi: sum / instances as f64,
                instances,
            }
        })
        .collect())
}

pub fn write_averaged_overlap_csv<W: Write>(rows: &[AveragedOverlapRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["n", "state_kind", "mean_chi", "instances"])?;
    for r in rows {
        writer.write_record([
            r.n.to_string(),
            r.state_kind.clone(),
            r.mean_chi.to_string(),
            r.instances.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliAxis, PauliTerm};
    use std::f64::consts::PI;

    fn single_zz() -> SpinGlassHamiltonian {
        let term = PauliTerm::two_site(2, 0, 1, PauliAxis::Z, 1.0).unwrap();
        SpinGlassHamiltonian::from_terms(2, 0, vec![term]).unwrap()
    }

    #[test]
    fn zz_eigensystem() {
        let s = exact_diagonalize(&single_zz()).unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in s.eigenvalues().iter().zip(expect) {
            assert!((got - want).abs() <= 1e-12);
        }
        assert_eq!(s.ground_degeneracy(), 2);
    }

    #[test]
    fn eigenvalues_sum_to_trace_zero() {
        let h = SpinGlassHamiltonian::generate(3, 7).unwrap();
        let s = exact_diagonalize(&h).unwrap();
        let sum: f64 = s.eigenvalues().iter().sum();
        assert!(sum.abs() <= 1e-9, "Σλ = {sum}");
        assert!(s.ground_energy() < 0.0);
    }

    #[test]
    fn ground_space_matches_threshold_scan() {
        let h = SpinGlassHamiltonian::generate(3, 13).unwrap();
        let s = exact_diagonalize(&h).unwrap();
        let e0 = s.ground_energy();
        let scan = s
            .eigenvalues()
            .iter()
            .filter(|&&lam| (lam - e0).abs() <= DEGENERACY_TOLERANCE)
            .count();
        assert_eq!(s.ground_degeneracy(), scan);
        assert!(scan >= 1);
    }

    #[test]
    fn reconstruction_residual_and_orthonormality() {
        for (n, seed) in [(4usize, 3u64), (8, 3)] {
            let h = SpinGlassHamiltonian::generate(n, seed).unwrap();
            let m = h.to_dense_matrix().unwrap();
            let s = exact_diagonalize(&h).unwrap();
            let dim = s.eigenvalues().len();
            let lam = DMatrix::from_diagonal(&DVector::from_iterator(
                dim,
                s.eigenvalues().iter().map(|&x| Complex64::new(x, 0.0)),
            ));
            let rec = s.eigenvectors() * lam * s.eigenvectors().adjoint();
            assert!((rec - m).norm() <= 1e-9, "n={n} reconstruction");
            let gram = s.eigenvectors().adjoint() * s.eigenvectors();
            let eye = DMatrix::<Complex64>::identity(dim, dim);
            assert!((gram - eye).norm() <= 1e-10, "n={n} orthonormality");
            assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn chi_of_ground_vector_is_one() {
        let h = SpinGlassHamiltonian::generate(3, 5).unwrap();
        let s = exact_diagonalize(&h).unwrap();
        let ground = s.ground_space();
        let amps: Vec<Complex64> = ground[0].iter().cloned().collect();
        let chi = overlap_chi(&amps, &ground).unwrap();
        assert!((chi - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn chi_orthogonal_state_is_zero() {
        let s = exact_diagonalize(&single_zz()).unwrap();
        // Ground space of Z₀Z₁ is span{|01⟩, |10⟩}; |00⟩ is orthogonal.
        let mut amps = vec![Complex64::ZERO; 4];
        amps[0] = Complex64::ONE;
        let chi = overlap_chi(&amps, &s.ground_space()).unwrap();
        assert!(chi <= 1e-12);
    }

    #[test]
    fn chi_rejects_unnormalized() {
        let s = exact_diagonalize(&single_zz()).unwrap();
        let amps = vec![Complex64::new(0.7, 0.0); 4];
        assert!(matches!(
            overlap_chi(&amps, &s.ground_space()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn chi_completeness_over_full_basis() {
        let h = SpinGlassHamiltonian::generate(3, 21).unwrap();
        let s = exact_diagonalize(&h).unwrap();
        let all: Vec<DVector<Complex64>> = (0..s.eigenvalues().len())
            .map(|i| s.eigenvectors().column(i).into_owned())
            .collect();
        let state = prepare_initial_state(StateKind::Ghz, 3, 0).unwrap();
        let chi = overlap_chi(state.amplitudes(), &all).unwrap();
        assert!((chi - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn heuristic_time_values() {
        let h3 = SpinGlassHamiltonian::generate(3, 0).unwrap();
        assert!((heuristic_time(&h3) - PI / 9.0).abs() <= 1e-15);
        let h4 = SpinGlassHamiltonian::generate(4, 0).unwrap();
        assert!((heuristic_time(&h4) - PI / 18.0).abs() <= 1e-15);
        assert!((heuristic_time(&h3) * h3.coefficient_one_norm() - PI).abs() <= 1e-12);
    }

    #[test]
    fn no_aliasing_at_heuristic_time() {
        for seed in [0u64, 1, 2] {
            let h = SpinGlassHamiltonian::generate(3, seed).unwrap();
            let s = exact_diagonalize(&h).unwrap();
            assert!(heuristic_time(&h) * s.spectral_norm() <= PI + 1e-12);
        }
    }

    #[test]
    fn digitization_on_grid_is_exact() {
        // E₀ = −9, t = π/9: φ = 0.5, exactly on every grid with m ≥ 1.
        for m in 1..=10 {
            let err = digitization_error(-9.0, PI / 9.0, m).unwrap();
            assert!(err <= 1e-12, "m={m} err={err}");
        }
    }

    #[test]
    fn digitization_nested_grids() {
        let h = SpinGlassHamiltonian::generate(3, 7).unwrap();
        let e0 = ground_energy(&h).unwrap();
        let t = heuristic_time(&h);
        let mut prev = f64::INFINITY;
        for m in 1..=MAX_PHASE_BITS {
            let err = digitization_error(e0, t, m).unwrap();
            assert!(err <= prev + 1e-15, "m={m}: {err} > {prev}");
            assert!(err <= 2.0 * PI / t / (1u64 << (m + 1)) as f64 + 1e-12);
            prev = err;
        }
    }

    #[test]
    fn digitization_guards() {
        assert!(matches!(
            digitization_error(-1.0, 1.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            digitization_error(-1.0, 1.0, 23),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            digitization_error(-7.0, 1.0, 4),
            Err(Error::PhaseWrap(_))
        ));
    }

    #[test]
    fn ground_energy_matches_full_diagonalization() {
        let h = SpinGlassHamiltonian::generate(4, 17).unwrap();
        let fast = ground_energy(&h).unwrap();
        let full = exact_diagonalize(&h).unwrap().ground_energy();
        assert!((fast - full).abs() <= 1e-9);
    }

    #[test]
    fn averaged_overlap_exact_ground_is_one() {
        let rows = averaged_overlap(3, 5, &[OverlapStateKind::ExactGround], 9).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].mean_chi - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn averaged_overlap_means_in_unit_interval() {
        let kinds: Vec<OverlapStateKind> = StateKind::ALL
            .into_iter()
            .map(OverlapStateKind::Prepared)
            .collect();
        let rows = averaged_overlap(3, 8, &kinds, 2).unwrap();
        for r in &rows {
            assert!((0.0..=1.0).contains(&r.mean_chi), "{r:?}");
        }
    }

    #[test]
    fn averaged_overlap_deterministic() {
        let kinds = [OverlapStateKind::Prepared(StateKind::RandomU3)];
        let a = averaged_overlap(3, 4, &kinds, 5).unwrap();
        let b = averaged_overlap(3, 4, &kinds, 5).unwrap();
        assert_eq!(a[0].mean_chi.to_bits(), b[0].mean_chi.to_bits());
    }
}
