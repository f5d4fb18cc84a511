//! Phase-estimation assembly, execution, and phase decoding.
//!
//! Register layout: system qubits occupy indices 0..n, phase qubits occupy
//! n..n+m. Phase qubit j (0-based) controls the evolution for time t·2^j;
//! each controlled block is re-synthesized with the same (k, r) plan at its
//! scaled time, so the block for phase qubit j is a fresh product formula
//! for e^{−iHt·2^j}, never a repetition of the base circuit.
//!
//! Decode convention, which every test binds to: a measured phase bitstring
//! φ₁φ₂…φ_m (φ₁ most significant) is the binary fraction
//! φ = 0.φ₁φ₂…φ_m and decodes to the energy Ẽ = −(2π/t)·φ. With the
//! simulated propagator U(t) = e^{−iHt}, an eigenstate of energy E ≤ 0
//! lands on φ ≈ −Et/2π ∈ [0, ½] whenever t‖H‖ ≤ π.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_initial_state, histogram_from_draws, index_to_bits, run_circuit, sample_indices,
    QuantumCircuit, ShotHistogram, StateKind, StateVector,
};
use crate::error::{Error, Result};
use crate::pauli::SpinGlassHamiltonian;
use crate::spectral::{exact_diagonalize, MAX_PHASE_BITS};
use crate::trotter::{controlled_trotter_circuit, TrotterPlan};

/// Widest phase register.
pub const MAX_PREC_BITS: usize = 11;

/// Statevector guard: phase bits + system qubits.
pub const MAX_TOTAL_QUBITS: usize = 14;

/// Largest system for the exact-propagator reference mode.
pub const MAX_EXACT_SITES: usize = 6;

/// How the controlled evolutions are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QpeMode {
    /// Product-formula circuits, re-synthesized per phase qubit.
    Trotterized,
    /// Exact dense propagators V e^{−iΛt·2^j} V†; the zero-Trotter-error
    /// reference.
    ExactUnitary,
}

impl QpeMode {
    pub fn label(self) -> &'static str {
        match self {
            QpeMode::Trotterized => "trotterized",
            QpeMode::ExactUnitary => "exact_unitary",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        match label {
            "trotterized" => Ok(QpeMode::Trotterized),
            "exact_unitary" => Ok(QpeMode::ExactUnitary),
            other => Err(Error::invalid(format!("unknown mode {other:?}"))),
        }
    }
}

/// One phase-estimation configuration.
#[derive(Debug, Clone)]
pub struct QpeConfig {
    pub m_prec: usize,
    pub t: f64,
    pub plan: TrotterPlan,
    pub state_kind: StateKind,
    pub state_seed: u64,
    pub shots: u64,
    pub shot_seed: u64,
    pub mode: QpeMode,
}

impl QpeConfig {
    /// Check the register and parameter guards against an n-site system.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(1..=MAX_PREC_BITS).contains(&self.m_prec) {
            return Err(Error::invalid(format!(
                "phase bits must be in 1..={MAX_PREC_BITS}, got {}",
                self.m_prec
            )));
        }
        if self.m_prec + n > MAX_TOTAL_QUBITS {
            return Err(Error::resource(format!(
                "register {} + {} exceeds the {MAX_TOTAL_QUBITS}-qubit statevector guard",
                self.m_prec, n
            )));
        }
        if !self.t.is_finite() || self.t <= 0.0 {
            return Err(Error::invalid(format!(
                "evolution time must be positive and finite, got {}",
                self.t
            )));
        }
        if self.shots == 0 {
            return Err(Error::invalid("shot count must be at least 1"));
        }
        if self.mode == QpeMode::ExactUnitary && n > MAX_EXACT_SITES {
            return Err(Error::resource(format!(
                "exact-unitary mode limited to {MAX_EXACT_SITES} sites, got {n}"
            )));
        }
        Ok(())
    }
}

/// One decoded measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    /// φ₁ first.
    pub bits: String,
    /// Binary fraction 0.φ₁φ₂… ∈ [0, 1).
    pub phi: f64,
    /// Ẽ = −(2π/t)·φ.
    pub energy: f64,
}

/// Decode a phase bitstring (φ₁ first) at evolution time `t`.
pub fn decode_phase(bits: &str, t: f64) -> Result<PhaseSample> {
    if bits.is_empty() {
        return Err(Error::invalid("phase bitstring must be non-empty"));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::invalid(format!(
            "time must be positive and finite, got {t}"
        )));
    }
    let mut phi = 0.0f64;
    for (i, c) in bits.chars().enumerate() {
        match c {
            '0' => {}
            '1' => phi += 0.5f64.powi(i as i32 + 1),
            other => {
                return Err(Error::invalid(format!(
                    "phase bitstring may contain only 0/1, got {other:?}"
                )));
            }
        }
    }
    Ok(PhaseSample {
        bits: bits.to_string(),
        phi,
        energy: -(2.0 * std::f64::consts::PI / t) * phi,
    })
}

/// The non-digitized ground phase φ = frac(−E₀·t/2π) an eigenvalue E₀
/// imprints on the phase register at evolution time `t`.
pub fn ground_phase(e0: f64, t: f64) -> f64 {
    (-e0 * t / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
}

/// Grid index of the optimal digitized phase:
/// x_opt = round(2^m · frac(−E₀·t/2π)) mod 2^m; exact half-grid ties round
/// up. Fails with a phase-wrap error when t·|E₀| ≥ 2π.
pub fn optimal_phase_index(e0: f64, t: f64, m: usize) -> Result<u64> {
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
            "t·|E₀| = {} aliases past the decodable window 2π",
            t * e0.abs()
        )));
    }
    let phi = ground_phase(e0, t);
    let grid = (1u64 << m) as f64;
    Ok((grid * phi + 0.5).floor() as u64 % (1u64 << m))
}

/// The m-bit string form of [`optimal_phase_index`], φ₁ first.
pub fn optimal_phase_bitstring(e0: f64, t: f64, m: usize) -> Result<String> {
    Ok(index_to_bits(optimal_phase_index(e0, t, m)?, m))
}

/// Exact inverse QFT on a local m-qubit register.
///
/// Input convention: local qubit j carries the relative phase e^{2πi·φ·2^j}
/// of a uniform superposition (exactly what the controlled evolutions
/// imprint on phase qubit j). Output: local qubit j holds bit φ_{j+1}. The
/// textbook bit-reversal is absorbed into this output labeling; no SWAP
/// gates are emitted.
pub fn inverse_qft_circuit(m: usize) -> Result<QuantumCircuit> {
    if !(1..=MAX_PREC_BITS).contains(&m) {
        return Err(Error::invalid(format!(
            "inverse QFT width must be in 1..={MAX_PREC_BITS}, got {m}"
        )));
    }
    let mut c = QuantumCircuit::new(m);
    for j in (0..m).rev() {
        // Strip the already-resolved lower bits φ_{j+2}..φ_m off qubit j,
        // then split φ_{j+1} with a Hadamard.
        for i in ((j + 2)..=m).rev() {
            let angle = -2.0 * std::f64::consts::PI / (1u64 << (i - j)) as f64;
            c.cp(i - 1, j, angle);
        }
        c.h(j);
    }
    Ok(c)
}

/// The full Trotterized phase-estimation circuit on n + m_prec qubits.
///
/// Sequence: initial-state builder on the system register; H on every phase
/// qubit; for j = 0..m_prec the controlled product formula for t·2^j with
/// phase qubit j as control; inverse QFT on the phase register.
pub fn build_qpe_circuit(h: &SpinGlassHamiltonian, cfg: &QpeConfig) -> Result<QuantumCircuit> {
    cfg.validate(h.num_sites())?;
    if cfg.mode != QpeMode::Trotterized {
        return Err(Error::invalid(
            "build_qpe_circuit requires trotterized mode; exact propagators have no gate form",
        ));
    }
    let n = h.num_sites();
    let m = cfg.m_prec;
    let mut circuit = QuantumCircuit::new(n + m);
    let prep = build_initial_state(cfg.state_kind, n, cfg.state_seed)?;
    circuit.extend_shifted(&prep, 0)?;
    for j in 0..m {
        circuit.h(n + j);
    }
    for j in 0..m {
        let scaled_t = cfg.t * (1u64 << j) as f64;
        let block = controlled_trotter_circuit(h, scaled_t, &cfg.plan, n + j)?;
        circuit.extend_shifted(&block, 0)?;
    }
    let iqft = inverse_qft_circuit(m)?;
    circuit.extend_shifted(&iqft, n)?;
    Ok(circuit)
}

/// Phase qubits in measurement order (φ₁ first) for an n-site system.
pub fn phase_qubits(n: usize, m: usize) -> Vec<usize> {
    (0..m).map(|j| n + j).collect()
}

/// Sampled histogram plus the decoded shot list, in sampling order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeOutcome {
    pub histogram: ShotHistogram,
    pub samples: Vec<PhaseSample>,
}

/// Execute phase estimation: one statevector evolution, then `shots`
/// measurement draws from the exact phase-register marginal.
pub fn run_qpe(h: &SpinGlassHamiltonian, cfg: &QpeConfig) -> Result<QpeOutcome> {
    cfg.validate(h.num_sites())?;
    match cfg.mode {
        QpeMode::Trotterized => {
            let circuit = build_qpe_circuit(h, cfg)?;
            let state = run_circuit(&circuit, &StateVector::zero(circuit.num_qubits()))?;
            sample_phase_register(h.num_sites(), &state, cfg)
        }
        QpeMode::ExactUnitary => exact_unitary_qpe(h, cfg),
    }
}

/// Reference pipeline: identical layout, but each controlled block applies
/// the exact propagator U(t·2^j) = V e^{−iΛt·2^j} V† as a dense controlled
/// operator. Zero Trotter error by construction.
pub fn exact_unitary_qpe(h: &SpinGlassHamiltonian, cfg: &QpeConfig) -> Result<QpeOutcome> {
    cfg.validate(h.num_sites())?;
    if cfg.mode != QpeMode::ExactUnitary {
        return Err(Error::invalid(
            "exact_unitary_qpe requires exact_unitary mode",
        ));
    }
    let n = h.num_sites();
    let m = cfg.m_prec;
    let spectral = exact_diagonalize(h)?;

    let mut prep = QuantumCircuit::new(n + m);
    prep.extend_shifted(&build_initial_state(cfg.state_kind, n, cfg.state_seed)?, 0)?;
    for j in 0..m {
        prep.h(n + j);
    }
    let mut state = run_circuit(&prep, &StateVector::zero(n + m))?;

    for j in 0..m {
        let scaled_t = cfg.t * (1u64 << j) as f64;
        let u = spectral.propagator(scaled_t);
        apply_controlled_block(&mut state, n, j, &u);
    }

    let mut tail = QuantumCircuit::new(n + m);
    tail.extend_shifted(&inverse_qft_circuit(m)?, n)?;
    let state = run_circuit(&tail, &state)?;
    sample_phase_register(n, &state, cfg)
}

/// Apply a dense system unitary to every amplitude block whose phase bit
/// `j` is set. System qubits are the low n index bits, so each block is a
/// contiguous 2^n-slice of the amplitude array.
fn apply_controlled_block(
    state: &mut StateVector,
    n: usize,
    control_bit: usize,
    u: &DMatrix<Complex64>,
) {
    let dim = 1usize << n;
    let phase_words = state.amplitudes().len() >> n;
    let mut scratch = vec![Complex64::ZERO; dim];
    let amps = state.amplitudes_mut();
    for p in 0..phase_words {
        if p & (1 << control_bit) == 0 {
            continue;
        }
        let base = p << n;
        let block = &mut amps[base..base + dim];
        for (row, out) in scratch.iter_mut().enumerate() {
            *out = (0..dim).map(|col| u[(row, col)] * block[col]).sum();
        }
        block.copy_from_slice(&scratch);
    }
}

fn sample_phase_register(n: usize, state: &StateVector, cfg: &QpeConfig) -> Result<QpeOutcome> {
    let qubits = phase_qubits(n, cfg.m_prec);
    let draws = sample_indices(state, &qubits, cfg.shots, cfg.shot_seed)?;
    let histogram = histogram_from_draws(&draws, cfg.m_prec, cfg.shots);
    let samples = draws
        .iter()
        .map(|&d| decode_phase(&index_to_bits(d, cfg.m_prec), cfg.t))
        .collect::<Result<Vec<_>>>()?;
    Ok(QpeOutcome { histogram, samples })
}

/// Decoded energies strictly below −bound are non-physical: no eigenvalue
/// can lie below −‖H‖∞, and the coefficient one-norm bounds ‖H‖∞.
pub fn is_non_physical(energy: f64, one_norm_bound: f64) -> bool {
    energy < -one_norm_bound
}

/// Persisted record of one run: Hamiltonian identity, resolved
/// configuration, and results with oracle references when available.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub hamiltonian: HamiltonianRef,
    pub config: RunConfigRecord,
    pub results: RunResults,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianRef {
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfigRecord {
    pub m_prec: usize,
    pub t: f64,
    pub k: u32,
    pub r: u32,
    pub state: String,
    pub shots: u64,
    pub mode: String,
    pub state_seed: u64,
    pub shot_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResults {
    pub histogram: ShotHistogram,
    pub optimal_bits: Option<String>,
    pub optimal_rate: Option<f64>,
    #[serde(rename = "E0_ref")]
    pub e0_ref: Option<f64>,
    pub zeta_ref: Option<f64>,
}

impl RunRecord {
    pub fn new(
        h: &SpinGlassHamiltonian,
        cfg: &QpeConfig,
        outcome: &QpeOutcome,
        e0_ref: Option<f64>,
        zeta_ref: Option<f64>,
        optimal_bits: Option<String>,
    ) -> Self {
        let optimal_rate = optimal_bits
            .as_ref()
            .map(|bits| outcome.histogram.frequency(bits));
        RunRecord {
            hamiltonian: HamiltonianRef {
                n: h.num_sites(),
                seed: h.seed(),
            },
            config: RunConfigRecord {
                m_prec: cfg.m_prec,
                t: cfg.t,
                k: cfg.plan.order(),
                r: cfg.plan.steps(),
                state: cfg.state_kind.label().to_string(),
                shots: cfg.shots,
                mode: cfg.mode.label().to_string(),
                state_seed: cfg.state_seed,
                shot_seed: cfg.shot_seed,
            },
            results: RunResults {
                histogram: outcome.histogram.clone(),
                optimal_bits,
                optimal_rate,
                e0_ref,
                zeta_ref,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::circuit_unitary;
    use crate::pauli::{PauliAxis, PauliTerm};
    use std::f64::consts::PI;

    fn plan(k: u32, r: u32) -> TrotterPlan {
        TrotterPlan::new(k, r).unwrap()
    }

    fn config(m: usize, t: f64, k: u32, r: u32, state: StateKind, mode: QpeMode) -> QpeConfig {
        QpeConfig {
            m_prec: m,
            t,
            plan: plan(k, r),
            state_kind: state,
            state_seed: 1,
            shots: 10_000,
            shot_seed: 2,
            mode,
        }
    }

    #[test]
    fn iqft_m1_is_single_hadamard() {
        let c = inverse_qft_circuit(1).unwrap();
        assert_eq!(c.ops().len(), 1);
        assert!(matches!(c.ops()[0], crate::circuit::GateOp::H(0)));
    }

    #[test]
    fn iqft_gate_counts() {
        let c = inverse_qft_circuit(5).unwrap();
        let census = c.census();
        assert_eq!(census.one_qubit, 5);
        assert_eq!(census.two_qubit, 10);
    }

    #[test]
    fn iqft_resolves_on_grid_kickback() {
        // Prepare ⊗_j (|0⟩ + e^{2πiφ2^j}|1⟩)/√2 for every 3-bit grid phase
        // and check the iQFT lands on the matching basis state.
        let m = 3;
        for x in 0u64..8 {
            let phi = x as f64 / 8.0;
            let mut state = StateVector::zero(m);
            let mut prep = QuantumCircuit::new(m);
            for j in 0..m {
                prep.h(j);
                // Relative phase on |1⟩ of qubit j; RZ differs from the pure
                // phase gate only by a global factor.
                prep.rz(j, 2.0 * PI * phi * (1u64 << j) as f64);
            }
            for op in prep.ops() {
                state.apply(op);
            }
            let iqft = inverse_qft_circuit(m).unwrap();
            let out = run_circuit(&iqft, &state).unwrap();
            // Qubit j holds φ_{j+1}; the measurement list [0, 1, 2] makes
            // qubit 0 the most significant character.
            let probs = out.marginal_probabilities(&[0, 1, 2]).unwrap();
            let winner = probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            assert_eq!(winner.0 as u64, x, "phi = {phi}");
            assert!((winner.1 - 1.0).abs() <= 1e-9, "p = {}", winner.1);
        }
    }

    #[test]
    fn iqft_matches_inverse_dft_with_bit_reversal() {
        // iQFT ∘ F maps |x⟩ to |bitrev(x)⟩ (output qubit j holds φ_{j+1}),
        // so the circuit unitary must equal P_rev · F†, with F the DFT
        // matrix F[z][x] = ω^{zx}/√N. Round-trip identity follows.
        for m in 2..=4usize {
            let dim = 1usize << m;
            let u = circuit_unitary(&inverse_qft_circuit(m).unwrap()).unwrap();
            let omega = 2.0 * PI / dim as f64;
            let f = nalgebra::DMatrix::<Complex64>::from_fn(dim, dim, |z, x| {
                Complex64::from_polar(1.0 / (dim as f64).sqrt(), omega * (z * x) as f64)
            });
            let mut p_rev = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
            for x in 0..dim {
                let mut rev = 0usize;
                for j in 0..m {
                    if x & (1 << (m - 1 - j)) != 0 {
                        rev |= 1 << j;
                    }
                }
                p_rev[(rev, x)] = Complex64::ONE;
            }
            let expected = &p_rev * f.adjoint();
            assert!((&u - expected).norm() <= 1e-10, "m = {m}");
            let eye = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
            assert!(((&u * u.adjoint()) - eye).norm() <= 1e-10);
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_phase("000", 1.0).unwrap().energy, 0.0);
        let s = decode_phase("100", PI / 9.0).unwrap();
        assert!((s.phi - 0.5).abs() <= 1e-15);
        assert!((s.energy + 9.0).abs() <= 1e-12);
        let s = decode_phase("010", PI / 9.0).unwrap();
        assert!((s.phi - 0.25).abs() <= 1e-15);
        assert!((s.energy + 4.5).abs() <= 1e-12);
    }

    #[test]
    fn decode_rejects_bad_input() {
        assert!(decode_phase("", 1.0).is_err());
        assert!(decode_phase("01a", 1.0).is_err());
        assert!(decode_phase("01", 0.0).is_err());
    }

    #[test]
    fn optimal_bitstring_examples() {
        assert_eq!(optimal_phase_bitstring(-9.0, PI / 9.0, 3).unwrap(), "100");
        // On-grid energies decode back exactly.
        let t = PI / 9.0;
        let bits = optimal_phase_bitstring(-4.5, t, 3).unwrap();
        assert_eq!(bits, "010");
        let decoded = decode_phase(&bits, t).unwrap();
        assert!((decoded.energy + 4.5).abs() <= 1e-12);
    }

    #[test]
    fn optimal_bitstring_wrap_guard() {
        assert!(matches!(
            optimal_phase_bitstring(-7.0, 1.0, 3),
            Err(Error::PhaseWrap(_))
        ));
    }

    #[test]
    fn config_guards() {
        let h = SpinGlassHamiltonian::generate(4, 0).unwrap();
        let mut cfg = config(11, 0.3, 2, 1, StateKind::AllZero, QpeMode::Trotterized);
        assert!(matches!(
            cfg.validate(h.num_sites()),
            Err(Error::ResourceLimit(_))
        ));
        cfg.m_prec = 12;
        assert!(matches!(
            cfg.validate(h.num_sites()),
            Err(Error::InvalidArgument(_))
        ));
        cfg.m_prec = 3;
        cfg.t = -1.0;
        assert!(cfg.validate(h.num_sites()).is_err());
        cfg.t = f64::NAN;
        assert!(cfg.validate(h.num_sites()).is_err());
    }

    #[test]
    fn exact_mode_site_guard() {
        let h = SpinGlassHamiltonian::generate(7, 0).unwrap();
        let cfg = config(3, 0.05, 2, 1, StateKind::AllZero, QpeMode::ExactUnitary);
        assert!(matches!(
            cfg.validate(h.num_sites()),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn census_additivity_of_qpe_circuit() {
        let h = SpinGlassHamiltonian::generate(3, 7).unwrap();
        let cfg = config(3, PI / 9.0, 2, 2, StateKind::Ghz, QpeMode::Trotterized);
        let full = build_qpe_circuit(&h, &cfg).unwrap().census();

        let n = h.num_sites();
        let prep = build_initial_state(cfg.state_kind, n, cfg.state_seed)
            .unwrap()
            .census();
        let mut blocks = crate::circuit::GateCensus::default();
        for j in 0..cfg.m_prec {
            let block =
                controlled_trotter_circuit(&h, cfg.t * (1u64 << j) as f64, &cfg.plan, n + j)
                    .unwrap();
            blocks = blocks.merge(block.census());
        }
        let iqft = inverse_qft_circuit(cfg.m_prec).unwrap().census();
        let hadamards = crate::circuit::GateCensus {
            one_qubit: cfg.m_prec as u64,
            two_qubit: 0,
            total: cfg.m_prec as u64,
        };
        assert_eq!(full, prep.merge(hadamards).merge(blocks).merge(iqft));
    }

    #[test]
    fn textbook_exact_qpe_concentrates() {
        // Z₀Z₁ with the staggered-X eigenstate |q1=1, q0=0⟩: E = −1.
        let term = PauliTerm::two_site(2, 0, 1, PauliAxis::Z, 1.0).unwrap();
        let h = SpinGlassHamiltonian::from_terms(2, 0, vec![term]).unwrap();
        let m = 3;
        let t = 2.0 * PI * 3.0 / 8.0; // φ = 3/8, exactly on the 3-bit grid
        let cfg = config(m, t, 2, 1, StateKind::StaggeredX, QpeMode::ExactUnitary);
        let outcome = run_qpe(&h, &cfg).unwrap();
        let bits = optimal_phase_bitstring(-1.0, t, m).unwrap();
        assert_eq!(bits, "011");
        assert_eq!(outcome.histogram.count(&bits), cfg.shots);
    }

    #[test]
    fn trotterized_matches_exact_on_commuting_hamiltonian() {
        // All-ZZ Hamiltonians are exactly Trotterized at k=1, r=1, so both
        // modes must produce identical distributions.
        let term = PauliTerm::two_site(2, 0, 1, PauliAxis::Z, -1.0).unwrap();
        let h = SpinGlassHamiltonian::from_terms(2, 0, vec![term]).unwrap();
        let t = 0.9;
        let trot = run_qpe(
            &h,
            &config(3, t, 1, 1, StateKind::Ghz, QpeMode::Trotterized),
        )
        .unwrap();
        let exact = run_qpe(
            &h,
            &config(3, t, 1, 1, StateKind::Ghz, QpeMode::ExactUnitary),
        )
        .unwrap();
        assert_eq!(trot.histogram, exact.histogram);
    }

    #[test]
    fn samples_decode_within_support_window() {
        let h = SpinGlassHamiltonian::generate(3, 7).unwrap();
        let t = crate::spectral::heuristic_time(&h);
        let cfg = config(3, t, 2, 4, StateKind::AllZero, QpeMode::Trotterized);
        let outcome = run_qpe(&h, &cfg).unwrap();
        for s in &outcome.samples {
            assert!(s.energy <= 0.0);
            assert!(s.energy > -(2.0 * PI / t));
        }
        assert_eq!(outcome.samples.len(), cfg.shots as usize);
        let total: u64 = outcome.histogram.counts.values().sum();
        assert_eq!(total, cfg.shots);
    }

    #[test]
    fn non_physical_flagging_uses_bound() {
        assert!(is_non_physical(-9.5, 9.0));
        assert!(!is_non_physical(-9.0, 9.0));
        assert!(!is_non_physical(-0.1, 9.0));
    }

    #[test]
    fn run_is_deterministic() {
        let h = SpinGlassHamiltonian::generate(3, 3).unwrap();
        let cfg = config(3, 0.3, 2, 2, StateKind::RandomU3, QpeMode::Trotterized);
        let a = run_qpe(&h, &cfg).unwrap();
        let b = run_qpe(&h, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
