//! Statevector simulation of Trotterized quantum phase estimation for
//! ground-state energy estimation of random Heisenberg spin glasses.
//!
//! The crate is organized around the experiment pipeline:
//!
//! - [`pauli`] — Pauli-string Hamiltonians and the seeded ±1 spin-glass
//!   generator.
//! - [`spectral`] — exact-diagonalization ground truth: eigensystems,
//!   degenerate ground spaces, initial-state overlap χ, the heuristic
//!   evolution time t₀, and digitization-error curves.
//! - [`circuit`] — gate IR, the statevector engine, measurement sampling,
//!   and the candidate initial states.
//! - [`trotter`] — product formulas of orders 1–10, Pauli gadgets, their
//!   controlled versions, and Frobenius-norm Trotter error.
//! - [`qpe`] — the assembled phase-estimation circuit, execution in
//!   Trotterized or exact-propagator mode, and phase decoding.
//! - [`analysis`] — the sampling-rate formulas p(x) and ζ = χ·p(x_opt), and
//!   the sweep experiments built on them.
//!
//! Determinism is a contract throughout: every randomized quantity derives
//! from explicit seeds ([`seeds`]), identical configurations reproduce
//! bit-identical outputs, and sweep parallelism never reorders results.

pub mod analysis;
pub mod circuit;
pub mod error;
pub mod pauli;
pub mod qpe;
pub mod seeds;
pub mod spectral;
pub mod trotter;

pub use circuit::{
    build_initial_state, circuit_unitary, prepare_initial_state, run_circuit, sample_measurements,
    GateCensus, GateOp, QuantumCircuit, ShotHistogram, StateKind, StateVector,
};
pub use error::{Error, Result};
pub use pauli::{InstanceRecord, PauliAxis, PauliTerm, SpinGlassHamiltonian};
pub use qpe::{
    build_qpe_circuit, decode_phase, exact_unitary_qpe, inverse_qft_circuit,
    optimal_phase_bitstring, run_qpe, PhaseSample, QpeConfig, QpeMode, QpeOutcome, RunRecord,
};
pub use spectral::{
    averaged_overlap, digitization_error, exact_diagonalize, ground_energy, heuristic_time,
    overlap_chi, OverlapReport, OverlapStateKind, SpectralDecomposition,
};
pub use trotter::{
    controlled_trotter_circuit, pauli_gadget, suzuki_stages, trotter_circuit, trotter_error,
    TrotterPlan,
};
