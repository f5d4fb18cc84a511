//! Gate-level circuit IR, statevector execution, measurement sampling, and
//! the initial-state builders.
//!
//! Conventions, fixed here and bound by every downstream test:
//!
//! - Qubit 0 is the least-significant index bit of the amplitude array.
//! - Gates apply by direct amplitude-pair updates, never by full-matrix
//!   multiplication, so million-gate circuits at 13–14 qubits remain
//!   tractable.
//! - Measuring qubit list `[q_a, q_b, …]` yields bitstrings where the first
//!   listed qubit is the most significant character.
//! - `RZ(θ) = diag(e^{−iθ/2}, e^{+iθ/2})`.
//! - A `TwoQubitUnitary` on `(q0, q1)` acts on the 4-dimensional subspace
//!   indexed by `2·bit(q0) + bit(q1)` (first listed qubit most significant,
//!   matching the measurement convention).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt::Write as _;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Widest register for which dense circuit unitaries are constructed.
pub const MAX_UNITARY_QUBITS: usize = 6;

/// One gate instruction. Angles are radians.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    H(usize),
    X(usize),
    Cx {
        control: usize,
        target: usize,
    },
    Cz {
        a: usize,
        b: usize,
    },
    Rz {
        qubit: usize,
        theta: f64,
    },
    U3 {
        qubit: usize,
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    Crz {
        control: usize,
        target: usize,
        theta: f64,
    },
    Cp {
        a: usize,
        b: usize,
        theta: f64,
    },
    TwoQubitUnitary {
        q0: usize,
        q1: usize,
        matrix: Box<[[Complex64; 4]; 4]>,
    },
}

impl GateOp {
    /// Qubits touched by this gate.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            GateOp::H(q)
            | GateOp::X(q)
            | GateOp::Rz { qubit: q, .. }
            | GateOp::U3 { qubit: q, .. } => (q, None),
            GateOp::Cx { control, target }
            | GateOp::Crz {
                control, target, ..
            } => (control, Some(target)),
            GateOp::Cz { a, b } | GateOp::Cp { a, b, .. } => (a, Some(b)),
            GateOp::TwoQubitUnitary { q0, q1, .. } => (q0, Some(q1)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    fn angles(&self) -> Vec<f64> {
        match *self {
            GateOp::Rz { theta, .. } | GateOp::Crz { theta, .. } | GateOp::Cp { theta, .. } => {
                vec![theta]
            }
            GateOp::U3 {
                theta, phi, lambda, ..
            } => vec![theta, phi, lambda],
            _ => Vec::new(),
        }
    }

    fn kind_label(&self) -> &'static str {
        match self {
            GateOp::H(_) => "H",
            GateOp::X(_) => "X",
            GateOp::Cx { .. } => "CX",
            GateOp::Cz { .. } => "CZ",
            GateOp::Rz { .. } => "RZ",
            GateOp::U3 { .. } => "U3",
            GateOp::Crz { .. } => "CRZ",
            GateOp::Cp { .. } => "CP",
            GateOp::TwoQubitUnitary { .. } => "TWO_QUBIT_UNITARY",
        }
    }
}

/// Gate counts by arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct GateCensus {
    pub one_qubit: u64,
    pub two_qubit: u64,
    pub total: u64,
}

impl GateCensus {
    pub fn merge(self, other: GateCensus) -> GateCensus {
        GateCensus {
            one_qubit: self.one_qubit + other.one_qubit,
            two_qubit: self.two_qubit + other.two_qubit,
            total: self.total + other.total,
        }
    }

    pub fn scale(self, factor: u64) -> GateCensus {
        GateCensus {
            one_qubit: self.one_qubit * factor,
            two_qubit: self.two_qubit * factor,
            total: self.total * factor,
        }
    }
}

/// An ordered gate list on a fixed-width register. Append order is
/// execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    num_qubits: usize,
    ops: Vec<GateOp>,
}

impl QuantumCircuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            ops: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Append one gate.
    ///
    /// Panics if a qubit index is out of range or a two-qubit gate repeats a
    /// qubit; those are builder bugs, not runtime conditions.
    pub fn push(&mut self, op: GateOp) {
        let (a, b) = op.qubits();
        assert!(
            a < self.num_qubits,
            "qubit {a} out of range for width {}",
            self.num_qubits
        );
        if let Some(b) = b {
            assert!(
                b < self.num_qubits,
                "qubit {b} out of range for width {}",
                self.num_qubits
            );
            assert_ne!(a, b, "two-qubit gate needs distinct qubits, got {a} twice");
        }
        for angle in op.angles() {
            assert!(angle.is_finite(), "gate angle must be finite");
        }
        self.ops.push(op);
    }

    pub fn h(&mut self, q: usize) {
        self.push(GateOp::H(q));
    }

    pub fn x(&mut self, q: usize) {
        self.push(GateOp::X(q));
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        self.push(GateOp::Cx { control, target });
    }

    pub fn cz(&mut self, a: usize, b: usize) {
        self.push(GateOp::Cz { a, b });
    }

    pub fn rz(&mut self, qubit: usize, theta: f64) {
        self.push(GateOp::Rz { qubit, theta });
    }

    pub fn u3(&mut self, qubit: usize, theta: f64, phi: f64, lambda: f64) {
        self.push(GateOp::U3 {
            qubit,
            theta,
            phi,
            lambda,
        });
    }

    pub fn crz(&mut self, control: usize, target: usize, theta: f64) {
        self.push(GateOp::Crz {
            control,
            target,
            theta,
        });
    }

    pub fn cp(&mut self, a: usize, b: usize, theta: f64) {
        self.push(GateOp::Cp { a, b, theta });
    }

    pub fn two_qubit_unitary(&mut self, q0: usize, q1: usize, matrix: [[Complex64; 4]; 4]) {
        self.push(GateOp::TwoQubitUnitary {
            q0,
            q1,
            matrix: Box::new(matrix),
        });
    }

    /// Append all ops of `other`, relabeling its qubit k to `offset + k`.
    pub fn extend_shifted(&mut self, other: &QuantumCircuit, offset: usize) -> Result<()> {
        if offset + other.num_qubits > self.num_qubits {
            return Err(Error::invalid(format!(
                "cannot embed {}-qubit circuit at offset {offset} into width {}",
                other.num_qubits, self.num_qubits
            )));
        }
        for op in &other.ops {
            let shifted = match op.clone() {
                GateOp::H(q) => GateOp::H(q + offset),
                GateOp::X(q) => GateOp::X(q + offset),
                GateOp::Cx { control, target } => GateOp::Cx {
                    control: control + offset,
                    target: target + offset,
                },
                GateOp::Cz { a, b } => GateOp::Cz {
                    a: a + offset,
                    b: b + offset,
                },
                GateOp::Rz { qubit, theta } => GateOp::Rz {
                    qubit: qubit + offset,
                    theta,
                },
                GateOp::U3 {
                    qubit,
                    theta,
                    phi,
                    lambda,
                } => GateOp::U3 {
                    qubit: qubit + offset,
                    theta,
                    phi,
                    lambda,
                },
                GateOp::Crz {
                    control,
                    target,
                    theta,
                } => GateOp::Crz {
                    control: control + offset,
                    target: target + offset,
                    theta,
                },
                GateOp::Cp { a, b, theta } => GateOp::Cp {
                    a: a + offset,
                    b: b + offset,
                    theta,
                },
                GateOp::TwoQubitUnitary { q0, q1, matrix } => GateOp::TwoQubitUnitary {
                    q0: q0 + offset,
                    q1: q1 + offset,
                    matrix,
                },
            };
            self.push(shifted);
        }
        Ok(())
    }

    /// Counts ops by arity.
    pub fn census(&self) -> GateCensus {
        let two = self.ops.iter().filter(|op| op.is_two_qubit()).count() as u64;
        let total = self.ops.len() as u64;
        GateCensus {
            one_qubit: total - two,
            two_qubit: two,
            total,
        }
    }

    /// Line-oriented text export: one gate per line,
    /// `KIND q0[,q1][;θ[,φ,λ]]`. Matrices of embedded two-qubit unitaries
    /// are not serialized; the line records kind and qubits only.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for op in &self.ops {
            let (a, b) = op.qubits();
            let _ = write!(out, "{} {a}", op.kind_label());
            if let Some(b) = b {
                let _ = write!(out, ",{b}");
            }
            let angles = op.angles();
            if !angles.is_empty() {
                let rendered: Vec<String> = angles.iter().map(|x| x.to_string()).collect();
                let _ = write!(out, ";{}", rendered.join(","));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_text().as_bytes())?;
        Ok(())
    }
}

/// Normalized amplitude vector over 2^q basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << num_qubits];
        amps[0] = Complex64::ONE;
        Self { num_qubits, amps }
    }

    /// Wrap an amplitude vector; the length must be a power of two and the
    /// norm must be 1 within 1e−9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count must be a power of two, got {}",
                amps.len()
            )));
        }
        let sv = Self {
            num_qubits: amps.len().trailing_zeros() as usize,
            amps,
        };
        let norm = sv.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "state must be normalized, got ‖ψ‖ = {norm}"
            )));
        }
        Ok(sv)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner_product(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, op: &GateOp) {
        match *op {
            GateOp::H(q) => {
                let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_one_qubit(q, [[s, s], [s, -s]]);
            }
            GateOp::X(q) => {
                let mask = 1usize << q;
                for i0 in pair_iter(self.amps.len(), q) {
                    self.amps.swap(i0, i0 | mask);
                }
            }
            GateOp::Rz { qubit, theta } => {
                let mask = 1usize << qubit;
                let minus = Complex64::from_polar(1.0, -theta / 2.0);
                let plus = Complex64::from_polar(1.0, theta / 2.0);
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & mask == 0 { minus } else { plus };
                }
            }
            GateOp::U3 {
                qubit,
                theta,
                phi,
                lambda,
            } => {
                self.apply_one_qubit(qubit, u3_matrix(theta, phi, lambda));
            }
            GateOp::Cx { control, target } => {
                let c = 1usize << control;
                let t = 1usize << target;
                for i in 0..self.amps.len() {
                    if i & c != 0 && i & t == 0 {
                        self.amps.swap(i, i | t);
                    }
                }
            }
            GateOp::Cz { a, b } => {
                let m = (1usize << a) | (1usize << b);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp = -*amp;
                    }
                }
            }
            GateOp::Crz {
                control,
                target,
                theta,
            } => {
                let c = 1usize << control;
                let t = 1usize << target;
                let minus = Complex64::from_polar(1.0, -theta / 2.0);
                let plus = Complex64::from_polar(1.0, theta / 2.0);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & c != 0 {
                        *amp *= if i & t == 0 { minus } else { plus };
                    }
                }
            }
            GateOp::Cp { a, b, theta } => {
                let m = (1usize << a) | (1usize << b);
                let phase = Complex64::from_polar(1.0, theta);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *amp *= phase;
                    }
                }
            }
            GateOp::TwoQubitUnitary { q0, q1, ref matrix } => {
                self.apply_two_qubit(q0, q1, matrix);
            }
        }
    }

    fn apply_one_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let mask = 1usize << q;
        for i0 in pair_iter(self.amps.len(), q) {
            let i1 = i0 | mask;
            let a0 = self.amps[i0];
            let a1 = self.amps[i1];
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Block index convention: `2·bit(q0) + bit(q1)`.
    fn apply_two_qubit(&mut self, q0: usize, q1: usize, m: &[[Complex64; 4]; 4]) {
        let m0 = 1usize << q0;
        let m1 = 1usize << q1;
        for i in 0..self.amps.len() {
            if i & m0 == 0 && i & m1 == 0 {
                let idx = [i, i | m1, i | m0, i | m0 | m1];
                let v: Vec<Complex64> = idx.iter().map(|&k| self.amps[k]).collect();
                for (row, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|col| m[row][col] * v[col]).sum();
                }
            }
        }
    }

    /// Marginal probabilities over `qubits`, keyed with the first listed
    /// qubit as the most significant bit.
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::invalid("measurement needs at least one qubit"));
        }
        let mut seen = vec![false; self.num_qubits];
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::invalid(format!(
                    "measured qubit {q} out of range for width {}",
                    self.num_qubits
                )));
            }
            if std::mem::replace(&mut seen[q], true) {
                return Err(Error::invalid(format!("qubit {q} listed twice")));
            }
        }
        let width = qubits.len();
        let mut probs = vec![0.0f64; 1 << width];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut key = 0usize;
            for (pos, &q) in qubits.iter().enumerate() {
                if i & (1 << q) != 0 {
                    key |= 1 << (width - 1 - pos);
                }
            }
            probs[key] += p;
        }
        Ok(probs)
    }
}

/// Indices with bit `q` clear, in ascending order: the lower element of
/// every amplitude pair the gate couples.
fn pair_iter(len: usize, q: usize) -> impl Iterator<Item = usize> {
    let low_mask = (1usize << q) - 1;
    (0..len >> 1).map(move |k| ((k >> q) << (q + 1)) | (k & low_mask))
}

fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [
            Complex64::from_polar(s, phi),
            Complex64::from_polar(c, phi + lambda),
        ],
    ]
}

/// Run a circuit on an initial state, returning the final state.
///
/// Gate application is exactly unitary up to floating-point rounding; the
/// norm is preserved to well under 1e−9 across realistic circuit depths.
pub fn run_circuit(circuit: &QuantumCircuit, initial: &StateVector) -> Result<StateVector> {
    if initial.num_qubits() != circuit.num_qubits() {
        return Err(Error::invalid(format!(
            "state has {} qubits, circuit expects {}",
            initial.num_qubits(),
            circuit.num_qubits()
        )));
    }
    let mut state = initial.clone();
    for op in circuit.ops() {
        state.apply(op);
    }
    Ok(state)
}

/// Measured-bitstring counts over a declared qubit subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotHistogram {
    /// Characters per key; first character is the first listed qubit.
    pub width: usize,
    pub total_shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl ShotHistogram {
    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        self.count(bits) as f64 / self.total_shots as f64
    }
}

/// Render a measured index as a bitstring of the given width, most
/// significant bit first.
pub fn index_to_bits(index: u64, width: usize) -> String {
    (0..width)
        .map(|pos| {
            if index & (1 << (width - 1 - pos)) != 0 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Draw `shots` outcomes from the exact marginal distribution on `qubits`.
///
/// Deterministic given `seed`; the returned draws are in sampling order.
pub fn sample_indices(
    state: &StateVector,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be at least 1"));
    }
    let probs = state.marginal_probabilities(qubits)?;
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0f64;
    for p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    // Guard the final edge so u close to 1 cannot fall off the table.
    if let Some(last) = cumulative.last_mut() {
        *last = f64::MAX;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(shots as usize);
    for _ in 0..shots {
        let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let idx = cumulative.partition_point(|&c| c <= u);
        draws.push(idx as u64);
    }
    Ok(draws)
}

/// Sample a histogram of measured bitstrings on `qubits`.
pub fn sample_measurements(
    state: &StateVector,
    qubits: &[usize],
    shots: u64,
    seed: u64,
) -> Result<ShotHistogram> {
    let draws = sample_indices(state, qubits, shots, seed)?;
    Ok(histogram_from_draws(&draws, qubits.len(), shots))
}

pub(crate) fn histogram_from_draws(draws: &[u64], width: usize, shots: u64) -> ShotHistogram {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for &d in draws {
        *counts.entry(index_to_bits(d, width)).or_insert(0) += 1;
    }
    ShotHistogram {
        width,
        total_shots: shots,
        counts,
    }
}

/// Dense unitary of a circuit, column j = circuit applied to basis state j.
///
/// Guarded to 6 qubits.
pub fn circuit_unitary(circuit: &QuantumCircuit) -> Result<DMatrix<Complex64>> {
    let q = circuit.num_qubits();
    if q > MAX_UNITARY_QUBITS {
        return Err(Error::resource(format!(
            "dense circuit unitary limited to {MAX_UNITARY_QUBITS} qubits, got {q}"
        )));
    }
    let dim = 1usize << q;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::ZERO; dim];
        amps[col] = Complex64::ONE;
        let mut state = StateVector {
            num_qubits: q,
            amps,
        };
        for op in circuit.ops() {
            state.apply(op);
        }
        for row in 0..dim {
            u[(row, col)] = state.amps[row];
        }
    }
    Ok(u)
}

/// The candidate initial states for phase estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    AllZero,
    Ghz,
    CliqueGraph,
    QuantumVolumeSu4,
    RandomU3,
    StaggeredX,
}

impl StateKind {
    pub const ALL: [StateKind; 6] = [
        StateKind::AllZero,
        StateKind::Ghz,
        StateKind::CliqueGraph,
        StateKind::QuantumVolumeSu4,
        StateKind::RandomU3,
        StateKind::StaggeredX,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StateKind::AllZero => "all_zero",
            StateKind::Ghz => "ghz",
            StateKind::CliqueGraph => "clique_graph",
            StateKind::QuantumVolumeSu4 => "quantum_volume_su4",
            StateKind::RandomU3 => "random_u3",
            StateKind::StaggeredX => "staggered_x",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        StateKind::ALL
            .into_iter()
            .find(|k| k.label() == label)
            .ok_or_else(|| Error::invalid(format!("unknown state kind {label:?}")))
    }
}

/// Build the preparation circuit for an initial state on `n ≥ 1` qubits.
///
/// - `all_zero`: empty circuit.
/// - `ghz`: H on qubit 0, then a CX chain 0→1→…→n−1.
/// - `clique_graph`: H on every qubit, then CZ on every pair i < j.
/// - `quantum_volume_su4`: n layers; each layer pairs qubits under a seeded
///   random permutation and applies an independent seeded Haar-random SU(4)
///   block to each pair (an odd qubit idles).
/// - `random_u3`: one U3 per qubit, θ ∈ [0, π], φ, λ ∈ [0, 2π).
/// - `staggered_x`: X on every odd-indexed qubit.
pub fn build_initial_state(kind: StateKind, n: usize, seed: u64) -> Result<QuantumCircuit> {
    if n == 0 {
        return Err(Error::invalid("initial state needs at least 1 qubit"));
    }
    let mut c = QuantumCircuit::new(n);
    match kind {
        StateKind::AllZero => {}
        StateKind::Ghz => {
            c.h(0);
            for q in 0..n.saturating_sub(1) {
                c.cx(q, q + 1);
            }
        }
        StateKind::CliqueGraph => {
            for q in 0..n {
                c.h(q);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    c.cz(i, j);
                }
            }
        }
        StateKind::QuantumVolumeSu4 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..n {
                let perm = random_permutation(n, &mut rng);
                for pair in perm.chunks_exact(2) {
                    let block = haar_su4(&mut rng);
                    c.two_qubit_unitary(pair[0], pair[1], block);
                }
            }
        }
        StateKind::RandomU3 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for q in 0..n {
                let theta = uniform(&mut rng) * PI;
                let phi = uniform(&mut rng) * 2.0 * PI;
                let lambda = uniform(&mut rng) * 2.0 * PI;
                c.u3(q, theta, phi, lambda);
            }
        }
        StateKind::StaggeredX => {
            for q in (1..n).step_by(2) {
                c.x(q);
            }
        }
    }
    Ok(c)
}

/// Prepare the state itself: run the builder circuit on |0…0⟩.
pub fn prepare_initial_state(kind: StateKind, n: usize, seed: u64) -> Result<StateVector> {
    let circuit = build_initial_state(kind, n, seed)?;
    run_circuit(&circuit, &StateVector::zero(n))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        // Lemire-free bounded draw; modulo bias is irrelevant at these sizes
        // but rejection keeps the stream consumption simple and exact.
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        perm.swap(i, j);
    }
    perm
}

/// Haar-random SU(4): orthonormalize a complex Gaussian matrix, fix the
/// column phases from the R diagonal, then strip the residual determinant
/// phase. Unitary to machine precision and determinant 1.
pub fn haar_su4(rng: &mut ChaCha8Rng) -> [[Complex64; 4]; 4] {
    let mut cols = [[Complex64::ZERO; 4]; 4];
    for col in cols.iter_mut() {
        for entry in col.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *entry = Complex64::new(re, im);
        }
    }
    // Modified Gram-Schmidt. Its R diagonal is real positive by
    // construction, which is exactly the phase convention that makes the Q
    // factor of a Ginibre matrix Haar-distributed.
    for j in 0..4 {
        for k in 0..j {
            let proj: Complex64 = (0..4).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            let settled = cols[k];
            for (entry, prev) in cols[j].iter_mut().zip(&settled) {
                *entry -= proj * prev;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for entry in cols[j].iter_mut() {
            *entry /= norm;
        }
    }
    // Transpose columns into a row-major matrix.
    let mut u = [[Complex64::ZERO; 4]; 4];
    for (j, col) in cols.iter().enumerate() {
        for (i, entry) in col.iter().enumerate() {
            u[i][j] = *entry;
        }
    }
    // det(U) = e^{iα}; multiply by e^{−iα/4} for SU(4).
    let det = det4(&u);
    let correction = Complex64::from_polar(1.0, -det.arg() / 4.0);
    for row in u.iter_mut() {
        for entry in row.iter_mut() {
            *entry *= correction;
        }
    }
    u
}

fn det4(m: &[[Complex64; 4]; 4]) -> Complex64 {
    let mut a = *m;
    let mut det = Complex64::ONE;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .norm_sqr()
                    .partial_cmp(&a[r2][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if a[pivot][col].norm_sqr() == 0.0 {
            return Complex64::ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let pivot_row = a[col];
        for row in a.iter_mut().skip(col + 1) {
            let factor = row[col] / pivot_row[col];
            for (entry, upper) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= factor * upper;
            }
        }
    }
    det
}
