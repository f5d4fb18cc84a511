//! Sampling-rate formulas and the sweep experiments built on them.
//!
//! The single-line phase distribution for a register of m phase bits at
//! non-digitized phase φ is
//!
//!   p(x) = (1 / 2^{2m}) · sin²(π(2^m φ − x)) / sin²(π(φ − x/2^m)),
//!
//! with the removable singularity at φ = x/2^m evaluating to 1. The 1/2^{2m}
//! prefactor makes p a proper distribution over x (Σ_x p = 1), gives exactly
//! 1 on-grid, and approaches the midpoint floor 4/π² from above. Combined
//! with the initial-state overlap χ, the steady-state optimal-phase sampling
//! rate is ζ = χ · p(x_opt): the frequency phase estimation converges to
//! once the product formula approximates the evolution well enough.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{build_initial_state, run_circuit, StateKind, StateVector};
use crate::error::{Error, Result};
use crate::pauli::SpinGlassHamiltonian;
use crate::qpe::inverse_qft_circuit;
use crate::qpe::{
    build_qpe_circuit, ground_phase, optimal_phase_index, run_qpe, PhaseSample, QpeConfig, QpeMode,
};
use crate::seeds;
use crate::spectral::{exact_diagonalize, heuristic_time, overlap_chi, MAX_PHASE_BITS};
use crate::trotter::{controlled_trotter_circuit, trotter_error, TrotterPlan, MAX_ERROR_SITES};

/// Single-line probability p(x) of measuring grid index x at phase φ.
pub fn phase_line_probability(phi: f64, x: u64, m: usize) -> Result<f64> {
    if !(1..=MAX_PHASE_BITS).contains(&m) {
        return Err(Error::invalid(format!(
            "phase bits must be in 1..={MAX_PHASE_BITS}, got {m}"
        )));
    }
    if !(0.0..1.0).contains(&phi) {
        return Err(Error::invalid(format!(
            "phase must lie in [0, 1), got {phi}"
        )));
    }
    let grid = (1u64 << m) as f64;
    if x as f64 >= grid {
        return Err(Error::invalid(format!(
            "grid index {x} out of range for m = {m}"
        )));
    }
    let d = phi - x as f64 / grid;
    if d == 0.0 {
        return Ok(1.0);
    }
    let ratio = (std::f64::consts::PI * grid * d).sin() / (grid * (std::f64::consts::PI * d).sin());
    Ok((ratio * ratio).clamp(0.0, 1.0))
}

/// ζ = χ · p(x_opt): the steady-state optimal-phase sampling rate.
pub fn steady_state_rate(chi: f64, p_opt: f64) -> Result<f64> {
    for (name, v) in [("chi", chi), ("p_opt", p_opt)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!(
                "{name} must lie in [0, 1], got {v}"
            )));
        }
    }
    Ok(chi * p_opt)
}

/// One sweep point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Swept axis label: "r", "t", or "exact" for the reference row.
    pub axis: String,
    pub value: f64,
    pub optimal_rate: f64,
    pub zeta: f64,
    pub p_opt: f64,
    pub chi: f64,
    pub trotter_error: Option<f64>,
    pub gates_1q: u64,
    pub gates_2q: u64,
}

/// Oracle context shared by all points of one sweep.
struct SweepOracle {
    e0: f64,
    chi: f64,
}

fn sweep_oracle(
    h: &SpinGlassHamiltonian,
    state_kind: StateKind,
    state_seed: u64,
) -> Result<SweepOracle> {
    let spectral = exact_diagonalize(h)?;
    let ground = spectral.ground_space();
    let prep = build_initial_state(state_kind, h.num_sites(), state_seed)?;
    let state = run_circuit(&prep, &StateVector::zero(h.num_sites()))?;
    let chi = overlap_chi(state.amplitudes(), &ground)?;
    Ok(SweepOracle {
        e0: spectral.ground_energy(),
        chi,
    })
}

/// Seed layout shared by the sweep drivers: stream 0 is the initial state,
/// streams 1.. are per-job shot seeds.
fn sweep_seeds(master_seed: u64, job: u64) -> (u64, u64) {
    (
        seeds::derive(master_seed, 0),
        seeds::derive(master_seed, 1 + job),
    )
}

/// Optimal-phase sampling rate as a function of Trotter steps r at fixed
/// (m_prec, t, k). Each point runs a full phase estimation; ζ, p_opt, and χ
/// come from the exact-diagonalization oracle and are constant along the
/// sweep. The Trotter-error column is evaluated at the deepest controlled
/// block's time t·2^{m_prec−1} when the system is small enough for dense
/// norms.
#[allow(clippy::too_many_arguments)]
pub fn sweep_trotter_steps(
    h: &SpinGlassHamiltonian,
    m_prec: usize,
    t: f64,
    order: u32,
    r_list: &[u32],
    state_kind: StateKind,
    shots: u64,
    master_seed: u64,
) -> Result<Vec<SweepRecord>> {
    let oracle = sweep_oracle(h, state_kind, seeds::derive(master_seed, 0))?;
    let x_opt = optimal_phase_index(oracle.e0, t, m_prec)?;
    let p_opt = phase_line_probability(ground_phase(oracle.e0, t), x_opt, m_prec)?;
    let zeta = steady_state_rate(oracle.chi, p_opt)?;
    let bits = crate::circuit::index_to_bits(x_opt, m_prec);
    let deep_time = t * (1u64 << (m_prec - 1)) as f64;

    r_list
        .par_iter()
        .enumerate()
        .map(|(job, &r)| {
            let (state_seed, shot_seed) = sweep_seeds(master_seed, job as u64);
            let plan = TrotterPlan::new(order, r)?;
            let cfg = QpeConfig {
                m_prec,
                t,
                plan: plan.clone(),
                state_kind,
                state_seed,
                shots,
                shot_seed,
                mode: QpeMode::Trotterized,
            };
            let census = build_qpe_circuit(h, &cfg)?.census();
            let outcome = run_qpe(h, &cfg)?;
            let error = if h.num_sites() <= MAX_ERROR_SITES {
                Some(trotter_error(h, deep_time, &plan)?)
            } else {
                None
            };
            Ok(SweepRecord {
                axis: "r".to_string(),
                value: f64::from(r),
                optimal_rate: outcome.histogram.frequency(&bits),
                zeta,
                p_opt,
                chi: oracle.chi,
                trotter_error: error,
                gates_1q: census.one_qubit,
                gates_2q: census.two_qubit,
            })
        })
        .collect()
}

/// Zero-Trotter-error reference row (exact controlled propagators).
pub fn exact_reference_record(
    h: &SpinGlassHamiltonian,
    m_prec: usize,
    t: f64,
    state_kind: StateKind,
    shots: u64,
    master_seed: u64,
) -> Result<SweepRecord> {
    let oracle = sweep_oracle(h, state_kind, seeds::derive(master_seed, 0))?;
    let x_opt = optimal_phase_index(oracle.e0, t, m_prec)?;
    let p_opt = phase_line_probability(ground_phase(oracle.e0, t), x_opt, m_prec)?;
    let zeta = steady_state_rate(oracle.chi, p_opt)?;
    let (state_seed, shot_seed) = sweep_seeds(master_seed, 0);
    let cfg = QpeConfig {
        m_prec,
        t,
        plan: TrotterPlan::new(2, 1)?,
        state_kind,
        state_seed,
        shots,
        shot_seed,
        mode: QpeMode::ExactUnitary,
    };
    let outcome = run_qpe(h, &cfg)?;
    let bits = crate::circuit::index_to_bits(x_opt, m_prec);
    Ok(SweepRecord {
        axis: "exact".to_string(),
        value: 0.0,
        optimal_rate: outcome.histogram.frequency(&bits),
        zeta,
        p_opt,
        chi: oracle.chi,
        trotter_error: None,
        gates_1q: 0,
        gates_2q: 0,
    })
}

/// Optimal-phase sampling over a uniform time grid from
/// t₀ − 8·t₀/2^{m_prec} up to t₀.
///
/// The grid width scales with 2^{−m_prec} because that is the periodicity
/// of the digitized phase in t. Both the optimal index x_opt(t) and p_opt(t)
/// are recomputed per point — the optimal bitstring changes along the grid.
#[allow(clippy::too_many_arguments)]
pub fn sweep_time_grid(
    h: &SpinGlassHamiltonian,
    m_prec: usize,
    order: u32,
    steps: u32,
    state_kind: StateKind,
    shots: u64,
    master_seed: u64,
    points: usize,
) -> Result<Vec<SweepRecord>> {
    if points < 2 {
        return Err(Error::invalid("time grid needs at least 2 points"));
    }
    let oracle = sweep_oracle(h, state_kind, seeds::derive(master_seed, 0))?;
    let t0 = heuristic_time(h);
    let t_lo = t0 - 8.0 * t0 / (1u64 << m_prec) as f64;
    // With fewer than 4 phase bits the grid's lower end reaches t ≤ 0,
    // where the evolution (and the decode formula) degenerates.
    if t_lo <= 0.0 {
        return Err(Error::invalid(format!(
            "time grid lower end t0·(1 − 8/2^{m_prec}) is not positive; use m_prec ≥ 4"
        )));
    }
    let plan = TrotterPlan::new(order, steps)?;

    (0..points)
        .into_par_iter()
        .map(|i| {
            let frac = i as f64 / (points - 1) as f64;
            let t = t_lo + (t0 - t_lo) * frac;
            let (state_seed, shot_seed) = sweep_seeds(master_seed, i as u64);
            let x_opt = optimal_phase_index(oracle.e0, t, m_prec)?;
            let p_opt = phase_line_probability(ground_phase(oracle.e0, t), x_opt, m_prec)?;
            let zeta = steady_state_rate(oracle.chi, p_opt)?;
            let cfg = QpeConfig {
                m_prec,
                t,
                plan: plan.clone(),
                state_kind,
                state_seed,
                shots,
                shot_seed,
                mode: QpeMode::Trotterized,
            };
            let census = build_qpe_circuit(h, &cfg)?.census();
            let outcome = run_qpe(h, &cfg)?;
            let bits = crate::circuit::index_to_bits(x_opt, m_prec);
            let error = if h.num_sites() <= MAX_ERROR_SITES {
                Some(trotter_error(h, t * (1u64 << (m_prec - 1)) as f64, &plan)?)
            } else {
                None
            };
            Ok(SweepRecord {
                axis: "t".to_string(),
                value: t,
                optimal_rate: outcome.histogram.frequency(&bits),
                zeta,
                p_opt,
                chi: oracle.chi,
                trotter_error: error,
                gates_1q: census.one_qubit,
                gates_2q: census.two_qubit,
            })
        })
        .collect()
}

/// One Trotter-error table entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrotterErrorRow {
    pub k: u32,
    pub r: u32,
    /// Time scale exponent j: the row evaluates the formula at t·2^j.
    pub scale_exponent: u32,
    pub time: f64,
    pub error: f64,
}

/// Frobenius-norm error table over (k, r) grids at the base time and at
/// scaled times t·2^j representing deeper controlled blocks.
pub fn trotter_error_sweep(
    h: &SpinGlassHamiltonian,
    base_time: f64,
    k_list: &[u32],
    r_list: &[u32],
    scale_exponents: &[u32],
) -> Result<Vec<TrotterErrorRow>> {
    let mut grid = Vec::new();
    for &scale in scale_exponents {
        for &k in k_list {
            for &r in r_list {
                grid.push((scale, k, r));
            }
        }
    }
    grid.par_iter()
        .map(|&(scale, k, r)| {
            let time = base_time * (1u64 << scale) as f64;
            let plan = TrotterPlan::new(k, r)?;
            Ok(TrotterErrorRow {
                k,
                r,
                scale_exponent: scale,
                time,
                error: trotter_error(h, time, &plan)?,
            })
        })
        .collect()
}

/// One decoded-energy histogram bin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyBin {
    pub bits: String,
    pub energy: f64,
    pub count: u64,
}

/// Decoded-energy distribution with the true and digitized ground-energy
/// markers and the spectral-tail fractions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyDistributionReport {
    #[serde(rename = "E0")]
    pub e0: f64,
    pub optimal_bits: String,
    /// Decoded energy of the optimal bitstring; its distance to E₀ is the
    /// digitization error.
    pub optimal_energy: f64,
    /// Fraction of samples strictly below the digitized optimum.
    pub non_physical_fraction: f64,
    /// Fraction of samples exactly at the optimal bitstring.
    pub optimal_fraction: f64,
    /// Bins sorted by energy ascending.
    pub bins: Vec<EnergyBin>,
}

fn bits_to_index(bits: &str) -> u64 {
    bits.chars()
        .fold(0u64, |acc, c| (acc << 1) | u64::from(c == '1'))
}

/// Summarize decoded samples against the true ground energy.
pub fn energy_distribution_report(
    samples: &[PhaseSample],
    e0: f64,
    t: f64,
    m: usize,
) -> Result<EnergyDistributionReport> {
    if samples.is_empty() {
        return Err(Error::invalid("energy report needs at least one sample"));
    }
    if samples.iter().any(|s| s.bits.len() != m) {
        return Err(Error::invalid(format!("sample width differs from m = {m}")));
    }
    let x_opt = optimal_phase_index(e0, t, m)?;
    let optimal_bits = crate::circuit::index_to_bits(x_opt, m);
    let optimal_energy = crate::qpe::decode_phase(&optimal_bits, t)?.energy;

    let mut counts: std::collections::BTreeMap<String, (f64, u64)> =
        std::collections::BTreeMap::new();
    let mut below = 0u64;
    let mut at_opt = 0u64;
    for s in samples {
        let entry = counts.entry(s.bits.clone()).or_insert((s.energy, 0));
        entry.1 += 1;
        let x = bits_to_index(&s.bits);
        if x > x_opt {
            below += 1;
        } else if x == x_opt {
            at_opt += 1;
        }
    }
    let total = samples.len() as f64;
    let mut bins: Vec<EnergyBin> = counts
        .into_iter()
        .map(|(bits, (energy, count))| EnergyBin {
            bits,
            energy,
            count,
        })
        .collect();
    bins.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(EnergyDistributionReport {
        e0,
        optimal_bits,
        optimal_energy,
        non_physical_fraction: below as f64 / total,
        optimal_fraction: at_opt as f64 / total,
        bins,
    })
}

/// One gate-count table entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateCountRow {
    pub k: u32,
    pub r: u32,
    pub m_prec: usize,
    pub one_qubit: u64,
    pub two_qubit: u64,
    pub total: u64,
}

/// Full-circuit gate counts over a (k, r) grid; synthesis only, nothing is
/// executed.
///
/// Counts are assembled additively — state prep + m_prec Hadamards +
/// m_prec · (single-step controlled block census) · r + inverse QFT — which
/// is exactly the census of the materialized circuit (every controlled
/// block repeats one step's structure r times) without ever holding a
/// multi-million-gate op list in memory.
pub fn gate_count_sweep(
    h: &SpinGlassHamiltonian,
    m_prec: usize,
    k_list: &[u32],
    r_list: &[u32],
    state_kind: StateKind,
) -> Result<Vec<GateCountRow>> {
    let n = h.num_sites();
    if !(1..=crate::qpe::MAX_PREC_BITS).contains(&m_prec) {
        return Err(Error::invalid(format!(
            "phase bits must be in 1..={}, got {m_prec}",
            crate::qpe::MAX_PREC_BITS
        )));
    }
    let prep = build_initial_state(state_kind, n, 0)?.census();
    let hadamards = crate::circuit::GateCensus {
        one_qubit: m_prec as u64,
        two_qubit: 0,
        total: m_prec as u64,
    };
    let iqft = inverse_qft_circuit(m_prec)?.census();
    let fixed = prep.merge(hadamards).merge(iqft);

    let mut rows = Vec::new();
    for &k in k_list {
        let single_step = controlled_trotter_circuit(h, 1.0, &TrotterPlan::new(k, 1)?, n)?.census();
        for &r in r_list {
            let blocks = single_step.scale(u64::from(r)).scale(m_prec as u64);
            let census = fixed.merge(blocks);
            rows.push(GateCountRow {
                k,
                r,
                m_prec,
                one_qubit: census.one_qubit,
                two_qubit: census.two_qubit,
                total: census.total,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRecord], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record([
        "axis",
        "value",
        "optimal_rate",
        "zeta",
        "p_opt",
        "chi",
        "trotter_error",
        "gates_1q",
        "gates_2q",
    ])?;
    for r in rows {
        writer.write_record([
            r.axis.clone(),
            r.value.to_string(),
            r.optimal_rate.to_string(),
            r.zeta.to_string(),
            r.p_opt.to_string(),
            r.chi.to_string(),
            r.trotter_error.map(|e| e.to_string()).unwrap_or_default(),
            r.gates_1q.to_string(),
            r.gates_2q.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_trotter_error_csv<W: Write>(rows: &[TrotterErrorRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["k", "r", "scale_exponent", "time", "error"])?;
    for r in rows {
        writer.write_record([
            r.k.to_string(),
            r.r.to_string(),
            r.scale_exponent.to_string(),
            r.time.to_string(),
            r.error.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_gate_count_csv<W: Write>(rows: &[GateCountRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["k", "r", "m_prec", "gates_1q", "gates_2q", "total"])?;
    for r in rows {
        writer.write_record([
            r.k.to_string(),
            r.r.to_string(),
            r.m_prec.to_string(),
            r.one_qubit.to_string(),
            r.two_qubit.to_string(),
            r.total.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_energy_bins_csv<W: Write>(report: &EnergyDistributionReport, w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["bits", "energy", "count"])?;
    for b in &report.bins {
        writer.write_record([b.bits.clone(), b.energy.to_string(), b.count.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
