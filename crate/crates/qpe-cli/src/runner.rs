//! Subcommand execution and artifact persistence.
//!
//! Every subcommand writes its data files under the configured output
//! directory and returns a one-line summary for stdout. Output is
//! deterministic: identical resolved configurations produce byte-identical
//! files, CSV files carry the resolved configuration as a leading `#`
//! comment line, and JSON files embed it as a `config` field.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use qpe_core::analysis::{
    energy_distribution_report, exact_reference_record, gate_count_sweep, sweep_time_grid,
    sweep_trotter_steps, trotter_error_sweep, write_gate_count_csv, write_sweep_csv,
    write_trotter_error_csv,
};
use qpe_core::error::{Error, Result};
use qpe_core::qpe::{optimal_phase_bitstring, QpeConfig, RunRecord};
use qpe_core::seeds;
use qpe_core::spectral::{
    averaged_overlap, digitization_curve, exact_diagonalize, overlap_report,
    write_averaged_overlap_csv, write_digitization_csv, AveragedOverlapRow, DigitizationRow,
    OverlapStateKind,
};
use qpe_core::{
    heuristic_time, overlap_chi, prepare_initial_state, run_qpe, QpeMode, SpinGlassHamiltonian,
    StateKind, TrotterPlan,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, TimeSpec};

pub fn execute(cfg: &mut ExperimentConfig) -> Result<String> {
    cfg.resolve()?;
    fs::create_dir_all(&cfg.output_dir)?;
    match cfg.subcommand.as_str() {
        "generate" => run_generate(cfg),
        "diag" => run_diag(cfg),
        "overlap" => run_overlap(cfg),
        "overlap-avg" => run_overlap_avg(cfg),
        "digitization" => run_digitization(cfg),
        "trotter-error" => run_trotter_error(cfg),
        "qpe-run" => run_qpe_run(cfg),
        "sweep-r" => run_sweep_r(cfg),
        "sweep-t" => run_sweep_t(cfg),
        "gate-count" => run_gate_count(cfg),
        other => Err(Error::invalid(format!("unknown subcommand {other:?}"))),
    }
}

fn config_json(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(cfg)?)
}

/// Write a JSON artifact with the resolved config embedded.
fn write_json<T: Serialize>(cfg: &ExperimentConfig, name: &str, payload: &T) -> Result<PathBuf> {
    let path = cfg.output_dir.join(name);
    let body = json!({
        "config": config_json(cfg)?,
        "data": serde_json::to_value(payload)?,
    });
    fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&body)?))?;
    Ok(path)
}

/// Write a CSV artifact with the resolved config as a leading comment line.
fn write_csv<F>(cfg: &ExperimentConfig, name: &str, emit: F) -> Result<PathBuf>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let path = cfg.output_dir.join(name);
    let mut buffer = Vec::new();
    writeln!(
        buffer,
        "# config: {}",
        serde_json::to_string(&config_json(cfg)?)?
    )?;
    emit(&mut buffer)?;
    fs::write(&path, buffer)?;
    Ok(path)
}

fn hamiltonian_from(cfg: &ExperimentConfig) -> Result<SpinGlassHamiltonian> {
    let section = cfg.hamiltonian()?;
    SpinGlassHamiltonian::generate(section.n, section.seed)
}

fn state_kind_from(label: &str) -> Result<StateKind> {
    StateKind::parse(label)
}

fn qpe_config_from(cfg: &ExperimentConfig) -> Result<QpeConfig> {
    let q = cfg.qpe()?;
    Ok(QpeConfig {
        m_prec: q.m_prec,
        t: q.resolved_t.expect("resolve() fills the numeric time"),
        plan: TrotterPlan::new(q.k, q.r)?,
        state_kind: state_kind_from(&q.state_kind)?,
        state_seed: q.state_seed.expect("resolve() fills seeds"),
        shots: q.shots,
        shot_seed: q.shot_seed.expect("resolve() fills seeds"),
        mode: QpeMode::parse(&q.mode)?,
    })
}

fn run_generate(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let h = hamiltonian_from(cfg)?;
    let path = cfg
        .output_dir
        .join(format!("instance_n{}_seed{}.json", section.n, section.seed));
    fs::write(&path, format!("{}\n", h.to_json()?))?;
    Ok(format!(
        "generate n={} seed={} terms={} one_norm={} -> {}",
        section.n,
        section.seed,
        h.terms().len(),
        h.coefficient_one_norm(),
        path.display()
    ))
}

fn run_diag(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let h = hamiltonian_from(cfg)?;
    let spectral = exact_diagonalize(&h)?;
    let stem = format!("n{}_seed{}", section.n, section.seed);
    let csv_path = write_csv(cfg, &format!("spectrum_{stem}.csv"), |w| {
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(["index", "eigenvalue"])?;
        for (i, lam) in spectral.eigenvalues().iter().enumerate() {
            writer.write_record([i.to_string(), lam.to_string()])?;
        }
        writer.flush()?;
        Ok(())
    })?;
    let summary = json!({
        "E0": spectral.ground_energy(),
        "ground_degeneracy": spectral.ground_degeneracy(),
        "spectral_norm": spectral.spectral_norm(),
        "t0": heuristic_time(&h),
    });
    write_json(cfg, &format!("diag_{stem}.json"), &summary)?;
    Ok(format!(
        "diag n={} seed={} E0={:.12} degeneracy={} -> {}",
        section.n,
        section.seed,
        spectral.ground_energy(),
        spectral.ground_degeneracy(),
        csv_path.display()
    ))
}

fn run_overlap(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let q = cfg.qpe()?;
    let h = hamiltonian_from(cfg)?;
    let kind = OverlapStateKind::parse(&q.state_kind)?;
    let report = overlap_report(&h, kind, q.state_seed.unwrap_or(0))?;
    let path = write_json(
        cfg,
        &format!(
            "overlap_n{}_seed{}_{}.json",
            section.n, section.seed, q.state_kind
        ),
        &report,
    )?;
    Ok(format!(
        "overlap n={} seed={} state={} chi={:.9} E0={:.9} -> {}",
        section.n,
        section.seed,
        q.state_kind,
        report.chi,
        report.e0,
        path.display()
    ))
}

fn run_overlap_avg(cfg: &ExperimentConfig) -> Result<String> {
    let sweep = cfg.sweep()?;
    let n_range = sweep
        .n_range
        .ok_or_else(|| Error::invalid("overlap-avg needs an n range"))?;
    let instances = sweep.instances.unwrap_or(100);
    let kinds: Vec<OverlapStateKind> = match &sweep.states {
        Some(labels) => labels
            .iter()
            .map(|l| OverlapStateKind::parse(l))
            .collect::<Result<_>>()?,
        None => StateKind::ALL
            .into_iter()
            .map(OverlapStateKind::Prepared)
            .collect(),
    };
    let mut rows: Vec<AveragedOverlapRow> = Vec::new();
    for n in n_range.iter() {
        rows.extend(averaged_overlap(
            n,
            instances,
            &kinds,
            seeds::derive(cfg.master_seed, n as u64),
        )?);
    }
    let name = format!("overlap_avg_n{}-{}_i{instances}", n_range.min, n_range.max);
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| {
        write_averaged_overlap_csv(&rows, w)
    })?;
    write_json(cfg, &format!("{name}.json"), &rows)?;
    Ok(format!(
        "overlap-avg n={}..{} instances={instances} kinds={} -> {}",
        n_range.min,
        n_range.max,
        kinds.len(),
        csv_path.display()
    ))
}

fn run_digitization(cfg: &ExperimentConfig) -> Result<String> {
    let sweep = cfg.sweep()?;
    let n_range = sweep
        .n_range
        .ok_or_else(|| Error::invalid("digitization needs an n range"))?;
    let m_range = sweep
        .m_range
        .ok_or_else(|| Error::invalid("digitization needs an m range"))?;
    let time_spec = match cfg.qpe.as_ref() {
        Some(q) => q.t.clone(),
        None => TimeSpec::Auto,
    };
    let mut rows: Vec<DigitizationRow> = Vec::new();
    for n in n_range.iter() {
        let h = SpinGlassHamiltonian::generate(n, seeds::derive(cfg.master_seed, n as u64))?;
        let t = time_spec.resolve(&h);
        rows.extend(digitization_curve(&h, t, m_range.iter())?);
    }
    let name = format!(
        "digitization_n{}-{}_m{}-{}",
        n_range.min, n_range.max, m_range.min, m_range.max
    );
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| {
        write_digitization_csv(&rows, w)
    })?;
    write_json(cfg, &format!("{name}.json"), &rows)?;
    let finest = rows
        .iter()
        .filter(|r| r.m == m_range.max)
        .map(|r| r.error)
        .fold(0.0f64, f64::max);
    Ok(format!(
        "digitization n={}..{} m={}..{} worst_error_at_m{}={:.3e} -> {}",
        n_range.min,
        n_range.max,
        m_range.min,
        m_range.max,
        m_range.max,
        finest,
        csv_path.display()
    ))
}

fn run_trotter_error(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let sweep = cfg.sweep()?;
    let h = hamiltonian_from(cfg)?;
    let q = cfg.qpe()?;
    let t = q.resolved_t.expect("resolved");
    let k_list = sweep
        .k_list
        .clone()
        .ok_or_else(|| Error::invalid("trotter-error needs a k list"))?;
    let r_list = sweep
        .r_list
        .clone()
        .ok_or_else(|| Error::invalid("trotter-error needs an r list"))?;
    let scales = sweep.scales.clone().unwrap_or_else(|| vec![0]);
    let rows = trotter_error_sweep(&h, t, &k_list, &r_list, &scales)?;
    let name = format!("trotter_error_n{}_seed{}", section.n, section.seed);
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| {
        write_trotter_error_csv(&rows, w)
    })?;
    write_json(cfg, &format!("{name}.json"), &rows)?;
    let best = rows.iter().map(|r| r.error).fold(f64::INFINITY, f64::min);
    Ok(format!(
        "trotter-error n={} seed={} t={t:.6} grid={}x{}x{} min_error={best:.3e} -> {}",
        section.n,
        section.seed,
        k_list.len(),
        r_list.len(),
        scales.len(),
        csv_path.display()
    ))
}

/// Oracle references for a run record; absent above the diagonalization
/// guard or when the requested time wraps the ground phase.
fn run_references(
    h: &SpinGlassHamiltonian,
    qpe_cfg: &QpeConfig,
) -> (Option<f64>, Option<f64>, Option<String>) {
    let Ok(spectral) = exact_diagonalize(h) else {
        return (None, None, None);
    };
    let e0 = spectral.ground_energy();
    let bits = optimal_phase_bitstring(e0, qpe_cfg.t, qpe_cfg.m_prec).ok();
    let zeta = (|| {
        let state =
            prepare_initial_state(qpe_cfg.state_kind, h.num_sites(), qpe_cfg.state_seed).ok()?;
        let chi = overlap_chi(state.amplitudes(), &spectral.ground_space()).ok()?;
        let x = qpe_core::qpe::optimal_phase_index(e0, qpe_cfg.t, qpe_cfg.m_prec).ok()?;
        let p = qpe_core::analysis::phase_line_probability(
            qpe_core::qpe::ground_phase(e0, qpe_cfg.t),
            x,
            qpe_cfg.m_prec,
        )
        .ok()?;
        Some(chi * p)
    })();
    (Some(e0), zeta, bits)
}

fn run_qpe_run(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let q = cfg.qpe()?;
    let h = hamiltonian_from(cfg)?;
    let qpe_cfg = qpe_config_from(cfg)?;
    let outcome = run_qpe(&h, &qpe_cfg)?;
    let (e0_ref, zeta_ref, optimal_bits) = run_references(&h, &qpe_cfg);
    let record = RunRecord::new(
        &h,
        &qpe_cfg,
        &outcome,
        e0_ref,
        zeta_ref,
        optimal_bits.clone(),
    );

    let stem = format!(
        "qpe_run_n{}_seed{}_m{}_k{}_r{}_{}_{}",
        section.n, section.seed, q.m_prec, q.k, q.r, q.state_kind, q.mode
    );
    let path = write_json(cfg, &format!("{stem}.json"), &record)?;

    // Decoded-energy distribution companion (drives the tail diagnostics).
    if let Some(e0) = e0_ref {
        if let Ok(report) =
            energy_distribution_report(&outcome.samples, e0, qpe_cfg.t, qpe_cfg.m_prec)
        {
            write_csv(cfg, &format!("{stem}_energies.csv"), |w| {
                qpe_core::analysis::write_energy_bins_csv(&report, w)
            })?;
            write_json(cfg, &format!("{stem}_energies.json"), &report)?;
        }
    }

    let rate_text = record
        .results
        .optimal_rate
        .map(|r| format!("{r:.4}"))
        .unwrap_or_else(|| "n/a".to_string());
    let e0_text = e0_ref
        .map(|e| format!("{e:.9}"))
        .unwrap_or_else(|| "n/a".to_string());
    // Cheap rejection bound: decoded energies below −Σ|J| cannot be
    // eigenvalues.
    let bound = h.coefficient_one_norm();
    let below_bound = outcome
        .samples
        .iter()
        .filter(|s| qpe_core::qpe::is_non_physical(s.energy, bound))
        .count();
    Ok(format!(
        "qpe-run n={} seed={} m={} k={} r={} state={} mode={} E0_ref={} optimal_rate={} \
         below_one_norm_bound={below_bound} -> {}",
        section.n,
        section.seed,
        q.m_prec,
        q.k,
        q.r,
        q.state_kind,
        q.mode,
        e0_text,
        rate_text,
        path.display()
    ))
}

fn run_sweep_r(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let q = cfg.qpe()?;
    let sweep = cfg.sweep()?;
    let h = hamiltonian_from(cfg)?;
    let r_list = sweep
        .r_list
        .clone()
        .ok_or_else(|| Error::invalid("sweep-r needs an r list"))?;
    let t = q.resolved_t.expect("resolved");
    let state = state_kind_from(&q.state_kind)?;
    let mut rows = Vec::new();
    if sweep.exact_ref.unwrap_or(false) {
        rows.push(exact_reference_record(
            &h,
            q.m_prec,
            t,
            state,
            q.shots,
            cfg.master_seed,
        )?);
    }
    rows.extend(sweep_trotter_steps(
        &h,
        q.m_prec,
        t,
        q.k,
        &r_list,
        state,
        q.shots,
        cfg.master_seed,
    )?);
    let name = format!(
        "sweep_r_n{}_seed{}_m{}_k{}_{}",
        section.n, section.seed, q.m_prec, q.k, q.state_kind
    );
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| write_sweep_csv(&rows, w))?;
    let references = rows
        .first()
        .map(|r| json!({"zeta": r.zeta, "p_opt": r.p_opt, "chi": r.chi}));
    // Phase leakage from nearby eigenvalues can push the measured rate
    // above the steady-state value when the phase register is small; flag
    // it rather than modeling the full leakage distribution.
    let mut notes: Vec<String> = Vec::new();
    if q.m_prec <= 3 {
        for row in &rows {
            let sigma = (row.zeta * (1.0 - row.zeta) / q.shots as f64).sqrt();
            if row.optimal_rate > row.zeta + 3.0 * sigma {
                notes.push(format!(
                    "{}={}: measured rate {:.4} exceeds zeta {:.4}; \
                     likely phase leakage at small m_prec",
                    row.axis, row.value, row.optimal_rate, row.zeta
                ));
            }
        }
    }
    write_json(
        cfg,
        &format!("{name}.json"),
        &json!({"references": references, "notes": notes, "rows": rows}),
    )?;
    let tail = rows.last().map(|r| r.optimal_rate).unwrap_or(f64::NAN);
    let zeta = rows.last().map(|r| r.zeta).unwrap_or(f64::NAN);
    Ok(format!(
        "sweep-r n={} seed={} m={} k={} points={} final_rate={tail:.4} zeta={zeta:.4} -> {}",
        section.n,
        section.seed,
        q.m_prec,
        q.k,
        rows.len(),
        csv_path.display()
    ))
}

fn run_sweep_t(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let q = cfg.qpe()?;
    let sweep = cfg.sweep()?;
    let h = hamiltonian_from(cfg)?;
    let points = sweep.points.unwrap_or(64);
    let state = state_kind_from(&q.state_kind)?;
    let rows = sweep_time_grid(
        &h,
        q.m_prec,
        q.k,
        q.r,
        state,
        q.shots,
        cfg.master_seed,
        points,
    )?;
    let name = format!(
        "sweep_t_n{}_seed{}_m{}_k{}_r{}_{}",
        section.n, section.seed, q.m_prec, q.k, q.r, q.state_kind
    );
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| write_sweep_csv(&rows, w))?;
    write_json(cfg, &format!("{name}.json"), &rows)?;
    let worst = rows
        .iter()
        .map(|r| (r.optimal_rate - r.zeta).abs())
        .fold(0.0f64, f64::max);
    Ok(format!(
        "sweep-t n={} seed={} m={} k={} r={} points={points} worst_dev={worst:.4} -> {}",
        section.n,
        section.seed,
        q.m_prec,
        q.k,
        q.r,
        csv_path.display()
    ))
}

fn run_gate_count(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg.hamiltonian()?;
    let q = cfg.qpe()?;
    let sweep = cfg.sweep()?;
    let h = hamiltonian_from(cfg)?;
    let k_list = sweep
        .k_list
        .clone()
        .ok_or_else(|| Error::invalid("gate-count needs a k list"))?;
    let r_list = sweep
        .r_list
        .clone()
        .ok_or_else(|| Error::invalid("gate-count needs an r list"))?;
    let state = state_kind_from(&q.state_kind)?;
    let rows = gate_count_sweep(&h, q.m_prec, &k_list, &r_list, state)?;
    let name = format!(
        "gate_count_n{}_seed{}_m{}",
        section.n, section.seed, q.m_prec
    );
    let csv_path = write_csv(cfg, &format!("{name}.csv"), |w| {
        write_gate_count_csv(&rows, w)
    })?;
    write_json(cfg, &format!("{name}.json"), &rows)?;
    let biggest = rows.iter().map(|r| r.total).max().unwrap_or(0);
    Ok(format!(
        "gate-count n={} seed={} m={} grid={}x{} max_total={biggest} -> {}",
        section.n,
        section.seed,
        q.m_prec,
        k_list.len(),
        r_list.len(),
        csv_path.display()
    ))
}

/// Exit codes: 3 for guard and argument violations, 4 for I/O failures.
/// (clap itself exits 2 on unknown flags.)
pub fn error_exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        _ => 3,
    }
}
