//! Command-line front end for the phase-estimation experiment suite.

mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{
    default_output_dir, ExperimentConfig, HamiltonianSection, InclusiveRange, QpeSection,
    SweepSection, TimeSpec,
};

#[derive(Parser)]
#[command(
    name = "qpe",
    about = "Trotterized quantum phase estimation experiments on random Heisenberg spin glasses",
    after_help = "Every subcommand writes deterministic CSV/JSON artifacts to the output \
                  directory (--out, $QPE_OUTPUT_DIR, or ./qpe_out) and prints a one-line summary. \
                  An experiment may also be described by a JSON file: `qpe --config exp.json`."
)]
struct Cli {
    /// Output directory for data files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores). Results are ordered
    /// by job index regardless.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Master seed from which all unspecified seeds derive.
    #[arg(long, global = true, default_value_t = 0)]
    master_seed: u64,

    /// Run an experiment described by a JSON config file instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Site count of the Heisenberg glass.
    #[arg(long)]
    n: usize,
    /// Instance seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Generate a seeded spin-glass instance and write its JSON form.
    Generate(InstanceArgs),

    /// Exactly diagonalize an instance (n ≤ 10); write spectrum CSV + summary.
    Diag(InstanceArgs),

    /// Overlap χ of one initial state with the degenerate ground space.
    Overlap {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Initial state kind (all_zero, ghz, clique_graph,
        /// quantum_volume_su4, random_u3, staggered_x, exact_ground).
        #[arg(long)]
        state: String,
        /// Seed for parameterized state kinds.
        #[arg(long, default_value_t = 0)]
        state_seed: u64,
    },

    /// Mean overlap per state kind over random instances (per n).
    OverlapAvg {
        /// Site-count range, e.g. `3..8` or `4`.
        #[arg(long, value_parser = InclusiveRange::parse)]
        n: InclusiveRange,
        /// Random instances per n.
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// Comma-separated state kinds (default: the six circuit states).
        #[arg(long)]
        states: Option<String>,
    },

    /// Lowest possible |E0 − decoded| per phase-bit count (no circuits).
    Digitization {
        /// Site-count range, e.g. `3..10`.
        #[arg(long, value_parser = InclusiveRange::parse)]
        n: InclusiveRange,
        /// Phase-bit range, e.g. `1..22`.
        #[arg(long, value_parser = InclusiveRange::parse)]
        m: InclusiveRange,
        /// Evolution time: `auto` (π / coefficient one-norm) or a number.
        #[arg(long, default_value = "auto", value_parser = TimeSpec::parse)]
        t: TimeSpec,
    },

    /// Frobenius-norm product-formula error over a (k, r) grid.
    TrotterError {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Comma-separated Trotter orders, e.g. `1,2,4`.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u32>,
        /// Comma-separated step counts, e.g. `1,2,4,8`.
        #[arg(long, value_delimiter = ',')]
        r: Vec<u32>,
        /// Evolution time base.
        #[arg(long, default_value = "auto", value_parser = TimeSpec::parse)]
        t: TimeSpec,
        /// Comma-separated time-scale exponents j (evaluates t·2^j).
        #[arg(long, default_value = "0", value_delimiter = ',')]
        scales: Vec<u32>,
    },

    /// One full phase-estimation run; writes the run record JSON.
    QpeRun(QpeArgs),

    /// Optimal-phase sampling rate vs Trotter steps.
    SweepR {
        #[command(flatten)]
        qpe: QpeArgs,
        /// Comma-separated step counts to sweep.
        #[arg(long, value_delimiter = ',')]
        r_list: Vec<u32>,
        /// Prepend an exact-propagator reference row.
        #[arg(long, default_value_t = false)]
        exact_ref: bool,
    },

    /// Optimal-phase sampling rate over the time grid [t0 − 8·t0/2^m, t0].
    SweepT {
        #[command(flatten)]
        qpe: QpeArgs,
        /// Grid resolution.
        #[arg(long, default_value_t = 64)]
        points: usize,
    },

    /// Gate-count table over a (k, r) grid; synthesis only.
    GateCount {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Phase bits.
        #[arg(long)]
        m: usize,
        /// Comma-separated Trotter orders.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u32>,
        /// Comma-separated step counts.
        #[arg(long, value_delimiter = ',')]
        r: Vec<u32>,
        /// Initial state charged to the census.
        #[arg(long, default_value = "all_zero")]
        state: String,
    },
}

#[derive(Args, Clone)]
struct QpeArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Phase bits of precision (1..=11).
    #[arg(long)]
    m: usize,
    /// Trotter order (1, 2, 4, 6, 8, 10).
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Trotter steps per controlled block.
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Initial state kind.
    #[arg(long, default_value = "all_zero")]
    state: String,
    /// Measurement shots.
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    /// Evolution time: `auto` or a number.
    #[arg(long, default_value = "auto", value_parser = TimeSpec::parse)]
    t: TimeSpec,
    /// Controlled-evolution realization (trotterized | exact_unitary).
    #[arg(long, default_value = "trotterized")]
    mode: String,
    /// Initial-state seed (default: derived from the master seed).
    #[arg(long)]
    state_seed: Option<u64>,
    /// Shot-sampling seed (default: derived from the master seed).
    #[arg(long)]
    shot_seed: Option<u64>,
}

impl QpeArgs {
    fn into_sections(self) -> (HamiltonianSection, QpeSection) {
        (
            HamiltonianSection {
                n: self.instance.n,
                seed: self.instance.seed,
            },
            QpeSection {
                m_prec: self.m,
                t: self.t,
                resolved_t: None,
                k: self.k,
                r: self.r,
                state_kind: self.state,
                shots: self.shots,
                mode: self.mode,
                state_seed: self.state_seed,
                shot_seed: self.shot_seed,
            },
        )
    }
}

/// Fixed placeholder qpe section for subcommands that only need a time spec
/// or a state label from it.
fn minimal_qpe_section(t: TimeSpec, state_kind: String) -> QpeSection {
    QpeSection {
        m_prec: 1,
        t,
        resolved_t: None,
        k: 1,
        r: 1,
        state_kind,
        shots: 1,
        mode: "trotterized".into(),
        state_seed: Some(0),
        shot_seed: Some(0),
    }
}

fn experiment_from_command(command: Command, out: PathBuf, master_seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        subcommand: String::new(),
        hamiltonian: None,
        qpe: None,
        sweep: None,
        output_dir: out,
        master_seed,
    };
    match command {
        Command::Generate(instance) => {
            cfg.subcommand = "generate".into();
            cfg.hamiltonian = Some(HamiltonianSection {
                n: instance.n,
                seed: instance.seed,
            });
        }
        Command::Diag(instance) => {
            cfg.subcommand = "diag".into();
            cfg.hamiltonian = Some(HamiltonianSection {
                n: instance.n,
                seed: instance.seed,
            });
        }
        Command::Overlap {
            instance,
            state,
            state_seed,
        } => {
            cfg.subcommand = "overlap".into();
            cfg.hamiltonian = Some(HamiltonianSection {
                n: instance.n,
                seed: instance.seed,
            });
            let mut qpe = minimal_qpe_section(TimeSpec::Auto, state);
            qpe.state_seed = Some(state_seed);
            cfg.qpe = Some(qpe);
        }
        Command::OverlapAvg {
            n,
            instances,
            states,
        } => {
            cfg.subcommand = "overlap-avg".into();
            cfg.sweep = Some(SweepSection {
                n_range: Some(n),
                instances: Some(instances),
                states: states.map(|s| s.split(',').map(|x| x.trim().to_string()).collect()),
                ..SweepSection::default()
            });
        }
        Command::Digitization { n, m, t } => {
            cfg.subcommand = "digitization".into();
            cfg.sweep = Some(SweepSection {
                n_range: Some(n),
                m_range: Some(m),
                ..SweepSection::default()
            });
            cfg.qpe = Some(minimal_qpe_section(t, "all_zero".into()));
        }
        Command::TrotterError {
            instance,
            k,
            r,
            t,
            scales,
        } => {
            cfg.subcommand = "trotter-error".into();
            cfg.hamiltonian = Some(HamiltonianSection {
                n: instance.n,
                seed: instance.seed,
            });
            cfg.sweep = Some(SweepSection {
                k_list: Some(k),
                r_list: Some(r),
                scales: Some(scales),
                ..SweepSection::default()
            });
            cfg.qpe = Some(minimal_qpe_section(t, "all_zero".into()));
        }
        Command::QpeRun(args) => {
            cfg.subcommand = "qpe-run".into();
            let (ham, qpe) = args.into_sections();
            cfg.hamiltonian = Some(ham);
            cfg.qpe = Some(qpe);
        }
        Command::SweepR {
            qpe,
            r_list,
            exact_ref,
        } => {
            cfg.subcommand = "sweep-r".into();
            let (ham, qpe) = qpe.into_sections();
            cfg.hamiltonian = Some(ham);
            cfg.qpe = Some(qpe);
            cfg.sweep = Some(SweepSection {
                r_list: Some(r_list),
                exact_ref: Some(exact_ref),
                ..SweepSection::default()
            });
        }
        Command::SweepT { qpe, points } => {
            cfg.subcommand = "sweep-t".into();
            let (ham, qpe) = qpe.into_sections();
            cfg.hamiltonian = Some(ham);
            cfg.qpe = Some(qpe);
            cfg.sweep = Some(SweepSection {
                points: Some(points),
                ..SweepSection::default()
            });
        }
        Command::GateCount {
            instance,
            m,
            k,
            r,
            state,
        } => {
            cfg.subcommand = "gate-count".into();
            cfg.hamiltonian = Some(HamiltonianSection {
                n: instance.n,
                seed: instance.seed,
            });
            let mut qpe = minimal_qpe_section(TimeSpec::Value(1.0), state);
            qpe.m_prec = m;
            cfg.qpe = Some(qpe);
            cfg.sweep = Some(SweepSection {
                k_list: Some(k),
                r_list: Some(r),
                ..SweepSection::default()
            });
        }
    }
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone().unwrap_or_else(default_output_dir);

    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: failed to configure {jobs} worker threads: {e}");
            return ExitCode::from(3);
        }
    }

    let mut experiment = match (cli.config, cli.command) {
        (Some(path), None) => match ExperimentConfig::from_json_file(&path) {
            Ok(mut cfg) => {
                // An explicit --out still overrides the file's directory.
                if cli.out.is_some() {
                    cfg.output_dir = out.clone();
                }
                cfg
            }
            Err(e) => {
                eprintln!("error: cannot load config {}: {e}", path.display());
                return ExitCode::from(runner::error_exit_code(&e));
            }
        },
        (None, Some(command)) => experiment_from_command(command, out, cli.master_seed),
        (Some(_), Some(_)) => {
            eprintln!("error: pass either --config or a subcommand, not both");
            return ExitCode::from(2);
        }
        (None, None) => {
            eprintln!("error: a subcommand or --config file is required (see --help)");
            return ExitCode::from(2);
        }
    };

    match runner::execute(&mut experiment) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(runner::error_exit_code(&e))
        }
    }
}
