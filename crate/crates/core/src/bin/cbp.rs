//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 I/O or parse error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cbp_core::engine::{ControlParams, Mode, Propagator, ScheduleConfig};
use cbp_core::experiments::{
    emit_report, run_degree_analysis, run_dose_response, run_sweep, run_trial_battery, ExperimentConfig, Report, PRESETS,
};
use cbp_core::graph::{compute_stats, generate_watts_strogatz, random_tree, sample_couplings};
use cbp_core::learning::{train_supervised, train_unsupervised, RateDecay, SupervisedConfig, UnsupervisedConfig};
use cbp_core::oracle::{exact_marginals, IsingModel};
use cbp_core::persistence::{self as io, Provenance};
use cbp_core::seed::{self, Stream};
use cbp_core::stimuli::{informed_count_for_percent, StimulusSpec};
use cbp_core::{Error, Result};

#[derive(Parser)]
#[command(name = "cbp", version, about = "Belief propagation and circular belief propagation on social graphs")]
struct Cli {
    /// Experiment config document (flat key = value pairs).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Named experiment preset, applied before the config file.
    #[arg(long, global = true, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// Base seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a Watts-Strogatz graph (or a random tree) with couplings.
    GenGraph(GenGraphArgs),
    /// Write external-message fields for a graph.
    Stimuli(StimuliArgs),
    /// Exact marginals by enumeration (at most 20 nodes).
    Oracle(OracleArgs),
    /// Learn CBP loop corrections and gains.
    Train(TrainArgs),
    /// Propagate one field and write the final beliefs.
    Run(RunArgs),
    /// Run the configured (K, beta) sweep and write its report.
    Sweep,
    /// Run a configured experiment and write its report.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenGraphArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Neighbours per side on the ring.
    #[arg(long, default_value_t = 20)]
    k: usize,
    #[arg(long, default_value_t = 0.12)]
    beta: f64,
    /// Generate a uniformly random labelled tree instead.
    #[arg(long)]
    tree: bool,
    #[arg(long, default_value_t = 0.36)]
    j_max: f64,
    /// Also write summary statistics.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct ModelFiles {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    couplings: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum StimulusKind {
    Uninformative,
    Informative,
}

#[derive(Args)]
struct StimuliArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = StimulusKind::Uninformative)]
    kind: StimulusKind,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Percentage of informed nodes (informative fields).
    #[arg(long, default_value_t = 10.0)]
    percent: f64,
    /// Sign of the correct answer (informative fields).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sign: i8,
    /// Number of fields; more than one writes `fields.csv` with a trial column.
    #[arg(long, default_value_t = 1)]
    trials: usize,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    model: ModelFiles,
    #[arg(long)]
    field: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Supervised,
    Unsupervised,
}

#[derive(Clone, Copy, ValueEnum)]
enum Decay {
    Constant,
    Invsqrt,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    model: ModelFiles,
    #[arg(long, value_enum, default_value_t = Method::Unsupervised)]
    method: Method,
    /// Training trials (unsupervised) or training-set size (supervised).
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.01)]
    eta_alpha: f64,
    #[arg(long, default_value_t = 0.001)]
    eta_kappa: f64,
    #[arg(long, value_enum, default_value_t = Decay::Invsqrt)]
    decay: Decay,
    /// Optimizer steps (supervised).
    #[arg(long, default_value_t = 150)]
    steps: usize,
    /// Optimizer learning rate (supervised).
    #[arg(long, default_value_t = 0.03)]
    lr: f64,
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelFiles,
    #[arg(long)]
    field: PathBuf,
    /// Control parameters for CBP; defaults to alpha = kappa = 1.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value = "cbp")]
    mode: Mode,
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    /// Also write the belief trajectory.
    #[arg(long)]
    trajectory: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Battery,
    Dose,
    Degree,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, value_enum, default_value_t = ReportKind::Battery)]
    kind: ReportKind,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn experiment_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), preset) => ExperimentConfig::load(path, preset.as_deref())?,
        (None, Some(preset)) => ExperimentConfig::preset(preset)?,
        (None, None) => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Provenance for single-artifact commands: hash of the command line.
fn command_provenance(seed: u64) -> Provenance {
    let args: Vec<String> = std::env::args().skip(1).collect();
    Provenance::new(io::content_hash(&args.join(" ")), seed)
}

fn written(path: &Path) {
    log::info!("wrote {}", path.display());
}

fn dispatch(cli: &Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(1);
    let out = out_dir(cli);
    let prov = command_provenance(seed);
    match &cli.command {
        Command::GenGraph(a) => {
            let graph_seed = seed::trial_seed(seed, Stream::Graph, 0, 0);
            let graph = if a.tree {
                random_tree(a.n, graph_seed)?
            } else {
                generate_watts_strogatz(a.n, a.k, a.beta, graph_seed)?
            };
            let couplings = sample_couplings(&graph, a.j_max, seed::trial_seed(seed, Stream::Couplings, 0, 0))?;
            let (gp, cp) = (out.join("graph.txt"), out.join("couplings.csv"));
            io::save_graph(&gp, &graph, Some(&prov))?;
            io::save_couplings(&cp, &graph, &couplings, Some(&prov))?;
            written(&gp);
            written(&cp);
            if a.stats {
                let s = compute_stats(&graph, 200, seed::trial_seed(seed, Stream::Stats, 0, 0))?;
                let text = format!(
                    "{}nodes,edges,mean_degree,largest_component,mean_path_length,path_length_exact,clustering\n{},{},{},{},{},{},{}\n",
                    prov.header(),
                    s.node_count,
                    s.edge_count,
                    io::fmt_f64(s.mean_degree),
                    s.largest_component,
                    io::fmt_f64(s.mean_path_length),
                    s.path_length_exact,
                    io::fmt_f64(s.clustering)
                );
                let sp = out.join("graph_stats.csv");
                io::write_file(&sp, &text)?;
                written(&sp);
            }
        }
        Command::Stimuli(a) => {
            let n = io::load_graph(&a.graph)?.graph.node_count();
            let spec = match a.kind {
                StimulusKind::Uninformative => StimulusSpec::Uninformative { sigma_ext: a.sigma },
                StimulusKind::Informative => StimulusSpec::Informative {
                    informed: informed_count_for_percent(n, a.percent),
                    sign: a.sign,
                },
            };
            if a.trials == 0 {
                return Err(Error::InvalidParameter("--trials must be at least 1".into()));
            }
            let fields = (0..a.trials as u64)
                .map(|t| spec.generate(n, seed::trial_seed(seed, Stream::TestField, 0, t)))
                .collect::<Result<Vec<_>>>()?;
            let (path, text) = if fields.len() == 1 {
                (out.join("field.csv"), io::field_to_string(&fields[0], Some(&prov)))
            } else {
                (out.join("fields.csv"), io::fields_to_string(&fields, Some(&prov)))
            };
            io::write_file(&path, &text)?;
            written(&path);
        }
        Command::Oracle(a) => {
            let graph = io::load_graph(&a.model.graph)?.graph;
            let couplings = io::load_couplings(&a.model.couplings, &graph)?;
            let field = io::load_field(&a.field, graph.node_count())?;
            let p = exact_marginals(&IsingModel::new(&graph, &couplings, &field)?)?;
            let path = out.join("oracle.csv");
            io::write_file(&path, &io::marginals_to_string(&p.p_yes, Some(&prov)))?;
            written(&path);
        }
        Command::Train(a) => {
            let graph = io::load_graph(&a.model.graph)?.graph;
            let couplings = io::load_couplings(&a.model.couplings, &graph)?;
            let schedule = ScheduleConfig {
                tau: a.tau,
                iterations: a.iterations,
                ..ScheduleConfig::default()
            };
            let params = match a.method {
                Method::Supervised => {
                    let outcome = train_supervised(
                        &graph,
                        &couplings,
                        &SupervisedConfig {
                            n_train: a.trials,
                            sigma_ext: a.sigma,
                            schedule,
                            steps: a.steps,
                            learning_rate: a.lr,
                            seed,
                            ..SupervisedConfig::default()
                        },
                    )?;
                    log::info!("training loss {:.6} -> {:.6}", outcome.initial_loss, outcome.final_loss);
                    outcome.params
                }
                Method::Unsupervised => {
                    let (params, trace) = train_unsupervised(
                        &graph,
                        &couplings,
                        &UnsupervisedConfig {
                            n_trials: a.trials,
                            eta_alpha: a.eta_alpha,
                            eta_kappa: a.eta_kappa,
                            decay: match a.decay {
                                Decay::Constant => RateDecay::Constant,
                                Decay::Invsqrt => RateDecay::InvSqrt,
                            },
                            sigma_ext: a.sigma,
                            schedule,
                            seed,
                            ..UnsupervisedConfig::default()
                        },
                    )?;
                    log::info!("relative parameter change over the last 10% of trials: {:.4}", trace.final_drift);
                    params
                }
            };
            let path = out.join("params.csv");
            io::save_params(&path, &graph, &params, Some(&prov))?;
            written(&path);
        }
        Command::Run(a) => {
            let graph = io::load_graph(&a.model.graph)?.graph;
            let couplings = io::load_couplings(&a.model.couplings, &graph)?;
            let field = io::load_field(&a.field, graph.node_count())?;
            let params = match &a.params {
                Some(p) => io::load_params(p, &graph)?,
                None => ControlParams::bp_defaults(&graph),
            };
            let sched = ScheduleConfig {
                tau: a.tau,
                iterations: a.iterations,
                mode: a.mode,
                record_trajectory: a.trajectory,
                ..ScheduleConfig::default()
            };
            let run = Propagator::new(&graph, &couplings)?.run(&field, &params, &sched)?;
            let path = out.join("beliefs.csv");
            io::write_file(&path, &io::beliefs_to_string(&run.state.beliefs, Some(&prov)))?;
            written(&path);
            if let Some(traj) = &run.trajectory {
                let tp = out.join("trajectory.csv");
                io::write_file(&tp, &io::trajectory_to_string(traj, Some(&prov)))?;
                written(&tp);
            }
        }
        Command::Sweep => {
            let cfg = experiment_config(cli)?;
            let report = Report::Sweep(run_sweep(&cfg)?);
            emit(&cfg, &[report])?;
        }
        Command::Report(a) => {
            let cfg = experiment_config(cli)?;
            let report = match a.kind {
                ReportKind::Battery => Report::Battery(run_trial_battery(&cfg)?),
                ReportKind::Dose => Report::DoseResponse(run_dose_response(&cfg)?),
                ReportKind::Degree => Report::Degree(run_degree_analysis(&cfg)?),
            };
            emit(&cfg, &[report])?;
        }
    }
    Ok(())
}

fn emit(cfg: &ExperimentConfig, reports: &[Report]) -> Result<()> {
    let files = emit_report(reports, &cfg.out_dir, &cfg.provenance(), cfg.plots)?;
    io::write_file(&cfg.out_dir.join("config.toml"), &cfg.canonical_document())?;
    log::info!("{}: wrote {} files under {}", cfg.name, files.len(), cfg.out_dir.display());
    Ok(())
}
