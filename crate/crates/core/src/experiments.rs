//! Config-driven experiment suites: trial batteries, (K, β) sweeps,
//! informative-field dose-response curves and degree analyses, plus report
//! emission (CSV always, SVG optionally).
//!
//! Every random draw is seeded from `(base seed, stream, graph replicate,
//! trial)`, trials run on a rayon pool and results are collected in trial
//! order, so outputs do not depend on the worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::engine::{ControlParams, Mode, Propagator, ScheduleConfig};
use crate::error::{Error, Result};
use crate::graph::{generate_watts_strogatz, random_tree, sample_couplings, Couplings, SocialGraph};
use crate::learning::{train_supervised, train_unsupervised, RateDecay, SupervisedConfig, TrainingTrace, UnsupervisedConfig};
use crate::metrics::{belief_histogram, choice_accuracy, mean_std, median, spearman, BeliefHistogram, TrialMetrics, DEFAULT_MODE_THRESHOLD};
use crate::oracle::{exact_marginals, universal_observer, IsingModel, MAX_ORACLE_NODES};
use crate::persistence::{self as io, fmt_f64, Provenance};
use crate::plot::{self, Series, PALETTE};
use crate::seed::{self, Stream};
use crate::stimuli::{informative_field, informed_count_for_percent, uninformative_field, ExternalField};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    WattsStrogatz { n: usize, k: usize, beta: f64 },
    Tree { n: usize },
    /// Edge-list file; optionally reduced to the subgraph induced by the
    /// first `subgraph_nodes` nodes in breadth-first order from node 0.
    EdgeList { path: PathBuf, subgraph_nodes: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingMethod {
    None,
    Supervised,
    Unsupervised,
    /// Parameters read from `params_path` (single-graph configs only).
    File,
}

impl TrainingMethod {
    fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Supervised => "supervised",
            Self::Unsupervised => "unsupervised",
            Self::File => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub graph: GraphSource,
    pub j_max: f64,
    pub sigma_ext: f64,
    pub tau: f64,
    pub iterations: usize,
    pub modes: Vec<Mode>,
    pub training: TrainingMethod,
    pub params_path: Option<PathBuf>,
    /// Unsupervised training trials, or the supervised training-set size.
    pub train_trials: usize,
    pub eta_alpha: f64,
    pub eta_kappa: f64,
    pub decay: RateDecay,
    pub supervised_steps: usize,
    pub supervised_lr: f64,
    /// Graph replicates per grid cell.
    pub graphs: usize,
    /// Test trials per graph (and per informed percentage).
    pub trials: usize,
    pub k_grid: Vec<usize>,
    pub beta_grid: Vec<f64>,
    pub informed_percent: Vec<f64>,
    pub bins: usize,
    /// Trials per graph whose belief trajectories are kept.
    pub trajectories: usize,
    /// Compare against exact marginals when the graph is small enough.
    pub oracle: bool,
    pub plots: bool,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    /// Desk-scale 200-node setting.
    fn default() -> Self {
        Self {
            name: "default".into(),
            graph: GraphSource::WattsStrogatz { n: 200, k: 20, beta: 0.12 },
            j_max: 0.36,
            sigma_ext: 0.1,
            tau: 0.2,
            iterations: 100,
            modes: vec![Mode::Bp, Mode::Cbp],
            training: TrainingMethod::Unsupervised,
            params_path: None,
            train_trials: 500,
            eta_alpha: 0.05,
            eta_kappa: 0.002,
            decay: RateDecay::Constant,
            supervised_steps: 150,
            supervised_lr: 0.03,
            graphs: 3,
            trials: 50,
            k_grid: vec![10, 20, 30, 40],
            beta_grid: vec![0.12],
            informed_percent: vec![1.0, 5.0, 10.0, 20.0],
            bins: 61,
            trajectories: 0,
            oracle: true,
            plots: true,
            out_dir: PathBuf::from("out"),
            seed: 1,
            workers: 0,
        }
    }
}

pub const PRESETS: [&str; 10] = ["default", "fig2", "fig2-unsupervised", "fig3", "fig3-k30", "fig4", "fig5", "fig5a-text", "fig5b", "fig8"];

impl ExperimentConfig {
    /// Named configurations at full published scale.
    pub fn preset(name: &str) -> Result<Self> {
        let base = Self::default();
        let ws = |n, k, beta| GraphSource::WattsStrogatz { n, k, beta };
        let small = Self {
            graph: ws(10, 4, 0.1),
            j_max: 0.6,
            sigma_ext: 1.0,
            training: TrainingMethod::Supervised,
            train_trials: 300,
            eta_alpha: 0.01,
            eta_kappa: 0.001,
            decay: RateDecay::InvSqrt,
            graphs: 30,
            trials: 100,
            k_grid: vec![2, 3, 4],
            beta_grid: vec![0.1],
            bins: 41,
            ..base.clone()
        };
        let large = Self {
            train_trials: 2000,
            graphs: 6,
            ..base.clone()
        };
        let dose = Self {
            trials: 200,
            informed_percent: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0],
            ..large.clone()
        };
        let cfg = match name {
            "default" => base,
            "fig2" => small,
            "fig2-unsupervised" => Self {
                training: TrainingMethod::Unsupervised,
                train_trials: 2000,
                ..small
            },
            "fig3" => Self {
                graph: ws(200, 20, 0.12),
                graphs: 1,
                trials: 2,
                trajectories: 2,
                ..large
            },
            "fig3-k30" => Self {
                graph: ws(200, 30, 0.12),
                graphs: 1,
                trials: 2,
                trajectories: 2,
                ..large
            },
            "fig4" => Self {
                k_grid: vec![10, 20, 30, 40],
                beta_grid: vec![0.04, 0.08, 0.12, 0.16, 0.2],
                ..large
            },
            "fig5" => Self {
                graph: ws(200, 30, 0.2),
                ..dose
            },
            "fig5a-text" => Self {
                graph: ws(200, 40, 0.2),
                ..dose
            },
            "fig5b" => Self {
                graph: ws(200, 20, 0.08),
                ..dose
            },
            "fig8" => Self {
                graph: GraphSource::EdgeList {
                    path: PathBuf::from("data/facebook_combined.txt"),
                    subgraph_nodes: None,
                },
                j_max: 0.18,
                graphs: 1,
                ..dose
            },
            other => {
                return Err(Error::Config(format!("unknown preset `{other}`; known: {}", PRESETS.join(", "))));
            }
        };
        Ok(Self { name: name.to_string(), ..cfg })
    }

    /// Applies the keys of a flat TOML document on top of `self`.
    pub fn apply_toml(mut self, document: &str) -> Result<Self> {
        let table: toml::Table = document.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        if let Some(preset) = table.get("preset") {
            self = Self::preset(preset.as_str().ok_or_else(|| Error::Config("`preset` must be a string".into()))?)?;
        }
        let (mut n, mut k, mut beta, mut edges, mut sub) = match &self.graph {
            GraphSource::WattsStrogatz { n, k, beta } => (*n, *k, *beta, None, None),
            GraphSource::Tree { n } => (*n, 4, 0.1, None, None),
            GraphSource::EdgeList { path, subgraph_nodes } => (200, 20, 0.12, Some(path.clone()), *subgraph_nodes),
        };
        let mut kind = match &self.graph {
            GraphSource::WattsStrogatz { .. } => "ws",
            GraphSource::Tree { .. } => "tree",
            GraphSource::EdgeList { .. } => "edgelist",
        }
        .to_string();
        for (key, value) in &table {
            let v = Value { key, value };
            match key.as_str() {
                "preset" => {}
                "name" => self.name = v.string()?,
                "graph" => kind = v.string()?,
                "n" => n = v.usize()?,
                "k" => k = v.usize()?,
                "beta" => beta = v.float()?,
                "edges" => edges = Some(PathBuf::from(v.string()?)),
                "subgraph_nodes" => sub = Some(v.usize()?).filter(|&s| s > 0),
                "j_max" => self.j_max = v.float()?,
                "sigma_ext" => self.sigma_ext = v.float()?,
                "tau" => self.tau = v.float()?,
                "iterations" => self.iterations = v.usize()?,
                "modes" => {
                    self.modes = v
                        .list()?
                        .iter()
                        .map(|m| {
                            let s = m.as_str().ok_or_else(|| v.error("a list of strings"))?;
                            s.parse::<Mode>()
                        })
                        .collect::<Result<_>>()?
                }
                "training" => {
                    self.training = match v.string()?.as_str() {
                        "none" => TrainingMethod::None,
                        "supervised" => TrainingMethod::Supervised,
                        "unsupervised" => TrainingMethod::Unsupervised,
                        "file" => TrainingMethod::File,
                        _ => return Err(v.error("one of none, supervised, unsupervised, file")),
                    }
                }
                "params" => self.params_path = Some(PathBuf::from(v.string()?)),
                "train_trials" => self.train_trials = v.usize()?,
                "eta_alpha" => self.eta_alpha = v.float()?,
                "eta_kappa" => self.eta_kappa = v.float()?,
                "decay" => {
                    self.decay = match v.string()?.as_str() {
                        "constant" => RateDecay::Constant,
                        "invsqrt" => RateDecay::InvSqrt,
                        _ => return Err(v.error("`constant` or `invsqrt`")),
                    }
                }
                "supervised_steps" => self.supervised_steps = v.usize()?,
                "supervised_lr" => self.supervised_lr = v.float()?,
                "graphs" => self.graphs = v.usize()?,
                "trials" => self.trials = v.usize()?,
                "k_grid" => self.k_grid = v.list()?.iter().map(|x| Value { key, value: x }.usize()).collect::<Result<_>>()?,
                "beta_grid" => self.beta_grid = v.list()?.iter().map(|x| Value { key, value: x }.float()).collect::<Result<_>>()?,
                "informed_percent" => {
                    self.informed_percent = v.list()?.iter().map(|x| Value { key, value: x }.float()).collect::<Result<_>>()?
                }
                "bins" => self.bins = v.usize()?,
                "trajectories" => self.trajectories = v.usize()?,
                "oracle" => self.oracle = v.bool()?,
                "plots" => self.plots = v.bool()?,
                "out" => self.out_dir = PathBuf::from(v.string()?),
                "seed" => self.seed = v.u64()?,
                "workers" => self.workers = v.usize()?,
                other => return Err(Error::Config(format!("unknown config key `{other}`"))),
            }
        }
        self.graph = match kind.as_str() {
            "ws" => GraphSource::WattsStrogatz { n, k, beta },
            "tree" => GraphSource::Tree { n },
            "edgelist" => GraphSource::EdgeList {
                path: edges.ok_or_else(|| Error::Config("graph = \"edgelist\" needs `edges`".into()))?,
                subgraph_nodes: sub,
            },
            other => return Err(Error::Config(format!("key `graph`: unknown kind `{other}` (ws, tree, edgelist)"))),
        };
        Ok(self)
    }

    /// Reads a config document, starting from `preset` (or the defaults).
    pub fn load(path: &Path, preset: Option<&str>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = match preset {
            Some(p) => Self::preset(p)?,
            None => Self::default(),
        };
        base.apply_toml(&text)
    }

    /// Checks parameter ranges, grids and referenced files.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.j_max > 0.0 && self.j_max.is_finite()) {
            return bad(format!("j_max must be positive, got {}", self.j_max));
        }
        if !(self.sigma_ext >= 0.0 && self.sigma_ext.is_finite()) {
            return bad(format!("sigma_ext must be non-negative, got {}", self.sigma_ext));
        }
        self.schedule(Mode::Bp).validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.graphs == 0 {
            return bad("graphs must be at least 1".into());
        }
        if self.modes.is_empty() {
            return bad("modes must not be empty".into());
        }
        if self.k_grid.is_empty() || self.beta_grid.is_empty() || self.informed_percent.is_empty() {
            return bad("k_grid, beta_grid and informed_percent must be nonempty".into());
        }
        if let Some(p) = self.informed_percent.iter().find(|p| !(0.0..=100.0).contains(*p)) {
            return bad(format!("informed_percent entry {p} outside [0, 100]"));
        }
        if self.bins < 2 {
            return bad("bins must be at least 2".into());
        }
        if self.modes.contains(&Mode::Cbp) && self.training == TrainingMethod::None {
            return bad("mode cbp needs trained parameters: set `training`".into());
        }
        if self.training == TrainingMethod::File {
            match &self.params_path {
                None => return bad("training = \"file\" needs `params`".into()),
                Some(p) if !p.exists() => return bad(format!("params file {} does not exist", p.display())),
                _ => {}
            }
            if self.graphs != 1 || self.k_grid.len() > 1 || self.beta_grid.len() > 1 {
                return bad("a params file fits a single graph: use graphs = 1 and one grid cell".into());
            }
        }
        if let GraphSource::EdgeList { path, .. } = &self.graph {
            if !path.exists() {
                return bad(format!("edge-list file {} does not exist", path.display()));
            }
        }
        Ok(())
    }

    pub fn schedule(&self, mode: Mode) -> ScheduleConfig {
        ScheduleConfig {
            tau: self.tau,
            iterations: self.iterations,
            mode,
            ..ScheduleConfig::default()
        }
    }

    /// Canonical text of every setting that affects results (output
    /// directory and worker count excluded), keys sorted.
    pub fn canonical_document(&self) -> String {
        let mut t = toml::Table::new();
        let s = |v: &str| toml::Value::String(v.to_string());
        let f = toml::Value::Float;
        let i = |v: usize| toml::Value::Integer(v as i64);
        match &self.graph {
            GraphSource::WattsStrogatz { n, k, beta } => {
                t.insert("graph".into(), s("ws"));
                t.insert("n".into(), i(*n));
                t.insert("k".into(), i(*k));
                t.insert("beta".into(), f(*beta));
            }
            GraphSource::Tree { n } => {
                t.insert("graph".into(), s("tree"));
                t.insert("n".into(), i(*n));
            }
            GraphSource::EdgeList { path, subgraph_nodes } => {
                t.insert("graph".into(), s("edgelist"));
                t.insert("edges".into(), s(&path.display().to_string()));
                t.insert("subgraph_nodes".into(), i(subgraph_nodes.unwrap_or(0)));
            }
        }
        t.insert("name".into(), s(&self.name));
        t.insert("j_max".into(), f(self.j_max));
        t.insert("sigma_ext".into(), f(self.sigma_ext));
        t.insert("tau".into(), f(self.tau));
        t.insert("iterations".into(), i(self.iterations));
        t.insert("modes".into(), toml::Value::Array(self.modes.iter().map(|m| s(m.name())).collect()));
        t.insert("training".into(), s(self.training.name()));
        if let Some(p) = &self.params_path {
            t.insert("params".into(), s(&p.display().to_string()));
        }
        t.insert("train_trials".into(), i(self.train_trials));
        t.insert("eta_alpha".into(), f(self.eta_alpha));
        t.insert("eta_kappa".into(), f(self.eta_kappa));
        let decay = match self.decay {
            RateDecay::Constant => "constant",
            RateDecay::InvSqrt => "invsqrt",
        };
        t.insert("decay".into(), s(decay));
        t.insert("supervised_steps".into(), i(self.supervised_steps));
        t.insert("supervised_lr".into(), f(self.supervised_lr));
        t.insert("graphs".into(), i(self.graphs));
        t.insert("trials".into(), i(self.trials));
        t.insert("k_grid".into(), toml::Value::Array(self.k_grid.iter().map(|&k| i(k)).collect()));
        t.insert("beta_grid".into(), toml::Value::Array(self.beta_grid.iter().map(|&b| f(b)).collect()));
        t.insert(
            "informed_percent".into(),
            toml::Value::Array(self.informed_percent.iter().map(|&p| f(p)).collect()),
        );
        t.insert("bins".into(), i(self.bins));
        t.insert("trajectories".into(), i(self.trajectories));
        t.insert("oracle".into(), toml::Value::Boolean(self.oracle));
        t.insert("plots".into(), toml::Value::Boolean(self.plots));
        t.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        toml::to_string(&t).expect("plain values serialize")
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::new(io::content_hash(&self.canonical_document()), self.seed)
    }

    fn with_cell(&self, k: usize, beta: f64) -> Self {
        let mut c = self.clone();
        if let GraphSource::WattsStrogatz { n, .. } = self.graph {
            c.graph = GraphSource::WattsStrogatz { n, k, beta };
        }
        c
    }

    fn cell(&self) -> (usize, f64) {
        match self.graph {
            GraphSource::WattsStrogatz { k, beta, .. } => (k, beta),
            _ => (0, 0.0),
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

struct Value<'a> {
    key: &'a str,
    value: &'a toml::Value,
}

impl Value<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::Config(format!("key `{}`: expected {expected}, found `{}`", self.key, self.value))
    }

    fn string(&self) -> Result<String> {
        self.value.as_str().map(str::to_string).ok_or_else(|| self.error("a string"))
    }

    fn float(&self) -> Result<f64> {
        match self.value {
            toml::Value::Float(f) => Ok(*f),
            toml::Value::Integer(i) => Ok(*i as f64),
            _ => Err(self.error("a number")),
        }
    }

    fn u64(&self) -> Result<u64> {
        match self.value {
            toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(self.error("a non-negative integer")),
        }
    }

    fn usize(&self) -> Result<usize> {
        self.u64().map(|v| v as usize)
    }

    fn bool(&self) -> Result<bool> {
        self.value.as_bool().ok_or_else(|| self.error("true or false"))
    }

    fn list(&self) -> Result<&Vec<toml::Value>> {
        self.value.as_array().ok_or_else(|| self.error("a list"))
    }
}

// ---- graph replicates ----

/// One generated (or loaded) graph with its couplings and, when a
/// training method is configured, its learned parameters.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub index: u64,
    pub graph: SocialGraph,
    pub couplings: Couplings,
    pub params: Option<ControlParams>,
    pub trace: Option<TrainingTrace>,
    /// Original node ids for loaded graphs.
    pub original_ids: Option<Vec<u64>>,
}

fn build_graph(cfg: &ExperimentConfig, replicate: u64) -> Result<(SocialGraph, Option<Vec<u64>>)> {
    let graph_seed = seed::trial_seed(cfg.seed, Stream::Graph, replicate, 0);
    match &cfg.graph {
        GraphSource::WattsStrogatz { n, k, beta } => Ok((generate_watts_strogatz(*n, *k, *beta, graph_seed)?, None)),
        GraphSource::Tree { n } => Ok((random_tree(*n, graph_seed)?, None)),
        GraphSource::EdgeList { path, subgraph_nodes } => {
            let loaded = io::load_graph(path)?;
            match subgraph_nodes {
                Some(limit) if *limit < loaded.graph.node_count() => {
                    let nodes = bfs_prefix(&loaded.graph, *limit);
                    let ids = nodes.iter().map(|&v| loaded.original_ids[v]).collect();
                    Ok((loaded.graph.induced_subgraph(&nodes)?, Some(ids)))
                }
                _ => Ok((loaded.graph, Some(loaded.original_ids))),
            }
        }
    }
}

/// First `limit` nodes in breadth-first order from the lowest-numbered node
/// of the largest component, returned sorted.
pub fn bfs_prefix(graph: &SocialGraph, limit: usize) -> Vec<usize> {
    let Some(start) = graph.components().first().and_then(|c| c.iter().min().copied()) else {
        return Vec::new();
    };
    let mut seen = vec![false; graph.node_count()];
    let mut order = vec![start];
    seen[start] = true;
    let mut head = 0;
    while head < order.len() && order.len() < limit {
        let v = order[head];
        head += 1;
        for &u in graph.neighbors(v) {
            let u = u as usize;
            if !seen[u] && order.len() < limit {
                seen[u] = true;
                order.push(u);
            }
        }
    }
    order.sort_unstable();
    order
}

fn train(cfg: &ExperimentConfig, graph: &SocialGraph, couplings: &Couplings, replicate: u64) -> Result<(Option<ControlParams>, Option<TrainingTrace>)> {
    match cfg.training {
        TrainingMethod::None => Ok((None, None)),
        TrainingMethod::File => {
            let path = cfg.params_path.as_ref().ok_or_else(|| Error::Config("training = \"file\" needs `params`".into()))?;
            Ok((Some(io::load_params(path, graph)?), None))
        }
        TrainingMethod::Supervised => {
            let out = train_supervised(
                graph,
                couplings,
                &SupervisedConfig {
                    n_train: cfg.train_trials,
                    sigma_ext: cfg.sigma_ext,
                    schedule: cfg.schedule(Mode::Cbp),
                    steps: cfg.supervised_steps,
                    learning_rate: cfg.supervised_lr,
                    seed: cfg.seed,
                    replicate,
                    ..SupervisedConfig::default()
                },
            )?;
            Ok((Some(out.params), None))
        }
        TrainingMethod::Unsupervised => {
            let (params, trace) = train_unsupervised(
                graph,
                couplings,
                &UnsupervisedConfig {
                    n_trials: cfg.train_trials,
                    eta_alpha: cfg.eta_alpha,
                    eta_kappa: cfg.eta_kappa,
                    decay: cfg.decay,
                    sigma_ext: cfg.sigma_ext,
                    schedule: cfg.schedule(Mode::Cbp),
                    seed: cfg.seed,
                    replicate,
                    ..UnsupervisedConfig::default()
                },
            )?;
            Ok((Some(params), Some(trace)))
        }
    }
}

/// Builds and trains every graph replicate of the configured cell.
pub fn prepare_replicates(cfg: &ExperimentConfig) -> Result<Vec<Replicate>> {
    cfg.validate()?;
    let graphs = match cfg.graph {
        GraphSource::EdgeList { .. } => 1,
        _ => cfg.graphs,
    };
    cfg.pool()?.install(|| {
        (0..graphs as u64)
            .into_par_iter()
            .map(|index| {
                let (graph, original_ids) = build_graph(cfg, index)?;
                let couplings = sample_couplings(&graph, cfg.j_max, seed::trial_seed(cfg.seed, Stream::Couplings, index, 0))?;
                let (params, trace) = train(cfg, &graph, &couplings, index)?;
                log::info!("{}: graph {index} ready ({} nodes, {} edges)", cfg.name, graph.node_count(), graph.edge_count());
                Ok(Replicate {
                    index,
                    graph,
                    couplings,
                    params,
                    trace,
                    original_ids,
                })
            })
            .collect()
    })
}

fn params_for(rep: &Replicate, mode: Mode) -> ControlParams {
    match (mode, &rep.params) {
        (Mode::Cbp, Some(p)) => p.clone(),
        _ => ControlParams::bp_defaults(&rep.graph),
    }
}

// ---- trial battery ----

/// Outcome of one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub replicate: u64,
    pub trial: usize,
    pub mode: Mode,
    pub metrics: TrialMetrics,
    pub beliefs: Vec<f64>,
    /// Exact `p(yes)` per node when the oracle was run.
    pub exact: Option<Vec<f64>>,
    pub trajectory: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
pub struct BatteryReport {
    pub k: usize,
    pub beta: f64,
    pub replicates: Vec<Replicate>,
    /// Ordered by replicate, then trial, then mode.
    pub trials: Vec<TrialReport>,
}

impl BatteryReport {
    pub fn for_mode(&self, mode: Mode) -> impl Iterator<Item = &TrialReport> {
        self.trials.iter().filter(move |t| t.mode == mode)
    }

    /// Probability-space RMSE against the oracle, when it was run.
    pub fn oracle_rmse(&self, mode: Mode) -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in self.for_mode(mode) {
            let exact = t.exact.as_ref()?;
            for (b, p) in t.beliefs.iter().zip(exact) {
                sum += (crate::engine::belief_to_probability(*b) - p).powi(2);
                count += 1;
            }
        }
        (count > 0).then(|| (sum / count as f64).sqrt())
    }

    pub fn histogram(&self, mode: Mode, bins: usize) -> Result<BeliefHistogram> {
        let sets: Vec<Vec<f64>> = self.for_mode(mode).map(|t| t.beliefs.clone()).collect();
        belief_histogram(&sets, bins, None, None)
    }
}

/// Runs `cfg.trials` uninformative trials on every graph replicate, in each
/// configured mode.
pub fn run_trial_battery(cfg: &ExperimentConfig) -> Result<BatteryReport> {
    if cfg.trials == 0 {
        return Err(Error::Config("trial battery needs at least one trial".into()));
    }
    let replicates = prepare_replicates(cfg)?;
    battery_on(cfg, replicates)
}

fn battery_on(cfg: &ExperimentConfig, replicates: Vec<Replicate>) -> Result<BatteryReport> {
    let jobs: Vec<(usize, usize)> = (0..replicates.len()).flat_map(|r| (0..cfg.trials).map(move |t| (r, t))).collect();
    let per_job: Vec<Vec<TrialReport>> = cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(r, t)| {
                let rep = &replicates[r];
                let n = rep.graph.node_count();
                let field = uninformative_field(n, cfg.sigma_ext, seed::trial_seed(cfg.seed, Stream::TestField, rep.index, t as u64))?;
                let exact = if cfg.oracle && n <= MAX_ORACLE_NODES {
                    Some(exact_marginals(&IsingModel::new(&rep.graph, &rep.couplings, &field)?)?.p_yes)
                } else {
                    None
                };
                let prop = Propagator::new(&rep.graph, &rep.couplings)?;
                cfg.modes
                    .iter()
                    .map(|&mode| {
                        let sched = ScheduleConfig {
                            record_trajectory: t < cfg.trajectories,
                            ..cfg.schedule(mode)
                        };
                        let out = prop.run(&field, &params_for(rep, mode), &sched)?;
                        Ok(TrialReport {
                            replicate: rep.index,
                            trial: t,
                            mode,
                            metrics: TrialMetrics::compute(&out.state.beliefs, &field, None)?,
                            beliefs: out.state.beliefs,
                            exact: exact.clone(),
                            trajectory: out.trajectory,
                        })
                    })
                    .collect()
            })
            .collect::<Result<_>>()
    })?;
    let (k, beta) = cfg.cell();
    Ok(BatteryReport {
        k,
        beta,
        replicates,
        trials: per_job.into_iter().flatten().collect(),
    })
}

// ---- sweep ----

/// Aggregates for one `(K, β, mode)` grid cell, over all trials of all
/// graph replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub k: usize,
    pub beta: f64,
    pub mode: Mode,
    pub graphs: usize,
    pub trials: usize,
    pub r_mean: f64,
    pub r_std: f64,
    pub p_mean: f64,
    pub p_std: f64,
    pub pct_correct_mean: f64,
    pub overconfidence_median: f64,
    pub histogram: BeliefHistogram,
    pub histogram_modes: usize,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
    pub k_grid: Vec<usize>,
    pub beta_grid: Vec<f64>,
    pub modes: Vec<Mode>,
}

impl SweepReport {
    pub fn cell(&self, k: usize, beta: f64, mode: Mode) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.k == k && c.beta == beta && c.mode == mode)
    }
}

fn aggregate(cfg: &ExperimentConfig, battery: &BatteryReport, mode: Mode) -> Result<SweepCell> {
    let rows: Vec<&TrialReport> = battery.for_mode(mode).collect();
    let r: Vec<f64> = rows.iter().map(|t| t.metrics.radicalization).collect();
    let p: Vec<f64> = rows.iter().map(|t| t.metrics.polarization).collect();
    let acc: Vec<f64> = rows.iter().map(|t| t.metrics.pct_correct).collect();
    let over: Vec<f64> = rows.iter().map(|t| t.metrics.frac_overconfident).collect();
    let (r_mean, r_std) = mean_std(&r);
    let (p_mean, p_std) = mean_std(&p);
    let histogram = battery.histogram(mode, cfg.bins)?;
    Ok(SweepCell {
        k: battery.k,
        beta: battery.beta,
        mode,
        graphs: battery.replicates.len(),
        trials: rows.len(),
        r_mean,
        r_std,
        p_mean,
        p_std,
        pct_correct_mean: mean_std(&acc).0,
        overconfidence_median: median(&over),
        histogram_modes: histogram.mode_count(DEFAULT_MODE_THRESHOLD),
        histogram,
    })
}

/// Trial batteries over every `(K, β)` in the grids (Watts-Strogatz graphs).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    if !matches!(cfg.graph, GraphSource::WattsStrogatz { .. }) {
        return Err(Error::Config("sweeps vary K and beta and need graph = \"ws\"".into()));
    }
    cfg.validate()?;
    let mut cells = Vec::new();
    for &k in &cfg.k_grid {
        for &beta in &cfg.beta_grid {
            let cell_cfg = cfg.with_cell(k, beta);
            let battery = run_trial_battery(&cell_cfg)?;
            for &mode in &cfg.modes {
                cells.push(aggregate(cfg, &battery, mode)?);
            }
            log::info!("{}: cell K={k} beta={beta} done", cfg.name);
        }
    }
    Ok(SweepReport {
        cells,
        k_grid: cfg.k_grid.clone(),
        beta_grid: cfg.beta_grid.clone(),
        modes: cfg.modes.clone(),
    })
}

// ---- dose response ----

/// Percentages of correct nodes at one informed fraction. Curves for modes
/// that were not run are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct DosePoint {
    pub percent_informed: f64,
    pub informed: usize,
    pub trials: usize,
    pub bp: Option<f64>,
    pub cbp: Option<f64>,
    pub mean_field: Option<f64>,
    /// Everyone answers with the sign of the universal observer.
    pub universal: f64,
    /// Every node answers with the sign of its own external message.
    pub external_only: f64,
}

#[derive(Debug, Clone)]
pub struct DoseResponse {
    pub k: usize,
    pub beta: f64,
    pub points: Vec<DosePoint>,
}

/// Percentage-correct curves over `cfg.informed_percent`. The correct
/// answer alternates between yes and no across trials.
pub fn run_dose_response(cfg: &ExperimentConfig) -> Result<DoseResponse> {
    if cfg.trials == 0 {
        return Err(Error::Config("dose response needs at least one trial".into()));
    }
    let replicates = prepare_replicates(cfg)?;
    let grid = &cfg.informed_percent;
    let pool = cfg.pool()?;
    let mut points = Vec::with_capacity(grid.len());
    for (pi, &percent) in grid.iter().enumerate() {
        let jobs: Vec<(usize, usize)> = (0..replicates.len()).flat_map(|r| (0..cfg.trials).map(move |t| (r, t))).collect();
        let scores: Vec<(Vec<f64>, f64, f64)> = pool.install(|| {
            jobs.par_iter()
                .map(|&(r, t)| {
                    let rep = &replicates[r];
                    let n = rep.graph.node_count();
                    let m = informed_count_for_percent(n, percent);
                    let sign: i8 = if t % 2 == 0 { 1 } else { -1 };
                    let trial_index = (pi * cfg.trials + t) as u64;
                    let field = if m == 0 {
                        ExternalField::zeros(n)
                    } else {
                        informative_field(n, m, sign, seed::trial_seed(cfg.seed, Stream::TestField, rep.index, trial_index))?
                    };
                    let prop = Propagator::new(&rep.graph, &rep.couplings)?;
                    let per_mode = cfg
                        .modes
                        .iter()
                        .map(|&mode| {
                            let out = prop.run(&field, &params_for(rep, mode), &cfg.schedule(mode))?;
                            choice_accuracy(&out.state.beliefs, sign)
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    let universal = if universal_observer(&field) * f64::from(sign) > 0.0 { 1.0 } else { 0.0 };
                    let external = choice_accuracy(field.values(), sign)?;
                    Ok((per_mode, universal, external))
                })
                .collect::<Result<_>>()
        })?;
        let count = scores.len() as f64;
        let curve = |mode: Mode| {
            cfg.modes
                .iter()
                .position(|&m| m == mode)
                .map(|k| 100.0 * scores.iter().map(|s| s.0[k]).sum::<f64>() / count)
        };
        points.push(DosePoint {
            percent_informed: percent,
            informed: informed_count_for_percent(replicates[0].graph.node_count(), percent),
            trials: scores.len(),
            bp: curve(Mode::Bp),
            cbp: curve(Mode::Cbp),
            mean_field: curve(Mode::MeanField),
            universal: 100.0 * scores.iter().map(|s| s.1).sum::<f64>() / count,
            external_only: 100.0 * scores.iter().map(|s| s.2).sum::<f64>() / count,
        });
        log::info!("{}: {percent}% informed done", cfg.name);
    }
    let (k, beta) = cfg.cell();
    Ok(DoseResponse { k, beta, points })
}

// ---- degree analysis ----

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeRow {
    pub node: usize,
    pub degree: usize,
    pub mean_abs_belief_bp: f64,
    pub mean_abs_belief_cbp: f64,
    pub kappa: f64,
    /// `None` for isolated nodes.
    pub mean_alpha: Option<f64>,
}

/// Spearman correlations of degree with each column; `None` when undefined
/// (for instance on regular graphs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeCorrelations {
    pub abs_belief_bp: Option<f64>,
    pub abs_belief_cbp: Option<f64>,
    pub kappa: Option<f64>,
    pub mean_alpha: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DegreeAnalysis {
    pub rows: Vec<DegreeRow>,
    pub correlations: DegreeCorrelations,
    pub trials: usize,
    pub original_ids: Option<Vec<u64>>,
    pub trace: Option<TrainingTrace>,
}

/// Per-node degree, mean |B| under BP and CBP, and learned parameters, on
/// the first graph replicate.
pub fn run_degree_analysis(cfg: &ExperimentConfig) -> Result<DegreeAnalysis> {
    if cfg.trials == 0 {
        return Err(Error::Config("degree analysis needs at least one trial".into()));
    }
    if cfg.training == TrainingMethod::None {
        return Err(Error::Config("degree analysis needs trained parameters: set `training`".into()));
    }
    let single = ExperimentConfig {
        graphs: 1,
        modes: vec![Mode::Bp, Mode::Cbp],
        oracle: false,
        trajectories: 0,
        ..cfg.clone()
    };
    let battery = run_trial_battery(&single)?;
    let rep = &battery.replicates[0];
    let params = rep.params.as_ref().expect("training configured");
    let n = rep.graph.node_count();
    let mean_abs = |mode: Mode| {
        let mut acc = vec![0.0; n];
        for t in battery.for_mode(mode) {
            for (a, b) in acc.iter_mut().zip(&t.beliefs) {
                *a += b.abs();
            }
        }
        acc.iter_mut().for_each(|a| *a /= cfg.trials as f64);
        acc
    };
    let (bp, cbp) = (mean_abs(Mode::Bp), mean_abs(Mode::Cbp));
    let alpha = params.mean_alpha_per_node(&rep.graph);
    let degrees = rep.graph.degrees();
    let rows: Vec<DegreeRow> = (0..n)
        .map(|v| DegreeRow {
            node: v,
            degree: degrees[v],
            mean_abs_belief_bp: bp[v],
            mean_abs_belief_cbp: cbp[v],
            kappa: params.kappa()[v],
            mean_alpha: alpha[v],
        })
        .collect();
    let deg: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let (alpha_deg, alpha_val): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| r.mean_alpha.map(|a| (r.degree as f64, a))).unzip();
    let correlations = DegreeCorrelations {
        abs_belief_bp: spearman(&deg, &bp),
        abs_belief_cbp: spearman(&deg, &cbp),
        kappa: spearman(&deg, params.kappa()),
        mean_alpha: spearman(&alpha_deg, &alpha_val),
    };
    Ok(DegreeAnalysis {
        rows,
        correlations,
        trials: cfg.trials,
        original_ids: rep.original_ids.clone(),
        trace: rep.trace.clone(),
    })
}

// ---- reports ----

#[derive(Debug, Clone)]
pub enum Report {
    Battery(BatteryReport),
    Sweep(SweepReport),
    DoseResponse(DoseResponse),
    Degree(DegreeAnalysis),
}

/// Writes CSVs (and SVG plots when `plots`) under `out_dir`; returns the
/// paths written, in order.
pub fn emit_report(reports: &[Report], out_dir: &Path, prov: &Provenance, plots: bool) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::Empty("no reports to emit".into()));
    }
    let header = prov.header();
    let mut written = Vec::new();
    let mut put = |name: String, contents: String| -> Result<()> {
        let path = out_dir.join(name);
        io::write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };
    for report in reports {
        match report {
            Report::Battery(b) => emit_battery(b, prov, &header, plots, &mut put)?,
            Report::Sweep(s) => emit_sweep(s, prov, &header, plots, &mut put)?,
            Report::DoseResponse(d) => emit_dose(d, &header, plots, &mut put)?,
            Report::Degree(d) => emit_degree(d, prov, &header, plots, &mut put)?,
        }
    }
    io::write_file(&out_dir.join("provenance.toml"), &prov.to_toml())?;
    Ok(written)
}

type Sink<'a> = dyn FnMut(String, String) -> Result<()> + 'a;

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "undefined".into())
}

fn emit_battery(b: &BatteryReport, prov: &Provenance, header: &str, plots: bool, put: &mut Sink<'_>) -> Result<()> {
    let mut modes: Vec<Mode> = Vec::new();
    for t in &b.trials {
        if !modes.contains(&t.mode) {
            modes.push(t.mode);
        }
    }
    for rep in &b.replicates {
        let g = rep.index;
        put(format!("battery/graph_g{g}.txt"), io::graph_to_string(&rep.graph, Some(prov)))?;
        put(format!("battery/couplings_g{g}.csv"), io::couplings_to_string(&rep.graph, &rep.couplings, Some(prov)))?;
        if let Some(p) = &rep.params {
            put(format!("battery/params_g{g}.csv"), io::params_to_string(&rep.graph, p, Some(prov)))?;
        }
        for &mode in &modes {
            let rows: Vec<TrialMetrics> = b.for_mode(mode).filter(|t| t.replicate == g).map(|t| t.metrics).collect();
            put(format!("battery/metrics_{}_g{g}.csv", mode.name()), io::metrics_to_string(&rows, Some(prov)))?;
            for t in b.for_mode(mode).filter(|t| t.replicate == g) {
                if let Some(traj) = &t.trajectory {
                    put(
                        format!("battery/trajectory_{}_g{g}_t{}.csv", mode.name(), t.trial),
                        io::trajectory_to_string(traj, Some(prov)),
                    )?;
                }
            }
        }
    }
    let mut rmse = String::from(header);
    rmse.push_str("mode,rmse\n");
    let mut any_oracle = false;
    for &mode in &modes {
        if let Some(e) = b.oracle_rmse(mode) {
            any_oracle = true;
            let _ = writeln!(rmse, "{},{}", mode.name(), fmt_f64(e));
        }
    }
    if any_oracle {
        put("battery/oracle_rmse.csv".into(), rmse)?;
    }
    for &mode in &modes {
        let bins = 41;
        let hist = b.histogram(mode, bins)?;
        put(format!("battery/histogram_{}.csv", mode.name()), io::histogram_to_string(&hist, Some(prov)))?;
        if plots {
            put(
                format!("battery/histogram_{}.svg", mode.name()),
                plot::histogram_svg(header, &format!("{} beliefs", mode.name()), &hist),
            )?;
            if any_oracle {
                let points: Vec<(f64, f64)> = b
                    .for_mode(mode)
                    .flat_map(|t| {
                        let exact = t.exact.clone().unwrap_or_default();
                        t.beliefs
                            .iter()
                            .zip(exact)
                            .map(|(&bel, p)| (p, crate::engine::belief_to_probability(bel)))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                put(
                    format!("battery/scatter_{}.svg", mode.name()),
                    plot::scatter_svg(
                        header,
                        &format!("{} vs exact marginals", mode.name()),
                        "exact p(yes)",
                        "approximate p(yes)",
                        &[Series::new(mode.name(), PALETTE[modes.iter().position(|m| *m == mode).unwrap_or(0) % PALETTE.len()], points)],
                        true,
                        Some((0.0, 1.0, 0.0, 1.0)),
                    ),
                )?;
            }
        }
    }
    Ok(())
}

fn emit_sweep(s: &SweepReport, prov: &Provenance, header: &str, plots: bool, put: &mut Sink<'_>) -> Result<()> {
    let mut csv = String::from(header);
    csv.push_str("K,beta,mode,graphs,trials,R_mean,R_std,P_mean,P_std,pct_correct_mean,overconfidence_median,histogram_modes\n");
    for c in &s.cells {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            c.k,
            c.beta,
            c.mode.name(),
            c.graphs,
            c.trials,
            fmt_f64(c.r_mean),
            fmt_f64(c.r_std),
            fmt_f64(c.p_mean),
            fmt_f64(c.p_std),
            fmt_f64(c.pct_correct_mean),
            fmt_f64(c.overconfidence_median),
            c.histogram_modes
        );
        let stem = format!("sweep/histogram_{}_K{}_beta{}", c.mode.name(), c.k, c.beta);
        put(format!("{stem}.csv"), io::histogram_to_string(&c.histogram, Some(prov)))?;
        if plots {
            put(
                format!("{stem}.svg"),
                plot::histogram_svg(header, &format!("{} beliefs, K={}, beta={}", c.mode.name(), c.k, c.beta), &c.histogram),
            )?;
        }
    }
    put("sweep/cells.csv".into(), csv)?;
    if plots {
        let x_ticks: Vec<String> = s.beta_grid.iter().map(|b| b.to_string()).collect();
        let y_ticks: Vec<String> = s.k_grid.iter().map(|k| k.to_string()).collect();
        for &mode in &s.modes {
            for (label, pick) in [("R", (|c: &SweepCell| c.r_mean) as fn(&SweepCell) -> f64), ("P", |c: &SweepCell| c.p_mean)] {
                let grid: Vec<Vec<f64>> = s
                    .k_grid
                    .iter()
                    .map(|&k| s.beta_grid.iter().map(|&b| s.cell(k, b, mode).map(pick).unwrap_or(f64::NAN)).collect())
                    .collect();
                put(
                    format!("sweep/heatmap_{label}_{}.svg", mode.name()),
                    plot::heatmap_svg(header, &format!("{} mean {label}", mode.name()), "beta", "K", &x_ticks, &y_ticks, &grid),
                )?;
            }
        }
    }
    Ok(())
}

fn emit_dose(d: &DoseResponse, header: &str, plots: bool, put: &mut Sink<'_>) -> Result<()> {
    let mut csv = String::from(header);
    csv.push_str("pct_informed,informed,trials,bp,cbp,mean_field,universal,external_only\n");
    for p in &d.points {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(p.percent_informed),
            p.informed,
            p.trials,
            fmt_opt(p.bp),
            fmt_opt(p.cbp),
            fmt_opt(p.mean_field),
            fmt_f64(p.universal),
            fmt_f64(p.external_only)
        );
    }
    put("dose/curve.csv".into(), csv)?;
    if plots {
        let curve = |name: &str, color: &str, pick: &dyn Fn(&DosePoint) -> Option<f64>, dashed: bool| {
            let points: Vec<(f64, f64)> = d.points.iter().filter_map(|p| pick(p).map(|v| (p.percent_informed, v))).collect();
            (!points.is_empty()).then(|| Series {
                dashed,
                ..Series::new(name, color, points)
            })
        };
        let curves: Vec<Series> = [
            curve("BP", PALETTE[0], &|p| p.bp, false),
            curve("CBP", PALETTE[1], &|p| p.cbp, false),
            curve("mean-field", PALETTE[3], &|p| p.mean_field, false),
            curve("universal observer", PALETTE[2], &|p| Some(p.universal), true),
            curve("external only", PALETTE[5], &|p| Some(p.external_only), true),
        ]
        .into_iter()
        .flatten()
        .collect();
        put(
            "dose/curve.svg".into(),
            plot::line_svg(header, "choice performance", "% nodes informed", "% nodes correct", &curves, Some((0.0, 100.0, 0.0, 100.0))),
        )?;
    }
    Ok(())
}

fn emit_degree(d: &DegreeAnalysis, prov: &Provenance, header: &str, plots: bool, put: &mut Sink<'_>) -> Result<()> {
    let mut csv = String::from(header);
    csv.push_str("node,original_id,degree,abs_b_bp,abs_b_cbp,kappa,mean_alpha\n");
    for r in &d.rows {
        let id = d.original_ids.as_ref().map(|ids| ids[r.node]).unwrap_or(r.node as u64);
        let _ = writeln!(
            csv,
            "{},{id},{},{},{},{},{}",
            r.node,
            r.degree,
            fmt_f64(r.mean_abs_belief_bp),
            fmt_f64(r.mean_abs_belief_cbp),
            fmt_f64(r.kappa),
            fmt_opt(r.mean_alpha)
        );
    }
    put("degree/nodes.csv".into(), csv)?;
    let c = d.correlations;
    let mut corr = String::from(header);
    corr.push_str("quantity,spearman_vs_degree\n");
    for (name, v) in [
        ("abs_b_bp", c.abs_belief_bp),
        ("abs_b_cbp", c.abs_belief_cbp),
        ("kappa", c.kappa),
        ("mean_alpha", c.mean_alpha),
    ] {
        let _ = writeln!(corr, "{name},{}", fmt_opt(v));
    }
    put("degree/correlations.csv".into(), corr)?;
    if let Some(trace) = &d.trace {
        let mut drift = String::from(header);
        drift.push_str("trial,relative_change\n");
        for (t, v) in &trace.window_drift {
            let _ = writeln!(drift, "{t},{}", fmt_f64(*v));
        }
        put("degree/training_drift.csv".into(), drift)?;
    }
    let _ = prov;
    if plots {
        let pts = |f: &dyn Fn(&DegreeRow) -> Option<f64>| -> Vec<(f64, f64)> { d.rows.iter().filter_map(|r| f(r).map(|v| (r.degree as f64, v))).collect() };
        put(
            "degree/abs_belief.svg".into(),
            plot::scatter_svg(
                header,
                "mean |B| vs degree",
                "degree",
                "mean |B|",
                &[
                    Series::new("BP", PALETTE[0], pts(&|r| Some(r.mean_abs_belief_bp))),
                    Series::new("CBP", PALETTE[1], pts(&|r| Some(r.mean_abs_belief_cbp))),
                ],
                false,
                None,
            ),
        )?;
        put(
            "degree/params.svg".into(),
            plot::scatter_svg(
                header,
                "learned parameters vs degree",
                "degree",
                "value",
                &[
                    Series::new("kappa", PALETTE[2], pts(&|r| Some(r.kappa))),
                    Series::new("mean alpha", PALETTE[1], pts(&|r| r.mean_alpha)),
                ],
                false,
                None,
            ),
        )?;
    }
    Ok(())
}
