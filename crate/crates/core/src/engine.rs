//! Damped synchronous message passing: belief propagation, circular belief
//! propagation and the mean-field (variational) scheme.
//!
//! Messages live in log-odds units. For the edge with index `e = {i, j}`,
//! `i < j`, the directed message `i -> j` is stored at `2e` and `j -> i` at
//! `2e + 1`, so the opposite of message `d` is `d ^ 1`.
//!
//! One sweep computes every new message from the previous state only:
//!
//! ```text
//! M[i->j] <- (1 - tau) M[i->j] + tau f_ij(B_i - alpha_ij M[j->i])
//! B_i      = kappa_i (Σ_j M[j->i] + M_ext->i)
//! ```

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::graph::{Couplings, SocialGraph};
use crate::oracle::IsingModel;
use crate::stimuli::ExternalField;

/// Caps the trust weight below 1 so `f` stays finite at saturation.
const ATANH_GUARD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Loop corrections and gains forced to 1.
    Bp,
    /// Uses the supplied [`ControlParams`].
    Cbp,
    /// `g(x) = W tanh(x)` with alpha = 0, kappa = 1.
    MeanField,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Bp => "bp",
            Mode::Cbp => "cbp",
            Mode::MeanField => "mean-field",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bp" => Ok(Mode::Bp),
            "cbp" => Ok(Mode::Cbp),
            "mean-field" | "mean_field" | "meanfield" | "mf" => Ok(Mode::MeanField),
            other => Err(Error::Config(format!("unknown mode `{other}` (expected bp, cbp, mean-field)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleConfig {
    /// Damping rate in `(0, 1]`; 1 means undamped.
    pub tau: f64,
    pub iterations: usize,
    pub mode: Mode,
    pub record_trajectory: bool,
    /// Stop once the largest message change of a sweep drops below this.
    pub early_stop_eps: Option<f64>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            tau: 0.2,
            iterations: 100,
            mode: Mode::Cbp,
            record_trajectory: false,
            early_stop_eps: None,
        }
    }
}

impl ScheduleConfig {
    pub fn with_mode(mode: Mode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau must lie in (0, 1], got {}", self.tau)));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter("iteration count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-edge loop corrections `alpha_ij = alpha_ji` and per-node gains `kappa_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams {
    alpha: Vec<f64>,
    kappa: Vec<f64>,
}

impl ControlParams {
    pub fn new(graph: &SocialGraph, alpha: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if alpha.len() != graph.edge_count() || kappa.len() != graph.node_count() {
            return Err(Error::InvalidParameter(format!(
                "control parameters sized {}/{} for a graph with {} edges and {} nodes",
                alpha.len(),
                kappa.len(),
                graph.edge_count(),
                graph.node_count()
            )));
        }
        let params = Self { alpha, kappa };
        params.check()?;
        Ok(params)
    }

    /// alpha = 1 on every edge, kappa = 1 on every node.
    pub fn bp_defaults(graph: &SocialGraph) -> Self {
        Self {
            alpha: vec![1.0; graph.edge_count()],
            kappa: vec![1.0; graph.node_count()],
        }
    }

    pub(crate) fn from_parts_unchecked(alpha: Vec<f64>, kappa: Vec<f64>) -> Self {
        Self { alpha, kappa }
    }

    pub fn check(&self) -> Result<()> {
        if let Some(a) = self.alpha.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::InvalidParameter(format!("loop correction {a} must be finite and >= 0")));
        }
        if let Some(k) = self.kappa.iter().find(|k| !(k.is_finite() && **k >= 0.0)) {
            return Err(Error::InvalidParameter(format!("gain {k} must be finite and >= 0")));
        }
        Ok(())
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn alpha_mut(&mut self) -> &mut [f64] {
        &mut self.alpha
    }

    pub fn kappa_mut(&mut self) -> &mut [f64] {
        &mut self.kappa
    }

    /// Mean loop correction over each node's incident edges (`None` when isolated).
    pub fn mean_alpha_per_node(&self, graph: &SocialGraph) -> Vec<Option<f64>> {
        let mut sum = vec![0.0; graph.node_count()];
        let mut count = vec![0usize; graph.node_count()];
        for (e, &(i, j)) in graph.edges().iter().enumerate() {
            for v in [i as usize, j as usize] {
                sum[v] += self.alpha[e];
                count[v] += 1;
            }
        }
        sum.into_iter()
            .zip(count)
            .map(|(s, c)| (c > 0).then(|| s / c as f64))
            .collect()
    }
}

/// `f_ij(x) = atanh(tanh(J) tanh(x))`.
pub fn coupling_fn(x: f64, coupling: f64) -> f64 {
    coupling_fn_w(x, coupling.tanh())
}

/// `atanh(W tanh x)` written as `½ ln[((1+W) + (1−W)z) / ((1−W) + (1+W)z)]`
/// with `z = exp(−2|x|)`: one `exp` and one `ln`, finite for every finite `x`.
#[inline]
fn coupling_fn_w(x: f64, trust: f64) -> f64 {
    let w = trust.min(1.0 - ATANH_GUARD);
    let z = (-2.0 * x.abs()).exp();
    let magnitude = 0.5 * (((1.0 + w) + (1.0 - w) * z) / ((1.0 - w) + (1.0 + w) * z)).ln();
    magnitude.copysign(x)
}

/// `g_ij(x) = tanh(J) tanh(x)`.
pub fn mean_field_fn(x: f64, coupling: f64) -> f64 {
    coupling.tanh() * x.tanh()
}

/// Derivative of `f` with respect to its argument, given the trust weight.
#[inline]
pub(crate) fn coupling_fn_slope(x: f64, trust: f64) -> f64 {
    let t = x.tanh();
    let y = trust.min(1.0 - ATANH_GUARD) * t;
    trust * (1.0 - t * t) / (1.0 - y * y)
}

/// `b(x = yes) = 1 / (1 + exp(-2B))`.
pub fn belief_to_probability(belief: f64) -> f64 {
    if belief >= 0.0 {
        1.0 / (1.0 + (-2.0 * belief).exp())
    } else {
        let e = (2.0 * belief).exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationState {
    /// `2|E|` directed messages, see the module docs for the layout.
    pub messages: Vec<f64>,
    pub beliefs: Vec<f64>,
    pub iteration: usize,
}

impl PropagationState {
    /// Message `from -> to`, if the edge exists.
    pub fn message(&self, graph: &SocialGraph, from: usize, to: usize) -> Option<f64> {
        let e = graph.edge_index(from, to)?;
        Some(self.messages[2 * e + usize::from(from > to)])
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: PropagationState,
    /// Beliefs at iteration 0 (initial) through the last executed sweep.
    pub trajectory: Option<Vec<Vec<f64>>>,
    /// Largest message change in the last sweep.
    pub last_change: f64,
}

/// Parameters as actually applied by a mode.
pub(crate) struct Effective<'p> {
    pub alpha: Cow<'p, [f64]>,
    pub kappa: Cow<'p, [f64]>,
    pub mean_field: bool,
}

/// Precomputed topology for repeated propagation on one graph.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    graph: &'a SocialGraph,
    trust: Vec<f64>,
    /// Sender of each directed message.
    source: Vec<u32>,
    /// Incoming directed-message ids per node, CSR layout.
    in_offsets: Vec<usize>,
    in_messages: Vec<u32>,
}

impl<'a> Propagator<'a> {
    pub fn new(graph: &'a SocialGraph, couplings: &Couplings) -> Result<Self> {
        if couplings.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} couplings for {} edges",
                couplings.len(),
                graph.edge_count()
            )));
        }
        let n = graph.node_count();
        let mut source = Vec::with_capacity(2 * graph.edge_count());
        for &(i, j) in graph.edges() {
            source.push(i);
            source.push(j);
        }
        let mut in_offsets = Vec::with_capacity(n + 1);
        let mut in_messages = Vec::with_capacity(2 * graph.edge_count());
        in_offsets.push(0);
        for v in 0..n {
            for &u in graph.neighbors(v) {
                let e = graph.edge_index(v, u as usize).expect("adjacency matches edge list");
                // message u -> v
                in_messages.push((2 * e + usize::from((u as usize) > v)) as u32);
            }
            in_offsets.push(in_messages.len());
        }
        Ok(Self {
            graph,
            trust: couplings.trust_weights(),
            source,
            in_offsets,
            in_messages,
        })
    }

    pub fn graph(&self) -> &'a SocialGraph {
        self.graph
    }

    pub(crate) fn trust(&self) -> &[f64] {
        &self.trust
    }

    pub(crate) fn source(&self) -> &[u32] {
        &self.source
    }

    pub(crate) fn incoming(&self, node: usize) -> &[u32] {
        &self.in_messages[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    fn check_inputs(&self, field: &ExternalField, params: &ControlParams) -> Result<()> {
        if field.len() != self.graph.node_count() {
            return Err(Error::InvalidParameter(format!(
                "external field has {} entries for {} nodes",
                field.len(),
                self.graph.node_count()
            )));
        }
        if params.alpha.len() != self.graph.edge_count() || params.kappa.len() != self.graph.node_count() {
            return Err(Error::InvalidParameter("control parameters do not match the graph".into()));
        }
        Ok(())
    }

    pub(crate) fn effective<'p>(&self, mode: Mode, params: &'p ControlParams) -> Effective<'p> {
        match mode {
            Mode::Cbp => Effective {
                alpha: Cow::Borrowed(&params.alpha),
                kappa: Cow::Borrowed(&params.kappa),
                mean_field: false,
            },
            Mode::Bp => Effective {
                alpha: Cow::Owned(vec![1.0; self.graph.edge_count()]),
                kappa: Cow::Owned(vec![1.0; self.graph.node_count()]),
                mean_field: false,
            },
            Mode::MeanField => Effective {
                alpha: Cow::Owned(vec![0.0; self.graph.edge_count()]),
                kappa: Cow::Owned(vec![1.0; self.graph.node_count()]),
                mean_field: true,
            },
        }
    }

    /// Zero messages and beliefs `kappa_i M_ext->i`.
    pub fn initial_state(&self, field: &ExternalField, params: &ControlParams, mode: Mode) -> Result<PropagationState> {
        self.check_inputs(field, params)?;
        let eff = self.effective(mode, params);
        let messages = vec![0.0; 2 * self.graph.edge_count()];
        let mut beliefs = vec![0.0; self.graph.node_count()];
        self.compute_beliefs(&messages, field.values(), &eff.kappa, &mut beliefs);
        Ok(PropagationState {
            messages,
            beliefs,
            iteration: 0,
        })
    }

    pub(crate) fn compute_beliefs(&self, messages: &[f64], field: &[f64], kappa: &[f64], beliefs: &mut [f64]) {
        for (v, b) in beliefs.iter_mut().enumerate() {
            let incoming: f64 = self.incoming(v).iter().map(|&d| messages[d as usize]).sum();
            *b = kappa[v] * (incoming + field[v]);
        }
    }

    /// One Jacobi sweep from `(messages, beliefs)` into `next`. Returns the largest change.
    pub(crate) fn sweep(
        &self,
        messages: &[f64],
        beliefs: &[f64],
        next: &mut [f64],
        eff: &Effective<'_>,
        tau: f64,
        iteration: usize,
    ) -> Result<f64> {
        let mut max_change: f64 = 0.0;
        for (d, out) in next.iter_mut().enumerate() {
            let e = d >> 1;
            let from = self.source[d] as usize;
            let cavity = beliefs[from] - eff.alpha[e] * messages[d ^ 1];
            let target = if eff.mean_field {
                self.trust[e] * cavity.tanh()
            } else {
                coupling_fn_w(cavity, self.trust[e])
            };
            let updated = (1.0 - tau) * messages[d] + tau * target;
            if !updated.is_finite() {
                return Err(Error::NonFiniteMessage {
                    from,
                    to: self.source[d ^ 1] as usize,
                    iteration,
                });
            }
            max_change = max_change.max((updated - messages[d]).abs());
            *out = updated;
        }
        Ok(max_change)
    }

    /// Advances `state` by one sweep.
    pub fn step(
        &self,
        state: &PropagationState,
        field: &ExternalField,
        params: &ControlParams,
        sched: &ScheduleConfig,
    ) -> Result<PropagationState> {
        sched.validate()?;
        self.check_inputs(field, params)?;
        if state.messages.len() != 2 * self.graph.edge_count() || state.beliefs.len() != self.graph.node_count() {
            return Err(Error::InvalidParameter("propagation state does not match the graph".into()));
        }
        let eff = self.effective(sched.mode, params);
        let mut messages = vec![0.0; state.messages.len()];
        self.sweep(&state.messages, &state.beliefs, &mut messages, &eff, sched.tau, state.iteration + 1)?;
        let mut beliefs = vec![0.0; state.beliefs.len()];
        self.compute_beliefs(&messages, field.values(), &eff.kappa, &mut beliefs);
        Ok(PropagationState {
            messages,
            beliefs,
            iteration: state.iteration + 1,
        })
    }

    /// Runs `sched.iterations` sweeps from zero messages.
    pub fn run(&self, field: &ExternalField, params: &ControlParams, sched: &ScheduleConfig) -> Result<RunOutput> {
        sched.validate()?;
        let mut state = self.initial_state(field, params, sched.mode)?;
        let eff = self.effective(sched.mode, params);
        let mut trajectory = sched.record_trajectory.then(|| vec![state.beliefs.clone()]);
        let mut next = vec![0.0; state.messages.len()];
        let mut last_change = 0.0;
        for t in 1..=sched.iterations {
            last_change = self.sweep(&state.messages, &state.beliefs, &mut next, &eff, sched.tau, t)?;
            std::mem::swap(&mut state.messages, &mut next);
            self.compute_beliefs(&state.messages, field.values(), &eff.kappa, &mut state.beliefs);
            state.iteration = t;
            if let Some(traj) = trajectory.as_mut() {
                traj.push(state.beliefs.clone());
            }
            if sched.early_stop_eps.is_some_and(|eps| last_change < eps) {
                break;
            }
        }
        Ok(RunOutput {
            state,
            trajectory,
            last_change,
        })
    }
}

/// One sweep on a model (builds the topology each call; use [`Propagator`] in loops).
pub fn step(
    state: &PropagationState,
    model: &IsingModel<'_>,
    params: &ControlParams,
    sched: &ScheduleConfig,
) -> Result<PropagationState> {
    Propagator::new(model.graph(), model.couplings())?.step(state, model.field(), params, sched)
}

pub fn run(model: &IsingModel<'_>, params: &ControlParams, sched: &ScheduleConfig) -> Result<RunOutput> {
    Propagator::new(model.graph(), model.couplings())?.run(model.field(), params, sched)
}
