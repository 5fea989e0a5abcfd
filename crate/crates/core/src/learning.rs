//! Fitting the loop corrections and gains of circular belief propagation.
//!
//! Two routes:
//! * supervised: minimise the squared distance between propagated marginals
//!   and exact marginals on small graphs, by projected Adam on a gradient
//!   obtained either by reverse-mode differentiation through the unrolled
//!   damped recursion or by central finite differences;
//! * unsupervised: local decorrelation rules applied after every trial of
//!   uninformative evidence, usable on graphs of any size.

use crate::engine::{belief_to_probability, ControlParams, Mode, Propagator, ScheduleConfig};
use crate::error::{Error, Result};
use crate::graph::{Couplings, SocialGraph};
use crate::oracle::{exact_marginals, IsingModel};
use crate::seed::{self, Stream};
use crate::stimuli::{uninformative_field, ExternalField};

/// One supervised example: a field and the exact `p(x_i = +1)` it induces.
#[derive(Debug, Clone)]
pub struct TrainingExample {
    pub field: ExternalField,
    pub target: Vec<f64>,
}

/// Draws `count` uninformative fields and labels them with the exact oracle.
pub fn make_examples(
    graph: &SocialGraph,
    couplings: &Couplings,
    count: usize,
    sigma_ext: f64,
    base_seed: u64,
    stream: Stream,
    replicate: u64,
) -> Result<Vec<TrainingExample>> {
    (0..count as u64)
        .map(|t| {
            let field = uninformative_field(graph.node_count(), sigma_ext, seed::trial_seed(base_seed, stream, replicate, t))?;
            let target = exact_marginals(&IsingModel::new(graph, couplings, &field)?)?.p_yes;
            Ok(TrainingExample { field, target })
        })
        .collect()
}

/// Gradient of the supervised loss with respect to every control parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGradient {
    pub alpha: Vec<f64>,
    pub kappa: Vec<f64>,
}

impl ParamGradient {
    fn zeros(edges: usize, nodes: usize) -> Self {
        Self {
            alpha: vec![0.0; edges],
            kappa: vec![0.0; nodes],
        }
    }
}

/// `Σ_trials Σ_i Σ_{x_i} (b_i(x_i) - p_i(x_i))^2`, i.e. `2 Σ (b_i(+1) - p_i(+1))^2`.
pub fn supervised_loss(
    prop: &Propagator<'_>,
    examples: &[TrainingExample],
    params: &ControlParams,
    sched: &ScheduleConfig,
) -> Result<f64> {
    let sched = cbp_fixed(sched);
    let mut loss = 0.0;
    for ex in examples {
        let out = prop.run(&ex.field, params, &sched)?;
        loss += out
            .state
            .beliefs
            .iter()
            .zip(&ex.target)
            .map(|(&b, &p)| 2.0 * (belief_to_probability(b) - p).powi(2))
            .sum::<f64>();
    }
    if !loss.is_finite() {
        return Err(Error::NonFinite("supervised loss".into()));
    }
    Ok(loss)
}

/// Root-mean-square error in probability space for a loss from [`supervised_loss`].
pub fn loss_to_rmse(loss: f64, examples: usize, nodes: usize) -> f64 {
    (loss / (2.0 * (examples * nodes) as f64)).sqrt()
}

fn cbp_fixed(sched: &ScheduleConfig) -> ScheduleConfig {
    ScheduleConfig {
        mode: Mode::Cbp,
        record_trajectory: false,
        early_stop_eps: None,
        ..sched.clone()
    }
}

/// Loss and its exact gradient by reverse-mode differentiation through all
/// `sched.iterations` damped sweeps.
pub fn supervised_gradient(
    prop: &Propagator<'_>,
    examples: &[TrainingExample],
    params: &ControlParams,
    sched: &ScheduleConfig,
) -> Result<(f64, ParamGradient)> {
    let sched = cbp_fixed(sched);
    sched.validate()?;
    let graph = prop.graph();
    let (n, m) = (graph.node_count(), 2 * graph.edge_count());
    let steps = sched.iterations;
    let tau = sched.tau;
    let eff = prop.effective(Mode::Cbp, params);
    let (alpha, kappa) = (&eff.alpha, &eff.kappa);
    let trust = prop.trust();
    let source = prop.source();

    let mut grad = ParamGradient::zeros(graph.edge_count(), n);
    let mut loss = 0.0;
    let mut msgs = vec![vec![0.0; m]; steps + 1];
    let mut beliefs = vec![vec![0.0; n]; steps + 1];
    let mut g_msg = vec![0.0; m];
    let mut g_prev = vec![0.0; m];
    let mut g_belief = vec![0.0; n];
    let mut g_belief_prev = vec![0.0; n];

    for ex in examples {
        let h = ex.field.values();
        msgs[0].iter_mut().for_each(|v| *v = 0.0);
        prop.compute_beliefs(&msgs[0], h, kappa, &mut beliefs[0]);
        for t in 1..=steps {
            let (done, rest) = msgs.split_at_mut(t);
            prop.sweep(&done[t - 1], &beliefs[t - 1], &mut rest[0], &eff, tau, t)?;
            prop.compute_beliefs(&msgs[t], h, kappa, &mut beliefs[t]);
        }

        for (v, gb) in g_belief.iter_mut().enumerate() {
            let q = belief_to_probability(beliefs[steps][v]);
            let diff = q - ex.target[v];
            loss += 2.0 * diff * diff;
            // d/dB of 2 (σ(2B) - p)^2
            *gb = 8.0 * diff * q * (1.0 - q);
        }
        g_msg.iter_mut().for_each(|v| *v = 0.0);

        for t in (0..=steps).rev() {
            // B^t = κ (Σ m^t_in + h)
            for v in 0..n {
                let gb = g_belief[v];
                if gb == 0.0 {
                    continue;
                }
                let incoming = prop.incoming(v);
                let sum: f64 = incoming.iter().map(|&d| msgs[t][d as usize]).sum();
                grad.kappa[v] += gb * (sum + h[v]);
                for &d in incoming {
                    g_msg[d as usize] += kappa[v] * gb;
                }
            }
            if t == 0 {
                break;
            }
            // m^t = (1-τ) m^{t-1} + τ f(B^{t-1}_src - α m^{t-1}_rev)
            g_prev.iter_mut().for_each(|v| *v = 0.0);
            g_belief_prev.iter_mut().for_each(|v| *v = 0.0);
            let (prev_m, prev_b) = (&msgs[t - 1], &beliefs[t - 1]);
            for d in 0..m {
                let g = g_msg[d];
                if g == 0.0 {
                    continue;
                }
                let e = d >> 1;
                let src = source[d] as usize;
                g_prev[d] += (1.0 - tau) * g;
                let cavity = prev_b[src] - alpha[e] * prev_m[d ^ 1];
                let s = tau * crate::engine::coupling_fn_slope(cavity, trust[e]) * g;
                g_belief_prev[src] += s;
                g_prev[d ^ 1] -= alpha[e] * s;
                grad.alpha[e] -= prev_m[d ^ 1] * s;
            }
            std::mem::swap(&mut g_msg, &mut g_prev);
            std::mem::swap(&mut g_belief, &mut g_belief_prev);
        }
    }
    if !loss.is_finite() || grad.alpha.iter().chain(&grad.kappa).any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("supervised loss or gradient".into()));
    }
    Ok((loss, grad))
}

/// Loss and central finite-difference gradient with perturbation `step`.
pub fn finite_difference_gradient(
    prop: &Propagator<'_>,
    examples: &[TrainingExample],
    params: &ControlParams,
    sched: &ScheduleConfig,
    step: f64,
) -> Result<(f64, ParamGradient)> {
    let loss = supervised_loss(prop, examples, params, sched)?;
    let mut grad = ParamGradient::zeros(params.alpha().len(), params.kappa().len());
    let eval = |alpha: Vec<f64>, kappa: Vec<f64>| {
        supervised_loss(prop, examples, &ControlParams::from_parts_unchecked(alpha, kappa), sched)
    };
    for e in 0..params.alpha().len() {
        let mut up = params.alpha().to_vec();
        let mut down = up.clone();
        up[e] += step;
        down[e] -= step;
        grad.alpha[e] = (eval(up, params.kappa().to_vec())? - eval(down, params.kappa().to_vec())?) / (2.0 * step);
    }
    for v in 0..params.kappa().len() {
        let mut up = params.kappa().to_vec();
        let mut down = up.clone();
        up[v] += step;
        down[v] -= step;
        grad.kappa[v] = (eval(params.alpha().to_vec(), up)? - eval(params.alpha().to_vec(), down)?) / (2.0 * step);
    }
    Ok((loss, grad))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    Analytic,
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedConfig {
    pub n_train: usize,
    pub sigma_ext: f64,
    pub schedule: ScheduleConfig,
    pub steps: usize,
    pub learning_rate: f64,
    pub gradient: GradientMethod,
    pub seed: u64,
    /// Graph replicate index, mixed into the training-field seeds.
    pub replicate: u64,
}

impl Default for SupervisedConfig {
    fn default() -> Self {
        Self {
            n_train: 300,
            sigma_ext: 1.0,
            schedule: ScheduleConfig::default(),
            steps: 150,
            learning_rate: 0.03,
            gradient: GradientMethod::Analytic,
            seed: 0,
            replicate: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SupervisedOutcome {
    pub params: ControlParams,
    /// Training loss of plain BP, i.e. at alpha = kappa = 1.
    pub initial_loss: f64,
    pub final_loss: f64,
    /// Training loss at every optimizer step.
    pub history: Vec<f64>,
}

/// Projected Adam from alpha = kappa = 1; returns the best parameters seen,
/// so the final loss never exceeds the BP loss.
pub fn train_supervised(graph: &SocialGraph, couplings: &Couplings, cfg: &SupervisedConfig) -> Result<SupervisedOutcome> {
    if cfg.n_train == 0 {
        return Err(Error::InvalidParameter("supervised training needs at least one trial".into()));
    }
    if cfg.learning_rate.is_nan() || cfg.learning_rate <= 0.0 {
        return Err(Error::InvalidParameter(format!("learning rate must be positive, got {}", cfg.learning_rate)));
    }
    let examples = make_examples(graph, couplings, cfg.n_train, cfg.sigma_ext, cfg.seed, Stream::TrainField, cfg.replicate)?;
    train_supervised_on(graph, couplings, &examples, cfg)
}

/// As [`train_supervised`] on a prepared training set.
pub fn train_supervised_on(
    graph: &SocialGraph,
    couplings: &Couplings,
    examples: &[TrainingExample],
    cfg: &SupervisedConfig,
) -> Result<SupervisedOutcome> {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    let prop = Propagator::new(graph, couplings)?;
    let mut params = ControlParams::bp_defaults(graph);
    let len = params.alpha().len() + params.kappa().len();
    let mut first = vec![0.0; len];
    let mut second = vec![0.0; len];
    let mut best = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut initial_loss = f64::NAN;
    let mut history = Vec::with_capacity(cfg.steps + 1);

    for step in 0..=cfg.steps {
        let (loss, grad) = match cfg.gradient {
            GradientMethod::Analytic => supervised_gradient(&prop, examples, &params, &cfg.schedule)?,
            GradientMethod::FiniteDifference { step: h } => {
                finite_difference_gradient(&prop, examples, &params, &cfg.schedule, h)?
            }
        };
        if step == 0 {
            initial_loss = loss;
        }
        history.push(loss);
        if loss < best_loss {
            best_loss = loss;
            best = params.clone();
        }
        if step == cfg.steps {
            break;
        }
        let t = (step + 1) as i32;
        let (bias1, bias2) = (1.0 - BETA1.powi(t), 1.0 - BETA2.powi(t));
        let n_alpha = params.alpha().len();
        for (k, g) in grad.alpha.iter().chain(&grad.kappa).enumerate() {
            first[k] = BETA1 * first[k] + (1.0 - BETA1) * g;
            second[k] = BETA2 * second[k] + (1.0 - BETA2) * g * g;
            let delta = cfg.learning_rate * (first[k] / bias1) / ((second[k] / bias2).sqrt() + EPS);
            let slot = if k < n_alpha {
                &mut params.alpha_mut()[k]
            } else {
                &mut params.kappa_mut()[k - n_alpha]
            };
            *slot = (*slot - delta).max(0.0);
        }
    }
    Ok(SupervisedOutcome {
        params: best,
        initial_loss,
        final_loss: best_loss,
        history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateDecay {
    Constant,
    /// `eta / sqrt(trial)`, trials counted from 1.
    InvSqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnsupervisedConfig {
    pub n_trials: usize,
    pub eta_alpha: f64,
    pub eta_kappa: f64,
    pub decay: RateDecay,
    pub sigma_ext: f64,
    pub schedule: ScheduleConfig,
    pub seed: u64,
    pub replicate: u64,
    /// Abort when any parameter exceeds this magnitude.
    pub ceiling: f64,
    /// Keep a parameter snapshot every this many trials (0 keeps none).
    pub snapshot_every: usize,
}

impl Default for UnsupervisedConfig {
    fn default() -> Self {
        Self {
            n_trials: 2000,
            eta_alpha: 1e-2,
            eta_kappa: 1e-3,
            decay: RateDecay::InvSqrt,
            sigma_ext: 1.0,
            schedule: ScheduleConfig::default(),
            seed: 0,
            replicate: 0,
            ceiling: 10.0,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub snapshots: Vec<(usize, ControlParams)>,
    /// `(trial, ‖θ_trial − θ_previous_window‖ / ‖θ_trial‖)` every 10% of the run.
    pub window_drift: Vec<(usize, f64)>,
    /// Relative parameter change over the last 10% of trials.
    pub final_drift: f64,
}

/// Loop-correction update for one direction: `M_j→i (B_i − α_ij M_j→i)`.
pub fn directed_alpha_delta(incoming: f64, belief: f64, alpha: f64) -> f64 {
    incoming * (belief - alpha * incoming)
}

/// Decorrelation updates for one finished trial.
///
/// `Δα_ij = ½ [M_j→i (B_i − α_ij M_j→i) + M_i→j (B_j − α_ij M_i→j)]` and
/// `Δκ_i = −(B_i² − Σ_j M_j→i² − M_ext→i²)`, before scaling by the rates.
pub fn decorrelation_deltas(
    graph: &SocialGraph,
    messages: &[f64],
    beliefs: &[f64],
    field: &[f64],
    params: &ControlParams,
) -> ParamGradient {
    let mut delta = ParamGradient::zeros(graph.edge_count(), graph.node_count());
    let mut incoming_sq = vec![0.0; graph.node_count()];
    for (e, &(i, j)) in graph.edges().iter().enumerate() {
        let (i, j) = (i as usize, j as usize);
        let to_j = messages[2 * e];
        let to_i = messages[2 * e + 1];
        let a = params.alpha()[e];
        delta.alpha[e] = 0.5 * (directed_alpha_delta(to_i, beliefs[i], a) + directed_alpha_delta(to_j, beliefs[j], a));
        incoming_sq[i] += to_i * to_i;
        incoming_sq[j] += to_j * to_j;
    }
    for v in 0..graph.node_count() {
        delta.kappa[v] = -(beliefs[v] * beliefs[v] - incoming_sq[v] - field[v] * field[v]);
    }
    delta
}

/// Runs `cfg.n_trials` uninformative trials from alpha = kappa = 1, applying
/// the decorrelation rules to the final state of each trial.
pub fn train_unsupervised(
    graph: &SocialGraph,
    couplings: &Couplings,
    cfg: &UnsupervisedConfig,
) -> Result<(ControlParams, TrainingTrace)> {
    train_unsupervised_from(graph, couplings, ControlParams::bp_defaults(graph), cfg)
}

/// As [`train_unsupervised`] from given starting parameters.
pub fn train_unsupervised_from(
    graph: &SocialGraph,
    couplings: &Couplings,
    start: ControlParams,
    cfg: &UnsupervisedConfig,
) -> Result<(ControlParams, TrainingTrace)> {
    if cfg.n_trials == 0 {
        return Err(Error::InvalidParameter("unsupervised training needs at least one trial".into()));
    }
    if !(cfg.eta_alpha > 0.0 && cfg.eta_kappa > 0.0) {
        return Err(Error::InvalidParameter("learning rates must be positive".into()));
    }
    let sched = ScheduleConfig {
        mode: Mode::Cbp,
        record_trajectory: false,
        ..cfg.schedule.clone()
    };
    let prop = Propagator::new(graph, couplings)?;
    let mut params = start;
    let window = (cfg.n_trials / 10).max(1);
    let mut window_start = params.clone();
    let mut snapshots = Vec::new();
    let mut window_drift = Vec::new();
    let mut final_drift = 0.0;

    for trial in 1..=cfg.n_trials {
        let field = uninformative_field(
            graph.node_count(),
            cfg.sigma_ext,
            seed::trial_seed(cfg.seed, Stream::TrainField, cfg.replicate, trial as u64 - 1),
        )?;
        let out = prop.run(&field, &params, &sched)?;
        let delta = decorrelation_deltas(graph, &out.state.messages, &out.state.beliefs, field.values(), &params);
        let scale = match cfg.decay {
            RateDecay::Constant => 1.0,
            RateDecay::InvSqrt => 1.0 / (trial as f64).sqrt(),
        };
        let (ea, ek) = (cfg.eta_alpha * scale, cfg.eta_kappa * scale);
        for (a, d) in params.alpha_mut().iter_mut().zip(&delta.alpha) {
            *a = (*a + ea * d).max(0.0);
        }
        for (k, d) in params.kappa_mut().iter_mut().zip(&delta.kappa) {
            *k = (*k + ek * d).max(0.0);
        }
        if let Some(bad) = params
            .alpha()
            .iter()
            .chain(params.kappa())
            .find(|p| !p.is_finite() || p.abs() > cfg.ceiling)
        {
            return Err(Error::Divergence(format!(
                "parameter reached {bad} after trial {trial} (ceiling {}); try smaller learning rates",
                cfg.ceiling
            )));
        }
        if cfg.snapshot_every > 0 && trial % cfg.snapshot_every == 0 {
            snapshots.push((trial, params.clone()));
        }
        if trial % window == 0 || trial == cfg.n_trials {
            let drift = relative_change(&window_start, &params);
            window_drift.push((trial, drift));
            if trial + window > cfg.n_trials {
                final_drift = drift;
            }
            window_start = params.clone();
        }
    }
    Ok((
        params,
        TrainingTrace {
            snapshots,
            window_drift,
            final_drift,
        },
    ))
}

fn relative_change(before: &ControlParams, after: &ControlParams) -> f64 {
    let diff: f64 = before
        .alpha()
        .iter()
        .chain(before.kappa())
        .zip(after.alpha().iter().chain(after.kappa()))
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let norm: f64 = after.alpha().iter().chain(after.kappa()).map(|v| v * v).sum();
    if norm > 0.0 {
        (diff / norm).sqrt()
    } else {
        diff.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_watts_strogatz, random_tree, sample_couplings};

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let g = generate_watts_strogatz(6, 2, 0.3, 3).unwrap();
        let c = sample_couplings(&g, 0.6, 3).unwrap();
        let ex = make_examples(&g, &c, 4, 1.0, 3, Stream::TrainField, 0).unwrap();
        let prop = Propagator::new(&g, &c).unwrap();
        let sched = ScheduleConfig {
            iterations: 30,
            ..ScheduleConfig::default()
        };
        let alpha: Vec<f64> = (0..g.edge_count()).map(|e| 0.6 + 0.05 * e as f64).collect();
        let kappa: Vec<f64> = (0..6).map(|v| 0.7 + 0.1 * v as f64).collect();
        let params = ControlParams::new(&g, alpha, kappa).unwrap();
        let (l1, analytic) = supervised_gradient(&prop, &ex, &params, &sched).unwrap();
        let (l2, numeric) = finite_difference_gradient(&prop, &ex, &params, &sched, 1e-5).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, n) in analytic.alpha.iter().chain(&analytic.kappa).zip(numeric.alpha.iter().chain(&numeric.kappa)) {
            assert!((a - n).abs() < 1e-6 * (1.0 + n.abs()), "analytic {a} vs numeric {n}");
        }
    }

    #[test]
    fn two_node_graph_reaches_zero_loss() {
        let g = SocialGraph::from_edges(2, [(0, 1)]).unwrap();
        let c = Couplings::new(&g, vec![0.4]).unwrap();
        let cfg = SupervisedConfig {
            n_train: 20,
            steps: 20,
            ..SupervisedConfig::default()
        };
        let out = train_supervised(&g, &c, &cfg).unwrap();
        assert!(out.final_loss < 1e-6, "loss {}", out.final_loss);
        assert!(out.final_loss <= out.initial_loss);
    }

    #[test]
    fn supervised_never_worse_than_bp() {
        let g = generate_watts_strogatz(8, 2, 0.2, 9).unwrap();
        let c = sample_couplings(&g, 0.6, 9).unwrap();
        let cfg = SupervisedConfig {
            n_train: 20,
            steps: 30,
            seed: 9,
            ..SupervisedConfig::default()
        };
        let out = train_supervised(&g, &c, &cfg).unwrap();
        assert!(out.final_loss <= out.initial_loss);
        assert!(out.final_loss < 0.8 * out.initial_loss, "{} vs {}", out.final_loss, out.initial_loss);
        out.params.check().unwrap();
    }

    #[test]
    fn finite_difference_training_path_runs() {
        let g = SocialGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let c = Couplings::uniform(&g, 0.5).unwrap();
        let cfg = SupervisedConfig {
            n_train: 5,
            steps: 5,
            gradient: GradientMethod::FiniteDifference { step: 1e-4 },
            schedule: ScheduleConfig {
                iterations: 20,
                ..ScheduleConfig::default()
            },
            ..SupervisedConfig::default()
        };
        let out = train_supervised(&g, &c, &cfg).unwrap();
        assert_eq!(out.history.len(), 6);
        assert!(out.final_loss <= out.initial_loss);
    }

    #[test]
    fn directed_update_value() {
        assert!((directed_alpha_delta(0.2, 0.5, 1.0) - 0.06).abs() < 1e-15);
    }

    #[test]
    fn single_update_value() {
        // one edge, M_{1->0} = 0.2, B_0 = 0.5, alpha = 1; the reverse direction contributes 0.
        let g = SocialGraph::from_edges(2, [(0, 1)]).unwrap();
        let params = ControlParams::bp_defaults(&g);
        let messages = [0.0, 0.2];
        let beliefs = [0.5, 0.0];
        let d = decorrelation_deltas(&g, &messages, &beliefs, &[0.3, 0.0], &params);
        // directed update 0.2 * (0.5 - 0.2) = 0.06, averaged with the zero reverse update
        assert!((d.alpha[0] - 0.03).abs() < 1e-15);
        assert!((d.kappa[0] - -(0.25 - 0.04 - 0.09)).abs() < 1e-15);
        assert!((d.kappa[1] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn unsupervised_on_tree_stays_near_bp() {
        let g = random_tree(10, 4).unwrap();
        let c = sample_couplings(&g, 0.6, 4).unwrap();
        let cfg = UnsupervisedConfig {
            n_trials: 300,
            seed: 4,
            ..UnsupervisedConfig::default()
        };
        let (p, trace) = train_unsupervised(&g, &c, &cfg).unwrap();
        assert!(p.alpha().iter().all(|a| (a - 1.0).abs() < 0.1));
        assert!(p.kappa().iter().all(|k| (k - 1.0).abs() < 0.1));
        assert_eq!(trace.window_drift.len(), 10);
    }

    #[test]
    fn unsupervised_divergence_guard() {
        let g = generate_watts_strogatz(20, 4, 0.1, 1).unwrap();
        let c = Couplings::uniform(&g, 0.6).unwrap();
        let cfg = UnsupervisedConfig {
            n_trials: 50,
            eta_alpha: 1e3,
            eta_kappa: 1e3,
            ceiling: 10.0,
            ..UnsupervisedConfig::default()
        };
        assert!(matches!(train_unsupervised(&g, &c, &cfg), Err(Error::Divergence(_))));
    }

    #[test]
    fn unsupervised_rejects_bad_config() {
        let g = random_tree(4, 0).unwrap();
        let c = Couplings::uniform(&g, 0.3).unwrap();
        let cfg = UnsupervisedConfig {
            n_trials: 0,
            ..UnsupervisedConfig::default()
        };
        assert!(train_unsupervised(&g, &c, &cfg).is_err());
    }
}
