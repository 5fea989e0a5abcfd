//! Opinion formation on social graphs modelled as approximate inference in
//! binary Ising models.
//!
//! Agents exchange log-odds messages along trusted edges. Plain belief
//! propagation overcounts evidence that reverberates around cycles, which
//! drives beliefs to extremes; circular belief propagation adds per-edge loop
//! corrections and per-node gains that can be learned to cancel it.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod learning;
pub mod metrics;
pub mod oracle;
pub mod persistence;
pub mod plot;
pub mod seed;
pub mod stimuli;

pub use engine::{belief_to_probability, ControlParams, Mode, PropagationState, Propagator, ScheduleConfig};
pub use error::{Error, Result};
pub use graph::{Couplings, SocialGraph};
pub use oracle::{exact_marginals, universal_observer, ExactMarginals, IsingModel};
pub use stimuli::{ExternalField, StimulusSpec};
