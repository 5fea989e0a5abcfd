//! Ground truth for small models: exact marginals by enumerating all `2^n`
//! spin configurations, plus the universal-observer belief.

use crate::error::{Error, Result};
use crate::graph::{Couplings, SocialGraph};
use crate::stimuli::ExternalField;

/// Hard cap on enumeration size.
pub const MAX_ORACLE_NODES: usize = 20;

/// A binary pairwise model `p(x) ∝ exp(Σ J_ij x_i x_j + Σ h_i x_i)`, `x_i ∈ {-1, +1}`.
#[derive(Debug, Clone, Copy)]
pub struct IsingModel<'a> {
    graph: &'a SocialGraph,
    couplings: &'a Couplings,
    field: &'a ExternalField,
}

impl<'a> IsingModel<'a> {
    pub fn new(graph: &'a SocialGraph, couplings: &'a Couplings, field: &'a ExternalField) -> Result<Self> {
        if couplings.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} couplings for {} edges",
                couplings.len(),
                graph.edge_count()
            )));
        }
        if field.len() != graph.node_count() {
            return Err(Error::InvalidParameter(format!(
                "external field has {} entries for {} nodes",
                field.len(),
                graph.node_count()
            )));
        }
        Ok(Self { graph, couplings, field })
    }

    pub fn graph(&self) -> &'a SocialGraph {
        self.graph
    }

    pub fn couplings(&self) -> &'a Couplings {
        self.couplings
    }

    pub fn field(&self) -> &'a ExternalField {
        self.field
    }
}

/// `p(x_i = +1)` for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMarginals {
    pub p_yes: Vec<f64>,
}

pub fn exact_marginals(model: &IsingModel<'_>) -> Result<ExactMarginals> {
    let n = model.graph.node_count();
    if n > MAX_ORACLE_NODES {
        return Err(Error::OracleBudget {
            nodes: n,
            max: MAX_ORACLE_NODES,
        });
    }
    let edges = model.graph.edges();
    let j = model.couplings.values();
    let h = model.field.values();
    let states = 1usize << n;
    let spin = |state: usize, i: usize| if state >> i & 1 == 1 { 1.0 } else { -1.0 };

    let log_weights: Vec<f64> = (0..states)
        .map(|s| {
            let pair: f64 = edges
                .iter()
                .zip(j)
                .map(|(&(a, b), &jab)| jab * spin(s, a as usize) * spin(s, b as usize))
                .sum();
            let single: f64 = h.iter().enumerate().map(|(i, &hi)| hi * spin(s, i)).sum();
            pair + single
        })
        .collect();
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::NonFinite("log-weight in exact enumeration".into()));
    }

    let mut total = 0.0;
    let mut yes = vec![0.0; n];
    for (s, &lw) in log_weights.iter().enumerate() {
        let w = (lw - max).exp();
        total += w;
        for (i, acc) in yes.iter_mut().enumerate() {
            if s >> i & 1 == 1 {
                *acc += w;
            }
        }
    }
    Ok(ExactMarginals {
        p_yes: yes.into_iter().map(|y| (y / total).clamp(0.0, 1.0)).collect(),
    })
}

/// Belief of an observer receiving every external message directly.
pub fn universal_observer(field: &ExternalField) -> f64 {
    field.values().iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_watts_strogatz, sample_couplings};
    use crate::stimuli::uninformative_field;

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn single_node() {
        let g = SocialGraph::from_edges(1, []).unwrap();
        let c = Couplings::new(&g, vec![]).unwrap();
        let f = ExternalField::zeros(1);
        let p = exact_marginals(&IsingModel::new(&g, &c, &f).unwrap()).unwrap();
        assert_eq!(p.p_yes, vec![0.5]);

        let f = ExternalField::from_values(vec![1.0]).unwrap();
        let p = exact_marginals(&IsingModel::new(&g, &c, &f).unwrap()).unwrap();
        assert!((p.p_yes[0] - sigmoid(2.0)).abs() < 1e-15);
        assert!((p.p_yes[0] - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn two_nodes_match_tree_closed_form() {
        let g = SocialGraph::from_edges(2, [(0, 1)]).unwrap();
        let c = Couplings::new(&g, vec![0.5]).unwrap();
        let f = ExternalField::from_values(vec![0.3, -0.2]).unwrap();
        let p = exact_marginals(&IsingModel::new(&g, &c, &f).unwrap()).unwrap();

        // Hand enumeration over (x0, x1).
        let w = |x0: f64, x1: f64| (0.5 * x0 * x1 + 0.3 * x0 - 0.2 * x1).exp();
        let z = w(1., 1.) + w(1., -1.) + w(-1., 1.) + w(-1., -1.);
        let p0 = (w(1., 1.) + w(1., -1.)) / z;
        let p1 = (w(1., 1.) + w(-1., 1.)) / z;
        assert!((p.p_yes[0] - p0).abs() < 1e-14);
        assert!((p.p_yes[1] - p1).abs() < 1e-14);

        let closed = sigmoid(2.0 * (0.3 + (0.5f64.tanh() * (-0.2f64).tanh()).atanh()));
        assert!((p.p_yes[0] - closed).abs() < 1e-14);
    }

    #[test]
    fn large_fields_do_not_overflow() {
        let g = SocialGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let c = Couplings::new(&g, vec![300.0, 300.0]).unwrap();
        let f = ExternalField::from_values(vec![400.0, -1.0, 2.0]).unwrap();
        let p = exact_marginals(&IsingModel::new(&g, &c, &f).unwrap()).unwrap();
        assert!(p.p_yes.iter().all(|v| v.is_finite()));
        assert!(p.p_yes[0] > 0.999);
    }

    #[test]
    fn budget_is_enforced() {
        let g = SocialGraph::from_edges(21, []).unwrap();
        let c = Couplings::new(&g, vec![]).unwrap();
        let f = ExternalField::zeros(21);
        let err = exact_marginals(&IsingModel::new(&g, &c, &f).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OracleBudget { nodes: 21, max: 20 }));
    }

    #[test]
    fn model_checks_shapes() {
        let g = SocialGraph::from_edges(2, [(0, 1)]).unwrap();
        let c = Couplings::new(&g, vec![0.5]).unwrap();
        let f = ExternalField::zeros(3);
        assert!(IsingModel::new(&g, &c, &f).is_err());
    }

    #[test]
    fn increasing_field_increases_marginal() {
        let g = generate_watts_strogatz(8, 2, 0.3, 4).unwrap();
        let c = sample_couplings(&g, 0.6, 4).unwrap();
        let base = uninformative_field(8, 1.0, 4).unwrap();
        let p0 = exact_marginals(&IsingModel::new(&g, &c, &base).unwrap()).unwrap();
        let mut bumped = base.values().to_vec();
        bumped[3] += 0.25;
        let bumped = ExternalField::from_values(bumped).unwrap();
        let p1 = exact_marginals(&IsingModel::new(&g, &c, &bumped).unwrap()).unwrap();
        assert!(p1.p_yes[3] > p0.p_yes[3]);
        // positive couplings propagate the increase
        assert!(p1.p_yes.iter().zip(&p0.p_yes).all(|(a, b)| a >= b));
    }

    #[test]
    fn universal_observer_sums() {
        let f = ExternalField::from_values(vec![0.1, -0.3, 0.5]).unwrap();
        assert!((universal_observer(&f) - 0.3).abs() < 1e-15);
        assert_eq!(universal_observer(&ExternalField::zeros(4)), 0.0);
    }
}
