use std::collections::BTreeSet;

use cbp_core::experiments::{run_degree_analysis, ExperimentConfig, GraphSource};
use cbp_core::seed;
use rand::Rng;

// Preferential attachment: each new node links to `m` distinct endpoints
// drawn in proportion to degree, starting from a clique on m + 1 nodes.
fn preferential_attachment(n: usize, m: usize, s: u64) -> Vec<(usize, usize)> {
    let mut rng = seed::rng(s);
    let mut edges = Vec::new();
    let mut ends = Vec::new();
    for i in 0..=m {
        for j in 0..i {
            edges.push((j, i));
            ends.extend([i, j]);
        }
    }
    for v in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(ends[rng.random_range(0..ends.len())]);
        }
        for u in targets {
            edges.push((u, v));
            ends.extend([u, v]);
        }
    }
    edges
}

/// Heavy-tailed degrees with the real-graph settings (J_max = 0.18, 500
/// unsupervised training trials): hubs get more extreme BP beliefs, lower
/// gains and larger loop corrections.
#[test]
fn hubs_radicalize_and_get_damped() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pa.txt");
    let text: String = preferential_attachment(500, 10, 3).iter().map(|(a, b)| format!("{a} {b}\n")).collect();
    std::fs::write(&path, text).unwrap();
    let cfg = ExperimentConfig {
        graph: GraphSource::EdgeList { path, subgraph_nodes: None },
        j_max: 0.18,
        train_trials: 500,
        trials: 50,
        graphs: 1,
        plots: false,
        ..ExperimentConfig::default()
    };
    let c = run_degree_analysis(&cfg).unwrap().correlations;
    println!("{c:?}");
    assert!(c.abs_belief_bp.unwrap() > 0.5);
    assert!(c.kappa.unwrap() < 0.0);
    assert!(c.mean_alpha.unwrap() > 0.0);
}
