//! Undirected social graphs, synthetic generators, edge-list ingestion,
//! coupling sampling and structural statistics.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::io::BufRead;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Simple undirected graph on nodes `0..n`.
///
/// Edges are stored canonically (`i < j`, sorted) and the position of an edge
/// in [`SocialGraph::edges`] is its edge index, used to address per-edge data
/// such as couplings and loop corrections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl SocialGraph {
    /// Builds a graph from an edge iterator. Self-loops and duplicates are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("{n} nodes exceeds u32 range")));
        }
        let mut canon = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop on node {a}")));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            canon.push((i as u32, j as u32));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(Error::InvalidParameter("duplicate edge".into()));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must already be sorted, deduplicated and satisfy `i < j < n`.
    fn from_canonical(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i as usize].push(j);
            adjacency[j as usize].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self { n, edges, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    /// Position of the undirected edge `{a, b}` in [`Self::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&(i as u32, j as u32)).ok()
    }

    /// Connected components as node lists, largest first (ties by smallest node id).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![start];
            label[start] = id;
            let mut head = 0;
            while head < members.len() {
                let u = members[head];
                head += 1;
                for &v in &self.adjacency[u] {
                    if label[v as usize] == usize::MAX {
                        label[v as usize] = id;
                        members.push(v as usize);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
        comps
    }

    /// True if the graph has no cycles (a forest).
    pub fn is_acyclic(&self) -> bool {
        self.edge_count() + self.components().len() == self.n
    }

    /// Subgraph induced by `nodes`, relabelled in the order given.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<SocialGraph> {
        let mut position = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidParameter(format!("node {v} out of range")));
            }
            if position[v] != usize::MAX {
                return Err(Error::InvalidParameter(format!("node {v} listed twice")));
            }
            position[v] = k;
        }
        let edges = self.edges.iter().filter_map(|&(i, j)| {
            let (a, b) = (position[i as usize], position[j as usize]);
            (a != usize::MAX && b != usize::MAX).then_some((a, b))
        });
        SocialGraph::from_edges(nodes.len(), edges)
    }
}

/// Watts-Strogatz small-world graph.
///
/// A ring where every node links to its `k` nearest neighbours on each side
/// (degree `2k`, `n*k` edges); each lattice edge is then, with probability
/// `beta`, removed and replaced by an edge between two uniformly drawn distinct
/// nodes that are not already adjacent.
pub fn generate_watts_strogatz(n: usize, k: usize, beta: f64, seed: u64) -> Result<SocialGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("watts-strogatz needs n >= 3, got {n}")));
    }
    if k < 1 || 2 * k >= n {
        return Err(Error::InvalidParameter(format!(
            "watts-strogatz needs 1 <= K < n/2, got K={k} for n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("rewiring probability {beta} outside [0, 1]")));
    }

    let key = |a: usize, b: usize| if a < b { (a as u32, b as u32) } else { (b as u32, a as u32) };
    let lattice: Vec<(u32, u32)> = (0..n)
        .flat_map(|i| (1..=k).map(move |d| (i, (i + d) % n)))
        .map(|(a, b)| key(a, b))
        .collect();

    let mut rng = seed::rng(seed);
    let mut present: HashSet<(u32, u32)> = lattice.iter().copied().collect();
    for &edge in &lattice {
        if beta > 0.0 && rng.random_bool(beta) {
            present.remove(&edge);
            loop {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a != b && present.insert(key(a, b)) {
                    break;
                }
            }
        }
    }
    let mut edges: Vec<(u32, u32)> = present.into_iter().collect();
    edges.sort_unstable();
    debug_assert_eq!(edges.len(), n * k);
    Ok(SocialGraph::from_canonical(n, edges))
}

/// Uniformly random labelled tree (random Prüfer sequence).
pub fn random_tree(n: usize, seed: u64) -> Result<SocialGraph> {
    if n == 0 {
        return Err(Error::InvalidParameter("tree needs at least one node".into()));
    }
    if n <= 2 {
        return SocialGraph::from_edges(n, (1..n).map(|v| (0, v)));
    }
    let mut rng = seed::rng(seed);
    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &prufer {
        degree[v] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &prufer {
        let leaf = *leaves.iter().next().expect("a tree always has a leaf");
        leaves.remove(&leaf);
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    SocialGraph::from_edges(n, edges)
}

/// Result of [`load_edge_list`].
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SocialGraph,
    /// `original_ids[k]` is the id in the source file of node `k`.
    pub original_ids: Vec<u64>,
    pub self_loops_dropped: usize,
    /// Lines whose pair was already present (either orientation).
    pub duplicates_collapsed: usize,
}

/// Parses a whitespace-separated `u v` edge list.
///
/// Lines starting with `#` are comments, except a `# n=<count>` header, which
/// fixes the node count and keeps ids as-is (isolated nodes survive). Without
/// the header, the distinct ids are remapped to `0..n` in ascending order.
pub fn load_edge_list<R: BufRead>(reader: R, source_name: &str) -> Result<LoadedGraph> {
    let mut declared_n: Option<usize> = None;
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut self_loops = 0usize;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(source_name, lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(source_name, lineno, format!("bad node-count header `{trimmed}`")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = |what: &str| -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::parse(source_name, lineno, format!("missing {what} node id")))?;
            tok.parse::<u64>()
                .map_err(|_| Error::parse(source_name, lineno, format!("`{tok}` is not a non-negative integer id")))
        };
        let u = next_id("first")?;
        let v = next_id("second")?;
        if tokens.next().is_some() {
            return Err(Error::parse(source_name, lineno, "expected exactly two ids"));
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        pairs.push((u, v));
    }

    let (n, original_ids, remap): (usize, Vec<u64>, Option<BTreeMap<u64, usize>>) = match declared_n {
        Some(n) => {
            if let Some(&(u, v)) = pairs.iter().find(|&&(u, v)| u.max(v) >= n as u64) {
                return Err(Error::parse(
                    source_name,
                    0,
                    format!("edge ({u}, {v}) exceeds declared node count n={n}"),
                ));
            }
            (n, (0..n as u64).collect(), None)
        }
        None => {
            let mut ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
            ids.sort_unstable();
            ids.dedup();
            // Self-loop-only nodes still exist as nodes.
            let map: BTreeMap<u64, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
            (ids.len(), ids, Some(map))
        }
    };

    let map_id = |id: u64| match &remap {
        Some(m) => m[&id],
        None => id as usize,
    };
    let mut canon: Vec<(u32, u32)> = pairs
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (map_id(u), map_id(v));
            if a < b {
                (a as u32, b as u32)
            } else {
                (b as u32, a as u32)
            }
        })
        .collect();
    canon.sort_unstable();
    let before = canon.len();
    canon.dedup();
    let duplicates_collapsed = before - canon.len();

    if self_loops > 0 {
        log::warn!("{source_name}: dropped {self_loops} self-loop(s)");
    }
    Ok(LoadedGraph {
        graph: SocialGraph::from_canonical(n, canon),
        original_ids,
        self_loops_dropped: self_loops,
        duplicates_collapsed,
    })
}

/// Per-edge coupling strengths `J_ij > 0`, aligned with [`SocialGraph::edges`].
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    j: Vec<f64>,
}

impl Couplings {
    pub fn new(graph: &SocialGraph, j: Vec<f64>) -> Result<Self> {
        if j.len() != graph.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "{} couplings for {} edges",
                j.len(),
                graph.edge_count()
            )));
        }
        if let Some(bad) = j.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidParameter(format!("coupling {bad} is not a positive finite number")));
        }
        Ok(Self { j })
    }

    /// The same coupling on every edge.
    pub fn uniform(graph: &SocialGraph, value: f64) -> Result<Self> {
        Self::new(graph, vec![value; graph.edge_count()])
    }

    pub fn values(&self) -> &[f64] {
        &self.j
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.j[edge]
    }

    /// Trust weights `W_ij = tanh(J_ij)`.
    pub fn trust_weights(&self) -> Vec<f64> {
        self.j.iter().map(|j| j.tanh()).collect()
    }

    pub fn len(&self) -> usize {
        self.j.len()
    }

    pub fn is_empty(&self) -> bool {
        self.j.is_empty()
    }
}

/// `J_ij ~ Uniform(0, j_max]`, independently per edge in edge-index order.
pub fn sample_couplings(graph: &SocialGraph, j_max: f64, seed: u64) -> Result<Couplings> {
    if !(j_max.is_finite() && j_max > 0.0) {
        return Err(Error::InvalidParameter(format!("J_max must be positive, got {j_max}")));
    }
    let mut rng = seed::rng(seed);
    // 1 - u with u in [0, 1) excludes zero.
    let j = (0..graph.edge_count())
        .map(|_| j_max * (1.0 - rng.random::<f64>()))
        .collect();
    Ok(Couplings { j })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    /// `degree_histogram[d]` = number of nodes with degree `d`.
    pub degree_histogram: Vec<usize>,
    pub mean_degree: f64,
    /// Size of the largest connected component; path lengths are measured there.
    pub largest_component: usize,
    pub mean_path_length: f64,
    /// Whether every source of the largest component was used.
    pub path_length_exact: bool,
    /// Average local clustering coefficient (degree < 2 counts as 0).
    pub clustering: f64,
}

/// Graphs at or below this size always get exact all-sources path lengths.
pub const EXACT_PATH_LIMIT: usize = 1000;

pub fn compute_stats(graph: &SocialGraph, path_samples: usize, seed: u64) -> Result<GraphStats> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::Empty("graph has no nodes".into()));
    }
    let degrees = graph.degrees();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    for &d in &degrees {
        degree_histogram[d] += 1;
    }
    let mean_degree = degrees.iter().sum::<usize>() as f64 / n as f64;

    let comps = graph.components();
    let largest = &comps[0];
    let m = largest.len();
    let exact = m <= EXACT_PATH_LIMIT || path_samples >= m;
    let sources: Vec<usize> = if exact {
        largest.clone()
    } else {
        let mut rng = seed::rng(seed);
        let mut picked: Vec<usize> = index::sample(&mut rng, m, path_samples.max(1))
            .into_iter()
            .map(|k| largest[k])
            .collect();
        picked.sort_unstable();
        picked
    };

    let mean_path_length = if m < 2 {
        0.0
    } else {
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        let mut total: u64 = 0;
        let mut pairs: u64 = 0;
        for &s in &sources {
            dist.iter_mut().for_each(|d| *d = u32::MAX);
            dist[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = dist[u];
                for &v in graph.neighbors(u) {
                    let v = v as usize;
                    if dist[v] == u32::MAX {
                        dist[v] = du + 1;
                        total += (du + 1) as u64;
                        pairs += 1;
                        queue.push_back(v);
                    }
                }
            }
        }
        total as f64 / pairs as f64
    };

    let clustering = local_clustering(graph).iter().sum::<f64>() / n as f64;

    Ok(GraphStats {
        node_count: n,
        edge_count: graph.edge_count(),
        degree_histogram,
        mean_degree,
        largest_component: m,
        mean_path_length,
        path_length_exact: exact,
        clustering,
    })
}

fn local_clustering(graph: &SocialGraph) -> Vec<f64> {
    let n = graph.node_count();
    let mut mark = vec![false; n];
    (0..n)
        .map(|u| {
            let nbrs = graph.neighbors(u);
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            for &v in nbrs {
                mark[v as usize] = true;
            }
            let mut links = 0usize;
            for &v in nbrs {
                links += graph.neighbors(v as usize).iter().filter(|&&w| mark[w as usize]).count();
            }
            for &v in nbrs {
                mark[v as usize] = false;
            }
            // each triangle edge counted twice
            links as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> SocialGraph {
        SocialGraph::from_edges(n, (1..n).map(|v| (v - 1, v))).unwrap()
    }

    #[test]
    fn ring_lattice_without_rewiring() {
        let g = generate_watts_strogatz(10, 2, 0.0, 1).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert!(g.degrees().iter().all(|&d| d == 4));
        assert!(g.has_edge(0, 9) && g.has_edge(0, 8) && !g.has_edge(0, 7));
    }

    #[test]
    fn full_rewiring_conserves_edges() {
        let g = generate_watts_strogatz(10, 2, 1.0, 3).unwrap();
        assert_eq!(g.edge_count(), 20);
        let degrees = g.degrees();
        assert_eq!(degrees.iter().sum::<usize>(), 40);
        assert!(degrees.iter().any(|&d| d != 4));
        for &(i, j) in g.edges() {
            assert!(i < j);
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_watts_strogatz(200, 10, 0.12, 42).unwrap();
        let b = generate_watts_strogatz(200, 10, 0.12, 42).unwrap();
        assert_eq!(a.edges(), b.edges());
        let c = generate_watts_strogatz(200, 10, 0.12, 43).unwrap();
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        assert!(generate_watts_strogatz(2, 1, 0.1, 0).is_err());
        assert!(generate_watts_strogatz(10, 5, 0.1, 0).is_err());
        assert!(generate_watts_strogatz(10, 0, 0.1, 0).is_err());
        assert!(generate_watts_strogatz(10, 2, 1.5, 0).is_err());
        assert!(generate_watts_strogatz(10, 2, -0.1, 0).is_err());
    }

    #[test]
    fn edge_list_symmetrization() {
        let loaded = load_edge_list("0 1\n1 0\n1 2".as_bytes(), "mem").unwrap();
        assert_eq!(loaded.graph.node_count(), 3);
        assert_eq!(loaded.graph.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(loaded.duplicates_collapsed, 1);
    }

    #[test]
    fn edge_list_drops_self_loops() {
        let loaded = load_edge_list("0 0\n0 1".as_bytes(), "mem").unwrap();
        assert_eq!(loaded.graph.node_count(), 2);
        assert_eq!(loaded.graph.edge_count(), 1);
        assert_eq!(loaded.self_loops_dropped, 1);
    }

    #[test]
    fn edge_list_remaps_sparse_ids() {
        let loaded = load_edge_list("# comment\n10 200\n200 7\n".as_bytes(), "mem").unwrap();
        assert_eq!(loaded.original_ids, vec![7, 10, 200]);
        assert_eq!(loaded.graph.edges(), &[(0, 2), (1, 2)]);
    }

    #[test]
    fn edge_list_reports_line_of_bad_token() {
        let err = load_edge_list("0 1\n# ok\n1 x\n".as_bytes(), "mem").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_edge_list("0 1 2\n".as_bytes(), "mem").is_err());
        assert!(load_edge_list("5\n".as_bytes(), "mem").is_err());
        assert!(load_edge_list("-1 2\n".as_bytes(), "mem").is_err());
    }

    #[test]
    fn node_count_header_keeps_isolated_nodes() {
        let loaded = load_edge_list("# n=5\n0 1\n".as_bytes(), "mem").unwrap();
        assert_eq!(loaded.graph.node_count(), 5);
        assert_eq!(loaded.graph.degree(4), 0);
        assert!(load_edge_list("# n=2\n0 3\n".as_bytes(), "mem").is_err());
    }

    #[test]
    fn couplings_in_range() {
        let g = generate_watts_strogatz(10, 4, 0.1, 5).unwrap();
        let c = sample_couplings(&g, 0.6, 9).unwrap();
        assert_eq!(c.len(), g.edge_count());
        assert!(c.values().iter().all(|&j| j > 0.0 && j <= 0.6));
        assert!(sample_couplings(&g, 0.0, 9).is_err());
        assert_eq!(c, sample_couplings(&g, 0.6, 9).unwrap());
    }

    #[test]
    fn couplings_mean_within_three_standard_errors() {
        let g = generate_watts_strogatz(2000, 5, 0.2, 1).unwrap();
        let j_max = 0.18;
        let c = sample_couplings(&g, j_max, 77).unwrap();
        let m = c.len() as f64;
        let mean = c.values().iter().sum::<f64>() / m;
        let se = j_max / 12f64.sqrt() / m.sqrt();
        assert!((mean - j_max / 2.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn path_stats_on_small_graphs() {
        // All-pairs distances of a 5-node path: 4*1 + 3*2 + 2*3 + 1*4 = 20 over 10 pairs.
        let s = compute_stats(&path_graph(5), 10, 0).unwrap();
        assert!((s.mean_path_length - 2.0).abs() < 1e-12);
        assert_eq!(s.clustering, 0.0);

        let k4 = SocialGraph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let s = compute_stats(&k4, 10, 0).unwrap();
        assert_eq!(s.mean_path_length, 1.0);
        assert_eq!(s.clustering, 1.0);
        assert_eq!(s.degree_histogram, vec![0, 0, 0, 4]);

        let empty = SocialGraph::from_edges(0, []).unwrap();
        assert!(compute_stats(&empty, 10, 0).is_err());
    }

    #[test]
    fn stats_use_largest_component() {
        let g = SocialGraph::from_edges(6, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let s = compute_stats(&g, 10, 0).unwrap();
        assert_eq!(s.largest_component, 3);
        assert!((s.mean_path_length - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_world_path_length_is_short() {
        // Degree-20 small world with few shortcuts: about 2.6 hops.
        let g = generate_watts_strogatz(200, 10, 0.08, 11).unwrap();
        let s = compute_stats(&g, 200, 0).unwrap();
        assert!((s.mean_path_length - 2.6).abs() < 0.3, "L = {}", s.mean_path_length);
    }

    #[test]
    fn random_trees_are_trees() {
        for seed in 0..20 {
            let t = random_tree(10, seed).unwrap();
            assert_eq!(t.edge_count(), 9);
            assert_eq!(t.components().len(), 1);
            assert!(t.is_acyclic());
        }
        assert!(!generate_watts_strogatz(10, 2, 0.0, 0).unwrap().is_acyclic());
    }

    #[test]
    fn from_edges_rejects_invalid() {
        assert!(SocialGraph::from_edges(3, [(0, 0)]).is_err());
        assert!(SocialGraph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(SocialGraph::from_edges(3, [(0, 3)]).is_err());
    }
}
