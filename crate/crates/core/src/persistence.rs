//! Text file formats for every artifact, plus run provenance.
//!
//! All writers emit canonical order (nodes ascending, edges `i < j`
//! ascending), `.` decimals, `\n` line endings and floats with 17 significant
//! digits, so equal data gives equal bytes and reloads bit-exactly. Lines
//! starting with `#` are comments and are skipped by every reader.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::engine::ControlParams;
use crate::error::{Error, Result};
use crate::graph::{load_edge_list, Couplings, LoadedGraph, SocialGraph};
use crate::metrics::{BeliefHistogram, TrialMetrics};
use crate::stimuli::ExternalField;

pub const TOOL_VERSION: &str = concat!("cbp ", env!("CARGO_PKG_VERSION"));

/// Round-trippable float text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header comment stamped on generated files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            config_hash: config_hash.into(),
            seed,
            version: TOOL_VERSION.to_string(),
        }
    }

    pub fn header(&self) -> String {
        format!("# {} config={} seed={}\n", self.version, self.config_hash, self.seed)
    }

    /// Provenance block with a wall-clock timestamp, for `provenance.toml`.
    pub fn to_toml(&self) -> String {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        format!(
            "config_hash = \"{}\"\nseed = {}\nversion = \"{}\"\ntimestamp_unix = {}\n",
            self.config_hash, self.seed, self.version, ts
        )
    }
}

/// Hex SHA-256 (first 16 hex digits) of a canonical config document.
pub fn content_hash(document: &str) -> String {
    let digest = Sha256::digest(document.as_bytes());
    digest.iter().take(8).fold(String::with_capacity(16), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn prefix(prov: Option<&Provenance>) -> String {
    prov.map(Provenance::header).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    fs::File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

// ---- graphs ----

/// Canonical edge list with a `# n=<count>` header.
pub fn graph_to_string(graph: &SocialGraph, prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    let _ = writeln!(out, "# n={}", graph.node_count());
    for &(i, j) in graph.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn save_graph(path: &Path, graph: &SocialGraph, prov: Option<&Provenance>) -> Result<()> {
    write_file(path, &graph_to_string(graph, prov))
}

pub fn load_graph(path: &Path) -> Result<LoadedGraph> {
    load_edge_list(open(path)?, &path.display().to_string())
}

/// `original_id` per node, one per line, so results map back to source ids.
pub fn save_id_map(path: &Path, original_ids: &[u64]) -> Result<()> {
    let mut out = String::from("node,original_id\n");
    for (k, id) in original_ids.iter().enumerate() {
        let _ = writeln!(out, "{k},{id}");
    }
    write_file(path, &out)
}

// ---- generic CSV ----

/// Data rows of a CSV with the given header: `(line number, fields)`.
fn read_rows<R: BufRead>(reader: R, name: &str, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(name, lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(|f| f.trim().to_string()).collect();
        if !seen_header {
            if fields != header {
                return Err(Error::parse(name, lineno, format!("expected header `{}`, found `{line}`", header.join(","))));
            }
            seen_header = true;
            continue;
        }
        if fields.len() != header.len() {
            return Err(Error::parse(
                name,
                lineno,
                format!("expected {} fields ({}), found {}", header.len(), header.join(","), fields.len()),
            ));
        }
        rows.push((lineno, fields));
    }
    if !seen_header {
        return Err(Error::parse(name, 0, format!("missing header `{}`", header.join(","))));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(name: &str, line: usize, column: &str, raw: &str) -> Result<T> {
    raw.parse::<T>()
        .map_err(|_| Error::parse(name, line, format!("field `{column}`: cannot parse `{raw}`")))
}

// ---- couplings ----

pub fn couplings_to_string(graph: &SocialGraph, couplings: &Couplings, prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("i,j,J\n");
    for (&(i, j), &v) in graph.edges().iter().zip(couplings.values()) {
        let _ = writeln!(out, "{i},{j},{}", fmt_f64(v));
    }
    out
}

pub fn save_couplings(path: &Path, graph: &SocialGraph, couplings: &Couplings, prov: Option<&Provenance>) -> Result<()> {
    write_file(path, &couplings_to_string(graph, couplings, prov))
}

pub fn read_couplings<R: BufRead>(reader: R, name: &str, graph: &SocialGraph) -> Result<Couplings> {
    let mut values = vec![f64::NAN; graph.edge_count()];
    let mut assigned = vec![false; graph.edge_count()];
    for (line, f) in read_rows(reader, name, &["i", "j", "J"])? {
        let i: usize = field(name, line, "i", &f[0])?;
        let j: usize = field(name, line, "j", &f[1])?;
        let v: f64 = field(name, line, "J", &f[2])?;
        let e = graph
            .edge_index(i, j)
            .filter(|_| i < graph.node_count() && j < graph.node_count())
            .ok_or_else(|| Error::parse(name, line, format!("edge ({i}, {j}) is not in the graph")))?;
        if assigned[e] {
            return Err(Error::parse(name, line, format!("edge ({i}, {j}) listed twice")));
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::parse(name, line, format!("field `J`: coupling {v} must be positive")));
        }
        assigned[e] = true;
        values[e] = v;
    }
    if let Some(e) = assigned.iter().position(|a| !a) {
        let (i, j) = graph.edges()[e];
        return Err(Error::parse(name, 0, format!("no coupling for edge ({i}, {j})")));
    }
    Couplings::new(graph, values)
}

pub fn load_couplings(path: &Path, graph: &SocialGraph) -> Result<Couplings> {
    read_couplings(open(path)?, &path.display().to_string(), graph)
}

// ---- external fields ----

pub fn field_to_string(field: &ExternalField, prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("node,m_ext\n");
    for (k, &v) in field.values().iter().enumerate() {
        let _ = writeln!(out, "{k},{}", fmt_f64(v));
    }
    out
}

pub fn save_field(path: &Path, field: &ExternalField, prov: Option<&Provenance>) -> Result<()> {
    write_file(path, &field_to_string(field, prov))
}

pub fn read_field<R: BufRead>(reader: R, name: &str, n: usize) -> Result<ExternalField> {
    let mut values = vec![f64::NAN; n];
    for (line, f) in read_rows(reader, name, &["node", "m_ext"])? {
        let k: usize = field(name, line, "node", &f[0])?;
        if k >= n {
            return Err(Error::parse(name, line, format!("field `node`: {k} outside 0..{n}")));
        }
        if !values[k].is_nan() {
            return Err(Error::parse(name, line, format!("node {k} listed twice")));
        }
        values[k] = field(name, line, "m_ext", &f[1])?;
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::parse(name, 0, format!("no external message for node {k}")));
    }
    ExternalField::from_values(values)
}

pub fn load_field(path: &Path, n: usize) -> Result<ExternalField> {
    read_field(open(path)?, &path.display().to_string(), n)
}

/// Several fields in one CSV, `trial,node,m_ext`.
pub fn fields_to_string(fields: &[ExternalField], prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("trial,node,m_ext\n");
    for (t, f) in fields.iter().enumerate() {
        for (k, &v) in f.values().iter().enumerate() {
            let _ = writeln!(out, "{t},{k},{}", fmt_f64(v));
        }
    }
    out
}

// ---- control parameters ----

/// Two sections: `node,kappa` then `i,j,alpha`.
pub fn params_to_string(graph: &SocialGraph, params: &ControlParams, prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("node,kappa\n");
    for (k, &v) in params.kappa().iter().enumerate() {
        let _ = writeln!(out, "{k},{}", fmt_f64(v));
    }
    out.push_str("i,j,alpha\n");
    for (&(i, j), &v) in graph.edges().iter().zip(params.alpha()) {
        let _ = writeln!(out, "{i},{j},{}", fmt_f64(v));
    }
    out
}

pub fn save_params(path: &Path, graph: &SocialGraph, params: &ControlParams, prov: Option<&Provenance>) -> Result<()> {
    write_file(path, &params_to_string(graph, params, prov))
}

pub fn read_params<R: BufRead>(reader: R, name: &str, graph: &SocialGraph) -> Result<ControlParams> {
    #[derive(PartialEq)]
    enum Section {
        Start,
        Kappa,
        Alpha,
    }
    let mut section = Section::Start;
    let mut kappa = vec![f64::NAN; graph.node_count()];
    let mut alpha = vec![f64::NAN; graph.edge_count()];
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::parse(name, lineno, e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        match f.as_slice() {
            ["node", "kappa"] if section == Section::Start => section = Section::Kappa,
            ["i", "j", "alpha"] if section == Section::Kappa => section = Section::Alpha,
            [node, value] if section == Section::Kappa => {
                let k: usize = field(name, lineno, "node", node)?;
                if k >= kappa.len() || !kappa[k].is_nan() {
                    return Err(Error::parse(name, lineno, format!("field `node`: {k} out of range or repeated")));
                }
                kappa[k] = field(name, lineno, "kappa", value)?;
            }
            [i, j, value] if section == Section::Alpha => {
                let i: usize = field(name, lineno, "i", i)?;
                let j: usize = field(name, lineno, "j", j)?;
                let e = (i < graph.node_count() && j < graph.node_count())
                    .then(|| graph.edge_index(i, j))
                    .flatten()
                    .ok_or_else(|| Error::parse(name, lineno, format!("edge ({i}, {j}) is not in the graph")))?;
                if !alpha[e].is_nan() {
                    return Err(Error::parse(name, lineno, format!("edge ({i}, {j}) listed twice")));
                }
                alpha[e] = field(name, lineno, "alpha", value)?;
            }
            _ => {
                let expected = match section {
                    Section::Start => "header `node,kappa`",
                    Section::Kappa => "`node,kappa` row or `i,j,alpha` header",
                    Section::Alpha => "`i,j,alpha` row",
                };
                return Err(Error::parse(name, lineno, format!("expected {expected}, found `{line}`")));
            }
        }
    }
    if section != Section::Alpha {
        return Err(Error::parse(name, 0, "missing `node,kappa` or `i,j,alpha` section"));
    }
    if let Some(k) = kappa.iter().position(|v| v.is_nan()) {
        return Err(Error::parse(name, 0, format!("no gain for node {k}")));
    }
    if let Some(e) = alpha.iter().position(|v| v.is_nan()) {
        let (i, j) = graph.edges()[e];
        return Err(Error::parse(name, 0, format!("no loop correction for edge ({i}, {j})")));
    }
    ControlParams::new(graph, alpha, kappa)
}

pub fn load_params(path: &Path, graph: &SocialGraph) -> Result<ControlParams> {
    read_params(open(path)?, &path.display().to_string(), graph)
}

// ---- results ----

pub const METRICS_HEADER: &str = "trial,R,P,pct_correct,frac_overconfident,B_univ";

pub fn metrics_to_string(rows: &[TrialMetrics], prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for (t, m) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{t},{},{},{},{},{}",
            fmt_f64(m.radicalization),
            fmt_f64(m.polarization),
            fmt_f64(m.pct_correct),
            fmt_f64(m.frac_overconfident),
            fmt_f64(m.b_univ)
        );
    }
    out
}

pub fn read_metrics<R: BufRead>(reader: R, name: &str) -> Result<Vec<TrialMetrics>> {
    let header: Vec<&str> = METRICS_HEADER.split(',').collect();
    let rows = read_rows(reader, name, &header)?;
    rows.iter()
        .enumerate()
        .map(|(k, (line, f))| {
            let t: usize = field(name, *line, "trial", &f[0])?;
            if t != k {
                return Err(Error::parse(name, *line, format!("field `trial`: expected {k}, found {t}")));
            }
            Ok(TrialMetrics {
                radicalization: field(name, *line, "R", &f[1])?,
                polarization: field(name, *line, "P", &f[2])?,
                pct_correct: field(name, *line, "pct_correct", &f[3])?,
                frac_overconfident: field(name, *line, "frac_overconfident", &f[4])?,
                b_univ: field(name, *line, "B_univ", &f[5])?,
            })
        })
        .collect()
}

pub fn load_metrics(path: &Path) -> Result<Vec<TrialMetrics>> {
    read_metrics(open(path)?, &path.display().to_string())
}

pub fn histogram_to_string(hist: &BeliefHistogram, prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("bin_lo,bin_hi,count\n");
    for (k, &c) in hist.counts.iter().enumerate() {
        let (lo, hi) = hist.bin_edges(k);
        let _ = writeln!(out, "{},{},{c}", fmt_f64(lo), fmt_f64(hi));
    }
    out
}

/// `node,belief,p_yes`.
pub fn beliefs_to_string(beliefs: &[f64], prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("node,belief,p_yes\n");
    for (k, &b) in beliefs.iter().enumerate() {
        let _ = writeln!(out, "{k},{},{}", fmt_f64(b), fmt_f64(crate::engine::belief_to_probability(b)));
    }
    out
}

/// `iter,node,belief`.
pub fn trajectory_to_string(trajectory: &[Vec<f64>], prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("iter,node,belief\n");
    for (t, beliefs) in trajectory.iter().enumerate() {
        for (k, &b) in beliefs.iter().enumerate() {
            let _ = writeln!(out, "{t},{k},{}", fmt_f64(b));
        }
    }
    out
}

/// `node,p_yes`.
pub fn marginals_to_string(p_yes: &[f64], prov: Option<&Provenance>) -> String {
    let mut out = prefix(prov);
    out.push_str("node,p_yes\n");
    for (k, &p) in p_yes.iter().enumerate() {
        let _ = writeln!(out, "{k},{}", fmt_f64(p));
    }
    out
}
