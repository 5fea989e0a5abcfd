use std::path::Path;
use std::process::{Command, Output};

fn cbp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbp")).current_dir(dir).args(args).output().unwrap()
}

fn ok(out: &Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pipeline_from_graph_to_beliefs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&cbp(d, &["--out", "o", "gen-graph", "--n", "12", "--k", "2", "--beta", "0.1", "--stats"]));
    ok(&cbp(d, &["--out", "o", "stimuli", "--graph", "o/graph.txt", "--kind", "uninformative", "--sigma", "1"]));
    let model = ["--graph", "o/graph.txt", "--couplings", "o/couplings.csv"];
    let mut oracle = vec!["--out", "o", "oracle"];
    oracle.extend(model);
    oracle.extend(["--field", "o/field.csv"]);
    ok(&cbp(d, &oracle));
    let mut train = vec!["--out", "o", "train"];
    train.extend(model);
    train.extend(["--method", "unsupervised", "--trials", "50"]);
    ok(&cbp(d, &train));
    let mut run = vec!["--out", "o", "run"];
    run.extend(model);
    run.extend(["--field", "o/field.csv", "--params", "o/params.csv", "--mode", "cbp"]);
    ok(&cbp(d, &run));

    for f in ["graph.txt", "couplings.csv", "graph_stats.csv", "field.csv", "oracle.csv", "params.csv", "beliefs.csv"] {
        let text = std::fs::read_to_string(d.join("o").join(f)).unwrap();
        assert!(text.starts_with("# cbp "), "{f} lacks a provenance header");
    }
    let beliefs = std::fs::read_to_string(d.join("o/beliefs.csv")).unwrap();
    assert_eq!(beliefs.lines().filter(|l| !l.starts_with('#')).count(), 13);
}

#[test]
fn battery_report_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c.toml"), "preset = \"fig2\"\ngraphs = 1\ntrials = 3\ntrain_trials = 20\n").unwrap();
    ok(&cbp(d, &["--config", "c.toml", "--out", "r", "report", "--kind", "battery"]));
    for f in ["config.toml", "provenance.toml", "battery/metrics_cbp_g0.csv", "battery/oracle_rmse.csv", "battery/histogram_bp.svg"] {
        assert!(d.join("r").join(f).exists(), "missing {f}");
    }
}

#[test]
fn failures_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.toml"), "bogus = 1\n").unwrap();
    assert_eq!(cbp(d, &["--config", "bad.toml", "report", "--kind", "battery"]).status.code(), Some(2));
    assert_eq!(cbp(d, &["--out", "o", "gen-graph", "--n", "10", "--k", "5"]).status.code(), Some(2));
    let missing = cbp(d, &["--out", "o", "oracle", "--graph", "nope.txt", "--couplings", "c.csv", "--field", "f.csv"]);
    assert_eq!(missing.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.txt"));
}
