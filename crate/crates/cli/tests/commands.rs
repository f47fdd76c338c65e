use std::path::Path;

use nts_core::nnmodel::{Activation, FeedForwardNetwork, Layer};
use nts_core::partition::{Partition, PartitionSet};
use nts_core::reach::HyperRectangle;
use nts_core::synthetic::angle_field;
use nts_core::traces::{save_traces_csv, Sample, Trace, TraceSet};
use nts_core::transition::{compute_transitions, BoolMatrix, TransitionSystem};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn nts(dir: &Path, args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args: Vec<String> = std::iter::once("nts".to_string())
        .chain(args.iter().map(|a| {
            if a.ends_with(".json") || a.ends_with(".csv") || a.ends_with(".txt") || a.ends_with(".dot") || a.ends_with(".toml") {
                dir.join(a).to_string_lossy().into_owned()
            } else {
                a.to_string()
            }
        }))
        .collect();
    let code = nts_cli::run(args, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("field.json"), angle_field().to_json()).unwrap();
    dir
}

fn simulate(dir: &Path, seed: &str, out: &str) -> Run {
    nts(
        dir,
        &[
            "simulate", "--network", "field.json", "--num-traces", "20", "--horizon", "100", "--init-lower", "-1,-1",
            "--init-upper", "-0.6,1", "--seed", seed, "-o", out,
        ],
    )
}

#[test]
fn simulate_writes_all_rows_deterministically() {
    let dir = setup();
    let r = simulate(dir.path(), "1", "a.csv");
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "20 traces, 2020 samples");
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a.lines().count(), 1 + 20 * 101);
    assert!(a.starts_with("trace_id,step,x1,x2\n"));
    simulate(dir.path(), "1", "b.csv");
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    simulate(dir.path(), "2", "c.csv");
    assert_ne!(a, std::fs::read_to_string(dir.path().join("c.csv")).unwrap());
}

#[test]
fn simulate_rejects_bad_arguments() {
    let dir = setup();
    let base = ["simulate", "--network", "field.json", "--init-lower", "0,0", "--init-upper", "1,1", "-o", "x.csv"];
    let mut zero = base.to_vec();
    zero.extend(["--horizon", "0"]);
    assert_eq!(nts(dir.path(), &zero).code, 2);
    let r = nts(dir.path(), &["simulate", "--network", "field.json", "--init-lower", "0,0", "-o", "x.csv"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--init-upper"));
    let r = nts(dir.path(), &["simulate", "--network", "field.json", "--init-lower", "0", "--init-upper", "1", "-o", "x.csv"]);
    assert_eq!(r.code, 2);
}

#[test]
fn train_reports_rmse() {
    let dir = setup();
    simulate(dir.path(), "1", "t.csv");
    let r = nts(dir.path(), &["train", "--traces", "t.csv", "--hidden", "20", "--seed", "7", "-o", "net.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("RMSE"));
    let net = nts_core::nnmodel::load_network(dir.path().join("net.json")).unwrap();
    assert_eq!(net.layers()[0].width(), 20);

    let r = nts(dir.path(), &["train", "--traces", "missing.csv", "-o", "net.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("missing.csv"));
    let r = nts(dir.path(), &["train", "--traces", "t.csv", "--hidden", "0", "-o", "net.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("hidden"));
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = setup();
    simulate(dir.path(), "1", "t.csv");
    let t = dir.path().join("t.csv");
    let cfg = format!("seed = 5\n[train]\ntraces = {:?}\nhidden = 0\n", t.to_string_lossy());
    std::fs::write(dir.path().join("c.toml"), cfg).unwrap();
    assert_eq!(nts(dir.path(), &["--config", "c.toml", "train", "-o", "a.json"]).code, 2);
    assert_eq!(nts(dir.path(), &["--config", "c.toml", "train", "--hidden", "6", "-o", "a.json"]).code, 0);
    assert_eq!(nts(dir.path(), &["--config", "c.toml", "train", "--hidden", "6", "-o", "b.json", "--seed", "5"]).code, 0);
    let read = |n: &str| std::fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.json"), read("b.json"));

    std::fs::write(dir.path().join("bad.toml"), "[train]\nhiden = 3\n").unwrap();
    let r = nts(dir.path(), &["--config", "bad.toml", "train", "-o", "a.json"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("hiden"));
}

#[test]
fn abstract_emits_json_and_dot() {
    let dir = setup();
    simulate(dir.path(), "1", "t.csv");
    let r = nts(
        dir.path(),
        &[
            "abstract", "--network", "field.json", "--traces", "t.csv", "--entropy", "0.04", "--lmin", "0.05",
            "--dwell", "100", "--epsilon", "0", "-o", "ts.json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let line = r.stdout.trim();
    let words: Vec<&str> = line.split(' ').collect();
    assert_eq!(words.len(), 4, "{line}");
    assert_eq!((words[1], words[3]), ("partitions,", "transitions"));
    let ts = TransitionSystem::load(dir.path().join("ts.json")).unwrap();
    assert_eq!(words[0].parse::<usize>().unwrap(), ts.len());
    assert_eq!(words[2].parse::<usize>().unwrap(), ts.transitions().count());
    let dot = std::fs::read_to_string(dir.path().join("ts.dot")).unwrap();
    assert!(dot.starts_with("digraph"));

    let r = nts(dir.path(), &["export-dot", "--system", "ts.json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, dot);

    let r = nts(dir.path(), &["abstract", "--network", "field.json", "--traces", "t.csv", "--entropy", "0", "-o", "x.json"]);
    assert_eq!(r.code, 2);
    let r = nts(dir.path(), &["abstract", "--network", "field.json", "--traces", "t.csv", "--entropy", "-1", "-o", "x.json"]);
    assert_eq!(r.code, 2);
}

#[test]
fn zone_defaults_to_sample_box() {
    let dir = setup();
    let corners = [[0.0, 0.0], [1.0, 0.25], [0.5, 1.0], [0.2, 0.7]];
    let samples = corners
        .iter()
        .enumerate()
        .map(|(k, x)| Sample::new(k as u64, x.to_vec(), vec![]))
        .collect();
    let traces = TraceSet::new(2, 0, vec![Trace::new(0, samples).unwrap()]).unwrap();
    save_traces_csv(&traces, dir.path().join("t.csv")).unwrap();
    let r = nts(dir.path(), &["abstract", "--network", "field.json", "--traces", "t.csv", "--dwell", "1", "-o", "ts.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ts = TransitionSystem::load(dir.path().join("ts.json")).unwrap();
    assert_eq!(ts.partition_set().working_zone().lower(), &[0.0, 0.0]);
    assert_eq!(ts.partition_set().working_zone().upper(), &[1.0, 1.0]);

    let r = nts(
        dir.path(),
        &["abstract", "--network", "field.json", "--traces", "t.csv", "--zone-margin", "0.5", "-o", "m.json", "--out-sink"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let ts = TransitionSystem::load(dir.path().join("m.json")).unwrap();
    assert_eq!(ts.partition_set().working_zone().lower(), &[-0.5, -0.5]);
    assert!(ts.exits().is_some());
}

/// Twelve unit cells on [0, 12] under `x ↦ x + 1`.
fn shift_system(dir: &Path) {
    let b = |l: f64, u: f64| HyperRectangle::new(vec![l], vec![u]).unwrap();
    let parts = (0..12).map(|i| Partition::new(i + 1, b(i as f64, i as f64 + 1.0))).collect();
    let parts = PartitionSet::new(b(0.0, 12.0), parts).unwrap();
    let net = FeedForwardNetwork::new(vec![Layer::new(vec![vec![1.0]], vec![1.0], Activation::Identity).unwrap()]).unwrap();
    let e = compute_transitions(&net, &parts, &HyperRectangle::empty_input()).unwrap();
    let ts = TransitionSystem::new(parts, e, BoolMatrix::new(12), HyperRectangle::empty_input()).unwrap();
    ts.save(dir.join("ts.json")).unwrap();
}

#[test]
fn check_prints_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    shift_system(dir.path());
    std::fs::write(dir.path().join("f.txt"), "# table rows\nEF p12\n\nAX p1\n").unwrap();
    let r = nts(dir.path(), &["check", "--system", "ts.json", "--formulas", "f.txt", "--initial", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let row = r.stdout.lines().find(|l| l.starts_with("EF p12")).unwrap();
    assert!(row.contains("| true"));
    assert!(r.stdout.lines().any(|l| l.starts_with("AX p1 ") && l.contains("| false")));

    let r = nts(
        dir.path(),
        &["check", "--system", "ts.json", "--formulas", "f.txt", "--initial", "1", "--json", "-o", "report.json"],
    );
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v[0]["formula"], "EF p12");
    assert_eq!(v[0]["verdict"], true);
    // closed cells let each step skip ahead one cell
    let witness = v[0]["witness"].as_array().unwrap();
    assert_eq!(witness.first().unwrap(), 1);
    assert_eq!(witness.last().unwrap(), 12);
    assert_eq!(witness.len(), 7);
    let saved: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(saved, v);

    let r = nts(
        dir.path(),
        &["check", "--system", "ts.json", "--formulas", "f.txt", "--initial", "1", "--assert-all-true"],
    );
    assert_eq!(r.code, 1);
}

#[test]
fn check_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    shift_system(dir.path());
    std::fs::write(dir.path().join("empty.txt"), "# nothing to check\n").unwrap();
    let r = nts(dir.path(), &["check", "--system", "ts.json", "--formulas", "empty.txt", "--initial", "1", "--json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "[]");

    std::fs::write(dir.path().join("bad.txt"), "EF p2\nEF (p1\nEF p99\n").unwrap();
    let r = nts(dir.path(), &["check", "--system", "ts.json", "--formulas", "bad.txt", "--initial", "1"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.stdout.lines().filter(|l| l.contains("| error")).count(), 2);
    assert!(r.stdout.lines().any(|l| l.starts_with("EF p2 ") && l.contains("| true")));

    let r = nts(dir.path(), &["check", "--system", "ts.json", "--formulas", "empty.txt", "--initial", "40"]);
    assert_eq!(r.code, 2);
    let r = nts(dir.path(), &["check", "--system", "nope.json", "--formulas", "empty.txt", "--initial", "1"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nope.json"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nts(dir.path(), &["frobnicate"]).code, 2);
    assert_eq!(nts(dir.path(), &["train"]).code, 2);
    let r = nts(dir.path(), &["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("export-dot"));
}
