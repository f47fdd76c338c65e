//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nts_core::ctl::{check, check_suite, CtlFormula, Kripke};
use nts_core::nnmodel::{train_elm, Activation, ElmTrainConfig, FeedForwardNetwork, Layer};
use nts_core::partition::{bisection_gain, me_partition, shannon_entropy, MePartitionConfig, Partition, PartitionSet};
use nts_core::reach::{interval_evaluate, HyperRectangle};
use nts_core::synthetic::{angle_demonstrations, angle_initial_box};
use nts_core::traces::{simulate, simulate_seeded, InputPolicy, Sample, Trace, TraceSet};
use nts_core::transition::{
    build_abstraction, compute_transitions_with, guaranteed_transitions, AbstractionParams, Boundary, SelfLoopConfig,
    TransitionSystem,
};

type Verdict = Result<String, String>;

fn uniform_in(b: &HyperRectangle, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..b.dim())
        .map(|k| {
            let (l, u) = (b.lower()[k], b.upper()[k]);
            if l == u {
                l
            } else {
                rng.random_range(l..=u)
            }
        })
        .collect()
}

fn random_box(dim: usize, rng: &mut ChaCha8Rng) -> HyperRectangle {
    let (lower, upper) = (0..dim)
        .map(|_| {
            let c = rng.random_range(-2.0..2.0);
            let r = rng.random_range(0.0..1.5);
            (c - r, c + r)
        })
        .unzip();
    HyperRectangle::new(lower, upper).unwrap()
}

fn random_layer(fan_in: usize, width: usize, scale: f64, activation: Activation, rng: &mut ChaCha8Rng) -> Layer {
    let weights = (0..width)
        .map(|_| (0..fan_in).map(|_| rng.random_range(-scale..scale)).collect())
        .collect();
    let bias = (0..width).map(|_| rng.random_range(-scale..scale)).collect();
    Layer::new(weights, bias, activation).unwrap()
}

fn random_relu_net(input: usize, output: usize, rng: &mut ChaCha8Rng) -> FeedForwardNetwork {
    let depth = rng.random_range(1..=3);
    let mut layers = Vec::new();
    let mut fan_in = input;
    for l in 0..depth {
        let last = l + 1 == depth;
        let width = if last { output } else { rng.random_range(1..=20) };
        let act = if last && rng.random() { Activation::Identity } else { Activation::Relu };
        layers.push(random_layer(fan_in, width, 1.0, act, rng));
        fan_in = width;
    }
    FeedForwardNetwork::new(layers).unwrap()
}

/// Random guillotine tiling: repeatedly cut a random cell at a random point.
fn random_partitions(zone: &HyperRectangle, cuts: usize, rng: &mut ChaCha8Rng) -> PartitionSet {
    let mut cells = vec![zone.clone()];
    for _ in 0..cuts {
        let i = rng.random_range(0..cells.len());
        let k = rng.random_range(0..zone.dim());
        let c = cells.swap_remove(i);
        let t = rng.random_range(0.2..0.8);
        let at = c.lower()[k] + t * c.side(k);
        let mut up = c.upper().to_vec();
        up[k] = at;
        let mut lo = c.lower().to_vec();
        lo[k] = at;
        cells.push(HyperRectangle::new(c.lower().to_vec(), up).unwrap());
        cells.push(HyperRectangle::new(lo, c.upper().to_vec()).unwrap());
    }
    let parts = cells.into_iter().enumerate().map(|(i, b)| Partition::new(i + 1, b)).collect();
    PartitionSet::new(zone.clone(), parts).unwrap()
}

fn entropy_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (n1, n2) = loop {
            let p = (rng.random_range(0..100_000usize), rng.random_range(0..100_000usize));
            if p.0 + p.1 > 0 {
                break p;
            }
        };
        let h = shannon_entropy(&[n1, n2]).map_err(|e| e.to_string())?;
        worst = worst.max((bisection_gain(n1, n2) - h).abs());
    }
    let elapsed = start.elapsed();
    if worst > 1e-12 {
        return Err(format!("max deviation {worst:e}"));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("1000 pairs, max deviation {worst:e}, {elapsed:?}"))
}

fn reachability_soundness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = 0;
    for _ in 0..50 {
        let (input, output) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let net = random_relu_net(input, output, &mut rng);
        let b = random_box(input, &mut rng);
        let reach = interval_evaluate(&net, &b).map_err(|e| e.to_string())?;
        for _ in 0..10_000 {
            let y = net.evaluate(&uniform_in(&b, &mut rng)).unwrap();
            if !reach.contains_point(&y) {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} sampled outputs outside the interval bound"));
    }
    Ok("50 networks x 10000 samples, 0 violations".into())
}

fn sample_completeness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    let mut violations = 0usize;
    for _ in 0..20 {
        let dim = rng.random_range(1..=3);
        let hidden = random_layer(dim, rng.random_range(2..=12), 1.0, Activation::Relu, &mut rng);
        let out = random_layer(hidden.width(), dim, 0.4, Activation::Identity, &mut rng);
        let net = FeedForwardNetwork::new(vec![hidden, out]).unwrap();
        let zone = HyperRectangle::new(vec![-2.0; dim], vec![2.0; dim]).unwrap();
        let parts = random_partitions(&zone, rng.random_range(3..=25), &mut rng);
        let inits: Vec<Vec<f64>> = (0..15).map(|_| uniform_in(&zone, &mut rng)).collect();
        let traces = simulate(&net, &inits, &InputPolicy::Zero, 30).map_err(|e| e.to_string())?;
        let input = HyperRectangle::empty_input();
        for boundary in [Boundary::Closed, Boundary::HalfOpen] {
            let e = compute_transitions_with(&net, &parts, &input, boundary).map_err(|e| e.to_string())?;
            for t in traces.traces() {
                for w in t.samples().windows(2) {
                    if let (Some(i), Some(j)) = (parts.locate(&w[0].state), parts.locate(&w[1].state)) {
                        checked += 1;
                        if !e.get(i, j) {
                            violations += 1;
                        }
                    }
                }
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} of {checked} observed steps lack a transition"));
    }
    Ok(format!("20 networks, {checked} in-zone steps, 0 violations"))
}

/// `f(x) = A x + c` as a single affine layer, and `Φ = f + δ` with
/// `δ_k(x) = ε s_k (2 clamp(v·x, 0, 1) - 1)`, so `|Φ - f| ≤ ε`.
fn perturbed_pair(dim: usize, eps: f64, rng: &mut ChaCha8Rng) -> (FeedForwardNetwork, FeedForwardNetwork) {
    let a: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.random_range(-0.45..0.45)).collect())
        .collect();
    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let s: Vec<f64> = (0..dim).map(|_| if rng.random() { 1.0 } else { -1.0 }).collect();
    let f = FeedForwardNetwork::new(vec![Layer::new(a.clone(), c.clone(), Activation::Identity).unwrap()]).unwrap();

    let mut hw = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        hw.push(e.clone());
        hw.push(e.iter().map(|x| -x).collect());
    }
    hw.push(v.clone());
    hw.push(v);
    let mut hb = vec![0.0; 2 * dim];
    hb.extend([0.0, -1.0]);
    let hidden = Layer::new(hw, hb, Activation::Relu).unwrap();
    let ow: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut row: Vec<f64> = (0..dim).flat_map(|i| [a[k][i], -a[k][i]]).collect();
            row.extend([2.0 * eps * s[k], -2.0 * eps * s[k]]);
            row
        })
        .collect();
    let ob: Vec<f64> = (0..dim).map(|k| c[k] - eps * s[k]).collect();
    let phi = FeedForwardNetwork::new(vec![hidden, Layer::new(ow, ob, Activation::Identity).unwrap()]).unwrap();
    (f, phi)
}

fn guaranteed_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut guaranteed = 0usize;
    let mut violations = 0usize;
    for _ in 0..20 {
        let dim = rng.random_range(1..=2);
        let eps = rng.random_range(0.005..0.05);
        let (f, phi) = perturbed_pair(dim, eps, &mut rng);
        for _ in 0..200 {
            let x = uniform_in(&HyperRectangle::new(vec![-1.0; dim], vec![1.0; dim]).unwrap(), &mut rng);
            let (yf, yp) = (f.evaluate(&x).unwrap(), phi.evaluate(&x).unwrap());
            if yf.iter().zip(&yp).any(|(a, b)| (a - b).abs() > eps + 1e-12) {
                return Err("perturbation exceeds its bound".into());
            }
        }
        let zone = HyperRectangle::new(vec![-1.0; dim], vec![1.0; dim]).unwrap();
        let parts = random_partitions(&zone, rng.random_range(4..=30), &mut rng);
        let input = HyperRectangle::empty_input();
        let g = guaranteed_transitions(&phi, &parts, &input, eps).map_err(|e| e.to_string())?;
        let e = compute_transitions_with(&f, &parts, &input, Boundary::Closed).map_err(|e| e.to_string())?;
        for (i, j) in g.entries() {
            guaranteed += 1;
            if !e.get(i, j) {
                violations += 1;
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} of {guaranteed} guaranteed transitions missing under f"));
    }
    if guaranteed == 0 {
        return Err("no guaranteed transitions were produced, oracle is vacuous".into());
    }
    Ok(format!("20 instances, {guaranteed} guaranteed transitions, 0 violations"))
}

fn random_formula(depth: usize, n: usize, rng: &mut ChaCha8Rng) -> CtlFormula {
    if depth == 0 || rng.random_range(0..4) == 0 {
        return match rng.random_range(0..6) {
            0 => CtlFormula::True,
            1 => CtlFormula::False,
            _ => CtlFormula::Atom(rng.random_range(1..=n)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_formula(depth - 1, n, rng);
    match rng.random_range(0..13) {
        0 => CtlFormula::not(sub(rng)),
        1 => CtlFormula::and(sub(rng), sub(rng)),
        2 => CtlFormula::or(sub(rng), sub(rng)),
        3 => CtlFormula::implies(sub(rng), sub(rng)),
        4 => CtlFormula::ex(sub(rng)),
        5 => CtlFormula::ax(sub(rng)),
        6 => CtlFormula::ef(sub(rng)),
        7 => CtlFormula::af(sub(rng)),
        8 => CtlFormula::eg(sub(rng)),
        9 => CtlFormula::ag(sub(rng)),
        10 => CtlFormula::eu(sub(rng), sub(rng)),
        _ => CtlFormula::au(sub(rng), sub(rng)),
    }
}

/// All paths of exactly `len` states starting at `s`.
fn paths(k: &Kripke, s: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![s]];
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                let last = *p.last().unwrap();
                k.successors(last).iter().map(move |&t| {
                    let mut q = p.clone();
                    q.push(t);
                    q
                })
            })
            .collect();
    }
    out
}

/// Semantics by explicit path enumeration. A violating or witnessing
/// infinite path always shows up within `n + 1` states on an `n`-state graph.
fn brute_sat(k: &Kripke, f: &CtlFormula) -> Vec<bool> {
    use CtlFormula::*;
    let n = k.len();
    let all = |s: usize, len: usize, ok: &dyn Fn(&[usize]) -> bool| paths(k, s, len).iter().all(|p| ok(p));
    let any = |s: usize, len: usize, ok: &dyn Fn(&[usize]) -> bool| paths(k, s, len).iter().any(|p| ok(p));
    // φ U ψ satisfied within the given prefix
    let until = |a: &[bool], b: &[bool], p: &[usize]| {
        for &s in p {
            if b[s] {
                return true;
            }
            if !a[s] {
                return false;
            }
        }
        false
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(id) => k.ids().iter().map(|x| x == id).collect(),
        Not(a) => brute_sat(k, a).iter().map(|v| !v).collect(),
        And(a, b) => brute_sat(k, a).iter().zip(brute_sat(k, b)).map(|(x, y)| *x && y).collect(),
        Or(a, b) => brute_sat(k, a).iter().zip(brute_sat(k, b)).map(|(x, y)| *x || y).collect(),
        Implies(a, b) => brute_sat(k, a).iter().zip(brute_sat(k, b)).map(|(x, y)| !*x || y).collect(),
        EX(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| any(s, 2, &|p| sa[p[1]])).collect()
        }
        AX(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| all(s, 2, &|p| sa[p[1]])).collect()
        }
        EF(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| any(s, n, &|p| p.iter().any(|&t| sa[t]))).collect()
        }
        AG(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| all(s, n, &|p| p.iter().all(|&t| sa[t]))).collect()
        }
        EG(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| any(s, n + 1, &|p| p.iter().all(|&t| sa[t]))).collect()
        }
        AF(a) => {
            let sa = brute_sat(k, a);
            (0..n).map(|s| all(s, n + 1, &|p| p.iter().any(|&t| sa[t]))).collect()
        }
        EU(a, b) => {
            let (sa, sb) = (brute_sat(k, a), brute_sat(k, b));
            (0..n).map(|s| any(s, n, &|p| until(&sa, &sb, p))).collect()
        }
        AU(a, b) => {
            let (sa, sb) = (brute_sat(k, a), brute_sat(k, b));
            (0..n).map(|s| all(s, n + 1, &|p| until(&sa, &sb, p))).collect()
        }
    }
}

fn ctl_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut cases = 0usize;
    for _ in 0..200 {
        let n = rng.random_range(1..=8);
        let edges = (0..n)
            .map(|_| {
                let deg = rng.random_range(0..=3);
                (0..deg).map(|_| rng.random_range(0..n)).collect()
            })
            .collect();
        let k = Kripke::new((1..=n).collect(), edges).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let f = random_formula(4, n, &mut rng);
            cases += 1;
            if k.sat(&f).map_err(|e| e.to_string())? != brute_sat(&k, &f) {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    if mismatches > 0 {
        return Err(format!("{mismatches} of {cases} formulas disagree with path enumeration"));
    }
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("200 structures, {cases} formulas, 0 mismatches, {elapsed:?}"))
}

fn partition_tiling() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total_cells = 0;
    for round in 0..50 {
        let dim = rng.random_range(1..=3);
        let zone = random_box(dim, &mut rng);
        let clusters: Vec<Vec<f64>> = (0..rng.random_range(1..=4)).map(|_| uniform_in(&zone, &mut rng)).collect();
        let traces = (0..rng.random_range(1..=6))
            .map(|id| {
                let samples = (0..rng.random_range(5..60))
                    .map(|step| {
                        let c = &clusters[rng.random_range(0..clusters.len())];
                        let x = (0..dim)
                            .map(|k| {
                                let jitter = 0.1 * zone.side(k) * rng.random_range(-1.0..1.0);
                                (c[k] + jitter).clamp(zone.lower()[k], zone.upper()[k])
                            })
                            .collect();
                        Sample::new(step, x, vec![])
                    })
                    .collect();
                Trace::new(id, samples).unwrap()
            })
            .collect();
        let traces = TraceSet::new(dim, 0, traces).unwrap();
        let cfg = MePartitionConfig::new(rng.random_range(0.01..0.3), rng.random_range(0.05..0.5)).unwrap();
        let parts = me_partition(&traces, &zone, &cfg).map_err(|e| e.to_string())?;
        let cells: Vec<&HyperRectangle> = parts.partitions().iter().map(|p| &p.bounds).collect();
        total_cells += cells.len();
        let sum: f64 = cells.iter().map(|c| c.volume()).sum();
        let rel = (sum - zone.volume()).abs() / zone.volume();
        if rel > 1e-9 {
            return Err(format!("round {round}: volume off by {rel:e}"));
        }
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                let overlap: f64 = (0..dim)
                    .map(|k| {
                        (cells[i].upper()[k].min(cells[j].upper()[k]) - cells[i].lower()[k].max(cells[j].lower()[k]))
                            .max(0.0)
                    })
                    .product();
                if overlap > 0.0 {
                    return Err(format!("round {round}: cells {i} and {j} overlap"));
                }
            }
        }
    }
    Ok(format!("50 trace sets, {total_cells} cells, all tilings exact"))
}

const SYNTHETIC_L_MIN: f64 = 0.25;

struct PipelineRun {
    system: TransitionSystem,
    goal: usize,
    initial: Vec<usize>,
}

fn synthetic_pipeline(seed: u64) -> Result<PipelineRun, String> {
    let err = |e: nts_core::Error| e.to_string();
    let demos = angle_demonstrations(20, 200, seed).map_err(err)?;
    let elm = train_elm(
        &demos,
        &ElmTrainConfig {
            hidden_width: 20,
            seed,
            ..ElmTrainConfig::default()
        },
    )
    .map_err(err)?;
    let traces = simulate_seeded(&elm.network, &angle_initial_box(), 20, None, 200, seed + 1).map_err(err)?;
    let zone = traces.state_hull().ok_or("no samples")?;
    let params = AbstractionParams {
        partitioning: MePartitionConfig::new(0.04, SYNTHETIC_L_MIN).map_err(err)?,
        self_loops: SelfLoopConfig::new(100).map_err(err)?,
        epsilon: elm.report.rmse,
        boundary: Boundary::Closed,
        exit_sink: false,
    };
    let system = build_abstraction(&elm.network, &traces, &zone, &HyperRectangle::empty_input(), &params).map_err(err)?;
    let parts = system.partition_set();
    // the learned attractor: where the trajectories settle
    let rest = &traces.traces()[0].samples().last().unwrap().state;
    let goal = system.id_of(parts.locate(rest).ok_or("attractor outside the zone")?);
    let mut initial: Vec<usize> = traces
        .traces()
        .iter()
        .filter_map(|t| parts.locate(&t.samples()[0].state))
        .map(|i| system.id_of(i))
        .collect();
    initial.sort_unstable();
    initial.dedup();
    Ok(PipelineRun { system, goal, initial })
}

fn end_to_end() -> Verdict {
    let start = Instant::now();
    let run = synthetic_pipeline(11)?;
    let again = synthetic_pipeline(11)?;
    let elapsed = start.elapsed();
    let ts = &run.system;
    let count = ts.len();
    if !(10..=60).contains(&count) {
        return Err(format!("{count} partitions, outside [10, 60]"));
    }
    if run.system.to_json() != again.system.to_json() {
        return Err("two runs with the same seed differ".into());
    }
    let goal_formula = format!("EF p{}", run.goal);
    let first = run.initial[0];
    let suite = [
        goal_formula.clone(),
        format!("AX p{}", run.goal),
        format!("E[!p{} U p{}]", run.goal, run.goal),
    ];
    let report = check_suite(ts, &suite, first).map_err(|e| e.to_string())?;
    if !report.all_evaluated() {
        return Err("suite had evaluation errors".into());
    }
    let phi = nts_core::ctl::parse_ctl(&goal_formula).map_err(|e| e.to_string())?;
    for &p in &run.initial {
        if !check(ts, &phi, p).map_err(|e| e.to_string())?.holds {
            return Err(format!("{goal_formula} is false from P{p}"));
        }
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{count} partitions, {} transitions, {goal_formula} holds from {} initial partitions, {elapsed:?} for two runs",
        ts.transitions().count(),
        run.initial.len()
    ))
}

fn nts(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nts"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("nts {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(())
}

fn cli_determinism() -> Verdict {
    let net = nts_core::synthetic::angle_field().to_json();
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let d = dir.path();
        std::fs::write(d.join("field.json"), &net).map_err(|e| e.to_string())?;
        nts(
            d,
            &[
                "simulate", "--network", "field.json", "--num-traces", "20", "--horizon", "200", "--init-lower",
                "-1,-1", "--init-upper", "-0.6,1", "--seed", "3", "-o", "t.csv",
            ],
        )?;
        nts(d, &["train", "--traces", "t.csv", "--hidden", "20", "--seed", "7", "-o", "net.json"])?;
        nts(
            d,
            &[
                "abstract", "--network", "net.json", "--traces", "t.csv", "--entropy", "0.04", "--lmin", "0.05",
                "--dwell", "100", "--epsilon", "0", "-o", "ts.json",
            ],
        )?;
        let read = |name: &str| std::fs::read(d.join(name)).map_err(|e| e.to_string());
        outputs.push([read("t.csv")?, read("net.json")?, read("ts.json")?, read("ts.dot")?]);
    }
    for (name, (a, b)) in ["traces", "network", "system JSON", "DOT"].iter().zip(outputs[0].iter().zip(&outputs[1])) {
        if a != b {
            return Err(format!("{name} differs between runs"));
        }
    }
    Ok(format!(
        "traces, network, system JSON and DOT byte-identical ({} JSON bytes)",
        outputs[0][2].len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("entropy identity", entropy_identity),
        ("reachability soundness", reachability_soundness),
        ("sample completeness", sample_completeness),
        ("guaranteed transitions oracle", guaranteed_oracle),
        ("CTL oracle equivalence", ctl_oracle),
        ("partition tiling", partition_tiling),
        ("synthetic pipeline", end_to_end),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {} {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
