//! Sampled trajectories, simulation from a network, segmentation by
//! partition and dwell statistics.
//!
//! Trace CSV layout (UTF-8, `.` decimal separator, rows sorted by trace then step):
//!
//! ```text
//! trace_id,step,x1,x2,u1
//! 0,0,0.5,1.0,0.0
//! 0,1,0.45,0.9,0.0
//! ```

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::nnmodel::FeedForwardNetwork;
use crate::partition::PartitionSet;
use crate::reach::HyperRectangle;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub step: u64,
    pub state: Vec<f64>,
    pub input: Vec<f64>,
}

impl Sample {
    pub fn new(step: u64, state: Vec<f64>, input: Vec<f64>) -> Self {
        Self { step, state, input }
    }
}

/// A trajectory with strictly consecutive step indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    id: u64,
    samples: Vec<Sample>,
}

impl Trace {
    pub fn new(id: u64, samples: Vec<Sample>) -> Result<Self> {
        for w in samples.windows(2) {
            if w[1].step != w[0].step + 1 {
                return Err(Error::InvalidInput(format!(
                    "trace {id}: step {} follows step {}",
                    w[1].step, w[0].step
                )));
            }
        }
        Ok(Self { id, samples })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.iter().map(|s| s.state.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSet {
    state_dim: usize,
    input_dim: usize,
    traces: Vec<Trace>,
}

impl TraceSet {
    pub fn new(state_dim: usize, input_dim: usize, traces: Vec<Trace>) -> Result<Self> {
        for t in &traces {
            for s in &t.samples {
                if s.state.len() != state_dim {
                    return Err(Error::InvalidInput(format!(
                        "trace {} step {}: state has {} components, expected {state_dim}",
                        t.id,
                        s.step,
                        s.state.len()
                    )));
                }
                if s.input.len() != input_dim {
                    return Err(Error::InvalidInput(format!(
                        "trace {} step {}: input has {} components, expected {input_dim}",
                        t.id,
                        s.step,
                        s.input.len()
                    )));
                }
            }
        }
        Ok(Self {
            state_dim,
            input_dim,
            traces,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn total_samples(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.traces.iter().flat_map(Trace::states)
    }

    /// Longest trace, in samples.
    pub fn max_trace_len(&self) -> usize {
        self.traces.iter().map(Trace::len).max().unwrap_or(0)
    }

    /// One-step training pairs `([x(k); u(k)], x(k+1))`, trace by trace.
    pub fn pairs(&self) -> impl Iterator<Item = (Vec<f64>, Vec<f64>)> + '_ {
        self.traces.iter().flat_map(|t| {
            t.samples.windows(2).map(|w| {
                let mut d = w[0].state.clone();
                d.extend_from_slice(&w[0].input);
                (d, w[1].state.clone())
            })
        })
    }

    /// Componentwise min/max box over all sampled states.
    pub fn state_hull(&self) -> Option<HyperRectangle> {
        HyperRectangle::hull_of_points(self.states())
    }
}

/// How `u(k)` is chosen during simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum InputPolicy {
    /// Zero vector of the network's input dimension.
    Zero,
    Constant(Vec<f64>),
    /// `u(k)` for `k = 0..=horizon`.
    PerStep(Vec<Vec<f64>>),
    /// Independent uniform draws over a box.
    Uniform { set: HyperRectangle, seed: u64 },
}

enum InputSource<'a> {
    Fixed(Vec<f64>),
    PerStep(&'a [Vec<f64>]),
    Uniform(&'a HyperRectangle, ChaCha8Rng),
}

impl InputSource<'_> {
    fn next(&mut self, k: usize) -> Vec<f64> {
        match self {
            InputSource::Fixed(u) => u.clone(),
            InputSource::PerStep(us) => us[k].clone(),
            InputSource::Uniform(set, rng) => uniform_point(set, rng),
        }
    }
}

fn uniform_point(set: &HyperRectangle, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..set.dim())
        .map(|k| {
            let (l, u) = (set.lower()[k], set.upper()[k]);
            if l == u {
                l
            } else {
                rng.random_range(l..=u)
            }
        })
        .collect()
}

/// Number of external inputs the network expects beyond the state.
pub fn input_dim_of(net: &FeedForwardNetwork) -> Result<usize> {
    net.input_dim().checked_sub(net.output_dim()).ok_or_else(|| {
        Error::InvalidInput(format!(
            "network maps {} inputs to {} states; it cannot be a state-space model",
            net.input_dim(),
            net.output_dim()
        ))
    })
}

/// Rolls `x(k+1) = net([x(k); u(k)])` forward `horizon` steps from each
/// initial state. Trace ids are the initial-state indices.
pub fn simulate(
    net: &FeedForwardNetwork,
    initial_states: &[Vec<f64>],
    policy: &InputPolicy,
    horizon: usize,
) -> Result<TraceSet> {
    let n_x = net.output_dim();
    let n_u = input_dim_of(net)?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("simulation horizon must be at least 1".into()));
    }
    let mut source = match policy {
        InputPolicy::Zero => InputSource::Fixed(vec![0.0; n_u]),
        InputPolicy::Constant(u) => {
            if u.len() != n_u {
                return Err(Error::dims("constant input", n_u, u.len()));
            }
            InputSource::Fixed(u.clone())
        }
        InputPolicy::PerStep(us) => {
            if us.len() < horizon + 1 {
                return Err(Error::InvalidArgument(format!(
                    "per-step input list has {} entries, need {}",
                    us.len(),
                    horizon + 1
                )));
            }
            if let Some(u) = us.iter().find(|u| u.len() != n_u) {
                return Err(Error::dims("per-step input", n_u, u.len()));
            }
            InputSource::PerStep(us)
        }
        InputPolicy::Uniform { set, seed } => {
            if set.dim() != n_u {
                return Err(Error::dims("input set", n_u, set.dim()));
            }
            InputSource::Uniform(set, ChaCha8Rng::seed_from_u64(*seed))
        }
    };

    let mut traces = Vec::with_capacity(initial_states.len());
    for (i, x0) in initial_states.iter().enumerate() {
        if x0.len() != n_x {
            return Err(Error::dims("initial state", n_x, x0.len()));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("initial state {i} is not finite: {x0:?}")));
        }
        let mut samples = Vec::with_capacity(horizon + 1);
        let mut x = x0.clone();
        for k in 0..=horizon {
            let u = source.next(k);
            let mut d = x.clone();
            d.extend_from_slice(&u);
            samples.push(Sample::new(k as u64, x, u));
            if k == horizon {
                break;
            }
            x = net.evaluate(&d)?;
        }
        traces.push(Trace::new(i as u64, samples)?);
    }
    TraceSet::new(n_x, n_u, traces)
}

/// Draws `count` initial states uniformly from `init_box` and simulates
/// them. Initial states and (when `input_set` is given) inputs come from a
/// single ChaCha8 stream seeded with `seed`; with no input set the input is
/// the zero vector.
pub fn simulate_seeded(
    net: &FeedForwardNetwork,
    init_box: &HyperRectangle,
    count: usize,
    input_set: Option<&HyperRectangle>,
    horizon: usize,
    seed: u64,
) -> Result<TraceSet> {
    if init_box.dim() != net.output_dim() {
        return Err(Error::dims("initial-state box", net.output_dim(), init_box.dim()));
    }
    if !init_box.is_finite() {
        return Err(Error::InvalidInput("initial-state box is not finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial: Vec<Vec<f64>> = (0..count).map(|_| uniform_point(init_box, &mut rng)).collect();
    let policy = match input_set {
        Some(set) if set.dim() > 0 => InputPolicy::Uniform {
            set: set.clone(),
            seed: rng.random(),
        },
        _ => InputPolicy::Zero,
    };
    simulate(net, &initial, &policy, horizon)
}

/// Index of one sample inside a [`TraceSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleRef {
    pub trace: usize,
    pub sample: usize,
}

/// Samples grouped by the partition containing their state.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSet {
    members: Vec<Vec<SampleRef>>,
    out_of_zone: usize,
}

impl SegmentSet {
    /// Sample references for partition index `q` (not id).
    pub fn members(&self, q: usize) -> &[SampleRef] {
        &self.members[q]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Total in-zone samples.
    pub fn total(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    pub fn out_of_zone(&self) -> usize {
        self.out_of_zone
    }
}

/// Assigns every sampled state to the unique partition containing it
/// (half-open cells, see [`PartitionSet::locate`]).
pub fn segment(traces: &TraceSet, parts: &PartitionSet) -> SegmentSet {
    let mut members = vec![Vec::new(); parts.len()];
    let mut out_of_zone = 0;
    for (ti, t) in traces.traces().iter().enumerate() {
        for (si, s) in t.samples().iter().enumerate() {
            match parts.locate(&s.state) {
                Some(q) => members[q].push(SampleRef { trace: ti, sample: si }),
                None => out_of_zone += 1,
            }
        }
    }
    SegmentSet { members, out_of_zone }
}

/// Longest run of consecutive samples (over all traces) whose state satisfies `inside`.
pub fn max_dwell_by<F: Fn(&[f64]) -> bool>(traces: &TraceSet, inside: F) -> usize {
    let mut best = 0;
    for t in traces.traces() {
        let mut run = 0;
        for x in t.states() {
            if inside(x) {
                run += 1;
                best = best.max(run);
            } else {
                run = 0;
            }
        }
    }
    best
}

/// [`max_dwell_by`] with closed-box membership.
pub fn max_dwell(traces: &TraceSet, partition: &HyperRectangle) -> usize {
    max_dwell_by(traces, |x| partition.contains_point(x))
}

pub fn read_traces_csv<R: Read>(reader: R) -> Result<TraceSet> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Format {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let (n_x, n_u) = parse_header(&header)?;

    let mut traces: Vec<Trace> = Vec::new();
    let mut current: Option<(u64, Vec<Sample>)> = None;
    let mut seen = std::collections::BTreeSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Format {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let fmt = |message: String| Error::Format { line, message };
        if record.len() != 2 + n_x + n_u {
            return Err(fmt(format!("expected {} fields, found {}", 2 + n_x + n_u, record.len())));
        }
        let id: u64 = record[0]
            .trim()
            .parse()
            .map_err(|_| fmt(format!("trace_id `{}` is not a nonnegative integer", &record[0])))?;
        let step: u64 = record[1]
            .trim()
            .parse()
            .map_err(|_| fmt(format!("step `{}` is not a nonnegative integer", &record[1])))?;
        let mut values = Vec::with_capacity(n_x + n_u);
        for (c, field) in record.iter().enumerate().skip(2) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| fmt(format!("column {} value `{field}` is not a number", header[c].to_string())))?;
            values.push(v);
        }
        let input = values.split_off(n_x);
        let sample = Sample::new(step, values, input);

        match &mut current {
            Some((cur_id, samples)) if *cur_id == id => {
                let prev = samples.last().map(|s| s.step).unwrap_or(0);
                if step != prev + 1 {
                    return Err(fmt(format!(
                        "trace {id}: step {step} does not follow step {prev} (steps must be consecutive)"
                    )));
                }
                samples.push(sample);
            }
            _ => {
                if !seen.insert(id) {
                    return Err(fmt(format!("trace {id} appears in more than one block of rows")));
                }
                if let Some((cid, samples)) = current.take() {
                    traces.push(Trace::new(cid, samples)?);
                }
                current = Some((id, vec![sample]));
            }
        }
    }
    if let Some((cid, samples)) = current {
        traces.push(Trace::new(cid, samples)?);
    }
    TraceSet::new(n_x, n_u, traces)
}

fn parse_header(header: &csv::StringRecord) -> Result<(usize, usize)> {
    let bad = |message: String| Error::Format { line: 1, message };
    let cols: Vec<&str> = header.iter().map(str::trim).collect();
    if cols.len() < 2 || cols[0] != "trace_id" || cols[1] != "step" {
        return Err(bad("header must start with `trace_id,step`".into()));
    }
    let mut n_x = 0;
    let mut n_u = 0;
    for name in &cols[2..] {
        if n_u == 0 && *name == format!("x{}", n_x + 1) {
            n_x += 1;
        } else if *name == format!("u{}", n_u + 1) {
            n_u += 1;
        } else {
            return Err(bad(format!(
                "unexpected column `{name}`; expected x1..x{{n}} followed by u1..u{{m}}"
            )));
        }
    }
    if n_x == 0 {
        return Err(bad("no state columns (x1..)".into()));
    }
    Ok((n_x, n_u))
}

pub fn write_traces_csv<W: Write>(traces: &TraceSet, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["trace_id".to_string(), "step".to_string()];
    header.extend((1..=traces.state_dim()).map(|i| format!("x{i}")));
    header.extend((1..=traces.input_dim()).map(|i| format!("u{i}")));
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("writing trace CSV: {e}"));
    wtr.write_record(&header).map_err(csv_err)?;
    for t in traces.traces() {
        for s in t.samples() {
            let mut row = vec![t.id().to_string(), s.step.to_string()];
            row.extend(s.state.iter().chain(&s.input).map(|v| v.to_string()));
            wtr.write_record(&row).map_err(csv_err)?;
        }
    }
    wtr.flush()
        .map_err(|e| Error::InvalidInput(format!("writing trace CSV: {e}")))?;
    Ok(())
}

pub fn load_traces_csv(path: impl AsRef<Path>) -> Result<TraceSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_traces_csv(std::io::BufReader::new(file))
}

pub fn save_traces_csv(traces: &TraceSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_traces_csv(traces, std::io::BufWriter::new(file))
}
