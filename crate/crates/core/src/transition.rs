//! Transition-system abstraction `⟨X, P, E⟩` of a network dynamical system.
//!
//! `e_ij = 1` when the interval reachable set of cell `P_i` (times the input
//! set) meets cell `P_j`. Self-loops without dwell evidence are removed, and
//! transitions whose reachable set stays inside `P_j` even after inflating
//! by the model error `ε` are marked as guaranteed.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::nnmodel::FeedForwardNetwork;
use crate::partition::{me_partition, MePartitionConfig, PartitionSet, PartitionSetRecord};
use crate::reach::{interval_evaluate, HyperRectangle};
use crate::traces::{max_dwell_by, TraceSet};

/// Square boolean matrix indexed by partition position (not id).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    n: usize,
    cells: Vec<bool>,
}

impl BoolMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            cells: vec![false; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::new(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!("matrix row {i} has {} entries, expected {n}", row.len())));
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.cells[i * self.n..(i + 1) * self.n]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&v| v).count()
    }

    /// `(i, j)` pairs of set entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v)
            .map(move |(k, _)| (k / self.n, k % self.n))
    }

    /// Elementwise `self ⇒ other`.
    pub fn is_subset_of(&self, other: &BoolMatrix) -> bool {
        self.n == other.n && self.cells.iter().zip(&other.cells).all(|(&a, &b)| !a || b)
    }

    fn to_bits(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|i| self.row(i).iter().map(|&v| v as u8).collect()).collect()
    }

    fn from_bits(name: &str, bits: &[Vec<u8>]) -> Result<Self> {
        let rows = bits
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &b)| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        _ => Err(Error::Validation(format!("{name}[{i}][{j}] is {b}, expected 0 or 1"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

/// How a reachable box is intersected with a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Cells are closed; touching a face counts as a transition.
    #[default]
    Closed,
    /// Cells are half-open like sample membership; only the zone's upper faces are closed.
    HalfOpen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfLoopConfig {
    /// A self-loop survives only if some trace stays in the cell for more than this many consecutive samples.
    pub dwell_threshold: usize,
}

impl SelfLoopConfig {
    pub fn new(dwell_threshold: usize) -> Result<Self> {
        if dwell_threshold == 0 {
            return Err(Error::InvalidArgument("dwell threshold must be at least 1".into()));
        }
        Ok(Self { dwell_threshold })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub entropy: Option<f64>,
    pub l_min: Option<f64>,
    pub dwell_n: Option<usize>,
    pub epsilon: Option<f64>,
    /// Ids of partitions with no outgoing transition.
    #[serde(default)]
    pub out_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem {
    partition_set: PartitionSet,
    transitions: BoolMatrix,
    guaranteed: BoolMatrix,
    input_set: HyperRectangle,
    /// Per partition: whether its reachable set leaves the working zone.
    /// Present only when an explicit `out` sink was requested.
    exits: Option<Vec<bool>>,
    metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
struct TransitionSystemRecord {
    #[serde(flatten)]
    partition_set: PartitionSetRecord,
    input_set: HyperRectangle,
    transitions: Vec<Vec<u8>>,
    guaranteed: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exits: Option<Vec<u8>>,
    metadata: Metadata,
}

impl TransitionSystem {
    pub fn new(
        partition_set: PartitionSet,
        transitions: BoolMatrix,
        guaranteed: BoolMatrix,
        input_set: HyperRectangle,
    ) -> Result<Self> {
        let n = partition_set.len();
        if transitions.size() != n || guaranteed.size() != n {
            return Err(Error::Validation(format!(
                "transition matrices must be {n}x{n} for {n} partitions"
            )));
        }
        if !guaranteed.is_subset_of(&transitions) {
            return Err(Error::Validation("a guaranteed transition is missing from the transition matrix".into()));
        }
        let mut ts = Self {
            partition_set,
            transitions,
            guaranteed,
            input_set,
            exits: None,
            metadata: Metadata::default(),
        };
        ts.refresh_out_rows();
        Ok(ts)
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self.refresh_out_rows();
        self
    }

    pub fn with_exits(mut self, exits: Vec<bool>) -> Result<Self> {
        if exits.len() != self.len() {
            return Err(Error::dims("exit flags", self.len(), exits.len()));
        }
        self.exits = Some(exits);
        Ok(self)
    }

    fn refresh_out_rows(&mut self) {
        self.metadata.out_rows = (0..self.len())
            .filter(|&i| !self.transitions.row(i).iter().any(|&v| v))
            .map(|i| self.partition_set.partitions()[i].id)
            .collect();
    }

    pub fn partition_set(&self) -> &PartitionSet {
        &self.partition_set
    }

    pub fn transitions(&self) -> &BoolMatrix {
        &self.transitions
    }

    pub fn guaranteed(&self) -> &BoolMatrix {
        &self.guaranteed
    }

    pub fn input_set(&self) -> &HyperRectangle {
        &self.input_set
    }

    pub fn exits(&self) -> Option<&[bool]> {
        self.exits.as_deref()
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.partition_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition_set.is_empty()
    }

    pub fn id_of(&self, idx: usize) -> usize {
        self.partition_set.partitions()[idx].id
    }

    pub fn to_json(&self) -> String {
        let rec = TransitionSystemRecord {
            partition_set: self.partition_set.to_record(),
            input_set: self.input_set.clone(),
            transitions: self.transitions.to_bits(),
            guaranteed: self.guaranteed.to_bits(),
            exits: self.exits.as_ref().map(|e| e.iter().map(|&v| v as u8).collect()),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&rec).expect("transition system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: TransitionSystemRecord = error::from_json_str(text)?;
        let parts = PartitionSet::from_record(rec.partition_set)?;
        let mut ts = Self::new(
            parts,
            BoolMatrix::from_bits("transitions", &rec.transitions)?,
            BoolMatrix::from_bits("guaranteed", &rec.guaranteed)?,
            rec.input_set,
        )?
        .with_metadata(rec.metadata);
        if let Some(bits) = rec.exits {
            ts = ts.with_exits(bits.iter().map(|&b| b != 0).collect())?;
        }
        Ok(ts)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        error::write_file(path.as_ref(), &(self.to_json() + "\n"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&error::read_file(path.as_ref())?)
    }
}

/// `[Φ](P_i × U)` for every partition, in partition order.
pub fn reachable_boxes(
    net: &FeedForwardNetwork,
    parts: &PartitionSet,
    input_set: &HyperRectangle,
) -> Result<Vec<HyperRectangle>> {
    if net.output_dim() != parts.dim() {
        return Err(Error::dims("network state dimension", parts.dim(), net.output_dim()));
    }
    if net.input_dim() != parts.dim() + input_set.dim() {
        return Err(Error::dims(
            "network input dimension (state + input set)",
            net.input_dim(),
            parts.dim() + input_set.dim(),
        ));
    }
    parts
        .partitions()
        .iter()
        .map(|p| interval_evaluate(net, &p.bounds.product(input_set)))
        .collect()
}

pub fn transitions_from_boxes(parts: &PartitionSet, boxes: &[HyperRectangle], boundary: Boundary) -> BoolMatrix {
    let n = parts.len();
    let mut e = BoolMatrix::new(n);
    for (i, reach) in boxes.iter().enumerate() {
        for j in 0..n {
            let hit = match boundary {
                Boundary::Closed => {
                    let cell = &parts.partitions()[j].bounds;
                    (0..cell.dim()).all(|k| {
                        reach.lower()[k].max(cell.lower()[k]) <= reach.upper()[k].min(cell.upper()[k])
                    })
                }
                Boundary::HalfOpen => parts.cell_meets(j, reach),
            };
            e.set(i, j, hit);
        }
    }
    e
}

/// Transition matrix with closed-cell intersection.
pub fn compute_transitions(
    net: &FeedForwardNetwork,
    parts: &PartitionSet,
    input_set: &HyperRectangle,
) -> Result<BoolMatrix> {
    compute_transitions_with(net, parts, input_set, Boundary::Closed)
}

pub fn compute_transitions_with(
    net: &FeedForwardNetwork,
    parts: &PartitionSet,
    input_set: &HyperRectangle,
    boundary: Boundary,
) -> Result<BoolMatrix> {
    let boxes = reachable_boxes(net, parts, input_set)?;
    Ok(transitions_from_boxes(parts, &boxes, boundary))
}

/// `g_ij = 1` iff the reachable box of `P_i`, inflated by `epsilon`, lies in closed `P_j`.
pub fn guaranteed_from_boxes(parts: &PartitionSet, boxes: &[HyperRectangle], epsilon: f64) -> Result<BoolMatrix> {
    let n = parts.len();
    let mut g = BoolMatrix::new(n);
    for (i, reach) in boxes.iter().enumerate() {
        let inflated = reach.inflate(epsilon)?;
        for (j, p) in parts.partitions().iter().enumerate() {
            g.set(i, j, p.bounds.contains(&inflated)?);
        }
    }
    Ok(g)
}

pub fn guaranteed_transitions(
    net: &FeedForwardNetwork,
    parts: &PartitionSet,
    input_set: &HyperRectangle,
    epsilon: f64,
) -> Result<BoolMatrix> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let boxes = reachable_boxes(net, parts, input_set)?;
    guaranteed_from_boxes(parts, &boxes, epsilon)
}

/// Drops each self-loop `e_ii` unless some trace dwells in `P_i` for more
/// than `dwell_threshold` consecutive samples. Off-diagonal entries are
/// untouched; a dropped self-loop also loses its guaranteed mark.
pub fn reduce_self_loops(ts: &TransitionSystem, traces: &TraceSet, cfg: &SelfLoopConfig) -> TransitionSystem {
    let mut out = ts.clone();
    let parts = &ts.partition_set;
    for i in 0..ts.len() {
        if !ts.transitions.get(i, i) {
            continue;
        }
        let dwell = max_dwell_by(traces, |x| x.len() == parts.dim() && parts.cell_contains(i, x));
        if dwell <= cfg.dwell_threshold {
            out.transitions.set(i, i, false);
            out.guaranteed.set(i, i, false);
        }
    }
    out.metadata.dwell_n = Some(cfg.dwell_threshold);
    out.refresh_out_rows();
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbstractionParams {
    pub partitioning: MePartitionConfig,
    pub self_loops: SelfLoopConfig,
    pub epsilon: f64,
    pub boundary: Boundary,
    /// Record which cells can leave the working zone (an explicit `out` sink).
    pub exit_sink: bool,
}

/// Full pipeline: partition, compute transitions, reduce self-loops, mark
/// guaranteed transitions.
pub fn build_abstraction(
    net: &FeedForwardNetwork,
    traces: &TraceSet,
    working_zone: &HyperRectangle,
    input_set: &HyperRectangle,
    params: &AbstractionParams,
) -> Result<TransitionSystem> {
    let parts = me_partition(traces, working_zone, &params.partitioning)?;
    let mut ts = abstract_partitions(net, parts, traces, input_set, params)?;
    ts.metadata.entropy = Some(params.partitioning.entropy_threshold);
    ts.metadata.l_min = Some(params.partitioning.min_length);
    Ok(ts)
}

/// The pipeline after partitioning, for callers that supply their own cells.
pub fn abstract_partitions(
    net: &FeedForwardNetwork,
    parts: PartitionSet,
    traces: &TraceSet,
    input_set: &HyperRectangle,
    params: &AbstractionParams,
) -> Result<TransitionSystem> {
    if !(params.epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be nonnegative, got {}", params.epsilon)));
    }
    let boxes = reachable_boxes(net, &parts, input_set)?;
    let transitions = transitions_from_boxes(&parts, &boxes, params.boundary);
    let exits: Vec<bool> = boxes
        .iter()
        .map(|b| parts.working_zone().contains(b).map(|inside| !inside))
        .collect::<Result<_>>()?;
    let empty = BoolMatrix::new(parts.len());
    let ts = TransitionSystem::new(parts, transitions, empty, input_set.clone())?;
    let mut ts = reduce_self_loops(&ts, traces, &params.self_loops);

    let mut guaranteed = guaranteed_from_boxes(&ts.partition_set, &boxes, params.epsilon)?;
    for (i, j) in guaranteed.clone().entries() {
        if !ts.transitions.get(i, j) {
            guaranteed.set(i, j, false);
        }
    }
    ts.guaranteed = guaranteed;
    ts.metadata.epsilon = Some(params.epsilon);
    if params.exit_sink {
        ts = ts.with_exits(exits)?;
    }
    ts.refresh_out_rows();
    Ok(ts)
}

/// Renders the abstraction as a Graphviz digraph.
///
/// Nodes are `P<id>` in partition order; edges follow row-major order.
/// Guaranteed transitions carry `style=bold, color=blue, label="G"`. With an
/// exit sink, an `out` node is added and exiting cells get a dashed edge to it.
pub fn export_dot(ts: &TransitionSystem) -> String {
    let mut dot = String::from("digraph transition_system {\n  node [shape=box];\n");
    for p in ts.partition_set.partitions() {
        let _ = writeln!(dot, "  P{0} [label=\"P{0}\"];", p.id);
    }
    if ts.exits.is_some() {
        dot.push_str("  out [label=\"out\", shape=doublecircle];\n");
    }
    for (i, j) in ts.transitions.entries() {
        let (a, b) = (ts.id_of(i), ts.id_of(j));
        if ts.guaranteed.get(i, j) {
            let _ = writeln!(dot, "  P{a} -> P{b} [style=bold, color=blue, label=\"G\"];");
        } else {
            let _ = writeln!(dot, "  P{a} -> P{b};");
        }
    }
    if let Some(exits) = &ts.exits {
        for (i, _) in exits.iter().enumerate().filter(|(_, &e)| e) {
            let _ = writeln!(dot, "  P{} -> out [style=dashed];", ts.id_of(i));
        }
    }
    dot.push_str("}\n");
    dot
}
