//! Maximum-entropy partitioning of the working zone.
//!
//! The zone is bisected one cell at a time, always at the midpoint of the
//! longest side of the currently longest active cell. A split is kept when
//! the entropy of the local sample split reaches the threshold; otherwise
//! the cell is retired unchanged. Selection stops once the longest active
//! side drops below `min_length`.
//!
//! Cells are half-open `[lower, upper)` for sample membership, except that
//! faces lying on the zone's upper boundary are closed. This makes the cells
//! a true partition of the (closed) zone.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::reach::HyperRectangle;
use crate::traces::TraceSet;

/// Relative tolerance for the volume tiling check.
pub const TILING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub id: usize,
    pub bounds: HyperRectangle,
}

impl Partition {
    pub fn new(id: usize, bounds: HyperRectangle) -> Self {
        Self { id, bounds }
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionRecord {
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PartitionSetRecord {
    working_zone: HyperRectangle,
    partitions: Vec<PartitionRecord>,
}

/// Disjoint cells covering a box-shaped working zone.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSet {
    working_zone: HyperRectangle,
    partitions: Vec<Partition>,
}

impl PartitionSet {
    /// Checks the tiling invariants: unique ids, every cell inside the zone,
    /// cells pairwise interior-disjoint and their volumes summing to the
    /// zone volume (relative tolerance [`TILING_TOLERANCE`]). Degenerate
    /// zone dimensions (zero width) are ignored for the volume checks.
    pub fn new(working_zone: HyperRectangle, partitions: Vec<Partition>) -> Result<Self> {
        if partitions.is_empty() {
            return Err(Error::Validation("partition set is empty".into()));
        }
        let mut ids: Vec<usize> = partitions.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("partition ids are not unique".into()));
        }
        for p in &partitions {
            if p.bounds.dim() != working_zone.dim() {
                return Err(Error::Validation(format!(
                    "partition {} has dimension {}, zone has {}",
                    p.id,
                    p.bounds.dim(),
                    working_zone.dim()
                )));
            }
            if !working_zone.contains(&p.bounds)? {
                return Err(Error::Validation(format!("partition {} is not inside the working zone", p.id)));
            }
        }
        let live: Vec<usize> = (0..working_zone.dim()).filter(|&k| working_zone.side(k) > 0.0).collect();
        let vol = |b: &HyperRectangle| live.iter().map(|&k| b.side(k)).product::<f64>();
        let zone_vol = vol(&working_zone);
        let sum: f64 = partitions.iter().map(|p| vol(&p.bounds)).sum();
        if (sum - zone_vol).abs() > TILING_TOLERANCE * zone_vol.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::Validation(format!(
                "partition volumes sum to {sum}, zone volume is {zone_vol}"
            )));
        }
        for (i, a) in partitions.iter().enumerate() {
            for b in &partitions[i + 1..] {
                let overlap = live.iter().all(|&k| {
                    a.bounds.upper()[k].min(b.bounds.upper()[k]) > a.bounds.lower()[k].max(b.bounds.lower()[k])
                });
                if overlap {
                    return Err(Error::Validation(format!("partitions {} and {} overlap", a.id, b.id)));
                }
            }
        }
        Ok(Self {
            working_zone,
            partitions,
        })
    }

    pub fn working_zone(&self) -> &HyperRectangle {
        &self.working_zone
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.working_zone.dim()
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.partitions.iter().map(|p| p.id)
    }

    /// Index (not id) of the partition with the given id.
    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.partitions.iter().position(|p| p.id == id)
    }

    /// Half-open membership of `x` in cell `idx`.
    pub fn cell_contains(&self, idx: usize, x: &[f64]) -> bool {
        let b = &self.partitions[idx].bounds;
        let zu = self.working_zone.upper();
        (0..b.dim()).all(|k| {
            let (l, u) = (b.lower()[k], b.upper()[k]);
            l <= x[k] && (x[k] < u || (x[k] == u && u == zu[k]))
        })
    }

    /// Index of the unique cell containing `x`, or `None` outside the zone.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        (0..self.len()).find(|&i| self.cell_contains(i, x))
    }

    /// Whether the closed box `b` meets the half-open cell `idx`.
    pub fn cell_meets(&self, idx: usize, b: &HyperRectangle) -> bool {
        let cell = &self.partitions[idx].bounds;
        let zu = self.working_zone.upper();
        (0..cell.dim()).all(|k| {
            let (l, u) = (cell.lower()[k], cell.upper()[k]);
            b.upper()[k] >= l && (b.lower()[k] < u || (u == zu[k] && b.lower()[k] <= u))
        })
    }

    pub(crate) fn to_record(&self) -> PartitionSetRecord {
        PartitionSetRecord {
            working_zone: self.working_zone.clone(),
            partitions: self
                .partitions
                .iter()
                .map(|p| PartitionRecord {
                    id: p.id,
                    lower: p.bounds.lower().to_vec(),
                    upper: p.bounds.upper().to_vec(),
                })
                .collect(),
        }
    }

    pub(crate) fn from_record(rec: PartitionSetRecord) -> Result<Self> {
        let parts = rec
            .partitions
            .into_iter()
            .map(|p| Ok(Partition::new(p.id, HyperRectangle::new(p.lower, p.upper)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rec.working_zone, parts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("partition set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_record(error::from_json_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        error::write_file(path.as_ref(), &(self.to_json() + "\n"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&error::read_file(path.as_ref())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MePartitionConfig {
    /// Minimum entropy gain, in bits, for a split to be kept.
    pub entropy_threshold: f64,
    /// Cells whose longest side is below this are no longer split.
    pub min_length: f64,
}

impl MePartitionConfig {
    pub fn new(entropy_threshold: f64, min_length: f64) -> Result<Self> {
        let cfg = Self {
            entropy_threshold,
            min_length,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.entropy_threshold > 0.0) || !self.entropy_threshold.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "entropy threshold must be positive, got {}",
                self.entropy_threshold
            )));
        }
        if !(self.min_length > 0.0) || !self.min_length.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "minimum partition length must be positive, got {}",
                self.min_length
            )));
        }
        Ok(())
    }
}

/// `H = -Σ p log2 p` over the empirical distribution of `counts`.
pub fn shannon_entropy(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::UndefinedEntropy);
    }
    let n = total as f64;
    Ok(counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum())
}

/// Entropy gained by splitting a cell holding `n1 + n2` samples into halves
/// holding `n1` and `n2`:
/// `[n1 log2((n1+n2)/n1) + n2 log2((n1+n2)/n2)] / (n1+n2)`, with empty halves
/// contributing zero.
pub fn bisection_gain(n1: usize, n2: usize) -> f64 {
    let n = (n1 + n2) as f64;
    let term = |c: usize| if c == 0 { 0.0 } else { c as f64 * (n / c as f64).log2() };
    (term(n1) + term(n2)) / n
}

struct Cell {
    seq: usize,
    bounds: HyperRectangle,
    longest: f64,
    dim: usize,
    samples: Vec<usize>,
}

impl Cell {
    fn new(seq: usize, bounds: HyperRectangle, samples: Vec<usize>) -> Self {
        let (longest, dim) = bounds.longest_side();
        Self {
            seq,
            bounds,
            longest,
            dim,
            samples,
        }
    }
}

// Heap order: longest side first, then lowest sequence id, then lowest dimension.
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.longest
            .total_cmp(&other.longest)
            .then_with(|| other.seq.cmp(&self.seq))
            .then_with(|| other.dim.cmp(&self.dim))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

/// Partitions `working_zone` by entropy-gated midpoint bisection.
///
/// Only sampled states inside the (closed) zone are counted. The returned
/// cells are ordered by their lower corner (lexicographically) and numbered
/// from 1.
pub fn me_partition(traces: &TraceSet, working_zone: &HyperRectangle, cfg: &MePartitionConfig) -> Result<PartitionSet> {
    cfg.validate()?;
    if working_zone.dim() != traces.state_dim() {
        return Err(Error::dims("working zone", traces.state_dim(), working_zone.dim()));
    }
    if working_zone.dim() == 0 || !working_zone.is_finite() {
        return Err(Error::InvalidInput("working zone must be a finite box of positive dimension".into()));
    }
    let points: Vec<&[f64]> = traces.states().filter(|x| working_zone.contains_point(x)).collect();
    if points.is_empty() {
        return Err(Error::CannotPartition("no sampled state lies inside the working zone".into()));
    }

    let mut next_seq = 0;
    let mut active = BinaryHeap::new();
    active.push(Cell::new(next_seq, working_zone.clone(), (0..points.len()).collect()));
    next_seq += 1;
    let mut retired = Vec::new();

    while let Some(cell) = active.pop() {
        if cell.longest < cfg.min_length {
            active.push(cell);
            break;
        }
        let k = cell.dim;
        let (lo_box, hi_box) = cell.bounds.bisect(k);
        let mid = lo_box.upper()[k];
        let (lo, hi): (Vec<usize>, Vec<usize>) = cell.samples.iter().partition(|&&i| points[i][k] < mid);
        if bisection_gain(lo.len(), hi.len()) >= cfg.entropy_threshold {
            active.push(Cell::new(next_seq, lo_box, lo));
            active.push(Cell::new(next_seq + 1, hi_box, hi));
            next_seq += 2;
        } else {
            retired.push(cell.bounds);
        }
    }

    let mut boxes: Vec<HyperRectangle> = retired.into_iter().chain(active.into_iter().map(|c| c.bounds)).collect();
    boxes.sort_by(|a, b| {
        a.lower()
            .iter()
            .zip(b.lower())
            .map(|(x, y)| x.total_cmp(y))
            .chain(a.upper().iter().zip(b.upper()).map(|(x, y)| x.total_cmp(y)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    });
    let parts = boxes
        .into_iter()
        .enumerate()
        .map(|(i, b)| Partition::new(i + 1, b))
        .collect();
    PartitionSet::new(working_zone.clone(), parts)
}
