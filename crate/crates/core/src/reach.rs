//! Boxes and set-valued evaluation of feed-forward networks.
//!
//! Reachable sets are over-approximated with interval bound propagation:
//! each affine row is bounded term by term, picking the lower or upper input
//! bound according to the sign of the weight, and ReLU is applied to both
//! bounds. The affine bound is accumulated in the same order as
//! [`FeedForwardNetwork::evaluate`], and IEEE rounding is monotone, so every
//! point evaluation of a box member lands inside the computed box exactly,
//! not merely up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nnmodel::{Activation, FeedForwardNetwork};

/// Axis-aligned closed box `[lower, upper]`. Zero-dimensional boxes are
/// allowed and stand for an empty input set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct HyperRectangle {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct RawBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<RawBox> for HyperRectangle {
    type Error = Error;
    fn try_from(raw: RawBox) -> Result<Self> {
        HyperRectangle::new(raw.lower, raw.upper)
    }
}

impl HyperRectangle {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::dims("box upper bound", lower.len(), upper.len()));
        }
        for (k, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(Error::InvalidInput(format!("box bound {k} is NaN")));
            }
            if l > u {
                return Err(Error::InvalidInput(format!(
                    "box dimension {k} has lower {l} > upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The degenerate box `[p, p]`.
    pub fn point(p: &[f64]) -> Self {
        Self {
            lower: p.to_vec(),
            upper: p.to_vec(),
        }
    }

    /// Zero-dimensional box, used when a system has no external input.
    pub fn empty_input() -> Self {
        Self {
            lower: Vec::new(),
            upper: Vec::new(),
        }
    }

    /// Smallest box containing all points. Returns `None` for an empty iterator.
    pub fn hull_of_points<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut lower = first.to_vec();
        let mut upper = first.to_vec();
        for p in iter {
            for k in 0..lower.len() {
                lower[k] = lower[k].min(p[k]);
                upper[k] = upper[k].max(p[k]);
            }
        }
        Some(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    pub fn side(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    /// Longest side and its dimension; ties go to the lowest dimension.
    pub fn longest_side(&self) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..self.dim() {
            if self.side(k) > best.0 {
                best = (self.side(k), k);
            }
        }
        best
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|k| self.side(k)).product()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Splits at the midpoint of dimension `k`; both halves share the cut face.
    pub fn bisect(&self, k: usize) -> (Self, Self) {
        let mid = 0.5 * (self.lower[k] + self.upper[k]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[k] = mid;
        right.lower[k] = mid;
        (left, right)
    }

    /// Cartesian product `self × other` (state box times input box).
    pub fn product(&self, other: &HyperRectangle) -> Self {
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        lower.extend_from_slice(&other.lower);
        upper.extend_from_slice(&other.upper);
        Self { lower, upper }
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (l, u))| l <= x && x <= u)
    }

    /// Closed-box intersection: touching faces count.
    pub fn intersects(&self, other: &HyperRectangle) -> Result<bool> {
        self.same_dim(other)?;
        Ok((0..self.dim()).all(|k| self.lower[k].max(other.lower[k]) <= self.upper[k].min(other.upper[k])))
    }

    /// `inner ⊆ self`, componentwise and with closed faces.
    pub fn contains(&self, inner: &HyperRectangle) -> Result<bool> {
        self.same_dim(inner)?;
        Ok((0..self.dim()).all(|k| self.lower[k] <= inner.lower[k] && inner.upper[k] <= self.upper[k]))
    }

    /// Grows every face outward by `epsilon`.
    pub fn inflate(&self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "inflation radius must be nonnegative, got {epsilon}"
            )));
        }
        Ok(Self {
            lower: self.lower.iter().map(|l| l - epsilon).collect(),
            upper: self.upper.iter().map(|u| u + epsilon).collect(),
        })
    }

    fn same_dim(&self, other: &HyperRectangle) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidArgument(format!(
                "box dimensions differ: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}

/// Over-approximates `{ net(x) | x ∈ input_box }` with a box.
pub fn interval_evaluate(net: &FeedForwardNetwork, input_box: &HyperRectangle) -> Result<HyperRectangle> {
    if input_box.dim() != net.input_dim() {
        return Err(Error::dims("interval input", net.input_dim(), input_box.dim()));
    }
    let mut lower = input_box.lower.clone();
    let mut upper = input_box.upper.clone();
    for layer in net.layers() {
        let mut next_lower = Vec::with_capacity(layer.width());
        let mut next_upper = Vec::with_capacity(layer.width());
        for (row, &b) in layer.weights().iter().zip(layer.bias()) {
            let mut lo = b;
            let mut hi = b;
            for ((&w, &l), &u) in row.iter().zip(&lower).zip(&upper) {
                if w >= 0.0 {
                    lo += w * l;
                    hi += w * u;
                } else {
                    lo += w * u;
                    hi += w * l;
                }
            }
            if layer.activation() == Activation::Relu {
                lo = lo.max(0.0);
                hi = hi.max(0.0);
            }
            next_lower.push(lo);
            next_upper.push(hi);
        }
        lower = next_lower;
        upper = next_upper;
    }
    Ok(HyperRectangle { lower, upper })
}

/// Boxes `X(0) … X(K)` bounding the k-step reachable sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachTube {
    steps: Vec<HyperRectangle>,
}

impl ReachTube {
    pub fn steps(&self) -> &[HyperRectangle] {
        &self.steps
    }

    pub fn horizon(&self) -> usize {
        self.steps.len() - 1
    }

    /// Membership in the union `X(0) ∪ … ∪ X(K)`.
    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.steps.iter().any(|b| b.contains_point(p))
    }

    /// Bounding box of the whole tube.
    pub fn hull(&self) -> HyperRectangle {
        let mut hull = self.steps[0].clone();
        for b in &self.steps[1..] {
            for k in 0..hull.dim() {
                hull.lower[k] = hull.lower[k].min(b.lower[k]);
                hull.upper[k] = hull.upper[k].max(b.upper[k]);
            }
        }
        hull
    }
}

/// Iterates `X(k+1) = [Φ](X(k) × U)` for `horizon` steps.
pub fn reach_tube(
    net: &FeedForwardNetwork,
    initial_box: &HyperRectangle,
    input_set: &HyperRectangle,
    horizon: usize,
) -> Result<ReachTube> {
    if initial_box.dim() != net.output_dim() {
        return Err(Error::dims("initial state box", net.output_dim(), initial_box.dim()));
    }
    if initial_box.dim() + input_set.dim() != net.input_dim() {
        return Err(Error::dims(
            "state + input dimension",
            net.input_dim(),
            initial_box.dim() + input_set.dim(),
        ));
    }
    let mut steps = Vec::with_capacity(horizon + 1);
    steps.push(initial_box.clone());
    for k in 0..horizon {
        let next = interval_evaluate(net, &steps[k].product(input_set))?;
        steps.push(next);
    }
    Ok(ReachTube { steps })
}
