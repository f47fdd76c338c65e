//! Feed-forward networks used as discrete-time dynamics `x(k+1) = Φ(x(k), u(k))`.
//!
//! Networks are immutable once built. A network file is plain JSON:
//!
//! ```json
//! {"input_dim": 2, "output_dim": 1,
//!  "layers": [{"weights": [[1.0, -1.0]], "bias": [0.0], "activation": "relu"}]}
//! ```
//!
//! Weights are written with the shortest decimal representation that
//! parses back to the same `f64`, so a save/load cycle is bit-exact.

use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{self, Error, Result};
use crate::traces::TraceSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Identity => v,
        }
    }
}

/// One affine map followed by an elementwise activation. `weights` holds
/// one row per output neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: Activation,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        let layer = Self {
            weights,
            bias,
            activation,
        };
        layer.validate().map_err(Error::Validation)?;
        Ok(layer)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.weights.is_empty() {
            return Err("weight matrix has no rows".into());
        }
        let cols = self.weights[0].len();
        if cols == 0 {
            return Err("weight matrix has no columns".into());
        }
        if let Some(r) = self.weights.iter().position(|row| row.len() != cols) {
            return Err(format!("weight row {r} has {} columns, expected {cols}", self.weights[r].len()));
        }
        if self.bias.len() != self.weights.len() {
            return Err(format!(
                "bias length {} does not match {} weight rows",
                self.bias.len(),
                self.weights.len()
            ));
        }
        Ok(())
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Number of output neurons.
    pub fn width(&self) -> usize {
        self.weights.len()
    }

    pub fn fan_in(&self) -> usize {
        self.weights[0].len()
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        // Accumulation order (bias first, then columns left to right) is
        // shared with reach::interval_evaluate.
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, &b)| {
                let mut acc = b;
                for (&w, &xi) in row.iter().zip(x) {
                    acc += w * xi;
                }
                self.activation.apply(acc)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedForwardNetwork {
    input_dim: usize,
    output_dim: usize,
    layers: Vec<Layer>,
}

#[derive(Deserialize)]
struct NetworkFile {
    input_dim: usize,
    output_dim: usize,
    layers: Vec<Layer>,
}

impl FeedForwardNetwork {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::Validation("network has no layers".into()))?;
        let input_dim = first.fan_in();
        let output_dim = layers[layers.len() - 1].width();
        let net = Self {
            input_dim,
            output_dim,
            layers,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Validation("network has no layers".into()));
        }
        let mut fan_in = self.input_dim;
        for (i, layer) in self.layers.iter().enumerate() {
            layer
                .validate()
                .map_err(|msg| Error::Validation(format!("layer {i}: {msg}")))?;
            if layer.fan_in() != fan_in {
                return Err(Error::Validation(format!(
                    "layer {i}: weight matrix has {} columns, expected {fan_in}",
                    layer.fan_in()
                )));
            }
            fan_in = layer.width();
        }
        if fan_in != self.output_dim {
            return Err(Error::Validation(format!(
                "last layer has {fan_in} rows, but output_dim is {}",
                self.output_dim
            )));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn evaluate(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim {
            return Err(Error::dims("network input", self.input_dim, input.len()));
        }
        let mut x = input.to_vec();
        for layer in &self.layers {
            x = layer.forward(&x);
        }
        Ok(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = error::from_json_str(text)?;
        let net = Self {
            input_dim: file.input_dim,
            output_dim: file.output_dim,
            layers: file.layers,
        };
        net.validate()?;
        Ok(net)
    }
}

pub fn save_network(net: &FeedForwardNetwork, path: impl AsRef<Path>) -> Result<()> {
    let mut text = net.to_json();
    text.push('\n');
    error::write_file(path.as_ref(), &text)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<FeedForwardNetwork> {
    FeedForwardNetwork::from_json(&error::read_file(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElmTrainConfig {
    pub hidden_width: usize,
    pub ridge_lambda: f64,
    pub seed: u64,
    /// Hidden weights and biases are drawn from `U[-scale, scale]`.
    pub hidden_weight_scale: f64,
}

impl Default for ElmTrainConfig {
    fn default() -> Self {
        Self {
            hidden_width: 20,
            ridge_lambda: 1e-6,
            seed: 0,
            hidden_weight_scale: 1.0,
        }
    }
}

impl ElmTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_width == 0 {
            return Err(Error::InvalidArgument("hidden_width must be at least 1".into()));
        }
        if !(self.ridge_lambda >= 0.0) || !self.ridge_lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ridge_lambda must be a finite nonnegative number, got {}",
                self.ridge_lambda
            )));
        }
        if !(self.hidden_weight_scale > 0.0) || !self.hidden_weight_scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "hidden_weight_scale must be positive, got {}",
                self.hidden_weight_scale
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub pairs: usize,
    /// Root-mean-square one-step prediction error over all training pairs and state components.
    pub rmse: f64,
}

#[derive(Debug, Clone)]
pub struct TrainedElm {
    pub network: FeedForwardNetwork,
    pub report: TrainReport,
}

/// Trains an extreme learning machine on the one-step pairs
/// `[x(k); u(k)] -> x(k+1)` of every trace.
///
/// The hidden ReLU layer is random (seeded); the identity readout is the
/// ridge solution of the normal equations `(AᵀA + λD) W = AᵀY`, where `A`
/// is the hidden activation matrix augmented with a ones column and `D`
/// leaves the readout bias unpenalized.
pub fn train_elm(traces: &TraceSet, cfg: &ElmTrainConfig) -> Result<TrainedElm> {
    cfg.validate()?;
    if traces.is_empty() {
        return Err(Error::InvalidInput("cannot train on an empty trace set".into()));
    }
    if let Some(t) = traces.traces().iter().find(|t| t.len() < 2) {
        return Err(Error::InvalidInput(format!(
            "trace {} has {} sample(s); at least 2 are needed for a training pair",
            t.id(),
            t.len()
        )));
    }
    let n_in = traces.state_dim() + traces.input_dim();
    let n_out = traces.state_dim();
    let hidden = cfg.hidden_width;
    let unknowns = hidden + 1;

    let (inputs, targets): (Vec<Vec<f64>>, Vec<Vec<f64>>) = traces.pairs().unzip();
    let pairs = inputs.len();
    if cfg.ridge_lambda == 0.0 && pairs < unknowns {
        return Err(Error::IllPosedRegression {
            pairs,
            unknowns,
            lambda: cfg.ridge_lambda,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let s = cfg.hidden_weight_scale;
    let mut hidden_w = Vec::with_capacity(hidden);
    let mut hidden_b = Vec::with_capacity(hidden);
    for _ in 0..hidden {
        hidden_w.push((0..n_in).map(|_| rng.random_range(-s..=s)).collect::<Vec<f64>>());
        hidden_b.push(rng.random_range(-s..=s));
    }
    let hidden_layer = Layer::new(hidden_w, hidden_b, Activation::Relu)?;

    let mut a = DMatrix::<f64>::zeros(pairs, unknowns);
    let mut y = DMatrix::<f64>::zeros(pairs, n_out);
    for (r, (input, target)) in inputs.iter().zip(&targets).enumerate() {
        let h = hidden_layer.forward(input);
        for (c, v) in h.into_iter().enumerate() {
            a[(r, c)] = v;
        }
        a[(r, hidden)] = 1.0;
        for (c, &v) in target.iter().enumerate() {
            y[(r, c)] = v;
        }
    }
    let mut gram = a.transpose() * &a;
    for d in 0..hidden {
        gram[(d, d)] += cfg.ridge_lambda;
    }
    let rhs = a.transpose() * &y;
    let solution = gram
        .cholesky()
        .ok_or(Error::IllPosedRegression {
            pairs,
            unknowns,
            lambda: cfg.ridge_lambda,
        })?
        .solve(&rhs);

    let out_w: Vec<Vec<f64>> = (0..n_out)
        .map(|o| (0..hidden).map(|h| solution[(h, o)]).collect())
        .collect();
    let out_b: Vec<f64> = (0..n_out).map(|o| solution[(hidden, o)]).collect();
    let network = FeedForwardNetwork::new(vec![hidden_layer, Layer::new(out_w, out_b, Activation::Identity)?])?;

    let mut sq = 0.0;
    for (input, target) in inputs.iter().zip(&targets) {
        let pred = network.evaluate(input)?;
        sq += pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>();
    }
    let rmse = (sq / (pairs * n_out) as f64).sqrt();
    if !rmse.is_finite() {
        return Err(Error::IllPosedRegression {
            pairs,
            unknowns,
            lambda: cfg.ridge_lambda,
        });
    }

    Ok(TrainedElm {
        network,
        report: TrainReport { pairs, rmse },
    })
}
