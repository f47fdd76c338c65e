//! A bundled 2-D vector field with two affine regimes, used as a stand-in
//! for recorded handwriting demonstrations.
//!
//! `x1' = 0.95 x1 + 0.1 |x2|`, `x2' = 0.9 x2`. The kink along `x2 = 0` bends
//! trajectories into an angle shape before they settle at the origin.

use crate::error::Result;
use crate::nnmodel::{Activation, FeedForwardNetwork, Layer};
use crate::reach::HyperRectangle;
use crate::traces::{simulate_seeded, TraceSet};

/// Exact ReLU encoding of the angle field.
pub fn angle_field() -> FeedForwardNetwork {
    let hidden = Layer::new(
        vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
        vec![0.0; 4],
        Activation::Relu,
    )
    .expect("hidden layer shape");
    let out = Layer::new(
        vec![vec![0.95, -0.95, 0.1, 0.1], vec![0.0, 0.0, 0.9, -0.9]],
        vec![0.0; 2],
        Activation::Identity,
    )
    .expect("output layer shape");
    FeedForwardNetwork::new(vec![hidden, out]).expect("layers chain")
}

/// The point every trajectory converges to.
pub fn angle_attractor() -> [f64; 2] {
    [0.0, 0.0]
}

/// Box that demonstrations start from.
pub fn angle_initial_box() -> HyperRectangle {
    HyperRectangle::new(vec![-1.0, -1.0], vec![-0.6, 1.0]).expect("valid box")
}

/// `count` demonstrations of length `horizon + 1` from the angle field.
pub fn angle_demonstrations(count: usize, horizon: usize, seed: u64) -> Result<TraceSet> {
    simulate_seeded(&angle_field(), &angle_initial_box(), count, None, horizon, seed)
}
