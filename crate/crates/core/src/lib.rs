//! Abstraction of neural-network dynamical systems into finite transition
//! systems, with CTL model checking of the result.

pub mod ctl;
pub mod error;
pub mod nnmodel;
pub mod partition;
pub mod reach;
pub mod synthetic;
pub mod traces;
pub mod transition;

pub use error::{Error, Result};
