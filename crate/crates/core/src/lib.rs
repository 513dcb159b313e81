//! Online influence maximization under the linear threshold model with
//! node-level feedback.

pub mod bandit;
pub mod combinatorics;
pub mod diffusion;
pub mod error;
pub mod gom;
pub mod graph;
pub mod harness;
pub mod rng;
pub mod spread;
pub mod wcim;

pub use error::{Error, Result};
