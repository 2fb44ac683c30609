//! Cooperative broadcast in extended random wireless networks.
//!
//! Nodes form a Poisson process on a line or in the plane, with a source
//! pinned at the origin. Decoded nodes transmit together and their powers
//! add at each receiver. The crate provides:
//!
//! - [`network`]: sampling, geometry and a replayable text format;
//! - [`propagation`]: path loss and the power-summing decode rule;
//! - [`broadcast`]: the round-by-round broadcast engine and its oracle;
//! - [`bounds`]: the level partitions, Chernoff product lower bounds and
//!   the tail-power machinery behind the zero/nonzero dichotomy;
//! - [`continuum`]: the deterministic continuum frontier iteration;
//! - [`harness`]: seeded Monte Carlo estimation, sweeps and regime labels.
//!
//! Geometry and numerics are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod bounds;
pub mod broadcast;
pub mod continuum;
pub mod error;
pub mod harness;
pub mod network;
pub mod propagation;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use network::{Dimension, Window};
pub use scalar::{CompensatedSum, Real};

pub type ModelParams = network::ModelParams<f64>;
pub type ModelParams32 = network::ModelParams<f32>;
pub type Point = network::Point<f64>;
pub type Point32 = network::Point<f32>;
pub type Realization = network::Realization<f64>;
pub type Realization32 = network::Realization<f32>;
pub type BroadcastOutcome = broadcast::BroadcastOutcome<f64>;
pub type BroadcastOutcome32 = broadcast::BroadcastOutcome<f32>;
pub type PowerSum = propagation::PowerSum<f64>;
pub type ContinuumState = continuum::ContinuumState<f64>;
pub type ContinuumState32 = continuum::ContinuumState<f32>;
