//! Deterministic path loss and the cooperative power-summing decode rule.
//!
//! Received power from a transmitter at distance `d` is `p_t * d^-alpha`;
//! a set of simultaneous transmitters reaches a node when the summed power
//! meets `tau`. There is no fading and no interference.

use crate::error::{Error, Result};
use crate::network::{ModelParams, Point};
use crate::scalar::{CompensatedSum, Real};

/// Path gain of a single link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathGain<T> {
    Finite(T),
    /// Zero distance: infinite gain.
    Saturated,
}

/// Accumulated received power. `saturated` is set when some contributing
/// transmitter sits at zero distance.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PowerSum<T> {
    pub value: T,
    pub saturated: bool,
}

impl<T: Real> PowerSum<T> {
    pub fn meets(&self, tau: T) -> bool {
        self.saturated || self.value >= tau
    }
}

/// `d^-alpha`, or [`PathGain::Saturated`] at `d == 0`.
pub fn path_gain<T: Real>(d: T, alpha: T) -> Result<PathGain<T>> {
    if d.is_nan() || d < T::zero() {
        return Err(Error::InvalidParameter(format!("distance must be >= 0, got {d}")));
    }
    if d == T::zero() {
        return Ok(PathGain::Saturated);
    }
    Ok(PathGain::Finite(d.powf(-alpha)))
}

/// Gain from a squared distance, `(d^2)^(-alpha/2)`; `None` at zero.
#[inline]
pub(crate) fn gain_from_dist_sq<T: Real>(dist_sq: T, neg_half_alpha: T) -> Option<T> {
    if dist_sq == T::zero() {
        None
    } else {
        Some(dist_sq.powf(neg_half_alpha))
    }
}

/// `r = (p_t / tau)^(1/alpha)`, the range of a lone transmitter.
pub fn transmission_radius<T: Real>(params: &ModelParams<T>) -> T {
    (params.p_t / params.tau).powf(params.alpha.recip())
}

/// Total power at `target` when every point in `sources` transmits.
/// Summed in the order given, with compensation.
pub fn received_power<T: Real>(sources: &[Point<T>], target: Point<T>, params: &ModelParams<T>) -> PowerSum<T> {
    let neg_half_alpha = -params.alpha / T::lit(2.0);
    let mut acc = CompensatedSum::new();
    let mut saturated = false;
    for s in sources {
        match gain_from_dist_sq(s.dist_sq(&target), neg_half_alpha) {
            Some(g) => acc.add(g),
            None => saturated = true,
        }
    }
    PowerSum { value: params.p_t * acc.value(), saturated }
}

/// Whether `sources` transmitting together reach `target`.
pub fn can_decode<T: Real>(sources: &[Point<T>], target: Point<T>, params: &ModelParams<T>) -> bool {
    received_power(sources, target, params).meets(params.tau)
}
