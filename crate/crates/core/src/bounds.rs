//! Constructive bounds on the broadcast probability.
//!
//! Lower bounds: the line is cut into intervals `L_k = (s_{k-1}, s_k]` with
//! `s_k = k(k+1)/2` (so `|L_k| = k`), the plane into rings `R_k` with outer
//! radius `sqrt(s_k)` (area `pi k`). If every level `k <= n` holds enough
//! nodes, broadcast provably reaches level `n + 1`. Level counts are
//! independent Poisson variables, so the probability that every level is
//! populated is an exact finite head times Chernoff factors times a
//! truncated tail.
//!
//! Upper-bound machinery: when `alpha` exceeds the dimension, the expected
//! power arriving from beyond distance `d` is finite and shrinks with `d`,
//! so a large enough empty neighbourhood isolates a node with high
//! probability.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::broadcast::run_broadcast;
use crate::error::{Error, Result};
use crate::network::{Dimension, ModelParams, Point, Realization};
use crate::scalar::Real;

/// Largest level index searched for the Chernoff starting level.
pub const MAX_LEVEL_SEARCH: u64 = 50_000_000;

/// Default lower bound on the truncated tail factor.
pub const DEFAULT_TAIL_TARGET: f64 = 0.99;

/// Level partition of the line or the plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionSpec {
    pub dimension: Dimension,
}

impl PartitionSpec {
    pub fn new(dimension: Dimension) -> Self {
        Self { dimension }
    }

    /// `s_k = k(k+1)/2`: the right end of `L_k` in 1-D, the squared outer
    /// radius of `R_k` in 2-D.
    pub fn cumulative(k: u64) -> f64 {
        (k as f64) * (k as f64 + 1.0) / 2.0
    }

    /// Outer boundary of level `k`: `s_k` on the line, `sqrt(s_k)` in the plane.
    pub fn boundary(&self, k: u64) -> f64 {
        match self.dimension {
            Dimension::One => Self::cumulative(k),
            Dimension::Two => Self::cumulative(k).sqrt(),
        }
    }

    /// Length (1-D) or area (2-D) of level `k`.
    pub fn level_measure(&self, k: u64) -> f64 {
        match self.dimension {
            Dimension::One => Self::cumulative(k) - Self::cumulative(k - 1),
            Dimension::Two => PI * (Self::cumulative(k) - Self::cumulative(k - 1)),
        }
    }

    /// Level containing `p`, or `None` for the origin and (in 1-D) the
    /// negative half-line.
    pub fn level_of<T: Real>(&self, p: Point<T>) -> Option<u64> {
        let v = match self.dimension {
            Dimension::One => p.x.as_f64(),
            Dimension::Two => p.norm_sq().as_f64(),
        };
        if v.is_nan() || v <= 0.0 {
            return None;
        }
        // smallest k with s_k >= v, then repair rounding
        let mut k = ((-1.0 + (1.0 + 8.0 * v).sqrt()) / 2.0).ceil().max(1.0) as u64;
        while k > 1 && Self::cumulative(k - 1) >= v {
            k -= 1;
        }
        while Self::cumulative(k) < v {
            k += 1;
        }
        Some(k)
    }

    /// Mean node count of level `k` at density `lambda`.
    pub fn level_mean(&self, lambda: f64, k: u64) -> f64 {
        lambda * self.level_measure(k)
    }
}

/// Ceiling that treats values within a few ulps of an integer as that
/// integer, so exact powers such as `2^2 * 3` do not round up to 13.
fn snapped_ceil(v: f64) -> u64 {
    let nearest = v.round();
    if (v - nearest).abs() <= 8.0 * f64::EPSILON * nearest.abs().max(1.0) {
        nearest as u64
    } else {
        v.ceil() as u64
    }
}

/// Minimum node count of level `k` for the level event to hold:
/// `ceil((k+1)^alpha)` on the line; in the plane `ceil(2^alpha (1 + 2^(alpha/2)))`
/// for `k = 1` and `ceil(2^alpha (k+1)^(alpha/2))` for `k >= 2`.
pub fn required_nodes(dimension: Dimension, k: u64, alpha: f64) -> Result<u64> {
    if k < 1 {
        return Err(Error::InvalidParameter("level index must be >= 1".into()));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let v = match dimension {
        Dimension::One => ((k + 1) as f64).powf(alpha),
        Dimension::Two if k == 1 => 2f64.powf(alpha) * (1.0 + 2f64.powf(alpha / 2.0)),
        Dimension::Two => 2f64.powf(alpha) * ((k + 1) as f64).powf(alpha / 2.0),
    };
    Ok(snapped_ceil(v))
}

/// Per-level node counts for levels `1..=up_to` (the source excluded).
pub fn level_counts<T: Real>(r: &Realization<T>, up_to: u64) -> Vec<u64> {
    let spec = PartitionSpec::new(r.dimension());
    let mut counts = vec![0u64; up_to as usize];
    for (i, p) in r.points().iter().enumerate() {
        if i == r.source_index() {
            continue;
        }
        if let Some(k) = spec.level_of(*p) {
            if k <= up_to {
                counts[(k - 1) as usize] += 1;
            }
        }
    }
    counts
}

fn check_coverage<T: Real>(r: &Realization<T>, up_to: u64) -> Result<()> {
    if let Some(extent) = r.extent() {
        let required = PartitionSpec::new(r.dimension()).boundary(up_to + 1);
        if extent < required {
            return Err(Error::WindowTooSmall { extent, level: up_to + 1, required });
        }
    }
    Ok(())
}

/// Whether each level event `B_1..B_up_to` holds. The sampling window (when
/// known) has to cover level `up_to + 1`.
pub fn check_events<T: Real>(r: &Realization<T>, alpha: f64, up_to: u64) -> Result<Vec<bool>> {
    check_coverage(r, up_to)?;
    let counts = level_counts(r, up_to);
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| Ok(c >= required_nodes(r.dimension(), i as u64 + 1, alpha)?))
        .collect()
}

/// Verdict of [`sufficiency_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// Some level event fails, so the construction says nothing.
    HypothesisNotMet { level: u64 },
    /// Every level event holds and the engine decoded every covered node.
    Confirmed,
    /// Every level event holds but node `node` in the covered region was
    /// left undecoded.
    Violated { node: usize },
}

/// Checks the construction's implication on one realization: if levels
/// `1..=n` are all populated, broadcast reaches every node of levels
/// `1..=n+1` (the positive half-line in 1-D, the disk in 2-D).
pub fn sufficiency_witness<T: Real>(r: &Realization<T>, params: &ModelParams<T>, n: u64) -> Result<Witness> {
    let alpha = params.alpha.as_f64();
    let critical = match r.dimension() {
        Dimension::One => 1.0,
        Dimension::Two => 2.0,
    };
    if alpha > critical {
        return Err(Error::Inapplicable(format!("alpha {alpha} exceeds {critical} in {}-D", r.dimension())));
    }
    if params.p_t != params.tau {
        return Err(Error::Inapplicable("construction assumes p_t == tau".into()));
    }
    let events = check_events(r, alpha, n)?;
    if let Some(i) = events.iter().position(|&e| !e) {
        return Ok(Witness::HypothesisNotMet { level: i as u64 + 1 });
    }
    let outcome = run_broadcast(r, params)?;
    let spec = PartitionSpec::new(r.dimension());
    let violated = r
        .points()
        .iter()
        .enumerate()
        .find(|&(i, p)| spec.level_of(*p).is_some_and(|k| k <= n + 1) && !outcome.is_decoded(i));
    Ok(match violated {
        Some((node, _)) => Witness::Violated { node },
        None => Witness::Confirmed,
    })
}

/// `sum_{k=1}^{n+1} k^beta >= (sum_{k=1}^{n+1} k)^beta` with `beta = alpha`
/// (1-D) or `alpha / 2` (2-D).
pub fn verify_sum_inequality(dimension: Dimension, n: u64, alpha: f64) -> bool {
    let beta = exponent(dimension, alpha);
    let lhs: crate::scalar::CompensatedSum<f64> = (1..=n + 1).map(|k| (k as f64).powf(beta)).collect();
    lhs.value() >= PartitionSpec::cumulative(n + 1).powf(beta)
}

/// Runs [`verify_sum_inequality`] for every `n` in `1..=n_max` in one
/// pass; returns the first failing `n`.
pub fn sum_inequality_sweep(dimension: Dimension, n_max: u64, alpha: f64) -> Option<u64> {
    let beta = exponent(dimension, alpha);
    let mut lhs = crate::scalar::CompensatedSum::new();
    lhs.add(1.0);
    (1..=n_max).find(|&n| {
        lhs.add(((n + 1) as f64).powf(beta));
        lhs.value() < PartitionSpec::cumulative(n + 1).powf(beta)
    })
}

fn exponent(dimension: Dimension, alpha: f64) -> f64 {
    match dimension {
        Dimension::One => alpha,
        Dimension::Two => alpha / 2.0,
    }
}

fn level_rate(dimension: Dimension, lambda: f64) -> f64 {
    match dimension {
        Dimension::One => lambda,
        Dimension::Two => PI * lambda,
    }
}

/// Checks that `(lambda, alpha)` lies where the lower-bound construction applies.
pub fn lower_bound_applies(dimension: Dimension, lambda: f64, alpha: f64) -> Result<()> {
    if !(lambda.is_finite() && alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda={lambda}, alpha={alpha}")));
    }
    let (critical, min_density) = match dimension {
        Dimension::One => (1.0, 1.0),
        Dimension::Two => (2.0, 4.0 / PI),
    };
    if alpha < critical && lambda > 0.0 || alpha == critical && lambda > min_density {
        return Ok(());
    }
    Err(Error::Inapplicable(if alpha > critical {
        format!("alpha={alpha} > {critical}: broadcast probability is zero in {dimension}-D")
    } else if alpha == critical {
        format!("alpha={alpha} needs lambda > {min_density}, got {lambda}")
    } else {
        format!("lambda must be > 0, got {lambda}")
    }))
}

/// First level `N` whose mean count exceeds its requirement, and the slack
/// `delta` with `(1 - delta) * mean(N) = required(N)`.
pub fn compute_n_delta(dimension: Dimension, lambda: f64, alpha: f64) -> Result<(u64, f64)> {
    lower_bound_applies(dimension, lambda, alpha)?;
    let spec = PartitionSpec::new(dimension);
    for k in 1..=MAX_LEVEL_SEARCH {
        let need = required_nodes(dimension, k, alpha)? as f64;
        let mean = spec.level_mean(lambda, k);
        if mean > need {
            return Ok((k, 1.0 - need / mean));
        }
    }
    Err(Error::Inapplicable(format!("no starting level below {MAX_LEVEL_SEARCH} (lambda={lambda}, alpha={alpha})")))
}

/// `ln k!`: exact summation below 16, Stirling series above.
fn ln_factorial(k: u64) -> f64 {
    if k < 16 {
        return (2..=k).map(|i| (i as f64).ln()).sum();
    }
    let x = k as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + stirling_correction(x)
}

fn stirling_correction(x: f64) -> f64 {
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

/// `ln P(Poisson(mu) = k)` for `mu > 0`, written to avoid cancellation
/// between `k ln mu` and `ln k!` for large arguments.
fn ln_poisson_pmf(mu: f64, k: u64) -> f64 {
    if k < 16 {
        return -mu + k as f64 * mu.ln() - ln_factorial(k);
    }
    let x = k as f64;
    x * ((mu - x) / x).ln_1p() + (x - mu) - 0.5 * (2.0 * PI * x).ln() - stirling_correction(x)
}

/// `P(Poisson(mu) >= m)`, summing pmf terms away from the mode by ratio
/// recurrence so every added term shrinks.
pub fn poisson_tail(mu: f64, m: u64) -> Result<f64> {
    if !(mu.is_finite() && mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("poisson mean must be finite and >= 0, got {mu}")));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if mu == 0.0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    if mf > mu {
        // upper tail, terms decrease from k = m
        let mut term = ln_poisson_pmf(mu, m).exp();
        let mut sum = term;
        let mut k = mf;
        loop {
            term *= mu / (k + 1.0);
            k += 1.0;
            sum += term;
            let ratio = mu / (k + 1.0);
            if term * ratio / (1.0 - ratio) <= 1e-17 * sum || term == 0.0 {
                break;
            }
        }
        Ok(sum.min(1.0))
    } else {
        // complement of the lower tail, terms decrease from k = m - 1 down
        let mut term = ln_poisson_pmf(mu, m - 1).exp();
        let mut sum = term;
        let mut k = mf - 1.0;
        while k > 0.0 {
            term *= k / mu;
            k -= 1.0;
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        Ok((1.0 - sum).max(0.0))
    }
}

/// Which event a [`BoundReport`] bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundEvent {
    /// Broadcast over the positive half-line (1-D).
    #[serde(rename = "one-sided")]
    OneSided,
    /// Broadcast over the whole plane (2-D).
    #[serde(rename = "full")]
    Full,
}

/// Lower bound on the probability that every level event holds, which in
/// turn lower-bounds the broadcast probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dimension: Dimension,
    pub lambda: f64,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: f64,
    #[serde(rename = "K")]
    pub k: u64,
    /// Product of exact Poisson tails over levels `1..N`.
    pub exact_head: f64,
    /// Product of Chernoff factors over levels `N..=K`.
    pub chernoff_body: f64,
    /// Lower bound on the product over levels `> K`.
    pub tail_correction: f64,
    pub total: f64,
    /// Natural log of `total`; stays finite when `total` underflows.
    pub ln_total: f64,
    pub event: BoundEvent,
}

/// `sum_{k > K} q^k` with `q = exp(-c delta^2 / 2)`.
fn tail_mass(rate: f64, delta: f64, k: u64) -> f64 {
    let a = rate * delta * delta / 2.0;
    (-(k as f64 + 1.0) * a).exp() / -(-a).exp_m1()
}

/// Smallest `K >= start` whose tail correction reaches `target`.
pub fn truncation_for(rate: f64, delta: f64, start: u64, target: f64) -> u64 {
    let a = rate * delta * delta / 2.0;
    let allowed = (1.0 - target) * -(-a).exp_m1();
    let guess = ((-allowed.ln() / a).ceil() - 1.0).max(start as f64) as u64;
    let mut k = guess.saturating_sub(2).max(start);
    while 1.0 - tail_mass(rate, delta, k) < target {
        k += 1;
    }
    k
}

/// Lower bound on the broadcast probability, truncated at level `k` (or at
/// the smallest level giving a tail correction of at least 0.99).
pub fn broadcast_lower_bound(dimension: Dimension, lambda: f64, alpha: f64, k: Option<u64>) -> Result<BoundReport> {
    let (n, delta) = compute_n_delta(dimension, lambda, alpha)?;
    let rate = level_rate(dimension, lambda);
    let k = match k {
        Some(k) if k < n => {
            return Err(Error::InvalidParameter(format!("K={k} must be at least N={n}")));
        }
        Some(k) => k,
        None => truncation_for(rate, delta, n, DEFAULT_TAIL_TARGET),
    };
    let tail_correction = (1.0 - tail_mass(rate, delta, k)).max(0.0);
    if tail_correction <= 0.0 {
        return Err(Error::TruncationTooShort {
            k,
            tail_correction,
            suggested: truncation_for(rate, delta, n, f64::EPSILON),
        });
    }

    let spec = PartitionSpec::new(dimension);
    let mut ln_head = 0.0;
    for i in 1..n {
        ln_head += poisson_tail(spec.level_mean(lambda, i), required_nodes(dimension, i, alpha)?)?.ln();
    }
    let ln_body: f64 = (n..=k).map(|j| (-(-rate * j as f64 * delta * delta / 2.0).exp()).ln_1p()).sum();
    let ln_total = ln_head + ln_body + tail_correction.ln();

    Ok(BoundReport {
        dimension,
        lambda,
        alpha,
        n,
        delta,
        k,
        exact_head: ln_head.exp(),
        chernoff_body: ln_body.exp(),
        tail_correction,
        total: ln_total.exp(),
        ln_total,
        event: match dimension {
            Dimension::One => BoundEvent::OneSided,
            Dimension::Two => BoundEvent::Full,
        },
    })
}

fn require_finite_mean(dimension: Dimension, alpha: f64) -> Result<()> {
    let critical = f64::from(dimension.as_u8());
    if alpha > critical {
        Ok(())
    } else {
        Err(Error::Inapplicable(format!(
            "expected far-field power diverges for alpha={alpha} <= {critical} in {dimension}-D"
        )))
    }
}

/// Expected power at a node from all Poisson nodes farther than `d`:
/// one side of the line in 1-D, every direction in 2-D.
pub fn tail_power_mean(dimension: Dimension, lambda: f64, alpha: f64, d: f64) -> Result<f64> {
    require_finite_mean(dimension, alpha)?;
    if !(d > 0.0 && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("need d > 0 and lambda >= 0, got d={d}, lambda={lambda}")));
    }
    Ok(match dimension {
        Dimension::One => lambda * d.powf(1.0 - alpha) / (alpha - 1.0),
        Dimension::Two => 2.0 * PI * lambda * d.powf(2.0 - alpha) / (alpha - 2.0),
    })
}

/// Smallest distance `d` with `tail_power_mean(d) <= epsilon / 2`; by
/// Markov's inequality the far-field power then exceeds 1 with probability
/// below `epsilon / 2` (unit threshold).
pub fn d_star(dimension: Dimension, lambda: f64, alpha: f64, epsilon: f64) -> Result<f64> {
    require_finite_mean(dimension, alpha)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let half = epsilon / 2.0;
    let mut d = match dimension {
        Dimension::One => (lambda / ((alpha - 1.0) * half)).powf(1.0 / (alpha - 1.0)),
        Dimension::Two => (2.0 * PI * lambda / ((alpha - 2.0) * half)).powf(1.0 / (alpha - 2.0)),
    };
    while tail_power_mean(dimension, lambda, alpha, d)? > half {
        d = f64::from_bits(d.to_bits() + 1);
    }
    while d > f64::MIN_POSITIVE {
        let below = f64::from_bits(d.to_bits() - 1);
        if tail_power_mean(dimension, lambda, alpha, below)? > half {
            break;
        }
        d = below;
    }
    Ok(d)
}

/// Probability that at least one of `n` independent Exponential(`lambda`)
/// gaps exceeds `d_star`.
pub fn gap_exists_prob(lambda: f64, d_star: f64, n: u64) -> Result<f64> {
    if !(lambda > 0.0 && d_star > 0.0) {
        return Err(Error::InvalidParameter(format!("need lambda > 0 and d* > 0, got {lambda}, {d_star}")));
    }
    let single = (-lambda * d_star).exp();
    Ok(-(n as f64 * (-single).ln_1p()).exp_m1())
}

/// Probability that a given node has no other node within `radius`: to its
/// left in 1-D, in the surrounding disk in 2-D.
pub fn isolation_prob(dimension: Dimension, lambda: f64, radius: f64) -> Result<f64> {
    if !(lambda >= 0.0 && radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("need lambda, radius >= 0, got {lambda}, {radius}")));
    }
    Ok(match dimension {
        Dimension::One => (-lambda * radius).exp(),
        Dimension::Two => (-PI * lambda * radius * radius).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn partition_measures_are_exact() {
        let line = PartitionSpec::new(Dimension::One);
        let plane = PartitionSpec::new(Dimension::Two);
        for k in [1u64, 2, 3, 10, 1000, 1_000_000] {
            assert_eq!(line.level_measure(k), k as f64);
            let ring = PI * (plane.boundary(k).powi(2) - plane.boundary(k - 1).powi(2));
            assert_relative_eq!(ring, PI * k as f64, max_relative = 1e-12);
            assert_relative_eq!(plane.level_measure(k), PI * k as f64, max_relative = 1e-12);
        }
        assert_eq!(line.boundary(2), 3.0);
        assert_eq!(line.boundary(3), 6.0);
    }

    #[test]
    fn level_lookup_respects_half_open_intervals() {
        let line = PartitionSpec::new(Dimension::One);
        let at = |x: f64| line.level_of(Point::on_line(x));
        assert_eq!(at(0.0), None);
        assert_eq!(at(-0.5), None);
        assert_eq!(at(1e-9), Some(1));
        assert_eq!(at(1.0), Some(1));
        assert_eq!(at(1.0 + 1e-12), Some(2));
        assert_eq!(at(3.0), Some(2));
        assert_eq!(at(6.0), Some(3));
        assert_eq!(at(5050.0), Some(100));
        assert_eq!(at(5050.5), Some(101));
        let plane = PartitionSpec::new(Dimension::Two);
        assert_eq!(plane.level_of(Point::new(0.6, 0.8)), Some(1));
        assert_eq!(plane.level_of(Point::new(0.0, 3f64.sqrt() + 1e-9)), Some(3));
    }

    #[test]
    fn required_nodes_examples() {
        assert_eq!(required_nodes(Dimension::One, 5, 1.0).unwrap(), 6);
        assert_eq!(required_nodes(Dimension::Two, 1, 2.0).unwrap(), 12);
        assert_eq!(required_nodes(Dimension::Two, 2, 2.0).unwrap(), 12);
        assert_eq!(required_nodes(Dimension::Two, 3, 2.0).unwrap(), 16);
        assert_eq!(required_nodes(Dimension::One, 3, 0.5).unwrap(), 2);
        assert_eq!(required_nodes(Dimension::One, 1, 1e-300).unwrap(), 1);
        assert_eq!(required_nodes(Dimension::One, 1000, 1e-300).unwrap(), 1);
        assert!(required_nodes(Dimension::One, 0, 1.0).is_err());
    }

    #[test]
    fn exact_powers_do_not_round_up() {
        for k in 1..200u64 {
            assert_eq!(required_nodes(Dimension::One, k, 2.0).unwrap(), (k + 1) * (k + 1));
            assert_eq!(required_nodes(Dimension::One, k, 1.0).unwrap(), k + 1);
            assert_eq!(required_nodes(Dimension::One, k, 3.0).unwrap(), (k + 1).pow(3));
            if k >= 2 {
                assert_eq!(required_nodes(Dimension::Two, k, 2.0).unwrap(), 4 * (k + 1));
                assert_eq!(required_nodes(Dimension::Two, k, 4.0).unwrap(), 16 * (k + 1) * (k + 1));
            }
        }
    }

    #[test]
    fn requirement_ratio_limits() {
        let k = 1_000_000u64;
        let lambda = 2.0;
        let ratio = |dim, alpha: f64| {
            required_nodes(dim, k, alpha).unwrap() as f64 / PartitionSpec::new(dim).level_mean(lambda, k)
        };
        for alpha in [0.3, 0.5] {
            assert!(ratio(Dimension::One, alpha) < 1e-3);
        }
        for alpha in [0.5, 1.0] {
            assert!(ratio(Dimension::Two, alpha) < 1e-3);
        }
        assert!((ratio(Dimension::One, 1.0) - 1.0 / lambda).abs() < 1e-3);
        assert!((ratio(Dimension::Two, 2.0) - 4.0 / (PI * lambda)).abs() < 1e-3);
    }

    #[test]
    fn hand_realization_events() {
        let r = Realization::from_line(&[0.0, 0.3, 0.7, 1.5, 2.0, 2.9]).unwrap();
        assert_eq!(level_counts(&r, 2), vec![2, 3]);
        assert_eq!(check_events(&r, 1.0, 2).unwrap(), vec![true, true]);
        assert_eq!(check_events(&r, 1e-300, 2).unwrap(), vec![true, true]);

        let empty = Realization::from_line(&[0.0]).unwrap();
        assert_eq!(check_events(&empty, 1.0, 4).unwrap(), vec![false; 4]);

        let params = ModelParams::normalized(1.0, 1.0).unwrap();
        assert_eq!(sufficiency_witness(&r, &params, 2).unwrap(), Witness::Confirmed);
        let sparse = Realization::from_line(&[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(sufficiency_witness(&sparse, &params, 2).unwrap(), Witness::HypothesisNotMet { level: 1 });
    }

    #[test]
    fn witness_rejects_out_of_regime() {
        let r = Realization::from_line(&[0.0, 0.5]).unwrap();
        assert!(matches!(
            sufficiency_witness(&r, &ModelParams::normalized(1.5, 1.0).unwrap(), 1),
            Err(Error::Inapplicable(_))
        ));
        assert!(matches!(
            sufficiency_witness(&r, &ModelParams::new(1.0, 1.0, 2.0, 1.0).unwrap(), 1),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn events_need_a_covering_window() {
        let params = ModelParams::normalized(1.0, 2.0).unwrap();
        let r = crate::network::sample::<f64>(&params, &crate::Window::line(20.0).unwrap(), 5).unwrap();
        // level 6 ends at 21
        assert!(matches!(check_events(&r, 1.0, 5), Err(Error::WindowTooSmall { level: 6, .. })));
        assert!(check_events(&r, 1.0, 4).is_ok());
    }

    #[test]
    fn sum_inequality_examples() {
        assert!(verify_sum_inequality(Dimension::One, 1, 1.0));
        let lhs = 1.0 + 2f64.sqrt() + 3f64.sqrt();
        assert_relative_eq!(lhs, 4.146264, epsilon = 1e-6);
        assert!(verify_sum_inequality(Dimension::One, 2, 0.5));
        assert!(!verify_sum_inequality(Dimension::One, 2, 1.5));
        assert!(!verify_sum_inequality(Dimension::Two, 2, 3.0));
    }

    #[test]
    fn sweep_matches_pointwise_check() {
        for alpha in [0.4, 1.0, 1.3] {
            let first = sum_inequality_sweep(Dimension::One, 300, alpha);
            let pointwise = (1..=300).find(|&n| !verify_sum_inequality(Dimension::One, n, alpha));
            assert_eq!(first, pointwise);
        }
    }

    #[test]
    fn n_delta_examples() {
        let (n, d) = compute_n_delta(Dimension::One, 2.0, 1.0).unwrap();
        assert_eq!(n, 2);
        assert_relative_eq!(d, 0.25, epsilon = 1e-15);
        let (n, d) = compute_n_delta(Dimension::One, 1.2, 1.0).unwrap();
        assert_eq!(n, 6);
        assert_relative_eq!(d, 1.0 - 7.0 / 7.2, epsilon = 1e-12);
        assert_relative_eq!(d, 0.027778, epsilon = 1e-6);
        let (n, d) = compute_n_delta(Dimension::Two, 2.0, 2.0).unwrap();
        assert_eq!(n, 2);
        assert_relative_eq!(d, 1.0 - 12.0 / (4.0 * PI), epsilon = 1e-12);
        assert_relative_eq!(d, 0.045070, epsilon = 1e-6);
    }

    #[test]
    fn n_delta_regime_boundaries() {
        for (dim, lambda, alpha) in [
            (Dimension::One, 1.0, 1.0),
            (Dimension::One, 0.5, 1.0),
            (Dimension::One, 5.0, 1.01),
            (Dimension::One, 0.0, 0.5),
            (Dimension::Two, 4.0 / PI, 2.0),
            (Dimension::Two, 3.0, 2.5),
        ] {
            assert!(matches!(compute_n_delta(dim, lambda, alpha), Err(Error::Inapplicable(_))), "{dim} {lambda} {alpha}");
        }
        assert!(compute_n_delta(Dimension::Two, 1.3, 2.0).is_ok());
        assert!(compute_n_delta(Dimension::One, 0.05, 0.5).is_ok());
    }

    /// Direct summation of pmf terms for small means.
    fn naive_tail(mu: f64, m: u64) -> f64 {
        let mut term = (-mu).exp();
        let mut below = 0.0;
        for k in 0..m {
            below += term;
            term *= mu / (k + 1) as f64;
        }
        1.0 - below
    }

    #[test]
    fn poisson_tail_examples() {
        assert_eq!(poisson_tail(2.0, 0).unwrap(), 1.0);
        assert_eq!(poisson_tail(0.0, 1).unwrap(), 0.0);
        assert_relative_eq!(poisson_tail(2.0, 2).unwrap(), 1.0 - 3.0 * (-2f64).exp(), epsilon = 1e-14);
        assert_relative_eq!(poisson_tail(2.0, 2).unwrap(), 0.593994, epsilon = 1e-6);
    }

    #[test]
    fn poisson_tail_matches_naive_sum() {
        for mu in [0.1, 0.5, 1.0, 3.7, 10.0, 25.0, 60.0] {
            for m in 0..120u64 {
                let got = poisson_tail(mu, m).unwrap();
                let want = naive_tail(mu, m).max(0.0);
                assert!((got - want).abs() < 1e-12, "mu={mu} m={m}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn poisson_tail_large_mean() {
        // symmetric-ish around the mean for large mu
        let mu = 1.0e6;
        let p = poisson_tail(mu, 1_000_000).unwrap();
        assert!((p - 0.5).abs() < 1e-3, "{p}");
        assert!(poisson_tail(mu, 900_000).unwrap() > 1.0 - 1e-12);
        assert!(poisson_tail(mu, 1_100_000).unwrap() < 1e-12);
        // monotone in m
        let mut prev = 1.0;
        for m in (995_000..1_005_000).step_by(500) {
            let p = poisson_tail(mu, m).unwrap();
            assert!(p <= prev);
            prev = p;
        }
    }

    #[test]
    fn lower_bound_report() {
        let rep = broadcast_lower_bound(Dimension::One, 2.0, 1.0, None).unwrap();
        assert_eq!((rep.n, rep.event), (2, BoundEvent::OneSided));
        assert!(rep.total > 0.0 && rep.total < 1.0);
        assert!(rep.total <= rep.exact_head);
        assert!(rep.tail_correction >= DEFAULT_TAIL_TARGET);
        for f in [rep.exact_head, rep.chernoff_body, rep.tail_correction] {
            assert!(f > 0.0 && f <= 1.0);
        }
        assert_relative_eq!(rep.exact_head, poisson_tail(2.0, 2).unwrap(), epsilon = 1e-15);
        // one level fewer would miss the tail target
        let shorter = broadcast_lower_bound(Dimension::One, 2.0, 1.0, Some(rep.k - 1)).unwrap();
        assert!(shorter.tail_correction < DEFAULT_TAIL_TARGET);

        let json = serde_json::to_value(&rep).unwrap();
        for key in ["dimension", "lambda", "alpha", "N", "delta", "K", "exact_head", "chernoff_body", "tail_correction", "total"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["dimension"], 1);
    }

    #[test]
    fn lower_bound_errors() {
        assert!(matches!(broadcast_lower_bound(Dimension::One, 1.0, 1.0, None), Err(Error::Inapplicable(_))));
        assert!(matches!(broadcast_lower_bound(Dimension::One, 2.0, 1.0, Some(1)), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            broadcast_lower_bound(Dimension::One, 2.0, 1.0, Some(2)),
            Err(Error::TruncationTooShort { k: 2, .. })
        ));
    }

    #[test]
    fn lower_bound_2d() {
        let rep = broadcast_lower_bound(Dimension::Two, 2.0, 2.0, None).unwrap();
        assert_eq!(rep.event, BoundEvent::Full);
        assert!(rep.total > 0.0 && rep.total < 1.0);
        let rep = broadcast_lower_bound(Dimension::Two, 1.0, 1.0, None).unwrap();
        assert!(rep.total > 0.0 && rep.total < 1.0);
    }

    #[test]
    fn tail_power_mean_examples() {
        assert_relative_eq!(tail_power_mean(Dimension::One, 1.0, 2.0, 10.0).unwrap(), 0.1, epsilon = 1e-15);
        assert_relative_eq!(tail_power_mean(Dimension::One, 2.0, 3.0, 2.0).unwrap(), 0.25, epsilon = 1e-15);
        assert_relative_eq!(tail_power_mean(Dimension::Two, 1.0, 4.0, 5.0).unwrap(), PI / 25.0, epsilon = 1e-15);
        assert_relative_eq!(PI / 25.0, 0.125664, epsilon = 1e-6);
        assert!(matches!(tail_power_mean(Dimension::One, 1.0, 1.0, 3.0), Err(Error::Inapplicable(_))));
        assert!(matches!(tail_power_mean(Dimension::Two, 1.0, 2.0, 3.0), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn d_star_examples() {
        let d = d_star(Dimension::One, 1.0, 2.0, 0.2).unwrap();
        assert_relative_eq!(d, 10.0, max_relative = 1e-14);
        assert!(tail_power_mean(Dimension::One, 1.0, 2.0, d).unwrap() <= 0.1);
        let near_one = d_star(Dimension::One, 1.0, 2.0, 0.999).unwrap();
        assert!(near_one < d);
        let d2 = d_star(Dimension::Two, 1.0, 4.0, 0.2).unwrap();
        assert!(tail_power_mean(Dimension::Two, 1.0, 4.0, d2).unwrap() <= 0.1);
        assert!(d_star(Dimension::One, 1.0, 0.8, 0.2).is_err());
        assert!(d_star(Dimension::One, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn gap_probability_examples() {
        assert_relative_eq!(gap_exists_prob(1.0, 10.0, 1).unwrap(), 4.53999e-5, max_relative = 1e-5);
        assert_relative_eq!(gap_exists_prob(1.0, 10.0, 1).unwrap(), (-10f64).exp(), max_relative = 1e-14);
        assert!(gap_exists_prob(1.0, 10.0, 10_000_000).unwrap() > 0.98);
        assert_eq!(gap_exists_prob(1.0, 2.0, u64::MAX).unwrap(), 1.0);
        assert_eq!(gap_exists_prob(1.0, 2.0, 0).unwrap(), 0.0);
    }

    #[test]
    fn isolation_probabilities() {
        assert_relative_eq!(isolation_prob(Dimension::One, 2.0, 1.5).unwrap(), (-3f64).exp());
        assert_relative_eq!(isolation_prob(Dimension::Two, 1.0, 1.0).unwrap(), (-PI).exp());
    }
}
