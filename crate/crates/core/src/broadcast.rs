//! Level-set cooperative broadcast.
//!
//! Round `t + 1` decodes every node whose power from the whole decoded set
//! `D_t` meets the threshold. The iteration stops at the least fixed point.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::network::{Dimension, ModelParams, Realization};
use crate::propagation::{gain_from_dist_sq, received_power};
use crate::scalar::{CompensatedSum, Real};

/// Result of one broadcast run.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastOutcome<T> {
    /// Round in which each node decoded; `Some(0)` only for the source.
    pub decode_round: Vec<Option<u32>>,
    /// Number of rounds that decoded at least one node.
    pub rounds: u32,
    pub full_coverage: bool,
    pub reached_count: usize,
    /// Largest distance from the origin among decoded nodes.
    pub max_extent: T,
}

impl<T: Real> BroadcastOutcome<T> {
    pub fn is_decoded(&self, i: usize) -> bool {
        self.decode_round[i].is_some()
    }

    pub fn reached_fraction(&self) -> f64 {
        self.reached_count as f64 / self.decode_round.len() as f64
    }

    fn from_rounds(decode_round: Vec<Option<u32>>, rounds: u32, r: &Realization<T>) -> Self {
        let reached_count = decode_round.iter().filter(|d| d.is_some()).count();
        let max_extent = r
            .points()
            .iter()
            .zip(&decode_round)
            .filter(|(_, d)| d.is_some())
            .map(|(p, _)| p.norm_sq())
            .fold(T::zero(), T::max)
            .sqrt();
        Self { full_coverage: reached_count == decode_round.len(), decode_round, rounds, reached_count, max_extent }
    }

    /// Replay dump: `node_index,x[,y],decode_round`, with an empty round
    /// for nodes that never decoded.
    pub fn to_csv(&self, r: &Realization<T>) -> String {
        let mut out = match r.dimension() {
            Dimension::One => String::from("node_index,x,decode_round\n"),
            Dimension::Two => String::from("node_index,x,y,decode_round\n"),
        };
        for (i, (p, d)) in r.points().iter().zip(&self.decode_round).enumerate() {
            let round = d.map(|v| v.to_string()).unwrap_or_default();
            match r.dimension() {
                Dimension::One => writeln!(out, "{i},{},{round}", p.x),
                Dimension::Two => writeln!(out, "{i},{},{},{round}", p.x, p.y),
            }
            .expect("writing to a String");
        }
        out
    }
}

fn check_inputs<T: Real>(r: &Realization<T>, params: &ModelParams<T>) -> Result<()> {
    params.validate()?;
    match r.points().get(r.source_index()) {
        Some(p) if p.is_origin() => Ok(()),
        _ => Err(Error::MissingSource),
    }
}

/// Runs the broadcast incrementally: each round only the newly decoded
/// nodes' contributions are added to the running power of the undecoded
/// ones. Total work is O(n * decoded).
pub fn run_broadcast<T: Real>(r: &Realization<T>, params: &ModelParams<T>) -> Result<BroadcastOutcome<T>> {
    check_inputs(r, params)?;
    let pts = r.points();
    let n = pts.len();
    let src = r.source_index();
    let neg_half_alpha = -params.alpha / T::lit(2.0);

    let mut decode_round = vec![None; n];
    decode_round[src] = Some(0);
    let mut power = vec![CompensatedSum::<T>::new(); n];
    let mut saturated = vec![false; n];
    let mut undecoded: Vec<usize> = (0..n).filter(|&i| i != src).collect();
    let mut frontier = vec![src];
    let mut rounds = 0u32;

    while !undecoded.is_empty() {
        for &j in &frontier {
            let pj = pts[j];
            for &k in &undecoded {
                match gain_from_dist_sq(pts[k].dist_sq(&pj), neg_half_alpha) {
                    Some(g) => power[k].add(g),
                    None => saturated[k] = true,
                }
            }
        }
        let (newly, rest): (Vec<usize>, Vec<usize>) =
            undecoded.iter().partition(|&&k| saturated[k] || params.p_t * power[k].value() >= params.tau);
        if newly.is_empty() {
            break;
        }
        rounds += 1;
        for &k in &newly {
            decode_round[k] = Some(rounds);
        }
        frontier = newly;
        undecoded = rest;
    }

    Ok(BroadcastOutcome::from_rounds(decode_round, rounds, r))
}

/// Reference implementation: every round recomputes the full power sum
/// from the decoded set, in canonical node order, for every undecoded node.
/// Quadratic per round; meant for small instances.
pub fn run_broadcast_oracle<T: Real>(r: &Realization<T>, params: &ModelParams<T>) -> Result<BroadcastOutcome<T>> {
    check_inputs(r, params)?;
    let pts = r.points();
    let n = pts.len();
    let mut decode_round = vec![None; n];
    decode_round[r.source_index()] = Some(0);
    let mut rounds = 0u32;

    loop {
        let decoded: Vec<_> = (0..n).filter(|&i| decode_round[i].is_some()).map(|i| pts[i]).collect();
        let newly: Vec<usize> = (0..n)
            .filter(|&k| decode_round[k].is_none())
            .filter(|&k| received_power(&decoded, pts[k], params).meets(params.tau))
            .collect();
        if newly.is_empty() {
            break;
        }
        rounds += 1;
        for k in newly {
            decode_round[k] = Some(rounds);
        }
    }

    Ok(BroadcastOutcome::from_rounds(decode_round, rounds, r))
}

fn one_sided<T: Real>(outcome: &BroadcastOutcome<T>, r: &Realization<T>, sign: T) -> Result<T> {
    if r.dimension() != Dimension::One {
        return Err(Error::DimensionMismatch { expected: 1, actual: r.dimension().as_u8() });
    }
    if outcome.decode_round.len() != r.len() {
        return Err(Error::InvalidParameter("outcome does not belong to this realization".into()));
    }
    Ok(r.points()
        .iter()
        .zip(&outcome.decode_round)
        .filter(|(_, d)| d.is_some())
        .map(|(p, _)| p.x * sign)
        .fold(T::zero(), T::max))
}

/// Largest decoded coordinate on the positive half-line (0 if none).
pub fn positive_extent<T: Real>(outcome: &BroadcastOutcome<T>, r: &Realization<T>) -> Result<T> {
    one_sided(outcome, r, T::one())
}

/// Distance of the leftmost decoded node from the origin (0 if none).
pub fn negative_extent<T: Real>(outcome: &BroadcastOutcome<T>, r: &Realization<T>) -> Result<T> {
    one_sided(outcome, r, -T::one())
}
