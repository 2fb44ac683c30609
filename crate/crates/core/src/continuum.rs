//! Deterministic continuum comparator: transmit power is spread with
//! density `rho` over the decoded region, and each step the frontier moves
//! to the farthest point where the integrated path gain still meets `tau`.
//!
//! In 1-D the decoded region is `[0, R]`; in 2-D it is the disk of radius `R`.

use crate::error::{Error, Result};
use crate::network::Dimension;
use crate::quadrature;
use crate::scalar::Real;

/// Relative tolerance of the frontier bisection.
pub const FRONTIER_RTOL: f64 = 1e-10;
/// Relative tolerance of the 2-D path-gain quadrature.
pub const QUADRATURE_RTOL: f64 = 1e-8;
/// Exponents within this distance of a logarithmic case use the log form.
const LOG_BRANCH_TOL: f64 = 1e-9;

fn check_frontier_args<T: Real>(r: T, rho: T, tau: T, alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if !(r > T::zero() && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("decoded extent must be > 0, got {r}")));
    }
    if !(rho > T::zero() && tau > T::zero()) {
        return Err(Error::InvalidParameter(format!("rho and tau must be > 0, got {rho}, {tau}")));
    }
    Ok(())
}

/// `(a^beta - b^beta) / beta` for `0 <= a < b`, written as
/// `b^beta * -expm1(beta * ln(a/b)) / beta`; the `beta -> 0` limit is
/// `ln(b/a)`.
fn power_difference<T: Real>(a: T, b: T, beta: T) -> T {
    let log_ratio = (a / b).ln();
    if beta.abs() < T::lit(LOG_BRANCH_TOL) {
        -log_ratio
    } else {
        -b.powf(beta) * (beta * log_ratio).exp_m1() / beta
    }
}

/// `\int_0^R (x - u)^-alpha du` for `x > R`.
pub fn line_power_integral<T: Real>(x: T, r: T, alpha: T) -> T {
    let ratio = -r / x;
    if (alpha - T::one()).abs() < T::lit(LOG_BRANCH_TOL) {
        -ratio.ln_1p()
    } else {
        let one_minus = T::one() - alpha;
        x.powf(one_minus) * (one_minus * ratio.ln_1p()).exp_m1() / (alpha - T::one())
    }
}

/// `\int_{|u| <= R} |x e - u|^-alpha du` for a point at distance `x > R`
/// (or `x = R` when `alpha < 2`).
///
/// Integrates along rays from the target: a ray at angle `phi` crosses the
/// disk between `rho_- rho_+ = x^2 - R^2` apart, and the radial part has a
/// closed form. The angle is reparametrised by `sin phi = (R/x) sin psi` so
/// the remaining integrand is smooth on `psi in [0, pi/2]`.
pub fn disk_power_integral<T: Real>(x: T, r: T, alpha: T) -> Result<T> {
    let beta = T::lit(2.0) - alpha;
    let ratio = r / x;
    let gap = (x - r) * (x + r);
    let integrand = |psi: T| {
        let (sin_psi, cos_psi) = psi.sin_cos();
        let sin_phi = ratio * sin_psi;
        let cos_phi = (T::one() - sin_phi * sin_phi).sqrt();
        let far = x * cos_phi + r * cos_psi;
        let near = gap / far;
        let radial = power_difference(near, far, beta);
        let jacobian = if cos_phi > T::zero() { ratio * cos_psi / cos_phi } else { T::one() };
        radial * jacobian
    };
    let rtol = T::lit(QUADRATURE_RTOL).max(T::epsilon() * T::lit(64.0));
    // near the edge the jacobian has a layer of width ~w below pi/2;
    // break the range geometrically towards it
    let w = (T::one() - ratio * ratio).sqrt();
    let half_pi = T::FRAC_PI_2();
    let mut cuts = vec![half_pi];
    let mut width = w.max(T::lit(1e-12));
    while width < half_pi {
        cuts.push(half_pi - width);
        width = width * T::lit(4.0);
    }
    cuts.push(T::zero());
    cuts.reverse();
    let total = quadrature::integrate_with_breaks(integrand, &cuts, rtol, T::zero())?.value;
    Ok(T::lit(2.0) * total)
}

/// Largest `x > R` where `rho * I(x) >= tau`, found by bisection. `None`
/// when not even points just beyond `R` are reached (possible for small
/// exponents, where `I` stays bounded near the edge). When `I` diverges at
/// the edge the first probe is skipped. Infinite when the frontier lies
/// beyond the largest finite value of `T`.
fn bisect_frontier<T, F>(r: T, rho: T, tau: T, diverges_at_edge: bool, mut gain: F) -> Result<Option<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut reached = |x: T| -> Result<bool> { Ok(rho * gain(x)? >= tau) };
    let mut lo = r * (T::one() + T::lit(1e-12));
    if !diverges_at_edge && !reached(lo)? {
        return Ok(None);
    }
    // the offset doubles on its own: for large R, R + 1 rounds back to R
    let mut offset = T::one();
    let mut hi = r + offset;
    while reached(hi)? {
        lo = lo.max(hi);
        offset = offset * T::lit(2.0);
        hi = r + offset;
        if !hi.is_finite() {
            return Ok(Some(T::infinity()));
        }
    }
    let rtol = T::lit(FRONTIER_RTOL).max(T::epsilon() * T::lit(4.0));
    while hi - lo > rtol * lo {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if reached(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// Next frontier of the 1-D continuum from the decoded segment `[0, R]`.
pub fn frontier_1d<T: Real>(r: T, rho: T, tau: T, alpha: T) -> Result<Option<T>> {
    check_frontier_args(r, rho, tau, alpha)?;
    bisect_frontier(r, rho, tau, alpha >= T::one(), |x| Ok(line_power_integral(x, r, alpha)))
}

/// Next frontier of the 2-D continuum from the decoded disk of radius `R`.
pub fn frontier_2d<T: Real>(r: T, rho: T, tau: T, alpha: T) -> Result<Option<T>> {
    check_frontier_args(r, rho, tau, alpha)?;
    bisect_frontier(r, rho, tau, alpha >= T::lit(2.0), |x| disk_power_integral(x, r, alpha))
}

/// Trajectory of the continuum frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumState<T> {
    pub dimension: Dimension,
    pub rho: T,
    pub tau: T,
    pub alpha: T,
    /// `R_0 < R_1 < ...`
    pub frontier_history: Vec<T>,
    /// Set when a step failed to move past the current frontier.
    pub stalled: bool,
    /// Set when the next frontier exceeded the range of `T`; the history
    /// ends at the last representable frontier.
    pub overflowed: bool,
}

impl<T: Real> ContinuumState<T> {
    /// `R_t - R_{t-1}` for every executed step.
    pub fn increments(&self) -> Vec<T> {
        self.frontier_history.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn last(&self) -> T {
        *self.frontier_history.last().expect("history starts with R_0")
    }

    /// CSV with columns `step,R,increment`; step 0 carries increment 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,R,increment\n");
        let mut prev = self.frontier_history[0];
        for (t, &r) in self.frontier_history.iter().enumerate() {
            out.push_str(&format!("{t},{r},{}\n", r - prev));
            prev = r;
        }
        out
    }
}

/// Iterates the frontier `steps` times from `R_0 = 1`, the lone-node radius
/// under `p_t = tau`. Fails if an increment ever shrinks.
pub fn continuum_growth<T: Real>(dimension: Dimension, rho: T, tau: T, alpha: T, steps: usize) -> Result<ContinuumState<T>> {
    continuum_growth_from(dimension, T::one(), rho, tau, alpha, steps)
}

/// [`continuum_growth`] from an explicit initial radius.
pub fn continuum_growth_from<T: Real>(
    dimension: Dimension,
    r0: T,
    rho: T,
    tau: T,
    alpha: T,
    steps: usize,
) -> Result<ContinuumState<T>> {
    if steps < 1 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    check_frontier_args(r0, rho, tau, alpha)?;
    let mut state = ContinuumState { dimension, rho, tau, alpha, frontier_history: vec![r0], stalled: false, overflowed: false };
    let mut last_increment = T::zero();
    for step in 1..=steps {
        let r = state.last();
        let next = match dimension {
            Dimension::One => frontier_1d(r, rho, tau, alpha)?,
            Dimension::Two => frontier_2d(r, rho, tau, alpha)?,
        };
        let Some(next) = next else {
            state.stalled = true;
            break;
        };
        if !next.is_finite() {
            state.overflowed = true;
            break;
        }
        let increment = next - r;
        if increment < last_increment {
            return Err(Error::Invariant(format!(
                "frontier increment shrank at step {step}: {increment} < {last_increment}"
            )));
        }
        last_increment = increment;
        state.frontier_history.push(next);
    }
    Ok(state)
}
