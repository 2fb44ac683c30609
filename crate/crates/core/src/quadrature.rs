//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

/// Integral estimate with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Segment<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kron = kron + pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    Segment { a, b, value: kron * radius, error: ((kron - gauss) * radius).abs() }
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<T, F>(f: F, a: T, b: T, rel_tol: T, abs_tol: T) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    integrate_with_breaks(f, &[a, b], rel_tol, abs_tol)
}

/// Like [`integrate`] over `[breaks[0], breaks[last]]`, seeding the
/// subdivision with the given increasing break points.
pub fn integrate_with_breaks<T, F>(mut f: F, breaks: &[T], rel_tol: T, abs_tol: T) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (T::zero(), T::zero());
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let seg = kronrod(&mut f, w[0], w[1]);
        value = value + seg.value;
        error = error + seg.error;
        heap.push(seg);
    }
    if heap.is_empty() {
        return Ok(Estimate { value: T::zero(), error: T::zero() });
    }

    while error > abs_tol.max(rel_tol * value.abs()) {
        if heap.len() >= MAX_SEGMENTS || !value.is_finite() {
            return Err(Error::Quadrature {
                error: error.as_f64(),
                tolerance: abs_tol.max(rel_tol * value.abs()).as_f64(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted floating point resolution
            return Err(Error::Quadrature {
                error: error.as_f64(),
                tolerance: abs_tol.max(rel_tol * value.abs()).as_f64(),
            });
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
    }
    if !value.is_finite() {
        return Err(Error::Quadrature { error: error.as_f64(), tolerance: abs_tol.as_f64() });
    }
    // re-sum to shed drift from the incremental updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate { value, error })
}

/// Iterated adaptive quadrature over the rectangle `[x0, x1] x [y0, y1]`.
pub fn integrate_rect<T, F>(f: F, (x0, x1): (T, T), (y0, y1): (T, T), rel_tol: T, abs_tol: T) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(T, T) -> T,
{
    let mut inner_err: Option<Error> = None;
    let mut inner_total = T::zero();
    let outer = integrate(
        |x| match integrate(|y| f(x, y), y0, y1, rel_tol * T::lit(0.1), abs_tol) {
            Ok(e) => {
                inner_total = inner_total + e.error;
                e.value
            }
            Err(e) => {
                inner_err.get_or_insert(e);
                T::nan()
            }
        },
        x0,
        x1,
        rel_tol,
        abs_tol,
    );
    if let Some(e) = inner_err {
        return Err(e);
    }
    outer
}
