//! Extended Poisson networks sampled on a finite window around a source
//! pinned at the origin, plus the geometric queries the rest of the crate
//! needs.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Spatial dimension of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Dimension {
    One,
    Two,
}

impl Dimension {
    pub fn as_u8(self) -> u8 {
        match self {
            Dimension::One => 1,
            Dimension::Two => 2,
        }
    }
}

impl TryFrom<u8> for Dimension {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Dimension::One),
            2 => Ok(Dimension::Two),
            other => Err(Error::InvalidParameter(format!("dimension must be 1 or 2, got {other}"))),
        }
    }
}

impl From<Dimension> for u8 {
    fn from(d: Dimension) -> u8 {
        d.as_u8()
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Physical parameters of the network: path-loss exponent, node density,
/// transmit power and decode threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub alpha: T,
    pub lambda: T,
    pub p_t: T,
    pub tau: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(alpha: T, lambda: T, p_t: T, tau: T) -> Result<Self> {
        let params = Self { alpha, lambda, p_t, tau };
        params.validate()?;
        Ok(params)
    }

    /// `p_t = tau = 1`, which puts the transmission radius at 1.
    pub fn normalized(alpha: T, lambda: T) -> Result<Self> {
        Self::new(alpha, lambda, T::one(), T::one())
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: T| v.is_finite();
        if !(ok(self.alpha) && self.alpha > T::zero()) {
            return Err(Error::InvalidParameter(format!("alpha must be finite and > 0, got {}", self.alpha)));
        }
        if !(ok(self.lambda) && self.lambda >= T::zero()) {
            return Err(Error::InvalidParameter(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !(ok(self.p_t) && self.p_t > T::zero()) {
            return Err(Error::InvalidParameter(format!("p_t must be finite and > 0, got {}", self.p_t)));
        }
        if !(ok(self.tau) && self.tau > T::zero()) {
            return Err(Error::InvalidParameter(format!("tau must be finite and > 0, got {}", self.tau)));
        }
        let r = (self.p_t / self.tau).powf(self.alpha.recip());
        if !(r.is_finite() && r > T::zero()) {
            return Err(Error::InvalidParameter(format!("transmission radius {r} is not finite and positive")));
        }
        Ok(())
    }
}

/// Symmetric observation window: `[-extent, extent]` in 1-D, the square
/// `[-extent, extent]^2` in 2-D.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub dimension: Dimension,
    /// Half-width of the window.
    pub extent: f64,
}

impl Window {
    pub fn new(dimension: Dimension, extent: f64) -> Result<Self> {
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidParameter(format!("window extent must be finite and > 0, got {extent}")));
        }
        Ok(Self { dimension, extent })
    }

    pub fn line(extent: f64) -> Result<Self> {
        Self::new(Dimension::One, extent)
    }

    pub fn square(extent: f64) -> Result<Self> {
        Self::new(Dimension::Two, extent)
    }

    /// Length (1-D) or area (2-D).
    pub fn measure(&self) -> f64 {
        let side = 2.0 * self.extent;
        match self.dimension {
            Dimension::One => side,
            Dimension::Two => side * side,
        }
    }

    pub fn contains<T: Real>(&self, p: Point<T>) -> bool {
        let e = self.extent;
        let inside = |v: T| v.as_f64().abs() <= e;
        match self.dimension {
            Dimension::One => inside(p.x) && p.y == T::zero(),
            Dimension::Two => inside(p.x) && inside(p.y),
        }
    }
}

/// A node location. 1-D nodes keep `y == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn on_line(x: T) -> Self {
        Self { x, y: T::zero() }
    }

    pub fn origin() -> Self {
        Self { x: T::zero(), y: T::zero() }
    }

    pub fn is_origin(&self) -> bool {
        self.x == T::zero() && self.y == T::zero()
    }

    pub fn norm_sq(&self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn dist_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx.hypot(dy)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { x: self.x * s, y: self.y * s }
    }

    /// Canonical order: by `x`, then by `y`.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap_or(Ordering::Equal)
            .then(self.y.partial_cmp(&other.y).unwrap_or(Ordering::Equal))
    }
}

/// An immutable sampled (or hand-built) node set with the source at the
/// origin. Points are stored in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization<T> {
    dimension: Dimension,
    points: Vec<Point<T>>,
    source_index: usize,
    seed: u64,
    lambda: f64,
    extent: Option<f64>,
}

impl<T: Real> Realization<T> {
    /// Builds a realization from explicit coordinates. One of them must be
    /// exactly the origin; it becomes the source. Seed is recorded as 0 and
    /// density as NaN.
    pub fn from_points(dimension: Dimension, points: Vec<Point<T>>) -> Result<Self> {
        Self::assemble(dimension, points, 0, f64::NAN, None)
    }

    /// 1-D shorthand for [`Realization::from_points`].
    pub fn from_line(coords: &[T]) -> Result<Self> {
        Self::from_points(Dimension::One, coords.iter().map(|&x| Point::on_line(x)).collect())
    }

    fn assemble(
        dimension: Dimension,
        mut points: Vec<Point<T>>,
        seed: u64,
        lambda: f64,
        extent: Option<f64>,
    ) -> Result<Self> {
        if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::InvalidParameter("coordinates must be finite".into()));
        }
        if dimension == Dimension::One && points.iter().any(|p| p.y != T::zero()) {
            return Err(Error::InvalidParameter("1-D points must have y == 0".into()));
        }
        points.sort_by(Point::canonical_cmp);
        let source_index = points.iter().position(Point::is_origin).ok_or(Error::MissingSource)?;
        Ok(Self { dimension, points, source_index, seed, lambda, extent })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn source_index(&self) -> usize {
        self.source_index
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Half-width of the sampling window, when known. Hand-built and
    /// parsed realizations have none.
    pub fn extent(&self) -> Option<f64> {
        self.extent
    }

    /// Mirror image through the origin.
    pub fn reflected(&self) -> Self {
        let pts = self.points.iter().map(|p| Point::new(-p.x, -p.y)).collect();
        Self::assemble(self.dimension, pts, self.seed, self.lambda, self.extent).expect("reflection keeps the origin")
    }

    /// All coordinates multiplied by `s > 0`.
    pub fn scaled(&self, s: T) -> Self {
        let pts = self.points.iter().map(|p| p.scaled(s)).collect();
        Self::assemble(self.dimension, pts, self.seed, self.lambda, self.extent.map(|e| e * s.as_f64()))
            .expect("scaling keeps the origin")
    }

    /// Adds a node and returns the new realization.
    pub fn with_point(&self, p: Point<T>) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.push(p);
        Self::assemble(self.dimension, pts, self.seed, self.lambda, self.extent)
    }

    fn require_dim(&self, expected: Dimension) -> Result<()> {
        if self.dimension != expected {
            return Err(Error::DimensionMismatch { expected: expected.as_u8(), actual: self.dimension.as_u8() });
        }
        Ok(())
    }

    /// Consecutive spacings of a 1-D realization, left to right.
    pub fn gaps_1d(&self) -> Result<Vec<T>> {
        self.require_dim(Dimension::One)?;
        Ok(self.points.windows(2).map(|w| w[1].x - w[0].x).collect())
    }

    /// Distance from node `i` to its nearest other node.
    pub fn nearest_neighbor_dist(&self, i: usize) -> Result<T> {
        if self.points.len() < 2 {
            return Err(Error::TooFewNodes);
        }
        let target = self
            .points
            .get(i)
            .ok_or_else(|| Error::InvalidParameter(format!("node index {i} out of range")))?;
        let best = self
            .points
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, p)| p.dist_sq(target))
            .fold(T::infinity(), T::min);
        Ok(best.sqrt())
    }

    /// Text form: a `# dim=.. lambda=.. seed=..` header followed by one node
    /// per line. Floats use the shortest round-trip representation.
    pub fn to_text(&self) -> String {
        let mut out = format!("# dim={} lambda={} seed={}\n", self.dimension, self.lambda, self.seed);
        for p in &self.points {
            match self.dimension {
                Dimension::One => writeln!(out, "{}", p.x),
                Dimension::Two => writeln!(out, "{} {}", p.x, p.y),
            }
            .expect("writing to a String");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty input".into() })?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or(Error::Parse { line: 1, message: "missing '#' header".into() })?;

        let (mut dim, mut lambda, mut seed) = (None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: 1, message: format!("malformed header field '{field}'") })?;
            let bad = |what: &str| Error::Parse { line: 1, message: format!("bad {what} '{value}'") };
            match key {
                "dim" => dim = Some(Dimension::try_from(value.parse::<u8>().map_err(|_| bad("dim"))?).map_err(|_| bad("dim"))?),
                "lambda" => lambda = Some(value.parse::<f64>().map_err(|_| bad("lambda"))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("seed"))?),
                _ => {}
            }
        }
        let missing = |what: &str| Error::Parse { line: 1, message: format!("header lacks {what}") };
        let dimension = dim.ok_or_else(|| missing("dim"))?;
        let lambda = lambda.ok_or_else(|| missing("lambda"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;

        let mut points = Vec::new();
        for (idx, line) in lines {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| Error::Parse { line: idx + 1, message: format!("bad coordinate '{s}'") })
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let p = match (dimension, fields.as_slice()) {
                (Dimension::One, [x]) => Point::on_line(parse(x)?),
                (Dimension::Two, [x, y]) => Point::new(parse(x)?, parse(y)?),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected {} coordinate(s)", dimension.as_u8()),
                    })
                }
            };
            points.push(p);
        }
        Self::assemble(dimension, points, seed, lambda, None)
    }
}

/// Samples a homogeneous Poisson process of density `params.lambda` on the
/// window and adds the source at the origin. Deterministic in `seed`.
pub fn sample<T: Real>(params: &ModelParams<T>, window: &Window, seed: u64) -> Result<Realization<T>> {
    params.validate()?;
    Window::new(window.dimension, window.extent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = params.lambda.as_f64();
    let mean = lambda * window.measure();
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?;
        poisson.sample(&mut rng) as usize
    } else {
        0
    };

    let e = window.extent;
    let coord = |rng: &mut ChaCha8Rng| {
        let v: f64 = rng.random_range(-e..=e);
        // narrowing to f32 may round just past the boundary
        T::lit(v).max(T::lit(-e)).min(T::lit(e))
    };
    let mut points = Vec::with_capacity(count + 1);
    for _ in 0..count {
        let p = match window.dimension {
            Dimension::One => Point::on_line(coord(&mut rng)),
            Dimension::Two => {
                let x = coord(&mut rng);
                Point::new(x, coord(&mut rng))
            }
        };
        points.push(p);
    }
    points.sort_by(Point::canonical_cmp);
    let origin = Point::origin();
    let source_index = points.partition_point(|p| p.canonical_cmp(&origin) == Ordering::Less);
    points.insert(source_index, origin);

    Ok(Realization { dimension: window.dimension, points, source_index, seed, lambda, extent: Some(window.extent) })
}
