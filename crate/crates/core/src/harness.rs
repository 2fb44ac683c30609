//! Seeded Monte Carlo estimation of the broadcast probability, parameter
//! sweeps, and the vanishing/persistent regime classification.
//!
//! Trial `i` of a cell always samples its realization from
//! `derive_seed(master_seed, i)`, so counts do not depend on how trials are
//! scheduled across worker threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::broadcast::{positive_extent, run_broadcast};
use crate::error::{Error, Result};
use crate::network::{sample, Dimension, ModelParams, Window};
use crate::scalar::{CompensatedSum, Real};

/// Identifier of the per-trial seed derivation, recorded with results.
pub const SEED_HASH: &str = "splitmix64";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Fraction of the window half-width the one-sided metric must reach.
pub const ONE_SIDED_FRACTION: f64 = 0.9;

/// Exact CSV header of sweep output.
pub const CSV_HEADER: &str = "dim,alpha,lambda,extent,trials,successes,p_hat,ci_lo,ci_hi,mean_reach_frac,mean_extent,seed";

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`: `splitmix64(master + splitmix64(trial))`
/// with wrapping addition.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master.wrapping_add(splitmix64(trial)))
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// What counts as a successful trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Metric {
    /// Every node in the window decoded.
    #[default]
    #[serde(rename = "full_coverage", alias = "full")]
    FullCoverage,
    /// The decoded set reaches 90% of the half-width on the positive side (1-D).
    #[serde(rename = "one_sided_extent", alias = "onesided")]
    OneSidedExtent,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full_coverage" => Ok(Metric::FullCoverage),
            "onesided" | "one_sided_extent" => Ok(Metric::OneSidedExtent),
            other => Err(Error::InvalidParameter(format!("unknown metric '{other}'"))),
        }
    }
}

/// Monte Carlo estimate for one `(dimension, alpha, lambda, extent)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dim: Dimension,
    pub alpha: f64,
    pub lambda: f64,
    pub extent: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_reach_frac: f64,
    pub mean_extent: f64,
    pub seed: u64,
}

impl CellResult {
    /// Binomial standard error of `p_hat`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.dim,
            self.alpha,
            self.lambda,
            self.extent,
            self.trials,
            self.successes,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            self.mean_reach_frac,
            self.mean_extent,
            self.seed
        )
    }
}

struct Trial {
    success: bool,
    reach_frac: f64,
    extent: f64,
}

fn run_trial<T: Real>(params: &ModelParams<T>, window: &Window, seed: u64, metric: Metric) -> Result<Trial> {
    let r = sample(params, window, seed)?;
    let out = run_broadcast(&r, params)?;
    let success = match metric {
        Metric::FullCoverage => out.full_coverage,
        Metric::OneSidedExtent => positive_extent(&out, &r)?.as_f64() >= ONE_SIDED_FRACTION * window.extent,
    };
    Ok(Trial { success, reach_frac: out.reached_fraction(), extent: out.max_extent.as_f64() })
}

/// Estimates the success probability of one cell from `trials` seeded
/// realizations.
pub fn estimate_broadcast_prob<T: Real>(
    params: &ModelParams<T>,
    window: &Window,
    trials: u64,
    master_seed: u64,
    metric: Metric,
) -> Result<CellResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    params.validate()?;
    if metric == Metric::OneSidedExtent && window.dimension != Dimension::One {
        return Err(Error::InvalidParameter("the one-sided metric is defined for 1-D windows only".into()));
    }
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(params, window, derive_seed(master_seed, i), metric))
        .collect::<Result<_>>()?;

    let successes = outcomes.iter().filter(|t| t.success).count() as u64;
    let reach: CompensatedSum<f64> = outcomes.iter().map(|t| t.reach_frac).collect();
    let extent: CompensatedSum<f64> = outcomes.iter().map(|t| t.extent).collect();
    let n = trials as f64;
    let (ci_lo, ci_hi) = wilson_interval(successes, trials);
    Ok(CellResult {
        dim: window.dimension,
        alpha: params.alpha.as_f64(),
        lambda: params.lambda.as_f64(),
        extent: window.extent,
        trials,
        successes,
        p_hat: successes as f64 / n,
        ci_lo,
        ci_hi,
        mean_reach_frac: reach.value() / n,
        mean_extent: extent.value() / n,
        seed: master_seed,
    })
}

fn default_power() -> f64 {
    1.0
}

/// Grid of cells to estimate: the Cartesian product of `alpha`, `lambda`
/// and `extent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub dimension: Dimension,
    #[serde(alias = "alphas")]
    pub alpha: Vec<f64>,
    #[serde(alias = "lambdas")]
    pub lambda: Vec<f64>,
    #[serde(alias = "extents")]
    pub extent: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default = "default_power")]
    pub p_t: f64,
    #[serde(default = "default_power")]
    pub tau: f64,
}

impl SweepSpec {
    pub fn new(dimension: Dimension, alpha: Vec<f64>, lambda: Vec<f64>, extent: Vec<f64>, trials: u64, master_seed: u64) -> Self {
        Self { dimension, alpha, lambda, extent, trials, master_seed, metric: Metric::FullCoverage, p_t: 1.0, tau: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_empty() || self.lambda.is_empty() || self.extent.is_empty() {
            return Err(Error::InvalidParameter("alpha, lambda and extent lists must be non-empty".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        for &a in &self.alpha {
            for &l in &self.lambda {
                ModelParams::new(a, l, self.p_t, self.tau)?;
            }
        }
        for &e in &self.extent {
            Window::new(self.dimension, e)?;
        }
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let spec: Self = serde_json::from_str(&text)
            .map_err(|e| Error::Parse { line: e.line(), message: format!("{}: {e}", path.display()) })?;
        spec.validate()?;
        Ok(spec)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), message: e.to_string() }
}

/// All cells of a sweep, in `alpha`, `lambda`, `extent` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<CellResult>,
    pub master_seed: u64,
    pub metric: Metric,
    pub seed_hash: String,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.cells {
            writeln!(out, "{}", c.csv_row()).expect("writing to a String");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep results serialize")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| io_error(path, e))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| io_error(path, e))
    }
}

/// Estimates every cell of `spec`.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &alpha in &spec.alpha {
        for &lambda in &spec.lambda {
            let params = ModelParams::new(alpha, lambda, spec.p_t, spec.tau)?;
            for &extent in &spec.extent {
                let window = Window::new(spec.dimension, extent)?;
                cells.push(estimate_broadcast_prob(&params, &window, spec.trials, spec.master_seed, spec.metric)?);
            }
        }
    }
    Ok(SweepResult { cells, master_seed: spec.master_seed, metric: spec.metric, seed_hash: SEED_HASH.to_string() })
}

/// Regime label of one `(dimension, alpha, lambda)` series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Success probability falls away as the window grows.
    Vanishing,
    /// Success probability levels off above the floor.
    Persistent,
    Inconclusive,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Vanishing => "vanishing",
            Regime::Persistent => "persistent",
            Regime::Inconclusive => "inconclusive",
        })
    }
}

/// Thresholds of [`classify_regimes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// Vanishing needs `p(largest) < ratio * p(smallest)`.
    pub ratio: f64,
    /// Persistent needs `p(largest) > floor`.
    pub floor: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { ratio: 0.5, floor: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub dim: Dimension,
    pub alpha: f64,
    pub lambda: f64,
    pub regime: Regime,
    /// Cells of the series, sorted by extent.
    pub cells: Vec<CellResult>,
}

fn overlaps(a: &CellResult, b: &CellResult) -> bool {
    a.ci_lo <= b.ci_hi && b.ci_lo <= a.ci_hi
}

/// Extent pairs where `p_hat` rises with a significant gap between the
/// intervals; larger windows should never be easier to cover.
pub fn monotonicity_violations(cells: &[CellResult]) -> Vec<(CellResult, CellResult)> {
    group_series(cells)
        .into_values()
        .flat_map(|series| {
            series
                .windows(2)
                .filter(|w| w[1].ci_lo > w[0].ci_hi)
                .map(|w| (w[0].clone(), w[1].clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

type SeriesKey = (Dimension, u64, u64);

fn group_series(cells: &[CellResult]) -> BTreeMap<SeriesKey, Vec<CellResult>> {
    let mut groups: BTreeMap<SeriesKey, Vec<CellResult>> = BTreeMap::new();
    for c in cells {
        groups.entry((c.dim, c.alpha.to_bits(), c.lambda.to_bits())).or_default().push(c.clone());
    }
    for series in groups.values_mut() {
        series.sort_by(|a, b| a.extent.total_cmp(&b.extent));
    }
    groups
}

/// Labels one series of cells sorted by extent.
pub fn classify_series(series: &[CellResult], config: ClassifyConfig) -> Result<Regime> {
    if series.len() < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 window extents, got {}", series.len())));
    }
    let first = &series[0];
    let last = &series[series.len() - 1];
    let decreasing = series.windows(2).all(|w| w[1].p_hat <= w[0].p_hat || overlaps(&w[0], &w[1]));
    if last.p_hat < config.ratio * first.p_hat && decreasing {
        return Ok(Regime::Vanishing);
    }
    let before_last = &series[series.len() - 2];
    if overlaps(before_last, last) && last.p_hat > config.floor {
        return Ok(Regime::Persistent);
    }
    Ok(Regime::Inconclusive)
}

/// Groups the cells by `(dimension, alpha, lambda)` and labels each series.
pub fn classify_regimes(result: &SweepResult, config: ClassifyConfig) -> Result<Vec<RegimeRow>> {
    let mut rows = Vec::new();
    for ((dim, alpha, lambda), cells) in group_series(&result.cells) {
        let regime = classify_series(&cells, config)?;
        rows.push(RegimeRow { dim, alpha: f64::from_bits(alpha), lambda: f64::from_bits(lambda), regime, cells });
    }
    rows.sort_by(|a, b| (a.dim, a.alpha, a.lambda).partial_cmp(&(b.dim, b.alpha, b.lambda)).expect("finite keys"));
    Ok(rows)
}

/// Default window half-widths for regime classification.
pub const DEFAULT_EXTENTS_1D: [f64; 4] = [25.0, 50.0, 100.0, 200.0];
/// Half-widths of squares with sides 10, 20, 30, 40.
pub const DEFAULT_EXTENTS_2D: [f64; 4] = [5.0, 10.0, 15.0, 20.0];

/// One row of the built-in regime table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRowSpec {
    pub dimension: Dimension,
    pub alpha: f64,
    pub lambda: f64,
    pub expected: Regime,
    /// Boundary rows (critical exponent) may come out inconclusive at
    /// desk-scale window sizes.
    pub boundary: bool,
    pub claim: &'static str,
}

/// The six regimes: below, at and above the critical exponent on the line
/// and in the plane, all at density 2. The supercritical exponents sit well
/// above the critical ones; just above them the decay only shows in windows
/// far larger than these.
pub const TABLE1_ROWS: [TableRowSpec; 6] = [
    TableRowSpec { dimension: Dimension::One, alpha: 0.5, lambda: 2.0, expected: Regime::Persistent, boundary: false, claim: "alpha < 1: 0 < P(B) < 1 for all lambda > 0" },
    TableRowSpec { dimension: Dimension::One, alpha: 1.0, lambda: 2.0, expected: Regime::Persistent, boundary: true, claim: "alpha = 1: 0 < P(B) < 1 for lambda > 1" },
    TableRowSpec { dimension: Dimension::One, alpha: 2.0, lambda: 2.0, expected: Regime::Vanishing, boundary: false, claim: "alpha > 1: P(B) = 0" },
    TableRowSpec { dimension: Dimension::Two, alpha: 1.5, lambda: 2.0, expected: Regime::Persistent, boundary: false, claim: "alpha < 2: 0 < P(B) < 1 for all lambda > 0" },
    TableRowSpec { dimension: Dimension::Two, alpha: 2.0, lambda: 2.0, expected: Regime::Persistent, boundary: true, claim: "alpha = 2: 0 < P(B) < 1 for lambda > 4/pi" },
    TableRowSpec { dimension: Dimension::Two, alpha: 6.0, lambda: 2.0, expected: Regime::Vanishing, boundary: false, claim: "alpha > 2: P(B) = 0" },
];

/// Observed regime of one table row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub dim: Dimension,
    pub alpha: f64,
    pub lambda: f64,
    pub expected: Regime,
    pub observed: Regime,
    pub boundary: bool,
    pub claim: &'static str,
    pub cells: Vec<CellResult>,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.observed == self.expected
    }

    /// A mismatch that is not excused as an inconclusive boundary row.
    pub fn is_failure(&self) -> bool {
        !self.matches() && !(self.boundary && self.observed == Regime::Inconclusive)
    }
}

/// Runs the built-in regime grid with default window schedules.
pub fn run_table1(trials: u64, master_seed: u64, config: ClassifyConfig) -> Result<Vec<TableRow>> {
    TABLE1_ROWS
        .iter()
        .map(|row| {
            let extents = match row.dimension {
                Dimension::One => DEFAULT_EXTENTS_1D.to_vec(),
                Dimension::Two => DEFAULT_EXTENTS_2D.to_vec(),
            };
            let spec = SweepSpec::new(row.dimension, vec![row.alpha], vec![row.lambda], extents, trials, master_seed);
            let result = run_sweep(&spec)?;
            let series = group_series(&result.cells).into_values().next().expect("one series");
            Ok(TableRow {
                dim: row.dimension,
                alpha: row.alpha,
                lambda: row.lambda,
                expected: row.expected,
                observed: classify_series(&series, config)?,
                boundary: row.boundary,
                claim: row.claim,
                cells: series,
            })
        })
        .collect()
}
