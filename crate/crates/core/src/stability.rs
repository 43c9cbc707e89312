//! Stability verdicts, region maps over the `(rho, theta)` plane, the traced
//! `lambda_hat = 1` boundary and comparison against external data.
//!
//! A helicoid is stable when the smallest eigenvalue `lambda_hat` of the
//! reduced problem exceeds one and unstable when it is below one. Two
//! one-sided closed-form tests settle many points without a solve: the
//! fixed-point lower bound certifies stability and the test-function
//! Rayleigh quotient certifies instability.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{lambda1_bound, sufficient_stability_lhs, test_function_bound};
use crate::eigen1d::{lambda_hat_with, DEFAULT_K_CHECK, DEFAULT_NODES};
use crate::error::{Error, Result};
use crate::geometry::FilmParams;
use crate::gep::SolverConfig;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Stable,
    Unstable,
    Inconclusive,
}

/// What decided a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Closed-form lower bound above one; only ever yields `Stable`.
    AnalyticSufficient,
    /// Test-function Rayleigh quotient below one; only ever yields `Unstable`.
    /// Also reported for analytic-only runs where neither test fires.
    AnalyticTestFunction,
    /// Numerical smallest eigenvalue compared against one.
    Numeric,
}

/// Which computations `classify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MethodSelection {
    Analytic,
    Numeric,
    /// Analytic tests decide when they can, the eigensolver always runs.
    #[default]
    Both,
}

macro_rules! display_as_debug {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Debug::fmt(self, f)
            }
        }
    )*};
}
display_as_debug!(Status, Method, MethodSelection);

impl std::str::FromStr for Status {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "Stable" => Ok(Status::Stable),
            "Unstable" => Ok(Status::Unstable),
            "Inconclusive" => Ok(Status::Inconclusive),
            _ => Err(format!("unknown status `{s}`")),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "AnalyticSufficient" => Ok(Method::AnalyticSufficient),
            "AnalyticTestFunction" => Ok(Method::AnalyticTestFunction),
            "Numeric" => Ok(Method::Numeric),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig<T> {
    /// 1D resolution.
    pub nodes: usize,
    /// Axial modes solved to confirm `k = 1` is the minimum.
    pub k_check: usize,
    /// Half-width of the marginal band around `lambda_hat = 1`.
    pub tol: T,
    pub method: MethodSelection,
    pub solver: SolverConfig<T>,
}

impl<T: Real> Default for ClassifyConfig<T> {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            k_check: DEFAULT_K_CHECK,
            tol: T::lit(1e-6).max(T::tolerance_floor()),
            method: MethodSelection::Both,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict<T> {
    pub status: Status,
    pub method: Method,
    pub lambda_hat: Option<T>,
    pub lambda_bar: Option<T>,
    pub lambda1: Option<T>,
    /// Deciding quantity minus one.
    pub margin: T,
}

impl<T: Real> StabilityVerdict<T> {
    /// Whether an analytic verdict agrees with the numeric eigenvalue (when
    /// both are present) up to `tol`.
    pub fn is_sound(&self, tol: T) -> bool {
        match (self.method, self.lambda_hat) {
            (Method::AnalyticSufficient, Some(l)) => l >= T::one() - tol,
            (Method::AnalyticTestFunction, Some(l)) if self.status == Status::Unstable => {
                l <= T::one() + tol
            }
            _ => true,
        }
    }
}

fn numeric_status<T: Real>(lambda: T, tol: T) -> Status {
    if lambda > T::one() + tol {
        Status::Stable
    } else if lambda < T::one() - tol {
        Status::Unstable
    } else {
        Status::Inconclusive
    }
}

/// Classifies one helicoid.
///
/// Order of evaluation: closed-form stability test, test-function
/// instability test, then the numeric eigenvalue with its marginal band.
/// The first test that fires decides; with [`MethodSelection::Both`] the
/// eigensolver still runs so its value is recorded.
pub fn classify<T: Real>(
    p: &FilmParams<T>,
    cfg: &ClassifyConfig<T>,
) -> Result<StabilityVerdict<T>> {
    let run_analytic = cfg.method != MethodSelection::Numeric;
    let run_numeric = cfg.method != MethodSelection::Analytic;

    let (lambda1, lambda_bar, lhs) = if run_analytic {
        (
            Some(lambda1_bound(p)?),
            Some(test_function_bound(p)),
            sufficient_stability_lhs(p),
        )
    } else {
        (None, None, None)
    };

    let lambda_hat = if run_numeric {
        Some(lambda_hat_with(p, cfg.nodes, cfg.k_check, &cfg.solver)?.lambda)
    } else {
        None
    };

    let verdict = |status, method, margin| StabilityVerdict {
        status,
        method,
        lambda_hat,
        lambda_bar,
        lambda1,
        margin,
    };

    if let Some(v) = lhs.filter(|&v| v > T::one()) {
        return Ok(verdict(
            Status::Stable,
            Method::AnalyticSufficient,
            v - T::one(),
        ));
    }
    if let Some(lb) = lambda_bar {
        if lb < T::one() {
            return Ok(verdict(
                Status::Unstable,
                Method::AnalyticTestFunction,
                lb - T::one(),
            ));
        }
    }
    match lambda_hat {
        Some(l) => Ok(verdict(
            numeric_status(l, cfg.tol),
            Method::Numeric,
            l - T::one(),
        )),
        None => {
            let lb = lambda_bar.expect("analytic run computes the test-function bound");
            Ok(verdict(
                Status::Inconclusive,
                Method::AnalyticTestFunction,
                lb - T::one(),
            ))
        }
    }
}

/// `steps` equally spaced values from `lo` to `hi` inclusive.
pub fn linspace<T: Real>(lo: T, hi: T, steps: usize) -> Vec<T> {
    let last = steps - 1;
    (0..steps)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + (hi - lo) * T::count(i) / T::count(last)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell<T> {
    pub rho: T,
    pub theta: T,
    pub verdict: Option<StabilityVerdict<T>>,
    /// Set instead of `verdict` when classification failed for this cell.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap<T> {
    pub rho_axis: Vec<T>,
    pub theta_axis: Vec<T>,
    /// Row-major in `theta`: cell `(ir, it)` sits at `it * rho_axis.len() + ir`.
    pub cells: Vec<RegionCell<T>>,
}

impl<T: Real> RegionMap<T> {
    pub fn cell(&self, ir: usize, it: usize) -> &RegionCell<T> {
        &self.cells[it * self.rho_axis.len() + ir]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub rho: (T, T),
    pub theta: (T, T),
    pub rho_steps: usize,
    pub theta_steps: usize,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            rho: (T::lit(0.5), T::lit(4.0)),
            theta: (T::zero(), T::lit(3.0)),
            rho_steps: 36,
            theta_steps: 31,
        }
    }
}

fn check_range<T: Real>(name: &'static str, (lo, hi): (T, T), steps: usize) -> Result<()> {
    if !(hi > lo) {
        return Err(Error::range(
            name,
            lo.to_f64_lossy(),
            "range must have positive length",
        ));
    }
    if steps < 2 {
        return Err(Error::range(name, steps as f64, "need at least 2 steps"));
    }
    Ok(())
}

/// Classifies every point of a `(rho, theta)` grid. Cells are independent;
/// a failing cell records its error and the sweep continues.
pub fn region_map<T: Real>(grid: &GridSpec<T>, cfg: &ClassifyConfig<T>) -> Result<RegionMap<T>> {
    check_range("rho", grid.rho, grid.rho_steps)?;
    check_range("theta", grid.theta, grid.theta_steps)?;
    if !(grid.rho.0 > T::zero()) {
        return Err(Error::range(
            "rho",
            grid.rho.0.to_f64_lossy(),
            "must be positive",
        ));
    }
    if !(grid.theta.0 >= T::zero()) {
        return Err(Error::range(
            "theta",
            grid.theta.0.to_f64_lossy(),
            "must be nonnegative",
        ));
    }
    let rho_axis = linspace(grid.rho.0, grid.rho.1, grid.rho_steps);
    let theta_axis = linspace(grid.theta.0, grid.theta.1, grid.theta_steps);
    let nr = rho_axis.len();

    let cells = (0..nr * theta_axis.len())
        .into_par_iter()
        .map(|idx| {
            let (rho, theta) = (rho_axis[idx % nr], theta_axis[idx / nr]);
            let outcome = FilmParams::new(rho, theta).and_then(|p| classify(&p, cfg));
            match outcome {
                Ok(v) => RegionCell {
                    rho,
                    theta,
                    verdict: Some(v),
                    error: None,
                },
                Err(e) => RegionCell {
                    rho,
                    theta,
                    verdict: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    Ok(RegionMap {
        rho_axis,
        theta_axis,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceConfig<T> {
    /// Initial bracket in `rho`.
    pub rho_bracket: (T, T),
    /// The lower end is halved down to this before giving up.
    pub rho_min: T,
    /// The upper end is doubled up to this before giving up.
    pub rho_max: T,
    /// Final bracket width in `rho`.
    pub rho_tol: T,
    pub nodes: usize,
    pub solver: SolverConfig<T>,
}

impl<T: Real> Default for TraceConfig<T> {
    fn default() -> Self {
        Self {
            rho_bracket: (T::lit(0.5), T::lit(4.0)),
            rho_min: T::lit(0.05),
            rho_max: T::lit(64.0),
            rho_tol: T::lit(1e-6),
            nodes: DEFAULT_NODES,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundarySample<T> {
    pub theta: T,
    /// `None` when no sign change of `lambda_hat - 1` was found.
    pub rho_star: Option<T>,
    /// `lambda_hat(rho_star, theta) - 1`.
    pub residual: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve<T> {
    pub samples: Vec<BoundarySample<T>>,
    /// Whether the found `rho_star` values never increase with `theta`.
    /// Reported only; nothing guarantees it.
    pub nonincreasing: bool,
}

fn lambda_hat_k1<T: Real>(rho: T, theta: T, cfg: &TraceConfig<T>) -> Result<T> {
    let p = FilmParams::new(rho, theta)?;
    Ok(lambda_hat_with(&p, cfg.nodes, 1, &cfg.solver)?.lambda)
}

/// Locates `rho_star(theta)` with `lambda_hat(rho_star, theta) = 1`.
pub fn crossing<T: Real>(theta: T, cfg: &TraceConfig<T>) -> Result<BoundarySample<T>> {
    let f = |rho: T| lambda_hat_k1(rho, theta, cfg).map(|l| l - T::one());
    let none = BoundarySample {
        theta,
        rho_star: None,
        residual: None,
    };
    let two = T::lit(2.0);

    let (mut lo, mut hi) = cfg.rho_bracket;
    let mut f_lo = f(lo)?;
    while f_lo <= T::zero() && lo / two >= cfg.rho_min {
        hi = lo;
        lo = lo / two;
        f_lo = f(lo)?;
    }
    if f_lo <= T::zero() {
        return Ok(none);
    }
    let mut f_hi = f(hi)?;
    while f_hi >= T::zero() && hi * two <= cfg.rho_max {
        lo = hi;
        hi = hi * two;
        f_hi = f(hi)?;
    }
    if f_hi >= T::zero() {
        return Ok(none);
    }
    let root = crate::roots::bisect(f, lo, hi, cfg.rho_tol, 200)?;
    Ok(BoundarySample {
        theta,
        rho_star: Some(root.x),
        residual: Some(root.fx),
    })
}

pub fn trace_boundary<T: Real>(
    theta_range: (T, T),
    steps: usize,
    cfg: &TraceConfig<T>,
) -> Result<BoundaryCurve<T>> {
    if !(theta_range.0 >= T::zero()) {
        return Err(Error::range(
            "theta",
            theta_range.0.to_f64_lossy(),
            "must be nonnegative",
        ));
    }
    let thetas = if steps == 1 {
        vec![theta_range.0]
    } else {
        check_range("theta", theta_range, steps)?;
        linspace(theta_range.0, theta_range.1, steps)
    };
    let samples = thetas
        .into_par_iter()
        .map(|t| crossing(t, cfg))
        .collect::<Result<Vec<_>>>()?;
    let found: Vec<T> = samples.iter().filter_map(|s| s.rho_star).collect();
    let nonincreasing = found.windows(2).all(|w| w[1] <= w[0]);
    Ok(BoundaryCurve {
        samples,
        nonincreasing,
    })
}

/// One row of an external marginal-stability dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPoint<T> {
    pub rho: T,
    pub theta: T,
    pub err_rho: T,
    pub err_theta: T,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateConfig<T> {
    /// Half-width of the band `|lambda_hat - 1| <= band`.
    pub band: T,
    /// Samples per axis of the error box.
    pub box_samples: usize,
    pub nodes: usize,
    pub solver: SolverConfig<T>,
}

impl<T: Real> Default for ValidateConfig<T> {
    fn default() -> Self {
        Self {
            band: T::lit(0.05),
            box_samples: 5,
            nodes: DEFAULT_NODES,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRow<T> {
    pub point: DataPoint<T>,
    /// Eigenvalue at the nominal point.
    pub lambda_hat: T,
    pub status: Status,
    /// Range of `lambda_hat` over the sampled error box.
    pub lambda_min: T,
    pub lambda_max: T,
    /// Whether the error box reaches the marginal band.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport<T> {
    pub rows: Vec<ValidationRow<T>>,
    pub passed: usize,
    pub failed: usize,
}

fn box_axis<T: Real>(center: T, err: T, samples: usize, floor: T) -> Vec<T> {
    if err == T::zero() || samples < 2 {
        return vec![center];
    }
    linspace((center - err).max(floor), center + err, samples)
}

/// Checks each point's error box against the marginal band around
/// `lambda_hat = 1`. Since `lambda_hat` is continuous, the box meets the
/// band when the sampled range of `lambda_hat` overlaps it.
pub fn validate<T: Real>(
    points: &[DataPoint<T>],
    cfg: &ValidateConfig<T>,
) -> Result<ValidationReport<T>> {
    let bad: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            !(p.rho > T::zero()
                && p.theta >= T::zero()
                && p.err_rho >= T::zero()
                && p.err_theta >= T::zero())
        })
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::Ingestion {
            lines: bad,
            detail: "rho must be positive; theta and errors nonnegative".into(),
        });
    }

    let eval = |rho: T, theta: T| -> Result<T> {
        let p = FilmParams::new(rho, theta)?;
        Ok(lambda_hat_with(&p, cfg.nodes, 1, &cfg.solver)?.lambda)
    };

    let rows = points
        .par_iter()
        .map(|pt| -> Result<ValidationRow<T>> {
            let nominal = eval(pt.rho, pt.theta)?;
            let rho_floor = pt.rho * T::lit(1e-3);
            let mut lo = nominal;
            let mut hi = nominal;
            for r in box_axis(pt.rho, pt.err_rho, cfg.box_samples, rho_floor) {
                for t in box_axis(pt.theta, pt.err_theta, cfg.box_samples, T::zero()) {
                    let l = eval(r, t)?;
                    lo = lo.min(l);
                    hi = hi.max(l);
                }
            }
            let pass = lo <= T::one() + cfg.band && hi >= T::one() - cfg.band;
            Ok(ValidationRow {
                point: pt.clone(),
                lambda_hat: nominal,
                status: numeric_status(nominal, cfg.band),
                lambda_min: lo,
                lambda_max: hi,
                pass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(ValidationReport {
        failed: rows.len() - passed,
        passed,
        rows,
    })
}
