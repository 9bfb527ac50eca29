//! Monge-Ampère capacities of Reinhardt sets and the inequalities they obey
//! along geometric-mean interpolation.
//!
//! For a complete log-convex compact `K` in the unit polydisk,
//! `Cap(K, D^n) = n! Covol(Q°)` with `Q = Log K`. Along `K_t = K_0^{1-t} K_1^t`
//! the capacity is log-convex in `t` (hence also convex), while the volume of
//! `K_t` is log-concave.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logbody::LogBody;
use crate::measures::{covolume, factorial, reinhardt_volume, Budget, IntegralEstimate, Method};

/// Verdicts use this many standard errors / error bounds.
pub const VERDICT_SIGMAS: f64 = 3.0;

/// Relative slack covering floating rounding when all estimates are exact.
const ROUNDING_FLOOR: f64 = 1e-12;

pub const DEFAULT_GRID_POINTS: usize = 21;

/// Strictly increasing parameter grid in `[0, 1]` containing both endpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TGrid(Vec<f64>);

impl TGrid {
    pub fn uniform(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {count}"
            )));
        }
        let last = (count - 1) as f64;
        Ok(Self((0..count).map(|i| i as f64 / last).collect()))
    }

    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.first() != Some(&0.0) || points.last() != Some(&1.0) {
            return Err(Error::InvalidGrid("must start at 0 and end at 1".into()));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid("must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }
}

impl Default for TGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_GRID_POINTS).expect("default grid")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityRecord {
    pub t: f64,
    pub cap: f64,
    pub cap_err: f64,
    pub log_cap: f64,
    /// `(1 - t) C0 + t C1`
    pub linear_bound: f64,
    /// `C0^(1-t) C1^t`
    pub geometric_bound: f64,
    /// `log geometric_bound - log cap`, nonnegative in exact arithmetic.
    pub margin_log: f64,
}

/// Tolerances the verdicts compared each record against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecordTolerance {
    pub margin_log: f64,
    pub linear: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub dual_bm_holds: bool,
    pub linear_bound_holds: bool,
    /// Canonical forms of the two bodies coincide.
    pub equality_case: bool,
    /// In the equality case every margin vanishes within tolerance;
    /// trivially true otherwise.
    pub equality_consistent: bool,
}

impl Verdicts {
    pub fn all_hold(&self) -> bool {
        self.dual_bm_holds && self.linear_bound_holds && self.equality_consistent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorstMargins {
    /// Smallest `margin_log` over interior grid points.
    pub margin_log: f64,
    /// Smallest `linear_bound - cap` over interior grid points.
    pub linear: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub records: Vec<CapacityRecord>,
    pub tolerances: Vec<RecordTolerance>,
    pub verdicts: Verdicts,
    pub worst_margins: WorstMargins,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeRecord {
    pub t: f64,
    pub vol: f64,
    pub vol_err: f64,
    pub log_vol: f64,
    /// `V0^(1-t) V1^t`
    pub geometric_bound: f64,
    /// `log vol - log geometric_bound`, nonnegative in exact arithmetic.
    pub margin_log: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub records: Vec<VolumeRecord>,
    pub log_concave_holds: bool,
    pub worst_margin_log: f64,
}

/// A margin together with its propagated (one-sigma / one-bound) error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Margin {
    pub value: f64,
    pub error: f64,
}

/// `Cap(K, D^n) = n! Covol(Q°)`.
pub fn capacity(q: &LogBody, method: Method, budget: &Budget) -> Result<IntegralEstimate> {
    Ok(covolume(q, method, budget)?.scaled(factorial(q.dim())))
}

/// Capacity with respect to the polydisk of radius `radius`, computed as
/// `Cap((1/R) K, D^n)`.
pub fn capacity_scaled(
    q: &LogBody,
    radius: f64,
    method: Method,
    budget: &Budget,
) -> Result<IntegralEstimate> {
    capacity(&rescaled(q, radius)?, method, budget)
}

/// `Log((1/R) K)`.
pub fn rescaled(q: &LogBody, radius: f64) -> Result<LogBody> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::ParameterOutOfRange {
            name: "R",
            value: radius,
            range: "(0, inf)",
        });
    }
    let log_radius = radius.ln();
    let too_big = |index, value| Error::ScaleTooSmall {
        index,
        value,
        log_radius,
    };
    for (index, y) in q.generators().iter().enumerate() {
        if let Some(&value) = y.iter().find(|&&v| v >= log_radius) {
            return Err(too_big(index, value));
        }
    }
    q.shifted(-log_radius).map_err(|e| match e {
        Error::NonNegativeCoordinate { index, value, .. } => too_big(index, value + log_radius),
        other => other,
    })
}

/// Combines per-term errors: linearly for deterministic bounds, in
/// quadrature for independent standard errors.
fn combine(terms: &[f64], statistical: bool) -> f64 {
    if statistical {
        terms.iter().map(|e| e * e).sum::<f64>().sqrt()
    } else {
        terms.iter().sum()
    }
}

fn check_pair(q0: &LogBody, q1: &LogBody) -> Result<()> {
    if q0.dim() != q1.dim() {
        return Err(Error::DimensionMismatch {
            expected: q0.dim(),
            found: q1.dim(),
        });
    }
    Ok(())
}

/// Capacity along `K_t = K_0^{1-t} K_1^t` with the dual Brunn-Minkowski and
/// linear-bound verdicts.
///
/// Monte Carlo estimates reuse `budget.seed` at every grid point (common
/// random numbers), which keeps the margins far less noisy than the
/// independent-error tolerance assumes.
pub fn sweep(
    q0: &LogBody,
    q1: &LogBody,
    grid: &TGrid,
    method: Method,
    budget: &Budget,
) -> Result<SweepReport> {
    check_pair(q0, q1)?;
    let estimates = grid
        .points()
        .iter()
        .map(|&t| capacity(&q0.interpolate(q1, t)?, method, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_sweep(q0 == q1, grid, &estimates))
}

/// Sweep of sets inside the polydisk of radius `radius`, each interpolated
/// set measured with [`capacity_scaled`].
pub fn sweep_scaled(
    q0: &LogBody,
    q1: &LogBody,
    radius: f64,
    grid: &TGrid,
    method: Method,
    budget: &Budget,
) -> Result<SweepReport> {
    check_pair(q0, q1)?;
    let estimates = grid
        .points()
        .iter()
        .map(|&t| capacity_scaled(&q0.interpolate(q1, t)?, radius, method, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_sweep(q0 == q1, grid, &estimates))
}

fn assemble_sweep(equal: bool, grid: &TGrid, estimates: &[IntegralEstimate]) -> SweepReport {
    let first = estimates[0];
    let last = estimates[estimates.len() - 1];
    let (c0, c1) = (first.value, last.value);
    let statistical = estimates.iter().any(|e| e.method.is_statistical());

    let mut records = Vec::with_capacity(estimates.len());
    let mut tolerances = Vec::with_capacity(estimates.len());
    for (&t, est) in grid.points().iter().zip(estimates) {
        let log_cap = est.value.ln();
        let geometric_log = (1.0 - t) * c0.ln() + t * c1.ln();
        let linear_bound = (1.0 - t) * c0 + t * c1;
        records.push(CapacityRecord {
            t,
            cap: est.value,
            cap_err: est.error,
            log_cap,
            linear_bound,
            geometric_bound: geometric_log.exp(),
            margin_log: geometric_log - log_cap,
        });
        let log_terms = [
            (1.0 - t) * first.relative_error(),
            t * last.relative_error(),
            est.relative_error(),
        ];
        let lin_terms = [(1.0 - t) * first.error, t * last.error, est.error];
        tolerances.push(RecordTolerance {
            margin_log: VERDICT_SIGMAS * combine(&log_terms, statistical)
                + ROUNDING_FLOOR * (1.0 + geometric_log.abs()),
            linear: VERDICT_SIGMAS * combine(&lin_terms, statistical)
                + ROUNDING_FLOOR * linear_bound,
        });
    }

    let interior = || {
        records
            .iter()
            .zip(&tolerances)
            .filter(|(r, _)| r.t > 0.0 && r.t < 1.0)
    };
    let dual_bm_holds = interior().all(|(r, tol)| r.margin_log >= -tol.margin_log);
    let linear_bound_holds = interior().all(|(r, tol)| r.linear_bound - r.cap >= -tol.linear);
    let equality_consistent = !equal
        || records
            .iter()
            .zip(&tolerances)
            .all(|(r, tol)| r.margin_log.abs() <= tol.margin_log);
    let worst_margins = WorstMargins {
        margin_log: interior()
            .map(|(r, _)| r.margin_log)
            .fold(f64::INFINITY, f64::min),
        linear: interior()
            .map(|(r, _)| r.linear_bound - r.cap)
            .fold(f64::INFINITY, f64::min),
    };

    SweepReport {
        records,
        tolerances,
        verdicts: Verdicts {
            dual_bm_holds,
            linear_bound_holds,
            equality_case: equal,
            equality_consistent,
        },
        worst_margins,
    }
}

/// Volumes along the same interpolation, checking log-concavity
/// `Vol(K_t) >= Vol(K_0)^{1-t} Vol(K_1)^t`.
pub fn check_volume_bm(
    q0: &LogBody,
    q1: &LogBody,
    grid: &TGrid,
    method: Method,
    budget: &Budget,
) -> Result<VolumeReport> {
    check_pair(q0, q1)?;
    let estimates = grid
        .points()
        .iter()
        .map(|&t| reinhardt_volume(&q0.interpolate(q1, t)?, method, budget))
        .collect::<Result<Vec<_>>>()?;
    let first = estimates[0];
    let last = estimates[estimates.len() - 1];
    let statistical = estimates.iter().any(|e| e.method.is_statistical());

    let records: Vec<VolumeRecord> = grid
        .points()
        .iter()
        .zip(&estimates)
        .map(|(&t, est)| {
            let log_vol = est.value.ln();
            let geometric_log = (1.0 - t) * first.value.ln() + t * last.value.ln();
            let terms = [
                (1.0 - t) * first.relative_error(),
                t * last.relative_error(),
                est.relative_error(),
            ];
            VolumeRecord {
                t,
                vol: est.value,
                vol_err: est.error,
                log_vol,
                geometric_bound: geometric_log.exp(),
                margin_log: log_vol - geometric_log,
                tolerance: VERDICT_SIGMAS * combine(&terms, statistical)
                    + ROUNDING_FLOOR * (1.0 + geometric_log.abs()),
            }
        })
        .collect();
    let log_concave_holds = records.iter().all(|r| r.margin_log >= -r.tolerance);
    let worst_margin_log = records
        .iter()
        .filter(|r| r.t > 0.0 && r.t < 1.0)
        .map(|r| r.margin_log)
        .fold(f64::INFINITY, f64::min);
    Ok(VolumeReport {
        records,
        log_concave_holds,
        worst_margin_log,
    })
}

/// `(1 - t) log C0 + t log C1 - log C_t`, positive unless the bodies coincide.
pub fn equality_margin(
    q0: &LogBody,
    q1: &LogBody,
    t: f64,
    method: Method,
    budget: &Budget,
) -> Result<Margin> {
    check_pair(q0, q1)?;
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::ParameterOutOfRange {
            name: "t",
            value: t,
            range: "(0, 1)",
        });
    }
    let c0 = capacity(q0, method, budget)?;
    let c1 = capacity(q1, method, budget)?;
    let ct = capacity(&q0.interpolate(q1, t)?, method, budget)?;
    let statistical = [c0, c1, ct].iter().any(|e| e.method.is_statistical());
    let value = (1.0 - t) * c0.value.ln() + t * c1.value.ln() - ct.value.ln();
    let error = combine(
        &[
            (1.0 - t) * c0.relative_error(),
            t * c1.relative_error(),
            ct.relative_error(),
        ],
        statistical,
    ) + ROUNDING_FLOOR * (1.0 + ct.value.ln().abs());
    Ok(Margin { value, error })
}
