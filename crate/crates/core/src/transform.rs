//! Geodesics and relative extremal functions in logarithmic coordinates.
//!
//! For Reinhardt data in the unit polydisk the geodesic between the relative
//! extremal functions of `K0` and `K1` is, in the variables `s = log|z|`,
//!
//! ```text
//! u_t(s) = sup_{a >= 0} <a, s> - f_t(a),
//! f_t(a) = (1 - t) max(h_{Q0}(a) + 1, 0) + t max(h_{Q1}(a) + 1, 0).
//! ```
//!
//! The objective is concave and piecewise linear, so the supremum is the
//! optimum of a small linear program and is computed exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::logbody::{DualVector, LogBody};
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// Absolute tolerance for deciding `u_t(s) = -1`.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSpec {
    q0: LogBody,
    q1: LogBody,
    t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialValue {
    pub value: f64,
    /// A dual point attaining the supremum. Not unique in general.
    pub maximizer: DualVector,
}

impl GeodesicSpec {
    pub fn new(q0: LogBody, q1: LogBody, t: f64) -> Result<Self> {
        if q0.dim() != q1.dim() {
            return Err(Error::DimensionMismatch {
                expected: q0.dim(),
                found: q1.dim(),
            });
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange {
                name: "t",
                value: t,
                range: "[0, 1]",
            });
        }
        Ok(Self { q0, q1, t })
    }

    pub fn q0(&self) -> &LogBody {
        &self.q0
    }

    pub fn q1(&self) -> &LogBody {
        &self.q1
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.q0.dim()
    }

    /// Same pair at another parameter value.
    pub fn at(&self, t: f64) -> Result<Self> {
        Self::new(self.q0.clone(), self.q1.clone(), t)
    }

    /// `f_t(a)`, the convex function whose Legendre transform is the geodesic.
    pub fn endpoint_potential(&self, a: &DualVector) -> Result<f64> {
        let h0 = self.q0.support(a)?;
        let h1 = self.q1.support(a)?;
        Ok((1.0 - self.t) * (h0 + 1.0).max(0.0) + self.t * (h1 + 1.0).max(0.0))
    }

    pub fn geodesic_value(&self, s: &[f64]) -> Result<PotentialValue> {
        check_point(self.dim(), s)?;
        legendre(&[(&self.q0, 1.0 - self.t), (&self.q1, self.t)], s)
    }

    /// `s` lies in the level set `{u_t = -1}`.
    pub fn level_contains(&self, s: &[f64]) -> Result<bool> {
        Ok(self.geodesic_value(s)?.value <= -1.0 + LEVEL_TOLERANCE)
    }

    /// `max(u_0(s) - t, u_1(s) + t - 1)` clipped below at `-1`; a lower bound
    /// for the geodesic coming from an explicit subgeodesic.
    pub fn subgeodesic_bound(&self, s: &[f64]) -> Result<f64> {
        let u0 = extremal_value(&self.q0, s)?.value;
        let u1 = extremal_value(&self.q1, s)?.value;
        Ok((u0 - self.t).max(u1 + self.t - 1.0).max(-1.0))
    }
}

/// Relative extremal function of `K` with respect to the unit polydisk,
/// evaluated at `s = log|z|`.
pub fn extremal_value(q: &LogBody, s: &[f64]) -> Result<PotentialValue> {
    check_point(q.dim(), s)?;
    legendre(&[(q, 1.0)], s)
}

fn check_point(dim: usize, s: &[f64]) -> Result<()> {
    if s.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.len(),
        });
    }
    for (coordinate, &value) in s.iter().enumerate() {
        if value > 0.0 || !value.is_finite() {
            return Err(Error::PositiveCoordinate { coordinate, value });
        }
    }
    Ok(())
}

/// `sup_{a >= 0} <a, s> - sum_j w_j max(h_{Q_j}(a) + 1, 0)`.
///
/// Variables: `a` (n entries) then one epigraph variable `e_j >= 0` per body
/// with `e_j >= <a, y> + 1` for every generator `y` of `Q_j`.
fn legendre(terms: &[(&LogBody, f64)], s: &[f64]) -> Result<PotentialValue> {
    let n = s.len();
    let width = n + terms.len();
    let mut objective = s.to_vec();
    objective.extend(terms.iter().map(|(_, w)| -w));
    let mut lp = LinearProgram::new(objective);
    for (j, (q, _)) in terms.iter().enumerate() {
        for y in q.generators() {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(y);
            row[n + j] = -1.0;
            lp.add(row, Relation::Le, -1.0);
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, value } => Ok(PotentialValue {
            value: value.clamp(-1.0, 0.0),
            maximizer: DualVector::new(x[..n].to_vec())?,
        }),
        other => Err(Error::LpNumericalFailure(format!(
            "Legendre program returned {other:?}"
        ))),
    }
}
