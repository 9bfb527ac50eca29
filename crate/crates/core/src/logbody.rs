//! Complete convex log-images of Reinhardt sets.
//!
//! A compact, polynomially convex Reinhardt set `K` in the unit polydisk is
//! determined by `Q = Log K`, a convex subset of the negative orthant that is
//! closed under moving any coordinate further down. We store `Q` by a finite
//! list of generators `y_k`, so that `Q = conv{y_k} + R^n_-`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::facets::Facets;
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// Largest admissible generator coordinate.
pub const MAX_COORDINATE: f64 = -1e-9;

/// Per-coordinate tolerance for comparing canonical bodies and for deciding
/// membership / redundancy.
pub const TOLERANCE: f64 = 1e-12;

/// A nonnegative direction in the dual orthant, the argument of support functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualVector(Vec<f64>);

impl DualVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        for (coordinate, &value) in coords.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeDualCoordinate { coordinate, value });
            }
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for DualVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Polyhedral complete convex body `conv{y_k} + R^n_-`, always held in
/// canonical form: no redundant generator, sorted in descending
/// lexicographic order.
#[derive(Clone, Serialize)]
pub struct LogBody {
    dim: usize,
    generators: Vec<Vec<f64>>,
    #[serde(skip)]
    facets: OnceLock<Option<Facets>>,
}

impl fmt::Debug for LogBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogBody")
            .field("dim", &self.dim)
            .field("generators", &self.generators)
            .finish()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn descending_lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Largest `delta` with `s + delta * 1` in `conv{generators} + R^n_-`.
///
/// `delta >= 0` means `s` belongs to the body. The LP is
/// `max d+ - d-` over `lambda` in the simplex with
/// `sum_k lambda_k y_k - (d+ - d-) 1 >= s`.
pub(crate) fn depth_in(generators: &[Vec<f64>], s: &[f64]) -> Result<f64> {
    let k = generators.len();
    let n = s.len();
    let mut objective = vec![0.0; k + 2];
    objective[k] = 1.0;
    objective[k + 1] = -1.0;
    let mut lp = LinearProgram::new(objective);
    for l in 0..n {
        let mut row: Vec<f64> = generators.iter().map(|y| y[l]).collect();
        row.push(-1.0);
        row.push(1.0);
        lp.add(row, Relation::Ge, s[l]);
    }
    let mut simplex = vec![1.0; k];
    simplex.extend([0.0, 0.0]);
    lp.add(simplex, Relation::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::LpNumericalFailure(format!(
            "depth program returned {other:?}"
        ))),
    }
}

impl LogBody {
    /// Validates the generators and reduces them to canonical form.
    pub fn new(generators: Vec<Vec<f64>>, dim: usize) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for (index, y) in generators.iter().enumerate() {
            check_dim(dim, y.len())?;
            for (coordinate, &value) in y.iter().enumerate() {
                if !(value <= MAX_COORDINATE) || !value.is_finite() {
                    return Err(Error::NonNegativeCoordinate {
                        index,
                        coordinate,
                        value,
                    });
                }
            }
        }
        let generators = canonical_generators(generators)?;
        Ok(Self {
            dim,
            generators,
            facets: OnceLock::new(),
        })
    }

    /// Body with a single generator, i.e. the log-image of a closed polydisk.
    pub fn polydisk(log_radii: Vec<f64>) -> Result<Self> {
        let dim = log_radii.len();
        Self::new(vec![log_radii], dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `h_Q(x) = max_k <x, y_k>`; the recession directions contribute
    /// nothing for `x >= 0`.
    pub fn support(&self, x: &DualVector) -> Result<f64> {
        check_dim(self.dim, x.dim())?;
        Ok(self.support_at(x.as_slice()))
    }

    /// Support function on a raw slice; the caller guarantees `x >= 0` and
    /// matching length.
    #[inline]
    pub fn support_at(&self, x: &[f64]) -> f64 {
        self.generators
            .iter()
            .map(|y| dot(x, y))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Facet inequalities, built on first use; `None` for bodies too large
    /// to enumerate.
    pub(crate) fn facets(&self) -> Option<&Facets> {
        self.facets
            .get_or_init(|| Facets::enumerate(&self.generators, self.dim))
            .as_ref()
    }

    /// Largest `delta` such that `s + delta * (1, ..., 1)` lies in the body.
    pub fn depth(&self, s: &[f64]) -> Result<f64> {
        check_dim(self.dim, s.len())?;
        match self.facets() {
            Some(f) => Ok(f.depth(s)),
            None => depth_in(&self.generators, s),
        }
    }

    pub fn contains(&self, s: &[f64]) -> Result<bool> {
        check_dim(self.dim, s.len())?;
        Ok(self.contains_at(s))
    }

    /// Membership: generator domination first, then the facet inequalities,
    /// with the LP only for bodies without an enumerated description.
    pub(crate) fn contains_at(&self, s: &[f64]) -> bool {
        if self
            .generators
            .iter()
            .any(|y| s.iter().zip(y).all(|(a, b)| *a <= *b + TOLERANCE))
        {
            return true;
        }
        if let Some(f) = self.facets() {
            return f.depth(s) >= -TOLERANCE;
        }
        let slopes = self.decay_slopes();
        if s.iter().zip(&slopes).any(|(a, m)| *a > *m + TOLERANCE) {
            return false;
        }
        if self.generators.len() == 1 {
            return false;
        }
        // A failing LP only happens on pathological input; treat as outside.
        depth_in(&self.generators, s).is_ok_and(|d| d >= -TOLERANCE)
    }

    /// Generators of `(1 - t) Q0 + t Q1`.
    pub fn interpolate(&self, other: &LogBody, t: f64) -> Result<LogBody> {
        check_dim(self.dim, other.dim)?;
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::ParameterOutOfRange {
                name: "t",
                value: t,
                range: "[0, 1]",
            });
        }
        let mut combos = Vec::with_capacity(self.len() * other.len());
        for y0 in &self.generators {
            for y1 in &other.generators {
                combos.push(
                    y0.iter()
                        .zip(y1)
                        .map(|(a, b)| (1.0 - t) * a + t * b)
                        .collect(),
                );
            }
        }
        LogBody::new(combos, self.dim)
    }

    /// `x` lies in the copolar `{x >= 0 : <x, y> <= -1 for all y in Q}`.
    pub fn copolar_contains(&self, x: &DualVector) -> Result<bool> {
        Ok(self.support(x)? <= -1.0 + TOLERANCE)
    }

    /// Coordinatewise maximum of the generators. Every point of the body is
    /// below this vector, hence `h_Q(x) <= <m, x>` for `x >= 0`.
    pub fn decay_slopes(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|l| {
                self.generators
                    .iter()
                    .map(|y| y[l])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect()
    }

    /// Translates every generator by `offset * (1, ..., 1)`, i.e. multiplies
    /// the Reinhardt set by `e^offset`.
    pub fn shifted(&self, offset: f64) -> Result<LogBody> {
        let gens = self
            .generators
            .iter()
            .map(|y| y.iter().map(|v| v + offset).collect())
            .collect();
        LogBody::new(gens, self.dim)
    }

    /// Multiplies every generator by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<LogBody> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(Error::ParameterOutOfRange {
                name: "factor",
                value: factor,
                range: "(0, inf)",
            });
        }
        let gens = self
            .generators
            .iter()
            .map(|y| y.iter().map(|v| v * factor).collect())
            .collect();
        LogBody::new(gens, self.dim)
    }

    /// Hausdorff distance between the two canonical generator sets (sup norm).
    pub fn generator_distance(&self, other: &LogBody) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        let dist = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        };
        let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| {
            from.iter()
                .map(|a| to.iter().map(|b| dist(a, b)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        Ok(directed(&self.generators, &other.generators)
            .max(directed(&other.generators, &self.generators)))
    }
}

impl PartialEq for LogBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.generators.len() == other.generators.len()
            && self
                .generators
                .iter()
                .zip(&other.generators)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= TOLERANCE))
    }
}

fn canonical_generators(mut gens: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    gens.sort_by(|a, b| descending_lex(a, b));

    // Coordinatewise domination first; after the sort a dominating point
    // always precedes the points it dominates.
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(gens.len());
    for y in gens {
        let dominated = kept
            .iter()
            .any(|z| y.iter().zip(z).all(|(a, b)| *a <= *b + TOLERANCE));
        if !dominated {
            kept.push(y);
        }
    }

    // Then convex-combination domination, removing one point at a time.
    let mut i = 0;
    while kept.len() > 1 && i < kept.len() {
        let candidate = kept.remove(i);
        if depth_in(&kept, &candidate)? >= -TOLERANCE {
            continue;
        }
        kept.insert(i, candidate);
        i += 1;
    }
    Ok(kept)
}
