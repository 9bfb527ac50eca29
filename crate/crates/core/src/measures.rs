//! Integrals attached to a log-body: the exponential support integral
//! `I(Q) = ∫_{R^n_+} e^{h_Q(x)} dx`, the covolume of the copolar
//! `Covol(Q°) = I(Q) / n!`, and the Euclidean volume of the Reinhardt set.
//!
//! Quadrature for `I(Q)` uses the homogeneity of `h_Q`. On a simplicial cone
//! with rays `v_1..v_n` and any generator `y`,
//!
//! ```text
//! ∫_cone e^{<x, y>} dx = |det V| / ∏ (-<v_i, y>),
//! ```
//!
//! which bounds the cone's share of `I(Q)` from below (for every `y`), and
//! sublinearity of `h_Q` gives the upper bound `|det V| / ∏ (-h_Q(v_i))`.
//! When one generator is active at every ray both bounds agree and the panel
//! is exact. Cones straddling a wall of the normal fan are split (at the wall
//! when an edge crosses it, else at the longest edge's midpoint) until the
//! summed gaps meet the tolerance, so the reported error is a rigorous bound
//! and no truncation of the unbounded domain is needed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logbody::{dot, LogBody};
use crate::rng::substream;

const BATCH: u64 = 1 << 16;

/// How an integral should be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form; only available for single-generator bodies.
    Exact,
    Quadrature,
    MonteCarlo,
    /// Exact when possible, otherwise the default deterministic path.
    Auto,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "quadrature" => Ok(Self::Quadrature),
            "monte_carlo" | "monte-carlo" | "mc" => Ok(Self::MonteCarlo),
            "auto" => Ok(Self::Auto),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Exact,
    Quadrature,
    MonteCarlo,
}

impl EstimateMethod {
    pub fn is_statistical(self) -> bool {
        self == Self::MonteCarlo
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Quadrature => "quadrature",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

/// A value with either a deterministic error bound (exact, quadrature) or a
/// sample standard error (Monte Carlo).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error: f64,
    pub method: EstimateMethod,
    pub evaluations: u64,
}

impl IntegralEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            method: EstimateMethod::Exact,
            evaluations: 0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }
}

/// Accuracy and cost limits shared by all estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// Relative tolerance for deterministic paths; `None` picks a
    /// dimension-dependent default.
    pub tolerance: Option<f64>,
    pub max_evaluations: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            tolerance: None,
            max_evaluations: 20_000_000,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

impl Budget {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_samples(self, samples: u64) -> Self {
        Self { samples, ..self }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self {
            tolerance: Some(tolerance),
            ..self
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Error::InvalidBudget(format!("tolerance {tol} must be > 0")));
            }
        }
        if self.samples < 2 {
            return Err(Error::InvalidBudget("need at least 2 samples".into()));
        }
        Ok(())
    }

    /// Default relative tolerance of the support-integral quadrature.
    pub fn integral_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-8)
    }

    /// Default relative tolerance of the Reinhardt-volume quadrature.
    pub fn volume_tolerance(&self, dim: usize) -> f64 {
        self.tolerance.unwrap_or(if dim <= 2 { 1e-5 } else { 1e-2 })
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `I(Q) = ∫_{R^n_+} e^{h_Q(x)} dx`.
pub fn exp_integral(q: &LogBody, method: Method, budget: &Budget) -> Result<IntegralEstimate> {
    budget.validate()?;
    match resolve(q, method) {
        Method::Exact => single_generator(q)
            .map(|y| IntegralEstimate::exact(y.iter().map(|v| -1.0 / v).product())),
        Method::MonteCarlo => Ok(exp_integral_mc(q, budget.samples, budget.seed)),
        _ => exp_integral_quadrature(q, budget.integral_tolerance(), budget.max_evaluations),
    }
}

/// `Covol(Q°)`, the volume of `R^n_+ \ Q°`.
pub fn covolume(q: &LogBody, method: Method, budget: &Budget) -> Result<IntegralEstimate> {
    let n = q.dim();
    match resolve(q, method) {
        Method::Exact => {
            budget.validate()?;
            let y = single_generator(q)?;
            let legs: f64 = y.iter().map(|v| -1.0 / v).product();
            Ok(IntegralEstimate::exact(legs / factorial(n)))
        }
        other => Ok(exp_integral(q, other, budget)?.scaled(1.0 / factorial(n))),
    }
}

/// Direct estimate of `Covol(Q°)`: `{x >= 0 : h_Q(x) > -1}` lies inside the
/// simplex `{x >= 0 : <m, x> > -1}` (`m` the decay slopes); sample that
/// simplex uniformly and count hits. Independent of the exponential identity.
pub fn covolume_region_sampling(q: &LogBody, samples: u64, seed: u64) -> Result<IntegralEstimate> {
    if samples < 2 {
        return Err(Error::InvalidBudget("need at least 2 samples".into()));
    }
    let n = q.dim();
    let rates: Vec<f64> = q.decay_slopes().iter().map(|m| -m).collect();
    let simplex_volume = rates.iter().map(|r| 1.0 / r).product::<f64>() / factorial(n);

    let mut hits = 0u64;
    let mut x = vec![0.0; n];
    let mut e = vec![0.0; n + 1];
    for (b, count) in batches(samples) {
        let mut rng = substream(seed, b);
        for _ in 0..count {
            let mut total = 0.0;
            for v in e.iter_mut() {
                *v = rng.sample::<f64, _>(Exp1);
                total += *v;
            }
            for l in 0..n {
                x[l] = e[l] / total / rates[l];
            }
            if q.support_at(&x) > -1.0 {
                hits += 1;
            }
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(IntegralEstimate {
        value: simplex_volume * p,
        error: simplex_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        method: EstimateMethod::MonteCarlo,
        evaluations: samples,
    })
}

/// Volume of the Reinhardt set `K` with `Log K = Q`:
/// `Vol(K) = (2π)^n ∫_Q e^{2 Σ s_l} ds`.
pub fn reinhardt_volume(q: &LogBody, method: Method, budget: &Budget) -> Result<IntegralEstimate> {
    budget.validate()?;
    let n = q.dim();
    let method = match method {
        Method::Auto if q.len() == 1 => Method::Exact,
        Method::Auto if n <= 2 => Method::Quadrature,
        Method::Auto => Method::MonteCarlo,
        other => other,
    };
    match method {
        Method::Exact => {
            let y = single_generator(q)?;
            Ok(IntegralEstimate::exact(
                PI.powi(n as i32) * (2.0 * y.iter().sum::<f64>()).exp(),
            ))
        }
        Method::MonteCarlo => Ok(volume_mc(q, budget.samples, budget.seed)),
        _ => volume_quadrature(q, budget.volume_tolerance(n), budget.max_evaluations),
    }
}

fn resolve(q: &LogBody, method: Method) -> Method {
    match method {
        Method::Auto if q.len() == 1 => Method::Exact,
        Method::Auto => Method::Quadrature,
        other => other,
    }
}

fn single_generator(q: &LogBody) -> Result<&[f64]> {
    match q.generators() {
        [y] => Ok(y),
        gens => Err(Error::ExactUnavailable {
            generators: gens.len(),
        }),
    }
}

/// `(batch index, samples in batch)` covering `total` samples.
fn batches(total: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = total / BATCH;
    let rest = total % BATCH;
    (0..full)
        .map(|b| (b, BATCH))
        .chain((rest > 0).then_some((full, rest)))
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, w: f64) {
        self.n += 1;
        self.sum += w;
        self.sum_sq += w * w;
    }

    fn merge(&mut self, other: Moments) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn mean_and_error(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Importance sampling from the product density `∏ r_l e^{-r_l x_l}`,
/// `r = -m`; the weights `e^{h_Q(x) - <m,x>} / ∏ r_l` are bounded by
/// `1 / ∏ r_l`.
fn exp_integral_mc(q: &LogBody, samples: u64, seed: u64) -> IntegralEstimate {
    let n = q.dim();
    let slopes = q.decay_slopes();
    let rates: Vec<f64> = slopes.iter().map(|m| -m).collect();
    let norm: f64 = rates.iter().map(|r| 1.0 / r).product();

    let mut total = Moments::default();
    let mut x = vec![0.0; n];
    for (b, count) in batches(samples) {
        let mut rng = substream(seed, b);
        let mut batch = Moments::default();
        for _ in 0..count {
            for l in 0..n {
                x[l] = rng.sample::<f64, _>(Exp1) / rates[l];
            }
            batch.push((q.support_at(&x) - dot(&slopes, &x)).exp());
        }
        total.merge(batch);
    }
    let (mean, se) = total.mean_and_error();
    IntegralEstimate {
        value: norm * mean,
        error: norm * se,
        method: EstimateMethod::MonteCarlo,
        evaluations: samples,
    }
}

/// Proposal `s_l = m_l - E_l / 2`, density `∏ 2 e^{2(s_l - m_l)}` on
/// `{s <= m}`, which contains `Q`. Then `Vol = π^n e^{2 Σ m} P(s ∈ Q)`.
fn volume_mc(q: &LogBody, samples: u64, seed: u64) -> IntegralEstimate {
    let n = q.dim();
    let slopes = q.decay_slopes();
    let scale = PI.powi(n as i32) * (2.0 * slopes.iter().sum::<f64>()).exp();
    let mut hits = 0u64;
    let mut s = vec![0.0; n];
    for (b, count) in batches(samples) {
        let mut rng = substream(seed, b);
        for _ in 0..count {
            for l in 0..n {
                s[l] = slopes[l] - 0.5 * rng.sample::<f64, _>(Exp1);
            }
            if q.contains_at(&s) {
                hits += 1;
            }
        }
    }
    let p = hits as f64 / samples as f64;
    IntegralEstimate {
        value: scale * p,
        error: scale * (p * (1.0 - p) / samples as f64).sqrt(),
        method: EstimateMethod::MonteCarlo,
        evaluations: samples,
    }
}

struct Panel {
    /// `n` rays, each normalized to coordinate sum 1, stored row by row.
    rays: Vec<f64>,
    /// `h_Q` at each ray.
    support: Vec<f64>,
    det: f64,
    lower: f64,
    upper: f64,
    seq: u64,
}

impl Panel {
    fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap()
            .total_cmp(&other.gap())
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Lower and upper bounds of `∫_cone e^{h_Q}`; equal when one generator is
/// active at every ray (the active region of a generator is a convex cone).
fn cone_bounds(q: &LogBody, n: usize, rays: &[f64], support: &[f64], det: f64) -> (f64, f64) {
    let mut lower = 0.0f64;
    for y in q.generators() {
        let mut denom = 1.0;
        let mut active_everywhere = true;
        for i in 0..n {
            let d = dot(&rays[i * n..(i + 1) * n], y);
            denom *= -d;
            if d < support[i] - 1e-14 * support[i].abs() {
                active_everywhere = false;
            }
        }
        let value = det / denom;
        if active_everywhere {
            return (value, value);
        }
        lower = lower.max(value);
    }
    let upper = det / support.iter().map(|h| -h).product::<f64>();
    (lower, upper.max(lower))
}

fn active_generators(q: &LogBody, ray: &[f64], support: f64) -> Vec<usize> {
    q.generators()
        .iter()
        .enumerate()
        .filter(|(_, y)| dot(ray, y) >= support - 1e-14 * support.abs())
        .map(|(k, _)| k)
        .collect()
}

/// Picks the edge to split and the split fraction along it.
///
/// An edge whose endpoints have no active generator in common crosses a wall
/// of the normal fan; it is cut exactly where the two leading generators tie,
/// which leaves cones with a single wall exact after a few cuts. Otherwise the
/// longest edge is halved.
fn split_edge(q: &LogBody, n: usize, rays: &[f64], support: &[f64]) -> (usize, usize, f64) {
    let ray = |i: usize| &rays[i * n..(i + 1) * n];
    let active: Vec<Vec<usize>> = (0..n)
        .map(|i| active_generators(q, ray(i), support[i]))
        .collect();
    let gens = q.generators();

    let mut crossing: Option<(usize, usize, f64, f64)> = None;
    let mut longest = (0, 1, -1.0);
    for i in 0..n {
        for j in i + 1..n {
            let len: f64 = ray(i)
                .iter()
                .zip(ray(j))
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            if len > longest.2 {
                longest = (i, j, len);
            }
            if active[i].iter().any(|k| active[j].contains(k)) {
                continue;
            }
            let (yk, yj) = (&gens[active[i][0]], &gens[active[j][0]]);
            let di = dot(ray(i), yk) - dot(ray(i), yj);
            let dj = dot(ray(j), yk) - dot(ray(j), yj);
            let frac = di / (di - dj);
            if frac > 1e-9 && frac < 1.0 - 1e-9 && !matches!(crossing, Some(c) if len <= c.3) {
                crossing = Some((i, j, frac, len));
            }
        }
    }
    match crossing {
        Some((i, j, frac, _)) => (i, j, frac),
        None => (longest.0, longest.1, 0.5),
    }
}

fn exp_integral_quadrature(
    q: &LogBody,
    tol: f64,
    max_evaluations: u64,
) -> Result<IntegralEstimate> {
    let n = q.dim();
    let mut rays = vec![0.0; n * n];
    for i in 0..n {
        rays[i * n + i] = 1.0;
    }
    let support: Vec<f64> = (0..n)
        .map(|i| q.support_at(&rays[i * n..(i + 1) * n]))
        .collect();
    let mut evaluations = n as u64;
    let (lower, upper) = cone_bounds(q, n, &rays, &support, 1.0);

    let mut exact = 0.0;
    let mut open_lower = 0.0;
    let mut open_upper = 0.0;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let push = |panel: Panel,
                heap: &mut BinaryHeap<Panel>,
                exact: &mut f64,
                lo: &mut f64,
                up: &mut f64| {
        if panel.gap() == 0.0 {
            *exact += panel.lower;
        } else {
            *lo += panel.lower;
            *up += panel.upper;
            heap.push(panel);
        }
    };
    push(
        Panel {
            rays,
            support,
            det: 1.0,
            lower,
            upper,
            seq,
        },
        &mut heap,
        &mut exact,
        &mut open_lower,
        &mut open_upper,
    );

    let mut mid = vec![0.0; n];
    loop {
        let estimate = exact + 0.5 * (open_lower + open_upper);
        let error = 0.5 * (open_upper - open_lower);
        if error <= tol * estimate {
            break;
        }
        if evaluations >= max_evaluations {
            return Err(Error::BudgetExceeded {
                requested: tol,
                achieved: error / estimate,
                evaluations,
            });
        }
        let Some(panel) = heap.pop() else { break };
        open_lower -= panel.lower;
        open_upper -= panel.upper;

        let (a, b, frac) = split_edge(q, n, &panel.rays, &panel.support);
        for l in 0..n {
            mid[l] = (1.0 - frac) * panel.rays[a * n + l] + frac * panel.rays[b * n + l];
        }
        let h_mid = q.support_at(&mid);
        evaluations += 1;

        // Replacing ray `a` keeps the part of the cone next to `b`, and
        // |det| scales with the fraction of the split edge that remains.
        for (replaced, share) in [(a, 1.0 - frac), (b, frac)] {
            let mut rays = panel.rays.clone();
            rays[replaced * n..(replaced + 1) * n].copy_from_slice(&mid);
            let mut support = panel.support.clone();
            support[replaced] = h_mid;
            let det = share * panel.det;
            let (lower, upper) = cone_bounds(q, n, &rays, &support, det);
            seq += 1;
            push(
                Panel {
                    rays,
                    support,
                    det,
                    lower,
                    upper,
                    seq,
                },
                &mut heap,
                &mut exact,
                &mut open_lower,
                &mut open_upper,
            );
        }
    }

    // Re-sum the open panels in a fixed order to shed incremental drift.
    let mut open: Vec<Panel> = heap.into_vec();
    open.sort_by_key(|p| p.seq);
    let lower_sum: f64 = open.iter().map(|p| p.lower).sum();
    let upper_sum: f64 = open.iter().map(|p| p.upper).sum();
    Ok(IntegralEstimate {
        value: exact + 0.5 * (lower_sum + upper_sum),
        error: 0.5 * (upper_sum - lower_sum),
        method: EstimateMethod::Quadrature,
        evaluations,
    })
}

/// Largest `s_n` with `(s', s_n)` in `Q`; `None` if `s'` is outside the
/// projection. Coordinates equal to `-inf` impose no constraint.
fn height(q: &LogBody, head: &[f64]) -> Result<Option<f64>> {
    use crate::lp::{LinearProgram, LpOutcome, Relation};
    if let Some(f) = q.facets() {
        return Ok(f.height(head, crate::logbody::TOLERANCE));
    }
    let last = head.len();
    let gens = q.generators();
    let active: Vec<usize> = (0..last)
        .filter(|&l| head[l].is_finite() && gens.iter().any(|y| y[l] < head[l]))
        .collect();
    if active.is_empty() {
        return Ok(Some(
            gens.iter()
                .map(|y| y[last])
                .fold(f64::NEG_INFINITY, f64::max),
        ));
    }
    let mut lp = LinearProgram::new(gens.iter().map(|y| y[last]).collect());
    for &l in &active {
        lp.add(gens.iter().map(|y| y[l]).collect(), Relation::Ge, head[l]);
    }
    lp.add(vec![1.0; gens.len()], Relation::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::LpNumericalFailure("unbounded height".into())),
    }
}

struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    g_lo: f64,
    g_hi: f64,
    seq: u64,
}

impl Cell {
    fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    fn gap(&self) -> f64 {
        (self.g_lo - self.g_hi) * self.volume()
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap()
            .total_cmp(&other.gap())
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// In `u = e^{2s}` coordinates `K` becomes a down-closed subset `U` of the
/// unit cube and `Vol(K) = π^n |U|`. With `g(u')` the height of `U` over
/// `u' ∈ [0,1]^{n-1}`, `g` is nonincreasing in every coordinate, so on a box
/// `g(hi) |box| <= ∫ g <= g(lo) |box|`.
fn volume_quadrature(q: &LogBody, tol: f64, max_evaluations: u64) -> Result<IntegralEstimate> {
    let n = q.dim();
    let scale = PI.powi(n as i32);
    if n == 1 {
        let m = q.decay_slopes()[0];
        return Ok(IntegralEstimate {
            value: scale * (2.0 * m).exp(),
            error: 0.0,
            method: EstimateMethod::Quadrature,
            evaluations: 1,
        });
    }
    let d = n - 1;
    let g = |u: &[f64]| -> Result<f64> {
        let head: Vec<f64> = u.iter().map(|v| 0.5 * v.ln()).collect();
        Ok(height(q, &head)?.map_or(0.0, |h| (2.0 * h).exp()))
    };

    let lo = vec![0.0; d];
    let hi = vec![1.0; d];
    let first = Cell {
        g_lo: g(&lo)?,
        g_hi: g(&hi)?,
        lo,
        hi,
        seq: 0,
    };
    let mut evaluations = 2u64;
    let mut settled = 0.0;
    let mut open_lower = first.g_hi * first.volume();
    let mut open_upper = first.g_lo * first.volume();
    let mut heap = BinaryHeap::from([first]);
    let mut seq = 0u64;

    loop {
        let estimate = settled + 0.5 * (open_lower + open_upper);
        let error = 0.5 * (open_upper - open_lower);
        if error <= tol * estimate || estimate == 0.0 {
            break;
        }
        if evaluations >= max_evaluations {
            return Err(Error::BudgetExceeded {
                requested: tol,
                achieved: error / estimate,
                evaluations,
            });
        }
        let Some(cell) = heap.pop() else { break };
        let vol = cell.volume();
        open_lower -= cell.g_hi * vol;
        open_upper -= cell.g_lo * vol;

        let axis = (0..d)
            .max_by(|&a, &b| {
                (cell.hi[a] - cell.lo[a])
                    .total_cmp(&(cell.hi[b] - cell.lo[b]))
                    .then(b.cmp(&a))
            })
            .unwrap_or(0);
        let split = 0.5 * (cell.lo[axis] + cell.hi[axis]);

        let mut low_hi = cell.hi.clone();
        low_hi[axis] = split;
        let mut high_lo = cell.lo.clone();
        high_lo[axis] = split;
        let g_low_hi = g(&low_hi)?;
        let g_high_lo = g(&high_lo)?;
        evaluations += 2;

        for child in [
            Cell {
                lo: cell.lo.clone(),
                hi: low_hi,
                g_lo: cell.g_lo,
                g_hi: g_low_hi,
                seq: seq + 1,
            },
            Cell {
                lo: high_lo,
                hi: cell.hi.clone(),
                g_lo: g_high_lo,
                g_hi: cell.g_hi,
                seq: seq + 2,
            },
        ] {
            let v = child.volume();
            if child.g_lo == child.g_hi {
                settled += child.g_lo * v;
            } else {
                open_lower += child.g_hi * v;
                open_upper += child.g_lo * v;
                heap.push(child);
            }
        }
        seq += 2;
    }

    let mut open: Vec<Cell> = heap.into_vec();
    open.sort_by_key(|c| c.seq);
    let lower: f64 = open.iter().map(|c| c.g_hi * c.volume()).sum();
    let upper: f64 = open.iter().map(|c| c.g_lo * c.volume()).sum();
    Ok(IntegralEstimate {
        value: scale * (settled + 0.5 * (lower + upper)),
        error: scale * 0.5 * (upper - lower),
        method: EstimateMethod::Quadrature,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(gens: &[&[f64]]) -> LogBody {
        let dim = gens[0].len();
        LogBody::new(gens.iter().map(|g| g.to_vec()).collect(), dim).unwrap()
    }

    #[test]
    fn single_generator_integrals() {
        let b = Budget::default();
        let q = body(&[&[-1.0, -2.0]]);
        assert_eq!(exp_integral(&q, Method::Exact, &b).unwrap().value, 0.5);
        assert_eq!(covolume(&q, Method::Exact, &b).unwrap().value, 0.25);
        let quad = exp_integral(&q, Method::Quadrature, &b).unwrap();
        assert!((quad.value - 0.5).abs() < 1e-15);
        assert_eq!(quad.error, 0.0);
        let q = body(&[&[-2.0]]);
        assert_eq!(exp_integral(&q, Method::Auto, &b).unwrap().value, 0.5);
    }

    #[test]
    fn exact_needs_one_generator() {
        let q = body(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_eq!(
            covolume(&q, Method::Exact, &Budget::default()),
            Err(Error::ExactUnavailable { generators: 2 })
        );
    }

    #[test]
    fn two_generator_covolume() {
        let q = body(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let c = covolume(&q, Method::Quadrature, &Budget::default()).unwrap();
        assert!((c.value - 1.0 / 3.0).abs() < 1e-12, "{c:?}");
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let q = body(&[
            &[-1.0, -2.0, -1.5],
            &[-2.0, -1.0, -1.2],
            &[-1.3, -1.3, -3.0],
        ]);
        let b = Budget {
            tolerance: Some(1e-12),
            max_evaluations: 3,
            ..Budget::default()
        };
        assert!(matches!(
            exp_integral(&q, Method::Quadrature, &b),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn disc_volumes() {
        let b = Budget::default();
        let q = body(&[&[-1.0]]);
        let v = reinhardt_volume(&q, Method::Exact, &b).unwrap().value;
        assert!((v - PI * (-2.0f64).exp()).abs() < 1e-15);
        let v = reinhardt_volume(&q, Method::Quadrature, &b).unwrap().value;
        assert!((v - PI * (-2.0f64).exp()).abs() < 1e-15);
        let q = body(&[&[-1.0, -0.5]]);
        let v = reinhardt_volume(&q, Method::Quadrature, &b).unwrap();
        let expected = PI * PI * (-3.0f64).exp();
        assert!((v.value - expected).abs() <= v.error + 1e-15, "{v:?}");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let q = body(&[&[-1.0, -2.0], &[-2.0, -1.0]]);
        let b = Budget::default().with_samples(10_000).with_seed(3);
        let a = exp_integral(&q, Method::MonteCarlo, &b).unwrap();
        let c = exp_integral(&q, Method::MonteCarlo, &b).unwrap();
        assert_eq!(a.value.to_bits(), c.value.to_bits());
        let other = exp_integral(&q, Method::MonteCarlo, &b.with_seed(4)).unwrap();
        assert_ne!(a.value, other.value);
    }

    #[test]
    fn batches_cover_total() {
        let total: u64 = batches(3 * BATCH + 5).map(|(_, c)| c).sum();
        assert_eq!(total, 3 * BATCH + 5);
        assert_eq!(batches(BATCH).count(), 1);
    }

    #[test]
    fn rejects_bad_budget() {
        let q = body(&[&[-1.0]]);
        let b = Budget::default().with_tolerance(0.0);
        assert!(matches!(
            exp_integral(&q, Method::Quadrature, &b),
            Err(Error::InvalidBudget(_))
        ));
    }
}
