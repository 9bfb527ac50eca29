//! Reference computations shared by the integration and acceptance tests.
//!
//! Everything here works from raw generator lists and avoids the crate's
//! LP and integration code.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tgc_core::LogBody;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize, k: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|_| (0..n).map(|_| rng.gen_range(lo..hi)).collect())
        .collect()
}

/// Body with `1..=max_gens` generators drawn uniformly from `[lo, hi]^n`.
pub fn random_body(rng: &mut impl Rng, n: usize, max_gens: usize, lo: f64, hi: f64) -> LogBody {
    let k = rng.gen_range(1..=max_gens);
    LogBody::new(random_points(rng, n, k, lo, hi), n).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn support(gens: &[Vec<f64>], x: &[f64]) -> f64 {
    gens.iter()
        .map(|y| dot(x, y))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Coordinatewise maximum over the generators.
pub fn corner(gens: &[Vec<f64>]) -> Vec<f64> {
    let n = gens[0].len();
    (0..n)
        .map(|l| gens.iter().map(|y| y[l]).fold(f64::NEG_INFINITY, f64::max))
        .collect()
}

/// `<a, s> - (1 - t) max(h0(a) + 1, 0) - t max(h1(a) + 1, 0)`.
pub fn legendre_objective(g0: &[Vec<f64>], g1: &[Vec<f64>], t: f64, s: &[f64], a: &[f64]) -> f64 {
    let f0 = (support(g0, a) + 1.0).max(0.0);
    let f1 = (support(g1, a) + 1.0).max(0.0);
    dot(a, s) - (1.0 - t) * f0 - t * f1
}

/// Box `[0, A]^n` that contains a maximizer of the Legendre objective.
///
/// Outside the joint copolar the objective only grows when `a` shrinks, and
/// every point with `h0(a) >= -1` or `h1(a) >= -1` has `a_l <= 1 / |m_l|`.
pub fn dual_box(g0: &[Vec<f64>], g1: &[Vec<f64>]) -> Vec<f64> {
    let m0 = corner(g0);
    let m1 = corner(g1);
    m0.iter()
        .zip(&m1)
        .map(|(a, b)| 1.0 / a.max(*b).abs())
        .collect()
}

fn for_each_grid_point(lo: &[f64], hi: &[f64], step: &[f64], mut visit: impl FnMut(&[f64])) {
    let n = lo.len();
    let counts: Vec<usize> = (0..n)
        .map(|l| ((hi[l] - lo[l]) / step[l]).ceil().max(0.0) as usize + 1)
        .collect();
    let mut index = vec![0usize; n];
    let mut point = lo.to_vec();
    loop {
        for l in 0..n {
            point[l] = (lo[l] + index[l] as f64 * step[l]).min(hi[l]);
        }
        visit(&point);
        let mut l = 0;
        loop {
            if l == n {
                return;
            }
            index[l] += 1;
            if index[l] < counts[l] {
                break;
            }
            index[l] = 0;
            l += 1;
        }
    }
}

const BEAM: usize = 32;

/// Keeps the `BEAM` best distinct points seen so far.
fn push_beam(beam: &mut Vec<(f64, Vec<f64>)>, v: f64, p: &[f64]) {
    if beam.len() == BEAM && v <= beam[BEAM - 1].0 {
        return;
    }
    if beam.iter().any(|(_, q)| q.as_slice() == p) {
        return;
    }
    let at = beam.partition_point(|(w, _)| *w >= v);
    beam.insert(at, (v, p.to_vec()));
    beam.truncate(BEAM);
}

/// Brute-force Legendre supremum: a grid of step `1e-3` over the dual box,
/// then a beam of the best 32 points, each refined on a 10x finer grid
/// spanning two coarse steps either side, down to a step of `1e-10`.
pub fn legendre_grid(g0: &[Vec<f64>], g1: &[Vec<f64>], t: f64, s: &[f64]) -> f64 {
    let n = s.len();
    let upper = dual_box(g0, g1);
    let f = |a: &[f64]| legendre_objective(g0, g1, t, s, a);
    let mut step = 1e-3;
    let mut beam = Vec::with_capacity(BEAM + 1);
    for_each_grid_point(&vec![0.0; n], &upper, &vec![step; n], |p| {
        push_beam(&mut beam, f(p), p)
    });
    while step > 1e-10 {
        let centres: Vec<Vec<f64>> = beam.iter().map(|(_, p)| p.clone()).collect();
        let fine = step / 10.0;
        for c in centres {
            let lo: Vec<f64> = c.iter().map(|a| (a - 2.0 * step).max(0.0)).collect();
            let hi: Vec<f64> = c
                .iter()
                .zip(&upper)
                .map(|(a, u)| (a + 2.0 * step).min(*u))
                .collect();
            for_each_grid_point(&lo, &hi, &vec![fine; n], |p| push_beam(&mut beam, f(p), p));
        }
        step = fine;
    }
    beam[0].0
}

/// Projected supergradient ascent from 50 random starts, 500 steps each with
/// step size `c / sqrt(k)`. Returns the best objective seen, a lower bound
/// for the supremum.
pub fn legendre_ascent(g0: &[Vec<f64>], g1: &[Vec<f64>], t: f64, s: &[f64], seed: u64) -> f64 {
    let n = s.len();
    let upper = dual_box(g0, g1);
    let c = upper.iter().cloned().fold(0.0, f64::max) * 0.25;
    let mut rng = rng(seed);
    let argmax = |gens: &[Vec<f64>], a: &[f64]| -> Vec<f64> {
        gens.iter()
            .max_by(|x, y| dot(a, x).total_cmp(&dot(a, y)))
            .unwrap()
            .clone()
    };
    let mut best = legendre_objective(g0, g1, t, s, &vec![0.0; n]);
    for _ in 0..50 {
        let mut a: Vec<f64> = upper.iter().map(|u| rng.gen_range(0.0..*u)).collect();
        for k in 1..=500 {
            let v = legendre_objective(g0, g1, t, s, &a);
            best = best.max(v);
            let mut g = s.to_vec();
            for (gens, w) in [(g0, 1.0 - t), (g1, t)] {
                if support(gens, &a) + 1.0 > 0.0 {
                    let y = argmax(gens, &a);
                    for l in 0..n {
                        g[l] -= w * y[l];
                    }
                }
            }
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let step = c / (k as f64).sqrt() / norm;
            for l in 0..n {
                a[l] = (a[l] + step * g[l]).clamp(0.0, upper[l]);
            }
        }
    }
    best
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    (0..k)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % k]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Keeps the part of `poly` with `<w, x> <= 1`.
fn clip(poly: &[[f64; 2]], w: [f64; 2]) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| w[0] * p[0] + w[1] * p[1] - 1.0;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(p), side(q));
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let r = sp / (sp - sq);
            out.push([p[0] + r * (q[0] - p[0]), p[1] + r * (q[1] - p[1])]);
        }
    }
    out
}

/// Exact covolume of a planar body: area of the union of the triangles
/// `{x >= 0 : <x, y_k> > -1}` by inclusion-exclusion.
pub fn covolume_plane(gens: &[Vec<f64>]) -> f64 {
    assert!(gens.iter().all(|y| y.len() == 2));
    let k = gens.len();
    assert!(k < 16);
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let w0 = [-gens[members[0]][0], -gens[members[0]][1]];
        let mut poly = vec![[0.0, 0.0], [1.0 / w0[0], 0.0], [0.0, 1.0 / w0[1]]];
        for &i in &members[1..] {
            poly = clip(&poly, [-gens[i][0], -gens[i][1]]);
            if poly.len() < 3 {
                break;
            }
        }
        let area = if poly.len() < 3 { 0.0 } else { shoelace(&poly) };
        if members.len() % 2 == 1 {
            total += area;
        } else {
            total -= area;
        }
    }
    total
}

/// Exact covolume when `n = 1`, or `n = 2` via [`covolume_plane`].
pub fn covolume_exact(gens: &[Vec<f64>]) -> Option<f64> {
    match gens[0].len() {
        1 => Some(-1.0 / corner(gens)[0]),
        2 => Some(covolume_plane(gens)),
        _ => None,
    }
}

/// Covolume by uniform sampling of the box `[0, 1/|m_l|]`, which contains
/// the complement of the copolar. Returns `(value, standard error)`.
pub fn covolume_box_mc(gens: &[Vec<f64>], samples: u64, seed: u64) -> (f64, f64) {
    let upper: Vec<f64> = corner(gens).iter().map(|m| -1.0 / m).collect();
    let volume: f64 = upper.iter().product();
    let mut rng = rng(seed);
    let mut x = vec![0.0; upper.len()];
    let mut hits = 0u64;
    for _ in 0..samples {
        for (xl, u) in x.iter_mut().zip(&upper) {
            *xl = rng.gen_range(0.0..*u);
        }
        if support(gens, &x) > -1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    (volume * p, volume * se)
}

/// Upper boundary `sup { s2 : (s1, s2) in Q }` of a planar body.
fn height_plane(gens: &[Vec<f64>], s1: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a in gens {
        if a[0] >= s1 {
            best = best.max(a[1]);
        }
        for b in gens {
            if a[0] < s1 && s1 < b[0] {
                let r = (s1 - a[0]) / (b[0] - a[0]);
                best = best.max(a[1] + r * (b[1] - a[1]));
            }
        }
    }
    best
}

/// Exact Reinhardt volume `(2 pi)^2 int_Q e^{2 s1 + 2 s2} ds` of a planar
/// body, integrating the piecewise-linear upper boundary in closed form.
pub fn volume_plane(gens: &[Vec<f64>]) -> f64 {
    let mut xs: Vec<f64> = gens.iter().map(|y| y[0]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    // Left of every generator the boundary is flat at the top corner.
    let g_left = height_plane(gens, xs[0]);
    let mut inner = (2.0 * xs[0]).exp() / 2.0 * (2.0 * g_left).exp() / 2.0;
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ga, gb) = (height_plane(gens, a), height_plane(gens, b));
        let slope = (gb - ga) / (b - a);
        // int_a^b e^{2 s} e^{2 g(s)} / 2 ds with g linear.
        let k = 2.0 * (1.0 + slope);
        let piece = if k.abs() < 1e-12 {
            (2.0 * (a + ga)).exp() * (b - a)
        } else {
            ((2.0 * (b + gb)).exp() - (2.0 * (a + ga)).exp()) / k
        };
        inner += piece / 2.0;
    }
    4.0 * std::f64::consts::PI.powi(2) * inner
}

/// Exact Reinhardt volume for `n <= 2`.
pub fn volume_exact(gens: &[Vec<f64>]) -> Option<f64> {
    match gens[0].len() {
        1 => Some(std::f64::consts::PI * (2.0 * corner(gens)[0]).exp()),
        2 => Some(volume_plane(gens)),
        _ => None,
    }
}

/// Membership in a planar body through its upper boundary.
pub fn in_body_plane(gens: &[Vec<f64>], s: &[f64]) -> bool {
    s[1] <= height_plane(gens, s[0])
}

pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dist = |p: &[f64], q: &[f64]| {
        p.iter()
            .zip(q)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let one_way = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter()
            .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
