//! Inequality description of `conv{y_k} + R^n_-`.
//!
//! Every facet normal of such a body is nonnegative, and every facet is
//! spanned by `n` affinely independent elements among the generators and
//! the recession directions `-e_l`. Enumerating those subsets is cheap for
//! the small bodies used here and turns membership and boundary heights
//! into a handful of dot products.

/// Subset count above which enumeration is skipped.
const MAX_SUBSETS: usize = 200_000;
/// Relative size below which a cofactor normal is treated as degenerate.
const DEGENERATE: f64 = 1e-10;
const SLACK: f64 = 1e-11;

/// `<a_j, s> <= b_j` for every facet, with `sum(a_j) = 1` so that
/// `min_j (b_j - <a_j, s>)` is the depth of `s`.
#[derive(Clone, Debug)]
pub(crate) struct Facets {
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d
}

/// Visits every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl Facets {
    pub(crate) fn enumerate(generators: &[Vec<f64>], dim: usize) -> Option<Self> {
        let k = generators.len();
        let subsets: usize = (1..=dim.min(k))
            .map(|p| binomial(k, p).saturating_mul(binomial(dim, p)))
            .fold(0usize, usize::saturating_add);
        if subsets > MAX_SUBSETS {
            return None;
        }
        let scale = generators
            .iter()
            .flatten()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1.0);
        let mut facets = Facets {
            normals: Vec::new(),
            offsets: Vec::new(),
        };
        for p in 1..=dim.min(k) {
            // `p` points fix the normal on a `p`-coordinate support; the other
            // coordinates vanish because the facet contains those directions.
            for_each_subset(k, p, |points| {
                for_each_subset(dim, p, |free| {
                    facets.try_push(generators, points, free, scale);
                });
            });
        }
        Some(facets)
    }

    fn try_push(&mut self, generators: &[Vec<f64>], points: &[usize], free: &[usize], scale: f64) {
        let p = points.len();
        let base = &generators[points[0]];
        // Rows y_i - y_0 restricted to the free coordinates; the normal is
        // their generalized cross product.
        let rows: Vec<Vec<f64>> = points[1..]
            .iter()
            .map(|&i| free.iter().map(|&l| generators[i][l] - base[l]).collect())
            .collect();
        let mut reduced = vec![0.0; p];
        for (j, r) in reduced.iter_mut().enumerate() {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            *r = sign * if minor.is_empty() { 1.0 } else { det(minor) };
        }
        let total: f64 = reduced.iter().sum();
        let magnitude: f64 = reduced.iter().map(|v| v.abs()).sum();
        if magnitude <= DEGENERATE * scale.powi(p as i32 - 1) || total.abs() < 0.5 * magnitude {
            // Degenerate, or mixed signs beyond rounding.
            return;
        }
        let mut normal = vec![0.0; base.len()];
        for (&l, v) in free.iter().zip(&reduced) {
            let a = v / total;
            if a < -SLACK {
                return;
            }
            normal[l] = a.max(0.0);
        }
        let offset: f64 = normal.iter().zip(base).map(|(a, y)| a * y).sum();
        let supports = generators.iter().all(|y| {
            normal.iter().zip(y).map(|(a, v)| a * v).sum::<f64>() <= offset + SLACK * scale
        });
        if supports {
            self.normals.push(normal);
            self.offsets.push(offset);
        }
    }

    /// `max { delta : s + delta * 1 in Q }`.
    pub(crate) fn depth(&self, s: &[f64]) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| b - a.iter().zip(s).map(|(x, y)| x * y).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest last coordinate over `(head, s_n)` in `Q`, `None` if `head`
    /// lies outside the projection. `-inf` entries of `head` impose nothing.
    pub(crate) fn height(&self, head: &[f64], tolerance: f64) -> Option<f64> {
        let last = head.len();
        let mut best = f64::INFINITY;
        for (a, b) in self.normals.iter().zip(&self.offsets) {
            let mut lhs = 0.0;
            let mut vacuous = false;
            for (x, s) in a[..last].iter().zip(head) {
                if *x > 0.0 {
                    if *s == f64::NEG_INFINITY {
                        vacuous = true;
                        break;
                    }
                    lhs += x * s;
                }
            }
            if vacuous {
                continue;
            }
            if a[last] > 0.0 {
                best = best.min((b - lhs) / a[last]);
            } else if lhs > b + tolerance {
                return None;
            }
        }
        Some(best)
    }
}
