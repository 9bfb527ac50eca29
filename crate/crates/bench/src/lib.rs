//! Fixed inputs shared by the benchmarks.

use tgc_core::LogBody;

/// A body with `dim + 1` extreme generators: for each axis `k` the point
/// with `-1` at `k` and `-2.5` elsewhere, plus the diagonal point `-1.6`.
pub fn staircase(dim: usize) -> LogBody {
    let mut points: Vec<Vec<f64>> = (0..dim)
        .map(|k| (0..dim).map(|l| if l == k { -1.0 } else { -2.5 }).collect())
        .collect();
    points.push(vec![-1.6; dim]);
    LogBody::new(points, dim).expect("staircase generators are valid")
}

/// Two bodies for geodesic and sweep benchmarks.
pub fn pair(dim: usize) -> (LogBody, LogBody) {
    let q1 = LogBody::polydisk(vec![-1.5; dim]).expect("valid polydisk");
    (staircase(dim), q1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_keeps_every_generator() {
        for dim in 2..=4 {
            assert_eq!(staircase(dim).len(), dim + 1);
        }
    }
}
