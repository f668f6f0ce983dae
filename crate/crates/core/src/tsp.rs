//! Closed traveling-salesman tours over small planar point sets.
//!
//! Held–Karp gives optimal tours up to [`EXACT_LIMIT`] points. Beyond the
//! configured threshold the dispatcher falls back to nearest neighbour
//! followed by first-improvement 2-opt.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::Point;
use crate::params::Params;

/// Hard cap on Held–Karp input size (table is `2^(n-1)·(n-1)` entries).
pub const EXACT_LIMIT: usize = 18;

const IMPROVEMENT_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TspResult {
    /// Permutation of input indices; the tour closes from the last back to the first.
    pub order: Vec<usize>,
    pub cost: f64,
    pub exact: bool,
}

impl TspResult {
    /// Rotates the order so that `index` comes first.
    pub fn rotated_to(mut self, index: usize) -> Self {
        if let Some(pos) = self.order.iter().position(|&i| i == index) {
            self.order.rotate_left(pos);
        }
        self
    }
}

pub fn closed_length(points: &[Point], order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for w in order.windows(2) {
        total += points[w[0]].dist(&points[w[1]]);
    }
    total + points[order[order.len() - 1]].dist(&points[order[0]])
}

/// Optimal closed tour by bitmask dynamic programming.
pub fn exact_tsp(points: &[Point]) -> Result<TspResult> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("TSP over no points"));
    }
    if n > EXACT_LIMIT {
        return Err(Error::TooLarge {
            what: "exact TSP point set",
            size: n,
            limit: EXACT_LIMIT,
        });
    }
    if n <= 3 {
        let order: Vec<usize> = (0..n).collect();
        let cost = closed_length(points, &order);
        return Ok(TspResult {
            order,
            cost,
            exact: true,
        });
    }

    // Point 0 is the fixed start; the others are bits 0..m.
    let m = n - 1;
    let full = 1usize << m;
    let d = |a: usize, b: usize| points[a].dist(&points[b]);
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * m + j];
            if !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = cur + d(j + 1, k + 1);
                if cand < dp[next * m + k] {
                    dp[next * m + k] = cand;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }
    let last_mask = full - 1;
    let mut best = f64::INFINITY;
    let mut end = 0;
    for j in 0..m {
        let c = dp[last_mask * m + j] + d(j + 1, 0);
        if c < best {
            best = c;
            end = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    let mut j = end;
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    let cost = closed_length(points, &order);
    Ok(TspResult {
        order,
        cost,
        exact: true,
    })
}

/// Nearest-neighbour construction from a seed-chosen start, then 2-opt to a local optimum.
pub fn heuristic_tsp(points: &[Point], seed: u64) -> Result<TspResult> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Empty("TSP over no points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.gen_range(0..n);
    let mut order = nearest_neighbour(points, start);
    two_opt(points, &mut order);
    let cost = closed_length(points, &order);
    Ok(TspResult {
        order,
        cost,
        exact: false,
    })
}

fn nearest_neighbour(points: &[Point], start: usize) -> Vec<usize> {
    let n = points.len();
    let mut used = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    used[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (k, p) in points.iter().enumerate() {
            if !used[k] {
                let dk = points[cur].dist_sq(p);
                if dk < best_d {
                    best_d = dk;
                    best = k;
                }
            }
        }
        used[best] = true;
        order.push(best);
        cur = best;
    }
    order
}

/// First-improvement 2-opt in fixed index order, repeated until a full pass finds nothing.
pub fn two_opt(points: &[Point], order: &mut [usize]) {
    let n = order.len();
    if n < 4 {
        return;
    }
    let d = |a: usize, b: usize| points[a].dist(&points[b]);
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n - 2 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (order[i], order[i + 1]);
                let (c, e) = (order[j], order[(j + 1) % n]);
                let delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
                if delta < -IMPROVEMENT_EPS {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
    }
}

/// Exact when the point set is within `params.tsp_exact_threshold`, heuristic otherwise.
pub fn tsp(points: &[Point], params: &Params, seed: u64) -> Result<TspResult> {
    if points.is_empty() {
        return Err(Error::Empty("TSP over no points"));
    }
    if points.len() <= params.tsp_exact_threshold.min(EXACT_LIMIT) {
        exact_tsp(points)
    } else {
        heuristic_tsp(points, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ]
    }

    fn brute_force(points: &[Point]) -> f64 {
        fn rec(points: &[Point], rest: &mut Vec<usize>, path: &mut Vec<usize>, best: &mut f64) {
            if rest.is_empty() {
                *best = best.min(closed_length(points, path));
                return;
            }
            for k in 0..rest.len() {
                let v = rest.remove(k);
                path.push(v);
                rec(points, rest, path, best);
                path.pop();
                rest.insert(k, v);
            }
        }
        let mut best = f64::INFINITY;
        let mut rest: Vec<usize> = (1..points.len()).collect();
        rec(points, &mut rest, &mut vec![0], &mut best);
        best
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
            .collect()
    }

    #[test]
    fn single_point_is_free() {
        let r = exact_tsp(&[Point::new(2.0, 3.0)]).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.order, vec![0]);
    }

    #[test]
    fn unit_square_perimeter() {
        let r = exact_tsp(&square()).unwrap();
        assert!((r.cost - 4.0).abs() < 1e-12);
        assert!(r.exact);
        let h = heuristic_tsp(&square(), 3).unwrap();
        assert!((h.cost - 4.0).abs() < 1e-12);
        assert!(!h.exact);
    }

    #[test]
    fn collinear_heuristic() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!((heuristic_tsp(&pts, 0).unwrap().cost - 4.0).abs() < 1e-12);
    }

    #[test]
    fn held_karp_matches_permutations() {
        for seed in 0..10 {
            let pts = random_points(8, seed);
            let r = exact_tsp(&pts).unwrap();
            assert!((r.cost - brute_force(&pts)).abs() < 1e-9, "seed {seed}");
            assert!((closed_length(&pts, &r.order) - r.cost).abs() < 1e-9);
        }
    }

    #[test]
    fn too_many_or_none() {
        assert!(exact_tsp(&random_points(EXACT_LIMIT + 1, 1)).is_err());
        let p = Params::new(0.4).unwrap();
        assert!(tsp(&[], &p, 0).is_err());
        assert!(tsp(&random_points(3, 1), &p, 0).unwrap().exact);
        assert!(!tsp(&random_points(50, 1), &p, 0).unwrap().exact);
    }

    #[test]
    fn heuristic_is_locally_two_optimal() {
        let pts = random_points(40, 9);
        let r = heuristic_tsp(&pts, 5).unwrap();
        let o = &r.order;
        let n = o.len();
        for i in 0..n - 2 {
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let delta = pts[o[i]].dist(&pts[o[j]]) + pts[o[i + 1]].dist(&pts[o[(j + 1) % n]])
                    - pts[o[i]].dist(&pts[o[i + 1]])
                    - pts[o[j]].dist(&pts[o[(j + 1) % n]]);
                assert!(delta >= -1e-9);
            }
        }
    }

    #[test]
    fn heuristic_never_beats_exact() {
        for seed in 0..20 {
            let pts = random_points(10, 100 + seed);
            let e = exact_tsp(&pts).unwrap().cost;
            let h = heuristic_tsp(&pts, seed).unwrap().cost;
            assert!(h >= e - 1e-9);
        }
    }
}
