//! Exact CVRP by enumerating set partitions.
//!
//! Every capacity-feasible subset is priced once by a Held–Karp pass rooted
//! at the depot. Partitions are then enumerated as restricted-growth strings
//! in lexicographic order, pruned on block demand and on the running cost.

use crate::error::{Error, Result};
use crate::model::{Instance, Solution, Tour, TOL};

/// Default bound on the oracle's instance size.
pub const EXACT_CAP: usize = 10;
/// Largest size accepted by [`exact_cvrp_capped`].
pub const EXACT_HARD_LIMIT: usize = 12;

/// Optimal solution and its cost. Ties within [`TOL`] prefer fewer tours,
/// then the lexicographically first partition.
pub fn exact_cvrp(instance: &Instance) -> Result<(Solution, f64)> {
    exact_cvrp_capped(instance, EXACT_CAP)
}

pub fn exact_cvrp_capped(instance: &Instance, cap: usize) -> Result<(Solution, f64)> {
    let n = instance.len();
    let limit = cap.min(EXACT_HARD_LIMIT);
    if n > limit {
        return Err(Error::TooLarge {
            what: "exact CVRP instance",
            size: n,
            limit,
        });
    }
    if n == 0 {
        return Ok((Solution::default(), 0.0));
    }
    let table = SubsetTable::new(instance);

    let mut search = Search {
        table: &table,
        demand: (0..n).map(|id| instance.demand(id)).collect(),
        labels: vec![0; n],
        block_mask: Vec::with_capacity(n),
        block_demand: Vec::with_capacity(n),
        best_cost: f64::INFINITY,
        best_blocks: usize::MAX,
        best_labels: Vec::new(),
    };
    search.run(0, 0.0);

    let blocks = search.best_labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut masks = vec![0usize; blocks];
    for (id, &b) in search.best_labels.iter().enumerate() {
        masks[b] |= 1 << id;
    }
    let tours: Vec<Tour> = masks
        .iter()
        .map(|&m| Tour::from_visits(table.route(m)))
        .collect();
    let solution = Solution::new(tours);
    let cost = instance.solution_cost(&solution)?;
    Ok((solution, cost))
}

/// Optimal depot-rooted tour cost of every subset with demand at most 1.
struct SubsetTable {
    n: usize,
    cost: Vec<f64>,
    // Held–Karp paths: best[mask·n + last], parent pointers alongside.
    path: Vec<f64>,
    parent: Vec<u8>,
    closing: Vec<f64>,
}

impl SubsetTable {
    fn new(instance: &Instance) -> Self {
        let n = instance.len();
        let full = 1usize << n;
        let depot = instance.depot();
        let loc: Vec<_> = (0..n).map(|i| instance.location(i)).collect();
        let mut demand = vec![0.0; full];
        for mask in 1..full {
            let low = mask.trailing_zeros() as usize;
            demand[mask] = demand[mask & (mask - 1)] + instance.demand(low);
        }
        let mut path = vec![f64::INFINITY; full * n];
        let mut parent = vec![u8::MAX; full * n];
        for j in 0..n {
            path[(1 << j) * n + j] = depot.dist(&loc[j]);
        }
        for mask in 1..full {
            if demand[mask] > 1.0 + TOL {
                continue;
            }
            for j in 0..n {
                let cur = path[mask * n + j];
                if mask & (1 << j) == 0 || !cur.is_finite() {
                    continue;
                }
                for k in 0..n {
                    if mask & (1 << k) != 0 {
                        continue;
                    }
                    let next = mask | (1 << k);
                    let cand = cur + loc[j].dist(&loc[k]);
                    if cand < path[next * n + k] {
                        path[next * n + k] = cand;
                        parent[next * n + k] = j as u8;
                    }
                }
            }
        }
        let mut cost = vec![f64::INFINITY; full];
        let mut closing = vec![f64::INFINITY; full * n];
        cost[0] = 0.0;
        for mask in 1..full {
            if demand[mask] > 1.0 + TOL {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    let c = path[mask * n + j] + loc[j].dist(&depot);
                    closing[mask * n + j] = c;
                    cost[mask] = cost[mask].min(c);
                }
            }
        }
        SubsetTable {
            n,
            cost,
            path,
            parent,
            closing,
        }
    }

    fn cost(&self, mask: usize) -> f64 {
        self.cost[mask]
    }

    /// Visit order of an optimal tour over `mask`.
    fn route(&self, mask: usize) -> Vec<usize> {
        let n = self.n;
        let mut end = 0;
        let mut best = f64::INFINITY;
        for j in 0..n {
            if mask & (1 << j) != 0 && self.closing[mask * n + j] < best {
                best = self.closing[mask * n + j];
                end = j;
            }
        }
        let mut order = Vec::new();
        let mut m = mask;
        let mut j = end;
        loop {
            order.push(j);
            debug_assert!(self.path[m * n + j].is_finite());
            let p = self.parent[m * n + j];
            m &= !(1 << j);
            if p == u8::MAX {
                break;
            }
            j = p as usize;
        }
        order.reverse();
        order
    }
}

struct Search<'a> {
    table: &'a SubsetTable,
    demand: Vec<f64>,
    labels: Vec<usize>,
    block_mask: Vec<usize>,
    block_demand: Vec<f64>,
    best_cost: f64,
    best_blocks: usize,
    best_labels: Vec<usize>,
}

impl Search<'_> {
    fn partial_cost(&self) -> f64 {
        self.block_mask.iter().map(|&m| self.table.cost(m)).sum()
    }

    fn run(&mut self, id: usize, lower: f64) {
        // Subset costs are monotone, so the current blocks' costs bound the total from below.
        if lower > self.best_cost + TOL {
            return;
        }
        if id == self.demand.len() {
            let cost = self.partial_cost();
            let blocks = self.block_mask.len();
            let better = cost < self.best_cost - TOL
                || (cost <= self.best_cost + TOL && blocks < self.best_blocks);
            if better {
                self.best_cost = cost;
                self.best_blocks = blocks;
                self.best_labels = self.labels.clone();
            }
            return;
        }
        let d = self.demand[id];
        for b in 0..=self.block_mask.len() {
            if b == self.block_mask.len() {
                self.block_mask.push(0);
                self.block_demand.push(0.0);
            }
            if self.block_demand[b] + d <= 1.0 + TOL {
                let old = self.block_mask[b];
                self.block_mask[b] |= 1 << id;
                self.block_demand[b] += d;
                self.labels[id] = b;
                let lower = lower - self.table.cost(old) + self.table.cost(self.block_mask[b]);
                self.run(id + 1, lower);
                self.block_mask[b] = old;
                self.block_demand[b] -= d;
            }
            if b + 1 == self.block_mask.len() && self.block_mask[b] == 0 {
                self.block_mask.pop();
                self.block_demand.pop();
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{verify_solution, Point};

    fn inst(sites: &[(f64, f64, f64)]) -> Instance {
        Instance::new(
            Point::ORIGIN,
            sites.iter().map(|&(x, y, d)| (Point::new(x, y), d)),
        )
        .unwrap()
    }

    #[test]
    fn capacity_forces_two_tours() {
        let (s, c) = exact_cvrp(&inst(&[(1.0, 0.0, 0.7), (-1.0, 0.0, 0.7)])).unwrap();
        assert_eq!(s.len(), 2);
        assert!((c - 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_co_located_halves() {
        let i = inst(&[(1.0, 0.0, 0.5), (1.0, 0.0, 0.5), (1.0, 0.0, 0.5)]);
        let (s, c) = exact_cvrp(&i).unwrap();
        assert_eq!(s.len(), 2);
        assert!((c - 4.0).abs() < 1e-12);
        assert!(verify_solution(&i, &s).is_feasible());
    }

    #[test]
    fn small_total_is_one_tsp_tour() {
        let i = inst(&[(1.0, 0.0, 0.2), (1.0, 1.0, 0.2), (0.0, 1.0, 0.2)]);
        let (s, c) = exact_cvrp(&i).unwrap();
        assert_eq!(s.len(), 1);
        assert!((c - 4.0).abs() < 1e-12);
    }

    #[test]
    fn empty_and_oversized() {
        let (s, c) = exact_cvrp(&inst(&[])).unwrap();
        assert!(s.is_empty());
        assert_eq!(c, 0.0);
        let big: Vec<_> = (0..11).map(|k| (1.0 + k as f64, 0.0, 0.1)).collect();
        assert!(matches!(exact_cvrp(&inst(&big)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn collinear_ties_prefer_fewer_tours() {
        // One tour through both or two out-and-backs both cost 4.
        let i = inst(&[(1.0, 0.0, 0.5), (2.0, 0.0, 0.5)]);
        let (s, c) = exact_cvrp(&i).unwrap();
        assert!((c - 4.0).abs() < 1e-12);
        assert_eq!(s.len(), 1);
    }
}
