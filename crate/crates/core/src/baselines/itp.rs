//! Iterated tour partitioning for unsplittable demands.
//!
//! Terminals with demand above 1/2 get their own out-and-back tour. The
//! rest are cut, in TSP order, into consecutive groups. A cut offset
//! `θ ∈ [0, 1/2)` places cut marks at `θ + m/2` along the cumulative demand
//! axis; a terminal opens a new group when its demand interval
//! `[P_{i-1}, P_i)` contains a mark. Every group then has demand below 1, and
//! terminal `i` opens a group for a `2·dᵢ` fraction of offsets, so the
//! cheapest offset costs at most `cost(t_TSP) + 4·Σ dist(v)·demand(v)`.
//! Only the offsets `P_i mod 1/2` need to be tried.

use crate::error::{Error, Result};
use crate::model::{Instance, Point, Solution, TerminalId, Tour, TOL};
use crate::params::Params;
use crate::tsp::tsp;

#[derive(Debug, Clone, PartialEq)]
pub struct ItpOutcome {
    pub solution: Solution,
    pub cost: f64,
    /// Cost of the closed TSP tour through the depot and all terminals.
    pub tsp_cost: f64,
    /// `tsp_cost + 4·Σ dist(v)·demand(v)`.
    pub bound: f64,
}

/// `cost(t) + 4·Σ dist(v)·demand(v)`.
pub fn itp_bound(instance: &Instance, tsp_cost: f64) -> f64 {
    tsp_cost
        + 4.0
            * (0..instance.len())
                .map(|id| instance.dist(id) * instance.demand(id))
                .sum::<f64>()
}

/// Cost of the closed tour depot → `order` → depot.
pub fn order_cost(instance: &Instance, order: &[TerminalId]) -> f64 {
    let mut here = instance.depot();
    let mut cost = 0.0;
    for &id in order {
        let next = instance.location(id);
        cost += here.dist(&next);
        here = next;
    }
    cost + here.dist(&instance.depot())
}

/// Partitions the closed tour depot → `tsp_order` → depot into feasible
/// tours. `tsp_order` must list every terminal exactly once.
pub fn itp_unsplittable(instance: &Instance, tsp_order: &[TerminalId]) -> Result<ItpOutcome> {
    let n = instance.len();
    let mut seen = vec![false; n];
    for &id in tsp_order {
        if id >= n || std::mem::replace(&mut seen[id], true) {
            return Err(Error::InvalidParam(format!(
                "tsp order is not a permutation of the terminals (at id {id})"
            )));
        }
    }
    if tsp_order.len() != n {
        return Err(Error::InvalidParam(format!(
            "tsp order lists {} of {n} terminals",
            tsp_order.len()
        )));
    }

    let mut tours: Vec<Tour> = Vec::new();
    let mut small = Vec::new();
    for &id in tsp_order {
        if instance.demand(id) > 0.5 {
            tours.push(Tour::from_visits([id]));
        } else {
            small.push(id);
        }
    }
    if let Some(starts) = best_cuts(instance, &small) {
        let mut bounds = starts.clone();
        bounds.push(small.len());
        for w in bounds.windows(2) {
            tours.push(Tour::from_visits(small[w[0]..w[1]].iter().copied()));
        }
    }

    let solution = Solution::new(tours);
    let cost = instance.solution_cost(&solution)?;
    let tsp_cost = order_cost(instance, tsp_order);
    let bound = itp_bound(instance, tsp_cost);
    if cost > bound + TOL {
        return Err(Error::Internal(format!(
            "partitioned cost {cost} exceeds the bound {bound}"
        )));
    }
    Ok(ItpOutcome {
        solution,
        cost,
        tsp_cost,
        bound,
    })
}

/// Group start positions (always including 0) for the cheapest offset.
fn best_cuts(instance: &Instance, small: &[TerminalId]) -> Option<Vec<usize>> {
    if small.is_empty() {
        return None;
    }
    let depot = instance.depot();
    let loc: Vec<Point> = small.iter().map(|&id| instance.location(id)).collect();
    let mut prefix = Vec::with_capacity(small.len() + 1);
    prefix.push(0.0);
    for &id in small {
        prefix.push(prefix.last().unwrap() + instance.demand(id));
    }
    // Extra cost of starting a group at i > 0 instead of continuing the path.
    let penalty = |i: usize| loc[i - 1].dist(&depot) + depot.dist(&loc[i]) - loc[i - 1].dist(&loc[i]);

    let mut offsets: Vec<f64> = prefix.iter().map(|p| p.rem_euclid(0.5)).collect();
    offsets.sort_by(f64::total_cmp);
    offsets.dedup();

    let mut best: Option<(f64, Vec<usize>)> = None;
    for &theta in &offsets {
        let starts = starts_for(&prefix, theta);
        let extra: f64 = starts.iter().skip(1).map(|&i| penalty(i)).sum();
        if best.as_ref().is_none_or(|(c, _)| extra < *c - 1e-12) {
            best = Some((extra, starts));
        }
    }
    best.map(|(_, s)| s)
}

/// Positions `i` whose interval `[P_i, P_{i+1})` contains a mark `θ + m/2`, plus 0.
fn starts_for(prefix: &[f64], theta: f64) -> Vec<usize> {
    let mut starts = vec![0];
    for i in 1..prefix.len() - 1 {
        let (lo, hi) = (prefix[i], prefix[i + 1]);
        // Smallest mark at or above lo.
        let m = ((lo - theta) * 2.0).ceil();
        let mark = theta + m / 2.0;
        if mark < hi {
            starts.push(i);
        }
    }
    starts
}

/// ITP over a TSP tour of the depot and all terminals computed by the TSP engine.
pub fn itp_solve(instance: &Instance, params: &Params, seed: u64) -> Result<ItpOutcome> {
    if instance.is_empty() {
        return Ok(ItpOutcome {
            solution: Solution::default(),
            cost: 0.0,
            tsp_cost: 0.0,
            bound: 0.0,
        });
    }
    let mut points = vec![instance.depot()];
    points.extend(instance.terminals().iter().map(|t| t.location));
    let tour = tsp(&points, params, seed)?.rotated_to(0);
    let order: Vec<TerminalId> = tour.order[1..].iter().map(|&k| k - 1).collect();
    itp_unsplittable(instance, &order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;

    fn inst(sites: &[(f64, f64, f64)]) -> Instance {
        Instance::new(
            Point::ORIGIN,
            sites.iter().map(|&(x, y, d)| (Point::new(x, y), d)),
        )
        .unwrap()
    }

    #[test]
    fn heavy_terminals_get_dedicated_tours() {
        let i = inst(&[(1.0, 0.0, 0.6), (1.0, 0.0, 0.6), (1.0, 0.0, 0.6)]);
        let out = itp_unsplittable(&i, &[0, 1, 2]).unwrap();
        assert_eq!(out.solution.len(), 3);
        assert!((out.cost - 6.0).abs() < 1e-12);
        assert!((out.tsp_cost - 2.0).abs() < 1e-12);
        assert!((out.bound - 9.2).abs() < 1e-12);
    }

    #[test]
    fn light_total_is_the_tsp_tour() {
        let i = inst(&[(1.0, 0.0, 0.1), (1.0, 1.0, 0.2), (0.0, 1.0, 0.2)]);
        let out = itp_unsplittable(&i, &[0, 1, 2]).unwrap();
        assert_eq!(out.solution.len(), 1);
        assert!((out.cost - out.tsp_cost).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_orders() {
        let i = inst(&[(1.0, 0.0, 0.1), (2.0, 0.0, 0.1)]);
        assert!(itp_unsplittable(&i, &[0]).is_err());
        assert!(itp_unsplittable(&i, &[0, 0]).is_err());
        assert!(itp_unsplittable(&i, &[0, 5]).is_err());
    }

    #[test]
    fn marks_split_prefix_intervals() {
        let prefix = [0.0, 0.25, 0.5, 0.75, 1.0];
        assert_eq!(starts_for(&prefix, 0.0), vec![0, 2]);
        assert_eq!(starts_for(&prefix, 0.125), vec![0, 2]);
        assert_eq!(starts_for(&prefix, 0.375), vec![0, 1, 3]);
    }

    #[test]
    fn groups_stay_below_capacity() {
        let sites: Vec<_> = (0..20)
            .map(|k| {
                let a = k as f64 * 0.3;
                (a.cos() * 2.0, a.sin() * 2.0, 0.05 + 0.45 * ((k * 7) % 10) as f64 / 10.0)
            })
            .collect();
        let i = inst(&sites);
        let order: Vec<usize> = (0..20).collect();
        let out = itp_unsplittable(&i, &order).unwrap();
        let r = verify_solution(&i, &out.solution);
        assert!(r.is_feasible(), "{r}");
        assert!(out.cost <= out.bound + 1e-9);
    }
}
