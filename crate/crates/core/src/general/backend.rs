//! Solver for the rounded few-tours instance.
//!
//! Small instances go to the exact oracle. Larger ones are built by
//! Clarke–Wright savings, improved by relocate and swap moves between routes,
//! and finished with a TSP pass per route.

use crate::baselines::exact::exact_cvrp_capped;
use crate::error::Result;
use crate::model::{Instance, Point, Solution, TerminalId, Tour, TOL};
use crate::params::Params;
use crate::tsp::tsp;

const IMPROVE: f64 = 1e-10;
const MAX_PASSES: usize = 100;

pub fn backend_solve(instance: &Instance, params: &Params, seed: u64) -> Result<Solution> {
    if instance.is_empty() {
        return Ok(Solution::default());
    }
    if instance.len() <= params.backend_exact_threshold {
        return Ok(exact_cvrp_capped(instance, params.backend_exact_threshold)?.0);
    }
    let mut routes = savings(instance);
    local_search(instance, &mut routes);
    let mut tours = Vec::with_capacity(routes.len());
    for (k, route) in routes.into_iter().enumerate() {
        tours.push(Tour::from_visits(reorder(instance, &route, params, seed.wrapping_add(k as u64))?));
    }
    Ok(Solution::new(tours))
}

/// Parallel Clarke–Wright savings; merges only join route ends.
pub fn savings(instance: &Instance) -> Vec<Vec<TerminalId>> {
    let n = instance.len();
    let depot = instance.depot();
    let loc: Vec<Point> = (0..n).map(|i| instance.location(i)).collect();
    let mut list = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let s = depot.dist(&loc[i]) + depot.dist(&loc[j]) - loc[i].dist(&loc[j]);
            list.push((s, i, j));
        }
    }
    list.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut route_of: Vec<usize> = (0..n).collect();
    let mut routes: Vec<Vec<TerminalId>> = (0..n).map(|i| vec![i]).collect();
    let mut load: Vec<f64> = (0..n).map(|i| instance.demand(i)).collect();
    for (s, i, j) in list {
        if s <= 0.0 {
            break;
        }
        let (ri, rj) = (route_of[i], route_of[j]);
        if ri == rj || load[ri] + load[rj] > 1.0 + TOL {
            continue;
        }
        let (a, b) = (&routes[ri], &routes[rj]);
        let i_first = a[0] == i;
        let i_last = *a.last().unwrap() == i;
        let j_first = b[0] == j;
        let j_last = *b.last().unwrap() == j;
        if !(i_first || i_last) || !(j_first || j_last) {
            continue;
        }
        let mut left = std::mem::take(&mut routes[ri]);
        let mut right = std::mem::take(&mut routes[rj]);
        if !i_last {
            left.reverse();
        }
        if !j_first {
            right.reverse();
        }
        for &v in &right {
            route_of[v] = ri;
        }
        left.extend(right);
        routes[ri] = left;
        load[ri] += load[rj];
        load[rj] = 0.0;
    }
    routes.into_iter().filter(|r| !r.is_empty()).collect()
}

fn path_cost(instance: &Instance, route: &[TerminalId]) -> f64 {
    crate::baselines::itp::order_cost(instance, route)
}

/// Relocate and swap moves until a full pass finds no improvement.
pub fn local_search(instance: &Instance, routes: &mut Vec<Vec<TerminalId>>) {
    let demand = |r: &[TerminalId]| r.iter().map(|&v| instance.demand(v)).sum::<f64>();
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        // Relocate.
        for from in 0..routes.len() {
            let mut pos = 0;
            while pos < routes[from].len() {
                let v = routes[from][pos];
                let base_from = path_cost(instance, &routes[from]);
                let mut reduced = routes[from].clone();
                reduced.remove(pos);
                let gain = base_from - path_cost(instance, &reduced);
                let mut best: Option<(f64, usize, usize)> = None;
                for (to, route) in routes.iter().enumerate() {
                    if to == from || demand(route) + instance.demand(v) > 1.0 + TOL {
                        continue;
                    }
                    let (delta, at) = best_insertion(instance, route, v);
                    if delta - gain < -IMPROVE && best.is_none_or(|b| delta < b.0) {
                        best = Some((delta, to, at));
                    }
                }
                if let Some((_, to, at)) = best {
                    routes[from] = reduced;
                    routes[to].insert(at, v);
                    improved = true;
                } else {
                    pos += 1;
                }
            }
        }
        routes.retain(|r| !r.is_empty());
        // Swap.
        for r1 in 0..routes.len() {
            for r2 in r1 + 1..routes.len() {
                let (d1, d2) = (demand(&routes[r1]), demand(&routes[r2]));
                let (c1, c2) = (path_cost(instance, &routes[r1]), path_cost(instance, &routes[r2]));
                'outer: for p in 0..routes[r1].len() {
                    for q in 0..routes[r2].len() {
                        let (u, v) = (routes[r1][p], routes[r2][q]);
                        let (du, dv) = (instance.demand(u), instance.demand(v));
                        if d1 - du + dv > 1.0 + TOL || d2 - dv + du > 1.0 + TOL {
                            continue;
                        }
                        let mut a = routes[r1].clone();
                        let mut b = routes[r2].clone();
                        a[p] = v;
                        b[q] = u;
                        if path_cost(instance, &a) + path_cost(instance, &b) < c1 + c2 - IMPROVE {
                            routes[r1] = a;
                            routes[r2] = b;
                            improved = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Cheapest insertion of `v` into `route`: `(added cost, position)`.
fn best_insertion(instance: &Instance, route: &[TerminalId], v: TerminalId) -> (f64, usize) {
    let depot = instance.depot();
    let x = instance.location(v);
    let at = |k: usize| -> Point {
        if k == 0 || k > route.len() {
            depot
        } else {
            instance.location(route[k - 1])
        }
    };
    let mut best = (f64::INFINITY, 0);
    for pos in 0..=route.len() {
        let (a, b) = (at(pos), at(pos + 1));
        let delta = a.dist(&x) + x.dist(&b) - a.dist(&b);
        if delta < best.0 {
            best = (delta, pos);
        }
    }
    best
}

/// Route order from a TSP pass over the depot and the route's terminals, kept
/// only when it is shorter.
fn reorder(instance: &Instance, route: &[TerminalId], params: &Params, seed: u64) -> Result<Vec<TerminalId>> {
    let mut points = vec![instance.depot()];
    points.extend(route.iter().map(|&v| instance.location(v)));
    let t = tsp(&points, params, seed)?.rotated_to(0);
    let order: Vec<TerminalId> = t.order[1..].iter().map(|&k| route[k - 1]).collect();
    if path_cost(instance, &order) < path_cost(instance, route) {
        Ok(order)
    } else {
        Ok(route.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::verify_solution;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn co_located_halves_share_a_tour() {
        let i = Instance::new(
            Point::ORIGIN,
            [(Point::new(1.0, 0.0), 0.5), (Point::new(1.0, 0.0), 0.5)],
        )
        .unwrap();
        let p = Params::new(0.4).unwrap();
        assert_eq!(backend_solve(&i, &p, 0).unwrap().len(), 1);
    }

    #[test]
    fn heuristic_path_is_feasible_and_sane() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sites: Vec<(Point, f64)> = (0..50)
            .map(|_| {
                (
                    Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                    rng.gen_range(0.05..0.5),
                )
            })
            .collect();
        let i = Instance::new(Point::ORIGIN, sites).unwrap();
        let p = Params::new(0.4).unwrap();
        let s = backend_solve(&i, &p, 1).unwrap();
        assert!(verify_solution(&i, &s).is_feasible());
        let lower: f64 = s
            .tours
            .iter()
            .map(|t| 2.0 * t.terminals().map(|v| i.dist(v)).fold(0.0, f64::max))
            .sum();
        assert!(i.solution_cost(&s).unwrap() >= lower - 1e-9);
        // Savings plus local search should beat one tour per terminal.
        let singles: f64 = (0..50).map(|v| 2.0 * i.dist(v)).sum();
        assert!(i.solution_cost(&s).unwrap() < singles);
    }
}
