//! The few-tours path: round demands down to multiples of `1/(2n)`, solve the
//! rounded instance, and split every tour that overflows the true demands.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::general::backend::backend_solve;
use crate::model::{Instance, Solution, Tour, TOL};
use crate::params::Params;

/// `⌊d·2n⌋/(2n)`, raised to `1/(2n)` when it would reach zero.
pub fn round_down(demand: f64, n: usize) -> f64 {
    let unit = 2.0 * n as f64;
    let k = (demand * unit + 1e-9).floor().max(1.0);
    k / unit
}

/// The instance with every demand rounded by [`round_down`].
pub fn rounded_instance(instance: &Instance) -> Result<Instance> {
    let n = instance.len();
    let demands: Vec<f64> = instance
        .terminals()
        .iter()
        .map(|t| round_down(t.demand, n))
        .collect();
    instance.with_demands(&demands)
}

/// Splits a tour by true demand: the heaviest terminals (ties by id) fill the
/// first tour up to capacity, the rest form the second. Both keep the
/// original cyclic visiting order.
pub fn split_tour(tour: &Tour, instance: &Instance) -> Result<(Tour, Option<Tour>)> {
    let mut ids: Vec<usize> = tour.terminals().collect();
    ids.sort_by(|&a, &b| {
        instance
            .demand(b)
            .total_cmp(&instance.demand(a))
            .then(a.cmp(&b))
    });
    let mut load = 0.0;
    let mut take = 0;
    for &id in &ids {
        if load + instance.demand(id) > 1.0 + TOL {
            break;
        }
        load += instance.demand(id);
        take += 1;
    }
    if take == ids.len() {
        return Ok((tour.clone(), None));
    }
    let first: BTreeSet<usize> = ids[..take].iter().copied().collect();
    let keep = |want: bool| {
        Tour::new(
            tour.stops
                .iter()
                .copied()
                .filter(|s| s.terminal().is_none_or(|id| first.contains(&id) == want))
                .collect(),
        )
    };
    let (t1, t2) = (keep(true), keep(false));
    let rest = t2.demand(instance);
    if rest > 1.0 + TOL {
        return Err(Error::Internal(format!(
            "second split tour carries demand {rest}"
        )));
    }
    Ok((t1, Some(t2)))
}

#[derive(Debug, Clone)]
pub struct FewToursOutcome {
    pub solution: Solution,
    pub rounded: Instance,
    /// Backend solution on the rounded instance.
    pub backend: Solution,
    pub backend_cost: f64,
}

pub fn few_tours_solve(instance: &Instance, params: &Params, seed: u64) -> Result<FewToursOutcome> {
    let rounded = rounded_instance(instance)?;
    let backend = backend_solve(&rounded, params, seed)?;
    let backend_cost = rounded.solution_cost(&backend)?;
    let mut tours = Vec::with_capacity(backend.len());
    for tour in &backend.tours {
        let (t1, t2) = split_tour(tour, instance)?;
        tours.push(t1);
        tours.extend(t2);
    }
    Ok(FewToursOutcome {
        solution: Solution::new(tours),
        rounded,
        backend,
        backend_cost,
    })
}
