//! Choosing between the many-tours and few-tours paths, and the single entry
//! point for every algorithm.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::exact::exact_cvrp_capped;
use crate::baselines::itp::itp_solve;
use crate::big::big_solve;
use crate::error::{Error, Result};
use crate::general::cluster::many_tours_solve;
use crate::general::few_tours::few_tours_solve;
use crate::general::partition::bounded_distance_partition;
use crate::grid::build_grid;
use crate::model::{Instance, Solution, TerminalId};
use crate::params::Params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Big,
    ManyTours,
    FewTours,
    Itp,
    Exact,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Big => "big",
            Branch::ManyTours => "many-tours",
            Branch::FewTours => "few-tours",
            Branch::Itp => "itp",
            Branch::Exact => "exact",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Algorithms selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Partition by distance scale, then pick a path per part by total demand.
    Auto,
    Big,
    ManyTours,
    FewTours,
    Itp,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Auto,
        Algorithm::Big,
        Algorithm::ManyTours,
        Algorithm::FewTours,
        Algorithm::Itp,
        Algorithm::Exact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Big => "big",
            Algorithm::ManyTours => "many-tours",
            Algorithm::FewTours => "few-tours",
            Algorithm::Itp => "itp",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown algorithm '{s}'")))
    }
}

/// The many-tours path is taken iff `Y ≥ Γ` and `Y ≥ 1`.
pub fn choose_branch(total_demand: f64, params: &Params) -> Branch {
    if total_demand >= params.gamma && total_demand >= 1.0 {
        Branch::ManyTours
    } else {
        Branch::FewTours
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartOutcome {
    pub ids: Vec<TerminalId>,
    pub total_demand: f64,
    pub branch: Branch,
    pub cost: f64,
    pub w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub cost: f64,
    /// Many-tours if any part took that path.
    pub branch: Branch,
    /// Summed clustering cost over many-tours parts.
    pub w: Option<f64>,
    pub parts: Vec<PartOutcome>,
}

fn solve_part(part: &Instance, branch: Branch, params: &Params, seed: u64) -> Result<(Solution, Option<f64>)> {
    match branch {
        Branch::ManyTours => {
            let grid = build_grid(part, params)?;
            let out = many_tours_solve(part, &grid, params, seed)?;
            let w = out.w();
            Ok((out.solution, Some(w)))
        }
        _ => Ok((few_tours_solve(part, params, seed)?.solution, None)),
    }
}

fn run_parts(
    instance: &Instance,
    params: &Params,
    seed: u64,
    pick: impl Fn(f64) -> Branch + Sync,
) -> Result<SolveOutcome> {
    let plan = bounded_distance_partition(instance, params);
    let solved: Vec<(PartOutcome, Solution)> = plan
        .parts
        .par_iter()
        .enumerate()
        .map(|(k, ids)| {
            let part = instance.subinstance(ids)?;
            let total_demand = part.total_demand();
            let branch = pick(total_demand);
            let (local, w) = solve_part(&part, branch, params, seed.wrapping_add(k as u64))?;
            let solution = local.relabel(ids);
            let cost = instance.solution_cost(&solution)?;
            Ok((
                PartOutcome {
                    ids: ids.clone(),
                    total_demand,
                    branch,
                    cost,
                    w,
                },
                solution,
            ))
        })
        .collect::<Result<_>>()?;

    let mut solution = Solution::default();
    let mut parts = Vec::with_capacity(solved.len());
    for (part, s) in solved {
        solution.extend(s);
        parts.push(part);
    }
    let cost = instance.solution_cost(&solution)?;
    let branch = if parts.iter().any(|p| p.branch == Branch::ManyTours) {
        Branch::ManyTours
    } else {
        Branch::FewTours
    };
    let w = parts
        .iter()
        .filter_map(|p| p.w)
        .reduce(|a, b| a + b);
    Ok(SolveOutcome {
        solution,
        cost,
        branch,
        w,
        parts,
    })
}

/// Partitions by distance scale and routes each part by its total demand.
/// Parts are solved in parallel and concatenated in part order.
pub fn dispatch(instance: &Instance, params: &Params, seed: u64) -> Result<SolveOutcome> {
    if instance.is_empty() {
        return Err(Error::Empty("instance has no terminals"));
    }
    run_parts(instance, params, seed, |y| choose_branch(y, params))
}

fn whole(solution: Solution, instance: &Instance, branch: Branch, w: Option<f64>) -> Result<SolveOutcome> {
    let cost = instance.solution_cost(&solution)?;
    let part = PartOutcome {
        ids: (0..instance.len()).collect(),
        total_demand: instance.total_demand(),
        branch,
        cost,
        w,
    };
    Ok(SolveOutcome {
        solution,
        cost,
        branch,
        w,
        parts: vec![part],
    })
}

/// Runs `algorithm` on the instance.
///
/// `big` needs every demand at least ε and bounded distance; `many-tours`
/// runs on every distance part regardless of total demand; `few-tours`,
/// `itp` and `exact` take the whole instance.
pub fn solve(instance: &Instance, params: &Params, algorithm: Algorithm, seed: u64) -> Result<SolveOutcome> {
    if instance.is_empty() {
        return Err(Error::Empty("instance has no terminals"));
    }
    match algorithm {
        Algorithm::Auto => dispatch(instance, params, seed),
        Algorithm::ManyTours => run_parts(instance, params, seed, |_| Branch::ManyTours),
        Algorithm::Big => whole(big_solve(instance, params)?.solution, instance, Branch::Big, None),
        Algorithm::FewTours => whole(
            few_tours_solve(instance, params, seed)?.solution,
            instance,
            Branch::FewTours,
            None,
        ),
        Algorithm::Itp => whole(itp_solve(instance, params, seed)?.solution, instance, Branch::Itp, None),
        Algorithm::Exact => whole(
            exact_cvrp_capped(instance, params.backend_exact_threshold)?.0,
            instance,
            Branch::Exact,
            None,
        ),
    }
}
