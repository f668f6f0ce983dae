//! Splitting an instance into parts of bounded distance ratio.

use crate::model::{Instance, TerminalId};
use crate::params::Params;

/// Disjoint terminal sets covering the instance, each with `D_max/D_min ≤ C`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubinstancePlan {
    /// Each part ascending by id; parts ordered by their smallest distance.
    pub parts: Vec<Vec<TerminalId>>,
}

/// Greedy scale grouping: sort by depot distance, open a part at the smallest
/// uncovered distance `d₀`, absorb everything within `C·d₀`, repeat.
pub fn bounded_distance_partition(instance: &Instance, params: &Params) -> SubinstancePlan {
    let mut ids: Vec<TerminalId> = (0..instance.len()).collect();
    ids.sort_by(|&a, &b| instance.dist(a).total_cmp(&instance.dist(b)).then(a.cmp(&b)));
    let mut parts = Vec::new();
    let mut k = 0;
    while k < ids.len() {
        let limit = params.c * instance.dist(ids[k]);
        let start = k;
        while k < ids.len() && instance.dist(ids[k]) <= limit {
            k += 1;
        }
        let mut part = ids[start..k].to_vec();
        part.sort_unstable();
        parts.push(part);
    }
    SubinstancePlan { parts }
}
