//! Solver for instances whose terminals are all big (demand ≥ ε).
//!
//! The pipeline moves every terminal to its nearest grid center, rounds
//! demands per center into at most `⌈1/β⌉` groups, enumerates every
//! capacity-feasible tour type over the resulting (center, demand) pair
//! types, solves the configuration problem exactly, and finally restores the
//! original locations with an out-and-back excursion from each center.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{build_grid, CenterGrid};
use crate::model::{Instance, Point, Solution, Stop, TerminalId, Tour, TOL};
use crate::params::Params;
use crate::tsp::exact_tsp;

#[derive(Debug, Clone, PartialEq)]
pub struct SnappedTerminal {
    pub id: TerminalId,
    pub center: usize,
    pub original_demand: f64,
    /// Current demand; equals `original_demand` until rounded.
    pub demand: f64,
    /// Distance from the original location to the center.
    pub displacement: f64,
}

/// Terminals relocated to centers, ordered by terminal id.
#[derive(Debug, Clone, PartialEq)]
pub struct SnappedInstance {
    pub depot: Point,
    pub terminals: Vec<SnappedTerminal>,
    pub center_points: BTreeMap<usize, Point>,
}

/// All snapped terminals sharing a center and a (rounded) demand.
#[derive(Debug, Clone, PartialEq)]
pub struct PairType {
    pub center: usize,
    pub demand: f64,
    /// Terminal ids, ascending.
    pub members: Vec<TerminalId>,
}

impl PairType {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }
}

impl SnappedInstance {
    /// Pair types sorted by `(center, demand)`.
    pub fn pair_types(&self) -> Vec<PairType> {
        let mut map: BTreeMap<(usize, u64), Vec<TerminalId>> = BTreeMap::new();
        for t in &self.terminals {
            map.entry((t.center, t.demand.to_bits()))
                .or_default()
                .push(t.id);
        }
        let mut out: Vec<PairType> = map
            .into_iter()
            .map(|((center, bits), mut members)| {
                members.sort_unstable();
                PairType {
                    center,
                    demand: f64::from_bits(bits),
                    members,
                }
            })
            .collect();
        out.sort_by(|a, b| {
            a.center
                .cmp(&b.center)
                .then(a.demand.total_cmp(&b.demand))
        });
        out
    }

    /// The snapped, rounded instance as an ordinary instance (terminal `k` is `terminals[k]`).
    pub fn to_instance(&self) -> Result<Instance> {
        Instance::new(
            self.depot,
            self.terminals
                .iter()
                .map(|t| (self.center_points[&t.center], t.demand)),
        )
    }

    pub fn total_displacement(&self) -> f64 {
        self.terminals.iter().map(|t| t.displacement).sum()
    }
}

/// Moves each terminal to its nearest center. Every terminal must be big.
pub fn snap_to_centers(
    instance: &Instance,
    grid: &CenterGrid,
    params: &Params,
) -> Result<SnappedInstance> {
    if let Some(t) = instance.terminals().iter().find(|t| !params.is_big(t.demand)) {
        return Err(Error::Precondition(format!(
            "terminal {} has small demand {} < epsilon {}",
            t.id, t.demand, params.epsilon
        )));
    }
    let centers: Vec<usize> = instance
        .terminals()
        .par_iter()
        .map(|t| grid.nearest(&t.location))
        .collect();
    let mut center_points = BTreeMap::new();
    let terminals = instance
        .terminals()
        .iter()
        .zip(centers)
        .map(|(t, center)| {
            let z = grid.center(center);
            center_points.insert(center, z);
            SnappedTerminal {
                id: t.id,
                center,
                original_demand: t.demand,
                demand: t.demand,
                displacement: z.dist(&t.location),
            }
        })
        .collect();
    Ok(SnappedInstance {
        depot: instance.depot(),
        terminals,
        center_points,
    })
}

/// Adaptive rounding per crowded center.
///
/// At a center holding at least `1/β` terminals, demands are sorted
/// non-decreasingly (ties by id), cut into `⌈1/β⌉` groups whose sizes differ
/// by at most one with the smaller groups first, and each demand is raised
/// to its group maximum. Other centers are untouched.
pub fn adaptive_round(snapped: &SnappedInstance, params: &Params) -> SnappedInstance {
    let mut out = snapped.clone();
    let mut by_center: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, t) in out.terminals.iter().enumerate() {
        by_center.entry(t.center).or_default().push(k);
    }
    let groups = params.group_count();
    for slots in by_center.values_mut() {
        if !params.is_crowded(slots.len()) {
            continue;
        }
        slots.sort_by(|&a, &b| {
            let (ta, tb) = (&out.terminals[a], &out.terminals[b]);
            ta.demand.total_cmp(&tb.demand).then(ta.id.cmp(&tb.id))
        });
        for range in group_ranges(slots.len(), groups) {
            let group = &slots[range];
            let max = group
                .iter()
                .map(|&k| out.terminals[k].demand)
                .fold(f64::MIN, f64::max);
            for &k in group {
                out.terminals[k].demand = max;
            }
        }
    }
    out
}

/// Splits `len` items into `groups` consecutive ranges; when uneven, the
/// first ranges are one element shorter than the rest.
pub fn group_ranges(len: usize, groups: usize) -> Vec<std::ops::Range<usize>> {
    let groups = groups.clamp(1, len.max(1));
    let base = len / groups;
    let long = len % groups;
    let short = groups - long;
    let mut out = Vec::with_capacity(groups);
    let mut start = 0;
    for g in 0..groups {
        let size = if g < short { base } else { base + 1 };
        out.push(start..start + size);
        start += size;
    }
    out
}

/// A capacity-feasible multiset of pair types with its optimal closed-tour price.
#[derive(Debug, Clone, PartialEq)]
pub struct TourType {
    /// `(pair type index, count)`, ascending by pair type.
    pub content: Vec<(usize, usize)>,
    pub demand: f64,
    /// Exact TSP cost over the depot and the distinct centers of the content.
    pub cost: f64,
    /// Distinct centers in visiting order.
    pub route: Vec<usize>,
}

impl TourType {
    pub fn size(&self) -> usize {
        self.content.iter().map(|&(_, c)| c).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Catalog {
    pub pairs: Vec<PairType>,
    pub types: Vec<TourType>,
}

/// Enumerates every multiset over occurring pair types with total demand ≤ 1,
/// at most `⌊1/ε⌋` members, and counts within the available multiplicities.
pub fn enumerate_tour_types(
    snapped: &SnappedInstance,
    params: &Params,
) -> Result<Catalog> {
    let pairs = snapped.pair_types();
    if let Some(p) = pairs.iter().find(|p| !params.is_big(p.demand)) {
        return Err(Error::Precondition(format!(
            "pair type at center {} has small demand {}",
            p.center, p.demand
        )));
    }
    let max_size = params.max_big_per_tour();
    let mut contents: Vec<(Vec<(usize, usize)>, f64)> = Vec::new();
    let mut current = Vec::new();
    enumerate_rec(
        &pairs,
        0,
        0,
        0.0,
        max_size,
        params.catalog_cap,
        &mut current,
        &mut contents,
    )?;

    // Price each distinct center set once.
    let center_sets: Vec<Vec<usize>> = contents
        .iter()
        .map(|(content, _)| distinct_centers(&pairs, content))
        .collect();
    let mut unique: Vec<Vec<usize>> = center_sets.clone();
    unique.sort();
    unique.dedup();
    let priced: Vec<(f64, Vec<usize>)> = unique
        .par_iter()
        .map(|centers| price(snapped, centers))
        .collect::<Result<_>>()?;
    let lookup: HashMap<&Vec<usize>, &(f64, Vec<usize>)> = unique.iter().zip(&priced).collect();

    let types = contents
        .into_iter()
        .zip(&center_sets)
        .map(|((content, demand), centers)| {
            let (cost, route) = lookup[centers].clone();
            TourType {
                content,
                demand,
                cost,
                route,
            }
        })
        .collect();
    Ok(Catalog { pairs, types })
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    pairs: &[PairType],
    from: usize,
    size: usize,
    demand: f64,
    max_size: usize,
    cap: usize,
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<(Vec<(usize, usize)>, f64)>,
) -> Result<()> {
    for p in from..pairs.len() {
        let d = pairs[p].demand;
        let mut count = 1;
        while count <= pairs[p].multiplicity()
            && size + count <= max_size
            && demand + d * count as f64 <= 1.0 + TOL
        {
            current.push((p, count));
            out.push((current.clone(), demand + d * count as f64));
            if out.len() > cap {
                return Err(Error::ResourceLimit(format!(
                    "tour-type catalog exceeds {cap} entries"
                )));
            }
            enumerate_rec(
                pairs,
                p + 1,
                size + count,
                demand + d * count as f64,
                max_size,
                cap,
                current,
                out,
            )?;
            current.pop();
            count += 1;
        }
    }
    Ok(())
}

fn distinct_centers(pairs: &[PairType], content: &[(usize, usize)]) -> Vec<usize> {
    let mut centers: Vec<usize> = content.iter().map(|&(p, _)| pairs[p].center).collect();
    centers.sort_unstable();
    centers.dedup();
    centers
}

fn price(snapped: &SnappedInstance, centers: &[usize]) -> Result<(f64, Vec<usize>)> {
    let mut points = vec![snapped.depot];
    points.extend(centers.iter().map(|c| snapped.center_points[c]));
    let tour = exact_tsp(&points)?.rotated_to(0);
    let route = tour.order[1..].iter().map(|&k| centers[k - 1]).collect();
    Ok((tour.cost, route))
}

/// Chosen tour types with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigSolution {
    /// `(tour type index, count)`, ascending by type index.
    pub counts: Vec<(usize, usize)>,
    pub cost: f64,
    pub method: SearchMethod,
    pub states_explored: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// A* over residual multiplicity vectors.
    BestFirst,
    /// Maximum-weight matching; exact when tours hold at most two terminals.
    Matching,
}

/// Minimum-cost count vector over tour types whose summed contents equal
/// the pair-type multiplicities exactly.
///
/// The search is best-first over residual multiplicity vectors. Each step
/// covers the first nonzero pair type, which keeps the expansion canonical,
/// and the admissible bound charges every remaining terminal the cheapest
/// per-member share `cost/size` of a tour type containing it. When the
/// residual state space is larger than `params.search_state_cap` and no
/// tour type holds more than two terminals, the same optimum is found as a
/// maximum-weight matching over pairing savings instead.
pub fn solve_configuration(catalog: &Catalog, params: &Params) -> Result<ConfigSolution> {
    let pairs = &catalog.pairs;
    for (p, pair) in pairs.iter().enumerate() {
        let covered = catalog
            .types
            .iter()
            .any(|t| t.content == [(p, 1)]);
        if !covered {
            return Err(Error::Precondition(format!(
                "pair type {p} at center {} has no singleton tour type",
                pair.center
            )));
        }
    }
    if pairs.is_empty() {
        return Ok(ConfigSolution {
            counts: vec![],
            cost: 0.0,
            method: SearchMethod::BestFirst,
            states_explored: 0,
        });
    }
    let state_estimate = pairs.iter().fold(1usize, |acc, p| {
        acc.saturating_mul(p.multiplicity() + 1)
    });
    let max_size = catalog.types.iter().map(TourType::size).max().unwrap_or(1);
    if state_estimate > params.search_state_cap && max_size <= 2 {
        return solve_by_matching(catalog);
    }
    best_first(catalog, params.search_state_cap)
}

#[derive(PartialEq)]
struct Entry {
    f: f64,
    seq: usize,
    state: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on f, then insertion order.
        other
            .f
            .total_cmp(&self.f)
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn best_first(catalog: &Catalog, cap: usize) -> Result<ConfigSolution> {
    let pairs = &catalog.pairs;
    let types = &catalog.types;
    let np = pairs.len();

    let mut by_first: Vec<Vec<usize>> = vec![Vec::new(); np];
    let mut share = vec![f64::INFINITY; np];
    for (k, t) in types.iter().enumerate() {
        by_first[t.content[0].0].push(k);
        let per = t.cost / t.size() as f64;
        for &(p, _) in &t.content {
            share[p] = share[p].min(per);
        }
    }
    let heuristic = |state: &[u16]| -> f64 {
        state
            .iter()
            .zip(&share)
            .map(|(&m, &s)| m as f64 * s)
            .sum()
    };

    let start: Vec<u16> = pairs.iter().map(|p| p.multiplicity() as u16).collect();
    let mut states: Vec<Vec<u16>> = vec![start.clone()];
    let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut g = vec![0.0f64];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut closed = vec![false];
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    heap.push(Entry {
        f: heuristic(&start),
        seq,
        state: 0,
    });

    while let Some(Entry { state, .. }) = heap.pop() {
        if closed[state] {
            continue;
        }
        closed[state] = true;
        let residual = states[state].clone();
        let Some(first) = residual.iter().position(|&m| m > 0) else {
            return Ok(finish(types, &parent, state, g[state], closed.len()));
        };
        for &k in &by_first[first] {
            let t = &types[k];
            if t.content.iter().any(|&(p, c)| (residual[p] as usize) < c) {
                continue;
            }
            let mut next = residual.clone();
            for &(p, c) in &t.content {
                next[p] -= c as u16;
            }
            let cand = g[state] + t.cost;
            let id = match index.get(&next) {
                Some(&id) => {
                    if closed[id] || cand >= g[id] {
                        continue;
                    }
                    id
                }
                None => {
                    if states.len() >= cap {
                        return Err(Error::ResourceLimit(format!(
                            "configuration search exceeded {cap} states"
                        )));
                    }
                    let id = states.len();
                    states.push(next.clone());
                    index.insert(next.clone(), id);
                    g.push(f64::INFINITY);
                    parent.push(None);
                    closed.push(false);
                    id
                }
            };
            g[id] = cand;
            parent[id] = Some((state, k));
            seq += 1;
            heap.push(Entry {
                f: cand + heuristic(&next),
                seq,
                state: id,
            });
        }
    }
    Err(Error::Internal("configuration search found no cover".into()))
}

fn finish(
    types: &[TourType],
    parent: &[Option<(usize, usize)>],
    goal: usize,
    cost: f64,
    explored: usize,
) -> ConfigSolution {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut at = goal;
    while let Some((prev, k)) = parent[at] {
        *counts.entry(k).or_default() += 1;
        at = prev;
    }
    let counts: Vec<(usize, usize)> = counts.into_iter().collect();
    let cost_sum = counts
        .iter()
        .map(|&(k, c)| types[k].cost * c as f64)
        .sum::<f64>();
    debug_assert!((cost_sum - cost).abs() <= 1e-6 * cost.max(1.0));
    ConfigSolution {
        counts,
        cost: cost_sum,
        method: SearchMethod::BestFirst,
        states_explored: explored,
    }
}

/// Weight resolution for the integer matching solver.
const MATCHING_SCALE_BITS: u32 = 26;

fn solve_by_matching(catalog: &Catalog) -> Result<ConfigSolution> {
    let pairs = &catalog.pairs;
    let mut type_of: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    for (k, t) in catalog.types.iter().enumerate() {
        type_of.insert(t.content.clone(), k);
    }
    // One vertex per terminal slot.
    let mut slot_pair = Vec::new();
    for (p, pair) in pairs.iter().enumerate() {
        slot_pair.extend(std::iter::repeat_n(p, pair.multiplicity()));
    }
    let single = |p: usize| catalog.types[type_of[&vec![(p, 1)]]].cost;
    let pair_type = |p: usize, q: usize| -> Option<usize> {
        let key = if p == q { vec![(p, 2)] } else { vec![(p.min(q), 1), (p.max(q), 1)] };
        type_of.get(&key).copied()
    };

    let mut weighted = Vec::new();
    for a in 0..slot_pair.len() {
        for b in a + 1..slot_pair.len() {
            let (p, q) = (slot_pair[a], slot_pair[b]);
            if let Some(k) = pair_type(p, q) {
                let saving = single(p) + single(q) - catalog.types[k].cost;
                if saving > 0.0 {
                    weighted.push((a, b, saving));
                }
            }
        }
    }
    let max_w = weighted.iter().map(|e| e.2).fold(0.0f64, f64::max);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut matched = vec![false; slot_pair.len()];
    if max_w > 0.0 {
        let scale = f64::from(1u32 << MATCHING_SCALE_BITS) / max_w;
        let edges: Vec<(usize, usize, i32)> = weighted
            .iter()
            .map(|&(a, b, w)| (a, b, (w * scale).round() as i32))
            .filter(|e| e.2 > 0)
            .collect();
        if !edges.is_empty() {
            let mate = mwmatching::Matching::new(edges).solve();
            for (a, &m) in mate.iter().enumerate() {
                if m != mwmatching::SENTINEL && a < m {
                    matched[a] = true;
                    matched[m] = true;
                    let k = pair_type(slot_pair[a], slot_pair[m])
                        .ok_or_else(|| Error::Internal("matched an infeasible pair".into()))?;
                    *counts.entry(k).or_default() += 1;
                }
            }
        }
    }
    for (a, &p) in slot_pair.iter().enumerate() {
        if !matched[a] {
            *counts.entry(type_of[&vec![(p, 1)]]).or_default() += 1;
        }
    }
    let counts: Vec<(usize, usize)> = counts.into_iter().collect();
    let cost = counts
        .iter()
        .map(|&(k, c)| catalog.types[k].cost * c as f64)
        .sum();
    Ok(ConfigSolution {
        counts,
        cost,
        method: SearchMethod::Matching,
        states_explored: 0,
    })
}

/// Expands the configuration into concrete tours. Each pair-type slot is
/// bound to the next unused member (ascending id); the route passes through
/// each center and serves its terminals by out-and-back excursions.
pub fn unsnap(
    config: &ConfigSolution,
    catalog: &Catalog,
    snapped: &SnappedInstance,
) -> Result<Solution> {
    let mut queues: Vec<VecDeque<TerminalId>> = catalog
        .pairs
        .iter()
        .map(|p| p.members.iter().copied().collect())
        .collect();
    let mut tours = Vec::new();
    for &(k, count) in &config.counts {
        let t = &catalog.types[k];
        for _ in 0..count {
            let mut stops = Vec::with_capacity(2 * t.size());
            for &center in &t.route {
                stops.push(Stop::Waypoint(snapped.center_points[&center]));
                for &(p, c) in &t.content {
                    if catalog.pairs[p].center != center {
                        continue;
                    }
                    for _ in 0..c {
                        let id = queues[p].pop_front().ok_or_else(|| {
                            Error::Internal(format!("pair type {p} ran out of terminals"))
                        })?;
                        stops.push(Stop::RoundTrip(id));
                    }
                }
            }
            tours.push(Tour::new(stops));
        }
    }
    if let Some(p) = queues.iter().position(|q| !q.is_empty()) {
        return Err(Error::Internal(format!("pair type {p} left unbound terminals")));
    }
    Ok(Solution::new(tours))
}

/// Everything the big-terminal pipeline produces.
#[derive(Debug, Clone)]
pub struct BigOutcome {
    pub solution: Solution,
    /// Cost of the configuration on the snapped, rounded instance.
    pub configured_cost: f64,
    pub snapped: SnappedInstance,
    pub rounded: SnappedInstance,
    pub catalog_size: usize,
    pub pair_type_count: usize,
    pub config: ConfigSolution,
}

/// Runs snap, round, enumerate, search and unsnap on a given grid.
pub fn big_solve_on_grid(
    instance: &Instance,
    grid: &CenterGrid,
    params: &Params,
) -> Result<BigOutcome> {
    let snapped = snap_to_centers(instance, grid, params)?;
    let rounded = adaptive_round(&snapped, params);
    let catalog = enumerate_tour_types(&rounded, params)?;
    let config = solve_configuration(&catalog, params)?;
    let solution = unsnap(&config, &catalog, &rounded)?;
    Ok(BigOutcome {
        solution,
        configured_cost: config.cost,
        catalog_size: catalog.types.len(),
        pair_type_count: catalog.pairs.len(),
        snapped,
        rounded,
        config,
    })
}

/// Big-terminal solver on the instance's own grid. Requires bounded distance.
pub fn big_solve(instance: &Instance, params: &Params) -> Result<BigOutcome> {
    if instance.is_empty() {
        return Ok(BigOutcome {
            solution: Solution::default(),
            configured_cost: 0.0,
            snapped: SnappedInstance {
                depot: instance.depot(),
                terminals: vec![],
                center_points: BTreeMap::new(),
            },
            rounded: SnappedInstance {
                depot: instance.depot(),
                terminals: vec![],
                center_points: BTreeMap::new(),
            },
            catalog_size: 0,
            pair_type_count: 0,
            config: ConfigSolution {
                counts: vec![],
                cost: 0.0,
                method: SearchMethod::BestFirst,
                states_explored: 0,
            },
        });
    }
    let grid = build_grid(instance, params)?;
    big_solve_on_grid(instance, &grid, params)
}
