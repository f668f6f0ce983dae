//! The many-tours path: small terminals are grouped per cell into segments of
//! a cell tour, each segment becomes one big terminal at the cell's center,
//! the big-terminal solver runs on the result, and segments are stitched back.

use rayon::prelude::*;

use crate::big::{big_solve_on_grid, BigOutcome};
use crate::error::{Error, Result};
use crate::grid::{assign_cells, CenterGrid};
use crate::model::{Instance, Point, Solution, Stop, TerminalId, Tour};
use crate::params::Params;
use crate::tsp::{closed_length, tsp};

/// Closing slack when accumulating a segment's demand.
const CLOSE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub cell: usize,
    pub center: Point,
    /// Consecutive run of the cell tour.
    pub members: Vec<TerminalId>,
    pub raw_demand: f64,
    /// `max(raw_demand, ε)`.
    pub clustered_demand: f64,
}

impl Segment {
    /// Path through the members plus the two edges joining its ends to the center.
    pub fn stitch_cost(&self, instance: &Instance) -> f64 {
        let first = instance.location(self.members[0]);
        let last = instance.location(*self.members.last().unwrap());
        let path: f64 = self
            .members
            .windows(2)
            .map(|w| instance.location(w[0]).dist(&instance.location(w[1])))
            .sum();
        self.center.dist(&first) + path + last.dist(&self.center)
    }
}

/// Ids of the clustered instance: big terminals first, then one per segment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterMap {
    pub segments: Vec<Segment>,
    /// Original id of clustered-instance terminal `k` for `k < big_ids.len()`.
    pub big_ids: Vec<TerminalId>,
}

impl ClusterMap {
    /// The segment behind clustered-instance terminal `id`, if it is a clustered one.
    pub fn segment_of(&self, id: TerminalId) -> Option<&Segment> {
        id.checked_sub(self.big_ids.len())
            .and_then(|s| self.segments.get(s))
    }

    pub fn clustered_len(&self) -> usize {
        self.big_ids.len() + self.segments.len()
    }
}

#[derive(Debug, Clone)]
pub struct Clustering {
    pub instance: Instance,
    pub map: ClusterMap,
    /// Cell tours `t(z)` in cell order.
    pub cell_tours: Vec<(usize, Vec<TerminalId>)>,
    /// Total cell-tour length plus the center connections of every segment.
    pub w: f64,
}

fn cell_seed(seed: u64, cell: usize) -> u64 {
    seed ^ (cell as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Greedy prefix cut of a cell tour: a segment closes as soon as its demand reaches ε.
pub fn segments_of_tour(
    instance: &Instance,
    cell: usize,
    center: Point,
    tour: &[TerminalId],
    epsilon: f64,
) -> Vec<Segment> {
    let mut out = Vec::new();
    let mut members = Vec::new();
    let mut raw = 0.0;
    let mut close = |members: &mut Vec<TerminalId>, raw: &mut f64| {
        out.push(Segment {
            cell,
            center,
            members: std::mem::take(members),
            raw_demand: *raw,
            clustered_demand: raw.max(epsilon),
        });
        *raw = 0.0;
    };
    for &id in tour {
        members.push(id);
        raw += instance.demand(id);
        if raw >= epsilon - CLOSE_SLACK {
            close(&mut members, &mut raw);
        }
    }
    if !members.is_empty() {
        close(&mut members, &mut raw);
    }
    out
}

/// Builds the clustered instance on `grid`. Cells are solved in parallel and
/// merged in cell order.
pub fn cluster_small(
    instance: &Instance,
    grid: &CenterGrid,
    params: &Params,
    seed: u64,
) -> Result<Clustering> {
    let cells = assign_cells(instance, grid, |t| !params.is_big(t.demand));
    let cell_list: Vec<(usize, Vec<TerminalId>)> = cells.members.into_iter().collect();
    let solved: Vec<(usize, Vec<TerminalId>, f64)> = cell_list
        .par_iter()
        .map(|(cell, ids)| {
            let points: Vec<Point> = ids.iter().map(|&id| instance.location(id)).collect();
            let t = tsp(&points, params, cell_seed(seed, *cell))?;
            let order: Vec<TerminalId> = t.order.iter().map(|&k| ids[k]).collect();
            Ok((*cell, order, closed_length(&points, &t.order)))
        })
        .collect::<Result<_>>()?;

    let mut map = ClusterMap {
        segments: Vec::new(),
        big_ids: instance
            .terminals()
            .iter()
            .filter(|t| params.is_big(t.demand))
            .map(|t| t.id)
            .collect(),
    };
    let mut w = 0.0;
    let mut cell_tours = Vec::with_capacity(solved.len());
    for (cell, order, length) in solved {
        let center = grid.center(cell);
        let segments = segments_of_tour(instance, cell, center, &order, params.epsilon);
        w += length;
        for s in &segments {
            w += center.dist(&instance.location(s.members[0]))
                + center.dist(&instance.location(*s.members.last().unwrap()));
        }
        map.segments.extend(segments);
        cell_tours.push((cell, order));
    }

    let mut sites: Vec<(Point, f64)> = map
        .big_ids
        .iter()
        .map(|&id| (instance.location(id), instance.demand(id)))
        .collect();
    for s in &map.segments {
        if s.clustered_demand > 1.0 {
            return Err(Error::Internal(format!(
                "clustered demand {} exceeds capacity",
                s.clustered_demand
            )));
        }
        sites.push((s.center, s.clustered_demand));
    }
    Ok(Clustering {
        instance: Instance::new(instance.depot(), sites)?,
        map,
        cell_tours,
        w,
    })
}

/// Replaces every clustered terminal in a clustered-instance solution by its
/// segment: center, members in order, center, and back to the route position
/// when the clustered terminal was served by an excursion.
pub fn stitch_segments(
    clustered: &Solution,
    map: &ClusterMap,
    instance: &Instance,
) -> Result<Solution> {
    let lookup = |id: TerminalId| -> Result<Either<'_>> {
        if let Some(&orig) = map.big_ids.get(id) {
            Ok(Either::Big(orig))
        } else {
            map.segment_of(id)
                .map(Either::Segment)
                .ok_or(Error::UnknownTerminal(id))
        }
    };
    let mut tours = Vec::with_capacity(clustered.len());
    for tour in &clustered.tours {
        let mut here = instance.depot();
        let mut stops = Vec::with_capacity(tour.stops.len());
        for stop in &tour.stops {
            match *stop {
                Stop::Waypoint(p) => {
                    stops.push(Stop::Waypoint(p));
                    here = p;
                }
                Stop::Visit(id) => match lookup(id)? {
                    Either::Big(orig) => {
                        stops.push(Stop::Visit(orig));
                        here = instance.location(orig);
                    }
                    Either::Segment(s) => {
                        push_segment(&mut stops, here, s);
                        here = s.center;
                    }
                },
                Stop::RoundTrip(id) => match lookup(id)? {
                    Either::Big(orig) => stops.push(Stop::RoundTrip(orig)),
                    Either::Segment(s) => {
                        push_segment(&mut stops, here, s);
                        if here != s.center {
                            stops.push(Stop::Waypoint(here));
                        }
                    }
                },
            }
        }
        tours.push(Tour::new(stops));
    }
    Ok(Solution::new(tours))
}

enum Either<'a> {
    Big(TerminalId),
    Segment(&'a Segment),
}

fn push_segment(stops: &mut Vec<Stop>, here: Point, s: &Segment) {
    if here != s.center {
        stops.push(Stop::Waypoint(s.center));
    }
    stops.extend(s.members.iter().map(|&id| Stop::Visit(id)));
    stops.push(Stop::Waypoint(s.center));
}

#[derive(Debug, Clone)]
pub struct ManyToursOutcome {
    pub solution: Solution,
    pub clustering: Clustering,
    pub big: BigOutcome,
}

impl ManyToursOutcome {
    pub fn w(&self) -> f64 {
        self.clustering.w
    }
}

/// Cluster, solve the all-big clustered instance on the same grid, stitch.
pub fn many_tours_solve(
    instance: &Instance,
    grid: &CenterGrid,
    params: &Params,
    seed: u64,
) -> Result<ManyToursOutcome> {
    params.check_general()?;
    let clustering = cluster_small(instance, grid, params, seed)?;
    let big = big_solve_on_grid(&clustering.instance, grid, params)?;
    let solution = stitch_segments(&big.solution, &clustering.map, instance)?;
    Ok(ManyToursOutcome {
        solution,
        clustering,
        big,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::model::verify_solution;
    use crate::params::{derive_params, Overrides};

    fn params(eps: f64, c: f64) -> Params {
        derive_params(eps, Overrides { c: Some(c), ..Default::default() }).unwrap()
    }

    #[test]
    fn ten_small_terminals_make_three_segments() {
        let sites: Vec<(Point, f64)> = (0..10)
            .map(|k| (Point::new(1.0 + 0.01 * k as f64, 0.0), 0.05))
            .collect();
        let i = Instance::new(Point::ORIGIN, sites).unwrap();
        let order: Vec<usize> = (0..10).collect();
        let segs = segments_of_tour(&i, 0, Point::new(1.0, 0.0), &order, 0.2);
        let sizes: Vec<usize> = segs.iter().map(|s| s.members.len()).collect();
        assert_eq!(sizes, vec![4, 4, 2]);
        let raw: Vec<f64> = segs.iter().map(|s| s.raw_demand).collect();
        assert!((raw[0] - 0.2).abs() < 1e-12 && (raw[1] - 0.2).abs() < 1e-12);
        assert!((raw[2] - 0.1).abs() < 1e-12);
        assert!(segs.iter().all(|s| s.clustered_demand >= 0.2 - 1e-12));
    }

    #[test]
    fn single_member_segment_adds_twice_its_offset() {
        let p = params(0.4, 2.0);
        let at = Point::new(1.0, 0.3);
        let i = Instance::new(Point::ORIGIN, [(at, 0.1)]).unwrap();
        let grid = build_grid(&i, &p).unwrap();
        let out = many_tours_solve(&i, &grid, &p, 0).unwrap();
        let s = &out.clustering.map.segments[0];
        let clustered_cost = out.clustering.instance.solution_cost(&out.big.solution).unwrap();
        let cost = i.solution_cost(&out.solution).unwrap();
        assert!((cost - clustered_cost - 2.0 * s.center.dist(&at)).abs() < 1e-12);
        assert!(verify_solution(&i, &out.solution).is_feasible());
    }

    #[test]
    fn big_only_matches_the_big_solver() {
        let p = params(0.4, 2.0);
        let i = Instance::new(
            Point::ORIGIN,
            [(Point::new(1.0, 0.0), 0.5), (Point::new(0.0, 1.5), 0.45)],
        )
        .unwrap();
        let grid = build_grid(&i, &p).unwrap();
        let out = many_tours_solve(&i, &grid, &p, 0).unwrap();
        assert!(out.clustering.map.segments.is_empty());
        let direct = big_solve_on_grid(&i, &grid, &p).unwrap();
        assert_eq!(out.solution, direct.solution);
    }

    #[test]
    fn stitched_cost_decomposes() {
        let p = params(0.4, 2.0);
        let sites: Vec<(Point, f64)> = (0..25)
            .map(|k| {
                let a = k as f64 * 0.7;
                let r = 1.0 + 0.04 * (k % 5) as f64;
                (Point::from_polar(r, a), if k % 4 == 0 { 0.5 } else { 0.07 })
            })
            .collect();
        let i = Instance::new(Point::ORIGIN, sites).unwrap();
        let grid = build_grid(&i, &p).unwrap();
        let out = many_tours_solve(&i, &grid, &p, 3).unwrap();
        assert!(verify_solution(&i, &out.solution).is_feasible());
        let clustered_cost = out.clustering.instance.solution_cost(&out.big.solution).unwrap();
        let extra: f64 = out.clustering.map.segments.iter().map(|s| s.stitch_cost(&i)).sum();
        let cost = i.solution_cost(&out.solution).unwrap();
        assert!((cost - clustered_cost - extra).abs() < 1e-9);
    }

    #[test]
    fn unknown_clustered_id_is_rejected() {
        let i = Instance::new(Point::ORIGIN, [(Point::new(1.0, 0.0), 0.5)]).unwrap();
        let map = ClusterMap { segments: vec![], big_ids: vec![0] };
        let bad = Solution::new(vec![Tour::from_visits([4])]);
        assert_eq!(stitch_segments(&bad, &map, &i), Err(Error::UnknownTerminal(4)));
    }
}
