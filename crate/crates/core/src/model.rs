//! Planar geometry, the instance/solution data model, and the feasibility verifier.
//!
//! Distances are always Euclidean. Capacity is normalized to 1 and every
//! capacity or cost comparison uses the absolute tolerance [`TOL`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for capacity and cost comparisons.
pub const TOL: f64 = 1e-9;

/// Index of a terminal inside its [`Instance`]; ids are contiguous from 0.
pub type TerminalId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        Point::new(radius * angle.cos(), radius * angle.sin())
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub id: TerminalId,
    pub location: Point,
    pub demand: f64,
}

/// A depot plus terminals with demands in (0, 1].
///
/// Construction validates every invariant: finite coordinates, demands in
/// (0, 1], and no terminal at the depot (so `D_min > 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    depot: Point,
    terminals: Vec<Terminal>,
}

impl Instance {
    pub fn new(depot: Point, sites: impl IntoIterator<Item = (Point, f64)>) -> Result<Self> {
        if !depot.is_finite() {
            return Err(Error::InvalidInstance("depot coordinates are not finite".into()));
        }
        let mut terminals = Vec::new();
        for (id, (location, demand)) in sites.into_iter().enumerate() {
            validate_site(depot, location, demand).map_err(|msg| {
                Error::InvalidInstance(format!("terminal {id}: {msg}"))
            })?;
            terminals.push(Terminal {
                id,
                location,
                demand,
            });
        }
        Ok(Instance { depot, terminals })
    }

    pub fn depot(&self) -> Point {
        self.depot
    }

    pub fn terminals(&self) -> &[Terminal] {
        &self.terminals
    }

    pub fn len(&self) -> usize {
        self.terminals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminals.is_empty()
    }

    pub fn terminal(&self, id: TerminalId) -> Result<&Terminal> {
        self.terminals.get(id).ok_or(Error::UnknownTerminal(id))
    }

    pub fn location(&self, id: TerminalId) -> Point {
        self.terminals[id].location
    }

    pub fn demand(&self, id: TerminalId) -> f64 {
        self.terminals[id].demand
    }

    /// Distance from terminal `id` to the depot.
    pub fn dist(&self, id: TerminalId) -> f64 {
        self.terminals[id].location.dist(&self.depot)
    }

    /// Total demand `Y`.
    pub fn total_demand(&self) -> f64 {
        self.terminals.iter().map(|t| t.demand).sum()
    }

    /// Builds the instance restricted to `ids`, renumbered in the given order.
    pub fn subinstance(&self, ids: &[TerminalId]) -> Result<Instance> {
        let sites = ids
            .iter()
            .map(|&id| self.terminal(id).map(|t| (t.location, t.demand)))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.depot, sites)
    }

    /// Same sites with replaced demands (used by demand rounding).
    pub fn with_demands(&self, demands: &[f64]) -> Result<Instance> {
        if demands.len() != self.len() {
            return Err(Error::InvalidInstance(format!(
                "expected {} demands, got {}",
                self.len(),
                demands.len()
            )));
        }
        Instance::new(
            self.depot,
            self.terminals
                .iter()
                .zip(demands)
                .map(|(t, &d)| (t.location, d)),
        )
    }

    pub fn tour_cost(&self, tour: &Tour) -> Result<f64> {
        tour_cost(self, tour)
    }

    pub fn solution_cost(&self, solution: &Solution) -> Result<f64> {
        solution.tours.iter().map(|t| tour_cost(self, t)).sum()
    }
}

fn validate_site(depot: Point, location: Point, demand: f64) -> std::result::Result<(), String> {
    if !location.is_finite() {
        return Err("coordinates are not finite".into());
    }
    if !(demand > 0.0 && demand <= 1.0) {
        return Err(format!("demand {demand} outside (0,1]"));
    }
    if location == depot {
        return Err("terminal coincides with the depot".into());
    }
    Ok(())
}

/// One element of a tour's route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stop {
    /// The route passes through the terminal and serves it.
    Visit(TerminalId),
    /// The route passes through an auxiliary point (a grid center) without serving anything.
    Waypoint(Point),
    /// Out-and-back excursion from the current route position to the terminal, serving it.
    RoundTrip(TerminalId),
}

impl Stop {
    pub fn terminal(&self) -> Option<TerminalId> {
        match *self {
            Stop::Visit(id) | Stop::RoundTrip(id) => Some(id),
            Stop::Waypoint(_) => None,
        }
    }
}

/// A depot-rooted closed route. The depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Tour {
    pub stops: Vec<Stop>,
}

impl Tour {
    pub fn new(stops: Vec<Stop>) -> Self {
        Tour { stops }
    }

    pub fn from_visits(ids: impl IntoIterator<Item = TerminalId>) -> Self {
        Tour {
            stops: ids.into_iter().map(Stop::Visit).collect(),
        }
    }

    /// Served terminal ids in route order.
    pub fn terminals(&self) -> impl Iterator<Item = TerminalId> + '_ {
        self.stops.iter().filter_map(Stop::terminal)
    }

    pub fn demand(&self, instance: &Instance) -> f64 {
        self.terminals().map(|id| instance.demand(id)).sum()
    }

    pub fn round_trip_count(&self) -> usize {
        self.stops
            .iter()
            .filter(|s| matches!(s, Stop::RoundTrip(_)))
            .count()
    }

    /// Vertices of the drawn polyline, depot to depot, with excursions expanded.
    pub fn polyline(&self, instance: &Instance) -> Vec<Point> {
        let depot = instance.depot();
        let mut out = vec![depot];
        let mut here = depot;
        for stop in &self.stops {
            match *stop {
                Stop::Visit(id) => {
                    here = instance.location(id);
                    out.push(here);
                }
                Stop::Waypoint(p) => {
                    here = p;
                    out.push(here);
                }
                Stop::RoundTrip(id) => {
                    out.push(instance.location(id));
                    out.push(here);
                }
            }
        }
        out.push(depot);
        out
    }

    pub fn reversed(&self) -> Tour {
        // A round trip hangs off the position before it, so it travels with that position.
        let mut groups: Vec<Vec<Stop>> = vec![Vec::new()];
        for stop in &self.stops {
            match stop {
                Stop::RoundTrip(_) => groups.last_mut().unwrap().push(*stop),
                _ => groups.push(vec![*stop]),
            }
        }
        // Excursions from the depot stay at the front.
        let mut stops = groups.remove(0);
        for group in groups.into_iter().rev() {
            stops.extend(group);
        }
        Tour { stops }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Solution {
    pub tours: Vec<Tour>,
}

impl Solution {
    pub fn new(tours: Vec<Tour>) -> Self {
        Solution { tours }
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    /// Maps every terminal id through `map` (sub-instance id to parent id).
    pub fn relabel(&self, map: &[TerminalId]) -> Solution {
        let tours = self
            .tours
            .iter()
            .map(|t| Tour {
                stops: t
                    .stops
                    .iter()
                    .map(|s| match *s {
                        Stop::Visit(id) => Stop::Visit(map[id]),
                        Stop::RoundTrip(id) => Stop::RoundTrip(map[id]),
                        w @ Stop::Waypoint(_) => w,
                    })
                    .collect(),
            })
            .collect();
        Solution { tours }
    }

    pub fn extend(&mut self, other: Solution) {
        self.tours.extend(other.tours);
    }
}

/// Length of the closed route: depot, each route position, depot, plus
/// twice the excursion length for every round trip.
pub fn tour_cost(instance: &Instance, tour: &Tour) -> Result<f64> {
    let depot = instance.depot();
    let mut here = depot;
    let mut cost = 0.0;
    for stop in &tour.stops {
        match *stop {
            Stop::Visit(id) => {
                let next = instance.terminal(id)?.location;
                cost += here.dist(&next);
                here = next;
            }
            Stop::Waypoint(p) => {
                cost += here.dist(&p);
                here = p;
            }
            Stop::RoundTrip(id) => {
                cost += 2.0 * here.dist(&instance.terminal(id)?.location);
            }
        }
    }
    Ok(cost + here.dist(&depot))
}

/// `(D_min, D_max)`: extreme terminal-to-depot distances.
pub fn distance_extremes(instance: &Instance) -> Result<(f64, f64)> {
    if instance.is_empty() {
        return Err(Error::Empty("instance has no terminals"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for id in 0..instance.len() {
        let d = instance.dist(id);
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Ok((lo, hi))
}

/// Whether `D_max / D_min <= c` (with relative tolerance [`TOL`]).
pub fn has_bounded_distance(instance: &Instance, c: f64) -> bool {
    match distance_extremes(instance) {
        Ok((lo, hi)) => hi <= c * lo * (1.0 + TOL),
        Err(_) => true,
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct VerifyReport {
    pub missing: Vec<TerminalId>,
    pub doubly_covered: Vec<TerminalId>,
    pub unknown: Vec<TerminalId>,
    pub empty_tours: Vec<usize>,
    /// `(tour index, demand)` for tours above capacity.
    pub over_capacity: Vec<(usize, f64)>,
    pub cost: f64,
    pub tour_count: usize,
}

impl VerifyReport {
    pub fn is_feasible(&self) -> bool {
        self.missing.is_empty()
            && self.doubly_covered.is_empty()
            && self.unknown.is_empty()
            && self.empty_tours.is_empty()
            && self.over_capacity.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "feasible={}", self.is_feasible())?;
        writeln!(f, "cost={}", self.cost)?;
        writeln!(f, "tours={}", self.tour_count)?;
        let ids = |v: &[usize]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        if !self.missing.is_empty() {
            writeln!(f, "missing={}", ids(&self.missing))?;
        }
        if !self.doubly_covered.is_empty() {
            writeln!(f, "doubly_covered={}", ids(&self.doubly_covered))?;
        }
        if !self.unknown.is_empty() {
            writeln!(f, "unknown={}", ids(&self.unknown))?;
        }
        if !self.empty_tours.is_empty() {
            writeln!(f, "empty_tours={}", ids(&self.empty_tours))?;
        }
        for (tour, demand) in &self.over_capacity {
            writeln!(f, "over_capacity=tour {tour} demand {demand}")?;
        }
        Ok(())
    }
}

/// Checks unsplittable coverage and per-tour capacity. Violations are reported, never raised.
pub fn verify_solution(instance: &Instance, solution: &Solution) -> VerifyReport {
    let n = instance.len();
    let mut seen = vec![0usize; n];
    let mut report = VerifyReport {
        tour_count: solution.len(),
        ..Default::default()
    };
    for (index, tour) in solution.tours.iter().enumerate() {
        let mut demand = 0.0;
        let mut served = 0;
        for id in tour.terminals() {
            served += 1;
            if id >= n {
                report.unknown.push(id);
                continue;
            }
            seen[id] += 1;
            demand += instance.demand(id);
        }
        if served == 0 {
            report.empty_tours.push(index);
        }
        if demand > 1.0 + TOL {
            report.over_capacity.push((index, demand));
        }
        if let Ok(c) = tour_cost(instance, tour) {
            report.cost += c;
        }
    }
    for (id, &count) in seen.iter().enumerate() {
        match count {
            0 => report.missing.push(id),
            1 => {}
            _ => report.doubly_covered.push(id),
        }
    }
    report.unknown.sort_unstable();
    report.unknown.dedup();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(sites: &[(f64, f64, f64)]) -> Instance {
        Instance::new(
            Point::ORIGIN,
            sites.iter().map(|&(x, y, d)| (Point::new(x, y), d)),
        )
        .unwrap()
    }

    #[test]
    fn single_visit_is_out_and_back() {
        let i = inst(&[(3.0, 4.0, 0.5)]);
        assert_eq!(tour_cost(&i, &Tour::from_visits([0])).unwrap(), 10.0);
    }

    #[test]
    fn collinear_visits() {
        let i = inst(&[(1.0, 0.0, 0.5), (2.0, 0.0, 0.5)]);
        assert_eq!(tour_cost(&i, &Tour::from_visits([0, 1])).unwrap(), 4.0);
    }

    #[test]
    fn round_trip_adds_two_copies_of_the_edge() {
        // Anchor at (1,0), terminal displaced 0.5 from it.
        let i = inst(&[(1.0, 0.5, 0.5)]);
        let tour = Tour::new(vec![Stop::Waypoint(Point::new(1.0, 0.0)), Stop::RoundTrip(0)]);
        assert!((tour_cost(&i, &tour).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_id_is_an_error() {
        let i = inst(&[(1.0, 0.0, 0.5)]);
        assert_eq!(
            tour_cost(&i, &Tour::from_visits([3])),
            Err(Error::UnknownTerminal(3))
        );
    }

    #[test]
    fn rejects_bad_sites() {
        assert!(Instance::new(Point::ORIGIN, [(Point::new(1.0, 0.0), 1.5)]).is_err());
        assert!(Instance::new(Point::ORIGIN, [(Point::new(1.0, 0.0), 0.0)]).is_err());
        assert!(Instance::new(Point::ORIGIN, [(Point::ORIGIN, 0.5)]).is_err());
        assert!(Instance::new(Point::ORIGIN, [(Point::new(f64::NAN, 0.0), 0.5)]).is_err());
    }

    #[test]
    fn verify_empty() {
        let i = inst(&[]);
        let r = verify_solution(&i, &Solution::default());
        assert!(r.is_feasible());
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn verify_double_cover() {
        let i = inst(&[(1.0, 0.0, 0.2)]);
        let s = Solution::new(vec![Tour::from_visits([0]), Tour::from_visits([0])]);
        let r = verify_solution(&i, &s);
        assert!(!r.is_feasible());
        assert_eq!(r.doubly_covered, vec![0]);
    }

    #[test]
    fn verify_capacity() {
        let i = inst(&[(1.0, 0.0, 0.6), (2.0, 0.0, 0.6)]);
        let r = verify_solution(&i, &Solution::new(vec![Tour::from_visits([0, 1])]));
        assert!(!r.is_feasible());
        assert_eq!(r.over_capacity.len(), 1);
        assert_eq!(r.over_capacity[0].0, 0);
    }

    #[test]
    fn verify_missing_and_unknown() {
        let i = inst(&[(1.0, 0.0, 0.2), (2.0, 0.0, 0.2)]);
        let r = verify_solution(&i, &Solution::new(vec![Tour::from_visits([0, 7])]));
        assert_eq!(r.missing, vec![1]);
        assert_eq!(r.unknown, vec![7]);
    }

    #[test]
    fn extremes() {
        let i = inst(&[(1.0, 0.0, 0.2), (0.0, 2.0, 0.2)]);
        assert_eq!(distance_extremes(&i).unwrap(), (1.0, 2.0));
        let j = inst(&[(3.0, 4.0, 0.2)]);
        assert_eq!(distance_extremes(&j).unwrap(), (5.0, 5.0));
        assert!(distance_extremes(&inst(&[])).is_err());
    }

    #[test]
    fn polyline_counts_excursions() {
        let i = inst(&[(1.0, 0.5, 0.2), (2.0, 0.0, 0.2)]);
        let tour = Tour::new(vec![
            Stop::Waypoint(Point::new(1.0, 0.0)),
            Stop::RoundTrip(0),
            Stop::Visit(1),
        ]);
        // positions (2) + 2 per round trip + depot at both ends
        assert_eq!(tour.polyline(&i).len(), 2 + 2 + 2);
    }
}
