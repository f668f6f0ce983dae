//! Polar lattice of centers around the depot and nearest-center cells.
//!
//! Ring `i` has radius `(1 + (ε²/4)·i)·D_min` for `0 ≤ i < K₁`, ray `j` has
//! angle `2πj/K₂` for `0 ≤ j < K₂`. Centers are stored ring-major, so the
//! center at `(i, j)` has index `i·K₂ + j`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{distance_extremes, Instance, Point, Terminal, TerminalId, TOL};
use crate::params::Params;

#[derive(Debug, Clone, PartialEq)]
pub struct CenterGrid {
    depot: Point,
    epsilon: f64,
    d_min: f64,
    d_max: f64,
    radii: Vec<f64>,
    angles: Vec<f64>,
    centers: Vec<Point>,
}

impl CenterGrid {
    /// Grid for terminals whose depot distances span `[d_min, d_max]`.
    pub fn new(depot: Point, d_min: f64, d_max: f64, params: &Params) -> Result<Self> {
        if !(d_min > 0.0 && d_min.is_finite() && d_max >= d_min) {
            return Err(Error::Precondition(format!(
                "invalid distance range [{d_min}, {d_max}]"
            )));
        }
        let ratio = d_max / d_min;
        if ratio > params.c * (1.0 + TOL) {
            return Err(Error::UnboundedDistance { ratio, c: params.c });
        }
        let step = params.epsilon * params.epsilon / 4.0;
        let radii: Vec<f64> = (0..params.k1)
            .map(|i| (1.0 + step * i as f64) * d_min)
            .collect();
        let angles: Vec<f64> = (0..params.k2)
            .map(|j| TAU * j as f64 / params.k2 as f64)
            .collect();
        let mut centers = Vec::with_capacity(radii.len() * angles.len());
        for &r in &radii {
            for &a in &angles {
                let p = Point::from_polar(r, a);
                centers.push(Point::new(depot.x + p.x, depot.y + p.y));
            }
        }
        Ok(CenterGrid {
            depot,
            epsilon: params.epsilon,
            d_min,
            d_max,
            radii,
            angles,
            centers,
        })
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn center(&self, index: usize) -> Point {
        self.centers[index]
    }

    /// Radial spacing `(ε²/4)·D_min`.
    pub fn radial_step(&self) -> f64 {
        self.epsilon * self.epsilon / 4.0 * self.d_min
    }

    /// Every point of a cell lies within `ε²·D_min/2` of its center.
    pub fn cell_radius_bound(&self) -> f64 {
        self.epsilon * self.epsilon * self.d_min / 2.0
    }

    /// Analytic bound `ε²·D_min` on a cell's boundary length. Never measured.
    pub fn boundary_length_bound(&self) -> f64 {
        self.epsilon * self.epsilon * self.d_min
    }

    /// Whether `p` lies in the annulus `[D_min, D_max]`, up to relative tolerance.
    pub fn in_annulus(&self, p: &Point) -> bool {
        let r = p.dist(&self.depot);
        r >= self.d_min * (1.0 - TOL) && r <= self.d_max * (1.0 + TOL)
    }

    /// Index of the center closest to `p`; ties go to the smaller index.
    ///
    /// Searches rings outward from the nearest ring and, within each ring,
    /// rays outward from the nearest ray, stopping once the exact polar
    /// lower bound `(r−rᵢ)² + 2·r·rᵢ·(1−cos Δθ)` exceeds the best distance.
    pub fn nearest(&self, p: &Point) -> usize {
        let rel = Point::new(p.x - self.depot.x, p.y - self.depot.y);
        let r = rel.x.hypot(rel.y);
        let theta = rel.y.atan2(rel.x).rem_euclid(TAU);
        let k1 = self.radii.len();
        let k2 = self.angles.len();
        let ring_guess = ((r / self.d_min - 1.0) / (self.epsilon * self.epsilon / 4.0))
            .round()
            .clamp(0.0, (k1 - 1) as f64) as usize;
        let ray_guess = ((theta / TAU) * k2 as f64).round() as usize % k2;

        let mut best = Best::new();
        self.scan_ring(ring_guess, ray_guess, r, theta, p, &mut best);
        // Outward over rings on both sides.
        for i in (0..ring_guess).rev() {
            let dr = r - self.radii[i];
            if dr * dr > best.bound() {
                break;
            }
            self.scan_ring(i, ray_guess, r, theta, p, &mut best);
        }
        for i in ring_guess + 1..k1 {
            let dr = r - self.radii[i];
            if dr * dr > best.bound() {
                break;
            }
            self.scan_ring(i, ray_guess, r, theta, p, &mut best);
        }
        best.index
    }

    fn scan_ring(&self, ring: usize, ray: usize, r: f64, theta: f64, p: &Point, best: &mut Best) {
        let k2 = self.angles.len();
        let ri = self.radii[ring];
        let dr = r - ri;
        let lower = |j: usize| {
            let dtheta = (self.angles[j] - theta).abs();
            let dtheta = dtheta.min(TAU - dtheta);
            dr * dr + 2.0 * r * ri * (1.0 - dtheta.cos())
        };
        // Revisits on small rings are harmless: an equal index never replaces the best.
        let half = (k2 / 2 + 1) as i64;
        for forward in [true, false] {
            for step in 0..=half {
                let offset = if forward { step } else { -step - 1 };
                let j = (ray as i64 + offset).rem_euclid(k2 as i64) as usize;
                if lower(j) > best.bound() {
                    break;
                }
                let index = ring * k2 + j;
                best.offer(index, self.centers[index].dist_sq(p));
            }
        }
    }

    /// Exhaustive nearest-center scan; same tie rule as [`CenterGrid::nearest`].
    pub fn nearest_linear(&self, p: &Point) -> usize {
        let mut best = Best::new();
        for (index, c) in self.centers.iter().enumerate() {
            best.offer(index, c.dist_sq(p));
        }
        best.index
    }
}

struct Best {
    index: usize,
    dist_sq: f64,
}

impl Best {
    fn new() -> Self {
        Best {
            index: usize::MAX,
            dist_sq: f64::INFINITY,
        }
    }

    fn tie_tol(&self) -> f64 {
        1e-12 * self.dist_sq.max(1e-300)
    }

    fn bound(&self) -> f64 {
        self.dist_sq + self.tie_tol() + 1e-15
    }

    fn offer(&mut self, index: usize, dist_sq: f64) {
        if self.index == usize::MAX {
            self.index = index;
            self.dist_sq = dist_sq;
            return;
        }
        let tol = self.tie_tol();
        if dist_sq < self.dist_sq - tol
            || ((dist_sq - self.dist_sq).abs() <= tol && index < self.index)
        {
            self.index = index;
            self.dist_sq = dist_sq.min(self.dist_sq);
        }
    }
}

/// Builds the grid from the instance's own `D_min`/`D_max`.
pub fn build_grid(instance: &Instance, params: &Params) -> Result<CenterGrid> {
    let (d_min, d_max) = distance_extremes(instance)?;
    CenterGrid::new(instance.depot(), d_min, d_max, params)
}

/// Owner center of each selected terminal, and the members of each nonempty cell.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellAssignment {
    pub owner: BTreeMap<TerminalId, usize>,
    pub members: BTreeMap<usize, Vec<TerminalId>>,
}

impl CellAssignment {
    pub fn center_of(&self, id: TerminalId) -> Option<usize> {
        self.owner.get(&id).copied()
    }
}

/// Assigns every terminal accepted by `which` to its nearest center.
pub fn assign_cells<F>(instance: &Instance, grid: &CenterGrid, which: F) -> CellAssignment
where
    F: Fn(&Terminal) -> bool + Sync,
{
    let owners: Vec<(TerminalId, usize)> = instance
        .terminals()
        .par_iter()
        .filter(|t| which(t))
        .map(|t| (t.id, grid.nearest(&t.location)))
        .collect();
    let mut out = CellAssignment::default();
    for (id, center) in owners {
        out.owner.insert(id, center);
        out.members.entry(center).or_default().push(id);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact6Report {
    pub max_distance: f64,
    pub bound: f64,
    pub distance_ok: bool,
    pub center_count: usize,
    pub expected_center_count: usize,
    pub count_ok: bool,
    /// Sample indices outside the annulus; these are not measured.
    pub rejected: Vec<usize>,
}

impl Fact6Report {
    pub fn holds(&self) -> bool {
        self.distance_ok && self.count_ok
    }
}

/// Measures the largest sample-to-nearest-center distance against `ε²·D_min/2`
/// and checks the center count `⌈K₁⌉·⌈K₂⌉`.
pub fn fact6_check(grid: &CenterGrid, params: &Params, samples: &[Point]) -> Fact6Report {
    let (rejected, measured): (Vec<_>, Vec<_>) = samples
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            if grid.in_annulus(p) {
                (None, Some(grid.center(grid.nearest(p)).dist(p)))
            } else {
                (Some(k), None)
            }
        })
        .unzip();
    let max_distance = measured.into_iter().flatten().fold(0.0f64, f64::max);
    let bound = grid.cell_radius_bound();
    let expected = params.center_count();
    Fact6Report {
        max_distance,
        bound,
        distance_ok: max_distance <= bound + TOL,
        center_count: grid.len(),
        expected_center_count: expected,
        count_ok: grid.len() == expected,
        rejected: rejected.into_iter().flatten().collect(),
    }
}
