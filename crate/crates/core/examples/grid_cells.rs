//! Build the polar center grid for an annulus and check the cell radius
//! bound on sampled points.

use cvrp::grid::{fact6_check, CenterGrid};
use cvrp::model::Point;
use cvrp::params::{derive_params, Overrides};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = derive_params(0.4, Overrides { c: Some(2.0), ..Default::default() })?;
    let grid = CenterGrid::new(Point::ORIGIN, 1.0, 2.0, &params)?;
    println!("k1={} k2={} centers={}", params.k1, params.k2, grid.len());
    println!("first radii: {:.4?}", &grid.radii()[..4]);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let samples: Vec<Point> = (0..10_000)
        .map(|_| Point::from_polar(rng.gen_range(1.0..=2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let report = fact6_check(&grid, &params, &samples);
    println!(
        "max distance to nearest center {:.5} <= {:.5}: {}",
        report.max_distance,
        report.bound,
        report.holds()
    );

    let q = Point::new(1.3, 0.7);
    let c = grid.nearest(&q);
    println!("nearest center to {q:?}: #{c} at {:?}", grid.center(c));
    Ok(())
}
