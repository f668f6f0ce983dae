//! Cluster small terminals into segments and solve the clustered instance.

use cvrp::general::{cluster_small, many_tours_solve};
use cvrp::grid::build_grid;
use cvrp::model::{verify_solution, Instance, Point};
use cvrp::params::{derive_params, Overrides};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.4;
    let params = derive_params(eps, Overrides { c: Some(2.0), ..Default::default() })?;

    // Small terminals packed around a few hotspots, plus some big ones.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let hotspots: Vec<Point> = (0..5).map(|k| Point::from_polar(1.5, 1.2 * k as f64)).collect();
    let mut sites = Vec::new();
    for _ in 0..120 {
        let h = hotspots[rng.gen_range(0..hotspots.len())];
        let at = Point::new(h.x + rng.gen_range(-0.01..0.01), h.y + rng.gen_range(-0.01..0.01));
        sites.push((at, rng.gen_range(0.01..0.15)));
    }
    for _ in 0..6 {
        sites.push((Point::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.0..std::f64::consts::TAU)), rng.gen_range(eps..1.0)));
    }
    let instance = Instance::new(Point::ORIGIN, sites)?;
    let grid = build_grid(&instance, &params)?;

    let clustering = cluster_small(&instance, &grid, &params, 0)?;
    println!(
        "{} terminals -> {} clustered ({} big kept, {} segments in {} cells)",
        instance.len(),
        clustering.instance.len(),
        clustering.map.big_ids.len(),
        clustering.map.segments.len(),
        clustering.cell_tours.len()
    );
    for s in clustering.map.segments.iter().take(8) {
        println!(
            "cell {:>5}: {:>2} members, raw demand {:.3}, clustered {:.3}",
            s.cell,
            s.members.len(),
            s.raw_demand,
            s.clustered_demand
        );
    }

    let out = many_tours_solve(&instance, &grid, &params, 0)?;
    let check = verify_solution(&instance, &out.solution);
    println!("W = {:.4}", out.w());
    println!("{} tours, cost {:.4}, feasible {}", out.solution.len(), check.cost, check.is_feasible());
    Ok(())
}
