//! The big-terminal pipeline step by step: snap to grid centers, round
//! demands, enumerate tour types, solve the configuration, un-snap.

use cvrp::big::{adaptive_round, enumerate_tour_types, snap_to_centers, solve_configuration, unsnap};
use cvrp::grid::build_grid;
use cvrp::model::{verify_solution, Instance, Point};
use cvrp::params::{derive_params, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.3;
    let params = derive_params(eps, Overrides { c: Some(2.0), ..Default::default() })?;
    let sites: Vec<(Point, f64)> = (0..14)
        .map(|k| {
            let angle = 0.45 * k as f64;
            let radius = 1.0 + 0.07 * k as f64;
            (Point::from_polar(radius, angle), 0.3 + 0.05 * (k % 5) as f64)
        })
        .collect();
    let instance = Instance::new(Point::ORIGIN, sites)?;

    let grid = build_grid(&instance, &params)?;
    println!("grid: {} centers, cell radius bound {:.4}", grid.len(), grid.cell_radius_bound());

    let snapped = snap_to_centers(&instance, &grid, &params)?;
    println!("snapped: displacement {:.4}", snapped.total_displacement());
    let rounded = adaptive_round(&snapped, &params);
    println!("pair types after rounding: {}", rounded.pair_types().len());

    let catalog = enumerate_tour_types(&rounded, &params)?;
    println!("tour types: {}", catalog.types.len());
    let config = solve_configuration(&catalog, &params)?;
    println!(
        "configuration: cost {:.4} via {:?} ({} states)",
        config.cost, config.method, config.states_explored
    );

    let solution = unsnap(&config, &catalog, &rounded)?;
    let check = verify_solution(&instance, &solution);
    println!("final: {} tours, cost {:.4}, feasible {}", solution.len(), check.cost, check.is_feasible());
    println!(
        "cost - configured = {:.6}, 2 x displacement = {:.6}",
        check.cost - config.cost,
        2.0 * snapped.total_displacement()
    );
    Ok(())
}
