//! Solve a generated instance with every algorithm and print the costs.
//!
//! cargo run --example solve_instance -- [n] [seed]

use cvrp::general::{solve, Algorithm};
use cvrp::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use cvrp::model::verify_solution;
use cvrp::params::{derive_params, Overrides};
use cvrp::report::RunReport;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(40), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |s| s.parse())?;

    let instance = generate(&GeneratorSpec {
        layout: Layout::UniformDisk { radius: 5.0 },
        n,
        demand: DemandLaw::MixedBigSmall { p_big: 0.3, epsilon: 0.4 },
        seed,
    })?;
    // Desk-scale constants; the defaults make the grid enormous.
    let params = derive_params(0.4, Overrides { c: Some(2.0), gamma: Some(4.0), ..Default::default() })?;

    println!("n={} Y={:.3}", instance.len(), instance.total_demand());
    for alg in [Algorithm::Auto, Algorithm::ManyTours, Algorithm::FewTours, Algorithm::Itp] {
        let out = solve(&instance, &params, alg, seed)?;
        let check = verify_solution(&instance, &out.solution);
        println!(
            "{:<11} branch={:<11} tours={:<3} cost={:.4} feasible={}",
            alg.name(),
            out.branch.name(),
            out.solution.len(),
            check.cost,
            check.is_feasible()
        );
    }

    let out = solve(&instance, &params, Algorithm::Auto, seed)?;
    print!("\n{}", RunReport::new(&instance, &out, Algorithm::Auto, &params, seed).to_text());
    Ok(())
}
