//! Few-tours path: round demands down to multiples of 1/(2n), solve the
//! rounded instance, then split any overloaded tour in two.

use cvrp::general::{few_tours_solve, round_down};
use cvrp::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use cvrp::model::verify_solution;
use cvrp::params::Params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::new(0.4)?;
    let instance = generate(&GeneratorSpec {
        layout: Layout::Clustered { clusters: 3, radius: 4.0, spread: 0.6 },
        n: 9,
        demand: DemandLaw::Uniform { lo: 0.05, hi: 0.6 },
        seed: 11,
    })?;
    let n = instance.len();
    for t in instance.terminals().iter().take(4) {
        println!("d = {:.4} -> {:.4}", t.demand, round_down(t.demand, n));
    }

    let out = few_tours_solve(&instance, &params, 0)?;
    let check = verify_solution(&instance, &out.solution);
    println!(
        "backend: {} tours on the rounded instance, cost {:.4}",
        out.backend.len(),
        out.backend_cost
    );
    println!(
        "after splitting: {} tours, cost {:.4} (<= 2 x {:.4}), feasible {}",
        out.solution.len(),
        check.cost,
        out.backend_cost,
        check.is_feasible()
    );
    Ok(())
}
