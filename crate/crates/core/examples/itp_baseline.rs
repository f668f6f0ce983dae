//! Iterated tour partitioning against its bound and the exact optimum.

use cvrp::baselines::{exact_cvrp, itp_solve};
use cvrp::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use cvrp::params::Params;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = Params::new(0.4)?;
    for seed in 0..5 {
        let instance = generate(&GeneratorSpec {
            layout: Layout::UniformDisk { radius: 3.0 },
            n: 8,
            demand: DemandLaw::Uniform { lo: 0.05, hi: 0.9 },
            seed,
        })?;
        let itp = itp_solve(&instance, &params, seed)?;
        let (_, opt) = exact_cvrp(&instance)?;
        println!(
            "seed {seed}: itp {:.4} <= bound {:.4}, optimum {:.4}, ratio {:.3}",
            itp.cost,
            itp.bound,
            opt,
            itp.cost / opt
        );
    }
    Ok(())
}
