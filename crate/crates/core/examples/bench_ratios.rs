//! Ratio table of each algorithm against the exact optimum on small instances.

use cvrp::bench::{run_bench, BenchConfig};
use cvrp::general::Algorithm;
use cvrp::params::{derive_params, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = run_bench(&BenchConfig {
        sizes: vec![6, 7, 8],
        trials: 20,
        seed: 0,
        algorithms: Algorithm::ALL.iter().copied().filter(|a| *a != Algorithm::Big).collect(),
        params: derive_params(0.4, Overrides { c: Some(2.0), gamma: Some(4.0), ..Default::default() })?,
        exact_cap: 10,
        p_big: 0.5,
    })?;
    print!("{}", table.to_text());
    Ok(())
}
