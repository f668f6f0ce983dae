//! Solve an instance and write the routes as an SVG picture.
//!
//! cargo run --example plot_svg -- out.svg

use cvrp::general::{solve, Algorithm};
use cvrp::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use cvrp::params::{derive_params, Overrides};
use cvrp::svg::{emit_svg, render_svg};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let instance = generate(&GeneratorSpec {
        layout: Layout::Clustered { clusters: 4, radius: 5.0, spread: 0.8 },
        n: 50,
        demand: DemandLaw::MixedBigSmall { p_big: 0.25, epsilon: 0.4 },
        seed: 5,
    })?;
    let params = derive_params(0.4, Overrides { c: Some(2.0), gamma: Some(4.0), ..Default::default() })?;
    let out = solve(&instance, &params, Algorithm::Auto, 0)?;
    match std::env::args().nth(1) {
        Some(path) => {
            emit_svg(&instance, &out.solution, std::path::Path::new(&path))?;
            println!("wrote {path} ({} tours)", out.solution.len());
        }
        None => print!("{}", render_svg(&instance, &out.solution)),
    }
    Ok(())
}
