//! Read a TSPLIB CVRP file (or a built-in sample) and solve it.
//!
//! cargo run --example tsplib_import -- path/to/file.vrp

use cvrp::general::{solve, Algorithm};
use cvrp::io::{emit_native, parse_instance};
use cvrp::model::verify_solution;
use cvrp::params::Params;

const SAMPLE: &str = "NAME : sample
TYPE : CVRP
DIMENSION : 7
EDGE_WEIGHT_TYPE : EUC_2D
CAPACITY : 100
NODE_COORD_SECTION
1 50 50
2 20 60
3 80 70
4 60 15
5 30 25
6 75 40
7 45 90
DEMAND_SECTION
1 0
2 35
3 40
4 55
5 20
6 45
7 30
DEPOT_SECTION
1
-1
EOF
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let instance = parse_instance(&text)?;
    println!("native form:\n{}", emit_native(&instance));
    let params = Params::new(0.4)?;
    let out = solve(&instance, &params, Algorithm::Auto, 0)?;
    let check = verify_solution(&instance, &out.solution);
    println!("{} tours, cost {:.3}, feasible {}", out.solution.len(), check.cost, check.is_feasible());
    Ok(())
}
