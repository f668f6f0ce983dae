//! Round a fractional bipartite assignment to a function whose excess load
//! is at most the largest B weight.

use cvrp::baselines::{assignment_function, BipartiteWeights};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three A vertices, four B vertices; edge weights bound the usable share.
    let edges = [
        ((0, 0), 0.6),
        ((1, 0), 0.4),
        ((1, 1), 0.5),
        ((2, 1), 0.5),
        ((0, 2), 0.3),
        ((2, 2), 0.7),
        ((1, 3), 0.9),
        ((2, 3), 0.2),
    ];
    let g = BipartiteWeights::new(3, vec![0.8, 0.9, 1.0, 0.6], edges)?;
    let f = assignment_function(&g)?;
    for (b, a) in f.iter().enumerate() {
        println!("b{b} -> a{a}");
    }
    let excess = g.excess(&f);
    println!("excess per a: {excess:.3?}, bound {:.3}", g.max_b_weight());
    Ok(())
}
