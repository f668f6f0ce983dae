//! Run reports in `key=value` or JSON form.

use std::fmt::Write as _;

use serde::Serialize;

use crate::general::{Algorithm, Branch, SolveOutcome};
use crate::model::{verify_solution, Instance};
use crate::params::Params;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub branch: Branch,
    pub cost: f64,
    pub tour_count: usize,
    /// Total demand `Y`.
    #[serde(rename = "Y")]
    pub total_demand: f64,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    pub parts: usize,
    pub feasible: bool,
    pub seed: u64,
    pub params: Params,
    /// Seconds; only filled when timing is requested, so reports stay reproducible.
    pub wall_time: Option<f64>,
}

impl RunReport {
    /// Cost and feasibility are recomputed by the verifier.
    pub fn new(
        instance: &Instance,
        outcome: &SolveOutcome,
        algorithm: Algorithm,
        params: &Params,
        seed: u64,
    ) -> Self {
        let check = verify_solution(instance, &outcome.solution);
        RunReport {
            algorithm,
            branch: outcome.branch,
            cost: check.cost,
            tour_count: outcome.solution.len(),
            total_demand: instance.total_demand(),
            w: outcome.w,
            parts: outcome.parts.len(),
            feasible: check.is_feasible(),
            seed,
            params: params.clone(),
            wall_time: None,
        }
    }

    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(out, "algorithm={}", self.algorithm);
        let _ = writeln!(out, "branch={}", self.branch);
        let _ = writeln!(out, "cost={}", self.cost);
        let _ = writeln!(out, "tours={}", self.tour_count);
        let _ = writeln!(out, "Y={}", self.total_demand);
        if let Some(w) = self.w {
            let _ = writeln!(out, "W={w}");
        }
        let _ = writeln!(out, "parts={}", self.parts);
        let _ = writeln!(out, "feasible={}", self.feasible);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "epsilon={}", p.epsilon);
        let _ = writeln!(out, "C={}", p.c);
        let _ = writeln!(out, "beta={}", p.beta);
        let _ = writeln!(out, "gamma={}", p.gamma);
        let _ = writeln!(out, "k1={}", p.k1);
        let _ = writeln!(out, "k2={}", p.k2);
        let names = p.overrides.names();
        let _ = writeln!(
            out,
            "overrides={}",
            if names.is_empty() { "none".to_string() } else { names.join(",") }
        );
        if let Some(t) = self.wall_time {
            let _ = writeln!(out, "wall_time={t:.6}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
