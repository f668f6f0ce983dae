//! Ratio tables: every algorithm on a sweep of random instances, measured
//! against the exact optimum when it is affordable and against the best
//! cost found otherwise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::exact::exact_cvrp_capped;
use crate::error::Result;
use crate::general::{solve, Algorithm};
use crate::generate::{generate, DemandLaw, GeneratorSpec, Layout};
use crate::model::{verify_solution, Instance, Point};
use crate::params::Params;

/// Ratio bar for the dispatcher against the exact optimum at desk-scale constants.
pub const DISPATCH_RATIO_BAR: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub params: Params,
    /// Largest size measured against the exact optimum.
    pub exact_cap: usize,
    /// Probability that a terminal is big.
    pub p_big: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    Exact,
    BestKnown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub trial: usize,
    pub algorithm: Algorithm,
    /// `None` when the algorithm failed or returned an infeasible solution.
    pub cost: Option<f64>,
    pub reference: f64,
    pub reference_kind: Reference,
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub failures: usize,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<BenchSummary>,
}

/// Layout of trial `trial`: cycles through annulus, disk, clusters and a single point.
pub fn bench_layout(trial: usize) -> Layout {
    match trial % 4 {
        0 => Layout::Annulus { inner: 1.0, outer: 2.0 },
        1 => Layout::UniformDisk { radius: 2.0 },
        2 => Layout::Clustered { clusters: 3, radius: 2.0, spread: 0.3 },
        _ => Layout::CoLocated { at: Point::new(1.0, 1.0) },
    }
}

pub fn bench_instance(n: usize, trial: usize, seed: u64, p_big: f64, epsilon: f64) -> Result<Instance> {
    generate(&GeneratorSpec {
        layout: bench_layout(trial),
        n,
        demand: DemandLaw::MixedBigSmall { p_big, epsilon },
        seed: seed
            .wrapping_mul(0x100_0000_01B3)
            .wrapping_add((n as u64) << 32 | trial as u64),
    })
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchTable> {
    let mut instances = Vec::new();
    for &n in &config.sizes {
        for trial in 0..config.trials {
            let inst = bench_instance(n, trial, config.seed, config.p_big, config.params.epsilon)?;
            instances.push((n, trial, inst));
        }
    }
    let cells: Vec<(usize, Algorithm)> = (0..instances.len())
        .flat_map(|k| config.algorithms.iter().map(move |&a| (k, a)))
        .collect();
    let results: Vec<std::result::Result<f64, String>> = cells
        .par_iter()
        .map(|&(k, alg)| {
            let inst = &instances[k].2;
            let seed = config.seed.wrapping_add(k as u64);
            match solve(inst, &config.params, alg, seed) {
                Ok(out) => {
                    let check = verify_solution(inst, &out.solution);
                    if check.is_feasible() {
                        Ok(check.cost)
                    } else {
                        Err(format!("infeasible: {}", check.to_string().replace('\n', " ")))
                    }
                }
                Err(e) => Err(e.to_string()),
            }
        })
        .collect();
    let exact: Vec<Option<f64>> = instances
        .par_iter()
        .map(|(n, _, inst)| {
            if *n <= config.exact_cap {
                exact_cvrp_capped(inst, config.exact_cap).ok().map(|r| r.1)
            } else {
                None
            }
        })
        .collect();

    let per = config.algorithms.len();
    let mut rows = Vec::with_capacity(cells.len());
    for (k, (n, trial, _)) in instances.iter().enumerate() {
        let costs = &results[k * per..(k + 1) * per];
        let (reference, kind) = match exact[k] {
            Some(c) => (c, Reference::Exact),
            None => (
                costs
                    .iter()
                    .filter_map(|c| c.as_ref().ok())
                    .copied()
                    .fold(f64::INFINITY, f64::min),
                Reference::BestKnown,
            ),
        };
        for (alg, cost) in config.algorithms.iter().zip(costs) {
            let ratio = cost.as_ref().ok().map(|&c| ratio(c, reference));
            rows.push(BenchRow {
                n: *n,
                trial: *trial,
                algorithm: *alg,
                cost: cost.as_ref().ok().copied(),
                reference,
                reference_kind: kind,
                ratio,
                error: cost.as_ref().err().cloned(),
            });
        }
    }
    rows.sort_by_key(|r| (r.n, r.trial, r.algorithm));
    let summary = summarize(&rows);
    Ok(BenchTable { rows, summary })
}

fn ratio(cost: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        cost / reference
    } else {
        1.0
    }
}

pub fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut by_alg: BTreeMap<Algorithm, Vec<&BenchRow>> = BTreeMap::new();
    for r in rows {
        by_alg.entry(r.algorithm).or_default().push(r);
    }
    by_alg
        .into_iter()
        .map(|(algorithm, rs)| {
            let ratios: Vec<f64> = rs.iter().filter_map(|r| r.ratio).collect();
            let count = ratios.len();
            BenchSummary {
                algorithm,
                runs: rs.len(),
                failures: rs.len() - count,
                mean_ratio: if count > 0 { ratios.iter().sum::<f64>() / count as f64 } else { f64::NAN },
                max_ratio: ratios.iter().copied().fold(f64::NAN, f64::max),
                min_ratio: ratios.iter().copied().fold(f64::NAN, f64::min),
            }
        })
        .collect()
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>8} {:>10} {:>10} {:>10}",
            "algorithm", "runs", "failed", "mean", "max", "min"
        );
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{:<12} {:>6} {:>8} {:>10.4} {:>10.4} {:>10.4}",
                s.algorithm.name(),
                s.runs,
                s.failures,
                s.mean_ratio,
                s.max_ratio,
                s.min_ratio
            );
        }
        let exact = self.rows.iter().filter(|r| r.reference_kind == Reference::Exact).count();
        let _ = writeln!(
            out,
            "reference: exact optimum on {exact} of {} rows, best found elsewhere",
            self.rows.len()
        );
        let _ = writeln!(
            out,
            "note: the auto ratio bar of {DISPATCH_RATIO_BAR} is an engineering regression bar at \
             desk-scale overridden constants, not the asymptotic guarantee"
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes") + "\n"
    }

    pub fn summary_for(&self, algorithm: Algorithm) -> Option<&BenchSummary> {
        self.summary.iter().find(|s| s.algorithm == algorithm)
    }
}
