//! Rounding a fractional bipartite assignment to a function `f: B → A`.
//!
//! Each `b` is first spread over its neighbours in proportion to the edge
//! weights, scaled so that the shares sum to `w(b)`. Alternating cycles of
//! the support are cancelled until the support is a forest, keeping every
//! vertex total fixed. Rooting each tree at an `A` vertex, every `b` goes to
//! one of its children when it has any, and to its parent otherwise. An `a`
//! then receives at most its parent `b` plus leaf children carrying their
//! full weight on the edge to `a`, so its excess is at most `max_b w(b)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Support entries at or below this are treated as zero.
const ZERO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteWeights {
    a_count: usize,
    b_count: usize,
    edges: BTreeMap<(usize, usize), f64>,
    b_weights: Vec<f64>,
}

impl BipartiteWeights {
    /// Validates that every `b` has a neighbour and `0 ≤ w(b) ≤ Σ_a w(a,b)`.
    pub fn new(
        a_count: usize,
        b_weights: Vec<f64>,
        edges: impl IntoIterator<Item = ((usize, usize), f64)>,
    ) -> Result<Self> {
        let b_count = b_weights.len();
        let mut map = BTreeMap::new();
        for ((a, b), w) in edges {
            if a >= a_count || b >= b_count {
                return Err(Error::InvalidInstance(format!(
                    "edge ({a},{b}) outside {a_count}x{b_count}"
                )));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidInstance(format!("edge ({a},{b}) has weight {w}")));
            }
            if map.insert((a, b), w).is_some() {
                return Err(Error::InvalidInstance(format!("duplicate edge ({a},{b})")));
            }
        }
        let g = BipartiteWeights {
            a_count,
            b_count,
            edges: map,
            b_weights,
        };
        for b in 0..b_count {
            let wb = g.b_weights[b];
            if !(wb >= 0.0 && wb.is_finite()) {
                return Err(Error::InvalidInstance(format!("b {b} has weight {wb}")));
            }
            let neighbours = g.neighbours(b);
            if neighbours.is_empty() {
                return Err(Error::InvalidInstance(format!("b {b} has no neighbour")));
            }
            let total: f64 = neighbours.iter().map(|&(_, w)| w).sum();
            if wb > total + 1e-12 * total.max(1.0) {
                return Err(Error::InvalidInstance(format!(
                    "b {b} has weight {wb} above its edge total {total}"
                )));
            }
        }
        Ok(g)
    }

    pub fn a_count(&self) -> usize {
        self.a_count
    }

    pub fn b_count(&self) -> usize {
        self.b_count
    }

    pub fn b_weight(&self, b: usize) -> f64 {
        self.b_weights[b]
    }

    pub fn edges(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.edges
    }

    /// `(a, w(a,b))` for every neighbour of `b`, ascending by `a`.
    pub fn neighbours(&self, b: usize) -> Vec<(usize, f64)> {
        self.edges
            .iter()
            .filter(|(&(_, bb), _)| bb == b)
            .map(|(&(a, _), &w)| (a, w))
            .collect()
    }

    pub fn max_b_weight(&self) -> f64 {
        self.b_weights.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ_{f(b)=a} w(b) − Σ_b w(a,b)` for every `a`.
    pub fn excess(&self, f: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; self.a_count];
        for (b, &a) in f.iter().enumerate() {
            out[a] += self.b_weights[b];
        }
        for (&(a, _), &w) in &self.edges {
            out[a] -= w;
        }
        out
    }
}

/// Returns `f` with `f[b] ∈ N(b)` and per-`a` excess at most `max_b w(b)`.
pub fn assignment_function(g: &BipartiteWeights) -> Result<Vec<usize>> {
    let edge_list: Vec<(usize, usize)> = g.edges.keys().copied().collect();
    let mut x: Vec<f64> = vec![0.0; edge_list.len()];
    for b in 0..g.b_count {
        let total: f64 = edge_list
            .iter()
            .zip(g.edges.values())
            .filter(|((_, bb), _)| *bb == b)
            .map(|(_, &w)| w)
            .sum();
        if total <= 0.0 {
            continue;
        }
        for (k, &(_, bb)) in edge_list.iter().enumerate() {
            if bb == b {
                x[k] = g.edges[&edge_list[k]] * g.b_weights[b] / total;
            }
        }
    }
    for v in &mut x {
        if *v <= ZERO {
            *v = 0.0;
        }
    }

    let vertex_count = g.a_count + g.b_count;
    let ends = |k: usize| (edge_list[k].0, g.a_count + edge_list[k].1);
    while let Some(cycle) = find_cycle(vertex_count, &x, &ends) {
        cancel(&mut x, &cycle);
    }

    let f = round_forest(g, &edge_list, &x);
    let max_w = g.max_b_weight();
    for (a, e) in g.excess(&f).into_iter().enumerate() {
        if e > max_w + 1e-9 {
            return Err(Error::Internal(format!(
                "assignment excess {e} at a {a} exceeds {max_w}"
            )));
        }
    }
    Ok(f)
}

/// Edge indices of a cycle in the support, in traversal order.
fn find_cycle(
    vertex_count: usize,
    x: &[f64],
    ends: &dyn Fn(usize) -> (usize, usize),
) -> Option<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
    for (k, &v) in x.iter().enumerate() {
        if v > 0.0 {
            let (a, b) = ends(k);
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
    }
    let mut depth = vec![usize::MAX; vertex_count];
    let mut via = vec![usize::MAX; vertex_count];
    let mut parent = vec![usize::MAX; vertex_count];
    for root in 0..vertex_count {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(w, k) in &adj[u] {
                if k == via[u] {
                    continue;
                }
                if depth[w] == usize::MAX {
                    depth[w] = depth[u] + 1;
                    via[w] = k;
                    parent[w] = u;
                    stack.push(w);
                } else {
                    // Non-tree edge closes a cycle through the lowest common ancestor.
                    let (mut p, mut q) = (u, w);
                    let mut left = vec![k];
                    let mut right = Vec::new();
                    while p != q {
                        if depth[p] >= depth[q] {
                            left.push(via[p]);
                            p = parent[p];
                        } else {
                            right.push(via[q]);
                            q = parent[q];
                        }
                    }
                    // left runs u → lca after k; reorder to lca → u → w → lca.
                    let mut cycle: Vec<usize> = left[1..].iter().rev().copied().collect();
                    cycle.push(k);
                    cycle.extend(right);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

/// Pushes flow around an even cycle: `+δ` on even positions, `−δ` on odd ones,
/// with `δ` the smallest odd-position value, which drops to zero.
fn cancel(x: &mut [f64], cycle: &[usize]) {
    debug_assert!(cycle.len().is_multiple_of(2));
    let (pos, delta) = cycle
        .iter()
        .enumerate()
        .skip(1)
        .step_by(2)
        .map(|(i, &k)| (i, x[k]))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("cycle has at least two edges");
    for (i, &k) in cycle.iter().enumerate() {
        if i % 2 == 0 {
            x[k] += delta;
        } else {
            x[k] -= delta;
            if x[k] <= ZERO {
                x[k] = 0.0;
            }
        }
    }
    x[cycle[pos]] = 0.0;
}

fn round_forest(g: &BipartiteWeights, edge_list: &[(usize, usize)], x: &[f64]) -> Vec<usize> {
    let na = g.a_count;
    let nv = na + g.b_count;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for (k, &(a, b)) in edge_list.iter().enumerate() {
        if x[k] > 0.0 {
            adj[a].push((na + b, k));
            adj[na + b].push((a, k));
        }
    }
    let mut parent = vec![usize::MAX; nv];
    let mut visited = vec![false; nv];
    let mut children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    for root in 0..na {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &(w, k) in &adj[u] {
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = u;
                    children[u].push((w, k));
                    stack.push(w);
                }
            }
        }
    }
    (0..g.b_count)
        .map(|b| {
            let v = na + b;
            let best_child = children[v]
                .iter()
                .max_by(|p, q| x[p.1].total_cmp(&x[q.1]).then(q.0.cmp(&p.0)))
                .map(|&(a, _)| a);
            match (best_child, parent[v]) {
                (Some(a), _) => a,
                (None, p) if p != usize::MAX => p,
                // No support: w(b) is zero, any neighbour will do.
                _ => g.neighbours(b)[0].0,
            }
        })
        .collect()
}
