//! The accuracy parameter ε and every constant derived from it.
//!
//! The guarantee-bearing constants grow like `(1/ε)^(1/ε)`, so desk-scale
//! runs override some of them. Every override is recorded in [`Overrides`]
//! and echoed by reports.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Manually set constants. `None` means "derived from ε".
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Overrides {
    pub c: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub k1: Option<usize>,
    pub k2: Option<usize>,
}

impl Overrides {
    /// Names of the overridden constants, in declaration order.
    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.c.is_some() {
            out.push("C");
        }
        if self.beta.is_some() {
            out.push("beta");
        }
        if self.gamma.is_some() {
            out.push("gamma");
        }
        if self.k1.is_some() {
            out.push("k1");
        }
        if self.k2.is_some() {
            out.push("k2");
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.names().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub epsilon: f64,
    /// Bounded-distance ratio `C`.
    pub c: f64,
    /// Adaptive rounding granularity `β`.
    pub beta: f64,
    /// Dispatcher threshold `Γ` on total demand.
    pub gamma: f64,
    /// Number of center rings.
    pub k1: usize,
    /// Number of center rays.
    pub k2: usize,
    /// Real-valued bound `K` on the number of centers.
    pub k_bound: f64,
    pub overrides: Overrides,
    /// Largest point set solved by Held–Karp.
    pub tsp_exact_threshold: usize,
    /// Largest instance solved exactly by the few-tours backend.
    pub backend_exact_threshold: usize,
    /// Guard on the number of tour types in the big-terminal catalog.
    pub catalog_cap: usize,
    /// Guard on the number of residual states explored by the configuration search.
    pub search_state_cap: usize,
}

pub const DEFAULT_TSP_EXACT_THRESHOLD: usize = 15;
pub const DEFAULT_BACKEND_EXACT_THRESHOLD: usize = 10;
pub const DEFAULT_CATALOG_CAP: usize = 1_000_000;
pub const DEFAULT_SEARCH_STATE_CAP: usize = 2_000_000;

/// `⌈x⌉`, except values within floating noise of an integer snap to it.
pub(crate) fn ceil_tol(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// `⌊x⌋` with the same snapping as [`ceil_tol`].
pub(crate) fn floor_tol(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Computes `C = (1/ε)^(1/ε)`, `β = ε²/(4C)`, `K₁ = ⌈4C/ε²⌉`, `K₂ = ⌈8πC/ε²⌉`,
/// `K = 32πC²/ε⁴` and `Γ = 32πC³/ε⁵`, then applies overrides. Constants
/// downstream of an overridden `C` are recomputed from it.
pub fn derive_params(epsilon: f64, overrides: Overrides) -> Result<Params> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParam(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParam(format!(
                "override {name} must be positive, got {v}"
            )))
        }
    };
    if let Some(v) = overrides.c {
        positive("C", v)?;
    }
    if let Some(v) = overrides.beta {
        positive("beta", v)?;
    }
    if let Some(v) = overrides.gamma {
        positive("gamma", v)?;
    }
    if overrides.k1 == Some(0) || overrides.k2 == Some(0) {
        return Err(Error::InvalidParam("override k1/k2 must be positive".into()));
    }

    let e2 = epsilon * epsilon;
    let c = overrides.c.unwrap_or_else(|| (1.0 / epsilon).powf(1.0 / epsilon));
    let beta = overrides.beta.unwrap_or(e2 / (4.0 * c));
    let k1 = overrides.k1.unwrap_or_else(|| ceil_tol(4.0 * c / e2));
    let k2 = overrides.k2.unwrap_or_else(|| ceil_tol(8.0 * PI * c / e2));
    let k_bound = 32.0 * PI * c * c / (e2 * e2);
    let gamma = overrides
        .gamma
        .unwrap_or(32.0 * PI * c.powi(3) / (e2 * e2 * epsilon));

    Ok(Params {
        epsilon,
        c,
        beta,
        gamma,
        k1,
        k2,
        k_bound,
        overrides,
        tsp_exact_threshold: DEFAULT_TSP_EXACT_THRESHOLD,
        backend_exact_threshold: DEFAULT_BACKEND_EXACT_THRESHOLD,
        catalog_cap: DEFAULT_CATALOG_CAP,
        search_state_cap: DEFAULT_SEARCH_STATE_CAP,
    })
}

impl Params {
    pub fn new(epsilon: f64) -> Result<Params> {
        derive_params(epsilon, Overrides::default())
    }

    /// Number of rounding groups per crowded center, `⌈1/β⌉`.
    pub fn group_count(&self) -> usize {
        ceil_tol(1.0 / self.beta)
    }

    /// A center is rounded when it holds at least `1/β` terminals.
    pub fn is_crowded(&self, count: usize) -> bool {
        count as f64 >= 1.0 / self.beta - 1e-9
    }

    /// At most `⌊1/ε⌋` big terminals fit in one tour.
    pub fn max_big_per_tour(&self) -> usize {
        floor_tol(1.0 / self.epsilon).max(1)
    }

    /// Number of grid centers `⌈K₁⌉·⌈K₂⌉`.
    pub fn center_count(&self) -> usize {
        self.k1 * self.k2
    }

    /// The clustering pipeline needs `2ε < 1` so clustered demands stay feasible.
    pub fn check_general(&self) -> Result<()> {
        if self.epsilon >= 0.5 {
            return Err(Error::InvalidParam(format!(
                "the general pipeline needs epsilon < 1/2, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn is_big(&self, demand: f64) -> bool {
        demand >= self.epsilon - 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_epsilon_defaults() {
        let p = Params::new(0.5).unwrap();
        assert!((p.c - 4.0).abs() < 1e-12);
        assert!((p.beta - 0.015625).abs() < 1e-15);
        assert_eq!(p.k1, 64);
        assert_eq!(p.k2, 403);
        let gamma = 32.0 * PI * 64.0 / 0.03125;
        assert!((p.gamma - gamma).abs() < 1e-6 * gamma);
        assert!((p.gamma - 205887.4).abs() < 0.1);
        assert!(p.overrides.is_empty());
    }

    #[test]
    fn rejects_closed_endpoints() {
        assert!(Params::new(1.0).is_err());
        assert!(Params::new(0.0).is_err());
        assert!(Params::new(-0.3).is_err());
    }

    #[test]
    fn c_override_recomputes_dependents() {
        let p = derive_params(
            0.5,
            Overrides {
                c: Some(2.0),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.c, 2.0);
        assert!((p.beta - 0.25 / 8.0).abs() < 1e-15);
        assert_eq!(p.k1, 32);
        assert_eq!(p.k2, 202);
        assert!((p.k_bound - 32.0 * PI * 4.0 / 0.0625).abs() < 1e-9);
        assert!((p.gamma - 32.0 * PI * 8.0 / 0.03125).abs() < 1e-6);
        assert_eq!(p.overrides.names(), vec!["C"]);
    }

    #[test]
    fn rejects_nonpositive_overrides() {
        let bad = |o: Overrides| derive_params(0.3, o).is_err();
        assert!(bad(Overrides { c: Some(0.0), ..Default::default() }));
        assert!(bad(Overrides { gamma: Some(-1.0), ..Default::default() }));
        assert!(bad(Overrides { k1: Some(0), ..Default::default() }));
    }

    #[test]
    fn gamma_identity_without_overrides() {
        for eps in [0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.7] {
            let p = Params::new(eps).unwrap();
            let rhs = p.k_bound * p.c / eps;
            assert!((p.gamma - rhs).abs() <= 1e-6 * rhs, "eps={eps}");
        }
    }

    #[test]
    fn ceilings_snap_float_noise() {
        // 4·2/0.4² is 50 up to rounding.
        let p = derive_params(0.4, Overrides { c: Some(2.0), ..Default::default() }).unwrap();
        assert_eq!(p.k1, 50);
        assert_eq!(p.group_count(), 50);
        assert_eq!(p.max_big_per_tour(), 2);
        assert_eq!(p.k2, 315);
    }
}
