use serde::Serialize;

use crate::game::{Game, ProbeSet, MONOTONICITY_TOL};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiConvexity {
    /// 1-based region label.
    pub region: usize,
    pub quasi_convex: bool,
    /// Largest `J_m - max(min_{j<m} J_j, min_{l>m} J_l)`; positive means the
    /// curve rises and then falls again.
    pub worst_violation: f64,
    pub worst_probe: Option<String>,
}

/// Largest amount by which an interior point exceeds the higher of the
/// lowest values on either side of it. Non-positive for a quasi-convex
/// sequence.
pub fn quasiconvexity_violation(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return 0.0;
    }
    let mut suffix_min = vec![f64::INFINITY; n];
    for m in (0..n - 1).rev() {
        suffix_min[m] = suffix_min[m + 1].min(values[m + 1]);
    }
    let mut prefix_min = values[0];
    let mut worst = f64::NEG_INFINITY;
    for m in 1..n - 1 {
        worst = worst.max(values[m] - prefix_min.max(suffix_min[m]));
        prefix_min = prefix_min.min(values[m]);
    }
    worst
}

/// Grid-restricted quasi-convexity of `u_k -> J_k(u_k, u_{-k})` at each probe.
pub fn quasiconvexity_scan(game: &Game, k: usize, probes: &ProbeSet) -> Result<QuasiConvexity> {
    let mut worst = f64::NEG_INFINITY;
    let mut worst_probe = None;
    for probe in probes.iter() {
        let v = quasiconvexity_violation(&game.own_cost_curve(k, &probe.profile)?);
        if v > worst {
            worst = v;
            worst_probe = Some(probe.label.clone());
        }
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    Ok(QuasiConvexity {
        region: k + 1,
        quasi_convex: worst <= MONOTONICITY_TOL,
        worst_violation: worst,
        worst_probe,
    })
}
