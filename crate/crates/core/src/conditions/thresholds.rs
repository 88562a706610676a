use serde::Serialize;

use crate::game::{Game, GameSpec, ProbeSet};
use crate::sir;
use crate::Result;

/// Slack allowed when comparing a margin with zero. Cross rates set exactly
/// at the threshold put the static check on its boundary, where the sign of
/// the computed margin is decided by rounding.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuBeta {
    pub values: Vec<f64>,
    /// `values[k] <= 0`: no positive cross rate can satisfy the bound.
    pub unattainable: Vec<bool>,
}

/// Per-receiver cross-rate threshold
/// `nu_k = (min_l gamma_l / ((1 - U_k^min) s0_k) - beta_kk) / 4`.
pub fn nu_beta(spec: &GameSpec) -> NuBeta {
    let p = &spec.epidemic;
    let gamma_min = p.gamma().iter().copied().fold(f64::INFINITY, f64::min);
    let values: Vec<f64> = (0..spec.regions())
        .map(|k| {
            let exposure = (1.0 - spec.actions.u_min()[k]) * p.s0()[k];
            (gamma_min / exposure - p.beta(k, k)) / 4.0
        })
        .collect();
    let unattainable = values.iter().map(|&v| v <= 0.0).collect();
    NuBeta { values, unattainable }
}

/// `wir_ok[k][l]`: `beta[k][l] <= nu_k` for `k != l` (diagonal entries are `true`).
pub fn wir_flags(spec: &GameSpec, nu: &NuBeta) -> Vec<Vec<bool>> {
    let k = spec.regions();
    (0..k)
        .map(|r| {
            (0..k)
                .map(|c| r == c || spec.epidemic.beta(r, c) <= nu.values[r] + BOUNDARY_TOL)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionI {
    /// `|beta_kk| - sum_{l != k} |beta_kl|` per row.
    pub row_margins: Vec<f64>,
    pub diag_dominance_margin: f64,
    pub determinant: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionII {
    pub min_susceptible: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPoint {
    pub probe: String,
    pub time: f64,
    /// 1-based region label.
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionIII {
    /// `1 / sum_l rho_kl - (1 - U_k^min) s0_k` per region.
    pub static_margins: Vec<f64>,
    pub static_passed: bool,
    /// `min 1 / sum_l rho_kl - (1 - u_k) s_k(t, u)` over probes, stored times and regions.
    pub trajectory_margin: f64,
    pub trajectory_passed: bool,
    pub worst: Option<WorstPoint>,
}

/// Conditions (i)-(iii) on the transmission matrix and the susceptible paths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub condition_i: ConditionI,
    pub condition_ii: ConditionII,
    pub condition_iii: ConditionIII,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.condition_i.passed
            && self.condition_ii.passed
            && (self.condition_iii.static_passed || self.condition_iii.trajectory_passed)
    }
}

fn inverse_rho_row_sums(spec: &GameSpec) -> Vec<Option<f64>> {
    let p = &spec.epidemic;
    (0..spec.regions())
        .map(|k| {
            let total: f64 = (0..spec.regions()).map(|l| p.rho(k, l)).sum();
            (total > 0.0).then(|| 1.0 / total)
        })
        .collect()
}

pub fn check_regularity(game: &Game, probes: &ProbeSet) -> Result<RegularityReport> {
    let spec = game.spec();
    let p = &spec.epidemic;
    let k = spec.regions();

    let row_margins: Vec<f64> = (0..k)
        .map(|r| p.beta(r, r).abs() - (0..k).filter(|&c| c != r).map(|c| p.beta(r, c).abs()).sum::<f64>())
        .collect();
    let diag_dominance_margin = row_margins.iter().copied().fold(f64::INFINITY, f64::min);
    let condition_i = ConditionI {
        passed: diag_dominance_margin > 0.0,
        row_margins,
        diag_dominance_margin,
        determinant: p.beta_matrix().determinant(),
    };

    let inv_sums = inverse_rho_row_sums(spec);
    let static_margins: Vec<f64> = (0..k)
        .map(|r| match inv_sums[r] {
            Some(bound) => bound - (1.0 - spec.actions.u_min()[r]) * p.s0()[r],
            None => 1.0,
        })
        .collect();
    let static_passed = static_margins.iter().all(|&m| m >= -BOUNDARY_TOL);

    let mut min_susceptible = f64::INFINITY;
    let mut trajectory_margin = f64::INFINITY;
    let mut worst = None;
    for probe in probes.iter() {
        let u = &probe.profile;
        let traj = sir::integrate(p, u, spec.horizon, spec.step)?;
        min_susceptible = min_susceptible.min(traj.min_susceptible());
        for (row, &t) in traj.times.iter().enumerate() {
            for r in 0..k {
                let Some(bound) = inv_sums[r] else { continue };
                let margin = bound - (1.0 - u[r]) * traj.s[row][r];
                if margin < trajectory_margin {
                    trajectory_margin = margin;
                    worst = Some(WorstPoint {
                        probe: probe.label.clone(),
                        time: t,
                        region: r + 1,
                    });
                }
            }
        }
    }
    if worst.is_none() {
        trajectory_margin = 1.0;
    }

    Ok(RegularityReport {
        condition_i,
        condition_ii: ConditionII {
            passed: min_susceptible > 0.0,
            min_susceptible,
        },
        condition_iii: ConditionIII {
            static_margins,
            static_passed,
            trajectory_passed: trajectory_margin >= -BOUNDARY_TOL,
            trajectory_margin,
            worst,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureMargin {
    /// 1-based region label.
    pub region: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub margins: Vec<CurvatureMargin>,
    /// Every listed margin is non-negative.
    pub holds: bool,
}

/// `(1 - U_k^min) s_k(T, u_min) - 1 / (2 rho_kk)` for each `k` in `regions`
/// (normally the non-monotone set).
pub fn check_curvature(game: &Game, regions: &[usize]) -> Result<CurvatureReport> {
    let spec = game.spec();
    let u_min = spec.actions.min_profile();
    let state = game.final_state(&u_min)?;
    let margins: Vec<CurvatureMargin> = regions
        .iter()
        .map(|&k| {
            let rho = spec.epidemic.rho(k, k);
            let threshold = if rho > 0.0 { 1.0 / (2.0 * rho) } else { f64::MAX };
            CurvatureMargin {
                region: k + 1,
                margin: (1.0 - u_min[k]) * state.s[k] - threshold,
            }
        })
        .collect();
    Ok(CurvatureReport {
        holds: margins.iter().all(|m| m.margin >= 0.0),
        margins,
    })
}
