//! Numerical checks of the sufficient conditions for existence and
//! uniqueness of a pure equilibrium.
//!
//! Everything stated "for all u" is checked on a seeded probe set and is
//! sampled evidence, never a proof. Every report records where it looked.

mod hessian;
mod shape;
mod thresholds;

use serde::Serialize;

use crate::game::{Game, NonMonotoneReport, ProbeConfig, ProbeSet};
use crate::Result;

pub use hessian::{
    analytic_di_du, check_diagonal_dominance, cross_partial, cross_partial_nested, own_second_derivative, HessianProbe,
    SkippedProbe, DominanceReport, DEFAULT_HESSIAN_STEP, DOMINANCE_TOL,
};
pub use shape::{quasiconvexity_scan, quasiconvexity_violation, QuasiConvexity};
pub use thresholds::{
    check_regularity, check_curvature, nu_beta, wir_flags, RegularityReport, ConditionI, ConditionII, ConditionIII,
    NuBeta, CurvatureMargin, CurvatureReport, WorstPoint, BOUNDARY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionOptions {
    pub probes: ProbeConfig,
    pub hessian_step: f64,
    pub hessian_probes: usize,
    pub seed: u64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        Self {
            probes: ProbeConfig::default(),
            hessian_step: DEFAULT_HESSIAN_STEP,
            hessian_probes: 8,
            seed: 0,
        }
    }
}

impl ConditionOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            probes: ProbeConfig {
                seed,
                ..ProbeConfig::default()
            },
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub regularity: RegularityReport,
    pub nu_beta: NuBeta,
    pub wir_ok: Vec<Vec<bool>>,
    /// Every cross rate is at or below its receiver's threshold.
    pub cross_rates_within_nu: bool,
    pub nonmonotone: NonMonotoneReport,
    pub curvature: CurvatureReport,
    /// The regularity checks pass and every curvature margin is non-negative.
    pub wir_certified: bool,
    pub quasiconvexity: Vec<QuasiConvexity>,
    pub diagonal_dominance: DominanceReport,
    pub probes: ProbeSet,
}

pub fn evaluate(game: &Game, options: &ConditionOptions) -> Result<ConditionReport> {
    let spec = game.spec();
    let probes = ProbeSet::new(game.grid(), options.probes);
    let regularity = check_regularity(game, &probes)?;
    let nu = nu_beta(spec);
    let wir_ok = wir_flags(spec, &nu);
    let nonmonotone = game.detect_nonmonotone(&probes)?;
    let curvature = check_curvature(game, &nonmonotone.set)?;
    let quasiconvexity = (0..game.regions())
        .map(|k| quasiconvexity_scan(game, k, &probes))
        .collect::<Result<Vec<_>>>()?;
    let diagonal_dominance = check_diagonal_dominance(game, options.hessian_step, options.hessian_probes, options.seed)?;
    Ok(ConditionReport {
        cross_rates_within_nu: wir_ok.iter().flatten().all(|&ok| ok),
        wir_certified: regularity.passed() && curvature.holds,
        regularity,
        nu_beta: nu,
        wir_ok,
        nonmonotone,
        curvature,
        quasiconvexity,
        diagonal_dominance,
        probes,
    })
}
