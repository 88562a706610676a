use rayon::prelude::*;
use serde::Serialize;

use super::format::{fmt_profile, fmt_sig, trajectory_csv};
use super::scenario::SweepPlan;
use crate::conditions::{self, nu_beta, ConditionOptions, ConditionReport};
use crate::equilibrium::{self, sequential_brd, BrdTrace, EquilibriumReport, DEFAULT_MAX_ROUNDS};
use crate::game::{Game, GameSpec};
use crate::sir::{self, ActionProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub budget: u128,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            budget: equilibrium::DEFAULT_BUDGET,
        }
    }
}

/// Trajectory CSV for profile `u`. Off-grid profiles are refused unless
/// `allow_off_grid` is set.
pub fn simulate(spec: &GameSpec, u: &ActionProfile, allow_off_grid: bool) -> Result<String> {
    if !allow_off_grid && !spec.actions.contains(u) {
        return Err(Error::invalid("u", "profile is not on the action grid (pass --off-grid to allow it)"));
    }
    let traj = sir::integrate(&spec.epidemic, u, spec.horizon, spec.step)?;
    Ok(trajectory_csv(&traj))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub regions: usize,
    pub grid_sizes: Vec<usize>,
    pub horizon_days: f64,
    pub step_days: f64,
    pub seed: u64,
}

impl RunInfo {
    fn new(spec: &GameSpec, seed: u64) -> Self {
        Self {
            regions: spec.regions(),
            grid_sizes: spec.actions.sizes(),
            horizon_days: spec.horizon,
            step_days: spec.step,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub run: RunInfo,
    pub equilibrium: EquilibriumReport,
    /// Best-response dynamics started from `u_max`.
    pub brd_from_u_max: BrdTrace,
    pub conditions: ConditionReport,
}

pub fn solve(spec: &GameSpec, options: RunOptions) -> Result<SolveReport> {
    let game = Game::new(spec.clone());
    let equilibrium = equilibrium::solve(&game, options.budget)?;
    let brd = sequential_brd(&game, &spec.actions.max_profile(), DEFAULT_MAX_ROUNDS)?;
    let conditions = conditions::evaluate(&game, &ConditionOptions::with_seed(options.seed))?;
    Ok(SolveReport {
        run: RunInfo::new(spec, options.seed),
        equilibrium,
        brd_from_u_max: brd,
        conditions,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsOutput {
    pub run: RunInfo,
    pub conditions: ConditionReport,
}

pub fn check_conditions(spec: &GameSpec, options: RunOptions) -> Result<ConditionsOutput> {
    let game = Game::new(spec.clone());
    Ok(ConditionsOutput {
        run: RunInfo::new(spec, options.seed),
        conditions: conditions::evaluate(&game, &ConditionOptions::with_seed(options.seed))?,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResultRow {
    /// 1-based region label.
    pub varied_region: usize,
    pub cross_rate: f64,
    pub poa: Option<f64>,
    pub poc: Option<f64>,
    pub worst_ne_profile: Option<ActionProfile>,
    pub social_opt_profile: Option<ActionProfile>,
    /// `cross_rate <= nu_k` for the varied region.
    pub in_wir: bool,
    pub ne_count: usize,
    pub error: Option<String>,
}

fn sweep_row(base: &GameSpec, plan: &SweepPlan, varied: usize, rate: f64, nu: f64, budget: u128) -> SweepResultRow {
    let mut row = SweepResultRow {
        varied_region: varied + 1,
        cross_rate: rate,
        poa: None,
        poc: None,
        worst_ne_profile: None,
        social_opt_profile: None,
        in_wir: rate <= nu,
        ne_count: 0,
        error: None,
    };
    let outcome = plan
        .point(base, varied, rate)
        .and_then(|spec| equilibrium::solve(&Game::new(spec), budget));
    match outcome {
        Ok(report) => {
            row.poa = Some(report.poa);
            row.poc = Some(report.poc);
            row.worst_ne_profile = Some(report.worst_ne_profile().clone());
            row.social_opt_profile = Some(report.social_opt_profile.clone());
            row.ne_count = report.ne_profiles.len();
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// One row per (region, rate) in plan order; rows run concurrently and a
/// failing row records its error instead of aborting the sweep.
pub fn sweep(base: &GameSpec, plan: &SweepPlan, options: RunOptions) -> Vec<SweepResultRow> {
    let nu = nu_beta(base);
    let points: Vec<(usize, f64)> = plan
        .varied
        .iter()
        .flat_map(|&k| plan.rates.iter().map(move |&v| (k, v)))
        .collect();
    points
        .into_par_iter()
        .map(|(k, v)| sweep_row(base, plan, k, v, nu.values[k], options.budget))
        .collect()
}

pub const SWEEP_HEADER: &str = "varied_region,cross_rate,poa,poc,worst_ne_profile,social_opt_profile,in_wir,ne_count,error";

pub fn sweep_csv(rows: &[SweepResultRow]) -> String {
    let opt = |x: Option<f64>| x.map(fmt_sig).unwrap_or_default();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let fields = [
            r.varied_region.to_string(),
            fmt_sig(r.cross_rate),
            opt(r.poa),
            opt(r.poc),
            r.worst_ne_profile.as_ref().map(fmt_profile).unwrap_or_default(),
            r.social_opt_profile.as_ref().map(fmt_profile).unwrap_or_default(),
            r.in_wir.to_string(),
            r.ne_count.to_string(),
            r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub varied_regions: Vec<usize>,
    pub cross_rate_values: Vec<f64>,
    pub fixed_cross_rates: super::scenario::FixedCrossRates,
    pub nu_beta: Vec<f64>,
    pub run: RunInfo,
}

pub fn sweep_metadata(base: &GameSpec, plan: &SweepPlan, options: RunOptions) -> SweepMetadata {
    SweepMetadata {
        varied_regions: plan.varied.iter().map(|k| k + 1).collect(),
        cross_rate_values: plan.rates.clone(),
        fixed_cross_rates: plan.fixed.clone(),
        nu_beta: nu_beta(base).values,
        run: RunInfo::new(base, options.seed),
    }
}
