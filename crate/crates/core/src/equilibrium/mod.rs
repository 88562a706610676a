//! Pure Nash equilibria and the social optimum on the action grid.
//!
//! Equilibria are grid equilibria: only deviations to other grid points are
//! considered. Refine the grid through [`ActionGrid::with_points`] to get
//! closer to the continuous game.
//!
//! [`ActionGrid::with_points`]: crate::game::ActionGrid::with_points

mod brd;
mod table;

use serde::Serialize;

use crate::game::Game;
use crate::sir::ActionProfile;
use crate::{Error, Result};

pub use brd::{best_response, sequential_brd, BrdTrace, DEFAULT_MAX_ROUNDS};
pub use table::{profile_count, CostTable, IMPROVEMENT_TOL};

/// Default cap on the number of grid profiles enumerated.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoupledMinimum {
    /// 1-based region label.
    pub region: usize,
    pub argmin: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub ne_profiles: Vec<ActionProfile>,
    pub ne_costs: Vec<f64>,
    /// Index into `ne_profiles` of the equilibrium with the largest social cost.
    pub worst_ne: usize,
    pub social_opt_profile: ActionProfile,
    pub social_opt_cost: f64,
    pub poa: f64,
    pub poc: f64,
    pub decoupled_minima: Vec<DecoupledMinimum>,
    pub profiles_evaluated: usize,
}

impl EquilibriumReport {
    pub fn worst_ne_profile(&self) -> &ActionProfile {
        &self.ne_profiles[self.worst_ne]
    }

    pub fn worst_ne_cost(&self) -> f64 {
        self.ne_costs[self.worst_ne]
    }
}

/// Every grid profile with no profitable unilateral grid deviation.
pub fn enumerate_ne(game: &Game, budget: u128) -> Result<Vec<ActionProfile>> {
    let table = CostTable::build(game, budget)?;
    Ok(table.ne_indices().into_iter().map(|idx| table.profile(game, idx)).collect())
}

/// Grid minimizer of the social cost and its value.
pub fn social_optimum(game: &Game, budget: u128) -> Result<(ActionProfile, f64)> {
    let table = CostTable::build(game, budget)?;
    let idx = table.argmin_social();
    Ok((table.profile(game, idx), table.social_cost(idx)))
}

/// Independent deviation check that evaluates costs directly instead of
/// reading a [`CostTable`].
pub fn verify_ne(game: &Game, u: &ActionProfile) -> Result<bool> {
    let base = game.cost(u)?;
    for k in 0..game.regions() {
        for &v in game.grid().values(k) {
            if game.cost(&u.with(k, v)?)?[k] < base[k] - IMPROVEMENT_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `min_{u_k} J~_k(u_k)` for every region, ties toward the smaller action.
pub fn decoupled_minima(game: &Game) -> Result<Vec<DecoupledMinimum>> {
    (0..game.regions())
        .map(|k| {
            let mut best: Option<(f64, f64)> = None;
            for &v in game.grid().values(k) {
                let c = game.decoupled_cost(k, v)?;
                if best.is_none_or(|(_, bc)| c < bc - IMPROVEMENT_TOL) {
                    best = Some((v, c));
                }
            }
            let (argmin, cost) = best.expect("grids are non-empty");
            Ok(DecoupledMinimum {
                region: k + 1,
                argmin,
                cost,
            })
        })
        .collect()
}

/// Full analysis from a single cost table: NE set, social optimum, PoA, PoC.
pub fn solve(game: &Game, budget: u128) -> Result<EquilibriumReport> {
    let table = CostTable::build(game, budget)?;
    let ne = table.ne_indices();
    if ne.is_empty() {
        return Err(Error::NoEquilibrium);
    }
    let ne_costs: Vec<f64> = ne.iter().map(|&idx| table.social_cost(idx)).collect();
    let mut worst_ne = 0;
    for (j, &c) in ne_costs.iter().enumerate() {
        if c > ne_costs[worst_ne] {
            worst_ne = j;
        }
    }
    let opt = table.argmin_social();
    let social_opt_cost = table.social_cost(opt);
    let decoupled = decoupled_minima(game)?;
    let decoupled_total: f64 = decoupled.iter().map(|d| d.cost).sum();
    if !(social_opt_cost > 0.0) {
        return Err(Error::Degenerate("social optimum cost"));
    }
    if !(decoupled_total > 0.0) {
        return Err(Error::Degenerate("sum of decoupled minima"));
    }
    let worst = ne_costs[worst_ne];
    Ok(EquilibriumReport {
        ne_profiles: ne.iter().map(|&idx| table.profile(game, idx)).collect(),
        ne_costs,
        worst_ne,
        social_opt_profile: table.profile(game, opt),
        social_opt_cost,
        poa: worst / social_opt_cost,
        poc: worst / decoupled_total,
        decoupled_minima: decoupled,
        profiles_evaluated: table.len(),
    })
}

/// Worst-equilibrium social cost over the optimal social cost.
pub fn poa(game: &Game, budget: u128) -> Result<f64> {
    Ok(solve(game, budget)?.poa)
}

/// Worst-equilibrium social cost over the sum of decoupled minima.
pub fn poc(game: &Game, budget: u128) -> Result<f64> {
    Ok(solve(game, budget)?.poc)
}
