use serde::Serialize;

use super::{verify_ne, IMPROVEMENT_TOL};
use crate::game::Game;
use crate::sir::ActionProfile;
use crate::{Error, Result};

pub const DEFAULT_MAX_ROUNDS: usize = 100;

/// Grid argmin of `J_k(., u_{-k})`. Values within 1e-12 of the best count as
/// ties and the smallest action wins. `u[k]` itself is ignored.
pub fn best_response(game: &Game, k: usize, u: &ActionProfile) -> Result<f64> {
    let grid = game.grid().values(k);
    let curve = game.own_cost_curve(k, u)?;
    let mut best = 0;
    for j in 1..curve.len() {
        if curve[j] < curve[best] - IMPROVEMENT_TOL {
            best = j;
        }
    }
    Ok(grid[best])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrdTrace {
    /// Starting profile followed by the profile at the end of each round.
    pub iterates: Vec<ActionProfile>,
    pub converged: bool,
    pub rounds: usize,
    /// Final profile passed the independent deviation check.
    pub verified_ne: bool,
}

impl BrdTrace {
    pub fn last(&self) -> &ActionProfile {
        self.iterates.last().expect("trace holds the starting profile")
    }
}

/// Gauss-Seidel best-response dynamics: regions update in order `1..K`
/// within a round, each seeing the updates made before it. Stops after the
/// first round in which nobody moves.
pub fn sequential_brd(game: &Game, u_init: &ActionProfile, max_rounds: usize) -> Result<BrdTrace> {
    if max_rounds == 0 {
        return Err(Error::invalid("max_rounds", "must be at least 1"));
    }
    if !game.grid().contains(u_init) {
        return Err(Error::invalid("u_init", "starting profile must lie on the action grid"));
    }
    let mut u = u_init.clone();
    let mut iterates = vec![u.clone()];
    let mut converged = false;
    let mut rounds = 0;
    while rounds < max_rounds {
        rounds += 1;
        let mut moved = false;
        for k in 0..game.regions() {
            let br = best_response(game, k, &u)?;
            if br != u[k] {
                u = u.with(k, br)?;
                moved = true;
            }
        }
        iterates.push(u.clone());
        if !moved {
            converged = true;
            break;
        }
    }
    let verified_ne = verify_ne(game, &u)?;
    Ok(BrdTrace {
        iterates,
        converged,
        rounds,
        verified_ne,
    })
}
