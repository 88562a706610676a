use rayon::prelude::*;

use crate::game::Game;
use crate::sir::ActionProfile;
use crate::{Error, Result};

/// A unilateral deviation must lower the deviator's cost by more than this
/// to count as profitable.
pub const IMPROVEMENT_TOL: f64 = 1e-12;

/// Cost vectors for every grid profile, indexed in mixed radix with region 0
/// as the most significant digit, so index order is lexicographic order.
#[derive(Debug, Clone)]
pub struct CostTable {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    costs: Vec<f64>,
}

/// Number of grid profiles, or `BudgetExceeded`.
pub fn profile_count(sizes: &[usize], budget: u128) -> Result<usize> {
    let required = sizes.iter().fold(1u128, |acc, &g| acc.saturating_mul(g as u128));
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required as usize)
}

impl CostTable {
    /// Evaluates `J(u)` on the whole grid in parallel, one solve per profile.
    pub fn build(game: &Game, budget: u128) -> Result<Self> {
        let sizes = game.grid().sizes();
        let count = profile_count(&sizes, budget)?;
        let mut strides = vec![1; sizes.len()];
        for k in (0..sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * sizes[k + 1];
        }
        let mut table = Self {
            sizes,
            strides,
            costs: Vec::new(),
        };
        let rows = (0..count)
            .into_par_iter()
            .map(|idx| game.cost(&table.profile(game, idx)))
            .collect::<Result<Vec<_>>>()?;
        table.costs = rows.into_iter().flatten().collect();
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.costs.len() / self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&stride| {
                let d = idx / stride;
                idx %= stride;
                d
            })
            .collect()
    }

    pub fn profile(&self, game: &Game, idx: usize) -> ActionProfile {
        game.grid().profile(&self.digits(idx))
    }

    #[inline]
    pub fn cost(&self, idx: usize, k: usize) -> f64 {
        self.costs[idx * self.sizes.len() + k]
    }

    pub fn costs(&self, idx: usize) -> &[f64] {
        let k = self.sizes.len();
        &self.costs[idx * k..(idx + 1) * k]
    }

    pub fn social_cost(&self, idx: usize) -> f64 {
        self.costs(idx).iter().sum()
    }

    /// No region can cut its own cost by more than [`IMPROVEMENT_TOL`] by
    /// moving alone to another grid point.
    pub fn is_ne(&self, idx: usize) -> bool {
        let digits = self.digits(idx);
        (0..self.sizes.len()).all(|k| {
            let own = self.cost(idx, k);
            let base = idx - digits[k] * self.strides[k];
            (0..self.sizes[k]).all(|j| self.cost(base + j * self.strides[k], k) >= own - IMPROVEMENT_TOL)
        })
    }

    pub fn ne_indices(&self) -> Vec<usize> {
        (0..self.len()).into_par_iter().filter(|&idx| self.is_ne(idx)).collect()
    }

    /// Lowest social cost; ties resolve to the lexicographically smallest profile.
    pub fn argmin_social(&self) -> usize {
        let mut best = 0;
        let mut best_cost = self.social_cost(0);
        for idx in 1..self.len() {
            let c = self.social_cost(idx);
            if c < best_cost - IMPROVEMENT_TOL {
                best = idx;
                best_cost = c;
            }
        }
        best
    }
}
