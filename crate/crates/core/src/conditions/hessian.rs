use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::game::Game;
use crate::sir::{self, ActionProfile};
use crate::{Error, Result};

/// Default step for second differences.
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-3;

/// Margins at or below this are treated as non-positive. Second differences
/// of an exactly linear cost carry rounding noise of order 1e-16 / h^2.
pub const DOMINANCE_TOL: f64 = 1e-6;

fn perturbed(u: &ActionProfile, moves: &[(usize, f64)]) -> Result<ActionProfile> {
    let mut v = u.as_slice().to_vec();
    for &(k, d) in moves {
        v[k] += d;
    }
    ActionProfile::new(v)
}

/// `d^2 J_k / d u_k^2` by central second difference.
pub fn own_second_derivative(game: &Game, k: usize, u: &ActionProfile, h: f64) -> Result<f64> {
    let up = game.cost(&perturbed(u, &[(k, h)])?)?[k];
    let mid = game.cost(u)?[k];
    let down = game.cost(&perturbed(u, &[(k, -h)])?)?[k];
    Ok((up - 2.0 * mid + down) / (h * h))
}

/// `d^2 J_k / d u_k d u_l` by the four-point central stencil.
pub fn cross_partial(game: &Game, k: usize, l: usize, u: &ActionProfile, h: f64) -> Result<f64> {
    let j = |dk: f64, dl: f64| -> Result<f64> { Ok(game.cost(&perturbed(u, &[(k, dk), (l, dl)])?)?[k]) };
    Ok((j(h, h)? - j(h, -h)? - j(-h, h)? + j(-h, -h)?) / (4.0 * h * h))
}

/// Same mixed partial taken as a central difference in `u_l` (step `2h`) of
/// the central-difference slope in `u_k` (step `h`). Agrees with
/// [`cross_partial`] to second order; used as a consistency check.
pub fn cross_partial_nested(game: &Game, k: usize, l: usize, u: &ActionProfile, h: f64) -> Result<f64> {
    let slope = |dl: f64| -> Result<f64> {
        let up = game.cost(&perturbed(u, &[(k, h), (l, dl)])?)?[k];
        let down = game.cost(&perturbed(u, &[(k, -h), (l, dl)])?)?[k];
        Ok((up - down) / (2.0 * h))
    };
    Ok((slope(2.0 * h)? - slope(-2.0 * h)?) / (4.0 * h))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianProbe {
    pub label: String,
    /// Evaluation point after pulling every coordinate at least `h` inside
    /// its action interval.
    pub profile: ActionProfile,
    pub own: Vec<f64>,
    /// `own_k - sum_{l != k} |cross_kl|` per region.
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedProbe {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub h: f64,
    pub seed: u64,
    /// Minimum over evaluated probes and regions, 0 when nothing was evaluated.
    pub min_margin: f64,
    pub per_region_min: Vec<f64>,
    /// At least one probe was evaluated and `min_margin > DOMINANCE_TOL`.
    pub supported: bool,
    pub probes: Vec<HessianProbe>,
    pub skipped: Vec<SkippedProbe>,
}

fn hessian_rows(game: &Game, u: &ActionProfile, h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = game.regions();
    let mut own = Vec::with_capacity(k);
    let mut margins = Vec::with_capacity(k);
    for r in 0..k {
        let diag = own_second_derivative(game, r, u, h)?;
        let mut off = 0.0;
        for l in (0..k).filter(|&l| l != r) {
            off += cross_partial(game, r, l, u, h)?.abs();
        }
        own.push(diag);
        margins.push(diag - off);
    }
    Ok((own, margins))
}

/// Sampled diagonal-dominance test on the cost Hessian at `n_probes` seeded
/// grid profiles.
pub fn check_diagonal_dominance(game: &Game, h: f64, n_probes: usize, seed: u64) -> Result<DominanceReport> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("must be > 0, got {h}")));
    }
    let grid = game.grid();
    let k = game.regions();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<(String, Vec<usize>)> = (0..n_probes)
        .map(|_| {
            let idx: Vec<usize> = (0..k).map(|r| rng.gen_range(0..grid.values(r).len())).collect();
            let label = format!("grid:{}", idx.iter().map(usize::to_string).collect::<Vec<_>>().join("-"));
            (label, idx)
        })
        .collect();

    let narrow = (0..k).find(|&r| grid.u_max()[r] - grid.u_min()[r] < 2.0 * h);
    let outcomes: Vec<std::result::Result<HessianProbe, SkippedProbe>> = candidates
        .into_par_iter()
        .map(|(label, idx)| {
            if let Some(r) = narrow {
                return Ok(Err(SkippedProbe {
                    label,
                    reason: format!("action interval of region {} is narrower than 2h", r + 1),
                }));
            }
            let base = grid.profile(&idx);
            let pulled: Vec<f64> = (0..k)
                .map(|r| base[r].clamp(grid.u_min()[r] + h, grid.u_max()[r] - h))
                .collect();
            let profile = ActionProfile::new(pulled)?;
            let (own, margins) = hessian_rows(game, &profile, h)?;
            Ok(Ok(HessianProbe {
                label,
                profile,
                own,
                margins,
            }))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut probes = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(p) => probes.push(p),
            Err(s) => skipped.push(s),
        }
    }
    let per_region_min: Vec<f64> = (0..k)
        .map(|r| probes.iter().map(|p| p.margins[r]).fold(f64::INFINITY, f64::min))
        .map(|m| if m.is_finite() { m } else { 0.0 })
        .collect();
    let min_margin = if probes.is_empty() {
        0.0
    } else {
        per_region_min.iter().copied().fold(f64::INFINITY, f64::min)
    };
    Ok(DominanceReport {
        h,
        seed,
        supported: !probes.is_empty() && min_margin > DOMINANCE_TOL,
        min_margin,
        per_region_min,
        probes,
        skipped,
    })
}

/// `gamma_k (beta^-1)_kk ln(s_k(T, u) / s0_k) / (1 - u_k)^2`.
///
/// This is the partial derivative of `i_k(T)` in `u_k` read off the first
/// integral with `s(T)` held fixed.
pub fn analytic_di_du(game: &Game, u: &ActionProfile, k: usize) -> Result<f64> {
    let spec = game.spec();
    let p = &spec.epidemic;
    let inverse = p.beta_matrix().try_inverse().ok_or(Error::Singular)?;
    let s = sir::final_state(p, u, spec.horizon, spec.step)?.s[k];
    let damp = 1.0 - u[k];
    Ok(p.gamma()[k] * inverse[(k, k)] * (s / p.s0()[k]).ln() / (damp * damp))
}
