//! Per-region costs and the strategic-form game built on top of them.
//!
//! Region `k` pays
//!
//! ```text
//! J_k(u) = a_k u_k + b_k u_k^2 + c_k (s0_k - s_k(T, u))
//! ```
//!
//! where `s_k(T, u)` comes from the coupled dynamics. The decoupled cost
//! `J~_k(u_k)` is the same expression evaluated on region `k` alone, with
//! every incoming cross rate set to zero.

mod monotone;
mod probes;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::sir::{self, ActionProfile, EpidemicParams, FinalState, FinalStateCache, Trajectory};
use crate::{Error, Result};

pub use monotone::{classify, Direction, NonMonotoneReport, PlayerMonotonicity, MONOTONICITY_TOL};
pub use probes::{Probe, ProbeConfig, ProbeSet};

/// Linear, quadratic and health weights per region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl CostParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        for (name, v) in [("costs.a", &a), ("costs.b", &b), ("costs.c", &c)] {
            for (k, &x) in v.iter().enumerate() {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::invalid(format!("{name}[{k}]"), format!("must be finite and >= 0, got {x}")));
                }
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn regions(&self) -> usize {
        self.a.len()
    }

    #[inline]
    pub fn socio_economic(&self, k: usize, uk: f64) -> f64 {
        self.a[k] * uk + self.b[k] * uk * uk
    }
}

/// Uniform per-region action grids from `u_min[k]` to `u_max[k]` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGrid {
    u_min: Vec<f64>,
    u_max: Vec<f64>,
    n_points: usize,
    values: Vec<Vec<f64>>,
}

impl ActionGrid {
    pub const DEFAULT_POINTS: usize = 11;

    /// A region with `u_min == u_max` gets a single-point grid regardless of
    /// `n_points`.
    pub fn new(u_min: Vec<f64>, u_max: Vec<f64>, n_points: usize) -> Result<Self> {
        if u_min.len() != u_max.len() {
            return Err(Error::Dimension {
                field: "actions.u_max".into(),
                expected: u_min.len(),
                found: u_max.len(),
            });
        }
        for (k, (&lo, &hi)) in u_min.iter().zip(&u_max).enumerate() {
            if !(0.0..1.0).contains(&lo) {
                return Err(Error::invalid(format!("actions.u_min[{k}]"), format!("must lie in [0, 1), got {lo}")));
            }
            if !(0.0..1.0).contains(&hi) {
                return Err(Error::invalid(format!("actions.u_max[{k}]"), format!("must lie in [0, 1), got {hi}")));
            }
            if lo > hi {
                return Err(Error::invalid(format!("actions.u_max[{k}]"), format!("{hi} is below u_min = {lo}")));
            }
            if lo < hi && n_points < 2 {
                return Err(Error::invalid("actions.n_points", "a non-degenerate interval needs at least 2 points"));
            }
        }
        let values = u_min
            .iter()
            .zip(&u_max)
            .map(|(&lo, &hi)| {
                if lo == hi {
                    return vec![lo];
                }
                let last = n_points - 1;
                (0..n_points)
                    .map(|j| if j == last { hi } else { lo + (hi - lo) * j as f64 / last as f64 })
                    .collect()
            })
            .collect();
        Ok(Self {
            u_min,
            u_max,
            n_points,
            values,
        })
    }

    pub fn regions(&self) -> usize {
        self.u_min.len()
    }

    pub fn u_min(&self) -> &[f64] {
        &self.u_min
    }

    pub fn u_max(&self) -> &[f64] {
        &self.u_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.values.iter().map(Vec::len).collect()
    }

    /// Same bounds, different cardinality.
    pub fn with_points(&self, n_points: usize) -> Result<Self> {
        Self::new(self.u_min.clone(), self.u_max.clone(), n_points)
    }

    pub fn min_profile(&self) -> ActionProfile {
        ActionProfile::new(self.u_min.clone()).expect("bounds validated")
    }

    pub fn max_profile(&self) -> ActionProfile {
        ActionProfile::new(self.u_max.clone()).expect("bounds validated")
    }

    /// Profile picking `values(k)[idx[k]]` for every region.
    pub fn profile(&self, idx: &[usize]) -> ActionProfile {
        ActionProfile::new(idx.iter().enumerate().map(|(k, &j)| self.values[k][j]).collect()).expect("grid values validated")
    }

    /// Grid index of `value` for region `k`, if it is a grid point (to 1e-12).
    pub fn index_of(&self, k: usize, value: f64) -> Option<usize> {
        self.values[k].iter().position(|&v| (v - value).abs() <= 1e-12)
    }

    pub fn contains(&self, u: &ActionProfile) -> bool {
        u.len() == self.regions() && (0..self.regions()).all(|k| self.index_of(k, u[k]).is_some())
    }
}

/// Everything needed to define the game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub epidemic: EpidemicParams,
    pub costs: CostParams,
    pub actions: ActionGrid,
    /// Horizon `T` in days.
    pub horizon: f64,
    /// Integration step in days.
    pub step: f64,
}

impl GameSpec {
    pub fn new(epidemic: EpidemicParams, costs: CostParams, actions: ActionGrid, horizon: f64, step: f64) -> Result<Self> {
        let k = epidemic.regions();
        if k < 2 {
            return Err(Error::invalid("epidemic.K", format!("a game needs at least 2 regions, got {k}")));
        }
        for (field, found) in [
            ("costs.a", costs.a.len()),
            ("costs.b", costs.b.len()),
            ("costs.c", costs.c.len()),
            ("actions.u_min", actions.regions()),
        ] {
            if found != k {
                return Err(Error::Dimension {
                    field: field.into(),
                    expected: k,
                    found,
                });
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid("horizon.T_days", format!("must be finite and > 0, got {horizon}")));
        }
        if !(step.is_finite() && step > 0.0 && step <= horizon) {
            return Err(Error::invalid("horizon.step_days", format!("must lie in (0, T], got {step}")));
        }
        Ok(Self {
            epidemic,
            costs,
            actions,
            horizon,
            step,
        })
    }

    pub fn regions(&self) -> usize {
        self.epidemic.regions()
    }

    pub fn with_epidemic(&self, epidemic: EpidemicParams) -> Result<Self> {
        Self::new(epidemic, self.costs.clone(), self.actions.clone(), self.horizon, self.step)
    }

    pub fn with_actions(&self, actions: ActionGrid) -> Result<Self> {
        Self::new(self.epidemic.clone(), self.costs.clone(), actions, self.horizon, self.step)
    }

    pub fn with_step(&self, step: f64) -> Result<Self> {
        Self::new(self.epidemic.clone(), self.costs.clone(), self.actions.clone(), self.horizon, step)
    }
}

/// A [`GameSpec`] paired with a final-state memo shared by every evaluation.
#[derive(Debug)]
pub struct Game {
    spec: GameSpec,
    isolated: Vec<EpidemicParams>,
    cache: Arc<FinalStateCache>,
}

impl Game {
    pub fn new(spec: GameSpec) -> Self {
        Self::with_cache(spec, Arc::new(FinalStateCache::new()))
    }

    pub fn with_cache(spec: GameSpec, cache: Arc<FinalStateCache>) -> Self {
        let isolated = (0..spec.regions()).map(|k| spec.epidemic.isolate(k)).collect();
        Self { spec, isolated, cache }
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn regions(&self) -> usize {
        self.spec.regions()
    }

    pub fn grid(&self) -> &ActionGrid {
        &self.spec.actions
    }

    pub fn cache(&self) -> &FinalStateCache {
        &self.cache
    }

    /// Integrations performed so far through this game's memo.
    pub fn solves(&self) -> usize {
        self.cache.solves()
    }

    fn check_in_range(&self, u: &ActionProfile) -> Result<()> {
        let k = self.regions();
        if u.len() != k {
            return Err(Error::Dimension {
                field: "u".into(),
                expected: k,
                found: u.len(),
            });
        }
        let grid = self.grid();
        for r in 0..k {
            let (lo, hi) = (grid.u_min()[r], grid.u_max()[r]);
            if u[r] < lo - 1e-12 || u[r] > hi + 1e-12 {
                return Err(Error::OutOfRange {
                    region: r,
                    value: u[r],
                    lo,
                    hi,
                });
            }
        }
        Ok(())
    }

    /// Memoized `(s(T), i(T), r(T))` for profile `u`.
    pub fn final_state(&self, u: &ActionProfile) -> Result<Arc<FinalState>> {
        self.cache.get_or_solve(&self.spec.epidemic, u, self.spec.horizon, self.spec.step)
    }

    pub fn trajectory(&self, u: &ActionProfile) -> Result<Trajectory> {
        sir::integrate(&self.spec.epidemic, u, self.spec.horizon, self.spec.step)
    }

    /// `J_k(u)` for every region from a single solve.
    pub fn cost(&self, u: &ActionProfile) -> Result<Vec<f64>> {
        self.check_in_range(u)?;
        let state = self.final_state(u)?;
        let (costs, s0) = (&self.spec.costs, self.spec.epidemic.s0());
        Ok((0..self.regions())
            .map(|k| costs.socio_economic(k, u[k]) + costs.c[k] * (s0[k] - state.s[k]))
            .collect())
    }

    pub fn social_cost(&self, u: &ActionProfile) -> Result<f64> {
        Ok(self.cost(u)?.iter().sum())
    }

    /// `J~_k(u_k)`: region `k`'s cost when all of its incoming cross rates vanish.
    pub fn decoupled_cost(&self, k: usize, uk: f64) -> Result<f64> {
        let grid = self.grid();
        let (lo, hi) = (grid.u_min()[k], grid.u_max()[k]);
        if uk < lo - 1e-12 || uk > hi + 1e-12 {
            return Err(Error::OutOfRange {
                region: k,
                value: uk,
                lo,
                hi,
            });
        }
        let costs = &self.spec.costs;
        let socio = costs.socio_economic(k, uk);
        if costs.c[k] == 0.0 {
            return Ok(socio);
        }
        let alone = &self.isolated[k];
        let state = self
            .cache
            .get_or_solve(alone, &ActionProfile::new(vec![uk])?, self.spec.horizon, self.spec.step)?;
        Ok(socio + costs.c[k] * (alone.s0()[0] - state.s[0]))
    }

    /// `J_k(v, u_{-k})` for every grid value `v` of region `k`.
    pub fn own_cost_curve(&self, k: usize, u: &ActionProfile) -> Result<Vec<f64>> {
        self.grid()
            .values(k)
            .iter()
            .map(|&v| Ok(self.cost(&u.with(k, v)?)?[k]))
            .collect()
    }

    /// Regions whose own-action cost curve is non-monotone at some probe.
    pub fn detect_nonmonotone(&self, probes: &ProbeSet) -> Result<NonMonotoneReport> {
        monotone::detect(self, probes)
    }
}
