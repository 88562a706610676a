//! Controlled networked SIR dynamics.
//!
//! Region `k` evolves as
//!
//! ```text
//! ds_k/dt = -s_k (1 - u_k) sum_l beta[k][l] i_l
//! di_k/dt = -ds_k/dt - gamma_k i_k
//! dr_k/dt = gamma_k i_k
//! ```
//!
//! where `beta[k][l]` is the rate at which infected of region `l` infect the
//! susceptibles of region `k`.

mod cache;
mod integrate;
mod sensitivity;

use std::hash::{Hash, Hasher};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use cache::{CacheKey, FinalStateCache};
pub use integrate::{conservation_residual, final_state, integrate, step_count, DEFAULT_STEP};
pub use sensitivity::{own_sensitivity_bound, sensitivity_fd, DEFAULT_FD_STEP};

/// Epidemic parameters for `K` coupled regions.
#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicParams {
    k: usize,
    // row-major K x K, beta[k * K + l]
    beta: Vec<f64>,
    gamma: Vec<f64>,
    s0: Vec<f64>,
    i0: Vec<f64>,
    rho: Vec<f64>,
    x0: Vec<f64>,
}

impl EpidemicParams {
    pub fn new(beta: Vec<Vec<f64>>, gamma: Vec<f64>, s0: Vec<f64>, i0: Vec<f64>) -> Result<Self> {
        let k = gamma.len();
        if k == 0 {
            return Err(Error::invalid("epidemic.gamma", "at least one region is required"));
        }
        if beta.len() != k {
            return Err(Error::Dimension {
                field: "epidemic.beta".into(),
                expected: k,
                found: beta.len(),
            });
        }
        for (row_idx, row) in beta.iter().enumerate() {
            if row.len() != k {
                return Err(Error::Dimension {
                    field: format!("epidemic.beta[{row_idx}]"),
                    expected: k,
                    found: row.len(),
                });
            }
        }
        for (name, v) in [("epidemic.s0", &s0), ("epidemic.i0", &i0)] {
            if v.len() != k {
                return Err(Error::Dimension {
                    field: name.into(),
                    expected: k,
                    found: v.len(),
                });
            }
        }
        for (r, row) in beta.iter().enumerate() {
            for (c, &b) in row.iter().enumerate() {
                if !b.is_finite() || b < 0.0 {
                    return Err(Error::invalid(
                        format!("epidemic.beta[{r}][{c}]"),
                        format!("must be finite and >= 0, got {b}"),
                    ));
                }
            }
        }
        for (idx, &g) in gamma.iter().enumerate() {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::invalid(
                    format!("epidemic.gamma[{idx}]"),
                    format!("must be finite and > 0, got {g}"),
                ));
            }
        }
        for idx in 0..k {
            let (s, i) = (s0[idx], i0[idx]);
            if !s.is_finite() || s <= 0.0 {
                return Err(Error::invalid(
                    format!("epidemic.s0[{idx}]"),
                    format!("must be finite and > 0, got {s}"),
                ));
            }
            if !i.is_finite() || i < 0.0 {
                return Err(Error::invalid(
                    format!("epidemic.i0[{idx}]"),
                    format!("must be finite and >= 0, got {i}"),
                ));
            }
            if s + i > 1.0 {
                return Err(Error::invalid(
                    format!("epidemic.s0[{idx}]"),
                    format!("s0 + i0 = {} exceeds 1", s + i),
                ));
            }
        }

        let beta: Vec<f64> = beta.into_iter().flatten().collect();
        let rho = (0..k * k).map(|idx| beta[idx] / gamma[idx % k]).collect();
        let x0 = s0.iter().zip(&i0).map(|(s, i)| s + i).collect();
        Ok(Self {
            k,
            beta,
            gamma,
            s0,
            i0,
            rho,
            x0,
        })
    }

    pub fn regions(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn beta(&self, k: usize, l: usize) -> f64 {
        self.beta[k * self.k + l]
    }

    pub fn beta_rows(&self) -> Vec<Vec<f64>> {
        self.beta.chunks(self.k).map(<[f64]>::to_vec).collect()
    }

    pub fn beta_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.k, self.k, &self.beta)
    }

    pub(crate) fn beta_flat(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn s0(&self) -> &[f64] {
        &self.s0
    }

    pub fn i0(&self) -> &[f64] {
        &self.i0
    }

    /// `rho[k][l] = beta[k][l] / gamma[l]`.
    #[inline]
    pub fn rho(&self, k: usize, l: usize) -> f64 {
        self.rho[k * self.k + l]
    }

    /// `x0[k] = s0[k] + i0[k]`.
    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    /// Copy with every cross rate `beta[k][l]`, `k != l`, set to zero.
    pub fn decoupled(&self) -> Self {
        let beta = (0..self.k)
            .map(|r| (0..self.k).map(|c| if r == c { self.beta(r, c) } else { 0.0 }).collect())
            .collect();
        Self::new(beta, self.gamma.clone(), self.s0.clone(), self.i0.clone())
            .expect("zeroing cross rates preserves validity")
    }

    /// Single-region system made of region `k` alone.
    pub fn isolate(&self, k: usize) -> Self {
        Self::new(
            vec![vec![self.beta(k, k)]],
            vec![self.gamma[k]],
            vec![self.s0[k]],
            vec![self.i0[k]],
        )
        .expect("a region of a valid system is valid on its own")
    }

    /// Copy with a replaced transmission matrix, revalidated.
    pub fn with_beta(&self, beta: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(beta, self.gamma.clone(), self.s0.clone(), self.i0.clone())
    }

    /// Stable 64-bit digest of every field, used for memo keys.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.k.hash(&mut h);
        for v in [&self.beta, &self.gamma, &self.s0, &self.i0] {
            for x in v.iter() {
                x.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Constant social-distancing profile, one intensity in `[0, 1)` per region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionProfile(Vec<f64>);

impl ActionProfile {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        for (k, &x) in u.iter().enumerate() {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::OutOfRange {
                    region: k,
                    value: x,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
        }
        Ok(Self(u))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Same profile with region `k` playing `value`.
    pub fn with(&self, k: usize, value: f64) -> Result<Self> {
        let mut u = self.0.clone();
        u[k] = value;
        Self::new(u)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for ActionProfile {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

/// Stored solution: one row per integration step, `t = 0` through `t = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub s: Vec<Vec<f64>>,
    pub i: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> FinalState {
        let last = self.times.len() - 1;
        FinalState {
            s: self.s[last].clone(),
            i: self.i[last].clone(),
            r: self.r[last].clone(),
        }
    }

    /// `max_t i_k(t)`.
    pub fn peak_infected(&self, k: usize) -> f64 {
        self.i.iter().map(|row| row[k]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_susceptible(&self) -> f64 {
        self.s.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Compartments at `t = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalState {
    pub s: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
}
