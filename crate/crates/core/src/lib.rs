//! Strategic-form epidemic control game played over a networked SIR model.
//!
//! Each region picks a constant social-distancing intensity `u_k` for one
//! working phase `[0, T]` and pays a socio-economic cost plus a health cost
//! proportional to its final epidemic size. The crate integrates the coupled
//! dynamics, enumerates pure Nash equilibria and the social optimum on a
//! discretized action space, computes the price of anarchy and the price of
//! connectedness, and numerically checks the sufficient conditions for
//! existence and uniqueness of the equilibrium.
//!
//! Module map:
//! - [`sir`]: integrator, memoized final states, conservation residual,
//!   finite-difference sensitivities.
//! - [`game`]: cost model, action grids, non-monotone player detection.
//! - [`equilibrium`]: exhaustive NE search, social optimum, best-response
//!   dynamics, PoA and PoC.
//! - [`conditions`]: threshold and regime checks.
//! - [`cli`]: scenario files, built-in scenario, CSV/JSON emitters, sweeps.

pub mod cli;
pub mod conditions;
pub mod equilibrium;
mod error;
pub mod game;
pub mod sir;

pub use error::{Error, Result};
