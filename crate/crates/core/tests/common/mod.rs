//! Shared fixtures and an independent reference integrator for the
//! integration tests.
#![allow(dead_code)]

use epigame::cli::{table1, CrossRates};
use epigame::game::{Game, GameSpec};
use epigame::sir::{ActionProfile, EpidemicParams};

pub const FINE_STEP: f64 = 1e-4;

/// Fixed-step RK4 on the reduced state `(s, i)` with explicit loops and a
/// hand-written right-hand side. Returns `(s(T), i(T))`.
pub fn reference_final(
    beta: &[Vec<f64>],
    gamma: &[f64],
    s0: &[f64],
    i0: &[f64],
    u: &[f64],
    horizon: f64,
    step: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = gamma.len();
    let rhs = |s: &[f64], i: &[f64], ds: &mut [f64], di: &mut [f64]| {
        for k in 0..n {
            let mut force = 0.0;
            for l in 0..n {
                force += beta[k][l] * i[l];
            }
            let infections = s[k] * (1.0 - u[k]) * force;
            ds[k] = -infections;
            di[k] = infections - gamma[k] * i[k];
        }
    };
    let mut s = s0.to_vec();
    let mut i = i0.to_vec();
    let mut t = 0.0;
    let mut ks = vec![vec![0.0; n]; 4];
    let mut ki = vec![vec![0.0; n]; 4];
    let mut ts = vec![0.0; n];
    let mut ti = vec![0.0; n];
    while t < horizon - 1e-12 {
        let h = step.min(horizon - t);
        for stage in 0..4 {
            let scale = match stage {
                0 => 0.0,
                1 | 2 => 0.5 * h,
                _ => h,
            };
            for k in 0..n {
                let (ps, pi) = if stage == 0 { (0.0, 0.0) } else { (ks[stage - 1][k], ki[stage - 1][k]) };
                ts[k] = s[k] + scale * ps;
                ti[k] = i[k] + scale * pi;
            }
            let (a, b) = (&mut ks[stage], &mut ki[stage]);
            rhs(&ts, &ti, a, b);
        }
        for k in 0..n {
            s[k] += h / 6.0 * (ks[0][k] + 2.0 * ks[1][k] + 2.0 * ks[2][k] + ks[3][k]);
            i[k] += h / 6.0 * (ki[0][k] + 2.0 * ki[1][k] + 2.0 * ki[2][k] + ki[3][k]);
        }
        t += h;
    }
    (s, i)
}

pub fn reference_for(params: &EpidemicParams, u: &ActionProfile, horizon: f64) -> (Vec<f64>, Vec<f64>) {
    reference_final(
        &params.beta_rows(),
        params.gamma(),
        params.s0(),
        params.i0(),
        u.as_slice(),
        horizon,
        FINE_STEP,
    )
}

pub fn table1_spec(cross: CrossRates) -> GameSpec {
    table1(cross).spec
}

pub fn table1_game(cross: CrossRates) -> Game {
    Game::new(table1_spec(cross))
}

pub fn profile(values: &[f64]) -> ActionProfile {
    ActionProfile::new(values.to_vec()).unwrap()
}

pub const U_MIN: [f64; 5] = [0.6, 0.51, 0.35, 0.2, 0.1];
