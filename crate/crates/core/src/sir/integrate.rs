use super::{ActionProfile, EpidemicParams, FinalState, Trajectory};
use crate::{Error, Result};

/// Default integration step in days.
pub const DEFAULT_STEP: f64 = 0.05;

/// Number of full steps and the length of a trailing partial step, if any.
///
/// A ratio `T / step` within 1e-9 (relative) of an integer counts as exact so
/// that e.g. `30 / 0.05` yields 600 steps rather than 599 plus a sliver.
pub fn step_count(horizon: f64, step: f64) -> (usize, Option<f64>) {
    let ratio = horizon / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        (nearest as usize, None)
    } else {
        let full = ratio.floor();
        (full as usize, Some(horizon - full * step))
    }
}

fn check_inputs(params: &EpidemicParams, u: &ActionProfile, horizon: f64, step: f64) -> Result<()> {
    if u.len() != params.regions() {
        return Err(Error::Dimension {
            field: "u".into(),
            expected: params.regions(),
            found: u.len(),
        });
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid("horizon", format!("T must be finite and > 0, got {horizon}")));
    }
    if !(step.is_finite() && step > 0.0 && step <= horizon) {
        return Err(Error::invalid("step", format!("step must lie in (0, T], got {step}")));
    }
    Ok(())
}

/// Classical RK4 over the packed state `[s; i; r]`.
struct Stepper<'a> {
    k: usize,
    beta: &'a [f64],
    gamma: &'a [f64],
    damp: Vec<f64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(params: &'a EpidemicParams, u: &ActionProfile) -> Self {
        let k = params.regions();
        Self {
            k,
            beta: params.beta_flat(),
            gamma: params.gamma(),
            damp: u.as_slice().iter().map(|x| 1.0 - x).collect(),
            k1: vec![0.0; 3 * k],
            k2: vec![0.0; 3 * k],
            k3: vec![0.0; 3 * k],
            k4: vec![0.0; 3 * k],
            tmp: vec![0.0; 3 * k],
        }
    }

    #[inline]
    fn rhs(k: usize, beta: &[f64], gamma: &[f64], damp: &[f64], y: &[f64], dy: &mut [f64]) {
        let (s, rest) = y.split_at(k);
        let i = &rest[..k];
        for r in 0..k {
            let row = &beta[r * k..(r + 1) * k];
            let force: f64 = row.iter().zip(i).map(|(b, x)| b * x).sum();
            let incidence = s[r] * damp[r] * force;
            let recovery = gamma[r] * i[r];
            dy[r] = -incidence;
            dy[k + r] = incidence - recovery;
            dy[2 * k + r] = recovery;
        }
    }

    fn advance(&mut self, y: &mut [f64], h: f64) {
        let (k, beta, gamma) = (self.k, self.beta, self.gamma);
        let damp = &self.damp;
        Self::rhs(k, beta, gamma, damp, y, &mut self.k1);
        for (t, (y, d)) in self.tmp.iter_mut().zip(y.iter().zip(&self.k1)) {
            *t = y + 0.5 * h * d;
        }
        Self::rhs(k, beta, gamma, damp, &self.tmp, &mut self.k2);
        for (t, (y, d)) in self.tmp.iter_mut().zip(y.iter().zip(&self.k2)) {
            *t = y + 0.5 * h * d;
        }
        Self::rhs(k, beta, gamma, damp, &self.tmp, &mut self.k3);
        for (t, (y, d)) in self.tmp.iter_mut().zip(y.iter().zip(&self.k3)) {
            *t = y + h * d;
        }
        Self::rhs(k, beta, gamma, damp, &self.tmp, &mut self.k4);
        for (j, y) in y.iter_mut().enumerate() {
            *y += h / 6.0 * (self.k1[j] + 2.0 * self.k2[j] + 2.0 * self.k3[j] + self.k4[j]);
        }
    }
}

fn check_finite(y: &[f64], k: usize, time: f64) -> Result<()> {
    match y.iter().position(|x| !x.is_finite()) {
        Some(idx) => Err(Error::IntegrationDiverged { time, region: idx % k }),
        None => Ok(()),
    }
}

/// Runs the fixed-step scheme, calling `visit(t, y)` at `t = 0` and after
/// every step. The last visited time is `horizon` exactly.
fn drive(
    params: &EpidemicParams,
    u: &ActionProfile,
    horizon: f64,
    step: f64,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<Vec<f64>> {
    check_inputs(params, u, horizon, step)?;
    let k = params.regions();
    let mut y = Vec::with_capacity(3 * k);
    y.extend_from_slice(params.s0());
    y.extend_from_slice(params.i0());
    y.extend(params.x0().iter().map(|x| 1.0 - x));
    visit(0.0, &y);

    let (full, partial) = step_count(horizon, step);
    let mut stepper = Stepper::new(params, u);
    for n in 1..=full {
        stepper.advance(&mut y, step);
        let t = if n == full && partial.is_none() { horizon } else { n as f64 * step };
        check_finite(&y, k, t)?;
        visit(t, &y);
    }
    if let Some(h) = partial {
        stepper.advance(&mut y, h);
        check_finite(&y, k, horizon)?;
        visit(horizon, &y);
    }
    Ok(y)
}

/// Integrates the controlled dynamics on `[0, T]`, storing every step.
pub fn integrate(params: &EpidemicParams, u: &ActionProfile, horizon: f64, step: f64) -> Result<Trajectory> {
    check_inputs(params, u, horizon, step)?;
    let k = params.regions();
    let (full, partial) = step_count(horizon, step);
    let rows = full + 1 + usize::from(partial.is_some());
    let mut traj = Trajectory {
        times: Vec::with_capacity(rows),
        s: Vec::with_capacity(rows),
        i: Vec::with_capacity(rows),
        r: Vec::with_capacity(rows),
    };
    drive(params, u, horizon, step, |t, y| {
        traj.times.push(t);
        traj.s.push(y[..k].to_vec());
        traj.i.push(y[k..2 * k].to_vec());
        traj.r.push(y[2 * k..].to_vec());
    })?;
    Ok(traj)
}

/// `(s(T), i(T), r(T))`, bit-identical to the last row of [`integrate`].
pub fn final_state(params: &EpidemicParams, u: &ActionProfile, horizon: f64, step: f64) -> Result<FinalState> {
    let k = params.regions();
    let y = drive(params, u, horizon, step, |_, _| {})?;
    Ok(FinalState {
        s: y[..k].to_vec(),
        i: y[k..2 * k].to_vec(),
        r: y[2 * k..].to_vec(),
    })
}

/// Largest violation of the first integral
/// `F_k = (1 - u_k) sum_l rho[k][l] (s_l + i_l - x0_l) + ln(s0_k / s_k)`
/// over all stored times and regions. Zero for the exact flow.
pub fn conservation_residual(params: &EpidemicParams, u: &ActionProfile, traj: &Trajectory) -> Result<f64> {
    let k = params.regions();
    let x0 = params.x0();
    let s0 = params.s0();
    let mut worst = 0.0_f64;
    for (row, &t) in traj.times.iter().enumerate() {
        let (s, i) = (&traj.s[row], &traj.i[row]);
        for r in 0..k {
            if !(s[r] > 0.0) {
                return Err(Error::Domain {
                    time: t,
                    region: r,
                    value: s[r],
                });
            }
            let coupling: f64 = (0..k).map(|l| params.rho(r, l) * (s[l] + i[l] - x0[l])).sum();
            let f = (1.0 - u[r]) * coupling + (s0[r] / s[r]).ln();
            worst = worst.max(f.abs());
        }
    }
    Ok(worst)
}
