use super::{final_state, ActionProfile, EpidemicParams};
use crate::{Error, Result};

/// Default perturbation for first-order central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Central-difference estimate of `d s_k(T, u) / d u_l`.
pub fn sensitivity_fd(
    params: &EpidemicParams,
    u: &ActionProfile,
    horizon: f64,
    step: f64,
    k: usize,
    l: usize,
    h: f64,
) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::invalid("h", format!("perturbation must be > 0, got {h}")));
    }
    let plus = u[l] + h;
    let minus = u[l] - h;
    for value in [plus, minus] {
        if !(0.0..1.0).contains(&value) {
            return Err(Error::OutOfRange {
                region: l,
                value,
                lo: 0.0,
                hi: 1.0,
            });
        }
    }
    let up = final_state(params, &u.with(l, plus)?, horizon, step)?;
    let down = final_state(params, &u.with(l, minus)?, horizon, step)?;
    Ok((up.s[k] - down.s[k]) / (2.0 * h))
}

/// Claimed lower bound on `d s_k / d u_k`:
///
/// ```text
/// s_k ln(s_k / s0_k) / ((1 - u_k) [(1 - u_k) rho_kk s_k - 1])
/// ```
///
/// evaluated at `s_k = s_k(T, u)`. Only meaningful while the bracket is
/// negative; otherwise [`Error::ConditionViolated`] is returned.
///
/// This is the derivative through the first integral with `i_k(T)` frozen.
/// It bounds the true derivative only once `i(T)` is negligible; at a horizon
/// where the epidemic is still running it can exceed it.
pub fn own_sensitivity_bound(params: &EpidemicParams, u: &ActionProfile, horizon: f64, step: f64, k: usize) -> Result<f64> {
    let s = final_state(params, u, horizon, step)?.s[k];
    let damp = 1.0 - u[k];
    let denominator = damp * (damp * params.rho(k, k) * s - 1.0);
    if !(denominator < 0.0) {
        return Err(Error::ConditionViolated { region: k, denominator });
    }
    Ok(s * (s / params.s0()[k]).ln() / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coupled() -> EpidemicParams {
        EpidemicParams::new(
            vec![vec![0.3, 0.01], vec![0.02, 0.2]],
            vec![0.15, 0.15],
            vec![0.9, 0.95],
            vec![0.05, 0.001],
        )
        .unwrap()
    }

    #[test]
    fn no_cross_influence_when_decoupled() {
        let p = coupled().decoupled();
        let u = ActionProfile::new(vec![0.3, 0.4]).unwrap();
        let d = sensitivity_fd(&p, &u, 30.0, 0.05, 0, 1, 1e-4).unwrap();
        assert!(d.abs() <= 1e-9, "{d}");
    }

    #[test]
    fn zero_when_disease_free() {
        let p = EpidemicParams::new(
            vec![vec![0.3, 0.01], vec![0.02, 0.2]],
            vec![0.15, 0.15],
            vec![0.9, 0.95],
            vec![0.0, 0.0],
        )
        .unwrap();
        let u = ActionProfile::new(vec![0.6, 0.6]).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert_eq!(sensitivity_fd(&p, &u, 30.0, 0.05, k, l, 1e-4).unwrap(), 0.0);
            }
            assert_eq!(own_sensitivity_bound(&p, &u, 30.0, 0.05, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn perturbation_must_stay_in_range() {
        let p = coupled();
        let u = ActionProfile::new(vec![0.0, 0.4]).unwrap();
        assert!(matches!(
            sensitivity_fd(&p, &u, 30.0, 0.05, 0, 0, 1e-4),
            Err(Error::OutOfRange { region: 0, .. })
        ));
        assert!(sensitivity_fd(&p, &u, 30.0, 0.05, 0, 0, -1e-4).is_err());
    }

    #[test]
    fn bound_refuses_when_bracket_is_nonnegative() {
        // rho_11 = 20 makes (1 - u) rho s - 1 clearly positive
        let p = EpidemicParams::new(vec![vec![3.0]], vec![0.15], vec![0.9], vec![0.0]).unwrap();
        let u = ActionProfile::new(vec![0.0]).unwrap();
        assert!(matches!(
            own_sensitivity_bound(&p, &u, 30.0, 0.05, 0),
            Err(Error::ConditionViolated { region: 0, .. })
        ));
    }
}
