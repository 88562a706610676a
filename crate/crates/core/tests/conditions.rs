mod common;

use approx::assert_abs_diff_eq;

use common::{profile, table1_game, table1_spec, U_MIN};
use epigame::cli::CrossRates;
use epigame::conditions::{
    analytic_di_du, check_regularity, check_curvature, check_diagonal_dominance, cross_partial, cross_partial_nested, evaluate,
    nu_beta, own_second_derivative, quasiconvexity_scan, wir_flags, ConditionOptions, DEFAULT_HESSIAN_STEP,
};
use epigame::game::{CostParams, Game, GameSpec, ProbeConfig, ProbeSet};
use epigame::sir::{self, EpidemicParams};
use epigame::Error;

fn with_i0(spec: &GameSpec, i0: Vec<f64>) -> GameSpec {
    let p = &spec.epidemic;
    let epidemic = EpidemicParams::new(p.beta_rows(), p.gamma().to_vec(), p.s0().to_vec(), i0).unwrap();
    spec.with_epidemic(epidemic).unwrap()
}

#[test]
fn thresholds_follow_the_closed_form() {
    let spec = table1_spec(CrossRates::Zero);
    let nu = nu_beta(&spec);
    assert_abs_diff_eq!(nu.values[0], 0.0046875, epsilon = 1e-15);
    assert_abs_diff_eq!(nu.values[4], (0.15 / 0.81 - 0.15) / 4.0, epsilon = 1e-15);
    assert!((nu.values[4] - 8.796e-3).abs() < 1e-6);
    for (k, diag) in [0.45, 0.30, 0.225, 0.18, 0.15].into_iter().enumerate() {
        let expected = (0.15 / ((1.0 - U_MIN[k]) * spec.epidemic.s0()[k]) - diag) / 4.0;
        assert_abs_diff_eq!(nu.values[k], expected, epsilon = 1e-15);
    }
    assert!(nu.unattainable.iter().all(|&x| !x));
}

#[test]
fn threshold_hits_zero_at_the_boundary_rate() {
    let spec = table1_spec(CrossRates::Zero);
    let mut beta = spec.epidemic.beta_rows();
    beta[0][0] = 0.15 / (0.4 * 0.8);
    let spec = spec.with_epidemic(spec.epidemic.with_beta(beta).unwrap()).unwrap();
    let nu = nu_beta(&spec);
    assert!(nu.values[0].abs() < 1e-15);
}

#[test]
fn rates_at_threshold_are_inside_the_regime() {
    let spec = table1_spec(CrossRates::NuBeta);
    let flags = wir_flags(&spec, &nu_beta(&spec));
    assert!(flags.iter().flatten().all(|&f| f));
    let above = table1_spec(CrossRates::Uniform(0.0101));
    assert!(!wir_flags(&above, &nu_beta(&above))[0][1]);
}

#[test]
fn static_condition_on_the_diagonal_scenario() {
    let game = table1_game(CrossRates::Zero);
    let probes = ProbeSet::new(game.grid(), ProbeConfig::default());
    let report = check_regularity(&game, &probes).unwrap();
    assert_abs_diff_eq!(report.condition_iii.static_margins[0], 1.0 / 3.0 - 0.32, epsilon = 1e-12);
    assert!(report.condition_iii.static_passed);
    assert!(report.passed());
}

#[test]
fn zero_row_breaks_the_dominance_condition() {
    let spec = table1_spec(CrossRates::Zero);
    let mut beta = spec.epidemic.beta_rows();
    beta[2] = vec![0.0; 5];
    let spec = spec.with_epidemic(spec.epidemic.with_beta(beta).unwrap()).unwrap();
    let game = Game::new(spec);
    let probes = ProbeSet::new(game.grid(), ProbeConfig::default());
    let report = check_regularity(&game, &probes).unwrap();
    assert!(!report.condition_i.passed);
    assert_eq!(report.condition_i.determinant, 0.0);
    assert!(matches!(analytic_di_du(&game, &profile(&U_MIN), 0), Err(Error::Singular)));
}

#[test]
fn disease_free_positivity_margin_is_the_smallest_s0() {
    let game = Game::new(with_i0(&table1_spec(CrossRates::NuBeta), vec![0.0; 5]));
    let probes = ProbeSet::new(game.grid(), ProbeConfig::default());
    let report = check_regularity(&game, &probes).unwrap();
    assert!(report.condition_ii.passed);
    assert_eq!(report.condition_ii.min_susceptible, 0.8);
}

#[test]
fn curvature_margins_without_infection() {
    let game = Game::new(with_i0(&table1_spec(CrossRates::NuBeta), vec![0.0; 5]));
    let report = check_curvature(&game, &[2]).unwrap();
    assert_abs_diff_eq!(report.margins[0].margin, 0.65 * 0.9 - 1.0 / 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(report.margins[0].margin, 0.2517, epsilon = 1e-4);
}

#[test]
fn curvature_margins_on_the_builtin_scenario() {
    let game = table1_game(CrossRates::NuBeta);
    let report = check_curvature(&game, &[2, 3, 4]).unwrap();
    assert!(report.holds);
    assert!(report.margins.iter().all(|m| m.margin >= 0.0));
    let full = evaluate(&game, &ConditionOptions::default()).unwrap();
    assert!(full.wir_certified);
    assert!(full.cross_rates_within_nu);
    for q in &full.quasiconvexity {
        assert!(q.quasi_convex, "region {} violation {}", q.region, q.worst_violation);
    }
}

#[test]
fn stressed_cross_rates_are_scanned_without_error() {
    let base = table1_spec(CrossRates::Zero);
    let nu = nu_beta(&base);
    let beta: Vec<Vec<f64>> = (0..5)
        .map(|r| (0..5).map(|c| if r == c { base.epidemic.beta(r, r) } else { 10.0 * nu.values[r] }).collect())
        .collect();
    let game = Game::new(base.with_epidemic(base.epidemic.with_beta(beta).unwrap()).unwrap());
    let report = evaluate(&game, &ConditionOptions::default()).unwrap();
    assert!(!report.cross_rates_within_nu);
    for k in 0..5 {
        quasiconvexity_scan(&game, k, &report.probes).unwrap();
    }
}

#[test]
fn quadratic_cost_has_curvature_two() {
    let spec = table1_spec(CrossRates::NuBeta);
    let mut costs = spec.costs.clone();
    costs.a[3] = 0.0;
    costs.b[3] = 1.0;
    costs.c[3] = 0.0;
    let mut spec = spec;
    spec.costs = CostParams::new(costs.a, costs.b, costs.c).unwrap();
    let game = Game::new(spec);
    let u = profile(&[0.7, 0.6, 0.5, 0.5, 0.5]);
    let d2 = own_second_derivative(&game, 3, &u, DEFAULT_HESSIAN_STEP).unwrap();
    assert_abs_diff_eq!(d2, 2.0, epsilon = 1e-3);
}

#[test]
fn decoupled_region_4_is_diagonally_dominant() {
    let game = table1_game(CrossRates::Zero);
    let u = profile(&[0.7, 0.6, 0.5, 0.5, 0.5]);
    let h = DEFAULT_HESSIAN_STEP;
    let own = own_second_derivative(&game, 3, &u, h).unwrap();
    let off: f64 = [0, 1, 2, 4].iter().map(|&l| cross_partial(&game, 3, l, &u, h).unwrap().abs()).sum();
    assert!(off < 1e-6, "{off}");
    assert!(own >= 10.0, "{own}");
    let report = check_diagonal_dominance(&game, h, 6, 5).unwrap();
    assert!(report.per_region_min[3] > 0.0);
    // Linear regions have no curvature to dominate with.
    assert!(report.per_region_min[0].abs() <= 1e-6);
    assert!(!report.supported);
}

#[test]
fn mixed_partial_stencils_agree() {
    let game = table1_game(CrossRates::NuBeta);
    let u = profile(&[0.7, 0.6, 0.5, 0.4, 0.3]);
    let h = DEFAULT_HESSIAN_STEP;
    for (k, l) in [(2, 3), (3, 2), (4, 2), (2, 0)] {
        let a = cross_partial(&game, k, l, &u, h).unwrap();
        let b = cross_partial_nested(&game, k, l, &u, h).unwrap();
        assert!((a - b).abs() <= (0.05 * a.abs()).max(1e-6), "({k},{l}): {a} vs {b}");
    }
}

// `analytic_di_du` differentiates i_k(T) through the first integral with
// s_k(T) frozen. For a decoupled region the integral gives i in closed form,
// i = x0 - s + ln(s / s0) / ((1 - u) rho), so its u-derivative at frozen s is
// an exact oracle.
#[test]
fn di_du_matches_the_frozen_susceptible_derivative() {
    let game = table1_game(CrossRates::Zero);
    let spec = game.spec();
    let p = &spec.epidemic;
    for k in 0..5 {
        for uk in [U_MIN[k], 0.75, 0.9] {
            let u = profile(&U_MIN).with(k, uk).unwrap();
            let s = sir::final_state(p, &u, 30.0, spec.step).unwrap().s[k];
            let rho = p.rho(k, k);
            let i_at = |v: f64| p.x0()[k] - s + (s / p.s0()[k]).ln() / ((1.0 - v) * rho);
            let h = 1e-5;
            let oracle = (i_at(uk + h) - i_at(uk - h)) / (2.0 * h);
            let analytic = analytic_di_du(&game, &u, k).unwrap();
            assert!(analytic < 0.0);
            assert!((analytic - oracle).abs() <= 1e-6 * oracle.abs(), "k {k} u {uk}: {analytic} vs {oracle}");
        }
    }
}

#[test]
fn di_du_is_zero_without_infection() {
    let game = Game::new(with_i0(&table1_spec(CrossRates::NuBeta), vec![0.0; 5]));
    for k in 0..5 {
        assert_eq!(analytic_di_du(&game, &profile(&U_MIN), k).unwrap(), 0.0);
    }
}
