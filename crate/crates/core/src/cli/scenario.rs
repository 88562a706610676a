use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conditions::nu_beta;
use crate::game::{ActionGrid, CostParams, GameSpec};
use crate::sir::{EpidemicParams, DEFAULT_STEP};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicSection {
    #[serde(rename = "K")]
    pub k: usize,
    /// Row `k` holds the rates at which each region infects region `k`.
    pub beta: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub s0: Vec<f64>,
    pub i0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

fn default_points() -> usize {
    ActionGrid::DEFAULT_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSection {
    pub u_min: Vec<f64>,
    pub u_max: Vec<f64>,
    #[serde(default = "default_points")]
    pub n_points: usize,
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSection {
    #[serde(rename = "T_days")]
    pub t_days: f64,
    #[serde(default = "default_step")]
    pub step_days: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VariedRegions {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedMode {
    #[serde(rename = "nu_beta")]
    NuBeta,
}

/// Source of the cross rates that stay fixed while one region's incoming
/// rates are swept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FixedCrossRates {
    Mode(FixedMode),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// 1-based region label(s); every region when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varied_region: Option<VariedRegions>,
    pub cross_rate_values: Vec<f64>,
    #[serde(default = "default_fixed")]
    pub fixed_cross_rate_mode: FixedCrossRates,
}

fn default_fixed() -> FixedCrossRates {
    FixedCrossRates::Mode(FixedMode::NuBeta)
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub epidemic: EpidemicSection,
    pub costs: CostSection,
    pub actions: ActionSection,
    pub horizon: HorizonSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// 0-based indices of the regions whose incoming rates are varied.
    pub varied: Vec<usize>,
    pub rates: Vec<f64>,
    pub fixed: FixedCrossRates,
}

impl SweepPlan {
    /// The 13 rates `0, 1e-3, ..., 1.2e-2` over every region, others at threshold.
    pub fn default_for(regions: usize) -> Self {
        Self {
            varied: (0..regions).collect(),
            rates: (0..=12).map(|j| j as f64 / 1000.0).collect(),
            fixed: FixedCrossRates::Mode(FixedMode::NuBeta),
        }
    }

    /// Game for one sweep point: every rate into `varied` is `rate`, every
    /// other cross rate comes from the fixed source.
    pub fn point(&self, base: &GameSpec, varied: usize, rate: f64) -> Result<GameSpec> {
        let k = base.regions();
        let fixed: Vec<Vec<f64>> = match &self.fixed {
            FixedCrossRates::Mode(FixedMode::NuBeta) => {
                let nu = nu_beta(base);
                let fixed_rows = (0..k).filter(|&r| r != varied);
                if let Some(r) = fixed_rows.clone().find(|&r| nu.unattainable[r]) {
                    return Err(Error::invalid(
                        "sweep.fixed_cross_rate_mode",
                        format!("threshold of region {} is unattainable (nu = {})", r + 1, nu.values[r]),
                    ));
                }
                (0..k).map(|r| vec![nu.values[r]; k]).collect()
            }
            FixedCrossRates::Matrix(m) => m.clone(),
        };
        let beta = (0..k)
            .map(|r| {
                (0..k)
                    .map(|c| match (r == c, r == varied) {
                        (true, _) => base.epidemic.beta(r, c),
                        (false, true) => rate,
                        (false, false) => fixed[r][c],
                    })
                    .collect()
            })
            .collect();
        base.with_epidemic(base.epidemic.with_beta(beta)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub spec: GameSpec,
    pub sweep: Option<SweepPlan>,
}

fn expect_len(field: &str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::Dimension {
            field: field.into(),
            expected,
            found,
        });
    }
    Ok(())
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let k = self.epidemic.k;
        if k < 2 {
            return Err(Error::invalid("epidemic.K", format!("must be >= 2, got {k}")));
        }
        expect_len("epidemic.beta", self.epidemic.beta.len(), k)?;
        for (r, row) in self.epidemic.beta.iter().enumerate() {
            expect_len(&format!("epidemic.beta[{r}]"), row.len(), k)?;
        }
        expect_len("epidemic.gamma", self.epidemic.gamma.len(), k)?;
        expect_len("epidemic.s0", self.epidemic.s0.len(), k)?;
        expect_len("epidemic.i0", self.epidemic.i0.len(), k)?;
        expect_len("costs.a", self.costs.a.len(), k)?;
        expect_len("costs.b", self.costs.b.len(), k)?;
        expect_len("costs.c", self.costs.c.len(), k)?;
        expect_len("actions.u_min", self.actions.u_min.len(), k)?;
        expect_len("actions.u_max", self.actions.u_max.len(), k)?;

        let epidemic = EpidemicParams::new(self.epidemic.beta, self.epidemic.gamma, self.epidemic.s0, self.epidemic.i0)?;
        let costs = CostParams::new(self.costs.a, self.costs.b, self.costs.c)?;
        let actions = ActionGrid::new(self.actions.u_min, self.actions.u_max, self.actions.n_points)?;
        let spec = GameSpec::new(epidemic, costs, actions, self.horizon.t_days, self.horizon.step_days)?;

        let sweep = self.sweep.map(|s| -> Result<SweepPlan> {
            let varied = match s.varied_region {
                None => (0..k).collect(),
                Some(VariedRegions::One(r)) => vec![r],
                Some(VariedRegions::Many(rs)) => rs,
            };
            let varied = varied
                .into_iter()
                .map(|r| {
                    if (1..=k).contains(&r) {
                        Ok(r - 1)
                    } else {
                        Err(Error::invalid("sweep.varied_region", format!("{r} is not a region label in 1..={k}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            for (j, &v) in s.cross_rate_values.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("sweep.cross_rate_values[{j}]"), format!("must be >= 0, got {v}")));
                }
            }
            if let FixedCrossRates::Matrix(m) = &s.fixed_cross_rate_mode {
                expect_len("sweep.fixed_cross_rate_mode", m.len(), k)?;
                for (r, row) in m.iter().enumerate() {
                    expect_len(&format!("sweep.fixed_cross_rate_mode[{r}]"), row.len(), k)?;
                    if let Some(c) = row.iter().position(|x| !x.is_finite() || *x < 0.0) {
                        return Err(Error::invalid(format!("sweep.fixed_cross_rate_mode[{r}][{c}]"), "must be >= 0"));
                    }
                }
            }
            Ok(SweepPlan {
                varied,
                rates: s.cross_rate_values,
                fixed: s.fixed_cross_rate_mode,
            })
        });
        Ok(Scenario {
            spec,
            sweep: sweep.transpose()?,
        })
    }

    pub fn from_spec(spec: &GameSpec, sweep: Option<&SweepPlan>) -> Self {
        let p = &spec.epidemic;
        Self {
            epidemic: EpidemicSection {
                k: p.regions(),
                beta: p.beta_rows(),
                gamma: p.gamma().to_vec(),
                s0: p.s0().to_vec(),
                i0: p.i0().to_vec(),
            },
            costs: CostSection {
                a: spec.costs.a.clone(),
                b: spec.costs.b.clone(),
                c: spec.costs.c.clone(),
            },
            actions: ActionSection {
                u_min: spec.actions.u_min().to_vec(),
                u_max: spec.actions.u_max().to_vec(),
                n_points: spec.actions.n_points(),
            },
            horizon: HorizonSection {
                t_days: spec.horizon,
                step_days: spec.step,
            },
            sweep: sweep.map(|s| SweepSection {
                varied_region: Some(VariedRegions::Many(s.varied.iter().map(|k| k + 1).collect())),
                cross_rate_values: s.rates.clone(),
                fixed_cross_rate_mode: s.fixed.clone(),
            }),
        }
    }
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str::<ScenarioFile>(text)?.into_scenario()
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn emit_scenario(scenario: &Scenario) -> String {
    let file = ScenarioFile::from_spec(&scenario.spec, scenario.sweep.as_ref());
    let mut text = serde_json::to_string_pretty(&file).expect("scenario serializes");
    text.push('\n');
    text
}

/// Cross rates used when building the built-in scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossRates {
    /// Diagonal transmission matrix.
    Zero,
    /// Every rate into region `k` at its threshold `nu_k`.
    NuBeta,
    /// The same rate on every off-diagonal entry.
    Uniform(f64),
}

/// Five-region scenario: recovery 0.15/day everywhere, regions 1-2 weigh only
/// socio-economic losses, regions 3-5 trade them off against health.
pub fn table1(cross: CrossRates) -> Scenario {
    let k = 5;
    let diag = [0.45, 0.30, 0.225, 0.18, 0.15];
    let diagonal_beta = |off: &dyn Fn(usize) -> f64| -> Vec<Vec<f64>> {
        (0..k)
            .map(|r| (0..k).map(|c| if r == c { diag[r] } else { off(r) }).collect())
            .collect()
    };
    let epidemic = EpidemicParams::new(
        diagonal_beta(&|_| 0.0),
        vec![0.15; k],
        vec![0.8, 0.9, 0.9, 0.9, 0.9],
        vec![0.2, 0.1, 0.005, 0.002, 0.001],
    )
    .expect("built-in epidemic parameters are valid");
    let costs = CostParams::new(
        vec![2.0, 0.5, 5.0, 2.0, 3.0],
        vec![0.0, 0.0, 2.0, 5.0, 5.0],
        vec![0.0, 0.0, 50.0, 70.0, 70.0],
    )
    .expect("built-in cost weights are valid");
    let actions = ActionGrid::new(vec![0.6, 0.51, 0.35, 0.2, 0.1], vec![0.9; k], ActionGrid::DEFAULT_POINTS)
        .expect("built-in action bounds are valid");
    let base = GameSpec::new(epidemic, costs, actions, 30.0, DEFAULT_STEP).expect("built-in scenario is consistent");

    let beta = match cross {
        CrossRates::Zero => None,
        CrossRates::NuBeta => {
            let nu = nu_beta(&base);
            Some(diagonal_beta(&|r| nu.values[r]))
        }
        CrossRates::Uniform(v) => Some(diagonal_beta(&|_| v)),
    };
    let spec = match beta {
        None => base,
        Some(beta) => base
            .with_epidemic(base.epidemic.with_beta(beta).expect("cross rates must be finite and >= 0"))
            .expect("dimensions unchanged"),
    };
    Scenario {
        sweep: Some(SweepPlan::default_for(k)),
        spec,
    }
}
