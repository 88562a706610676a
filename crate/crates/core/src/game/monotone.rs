use serde::Serialize;

use super::{Game, ProbeSet};
use crate::Result;

/// Consecutive differences below this are ties, not trends.
pub const MONOTONICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Constant,
    Increasing,
    Decreasing,
    NonMonotone,
    /// Monotone at every probe, but not in the same direction everywhere.
    Mixed,
}

/// Trend of a sequence sampled on an increasing grid.
pub fn classify(values: &[f64], tol: f64) -> Direction {
    let mut up = false;
    let mut down = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        up |= d > tol;
        down |= d < -tol;
    }
    match (up, down) {
        (true, true) => Direction::NonMonotone,
        (true, false) => Direction::Increasing,
        (false, true) => Direction::Decreasing,
        (false, false) => Direction::Constant,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlayerMonotonicity {
    /// 1-based region label.
    pub region: usize,
    pub direction: Direction,
    /// One verdict per probe, in probe order.
    pub per_probe: Vec<Direction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonMonotoneReport {
    /// 0-based indices of non-monotone players, serialized as 1-based
    /// `regions`.
    #[serde(rename = "regions", serialize_with = "one_based")]
    pub set: Vec<usize>,
    pub players: Vec<PlayerMonotonicity>,
    pub probes: ProbeSet,
}

fn one_based<S: serde::Serializer>(set: &[usize], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(set.iter().map(|k| k + 1))
}

impl NonMonotoneReport {
    /// 1-based labels of the non-monotone players.
    pub fn labels(&self) -> Vec<usize> {
        self.set.iter().map(|k| k + 1).collect()
    }
}

fn aggregate(per_probe: &[Direction]) -> Direction {
    if per_probe.contains(&Direction::NonMonotone) {
        return Direction::NonMonotone;
    }
    let up = per_probe.contains(&Direction::Increasing);
    let down = per_probe.contains(&Direction::Decreasing);
    match (up, down) {
        (true, true) => Direction::Mixed,
        (true, false) => Direction::Increasing,
        (false, true) => Direction::Decreasing,
        (false, false) => Direction::Constant,
    }
}

pub(super) fn detect(game: &Game, probes: &ProbeSet) -> Result<NonMonotoneReport> {
    let mut players = Vec::with_capacity(game.regions());
    for k in 0..game.regions() {
        let per_probe = probes
            .iter()
            .map(|p| Ok(classify(&game.own_cost_curve(k, &p.profile)?, MONOTONICITY_TOL)))
            .collect::<Result<Vec<_>>>()?;
        players.push(PlayerMonotonicity {
            region: k + 1,
            direction: aggregate(&per_probe),
            per_probe,
        });
    }
    let set = players
        .iter()
        .enumerate()
        .filter(|(_, p)| p.direction == Direction::NonMonotone)
        .map(|(k, _)| k)
        .collect();
    Ok(NonMonotoneReport {
        set,
        players,
        probes: probes.clone(),
    })
}
