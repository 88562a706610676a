use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::ActionGrid;
use crate::sir::ActionProfile;

/// How many extra probe profiles to draw beyond `u_min` and `u_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeConfig {
    /// Random grid corners (every coordinate at its min or max).
    pub corners: usize,
    /// Random grid points.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            corners: 4,
            samples: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub label: String,
    pub profile: ActionProfile,
}

/// Grid profiles at which "for all u" conditions are sampled. Always starts
/// with `u_min` then `u_max`; duplicates are dropped.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbeSet {
    probes: Vec<Probe>,
}

impl ProbeSet {
    pub fn new(grid: &ActionGrid, config: ProbeConfig) -> Self {
        let k = grid.regions();
        let mut set = Self { probes: Vec::new() };
        set.push("u_min".into(), grid.min_profile());
        set.push("u_max".into(), grid.max_profile());

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let corner_count = 1usize.checked_shl(k as u32).unwrap_or(usize::MAX).saturating_sub(2);
        let mut drawn = 0;
        let mut attempts = 0;
        while drawn < config.corners.min(corner_count) && attempts < 64 * (config.corners + 1) {
            attempts += 1;
            let bits: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
            let idx: Vec<usize> = bits
                .iter()
                .enumerate()
                .map(|(r, &high)| if high { grid.values(r).len() - 1 } else { 0 })
                .collect();
            let label = format!("corner:{}", bits.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>());
            if set.push(label, grid.profile(&idx)) {
                drawn += 1;
            }
        }
        for _ in 0..config.samples {
            let idx: Vec<usize> = (0..k).map(|r| rng.gen_range(0..grid.values(r).len())).collect();
            let label = format!(
                "grid:{}",
                idx.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
            );
            set.push(label, grid.profile(&idx));
        }
        set
    }

    fn push(&mut self, label: String, profile: ActionProfile) -> bool {
        if self.probes.iter().any(|p| p.profile == profile) {
            return false;
        }
        self.probes.push(Probe { label, profile });
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = &Probe> {
        self.probes.iter()
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
}
