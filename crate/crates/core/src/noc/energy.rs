use serde::{Deserialize, Serialize};

use super::SimError;

/// Per-bit link energies by tree level plus a per-arrival filter cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    /// Index 0 = leaf links (level 1), last = root links.
    pub link_energy_per_bit: Vec<f64>,
    pub filter_energy_per_lookup: f64,
}

pub const DEFAULT_LEAF_LINK_ENERGY: f64 = 1.0;
pub const DEFAULT_LEVEL_RATIO: f64 = 4.0;
pub const DEFAULT_FILTER_ENERGY: f64 = 8.0;

impl EnergyModel {
    /// Leaf links cost 1.0/bit and each level up costs 4x more; a filter
    /// lookup costs 8.0.
    pub fn default_for(levels: usize) -> Self {
        Self::geometric(levels, DEFAULT_LEAF_LINK_ENERGY, DEFAULT_LEVEL_RATIO, DEFAULT_FILTER_ENERGY)
    }

    pub fn geometric(levels: usize, leaf: f64, ratio: f64, filter: f64) -> Self {
        Self {
            link_energy_per_bit: (0..levels).map(|l| leaf * ratio.powi(l as i32)).collect(),
            filter_energy_per_lookup: filter,
        }
    }

    pub fn validate(&self, levels: usize) -> Result<(), SimError> {
        let e = &self.link_energy_per_bit;
        if e.len() != levels {
            return Err(SimError::InvalidEnergy(format!(
                "{} link energies given for {levels} levels",
                e.len()
            )));
        }
        if e.iter().chain([&self.filter_energy_per_lookup]).any(|&x| !x.is_finite() || x < 0.0) {
            return Err(SimError::InvalidEnergy("energies must be finite and nonnegative".into()));
        }
        if e.last() < e.first() {
            return Err(SimError::InvalidEnergy(
                "root-level link energy must be at least the leaf-level link energy".into(),
            ));
        }
        Ok(())
    }

    /// Energy per bit on a link of `level` (1-based).
    pub fn link_energy(&self, level: usize) -> f64 {
        self.link_energy_per_bit[level - 1]
    }
}
