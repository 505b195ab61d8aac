use serde::{Deserialize, Serialize};

use super::AddressError;

/// Shape of a uniform k-ary tree: `fan_out` children per switch, `levels`
/// switch levels, and `fan_out^levels` cores at the leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeConfig {
    fan_out: u32,
    levels: u32,
}

impl TreeConfig {
    /// Level masks are stored in a `u64`.
    pub const MAX_FAN_OUT: u32 = 64;
    /// Upper bound on leaves, keeps FBS masks and simulation state reasonable.
    pub const MAX_CORES: usize = 1 << 24;

    pub fn new(fan_out: u32, levels: u32) -> Result<Self, AddressError> {
        if !(2..=Self::MAX_FAN_OUT).contains(&fan_out) {
            return Err(AddressError::InvalidTree(format!(
                "fan_out must be in [2, {}], got {fan_out}",
                Self::MAX_FAN_OUT
            )));
        }
        if levels == 0 {
            return Err(AddressError::InvalidTree("levels must be >= 1".into()));
        }
        match (fan_out as usize).checked_pow(levels) {
            Some(n) if n <= Self::MAX_CORES => Ok(Self { fan_out, levels }),
            _ => Err(AddressError::InvalidTree(format!(
                "{fan_out}^{levels} cores exceeds the supported maximum of {}",
                Self::MAX_CORES
            ))),
        }
    }

    /// Builds the tree with `core_count` leaves and the given fan-out.
    /// `core_count` must be an exact power of `fan_out`.
    pub fn with_core_count(fan_out: u32, core_count: usize) -> Result<Self, AddressError> {
        let mut levels = 0;
        let mut n = 1usize;
        while n < core_count {
            n = n.saturating_mul(fan_out as usize);
            levels += 1;
        }
        if n != core_count || levels == 0 {
            return Err(AddressError::InvalidTree(format!(
                "{core_count} cores is not a positive power of fan_out {fan_out}"
            )));
        }
        Self::new(fan_out, levels)
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out as usize
    }

    pub fn levels(&self) -> usize {
        self.levels as usize
    }

    pub fn core_count(&self) -> usize {
        self.fan_out().pow(self.levels)
    }

    /// `log2 N` when the core count is a power of two.
    pub fn index_bits(&self) -> Option<usize> {
        let n = self.core_count();
        n.is_power_of_two().then(|| n.trailing_zeros() as usize)
    }

    /// `log2 k` when the fan-out is a power of two.
    pub fn bits_per_level(&self) -> Option<usize> {
        let k = self.fan_out();
        k.is_power_of_two().then(|| k.trailing_zeros() as usize)
    }

    /// Number of leaves below a node at `height` (0 = core, `levels` = root).
    pub fn subtree_size(&self, height: usize) -> usize {
        self.fan_out().pow(height as u32)
    }

    pub fn path_of(&self, index: usize) -> Result<CorePath, AddressError> {
        path_of(index, self)
    }

    pub fn index_of(&self, path: &CorePath) -> Result<usize, AddressError> {
        index_of(path, self)
    }

    /// Height of the lowest common ancestor of two cores (0 when equal).
    pub fn lca_height(&self, a: usize, b: usize) -> usize {
        let k = self.fan_out();
        let (mut a, mut b, mut h) = (a, b, 0);
        while a != b {
            a /= k;
            b /= k;
            h += 1;
        }
        h
    }
}

/// Base-k digits of a core index, root-level digit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorePath {
    digits: Vec<usize>,
}

impl CorePath {
    pub fn new(digits: Vec<usize>) -> Self {
        Self { digits }
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

pub fn path_of(index: usize, cfg: &TreeConfig) -> Result<CorePath, AddressError> {
    let n = cfg.core_count();
    if index >= n {
        return Err(AddressError::CoreOutOfRange { index, cores: n });
    }
    let k = cfg.fan_out();
    let mut digits = vec![0; cfg.levels()];
    let mut rest = index;
    for slot in digits.iter_mut().rev() {
        *slot = rest % k;
        rest /= k;
    }
    Ok(CorePath { digits })
}

pub fn index_of(path: &CorePath, cfg: &TreeConfig) -> Result<usize, AddressError> {
    if path.digits.len() != cfg.levels() {
        return Err(AddressError::Malformed(format!(
            "path has {} digits, tree has {} levels",
            path.digits.len(),
            cfg.levels()
        )));
    }
    let k = cfg.fan_out();
    path.digits.iter().try_fold(0usize, |acc, &d| {
        if d >= k {
            Err(AddressError::Malformed(format!("digit {d} out of range for fan_out {k}")))
        } else {
            Ok(acc * k + d)
        }
    })
}
