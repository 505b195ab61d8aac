use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AddressError, TreeConfig};

/// Multicast addressing scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Flat bit string: one bit per core.
    Fbs,
    /// Ternary {0,1,*} string over the binary core index.
    Symbol,
    /// Hierarchical bit string: one k-bit child mask per tree level.
    Hbs,
    /// Unicast-based multicast: one packet per destination.
    Unicast,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Fbs, Scheme::Symbol, Scheme::Hbs, Scheme::Unicast];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Fbs => "fbs",
            Scheme::Symbol => "symbol",
            Scheme::Hbs => "hbs",
            Scheme::Unicast => "unicast",
        }
    }

    /// Region-based schemes may cover cores that are not destinations.
    pub fn is_exact(&self) -> bool {
        matches!(self, Scheme::Fbs | Scheme::Unicast)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = AddressError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fbs" => Ok(Scheme::Fbs),
            "symbol" => Ok(Scheme::Symbol),
            "hbs" => Ok(Scheme::Hbs),
            "unicast" => Ok(Scheme::Unicast),
            other => Err(AddressError::UnknownScheme(other.to_string())),
        }
    }
}

/// Nonempty set of destination core indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DestinationSet(BTreeSet<usize>);

impl DestinationSet {
    /// Duplicate indices collapse. Fails on an empty input.
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Result<Self, AddressError> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if set.is_empty() {
            return Err(AddressError::EmptyDestinationSet);
        }
        Ok(Self(set))
    }

    /// Like [`DestinationSet::new`] but also range-checks against `cfg`.
    pub fn within<I: IntoIterator<Item = usize>>(
        cfg: &TreeConfig,
        members: I,
    ) -> Result<Self, AddressError> {
        let set = Self::new(members)?;
        set.check(cfg)?;
        Ok(set)
    }

    pub fn check(&self, cfg: &TreeConfig) -> Result<(), AddressError> {
        let n = cfg.core_count();
        match self.0.iter().next_back() {
            Some(&max) if max >= n => Err(AddressError::CoreOutOfRange { index: max, cores: n }),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, core: usize) -> bool {
        self.0.contains(&core)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &DestinationSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn as_set(&self) -> &BTreeSet<usize> {
        &self.0
    }
}

impl fmt::Display for DestinationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// One position of a symbol-based address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Star,
}

impl Symbol {
    pub fn matches(&self, bit: bool) -> bool {
        match self {
            Symbol::Zero => !bit,
            Symbol::One => bit,
            Symbol::Star => true,
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Star => '*',
        }
    }
}

/// N-bit mask; bit i set iff core i is a destination.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FbsAddress {
    mask: BitVec<u64, Lsb0>,
}

impl FbsAddress {
    pub fn from_mask(mask: BitVec<u64, Lsb0>) -> Self {
        Self { mask }
    }

    pub fn mask(&self) -> &BitSlice<u64, Lsb0> {
        &self.mask
    }
}

/// Ternary string over the binary core index, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymbolAddress {
    symbols: Vec<Symbol>,
}

impl SymbolAddress {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Self { symbols }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Cyclic left rotation by `n` symbols.
    pub fn rotated(&self, n: usize) -> Self {
        let mut symbols = self.symbols.clone();
        if !symbols.is_empty() {
            let n = n % symbols.len();
            symbols.rotate_left(n);
        }
        Self { symbols }
    }

    /// (fixed-bit mask, fixed-bit values) over the index, bit 0 = LSB.
    pub(crate) fn fixed_bits(&self) -> (usize, usize) {
        let width = self.symbols.len();
        let mut fixed = 0usize;
        let mut value = 0usize;
        for (i, s) in self.symbols.iter().enumerate() {
            let bit = 1usize << (width - 1 - i);
            match s {
                Symbol::Zero => fixed |= bit,
                Symbol::One => {
                    fixed |= bit;
                    value |= bit;
                }
                Symbol::Star => {}
            }
        }
        (fixed, value)
    }
}

/// One k-bit child mask per level, root level first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HbsAddress {
    masks: Vec<u64>,
}

impl HbsAddress {
    pub fn new(masks: Vec<u64>) -> Self {
        Self { masks }
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Moves the head mask to the tail, so the next level's mask becomes
    /// the head. Applying it `levels` times restores the address.
    pub fn rotated(&self) -> Self {
        let mut masks = self.masks.clone();
        if !masks.is_empty() {
            masks.rotate_left(1);
        }
        Self { masks }
    }
}

/// Scheme-tagged routing field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MulticastAddress {
    Fbs(FbsAddress),
    Symbol(SymbolAddress),
    Hbs(HbsAddress),
    UnicastList(Vec<usize>),
}

impl MulticastAddress {
    pub fn scheme(&self) -> Scheme {
        match self {
            MulticastAddress::Fbs(_) => Scheme::Fbs,
            MulticastAddress::Symbol(_) => Scheme::Symbol,
            MulticastAddress::Hbs(_) => Scheme::Hbs,
            MulticastAddress::UnicastList(_) => Scheme::Unicast,
        }
    }

    /// Checks the structural invariants of the address against `cfg`.
    pub fn validate(&self, cfg: &TreeConfig) -> Result<(), AddressError> {
        let n = cfg.core_count();
        match self {
            MulticastAddress::Fbs(a) => {
                if a.mask.len() != n {
                    return Err(AddressError::Malformed(format!(
                        "FBS mask has {} bits, expected {n}",
                        a.mask.len()
                    )));
                }
                if a.mask.not_any() {
                    return Err(AddressError::Malformed("FBS mask is zero".into()));
                }
            }
            MulticastAddress::Symbol(a) => {
                let bits = symbol_width(cfg)?;
                if a.symbols.len() != bits {
                    return Err(AddressError::Malformed(format!(
                        "symbol string has {} symbols, expected {bits}",
                        a.symbols.len()
                    )));
                }
            }
            MulticastAddress::Hbs(a) => {
                if a.masks.len() != cfg.levels() {
                    return Err(AddressError::Malformed(format!(
                        "HBS address has {} masks, expected {}",
                        a.masks.len(),
                        cfg.levels()
                    )));
                }
                let limit = level_mask_limit(cfg.fan_out());
                for (level, &m) in a.masks.iter().enumerate() {
                    if m == 0 {
                        return Err(AddressError::Malformed(format!(
                            "HBS mask at level {level} is zero"
                        )));
                    }
                    if m & !limit != 0 {
                        return Err(AddressError::Malformed(format!(
                            "HBS mask at level {level} is wider than {} bits",
                            cfg.fan_out()
                        )));
                    }
                }
            }
            MulticastAddress::UnicastList(targets) => {
                if targets.is_empty() {
                    return Err(AddressError::Malformed("unicast list is empty".into()));
                }
                let mut seen = BTreeSet::new();
                for &t in targets {
                    if t >= n {
                        return Err(AddressError::CoreOutOfRange { index: t, cores: n });
                    }
                    if !seen.insert(t) {
                        return Err(AddressError::Malformed(format!(
                            "unicast list repeats core {t}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// All-ones mask of width `k`.
pub(crate) fn level_mask_limit(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Symbol count for `cfg`, or an error when N is not a power of two.
pub(crate) fn symbol_width(cfg: &TreeConfig) -> Result<usize, AddressError> {
    cfg.index_bits()
        .ok_or(AddressError::SymbolRequiresPowerOfTwo { cores: cfg.core_count() })
}
