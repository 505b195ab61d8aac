//! Encoders from destination sets to minimal covering addresses, and the
//! matching decoder back to covered core sets.

use bitvec::prelude::*;
use serde::Serialize;

use super::address::{level_mask_limit, symbol_width};
use super::{
    AddressError, DestinationSet, FbsAddress, HbsAddress, MulticastAddress, Scheme, Symbol,
    SymbolAddress, TreeConfig,
};

pub fn encode_fbs(dests: &DestinationSet, cfg: &TreeConfig) -> Result<FbsAddress, AddressError> {
    dests.check(cfg)?;
    let mut mask = bitvec![u64, Lsb0; 0; cfg.core_count()];
    for c in dests.iter() {
        mask.set(c, true);
    }
    Ok(FbsAddress::from_mask(mask))
}

/// Per index bit: the agreed value if every destination agrees, else `*`.
pub fn encode_symbol(
    dests: &DestinationSet,
    cfg: &TreeConfig,
) -> Result<SymbolAddress, AddressError> {
    let width = symbol_width(cfg)?;
    dests.check(cfg)?;
    let all = dests.iter().fold(usize::MAX, |acc, c| acc & c);
    let any = dests.iter().fold(0usize, |acc, c| acc | c);
    let symbols = (0..width)
        .map(|i| {
            let bit = 1usize << (width - 1 - i);
            match (all & bit != 0, any & bit != 0) {
                (true, _) => Symbol::One,
                (false, false) => Symbol::Zero,
                (false, true) => Symbol::Star,
            }
        })
        .collect();
    Ok(SymbolAddress::new(symbols))
}

/// Level mask = union of that level's digit over all destination paths.
pub fn encode_hbs(dests: &DestinationSet, cfg: &TreeConfig) -> Result<HbsAddress, AddressError> {
    dests.check(cfg)?;
    let k = cfg.fan_out();
    let levels = cfg.levels();
    let mut masks = vec![0u64; levels];
    for c in dests.iter() {
        let mut rest = c;
        for slot in masks.iter_mut().rev() {
            *slot |= 1u64 << (rest % k);
            rest /= k;
        }
    }
    Ok(HbsAddress::new(masks))
}

/// Destinations in ascending core order.
pub fn encode_unicast(dests: &DestinationSet) -> Vec<usize> {
    dests.iter().collect()
}

pub fn encode(
    scheme: Scheme,
    dests: &DestinationSet,
    cfg: &TreeConfig,
) -> Result<MulticastAddress, AddressError> {
    Ok(match scheme {
        Scheme::Fbs => MulticastAddress::Fbs(encode_fbs(dests, cfg)?),
        Scheme::Symbol => MulticastAddress::Symbol(encode_symbol(dests, cfg)?),
        Scheme::Hbs => MulticastAddress::Hbs(encode_hbs(dests, cfg)?),
        Scheme::Unicast => {
            dests.check(cfg)?;
            MulticastAddress::UnicastList(encode_unicast(dests))
        }
    })
}

pub fn covered_set(
    addr: &MulticastAddress,
    cfg: &TreeConfig,
) -> Result<DestinationSet, AddressError> {
    addr.validate(cfg)?;
    let cores: Vec<usize> = match addr {
        MulticastAddress::Fbs(a) => a.mask().iter_ones().collect(),
        MulticastAddress::Symbol(a) => symbol_cover(a),
        MulticastAddress::Hbs(a) => hbs_cover(a, cfg),
        MulticastAddress::UnicastList(t) => t.clone(),
    };
    DestinationSet::new(cores)
}

fn symbol_cover(addr: &SymbolAddress) -> Vec<usize> {
    let width = addr.symbols().len();
    let (fixed, value) = addr.fixed_bits();
    let free = ((1usize << width) - 1) & !fixed;
    // Walk the submasks of the wildcard bits.
    let mut out = Vec::with_capacity(1 << free.count_ones());
    let mut sub = free;
    loop {
        out.push(value | sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    out.reverse();
    out
}

fn hbs_cover(addr: &HbsAddress, cfg: &TreeConfig) -> Vec<usize> {
    let k = cfg.fan_out();
    let digit_sets: Vec<Vec<usize>> = addr
        .masks()
        .iter()
        .map(|&m| (0..k).filter(|&d| m >> d & 1 == 1).collect())
        .collect();
    let mut out = vec![0usize];
    for digits in &digit_sets {
        out = out
            .iter()
            .flat_map(|&prefix| digits.iter().map(move |&d| prefix * k + d))
            .collect();
    }
    out
}

/// Cores that receive `addr` but are not in `dests`.
pub fn overcoverage(
    addr: &MulticastAddress,
    dests: &DestinationSet,
    cfg: &TreeConfig,
) -> Result<usize, AddressError> {
    let cover = covered_set(addr, cfg)?;
    if !dests.is_subset(&cover) {
        return Err(AddressError::CoverMissesDestinations);
    }
    Ok(cover.len() - dests.len())
}

pub fn rotate_hbs(addr: &HbsAddress) -> HbsAddress {
    addr.rotated()
}

/// Per-packet routing field width of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoutingBitWidth {
    pub scheme: Scheme,
    pub bits: usize,
}

/// Unicast packets carry one index of `ceil(log2 N)` bits.
pub fn routing_bit_width(scheme: Scheme, cfg: &TreeConfig) -> Result<RoutingBitWidth, AddressError> {
    let n = cfg.core_count();
    let bits = match scheme {
        Scheme::Fbs => n,
        Scheme::Symbol => 2 * symbol_width(cfg)?,
        Scheme::Hbs => cfg.fan_out() * cfg.levels(),
        Scheme::Unicast => n.next_power_of_two().trailing_zeros() as usize,
    };
    Ok(RoutingBitWidth { scheme, bits })
}

/// Routing field plus source tag.
pub fn header_bits(scheme: Scheme, cfg: &TreeConfig, tag_bits: usize) -> Result<usize, AddressError> {
    Ok(routing_bit_width(scheme, cfg)?.bits + tag_bits)
}

/// Mask of the `k` digits of a level with bit d set.
pub(crate) fn digits_of(mask: u64, k: usize) -> impl Iterator<Item = usize> {
    let mask = mask & level_mask_limit(k);
    (0..k).filter(move |&d| mask >> d & 1 == 1)
}
