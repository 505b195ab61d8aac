//! Canonical text form of addresses.
//!
//! - FBS: binary string, bit N-1 leftmost.
//! - Symbol: `0`/`1`/`*` string, root-level bit first.
//! - HBS: `/`-separated k-bit binary masks, root level first, bit k-1 leftmost.
//! - Unicast: comma-separated decimal indices.

use bitvec::prelude::*;

use super::{
    AddressError, FbsAddress, HbsAddress, MulticastAddress, Scheme, Symbol, SymbolAddress,
    TreeConfig,
};

pub fn format_address(addr: &MulticastAddress, cfg: &TreeConfig) -> String {
    match addr {
        MulticastAddress::Fbs(a) => a
            .mask()
            .iter()
            .by_vals()
            .rev()
            .map(|b| if b { '1' } else { '0' })
            .collect(),
        MulticastAddress::Symbol(a) => a.symbols().iter().map(Symbol::as_char).collect(),
        MulticastAddress::Hbs(a) => {
            let k = cfg.fan_out();
            a.masks()
                .iter()
                .map(|&m| (0..k).rev().map(|d| if m >> d & 1 == 1 { '1' } else { '0' }).collect::<String>())
                .collect::<Vec<_>>()
                .join("/")
        }
        MulticastAddress::UnicastList(t) => {
            t.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

/// Parses the canonical text of `scheme` and validates it against `cfg`.
pub fn parse_address(
    scheme: Scheme,
    text: &str,
    cfg: &TreeConfig,
) -> Result<MulticastAddress, AddressError> {
    let text = text.trim();
    let bad = |why: &str| AddressError::Parse(format!("{scheme} address {text:?}: {why}"));
    let addr = match scheme {
        Scheme::Fbs => {
            let mut mask = BitVec::<u64, Lsb0>::with_capacity(text.len());
            for ch in text.chars().rev() {
                match ch {
                    '0' => mask.push(false),
                    '1' => mask.push(true),
                    _ => return Err(bad("expected only 0 and 1")),
                }
            }
            MulticastAddress::Fbs(FbsAddress::from_mask(mask))
        }
        Scheme::Symbol => {
            let symbols = text
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(Symbol::Zero),
                    '1' => Ok(Symbol::One),
                    '*' => Ok(Symbol::Star),
                    _ => Err(bad("expected only 0, 1 and *")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            MulticastAddress::Symbol(SymbolAddress::new(symbols))
        }
        Scheme::Hbs => {
            let k = cfg.fan_out();
            let masks = text
                .split('/')
                .map(|field| {
                    if field.len() != k || !field.chars().all(|c| c == '0' || c == '1') {
                        return Err(bad(&format!("each level must be {k} binary digits")));
                    }
                    u64::from_str_radix(field, 2).map_err(|e| bad(&e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            MulticastAddress::Hbs(HbsAddress::new(masks))
        }
        Scheme::Unicast => {
            let targets = parse_core_list(text)?;
            MulticastAddress::UnicastList(targets)
        }
    };
    addr.validate(cfg)?;
    Ok(addr)
}

/// Comma-separated decimal core indices; `a..b` ranges (exclusive end) are
/// accepted for convenience.
pub fn parse_core_list(text: &str) -> Result<Vec<usize>, AddressError> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo.trim().parse().map_err(|_| AddressError::Parse(part.into()))?;
            let hi: usize = hi.trim().parse().map_err(|_| AddressError::Parse(part.into()))?;
            out.extend(lo..hi);
        } else {
            out.push(part.parse().map_err(|_| AddressError::Parse(part.into()))?);
        }
    }
    Ok(out)
}
