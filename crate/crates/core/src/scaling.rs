//! Closed-form routing-width and addressing-capability laws, plus an
//! enumeration oracle that counts distinct covers directly.

use std::fmt::Write as _;
use std::io;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::addressing::{Scheme, TreeConfig};

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("oracle inconsistency: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Exact base-`base` logarithm, `None` unless `n` is a power of `base`.
pub fn exact_log(n: u64, base: u64) -> Option<u32> {
    if base < 2 || n == 0 {
        return None;
    }
    let mut acc = 1u64;
    let mut exp = 0;
    while acc < n {
        acc = acc.checked_mul(base)?;
        exp += 1;
    }
    (acc == n).then_some(exp)
}

fn log2_of(scheme: Scheme, n: u64) -> Result<u64, ScalingError> {
    match exact_log(n, 2) {
        Some(b) if b >= 1 => Ok(b as u64),
        _ => Err(ScalingError::InvalidConfig(format!(
            "{scheme} needs N to be a power of two >= 2, got {n}"
        ))),
    }
}

fn hbs_levels(n: u64, k: u64) -> Result<u64, ScalingError> {
    match exact_log(n, k) {
        Some(l) if l >= 1 => Ok(l as u64),
        _ => Err(ScalingError::InvalidConfig(format!(
            "hbs needs N to be a positive power of k; N={n}, k={k}"
        ))),
    }
}

/// Routing bits per multicast. For unicast this is the worst case over a
/// full LUT iteration (`N log2 N`); `k` is only read for HBS.
pub fn routing_bits_formula(scheme: Scheme, n: u64, k: u64) -> Result<u64, ScalingError> {
    let overflow = || ScalingError::InvalidConfig(format!("routing bits overflow for N={n}"));
    match scheme {
        Scheme::Fbs => {
            if n == 0 {
                return Err(ScalingError::InvalidConfig("N must be >= 1".into()));
            }
            Ok(n)
        }
        Scheme::Symbol => Ok(2 * log2_of(scheme, n)?),
        Scheme::Hbs => k.checked_mul(hbs_levels(n, k)?).ok_or_else(overflow),
        Scheme::Unicast => n.checked_mul(log2_of(scheme, n)?).ok_or_else(overflow),
    }
}

/// Number of distinct nonempty regions a scheme can address, exactly.
pub fn capability_formula(scheme: Scheme, n: u64, k: u64) -> Result<BigUint, ScalingError> {
    let two = BigUint::from(2u32);
    match scheme {
        Scheme::Fbs | Scheme::Unicast => {
            if n == 0 {
                return Err(ScalingError::InvalidConfig("N must be >= 1".into()));
            }
            if scheme == Scheme::Unicast {
                log2_of(scheme, n)?;
            }
            let exp = u32::try_from(n)
                .map_err(|_| ScalingError::InvalidConfig(format!("N={n} too large")))?;
            Ok(two.pow(exp) - BigUint::one())
        }
        Scheme::Symbol => Ok(BigUint::from(3u32).pow(log2_of(scheme, n)? as u32)),
        Scheme::Hbs => {
            let levels = hbs_levels(n, k)? as u32;
            let k = u32::try_from(k)
                .map_err(|_| ScalingError::InvalidConfig(format!("k={k} too large")))?;
            Ok((two.pow(k) - BigUint::one()).pow(levels))
        }
    }
}

/// `k / log2 k`: routing bits per `log2 N` for HBS with fan-out `k`.
pub fn routing_scaling_factor(k: u64) -> Result<f64, ScalingError> {
    check_k(k)?;
    let k = k as f64;
    Ok(k / k.log2())
}

/// `(2^k - 1)^(1 / log2 k)`: capability growth per `log2 N` for HBS.
pub fn capability_scaling_factor(k: u64) -> Result<f64, ScalingError> {
    check_k(k)?;
    let kf = k as f64;
    // ln(2^k - 1) without overflowing for large k.
    let ln_mask_count = kf * std::f64::consts::LN_2 + (-(2f64).powf(-kf)).ln_1p();
    Ok((ln_mask_count / kf.log2()).exp())
}

fn check_k(k: u64) -> Result<(), ScalingError> {
    if k < 2 {
        return Err(ScalingError::InvalidConfig(format!("k must be >= 2, got {k}")));
    }
    Ok(())
}

/// How [`enumerate_capability_with`] walks the address space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Enumeration {
    /// Every well-formed address.
    Exhaustive,
    /// HBS only: one address per orbit of per-level digit relabelings,
    /// weighted by orbit size. Each representative is checked for
    /// equivariance against random relabelings.
    SymmetryReduced,
    /// Exhaustive when within budget, otherwise symmetry reduced for HBS.
    Auto,
}

/// Default cap on enumeration steps.
pub const DEFAULT_BUDGET: u64 = 1 << 22;

/// Counts distinct nonempty covers over all well-formed addresses.
pub fn enumerate_capability(scheme: Scheme, cfg: &TreeConfig) -> Result<BigUint, ScalingError> {
    enumerate_capability_with(scheme, cfg, Enumeration::Auto, DEFAULT_BUDGET)
}

/// Distinct covers are counted with a canonical-preimage selector: each
/// address `a` is counted iff `canon(cover(a)) == a`, after checking
/// `cover(canon(cover(a))) == cover(a)`. That counts each image exactly once
/// without storing the images.
pub fn enumerate_capability_with(
    scheme: Scheme,
    cfg: &TreeConfig,
    mode: Enumeration,
    budget: u64,
) -> Result<BigUint, ScalingError> {
    let n = cfg.core_count();
    let k = cfg.fan_out();
    let levels = cfg.levels();
    let exhaustive_steps: u128 = match scheme {
        Scheme::Fbs | Scheme::Unicast => {
            if n >= 64 {
                u128::MAX
            } else {
                (1u128 << n) - 1
            }
        }
        Scheme::Symbol => {
            let bits = cfg.index_bits().ok_or_else(|| {
                ScalingError::InvalidConfig(format!("symbol needs power-of-two N, got {n}"))
            })?;
            3u128.saturating_pow(bits as u32)
        }
        Scheme::Hbs => {
            if k >= 64 {
                u128::MAX
            } else {
                ((1u128 << k) - 1).saturating_pow(levels as u32)
            }
        }
    };
    let reduced_steps = (k as u128).saturating_pow(levels as u32);
    let use_reduced = match mode {
        Enumeration::Exhaustive => false,
        Enumeration::SymmetryReduced => true,
        Enumeration::Auto => exhaustive_steps > budget as u128 && scheme == Scheme::Hbs,
    };
    if use_reduced {
        if scheme != Scheme::Hbs {
            return Err(ScalingError::InvalidConfig(format!(
                "symmetry reduction is only implemented for hbs, not {scheme}"
            )));
        }
        if reduced_steps > budget as u128 {
            return Err(ScalingError::BudgetExceeded { needed: reduced_steps, budget });
        }
        return hbs_reduced(cfg);
    }
    if exhaustive_steps > budget as u128 {
        return Err(ScalingError::BudgetExceeded { needed: exhaustive_steps, budget });
    }
    let count = match scheme {
        Scheme::Fbs | Scheme::Unicast => subsets_exhaustive(n)?,
        Scheme::Symbol => symbol_exhaustive(cfg.index_bits().unwrap_or(0))?,
        Scheme::Hbs => hbs_exhaustive(cfg)?,
    };
    Ok(BigUint::from(count))
}

/// FBS masks and unicast lists both name an arbitrary nonempty subset.
fn subsets_exhaustive(n: usize) -> Result<u64, ScalingError> {
    let mut cover = Vec::with_capacity(n);
    let mut count = 0u64;
    for mask in 1u64..(1u64 << n) {
        cover.clear();
        cover.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        if cover.is_empty() {
            return Err(ScalingError::Inconsistent(format!("mask {mask:#x} has empty cover")));
        }
        let canon = cover.iter().fold(0u64, |m, &i| m | 1 << i);
        if canon == mask {
            count += 1;
        } else {
            return Err(ScalingError::Inconsistent(format!(
                "mask {mask:#x} re-encodes to {canon:#x}"
            )));
        }
    }
    Ok(count)
}

fn symbol_cover_into(width: usize, fixed: usize, value: usize, out: &mut Vec<usize>) {
    out.clear();
    let free = ((1usize << width) - 1) & !fixed;
    let mut sub = free;
    loop {
        out.push(value | sub);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    out.reverse();
}

/// Fixed-bit mask and values of the smallest symbol string covering `cover`.
fn symbol_canon(width: usize, cover: &[usize]) -> (usize, usize) {
    let full = (1usize << width) - 1;
    let all = cover.iter().fold(full, |a, &c| a & c);
    let any = cover.iter().fold(0, |a, &c| a | c);
    ((all | !any) & full, all)
}

fn symbol_exhaustive(width: usize) -> Result<u64, ScalingError> {
    let mut digits = vec![0u8; width];
    let mut cover = Vec::new();
    let mut again = Vec::new();
    let mut count = 0u64;
    loop {
        let (mut fixed, mut value) = (0usize, 0usize);
        for (i, &d) in digits.iter().enumerate() {
            let bit = 1usize << (width - 1 - i);
            match d {
                0 => fixed |= bit,
                1 => {
                    fixed |= bit;
                    value |= bit;
                }
                _ => {}
            }
        }
        symbol_cover_into(width, fixed, value, &mut cover);
        if cover.is_empty() {
            return Err(ScalingError::Inconsistent("empty symbol cover".into()));
        }
        let canon = symbol_canon(width, &cover);
        if canon == (fixed, value) {
            count += 1;
        } else {
            symbol_cover_into(width, canon.0, canon.1, &mut again);
            if again != cover {
                return Err(ScalingError::Inconsistent(format!(
                    "symbol canonicalization changed cover for fixed={fixed:#b} value={value:#b}"
                )));
            }
        }
        // base-3 odometer
        let mut pos = width;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < 3 {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Digit extraction for HBS oracles; shifts when `k` is a power of two.
struct Digits {
    k: usize,
    levels: usize,
    shift: Option<u32>,
}

impl Digits {
    fn new(cfg: &TreeConfig) -> Self {
        Self {
            k: cfg.fan_out(),
            levels: cfg.levels(),
            shift: cfg.bits_per_level().map(|b| b as u32),
        }
    }

    fn digit(&self, idx: usize, level: usize) -> usize {
        let from_bottom = self.levels - 1 - level;
        match self.shift {
            Some(b) => (idx >> (b as usize * from_bottom)) & (self.k - 1),
            None => idx / self.k.pow(from_bottom as u32) % self.k,
        }
    }

    /// Ascending cover of `masks`; empty if any mask is zero.
    fn cover_into(&self, masks: &[u64], out: &mut Vec<usize>) {
        out.clear();
        out.push(0);
        let mut next = Vec::with_capacity(out.capacity());
        for &m in masks {
            if m == 0 {
                out.clear();
                return;
            }
            next.clear();
            for &prefix in out.iter() {
                let base = prefix * self.k;
                next.extend((0..self.k).filter(|&d| m >> d & 1 == 1).map(|d| base + d));
            }
            std::mem::swap(out, &mut next);
        }
    }

    fn canon_into(&self, cover: &[usize], out: &mut Vec<u64>) {
        out.clear();
        out.resize(self.levels, 0);
        for &c in cover {
            for (level, m) in out.iter_mut().enumerate() {
                *m |= 1u64 << self.digit(c, level);
            }
        }
    }
}

fn hbs_exhaustive(cfg: &TreeConfig) -> Result<u64, ScalingError> {
    let dig = Digits::new(cfg);
    let max_mask = (1u64 << dig.k) - 1;
    let mut masks = vec![1u64; dig.levels];
    let mut cover = Vec::new();
    let mut again = Vec::new();
    let mut canon = Vec::new();
    let mut count = 0u64;
    loop {
        dig.cover_into(&masks, &mut cover);
        if cover.is_empty() {
            return Err(ScalingError::Inconsistent(format!("empty cover for {masks:?}")));
        }
        dig.canon_into(&cover, &mut canon);
        if canon == masks {
            count += 1;
        } else {
            dig.cover_into(&canon, &mut again);
            if again != cover {
                return Err(ScalingError::Inconsistent(format!(
                    "hbs canonicalization changed cover for {masks:?}"
                )));
            }
        }
        let mut pos = dig.levels;
        loop {
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
            if masks[pos] < max_mask {
                masks[pos] += 1;
                break;
            }
            masks[pos] = 1;
        }
    }
}

fn binomial(n: u64, r: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn hbs_reduced(cfg: &TreeConfig) -> Result<BigUint, ScalingError> {
    const CHECKS_PER_REP: usize = 2;
    let dig = Digits::new(cfg);
    let (k, levels) = (dig.k, dig.levels);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pops = vec![1usize; levels];
    let mut cover = Vec::new();
    let mut canon = Vec::new();
    let mut permuted = Vec::new();
    let mut mapped = Vec::new();
    let mut total = BigUint::zero();
    loop {
        let rep: Vec<u64> = pops.iter().map(|&c| (1u64 << c) - 1).collect();
        dig.cover_into(&rep, &mut cover);
        if cover.is_empty() {
            return Err(ScalingError::Inconsistent(format!("empty cover for {rep:?}")));
        }
        dig.canon_into(&cover, &mut canon);
        let counted = canon == rep;
        for _ in 0..CHECKS_PER_REP {
            // Random relabeling of digits at every level.
            let perms: Vec<Vec<usize>> = (0..levels)
                .map(|_| {
                    let mut p: Vec<usize> = (0..k).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect();
            let image: Vec<u64> = rep
                .iter()
                .zip(&perms)
                .map(|(&m, p)| (0..k).filter(|&d| m >> d & 1 == 1).fold(0u64, |a, d| a | 1 << p[d]))
                .collect();
            dig.cover_into(&image, &mut permuted);
            mapped.clear();
            mapped.extend(cover.iter().map(|&c| {
                (0..levels).fold(0usize, |acc, level| acc * k + perms[level][dig.digit(c, level)])
            }));
            mapped.sort_unstable();
            if mapped != permuted {
                return Err(ScalingError::Inconsistent(format!(
                    "cover is not equivariant under relabeling at {rep:?}"
                )));
            }
            dig.canon_into(&permuted, &mut canon);
            if (canon == image) != counted {
                return Err(ScalingError::Inconsistent(format!(
                    "canonical selector is not equivariant at {rep:?}"
                )));
            }
        }
        if counted {
            let mut weight = BigUint::one();
            for &c in &pops {
                weight *= binomial(k as u64, c as u64);
            }
            total += weight;
        }
        let mut pos = levels;
        loop {
            if pos == 0 {
                return Ok(total);
            }
            pos -= 1;
            if pops[pos] < k {
                pops[pos] += 1;
                break;
            }
            pops[pos] = 1;
        }
    }
}

/// One line of the scaling report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalingRow {
    pub scheme: Scheme,
    pub n: u64,
    /// Only set for HBS rows.
    pub k: Option<u64>,
    pub routing_bits: u64,
    pub capability: BigUint,
    /// Source-side LUT storage per neuron, worst case.
    pub lut_bits_per_source: u64,
}

pub const SCALING_CSV_HEADER: &str = "scheme,N,k,routing_bits,capability,lut_bits_per_source";

/// Rows per N in input order: FBS, Symbol, one HBS row per `k` that divides
/// N evenly into levels, then unicast. Infeasible combinations are skipped.
pub fn emit_scaling_table(ns: &[u64], ks: &[u64]) -> Vec<ScalingRow> {
    let mut rows = Vec::new();
    for &n in ns {
        let mut push = |scheme: Scheme, k: Option<u64>| {
            let kk = k.unwrap_or(0);
            if let (Ok(routing_bits), Ok(capability)) =
                (routing_bits_formula(scheme, n, kk), capability_formula(scheme, n, kk))
            {
                rows.push(ScalingRow {
                    scheme,
                    n,
                    k,
                    routing_bits,
                    capability,
                    lut_bits_per_source: routing_bits,
                });
            }
        };
        push(Scheme::Fbs, None);
        push(Scheme::Symbol, None);
        for &k in ks {
            push(Scheme::Hbs, Some(k));
        }
        push(Scheme::Unicast, None);
    }
    rows
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from(SCALING_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let k = r.k.map(|k| k.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scheme, r.n, k, r.routing_bits, r.capability, r.lut_bits_per_source
        );
    }
    out
}
