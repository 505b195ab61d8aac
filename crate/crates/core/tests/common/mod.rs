//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the codecs under test.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// Core indices as digit vectors, most significant (root) digit first.
pub fn digits(core: usize, k: usize, levels: usize) -> Vec<usize> {
    let mut d = vec![0; levels];
    let mut rest = core;
    for slot in d.iter_mut().rev() {
        *slot = rest % k;
        rest /= k;
    }
    d
}

/// Every ternary string of `width` symbols ('0', '1', '*') with its cover.
pub fn all_symbol_covers(width: usize) -> Vec<(String, BTreeSet<usize>)> {
    let total = 3usize.pow(width as u32);
    (0..total)
        .map(|mut code| {
            let mut s = vec!['0'; width];
            for ch in s.iter_mut().rev() {
                *ch = ['0', '1', '*'][code % 3];
                code /= 3;
            }
            let cover = (0..1usize << width)
                .filter(|&i| {
                    s.iter().enumerate().all(|(j, &c)| {
                        let bit = (i >> (width - 1 - j)) & 1;
                        c == '*' || (c == '1') == (bit == 1)
                    })
                })
                .collect();
            (s.into_iter().collect(), cover)
        })
        .collect()
}

/// Every tuple of nonzero per-level masks with its cover.
pub fn all_hbs_covers(k: usize, levels: usize) -> Vec<(Vec<u64>, BTreeSet<usize>)> {
    let per = (1u64 << k) - 1;
    let total = per.pow(levels as u32);
    let n = k.pow(levels as u32);
    (0..total)
        .map(|mut code| {
            let mut masks = vec![0u64; levels];
            for m in masks.iter_mut().rev() {
                *m = code % per + 1;
                code /= per;
            }
            let cover = (0..n)
                .filter(|&c| digits(c, k, levels).iter().zip(&masks).all(|(&d, &m)| m >> d & 1 == 1))
                .collect();
            (masks, cover)
        })
        .collect()
}

/// The smallest superset of `dests` among `covers`, with ties reported.
pub fn minimum_covers<'a, T>(dests: &BTreeSet<usize>, covers: &'a [(T, BTreeSet<usize>)]) -> Vec<&'a (T, BTreeSet<usize>)> {
    let supersets: Vec<_> = covers.iter().filter(|(_, c)| dests.is_subset(c)).collect();
    let best = supersets.iter().map(|(_, c)| c.len()).min().expect("full cover always exists");
    supersets.into_iter().filter(|(_, c)| c.len() == best).collect()
}

/// Height of the lowest common ancestor switch of two cores.
pub fn lca_height(a: usize, b: usize, k: usize) -> usize {
    let (mut a, mut b, mut h) = (a, b, 0);
    while a != b {
        a /= k;
        b /= k;
        h += 1;
    }
    h
}

/// Links on the union of root-to-core paths: (link level, child position).
pub fn tree_edges(cores: impl IntoIterator<Item = usize>, k: usize, levels: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for c in cores {
        for level in 1..=levels {
            out.insert((level, c / k.pow(level as u32 - 1)));
        }
    }
    out
}

/// Link traversals of one-packet-per-target unicast, turning at the LCA
/// switch but never below the leaf switch.
pub fn unicast_traversals(source: usize, targets: &BTreeSet<usize>, k: usize) -> usize {
    targets.iter().map(|&t| 2 * lca_height(source, t, k).max(1)).sum()
}

/// Minimal-cover sizes by direct construction: per level, the union of
/// digits seen; per index bit, agreement or wildcard.
pub fn hbs_cover_size(dests: &BTreeSet<usize>, k: usize, levels: usize) -> usize {
    let mut seen = vec![BTreeSet::new(); levels];
    for &d in dests {
        for (l, digit) in digits(d, k, levels).into_iter().enumerate() {
            seen[l].insert(digit);
        }
    }
    seen.iter().map(BTreeSet::len).product()
}

pub fn symbol_cover_size(dests: &BTreeSet<usize>, width: usize) -> usize {
    let wild = (0..width)
        .filter(|&b| {
            let ones = dests.iter().filter(|&&d| d >> b & 1 == 1).count();
            ones != 0 && ones != dests.len()
        })
        .count();
    1 << wild
}

/// Cores matching every per-level digit seen among `dests`.
pub fn hbs_cover_set(dests: &BTreeSet<usize>, k: usize, levels: usize) -> BTreeSet<usize> {
    let mut seen = vec![BTreeSet::new(); levels];
    for &d in dests {
        for (l, digit) in digits(d, k, levels).into_iter().enumerate() {
            seen[l].insert(digit);
        }
    }
    (0..k.pow(levels as u32))
        .filter(|&c| digits(c, k, levels).iter().zip(&seen).all(|(d, s)| s.contains(d)))
        .collect()
}

/// Cores agreeing with `dests` on every index bit where all of them agree.
pub fn symbol_cover_set(dests: &BTreeSet<usize>, width: usize) -> BTreeSet<usize> {
    let first = *dests.iter().next().expect("nonempty");
    let agree: usize = (0..width)
        .filter(|&b| dests.iter().all(|&d| (d >> b & 1) == (first >> b & 1)))
        .fold(0, |m, b| m | 1 << b);
    (0..1usize << width).filter(|&c| (c ^ first) & agree == 0).collect()
}
