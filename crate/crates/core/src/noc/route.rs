//! Up/Down routing through the tree.
//!
//! Multicast packets climb to the turnaround switch, then fork downwards.
//! Every switch reads the head of the routing field: HBS switches read the
//! head k-bit mask, symbol switches the head `log2 k` symbols. The field is
//! rotated before it is forwarded, so all switches of a level run the same
//! logic and the field is back in its original alignment at the core. FBS
//! switches slice the flat mask by the subtree behind each port.

use serde::{Deserialize, Serialize};

use super::topology::{LinkId, SwitchId, Topology};
use super::SimError;
use crate::addressing::{covered_set, digits_of, header_bits, MulticastAddress, Scheme, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkTraversal {
    pub link: LinkId,
    pub direction: Direction,
}

/// Where multicast packets stop climbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turnaround {
    /// Always climb to the root.
    #[default]
    Root,
    /// Turn at the lowest switch whose subtree holds the source and the
    /// whole cover.
    Lca,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packet {
    pub field: MulticastAddress,
    pub source_tag: usize,
    pub header_bits: usize,
}

impl Packet {
    pub fn new(field: MulticastAddress, source_tag: usize, topo: &Topology, tag_bits: usize) -> Result<Self, SimError> {
        field.validate(topo.cfg())?;
        let header_bits = header_bits(field.scheme(), topo.cfg(), tag_bits)?;
        Ok(Self { field, source_tag, header_bits })
    }
}

/// What a switch saw and chose on the downward path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchDecision {
    pub switch: SwitchId,
    /// Routing field as it arrived at the switch.
    pub field: MulticastAddress,
    /// Selected down ports, bit d = port d.
    pub ports: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RouteOutcome {
    /// Receiving cores, ascending. A core appears once per packet that reaches it.
    pub deliveries: Vec<usize>,
    pub traversals: Vec<LinkTraversal>,
    pub decisions: Vec<SwitchDecision>,
}

impl RouteOutcome {
    pub fn up_count(&self) -> usize {
        self.traversals.iter().filter(|t| t.direction == Direction::Up).count()
    }

    pub fn down_count(&self) -> usize {
        self.traversals.iter().filter(|t| t.direction == Direction::Down).count()
    }
}

pub fn route_multicast(
    pkt: &Packet,
    source_core: usize,
    topo: &Topology,
    turnaround: Turnaround,
) -> Result<RouteOutcome, SimError> {
    let cfg = topo.cfg();
    let n = cfg.core_count();
    if source_core >= n {
        return Err(SimError::SourceOutOfRange { core: source_core, cores: n });
    }
    if pkt.field.scheme() == Scheme::Unicast {
        return Err(SimError::NotMulticast);
    }
    pkt.field.validate(cfg)?;
    let levels = cfg.levels();
    let turn = match turnaround {
        Turnaround::Root => levels,
        Turnaround::Lca => {
            let cover = covered_set(&pkt.field, cfg)?;
            cover.iter().map(|c| cfg.lca_height(source_core, c)).max().unwrap_or(0).max(1)
        }
    };
    let mut out = RouteOutcome::default();
    out.traversals.extend(
        topo.upward_links(source_core, turn)
            .map(|link| LinkTraversal { link, direction: Direction::Up }),
    );
    let top = topo.ancestor(source_core, turn);
    let field = advance(&pkt.field, levels - turn, cfg.bits_per_level());
    descend(top, field, topo, &mut out);
    out.deliveries.sort_unstable();
    Ok(out)
}

/// Rotates region-based fields past `levels` consumed levels.
fn advance(field: &MulticastAddress, levels: usize, bits_per_level: Option<usize>) -> MulticastAddress {
    if levels == 0 {
        return field.clone();
    }
    match field {
        MulticastAddress::Hbs(a) => {
            let mut a = a.clone();
            for _ in 0..levels {
                a = a.rotated();
            }
            MulticastAddress::Hbs(a)
        }
        MulticastAddress::Symbol(a) => {
            MulticastAddress::Symbol(a.rotated(levels * bits_per_level.unwrap_or(0)))
        }
        other => other.clone(),
    }
}

fn local_ports(switch: SwitchId, field: &MulticastAddress, topo: &Topology) -> u64 {
    let cfg = topo.cfg();
    let k = cfg.fan_out();
    match field {
        MulticastAddress::Hbs(a) => a.masks()[0],
        MulticastAddress::Symbol(a) => {
            let b = cfg.bits_per_level().unwrap_or(0);
            let head = &a.symbols()[..b];
            (0..k)
                .filter(|&d| {
                    head.iter().enumerate().all(|(j, s): (usize, &Symbol)| s.matches(d >> (b - 1 - j) & 1 == 1))
                })
                .fold(0u64, |m, d| m | 1 << d)
        }
        MulticastAddress::Fbs(a) => {
            let span = cfg.subtree_size(switch.level - 1);
            let base = switch.position * k * span;
            (0..k)
                .filter(|&d| a.mask()[base + d * span..base + (d + 1) * span].any())
                .fold(0u64, |m, d| m | 1 << d)
        }
        MulticastAddress::UnicastList(_) => 0,
    }
}

fn descend(switch: SwitchId, field: MulticastAddress, topo: &Topology, out: &mut RouteOutcome) {
    let k = topo.cfg().fan_out();
    let ports = local_ports(switch, &field, topo);
    let forwarded = advance(&field, 1, topo.cfg().bits_per_level());
    out.decisions.push(SwitchDecision { switch, field, ports });
    for d in digits_of(ports, k) {
        let child = switch.position * k + d;
        out.traversals.push(LinkTraversal {
            link: LinkId { level: switch.level, child },
            direction: Direction::Down,
        });
        if switch.level == 1 {
            out.deliveries.push(child);
        } else {
            descend(SwitchId { level: switch.level - 1, position: child }, forwarded.clone(), topo, out);
        }
    }
}

/// One exact packet per target, turning at the lowest common ancestor
/// switch (never below R1, so a core reaches itself through its R1 switch).
pub fn route_unicast_batch(
    targets: &[usize],
    source_core: usize,
    topo: &Topology,
) -> Result<RouteOutcome, SimError> {
    let cfg = topo.cfg();
    let n = cfg.core_count();
    if source_core >= n {
        return Err(SimError::SourceOutOfRange { core: source_core, cores: n });
    }
    MulticastAddress::UnicastList(targets.to_vec()).validate(cfg)?;
    let mut out = RouteOutcome::default();
    for &t in targets {
        let turn = cfg.lca_height(source_core, t).max(1);
        out.traversals.extend(
            topo.upward_links(source_core, turn)
                .map(|link| LinkTraversal { link, direction: Direction::Up }),
        );
        out.traversals.extend(
            topo.downward_links(t, turn)
                .map(|link| LinkTraversal { link, direction: Direction::Down }),
        );
        out.deliveries.push(t);
    }
    out.deliveries.sort_unstable();
    Ok(out)
}
