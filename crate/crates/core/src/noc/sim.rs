use std::io::Write;

use serde::{Deserialize, Serialize};

use super::route::{route_multicast, route_unicast_batch, Direction, LinkTraversal, Packet, Turnaround};
use super::{EnergyModel, SimError, Topology};
use crate::addressing::{encode, MulticastAddress, Scheme};
use crate::traffic::{CoreLut, NeuronMapping, SpikeEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterVerdict {
    Legal,
    Illegal,
}

/// Target-side LUT check for a packet arriving at `core`.
pub fn filter_at_core(core: usize, source_tag: usize, lut: &CoreLut) -> FilterVerdict {
    if lut.accepts(core, source_tag) {
        FilterVerdict::Legal
    } else {
        FilterVerdict::Illegal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    pub tag_bits: usize,
    pub turnaround: Turnaround,
    /// Keep every link traversal in [`SimOutcome::link_log`].
    pub record_links: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { tag_bits: 10, turnaround: Turnaround::Root, record_links: false }
    }
}

/// Per-scheme totals of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scheme: Scheme,
    pub packets_injected: u64,
    pub link_traversals: u64,
    /// Sum of header bits over traversed links.
    pub link_bit_traversals: u64,
    pub legal_deliveries: u64,
    pub illegal_deliveries: u64,
    pub routing_energy: f64,
    /// Charged for every arrival.
    pub filtering_energy: f64,
    /// The part of `filtering_energy` spent on packets that were dropped.
    pub illegal_filtering_energy: f64,
    /// `routing_energy + filtering_energy`.
    pub total_energy: f64,
}

impl SimReport {
    pub fn empty(scheme: Scheme) -> Self {
        Self {
            scheme,
            packets_injected: 0,
            link_traversals: 0,
            link_bit_traversals: 0,
            legal_deliveries: 0,
            illegal_deliveries: 0,
            routing_energy: 0.0,
            filtering_energy: 0.0,
            illegal_filtering_energy: 0.0,
            total_energy: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Header row with the field names, then one data row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut out = csv::Writer::from_writer(w);
        out.serialize(self)?;
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LoggedTraversal {
    pub traversal: LinkTraversal,
    pub header_bits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub report: SimReport,
    /// Illegal deliveries by the level of the switch where their path left
    /// the last legal path; index 0 = R1.
    pub divergence_by_level: Vec<u64>,
    /// Filled only with [`SimOptions::record_links`].
    pub link_log: Vec<LoggedTraversal>,
}

/// Everything a run needs besides the scheme.
#[derive(Debug, Clone, Copy)]
pub struct Workload<'a> {
    pub events: &'a [SpikeEvent],
    pub mapping: &'a NeuronMapping,
    pub luts: &'a CoreLut,
}

pub fn simulate(
    workload: Workload<'_>,
    scheme: Scheme,
    topo: &Topology,
    energy: &EnergyModel,
    opts: &SimOptions,
) -> Result<SimOutcome, SimError> {
    let cfg = topo.cfg();
    let levels = cfg.levels();
    energy.validate(levels)?;
    let mut report = SimReport::empty(scheme);
    let mut divergence_by_level = vec![0u64; levels];
    let mut link_log = Vec::new();
    // Bits per link level, summed into energy once at the end.
    let mut level_bits = vec![0u64; levels];
    let mut arrivals = 0u64;

    for ev in workload.events {
        let source_core = workload
            .mapping
            .core_of(ev.source)
            .ok_or(SimError::UnmappedNeuron { neuron: ev.source })?;
        let (header, route, packets) = if scheme == Scheme::Unicast {
            ev.targets.check(cfg)?;
            let targets: Vec<usize> = ev.targets.iter().collect();
            let header = crate::addressing::header_bits(scheme, cfg, opts.tag_bits)?;
            let route = route_unicast_batch(&targets, source_core, topo)?;
            (header, route, targets.len() as u64)
        } else {
            let field = encode(scheme, &ev.targets, cfg)?;
            let pkt = Packet::new(field, ev.source, topo, opts.tag_bits)?;
            let route = route_multicast(&pkt, source_core, topo, opts.turnaround)?;
            (pkt.header_bits, route, 1)
        };
        report.packets_injected += packets;
        for t in &route.traversals {
            report.link_traversals += 1;
            report.link_bit_traversals += header as u64;
            level_bits[t.link.level - 1] += header as u64;
            if opts.record_links {
                link_log.push(LoggedTraversal { traversal: *t, header_bits: header });
            }
        }
        for &core in &route.deliveries {
            arrivals += 1;
            match filter_at_core(core, ev.source, workload.luts) {
                FilterVerdict::Legal => report.legal_deliveries += 1,
                FilterVerdict::Illegal => {
                    report.illegal_deliveries += 1;
                    let level = ev.targets.iter().map(|d| cfg.lca_height(core, d)).min().unwrap_or(levels);
                    divergence_by_level[level.clamp(1, levels) - 1] += 1;
                }
            }
        }
    }

    report.routing_energy = level_bits
        .iter()
        .enumerate()
        .map(|(i, &bits)| bits as f64 * energy.link_energy(i + 1))
        .sum();
    report.filtering_energy = arrivals as f64 * energy.filter_energy_per_lookup;
    report.illegal_filtering_energy = report.illegal_deliveries as f64 * energy.filter_energy_per_lookup;
    report.total_energy = report.routing_energy + report.filtering_energy;
    Ok(SimOutcome { report, divergence_by_level, link_log })
}

/// Routing energy recomputed from a link log.
pub fn routing_energy_from_log(log: &[LoggedTraversal], energy: &EnergyModel) -> f64 {
    log.iter()
        .map(|l| l.header_bits as f64 * energy.link_energy(l.traversal.link.level))
        .sum()
}

/// Count of traversals per direction in a log.
pub fn count_direction(log: &[LoggedTraversal], direction: Direction) -> usize {
    log.iter().filter(|l| l.traversal.direction == direction).count()
}

/// The routing field a single event would carry under `scheme`.
pub fn event_address(ev: &SpikeEvent, scheme: Scheme, topo: &Topology) -> Result<MulticastAddress, SimError> {
    Ok(encode(scheme, &ev.targets, topo.cfg())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::addressing::{DestinationSet, TreeConfig};
    use crate::noc::build_tree;
    use crate::traffic::{build_core_luts, Connectivity};

    struct Fixture {
        topo: Topology,
        mapping: NeuronMapping,
        luts: CoreLut,
    }

    // neuron i lives on core i; neuron 0 targets neurons on `targets`.
    fn fixture(targets: &[usize]) -> Fixture {
        let topo = build_tree(&TreeConfig::new(4, 2).unwrap());
        let mut conn = vec![Vec::new(); 16];
        conn[0] = targets.to_vec();
        let conn = Connectivity::new(conn);
        let mapping = NeuronMapping::from_assignment((0..16).collect(), 16, 1).unwrap();
        let luts = build_core_luts(&conn, &mapping);
        Fixture { topo, mapping, luts }
    }

    fn event(targets: &[usize]) -> SpikeEvent {
        SpikeEvent { timestep: 0, source: 0, targets: DestinationSet::new(targets.iter().copied()).unwrap() }
    }

    #[test]
    fn empty_event_list_gives_zero_report() {
        let f = fixture(&[1]);
        let w = Workload { events: &[], mapping: &f.mapping, luts: &f.luts };
        for scheme in Scheme::ALL {
            let out = simulate(w, scheme, &f.topo, &EnergyModel::default_for(2), &SimOptions::default()).unwrap();
            assert_eq!(out.report, SimReport::empty(scheme));
        }
    }

    #[test]
    fn fbs_singleton_energy() {
        let f = fixture(&[5]);
        let events = [event(&[5])];
        let w = Workload { events: &events, mapping: &f.mapping, luts: &f.luts };
        let out = simulate(w, Scheme::Fbs, &f.topo, &EnergyModel::default_for(2), &SimOptions::default()).unwrap();
        let r = out.report;
        assert_eq!(r.illegal_deliveries, 0);
        assert_eq!(r.legal_deliveries, 1);
        // up: leaf (1) + root (4), down: root (4) + leaf (1)
        assert_eq!(r.routing_energy, 26.0 * 10.0);
        assert_eq!(r.link_bit_traversals, 26 * 4);
        assert_eq!(r.filtering_energy, 8.0);
        assert_eq!(r.illegal_filtering_energy, 0.0);
        assert_eq!(r.total_energy, 268.0);
    }

    #[test]
    fn region_schemes_count_illegal_arrivals() {
        let f = fixture(&[0, 15]);
        let events = [event(&[0, 15])];
        let w = Workload { events: &events, mapping: &f.mapping, luts: &f.luts };
        let e = EnergyModel::default_for(2);
        let opts = SimOptions::default();
        let sym = simulate(w, Scheme::Symbol, &f.topo, &e, &opts).unwrap();
        let hbs = simulate(w, Scheme::Hbs, &f.topo, &e, &opts).unwrap();
        // symbol "****" covers all 16, HBS 1001/1001 covers {0,3,12,15}
        assert_eq!(sym.report.illegal_deliveries, 14);
        assert_eq!(hbs.report.illegal_deliveries, 2);
        assert_eq!(hbs.divergence_by_level, vec![2, 0]);
        assert_eq!(sym.divergence_by_level[1], 8);
        for out in [&sym, &hbs] {
            assert_eq!(out.report.legal_deliveries, 2);
            assert_eq!(out.report.total_energy, out.report.routing_energy + out.report.filtering_energy);
        }
    }

    #[test]
    fn unicast_packets_and_widths() {
        let f = fixture(&[1, 9]);
        let events = [event(&[1, 9])];
        let w = Workload { events: &events, mapping: &f.mapping, luts: &f.luts };
        let out = simulate(w, Scheme::Unicast, &f.topo, &EnergyModel::default_for(2), &SimOptions::default()).unwrap();
        let r = out.report;
        assert_eq!(r.packets_injected, 2);
        assert_eq!(r.link_traversals, 6);
        // 14-bit header (4 routing + 10 tag): 1+1 to the sibling, 1+4+4+1 across the root
        assert_eq!(r.routing_energy, 14.0 * 12.0);
        assert_eq!(r.illegal_deliveries, 0);
    }

    #[test]
    fn unmapped_source_is_an_error() {
        let f = fixture(&[1]);
        let events = [SpikeEvent { timestep: 0, source: 99, targets: DestinationSet::new([1]).unwrap() }];
        let w = Workload { events: &events, mapping: &f.mapping, luts: &f.luts };
        let err = simulate(w, Scheme::Hbs, &f.topo, &EnergyModel::default_for(2), &SimOptions::default());
        assert!(matches!(err, Err(SimError::UnmappedNeuron { neuron: 99 })));
    }

    #[test]
    fn filter_verdicts() {
        let f = fixture(&[3]);
        assert_eq!(filter_at_core(3, 0, &f.luts), FilterVerdict::Legal);
        assert_eq!(filter_at_core(4, 0, &f.luts), FilterVerdict::Illegal);
    }

    #[test]
    fn report_serialization() {
        let r = SimReport::empty(Scheme::Hbs);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["scheme"], "hbs");
        assert!(json.as_object().unwrap().values().all(|v| !v.is_object() && !v.is_array()));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scheme,packets_injected,link_traversals,link_bit_traversals,legal_deliveries,\
             illegal_deliveries,routing_energy,filtering_energy,illegal_filtering_energy,total_energy"
        );
        assert_eq!(lines.next().unwrap(), "hbs,0,0,0,0,0,0.0,0.0,0.0,0.0");
        assert!(lines.next().is_none());
    }
}
