use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentConfig, ExperimentError};
use crate::addressing::{header_bits, Scheme};
use crate::noc::{build_tree, simulate, SimOptions, SimReport, Workload};
use crate::traffic::{
    build_core_luts, derive_events, generate_connectivity, map_neurons, synth_trace, NeuronMapping,
    SpikeTrace,
};

/// One (mapping, scheme) simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub mapping: usize,
    pub report: SimReport,
    pub divergence_by_level: Vec<u64>,
}

#[derive(Serialize)]
struct CsvRow {
    mapping: usize,
    scheme: Scheme,
    packets_injected: u64,
    link_traversals: u64,
    link_bit_traversals: u64,
    legal_deliveries: u64,
    illegal_deliveries: u64,
    routing_energy: f64,
    filtering_energy: f64,
    illegal_filtering_energy: f64,
    total_energy: f64,
}

impl From<&RunRow> for CsvRow {
    fn from(r: &RunRow) -> Self {
        let s = &r.report;
        Self {
            mapping: r.mapping,
            scheme: s.scheme,
            packets_injected: s.packets_injected,
            link_traversals: s.link_traversals,
            link_bit_traversals: s.link_bit_traversals,
            legal_deliveries: s.legal_deliveries,
            illegal_deliveries: s.illegal_deliveries,
            routing_energy: s.routing_energy,
            filtering_energy: s.filtering_energy,
            illegal_filtering_energy: s.illegal_filtering_energy,
            total_energy: s.total_energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut n, mut sum, mut min, mut max) = (0usize, 0.0, f64::INFINITY, f64::NEG_INFINITY);
        for v in values {
            n += 1;
            sum += v;
            min = min.min(v);
            max = max.max(v);
        }
        if n == 0 {
            return Self { mean: 0.0, min: 0.0, max: 0.0 };
        }
        Self { mean: sum / n as f64, min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub runs: usize,
    pub header_bits: usize,
    pub legal_deliveries_total: u64,
    pub illegal_deliveries_total: u64,
    pub illegal_deliveries: Stat,
    pub routing_energy: Stat,
    pub filtering_energy: Stat,
    pub illegal_filtering_energy: Stat,
    pub total_energy: Stat,
    /// Illegal deliveries summed over runs, by divergence level (index 0 = R1).
    pub divergence_by_level: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub fan_out: usize,
    pub levels: usize,
    pub cores: usize,
    pub neurons: usize,
    pub synapses: usize,
    pub tag_bits: usize,
    pub mappings: usize,
    pub steps: u32,
    pub spikes: usize,
    pub events: usize,
    pub dropped_empty_fanout: usize,
    pub schemes: Vec<SchemeSummary>,
    /// Total illegal deliveries under HBS divided by those under Symbol.
    pub illegal_ratio_hbs_to_symbol: Option<f64>,
    /// `1 - mean(HBS) / mean(other)` for routing and total energy.
    pub energy_reduction_hbs: BTreeMap<String, f64>,
}

impl Summary {
    pub fn scheme(&self, s: Scheme) -> Option<&SchemeSummary> {
        self.schemes.iter().find(|x| x.scheme == s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Sorted by mapping, then by scheme in config order.
    pub rows: Vec<RunRow>,
    pub summary: Summary,
}

impl ExperimentResult {
    pub fn rows_for(&self, s: Scheme) -> impl Iterator<Item = &RunRow> {
        self.rows.iter().filter(move |r| r.report.scheme == s)
    }

    pub fn write_runs_csv<W: Write>(&self, w: W) -> Result<(), ExperimentError> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(CsvRow::from(r))?;
        }
        out.flush().map_err(|e| ExperimentError::Io(e.to_string()))?;
        Ok(())
    }

    /// Writes the runs CSV and summary JSON into `dir`, returning both paths.
    pub fn write_outputs(&self, cfg: &ExperimentConfig, dir: &Path) -> Result<(PathBuf, PathBuf), ExperimentError> {
        let io = |p: &Path, e: std::io::Error| ExperimentError::Io(format!("{}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let runs = dir.join(&cfg.output.runs_csv);
        let summary = dir.join(&cfg.output.summary_json);
        let f = File::create(&runs).map_err(|e| io(&runs, e))?;
        self.write_runs_csv(BufWriter::new(f))?;
        let mut text = self.summary.to_json();
        text.push('\n');
        std::fs::write(&summary, text).map_err(|e| io(&summary, e))?;
        Ok((runs, summary))
    }
}

pub fn load_trace(cfg: &ExperimentConfig) -> Result<SpikeTrace, ExperimentError> {
    match &cfg.trace.file {
        Some(p) => {
            let p = cfg.resolve(p);
            let f = File::open(&p).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display())))?;
            Ok(SpikeTrace::read_csv(BufReader::new(f), None)?)
        }
        None => Ok(synth_trace(&cfg.network, cfg.trace.steps, cfg.trace.rate, cfg.trace.seed)?),
    }
}

pub fn load_mappings(cfg: &ExperimentConfig) -> Result<Vec<NeuronMapping>, ExperimentError> {
    let tree = cfg.tree_config()?;
    let m = &cfg.mapping;
    match &m.file {
        Some(p) => {
            let p = cfg.resolve(p);
            let f = File::open(&p).map_err(|e| ExperimentError::Io(format!("{}: {e}", p.display())))?;
            Ok(vec![NeuronMapping::read_csv(BufReader::new(f), tree.core_count(), m.capacity)?])
        }
        None => (0..m.repetitions as u64)
            .into_par_iter()
            .map(|r| Ok(map_neurons(&cfg.network, &tree, m.strategy(), m.capacity, m.seed.wrapping_add(r))?))
            .collect(),
    }
}

/// Runs every scheme on every mapping against one shared trace.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    cfg.validate()?;
    let tree = cfg.tree_config()?;
    let topo = build_tree(&tree);
    let energy = cfg.energy.model(tree.levels());
    let tag_bits = cfg.tag_bits();
    let opts = SimOptions { tag_bits, turnaround: cfg.turnaround, record_links: false };

    let conn = generate_connectivity(&cfg.network, cfg.network_seed)?;
    let trace = load_trace(cfg)?;
    let mappings = load_mappings(cfg)?;

    let per_mapping: Vec<(usize, usize, Vec<RunRow>)> = mappings
        .par_iter()
        .enumerate()
        .map(|(i, mapping)| {
            let events = derive_events(&trace, &conn, mapping, tag_bits)?;
            let luts = build_core_luts(&conn, mapping);
            let w = Workload { events: &events.events, mapping, luts: &luts };
            let rows = cfg
                .schemes
                .iter()
                .map(|&s| {
                    let out = simulate(w, s, &topo, &energy, &opts)?;
                    Ok(RunRow { mapping: i, report: out.report, divergence_by_level: out.divergence_by_level })
                })
                .collect::<Result<Vec<_>, ExperimentError>>()?;
            Ok((events.events.len(), events.dropped_empty_fanout, rows))
        })
        .collect::<Result<_, ExperimentError>>()?;

    let (events, dropped) = per_mapping.first().map_or((0, 0), |(e, d, _)| (*e, *d));
    let rows: Vec<RunRow> = per_mapping.into_iter().flat_map(|(_, _, r)| r).collect();

    let mut schemes = Vec::new();
    for &s in &cfg.schemes {
        let runs: Vec<&RunRow> = rows.iter().filter(|r| r.report.scheme == s).collect();
        let stat = |f: fn(&SimReport) -> f64| Stat::of(runs.iter().map(|r| f(&r.report)));
        let mut divergence = vec![0u64; tree.levels()];
        for r in &runs {
            for (d, x) in divergence.iter_mut().zip(&r.divergence_by_level) {
                *d += x;
            }
        }
        schemes.push(SchemeSummary {
            scheme: s,
            runs: runs.len(),
            header_bits: header_bits(s, &tree, tag_bits)?,
            legal_deliveries_total: runs.iter().map(|r| r.report.legal_deliveries).sum(),
            illegal_deliveries_total: runs.iter().map(|r| r.report.illegal_deliveries).sum(),
            illegal_deliveries: stat(|r| r.illegal_deliveries as f64),
            routing_energy: stat(|r| r.routing_energy),
            filtering_energy: stat(|r| r.filtering_energy),
            illegal_filtering_energy: stat(|r| r.illegal_filtering_energy),
            total_energy: stat(|r| r.total_energy),
            divergence_by_level: divergence,
        });
    }

    let find = |s: Scheme| schemes.iter().find(|x| x.scheme == s);
    let illegal_ratio_hbs_to_symbol = match (find(Scheme::Hbs), find(Scheme::Symbol)) {
        (Some(h), Some(y)) if y.illegal_deliveries_total > 0 => {
            Some(h.illegal_deliveries_total as f64 / y.illegal_deliveries_total as f64)
        }
        _ => None,
    };
    let mut energy_reduction_hbs = BTreeMap::new();
    if let Some(h) = find(Scheme::Hbs) {
        for other in cfg.schemes.iter().filter(|&&s| s != Scheme::Hbs) {
            let o = find(*other).expect("scheme summarized");
            if o.routing_energy.mean > 0.0 {
                energy_reduction_hbs
                    .insert(format!("routing_vs_{other}"), 1.0 - h.routing_energy.mean / o.routing_energy.mean);
            }
            if o.total_energy.mean > 0.0 {
                energy_reduction_hbs.insert(format!("total_vs_{other}"), 1.0 - h.total_energy.mean / o.total_energy.mean);
            }
        }
    }

    let summary = Summary {
        fan_out: tree.fan_out(),
        levels: tree.levels(),
        cores: tree.core_count(),
        neurons: conn.neurons(),
        synapses: conn.synapse_count(),
        tag_bits,
        mappings: mappings.len(),
        steps: trace.steps(),
        spikes: trace.len(),
        events,
        dropped_empty_fanout: dropped,
        schemes,
        illegal_ratio_hbs_to_symbol,
        energy_reduction_hbs,
    };
    Ok(ExperimentResult { rows, summary })
}
