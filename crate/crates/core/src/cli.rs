//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input or config, 2 when a valid
//! request fails while running.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::addressing::{
    covered_set, encode, format_address, overcoverage, parse_address, parse_core_list,
    routing_bit_width, DestinationSet, Scheme, TreeConfig,
};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentError};
use crate::scaling::{emit_scaling_table, scaling_csv};
use crate::traffic::synth_trace;

#[derive(Debug, Parser)]
#[command(name = "hbs-noc", version, about = "Multicast addressing and tree NoC experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a destination set and print its address, cover and overcoverage.
    Encode {
        #[arg(long)]
        scheme: Scheme,
        #[command(flatten)]
        tree: TreeArgs,
        /// Comma-separated core indices; `a..b` ranges exclude `b`.
        #[arg(long)]
        dests: String,
    },
    /// Print the cover of an address.
    Decode {
        #[arg(long)]
        scheme: Scheme,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        address: String,
    },
    /// Write the routing-bit and capability table as CSV.
    Scaling {
        /// Core counts. Defaults to 4, 16, ..., 4096.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// HBS fan-outs. Defaults to 2,4.
        #[arg(long, value_delimiter = ',')]
        k: Vec<u64>,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment config and write the runs CSV and summary JSON.
    Simulate {
        /// TOML config; the built-in default experiment when absent.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `output.dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Write a synthetic `timestep,neuron_id` spike trace.
    TraceGen {
        /// Network and trace defaults are taken from this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Tree shape. With only `--n`, the fan-out is 4 if N is a power of 4,
/// else 2 if N is a power of 2, else N (a single switch).
#[derive(Debug, Clone, Args)]
pub struct TreeArgs {
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
}

impl TreeArgs {
    pub fn resolve(&self) -> Result<TreeConfig, CliError> {
        let v = |e: crate::addressing::AddressError| CliError::Invalid(e.to_string());
        match (self.k, self.levels, self.n) {
            (k, Some(l), None) => TreeConfig::new(k.unwrap_or(4), l).map_err(v),
            (Some(k), levels, Some(n)) => {
                let cfg = TreeConfig::with_core_count(k, n).map_err(v)?;
                check_levels(cfg, levels)
            }
            (None, levels, Some(n)) => {
                let cfg = [4u32, 2]
                    .iter()
                    .find_map(|&k| TreeConfig::with_core_count(k, n).ok())
                    .map_or_else(|| TreeConfig::new(n.try_into().unwrap_or(u32::MAX), 1).map_err(v), Ok)?;
                check_levels(cfg, levels)
            }
            (k, None, None) => TreeConfig::new(k.unwrap_or(4), 2).map_err(v),
        }
    }
}

fn check_levels(cfg: TreeConfig, levels: Option<u32>) -> Result<TreeConfig, CliError> {
    match levels {
        Some(l) if l as usize != cfg.levels() => Err(CliError::Invalid(format!(
            "--levels {l} disagrees with --n {} at fan-out {}",
            cfg.core_count(),
            cfg.fan_out()
        ))),
        _ => Ok(cfg),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        if e.is_validation() {
            CliError::Invalid(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let w = |r: std::io::Result<()>| r.map_err(|e| CliError::Runtime(e.to_string()));
    match cli.command {
        Command::Encode { scheme, tree, dests } => {
            let cfg = tree.resolve()?;
            let inv = |e: crate::addressing::AddressError| CliError::Invalid(e.to_string());
            let dests = DestinationSet::within(&cfg, parse_core_list(&dests).map_err(inv)?).map_err(inv)?;
            let addr = encode(scheme, &dests, &cfg).map_err(inv)?;
            let cover = covered_set(&addr, &cfg).map_err(inv)?;
            let over = overcoverage(&addr, &dests, &cfg).map_err(inv)?;
            let width = routing_bit_width(scheme, &cfg).map_err(inv)?;
            w(writeln!(out, "address: {}", format_address(&addr, &cfg)))?;
            w(writeln!(out, "cover: {cover}"))?;
            w(writeln!(out, "overcoverage: {over}"))?;
            w(writeln!(out, "routing_bits: {}", width.bits))?;
        }
        Command::Decode { scheme, tree, address } => {
            let cfg = tree.resolve()?;
            let inv = |e: crate::addressing::AddressError| CliError::Invalid(e.to_string());
            let addr = parse_address(scheme, &address, &cfg).map_err(inv)?;
            let cover = covered_set(&addr, &cfg).map_err(inv)?;
            w(writeln!(out, "cover: {cover}"))?;
            w(writeln!(out, "size: {}", cover.len()))?;
        }
        Command::Scaling { n, k, output } => {
            let ns = if n.is_empty() { (1..=6).map(|e| 4u64.pow(e)).collect() } else { n };
            let ks = if k.is_empty() { vec![2, 4] } else { k };
            if ns.iter().any(|&n| n < 2) || ks.iter().any(|&k| k < 2) {
                return Err(CliError::Invalid("N and k must be at least 2".into()));
            }
            let csv = scaling_csv(&emit_scaling_table(&ns, &ks));
            match output {
                Some(p) => std::fs::write(&p, csv).map_err(|e| io_err(&p, e))?,
                None => w(out.write_all(csv.as_bytes()))?,
            }
        }
        Command::Simulate { config, out_dir } => {
            let cfg = match &config {
                Some(p) => ExperimentConfig::load(p)?,
                None => ExperimentConfig::default(),
            };
            let res = run_experiment(&cfg)?;
            let dir = out_dir.unwrap_or_else(|| cfg.output.dir.clone());
            let (runs, summary) = res.write_outputs(&cfg, &dir)?;
            let s = &res.summary;
            w(writeln!(
                out,
                "{} mappings x {} schemes, {} events per mapping",
                s.mappings,
                s.schemes.len(),
                s.events
            ))?;
            for sc in &s.schemes {
                w(writeln!(
                    out,
                    "{:<8} total_energy mean {:.1}  routing {:.1}  filtering {:.1}  illegal {}",
                    sc.scheme.as_str(),
                    sc.total_energy.mean,
                    sc.routing_energy.mean,
                    sc.filtering_energy.mean,
                    sc.illegal_deliveries_total
                ))?;
            }
            if let Some(r) = s.illegal_ratio_hbs_to_symbol {
                w(writeln!(out, "illegal hbs/symbol: {r:.4}"))?;
            }
            w(writeln!(out, "wrote {} and {}", runs.display(), summary.display()))?;
        }
        Command::TraceGen { config, steps, rate, seed, output } => {
            let cfg = match &config {
                Some(p) => ExperimentConfig::load(p)?,
                None => ExperimentConfig::default(),
            };
            let steps = steps.unwrap_or(cfg.trace.steps);
            let rate = rate.unwrap_or(cfg.trace.rate);
            let seed = seed.unwrap_or(cfg.trace.seed);
            if !(0.0..=1.0).contains(&rate) {
                return Err(CliError::Invalid(format!("--rate must be in [0, 1], got {rate}")));
            }
            let trace = synth_trace(&cfg.network, steps, rate, seed).map_err(|e| CliError::Invalid(e.to_string()))?;
            let f = File::create(&output).map_err(|e| io_err(&output, e))?;
            trace.write_csv(BufWriter::new(f)).map_err(|e| CliError::Runtime(e.to_string()))?;
            w(writeln!(out, "wrote {} spikes to {}", trace.len(), output.display()))?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
