use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::addressing::{Scheme, TreeConfig};
use crate::noc::{EnergyModel, Turnaround};
use crate::traffic::{
    tag_width, MappingStrategy, NetworkSpec, DEFAULT_CAPACITY, DEFAULT_SWITCH_PROBABILITY,
};

/// End-to-end experiment description, read from TOML. Every field has a
/// default; an empty file describes the 16-core, 600-neuron experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub tree: TreeSection,
    /// Source tag width; derived from the neuron count when absent.
    pub tag_bits: Option<usize>,
    pub schemes: Vec<Scheme>,
    pub turnaround: Turnaround,
    pub energy: EnergySection,
    pub network: NetworkSpec,
    pub network_seed: u64,
    pub mapping: MappingSection,
    pub trace: TraceSection,
    pub output: OutputSection,
    /// Directory that relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TreeSection {
    pub fan_out: u32,
    pub levels: u32,
}

impl Default for TreeSection {
    fn default() -> Self {
        Self { fan_out: 4, levels: 2 }
    }
}

/// Either explicit per-level link energies or a geometric series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergySection {
    /// Leaf level first. Overrides `leaf_link_energy` and `level_ratio`.
    pub link_energy_per_bit: Option<Vec<f64>>,
    pub leaf_link_energy: f64,
    pub level_ratio: f64,
    pub filter_energy_per_lookup: f64,
}

impl Default for EnergySection {
    fn default() -> Self {
        Self {
            link_energy_per_bit: None,
            leaf_link_energy: crate::noc::DEFAULT_LEAF_LINK_ENERGY,
            level_ratio: crate::noc::DEFAULT_LEVEL_RATIO,
            filter_energy_per_lookup: crate::noc::DEFAULT_FILTER_ENERGY,
        }
    }
}

impl EnergySection {
    pub fn model(&self, levels: usize) -> EnergyModel {
        match &self.link_energy_per_bit {
            Some(e) => EnergyModel {
                link_energy_per_bit: e.clone(),
                filter_energy_per_lookup: self.filter_energy_per_lookup,
            },
            None => EnergyModel::geometric(
                levels,
                self.leaf_link_energy,
                self.level_ratio,
                self.filter_energy_per_lookup,
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Sequential,
    RandomSwitch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MappingSection {
    pub strategy: StrategyKind,
    pub switch_probability: f64,
    pub capacity: usize,
    pub repetitions: usize,
    /// Repetition `r` uses seed `seed + r`.
    pub seed: u64,
    /// A `neuron_id,core_index` file used instead of generated mappings.
    /// `repetitions` is ignored when set.
    pub file: Option<PathBuf>,
}

impl Default for MappingSection {
    fn default() -> Self {
        Self {
            strategy: StrategyKind::RandomSwitch,
            switch_probability: DEFAULT_SWITCH_PROBABILITY,
            capacity: DEFAULT_CAPACITY,
            repetitions: 50,
            seed: 1,
            file: None,
        }
    }
}

impl MappingSection {
    pub fn strategy(&self) -> MappingStrategy {
        match self.strategy {
            StrategyKind::Sequential => MappingStrategy::Sequential,
            StrategyKind::RandomSwitch => MappingStrategy::RandomSwitch { probability: self.switch_probability },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSection {
    pub steps: u32,
    pub rate: f64,
    pub seed: u64,
    /// A `timestep,neuron_id` file used instead of a synthetic trace.
    pub file: Option<PathBuf>,
}

impl Default for TraceSection {
    fn default() -> Self {
        Self { steps: 400, rate: 0.05, seed: 42, file: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub runs_csv: String,
    pub summary_json: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("results"), runs_csv: "runs.csv".into(), summary_json: "summary.json".into() }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tree: TreeSection::default(),
            tag_bits: None,
            schemes: vec![Scheme::Fbs, Scheme::Symbol, Scheme::Hbs],
            turnaround: Turnaround::Root,
            energy: EnergySection::default(),
            network: NetworkSpec::default(),
            network_seed: 7,
            mapping: MappingSection::default(),
            trace: TraceSection::default(),
            output: OutputSection::default(),
            base_dir: None,
        }
    }
}

/// One validation failure, located by its dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExperimentError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn tree_config(&self) -> Result<TreeConfig, ExperimentError> {
        TreeConfig::new(self.tree.fan_out, self.tree.levels)
            .map_err(|e| ExperimentError::Invalid(vec![issue("tree", e.to_string())]))
    }

    pub fn tag_bits(&self) -> usize {
        self.tag_bits.unwrap_or_else(|| tag_width(self.network.total_neurons()))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    /// Collects every problem rather than stopping at the first.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let tree = match TreeConfig::new(self.tree.fan_out, self.tree.levels) {
            Ok(t) => Some(t),
            Err(e) => {
                out.push(issue("tree", e.to_string()));
                None
            }
        };

        if self.schemes.is_empty() {
            out.push(issue("schemes", "at least one scheme is required"));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                out.push(issue(format!("schemes[{i}]"), format!("duplicate scheme {s}")));
            }
            if let (Scheme::Symbol, Some(t)) = (s, tree) {
                let n = t.core_count();
                if !n.is_power_of_two() {
                    out.push(issue(
                        format!("schemes[{i}]"),
                        format!("symbol scheme requires the core count N to be a power of 2, got N = {n}"),
                    ));
                }
            }
        }

        if let Some(t) = tree {
            let model = self.energy.model(t.levels());
            if let Err(e) = model.validate(t.levels()) {
                out.push(issue("energy", e.to_string()));
            }
        }

        if let Err(e) = self.network.validate() {
            out.push(issue("network", e.to_string()));
        }
        let neurons = self.network.total_neurons();
        if let Some(bits) = self.tag_bits {
            if bits == 0 || bits > 32 {
                out.push(issue("tag_bits", format!("must be in [1, 32], got {bits}")));
            } else if neurons > 1 << bits {
                out.push(issue("tag_bits", format!("{bits} bits cannot tag {neurons} neurons")));
            }
        }

        let m = &self.mapping;
        if m.capacity == 0 {
            out.push(issue("mapping.capacity", "must be at least 1"));
        } else if let Some(t) = tree {
            if m.file.is_none() && neurons > t.core_count().saturating_mul(m.capacity) {
                out.push(issue(
                    "mapping.capacity",
                    format!("{neurons} neurons do not fit in {} cores of capacity {}", t.core_count(), m.capacity),
                ));
            }
        }
        if !(0.0..=1.0).contains(&m.switch_probability) {
            out.push(issue("mapping.switch_probability", format!("must be in [0, 1], got {}", m.switch_probability)));
        }
        if m.repetitions == 0 && m.file.is_none() {
            out.push(issue("mapping.repetitions", "must be at least 1"));
        }

        if !(0.0..=1.0).contains(&self.trace.rate) {
            out.push(issue("trace.rate", format!("must be in [0, 1], got {}", self.trace.rate)));
        }
        if self.output.runs_csv.is_empty() {
            out.push(issue("output.runs_csv", "must not be empty"));
        }
        if self.output.summary_json.is_empty() {
            out.push(issue("output.summary_json", "must not be empty"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ExperimentError::Invalid(issues))
        }
    }
}

fn issue(path: impl Into<String>, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue { path: path.into(), message: message.into() }
}
