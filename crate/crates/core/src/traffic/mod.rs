//! Synthetic spike workload: layered recurrent network connectivity,
//! capacity-limited neuron-to-core mapping, Bernoulli spike traces, and the
//! conversion of spikes into multicast events and per-core filter tables.

mod events;
mod mapping;
mod network;
mod trace;

use thiserror::Error;

pub use events::{build_core_luts, derive_events, tag_width, CoreLut, EventSet, SpikeEvent};
pub use mapping::{map_neurons, MappingStrategy, NeuronMapping, DEFAULT_CAPACITY, DEFAULT_SWITCH_PROBABILITY};
pub use network::{generate_connectivity, Connectivity, LayerKind, LayerSpec, NetworkSpec};
pub use trace::{synth_trace, Spike, SpikeTrace};

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("layer {layer} has zero neurons")]
    ZeroSizeLayer { layer: usize },
    #[error("network has no layers")]
    NoLayers,
    #[error("connection density must be in (0, 1], got {0}")]
    InvalidDensity(f64),
    #[error("firing rate must be in [0, 1], got {0}")]
    InvalidRate(f64),
    #[error("switch probability must be in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("neuron {neuron} has no outgoing synapses and pruning is disabled")]
    EmptyFanout { neuron: usize },
    #[error("{neurons} neurons do not fit in {cores} cores of capacity {capacity}")]
    InsufficientCapacity { neurons: usize, cores: usize, capacity: usize },
    #[error("neuron {neuron} does not fit in a {tag_bits}-bit source tag")]
    TagOverflow { neuron: usize, tag_bits: usize },
    #[error("neuron {neuron} is not part of the network ({neurons} neurons)")]
    UnknownNeuron { neuron: usize, neurons: usize },
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
