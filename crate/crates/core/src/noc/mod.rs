//! Hierarchical tree network-on-chip: topology, per-scheme routing, LUT
//! filtering at the cores and energy accounting.
//!
//! The simulator is untimed. Events are processed one at a time in trace
//! order with no queueing or contention.

mod energy;
mod route;
mod sim;
mod topology;

use thiserror::Error;

use crate::addressing::AddressError;

pub use energy::{EnergyModel, DEFAULT_FILTER_ENERGY, DEFAULT_LEAF_LINK_ENERGY, DEFAULT_LEVEL_RATIO};
pub use route::{
    route_multicast, route_unicast_batch, Direction, LinkTraversal, Packet, RouteOutcome,
    SwitchDecision, Turnaround,
};
pub use sim::{
    count_direction, event_address, filter_at_core, routing_energy_from_log, simulate,
    FilterVerdict, LoggedTraversal, SimOptions, SimOutcome, SimReport, Workload,
};
pub use topology::{build_tree, LinkId, NodeId, Switch, SwitchId, Topology};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Address(#[from] AddressError),
    #[error("source core {core} out of range for {cores} cores")]
    SourceOutOfRange { core: usize, cores: usize },
    #[error("unicast lists are routed with route_unicast_batch")]
    NotMulticast,
    #[error("neuron {neuron} is not mapped to a core")]
    UnmappedNeuron { neuron: usize },
    #[error("invalid energy model: {0}")]
    InvalidEnergy(String),
}
