use std::collections::BTreeSet;

use super::{Connectivity, NeuronMapping, SpikeTrace, TrafficError};
use crate::addressing::DestinationSet;

/// One spike to be multicast: the source neuron's tag and the cores that
/// host at least one of its targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeEvent {
    pub timestep: u32,
    pub source: usize,
    pub targets: DestinationSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventSet {
    pub events: Vec<SpikeEvent>,
    /// Spikes from neurons without outgoing synapses.
    pub dropped_empty_fanout: usize,
}

/// Source-tag width for `neurons` neurons: `ceil(log2 neurons)`, at least 10.
pub fn tag_width(neurons: usize) -> usize {
    let bits = neurons.max(1).next_power_of_two().trailing_zeros() as usize;
    bits.max(10)
}

pub fn derive_events(
    trace: &SpikeTrace,
    connectivity: &Connectivity,
    mapping: &NeuronMapping,
    tag_bits: usize,
) -> Result<EventSet, TrafficError> {
    let neurons = connectivity.neurons();
    if mapping.neurons() != neurons {
        return Err(TrafficError::InvalidMapping(format!(
            "mapping covers {} neurons, network has {neurons}",
            mapping.neurons()
        )));
    }
    let mut out = EventSet::default();
    for spike in trace.spikes() {
        let source = spike.neuron_id;
        if source >= neurons {
            return Err(TrafficError::UnknownNeuron { neuron: source, neurons });
        }
        if tag_bits < usize::BITS as usize && source >> tag_bits != 0 {
            return Err(TrafficError::TagOverflow { neuron: source, tag_bits });
        }
        let cores = connectivity
            .targets(source)
            .iter()
            .filter_map(|&t| mapping.core_of(t));
        match DestinationSet::new(cores) {
            Ok(targets) => out.events.push(SpikeEvent { timestep: spike.timestep, source, targets }),
            Err(_) => out.dropped_empty_fanout += 1,
        }
    }
    Ok(out)
}

/// Target-side filter tables: per core, the source tags it accepts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreLut {
    per_core: Vec<BTreeSet<usize>>,
}

impl CoreLut {
    pub fn new(per_core: Vec<BTreeSet<usize>>) -> Self {
        Self { per_core }
    }

    pub fn accepts(&self, core: usize, tag: usize) -> bool {
        self.per_core.get(core).is_some_and(|s| s.contains(&tag))
    }

    pub fn tags(&self, core: usize) -> Option<&BTreeSet<usize>> {
        self.per_core.get(core)
    }

    pub fn cores(&self) -> usize {
        self.per_core.len()
    }
}

/// Core `c` accepts `s` iff some target of `s` is mapped to `c`.
pub fn build_core_luts(connectivity: &Connectivity, mapping: &NeuronMapping) -> CoreLut {
    let mut per_core = vec![BTreeSet::new(); mapping.cores()];
    for source in 0..connectivity.neurons() {
        for &t in connectivity.targets(source) {
            if let Some(c) = mapping.core_of(t) {
                per_core[c].insert(source);
            }
        }
    }
    CoreLut { per_core }
}
