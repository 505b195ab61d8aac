use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{NetworkSpec, TrafficError};
use crate::addressing::TreeConfig;

pub const DEFAULT_CAPACITY: usize = 40;
pub const DEFAULT_SWITCH_PROBABILITY: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MappingStrategy {
    /// Fill cores in index order, moving on when a core is full.
    Sequential,
    /// Like `Sequential`, but before each neuron jump to a random other
    /// non-full core with the given probability.
    RandomSwitch { probability: f64 },
}

/// Neuron id -> core index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeuronMapping {
    assignment: Vec<usize>,
    cores: usize,
    capacity: usize,
}

impl NeuronMapping {
    /// Validates core range and per-core capacity.
    pub fn from_assignment(
        assignment: Vec<usize>,
        cores: usize,
        capacity: usize,
    ) -> Result<Self, TrafficError> {
        let mut occupancy = vec![0usize; cores];
        for (neuron, &core) in assignment.iter().enumerate() {
            if core >= cores {
                return Err(TrafficError::InvalidMapping(format!(
                    "neuron {neuron} mapped to core {core}, only {cores} cores"
                )));
            }
            occupancy[core] += 1;
            if occupancy[core] > capacity {
                return Err(TrafficError::InvalidMapping(format!(
                    "core {core} exceeds capacity {capacity}"
                )));
            }
        }
        Ok(Self { assignment, cores, capacity })
    }

    pub fn core_of(&self, neuron: usize) -> Option<usize> {
        self.assignment.get(neuron).copied()
    }

    pub fn neurons(&self) -> usize {
        self.assignment.len()
    }

    pub fn cores(&self) -> usize {
        self.cores
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn occupancy(&self) -> Vec<usize> {
        let mut occ = vec![0; self.cores];
        for &c in &self.assignment {
            occ[c] += 1;
        }
        occ
    }

    /// `neuron_id,core_index` lines under a header of the same names.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TrafficError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["neuron_id", "core_index"])?;
        for (n, c) in self.assignment.iter().enumerate() {
            out.write_record([n.to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the format written by [`NeuronMapping::write_csv`]. Every
    /// neuron in `0..max_id+1` must appear exactly once.
    pub fn read_csv<R: Read>(r: R, cores: usize, capacity: usize) -> Result<Self, TrafficError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for rec in rdr.deserialize() {
            pairs.push(rec?);
        }
        pairs.sort_unstable();
        let mut assignment = Vec::with_capacity(pairs.len());
        for (i, &(n, c)) in pairs.iter().enumerate() {
            if n != i {
                return Err(TrafficError::InvalidMapping(format!(
                    "neuron ids must be 0..{} without gaps or repeats (at {n})",
                    pairs.len()
                )));
            }
            assignment.push(c);
        }
        Self::from_assignment(assignment, cores, capacity)
    }
}

pub fn map_neurons(
    spec: &NetworkSpec,
    cfg: &TreeConfig,
    strategy: MappingStrategy,
    capacity: usize,
    seed: u64,
) -> Result<NeuronMapping, TrafficError> {
    let neurons = spec.total_neurons();
    let cores = cfg.core_count();
    if capacity == 0 || neurons > cores.saturating_mul(capacity) {
        return Err(TrafficError::InsufficientCapacity { neurons, cores, capacity });
    }
    let switch_probability = match strategy {
        MappingStrategy::Sequential => None,
        MappingStrategy::RandomSwitch { probability } => {
            if !(0.0..=1.0).contains(&probability) {
                return Err(TrafficError::InvalidProbability(probability));
            }
            Some(probability)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut occupancy = vec![0usize; cores];
    let mut assignment = Vec::with_capacity(neurons);
    let mut current = 0usize;
    let mut open: Vec<usize> = Vec::with_capacity(cores);
    for _ in 0..neurons {
        if let Some(p) = switch_probability {
            if rng.gen_bool(p) {
                open.clear();
                open.extend((0..cores).filter(|&c| c != current && occupancy[c] < capacity));
                if let Some(&c) = open.choose(&mut rng) {
                    current = c;
                }
            }
        }
        while occupancy[current] >= capacity {
            current = (current + 1) % cores;
        }
        occupancy[current] += 1;
        assignment.push(current);
    }
    Ok(NeuronMapping { assignment, cores, capacity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{LayerKind, LayerSpec};

    fn flat(n: usize) -> NetworkSpec {
        NetworkSpec {
            layers: vec![LayerSpec { size: n, kind: LayerKind::Feedforward }],
            ..NetworkSpec::default()
        }
    }

    #[test]
    fn sequential_fills_in_order() {
        let cfg = TreeConfig::new(4, 2).unwrap();
        let m = map_neurons(&NetworkSpec::default(), &cfg, MappingStrategy::Sequential, 40, 0).unwrap();
        let occ = m.occupancy();
        assert_eq!(&occ[..15], &[40; 15]);
        assert_eq!(occ[15], 0);
        assert_eq!(m.core_of(0), Some(0));
        assert_eq!(m.core_of(39), Some(0));
        assert_eq!(m.core_of(40), Some(1));
        assert_eq!(m.core_of(599), Some(14));
    }

    #[test]
    fn unit_capacity_is_a_bijection() {
        let cfg = TreeConfig::new(4, 2).unwrap();
        for strategy in [MappingStrategy::Sequential, MappingStrategy::RandomSwitch { probability: 0.5 }] {
            let m = map_neurons(&flat(16), &cfg, strategy, 1, 9).unwrap();
            let mut cores = m.assignment().to_vec();
            cores.sort_unstable();
            assert_eq!(cores, (0..16).collect::<Vec<_>>());
        }
    }

    #[test]
    fn capacity_bound_error() {
        let cfg = TreeConfig::new(15, 1).unwrap();
        assert!(matches!(
            map_neurons(&flat(601), &cfg, MappingStrategy::Sequential, 40, 0),
            Err(TrafficError::InsufficientCapacity { neurons: 601, cores: 15, capacity: 40 })
        ));
        assert!(map_neurons(&flat(600), &cfg, MappingStrategy::Sequential, 40, 0).is_ok());
    }

    #[test]
    fn random_switch_respects_capacity_and_seed() {
        let cfg = TreeConfig::new(4, 2).unwrap();
        let spec = NetworkSpec::default();
        let strategy = MappingStrategy::RandomSwitch { probability: 0.05 };
        for seed in 0..50 {
            let m = map_neurons(&spec, &cfg, strategy, 40, seed).unwrap();
            assert!(m.occupancy().iter().all(|&o| o <= 40));
            assert_eq!(m.neurons(), 600);
            assert_eq!(m, map_neurons(&spec, &cfg, strategy, 40, seed).unwrap());
        }
        let a = map_neurons(&spec, &cfg, strategy, 40, 1).unwrap();
        let b = map_neurons(&spec, &cfg, strategy, 40, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn csv_round_trip() {
        let cfg = TreeConfig::new(4, 2).unwrap();
        let strategy = MappingStrategy::RandomSwitch { probability: 0.2 };
        let m = map_neurons(&NetworkSpec::default(), &cfg, strategy, 40, 3).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        assert!(buf.starts_with(b"neuron_id,core_index\n"));
        let back = NeuronMapping::read_csv(buf.as_slice(), 16, 40).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_bad_assignments() {
        assert!(NeuronMapping::from_assignment(vec![0, 0, 0], 2, 2).is_err());
        assert!(NeuronMapping::from_assignment(vec![0, 5], 2, 2).is_err());
        let gap = "neuron_id,core_index\n0,1\n2,1\n";
        assert!(NeuronMapping::read_csv(gap.as_bytes(), 4, 40).is_err());
    }
}
