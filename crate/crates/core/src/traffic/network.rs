use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrafficError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Recurrent,
    Feedforward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub size: usize,
    pub kind: LayerKind,
}

/// Layered network shape. Neuron ids are global and layer-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSpec {
    pub layers: Vec<LayerSpec>,
    /// Probability of each candidate synapse.
    pub density: f64,
    /// Connect each feedforward layer to its predecessor at density 1.0.
    pub literal_fc: bool,
    /// Allow neurons whose candidate synapses all came up empty; their
    /// spikes are dropped when events are derived.
    pub prune_empty_fanout: bool,
}

impl Default for NetworkSpec {
    /// Three recurrent then three feedforward layers of 100 neurons.
    fn default() -> Self {
        let layer = |kind| LayerSpec { size: 100, kind };
        Self {
            layers: vec![
                layer(LayerKind::Recurrent),
                layer(LayerKind::Recurrent),
                layer(LayerKind::Recurrent),
                layer(LayerKind::Feedforward),
                layer(LayerKind::Feedforward),
                layer(LayerKind::Feedforward),
            ],
            density: 0.1,
            literal_fc: false,
            prune_empty_fanout: true,
        }
    }
}

impl NetworkSpec {
    pub fn total_neurons(&self) -> usize {
        self.layers.iter().map(|l| l.size).sum()
    }

    /// First neuron id of every layer.
    pub fn layer_offsets(&self) -> Vec<usize> {
        self.layers
            .iter()
            .scan(0, |acc, l| {
                let start = *acc;
                *acc += l.size;
                Some(start)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), TrafficError> {
        if self.layers.is_empty() {
            return Err(TrafficError::NoLayers);
        }
        if let Some(layer) = self.layers.iter().position(|l| l.size == 0) {
            return Err(TrafficError::ZeroSizeLayer { layer });
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(TrafficError::InvalidDensity(self.density));
        }
        Ok(())
    }
}

/// Outgoing synapse targets per source neuron, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connectivity {
    targets: Vec<Vec<usize>>,
}

impl Connectivity {
    pub fn new(targets: Vec<Vec<usize>>) -> Self {
        Self { targets }
    }

    pub fn neurons(&self) -> usize {
        self.targets.len()
    }

    pub fn targets(&self, source: usize) -> &[usize] {
        self.targets.get(source).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn synapse_count(&self) -> usize {
        self.targets.iter().map(Vec::len).sum()
    }
}

/// Recurrent layers draw intra-layer synapses (no self loops); every layer
/// draws synapses onto the next one.
pub fn generate_connectivity(spec: &NetworkSpec, seed: u64) -> Result<Connectivity, TrafficError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets = spec.layer_offsets();
    let mut targets = vec![Vec::new(); spec.total_neurons()];
    for (li, layer) in spec.layers.iter().enumerate() {
        let start = offsets[li];
        let next = spec.layers.get(li + 1).map(|nl| {
            let p = if spec.literal_fc && nl.kind == LayerKind::Feedforward {
                1.0
            } else {
                spec.density
            };
            (offsets[li + 1], nl.size, p)
        });
        for src in start..start + layer.size {
            let mut candidates = 0;
            let out = &mut targets[src];
            if layer.kind == LayerKind::Recurrent {
                for dst in start..start + layer.size {
                    if dst != src {
                        candidates += 1;
                        if rng.gen_bool(spec.density) {
                            out.push(dst);
                        }
                    }
                }
            }
            if let Some((nstart, nsize, p)) = next {
                for dst in nstart..nstart + nsize {
                    candidates += 1;
                    if rng.gen_bool(p) {
                        out.push(dst);
                    }
                }
            }
            if out.is_empty() && candidates > 0 && !spec.prune_empty_fanout {
                return Err(TrafficError::EmptyFanout { neuron: src });
            }
        }
    }
    Ok(Connectivity { targets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_bipartite_at_full_density() {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec { size: 3, kind: LayerKind::Feedforward },
                LayerSpec { size: 3, kind: LayerKind::Feedforward },
            ],
            density: 1.0,
            ..NetworkSpec::default()
        };
        let c = generate_connectivity(&spec, 1).unwrap();
        for src in 0..3 {
            assert_eq!(c.targets(src), &[3, 4, 5]);
        }
        for src in 3..6 {
            assert!(c.targets(src).is_empty());
        }
    }

    #[test]
    fn fanout_within_binomial_bounds() {
        let spec = NetworkSpec::default();
        let c = generate_connectivity(&spec, 7).unwrap();
        let offsets = spec.layer_offsets();
        for (li, layer) in spec.layers.iter().enumerate() {
            let mut candidates = 0usize;
            if layer.kind == LayerKind::Recurrent {
                candidates += layer.size - 1;
            }
            if let Some(next) = spec.layers.get(li + 1) {
                candidates += next.size;
            }
            let mean = candidates as f64 * spec.density;
            let sigma = (candidates as f64 * spec.density * (1.0 - spec.density)).sqrt();
            for src in offsets[li]..offsets[li] + layer.size {
                let f = c.targets(src).len() as f64;
                assert!((f - mean).abs() <= 5.0 * sigma, "neuron {src}: {f} vs {mean}");
            }
        }
    }

    #[test]
    fn recurrent_edges_stay_in_layer_without_self_loops() {
        let spec = NetworkSpec::default();
        let c = generate_connectivity(&spec, 3).unwrap();
        for src in 0..100 {
            for &t in c.targets(src) {
                assert_ne!(t, src);
                assert!(t < 200);
            }
        }
        // last feedforward layer has no outgoing synapses
        for src in 500..600 {
            assert!(c.targets(src).is_empty());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let spec = NetworkSpec::default();
        assert_eq!(
            generate_connectivity(&spec, 11).unwrap(),
            generate_connectivity(&spec, 11).unwrap()
        );
        assert_ne!(
            generate_connectivity(&spec, 11).unwrap(),
            generate_connectivity(&spec, 12).unwrap()
        );
    }

    #[test]
    fn literal_fc_connects_feedforward_layers_fully() {
        let spec = NetworkSpec { literal_fc: true, ..NetworkSpec::default() };
        let c = generate_connectivity(&spec, 5).unwrap();
        // layer 2 (recurrent) -> layer 3 (feedforward) is complete
        for src in 200..300 {
            let into_next = c.targets(src).iter().filter(|&&t| (300..400).contains(&t)).count();
            assert_eq!(into_next, 100);
        }
    }

    #[test]
    fn sparse_without_pruning_is_rejected() {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec { size: 50, kind: LayerKind::Feedforward },
                LayerSpec { size: 2, kind: LayerKind::Feedforward },
            ],
            density: 1e-6,
            prune_empty_fanout: false,
            ..NetworkSpec::default()
        };
        assert!(matches!(generate_connectivity(&spec, 0), Err(TrafficError::EmptyFanout { .. })));
        let pruned = NetworkSpec { prune_empty_fanout: true, ..spec };
        assert!(generate_connectivity(&pruned, 0).is_ok());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = NetworkSpec::default();
        spec.layers[2].size = 0;
        assert!(matches!(generate_connectivity(&spec, 0), Err(TrafficError::ZeroSizeLayer { layer: 2 })));
        let spec = NetworkSpec { density: 0.0, ..NetworkSpec::default() };
        assert!(matches!(generate_connectivity(&spec, 0), Err(TrafficError::InvalidDensity(_))));
        let spec = NetworkSpec { layers: vec![], ..NetworkSpec::default() };
        assert!(matches!(generate_connectivity(&spec, 0), Err(TrafficError::NoLayers)));
    }
}
