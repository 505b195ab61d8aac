use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{NetworkSpec, TrafficError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Spike {
    pub timestep: u32,
    pub neuron_id: usize,
}

/// Firing list per timestep, ordered by (timestep, neuron).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeTrace {
    steps: u32,
    spikes: Vec<Spike>,
}

impl SpikeTrace {
    /// Spikes must be nondecreasing in timestep and inside `[0, steps)`.
    pub fn new(steps: u32, spikes: Vec<Spike>) -> Result<Self, TrafficError> {
        if let Some(s) = spikes.iter().find(|s| s.timestep >= steps) {
            return Err(TrafficError::InvalidTrace(format!(
                "timestep {} outside [0, {steps})",
                s.timestep
            )));
        }
        if spikes.windows(2).any(|w| w[1].timestep < w[0].timestep) {
            return Err(TrafficError::InvalidTrace("timesteps must be nondecreasing".into()));
        }
        Ok(Self { steps, spikes })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn spikes(&self) -> &[Spike] {
        &self.spikes
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TrafficError> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(["timestep", "neuron_id"])?;
        for s in &self.spikes {
            out.serialize(s)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `steps` defaults to one past the last spike's timestep.
    pub fn read_csv<R: Read>(r: R, steps: Option<u32>) -> Result<Self, TrafficError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["timestep", "neuron_id"] {
            return Err(TrafficError::InvalidTrace(format!(
                "expected header timestep,neuron_id, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let spikes = rdr.deserialize().collect::<Result<Vec<Spike>, _>>()?;
        let steps = steps.unwrap_or_else(|| spikes.last().map_or(0, |s| s.timestep + 1));
        Self::new(steps, spikes)
    }
}

/// Independent Bernoulli firing per neuron per timestep.
pub fn synth_trace(
    spec: &NetworkSpec,
    steps: u32,
    rate: f64,
    seed: u64,
) -> Result<SpikeTrace, TrafficError> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(TrafficError::InvalidRate(rate));
    }
    let neurons = spec.total_neurons();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spikes = Vec::new();
    for timestep in 0..steps {
        for neuron_id in 0..neurons {
            if rng.gen_bool(rate) {
                spikes.push(Spike { timestep, neuron_id });
            }
        }
    }
    Ok(SpikeTrace { steps, spikes })
}
