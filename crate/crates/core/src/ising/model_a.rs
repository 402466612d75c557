use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{GraphTopology, PhasedPermutation, SpinConfiguration};
use crate::error::{Error, Result};

/// One-step map `-i c sigma1^(i) sigma1^(j)` on the `2^N` vertex configurations.
pub fn model_a_step_operator(topology: &GraphTopology, edge: (usize, usize), sign: i8) -> Result<PhasedPermutation> {
    let (i, j) = edge;
    if i == j || topology.edge_index(i, j).is_none() {
        return Err(Error::EdgeNotInTopology(i, j));
    }
    let phase = match sign {
        1 => 3,
        -1 => 1,
        other => return Err(Error::InvalidParameter(format!("sign must be +-1, got {other}"))),
    };
    let mask = (1 << i) | (1 << j);
    let dim = 1usize << topology.n_vertices();
    PhasedPermutation::from_fn(dim, |x| (x ^ mask, phase))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduledFlip {
    pub edge: (usize, usize),
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// Cycles through the flips.
    Periodic,
    /// Draws uniformly from the flips with a ChaCha8 stream.
    SeededRandom { seed: u64 },
    /// Uses the flips in order, once.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub flips: Vec<ScheduledFlip>,
}

impl Schedule {
    pub fn new(kind: ScheduleKind, flips: Vec<ScheduledFlip>) -> Result<Self> {
        if flips.is_empty() {
            return Err(Error::InvalidSchedule("no active edge at any step".into()));
        }
        if let Some(f) = flips.iter().find(|f| f.sign != 1 && f.sign != -1) {
            return Err(Error::InvalidSchedule(format!("sign {} is not +-1", f.sign)));
        }
        Ok(Schedule { kind, flips })
    }

    pub fn periodic(edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(
            ScheduleKind::Periodic,
            edges.iter().map(|&edge| ScheduledFlip { edge, sign: 1 }).collect(),
        )
    }

    pub fn validate(&self, topology: &GraphTopology) -> Result<()> {
        for f in &self.flips {
            let (i, j) = f.edge;
            if i == j || topology.edge_index(i, j).is_none() {
                return Err(Error::EdgeNotInTopology(i, j));
            }
        }
        Ok(())
    }

    /// The active flip at each of the first `steps` steps.
    pub fn expand(&self, steps: usize) -> Result<Vec<ScheduledFlip>> {
        match self.kind {
            ScheduleKind::Periodic => Ok((0..steps).map(|k| self.flips[k % self.flips.len()]).collect()),
            ScheduleKind::SeededRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..steps)
                    .map(|_| self.flips[rng.gen_range(0..self.flips.len())])
                    .collect())
            }
            ScheduleKind::Explicit => {
                if steps > self.flips.len() {
                    return Err(Error::ScheduleExhausted(self.flips.len()));
                }
                Ok(self.flips[..steps].to_vec())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelAStep {
    pub step: usize,
    pub config: SpinConfiguration,
    /// Accumulated phase exponent mod 4.
    pub phase_exponent: u8,
}

/// Exact trajectory of a vertex configuration; returns `steps + 1` entries.
pub fn model_a_evolve(
    config: &SpinConfiguration,
    topology: &GraphTopology,
    schedule: &Schedule,
    steps: usize,
) -> Result<Vec<ModelAStep>> {
    if config.vertex_bits.len() != topology.n_vertices() || !config.edge_bits.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: topology.n_vertices(),
            found: config.vertex_bits.len() + config.edge_bits.len(),
        });
    }
    schedule.validate(topology)?;
    let flips = schedule.expand(steps)?;
    let n = topology.n_vertices();
    let mut x = config.basis_index();
    let mut phase = 0u8;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(ModelAStep {
        step: 0,
        config: config.clone(),
        phase_exponent: 0,
    });
    for (k, f) in flips.iter().enumerate() {
        x ^= (1 << f.edge.0) | (1 << f.edge.1);
        phase = (phase + if f.sign == 1 { 3 } else { 1 }) % 4;
        out.push(ModelAStep {
            step: k + 1,
            config: SpinConfiguration::from_index(x, n, 0),
            phase_exponent: phase,
        });
    }
    Ok(out)
}
