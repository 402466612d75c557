//! Ising spin models evolved as exact phased permutations.
//!
//! Configurations are bit-packed: bit `v` holds vertex spin `v` for
//! `v < N`, bit `N + e` holds the spin on edge `e` (in topology order).
//! A set bit means spin up (`sigma3 = +1`). Phases are powers of `i`
//! stored as exponents mod 4.

mod edge;
mod model_a;
mod model_b;
pub mod verify;

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use edge::{edge_rule_permutation, edge_update_compose, EdgeRule};
pub use model_a::{model_a_evolve, model_a_step_operator, ModelAStep, Schedule, ScheduleKind, ScheduledFlip};
pub use model_b::{
    gauge_check, model_b_transfer, model_b_transfer_ordered, model_b_transfer_with_limit, projector_identity_check,
    vertex_flip_all, vertex_sigma3, GaugeReport, GaugeTransform, DEFAULT_BIT_LIMIT, DENSE_BIT_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphTopology {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphTopology {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n_vertices < 2 {
            return Err(Error::InvalidTopology(format!("need at least 2 vertices, got {n_vertices}")));
        }
        let mut seen = BTreeSet::new();
        for &(i, j) in &edges {
            if i >= j {
                return Err(Error::InvalidTopology(format!("edge ({i}, {j}) must satisfy i < j")));
            }
            if j >= n_vertices {
                return Err(Error::InvalidTopology(format!(
                    "edge ({i}, {j}) out of range for {n_vertices} vertices"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidTopology(format!("duplicate edge ({i}, {j})")));
            }
        }
        Ok(GraphTopology { n_vertices, edges })
    }

    pub fn fully_connected(n: usize) -> Result<Self> {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self::new(n, edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|j| (j - 1, j)).collect())
    }

    /// Closed ring; for two vertices this is the single edge.
    pub fn ring(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|j| (j - 1, j)).collect();
        if n > 2 {
            edges.push((0, n - 1));
        }
        Self::new(n, edges)
    }

    pub fn preset(name: &str, n: usize) -> Result<Self> {
        match name {
            "fully_connected" => Self::fully_connected(n),
            "ring" => Self::ring(n),
            "path" => Self::path(n),
            other => Err(Error::InvalidTopology(format!("unknown preset {other:?}"))),
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn total_bits(&self) -> usize {
        self.n_vertices + self.edges.len()
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let key = (i.min(j), i.max(j));
        self.edges.iter().position(|&e| e == key)
    }

    pub fn vertex_mask(&self) -> usize {
        (1 << self.n_vertices) - 1
    }

    pub fn edge_bit(&self, e: usize) -> usize {
        1 << (self.n_vertices + e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    pub vertex_bits: Vec<bool>,
    pub edge_bits: Vec<bool>,
}

impl SpinConfiguration {
    pub fn from_index(index: usize, n_vertices: usize, n_edges: usize) -> Self {
        let bit = |k: usize| index >> k & 1 == 1;
        SpinConfiguration {
            vertex_bits: (0..n_vertices).map(bit).collect(),
            edge_bits: (n_vertices..n_vertices + n_edges).map(bit).collect(),
        }
    }

    pub fn basis_index(&self) -> usize {
        self.vertex_bits
            .iter()
            .chain(&self.edge_bits)
            .enumerate()
            .map(|(k, &b)| usize::from(b) << k)
            .sum()
    }

    /// Character `k` is spin `k`.
    pub fn vertex_string(&self) -> String {
        bit_string(&self.vertex_bits)
    }

    pub fn edge_string(&self) -> String {
        bit_string(&self.edge_bits)
    }
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Bijection on basis indices with a phase `i^phase[x]` per source index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasedPermutation {
    target: Vec<u32>,
    phase: Vec<u8>,
}

impl PhasedPermutation {
    pub fn new(target: Vec<usize>, phase: Vec<u8>) -> Result<Self> {
        let dim = target.len();
        if phase.len() != dim {
            return Err(Error::NotPermutation(format!(
                "{} targets but {} phases",
                dim,
                phase.len()
            )));
        }
        if dim > u32::MAX as usize {
            return Err(Error::DimensionOverflow { bits: usize::BITS as usize, limit: 32 });
        }
        let mut hit = vec![false; dim];
        for (x, &t) in target.iter().enumerate() {
            if t >= dim {
                return Err(Error::NotPermutation(format!("{x} maps outside [0, {dim})")));
            }
            if std::mem::replace(&mut hit[t], true) {
                return Err(Error::NotPermutation(format!("{t} is hit twice")));
            }
        }
        Ok(PhasedPermutation {
            target: target.into_iter().map(|t| t as u32).collect(),
            phase: phase.into_iter().map(|p| p % 4).collect(),
        })
    }

    /// Builds from `x -> (target, phase)`; the result is validated.
    pub fn from_fn(dim: usize, f: impl Fn(usize) -> (usize, u8)) -> Result<Self> {
        let (target, phase) = (0..dim).map(f).unzip();
        Self::new(target, phase)
    }

    pub fn identity(dim: usize) -> Self {
        PhasedPermutation {
            target: (0..dim as u32).collect(),
            phase: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.target.len()
    }

    pub fn target(&self, x: usize) -> usize {
        self.target[x] as usize
    }

    pub fn phase_exponent(&self, x: usize) -> u8 {
        self.phase[x]
    }

    pub fn apply(&self, x: usize) -> (usize, u8) {
        (self.target[x] as usize, self.phase[x])
    }

    /// `after . self`.
    pub fn then(&self, after: &PhasedPermutation) -> Result<PhasedPermutation> {
        if after.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: after.dim(),
            });
        }
        let (target, phase) = self
            .target
            .iter()
            .zip(&self.phase)
            .map(|(&t, &p)| (after.target[t as usize], (p + after.phase[t as usize]) % 4))
            .unzip();
        Ok(PhasedPermutation { target, phase })
    }

    pub fn inverse(&self) -> PhasedPermutation {
        let mut target = vec![0u32; self.dim()];
        let mut phase = vec![0u8; self.dim()];
        for (x, (&t, &p)) in self.target.iter().zip(&self.phase).enumerate() {
            target[t as usize] = x as u32;
            phase[t as usize] = (4 - p) % 4;
        }
        PhasedPermutation { target, phase }
    }

    /// Multiplies every phase by `i^k`.
    pub fn with_global_phase(&self, k: u8) -> PhasedPermutation {
        PhasedPermutation {
            target: self.target.clone(),
            phase: self.phase.iter().map(|&p| (p + k) % 4).collect(),
        }
    }

    pub fn uniform_phase(&self) -> Option<u8> {
        let first = *self.phase.first()?;
        self.phase.iter().all(|&p| p == first).then_some(first)
    }

    pub fn is_identity_permutation(&self) -> bool {
        self.target.iter().enumerate().all(|(x, &t)| x == t as usize)
    }

    /// Smallest `k >= 1` with `self^k = 1` exactly, searching up to `max`.
    pub fn exact_period(&self, max: usize) -> Option<usize> {
        let mut power = self.clone();
        for k in 1..=max {
            if power.is_identity_permutation() && power.phase.iter().all(|&p| p == 0) {
                return Some(k);
            }
            power = power.then(self).ok()?;
        }
        None
    }

    /// Length of the orbit of `x` including its phase: smallest `k` with
    /// `self^k |x> = |x>`.
    pub fn orbit_period(&self, x: usize, max: usize) -> Option<usize> {
        let (mut y, mut p) = (x, 0u8);
        for k in 1..=max {
            let (t, q) = self.apply(y);
            y = t;
            p = (p + q) % 4;
            if y == x && p == 0 {
                return Some(k);
            }
        }
        None
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            m[(self.target[x] as usize, x)] = phase_value(self.phase[x]);
        }
        m
    }
}

pub fn phase_value(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
