use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GraphTopology, PhasedPermutation};
use crate::error::{Error, Result};

/// Reference dynamics for the edge spins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRule {
    Frozen,
    /// Edge spin `e` moves to edge `e + 1 (mod E)`.
    CyclicShift,
    /// Fixed random permutation of the `2^E` edge configurations.
    SeededRandom { seed: u64 },
}

pub fn edge_rule_permutation(rule: EdgeRule, topology: &GraphTopology) -> Result<PhasedPermutation> {
    let (n, e) = (topology.n_vertices(), topology.n_edges());
    let dim = 1usize << topology.total_bits();
    let vmask = topology.vertex_mask();
    match rule {
        EdgeRule::Frozen => Ok(PhasedPermutation::identity(dim)),
        EdgeRule::CyclicShift => PhasedPermutation::from_fn(dim, |x| {
            let edges = x >> n;
            let rotated = if e == 0 {
                0
            } else {
                ((edges << 1) | (edges >> (e - 1))) & ((1 << e) - 1)
            };
            ((rotated << n) | (x & vmask), 0)
        }),
        EdgeRule::SeededRandom { seed } => {
            let mut perm: Vec<usize> = (0..1 << e).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            PhasedPermutation::from_fn(dim, |x| ((perm[x >> n] << n) | (x & vmask), 0))
        }
    }
}

/// `edge_rule . transfer`, after checking the rule leaves vertex spins alone.
pub fn edge_update_compose(
    transfer: &PhasedPermutation,
    edge_rule: &PhasedPermutation,
    topology: &GraphTopology,
) -> Result<PhasedPermutation> {
    let vmask = topology.vertex_mask();
    if let Some(x) = (0..edge_rule.dim()).find(|&x| edge_rule.target(x) & vmask != x & vmask) {
        return Err(Error::NotEdgeLocal(x));
    }
    transfer.then(edge_rule)
}
