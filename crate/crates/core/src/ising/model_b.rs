use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{GraphTopology, PhasedPermutation};
use crate::error::{Error, Result};

pub const DEFAULT_BIT_LIMIT: usize = 24;
/// Largest configuration space for dense transforms in `gauge_check`.
pub const DENSE_BIT_LIMIT: usize = 12;

/// One-step map `-i H_B`: every edge whose spin is up flips its two vertices.
pub fn model_b_transfer(topology: &GraphTopology) -> Result<PhasedPermutation> {
    model_b_transfer_with_limit(topology, DEFAULT_BIT_LIMIT)
}

pub fn model_b_transfer_with_limit(topology: &GraphTopology, limit: usize) -> Result<PhasedPermutation> {
    let order: Vec<usize> = (0..topology.n_edges()).collect();
    build(topology, &order, limit)
}

/// Same map with the edge factors multiplied in the given order.
pub fn model_b_transfer_ordered(topology: &GraphTopology, order: &[usize]) -> Result<PhasedPermutation> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..topology.n_edges()).collect::<Vec<_>>() {
        return Err(Error::InvalidParameter("order must list every edge exactly once".into()));
    }
    build(topology, order, DEFAULT_BIT_LIMIT)
}

fn build(topology: &GraphTopology, order: &[usize], limit: usize) -> Result<PhasedPermutation> {
    let bits = topology.total_bits();
    if bits > limit {
        return Err(Error::DimensionOverflow { bits, limit });
    }
    let n = topology.n_vertices();
    let edges = topology.edges();
    let mut p = PhasedPermutation::identity(1 << bits).with_global_phase(3);
    for &e in order {
        let (i, j) = edges[e];
        let (gate, mask) = (1 << (n + e), (1 << i) | (1 << j));
        let factor = PhasedPermutation::from_fn(1 << bits, |x| if x & gate != 0 { (x ^ mask, 0) } else { (x, 0) })?;
        p = p.then(&factor)?;
    }
    Ok(p)
}

/// Checks `(+-1/2 [sigma3 +- 1])^k = +-1/2 [sigma3 +- 1]` for both sign choices.
pub fn projector_identity_check(k: u32) -> bool {
    if k == 0 {
        return false;
    }
    let half = Rational64::new(1, 2);
    let sigma3 = [[Rational64::one(), Rational64::zero()], [Rational64::zero(), -Rational64::one()]];
    let one = [[Rational64::one(), Rational64::zero()], [Rational64::zero(), Rational64::one()]];
    [1i64, -1].iter().all(|&s| {
        let s = Rational64::from_integer(s);
        let proj: [[Rational64; 2]; 2] =
            std::array::from_fn(|r| std::array::from_fn(|c| s * half * (sigma3[r][c] + s * one[r][c])));
        let mut power = proj;
        for _ in 1..k {
            power = std::array::from_fn(|r| {
                std::array::from_fn(|c| power[r][0] * proj[0][c] + power[r][1] * proj[1][c])
            });
        }
        power == proj
    })
}

/// Flips every vertex spin, leaves edge spins alone.
pub fn vertex_flip_all(topology: &GraphTopology) -> Result<PhasedPermutation> {
    let mask = topology.vertex_mask();
    PhasedPermutation::from_fn(1 << topology.total_bits(), |x| (x ^ mask, 0))
}

/// `sigma3` on vertex `v`: phase `-1` where that spin is down.
pub fn vertex_sigma3(topology: &GraphTopology, v: usize) -> Result<PhasedPermutation> {
    if v >= topology.n_vertices() {
        return Err(Error::InvalidParameter(format!("vertex {v} out of range")));
    }
    PhasedPermutation::from_fn(1 << topology.total_bits(), |x| (x, if x >> v & 1 == 1 { 0 } else { 2 }))
}

pub enum GaugeTransform {
    Permutation(PhasedPermutation),
    Dense(DMatrix<Complex64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub commutes: bool,
    pub max_commutator: f64,
}

/// Whether `transform` commutes with the Model B one-step map.
pub fn gauge_check(transform: &GaugeTransform, topology: &GraphTopology) -> Result<GaugeReport> {
    let dim = 1usize << topology.total_bits();
    match transform {
        GaugeTransform::Permutation(g) => {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
            }
            let t = model_b_transfer(topology)?;
            let (gt, tg) = (t.then(g)?, g.then(&t)?);
            // Two phased permutations differ by an entry of size at least 1 or
            // a phase mismatch of size |1 - i^k| >= sqrt 2.
            let max_commutator = (0..dim)
                .map(|x| {
                    let (a, b) = (gt.apply(x), tg.apply(x));
                    if a == b {
                        0.0
                    } else if a.0 != b.0 {
                        1.0
                    } else {
                        (super::phase_value(a.1) - super::phase_value(b.1)).norm()
                    }
                })
                .fold(0.0, f64::max);
            Ok(GaugeReport {
                commutes: max_commutator == 0.0,
                max_commutator,
            })
        }
        GaugeTransform::Dense(m) => {
            if topology.total_bits() > DENSE_BIT_LIMIT {
                return Err(Error::DimensionOverflow {
                    bits: topology.total_bits(),
                    limit: DENSE_BIT_LIMIT,
                });
            }
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
            }
            let t = model_b_transfer(topology)?;
            let inv = t.inverse();
            let mut max_commutator: f64 = 0.0;
            for c in 0..dim {
                for r in 0..dim {
                    // (G T)[r][c] = G[r][t(c)] ph(c);  (T G)[r][c] = ph(t^-1(r)) G[t^-1(r)][c]
                    let (tc, pc) = t.apply(c);
                    let k = inv.target(r);
                    let gt = m[(r, tc)] * super::phase_value(pc);
                    let tg = super::phase_value(t.phase_exponent(k)) * m[(k, c)];
                    max_commutator = max_commutator.max((gt - tg).norm());
                }
            }
            Ok(GaugeReport {
                commutes: max_commutator <= 1e-10,
                max_commutator,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_examples() {
        let t = GraphTopology::path(2).unwrap();
        let p = model_b_transfer(&t).unwrap();
        assert_eq!(p.apply(0b1_00), (0b1_11, 3));
        assert_eq!(p.apply(0b0_00), (0b0_00, 3));
        assert_eq!(p.apply(0b1_01), (0b1_10, 3));
    }

    #[test]
    fn edges_down_is_identity() {
        let t = GraphTopology::fully_connected(3).unwrap();
        let p = model_b_transfer(&t).unwrap();
        for x in 0..8 {
            assert_eq!(p.apply(x), (x, 3));
        }
        assert_eq!(p.uniform_phase(), Some(3));
    }

    #[test]
    fn shared_vertex_flips_cancel() {
        // path 0-1-2 with both edges up flips 0 and 2, vertex 1 twice
        let t = GraphTopology::path(3).unwrap();
        let p = model_b_transfer(&t).unwrap();
        assert_eq!(p.apply(0b11_000).0, 0b11_101);
    }

    #[test]
    fn factor_order_is_irrelevant() {
        let t = GraphTopology::fully_connected(4).unwrap();
        let a = model_b_transfer(&t).unwrap();
        let b = model_b_transfer_ordered(&t, &[5, 2, 0, 4, 1, 3]).unwrap();
        assert_eq!(a, b);
        assert!(model_b_transfer_ordered(&t, &[0, 0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn overflow_limit() {
        let t = GraphTopology::fully_connected(6).unwrap();
        assert!(matches!(
            model_b_transfer_with_limit(&t, 12),
            Err(Error::DimensionOverflow { bits: 21, limit: 12 })
        ));
        assert!(model_b_transfer(&GraphTopology::fully_connected(7).unwrap()).is_err());
    }

    #[test]
    fn projector_identity() {
        assert!(projector_identity_check(1));
        assert!(projector_identity_check(2));
        assert!(projector_identity_check(7));
        assert!(!projector_identity_check(0));
    }

    #[test]
    fn gauge_examples() {
        let t = GraphTopology::ring(3).unwrap();
        let flip = gauge_check(&GaugeTransform::Permutation(vertex_flip_all(&t).unwrap()), &t).unwrap();
        assert!(flip.commutes);
        let s3 = gauge_check(&GaugeTransform::Permutation(vertex_sigma3(&t, 1).unwrap()), &t).unwrap();
        assert!(!s3.commutes);
        let id = gauge_check(&GaugeTransform::Dense(DMatrix::identity(64, 64)), &t).unwrap();
        assert!(id.commutes);
        let dense = gauge_check(&GaugeTransform::Dense(vertex_sigma3(&t, 0).unwrap().to_dense()), &t).unwrap();
        assert!(!dense.commutes);
        assert!(gauge_check(&GaugeTransform::Dense(DMatrix::identity(8, 8)), &t).is_err());
    }
}
