//! Matrix-level checks of Model B, built independently of the bit-mask engine.
//!
//! The edge factors are assembled from their Pauli-string definition as sparse
//! matrices, multiplied out, and compared with [`model_b_transfer`]. The
//! exponential form is evaluated blockwise over the connected components of
//! the generator's sparsity graph, which keeps every dense eigenproblem small.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::model_b::DENSE_BIT_LIMIT;
use super::{model_b_transfer, GraphTopology, PhasedPermutation};
use crate::error::{Error, Result};

type Local = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn sigma1() -> Local {
    [[ZERO, ONE], [ONE, ZERO]]
}

/// `sigma3` in the bit basis: bit 1 is spin up (+1).
fn sigma3() -> Local {
    [[-ONE, ZERO], [ZERO, ONE]]
}

fn identity() -> Local {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// `s * 1/2 [sigma3 + s 1]`.
fn projector(s: f64) -> Local {
    let (z, one) = (sigma3(), identity());
    std::array::from_fn(|r| std::array::from_fn(|c| s * 0.5 * (z[r][c] + s * one[r][c])))
}

/// Compressed sparse column matrix; entries of each column are sorted by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    ptr: Vec<usize>,
    entries: Vec<(usize, Complex64)>,
}

/// Appends `scratch` as the next column: sorted, duplicates summed, zeros dropped.
fn push_column(entries: &mut Vec<(usize, Complex64)>, ptr: &mut Vec<usize>, scratch: &mut [(usize, Complex64)]) {
    scratch.sort_unstable_by_key(|&(r, _)| r);
    let start = entries.len();
    for &(r, v) in scratch.iter() {
        match entries[start..].last_mut() {
            Some((last, acc)) if *last == r => *acc += v,
            _ => entries.push((r, v)),
        }
    }
    let mut keep = start;
    for k in start..entries.len() {
        if entries[k].1 != ZERO {
            entries[keep] = entries[k];
            keep += 1;
        }
    }
    entries.truncate(keep);
    ptr.push(entries.len());
}

impl SparseMatrix {
    fn build(dim: usize, mut column: impl FnMut(usize, &mut Vec<(usize, Complex64)>)) -> Self {
        let mut ptr = Vec::with_capacity(dim + 1);
        ptr.push(0);
        let mut entries = Vec::with_capacity(dim);
        let mut scratch = Vec::new();
        for c in 0..dim {
            scratch.clear();
            column(c, &mut scratch);
            push_column(&mut entries, &mut ptr, &mut scratch);
        }
        SparseMatrix { dim, ptr, entries }
    }

    fn col(&self, c: usize) -> &[(usize, Complex64)] {
        &self.entries[self.ptr[c]..self.ptr[c + 1]]
    }

    fn columns(&self) -> impl Iterator<Item = &[(usize, Complex64)]> {
        (0..self.dim).map(|c| self.col(c))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::build(dim, |_, _| {})
    }

    pub fn identity(dim: usize) -> Self {
        Self::build(dim, |c, out| out.push((c, ONE)))
    }

    /// Tensor product of one 2x2 operator per bit (`ops[k]` acts on bit `k`).
    pub fn pauli_string(ops: &[Local]) -> Self {
        // nonzero entries of each column of each local operator
        let local: Vec<[Vec<(usize, Complex64)>; 2]> = ops
            .iter()
            .map(|op| std::array::from_fn(|x| (0..2).map(|r| (r, op[r][x])).filter(|&(_, v)| v != ZERO).collect()))
            .collect();
        let mut next = Vec::new();
        Self::build(1usize << ops.len(), |x, terms| {
            terms.push((0usize, ONE));
            for (k, col) in local.iter().enumerate() {
                let entries = &col[x >> k & 1];
                if let [(r, v)] = entries[..] {
                    for (row, coef) in terms.iter_mut() {
                        *row |= r << k;
                        if v != ONE {
                            *coef *= v;
                        }
                    }
                    continue;
                }
                next.clear();
                for &(row, coef) in terms.iter() {
                    next.extend(entries.iter().map(|&(r, v)| (row | r << k, coef * v)));
                }
                std::mem::swap(terms, &mut next);
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let c = self.col(col);
        c.binary_search_by_key(&row, |&(r, _)| r).map_or(ZERO, |k| c[k].1)
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        Self::build(self.dim, |c, out| {
            out.extend_from_slice(self.col(c));
            out.extend_from_slice(other.col(c));
        })
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        Self::build(self.dim, |c, out| {
            for &(k, v) in other.col(c) {
                out.extend(self.col(k).iter().map(|&(r, w)| (r, w * v)));
            }
        })
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut rows = vec![Vec::new(); self.dim];
        for (c, col) in self.columns().enumerate() {
            for &(r, v) in col {
                rows[r].push((c, v.conj()));
            }
        }
        Self::build(self.dim, |c, out| out.append(&mut rows[c]))
    }

    pub fn scale(&self, s: Complex64) -> SparseMatrix {
        Self::build(self.dim, |c, out| out.extend(self.col(c).iter().map(|&(r, v)| (r, v * s))))
    }

    /// One entry of modulus exactly 1 in every row and column.
    pub fn is_phased_permutation(&self) -> bool {
        let mut row_hits = vec![0u32; self.dim];
        for col in self.columns() {
            let [(r, v)] = col[..] else {
                return false;
            };
            if v.norm_sqr() != 1.0 {
                return false;
            }
            row_hits[r] += 1;
        }
        row_hits.iter().all(|&h| h == 1)
    }

    pub fn to_phased_permutation(&self) -> Result<PhasedPermutation> {
        if !self.is_phased_permutation() {
            return Err(Error::NotPermutation("matrix is not a phased permutation".into()));
        }
        PhasedPermutation::from_fn(self.dim, |x| {
            let (r, v) = self.col(x)[0];
            let k = [ONE, Complex64::i(), -ONE, -Complex64::i()]
                .iter()
                .position(|p| *p == v)
                .unwrap_or(4) as u8;
            (r, k)
        })
    }

    /// Connected components of the symmetric sparsity graph.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (c, col) in self.columns().enumerate() {
            for &(r, _) in col {
                let (a, b) = (root(&mut parent, r), root(&mut parent, c));
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.dim {
            let r = root(&mut parent, x);
            groups.entry(r).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

fn check_bits(topology: &GraphTopology) -> Result<()> {
    let bits = topology.total_bits();
    if bits > DENSE_BIT_LIMIT {
        return Err(Error::DimensionOverflow {
            bits,
            limit: DENSE_BIT_LIMIT,
        });
    }
    Ok(())
}

/// `1/2 [sigma3 + 1]^(e) sigma1^(i) sigma1^(j) - 1/2 [sigma3 - 1]^(e)`.
pub fn edge_factor(topology: &GraphTopology, e: usize) -> SparseMatrix {
    let n = topology.n_vertices();
    let (i, j) = topology.edges()[e];
    let mut up = vec![identity(); topology.total_bits()];
    up[n + e] = projector(1.0);
    up[i] = sigma1();
    up[j] = sigma1();
    let mut down = vec![identity(); topology.total_bits()];
    down[n + e] = projector(-1.0);
    SparseMatrix::pauli_string(&up).add(&SparseMatrix::pauli_string(&down))
}

/// `-i H_B` as the product of its edge factors.
pub fn model_b_matrix(topology: &GraphTopology) -> Result<SparseMatrix> {
    check_bits(topology)?;
    let mut m = SparseMatrix::identity(1 << topology.total_bits()).scale(-Complex64::i());
    for e in 0..topology.n_edges() {
        m = edge_factor(topology, e).mul(&m);
    }
    Ok(m)
}

/// `sum_e` of the edge factors: the exponent of the exponential form.
pub fn model_b_generator(topology: &GraphTopology) -> Result<SparseMatrix> {
    check_bits(topology)?;
    let mut g = SparseMatrix::zeros(1 << topology.total_bits());
    for e in 0..topology.n_edges() {
        g = g.add(&edge_factor(topology, e));
    }
    Ok(g)
}

/// Max entrywise deviation between `exp(-i pi/2 G)` and `-i H_B` after fitting
/// one global phase.
pub fn verify_exponential_form(topology: &GraphTopology) -> Result<f64> {
    exponential_deviation(&model_b_matrix(topology)?, &model_b_generator(topology)?)
}

fn exponential_deviation(exact: &SparseMatrix, g: &SparseMatrix) -> Result<f64> {
    let blocks = g.blocks();
    let mut block_of = vec![0usize; g.dim()];
    for (b, members) in blocks.iter().enumerate() {
        for &x in members {
            block_of[x] = b;
        }
    }

    let mut exps = Vec::with_capacity(blocks.len());
    for members in &blocks {
        let k = members.len();
        let dense = DMatrix::from_fn(k, k, |r, c| g.get(members[r], members[c]).re);
        let eig = dense.symmetric_eigen();
        let mut scaled = eig.eigenvectors.map(Complex64::from);
        for c in 0..k {
            let f = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_2 * eig.eigenvalues[c]);
            for r in 0..k {
                scaled[(r, c)] *= f;
            }
        }
        exps.push(scaled * eig.eigenvectors.map(Complex64::from).transpose());
    }

    // entries of the exact matrix outside the numeric block structure
    let mut outside: f64 = 0.0;
    let mut overlap = ZERO;
    for (c, col) in exact.columns().enumerate() {
        for &(r, a) in col {
            if block_of[r] != block_of[c] {
                outside = outside.max(a.norm());
                continue;
            }
            let members = &blocks[block_of[c]];
            let (rr, cc) = (pos(members, r), pos(members, c));
            overlap += exps[block_of[c]][(rr, cc)] * a.conj();
        }
    }
    let fit = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };

    let mut deviation = outside;
    for (members, e) in blocks.iter().zip(&exps) {
        for (cc, &c) in members.iter().enumerate() {
            for (rr, &r) in members.iter().enumerate() {
                let d = (e[(rr, cc)] / fit - exact.get(r, c)).norm();
                deviation = deviation.max(d);
            }
        }
    }
    Ok(deviation)
}

fn pos(members: &[usize], x: usize) -> usize {
    members.binary_search(&x).expect("member of block")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelBVerification {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub phased_permutation: bool,
    pub unitary: bool,
    pub matches_engine: bool,
    pub exponential_deviation: f64,
}

impl ModelBVerification {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.phased_permutation && self.unitary && self.matches_engine && self.exponential_deviation <= tolerance
    }
}

pub fn verify_model_b(topology: &GraphTopology) -> Result<ModelBVerification> {
    let m = model_b_matrix(topology)?;
    let unitary = m.adjoint().mul(&m) == SparseMatrix::identity(m.dim());
    let phased_permutation = m.is_phased_permutation();
    let matches_engine = phased_permutation && m.to_phased_permutation()? == model_b_transfer(topology)?;
    Ok(ModelBVerification {
        n_vertices: topology.n_vertices(),
        n_edges: topology.n_edges(),
        phased_permutation,
        unitary,
        matches_engine,
        exponential_deviation: exponential_deviation(&m, &model_b_generator(topology)?)?,
    })
}

/// Every labelled graph with `N >= 2` vertices and `N + E <= max_bits`.
pub fn all_topologies(max_bits: usize) -> Vec<GraphTopology> {
    let mut out = Vec::new();
    for n in 2..=max_bits {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let max_e = (max_bits - n).min(pairs.len());
        let mut chosen = Vec::new();
        subsets(&pairs, 0, max_e, &mut chosen, &mut |edges| {
            out.push(GraphTopology::new(n, edges.to_vec()).expect("valid by construction"));
        });
    }
    out
}

fn subsets(
    pairs: &[(usize, usize)],
    from: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    emit: &mut impl FnMut(&[(usize, usize)]),
) {
    emit(chosen);
    if left == 0 {
        return;
    }
    for k in from..pairs.len() {
        chosen.push(pairs[k]);
        subsets(pairs, k + 1, left - 1, chosen, emit);
        chosen.pop();
    }
}
