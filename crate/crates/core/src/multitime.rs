//! Bipartite multi-time propagation on the `(n1, n2)` lattice.
//!
//! The bipartite equation of motion
//!
//! ```text
//! [psi(n1+1, n2) - psi(n1-1, n2)] + [psi(n1, n2+1) - psi(n1, n2-1)] = -i H psi(n1, n2)
//! ```
//!
//! can be solved as an updating rule in several ways: line by line, along
//! anti-diagonals from one extra seed point, or after imposing a
//! synchronization constraint that collapses the two counters into one.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::ca::Trajectory;
use crate::error::{Error, Result};
use crate::gaussian::{mul_neg_i, GaussianIntVector, GaussianMatrix, GaussianRational};
use crate::linalg;

pub type Point = (i64, i64);

/// Sparse field of `d1 * d2`-component values on lattice points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiTimeField {
    dims: (usize, usize),
    values: BTreeMap<Point, GaussianIntVector>,
}

impl MultiTimeField {
    pub fn new(dims: (usize, usize)) -> Self {
        MultiTimeField {
            dims,
            values: BTreeMap::new(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn components(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn insert(&mut self, point: Point, value: GaussianIntVector) -> Result<()> {
        Error::check_dim(self.components(), value.dim())?;
        self.values.insert(point, value);
        Ok(())
    }

    pub fn get(&self, point: Point) -> Option<&GaussianIntVector> {
        self.values.get(&point)
    }

    pub fn contains(&self, point: Point) -> bool {
        self.values.contains_key(&point)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &GaussianIntVector)> {
        self.values.iter()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.values.keys().copied()
    }

    /// Points on the anti-diagonal `n1 + n2 = sum`, ordered by `n1`.
    pub fn diagonal(&self, sum: i64) -> Vec<Point> {
        self.points().filter(|(a, b)| a + b == sum).collect()
    }

    /// Residual of the bipartite equation centred at `point`, when all five
    /// stencil points are populated.
    pub fn residual_at(&self, h: &TensorHamiltonian, (a, b): Point) -> Option<GaussianIntVector> {
        let c = self.get((a, b))?;
        let lhs1 = self.get((a + 1, b))? - self.get((a - 1, b))?;
        let lhs2 = self.get((a, b + 1))? - self.get((a, b - 1))?;
        let lhs = &lhs1 + &lhs2;
        Some(&lhs - &h.apply_neg_i(c))
    }

    /// Centres with a complete stencil and a nonzero residual.
    pub fn residual_violations(&self, h: &TensorHamiltonian) -> Vec<Point> {
        self.points()
            .filter(|&p| self.residual_at(h, p).is_some_and(|r| !r.is_zero()))
            .collect()
    }

    /// Number of centres with a complete stencil.
    pub fn interior_count(&self) -> usize {
        let z = TensorHamiltonian::zero(self.dims);
        self.points().filter(|&p| self.residual_at(&z, p).is_some()).count()
    }
}

/// Product field `psi(n1, n2) = phi1_{n1} (x) phi2_{n2}` over both index ranges.
pub fn product_field(first: &Trajectory, second: &Trajectory) -> MultiTimeField {
    let mut field = MultiTimeField::new((first.model.dim(), second.model.dim()));
    for (i, u) in first.states.iter().enumerate() {
        for (j, v) in second.states.iter().enumerate() {
            let p = (first.start + i as i64, second.start + j as i64);
            field.insert(p, u.kron(v)).expect("dimensions agree");
        }
    }
    field
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TensorKind {
    /// One Hamiltonian per factor, expanded as `sum_k 1 (x) .. (x) H_k (x) .. (x) 1`.
    Separable(Vec<GaussianMatrix>),
    General,
}

/// Hamiltonian on a tensor product of `k` factor spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorHamiltonian {
    factor_dims: Vec<usize>,
    kind: TensorKind,
    matrix: GaussianMatrix,
}

fn first_non_adjoint(m: &GaussianMatrix) -> Option<(usize, usize)> {
    let n = m.dim();
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .find(|&(r, c)| m[(r, c)] != m[(c, r)].conj())
}

impl TensorHamiltonian {
    pub fn separable(factors: Vec<GaussianMatrix>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("need at least one factor".into()));
        }
        for f in &factors {
            if let Some((row, col)) = first_non_adjoint(f) {
                return Err(Error::SymmetryViolation {
                    matrix: "H",
                    row,
                    col,
                });
            }
        }
        let factor_dims: Vec<usize> = factors.iter().map(GaussianMatrix::dim).collect();
        let total: usize = factor_dims.iter().product();
        let mut matrix = GaussianMatrix::zeros(total);
        for (k, f) in factors.iter().enumerate() {
            let left: usize = factor_dims[..k].iter().product();
            let right: usize = factor_dims[k + 1..].iter().product();
            let term = GaussianMatrix::identity(left)
                .kron(f)
                .kron(&GaussianMatrix::identity(right));
            matrix = &matrix + &term;
        }
        Ok(TensorHamiltonian {
            factor_dims,
            kind: TensorKind::Separable(factors),
            matrix,
        })
    }

    pub fn general(factor_dims: Vec<usize>, matrix: GaussianMatrix) -> Result<Self> {
        let total: usize = factor_dims.iter().product();
        Error::check_dim(total, matrix.dim())?;
        if let Some((row, col)) = first_non_adjoint(&matrix) {
            return Err(Error::SymmetryViolation {
                matrix: "H",
                row,
                col,
            });
        }
        Ok(TensorHamiltonian {
            factor_dims,
            kind: TensorKind::General,
            matrix,
        })
    }

    pub fn zero(dims: (usize, usize)) -> Self {
        Self::general(vec![dims.0, dims.1], GaussianMatrix::zeros(dims.0 * dims.1))
            .expect("zero is self-adjoint")
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn kind(&self) -> &TensorKind {
        &self.kind
    }

    pub fn matrix(&self) -> &GaussianMatrix {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `-i H v`.
    pub fn apply_neg_i(&self, v: &GaussianIntVector) -> GaussianIntVector {
        self.matrix.mul_vec(v).mul_neg_i()
    }

    fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.factor_dims[..] {
            [d1, d2] => Ok((d1, d2)),
            _ => Err(Error::GeometryMismatch(format!(
                "lattice propagation is bipartite; Hamiltonian has {} factors",
                self.factor_dims.len()
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    N1,
    N2,
}

/// Transverse handling for line propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transverse {
    /// Each new line loses one point at either end.
    Causal,
    /// Transverse coordinate wraps with the given period.
    Periodic(i64),
}

fn to_point(axis: Axis, t: i64, u: i64) -> Point {
    match axis {
        Axis::N1 => (t, u),
        Axis::N2 => (u, t),
    }
}

fn split_point(axis: Axis, (a, b): Point) -> (i64, i64) {
    match axis {
        Axis::N1 => (a, b),
        Axis::N2 => (b, a),
    }
}

/// Adds the next line along `axis` in `direction` (+1 or -1).
pub fn propagate_line(
    field: &MultiTimeField,
    h: &TensorHamiltonian,
    axis: Axis,
    direction: i64,
) -> Result<MultiTimeField> {
    propagate_line_with(field, h, axis, direction, Transverse::Causal)
}

pub fn propagate_line_with(
    field: &MultiTimeField,
    h: &TensorHamiltonian,
    axis: Axis,
    direction: i64,
    transverse: Transverse,
) -> Result<MultiTimeField> {
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidParameter(format!("direction must be +-1, got {direction}")));
    }
    Error::check_dim(field.components(), h.total_dim())?;
    if h.bipartite_dims()? != field.dims() {
        return Err(Error::GeometryMismatch("field and Hamiltonian factor dimensions differ".into()));
    }
    let ts = field.points().map(|p| split_point(axis, p).0);
    let front = if direction == 1 { ts.max() } else { ts.min() }
        .ok_or_else(|| Error::GeometryMismatch("empty field".into()))?;
    let back = front - direction;
    let line = |t: i64| -> BTreeMap<i64, &GaussianIntVector> {
        field
            .iter()
            .filter_map(|(&p, v)| {
                let (pt, pu) = split_point(axis, p);
                (pt == t).then_some((pu, v))
            })
            .collect()
    };
    let front_line = line(front);
    let back_line = line(back);
    if back_line.is_empty() {
        return Err(Error::GeometryMismatch(format!(
            "no line behind the front at {front} along {axis:?}"
        )));
    }
    let contiguous = |l: &BTreeMap<i64, &GaussianIntVector>| {
        let (lo, hi) = (l.keys().next().unwrap(), l.keys().next_back().unwrap());
        (hi - lo + 1) as usize == l.len()
    };
    if !contiguous(&front_line) || !contiguous(&back_line) {
        return Err(Error::GeometryMismatch("lines must be contiguous".into()));
    }

    let wrap = |u: i64| -> i64 {
        match transverse {
            Transverse::Causal => u,
            Transverse::Periodic(period) => {
                let lo = *front_line.keys().next().unwrap();
                lo + (u - lo).rem_euclid(period)
            }
        }
    };
    if let Transverse::Periodic(period) = transverse {
        if period < 1 || front_line.len() as i64 != period || back_line.len() as i64 != period {
            return Err(Error::GeometryMismatch(format!(
                "periodic propagation needs both lines to span exactly one period of {period}"
            )));
        }
    }

    let mut out = field.clone();
    let mut added = 0usize;
    for (&u, &centre) in &front_line {
        let (Some(up), Some(down), Some(behind)) = (
            front_line.get(&wrap(u + 1)),
            front_line.get(&wrap(u - 1)),
            back_line.get(&u),
        ) else {
            continue;
        };
        // psi(t+d, u) = psi(t-d, u) - d ([psi(t, u+1) - psi(t, u-1)] + iH psi(t, u))
        let transverse_diff = &(*up - *down);
        let bracket = transverse_diff - &h.apply_neg_i(centre);
        let next = if direction == 1 {
            *behind - &bracket
        } else {
            *behind + &bracket
        };
        out.insert(to_point(axis, front + direction, u), next)?;
        added += 1;
    }
    if added == 0 {
        return Err(Error::DomainTooSmall(format!(
            "front line of length {} cannot produce a new line",
            front_line.len()
        )));
    }
    Ok(out)
}

/// Adds `value` at `point` and propagates along the diagonal through it.
pub fn propagate_diagonal_from(
    field: &MultiTimeField,
    h: &TensorHamiltonian,
    point: Point,
    value: GaussianIntVector,
) -> Result<MultiTimeField> {
    let top = field
        .points()
        .map(|(a, b)| a + b)
        .max()
        .ok_or_else(|| Error::GeometryMismatch("empty field".into()))?;
    if point.0 + point.1 != top + 1 {
        return Err(Error::GeometryMismatch(format!(
            "extra point {point:?} is not on the diagonal after n1 + n2 = {top}"
        )));
    }
    let mut seeded = field.clone();
    seeded.insert(point, value)?;
    propagate_diagonal(&seeded, h)
}

/// Completes the top anti-diagonal of `field`, which must hold exactly one
/// seed point above two populated diagonals `s - 1` and `s`.
pub fn propagate_diagonal(field: &MultiTimeField, h: &TensorHamiltonian) -> Result<MultiTimeField> {
    Error::check_dim(field.components(), h.total_dim())?;
    let top = field
        .points()
        .map(|(a, b)| a + b)
        .max()
        .ok_or_else(|| Error::GeometryMismatch("empty field".into()))?;
    let seeds = field.diagonal(top);
    if seeds.len() != 1 {
        return Err(Error::MissingExtraPoint);
    }
    let s = top - 1;
    if field.diagonal(s).is_empty() || field.diagonal(s - 1).is_empty() {
        return Err(Error::GeometryMismatch(format!(
            "need populated diagonals n1 + n2 = {} and {s}",
            s - 1
        )));
    }
    let k0 = seeds[0].0;

    // Chain for the centre (a, s - a): q(a + 1) + q(a) = R(a), with q(k) the
    // value at (k, s + 1 - k).
    let rhs = |a: i64| -> Option<GaussianIntVector> {
        let c = field.get((a, s - a))?;
        let left = field.get((a - 1, s - a))?;
        let below = field.get((a, s - a - 1))?;
        Some(&(left + below) + &h.apply_neg_i(c))
    };

    let mut out = field.clone();
    let seed = field.get(seeds[0]).unwrap().clone();
    let mut grown = 0;
    let mut q = seed.clone();
    let mut k = k0;
    while let Some(r) = rhs(k) {
        q = &r - &q;
        k += 1;
        out.insert((k, s + 1 - k), q.clone())?;
        grown += 1;
    }
    let mut q = seed;
    let mut k = k0;
    while let Some(r) = rhs(k - 1) {
        q = &r - &q;
        k -= 1;
        out.insert((k, s + 1 - k), q.clone())?;
        grown += 1;
    }
    if grown == 0 {
        return Err(Error::GeometryMismatch(format!(
            "seed {:?} is not adjacent to a complete centre on diagonal {s}",
            seeds[0]
        )));
    }
    Ok(out)
}

/// Diagonally synchronized second-order update
/// `psi_{n+1,n+1} = psi_{n-1,n-1} - i H psi_{n,n}`.
pub fn sync_second_order(
    prev: &GaussianIntVector,
    curr: &GaussianIntVector,
    h: &TensorHamiltonian,
) -> Result<GaussianIntVector> {
    Error::check_dim(h.total_dim(), prev.dim())?;
    Error::check_dim(h.total_dim(), curr.dim())?;
    Ok(prev + &h.apply_neg_i(curr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyncMode {
    Free,
    DiagonalSecondOrder,
    DiagonalFirstOrder,
}

/// States of the first-order synchronized run; `states[k]` sits at effective
/// time `k * direction` and lattice point `(n + m1, n + m2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderRun {
    pub offsets: (i64, i64),
    pub direction: i64,
    pub states: Vec<GaussianIntVector>,
}

impl FirstOrderRun {
    pub fn lattice_point(&self, k: usize) -> Point {
        let n = k as i64 * self.direction;
        (n + self.offsets.0, n + self.offsets.1)
    }
}

/// Iterates `psi_{n+1} = -i H psi_n`. With `direction = -1` the constraint is
/// applied backwards and the same map produces `psi_{n-1}` from `psi_n`.
pub fn sync_first_order(
    state: &GaussianIntVector,
    h: &TensorHamiltonian,
    steps: usize,
    direction: i64,
    offsets: (i64, i64),
) -> Result<FirstOrderRun> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    if direction != 1 && direction != -1 {
        return Err(Error::InvalidParameter(format!("direction must be +-1, got {direction}")));
    }
    Error::check_dim(h.total_dim(), state.dim())?;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(state.clone());
    for _ in 0..steps {
        let next = h.apply_neg_i(states.last().unwrap());
        states.push(next);
    }
    Ok(FirstOrderRun {
        offsets,
        direction,
        states,
    })
}

/// Points entering the first-order constraint around an odd centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stencil {
    pub centre: Point,
    pub lhs: [Point; 4],
    pub rhs: Point,
}

pub fn is_even(p: Point) -> bool {
    (p.0 + p.1).rem_euclid(2) == 0
}

pub fn first_order_stencil(centre: Point) -> Stencil {
    let (a, b) = centre;
    Stencil {
        centre,
        lhs: [(a + 1, b), (a - 1, b), (a, b + 1), (a, b - 1)],
        rhs: (a + 1, b + 1),
    }
}

/// Rank of the `d1 x d2` reshaping of `state`.
pub fn schmidt_rank(state: &[Complex64], dims: (usize, usize)) -> Result<usize> {
    Error::check_dim(dims.0 * dims.1, state.len())?;
    let m = nalgebra::DMatrix::from_row_slice(dims.0, dims.1, state);
    Ok(linalg::numerical_rank(&m, 1e-10))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeibnizResiduals {
    /// Largest `max(|re|, |im|)` of the modified product-rule residual.
    pub modified: BigRational,
    /// Largest residual of the naive rule `(fg)' = f'g + fg'`.
    pub naive: BigRational,
    pub naive_nonzero_points: usize,
}

/// Checks the discrete product rule at every interior index.
pub fn leibniz_identity_check(
    phi1: &[GaussianRational],
    phi2: &[GaussianRational],
) -> Result<LeibnizResiduals> {
    let len = phi1.len().min(phi2.len());
    if len < 3 {
        return Err(Error::LengthTooShort(len));
    }
    Error::check_dim(phi1.len(), phi2.len())?;
    let two = GaussianRational::new(BigRational::from_integer(2.into()), BigRational::zero());
    let size = |z: &GaussianRational| -> BigRational {
        let (a, b) = (z.re.abs(), z.im.abs());
        if a > b {
            a
        } else {
            b
        }
    };
    let mut modified = BigRational::zero();
    let mut naive = BigRational::zero();
    let mut naive_nonzero_points = 0;
    for n in 1..len - 1 {
        let (f_prev, f, f_next) = (&phi1[n - 1], &phi1[n], &phi1[n + 1]);
        let (g_prev, g, g_next) = (&phi2[n - 1], &phi2[n], &phi2[n + 1]);
        let lhs = f_next * g_next - f_prev * g_prev;
        let df = f_next - f_prev;
        let dg = g_next - g_prev;
        let rule = &df * &((g_next + g_prev) / &two) + &((f_next + f_prev) / &two) * &dg;
        let plain = &df * g + f * &dg;
        let r_mod = size(&(&lhs - &rule));
        let r_naive = size(&(&lhs - &plain));
        if !r_naive.is_zero() {
            naive_nonzero_points += 1;
        }
        modified = modified.max(r_mod);
        naive = naive.max(r_naive);
    }
    Ok(LeibnizResiduals {
        modified,
        naive,
        naive_nonzero_points,
    })
}

/// Integer sequence as Gaussian rationals.
pub fn rational_sequence(values: &[i64]) -> Vec<GaussianRational> {
    values
        .iter()
        .map(|&v| GaussianRational::new(BigRational::from_integer(v.into()), BigRational::zero()))
        .collect()
}

/// `-i H` applied entrywise as a Gaussian-integer matrix.
pub fn neg_i_matrix(h: &TensorHamiltonian) -> GaussianMatrix {
    h.matrix().map(mul_neg_i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::gi;

    fn sigma1() -> GaussianMatrix {
        GaussianMatrix::from_rows(&[vec![(0, 0), (1, 0)], vec![(1, 0), (0, 0)]]).unwrap()
    }

    fn sigma1_sigma1() -> TensorHamiltonian {
        TensorHamiltonian::general(vec![2, 2], sigma1().kron(&sigma1())).unwrap()
    }

    fn e(dim: usize, k: usize) -> GaussianIntVector {
        GaussianIntVector::basis(dim, k)
    }

    fn constant_lines(c: &GaussianIntVector, len: i64) -> MultiTimeField {
        let mut f = MultiTimeField::new((1, 1));
        for t in 0..2 {
            for u in 0..len {
                f.insert((t, u), c.clone()).unwrap();
            }
        }
        f
    }

    #[test]
    fn constant_field_with_zero_hamiltonian() {
        let c = GaussianIntVector::from_pairs(&[(3, -2)]);
        let h = TensorHamiltonian::zero((1, 1));
        let f = propagate_line(&constant_lines(&c, 6), &h, Axis::N1, 1).unwrap();
        let new: Vec<_> = f.iter().filter(|(p, _)| p.0 == 2).collect();
        assert_eq!(new.len(), 4);
        assert!(new.iter().all(|(_, v)| **v == c));
    }

    #[test]
    fn line_shrinks_until_too_small() {
        let c = GaussianIntVector::from_pairs(&[(1, 0)]);
        let h = TensorHamiltonian::zero((1, 1));
        let f = propagate_line(&constant_lines(&c, 3), &h, Axis::N1, 1).unwrap();
        assert_eq!(f.iter().filter(|(p, _)| p.0 == 2).count(), 1);
        assert!(matches!(
            propagate_line(&f, &h, Axis::N1, 1),
            Err(Error::DomainTooSmall(_))
        ));
    }

    #[test]
    fn backward_and_transverse_axes() {
        let c = GaussianIntVector::from_pairs(&[(1, 1)]);
        let h = TensorHamiltonian::zero((1, 1));
        let f = propagate_line(&constant_lines(&c, 5), &h, Axis::N1, -1).unwrap();
        assert_eq!(f.iter().filter(|(p, _)| p.0 == -1).count(), 3);
        // lines n1 = 0, 1 along n2 are only two points long: too short to propagate in n2
        assert!(propagate_line(&constant_lines(&c, 5), &h, Axis::N2, 1).is_err());
    }

    #[test]
    fn single_line_is_a_geometry_mismatch() {
        let mut f = MultiTimeField::new((1, 1));
        for u in 0..4 {
            f.insert((0, u), e(1, 0)).unwrap();
        }
        assert!(matches!(
            propagate_line(&f, &TensorHamiltonian::zero((1, 1)), Axis::N1, 1),
            Err(Error::GeometryMismatch(_))
        ));
    }

    #[test]
    fn periodic_lines_do_not_shrink() {
        let c = GaussianIntVector::from_pairs(&[(2, 0)]);
        let h = TensorHamiltonian::zero((1, 1));
        let mut f = constant_lines(&c, 4);
        for _ in 0..5 {
            f = propagate_line_with(&f, &h, Axis::N1, 1, Transverse::Periodic(4)).unwrap();
        }
        assert_eq!(f.len(), 4 * 7);
    }

    #[test]
    fn zero_diagonal_stays_zero() {
        let mut f = MultiTimeField::new((1, 1));
        for a in -3..=3 {
            f.insert((a, -a), GaussianIntVector::zeros(1)).unwrap();
            f.insert((a, 1 - a), GaussianIntVector::zeros(1)).unwrap();
        }
        let h = TensorHamiltonian::zero((1, 1));
        let out = propagate_diagonal_from(&f, &h, (0, 2), GaussianIntVector::zeros(1)).unwrap();
        let top = out.diagonal(2);
        assert!(top.len() > 1);
        assert!(top.iter().all(|p| out.get(*p).unwrap().is_zero()));
        assert!(matches!(propagate_diagonal(&f, &h), Err(Error::MissingExtraPoint)));
    }

    #[test]
    fn diagonal_rejects_misplaced_seed() {
        let mut f = MultiTimeField::new((1, 1));
        for a in -2..=2 {
            f.insert((a, -a), e(1, 0)).unwrap();
            f.insert((a, 1 - a), e(1, 0)).unwrap();
        }
        let h = TensorHamiltonian::zero((1, 1));
        assert!(matches!(
            propagate_diagonal_from(&f, &h, (0, 5), e(1, 0)),
            Err(Error::GeometryMismatch(_))
        ));
        assert!(matches!(
            propagate_diagonal_from(&f, &h, (10, -8), e(1, 0)),
            Err(Error::GeometryMismatch(_))
        ));
    }

    #[test]
    fn second_order_sync_examples() {
        let h = sigma1_sigma1();
        let next = sync_second_order(&e(4, 0), &e(4, 3), &h).unwrap();
        assert_eq!(next, e(4, 0).scale(&gi(1, -1)));
        let z = TensorHamiltonian::zero((2, 2));
        assert_eq!(sync_second_order(&e(4, 1), &e(4, 2), &z).unwrap(), e(4, 1));
        assert!(sync_second_order(&e(3, 0), &e(4, 0), &h).is_err());
    }

    #[test]
    fn first_order_sigma1_sigma1_period_four() {
        let run = sync_first_order(&e(4, 0), &sigma1_sigma1(), 4, 1, (0, 0)).unwrap();
        assert_eq!(run.states[1], e(4, 3).scale(&gi(0, -1)));
        assert_eq!(run.states[2], e(4, 0).scale(&gi(-1, 0)));
        assert_eq!(run.states[4], e(4, 0));
        assert_eq!(run.lattice_point(3), (3, 3));
    }

    #[test]
    fn first_order_identity_is_pure_phase() {
        let h = TensorHamiltonian::general(vec![2, 2], GaussianMatrix::identity(4)).unwrap();
        let v = GaussianIntVector::from_pairs(&[(1, 0), (0, 2), (-1, 1), (3, 0)]);
        let run = sync_first_order(&v, &h, 3, -1, (1, -2)).unwrap();
        assert_eq!(run.states[1], v.scale(&gi(0, -1)));
        assert_eq!(run.lattice_point(2), (-1, -4));
    }

    #[test]
    fn separable_first_order_step_entangles() {
        let h = TensorHamiltonian::separable(vec![sigma1(), sigma1()]).unwrap();
        let run = sync_first_order(&e(4, 0), &h, 1, 1, (0, 0)).unwrap();
        let expected = GaussianIntVector(vec![gi(0, 0), gi(0, -1), gi(0, -1), gi(0, 0)]);
        assert_eq!(run.states[1], expected);
        assert_eq!(schmidt_rank(&run.states[1].to_c64(), (2, 2)).unwrap(), 2);
    }

    #[test]
    fn schmidt_ranks() {
        let product = e(2, 0).kron(&e(2, 1));
        assert_eq!(schmidt_rank(&product.to_c64(), (2, 2)).unwrap(), 1);
        let bell = &e(4, 0) + &e(4, 3);
        assert_eq!(schmidt_rank(&bell.to_c64(), (2, 2)).unwrap(), 2);
        assert!(schmidt_rank(&bell.to_c64(), (2, 3)).is_err());
    }

    #[test]
    fn stencil_parity() {
        for centre in [(1, 0), (0, -1), (3, 4), (-5, 2)] {
            let s = first_order_stencil(centre);
            assert!(!is_even(s.centre));
            assert!(s.lhs.iter().all(|&p| is_even(p)));
            assert!(!is_even(s.rhs));
        }
    }

    #[test]
    fn leibniz_examples() {
        let c = rational_sequence(&[4, 4, 4, 4]);
        let r = leibniz_identity_check(&c, &c).unwrap();
        assert!(r.modified.is_zero() && r.naive.is_zero());

        let lin: Vec<i64> = (0..8).collect();
        let sq: Vec<i64> = (0..8).map(|n| n * n).collect();
        let r = leibniz_identity_check(&rational_sequence(&lin), &rational_sequence(&lin)).unwrap();
        assert!(r.modified.is_zero());
        // for f = g = n the naive rule happens to hold: (n+1)^2 - (n-1)^2 = 4n
        assert!(r.naive.is_zero());
        let r = leibniz_identity_check(&rational_sequence(&lin), &rational_sequence(&sq)).unwrap();
        assert!(r.modified.is_zero());
        assert_eq!(r.naive_nonzero_points, 6);

        assert!(matches!(
            leibniz_identity_check(&c[..2], &c[..2]),
            Err(Error::LengthTooShort(2))
        ));
    }

    #[test]
    fn separable_expansion() {
        let h = TensorHamiltonian::separable(vec![sigma1(), GaussianMatrix::zeros(3)]).unwrap();
        assert_eq!(h.total_dim(), 6);
        assert_eq!(*h.matrix(), sigma1().kron(&GaussianMatrix::identity(3)));
        let bad = GaussianMatrix::from_rows(&[vec![(0, 0), (0, 1)], vec![(0, 1), (0, 0)]]).unwrap();
        assert!(TensorHamiltonian::separable(vec![bad]).is_err());
    }
}
