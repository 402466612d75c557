//! Second-order Hamiltonian cellular automaton over the Gaussian integers.
//!
//! A model is fixed by an integer symmetric matrix `S` and an integer
//! antisymmetric matrix `A`; the update rule is
//!
//! ```text
//! psi_{n+1} = psi_{n-1} - i H psi_n,    H = S + iA
//! ```
//!
//! which can be run in either direction without inverting `H`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gaussian::{gi, GaussianInt, GaussianIntVector, GaussianMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianModel {
    dim: usize,
    s: Vec<Vec<i64>>,
    a: Vec<Vec<i64>>,
    h: GaussianMatrix,
}

fn check_square(name: &str, m: &[Vec<i64>], dim: usize) -> Result<()> {
    if m.len() != dim {
        return Err(Error::Shape(format!("{name} has {} rows, expected {dim}", m.len())));
    }
    if let Some((r, row)) = m.iter().enumerate().find(|(_, row)| row.len() != dim) {
        return Err(Error::Shape(format!(
            "{name} row {r} has {} entries, expected {dim}",
            row.len()
        )));
    }
    Ok(())
}

/// Validates `S` (symmetric) and `A` (antisymmetric) and forms `H = S + iA`.
pub fn build_hamiltonian(s: Vec<Vec<i64>>, a: Vec<Vec<i64>>) -> Result<HamiltonianModel> {
    let dim = s.len();
    if dim == 0 {
        return Err(Error::Shape("model dimension must be positive".into()));
    }
    check_square("S", &s, dim)?;
    check_square("A", &a, dim)?;
    let violation = |m: &[Vec<i64>], sign: i64| {
        (0..dim)
            .flat_map(|r| (0..dim).map(move |c| (r, c)))
            .find(|&(r, c)| m[r][c] != sign * m[c][r])
    };
    for (matrix, m, sign) in [("S", &s, 1), ("A", &a, -1)] {
        if let Some((row, col)) = violation(m, sign) {
            return Err(Error::SymmetryViolation { matrix, row, col });
        }
    }
    let h = GaussianMatrix::from_fn(dim, |r, c| gi(s[r][c], a[r][c]));
    debug_assert!(h.is_self_adjoint());
    Ok(HamiltonianModel { dim, s, a, h })
}

impl HamiltonianModel {
    /// Splits a self-adjoint Gaussian-integer matrix into `S + iA`.
    pub fn from_hermitian(h: &GaussianMatrix) -> Result<Self> {
        use num_traits::ToPrimitive;
        let dim = h.dim();
        let mut s = vec![vec![0i64; dim]; dim];
        let mut a = vec![vec![0i64; dim]; dim];
        for r in 0..dim {
            for c in 0..dim {
                let z = &h[(r, c)];
                let (Some(re), Some(im)) = (z.re.to_i64(), z.im.to_i64()) else {
                    return Err(Error::Shape(format!("entry ({r}, {c}) exceeds 64 bits")));
                };
                s[r][c] = re;
                a[r][c] = im;
            }
        }
        build_hamiltonian(s, a)
    }

    pub fn zero(dim: usize) -> Self {
        build_hamiltonian(vec![vec![0; dim]; dim], vec![vec![0; dim]; dim])
            .expect("zero matrices are valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> &[Vec<i64>] {
        &self.s
    }

    pub fn a(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn h(&self) -> &GaussianMatrix {
        &self.h
    }

    /// `-i H v`.
    pub fn apply_neg_i_h(&self, v: &GaussianIntVector) -> GaussianIntVector {
        self.h.mul_vec(v).mul_neg_i()
    }

    /// Direct sum of two models (block-diagonal Hamiltonian).
    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        let block = |m: &[Vec<i64>], o: &[Vec<i64>]| {
            let mut out = vec![vec![0; n]; n];
            for (r, row) in m.iter().enumerate() {
                out[r][..self.dim].copy_from_slice(row);
            }
            for (r, row) in o.iter().enumerate() {
                out[self.dim + r][self.dim..].copy_from_slice(row);
            }
            out
        };
        build_hamiltonian(block(&self.s, &other.s), block(&self.a, &other.a))
            .expect("direct sum of valid models is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Two consecutive states `(psi_{n-1}, psi_n)`; `index` is `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CAPairState {
    pub prev: GaussianIntVector,
    pub curr: GaussianIntVector,
    pub index: i64,
}

impl CAPairState {
    pub fn new(prev: GaussianIntVector, curr: GaussianIntVector, index: i64) -> Result<Self> {
        Error::check_dim(prev.dim(), curr.dim())?;
        Ok(CAPairState { prev, curr, index })
    }

    /// Pair `(psi_0, psi_1)` at index 1.
    pub fn initial(psi0: GaussianIntVector, psi1: GaussianIntVector) -> Result<Self> {
        Self::new(psi0, psi1, 1)
    }

    pub fn dim(&self) -> usize {
        self.curr.dim()
    }
}

/// One exact update. Forward returns `(psi_n, psi_{n+1})` at `n + 1`;
/// backward returns `(psi_{n-2}, psi_{n-1})` at `n - 1`.
pub fn step(
    pair: &CAPairState,
    model: &HamiltonianModel,
    direction: Direction,
) -> Result<CAPairState> {
    Error::check_dim(model.dim(), pair.prev.dim())?;
    Error::check_dim(model.dim(), pair.curr.dim())?;
    Ok(match direction {
        Direction::Forward => {
            let next = &pair.prev + &model.apply_neg_i_h(&pair.curr);
            CAPairState {
                prev: pair.curr.clone(),
                curr: next,
                index: pair.index + 1,
            }
        }
        Direction::Backward => {
            // psi_{n-2} = psi_n + i H psi_{n-1}
            let before = &pair.curr - &model.apply_neg_i_h(&pair.prev);
            CAPairState {
                prev: before,
                curr: pair.prev.clone(),
                index: pair.index - 1,
            }
        }
    })
}

/// Full stored trajectory; `states[k]` is `psi_{start + k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pub start: i64,
    pub states: Vec<GaussianIntVector>,
    pub model: HamiltonianModel,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn end(&self) -> i64 {
        self.start + self.states.len() as i64 - 1
    }

    pub fn state(&self, n: i64) -> Option<&GaussianIntVector> {
        let k = n.checked_sub(self.start)?;
        usize::try_from(k).ok().and_then(|k| self.states.get(k))
    }

    /// Pair `(psi_{n-1}, psi_n)` for every n with both states stored.
    pub fn pairs(&self) -> impl Iterator<Item = CAPairState> + '_ {
        self.states.windows(2).enumerate().map(move |(k, w)| CAPairState {
            prev: w[0].clone(),
            curr: w[1].clone(),
            index: self.start + k as i64 + 1,
        })
    }

    /// Index of the first interior point where the update rule fails.
    pub fn first_violation(&self) -> Option<i64> {
        self.states.windows(3).enumerate().find_map(|(k, w)| {
            let lhs = &w[2] - &w[0];
            let rhs = self.model.apply_neg_i_h(&w[1]);
            (lhs != rhs).then_some(self.start + k as i64 + 1)
        })
    }

    pub fn satisfies_update_rule(&self) -> bool {
        self.first_violation().is_none()
    }
}

pub fn evolve(pair: &CAPairState, model: &HamiltonianModel, steps: usize) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be at least 1".into()));
    }
    Error::check_dim(model.dim(), pair.dim())?;
    Error::check_dim(model.dim(), pair.prev.dim())?;
    let mut states = Vec::with_capacity(steps + 2);
    states.push(pair.prev.clone());
    states.push(pair.curr.clone());
    for _ in 0..steps {
        let n = states.len();
        let next = &states[n - 2] + &model.apply_neg_i_h(&states[n - 1]);
        states.push(next);
    }
    Ok(Trajectory {
        start: pair.index - 1,
        states,
        model: model.clone(),
    })
}

/// Streaming evolution keeping only the current pair.
pub struct Evolution<'m> {
    pair: CAPairState,
    model: &'m HamiltonianModel,
    direction: Direction,
}

impl<'m> Evolution<'m> {
    pub fn new(pair: CAPairState, model: &'m HamiltonianModel, direction: Direction) -> Result<Self> {
        Error::check_dim(model.dim(), pair.dim())?;
        Error::check_dim(model.dim(), pair.prev.dim())?;
        Ok(Evolution {
            pair,
            model,
            direction,
        })
    }

    pub fn pair(&self) -> &CAPairState {
        &self.pair
    }
}

impl Iterator for Evolution<'_> {
    type Item = CAPairState;

    fn next(&mut self) -> Option<CAPairState> {
        let next = step(&self.pair, self.model, self.direction).expect("dimensions checked");
        self.pair = next.clone();
        Some(next)
    }
}

/// `Q_n = psi_n^dagger psi_{n-1} + psi_{n-1}^dagger psi_n`, conserved by the update rule.
pub fn two_time_correlation(pair: &CAPairState) -> Result<BigInt> {
    Error::check_dim(pair.prev.dim(), pair.curr.dim())?;
    let q: GaussianInt = pair.curr.inner(&pair.prev) + pair.prev.inner(&pair.curr);
    debug_assert!(q.im.is_zero());
    Ok(q.re)
}

/// Splits `psi = x + i p` into coordinates and momenta.
pub fn to_xp(v: &GaussianIntVector) -> (Vec<BigInt>, Vec<BigInt>) {
    v.iter().map(|z| (z.re.clone(), z.im.clone())).unzip()
}

pub fn from_xp(x: &[BigInt], p: &[BigInt]) -> Result<GaussianIntVector> {
    Error::check_dim(x.len(), p.len())?;
    Ok(GaussianIntVector(
        x.iter()
            .zip(p)
            .map(|(x, p)| GaussianInt::new(x.clone(), p.clone()))
            .collect(),
    ))
}

/// Checks the real coordinate/momentum form of the update at one point:
/// `x_{n+1} - x_{n-1} = S p_n + A x_n` and `p_{n+1} - p_{n-1} = -S x_n + A p_n`.
pub fn xp_equations_hold(
    model: &HamiltonianModel,
    prev: &GaussianIntVector,
    curr: &GaussianIntVector,
    next: &GaussianIntVector,
) -> bool {
    let (xm, pm) = to_xp(prev);
    let (x, p) = to_xp(curr);
    let (xn, pn) = to_xp(next);
    let row_dot = |m: &[i64], v: &[BigInt]| -> BigInt {
        m.iter().zip(v).map(|(a, b)| BigInt::from(*a) * b).sum()
    };
    (0..model.dim()).all(|k| {
        let s = &model.s()[k];
        let a = &model.a()[k];
        let dx = &xn[k] - &xm[k];
        let dp = &pn[k] - &pm[k];
        dx == row_dot(s, &p) + row_dot(a, &x) && dp == -row_dot(s, &x) + row_dot(a, &p)
    })
}
