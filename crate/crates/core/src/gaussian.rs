//! Exact Gaussian-integer and Gaussian-rational arithmetic.
//!
//! Amplitudes are `Complex<BigInt>`: no operation on them ever rounds.
//! Vectors and dense square matrices over the Gaussian integers are thin
//! wrappers that add the handful of linear-algebra operations the automaton
//! needs (matrix-vector products, Hermitian inner products, adjoints).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type GaussianInt = Complex<BigInt>;
pub type GaussianRational = Complex<BigRational>;

pub fn gi(re: i64, im: i64) -> GaussianInt {
    Complex::new(BigInt::from(re), BigInt::from(im))
}

/// Multiplication by `i`: `(re, im) -> (-im, re)`.
pub fn mul_i(z: &GaussianInt) -> GaussianInt {
    Complex::new(-&z.im, z.re.clone())
}

/// Multiplication by `-i`: `(re, im) -> (im, -re)`.
pub fn mul_neg_i(z: &GaussianInt) -> GaussianInt {
    Complex::new(z.im.clone(), -&z.re)
}

pub fn to_c64(z: &GaussianInt) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

pub fn to_rational(z: &GaussianInt) -> GaussianRational {
    Complex::new(
        BigRational::from_integer(z.re.clone()),
        BigRational::from_integer(z.im.clone()),
    )
}

/// Compact rendering used in reports: `1`, `-i`, `1-i`, `1/2+1/2i`.
pub fn format_complex<T>(re: &T, im: &T) -> String
where
    T: fmt::Display + Zero + PartialOrd + Neg<Output = T> + Clone + num_traits::One,
{
    let zero = T::zero();
    let one = T::one();
    let im_part = |v: &T| -> String {
        if *v == one {
            "i".to_string()
        } else {
            format!("{v}i")
        }
    };
    if im.is_zero() {
        return format!("{re}");
    }
    let (sign, mag) = if *im < zero {
        ("-", -im.clone())
    } else {
        ("+", im.clone())
    };
    if re.is_zero() {
        let s = if sign == "-" { "-" } else { "" };
        return format!("{s}{}", im_part(&mag));
    }
    format!("{re}{sign}{}", im_part(&mag))
}

pub fn format_gi(z: &GaussianInt) -> String {
    format_complex(&z.re, &z.im)
}

pub fn format_gr(z: &GaussianRational) -> String {
    format_complex(&z.re, &z.im)
}

/// A state vector `psi^alpha`, alpha = 0..dim-1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GaussianIntVector(pub Vec<GaussianInt>);

impl GaussianIntVector {
    pub fn zeros(dim: usize) -> Self {
        GaussianIntVector(vec![GaussianInt::zero(); dim])
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = gi(1, 0);
        v
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        GaussianIntVector(pairs.iter().map(|&(r, i)| gi(r, i)).collect())
    }

    pub fn from_reals(values: &[i64]) -> Self {
        GaussianIntVector(values.iter().map(|&r| gi(r, 0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GaussianInt> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// `self^dagger other`.
    pub fn inner(&self, other: &Self) -> GaussianInt {
        self.0
            .iter()
            .zip(&other.0)
            .fold(GaussianInt::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn norm_sqr(&self) -> BigInt {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, c: &GaussianInt) -> Self {
        GaussianIntVector(self.0.iter().map(|z| c * z).collect())
    }

    pub fn mul_neg_i(&self) -> Self {
        GaussianIntVector(self.0.iter().map(mul_neg_i).collect())
    }

    pub fn mul_i(&self) -> Self {
        GaussianIntVector(self.0.iter().map(mul_i).collect())
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.0.iter().map(to_c64).collect()
    }

    /// Kronecker product, index `a * other.dim() + b`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        GaussianIntVector(out)
    }
}

impl Index<usize> for GaussianIntVector {
    type Output = GaussianInt;
    fn index(&self, i: usize) -> &GaussianInt {
        &self.0[i]
    }
}

impl IndexMut<usize> for GaussianIntVector {
    fn index_mut(&mut self, i: usize) -> &mut GaussianInt {
        &mut self.0[i]
    }
}

impl Add for &GaussianIntVector {
    type Output = GaussianIntVector;
    fn add(self, rhs: &GaussianIntVector) -> GaussianIntVector {
        GaussianIntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GaussianIntVector {
    type Output = GaussianIntVector;
    fn sub(self, rhs: &GaussianIntVector) -> GaussianIntVector {
        GaussianIntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GaussianIntVector {
    type Output = GaussianIntVector;
    fn neg(self) -> GaussianIntVector {
        GaussianIntVector(self.0.iter().map(|z| -z).collect())
    }
}

impl fmt::Display for GaussianIntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_gi(z))?;
        }
        write!(f, ")")
    }
}

/// Dense square matrix over the Gaussian integers, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussianMatrix {
    dim: usize,
    data: Vec<GaussianInt>,
}

impl GaussianMatrix {
    pub fn zeros(dim: usize) -> Self {
        GaussianMatrix {
            dim,
            data: vec![GaussianInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = gi(1, 0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> GaussianInt) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        GaussianMatrix { dim, data }
    }

    /// Builds a matrix from rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Shape(format!(
                "row of length {} in a {dim}x{dim} matrix",
                bad.len()
            )));
        }
        Ok(Self::from_fn(dim, |r, c| gi(rows[r][c].0, rows[r][c].1)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul_vec(&self, v: &GaussianIntVector) -> GaussianIntVector {
        debug_assert_eq!(v.dim(), self.dim);
        let mut out = Vec::with_capacity(self.dim);
        for r in 0..self.dim {
            let row = &self.data[r * self.dim..(r + 1) * self.dim];
            let mut acc = GaussianInt::zero();
            for (h, x) in row.iter().zip(&v.0) {
                if !h.is_zero() {
                    acc += h * x;
                }
            }
            out.push(acc);
        }
        GaussianIntVector(out)
    }

    pub fn mul_mat(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = &out[(r, c)] + a * b;
                    }
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&GaussianInt) -> GaussianInt) -> Self {
        GaussianMatrix {
            dim: self.dim,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_c64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| to_c64(&self[(r, c)]))
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| {
            &self[(r / m, c / m)] * &other[(r % m, c % m)]
        })
    }
}

impl Index<(usize, usize)> for GaussianMatrix {
    type Output = GaussianInt;
    fn index(&self, (r, c): (usize, usize)) -> &GaussianInt {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for GaussianMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut GaussianInt {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &GaussianMatrix {
    type Output = GaussianMatrix;
    fn add(self, rhs: &GaussianMatrix) -> GaussianMatrix {
        GaussianMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &GaussianMatrix {
    type Output = GaussianMatrix;
    fn sub(self, rhs: &GaussianMatrix) -> GaussianMatrix {
        GaussianMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiplication_by_i_rotates() {
        assert_eq!(mul_i(&gi(3, -2)), gi(2, 3));
        assert_eq!(mul_i(&gi(3, -2)), gi(0, 1) * gi(3, -2));
        assert_eq!(mul_neg_i(&gi(3, -2)), gi(0, -1) * gi(3, -2));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_gi(&gi(1, -1)), "1-i");
        assert_eq!(format_gi(&gi(0, -1)), "-i");
        assert_eq!(format_gi(&gi(-1, -1)), "-1-i");
        assert_eq!(format_gi(&gi(0, 0)), "0");
        assert_eq!(format_gi(&gi(2, 3)), "2+3i");
        let half = Complex::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 2.into()),
        );
        assert_eq!(format_gr(&half), "1/2+1/2i");
    }

    #[test]
    fn kron_matches_vector_kron() {
        let a = GaussianMatrix::from_rows(&[vec![(0, 0), (1, 0)], vec![(1, 0), (0, 0)]]).unwrap();
        let b = GaussianMatrix::from_rows(&[vec![(1, 0), (0, -1)], vec![(0, 1), (2, 0)]]).unwrap();
        let u = GaussianIntVector::from_pairs(&[(1, 1), (2, 0)]);
        let v = GaussianIntVector::from_pairs(&[(0, 1), (-1, 3)]);
        assert_eq!(a.kron(&b).mul_vec(&u.kron(&v)), a.mul_vec(&u).kron(&b.mul_vec(&v)));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(GaussianMatrix::from_rows(&[vec![(0, 0)], vec![(1, 0), (0, 0)]]).is_err());
    }
}
