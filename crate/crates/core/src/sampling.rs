//! Seeded generators for models, states and sequences.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::ca::{build_hamiltonian, HamiltonianModel};
use crate::gaussian::{gi, GaussianIntVector, GaussianMatrix, GaussianRational};
use crate::linalg::hermitian_eigen;

/// `S` symmetric and `A` antisymmetric with entries in `[-max, max]`.
pub fn random_model(rng: &mut impl Rng, dim: usize, max: i64) -> HamiltonianModel {
    let mut s = vec![vec![0i64; dim]; dim];
    let mut a = vec![vec![0i64; dim]; dim];
    for r in 0..dim {
        s[r][r] = rng.gen_range(-max..=max);
        for c in r + 1..dim {
            let v = rng.gen_range(-max..=max);
            s[r][c] = v;
            s[c][r] = v;
            let w = rng.gen_range(-max..=max);
            a[r][c] = w;
            a[c][r] = -w;
        }
    }
    build_hamiltonian(s, a).expect("symmetric by construction")
}

/// Sparse `{-1, 0, 1}` model whose spectrum lies in `[-bound, bound]`.
pub fn random_subcritical_model(rng: &mut impl Rng, dim: usize, bound: f64) -> HamiltonianModel {
    loop {
        let mut s = vec![vec![0i64; dim]; dim];
        let mut a = vec![vec![0i64; dim]; dim];
        for r in 0..dim {
            if rng.gen_bool(0.2) {
                s[r][r] = if rng.gen_bool(0.5) { 1 } else { -1 };
            }
            for c in r + 1..dim {
                if rng.gen_bool(0.3) {
                    let v = if rng.gen_bool(0.5) { 1 } else { -1 };
                    if rng.gen_bool(0.5) {
                        s[r][c] = v;
                        s[c][r] = v;
                    } else {
                        a[r][c] = v;
                        a[c][r] = -v;
                    }
                }
            }
        }
        let model = build_hamiltonian(s, a).expect("symmetric by construction");
        let eig = hermitian_eigen(&model.h().to_c64());
        if eig.values.iter().all(|l| l.abs() <= bound) {
            return model;
        }
    }
}

pub fn random_vector(rng: &mut impl Rng, dim: usize, max: i64) -> GaussianIntVector {
    GaussianIntVector((0..dim).map(|_| gi(rng.gen_range(-max..=max), rng.gen_range(-max..=max))).collect())
}

/// Random nonzero vector.
pub fn random_nonzero_vector(rng: &mut impl Rng, dim: usize, max: i64) -> GaussianIntVector {
    loop {
        let v = random_vector(rng, dim, max);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize, max: i64) -> GaussianMatrix {
    random_model(rng, dim, max).h().clone()
}

/// Gaussian rationals with numerators in `[-max, max]` and denominators in `[1, max]`.
pub fn random_rational_sequence(rng: &mut impl Rng, len: usize, max: i64) -> Vec<GaussianRational> {
    let mut q = || {
        BigRational::new(
            BigInt::from(rng.gen_range(-max..=max)),
            BigInt::from(rng.gen_range(1..=max)),
        )
    };
    (0..len).map(|_| GaussianRational::new(q(), q())).collect()
}
