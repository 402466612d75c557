//! Closed-form and polynomial propagators for the second-order update rule.
//!
//! Writing `H = 2 sin(phi)` on each eigenvector, the general solution is a
//! combination of the modes `e^{-i n phi}` and `(-1)^n e^{i n phi}`. That form
//! is singular where `cos(phi) = 0` (`|lambda| = 2`), so the exact three-term
//! transfer recursion is the authoritative propagator and the spectral form
//! serves as a floating-point cross-check.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::ca::HamiltonianModel;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianIntVector, GaussianMatrix};
use crate::linalg::{self, hermitian_eigen, HermitianEigen};

/// Eigenvalues within this distance of `+-2` are critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

/// Acceptance bound for `max |H - V Lambda V^dagger|`, relative to `max(1, max |H|)`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralRegime {
    Subcritical,
    Critical,
    Supercritical,
}

impl SpectralRegime {
    pub fn classify(lambda: f64) -> Self {
        let a = lambda.abs();
        if (a - 2.0).abs() <= CRITICAL_TOLERANCE {
            SpectralRegime::Critical
        } else if a < 2.0 {
            SpectralRegime::Subcritical
        } else {
            SpectralRegime::Supercritical
        }
    }
}

/// Solves `2 sin(omega) = lambda`, principal branch.
///
/// Real for `|lambda| <= 2`. Beyond that `omega = +-pi/2 + i acosh(|lambda|/2)`
/// with non-negative imaginary part, so `e^{-i n omega}` is the growing mode.
pub fn dispersion_omega(lambda: f64) -> Complex64 {
    let x = lambda / 2.0;
    if x.abs() <= 1.0 {
        Complex64::new(x.asin(), 0.0)
    } else {
        Complex64::new(FRAC_PI_2.copysign(x), x.abs().acosh())
    }
}

pub struct SpectralDecomposition {
    pub eigen: HermitianEigen,
    pub phi: Vec<Complex64>,
    pub regimes: Vec<SpectralRegime>,
    pub reconstruction_error: f64,
    h: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigen.vectors
    }

    pub fn hamiltonian(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn reconstruction_ok(&self) -> bool {
        let scale = linalg::max_abs(&self.h).max(1.0);
        self.reconstruction_error <= RECONSTRUCTION_TOLERANCE * scale
    }

    fn first_non_subcritical(&self) -> Option<f64> {
        self.eigen
            .values
            .iter()
            .zip(&self.regimes)
            .find(|(_, r)| **r != SpectralRegime::Subcritical)
            .map(|(l, _)| *l)
    }

    fn first_critical(&self) -> Option<f64> {
        self.eigen
            .values
            .iter()
            .zip(&self.regimes)
            .find(|(_, r)| **r == SpectralRegime::Critical)
            .map(|(l, _)| *l)
    }
}

/// Spectral data of `H` with `2 sin(phi_k) = lambda_k`.
pub fn phi_operator(model: &HamiltonianModel) -> SpectralDecomposition {
    let h = model.h().to_c64();
    let eigen = hermitian_eigen(&h);
    let phi = eigen.values.iter().map(|&l| dispersion_omega(l)).collect();
    let regimes = eigen.values.iter().map(|&l| SpectralRegime::classify(l)).collect();
    let reconstruction_error = eigen.reconstruction_error(&h);
    SpectralDecomposition {
        eigen,
        phi,
        regimes,
        reconstruction_error,
        h,
    }
}

/// Evaluates the closed-form solution for `psi_n` from `(psi_0, psi_1)`.
pub fn closed_form_state(
    spectral: &SpectralDecomposition,
    psi0: &[Complex64],
    psi1: &[Complex64],
    n: i64,
) -> Result<Vec<Complex64>> {
    let dim = spectral.eigen.values.len();
    Error::check_dim(dim, psi0.len())?;
    Error::check_dim(dim, psi1.len())?;
    if let Some(eigenvalue) = spectral.first_critical() {
        return Err(Error::CriticalSpectrum { eigenvalue });
    }
    let v = &spectral.eigen.vectors;
    let vh = v.adjoint();
    let a = linalg::mat_vec(&vh, psi0);
    let b = linalg::mat_vec(&vh, psi1);
    let i = Complex64::i();
    let nf = n as f64;
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let coeffs: Vec<Complex64> = (0..dim)
        .map(|k| {
            let phi = spectral.phi[k];
            let growing = (-i * nf * phi).exp() * ((i * phi).exp() * a[k] + b[k]);
            let alternating = sign * (i * nf * phi).exp() * ((-i * phi).exp() * a[k] - b[k]);
            (growing + alternating) / (2.0 * phi.cos())
        })
        .collect();
    Ok(linalg::mat_vec(v, &coeffs))
}

/// `T(k)` with `T(0) = 1`, `T(1) = 0`, `T(k+1) = T(k-1) - iH T(k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferPolynomial {
    pub order: usize,
    pub matrix: GaussianMatrix,
}

/// All transfer matrices `T(0), ..., T(k_max)`.
pub fn transfer_sequence(model: &HamiltonianModel, k_max: usize) -> Vec<GaussianMatrix> {
    let dim = model.dim();
    let neg_i_h = model.h().map(crate::gaussian::mul_neg_i);
    let mut seq = Vec::with_capacity(k_max + 1);
    seq.push(GaussianMatrix::identity(dim));
    if k_max >= 1 {
        seq.push(GaussianMatrix::zeros(dim));
    }
    while seq.len() <= k_max {
        let k = seq.len() - 1;
        let next = &seq[k - 1] + &neg_i_h.mul_mat(&seq[k]);
        seq.push(next);
    }
    seq
}

pub fn transfer_polynomial(model: &HamiltonianModel, k: usize) -> TransferPolynomial {
    let matrix = transfer_sequence(model, k).pop().expect("sequence is non-empty");
    TransferPolynomial { order: k, matrix }
}

/// Two-point composition `psi_n = T(n-m+1) psi_{m+1} + T(n-m) psi_m`,
/// with `transfers` covering at least index `n - m + 1`.
pub fn compose_from(
    transfers: &[GaussianMatrix],
    psi_m: &GaussianIntVector,
    psi_m1: &GaussianIntVector,
    offset: usize,
) -> GaussianIntVector {
    &transfers[offset + 1].mul_vec(psi_m1) + &transfers[offset].mul_vec(psi_m)
}

/// `[T(n+1) + T(n)] psi_0`: the solution for equal initial states `psi_1 = psi_0`.
pub fn equal_initial_form(
    model: &HamiltonianModel,
    psi0: &GaussianIntVector,
    n: usize,
) -> Result<GaussianIntVector> {
    Error::check_dim(model.dim(), psi0.dim())?;
    let t = transfer_sequence(model, n + 1);
    Ok(compose_from(&t, psi0, psi0, n))
}

/// Largest residual of the stationary ansatz `psi_n = e^{-i omega n} v` in
/// `psi_{n+1} - psi_{n-1} + i H psi_n` over `n = 1..=steps`.
pub fn stationary_mode_residual(
    h: &DMatrix<Complex64>,
    lambda: f64,
    v: &[Complex64],
    steps: usize,
) -> f64 {
    let omega = dispersion_omega(lambda);
    let i = Complex64::i();
    let psi = |n: f64| -> Vec<Complex64> {
        let phase = (-i * omega * n).exp();
        v.iter().map(|z| phase * z).collect()
    };
    (1..=steps)
        .map(|n| {
            let n = n as f64;
            let hp = linalg::mat_vec(h, &psi(n));
            let (next, prev) = (psi(n + 1.0), psi(n - 1.0));
            next.iter()
                .zip(&prev)
                .zip(&hp)
                .map(|((a, b), c)| (a - b + i * c).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Fundamental time/length unit `l`, in lattice steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscretenessScale(f64);

impl DiscretenessScale {
    pub fn new(l: f64) -> Result<Self> {
        if l.is_finite() && l > 0.0 {
            Ok(DiscretenessScale(l))
        } else {
            Err(Error::InvalidParameter(format!("scale must be positive, got {l}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Largest deviation over `n = 0..=n_max` between the iterated automaton with
/// `H' = l H` and `psi_1 = psi_0`, and the continuum evolution
/// `exp(-i (H'/2) n) psi_0`.
pub fn continuum_limit_check(
    spectral: &SpectralDecomposition,
    psi0: &[Complex64],
    n_max: usize,
    scale: DiscretenessScale,
) -> Result<f64> {
    let dim = spectral.eigen.values.len();
    Error::check_dim(dim, psi0.len())?;
    let l = scale.get();
    let scaled = SpectralDecomposition {
        eigen: HermitianEigen {
            values: spectral.eigen.values.iter().map(|v| v * l).collect(),
            vectors: spectral.eigen.vectors.clone(),
        },
        phi: vec![],
        regimes: spectral
            .eigen
            .values
            .iter()
            .map(|v| SpectralRegime::classify(v * l))
            .collect(),
        reconstruction_error: spectral.reconstruction_error * l,
        h: spectral.h.map(|z| z * l),
    };
    if let Some(eigenvalue) = scaled.first_non_subcritical() {
        return Err(Error::CriticalSpectrum { eigenvalue });
    }
    let i = Complex64::i();
    let h = &scaled.h;
    let reference = |n: usize| {
        let u = scaled
            .eigen
            .function(|lambda| (-i * lambda * 0.5 * n as f64).exp());
        linalg::mat_vec(&u, psi0)
    };
    let mut prev = psi0.to_vec();
    let mut curr = psi0.to_vec();
    let mut deviation = linalg::max_abs_diff(&prev, &reference(0));
    for n in 1..=n_max {
        deviation = deviation.max(linalg::max_abs_diff(&curr, &reference(n)));
        let hc = linalg::mat_vec(h, &curr);
        let next: Vec<Complex64> = prev.iter().zip(&hc).map(|(p, x)| p - i * x).collect();
        prev = std::mem::replace(&mut curr, next);
    }
    Ok(deviation)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeviationPoint {
    pub epsilon: f64,
    pub deviation: f64,
}

/// Deviation at fixed `n * epsilon = time_span` for each `epsilon`.
pub fn continuum_sweep(
    model: &HamiltonianModel,
    psi0: &[Complex64],
    time_span: f64,
    epsilons: &[f64],
) -> Result<Vec<DeviationPoint>> {
    let spectral = phi_operator(model);
    epsilons
        .iter()
        .map(|&epsilon| {
            let scale = DiscretenessScale::new(epsilon)?;
            let n_max = (time_span / epsilon).round() as usize;
            let deviation = continuum_limit_check(&spectral, psi0, n_max, scale)?;
            Ok(DeviationPoint { epsilon, deviation })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::ca::build_hamiltonian;
    use crate::gaussian::{gi, GaussianInt};

    fn sigma1() -> HamiltonianModel {
        build_hamiltonian(vec![vec![0, 1], vec![1, 0]], vec![vec![0; 2]; 2]).unwrap()
    }

    fn c(v: &GaussianIntVector) -> Vec<Complex64> {
        v.to_c64()
    }

    #[test]
    fn phi_of_sigma1() {
        let s = phi_operator(&sigma1());
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.phi[0].re + PI / 6.0).abs() < 1e-14);
        assert!((s.phi[1].re - PI / 6.0).abs() < 1e-14);
        assert!(s.regimes.iter().all(|r| *r == SpectralRegime::Subcritical));
        assert!(s.reconstruction_ok());
    }

    #[test]
    fn phi_of_zero() {
        let s = phi_operator(&HamiltonianModel::zero(3));
        assert!(s.phi.iter().all(|p| p.norm() == 0.0));
    }

    #[test]
    fn two_sigma3_is_critical() {
        let m = build_hamiltonian(vec![vec![2, 0], vec![0, -2]], vec![vec![0; 2]; 2]).unwrap();
        let s = phi_operator(&m);
        assert!(s.regimes.iter().all(|r| *r == SpectralRegime::Critical));
        assert!(s.phi.iter().all(|p| p.cos().norm() < 1e-7));
        let e = GaussianIntVector::basis(2, 0).to_c64();
        assert!(matches!(
            closed_form_state(&s, &e, &e, 3),
            Err(Error::CriticalSpectrum { .. })
        ));
    }

    #[test]
    fn supercritical_phi_solves_dispersion() {
        for lambda in [-7.5, -2.5, 3.0, 10.0] {
            let w = dispersion_omega(lambda);
            assert!((2.0 * w.sin() - lambda).norm() < 1e-12);
            assert!(w.im > 0.0);
            assert_eq!(SpectralRegime::classify(lambda), SpectralRegime::Supercritical);
        }
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion_omega(0.0), Complex64::new(0.0, 0.0));
        assert!((dispersion_omega(1.0).re - PI / 6.0).abs() < 1e-15);
        assert!((dispersion_omega(2.0).re - PI / 2.0).abs() < 1e-15);
        assert_eq!(dispersion_omega(2.0).im, 0.0);
    }

    #[test]
    fn closed_form_reproduces_initial_data_and_second_state() {
        let s = phi_operator(&sigma1());
        let psi0 = c(&GaussianIntVector::basis(2, 0));
        let psi1 = c(&GaussianIntVector::basis(2, 1));
        let at = |n| closed_form_state(&s, &psi0, &psi1, n).unwrap();
        assert!(linalg::max_abs_diff(&at(0), &psi0) < 1e-12);
        assert!(linalg::max_abs_diff(&at(1), &psi1) < 1e-12);
        let psi2 = [Complex64::new(1.0, -1.0), Complex64::new(0.0, 0.0)];
        assert!(linalg::max_abs_diff(&at(2), &psi2) < 1e-12);
        assert!(linalg::max_abs_diff(&at(12), &psi0) < 1e-9);
    }

    #[test]
    fn low_order_transfer_matrices() {
        let m = sigma1();
        let t = transfer_sequence(&m, 3);
        assert_eq!(t[0], GaussianMatrix::identity(2));
        assert!(t[1].is_zero());
        assert_eq!(t[2], GaussianMatrix::identity(2));
        assert_eq!(t[3], m.h().map(crate::gaussian::mul_neg_i));
        assert_eq!(transfer_polynomial(&m, 3).matrix, t[3]);
    }

    #[test]
    fn zero_hamiltonian_transfer_alternates() {
        let t = transfer_sequence(&HamiltonianModel::zero(2), 9);
        for (k, tk) in t.iter().enumerate() {
            if k % 2 == 0 {
                assert_eq!(*tk, GaussianMatrix::identity(2));
            } else {
                assert!(tk.is_zero());
            }
        }
    }

    #[test]
    fn equal_initial_examples() {
        let psi0 = GaussianIntVector::basis(2, 0);
        assert_eq!(equal_initial_form(&sigma1(), &psi0, 0).unwrap(), psi0);
        assert_eq!(
            equal_initial_form(&sigma1(), &psi0, 2).unwrap(),
            GaussianIntVector(vec![gi(1, 0), GaussianInt::new((0).into(), (-1).into())])
        );
    }

    #[test]
    fn stationary_mode_of_sigma1() {
        let h = sigma1().h().to_c64();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = [Complex64::new(r, 0.0), Complex64::new(r, 0.0)];
        assert!(stationary_mode_residual(&h, 1.0, &v, 100) <= 1e-10);
    }

    #[test]
    fn continuum_zero_hamiltonian() {
        let psi0 = c(&GaussianIntVector::basis(2, 0));
        let s = phi_operator(&HamiltonianModel::zero(2));
        let d = continuum_limit_check(&s, &psi0, 50, DiscretenessScale::new(0.1).unwrap()).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn continuum_rejects_large_scale() {
        let psi0 = c(&GaussianIntVector::basis(2, 0));
        let s = phi_operator(&sigma1());
        assert!(matches!(
            continuum_limit_check(&s, &psi0, 5, DiscretenessScale::new(2.0).unwrap()),
            Err(Error::CriticalSpectrum { .. })
        ));
        assert!(DiscretenessScale::new(0.0).is_err());
    }
}
