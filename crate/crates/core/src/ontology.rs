//! Detection of permutation-with-phase ("ontological") dynamics.
//!
//! Every iterate is reduced to its canonical ray (first nonzero component
//! scaled to exactly 1). The dynamics is ontological with respect to a basis
//! of rays when every iterate lands on one of those rays and the exact pair
//! `(psi_n, psi_{n+1})` eventually recurs.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::ca::{build_hamiltonian, CAPairState, HamiltonianModel, Trajectory};
use crate::error::{Error, Result};
use crate::gaussian::{format_gi, format_gr, to_rational, GaussianInt, GaussianIntVector, GaussianRational};

/// Normalization-insensitive identity of a nonzero state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalRay {
    pub components: Vec<GaussianRational>,
    pub pivot_index: usize,
}

impl CanonicalRay {
    pub fn component_strings(&self) -> Vec<String> {
        self.components.iter().map(format_gr).collect()
    }
}

pub fn canonical_ray(v: &GaussianIntVector) -> Result<CanonicalRay> {
    let pivot_index = v.iter().position(|z| !z.is_zero()).ok_or(Error::ZeroVector)?;
    let pivot = to_rational(&v[pivot_index]);
    let components = v.iter().map(|z| to_rational(z) / &pivot).collect();
    Ok(CanonicalRay {
        components,
        pivot_index,
    })
}

/// The ray basis of the standard unit vectors.
pub fn standard_basis(dim: usize) -> Vec<CanonicalRay> {
    (0..dim)
        .map(|k| canonical_ray(&GaussianIntVector::basis(dim, k)).expect("unit vector"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// An iterate is zero or lies on a ray outside the basis.
    LeftBasis,
    /// All rays stayed in the basis but the pair never recurred.
    NoRecurrence,
}

#[derive(Clone, Debug)]
pub struct PermutationReport {
    pub is_ontological: bool,
    /// Rays of `psi_0, psi_1, ...`: one ray period when ontological, all
    /// visited rays up to the failure otherwise.
    pub ray_cycle: Vec<CanonicalRay>,
    pub ray_period: Option<usize>,
    pub exact_state_period: Option<usize>,
    /// `psi_n = phase_log[n] * ray_n`, exactly (the pivot component of `psi_n`).
    pub phase_log: Vec<GaussianInt>,
    pub failure_step: Option<usize>,
    pub failure_kind: Option<FailureKind>,
    pub norm_trace: Vec<BigInt>,
}

pub fn default_max_steps(dim: usize) -> usize {
    4 * dim * 16
}

/// Iterates from `(psi_0, psi_1)` for up to `max_steps` updates.
pub fn detect_phased_permutation(
    model: &HamiltonianModel,
    psi0: &GaussianIntVector,
    psi1: &GaussianIntVector,
    basis: &[CanonicalRay],
    max_steps: usize,
) -> Result<PermutationReport> {
    if max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
    }
    if basis.is_empty() {
        return Err(Error::InvalidParameter("basis must be nonempty".into()));
    }
    Error::check_dim(model.dim(), psi0.dim())?;
    Error::check_dim(model.dim(), psi1.dim())?;
    if let Some(r) = basis.iter().find(|r| r.components.len() != model.dim()) {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: r.components.len(),
        });
    }

    let mut states = vec![psi0.clone(), psi1.clone()];
    let mut rays = Vec::new();
    let mut phases = Vec::new();

    let fail = |n: usize, rays: Vec<CanonicalRay>, phases, states: &[GaussianIntVector]| {
        PermutationReport {
            is_ontological: false,
            ray_cycle: rays,
            ray_period: None,
            exact_state_period: None,
            phase_log: phases,
            failure_step: Some(n),
            failure_kind: None,
            norm_trace: states[..=n.min(states.len() - 1)]
                .iter()
                .map(GaussianIntVector::norm_sqr)
                .collect(),
        }
    };

    let mut exact_period = None;
    for n in 0..=max_steps + 1 {
        if n >= states.len() {
            let k = states.len();
            let next = &states[k - 2] + &model.apply_neg_i_h(&states[k - 1]);
            states.push(next);
        }
        let ray = match canonical_ray(&states[n]) {
            Ok(r) if basis.contains(&r) => r,
            _ => {
                let mut r = fail(n, rays, phases, &states);
                r.failure_kind = Some(FailureKind::LeftBasis);
                return Ok(r);
            }
        };
        phases.push(states[n][ray.pivot_index].clone());
        rays.push(ray);
        // pair (psi_{n-1}, psi_n) back at (psi_0, psi_1)
        if n >= 2 && states[n - 1] == states[0] && states[n] == states[1] {
            exact_period = Some(n - 1);
            break;
        }
    }

    let Some(period) = exact_period else {
        let mut r = fail(max_steps, rays, phases, &states);
        r.failure_kind = Some(FailureKind::NoRecurrence);
        return Ok(r);
    };

    // rays[0..=period] are known; the ray sequence repeats with the exact period.
    let ray_at = |n: usize| &rays[n % period];
    let ray_period = (1..=period)
        .find(|&p| period % p == 0 && (0..period).all(|n| ray_at(n + p) == ray_at(n)))
        .expect("period itself qualifies");

    Ok(PermutationReport {
        is_ontological: true,
        ray_cycle: rays[..ray_period].to_vec(),
        ray_period: Some(ray_period),
        exact_state_period: Some(period),
        phase_log: phases[..period].to_vec(),
        failure_step: None,
        failure_kind: None,
        norm_trace: states[..period].iter().map(GaussianIntVector::norm_sqr).collect(),
    })
}

/// Convenience wrapper taking the initial pair as a [`CAPairState`].
pub fn detect_for_pair(
    model: &HamiltonianModel,
    pair: &CAPairState,
    basis: &[CanonicalRay],
    max_steps: usize,
) -> Result<PermutationReport> {
    detect_phased_permutation(model, &pair.prev, &pair.curr, basis, max_steps)
}

/// Squared norms `psi_n^dagger psi_n` along a trajectory.
pub fn norm_trace(trajectory: &Trajectory) -> Vec<BigInt> {
    trajectory.states.iter().map(GaussianIntVector::norm_sqr).collect()
}

pub const PRESET_NAMES: [&str; 3] = ["H2", "H3", "H4"];

/// The two-, three- and four-state Hamiltonians with permutation dynamics.
pub fn preset_hamiltonian(name: &str) -> Result<HamiltonianModel> {
    let (s, a) = match name {
        "H2" => (vec![vec![0, 1], vec![1, 0]], vec![vec![0, 0], vec![0, 0]]),
        // H3 = [[0, -i, 1], [i, 0, -i], [1, i, 0]]
        "H3" => (
            vec![vec![0, 0, 1], vec![0, 0, 0], vec![1, 0, 0]],
            vec![vec![0, -1, 0], vec![1, 0, -1], vec![0, 1, 0]],
        ),
        // H4 = [[0, -i, 0, 1], [i, 0, -i, 0], [0, i, 0, -i], [1, 0, i, 0]]
        "H4" => (
            vec![
                vec![0, 0, 0, 1],
                vec![0, 0, 0, 0],
                vec![0, 0, 0, 0],
                vec![1, 0, 0, 0],
            ],
            vec![
                vec![0, -1, 0, 0],
                vec![1, 0, -1, 0],
                vec![0, 1, 0, -1],
                vec![0, 0, 1, 0],
            ],
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    build_hamiltonian(s, a)
}

/// JSON-facing view of a [`PermutationReport`].
#[derive(Clone, Debug, Serialize)]
pub struct PermutationSummary {
    pub ontological: bool,
    pub exact_period: Option<usize>,
    pub ray_period: Option<usize>,
    pub ray_cycle: Vec<Vec<String>>,
    pub phase_log: Vec<String>,
    pub failure_step: Option<usize>,
    pub failure_kind: Option<FailureKind>,
    pub norm_trace: Vec<String>,
}

impl From<&PermutationReport> for PermutationSummary {
    fn from(r: &PermutationReport) -> Self {
        PermutationSummary {
            ontological: r.is_ontological,
            exact_period: r.exact_state_period,
            ray_period: r.ray_period,
            ray_cycle: r.ray_cycle.iter().map(CanonicalRay::component_strings).collect(),
            phase_log: r.phase_log.iter().map(format_gi).collect(),
            failure_step: r.failure_step,
            failure_kind: r.failure_kind,
            norm_trace: r.norm_trace.iter().map(ToString::to_string).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::ca::{evolve, CAPairState};
    use crate::gaussian::gi;

    fn e(dim: usize, k: usize) -> GaussianIntVector {
        GaussianIntVector::basis(dim, k)
    }

    #[test]
    fn rays_of_examples() {
        let r = canonical_ray(&GaussianIntVector::from_pairs(&[(1, -1), (0, 0)])).unwrap();
        assert_eq!(r, canonical_ray(&e(2, 0)).unwrap());
        let r = canonical_ray(&GaussianIntVector::from_pairs(&[(0, 0), (-1, -1)])).unwrap();
        assert_eq!(r, canonical_ray(&e(2, 1)).unwrap());
        assert_eq!(r.pivot_index, 1);
        let r = canonical_ray(&GaussianIntVector::from_pairs(&[(2, 0), (1, 1)])).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            r.components[1],
            GaussianRational::new(half.clone(), half)
        );
        assert_eq!(r.component_strings(), vec!["1", "1/2+1/2i"]);
        assert!(matches!(
            canonical_ray(&GaussianIntVector::zeros(2)),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn h2_orthogonal_start_is_ontological() {
        let h2 = preset_hamiltonian("H2").unwrap();
        let r = detect_phased_permutation(&h2, &e(2, 0), &e(2, 1), &standard_basis(2), 128)
            .unwrap();
        assert!(r.is_ontological);
        assert_eq!(r.exact_state_period, Some(12));
        assert_eq!(r.ray_period, Some(2));
        assert_eq!(r.ray_cycle, standard_basis(2));
        assert_eq!(r.phase_log[2], gi(1, -1));
        assert_eq!(r.phase_log[5], gi(-1, -1));
    }

    #[test]
    fn h3_cycles_through_three_rays() {
        let h3 = preset_hamiltonian("H3").unwrap();
        let r = detect_phased_permutation(&h3, &e(3, 0), &e(3, 1), &standard_basis(3), 192)
            .unwrap();
        assert!(r.is_ontological);
        assert_eq!(r.exact_state_period, Some(12));
        assert_eq!(r.ray_period, Some(3));
        assert_eq!(r.ray_cycle, standard_basis(3));
        assert_eq!(r.phase_log[3], gi(0, -1));
        assert_eq!(r.phase_log[6], gi(-1, 0));
        assert!(r.norm_trace.iter().all(|n| *n == BigInt::from(1)));
    }

    #[test]
    fn equal_start_leaves_basis_at_step_two() {
        let h2 = preset_hamiltonian("H2").unwrap();
        let r = detect_phased_permutation(&h2, &e(2, 0), &e(2, 0), &standard_basis(2), 128)
            .unwrap();
        assert!(!r.is_ontological);
        assert_eq!(r.failure_step, Some(2));
        assert_eq!(r.failure_kind, Some(FailureKind::LeftBasis));
    }

    #[test]
    fn growth_without_recurrence_is_reported() {
        // H = 3 on a single state: stays on the ray but never recurs.
        let m = build_hamiltonian(vec![vec![3]], vec![vec![0]]).unwrap();
        let r = detect_phased_permutation(&m, &e(1, 0), &e(1, 0), &standard_basis(1), 40)
            .unwrap();
        assert!(!r.is_ontological);
        assert_eq!(r.failure_kind, Some(FailureKind::NoRecurrence));
        assert_eq!(r.failure_step, Some(40));
    }

    #[test]
    fn argument_validation() {
        let h2 = preset_hamiltonian("H2").unwrap();
        assert!(detect_phased_permutation(&h2, &e(2, 0), &e(2, 1), &[], 10).is_err());
        assert!(detect_phased_permutation(&h2, &e(2, 0), &e(2, 1), &standard_basis(2), 0).is_err());
        assert!(detect_phased_permutation(&h2, &e(2, 0), &e(2, 1), &standard_basis(3), 5).is_err());
    }

    #[test]
    fn presets() {
        let h2 = preset_hamiltonian("H2").unwrap();
        assert_eq!(h2.s(), &[vec![0, 1], vec![1, 0]]);
        let h3 = preset_hamiltonian("H3").unwrap();
        assert_eq!(h3.h()[(0, 0)], gi(0, 0));
        assert_eq!(h3.h()[(0, 1)], gi(0, -1));
        assert_eq!(h3.h()[(0, 2)], gi(1, 0));
        let h4 = preset_hamiltonian("H4").unwrap();
        assert_eq!(h4.h()[(0, 3)], gi(1, 0));
        assert_eq!(h4.h()[(3, 0)], gi(1, 0));
        assert_eq!(h4.h()[(3, 2)], gi(0, 1));
        assert!(matches!(preset_hamiltonian("H5"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn norm_traces() {
        let h2 = preset_hamiltonian("H2").unwrap();
        let t = evolve(&CAPairState::initial(e(2, 0), e(2, 1)).unwrap(), &h2, 11).unwrap();
        let norms = norm_trace(&t);
        assert_eq!(norms[2], BigInt::from(2));
        let z = evolve(
            &CAPairState::initial(e(2, 0), e(2, 0)).unwrap(),
            &HamiltonianModel::zero(2),
            6,
        )
        .unwrap();
        assert!(norm_trace(&z).iter().all(|n| *n == BigInt::from(1)));
    }
}
