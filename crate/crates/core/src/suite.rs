//! The `verify-all` invariant suite.
//!
//! Every check draws from its own ChaCha8 stream of the suite seed, so the
//! report depends on nothing but the options.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ca::{evolve, two_time_correlation, CAPairState, HamiltonianModel};
use crate::error::Result;
use crate::gaussian::{gi, GaussianIntVector};
use crate::gup::{self, Boundary, LatticeOperator, LatticeState};
use crate::io::format_float;
use crate::ising::{self, verify, GraphTopology, PhasedPermutation, Schedule, ScheduleKind, ScheduledFlip, SpinConfiguration};
use crate::multitime::{self, product_field, Axis, TensorHamiltonian};
use crate::ontology::{detect_phased_permutation, preset_hamiltonian, standard_basis};
use crate::propagator::{self, DiscretenessScale};
use crate::sampling;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Model B topologies are enumerated up to this many configuration bits.
    pub model_b_max_bits: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            model_b_max_bits: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u64,
    pub options: SuiteOptions,
    pub passed: bool,
    pub checks: Vec<Check>,
}

type CheckFn = fn(&mut ChaCha8Rng, &SuiteOptions) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("two_level_trajectory", two_level_trajectory),
    ("preset_ontology", preset_ontology),
    ("closed_form_matches_iteration", closed_form_matches_iteration),
    ("transfer_composition", transfer_composition),
    ("correlation_conserved", correlation_conserved),
    ("stationary_modes", stationary_modes),
    ("continuum_convergence", continuum_convergence),
    ("product_field_solves_bipartite_equation", product_field_check),
    ("line_propagation_reproduces_product", line_propagation_check),
    ("first_order_entangles", first_order_entangles),
    ("first_order_preserves_norm", first_order_preserves_norm),
    ("leibniz_identity", leibniz_identity),
    ("model_a_composition", model_a_composition),
    ("model_b_structure", model_b_structure),
    ("edge_rule_composition", edge_rule_composition),
    ("projector_identity", projector_identity),
    ("gauge_examples", gauge_examples),
    ("robertson_inequality", robertson_inequality),
    ("bound_minimum", bound_minimum),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(options: &SuiteOptions) -> SuiteReport {
    let checks: Vec<Check> = CHECKS
        .iter()
        .enumerate()
        .map(|(k, (name, f))| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(k as u64);
            log::info!("running {name}");
            let (passed, detail) = f(&mut rng, options).unwrap_or_else(|e| (false, format!("error: {e}")));
            if !passed {
                log::warn!("{name} failed: {detail}");
            }
            Check { name, passed, detail }
        })
        .collect();
    SuiteReport {
        schema_version: crate::io::SCHEMA_VERSION,
        options: options.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn e(dim: usize, k: usize) -> GaussianIntVector {
    GaussianIntVector::basis(dim, k)
}

fn two_level_trajectory(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let model = preset_hamiltonian("H2")?;
    let t = evolve(&CAPairState::initial(e(2, 0), e(2, 1))?, &model, 12)?;
    let expected = [
        e(2, 0),
        e(2, 1),
        e(2, 0).scale(&gi(1, -1)),
        e(2, 1).scale(&gi(0, -1)),
        e(2, 0).scale(&gi(0, -1)),
        e(2, 1).scale(&gi(-1, -1)),
        e(2, 0).scale(&gi(-1, 0)),
        e(2, 1).scale(&gi(-1, 0)),
    ];
    let printed = expected.iter().enumerate().all(|(n, v)| t.states[n] == *v);
    let returns = t.states[12] == e(2, 0) && t.states[13] == e(2, 1);
    Ok((printed && returns, format!("printed states match: {printed}; returns at 12/13: {returns}")))
}

fn preset_ontology(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["H3", "H4"] {
        let model = preset_hamiltonian(name)?;
        let d = model.dim();
        let r = detect_phased_permutation(&model, &e(d, 0), &e(d, 1), &standard_basis(d), 4 * d * 16)?;
        let unit = r.norm_trace.iter().all(|n| *n == 1.into());
        let full_cycle = r.ray_period == Some(d);
        ok &= r.is_ontological && unit && full_cycle;
        details.push(format!(
            "{name}: ontological {}, ray period {:?}, exact period {:?}, unit norms {unit}",
            r.is_ontological, r.ray_period, r.exact_state_period
        ));
    }
    Ok((ok, details.join("; ")))
}

fn closed_form_matches_iteration(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let dim = rng.gen_range(1..=6);
        let model = sampling::random_subcritical_model(rng, dim, 1.9);
        let psi0 = sampling::random_vector(rng, dim, 3);
        let psi1 = sampling::random_vector(rng, dim, 3);
        let t = evolve(&CAPairState::initial(psi0.clone(), psi1.clone())?, &model, 99)?;
        let spectral = propagator::phi_operator(&model);
        let (a, b) = (psi0.to_c64(), psi1.to_c64());
        for n in 0..=100 {
            let closed = propagator::closed_form_state(&spectral, &a, &b, n)?;
            let exact = t.state(n).expect("within trajectory").to_c64();
            worst = worst.max(crate::linalg::max_abs_diff(&closed, &exact));
        }
    }
    Ok((worst <= 1e-8, format!("max deviation {}", format_float(worst))))
}

fn transfer_composition(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut failures = 0;
    let mut cases = 0;
    for _ in 0..5 {
        let dim = rng.gen_range(1..=4);
        let model = sampling::random_model(rng, dim, 1);
        let pair = CAPairState::initial(sampling::random_vector(rng, dim, 2), sampling::random_vector(rng, dim, 2))?;
        let t = evolve(&pair, &model, 29)?;
        let transfers = propagator::transfer_sequence(&model, 31);
        for m in 0..30i64 {
            for n in m + 1..=30 {
                cases += 1;
                let offset = (n - m) as usize;
                let got = propagator::compose_from(&transfers, t.state(m).unwrap(), t.state(m + 1).unwrap(), offset);
                if &got != t.state(n).unwrap() {
                    failures += 1;
                }
            }
        }
    }
    Ok((failures == 0, format!("{cases} (m, n) pairs, {failures} mismatches")))
}

fn correlation_conserved(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut broken = 0;
    for _ in 0..50 {
        let dim = rng.gen_range(1..=8);
        let model = sampling::random_model(rng, dim, 2);
        let pair = CAPairState::initial(sampling::random_vector(rng, dim, 5), sampling::random_vector(rng, dim, 5))?;
        let q0 = two_time_correlation(&pair)?;
        let mut ev = crate::ca::Evolution::new(pair, &model, crate::ca::Direction::Forward)?;
        for _ in 0..1000 {
            let p = ev.next().expect("unbounded");
            if two_time_correlation(&p)? != q0 {
                broken += 1;
                break;
            }
        }
    }
    Ok((broken == 0, format!("50 models x 1000 steps, {broken} models changed Q")))
}

fn stationary_modes(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut models: Vec<HamiltonianModel> = ["H2", "H3", "H4"]
        .iter()
        .map(|n| preset_hamiltonian(n))
        .collect::<Result<_>>()?;
    for _ in 0..10 {
        let dim = rng.gen_range(1..=6);
        models.push(sampling::random_subcritical_model(rng, dim, 2.0));
    }
    let mut worst: f64 = 0.0;
    let mut modes = 0;
    for model in &models {
        let spectral = propagator::phi_operator(model);
        for (k, &lambda) in spectral.eigenvalues().iter().enumerate() {
            if lambda.abs() > 2.0 + propagator::CRITICAL_TOLERANCE {
                continue;
            }
            let v: Vec<_> = spectral.eigenvectors().column(k).iter().copied().collect();
            worst = worst.max(propagator::stationary_mode_residual(spectral.hamiltonian(), lambda, &v, 100));
            modes += 1;
        }
    }
    Ok((worst <= 1e-10, format!("{modes} modes, max residual {}", format_float(worst))))
}

fn continuum_convergence(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let model = preset_hamiltonian("H2")?;
    let psi0 = e(2, 0).to_c64();
    let sweep = propagator::continuum_sweep(&model, &psi0, 2.0, &[0.2, 0.1, 0.05])?;
    let ratios: Vec<f64> = sweep.windows(2).map(|w| w[0].deviation / w[1].deviation).collect();
    let ok = ratios.iter().all(|&r| r >= 1.8);
    let shown: Vec<String> = sweep.iter().map(|p| format_float(p.deviation)).collect();
    Ok((ok, format!("deviations {}", shown.join(", "))))
}

fn random_solution(rng: &mut ChaCha8Rng, dim: usize, len: usize) -> Result<crate::ca::Trajectory> {
    let model = sampling::random_model(rng, dim, 1);
    let pair = CAPairState::initial(sampling::random_vector(rng, dim, 2), sampling::random_vector(rng, dim, 2))?;
    evolve(&pair, &model, len - 2)
}

fn product_field_check(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut violations = 0;
    let mut interior = 0;
    for _ in 0..3 {
        let (d1, d2) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (p1, p2) = (random_solution(rng, d1, 20)?, random_solution(rng, d2, 20)?);
        let h = TensorHamiltonian::separable(vec![p1.model.h().clone(), p2.model.h().clone()])?;
        let field = product_field(&p1, &p2);
        interior += field.interior_count();
        violations += field.residual_violations(&h).len();
    }
    Ok((violations == 0, format!("{interior} interior points, {violations} nonzero residuals")))
}

fn line_propagation_check(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let (p1, p2) = (random_solution(rng, d1, 20)?, random_solution(rng, d2, 20)?);
    let h = TensorHamiltonian::separable(vec![p1.model.h().clone(), p2.model.h().clone()])?;
    let full = product_field(&p1, &p2);
    let mut field = multitime::MultiTimeField::new((d1, d2));
    for (&p, v) in full.iter().filter(|(p, _)| p.0 <= 1) {
        field.insert(p, v.clone())?;
    }
    let mut lines = 0;
    while let Ok(next) = multitime::propagate_line(&field, &h, Axis::N1, 1) {
        field = next;
        lines += 1;
    }
    let mismatched = field.iter().filter(|(p, v)| full.get(**p) != Some(*v)).count();
    let residuals = field.residual_violations(&h).len();
    Ok((
        mismatched == 0 && residuals == 0 && lines == 9,
        format!("{lines} lines, {} points, {mismatched} mismatches, {residuals} residuals", field.len()),
    ))
}

fn first_order_entangles(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut ranks = Vec::new();
    for _ in 0..5 {
        let (d1, d2) = (rng.gen_range(2..=4), rng.gen_range(2..=4));
        // resample until neither factor is an eigenvector, where the rank stays 1
        let (h1, h2, u, v) = loop {
            let (h1, h2) = (sampling::random_hermitian(rng, d1, 1), sampling::random_hermitian(rng, d2, 1));
            let (u, v) = (sampling::random_nonzero_vector(rng, d1, 2), sampling::random_nonzero_vector(rng, d2, 2));
            if !parallel(&h1.mul_vec(&u), &u) && !parallel(&h2.mul_vec(&v), &v) {
                break (h1, h2, u, v);
            }
        };
        let h = TensorHamiltonian::separable(vec![h1, h2])?;
        let run = multitime::sync_first_order(&u.kron(&v), &h, 1, 1, (0, 0))?;
        ranks.push(multitime::schmidt_rank(&run.states[1].to_c64(), (d1, d2))?);
    }
    Ok((ranks.iter().all(|&r| r == 2), format!("ranks after one step {ranks:?}")))
}

/// Whether `a` is a multiple of `b` (including `a = 0`).
fn parallel(a: &GaussianIntVector, b: &GaussianIntVector) -> bool {
    let n = a.dim();
    (0..n).all(|i| (0..n).all(|j| &a[i] * &b[j] - &a[j] * &b[i] == gi(0, 0)))
}

fn first_order_preserves_norm(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let t = GraphTopology::fully_connected(3)?;
    let b = ising::model_b_transfer(&t)?;
    let h = crate::gaussian::GaussianMatrix::from_fn(b.dim(), |r, c| {
        let (t, p) = b.apply(c);
        if t != r {
            return gi(0, 0);
        }
        // -i H = i^p, so H = i^(p+1)
        match (p + 1) % 4 {
            0 => gi(1, 0),
            1 => gi(0, 1),
            2 => gi(-1, 0),
            _ => gi(0, -1),
        }
    });
    let h = TensorHamiltonian::general(vec![8, 8], h)?;
    let v = sampling::random_nonzero_vector(rng, 64, 3);
    let run = multitime::sync_first_order(&v, &h, 20, 1, (0, 0))?;
    let n0 = v.norm_sqr();
    let ok = run.states.iter().all(|s| s.norm_sqr() == n0);
    Ok((ok, format!("20 steps, squared norm {n0}")))
}

fn leibniz_identity(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut modified_fail = 0;
    let mut naive_fail = 0;
    for _ in 0..100 {
        let f = sampling::random_rational_sequence(rng, 8, 9);
        let g = sampling::random_rational_sequence(rng, 8, 9);
        let r = multitime::leibniz_identity_check(&f, &g)?;
        if !r.modified.is_zero() {
            modified_fail += 1;
        }
        if !r.naive.is_zero() {
            naive_fail += 1;
        }
    }
    Ok((
        modified_fail == 0 && naive_fail >= 95,
        format!("modified rule failed {modified_fail}/100, naive rule failed {naive_fail}/100"),
    ))
}

fn model_a_composition(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut mismatches = 0;
    for _ in 0..5 {
        let n = rng.gen_range(2..=8);
        let t = GraphTopology::fully_connected(n)?;
        let flips: Vec<ScheduledFlip> = (0..rng.gen_range(1..=5))
            .map(|_| ScheduledFlip {
                edge: t.edges()[rng.gen_range(0..t.n_edges())],
                sign: if rng.gen_bool(0.5) { 1 } else { -1 },
            })
            .collect();
        let schedule = Schedule::new(ScheduleKind::SeededRandom { seed: rng.gen() }, flips)?;
        let steps = 100;
        let mut product = PhasedPermutation::identity(1 << n);
        for f in schedule.expand(steps)? {
            product = product.then(&ising::model_a_step_operator(&t, f.edge, f.sign)?)?;
        }
        for x in 0..1usize << n {
            let run = ising::model_a_evolve(&SpinConfiguration::from_index(x, n, 0), &t, &schedule, steps)?;
            let last = run.last().unwrap();
            if (last.config.basis_index(), last.phase_exponent) != product.apply(x) {
                mismatches += 1;
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} basis states disagree with the composed map")))
}

fn model_b_structure(_: &mut ChaCha8Rng, options: &SuiteOptions) -> Result<(bool, String)> {
    let topologies = verify::all_topologies(options.model_b_max_bits);
    let mut failed = 0;
    let mut worst: f64 = 0.0;
    for t in &topologies {
        let v = verify::verify_model_b(t)?;
        worst = worst.max(v.exponential_deviation);
        if !v.passed(1e-9) {
            failed += 1;
        }
    }
    Ok((
        failed == 0,
        format!(
            "{} topologies up to {} bits, {failed} failed, max exponential deviation {}",
            topologies.len(),
            options.model_b_max_bits,
            format_float(worst)
        ),
    ))
}

fn edge_rule_composition(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let t = GraphTopology::path(2)?;
    let b = ising::model_b_transfer(&t)?;
    let frozen = ising::edge_update_compose(&b, &ising::edge_rule_permutation(ising::EdgeRule::Frozen, &t)?, &t)?;
    let periods: Vec<Option<usize>> = (0..8).map(|x| frozen.orbit_period(x, 16)).collect();
    let ring = GraphTopology::ring(4)?;
    let rb = ising::model_b_transfer(&ring)?;
    let shifted = ising::edge_update_compose(&rb, &ising::edge_rule_permutation(ising::EdgeRule::CyclicShift, &ring)?, &ring)?;
    let phases_kept = (0..rb.dim()).all(|x| shifted.phase_exponent(x) == rb.phase_exponent(x));
    let ok = periods.iter().all(|p| *p == Some(4)) && phases_kept;
    Ok((ok, format!("frozen periods {periods:?}; shift keeps phases {phases_kept}")))
}

fn projector_identity(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let ok = (1..=16).all(ising::projector_identity_check);
    Ok((ok, "k = 1..16".into()))
}

fn gauge_examples(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    use ising::GaugeTransform::Permutation;
    let t = GraphTopology::ring(3)?;
    let flip = ising::gauge_check(&Permutation(ising::vertex_flip_all(&t)?), &t)?;
    let s3 = ising::gauge_check(&Permutation(ising::vertex_sigma3(&t, 0)?), &t)?;
    let id = ising::gauge_check(&Permutation(PhasedPermutation::identity(64)), &t)?;
    Ok((
        flip.commutes && !s3.commutes && id.commutes,
        format!(
            "global flip {}, single sigma3 {}, identity {}",
            flip.commutes, s3.commutes, id.commutes
        ),
    ))
}

fn robertson_inequality(rng: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let l = DiscretenessScale::new(1.0)?;
    let x = LatticeOperator::position(64, l, Boundary::Periodic)?;
    let p = LatticeOperator::momentum(64, l, Boundary::Periodic)?;
    let mut violations = 0;
    for _ in 0..1000 {
        let s = LatticeState::random(64, rng)?;
        if !gup::robertson_check(&s, &x, &p)?.holds {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("1000 states, {violations} violations")))
}

fn bound_minimum(_: &mut ChaCha8Rng, _: &SuiteOptions) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for l in [0.25, 1.0, 2.0] {
        let l = DiscretenessScale::new(l)?;
        let closed = gup::bound_min_dx(l);
        worst = worst.max((closed - l.get() / 2f64.sqrt()).abs());
        worst = worst.max((gup::bound_min_dx_numeric(l) - closed).abs());
    }
    Ok((worst <= 1e-12, format!("max disagreement {}", format_float(worst))))
}
