//! Declarative experiments: validation, execution and artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ca::{evolve, two_time_correlation, CAPairState, HamiltonianModel};
use crate::error::{Error, Result};
use crate::gaussian::GaussianIntVector;
use crate::gup::{self, Boundary, GaussianFamily};
use crate::io::{self, Component, Format, Source};
use crate::ising::{self, EdgeRule, GraphTopology, Schedule, SpinConfiguration};
use crate::multitime::{self, Axis, MultiTimeField, TensorHamiltonian};
use crate::ontology::{self, standard_basis, PermutationSummary};
use crate::propagator::{self, DiscretenessScale, SpectralRegime};
use crate::suite::{self, SuiteOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Evolve,
    OntologyScan,
    Multitime,
    IsingA,
    IsingB,
    Gup,
    Dispersion,
    VerifyAll,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Evolve => "evolve",
            Kind::OntologyScan => "ontology-scan",
            Kind::Multitime => "multitime",
            Kind::IsingA => "ising-a",
            Kind::IsingB => "ising-b",
            Kind::Gup => "gup",
            Kind::Dispersion => "dispersion",
            Kind::VerifyAll => "verify-all",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Kind::Evolve | Kind::Multitime | Kind::IsingA | Kind::IsingB | Kind::Dispersion => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputDoc {
    path: Option<String>,
    format: Option<Format>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRuleDoc {
    kind: String,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MultitimeDoc {
    h1: Option<Value>,
    h2: Option<Value>,
    phi1: Option<[Vec<Component>; 2]>,
    phi2: Option<[Vec<Component>; 2]>,
    length: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GupDoc {
    sites: Option<usize>,
    scale: Option<f64>,
    boundary: Option<Boundary>,
    samples: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContinuumDoc {
    time_span: f64,
    epsilons: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    #[allow(dead_code)]
    schema_version: u64,
    kind: Kind,
    model: Option<Value>,
    psi0: Option<Vec<Component>>,
    psi1: Option<Vec<Component>>,
    steps: Option<usize>,
    seed: Option<u64>,
    #[serde(default)]
    output: OutputDoc,
    topology: Option<Value>,
    schedule: Option<Value>,
    initial_config: Option<String>,
    edge_rule: Option<EdgeRuleDoc>,
    max_steps: Option<usize>,
    multitime: Option<MultitimeDoc>,
    gup: Option<GupDoc>,
    continuum: Option<ContinuumDoc>,
    model_b_max_bits: Option<usize>,
}

/// Command-line values that take precedence over the config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub sites: Option<usize>,
    pub scale: Option<f64>,
    pub boundary: Option<Boundary>,
    pub samples: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum Task {
    Evolve {
        model: HamiltonianModel,
        psi0: GaussianIntVector,
        psi1: GaussianIntVector,
    },
    OntologyScan {
        model: HamiltonianModel,
        max_steps: usize,
    },
    Multitime {
        h1: HamiltonianModel,
        h2: HamiltonianModel,
        phi1: (GaussianIntVector, GaussianIntVector),
        phi2: (GaussianIntVector, GaussianIntVector),
        length: usize,
    },
    IsingA {
        topology: GraphTopology,
        schedule: Schedule,
        start: SpinConfiguration,
    },
    IsingB {
        topology: GraphTopology,
        rule: EdgeRule,
        start: SpinConfiguration,
    },
    Gup {
        sites: usize,
        scale: DiscretenessScale,
        boundary: Boundary,
        samples: usize,
    },
    Dispersion {
        model: HamiltonianModel,
        continuum: Option<(f64, Vec<f64>)>,
    },
    VerifyAll {
        model_b_max_bits: usize,
    },
}

/// A validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub task: Task,
    pub steps: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig> {
    let (value, source) = io::read_document(path)?;
    let doc: ConfigDoc = io::parse(&value, &source, "$")?;
    build(doc, &source, overrides)
}

pub fn parse_config(value: &Value, overrides: &Overrides) -> Result<ExperimentConfig> {
    let source = Source::inline();
    if value.get("schema_version").and_then(Value::as_u64) != Some(io::SCHEMA_VERSION) {
        return Err(source.err("$.schema_version", format!("must be {}", io::SCHEMA_VERSION)));
    }
    let doc: ConfigDoc = io::parse(value, &source, "$")?;
    build(doc, &source, overrides)
}

/// Configuration for `kind` with every field defaulted.
pub fn default_config(kind: Kind, overrides: &Overrides) -> Result<ExperimentConfig> {
    parse_config(&json!({"schema_version": io::SCHEMA_VERSION, "kind": kind}), overrides)
}

fn default_steps(kind: Kind) -> usize {
    match kind {
        Kind::Evolve => 13,
        Kind::Multitime => 9,
        Kind::IsingA => 12,
        Kind::IsingB => 8,
        _ => 0,
    }
}

fn build(doc: ConfigDoc, source: &Source, o: &Overrides) -> Result<ExperimentConfig> {
    let kind = doc.kind;
    let model = |field: &str, v: &Option<Value>, preset: &str| -> Result<HamiltonianModel> {
        match v {
            Some(v) => io::load_model(v, source, field),
            None => Ok(ontology::preset_hamiltonian(preset)?),
        }
    };
    let vector = |field: &str, v: &Option<Vec<Component>>, dim: usize, k: usize| -> Result<GaussianIntVector> {
        let out = v.as_deref().map(io::to_vector).unwrap_or_else(|| GaussianIntVector::basis(dim, k));
        if out.dim() != dim {
            return Err(source.err(field, format!("expected {dim} components, found {}", out.dim())));
        }
        Ok(out)
    };
    let steps = o.steps.or(doc.steps).unwrap_or(default_steps(kind));
    let needs_steps = matches!(kind, Kind::Evolve | Kind::IsingA | Kind::IsingB | Kind::Multitime);
    if needs_steps && steps == 0 {
        return Err(source.err("$.steps", "must be at least 1"));
    }
    let seed = o.seed.or(doc.seed).unwrap_or(0);

    let task = match kind {
        Kind::Evolve => {
            let m = model("$.model", &doc.model, "H2")?;
            let d = m.dim();
            Task::Evolve {
                psi0: vector("$.psi0", &doc.psi0, d, 0)?,
                psi1: vector("$.psi1", &doc.psi1, d, 1.min(d - 1))?,
                model: m,
            }
        }
        Kind::OntologyScan => {
            let m = model("$.model", &doc.model, "H4")?;
            Task::OntologyScan {
                max_steps: doc.max_steps.unwrap_or(ontology::default_max_steps(m.dim())),
                model: m,
            }
        }
        Kind::Multitime => {
            let mt = doc.multitime.unwrap_or(MultitimeDoc {
                h1: None,
                h2: None,
                phi1: None,
                phi2: None,
                length: None,
            });
            let h1 = model("$.multitime.h1", &mt.h1, "H2")?;
            let h2 = model("$.multitime.h2", &mt.h2, "H3")?;
            let pair = |field: &str, p: &Option<[Vec<Component>; 2]>, d: usize| -> Result<_> {
                let (a, b) = match p {
                    Some([a, b]) => (Some(a.clone()), Some(b.clone())),
                    None => (None, None),
                };
                Ok((vector(field, &a, d, 0)?, vector(field, &b, d, 1.min(d - 1))?))
            };
            let length = mt.length.unwrap_or(2 * steps + 2);
            if length < 3 {
                return Err(source.err("$.multitime.length", "need at least 3 points per line"));
            }
            Task::Multitime {
                phi1: pair("$.multitime.phi1", &mt.phi1, h1.dim())?,
                phi2: pair("$.multitime.phi2", &mt.phi2, h2.dim())?,
                h1,
                h2,
                length,
            }
        }
        Kind::IsingA | Kind::IsingB => {
            let topology = match &doc.topology {
                Some(v) => io::load_topology(v, source, "$.topology")?,
                None if kind == Kind::IsingA => GraphTopology::path(3)?,
                None => GraphTopology::ring(3)?,
            };
            let (n, e) = (topology.n_vertices(), topology.n_edges());
            let bits_len = if kind == Kind::IsingA { n } else { n + e };
            let start = match &doc.initial_config {
                Some(s) => {
                    let bits = io::parse_bits(s, source, "$.initial_config")?;
                    if bits.len() != bits_len {
                        return Err(source.err(
                            "$.initial_config",
                            format!("expected {bits_len} bits, found {}", bits.len()),
                        ));
                    }
                    SpinConfiguration {
                        vertex_bits: bits[..n].to_vec(),
                        edge_bits: bits[n..].to_vec(),
                    }
                }
                // all edges up
                None => SpinConfiguration {
                    vertex_bits: vec![false; n],
                    edge_bits: vec![true; bits_len - n],
                },
            };
            if kind == Kind::IsingA {
                let schedule = match &doc.schedule {
                    Some(v) => io::load_schedule(v, source, "$.schedule")?,
                    None => Schedule::periodic(topology.edges())?,
                };
                schedule
                    .validate(&topology)
                    .map_err(|e| source.err("$.schedule", e.to_string()))?;
                schedule
                    .expand(steps)
                    .map_err(|e| source.err("$.schedule", e.to_string()))?;
                Task::IsingA {
                    topology,
                    schedule,
                    start,
                }
            } else {
                if topology.total_bits() > ising::DEFAULT_BIT_LIMIT {
                    return Err(source.err(
                        "$.topology",
                        format!("{} configuration bits exceed {}", topology.total_bits(), ising::DEFAULT_BIT_LIMIT),
                    ));
                }
                let rule = match &doc.edge_rule {
                    None => EdgeRule::Frozen,
                    Some(r) => match (r.kind.as_str(), r.seed) {
                        ("frozen", None) => EdgeRule::Frozen,
                        ("cyclic_shift", None) => EdgeRule::CyclicShift,
                        ("seeded_random", Some(seed)) => EdgeRule::SeededRandom { seed },
                        ("seeded_random", None) => EdgeRule::SeededRandom { seed },
                        (k, _) => return Err(source.err("$.edge_rule", format!("unsupported edge rule {k:?}"))),
                    },
                };
                Task::IsingB { topology, rule, start }
            }
        }
        Kind::Gup => {
            let g = doc.gup.unwrap_or(GupDoc {
                sites: None,
                scale: None,
                boundary: None,
                samples: None,
            });
            let sites = o.sites.or(g.sites).unwrap_or(64);
            if sites < 16 {
                return Err(source.err("$.gup.sites", "need at least 16 sites"));
            }
            let scale = DiscretenessScale::new(o.scale.or(g.scale).unwrap_or(1.0))
                .map_err(|e| source.err("$.gup.scale", e.to_string()))?;
            Task::Gup {
                sites,
                scale,
                boundary: o.boundary.or(g.boundary).unwrap_or(Boundary::Periodic),
                samples: o.samples.or(g.samples).unwrap_or(1000),
            }
        }
        Kind::Dispersion => {
            let m = model("$.model", &doc.model, "H2")?;
            let continuum = match doc.continuum {
                Some(c) => {
                    if c.epsilons.is_empty() || c.epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
                        return Err(source.err("$.continuum.epsilons", "need positive finite values"));
                    }
                    if !(c.time_span > 0.0 && c.time_span.is_finite()) {
                        return Err(source.err("$.continuum.time_span", "must be positive"));
                    }
                    Some((c.time_span, c.epsilons))
                }
                None => None,
            };
            Task::Dispersion { model: m, continuum }
        }
        Kind::VerifyAll => Task::VerifyAll {
            model_b_max_bits: doc.model_b_max_bits.unwrap_or(SuiteOptions::default().model_b_max_bits),
        },
    };

    let output = o
        .out
        .clone()
        .or_else(|| doc.output.path.as_ref().map(|p| source.dir.join(p)));
    Ok(ExperimentConfig {
        kind,
        task,
        steps,
        seed,
        output,
        format: o.format.or(doc.output.format).unwrap_or(kind.default_format()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Invariant {
    pub name: String,
    pub passed: bool,
}

/// Results of one run, renderable as CSV or JSON.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub kind: Kind,
    pub steps: usize,
    pub invariants: Vec<Invariant>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub report: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.invariants.iter().all(|i| i.passed)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{}: steps={}", self.kind.name(), self.steps);
        for i in &self.invariants {
            s.push_str(&format!(" {}={}", i.name, if i.passed { "pass" } else { "FAIL" }));
        }
        s
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => io::emit_csv(&self.header, &self.rows),
            Format::Json => io::emit_json(&self.report),
        }
    }
}

fn inv(name: &str, passed: bool) -> Invariant {
    Invariant {
        name: name.into(),
        passed,
    }
}

fn strings<const N: usize>(h: [&str; N]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

fn state_rows(rows: &mut Vec<Vec<String>>, n: i64, v: &GaussianIntVector) {
    for (alpha, z) in v.iter().enumerate() {
        rows.push(vec![n.to_string(), alpha.to_string(), z.re.to_string(), z.im.to_string()]);
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let steps = config.steps;
    let kind = config.kind;
    let mut invariants = Vec::new();
    let mut rows = Vec::new();
    let (header, report) = match &config.task {
        Task::Evolve { model, psi0, psi1 } => {
            let t = evolve(&CAPairState::initial(psi0.clone(), psi1.clone())?, model, steps)?;
            let q0 = two_time_correlation(&CAPairState::initial(psi0.clone(), psi1.clone())?)?;
            let q_ok = t.pairs().all(|p| two_time_correlation(&p).is_ok_and(|q| q == q0));
            invariants.push(inv("update_rule", t.satisfies_update_rule()));
            invariants.push(inv("correlation_conserved", q_ok));
            let mut states = Vec::new();
            for (k, v) in t.states.iter().enumerate() {
                let n = t.start + k as i64;
                state_rows(&mut rows, n, v);
                states.push(json!({"n": n, "components": v.iter().map(crate::gaussian::format_gi).collect::<Vec<_>>()}));
            }
            (
                strings(["n", "alpha", "re", "im"]),
                json!({"kind": kind, "steps": steps, "correlation": q0.to_string(), "states": states}),
            )
        }
        Task::OntologyScan { model, max_steps } => {
            let d = model.dim();
            let basis = standard_basis(d);
            let mut results = Vec::new();
            let mut norms_ok = true;
            for a in 0..d {
                for b in 0..d {
                    let (p0, p1) = (GaussianIntVector::basis(d, a), GaussianIntVector::basis(d, b));
                    let r = ontology::detect_phased_permutation(model, &p0, &p1, &basis, *max_steps)?;
                    if r.is_ontological {
                        norms_ok &= r.norm_trace.iter().all(|n| *n == 1.into());
                    }
                    rows.push(vec![
                        a.to_string(),
                        b.to_string(),
                        r.is_ontological.to_string(),
                        opt(r.ray_period),
                        opt(r.exact_state_period),
                        opt(r.failure_step),
                        r.failure_kind.map(|k| format!("{k:?}")).unwrap_or_default(),
                    ]);
                    results.push(json!({"psi0": a, "psi1": b, "report": PermutationSummary::from(&r)}));
                }
            }
            invariants.push(inv("ontological_norms_unit", norms_ok));
            (
                strings(["psi0", "psi1", "ontological", "ray_period", "exact_period", "failure_step", "failure_kind"]),
                json!({"kind": kind, "max_steps": max_steps, "results": results}),
            )
        }
        Task::Multitime {
            h1,
            h2,
            phi1,
            phi2,
            length,
        } => {
            let t1 = evolve(&CAPairState::initial(phi1.0.clone(), phi1.1.clone())?, h1, steps + 1)?;
            let t2 = evolve(&CAPairState::initial(phi2.0.clone(), phi2.1.clone())?, h2, length - 2)?;
            let h = TensorHamiltonian::separable(vec![h1.h().clone(), h2.h().clone()])?;
            let product = multitime::product_field(&t1, &t2);
            let mut field = MultiTimeField::new((h1.dim(), h2.dim()));
            for (&p, v) in product.iter().filter(|(p, _)| p.0 <= 1) {
                field.insert(p, v.clone())?;
            }
            let mut lines = 0;
            for _ in 0..steps {
                match multitime::propagate_line(&field, &h, Axis::N1, 1) {
                    Ok(f) => {
                        field = f;
                        lines += 1;
                    }
                    Err(Error::DomainTooSmall(_)) => break,
                    Err(e) => return Err(e),
                }
            }
            let matches = field.iter().all(|(p, v)| product.get(*p) == Some(v));
            invariants.push(inv("zero_residual", field.residual_violations(&h).is_empty()));
            invariants.push(inv("matches_product_solution", matches));
            let step = multitime::sync_first_order(&phi1.0.kron(&phi2.0), &h, 1, 1, (0, 0))?;
            let rank = multitime::schmidt_rank(&step.states[1].to_c64(), (h1.dim(), h2.dim()))?;
            for (&(n1, n2), v) in field.iter() {
                for (c, z) in v.iter().enumerate() {
                    rows.push(vec![n1.to_string(), n2.to_string(), c.to_string(), z.re.to_string(), z.im.to_string()]);
                }
            }
            (
                strings(["n1", "n2", "component", "re", "im"]),
                json!({
                    "kind": kind,
                    "lines_propagated": lines,
                    "points": field.len(),
                    "first_order_schmidt_rank": rank,
                }),
            )
        }
        Task::IsingA {
            topology,
            schedule,
            start,
        } => {
            let run = ising::model_a_evolve(start, topology, schedule, steps)?;
            let mut product = ising::PhasedPermutation::identity(1 << topology.n_vertices());
            for f in schedule.expand(steps)? {
                product = product.then(&ising::model_a_step_operator(topology, f.edge, f.sign)?)?;
            }
            let last = run.last().expect("non-empty");
            let composed = product.apply(start.basis_index()) == (last.config.basis_index(), last.phase_exponent);
            invariants.push(inv("composition", composed));
            for s in &run {
                rows.push(vec![s.step.to_string(), s.config.vertex_string(), String::new(), s.phase_exponent.to_string()]);
            }
            (
                strings(["step", "vertex_bits", "edge_bits", "phase_exponent"]),
                json!({"kind": kind, "steps": steps, "final": last.config.vertex_string(), "phase_exponent": last.phase_exponent}),
            )
        }
        Task::IsingB { topology, rule, start } => {
            let transfer = ising::model_b_transfer(topology)?;
            let rule_perm = ising::edge_rule_permutation(*rule, topology)?;
            let map = ising::edge_update_compose(&transfer, &rule_perm, topology)?;
            let (n, e) = (topology.n_vertices(), topology.n_edges());
            let (mut x, mut phase) = (start.basis_index(), 0u8);
            rows.push(vec!["0".into(), start.vertex_string(), start.edge_string(), "0".into()]);
            for k in 1..=steps {
                let (t, p) = map.apply(x);
                x = t;
                phase = (phase + p) % 4;
                let c = SpinConfiguration::from_index(x, n, e);
                rows.push(vec![k.to_string(), c.vertex_string(), c.edge_string(), phase.to_string()]);
            }
            let unitary = transfer.then(&transfer.inverse())? == ising::PhasedPermutation::identity(transfer.dim());
            invariants.push(inv("unitary", unitary));
            let mut verification = Value::Null;
            if topology.total_bits() <= ising::DENSE_BIT_LIMIT {
                let v = ising::verify::verify_model_b(topology)?;
                invariants.push(inv("matrix_structure", v.passed(1e-9)));
                verification = serde_json::to_value(&v).expect("plain data");
            }
            (
                strings(["step", "vertex_bits", "edge_bits", "phase_exponent"]),
                json!({
                    "kind": kind,
                    "steps": steps,
                    "orbit_period": map.orbit_period(start.basis_index(), 1 << 20),
                    "verification": verification,
                }),
            )
        }
        Task::Gup {
            sites,
            scale,
            boundary,
            samples,
        } => {
            let families = gup::paper_bound_by_family(*sites, *scale, *boundary, *samples, config.seed)?;
            let violations: usize = families.iter().map(|f| f.robertson_violations).sum();
            let random = families.iter().find(|f| f.family == "random").expect("random family");
            let fraction = if random.states == 0 {
                0.0
            } else {
                random.paper_bound_holds as f64 / random.states as f64
            };
            let min = gup::minimize_delta_x(*scale, *sites, &GaussianFamily::default());
            invariants.push(inv("robertson", violations == 0));
            let (realized, min_detail) = match &min {
                Ok(m) => (json!(m.realized_min_dx), serde_json::to_value(m).expect("plain data")),
                Err(e) => (Value::Null, json!({"error": e.to_string()})),
            };
            for f in &families {
                rows.push(vec![
                    f.family.clone(),
                    f.states.to_string(),
                    f.paper_bound_holds.to_string(),
                    f.robertson_violations.to_string(),
                ]);
            }
            (
                strings(["family", "states", "paper_bound_holds", "robertson_violations"]),
                json!({
                    "robertson_violations": violations,
                    "paper_bound_holds_fraction": fraction,
                    "realized_min_dx": realized,
                    "bound_min_dx": gup::bound_min_dx(*scale),
                    "sites": sites,
                    "scale": scale.get(),
                    "boundary": boundary,
                    "samples": samples,
                    "seed": config.seed,
                    "families": families,
                    "minimization": min_detail,
                }),
            )
        }
        Task::Dispersion { model, continuum } => {
            let spectral = propagator::phi_operator(model);
            let mut modes = Vec::new();
            let mut worst: f64 = 0.0;
            for (k, &lambda) in spectral.eigenvalues().iter().enumerate() {
                let regime = SpectralRegime::classify(lambda);
                let omega = propagator::dispersion_omega(lambda);
                let residual = (regime != SpectralRegime::Supercritical).then(|| {
                    let v: Vec<_> = spectral.eigenvectors().column(k).iter().copied().collect();
                    propagator::stationary_mode_residual(spectral.hamiltonian(), lambda, &v, 100)
                });
                if let Some(r) = residual {
                    worst = worst.max(r);
                }
                rows.push(vec![
                    io::format_float(lambda),
                    format!("{regime:?}"),
                    io::format_float(omega.re),
                    io::format_float(omega.im),
                    residual.map(io::format_float).unwrap_or_default(),
                ]);
                modes.push(json!({"lambda": lambda, "regime": regime, "omega_re": omega.re, "omega_im": omega.im, "residual": residual}));
            }
            invariants.push(inv("stationary_modes", worst <= 1e-10));
            let sweep = match continuum {
                Some((span, eps)) => {
                    let psi0: Vec<_> = GaussianIntVector::basis(model.dim(), 0).to_c64();
                    let points = propagator::continuum_sweep(model, &psi0, *span, eps)?;
                    serde_json::to_value(points).expect("plain data")
                }
                None => Value::Null,
            };
            (
                strings(["lambda", "regime", "omega_re", "omega_im", "residual"]),
                json!({"kind": kind, "modes": modes, "continuum": sweep}),
            )
        }
        Task::VerifyAll { model_b_max_bits } => {
            let report = suite::run_suite(&SuiteOptions {
                seed: config.seed,
                model_b_max_bits: *model_b_max_bits,
            });
            for c in &report.checks {
                invariants.push(inv(c.name, c.passed));
                rows.push(vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]);
            }
            (strings(["check", "passed", "detail"]), serde_json::to_value(&report).expect("plain data"))
        }
    };
    Ok(Outcome {
        kind,
        steps,
        invariants,
        header,
        rows,
        report,
    })
}

fn opt(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Runs `config` and writes its artifact; returns the outcome.
pub fn execute(config: &ExperimentConfig) -> Result<(Outcome, Vec<u8>)> {
    let outcome = run(config)?;
    let bytes = outcome.render(config.format)?;
    if let Some(path) = &config.output {
        io::write_atomic(path, &bytes)?;
    }
    Ok((outcome, bytes))
}
