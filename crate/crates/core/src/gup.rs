//! Lattice position and momentum operators and uncertainty relations.
//!
//! Sites carry labels `m = -M/2, ..., M/2 - 1`; site index `k` has label
//! `k - M/2`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::propagator::DiscretenessScale;

pub const ROBERTSON_SLACK: f64 = 1e-12;
const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::InvalidParameter(format!("unknown boundary {other:?}"))),
        }
    }
}

pub fn site_label(size: usize, k: usize) -> i64 {
    k as i64 - (size / 2) as i64
}

/// Sparse `M x M` operator on the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOperator {
    size: usize,
    scale: f64,
    boundary: Boundary,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl LatticeOperator {
    fn check_size(size: usize) -> Result<()> {
        if size < 2 {
            return Err(Error::InvalidParameter(format!("lattice needs at least 2 sites, got {size}")));
        }
        Ok(())
    }

    /// `X[m][m] = l m`.
    pub fn position(size: usize, scale: DiscretenessScale, boundary: Boundary) -> Result<Self> {
        Self::check_size(size)?;
        let l = scale.get();
        let entries = (0..size)
            .filter(|&k| site_label(size, k) != 0)
            .map(|k| ((k, k), Complex64::new(l * site_label(size, k) as f64, 0.0)))
            .collect();
        Ok(LatticeOperator {
            size,
            scale: l,
            boundary,
            entries,
        })
    }

    /// `P[m][m+1] = -i/2l`, `P[m][m-1] = +i/2l`.
    pub fn momentum(size: usize, scale: DiscretenessScale, boundary: Boundary) -> Result<Self> {
        Self::check_size(size)?;
        let l = scale.get();
        let mut entries = BTreeMap::new();
        let amp = Complex64::new(0.0, 1.0 / (2.0 * l));
        for k in 0..size {
            let (up, down) = match boundary {
                Boundary::Periodic => (Some((k + 1) % size), Some((k + size - 1) % size)),
                Boundary::Open => ((k + 1 < size).then_some(k + 1), k.checked_sub(1)),
            };
            if let Some(u) = up {
                *entries.entry((k, u)).or_insert(Complex64::new(0.0, 0.0)) -= amp;
            }
            if let Some(d) = down {
                *entries.entry((k, d)).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        entries.retain(|_, v| v.norm() != 0.0);
        Ok(LatticeOperator {
            size,
            scale: l,
            boundary,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries.get(&(r, c)).copied().unwrap_or_default()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.size, self.size, |r, c| self.get(r, c))
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.size];
        for (&(r, c), &a) in &self.entries {
            out[r] += a * v[c];
        }
        out
    }

    /// `max |M - M^dagger|` over entries.
    pub fn adjoint_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(r, c), &a)| (a - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        let mut rows: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (&(r, c), &b) in &other.entries {
            rows.entry(r).or_default().push((c, b));
        }
        let mut entries = BTreeMap::new();
        for (&(r, k), &a) in &self.entries {
            for &(c, b) in rows.get(&k).map(Vec::as_slice).unwrap_or_default() {
                *entries.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += a * b;
            }
        }
        entries.retain(|_, v: &mut Complex64| v.norm() != 0.0);
        Ok(LatticeOperator {
            entries,
            ..self.clone()
        })
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &LatticeOperator) -> Result<LatticeOperator> {
        let mut ab = self.mul(other)?;
        for (k, v) in other.mul(self)?.entries {
            *ab.entries.entry(k).or_insert(Complex64::new(0.0, 0.0)) -= v;
        }
        ab.entries.retain(|_, v| v.norm() != 0.0);
        Ok(ab)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeState {
    amplitudes: Vec<Complex64>,
}

impl LatticeState {
    /// Normalizes `amplitudes`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(LatticeState {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Site with label `m`.
    pub fn localized(size: usize, m: i64) -> Result<Self> {
        let k = m + (size / 2) as i64;
        if k < 0 || k >= size as i64 {
            return Err(Error::InvalidParameter(format!("label {m} outside the lattice")));
        }
        let mut a = vec![Complex64::new(0.0, 0.0); size];
        a[k as usize] = Complex64::new(1.0, 0.0);
        Self::new(a)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(1.0, 0.0); size])
    }

    /// `exp(-m^2 / 4w^2) exp(i k m)`: position spread `w` sites.
    pub fn gaussian(size: usize, width: f64, wavenumber: f64) -> Result<Self> {
        Self::new(
            (0..size)
                .map(|k| {
                    let m = site_label(size, k) as f64;
                    Complex64::from_polar((-m * m / (4.0 * width * width)).exp(), wavenumber * m)
                })
                .collect(),
        )
    }

    /// Real envelope `exp(-m^2 / 4w^2) cos(k m)`, so `<P> = 0`.
    pub fn gaussian_cos(size: usize, width: f64, wavenumber: f64) -> Result<Self> {
        Self::new(
            (0..size)
                .map(|k| {
                    let m = site_label(size, k) as f64;
                    Complex64::new((-m * m / (4.0 * width * width)).exp() * (wavenumber * m).cos(), 0.0)
                })
                .collect(),
        )
    }

    pub fn random(size: usize, rng: &mut impl Rng) -> Result<Self> {
        Self::new(
            (0..size)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn size(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_defect(&self) -> f64 {
        (self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs()
    }

    fn expect(&self, op: &LatticeOperator) -> Complex64 {
        let av = op.apply(&self.amplitudes);
        self.amplitudes.iter().zip(&av).map(|(a, b)| a.conj() * b).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Uncertainty {
    pub mean: f64,
    pub delta: f64,
}

fn check(state: &LatticeState, op: &LatticeOperator) -> Result<()> {
    if state.size() != op.size() {
        return Err(Error::DimensionMismatch {
            expected: op.size(),
            found: state.size(),
        });
    }
    let defect = op.adjoint_defect();
    if defect > NORM_TOLERANCE {
        return Err(Error::NotSelfAdjoint(defect));
    }
    if state.norm_defect() > NORM_TOLERANCE {
        return Err(Error::InvalidParameter("state is not normalized".into()));
    }
    Ok(())
}

pub fn uncertainty(state: &LatticeState, op: &LatticeOperator) -> Result<Uncertainty> {
    check(state, op)?;
    let av = op.apply(state.amplitudes());
    let mean: f64 = state.amplitudes().iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum();
    let second: f64 = av.iter().map(|z| z.norm_sqr()).sum();
    Ok(Uncertainty {
        mean,
        delta: (second - mean * mean).max(0.0).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobertsonReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn robertson_check(state: &LatticeState, a: &LatticeOperator, b: &LatticeOperator) -> Result<RobertsonReport> {
    let commutator = a.commutator(b)?;
    robertson_with(state, a, b, &commutator)
}

fn robertson_with(
    state: &LatticeState,
    a: &LatticeOperator,
    b: &LatticeOperator,
    commutator: &LatticeOperator,
) -> Result<RobertsonReport> {
    let lhs = uncertainty(state, a)?.delta * uncertainty(state, b)?.delta;
    let rhs = state.expect(commutator).norm() / 2.0;
    Ok(RobertsonReport {
        lhs,
        rhs,
        holds: lhs >= rhs - ROBERTSON_SLACK,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GupBoundReport {
    pub lhs: f64,
    pub paper_rhs: f64,
    pub robertson_rhs: f64,
    pub satisfies_paper_bound: bool,
}

/// Evaluates `dX dP >= 1/2 |1 + (l^2/2) <P^2>|` next to the Robertson bound.
pub fn gup_bound_report(state: &LatticeState, scale: DiscretenessScale, boundary: Boundary) -> Result<GupBoundReport> {
    let ops = Operators::new(state.size(), scale, boundary)?;
    ops.report(state)
}

/// `X`, `P` and their commutator, built once for repeated evaluation.
struct Operators {
    x: LatticeOperator,
    p: LatticeOperator,
    commutator: LatticeOperator,
}

impl Operators {
    fn new(size: usize, scale: DiscretenessScale, boundary: Boundary) -> Result<Self> {
        let x = LatticeOperator::position(size, scale, boundary)?;
        let p = LatticeOperator::momentum(size, scale, boundary)?;
        let commutator = x.commutator(&p)?;
        Ok(Operators { x, p, commutator })
    }

    fn report(&self, state: &LatticeState) -> Result<GupBoundReport> {
        let rob = robertson_with(state, &self.x, &self.p, &self.commutator)?;
        let pp = self.p.apply(state.amplitudes());
        let p2: f64 = pp.iter().map(|z| z.norm_sqr()).sum();
        let l = self.x.scale();
        let paper_rhs = 0.5 * (1.0 + l * l / 2.0 * p2).abs();
        Ok(GupBoundReport {
            lhs: rob.lhs,
            paper_rhs,
            robertson_rhs: rob.rhs,
            satisfies_paper_bound: rob.lhs >= paper_rhs,
        })
    }
}

/// Closed-form minimum of `dX >= 1/(2 dP) + (l^2/4) dP`: `dP* = sqrt 2 / l`, `dX = l / sqrt 2`.
pub fn bound_min_dx(scale: DiscretenessScale) -> f64 {
    scale.get() / std::f64::consts::SQRT_2
}

pub fn bound_min_dp(scale: DiscretenessScale) -> f64 {
    std::f64::consts::SQRT_2 / scale.get()
}

/// Numerical minimum of the bound-derived `dX(dP)` by golden-section search.
pub fn bound_min_dx_numeric(scale: DiscretenessScale) -> f64 {
    let l = scale.get();
    let f = |dp: f64| 1.0 / (2.0 * dp) + l * l * dp / 4.0;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    // search in log space so the bracket is well conditioned for any l
    let (mut la, mut lb) = ((1e-6 / l).ln(), (1e3 / l).ln());
    for _ in 0..200 {
        let (c, d) = (lb - g * (lb - la), la + g * (lb - la));
        if f(c.exp()) < f(d.exp()) {
            lb = d;
        } else {
            la = c;
        }
    }
    f(((la + lb) / 2.0).exp())
}

/// Parameter grid for the real Gaussian-times-cosine family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaussianFamily {
    pub widths: Vec<f64>,
    pub wavenumbers: Vec<f64>,
}

impl GaussianFamily {
    pub fn grid(w: (f64, f64), w_steps: usize, k: (f64, f64), k_steps: usize) -> Self {
        let lin = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect()
        };
        GaussianFamily {
            widths: lin(w, w_steps),
            wavenumbers: lin(k, k_steps),
        }
    }
}

impl Default for GaussianFamily {
    fn default() -> Self {
        Self::grid((0.25, 6.0), 116, (0.0, std::f64::consts::PI), 91)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinimizationReport {
    pub scale: f64,
    pub sites: usize,
    pub bound_min_dx: f64,
    pub bound_min_dx_numeric: f64,
    /// Smallest `dX` among family members that satisfy `paper_rhs`.
    pub realized_min_dx: f64,
    pub realized_width: f64,
    pub realized_wavenumber: f64,
    /// `dX dP` minus the Robertson bound at the realized optimum.
    pub robertson_gap: f64,
    pub paper_bound_holds_fraction: f64,
}

/// Scans `family` for the smallest position spread compatible with the
/// discreteness-corrected bound.
pub fn minimize_delta_x(
    scale: DiscretenessScale,
    sites: usize,
    family: &GaussianFamily,
) -> Result<MinimizationReport> {
    if family.widths.len() < 3 || family.wavenumbers.len() < 3 {
        return Err(Error::InvalidParameter("family grid needs at least 3 points per axis".into()));
    }
    let ops = Operators::new(sites, scale, Boundary::Periodic)?;
    let mut best: Option<(f64, usize, usize, f64)> = None;
    let mut holds = 0usize;
    for (wi, &w) in family.widths.iter().enumerate() {
        for (ki, &k) in family.wavenumbers.iter().enumerate() {
            let state = LatticeState::gaussian_cos(sites, w, k)?;
            let report = ops.report(&state)?;
            if !report.satisfies_paper_bound {
                continue;
            }
            holds += 1;
            let dx = uncertainty(&state, &ops.x)?.delta;
            if best.map_or(true, |b| dx < b.0) {
                best = Some((dx, wi, ki, report.lhs - report.robertson_rhs));
            }
        }
    }
    let (dx, wi, ki, gap) =
        best.ok_or_else(|| Error::FamilyTooNarrow("no family member satisfies the bound".into()))?;
    let on_edge = |i: usize, n: usize| i == 0 || i + 1 == n;
    if on_edge(wi, family.widths.len()) || on_edge(ki, family.wavenumbers.len()) {
        return Err(Error::FamilyTooNarrow(format!(
            "optimum at width {} wavenumber {}",
            family.widths[wi], family.wavenumbers[ki]
        )));
    }
    Ok(MinimizationReport {
        scale: scale.get(),
        sites,
        bound_min_dx: bound_min_dx(scale),
        bound_min_dx_numeric: bound_min_dx_numeric(scale),
        realized_min_dx: dx,
        realized_width: family.widths[wi],
        realized_wavenumber: family.wavenumbers[ki],
        robertson_gap: gap,
        paper_bound_holds_fraction: holds as f64 / (family.widths.len() * family.wavenumbers.len()) as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyBoundReport {
    pub family: String,
    pub states: usize,
    pub paper_bound_holds: usize,
    pub robertson_violations: usize,
}

/// How often the discreteness-corrected bound holds, per state family.
pub fn paper_bound_by_family(
    sites: usize,
    scale: DiscretenessScale,
    boundary: Boundary,
    samples: usize,
    seed: u64,
) -> Result<Vec<FamilyBoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (sites / 2) as i64;
    let mut families: Vec<(String, Vec<LatticeState>)> = vec![
        (
            "localized".into(),
            (-half / 2..half / 2).step_by(((half as usize) / 8).max(1)).map(|m| LatticeState::localized(sites, m)).collect::<Result<_>>()?,
        ),
        (
            "broad_gaussian".into(),
            [8.0, 12.0, 16.0]
                .into_iter()
                .filter(|&w| w <= sites as f64 / 8.0)
                .map(|w| LatticeState::gaussian(sites, w, 0.0))
                .collect::<Result<_>>()?,
        ),
        (
            "gaussian_cos".into(),
            [(1.0, 1.2), (1.0, 1.5), (2.0, 1.3)]
                .into_iter()
                .map(|(w, k)| LatticeState::gaussian_cos(sites, w, k))
                .collect::<Result<_>>()?,
        ),
    ];
    families.push((
        "random".into(),
        (0..samples).map(|_| LatticeState::random(sites, &mut rng)).collect::<Result<_>>()?,
    ));
    let ops = Operators::new(sites, scale, boundary)?;
    families
        .into_iter()
        .map(|(family, states)| {
            let mut holds = 0;
            let mut violations = 0;
            for s in &states {
                let report = ops.report(s)?;
                if report.satisfies_paper_bound {
                    holds += 1;
                }
                if report.lhs < report.robertson_rhs - ROBERTSON_SLACK {
                    violations += 1;
                }
            }
            Ok(FamilyBoundReport {
                family,
                states: states.len(),
                paper_bound_holds: holds,
                robertson_violations: violations,
            })
        })
        .collect()
}
