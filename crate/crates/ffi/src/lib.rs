//! C ABI over the `ontoca` toolkit.
//!
//! Every function returns an [`OntocaStatus`]; results come back through out
//! pointers. Objects are opaque handles owned by the caller and released with
//! the matching `_free` function. On failure a message is kept per thread and
//! can be read with [`ontoca_last_error`].
//!
//! Gaussian-integer vectors cross the boundary as interleaved `int64_t`
//! pairs `(re, im)`. Trajectory components that outgrow 64 bits are still
//! available as decimal strings.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_traits::ToPrimitive;
use ontoca::ca::{self, CAPairState, HamiltonianModel, Trajectory};
use ontoca::gaussian::{format_gi, GaussianIntVector};
use ontoca::gup;
use ontoca::ising::{self, GraphTopology, PhasedPermutation};
use ontoca::ontology::preset_hamiltonian;
use ontoca::propagator::DiscretenessScale;
use ontoca::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OntocaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SymmetryViolation = 3,
    DimensionMismatch = 4,
    OutOfRange = 5,
    Overflow = 6,
    UnknownPreset = 7,
    InvalidTopology = 8,
    Panic = 9,
    Internal = 10,
}

/// Integer Hamiltonian `H = S + iA`.
pub struct OntocaModel(HamiltonianModel);

/// Stored trajectory `psi_0 .. psi_{steps+1}`.
pub struct OntocaTrajectory(Trajectory);

/// Phased permutation on bit-packed spin configurations.
pub struct OntocaPermutation(PhasedPermutation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> OntocaStatus {
    match e {
        Error::SymmetryViolation { .. } => OntocaStatus::SymmetryViolation,
        Error::DimensionMismatch { .. } | Error::Shape(_) => OntocaStatus::DimensionMismatch,
        Error::UnknownPreset(_) => OntocaStatus::UnknownPreset,
        Error::InvalidTopology(_) | Error::DimensionOverflow { .. } => OntocaStatus::InvalidTopology,
        Error::InvalidParameter(_) | Error::ZeroVector => OntocaStatus::InvalidArgument,
        _ => OntocaStatus::Internal,
    }
}

struct Fail(OntocaStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn fail<T>(status: OntocaStatus, msg: impl Into<String>) -> Result<T, Fail> {
    Err(Fail(status, msg.into()))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> OntocaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OntocaStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            OntocaStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Fail> {
    if p.is_null() {
        fail(OntocaStatus::NullPointer, format!("{name} is null"))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    non_null(out, name)?;
    out.write(value);
    Ok(())
}

unsafe fn read_vector(p: *const i64, dim: usize, name: &str) -> Result<GaussianIntVector, Fail> {
    let raw = slice(p, 2 * dim, name)?;
    let pairs: Vec<(i64, i64)> = raw.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(GaussianIntVector::from_pairs(&pairs))
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ontoca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds `H = S + iA` from row-major `dim x dim` arrays; `a` may be null
/// for a real symmetric model.
///
/// # Safety
/// `s` (and `a` if non-null) must point to `dim * dim` readable values.
#[no_mangle]
pub unsafe extern "C" fn ontoca_model_new(
    dim: usize,
    s: *const i64,
    a: *const i64,
    out: *mut *mut OntocaModel,
) -> OntocaStatus {
    guard(|| {
        if dim == 0 {
            return fail(OntocaStatus::InvalidArgument, "dim must be positive");
        }
        let n = dim.checked_mul(dim).ok_or(Fail(OntocaStatus::Overflow, "dim too large".into()))?;
        let rows = |v: &[i64]| v.chunks_exact(dim).map(<[i64]>::to_vec).collect::<Vec<_>>();
        let s = rows(slice(s, n, "s")?);
        let a = if a.is_null() { vec![vec![0; dim]; dim] } else { rows(slice(a, n, "a")?) };
        let model = ca::build_hamiltonian(s, a)?;
        write(out, Box::into_raw(Box::new(OntocaModel(model))), "out")
    })
}

/// Named preset: `H2`, `H3` or `H4`.
///
/// # Safety
/// `name` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ontoca_model_preset(name: *const c_char, out: *mut *mut OntocaModel) -> OntocaStatus {
    guard(|| {
        non_null(name, "name")?;
        let name = CStr::from_ptr(name)
            .to_str()
            .map_err(|_| Fail(OntocaStatus::InvalidArgument, "name is not UTF-8".into()))?;
        let model = preset_hamiltonian(name)?;
        write(out, Box::into_raw(Box::new(OntocaModel(model))), "out")
    })
}

/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_model_dim(model: *const OntocaModel, out: *mut usize) -> OntocaStatus {
    guard(|| {
        non_null(model, "model")?;
        write(out, (*model).0.dim(), "out")
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontoca_model_free(model: *mut OntocaModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Iterates `psi_{n+1} = psi_{n-1} - iH psi_n` for `steps` steps from
/// `(psi_0, psi_1)`, each given as `2 * dim` interleaved values.
///
/// # Safety
/// `model` must be a live handle; `psi0` and `psi1` must each point to
/// `2 * dim` readable values.
#[no_mangle]
pub unsafe extern "C" fn ontoca_evolve(
    model: *const OntocaModel,
    psi0: *const i64,
    psi1: *const i64,
    steps: usize,
    out: *mut *mut OntocaTrajectory,
) -> OntocaStatus {
    guard(|| {
        non_null(model, "model")?;
        let model = &(*model).0;
        let pair = CAPairState::initial(read_vector(psi0, model.dim(), "psi0")?, read_vector(psi1, model.dim(), "psi1")?)?;
        let traj = ca::evolve(&pair, model, steps)?;
        write(out, Box::into_raw(Box::new(OntocaTrajectory(traj))), "out")
    })
}

/// Number of stored states, `steps + 2`.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_trajectory_len(traj: *const OntocaTrajectory, out: *mut usize) -> OntocaStatus {
    guard(|| {
        non_null(traj, "traj")?;
        write(out, (*traj).0.len(), "out")
    })
}

unsafe fn component<'a>(
    traj: *const OntocaTrajectory,
    n: usize,
    alpha: usize,
) -> Result<&'a ontoca::gaussian::GaussianInt, Fail> {
    non_null(traj, "traj")?;
    let t = &(*traj).0;
    let state = t.states.get(n).ok_or(Fail(
        OntocaStatus::OutOfRange,
        format!("state {n} outside 0..{}", t.len()),
    ))?;
    state.0.get(alpha).ok_or(Fail(
        OntocaStatus::OutOfRange,
        format!("component {alpha} outside 0..{}", state.dim()),
    ))
}

/// Component `alpha` of `psi_n`. Fails with `Overflow` when either part
/// does not fit in 64 bits; use [`ontoca_trajectory_component_string`].
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_trajectory_component(
    traj: *const OntocaTrajectory,
    n: usize,
    alpha: usize,
    re: *mut i64,
    im: *mut i64,
) -> OntocaStatus {
    guard(|| {
        let z = component(traj, n, alpha)?;
        let (Some(r), Some(i)) = (z.re.to_i64(), z.im.to_i64()) else {
            return fail(OntocaStatus::Overflow, format!("component {alpha} of state {n} exceeds 64 bits"));
        };
        write(re, r, "re")?;
        write(im, i, "im")
    })
}

/// Component `alpha` of `psi_n` as text such as `1-i` or `-3i`. Release
/// the string with [`ontoca_string_free`].
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_trajectory_component_string(
    traj: *const OntocaTrajectory,
    n: usize,
    alpha: usize,
    out: *mut *mut c_char,
) -> OntocaStatus {
    guard(|| {
        let s = CString::new(format_gi(component(traj, n, alpha)?)).expect("no interior NUL");
        write(out, s.into_raw(), "out")
    })
}

/// Whether the two-time correlation is the same for every stored pair.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_trajectory_correlation_conserved(
    traj: *const OntocaTrajectory,
    out: *mut bool,
) -> OntocaStatus {
    guard(|| {
        non_null(traj, "traj")?;
        let mut values = (*traj).0.pairs().map(|p| ca::two_time_correlation(&p));
        let first = values.next().transpose()?;
        let mut same = true;
        for q in values {
            same &= Some(q?) == first;
        }
        write(out, same, "out")
    })
}

/// # Safety
/// `traj` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontoca_trajectory_free(traj: *mut OntocaTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn ontoca_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Model B transfer matrix for the graph with `n_edges` edges given as
/// `2 * n_edges` vertex indices `(i, j)`, `i < j`.
///
/// # Safety
/// `edges` must point to `2 * n_edges` readable values.
#[no_mangle]
pub unsafe extern "C" fn ontoca_model_b_new(
    n_vertices: usize,
    edges: *const usize,
    n_edges: usize,
    out: *mut *mut OntocaPermutation,
) -> OntocaStatus {
    guard(|| {
        let raw = slice(edges, 2 * n_edges, "edges")?;
        let topology = GraphTopology::new(n_vertices, raw.chunks_exact(2).map(|c| (c[0], c[1])).collect())?;
        let perm = ising::model_b_transfer(&topology)?;
        write(out, Box::into_raw(Box::new(OntocaPermutation(perm))), "out")
    })
}

/// Number of basis states, `2^(N + E)`.
///
/// # Safety
/// `perm` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_permutation_dim(perm: *const OntocaPermutation, out: *mut usize) -> OntocaStatus {
    guard(|| {
        non_null(perm, "perm")?;
        write(out, (*perm).0.dim(), "out")
    })
}

/// Image of basis state `x`: target index and phase exponent `k` (the
/// amplitude is `i^k`).
///
/// # Safety
/// `perm` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn ontoca_permutation_apply(
    perm: *const OntocaPermutation,
    x: usize,
    target: *mut usize,
    phase: *mut u8,
) -> OntocaStatus {
    guard(|| {
        non_null(perm, "perm")?;
        let p = &(*perm).0;
        if x >= p.dim() {
            return fail(OntocaStatus::OutOfRange, format!("state {x} outside 0..{}", p.dim()));
        }
        let (t, k) = p.apply(x);
        write(target, t, "target")?;
        write(phase, k, "phase")
    })
}

/// # Safety
/// `perm` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontoca_permutation_free(perm: *mut OntocaPermutation) {
    if !perm.is_null() {
        drop(Box::from_raw(perm));
    }
}

/// Smallest position spread allowed by the deformed uncertainty bound at
/// discreteness scale `l`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ontoca_gup_bound_min_dx(scale: f64, out: *mut f64) -> OntocaStatus {
    guard(|| {
        let scale = DiscretenessScale::new(scale)?;
        write(out, gup::bound_min_dx(scale), "out")
    })
}
