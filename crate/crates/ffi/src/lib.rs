//! C ABI over `contact-mech`.
//!
//! Every function returns a [`CmStatus`] (or a plain value for accessors) and
//! never unwinds across the boundary. On failure a message is stored per
//! thread and can be read with [`cm_last_error`]. Objects are opaque handles
//! created by `cm_*_new` and released by the matching `cm_*_free`; strings
//! returned by the library are released with [`cm_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use contact_mech::contact::ContactPoint;
use contact_mech::dynamics::{
    contact_flow, contact_hamiltonian_field, evolution_field, evolution_flow, herglotz_flow, Hamiltonian,
    HamiltonianSystem, HerglotzKind, LagrangianSystem, Regularity, Trajectory,
};
use contact_mech::maps::{alpha_c, beta_c, classical_maps, evolution_maps, psi_c, quantomorphism, CoordMap};
use contact_mech::suites::{self, Suite};
use contact_mech::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Domain = 4,
    DimensionMismatch = 5,
    SingularHessian = 6,
    NoCriticalFiber = 7,
    Constraint = 8,
    /// A verification check failed; its report is still returned.
    CheckFailed = 9,
    /// Integration hit a non-finite state; the partial trajectory is still returned.
    BlowUp = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmMapKind {
    BetaC = 0,
    AlphaC = 1,
    PsiC = 2,
    Alpha0 = 3,
    Beta0 = 4,
    Alpha = 5,
    Beta = 6,
    Psi = 7,
    Kappa = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmSuite {
    Maps = 0,
    Legendrian = 1,
    Dynamics = 2,
    Thermo = 3,
    All = 4,
}

pub struct CmHamiltonian(HamiltonianSystem);
pub struct CmLagrangian(LagrangianSystem);
pub struct CmTrajectory(Trajectory);
pub struct CmMap(CoordMap);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(CmStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let status = match &e {
            Error::DimensionMismatch { .. } => CmStatus::DimensionMismatch,
            Error::Parse { .. } => CmStatus::Parse,
            Error::Domain { .. } => CmStatus::Domain,
            Error::SingularHessian { .. } => CmStatus::SingularHessian,
            Error::NoCriticalFiber { .. } => CmStatus::NoCriticalFiber,
            Error::Constraint { .. } => CmStatus::Constraint,
            Error::InvalidArgument(_) => CmStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Result<CmStatus, Fail>) -> CmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CmStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, need: usize, what: &str) -> Result<&'a mut [f64], Fail> {
    if len < need {
        return Err(Fail(CmStatus::DimensionMismatch, format!("{what} holds {len} values, need {need}")));
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if ptr.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| Fail(CmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Fail> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn constants(
    names: *const *const c_char,
    values: *const f64,
    count: usize,
) -> Result<BTreeMap<String, f64>, Fail> {
    if count == 0 {
        return Ok(BTreeMap::new());
    }
    if names.is_null() || values.is_null() {
        return Err(null("constants"));
    }
    let mut out = BTreeMap::new();
    for i in 0..count {
        out.insert(text(*names.add(i), "constant name")?.to_string(), *values.add(i));
    }
    Ok(out)
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failure on this thread; empty if none. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a contact Hamiltonian H(q, p, z) with `n` degrees of freedom.
/// Coordinates are `q, p, z` for n = 1 and `q1..qn, p1..pn, z` otherwise;
/// `count` named constants are substituted at parse time.
///
/// # Safety
/// Pointers must be valid for the given counts; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_new(
    n: usize,
    expr: *const c_char,
    names: *const *const c_char,
    values: *const f64,
    count: usize,
    out: *mut *mut CmHamiltonian,
) -> CmStatus {
    guard(|| {
        let k = constants(names, values, count)?;
        let h = HamiltonianSystem::parse(n, text(expr, "expression")?, &k)?;
        emit(out, CmHamiltonian(h))?;
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `h` must come from [`cm_hamiltonian_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_free(h: *mut CmHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// State dimension 2n + 1, or 0 for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_dim(h: *const CmHamiltonian) -> usize {
    h.as_ref().map_or(0, |h| 2 * h.0.n() + 1)
}

/// # Safety
/// `x` must hold `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_value(
    h: *const CmHamiltonian,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> CmStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        let v = h.0.value(input(x, len, "state")?)?;
        *out.as_mut().ok_or_else(|| null("output"))? = v;
        Ok(CmStatus::Ok)
    })
}

/// Writes X^c_H (or ε_H when `evolution`) at `x` into `out`, and R(H) into
/// `reeb_derivative` when it is non-null.
///
/// # Safety
/// `x` must hold `len` values and `out` `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_field(
    h: *const CmHamiltonian,
    x: *const f64,
    len: usize,
    evolution: bool,
    out: *mut f64,
    out_len: usize,
    reeb_derivative: *mut f64,
) -> CmStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        let point = ContactPoint::from_slice(h.0.n(), input(x, len, "state")?)?;
        let (v, rh) = contact_hamiltonian_field(&h.0, &point)?;
        let v = if evolution { evolution_field(&h.0, &point)? } else { v };
        output(out, out_len, v.len(), "field buffer")?[..v.len()].copy_from_slice(&v);
        if let Some(r) = reeb_derivative.as_mut() {
            *r = rh;
        }
        Ok(CmStatus::Ok)
    })
}

/// Parses a contact Lagrangian L(q, q̇, z); coordinates are `q, qdot, z`
/// (`q1.., qdot1.., z` for n > 1).
///
/// # Safety
/// As for [`cm_hamiltonian_new`].
#[no_mangle]
pub unsafe extern "C" fn cm_lagrangian_new(
    n: usize,
    expr: *const c_char,
    names: *const *const c_char,
    values: *const f64,
    count: usize,
    degenerate: bool,
    out: *mut *mut CmLagrangian,
) -> CmStatus {
    guard(|| {
        let k = constants(names, values, count)?;
        let reg = if degenerate { Regularity::Degenerate } else { Regularity::Regular };
        let l = LagrangianSystem::parse(n, text(expr, "expression")?, &k, reg)?;
        emit(out, CmLagrangian(l))?;
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `l` must come from [`cm_lagrangian_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn cm_lagrangian_free(l: *mut CmLagrangian) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

fn finish(traj: Trajectory, out: *mut *mut CmTrajectory) -> Result<CmStatus, Fail> {
    let blown = traj.blowup_at;
    unsafe { emit(out, CmTrajectory(traj))? };
    match blown {
        Some(t) => {
            set_error(&format!("trajectory blew up after t = {t}"));
            Ok(CmStatus::BlowUp)
        }
        None => Ok(CmStatus::Ok),
    }
}

/// Fixed-step RK4 along X^c_H (or ε_H when `evolution`) over [t0, t1].
///
/// # Safety
/// `x0` must hold `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_hamiltonian_flow(
    h: *const CmHamiltonian,
    x0: *const f64,
    len: usize,
    t0: f64,
    t1: f64,
    step: f64,
    evolution: bool,
    out: *mut *mut CmTrajectory,
) -> CmStatus {
    guard(|| {
        let h = handle(h, "hamiltonian")?;
        let x0 = input(x0, len, "initial state")?;
        let traj = if evolution {
            evolution_flow(&h.0, x0, (t0, t1), step, &mut [])?
        } else {
            contact_flow(&h.0, x0, (t0, t1), step, &mut [])?
        };
        finish(traj, out)
    })
}

/// Fixed-step RK4 of the Herglotz equations from (q, q̇, z).
///
/// # Safety
/// As for [`cm_hamiltonian_flow`].
#[no_mangle]
pub unsafe extern "C" fn cm_herglotz_flow(
    l: *const CmLagrangian,
    s0: *const f64,
    len: usize,
    t0: f64,
    t1: f64,
    step: f64,
    evolution: bool,
    out: *mut *mut CmTrajectory,
) -> CmStatus {
    guard(|| {
        let l = handle(l, "lagrangian")?;
        let kind = if evolution { HerglotzKind::Evolution } else { HerglotzKind::Contact };
        let traj = herglotz_flow(&l.0, kind, input(s0, len, "initial state")?, (t0, t1), step, &mut [])?;
        finish(traj, out)
    })
}

/// # Safety
/// `t` must come from a flow function or be null.
#[no_mangle]
pub unsafe extern "C" fn cm_trajectory_free(t: *mut CmTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cm_trajectory_len(t: *const CmTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// State dimension, or 0 for a null or empty trajectory.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cm_trajectory_dim(t: *const CmTrajectory) -> usize {
    t.as_ref().and_then(|t| t.0.states.first()).map_or(0, Vec::len)
}

/// Copies sample `k` into `time` and `out`.
///
/// # Safety
/// `out` must hold `out_len` values; `time` must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn cm_trajectory_sample(
    t: *const CmTrajectory,
    k: usize,
    time: *mut f64,
    out: *mut f64,
    out_len: usize,
) -> CmStatus {
    guard(|| {
        let t = handle(t, "trajectory")?;
        let state =
            t.0.states.get(k).ok_or_else(|| {
                Fail(CmStatus::InvalidArgument, format!("sample {k} out of range (len {})", t.0.len()))
            })?;
        output(out, out_len, state.len(), "state buffer")?[..state.len()].copy_from_slice(state);
        if let Some(tm) = time.as_mut() {
            *tm = t.0.times[k];
        }
        Ok(CmStatus::Ok)
    })
}

/// The trajectory as CSV (header `t,<columns>`); free with [`cm_string_free`].
/// Returns null for a null handle.
///
/// # Safety
/// `t` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cm_trajectory_csv(t: *const CmTrajectory) -> *mut c_char {
    let Some(t) = t.as_ref() else { return ptr::null_mut() };
    let mut buf = Vec::new();
    match catch_unwind(AssertUnwindSafe(|| t.0.write_csv(&mut buf))) {
        Ok(Ok(())) => into_c_string(String::from_utf8_lossy(&buf).into_owned()),
        _ => ptr::null_mut(),
    }
}

/// Builds one of the Tulczyjew maps for `n` degrees of freedom.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_map_new(kind: CmMapKind, n: usize, out: *mut *mut CmMap) -> CmStatus {
    guard(|| {
        let m = match kind {
            CmMapKind::BetaC => beta_c(n)?,
            CmMapKind::AlphaC => alpha_c(n)?,
            CmMapKind::PsiC => psi_c(n)?,
            CmMapKind::Alpha0 => evolution_maps(n)?.alpha0,
            CmMapKind::Beta0 => evolution_maps(n)?.beta0,
            CmMapKind::Alpha => classical_maps(n)?.alpha,
            CmMapKind::Beta => classical_maps(n)?.beta,
            CmMapKind::Psi => classical_maps(n)?.psi,
            CmMapKind::Kappa => classical_maps(n)?.kappa,
        };
        emit(out, CmMap(m))?;
        Ok(CmStatus::Ok)
    })
}

/// The partial Legendre map φ_J on ℝ^{2m+1}; `j` holds 1-based indices.
///
/// # Safety
/// `j` must hold `j_len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_quantomorphism_new(
    m: usize,
    j: *const usize,
    j_len: usize,
    out: *mut *mut CmMap,
) -> CmStatus {
    guard(|| {
        let j = if j_len == 0 {
            &[][..]
        } else if j.is_null() {
            return Err(null("index set"));
        } else {
            std::slice::from_raw_parts(j, j_len)
        };
        emit(out, CmMap(quantomorphism(m, j)?))?;
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_map_inverse(m: *const CmMap, out: *mut *mut CmMap) -> CmStatus {
    guard(|| {
        let inv = handle(m, "map")?.0.inverse();
        emit(out, CmMap(inv))?;
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `m` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn cm_map_dim(m: *const CmMap) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `x` must hold `len` values and `out` `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn cm_map_eval(
    m: *const CmMap,
    x: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> CmStatus {
    guard(|| {
        let m = handle(m, "map")?;
        let y = m.0.eval(input(x, len, "point")?)?;
        output(out, out_len, y.len(), "image buffer")?[..y.len()].copy_from_slice(&y);
        Ok(CmStatus::Ok)
    })
}

/// # Safety
/// `m` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn cm_map_free(m: *mut CmMap) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs a verification suite and returns its reports as a JSON array in
/// `json` (free with [`cm_string_free`]). Returns `CheckFailed` if any
/// report fails.
///
/// # Safety
/// `json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cm_verify(suite: CmSuite, samples: usize, seed: u64, json: *mut *mut c_char) -> CmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json output"));
        }
        let suite = match suite {
            CmSuite::Maps => Suite::Maps,
            CmSuite::Legendrian => Suite::Legendrian,
            CmSuite::Dynamics => Suite::Dynamics,
            CmSuite::Thermo => Suite::Thermo,
            CmSuite::All => Suite::All,
        };
        let reports = suites::run(suite, samples, seed);
        let text = serde_json::to_string(&reports).map_err(|e| Fail(CmStatus::Panic, e.to_string()))?;
        *json = into_c_string(text);
        if reports.iter().all(|r| r.pass) {
            Ok(CmStatus::Ok)
        } else {
            let failed = reports.iter().filter(|r| !r.pass).count();
            Err(Fail(CmStatus::CheckFailed, format!("{failed} of {} checks failed", reports.len())))
        }
    })
}
