//! C ABI over the kahlerq core.
//!
//! States and operators cross the boundary as opaque handles. Every fallible
//! call returns a [`KqStatus`]; on failure the message is available from
//! [`kq_last_error_message`] on the same thread. Handles returned through out
//! pointers are owned by the caller and released with the matching `_free`.
//!
//! Complex operators are passed as two row-major `n × n` arrays, the real part
//! `x` and the imaginary part `y`. States are passed as `q` and `p`, the real
//! and imaginary parts of ψ.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kahlerq::composite::{tensor_operator_complex, tensor_state_complex};
use kahlerq::dynamics::{evolve_exact, evolve_midpoint, split_hamiltonian};
use kahlerq::ergodic::{check_rational_independence, normal_modes};
use kahlerq::kahler::{apply_j, metric_g, symplectic_omega};
use kahlerq::linalg::RMatrix;
use kahlerq::operator::{expectation, gamma_lift, gamma_lower, measure, STRUCTURE_TOL};
use kahlerq::{ComplexOperator, KahlerError, KahlerOperator, KahlerState};

/// Result codes. `KQ_STATUS_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    StructureViolation = 4,
    NotHermitian = 5,
    NotAProjector = 6,
    NotNormalized = 7,
    ZeroProbability = 8,
    SolverFailure = 9,
    BudgetExceeded = 10,
    BoundarySupport = 11,
    /// A Rust panic was caught at the boundary.
    Internal = 12,
}

/// Opaque state handle.
pub struct KqState {
    inner: KahlerState,
}

/// Opaque complex operator handle.
pub struct KqOperator {
    inner: ComplexOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &KahlerError) -> KqStatus {
    match e {
        KahlerError::DimensionMismatch { .. } => KqStatus::DimensionMismatch,
        KahlerError::InvalidArgument(_) => KqStatus::InvalidArgument,
        KahlerError::StructureViolation { .. } => KqStatus::StructureViolation,
        KahlerError::NotHermitian { .. } => KqStatus::NotHermitian,
        KahlerError::NotAProjector { .. } => KqStatus::NotAProjector,
        KahlerError::NotNormalized { .. } => KqStatus::NotNormalized,
        KahlerError::ZeroProbabilityBranch { .. } => KqStatus::ZeroProbability,
        KahlerError::SolverFailure { .. } => KqStatus::SolverFailure,
        KahlerError::SearchSpaceTooLarge { .. } => KqStatus::BudgetExceeded,
        KahlerError::BoundarySupport { .. } => KqStatus::BoundarySupport,
    }
}

struct Fail(KqStatus, String);

impl From<KahlerError> for Fail {
    fn from(e: KahlerError) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type Outcome = Result<(), Fail>;

fn null(what: &str) -> Fail {
    Fail(KqStatus::NullPointer, format!("null pointer: {what}"))
}

fn guard(f: impl FnOnce() -> Outcome) -> KqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            KqStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            KqStatus::Internal
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn state<'a>(p: *const KqState) -> Result<&'a KahlerState, Fail> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("state"))
}

unsafe fn operator<'a>(p: *const KqOperator) -> Result<&'a ComplexOperator, Fail> {
    p.as_ref().map(|o| &o.inner).ok_or_else(|| null("operator"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn give_state(out: *mut *mut KqState, inner: KahlerState) -> Outcome {
    write(out, Box::into_raw(Box::new(KqState { inner })), "out")
}

unsafe fn give_operator(out: *mut *mut KqOperator, inner: ComplexOperator) -> Outcome {
    write(out, Box::into_raw(Box::new(KqOperator { inner })), "out")
}

/// Message for the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next kahlerq call on the same thread.
#[no_mangle]
pub extern "C" fn kq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a state ψ = q + ip of dimension `n`.
///
/// # Safety
/// `q` and `p` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_state_new(q: *const f64, p: *const f64, n: usize, out: *mut *mut KqState) -> KqStatus {
    guard(|| {
        let q = slice(q, n, "q")?.to_vec();
        let p = slice(p, n, "p")?.to_vec();
        give_state(out, KahlerState::new(q, p)?)
    })
}

/// Releases a state. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kq_state_free(s: *mut KqState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Complex dimension of a state, or 0 for null.
///
/// # Safety
/// `s` must be null or a live state handle.
#[no_mangle]
pub unsafe extern "C" fn kq_state_dim(s: *const KqState) -> usize {
    s.as_ref().map_or(0, |s| s.inner.dim())
}

/// Copies the coordinates of a state into `q` and `p`, each of length `n`.
///
/// # Safety
/// `s` must be a live handle; `q` and `p` must point to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kq_state_read(s: *const KqState, q: *mut f64, p: *mut f64, n: usize) -> KqStatus {
    guard(|| {
        let s = state(s)?;
        if s.dim() != n {
            return Err(KahlerError::DimensionMismatch { expected: s.dim(), found: n }.into());
        }
        slice_mut(q, n, "q")?.copy_from_slice(s.q());
        slice_mut(p, n, "p")?.copy_from_slice(s.p());
        Ok(())
    })
}

/// Metric g(u, v) = Re⟨u, v⟩.
///
/// # Safety
/// `u`, `v` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_metric_g(u: *const KqState, v: *const KqState, out: *mut f64) -> KqStatus {
    guard(|| write(out, metric_g(state(u)?, state(v)?)?, "out"))
}

/// Symplectic form ω(u, v) = Im⟨u, v⟩.
///
/// # Safety
/// `u`, `v` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_symplectic_omega(u: *const KqState, v: *const KqState, out: *mut f64) -> KqStatus {
    guard(|| write(out, symplectic_omega(state(u)?, state(v)?)?, "out"))
}

/// J u = (−p, q), multiplication by i.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_apply_j(u: *const KqState, out: *mut *mut KqState) -> KqStatus {
    guard(|| give_state(out, apply_j(state(u)?)))
}

/// Creates an `n × n` complex operator X + iY from row-major arrays.
///
/// # Safety
/// `x` and `y` must point to `n * n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_operator_new(
    x: *const f64,
    y: *const f64,
    n: usize,
    out: *mut *mut KqOperator,
) -> KqStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or_else(|| Fail(KqStatus::InvalidArgument, "n * n overflows".into()))?;
        let x = RMatrix::from_row_slice(n, n, slice(x, len, "x")?);
        let y = RMatrix::from_row_slice(n, n, slice(y, len, "y")?);
        give_operator(out, ComplexOperator::new(x, y)?)
    })
}

/// Releases an operator. Null is ignored.
///
/// # Safety
/// `op` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn kq_operator_free(op: *mut KqOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Complex dimension of an operator, or 0 for null.
///
/// # Safety
/// `op` must be null or a live operator handle.
#[no_mangle]
pub unsafe extern "C" fn kq_operator_dim(op: *const KqOperator) -> usize {
    op.as_ref().map_or(0, |o| o.inner.dim())
}

/// Writes the real `2n × 2n` block form [[X, −Y], [Y, X]] row-major into
/// `block`, which holds `len` doubles.
///
/// # Safety
/// `op` must be a live handle; `block` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn kq_operator_lift(op: *const KqOperator, block: *mut f64, len: usize) -> KqStatus {
    guard(|| {
        let m = gamma_lift(operator(op)?);
        let b = m.block();
        if len != b.len() {
            return Err(KahlerError::DimensionMismatch { expected: b.len(), found: len }.into());
        }
        let dst = slice_mut(block, len, "block")?;
        for (i, row) in b.row_iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                dst[i * b.ncols() + j] = *v;
            }
        }
        Ok(())
    })
}

/// Recovers X + iY from a real row-major `2n × 2n` block. Fails with
/// `KQ_STATUS_STRUCTURE_VIOLATION` when the block does not commute with J.
///
/// # Safety
/// `block` must point to `4 n²` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_operator_lower(block: *const f64, n: usize, out: *mut *mut KqOperator) -> KqStatus {
    guard(|| {
        let m = 2 * n;
        let block = RMatrix::from_row_slice(m, m, slice(block, m * m, "block")?);
        let lifted = KahlerOperator::from_block(block)?;
        give_operator(out, gamma_lower(&lifted)?)
    })
}

/// Expectation of an operator: `g_part = g(u, M u)`, `omega_part = ω(u, M u)`.
/// For Hermitian operators `omega_part` vanishes.
///
/// # Safety
/// Handles must be live; `g_part` and `omega_part` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_expectation(
    op: *const KqOperator,
    u: *const KqState,
    g_part: *mut f64,
    omega_part: *mut f64,
) -> KqStatus {
    guard(|| {
        let e = expectation(&gamma_lift(operator(op)?), state(u)?)?;
        write(g_part, e.g_part, "g_part")?;
        write(omega_part, e.omega_part, "omega_part")
    })
}

/// Projective measurement with a projector. Writes the Born probability and
/// the collapsed, normalized state. The input state is left untouched.
///
/// # Safety
/// Handles must be live; `probability` and `post` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_measure(
    projector: *const KqOperator,
    u: *const KqState,
    tol: f64,
    probability: *mut f64,
    post: *mut *mut KqState,
) -> KqStatus {
    guard(|| {
        let outcome = measure(&gamma_lift(operator(projector)?), state(u)?, tol)?;
        write(probability, outcome.probability, "probability")?;
        give_state(post, outcome.post_state)
    })
}

/// u(t) = exp(−iHt) u0 through the Hermitian eigendecomposition.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_evolve_exact(
    h: *const KqOperator,
    u0: *const KqState,
    t: f64,
    out: *mut *mut KqState,
) -> KqStatus {
    guard(|| give_state(out, evolve_exact(operator(h)?, state(u0)?, t)?))
}

/// Endpoint of `steps` implicit-midpoint steps of size `t / steps`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_evolve_midpoint(
    h: *const KqOperator,
    u0: *const KqState,
    t: f64,
    steps: usize,
    out: *mut *mut KqState,
) -> KqStatus {
    guard(|| {
        let hs = split_hamiltonian(operator(h)?, STRUCTURE_TOL)?;
        let traj = evolve_midpoint(&hs, state(u0)?, t, steps)?;
        give_state(out, traj.last().clone())
    })
}

/// Product state a ⊗ b, first factor outer.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_tensor_state(a: *const KqState, b: *const KqState, out: *mut *mut KqState) -> KqStatus {
    guard(|| give_state(out, tensor_state_complex(state(a)?, state(b)?)))
}

/// Product operator a ⊗ b, first factor outer.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_tensor_operator(
    a: *const KqOperator,
    b: *const KqOperator,
    out: *mut *mut KqOperator,
) -> KqStatus {
    guard(|| {
        let lifted = tensor_operator_complex(&gamma_lift(operator(a)?), &gamma_lift(operator(b)?))?;
        give_operator(out, gamma_lower(&lifted)?)
    })
}

/// Normal-mode frequencies of a Hermitian operator in ascending order,
/// written to `lambdas` (length `n`). `degenerate` is set when two
/// frequencies coincide.
///
/// # Safety
/// `h` must be live; `lambdas` must hold `n` doubles; `degenerate` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kq_normal_modes(
    h: *const KqOperator,
    lambdas: *mut f64,
    n: usize,
    degenerate: *mut bool,
) -> KqStatus {
    guard(|| {
        let frame = normal_modes(operator(h)?)?;
        if frame.dim() != n {
            return Err(KahlerError::DimensionMismatch { expected: frame.dim(), found: n }.into());
        }
        slice_mut(lambdas, n, "lambdas")?.copy_from_slice(&frame.lambdas);
        write(degenerate, frame.degenerate, "degenerate")
    })
}

/// Searches for a nonzero integer vector k with max |kᵢ| ≤ `bound` and
/// |k · λ| < `tol`. `relation` may be null; otherwise it receives k, or zeros
/// when the frequencies are independent to that bound. Pass `budget = 0` for
/// the default search-space limit.
///
/// # Safety
/// `lambdas` must hold `n` doubles; `independent` must be writable;
/// `relation` must be null or hold `n` writable integers.
#[no_mangle]
pub unsafe extern "C" fn kq_rational_independence(
    lambdas: *const f64,
    n: usize,
    bound: u32,
    tol: f64,
    budget: u64,
    independent: *mut bool,
    relation: *mut i64,
) -> KqStatus {
    guard(|| {
        let lambdas = slice(lambdas, n, "lambdas")?;
        let budget = if budget == 0 { kahlerq::ergodic::DEFAULT_BUDGET } else { budget as u128 };
        let verdict = check_rational_independence(lambdas, bound, tol, budget)?;
        write(independent, verdict.independent, "independent")?;
        if !relation.is_null() {
            let dst = slice_mut(relation, n, "relation")?;
            match verdict.relation {
                Some(k) => dst.copy_from_slice(&k),
                None => dst.fill(0),
            }
        }
        Ok(())
    })
}
