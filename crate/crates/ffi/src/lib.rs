//! C ABI for the saturation environment.
//!
//! Environments are opaque `CgEnv` handles. Every fallible call returns a
//! `CgStatus`; on failure a message is available from `cg_last_error` on the
//! same thread until the next call. Observations and step results are
//! returned as JSON strings owned by the caller and released with
//! `cg_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use clausegym::env::{Backend, EnvConfig, EnvError, NativeEnv, ProblemLibrary};

/// Opaque environment handle.
pub struct CgEnv {
    inner: NativeEnv,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidConfig = 4,
    UnknownProblem = 5,
    ParseError = 6,
    BadState = 7,
    InvalidAction = 8,
    EnvError = 9,
    Panic = 10,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(CgStatus, String);

impl From<EnvError> for Failure {
    fn from(err: EnvError) -> Self {
        let status = match &err {
            EnvError::InvalidConfig(_) | EnvError::NoProblems | EnvError::TooManyInputClauses { .. } => {
                CgStatus::InvalidConfig
            }
            EnvError::UnknownProblem(_) => CgStatus::UnknownProblem,
            EnvError::Parse { .. } => CgStatus::ParseError,
            EnvError::NotReset | EnvError::EpisodeOver => CgStatus::BadState,
            EnvError::ActionOutOfRange { .. } | EnvError::AlreadyProcessed(_) => CgStatus::InvalidAction,
            _ => CgStatus::EnvError,
        };
        Failure(status, err.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CgStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CgStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(CgStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(CgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(CgStatus::NullArgument, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

fn make_env(library: ProblemLibrary, step_limit: usize, max_clauses: usize, seed: u64) -> Result<*mut CgEnv, Failure> {
    let config = EnvConfig { step_limit, max_clauses, problem_list: library.ids().to_vec(), seed };
    let inner = NativeEnv::new(config, Arc::new(library))?;
    Ok(Box::into_raw(Box::new(CgEnv { inner })))
}

fn json_out(value: &impl serde::Serialize, out: *mut *mut c_char) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure(CgStatus::EnvError, e.to_string()))?;
    let c = CString::new(text).map_err(|e| Failure(CgStatus::EnvError, e.to_string()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Creates an environment over every `*.p` file in `dir`. `include_root` may
/// be null, in which case includes resolve against `dir`.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cg_env_from_dir(
    dir: *const c_char,
    include_root: *const c_char,
    step_limit: usize,
    max_clauses: usize,
    seed: u64,
    out: *mut *mut CgEnv,
) -> CgStatus {
    guard(|| {
        check_out(out)?;
        let dir = read_str(dir, "dir")?;
        let root = if include_root.is_null() { None } else { Some(Path::new(read_str(include_root, "include_root")?)) };
        let library =
            ProblemLibrary::from_dir(Path::new(dir), root).map_err(|e| Failure(CgStatus::Io, format!("{dir}: {e}")))?;
        *out = make_env(library, step_limit, max_clauses, seed)?;
        Ok(())
    })
}

/// Creates an environment holding a single problem given as TPTP text.
/// Includes are not available.
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cg_env_from_text(
    problem_id: *const c_char,
    text: *const c_char,
    step_limit: usize,
    max_clauses: usize,
    seed: u64,
    out: *mut *mut CgEnv,
) -> CgStatus {
    guard(|| {
        check_out(out)?;
        let id = read_str(problem_id, "problem_id")?;
        let text = read_str(text, "text")?;
        let mut library = ProblemLibrary::new();
        library.insert(id, text);
        *out = make_env(library, step_limit, max_clauses, seed)?;
        Ok(())
    })
}

/// Starts an episode. `problem` may be null for a seeded random choice. On
/// success `*observation_json` receives the observation.
///
/// # Safety
/// `env` must come from a constructor here; `observation_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cg_env_reset(
    env: *mut CgEnv,
    problem: *const c_char,
    observation_json: *mut *mut c_char,
) -> CgStatus {
    guard(|| {
        check_out(observation_json)?;
        let env = env.as_mut().ok_or_else(|| Failure(CgStatus::NullArgument, "env is null".into()))?;
        let problem = if problem.is_null() { None } else { Some(read_str(problem, "problem")?) };
        let obs = env.inner.reset(problem)?;
        json_out(&obs, observation_json)
    })
}

/// Processes clause `action`. On success `*result_json` receives an object
/// with `observation`, `reward`, `terminated`, `truncated` and `info`.
///
/// # Safety
/// `env` must come from a constructor here; `result_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cg_env_step(env: *mut CgEnv, action: usize, result_json: *mut *mut c_char) -> CgStatus {
    guard(|| {
        check_out(result_json)?;
        let env = env.as_mut().ok_or_else(|| Failure(CgStatus::NullArgument, "env is null".into()))?;
        let result = env.inner.step(action)?;
        json_out(&result, result_json)
    })
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `env` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_env_free(env: *mut CgEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
