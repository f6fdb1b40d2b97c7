//! C ABI over the `gneseek` library.
//!
//! Objects cross the boundary as opaque handles created by `gne_*_new`-style
//! constructors and released with the matching `*_free`. Every fallible call
//! returns a [`GneStatus`]; the message of the most recent failure on the
//! calling thread is available through [`gne_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use gneseek::bench::{execute, make_cournot, make_sensor_network, make_zero_sum_example, ExperimentConfig};
use gneseek::dynamics::DynamicsSpec;
use gneseek::game::{Game, GameData};
use gneseek::graph::GraphTopology;
use gneseek::integrator::{integrate, step, IntegratorConfig, Trajectory};
use gneseek::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GneStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    InvalidState = 4,
    Infeasible = 5,
    Inapplicable = 6,
    UnsupportedFamily = 7,
    CompensatorCheck = 8,
    Divergence = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque game handle.
pub struct GneGame(Arc<Game>);

/// Opaque dynamics handle.
pub struct GneSpec(DynamicsSpec);

/// Opaque trajectory handle.
pub struct GneTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GneStatus {
    match e {
        Error::DimensionMismatch { .. } => GneStatus::DimensionMismatch,
        Error::InvalidInput(_) | Error::InvalidParameter(_) | Error::Json(_) => GneStatus::InvalidInput,
        Error::InvalidState(_) => GneStatus::InvalidState,
        Error::Infeasible(_) => GneStatus::Infeasible,
        Error::Inapplicable(_) => GneStatus::Inapplicable,
        Error::UnsupportedFamily(_) => GneStatus::UnsupportedFamily,
        Error::CompensatorCheck { .. } => GneStatus::CompensatorCheck,
        Error::Divergence(_) => GneStatus::Divergence,
        Error::Io(_) => GneStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> GneStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GneStatus::Ok,
        Ok(Err(e)) => {
            let s = status_of(&e);
            set_error(e.to_string());
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            GneStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        if $($p.is_null())||+ {
            set_error("null pointer argument".into());
            return GneStatus::NullPointer;
        }
    };
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Error> {
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::InvalidInput("string argument is not UTF-8".into()))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length, or 0 when no
/// error was recorded.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null.
#[no_mangle]
pub unsafe extern "C" fn gne_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Two-player zero-sum example with `F(x) = (x₂, −x₁)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_game_zero_sum(out: *mut *mut GneGame) -> GneStatus {
    non_null!(out);
    guard(|| {
        *out = boxed(GneGame(Arc::new(make_zero_sum_example())));
        Ok(())
    })
}

/// Networked Cournot benchmark drawn from `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_game_cournot(seed: u64, out: *mut *mut GneGame) -> GneStatus {
    non_null!(out);
    guard(|| {
        *out = boxed(GneGame(Arc::new(make_cournot(seed)?.0)));
        Ok(())
    })
}

/// Sensor-network benchmark drawn from `seed`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_game_sensor(seed: u64, out: *mut *mut GneGame) -> GneStatus {
    non_null!(out);
    guard(|| {
        *out = boxed(GneGame(Arc::new(make_sensor_network(seed)?)));
        Ok(())
    })
}

/// Quadratic game from its JSON data form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_game_from_json(json: *const c_char, out: *mut *mut GneGame) -> GneStatus {
    non_null!(json, out);
    guard(|| {
        let data: GameData = serde_json::from_str(str_arg(json)?)?;
        *out = boxed(GneGame(Arc::new(data.build()?)));
        Ok(())
    })
}

/// # Safety
/// `game` must come from a `gne_game_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gne_game_free(game: *mut GneGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Players, total action dimension and constraint rows.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn gne_game_dims(
    game: *const GneGame,
    players: *mut usize,
    n: *mut usize,
    m: *mut usize,
) -> GneStatus {
    non_null!(game, players, n, m);
    let g = &(*game).0;
    *players = g.num_players();
    *n = g.n();
    *m = g.m();
    GneStatus::Ok
}

/// Pseudo-gradient `F(x)` into `out` (both of length `n`).
///
/// # Safety
/// `x` and `out` must be valid for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gne_game_pseudo_gradient(
    game: *const GneGame,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> GneStatus {
    non_null!(game, x, out);
    guard(|| {
        let f = (*game).0.pseudo_gradient(std::slice::from_raw_parts(x, n))?;
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(f.as_slice());
        Ok(())
    })
}

/// Variational GNE on the complete graph: `x*` (length `n`) and the common
/// multiplier (length `m`).
///
/// # Safety
/// `x_out` must be valid for `n` doubles and `lambda_out` for `m` doubles.
#[no_mangle]
pub unsafe extern "C" fn gne_game_solve(
    game: *const GneGame,
    x_out: *mut f64,
    n: usize,
    lambda_out: *mut f64,
    m: usize,
) -> GneStatus {
    non_null!(game, x_out);
    guard(|| {
        let g = &(*game).0;
        if n != g.n() || m != g.m() {
            return Err(Error::InvalidInput(format!(
                "buffers of length ({n}, {m}) do not match (n, m) = ({}, {})",
                g.n(),
                g.m()
            )));
        }
        let graph = GraphTopology::complete(g.num_players());
        let k = if g.is_linear_quadratic() {
            gneseek::game::solve_gne_oracle(g, &graph)?
        } else {
            gneseek::game::solve_gne_newton(g, &graph)?
        };
        std::slice::from_raw_parts_mut(x_out, n).copy_from_slice(&k.x_star);
        if m > 0 {
            if lambda_out.is_null() {
                return Err(Error::InvalidInput("lambda_out is null".into()));
            }
            std::slice::from_raw_parts_mut(lambda_out, m).copy_from_slice(&k.lambda_common);
        }
        Ok(())
    })
}

/// Dynamics from an experiment config (JSON). The compensator gate runs;
/// a failing block yields `GNE_STATUS_COMPENSATOR_CHECK`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_from_config(json: *const c_char, out: *mut *mut GneSpec) -> GneStatus {
    non_null!(json, out);
    guard(|| {
        let cfg = ExperimentConfig::from_json(str_arg(json)?)?;
        *out = boxed(GneSpec(cfg.build_spec()?));
        Ok(())
    })
}

/// # Safety
/// `spec` must come from [`gne_spec_from_config`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_free(spec: *mut GneSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Length of the flat state, or 0 for a null handle.
///
/// # Safety
/// `spec` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_dim(spec: *const GneSpec) -> usize {
    if spec.is_null() {
        0
    } else {
        (*spec).0.dim()
    }
}

/// Time derivative at `s` (both buffers of length `len`).
///
/// # Safety
/// `s` and `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_field(
    spec: *const GneSpec,
    s: *const f64,
    len: usize,
    out: *mut f64,
) -> GneStatus {
    non_null!(spec, s, out);
    guard(|| {
        let v = (*spec).0.field(std::slice::from_raw_parts(s, len))?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&v);
        Ok(())
    })
}

/// One projected-Euler step of size `h`.
///
/// # Safety
/// `s` and `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_step(
    spec: *const GneSpec,
    s: *const f64,
    len: usize,
    h: f64,
    out: *mut f64,
) -> GneStatus {
    non_null!(spec, s, out);
    guard(|| {
        let v = step(&(*spec).0, std::slice::from_raw_parts(s, len), h)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&v);
        Ok(())
    })
}

/// Integrates from `s0` with projected Euler.
///
/// # Safety
/// `s0` must be valid for `len` doubles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_spec_integrate(
    spec: *const GneSpec,
    s0: *const f64,
    len: usize,
    h: f64,
    horizon: f64,
    record_stride: usize,
    out: *mut *mut GneTrajectory,
) -> GneStatus {
    non_null!(spec, s0, out);
    guard(|| {
        let mut cfg = IntegratorConfig::new(h, horizon);
        cfg.record_stride = record_stride;
        let t = integrate(&(*spec).0, std::slice::from_raw_parts(s0, len), &cfg, &[])?;
        *out = boxed(GneTrajectory(t));
        Ok(())
    })
}

/// Number of recorded states.
///
/// # Safety
/// `traj` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn gne_trajectory_len(traj: *const GneTrajectory) -> usize {
    if traj.is_null() {
        0
    } else {
        (*traj).0.states.len()
    }
}

/// Terminal reason: 0 horizon, 1 residual, 2 divergence; -1 for null.
///
/// # Safety
/// `traj` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn gne_trajectory_terminal_reason(traj: *const GneTrajectory) -> i32 {
    use gneseek::integrator::TerminalReason;
    if traj.is_null() {
        return -1;
    }
    match (*traj).0.terminal_reason {
        TerminalReason::Horizon => 0,
        TerminalReason::Residual => 1,
        TerminalReason::Divergence => 2,
    }
}

/// Copies the last state reached (length `len`) and its time.
///
/// # Safety
/// `out` must be valid for `len` doubles; `time` may be null.
#[no_mangle]
pub unsafe extern "C" fn gne_trajectory_final_state(
    traj: *const GneTrajectory,
    out: *mut f64,
    len: usize,
    time: *mut f64,
) -> GneStatus {
    non_null!(traj, out);
    guard(|| {
        let t = &(*traj).0;
        gneseek_check_len(t.final_state.len(), len)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&t.final_state);
        if !time.is_null() {
            *time = t.final_time;
        }
        Ok(())
    })
}

fn gneseek_check_len(expected: usize, got: usize) -> Result<(), Error> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: "state buffer",
            expected,
            got,
        })
    }
}

/// # Safety
/// `traj` must come from [`gne_spec_integrate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gne_trajectory_free(traj: *mut GneTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Runs an experiment config in memory and returns its summary as a JSON
/// string, to be released with [`gne_string_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gne_run_config(json: *const c_char, out: *mut *mut c_char) -> GneStatus {
    non_null!(json, out);
    guard(|| {
        let cfg = ExperimentConfig::from_json(str_arg(json)?)?;
        let outcome = execute(&cfg)?;
        let text = serde_json::to_string(&outcome.summary)?;
        *out = CString::new(text)
            .map_err(|_| Error::InvalidState("summary contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn gne_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
