//! C ABI over the simulator.
//!
//! A `PemfcSimulator` handle owns a cell, its mesh, the integrator and a
//! current state. Every function returns a `PemfcStatus`; on failure the
//! message is available from `pemfc_last_error_message` on the same thread.
//! Handles are not thread-safe; use one handle per thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pemfc_core::cell::{build_mesh, initial_state, StateVector};
use pemfc_core::polarization::VoltageReport;
use pemfc_core::scenario::Scenario;
use pemfc_core::solver::{CurrentProfile, Integrator};
use pemfc_core::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PemfcStatus {
    /// Success.
    Ok = 0,
    /// File or I/O failure.
    Io = 1,
    /// Invalid configuration or argument.
    Validation = 2,
    /// Infeasible operating point or inadmissible state.
    Infeasible = 3,
    /// Solver failure.
    Numerical = 4,
    /// A required pointer was null.
    NullPointer = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

/// Voltage breakdown at one operating point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PemfcVoltage {
    /// Current density, A/m2.
    pub i_fc: f64,
    /// Cell voltage, V.
    pub u_cell: f64,
    /// Equilibrium potential, V.
    pub u_eq: f64,
    /// Cathode activation overpotential, V.
    pub eta_c: f64,
    /// Protonic ohmic drop, V.
    pub dv_ohmic_p: f64,
    /// Electronic ohmic drop, V.
    pub dv_ohmic_e: f64,
    /// Concentration loss, V.
    pub dv_conc: f64,
    /// Internal current density, A/m2.
    pub i_n: f64,
    /// Short-circuit current density, A/m2.
    pub i_sc: f64,
    /// Proton resistance, ohm m2.
    pub r_p: f64,
}

impl PemfcVoltage {
    fn from_report(i_fc: f64, v: &VoltageReport) -> Self {
        Self {
            i_fc,
            u_cell: v.u_cell,
            u_eq: v.u_eq,
            eta_c: v.eta_c,
            dv_ohmic_p: v.dv_ohmic_p,
            dv_ohmic_e: v.dv_ohmic_e,
            dv_conc: v.dv_conc,
            i_n: v.i_n,
            i_sc: v.i_sc,
            r_p: v.r_p,
        }
    }
}

/// Opaque simulator handle.
pub struct PemfcSimulator {
    integrator: Integrator,
    initial: StateVector,
    state: StateVector,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> PemfcStatus {
    match e {
        Error::Io(_) => PemfcStatus::Io,
        Error::Validation(_) | Error::Domain { .. } => PemfcStatus::Validation,
        Error::Infeasible(_) | Error::State(_) => PemfcStatus::Infeasible,
        Error::Numerical(_) => PemfcStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), PemfcStatus>) -> PemfcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PemfcStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            PemfcStatus::Panic
        }
    }
}

fn fail(e: Error) -> PemfcStatus {
    set_last_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> PemfcStatus {
    set_last_error(&format!("{what} is null"));
    PemfcStatus::NullPointer
}

fn build(scenario: &Scenario) -> Result<PemfcSimulator, Error> {
    scenario.validate()?;
    let mesh = build_mesh(&scenario.cell, scenario.mesh)?;
    let integrator = Integrator::new(&scenario.cell, &mesh, scenario.solver)?;
    let initial = initial_state(&scenario.cell, &mesh, scenario.initial)?;
    Ok(PemfcSimulator {
        integrator,
        state: initial.clone(),
        initial,
    })
}

/// Creates a simulator of the default cell, mesh and solver settings.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn pemfc_simulator_new_default(out: *mut *mut PemfcSimulator) -> PemfcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let sim = build(&Scenario::default()).map_err(fail)?;
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Creates a simulator from scenario TOML text (cell, mesh, solver and
/// initial tables are used; the run table is ignored).
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer to
/// writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn pemfc_simulator_from_toml(toml: *const c_char, out: *mut *mut PemfcSimulator) -> PemfcStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml)
            .to_str()
            .map_err(|_| fail(Error::Validation("scenario text is UTF-8".to_string())))?;
        let scenario = Scenario::from_toml_str(text, std::path::Path::new(".")).map_err(fail)?;
        let sim = build(&scenario).map_err(fail)?;
        *out = Box::into_raw(Box::new(sim));
        Ok(())
    })
}

/// Releases a simulator. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle from a constructor that was not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pemfc_simulator_free(sim: *mut PemfcSimulator) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Restores the initial state.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pemfc_reset(sim: *mut PemfcSimulator) -> PemfcStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        sim.state = sim.initial.clone();
        Ok(())
    })
}

/// Solves the steady state at `i_fc` (A/m2) starting from the current state,
/// keeps it as the new state and writes its voltage breakdown.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pemfc_steady(sim: *mut PemfcSimulator, i_fc: f64, out: *mut PemfcVoltage) -> PemfcStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let s = sim.integrator.solve_steady(&sim.state, i_fc).map_err(fail)?;
        *out = PemfcVoltage::from_report(i_fc, &s.voltage);
        sim.state = s.state;
        Ok(())
    })
}

/// Steady polarization curve over `n` strictly increasing currents. Writes
/// the cell voltage (NaN when infeasible) and a feasibility flag per point.
/// The state is left unchanged.
///
/// # Safety
/// `sim` must be a live handle; `currents`, `u_cell` and `feasible` must
/// point to `n` elements each.
#[no_mangle]
pub unsafe extern "C" fn pemfc_sweep(
    sim: *mut PemfcSimulator,
    currents: *const f64,
    n: usize,
    u_cell: *mut f64,
    feasible: *mut u8,
) -> PemfcStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        if currents.is_null() || u_cell.is_null() || feasible.is_null() {
            return Err(null("array argument"));
        }
        let currents = std::slice::from_raw_parts(currents, n);
        let rows = sim.integrator.polarization_sweep(&sim.state, currents).map_err(fail)?;
        let u = std::slice::from_raw_parts_mut(u_cell, n);
        let f = std::slice::from_raw_parts_mut(feasible, n);
        for (k, r) in rows.iter().enumerate() {
            u[k] = if r.feasible { r.voltage.u_cell } else { f64::NAN };
            f[k] = u8::from(r.feasible);
        }
        Ok(())
    })
}

/// Integrates the current state for `duration` seconds at constant `i_fc`
/// and writes the final voltage breakdown.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pemfc_advance(sim: *mut PemfcSimulator, i_fc: f64, duration: f64, out: *mut PemfcVoltage) -> PemfcStatus {
    guard(|| {
        let sim = sim.as_mut().ok_or_else(|| null("sim"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = sim
            .integrator
            .run_transient(&sim.state, &CurrentProfile::constant(i_fc), duration, duration)
            .map_err(fail)?;
        let (Some(state), Some(v)) = (r.states.last(), r.voltages.last()) else {
            return Err(fail(Error::Numerical("transient produced no output".to_string())));
        };
        *out = PemfcVoltage::from_report(i_fc, v);
        sim.state = state.clone();
        Ok(())
    })
}

/// Number of entries of the flat state vector.
///
/// # Safety
/// `sim` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn pemfc_state_len(sim: *const PemfcSimulator) -> usize {
    sim.as_ref().map_or(0, |s| s.integrator.system.len())
}

/// Copies the flat state vector into `buf` of capacity `len`.
///
/// # Safety
/// `sim` must be a live handle and `buf` must point to `len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn pemfc_state_copy(sim: *const PemfcSimulator, buf: *mut f64, len: usize) -> PemfcStatus {
    guard(|| {
        let sim = sim.as_ref().ok_or_else(|| null("sim"))?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let x = sim.integrator.pack(&sim.state).map_err(fail)?;
        if len < x.len() {
            return Err(fail(Error::Validation(format!(
                "buffer holds at least {} values, got {len}",
                x.len()
            ))));
        }
        std::slice::from_raw_parts_mut(buf, x.len()).copy_from_slice(&x);
        Ok(())
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn pemfc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pemfc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use std::ptr;

    use super::*;

    #[test]
    fn status_codes_match_cli_exit_codes() {
        for e in [
            Error::Io(String::new()),
            Error::Validation(String::new()),
            Error::Infeasible(String::new()),
            Error::Numerical(String::new()),
        ] {
            assert_eq!(status_of(&e) as i32, e.exit_code());
        }
    }

    #[test]
    fn null_pointer_is_reported() {
        let status = unsafe { pemfc_reset(ptr::null_mut()) };
        assert_eq!(status, PemfcStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(pemfc_last_error_message()) };
        assert_eq!(msg.to_str().unwrap(), "sim is null");
    }
}
