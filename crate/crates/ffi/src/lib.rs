//! C ABI around the steady-state solvers: opaque system handles, plain
//! structs for the reports, and integer status codes. All functions are
//! panic-safe and null-checked; every pointer argument is owned by the
//! caller unless stated otherwise.

use std::panic::{catch_unwind, AssertUnwindSafe};

use triqdiode::correlations::{
    classical_correlation, mutual_information, negativity, quantum_discord, steady_state_mixture,
};
use triqdiode::params::{DissipationMode, SystemParams};
use triqdiode::thermo::{crossover_fractions, heat_currents, rectification};
use triqdiode::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TqdStatus {
    /// Success.
    TqdOk = 0,
    /// A pointer argument was null.
    TqdNullPointer = 1,
    /// Parameters failed validation (negative rates, bad mode value, ...).
    TqdInvalidParams = 2,
    /// The requested operation needs the crossing condition, or hit a
    /// non-positive transition frequency.
    TqdUnsupportedRegime = 3,
    /// The linear-algebra backend could not isolate the steady state.
    TqdSolverFailure = 4,
    /// A quantity was requested at a removable singularity (for example
    /// crossover fractions at equal temperatures).
    TqdDegenerate = 5,
    /// An internal invariant was violated.
    TqdInternal = 6,
}

fn status_of(err: &Error) -> TqdStatus {
    match err {
        Error::InvalidParams(_) | Error::Config(_) | Error::InvalidDensityMatrix(_) => {
            TqdStatus::TqdInvalidParams
        }
        Error::NonPositiveFrequency(_)
        | Error::CrossingConditionNotMet
        | Error::CommonModeInactive => TqdStatus::TqdUnsupportedRegime,
        Error::DegenerateNullSpace(_) | Error::NullSpaceTooLarge(_) | Error::StepInstability(_) => {
            TqdStatus::TqdSolverFailure
        }
        Error::DegenerateDenominator => TqdStatus::TqdDegenerate,
        _ => TqdStatus::TqdInternal,
    }
}

/// Opaque handle over a validated parameter set.
pub struct TqdSystem {
    params: SystemParams,
}

/// Heat currents of a steady state, one entry per dissipation channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TqdHeatReport {
    pub qubit_a: f64,
    pub qubit_b: f64,
    pub qubit_c: f64,
    pub crossing: f64,
    pub left_direct: f64,
    pub left: f64,
    pub right: f64,
    /// 1 when the crossing dissipator was part of the generator.
    pub crossing_active: i32,
}

/// Rectification factor with the forward/reverse currents behind it.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TqdRectification {
    pub forward: f64,
    pub reverse: f64,
    pub factor: f64,
    /// 0 when both currents vanish and the factor is reported as 0.
    pub defined: i32,
}

/// Correlation measures across the (A, C) | B bipartition, in bits.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TqdCorrelations {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub quantum_discord: f64,
    pub negativity: f64,
}

fn guard<F: FnOnce() -> TqdStatus>(f: F) -> TqdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(TqdStatus::TqdInternal)
}

/// Creates a system handle. `mode` is 0 for automatic dissipator
/// selection, 1 to force independent left reservoirs, 2 to force the
/// common reservoir. On success writes the handle to `out`; free it with
/// `tqd_system_free`.
///
/// # Safety
/// `out` must be a valid pointer to writable memory.
#[no_mangle]
pub unsafe extern "C" fn tqd_system_new(
    omega_a: f64,
    omega_b: f64,
    omega_c: f64,
    g_ab: f64,
    g_bc: f64,
    g_ac: f64,
    kappa: f64,
    t_left: f64,
    t_right: f64,
    mode: i32,
    out: *mut *mut TqdSystem,
) -> TqdStatus {
    if out.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    guard(|| {
        let mode = match mode {
            0 => DissipationMode::Auto,
            1 => DissipationMode::ForceIndependent,
            2 => DissipationMode::ForceCommon,
            _ => return TqdStatus::TqdInvalidParams,
        };
        let params = SystemParams {
            omega_a,
            omega_b,
            omega_c,
            g_ab,
            g_bc,
            g_ac,
            kappa,
            t_left,
            t_right,
            mode,
        };
        match params.validate() {
            Ok(()) => {
                let handle = Box::new(TqdSystem { params });
                unsafe { out.write(Box::into_raw(handle)) };
                TqdStatus::TqdOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a handle created by `tqd_system_new`. Null is a no-op.
///
/// # Safety
/// `system` must be a handle returned by `tqd_system_new` that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn tqd_system_free(system: *mut TqdSystem) {
    if !system.is_null() {
        drop(unsafe { Box::from_raw(system) });
    }
}

/// 1 if the parameters put degenerate transitions on the common left
/// reservoir (crossing dissipation active), 0 otherwise, negative status
/// on error.
///
/// # Safety
/// `system` must be a live handle from `tqd_system_new`.
#[no_mangle]
pub unsafe extern "C" fn tqd_crossing_active(system: *const TqdSystem) -> i32 {
    if system.is_null() {
        return -(TqdStatus::TqdNullPointer as i32);
    }
    let params = unsafe { &(*system).params };
    match params.common_active() {
        Ok(true) => 1,
        Ok(false) => 0,
        Err(e) => -(status_of(&e) as i32),
    }
}

fn solve(
    system: *const TqdSystem,
    fraction: f64,
) -> Result<(SystemParams, triqdiode::DensityMatrix), TqdStatus> {
    if system.is_null() {
        return Err(TqdStatus::TqdNullPointer);
    }
    if !(0.0..=1.0).contains(&fraction) {
        return Err(TqdStatus::TqdInvalidParams);
    }
    let params = unsafe { (*system).params };
    match steady_state_mixture(&params, fraction) {
        Ok(rho) => Ok((params, rho)),
        Err(e) => Err(status_of(&e)),
    }
}

/// Writes the steady state to `rho_out` as 64 row-major complex entries
/// (128 doubles, real part first). `fraction` selects the mixture of the
/// two common-reservoir steady states and is ignored without crossing
/// dissipation.
///
/// # Safety
/// `system` must be a live handle; `rho_out` must point to at least 128
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tqd_steady_state(
    system: *const TqdSystem,
    fraction: f64,
    rho_out: *mut f64,
) -> TqdStatus {
    if rho_out.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    guard(|| match solve(system, fraction) {
        Ok((_, rho)) => {
            let m = rho.elements();
            for i in 0..8 {
                for j in 0..8 {
                    let z = m[(i, j)];
                    unsafe {
                        rho_out.add(2 * (i * 8 + j)).write(z.re);
                        rho_out.add(2 * (i * 8 + j) + 1).write(z.im);
                    }
                }
            }
            TqdStatus::TqdOk
        }
        Err(s) => s,
    })
}

/// Steady-state heat currents for the given mixing fraction.
///
/// # Safety
/// `system` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tqd_heat_report(
    system: *const TqdSystem,
    fraction: f64,
    out: *mut TqdHeatReport,
) -> TqdStatus {
    if out.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    guard(|| match solve(system, fraction) {
        Ok((params, rho)) => match heat_currents(&params, &rho) {
            Ok(h) => {
                unsafe {
                    out.write(TqdHeatReport {
                        qubit_a: h.qubit_a,
                        qubit_b: h.qubit_b,
                        qubit_c: h.qubit_c,
                        crossing: h.crossing,
                        left_direct: h.left_direct,
                        left: h.left,
                        right: h.right,
                        crossing_active: h.crossing_active as i32,
                    })
                };
                TqdStatus::TqdOk
            }
            Err(e) => status_of(&e),
        },
        Err(s) => s,
    })
}

/// Crossover fractions `p_d` (direct channel sign change) and `p_c`
/// (crossing channel sign change); requires crossing dissipation.
///
/// # Safety
/// `system` must be a live handle; `p_d` and `p_c` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn tqd_crossover_fractions(
    system: *const TqdSystem,
    p_d: *mut f64,
    p_c: *mut f64,
) -> TqdStatus {
    if p_d.is_null() || p_c.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    if system.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    guard(|| {
        let params = unsafe { &(*system).params };
        match crossover_fractions(params) {
            Ok(f) => {
                unsafe {
                    p_d.write(f.p_d);
                    p_c.write(f.p_c);
                }
                TqdStatus::TqdOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Rectification factor from the forward and temperature-swapped steady
/// states at the given mixing fraction.
///
/// # Safety
/// `system` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tqd_rectification(
    system: *const TqdSystem,
    fraction: f64,
    out: *mut TqdRectification,
) -> TqdStatus {
    if out.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    if system.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    if !(0.0..=1.0).contains(&fraction) {
        return TqdStatus::TqdInvalidParams;
    }
    guard(|| {
        let params = unsafe { &(*system).params };
        match rectification(params, fraction) {
            Ok(r) => {
                unsafe {
                    out.write(TqdRectification {
                        forward: r.forward,
                        reverse: r.reverse,
                        factor: r.factor,
                        defined: r.defined as i32,
                    })
                };
                TqdStatus::TqdOk
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Correlation measures of the steady state across the (A, C) | B cut.
///
/// # Safety
/// `system` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tqd_correlations(
    system: *const TqdSystem,
    fraction: f64,
    out: *mut TqdCorrelations,
) -> TqdStatus {
    if out.is_null() {
        return TqdStatus::TqdNullPointer;
    }
    guard(|| match solve(system, fraction) {
        Ok((_, rho)) => {
            unsafe {
                out.write(TqdCorrelations {
                    mutual_information: mutual_information(&rho),
                    classical_correlation: classical_correlation(&rho),
                    quantum_discord: quantum_discord(&rho),
                    negativity: negativity(&rho),
                })
            };
            TqdStatus::TqdOk
        }
        Err(s) => s,
    })
}

/// Static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn tqd_status_message(status: TqdStatus) -> *const std::os::raw::c_char {
    let s: &'static [u8] = match status {
        TqdStatus::TqdOk => b"ok\0",
        TqdStatus::TqdNullPointer => b"null pointer argument\0",
        TqdStatus::TqdInvalidParams => b"invalid parameters\0",
        TqdStatus::TqdUnsupportedRegime => b"operation not defined in this parameter regime\0",
        TqdStatus::TqdSolverFailure => b"steady-state solver failed\0",
        TqdStatus::TqdDegenerate => b"quantity undefined at this (degenerate) point\0",
        TqdStatus::TqdInternal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Static, NUL-terminated crate version string.
#[no_mangle]
pub extern "C" fn tqd_version() -> *const std::os::raw::c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn make(mode: i32) -> *mut TqdSystem {
        let mut handle: *mut TqdSystem = std::ptr::null_mut();
        let status = tqd_system_new(
            3.0,
            5.0,
            3.0,
            0.1,
            0.1,
            0.1,
            1e-3,
            100.0,
            21.0,
            mode,
            &mut handle,
        );
        assert_eq!(status, TqdStatus::TqdOk);
        handle
    }

    #[test]
    fn round_trip_steady_state() {
        unsafe {
            let sys = make(0);
            assert_eq!(tqd_crossing_active(sys), 1);
            let mut raw = [0.0f64; 128];
            assert_eq!(
                tqd_steady_state(sys, 1.0, raw.as_mut_ptr()),
                TqdStatus::TqdOk
            );
            let trace: f64 = (0..8).map(|i| raw[2 * (i * 8 + i)]).sum();
            assert!((trace - 1.0).abs() < 1e-12);
            tqd_system_free(sys);
        }
    }

    #[test]
    fn heat_and_rectification() {
        unsafe {
            let sys = make(0);
            let mut h = TqdHeatReport::default();
            assert_eq!(tqd_heat_report(sys, 1.0, &mut h), TqdStatus::TqdOk);
            assert!(h.left > 0.0, "hot left reservoir feeds the system");
            assert!((h.left + h.right).abs() < 1e-12);
            assert_eq!(h.crossing_active, 1);

            let mut r = TqdRectification::default();
            assert_eq!(tqd_rectification(sys, 1.0, &mut r), TqdStatus::TqdOk);
            assert_eq!(r.defined, 1);
            assert!(r.factor > 0.0 && r.factor <= 1.0);

            let (mut pd, mut pc) = (0.0, 0.0);
            assert_eq!(
                tqd_crossover_fractions(sys, &mut pd, &mut pc),
                TqdStatus::TqdOk
            );
            assert!(pd < pc);
            tqd_system_free(sys);
        }
    }

    #[test]
    fn correlations_are_classical() {
        unsafe {
            let sys = make(0);
            let mut c = TqdCorrelations::default();
            assert_eq!(tqd_correlations(sys, 1.0, &mut c), TqdStatus::TqdOk);
            assert!(c.negativity.abs() < 1e-12);
            assert!(c.quantum_discord < 1e-6);
            tqd_system_free(sys);
        }
    }

    #[test]
    fn error_paths() {
        unsafe {
            let mut handle: *mut TqdSystem = std::ptr::null_mut();
            // Negative coupling rate.
            let status = tqd_system_new(
                3.0,
                5.0,
                3.0,
                0.1,
                0.1,
                0.1,
                -1.0,
                100.0,
                21.0,
                0,
                &mut handle,
            );
            assert_eq!(status, TqdStatus::TqdInvalidParams);
            // Unknown mode value.
            let status = tqd_system_new(
                3.0,
                5.0,
                3.0,
                0.1,
                0.1,
                0.1,
                1e-3,
                100.0,
                21.0,
                9,
                &mut handle,
            );
            assert_eq!(status, TqdStatus::TqdInvalidParams);
            // Forced common mode without the crossing condition.
            let status = tqd_system_new(
                3.0,
                5.0,
                2.0,
                0.1,
                0.1,
                0.1,
                1e-3,
                100.0,
                21.0,
                2,
                &mut handle,
            );
            // Handle creation validates structure only; the regime error
            // surfaces on use.
            if status == TqdStatus::TqdOk {
                let mut h = TqdHeatReport::default();
                assert_ne!(tqd_heat_report(handle, 1.0, &mut h), TqdStatus::TqdOk);
                tqd_system_free(handle);
            }
            // Null pointers.
            assert_eq!(
                tqd_steady_state(std::ptr::null(), 1.0, std::ptr::null_mut()),
                TqdStatus::TqdNullPointer
            );
            assert_eq!(
                tqd_crossing_active(std::ptr::null()),
                -(TqdStatus::TqdNullPointer as i32)
            );
        }
    }

    #[test]
    fn status_messages_are_nul_terminated() {
        for s in [
            TqdStatus::TqdOk,
            TqdStatus::TqdNullPointer,
            TqdStatus::TqdInvalidParams,
            TqdStatus::TqdUnsupportedRegime,
            TqdStatus::TqdSolverFailure,
            TqdStatus::TqdDegenerate,
            TqdStatus::TqdInternal,
        ] {
            let ptr = tqd_status_message(s);
            let text = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
            assert!(!text.is_empty());
        }
        let v = unsafe { std::ffi::CStr::from_ptr(tqd_version()) };
        assert!(!v.to_str().unwrap().is_empty());
    }
}
