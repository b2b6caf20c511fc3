//! C ABI for the bpalloc allocation engine.
//!
//! All entry points return an `int32_t` status code and hand results back
//! through opaque handles. Strings use UTF-8. Handles must be released with
//! the matching `*_free` function; passing them to any other library is
//! undefined behaviour. The last error message is kept per thread and stays
//! valid until the next failing call on that thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::path::Path;

use bpalloc::allocators::{self, Objective, Scheme};
use bpalloc::admission::{self, AdmissionResult};
use bpalloc::model::Allocation;
use bpalloc::scenario::Scenario;
use bpalloc::Error;

/// Success.
pub const BP_OK: i32 = 0;
/// Malformed input: bad TOML, bad enum value, missing thresholds, etc.
pub const BP_ERR_INVALID: i32 = 1;
/// The instance admits no feasible allocation.
pub const BP_ERR_INFEASIBLE: i32 = 2;
/// The numerical solver failed to converge.
pub const BP_ERR_NUMERICAL: i32 = 3;
/// Instance exceeds the exhaustive-search cap.
pub const BP_ERR_TOO_LARGE: i32 = 4;
/// A null handle or out-of-range index was passed.
pub const BP_ERR_NULL: i32 = 5;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_for(err: &Error) -> i32 {
    match err {
        Error::InfeasiblePower { .. } | Error::InfeasibleInstance { .. } => BP_ERR_INFEASIBLE,
        Error::InfeasibleStart | Error::NumericalFailure(_) => BP_ERR_NUMERICAL,
        Error::InstanceTooLarge { .. } => BP_ERR_TOO_LARGE,
        _ => BP_ERR_INVALID,
    }
}

fn fail(err: Error) -> i32 {
    let code = code_for(&err);
    set_error(&err.to_string());
    code
}

fn null_arg(what: &str) -> i32 {
    set_error(&format!("null pointer passed for {what}"));
    BP_ERR_NULL
}

/// Message for the most recent failure on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Opaque scenario handle.
pub struct BpScenario {
    inner: Scenario,
}

/// Opaque allocation handle.
pub struct BpAllocation {
    allocation: Allocation,
    capacities: Vec<f64>,
    value: f64,
}

/// Opaque admission-control result handle.
pub struct BpAdmission {
    inner: AdmissionResult,
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        return Err(null_arg(what));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        BP_ERR_INVALID
    })
}

fn scenario_out(scenario: Scenario, out: *mut *mut BpScenario) -> i32 {
    let handle = Box::new(BpScenario { inner: scenario });
    unsafe { *out = Box::into_raw(handle) };
    BP_OK
}

/// Parse a scenario from TOML text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_from_toml(
    text: *const c_char,
    out: *mut *mut BpScenario,
) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let text = match read_str(text, "text") {
        Ok(t) => t,
        Err(code) => return code,
    };
    match Scenario::from_toml(text) {
        Ok(s) => scenario_out(s, out),
        Err(e) => fail(e),
    }
}

/// Load a scenario from a TOML file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_load(path: *const c_char, out: *mut *mut BpScenario) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let path = match read_str(path, "path") {
        Ok(p) => p,
        Err(code) => return code,
    };
    match Scenario::load(Path::new(path)) {
        Ok(s) => scenario_out(s, out),
        Err(e) => fail(e),
    }
}

/// Release a scenario handle. Null is ignored.
///
/// # Safety
/// `scenario` must come from `bp_scenario_from_toml`/`bp_scenario_load` and
/// must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_free(scenario: *mut BpScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of users in the scenario, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_n_users(scenario: *const BpScenario) -> usize {
    scenario
        .as_ref()
        .map_or(0, |s| s.inner.topology.n_users())
}

/// 1 if the scenario uses relays, 0 otherwise or for a null handle.
///
/// # Safety
/// `scenario` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_has_relay(scenario: *const BpScenario) -> i32 {
    scenario
        .as_ref()
        .map_or(0, |s| s.inner.gains.is_relayed() as i32)
}

/// 1 if every user carries a rate threshold, 0 otherwise or for null.
///
/// # Safety
/// `scenario` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_scenario_has_thresholds(scenario: *const BpScenario) -> i32 {
    scenario
        .as_ref()
        .map_or(0, |s| s.inner.thresholds.is_some() as i32)
}

fn scheme_from(code: i32) -> Option<Scheme> {
    match code {
        0 => Some(Scheme::Obpa),
        1 => Some(Scheme::Ebopa),
        2 => Some(Scheme::Ebpa),
        _ => None,
    }
}

fn objective_from(code: i32) -> Option<Objective> {
    match code {
        0 => Some(Objective::SumCapacity),
        1 => Some(Objective::MaxMin),
        2 => Some(Objective::PowerMin),
        _ => None,
    }
}

/// Solve an allocation problem.
///
/// `scheme`: 0 = OBPA (jointly optimal), 1 = EBOPA (equal bandwidth, optimal
/// power), 2 = EBPA (equal bandwidth and power). `objective`: 0 = sum
/// capacity, 1 = max-min, 2 = power minimization (needs thresholds).
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocate(
    scenario: *const BpScenario,
    scheme: i32,
    objective: i32,
    out: *mut *mut BpAllocation,
) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let Some(scenario) = scenario.as_ref() else {
        return null_arg("scenario");
    };
    let Some(scheme) = scheme_from(scheme) else {
        set_error("scheme must be 0 (obpa), 1 (ebopa), or 2 (ebpa)");
        return BP_ERR_INVALID;
    };
    let Some(objective) = objective_from(objective) else {
        set_error("objective must be 0 (sum), 1 (maxmin), or 2 (powermin)");
        return BP_ERR_INVALID;
    };
    let s = &scenario.inner;
    let solved = allocators::solve(
        &s.topology,
        &s.gains,
        s.thresholds.as_deref(),
        scheme,
        objective,
    );
    let (allocation, value) = match solved {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let capacities = match allocators::user_capacities(&s.topology, &s.gains, &allocation) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let handle = Box::new(BpAllocation {
        allocation,
        capacities,
        value,
    });
    *out = Box::into_raw(handle);
    BP_OK
}

/// Release an allocation handle. Null is ignored.
///
/// # Safety
/// `allocation` must come from `bp_allocate` and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_free(allocation: *mut BpAllocation) {
    if !allocation.is_null() {
        drop(Box::from_raw(allocation));
    }
}

/// Objective value: sum or minimum capacity in nat/s, or total power.
///
/// # Safety
/// `allocation` must be a live handle or null (returns NaN for null).
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_value(allocation: *const BpAllocation) -> f64 {
    allocation.as_ref().map_or(f64::NAN, |a| a.value)
}

/// Number of users covered by the allocation, or 0 for null.
///
/// # Safety
/// `allocation` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_n_users(allocation: *const BpAllocation) -> usize {
    allocation.as_ref().map_or(0, |a| a.capacities.len())
}

unsafe fn alloc_field(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
    get: impl Fn(&BpAllocation, usize) -> Option<f64>,
) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let Some(a) = allocation.as_ref() else {
        return null_arg("allocation");
    };
    if user >= a.capacities.len() {
        set_error(&format!(
            "user index {user} out of range for {} users",
            a.capacities.len()
        ));
        return BP_ERR_NULL;
    }
    match get(a, user) {
        Some(v) => {
            *out = v;
            BP_OK
        }
        None => {
            set_error("allocation has no relay phase");
            BP_ERR_INVALID
        }
    }
}

/// Source-phase transmit power for one user.
///
/// # Safety
/// `allocation` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_source_power(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
) -> i32 {
    alloc_field(allocation, user, out, |a, i| {
        Some(a.allocation.source_shares[i].power())
    })
}

/// Source-phase bandwidth for one user.
///
/// # Safety
/// `allocation` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_source_bandwidth(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
) -> i32 {
    alloc_field(allocation, user, out, |a, i| {
        Some(a.allocation.source_shares[i].bandwidth())
    })
}

/// Relay-phase transmit power for one user. Fails with `BP_ERR_INVALID`
/// when the allocation has no relay phase.
///
/// # Safety
/// `allocation` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_relay_power(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
) -> i32 {
    alloc_field(allocation, user, out, |a, i| {
        a.allocation.relay_shares.as_ref().map(|r| r[i].power())
    })
}

/// Relay-phase bandwidth for one user. Fails with `BP_ERR_INVALID`
/// when the allocation has no relay phase.
///
/// # Safety
/// `allocation` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_relay_bandwidth(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
) -> i32 {
    alloc_field(allocation, user, out, |a, i| {
        a.allocation.relay_shares.as_ref().map(|r| r[i].bandwidth())
    })
}

/// Achieved capacity for one user in nat/s (min over hops when relayed).
///
/// # Safety
/// `allocation` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_allocation_user_capacity(
    allocation: *const BpAllocation,
    user: usize,
    out: *mut f64,
) -> i32 {
    alloc_field(allocation, user, out, |a, i| Some(a.capacities[i]))
}

/// Run admission control. `algorithm`: 0 = greedy, 1 = exhaustive. The
/// scenario must carry per-user rate thresholds.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_admit(
    scenario: *const BpScenario,
    algorithm: i32,
    out: *mut *mut BpAdmission,
) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let Some(scenario) = scenario.as_ref() else {
        return null_arg("scenario");
    };
    let s = &scenario.inner;
    let Some(thresholds) = s.thresholds.as_deref() else {
        set_error("admission control needs per-user rate thresholds (c_min)");
        return BP_ERR_INVALID;
    };
    let relayed = s.gains.is_relayed();
    let result = match (algorithm, relayed) {
        (0, false) => admission::greedy_admission_no_relay(&s.topology, &s.gains, thresholds),
        (1, false) => admission::exhaustive_admission_no_relay(&s.topology, &s.gains, thresholds),
        (0, true) => admission::greedy_admission_relay(&s.topology, &s.gains, thresholds),
        (1, true) => admission::exhaustive_admission_relay(&s.topology, &s.gains, thresholds),
        _ => {
            set_error("algorithm must be 0 (greedy) or 1 (exhaustive)");
            return BP_ERR_INVALID;
        }
    };
    match result {
        Ok(r) => {
            *out = Box::into_raw(Box::new(BpAdmission { inner: r }));
            BP_OK
        }
        Err(e) => fail(e),
    }
}

/// Release an admission handle. Null is ignored.
///
/// # Safety
/// `admission` must come from `bp_admit` and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_admission_free(admission: *mut BpAdmission) {
    if !admission.is_null() {
        drop(Box::from_raw(admission));
    }
}

/// Number of admitted users, or 0 for null.
///
/// # Safety
/// `admission` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_admission_n_admitted(admission: *const BpAdmission) -> usize {
    admission.as_ref().map_or(0, |a| a.inner.admitted.len())
}

/// Fetch the `index`-th admitted user id (ascending order).
///
/// # Safety
/// `admission` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_admission_admitted(
    admission: *const BpAdmission,
    index: usize,
    out: *mut usize,
) -> i32 {
    if out.is_null() {
        return null_arg("out");
    }
    let Some(a) = admission.as_ref() else {
        return null_arg("admission");
    };
    match a.inner.admitted.get(index) {
        Some(&id) => {
            *out = id;
            BP_OK
        }
        None => {
            set_error(&format!(
                "index {index} out of range for {} admitted users",
                a.inner.admitted.len()
            ));
            BP_ERR_NULL
        }
    }
}

/// Number of users removed before admission succeeded, or 0 for null.
///
/// # Safety
/// `admission` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_admission_removals(admission: *const BpAdmission) -> usize {
    admission.as_ref().map_or(0, |a| a.inner.t_star)
}

/// Bandwidth-oracle evaluations performed, or 0 for null.
///
/// # Safety
/// `admission` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bp_admission_oracle_calls(admission: *const BpAdmission) -> usize {
    admission.as_ref().map_or(0, |a| a.inner.oracle_calls)
}
