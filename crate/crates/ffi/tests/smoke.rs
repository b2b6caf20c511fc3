use std::ffi::{CStr, CString};
use std::ptr;

use bpalloc_ffi::*;

const SCENARIO: &str = r#"
version = 1

[network]
total_bandwidth = 4.0
noise_psd = 1.0

[[sources]]
id = 0
power_budget = 1.1

[[users]]
id = 0
source = 0
h_sd = 4.0
c_min = 1.0

[[users]]
id = 1
source = 0
h_sd = 5.0
c_min = 1.1

[[users]]
id = 2
source = 0
h_sd = 6.0
c_min = 1.2
"#;

fn load(text: &str) -> *mut BpScenario {
    let c = CString::new(text).unwrap();
    let mut handle = ptr::null_mut();
    let code = unsafe { bp_scenario_from_toml(c.as_ptr(), &mut handle) };
    assert_eq!(code, BP_OK);
    assert!(!handle.is_null());
    handle
}

#[test]
fn scenario_round_trip() {
    let s = load(SCENARIO);
    unsafe {
        assert_eq!(bp_scenario_n_users(s), 3);
        assert_eq!(bp_scenario_has_relay(s), 0);
        assert_eq!(bp_scenario_has_thresholds(s), 1);
        bp_scenario_free(s);
    }
}

#[test]
fn parse_error_sets_message() {
    let c = CString::new("not toml at all [").unwrap();
    let mut handle = ptr::null_mut();
    let code = unsafe { bp_scenario_from_toml(c.as_ptr(), &mut handle) };
    assert_eq!(code, BP_ERR_INVALID);
    let msg = unsafe { CStr::from_ptr(bp_last_error()) };
    assert!(!msg.to_str().unwrap().is_empty());
}

#[test]
fn allocate_sum_capacity() {
    let s = load(SCENARIO);
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(bp_allocate(s, 0, 0, &mut a), BP_OK);
        // All power on the strongest user: 4 ln(1 + 6 * 1.1 / 4).
        let expect = 4.0 * (1.0 + 6.0 * 1.1 / 4.0f64).ln();
        assert!((bp_allocation_value(a) - expect).abs() < 1e-9);
        assert_eq!(bp_allocation_n_users(a), 3);
        let mut p = f64::NAN;
        assert_eq!(bp_allocation_source_power(a, 2, &mut p), BP_OK);
        assert!((p - 1.1).abs() < 1e-9);
        let mut w = f64::NAN;
        assert_eq!(bp_allocation_source_bandwidth(a, 2, &mut w), BP_OK);
        assert!((w - 4.0).abs() < 1e-9);
        let mut c = f64::NAN;
        assert_eq!(bp_allocation_user_capacity(a, 2, &mut c), BP_OK);
        assert!((c - expect).abs() < 1e-9);
        // No relay phase in this scenario.
        assert_eq!(bp_allocation_relay_power(a, 0, &mut p), BP_ERR_INVALID);
        // Out-of-range user index.
        assert_eq!(bp_allocation_source_power(a, 3, &mut p), BP_ERR_NULL);
        bp_allocation_free(a);
        bp_scenario_free(s);
    }
}

#[test]
fn allocate_power_min_meets_thresholds() {
    let s = load(SCENARIO);
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(bp_allocate(s, 0, 2, &mut a), BP_OK);
        for (i, c_min) in [1.0, 1.1, 1.2].into_iter().enumerate() {
            let mut c = f64::NAN;
            assert_eq!(bp_allocation_user_capacity(a, i, &mut c), BP_OK);
            assert!(c >= c_min - 1e-6, "user {i}: {c} < {c_min}");
        }
        assert!(bp_allocation_value(a) <= 1.1 + 1e-9);
        bp_allocation_free(a);
        bp_scenario_free(s);
    }
}

#[test]
fn infeasible_band_reports_code() {
    // Same instance with the band shrunk below the minimum demand.
    let tight = SCENARIO.replace("total_bandwidth = 4.0", "total_bandwidth = 1.0");
    let s = load(&tight);
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(bp_allocate(s, 0, 2, &mut a), BP_ERR_INFEASIBLE);
        let msg = CStr::from_ptr(bp_last_error()).to_str().unwrap();
        assert!(msg.contains("infeasible"), "message: {msg}");
        bp_scenario_free(s);
    }
}

#[test]
fn admission_greedy_and_exhaustive() {
    let tight = SCENARIO.replace("total_bandwidth = 4.0", "total_bandwidth = 1.37");
    let s = load(&tight);
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(bp_admit(s, 0, &mut g), BP_OK);
        assert_eq!(bp_admission_n_admitted(g), 2);
        let (mut a0, mut a1) = (0usize, 0usize);
        assert_eq!(bp_admission_admitted(g, 0, &mut a0), BP_OK);
        assert_eq!(bp_admission_admitted(g, 1, &mut a1), BP_OK);
        assert_eq!((a0, a1), (1, 2));
        assert_eq!(bp_admission_removals(g), 1);
        assert!(bp_admission_oracle_calls(g) > 0);

        let mut x = ptr::null_mut();
        assert_eq!(bp_admit(s, 1, &mut x), BP_OK);
        assert_eq!(bp_admission_n_admitted(x), 2);

        bp_admission_free(g);
        bp_admission_free(x);
        bp_scenario_free(s);
    }
}

#[test]
fn bad_enum_values_rejected() {
    let s = load(SCENARIO);
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(bp_allocate(s, 9, 0, &mut a), BP_ERR_INVALID);
        assert_eq!(bp_allocate(s, 0, 9, &mut a), BP_ERR_INVALID);
        let mut adm = ptr::null_mut();
        assert_eq!(bp_admit(s, 7, &mut adm), BP_ERR_INVALID);
        bp_scenario_free(s);
    }
}

#[test]
fn null_handles_are_safe() {
    unsafe {
        assert_eq!(bp_scenario_n_users(ptr::null()), 0);
        assert_eq!(bp_allocation_n_users(ptr::null()), 0);
        assert!(bp_allocation_value(ptr::null()).is_nan());
        let mut a = ptr::null_mut();
        assert_eq!(bp_allocate(ptr::null(), 0, 0, &mut a), BP_ERR_NULL);
        bp_scenario_free(ptr::null_mut());
        bp_allocation_free(ptr::null_mut());
        bp_admission_free(ptr::null_mut());
    }
}
