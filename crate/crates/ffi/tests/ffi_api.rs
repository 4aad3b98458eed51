// Copyright 2026 The Bunching Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::ffi::{CStr, CString};
use std::ptr;

use bunching_ffi::*;

fn last_error() -> String {
    let p = bunching_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    bunching_string_free(p);
    s
}

const KCBS: [usize; 10] = [1, 2, 2, 3, 3, 4, 4, 5, 5, 1];

#[test]
fn permanent_of_all_ones() {
    let re = [1.0; 9];
    let (mut pr, mut pi) = (0.0, 0.0);
    let s = unsafe { bunching_permanent(re.as_ptr(), ptr::null(), 3, &mut pr, &mut pi) };
    assert_eq!(s, BunchingStatus::Ok);
    assert!((pr - 6.0).abs() < 1e-12 && pi == 0.0);
}

#[test]
fn permanent_size_cap_is_reported() {
    let re = vec![0.0; 17 * 17];
    let (mut pr, mut pi) = (0.0, 0.0);
    let s = unsafe { bunching_permanent(re.as_ptr(), ptr::null(), 17, &mut pr, &mut pi) };
    assert_eq!(s, BunchingStatus::SizeLimit);
    assert!(last_error().contains("17"));
}

#[test]
fn null_pointers_are_rejected() {
    let s = unsafe { bunching_unitary_beam_splitter(ptr::null_mut()) };
    assert_eq!(s, BunchingStatus::NullPointer);
    let mut p = 0.0;
    let s = unsafe { bunching_transition_probability(ptr::null(), ptr::null(), ptr::null(), 0, &mut p) };
    assert_eq!(s, BunchingStatus::NullPointer);
}

#[test]
fn beam_splitter_bunching_and_marginals() {
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(bunching_unitary_beam_splitter(&mut u), BunchingStatus::Ok);
        let input = [1usize, 1];
        let mut p = 1.0;
        assert_eq!(bunching_transition_probability(u, input.as_ptr(), input.as_ptr(), 2, &mut p), BunchingStatus::Ok);
        assert!(p < 1e-10);
        let out = [2usize, 0];
        assert_eq!(bunching_transition_probability(u, input.as_ptr(), out.as_ptr(), 2, &mut p), BunchingStatus::Ok);
        assert!((p - 0.5).abs() < 1e-10);
        let bad = [1usize, 0];
        assert_eq!(
            bunching_transition_probability(u, input.as_ptr(), bad.as_ptr(), 2, &mut p),
            BunchingStatus::Conservation
        );

        let mut ns = BunchingNoSignalling::default();
        let base = [1usize, 0];
        assert_eq!(bunching_no_signalling(u, base.as_ptr(), input.as_ptr(), 2, 0, &mut ns), BunchingStatus::Ok);
        assert!((ns.marginal_before - 0.5).abs() < 1e-10 && ns.difference < 1e-10);

        let mut json = ptr::null_mut();
        assert_eq!(bunching_output_distribution_json(u, input.as_ptr(), 2, &mut json), BunchingStatus::Ok);
        let dist: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
        assert_eq!(dist.as_array().unwrap().len(), 3);
        bunching_unitary_free(u);
    }
}

#[test]
fn non_unitary_is_invalid() {
    let re = [1.0, 1.0, 0.0, 1.0];
    let mut u = ptr::null_mut();
    let s = unsafe { bunching_unitary_new(re.as_ptr(), ptr::null(), 2, &mut u) };
    assert_eq!(s, BunchingStatus::InvalidArgument);
    assert!(u.is_null());
}

#[test]
fn lambda_outcomes_and_ties() {
    let lambdas = [0.2, 0.7, 0.4];
    let (mut a, mut b) = (0i8, 0i8);
    assert_eq!(unsafe { bunching_lambda_outcome(lambdas.as_ptr(), 3, 1, 2, &mut a, &mut b) }, BunchingStatus::Ok);
    assert_eq!((a, b), (-1, 1));
    let tied = [0.3, 0.3];
    assert_eq!(unsafe { bunching_lambda_outcome(tied.as_ptr(), 2, 1, 2, &mut a, &mut b) }, BunchingStatus::Tie);
    assert_eq!(unsafe { bunching_lambda_outcome(lambdas.as_ptr(), 3, 1, 4, &mut a, &mut b) }, BunchingStatus::InvalidArgument);
}

#[test]
fn kcbs_behaviors_through_handles() {
    unsafe {
        let mut exact = ptr::null_mut();
        assert_eq!(bunching_behavior_lambda_exact(5, KCBS.as_ptr(), 5, ptr::null(), &mut exact), BunchingStatus::Ok);
        let mut v = 0.0;
        assert_eq!(bunching_cycle_value(exact, &mut v), BunchingStatus::Ok);
        assert_eq!(v, -5.0);
        assert_eq!(bunching_correlator(exact, 2, 1, &mut v), BunchingStatus::Ok);
        assert_eq!(v, -1.0);
        let mut nd = BunchingNoDisturbance::default();
        assert_eq!(bunching_no_disturbance_check(exact, 1e-12, &mut nd), BunchingStatus::Ok);
        assert!(nd.pass && nd.max_gap == 0.0);

        let mut json = ptr::null_mut();
        assert_eq!(bunching_behavior_to_json(exact, &mut json), BunchingStatus::Ok);
        let text = CString::new(take_string(json)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(bunching_behavior_from_json(text.as_ptr(), &mut back), BunchingStatus::Ok);
        assert_eq!(bunching_cycle_value(back, &mut v), BunchingStatus::Ok);
        assert_eq!(v, -5.0);
        bunching_behavior_free(back);
        bunching_behavior_free(exact);

        let law = CString::new(r#"{"type":"beta","alpha":2.0,"beta":3.0}"#).unwrap();
        let mut sampled = ptr::null_mut();
        let s = bunching_behavior_lambda_sampled(5, KCBS.as_ptr(), 5, law.as_ptr(), 20_000, 7, &mut sampled);
        assert_eq!(s, BunchingStatus::Ok);
        assert_eq!(bunching_cycle_value(sampled, &mut v), BunchingStatus::Ok);
        assert_eq!(v, -5.0);
        assert_eq!(bunching_no_disturbance_check(sampled, 0.05, &mut nd), BunchingStatus::Ok);
        assert!(nd.pass);
        bunching_behavior_free(sampled);

        let values = [1i8, -1, 1, -1, 1];
        let mut det = ptr::null_mut();
        assert_eq!(bunching_behavior_deterministic(5, KCBS.as_ptr(), 5, values.as_ptr(), &mut det), BunchingStatus::Ok);
        assert_eq!(bunching_cycle_value(det, &mut v), BunchingStatus::Ok);
        assert_eq!(v, -3.0);
        bunching_behavior_free(det);

        let bad = [1i8, 0, 1, -1, 1];
        let mut det = ptr::null_mut();
        let s = bunching_behavior_deterministic(5, KCBS.as_ptr(), 5, bad.as_ptr(), &mut det);
        assert_eq!(s, BunchingStatus::InvalidArgument);
    }
}

#[test]
fn malformed_behavior_json() {
    let text = CString::new("{not json").unwrap();
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { bunching_behavior_from_json(text.as_ptr(), &mut b) }, BunchingStatus::Parse);
    let text = CString::new(r#"{"observables": 3}"#).unwrap();
    assert_eq!(unsafe { bunching_behavior_from_json(text.as_ptr(), &mut b) }, BunchingStatus::InvalidArgument);
}

#[test]
fn cycle_bounds() {
    let mut b = BunchingBounds::default();
    assert_eq!(unsafe { bunching_cycle_bounds(5, &mut b) }, BunchingStatus::Ok);
    assert_eq!((b.classical_min, b.arithmetic_min), (-3.0, -5.0));
    assert!((b.nd_min + 5.0).abs() < 1e-7);
    assert_eq!(unsafe { bunching_cycle_bounds(3, &mut b) }, BunchingStatus::Ok);
    assert_eq!(b.classical_min, -1.0);
    assert_eq!(unsafe { bunching_cycle_bounds(2, &mut b) }, BunchingStatus::InvalidArgument);
}

#[test]
fn scenario_and_reproduce_reports() {
    unsafe {
        let scenario = CString::new(include_str!("../../core/scenarios/hom.json")).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(bunching_run_scenario_json(scenario.as_ptr(), ptr::null(), &mut out), BunchingStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        assert!(report["rows"].as_array().unwrap().iter().all(|r| r["status"] != "MISMATCH"));

        assert_eq!(bunching_reproduce_reply(0, 0, &mut out), BunchingStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
        let rows = report["rows"].as_array().unwrap();
        assert!(!rows.is_empty() && rows.iter().all(|r| r["status"] == "MATCH"));

        let bad = CString::new("[1,").unwrap();
        assert_eq!(bunching_run_scenario_json(bad.as_ptr(), ptr::null(), &mut out), BunchingStatus::Parse);
    }
}

#[test]
fn success_clears_last_error() {
    let mut b = BunchingBounds::default();
    assert_ne!(unsafe { bunching_cycle_bounds(1, &mut b) }, BunchingStatus::Ok);
    assert!(!bunching_last_error().is_null());
    assert_eq!(unsafe { bunching_cycle_bounds(3, &mut b) }, BunchingStatus::Ok);
    assert!(bunching_last_error().is_null());
}
