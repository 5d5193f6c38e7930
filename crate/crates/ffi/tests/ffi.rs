use std::ffi::{CStr, CString};
use std::ptr;

use wakesize_ffi::*;

fn data(name: &str) -> CString {
    let p = format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"));
    CString::new(p).unwrap()
}

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        ws_last_error(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ws_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn null_arguments_are_reported() {
    let mut case = ptr::null_mut();
    assert_eq!(unsafe { ws_case_load(ptr::null(), &mut case) }, WsStatus::NullPointer);
    assert!(case.is_null());
    let mut n = 0usize;
    assert_eq!(unsafe { ws_case_num_capacities(ptr::null(), &mut n) }, WsStatus::NullPointer);
    assert!(last_error().contains("null"));
    unsafe {
        ws_case_free(ptr::null_mut());
        ws_scenarios_free(ptr::null_mut());
        ws_solution_free(ptr::null_mut());
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let mut case = ptr::null_mut();
    let p = CString::new("/nonexistent/case.json").unwrap();
    assert_eq!(unsafe { ws_case_load(p.as_ptr(), &mut case) }, WsStatus::Io);
    assert!(last_error().contains("/nonexistent/case.json"));
    // Length is reported even when the buffer is too short.
    let mut tiny = [0 as std::ffi::c_char; 4];
    let n = unsafe { ws_last_error(tiny.as_mut_ptr(), tiny.len()) };
    assert!(n > 3);
    assert_eq!(tiny[3], 0);
}

#[test]
fn sizes_the_one_bus_case() {
    unsafe {
        let mut case = ptr::null_mut();
        assert_eq!(ws_case_load(data("bus1.json").as_ptr(), &mut case), WsStatus::Ok, "{}", last_error());
        let mut ncap = 0usize;
        assert_eq!(ws_case_num_capacities(case, &mut ncap), WsStatus::Ok);
        assert_eq!(ncap, 3);

        let mut set = ptr::null_mut();
        assert_eq!(ws_scenarios_load(case, data("bus1_scenarios.csv").as_ptr(), &mut set), WsStatus::Ok, "{}", last_error());
        let (mut sn, mut se) = (0usize, 0usize);
        assert_eq!(ws_scenarios_count(set, &mut sn, &mut se), WsStatus::Ok);
        assert_eq!((sn, se), (5, 3));

        let mut opts = ws_size_options_default();
        opts.g_cap = 40.0;
        opts.budget = 80_000.0;
        let mut sol = ptr::null_mut();
        assert_eq!(ws_size(case, set, &opts, &mut sol), WsStatus::Ok, "{}", last_error());
        let mut status = WsSizingStatus::Infeasible;
        assert_eq!(ws_solution_status(sol, &mut status), WsStatus::Ok);
        assert_eq!(status, WsSizingStatus::Converged);

        let mut len = 0usize;
        assert_eq!(ws_solution_capacities(sol, ptr::null_mut(), 0, &mut len), WsStatus::BufferTooSmall);
        assert_eq!(len, ncap);
        let mut x = vec![0.0; len];
        assert_eq!(ws_solution_capacities(sol, x.as_mut_ptr(), x.len(), &mut len), WsStatus::Ok);
        assert!(x.iter().all(|&v| v >= 0.0));

        let (mut inv, mut fuel) = (0.0, 0.0);
        assert_eq!(ws_solution_costs(sol, &mut inv, &mut fuel), WsStatus::Ok);
        assert!(inv <= 80_000.0 + 1e-6);
        assert!(fuel.is_finite());
        let mut iters = 0usize;
        assert_eq!(ws_solution_iterations(sol, &mut iters), WsStatus::Ok);
        assert!((1..=50).contains(&iters));

        ws_solution_free(sol);
        ws_scenarios_free(set);
        ws_case_free(case);
    }
}

#[test]
fn bad_options_are_rejected() {
    unsafe {
        let mut case = ptr::null_mut();
        assert_eq!(ws_case_load(data("bus1.json").as_ptr(), &mut case), WsStatus::Ok);
        let mut set = ptr::null_mut();
        assert_eq!(ws_scenarios_load(case, data("bus1_scenarios.csv").as_ptr(), &mut set), WsStatus::Ok);
        let mut opts = ws_size_options_default();
        opts.tol_x = 0.0;
        let mut sol = ptr::null_mut();
        assert_eq!(ws_size(case, set, &opts, &mut sol), WsStatus::InvalidArgument);
        assert!(sol.is_null());
        opts = ws_size_options_default();
        opts.eps0 = -1.0;
        assert_eq!(ws_size(case, set, &opts, &mut sol), WsStatus::InvalidArgument, "{}", last_error());
        ws_scenarios_free(set);
        ws_case_free(case);
    }
}
