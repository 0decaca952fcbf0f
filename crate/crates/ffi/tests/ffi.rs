use std::ffi::{CStr, CString};
use std::ptr;

use entqfi_ffi::*;

fn last_error() -> Option<String> {
    let p = entqfi_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn bell() -> *mut EntqfiState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = [h, 0.0, 0.0, h];
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { entqfi_state_pure(re.as_ptr(), ptr::null(), &mut out) },
        EntqfiStatus::Ok
    );
    out
}

#[test]
fn bell_state_values() {
    let s = bell();
    let (mut c, mut n, mut q, mut r) = (0.0, 0.0, 0.0, 0.0);
    let mut sep = true;
    let mut conv = false;
    let mut dir = [0.0; 3];
    unsafe {
        assert_eq!(entqfi_concurrence(s, &mut c), EntqfiStatus::Ok);
        assert_eq!(entqfi_negativity(s, &mut n), EntqfiStatus::Ok);
        assert_eq!(entqfi_is_separable(s, &mut sep), EntqfiStatus::Ok);
        assert_eq!(
            entqfi_max_mean_qfi(s, &mut q, dir.as_mut_ptr()),
            EntqfiStatus::Ok
        );
        assert_eq!(entqfi_ree(s, 3, &mut r, &mut conv), EntqfiStatus::Ok);
        entqfi_state_free(s);
    }
    assert!((c - 1.0).abs() < 1e-9 && (n - 1.0).abs() < 1e-9 && !sep);
    assert!((q - 2.0).abs() < 1e-9);
    assert!((dir.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((r - 1.0).abs() < 5e-3 && conv);
    assert!(last_error().is_none());
}

#[test]
fn full_matrix_round_trip() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { entqfi_state_random(1, 2, &mut s) },
        EntqfiStatus::Ok
    );
    let (mut re, mut im) = ([0.0; 16], [0.0; 16]);
    assert_eq!(
        unsafe { entqfi_state_matrix(s, re.as_mut_ptr(), im.as_mut_ptr()) },
        EntqfiStatus::Ok
    );
    let mut copy = ptr::null_mut();
    assert_eq!(
        unsafe { entqfi_state_new(re.as_ptr(), im.as_ptr(), &mut copy) },
        EntqfiStatus::Ok
    );
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        entqfi_concurrence(s, &mut a);
        entqfi_concurrence(copy, &mut b);
        entqfi_state_free(s);
        entqfi_state_free(copy);
    }
    let (rho, _) = entqfi::randgen::ensemble_state(1, 2);
    assert_eq!(a, entqfi::measures::concurrence(&rho));
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn errors_set_status_and_message() {
    let mut out = ptr::null_mut();
    let zeros = [0.0; 16];
    assert_eq!(
        unsafe { entqfi_state_new(zeros.as_ptr(), ptr::null(), &mut out) },
        EntqfiStatus::InvalidState
    );
    assert!(out.is_null());
    assert!(
        last_error().unwrap().contains("trace"),
        "{:?}",
        last_error()
    );

    let mut x = 0.0;
    assert_eq!(
        unsafe { entqfi_concurrence(ptr::null(), &mut x) },
        EntqfiStatus::NullPointer
    );
    assert_eq!(
        unsafe { entqfi_state_new(ptr::null(), ptr::null(), &mut out) },
        EntqfiStatus::NullPointer
    );
    assert_eq!(
        unsafe { entqfi_state_random(1, 0, ptr::null_mut()) },
        EntqfiStatus::NullPointer
    );

    let s = bell();
    assert_eq!(
        unsafe { entqfi_concurrence(s, ptr::null_mut()) },
        EntqfiStatus::NullPointer
    );
    let mut opt = EntqfiLoccOptimum::default();
    assert_eq!(
        unsafe { entqfi_locc_optimize(s, 1, 6, &mut opt) },
        EntqfiStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { entqfi_locc_optimize(s, 6, 4, &mut opt) },
        EntqfiStatus::InvalidArgument
    );
    assert_eq!(unsafe { entqfi_concurrence(s, &mut x) }, EntqfiStatus::Ok);
    assert!(last_error().is_none(), "success clears the message");
    unsafe { entqfi_state_free(s) };
    unsafe { entqfi_state_free(ptr::null_mut()) };
}

#[test]
fn locc_optimum_matches_core() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { entqfi_state_random(1, 2, &mut s) },
        EntqfiStatus::Ok
    );
    let mut opt = EntqfiLoccOptimum::default();
    assert_eq!(
        unsafe { entqfi_locc_optimize(s, 4, 6, &mut opt) },
        EntqfiStatus::Ok
    );
    unsafe { entqfi_state_free(s) };
    let want = entqfi::locc::optimize_with_refinement(&entqfi::randgen::ensemble_state(1, 2).0);
    assert_eq!(opt.max_value, want.max_value);
    assert_eq!(opt.min_value, want.min_value);
    assert_eq!(opt.max_angles, want.max_angles.as_array());
    assert_eq!(
        (opt.refined, opt.evaluations),
        (want.refined, want.evaluations)
    );
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().to_str().unwrap()).unwrap();
    let mut cfg = entqfi_experiment_config_default();
    assert_eq!(cfg.count, 1000);
    cfg.count = 4;
    assert_eq!(
        unsafe { entqfi_run_experiment(&cfg, path.as_ptr()) },
        EntqfiStatus::Ok
    );
    let csv = std::fs::read_to_string(dir.path().join("states.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    cfg.refine_divisor = cfg.grid_divisor;
    assert_eq!(
        unsafe { entqfi_run_experiment(&cfg, path.as_ptr()) },
        EntqfiStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { entqfi_run_experiment(ptr::null(), path.as_ptr()) },
        EntqfiStatus::NullPointer
    );
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(entqfi_version()) }
        .to_str()
        .unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
