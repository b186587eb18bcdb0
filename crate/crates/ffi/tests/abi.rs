use std::ffi::{CStr, CString};
use std::ptr;

use besovclaw_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(bc_last_error()).to_string_lossy().into_owned() }
}

fn flux(spec: &str) -> *mut BcFlux {
    let s = CString::new(spec).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { bc_flux_new(s.as_ptr(), &mut f) }, BC_OK);
    f
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(bc_version()) };
    assert!(!v.to_str().unwrap().is_empty());
}

#[test]
fn flux_roundtrip_and_errors() {
    let f = flux("burgers");
    let (mut a, mut da) = (0.0, 0.0);
    assert_eq!(unsafe { bc_flux_eval(f, 0.5, &mut a, &mut da) }, BC_OK);
    assert!((a - 0.125).abs() < 1e-15 && (da - 0.5).abs() < 1e-15);
    unsafe { bc_flux_free(f) };

    let bad = CString::new("nonsense").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { bc_flux_new(bad.as_ptr(), &mut g) }, BC_ERR_INVALID);
    assert!(g.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { bc_flux_new(ptr::null(), &mut g) }, BC_ERR_NULL);
    assert_eq!(unsafe { bc_flux_eval(ptr::null(), 0.0, &mut a, &mut da) }, BC_ERR_NULL);
    unsafe { bc_flux_free(ptr::null_mut()) };
}

#[test]
fn solve_and_copy() {
    let f = flux("burgers");
    let init = CString::new("riemann:1,0").unwrap();
    let scheme = CString::new("godunov").unwrap();
    let mut s = ptr::null_mut();
    let rc = unsafe { bc_solve_fv(f, init.as_ptr(), scheme.as_ptr(), -1.0, 1.0, 64, 0.5, 0.45, &mut s) };
    assert_eq!(rc, BC_OK, "{}", last_error());
    let (mut nt, mut nx) = (0usize, 0usize);
    assert_eq!(unsafe { bc_solution_dims(s, &mut nt, &mut nx) }, BC_OK);
    assert_eq!(nx, 64);
    let mut buf = vec![0.0; nt * nx];
    assert_eq!(unsafe { bc_solution_copy_values(s, buf.as_mut_ptr(), buf.len() - 1) }, BC_ERR_BUFFER);
    assert_eq!(unsafe { bc_solution_copy_values(s, buf.as_mut_ptr(), buf.len()) }, BC_OK);
    assert!(buf.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));

    let mut val = -1.0;
    let rc = unsafe { bc_increment_functional(s, 0, 1.0 / 32.0, 3.0, 0.1, 0.45, -0.6, 0.6, 0.5, &mut val) };
    assert_eq!(rc, BC_OK, "{}", last_error());
    assert!(val > 0.0);
    assert_eq!(unsafe { bc_increment_functional(s, 7, 0.1, 3.0, 0.1, 0.45, -0.6, 0.6, 0.5, &mut val) }, BC_ERR_INVALID);
    unsafe { bc_solution_free(s) };

    let mut s2 = ptr::null_mut();
    let rc = unsafe { bc_solve_fv(f, init.as_ptr(), scheme.as_ptr(), -1.0, 1.0, 64, 0.5, 1.5, &mut s2) };
    assert_eq!(rc, BC_ERR_CFL);
    unsafe { bc_flux_free(f) };
}

#[test]
fn delta_and_tartar_match_closed_forms() {
    let f = flux("burgers");
    let mut d = 0.0;
    assert_eq!(unsafe { bc_delta(f, 0.0, 1.0, 1.0, &mut d) }, BC_OK, "{}", last_error());
    // Burgers: Δ(u, ū) = |u − ū|³ / 6.
    assert!((d - 1.0 / 6.0).abs() < 1e-12, "{d}");
    let q = CString::new("quadratic").unwrap();
    let mut g = 0.0;
    assert_eq!(unsafe { bc_tartar_gap(f, q.as_ptr(), 0.0, 1.0, &mut g) }, BC_OK, "{}", last_error());
    assert!((g - 1.0 / 12.0).abs() < 1e-12, "{g}");
    unsafe { bc_flux_free(f) };
}

#[test]
fn lemma_scan() {
    let f = flux("even_power:2");
    let mut r = BcLemmaReport::default();
    assert_eq!(unsafe { bc_verify_lemma_delta(f, 500, 3, 1.0, 1, &mut r) }, BC_OK, "{}", last_error());
    assert_eq!(r.pairs, 500);
    assert_eq!(r.violations_corrected, 0);
    assert_eq!(r.pass, 1);
    unsafe { bc_flux_free(f) };
}
