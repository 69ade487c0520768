use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rmom_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rmom_last_error()) }.to_string_lossy().into_owned()
}

fn from_json(s: &str) -> *mut RmomState {
    let c = CString::new(s).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { rmom_state_from_json(c.as_ptr(), &mut out) };
    assert_eq!(st, RmomStatus::Ok, "{}", last_error());
    out
}

#[test]
fn bell_from_matrix_reports_known_values() {
    let dims = [2usize, 2];
    let mut re = [0.0; 16];
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        re[i * 4 + j] = 0.5;
    }
    let mut s = ptr::null_mut();
    let st = unsafe { rmom_state_from_matrix(dims.as_ptr(), 2, re.as_ptr(), ptr::null(), &mut s) };
    assert_eq!(st, RmomStatus::Ok);

    let (mut dim, mut n) = (0, 0);
    assert_eq!(unsafe { rmom_state_shape(s, &mut dim, &mut n) }, RmomStatus::Ok);
    assert_eq!((dim, n), (4, 2));

    let (mut s2, mut s4) = (0.0, 0.0);
    assert_eq!(unsafe { rmom_moments(s, &mut s2, &mut s4) }, RmomStatus::Ok);
    assert!((s2 - 3.0).abs() < 1e-12 && (s4 - 5.0).abs() < 1e-12);

    let mut x = 0.0;
    assert_eq!(unsafe { rmom_ppt_min_eig(s, &mut x) }, RmomStatus::Ok);
    assert!((x + 0.5).abs() < 1e-12);
    assert_eq!(unsafe { rmom_ccnr_norm(s, &mut x) }, RmomStatus::Ok);
    assert!((x - 2.0).abs() < 1e-12);
    assert_eq!(unsafe { rmom_dv_norm(s, &mut x) }, RmomStatus::Ok);
    assert!((x - 3.0).abs() < 1e-12);

    let mut a = [0.0; 3];
    let mut w = 0;
    assert_eq!(unsafe { rmom_sector_lengths(s, a.as_mut_ptr(), 3, &mut w) }, RmomStatus::Ok);
    assert_eq!(w, 3);
    assert!((a[0] - 1.0).abs() < 1e-12 && a[1].abs() < 1e-12 && (a[2] - 3.0).abs() < 1e-12);
    unsafe { rmom_state_free(s) };
}

#[test]
fn sector_buffer_size_is_reported() {
    let s = from_json(r#"{"name":"ghz"}"#);
    let mut a = [0.0; 2];
    let mut w = 0;
    let st = unsafe { rmom_sector_lengths(s, a.as_mut_ptr(), 2, &mut w) };
    assert_eq!(st, RmomStatus::BufferTooSmall);
    assert_eq!(w, 4);
    unsafe { rmom_state_free(s) };
}

#[test]
fn errors_set_status_and_message() {
    let dims = [2usize, 2];
    let mut re = [0.0; 16];
    re[0] = 2.0;
    re[5] = -1.0;
    let mut s = ptr::null_mut();
    let st = unsafe { rmom_state_from_matrix(dims.as_ptr(), 2, re.as_ptr(), ptr::null(), &mut s) };
    assert_eq!(st, RmomStatus::Numerical);
    assert!(s.is_null());
    assert!(last_error().contains("positive semidefinite"), "{}", last_error());

    let bad = CString::new(r#"{"name":"nope"}"#).unwrap();
    assert_eq!(unsafe { rmom_state_from_json(bad.as_ptr(), &mut s) }, RmomStatus::Usage);
    assert!(last_error().contains("unknown state"));

    let mut x = 0.0;
    assert_eq!(unsafe { rmom_ppt_min_eig(ptr::null(), &mut x) }, RmomStatus::NullPointer);
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(unsafe { rmom_sep_region(1.5, 3, &mut lo, &mut hi) }, RmomStatus::Usage);
    assert_eq!(unsafe { rmom_sep_region(1.0, 3, &mut lo, &mut hi) }, RmomStatus::Ok);
    assert!(last_error().is_empty());
    assert!((lo - 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
}

#[test]
fn analyze_json_round_trips() {
    let s = from_json(r#"{"name":"cross_hatch"}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rmom_analyze_json(s, &mut out) }, RmomStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { rmom_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["overall"], "bound_entangled_candidate");
    unsafe { rmom_state_free(s) };
}

#[test]
fn mc_moments_are_seeded() {
    let s = from_json(r#"{"name":"isotropic","params":{"p":0.5,"d":3}}"#);
    let (mut a, mut b) = ([0.0; 4], [0.0; 4]);
    assert_eq!(unsafe { rmom_mc_moments(s, 2000, 7, a.as_mut_ptr()) }, RmomStatus::Ok);
    assert_eq!(unsafe { rmom_mc_moments(s, 2000, 7, b.as_mut_ptr()) }, RmomStatus::Ok);
    assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
    assert!(a[1] > 0.0 && a[3] > 0.0);
    assert_eq!(unsafe { rmom_mc_moments(s, 10, 7, a.as_mut_ptr()) }, RmomStatus::Usage);
    unsafe { rmom_state_free(s) };
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <math.h>
#include "rmom.h"
int main(void) {
    RmomState *s = NULL;
    if (rmom_state_from_json("{\"name\":\"bell\"}", &s) != RMOM_STATUS_OK) return 10;
    double s2 = 0, s4 = 0;
    if (rmom_moments(s, &s2, &s4) != RMOM_STATUS_OK) return 11;
    rmom_state_free(s);
    if (fabs(s2 - 3.0) > 1e-12 || fabs(s4 - 5.0) > 1e-12) return 12;
    if (rmom_state_from_json("{\"name\":\"nope\"}", &s) != RMOM_STATUS_USAGE) return 13;
    printf("%s\n", rmom_last_error());
    return 0;
}
"#;

/// Compiles a small C program against the generated header and static library.
#[test]
fn header_compiles_and_links_from_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler, skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // test binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("librmom_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let tmp = std::env::temp_dir().join(format!("rmom_c_abi_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = tmp.join("main");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).contains("unknown state"));
    let _ = std::fs::remove_dir_all(&tmp);
}
