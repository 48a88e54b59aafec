use conecyl_ffi::*;
use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(conecyl_last_error()) }.to_string_lossy().into_owned()
}

fn generated(family: &str, options: &str) -> *mut ConecylSpec {
    let (f, o) = (CString::new(family).unwrap(), CString::new(options).unwrap());
    let mut spec = ptr::null_mut();
    let st = unsafe { conecyl_spec_generate(f.as_ptr(), o.as_ptr(), &mut spec) };
    assert_eq!(st, ConecylStatus::Ok, "{}", last_error());
    spec
}

#[test]
fn parse_errors_carry_position() {
    let text = CString::new("params s, t;\nambient 4;\nmap [s +, t, s, t];\n").unwrap();
    let mut spec = ptr::null_mut();
    let st = unsafe { conecyl_spec_parse(text.as_ptr(), &mut spec) };
    assert_eq!(st, ConecylStatus::Parse);
    assert!(spec.is_null());
    assert!(last_error().starts_with("3:9"), "{}", last_error());
}

#[test]
fn unknown_family_and_null_arguments() {
    let f = CString::new("torus").unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(
        unsafe { conecyl_spec_generate(f.as_ptr(), ptr::null(), &mut spec) },
        ConecylStatus::UnknownFamily
    );
    assert_eq!(unsafe { conecyl_spec_parse(ptr::null(), &mut spec) }, ConecylStatus::NullPointer);
    unsafe { conecyl_spec_free(ptr::null_mut()) };
    unsafe { conecyl_string_free(ptr::null_mut()) };
}

#[test]
fn dsl_round_trips_through_handles() {
    let spec = generated("isotropic", "n=3 c0=2");
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { conecyl_spec_to_dsl(spec, &mut text) }, ConecylStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { conecyl_spec_parse(text, &mut again) }, ConecylStatus::Ok);
    let mut text2 = ptr::null_mut();
    unsafe { conecyl_spec_to_dsl(again, &mut text2) };
    assert_eq!(unsafe { CStr::from_ptr(text) }, unsafe { CStr::from_ptr(text2) });
    let (mut n, mut k) = (0, 0);
    unsafe { conecyl_spec_dims(again, &mut n, &mut k) };
    assert_eq!((n, k), (3, 5));
    unsafe {
        conecyl_string_free(text);
        conecyl_string_free(text2);
        conecyl_spec_free(spec);
        conecyl_spec_free(again);
    }
}

#[test]
fn jet_layout_matches_closed_form() {
    let text = CString::new("params u, v;\nambient 4;\nmap [u*u*v, sin(v), u, 1];\n").unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { conecyl_spec_parse(text.as_ptr(), &mut spec) }, ConecylStatus::Ok);
    let p = [0.5, 0.3];
    let (mut value, mut first, mut second) = ([0.0; 4], [0.0; 8], [0.0; 16]);
    let st = unsafe {
        conecyl_eval_jet2(spec, p.as_ptr(), 2, value.as_mut_ptr(), 4, first.as_mut_ptr(), 8, second.as_mut_ptr(), 16)
    };
    assert_eq!(st, ConecylStatus::Ok);
    assert_eq!(value, [0.075, 0.3f64.sin(), 0.5, 1.0]);
    assert_eq!(&first[..4], &[0.3, 0.25, 0.0, 0.3f64.cos()]);
    assert_eq!(&second[..4], &[0.6, 1.0, 1.0, 0.0]);
    assert_eq!(second[7], -(0.3f64.sin()));

    let st = unsafe {
        conecyl_eval_jet2(spec, p.as_ptr(), 2, value.as_mut_ptr(), 4, first.as_mut_ptr(), 8, second.as_mut_ptr(), 15)
    };
    assert_eq!(st, ConecylStatus::BufferTooSmall);
    let st = unsafe {
        conecyl_eval_jet2(spec, p.as_ptr(), 1, value.as_mut_ptr(), 4, first.as_mut_ptr(), 8, second.as_mut_ptr(), 16)
    };
    assert_eq!(st, ConecylStatus::Dimension);
    unsafe { conecyl_spec_free(spec) };
}

#[test]
fn point_summary_of_pseudo_umbilical_surface() {
    let spec = generated("pseudo_umbilical_surface", "c1=1");
    let p = [1.0, 0.4];
    let mut s = std::mem::MaybeUninit::<ConecylPointSummary>::uninit();
    assert_eq!(
        unsafe { conecyl_analyze_point(spec, p.as_ptr(), 2, 0.0, 0.0, s.as_mut_ptr()) },
        ConecylStatus::Ok
    );
    let s = unsafe { s.assume_init() };
    // profile s + 1: alpha = 1/(s+1), flat and pseudo-umbilical
    assert!((s.alpha - 0.5).abs() < 1e-12);
    assert!(s.gauss_curvature.abs() < 1e-6);
    assert!(s.max_residual < 1e-6);
    let want = CONECYL_FLAG_PSEUDO_UMBILICAL | CONECYL_FLAG_ISOTROPIC | CONECYL_FLAG_FLAT;
    assert_eq!(s.flags & want, want);
    assert_eq!(s.flags & (CONECYL_FLAG_INCONSISTENT | CONECYL_FLAG_TOTALLY_UMBILICAL), 0);
    unsafe { conecyl_spec_free(spec) };
}

#[test]
fn off_cylinder_point_is_not_admissible() {
    let text = CString::new("params s, t;\nambient 4;\nmap [2*s + 3, s*cos(t), s*sin(t), s];\n").unwrap();
    let mut spec = ptr::null_mut();
    unsafe { conecyl_spec_parse(text.as_ptr(), &mut spec) };
    let mut s = std::mem::MaybeUninit::<ConecylPointSummary>::uninit();
    let st = unsafe { conecyl_analyze_point(spec, [0.5, 0.1].as_ptr(), 2, 0.0, 0.0, s.as_mut_ptr()) };
    assert_eq!(st, ConecylStatus::NotAdmissible);
    assert!(!last_error().is_empty());
    unsafe { conecyl_spec_free(spec) };
}

#[test]
fn grid_json_matches_library_report() {
    let spec = generated("product", "");
    let counts = [3usize, 4];
    let mut out = ptr::null_mut();
    let st = unsafe { conecyl_analyze_grid_json(spec, counts.as_ptr(), 2, 0.0, 0.0, 0, &mut out) };
    assert_eq!(st, ConecylStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { conecyl_string_free(out) };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["per_point"].as_array().unwrap().len(), 12);
    assert_eq!(v["aggregate"]["flags"]["alpha_zero"], "all");

    let st = unsafe { conecyl_analyze_grid_json(spec, counts.as_ptr(), 1, 0.0, 0.0, 0, &mut out) };
    assert_eq!(st, ConecylStatus::Dimension);
    unsafe { conecyl_spec_free(spec) };
}

#[test]
fn header_declares_the_exported_api() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/conecyl.h")).unwrap();
    let src = std::fs::read_to_string(dir.join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 10);
    for f in exported {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct ConecylSpec ConecylSpec;"));
    assert!(header.contains("CONECYL_STATUS_OK = 0"));
}

const C_PROGRAM: &str = r#"
#include "conecyl.h"
#include <stdio.h>
#include <string.h>

int main(void) {
    ConecylSpec *spec = NULL;
    if (conecyl_spec_generate("example61", NULL, &spec) != CONECYL_STATUS_OK) return 10;
    double p[2] = {1.0, 0.25};
    ConecylPointSummary s;
    if (conecyl_analyze_point(spec, p, 2, 0.0, 0.0, &s) != CONECYL_STATUS_OK) return 11;
    if (!(s.flags & CONECYL_FLAG_PSEUDO_UMBILICAL)) return 12;
    conecyl_spec_free(spec);
    if (conecyl_spec_parse("map [", &spec) != CONECYL_STATUS_PARSE) return 13;
    if (strlen(conecyl_last_error()) == 0) return 14;
    printf("%s\n", conecyl_version());
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let Some(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let target = std::env::var_os("CARGO_TARGET_DIR")
        .map(Into::into)
        .unwrap_or_else(|| manifest.join("../../target"));
    let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
    let lib = target.join(profile).join("libconecyl_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let tmp = tmp.path();
    let src = tmp.join("smoke.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let exe = tmp.join("smoke");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}

fn which_cc() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
}
