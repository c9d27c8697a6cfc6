//! The generated header declares the exported symbols and compiles as C.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("henonlab.h")
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "hl_map_new",
        "hl_map_from_json",
        "hl_map_free",
        "hl_map_apply",
        "hl_map_apply_inverse",
        "hl_green",
        "hl_periodic_orbits",
        "hl_verify_splitting",
        "hl_verify_hyperbolicity",
        "hl_certificate_recheck",
        "hl_last_error",
        "HL_STATUS_OK",
        "typedef struct HlMap HlMap",
    ] {
        assert!(text.contains(sym), "{sym} missing");
    }
}

const PROGRAM: &str = r#"
#include "henonlab.h"
#include <stdio.h>

int main(void) {
    double re[3] = {-6.0, 0.0, 1.0}, im[3] = {0.0, 0.0, 0.0};
    HlMap *m = NULL;
    if (hl_map_new(re, im, 3, 0.001, 0.0, &m) != HL_STATUS_OK) return 3;
    HlPoint z = {0.3, 0.0, 0.2, 0.0}, w, back;
    if (hl_map_apply(m, &z, &w) != HL_STATUS_OK) return 4;
    if (hl_map_apply_inverse(m, &w, &back) != HL_STATUS_OK) return 5;
    double err = back.x_re - z.x_re;
    if (err > 1e-12 || err < -1e-12) return 6;
    if (hl_map_degree(NULL, NULL) != HL_STATUS_NULL_POINTER) return 7;
    if (hl_last_error() == NULL) return 8;
    hl_map_free(m);
    printf("ok\n");
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    if !have_cc() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .status()
        .unwrap();
    assert!(status.success(), "header does not compile as C");

    // The static library sits next to the deps directory of this test binary.
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().and_then(Path::parent).map(|d| d.join("libhenonlab_ffi.a"));
    let Some(lib) = lib.filter(|l| l.exists()) else {
        eprintln!("static library not found; link step skipped");
        return;
    };
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "link failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
