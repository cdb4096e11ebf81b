use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "soliton.h"

int main(void) {
    SolitonWing *w = NULL;
    if (soliton_wing_solve(1, 1.0, 1e-10, 20.0, &w) != SOLITON_STATUS_INVALID_PARAMETER || w != NULL) return 10;
    if (strlen(soliton_last_error()) == 0) return 11;
    if (soliton_wing_solve(2, 1.0, 1e-10, 20.0, &w) != SOLITON_STATUS_OK) return 12;
    double r_star = 0.0, depth = 0.0;
    if (soliton_wing_turning(w, &r_star, &depth) != SOLITON_STATUS_OK) return 13;
    SolitonCurve *lower = NULL;
    if (soliton_wing_branch(w, SOLITON_BRANCH_LOWER, &lower) != SOLITON_STATUS_OK) return 14;
    size_t len = 0;
    soliton_curve_len(lower, &len);
    SolitonSample first;
    if (soliton_curve_sample(lower, 0, &first) != SOLITON_STATUS_OK) return 15;
    if (soliton_curve_sample(lower, len, &first) != SOLITON_STATUS_RANGE) return 16;
    SolitonBoundResult res;
    if (soliton_bound_check(w, 0, 20.0, 1e-8, &res) != SOLITON_STATUS_OK || !res.passed) return 17;
    SolitonSign sign;
    double lo, hi;
    if (soliton_subsol_verdict(2, 0, 1, &sign, &lo, &hi) != SOLITON_STATUS_OK) return 18;
    if (sign != SOLITON_SIGN_CHANGE || !(lo < 0.6590 && hi > 0.6589)) return 19;
    if (soliton_wing_turning(NULL, &r_star, &depth) != SOLITON_STATUS_NULL_POINTER) return 20;
    printf("%.6f %.6f %zu %s\n", r_star, depth, len, soliton_bound_name(0));
    soliton_curve_free(lower);
    soliton_wing_free(w);
    return 0;
}
"#;

// The archive built alongside this test sits next to the test binary in deps/.
fn static_library() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps.to_path_buf(), deps.parent().unwrap().to_path_buf()]
        .into_iter()
        .map(|d| d.join("libsoliton_ffi.a"))
        .find(|p| p.exists())
        .expect("libsoliton_ffi.a not built")
}

#[test]
fn c_program_links_against_static_library() {
    let lib = static_library();
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = tmp.join("abi_check.c");
    let bin = tmp.join("abi_check");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler");
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[3], "PHI_ENVELOPE");
    let r_star: f64 = fields[0].parse().unwrap();
    assert!((r_star - 1.846498).abs() < 1e-5, "{text}");
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/soliton.h"),
    )
    .unwrap();
    for name in [
        "typedef struct SolitonWing SolitonWing;",
        "typedef struct SolitonCurve SolitonCurve;",
        "SOLITON_STATUS_OK = 0",
        "soliton_wing_solve(",
        "soliton_wing_free(",
        "soliton_curve_free(",
        "soliton_last_error(",
        "soliton_subsol_verdict(",
        "soliton_funnel_walls(",
    ] {
        assert!(header.contains(name), "{name}");
    }
}
