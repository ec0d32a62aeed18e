use std::path::{Path, PathBuf};
use std::process::Command;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/sfvg.h")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header()).expect("build.rs writes include/sfvg.h");
    for name in [
        "SFVG_H",
        "typedef struct SfvgGraph SfvgGraph;",
        "typedef struct SfvgRisk SfvgRisk;",
        "SFVG_STATUS_OK = 0",
        "SFVG_STATUS_BUFFER_TOO_SMALL",
        "SFVG_WEIGHTS_ABSOLUTE",
        "sfvg_graph_new(",
        "sfvg_graph_edges(",
        "sfvg_graph_free(",
        "sfvg_segment_sf(",
        "sfvg_risk_new(",
        "sfvg_risk_values(",
        "sfvg_last_error(",
        "size_t",
    ] {
        assert!(text.contains(name), "header lacks `{name}`");
    }
}

/// Builds the static library, then compiles and runs `tests/smoke.c` against
/// it. Skipped only when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let target = Path::new(env!("CARGO_TARGET_TMPDIR")).join("smoke");
    let status = Command::new(env!("CARGO"))
        .args(["build", "--offline", "-p", "sfvg-ffi", "--lib", "--target-dir"])
        .arg(&target)
        .status()
        .unwrap();
    assert!(status.success(), "building the static library failed");
    let lib = target.join("debug/libsfvg.a");
    let exe = target.join("sfvg_smoke");
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/smoke.c");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "cc failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "edges=4 first=(0,1,2)\nstatus=2 error=unknown weight mode 9\n");
}
