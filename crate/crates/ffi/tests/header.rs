//! Compiles and runs a C program against the generated header and the static
//! library. Skipped (with a note) when no C compiler is on PATH.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "chevron.h"

int main(void) {
    ChevronParams p;
    if (chevron_params_default(&p) != CHEVRON_STATUS_OK) return 10;
    ChevronSim *sim = NULL;
    if (chevron_sim_new(&p, 16, 16, 1.0, 1.0, CHEVRON_SCHEME_IMEX, 0.0, &sim) != CHEVRON_STATUS_OK) return 11;
    if (chevron_sim_init_single_mode(sim, 1, 1, 0.5) != CHEVRON_STATUS_OK) return 12;
    if (chevron_sim_run(sim, 0.2) != CHEVRON_STATUS_OK) return 13;
    ChevronEnergy e;
    if (chevron_sim_energy(sim, &e) != CHEVRON_STATUS_OK) return 14;
    if (!(e.lyapunov <= e.bound) || fabs(e.t - 0.2) > 1e-12) return 15;
    if (chevron_sim_step(NULL, 1) != CHEVRON_STATUS_NULL_POINTER) return 16;
    if (chevron_last_error_message()[0] == '\0') return 17;
    chevron_sim_free(sim);

    ChevronReducedParams r = {1.0, 0.5, 1.0, 0.25, 0.0};
    ChevronFixedPoint fp[8];
    size_t n = 0;
    if (chevron_fixed_points(CHEVRON_SYSTEM_UNIFORM, &r, fp, 8, &n) != CHEVRON_STATUS_OK || n != 4) return 18;
    if (fp[1].kind != CHEVRON_KIND_SPIRAL_SINK) return 19;
    double chi = 0.0;
    if (chevron_critical_chi(0.6, &chi) != CHEVRON_STATUS_OK || fabs(chi - 1.25) > 1e-14) return 20;
    printf("ok %s\n", chevron_version());
    return 0;
}
"#;

fn cc() -> Option<String> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
        .map(String::from)
}

/// `target/<profile>` directory holding the freshly built static library.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/chevron.h")).unwrap();
    for name in [
        "chevron_sim_new",
        "chevron_sim_free",
        "chevron_sim_run",
        "chevron_sim_energy",
        "chevron_sim_copy_fields",
        "chevron_sim_save_snapshot",
        "chevron_sim_load_snapshot",
        "chevron_fixed_points",
        "chevron_critical_chi",
        "chevron_last_error_message",
        "typedef struct ChevronSim ChevronSim;",
        "CHEVRON_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let lib = lib_dir().join("libchevron_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap();
    assert!(out.status.success(), "compile failed:\n{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}: {}", run.status.code(), String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
