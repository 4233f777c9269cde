use std::path::PathBuf;
use std::{env, fs, process, str};

/// Runs `lyalg` from the crate root and compares stdout with `tests/golden/<name>.json`.
/// Set `LYALG_BLESS=1` to rewrite the expected files.
fn golden_test(name: &str, args: &[&str], code: i32) {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out_path = root.join("tests").join("golden").join(format!("{name}.json"));
    let out = process::Command::new(env!("CARGO_BIN_EXE_lyalg"))
        .current_dir(&root)
        .args(args)
        .output()
        .expect("spawn lyalg");
    let actual = str::from_utf8(&out.stdout).expect("invalid UTF-8 in output");
    assert_eq!(
        out.status.code(),
        Some(code),
        "exit code for {name}; stderr:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    if env::var_os("LYALG_BLESS").is_some() {
        fs::write(&out_path, actual).unwrap();
        return;
    }
    assert!(out_path.exists(), "Output should be at {out_path:?}, but is missing");
    let expected = fs::read_to_string(&out_path).unwrap();
    if expected.trim() != actual.trim() {
        panic!("Expected output:\n{expected}\n---\nActual output:\n{actual}\n---");
    }
}

#[test]
fn check_3dim() {
    golden_test("check_3dim", &["check", "fixtures/3dim.json"], 0);
}

#[test]
fn check_broken() {
    golden_test("check_broken", &["check", "fixtures/broken.json"], 1);
}

#[test]
fn derivations_3dim() {
    golden_test("derivations_3dim", &["derivations", "fixtures/3dim.json"], 0);
}

#[test]
fn derivations_crossproduct() {
    golden_test(
        "derivations_crossproduct",
        &["derivations", "fixtures/crossproduct-lie.json"],
        0,
    );
}

#[test]
fn h1_3dim() {
    golden_test("h1_3dim", &["cohomology", "fixtures/3dim.json", "--p", "0"], 0);
}

#[test]
fn h23_3dim() {
    golden_test("h23_3dim", &["cohomology", "fixtures/3dim.json"], 0);
}

#[test]
fn h23_abelian_trivial() {
    golden_test(
        "h23_abelian_trivial",
        &["cohomology", "fixtures/abelian2.json", "--rep", "trivial"],
        0,
    );
}

#[test]
fn h45_meson2() {
    golden_test("h45_meson2", &["cohomology", "fixtures/meson2.json", "--p", "2"], 0);
}

#[test]
fn cohomology_cap() {
    golden_test(
        "cohomology_cap",
        &["cohomology", "fixtures/meson3.json", "--p", "2", "--cap", "100"],
        3,
    );
}

#[test]
fn cohomology_broken_algebra() {
    golden_test("cohomology_broken_algebra", &["cohomology", "fixtures/broken.json"], 1);
}

#[test]
fn rep_check_adjoint() {
    golden_test("rep_check_adjoint", &["rep-check", "fixtures/meson2.json"], 0);
}

#[test]
fn semidirect_trivial() {
    golden_test(
        "semidirect_trivial",
        &["semidirect", "fixtures/abelian2.json", "--rep", "trivial:1"],
        0,
    );
}

#[test]
fn twist_cocycle() {
    golden_test(
        "twist_cocycle",
        &["twist", "fixtures/3dim.json", "--cocycle", "fixtures/3dim-cocycle.json"],
        0,
    );
}

#[test]
fn twist_noncocycle() {
    golden_test(
        "twist_noncocycle",
        &[
            "twist",
            "fixtures/3dim.json",
            "--cocycle",
            "fixtures/3dim-noncocycle.json",
        ],
        1,
    );
}

#[test]
fn bundle_check_exact() {
    golden_test(
        "bundle_check_exact",
        &["bundle-check", "fixtures/circle-bundle.json"],
        0,
    );
}

#[test]
fn bundle_check_float() {
    golden_test(
        "bundle_check_float",
        &[
            "bundle-check",
            "fixtures/circle-bundle.json",
            "--mode",
            "float",
            "--tol",
            "1e-9",
        ],
        0,
    );
}

#[test]
fn bundle_h1() {
    golden_test(
        "bundle_h1",
        &["bundle-cohomology", "fixtures/circle-bundle.json", "--p", "0"],
        0,
    );
}

#[test]
fn bundle_der() {
    golden_test(
        "bundle_der",
        &["bundle-cohomology", "fixtures/circle-bundle.json", "--der"],
        0,
    );
}

#[test]
fn unknown_example() {
    golden_test("unknown_example", &["examples", "nope"], 2);
}

#[test]
fn missing_file() {
    golden_test("missing_file", &["check", "fixtures/missing.json"], 2);
}
