//! End-to-end tests of the `bilinear` binary: every subcommand is exercised
//! through real processes, and printed witnesses are replayed through
//! `verify certificate` in a fresh process to confirm they stand on their own.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilinear"))
        .args(args)
        .output()
        .expect("the binary launches")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(output),
        stderr_of(output)
    );
}

/// The checked-in fixtures are in canonical form: parsing and re-rendering
/// them reproduces the files byte for byte.
#[test]
fn fixtures_are_canonical() {
    let sys_path = fixture("golden.sys");
    let named = bilinear_cli::format::read_system(&sys_path).unwrap();
    assert_eq!(
        bilinear_cli::format::render_system(&named),
        fs::read_to_string(&sys_path).unwrap()
    );
    for name in ["fib_a.mat", "fib_b.mat", "nilpotent_a.mat", "nilpotent_b.mat"] {
        let mat_path = fixture(name);
        let matrix = bilinear_cli::format::read_matrix(&mat_path).unwrap();
        assert_eq!(
            bilinear_cli::format::render_matrix(&matrix),
            fs::read_to_string(&mat_path).unwrap()
        );
    }
}

#[test]
fn growth_prints_fibonacci_for_the_golden_system() {
    let output = run(&["growth", fixture("golden.sys").to_str().unwrap(), "--n", "8"]);
    assert_exit(&output, 0);
    let stdout = stdout_of(&output);
    for (n, g) in [(1, 1), (2, 2), (3, 3), (4, 5), (5, 8), (6, 13), (7, 21), (8, 34)] {
        assert!(
            stdout.contains(&format!("\n{n}\t{g}\t≈")),
            "missing g({n}) = {g} in:\n{stdout}"
        );
    }
}

#[test]
fn jsr_embedding_pipes_into_growth() {
    let output = run(&[
        "embed",
        "jsr",
        fixture("fib_a.mat").to_str().unwrap(),
        fixture("fib_b.mat").to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("jsr.sys");
    fs::write(&sys, stdout_of(&output)).unwrap();

    let growth = run(&["growth", sys.to_str().unwrap(), "--n", "6"]);
    assert_exit(&growth, 0);
    let stdout = stdout_of(&growth);
    // Sizes that cannot be decomposed into the embedding's phases give zero.
    assert!(stdout.contains("\n4\t0\t"), "expected g(4) = 0 in:\n{stdout}");
    assert!(stdout.contains("\n5\t0\t"), "expected g(5) = 0 in:\n{stdout}");
    assert!(stdout.contains("\n6\t"), "expected a g(6) row in:\n{stdout}");
}

#[test]
fn mortality_zero_witness_replays_in_a_fresh_process() {
    let output = run(&[
        "embed",
        "mortality",
        fixture("nilpotent_a.mat").to_str().unwrap(),
        fixture("nilpotent_b.mat").to_str().unwrap(),
    ]);
    assert_exit(&output, 0);
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("mortality.sys");
    fs::write(&sys, stdout_of(&output)).unwrap();

    let zero = run(&["zero", sys.to_str().unwrap(), "--n-max", "6"]);
    assert_exit(&zero, 0);
    let stdout = stdout_of(&zero);
    let line = stdout.lines().next().expect("a witness line");
    let witness = line
        .strip_prefix("zero at n=6: ")
        .unwrap_or_else(|| panic!("expected a zero witness at n=6, got: {line}"));

    let replay = run(&[
        "verify",
        "certificate",
        sys.to_str().unwrap(),
        "--zero",
        witness,
    ]);
    assert_exit(&replay, 0);
    assert!(stdout_of(&replay).starts_with("PASS"));
}

#[test]
fn decide_prints_a_replayable_pattern_witness() {
    let golden = fixture("golden.sys");
    let output = run(&[
        "decide",
        golden.to_str().unwrap(),
        "--theta",
        "1",
        "--budget",
        "1000",
    ]);
    assert_exit(&output, 0);
    let stdout = stdout_of(&output);
    let mut lines = stdout.lines();
    assert_eq!(
        lines.next(),
        Some("GREATER: pattern |P|=2, M[1,1]=2 > 1"),
        "full output:\n{stdout}"
    );
    let pattern = lines
        .next()
        .and_then(|line| line.strip_prefix("pattern: "))
        .expect("a pattern line");

    let replay = run(&[
        "verify",
        "certificate",
        golden.to_str().unwrap(),
        "--pattern",
        pattern,
        "--index",
        "1",
        "--at-least",
        "2",
    ]);
    assert_exit(&replay, 0);
    assert!(stdout_of(&replay).starts_with("PASS"));
}

#[test]
fn decide_reports_unresolved_with_exit_one_when_the_budget_is_tiny() {
    let output = run(&[
        "decide",
        fixture("golden.sys").to_str().unwrap(),
        "--theta",
        "3/2",
        "--budget",
        "4",
    ]);
    assert_exit(&output, 1);
    assert!(stdout_of(&output).starts_with("UNRESOLVED"));
}

#[test]
fn bounds_prints_a_certified_sandwich() {
    let output = run(&[
        "bounds",
        fixture("golden.sys").to_str().unwrap(),
        "--pattern-size",
        "8",
        "--cert-depth",
        "4",
    ]);
    assert_exit(&output, 0);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("≤ λ ≤"), "no sandwich in:\n{stdout}");
    assert!(stdout.contains('≈'), "floats must be marked in:\n{stdout}");
    assert!(stdout.contains("weight certificate"), "missing certificate line in:\n{stdout}");
}

#[test]
fn weight_certificates_verify_or_fail_with_exit_codes() {
    let golden = fixture("golden.sys");
    let good = run(&[
        "verify",
        "certificate",
        golden.to_str().unwrap(),
        "--weight",
        "2,1",
        "--gamma",
        "2",
    ]);
    assert_exit(&good, 0);
    assert!(stdout_of(&good).starts_with("PASS"));

    let bad = run(&[
        "verify",
        "certificate",
        golden.to_str().unwrap(),
        "--weight",
        "1,1",
        "--gamma",
        "1",
    ]);
    assert_exit(&bad, 1);
    assert!(stdout_of(&bad).starts_with("FAIL"));
}

#[test]
fn ensure_limit_warns_exactly_when_the_rate_is_not_certified() {
    let golden = fixture("golden.sys");
    let high = run(&[
        "transform",
        "ensure-limit",
        golden.to_str().unwrap(),
        "--alpha",
        "3",
    ]);
    assert_exit(&high, 0);
    assert!(
        stderr_of(&high).contains("warning"),
        "α = 3 exceeds the golden growth rate and must warn"
    );

    let low = run(&[
        "transform",
        "ensure-limit",
        golden.to_str().unwrap(),
        "--alpha",
        "1",
    ]);
    assert_exit(&low, 0);
    assert!(
        !stderr_of(&low).contains("warning"),
        "α = 1 is certified by a size-1 pattern; stderr:\n{}",
        stderr_of(&low)
    );

    // The printed transform parses and runs.
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("limit.sys");
    fs::write(&sys, stdout_of(&low)).unwrap();
    let growth = run(&["growth", sys.to_str().unwrap(), "--n", "4"]);
    assert_exit(&growth, 0);
}

#[test]
fn malformed_files_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("broken.sys");
    fs::write(&sys, "{ this is not a system file").unwrap();
    let output = run(&["growth", sys.to_str().unwrap(), "--n", "2"]);
    assert_exit(&output, 2);
    assert!(stderr_of(&output).starts_with("error:"));
}

#[test]
fn congruence_verifier_passes_on_the_doubled_golden_system() {
    let output = run(&[
        "verify",
        "congruences",
        fixture("golden.sys").to_str().unwrap(),
        "--n-max",
        "8",
    ]);
    assert_exit(&output, 0);
    assert!(stdout_of(&output).starts_with("PASS"));
}

#[test]
fn insert_zero_odd_verifier_passes_on_the_golden_system() {
    let output = run(&[
        "verify",
        "insert-zero-odd",
        fixture("golden.sys").to_str().unwrap(),
        "--m-max",
        "4",
    ]);
    assert_exit(&output, 0);
    assert!(stdout_of(&output).starts_with("PASS"));
}

#[test]
fn buffer_analysis_verifier_passes_on_the_fibonacci_pair() {
    let output = run(&[
        "verify",
        "buffer-analysis",
        fixture("fib_a.mat").to_str().unwrap(),
        fixture("fib_b.mat").to_str().unwrap(),
        "--n-max",
        "6",
    ]);
    assert_exit(&output, 0);
    let stdout = stdout_of(&output);
    assert!(stdout.contains("PASS"), "expected a pass in:\n{stdout}");
}
