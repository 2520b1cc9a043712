//! End-to-end tests of the binary: subcommand behavior, report shape, exit
//! codes (0 verified / 1 violated-or-no-lift / 2 parse-or-precondition), and
//! determinism of reports.

use std::process::Command;

fn run(args: &[&str]) -> (String, i32) {
    let output = Command::new(env!("CARGO_BIN_EXE_gaschutz"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8(output.stdout).expect("utf8 report"),
        output.status.code().expect("exit code"),
    )
}

fn field<'a>(report: &'a str, key: &str) -> Option<&'a str> {
    report.lines().find_map(|line| {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(": "))
    })
}

#[test]
fn dgen_reports_minimal_generators() {
    let (report, code) = run(&["dgen", "klein"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "dgen"), Some("2"));
    assert_eq!(field(&report, "exit"), Some("0"));

    let (report, code) = run(&["dgen", "sym:4"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "dgen"), Some("2"));
}

#[test]
fn dgen_accepts_explicit_cycle_notation() {
    let (report, code) = run(&["dgen", "(1 2); (1 2 3)"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "order"), Some("6"));
    assert_eq!(field(&report, "dgen"), Some("2"));
}

#[test]
fn phi_brute_and_recursive_agree() {
    let (report, code) = run(&[
        "phi", "cyclic:4", "cyclic:2", "g1 -> g1", "1", "--method", "both",
    ]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "phi-min"), Some("2"));
    assert_eq!(field(&report, "phi-max"), Some("2"));
    assert_eq!(field(&report, "method-mismatches"), Some("0"));
    assert_eq!(field(&report, "phi-constant"), Some("true"));
}

#[test]
fn lift_finds_and_reports_the_witness() {
    let (report, code) = run(&["lift", "cyclic:4", "cyclic:2", "g1 -> g1", "g1"]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "outcome"), Some("lift-found"));
    assert_eq!(field(&report, "lift-indices"), Some("1"));
}

#[test]
fn lift_reports_obstruction_with_exit_one() {
    // No single element of the Klein group lifts a generator of Z/2 to a
    // generating tuple.
    let (report, code) = run(&["lift", "klein", "cyclic:2", "g1 -> g1; g2 -> g1", "g1"]);
    assert_eq!(code, 1);
    assert_eq!(field(&report, "outcome"), Some("no-generating-lift"));
}

#[test]
fn verify_gaschutz_verifies_dihedral_over_klein() {
    // Dihedral of order 8 onto its central quotient.
    let (report, code) = run(&[
        "verify-gaschutz",
        "dihedral:8",
        "klein",
        "g1 -> g1; g2 -> g2",
        "2",
    ]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "outcome"), Some("verified"));
    assert_eq!(field(&report, "phi-constant"), Some("true"));
    assert_eq!(field(&report, "violations"), Some("0"));
}

#[test]
fn verify_gaschutz_rejects_n_below_dgen() {
    let (report, code) = run(&[
        "verify-gaschutz",
        "klein",
        "cyclic:2",
        "g1 -> g1; g2 -> g1",
        "1",
    ]);
    assert_eq!(code, 2);
    assert_eq!(field(&report, "outcome"), Some("error"));
}

#[test]
fn gas_rank_examples() {
    let (report, code) = run(&["gas-rank", "cyclic:4"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "gas-rank"), Some("1"));

    let (report, code) = run(&["gas-rank", "klein"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "gas-rank"), Some("2"));
}

#[test]
fn kronecker_exit_codes_follow_the_verdict() {
    let (report, code) = run(&["kronecker", "--dim", "1", "--basis", "1", "--points", "b1"]);
    assert_eq!(code, 0);
    assert_eq!(field(&report, "generates"), Some("true"));

    let (report, code) = run(&["kronecker", "--dim", "1", "--basis", "1", "--points", "1/2"]);
    assert_eq!(code, 1);
    assert_eq!(field(&report, "generates"), Some("false"));
    assert!(field(&report, "witness-lambda").is_some());
}

#[test]
fn counterexample_single_block_is_fully_obstructed() {
    let (report, code) = run(&["counterexample", "--n", "1", "--sizes", "1", "--basis", "1"]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "instantiations-valid"), Some("100"));
    assert_eq!(field(&report, "ambient-lift"), Some("obstructed"));
    assert_eq!(field(&report, "fresh-symbol-lift-generates"), Some("true"));
    assert_eq!(field(&report, "outcome"), Some("certified"));
}

#[test]
fn tower_reports_level_cardinalities() {
    let (report, code) = run(&["tower", "--family", "cyclic:2:3", "--n", "1"]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "level-orders"), Some("2,4,8"));
    assert_eq!(field(&report, "deepest-lift"), Some("1"));
    assert_eq!(
        field(&report, "level-3"),
        Some("order=8 kernel=4 shifts=4 generating=4")
    );
}

#[test]
fn snf_reads_the_matrix_file_format() {
    let dir = std::env::temp_dir().join("gaschutz-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("matrix.txt");
    std::fs::write(&path, "2 2\n2 0\n0 3\n").unwrap();
    let (report, code) = run(&["snf", path.to_str().unwrap()]);
    assert_eq!(code, 0, "report: {report}");
    assert_eq!(field(&report, "invariant-factors"), Some("1,6"));
    assert_eq!(field(&report, "remultiplication"), Some("true"));

    let (_, code) = run(&["snf", "/nonexistent/matrix.txt"]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_exit_two() {
    let (report, code) = run(&["dgen", "nosuchfamily:3"]);
    assert_eq!(code, 2);
    assert_eq!(field(&report, "outcome"), Some("error"));

    let (_, code) = run(&["zlift", "--modulus", "abc", "--generator", "2"]);
    assert_eq!(code, 2);

    // An ill-defined homomorphism is a precondition failure.
    let (_, code) = run(&["lift", "cyclic:2", "cyclic:4", "g1 -> g1", "g1"]);
    assert_eq!(code, 2);

    let (_, code) = run(&["tower", "--family", "cyclic:4:2", "--n", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_two() {
    let output = Command::new(env!("CARGO_BIN_EXE_gaschutz"))
        .args(["zlift", "--modulus", "5"])
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn cap_override_is_honored() {
    let (report, code) = run(&["--cap", "4", "dgen", "sym:4"]);
    assert_eq!(code, 2);
    assert!(report.contains("order cap"));

    let (_, code) = run(&["dgen", "sym:4"]);
    assert_eq!(code, 0);
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "counterexample",
        "--n",
        "2",
        "--sizes",
        "1,2",
        "--basis",
        "3",
    ];
    let (first, code_first) = run(&args);
    let (second, code_second) = run(&args);
    assert_eq!(first, second);
    assert_eq!(code_first, code_second);
}
