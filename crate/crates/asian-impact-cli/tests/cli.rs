//! End-to-end checks of the compiled binary: exit codes, error messages,
//! config layering, and the shape of every output format.

use std::io::Write as _;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asian-impact"))
        .args(args)
        .output()
        .expect("binary failed to spawn")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("process was killed by a signal")
}

const BASE: &[&str] = &[
    "--s0", "100", "--strike", "100", "--up", "1.2", "--down", "0.8", "--rate", "1.05",
];

fn with_base(front: &[&str], extra: &[&str]) -> Vec<String> {
    front
        .iter()
        .chain(BASE.iter())
        .chain(extra.iter())
        .map(ToString::to_string)
        .collect()
}

fn run_with_base(front: &[&str], extra: &[&str]) -> Output {
    let args = with_base(front, extra);
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&args)
}

#[test]
fn price_reports_the_two_step_reference() {
    let output = run_with_base(&["price"], &["--steps", "2"]);
    assert_eq!(code(&output), 0);
    let report = stdout(&output);
    assert!(report.contains("method = enum"));
    assert!(report.contains("u_adj = 1.2"));
    assert!(report.contains("d_adj = 0.8"));
    assert!(report.contains("geometric_price = 7.142847795"));
    assert!(report.contains("arith_exact = 7.661640095"));
}

#[test]
fn arbitrage_violation_exits_three_and_names_the_cure() {
    let output = run_with_base(
        &["price"],
        &["--rate-convention", "per-step", "--steps", "2", "--lambda", "1", "--vu", "1", "--vd", "-1"],
    );
    assert_eq!(code(&output), 3);
    let message = stderr(&output);
    assert!(message.contains("d_adj <= r_step fails"), "got: {message}");
    assert!(message.contains("d_adj = 2.174625463"));
    assert!(message.contains("v_u >= -0.1335313926"));
    assert!(message.contains("v_d >= -0.2719337155"));
}

#[test]
fn cap_exceeded_exits_four() {
    let output = run_with_base(&["price"], &["--steps", "25", "--method", "enum"]);
    assert_eq!(code(&output), 4);
    assert!(stderr(&output).contains("cap"));
}

#[test]
fn validation_failures_exit_two() {
    let output = run(&[
        "price", "--s0", "100", "--strike", "100", "--up", "1.2", "--down", "1.4", "--rate",
        "1.05", "--steps", "4",
    ]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).contains("u must exceed d"));

    let output = run(&["price", "--s0", "100"]);
    assert_eq!(code(&output), 2);
    let message = stderr(&output);
    for key in ["strike", "u", "d", "rate", "n"] {
        assert!(message.contains(key), "missing-parameter list lacks {key}: {message}");
    }
}

#[test]
fn unknown_config_key_is_fatal_and_lists_alternatives() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "uu = 1.2").unwrap();
    let path = file.path().to_str().unwrap();
    let output = run(&["price", "--config", path]);
    assert_eq!(code(&output), 2);
    let message = stderr(&output);
    assert!(message.contains("unknown key `uu`"));
    assert!(message.contains("valid keys"));
    assert!(message.contains("rate_convention"));
}

#[test]
fn config_type_error_names_key_value_and_line() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# lattice size").unwrap();
    writeln!(file, "n = 2.5").unwrap();
    let path = file.path().to_str().unwrap();
    let output = run(&["price", "--config", path]);
    assert_eq!(code(&output), 2);
    let message = stderr(&output);
    assert!(message.contains("line 2"));
    assert!(message.contains("`n`"));
    assert!(message.contains("`2.5`"));
}

#[test]
fn config_file_supplies_values_and_cli_flags_override() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        "s0 = 100\nstrike = 100\nu = 1.2\nd = 0.8\nrate = 1.05\nn = 4\nlambda = 0.1\nvu = 1.3\nvd = 1.0\n"
    )
    .unwrap();
    let path = file.path().to_str().unwrap();

    let from_file = run(&["price", "--config", path]);
    assert_eq!(code(&from_file), 0);

    let overridden = run(&["price", "--config", path, "--lambda", "0.2"]);
    assert_eq!(code(&overridden), 0);

    let direct = run_with_base(
        &["price"],
        &["--steps", "4", "--lambda", "0.2", "--vu", "1.3", "--vd", "1.0"],
    );
    assert_eq!(stdout(&overridden), stdout(&direct));
    assert_ne!(stdout(&from_file), stdout(&overridden));
}

#[test]
fn region_matches_the_reference_minima() {
    let output = run_with_base(
        &["region"],
        &["--rate-convention", "per-step", "--steps", "1", "--lambda", "0.1", "--vu", "1.3", "--vd", "1.0"],
    );
    assert_eq!(code(&output), 0);
    let report = stdout(&output);
    assert!(report.contains("v_u_min = -1.335313926"));
    assert!(report.contains("v_d_min = -2.719337155"));
    assert!(report.contains("admissible = true"));
}

#[test]
fn region_with_zero_lambda_reports_the_classical_condition() {
    let output = run_with_base(&["region"], &["--steps", "2"]);
    assert_eq!(code(&output), 0);
    let report = stdout(&output);
    assert!(report.contains("lambda = 0"));
    assert!(report.contains("classical condition satisfied = true"));
    assert!(report.contains("non-negative volumes"));
}

#[test]
fn region_and_price_agree_on_an_inadmissible_pair() {
    let flags: &[&str] =
        &["--rate-convention", "per-step", "--steps", "2", "--lambda", "1", "--vu", "1", "--vd", "-1"];
    let region = run_with_base(&["region"], flags);
    assert_eq!(code(&region), 0);
    assert!(stdout(&region).contains("admissible = false"));
    let price = run_with_base(&["price"], flags);
    assert_eq!(code(&price), 3);
}

#[test]
fn sweep_rows_match_single_price_reports_exactly() {
    let sweep = run_with_base(
        &["sweep"],
        &["--steps", "4", "--vu", "1.3", "--vd", "1.0", "--axis", "lambda", "--from", "0.1", "--to", "0.2", "--points", "2"],
    );
    assert_eq!(code(&sweep), 0);
    let csv = stdout(&sweep);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);

    for (lambda, row) in [("0.1", rows[0]), ("0.2", rows[1])] {
        let report = stdout(&run_with_base(
            &["price"],
            &["--steps", "4", "--vu", "1.3", "--vd", "1.0", "--lambda", lambda],
        ));
        let field = |key: &str| {
            report
                .lines()
                .find_map(|l| l.strip_prefix(&format!("{key} = ")))
                .unwrap_or_else(|| panic!("report lacks {key}"))
                .to_string()
        };
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[0], lambda);
        assert_eq!(cells[1], field("u_adj"));
        assert_eq!(cells[2], field("d_adj"));
        assert_eq!(cells[3], field("p_adj"));
        assert_eq!(cells[4], field("geometric_price"));
        assert_eq!(cells[5], field("arith_lower"));
        assert_eq!(cells[6], field("arith_upper_pathwise"));
        assert_eq!(cells[7], field("arith_upper_global"));
        assert_eq!(cells[8], field("arith_exact"));
        assert_eq!(cells[9], "");
    }
}

#[test]
fn sweep_csv_round_trips_and_keeps_bound_order() {
    let output = run_with_base(
        &["sweep"],
        &["--rate-convention", "per-step", "--steps", "4", "--lambda", "1", "--vu", "1", "--axis", "vd", "--from", "-2", "--to", "1", "--points", "7"],
    );
    assert_eq!(code(&output), 0);
    let csv = stdout(&output);
    let mut clean = 0;
    let mut marked = 0;
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 10, "bad cell count in {line}");
        let marker = cells[9];
        if marker.is_empty() {
            clean += 1;
            let parse = |i: usize| cells[i].parse::<f64>().unwrap();
            let (lb, ubp, ubg, exact) = (parse(5), parse(6), parse(7), parse(8));
            let slack = 1e-12 * lb.abs().max(1.0);
            assert!(lb <= exact + slack, "lower bound above exact in {line}");
            assert!(exact <= ubp + slack, "exact above pathwise bound in {line}");
            assert!(ubp <= ubg + slack || ubg.is_infinite(), "pathwise above global in {line}");
        } else {
            marked += 1;
            assert!(
                ["arbitrage_violation", "degenerate_lattice", "cap_exceeded", "overflow", "invalid_input"]
                    .contains(&marker),
                "unexpected marker {marker}"
            );
            assert!(cells[4].is_empty(), "marked row still has a price: {line}");
        }
    }
    assert!(clean >= 2, "sweep found no admissible rows");
    assert!(marked >= 2, "sweep never crossed the boundary");
}

#[test]
fn moneyness_and_maturity_axes_have_their_own_shapes() {
    let moneyness = run_with_base(
        &["sweep"],
        &["--steps", "4", "--axis", "moneyness", "--from", "0.8", "--to", "1.2", "--points", "3"],
    );
    assert_eq!(code(&moneyness), 0);
    let csv = stdout(&moneyness);
    assert!(csv.starts_with("moneyness,u_adj"));
    assert_eq!(csv.lines().count(), 4);

    // --steps is implied by the first maturity point.
    let maturity = run_with_base(
        &["sweep"],
        &["--axis", "maturity", "--from", "2", "--to", "8", "--points", "4"],
    );
    assert_eq!(code(&maturity), 0);
    let csv = stdout(&maturity);
    assert!(csv.starts_with("n,u_adj"));
    let axis: Vec<&str> =
        csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(axis, ["2", "4", "6", "8"]);
}

#[test]
fn sweep_range_validation_exits_two() {
    let bad_points = run_with_base(
        &["sweep"],
        &["--steps", "4", "--axis", "lambda", "--from", "0", "--to", "0.3", "--points", "1"],
    );
    assert_eq!(code(&bad_points), 2);
    assert!(stderr(&bad_points).contains("at least 2 points"));

    let reversed = run_with_base(
        &["sweep"],
        &["--steps", "4", "--axis", "lambda", "--from", "0.3", "--to", "0", "--points", "4"],
    );
    assert_eq!(code(&reversed), 2);

    let missing = run_with_base(&["sweep"], &["--steps", "4", "--from", "0", "--to", "0.3"]);
    assert_eq!(code(&missing), 2);
    let message = stderr(&missing);
    assert!(message.contains("axis") && message.contains("points"), "got: {message}");
}

#[test]
fn benchmark_emits_csv_and_rejects_impact() {
    let output = run_with_base(&["benchmark"], &["--steps", "2", "--n-to", "8"]);
    assert_eq!(code(&output), 0);
    let csv = stdout(&output);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,lattice_price,kv_price,abs_diff,pct_error");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,7.142847795,"));

    let discrete = run_with_base(
        &["benchmark"],
        &["--steps", "2", "--n-to", "8", "--averaging", "discrete"],
    );
    assert_eq!(code(&discrete), 0);
    assert_ne!(stdout(&discrete), csv, "averaging flag must change the benchmark");

    let impacted = run_with_base(&["benchmark"], &["--steps", "2", "--lambda", "0.1"]);
    assert_eq!(code(&impacted), 2);
    assert!(stderr(&impacted).contains("lambda = 0"));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let path_text = path.to_str().unwrap();

    let to_stdout = run_with_base(&["benchmark"], &["--steps", "2", "--n-to", "10"]);
    assert_eq!(code(&to_stdout), 0);

    let to_file = run_with_base(&["benchmark"], &["--steps", "2", "--n-to", "10", "--out", path_text]);
    assert_eq!(code(&to_file), 0);
    assert!(stdout(&to_file).is_empty());

    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, to_stdout.stdout);
}
