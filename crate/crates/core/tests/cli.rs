//! End-to-end tests of the command-line surface: documented outputs, exit
//! codes, and report-file schemas.

use std::process::{Command, Output};

fn mlaguerre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlaguerre"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn eval_prints_exact_rationals() {
    let out = mlaguerre(&[
        "eval", "--k", "2", "--n", "1,1", "--alpha", "1", "--x", "2,2",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "-2");

    let out = mlaguerre(&["eval", "--k", "1", "--n", "0", "--alpha", "0", "--x", "5"]);
    assert_eq!(stdout(&out).trim(), "1");

    // rational output stays rational
    let out = mlaguerre(&["eval", "--k", "1", "--n", "2", "--alpha", "0", "--x", "1"]);
    assert_eq!(stdout(&out).trim(), "-1/2");
}

#[test]
fn eval_both_methods_agree() {
    let out = mlaguerre(&[
        "eval", "--k", "2", "--n", "1,1", "--alpha", "1", "--x", "2,2", "--method", "both",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, vec!["-2", "-2", "AGREE"]);
}

#[test]
fn eval_decimal_inputs_are_exact() {
    // 0.5 parses as 1/2, so the result is the exact rational at alpha = 1/2
    let out = mlaguerre(&[
        "eval", "--k", "1", "--n", "1", "--alpha", "0.5", "--x", "0.25",
    ]);
    assert_eq!(stdout(&out).trim(), "5/4");
}

#[test]
fn exit_code_2_on_malformed_input() {
    let out = mlaguerre(&["eval", "--k", "2", "--n", "1", "--alpha", "1", "--x", "2,2"]);
    assert_eq!(out.status.code(), Some(2), "length mismatch is usage error");
    let out = mlaguerre(&["eval", "--k", "1", "--n", "1", "--alpha", "x", "--x", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mlaguerre(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2), "clap usage errors exit 2");
}

#[test]
fn exit_code_3_on_domain_and_pole_errors() {
    // alpha = -1 is a pole of the explicit evaluation
    let out = mlaguerre(&["eval", "--k", "1", "--n", "2", "--alpha", "-1", "--x", "1"]);
    assert_eq!(out.status.code(), Some(3));
    // theorem 1 needs alpha > 0 at k = 2
    let out = mlaguerre(&[
        "check",
        "--theorem",
        "1",
        "--k",
        "2",
        "--n",
        "1,1",
        "--alpha",
        "0",
        "--x",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bound_reports_documented_values() {
    let out = mlaguerre(&[
        "bound",
        "--theorem",
        "1",
        "--k",
        "2",
        "--n",
        "1,1",
        "--alpha",
        "1",
        "--x",
        "0,0",
    ]);
    let text = stdout(&out);
    assert!(text.contains("coefficient=4.8000000000000"), "{text}");
    assert!(text.contains("tightness=1.2499999999999"), "{text}");

    let out = mlaguerre(&[
        "bound",
        "--theorem",
        "2",
        "--k",
        "2",
        "--n",
        "1,1",
        "--alpha",
        "1",
        "--x",
        "0,0",
        "--format",
        "json",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let coeff = parsed["coefficient"].as_f64().unwrap();
    assert!((coeff - 67.88225099390857).abs() < 1e-8);
}

#[test]
fn check_passes_szego_case_and_tags_extended_domain() {
    let out = mlaguerre(&[
        "check",
        "--theorem",
        "1",
        "--k",
        "1",
        "--n",
        "5",
        "--alpha",
        "0",
        "--x",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict=PASS"));

    let out = mlaguerre(&[
        "check",
        "--theorem",
        "2",
        "--k",
        "2",
        "--n",
        "1,1",
        "--alpha",
        "-0.75",
        "--x",
        "1,1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "extended range never fails the exit code"
    );
    let text = stdout(&out);
    assert!(text.contains("EXTENDED-DOMAIN"), "{text}");
}

#[test]
fn diagonal_matches_documented_sequence() {
    let out = mlaguerre(&[
        "diagonal", "--k", "2", "--alpha", "0", "--x", "1,1", "--n-max", "1",
    ]);
    assert_eq!(stdout(&out).trim(), "1, -1");
}

#[test]
fn ratio_adjudicates_derived_form() {
    let out = mlaguerre(&["ratio", "--k", "2", "--n-max", "5000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("verdict=DERIVED_FORM"), "{text}");
    let fitted: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("fitted_constant="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((fitted - 0.5991).abs() < 0.01, "fitted {fitted}");
}

#[test]
fn mc_check_brackets_closed_form() {
    let out = mlaguerre(&[
        "mc-check",
        "--k",
        "1",
        "--n",
        "1",
        "--alphas",
        "0",
        "--beta",
        "0",
        "--x",
        "1",
        "--samples",
        "100000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("lhs=1.0000000000000000e0"), "{text}");
    assert!(text.contains("within_3_sigma=true"), "{text}");

    // specialization variant
    let out = mlaguerre(&[
        "mc-check",
        "--k",
        "2",
        "--n",
        "1,1",
        "--variant",
        "theorem2",
        "--alpha",
        "1",
        "--x",
        "2,2",
        "--samples",
        "50000",
        "--seed",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("lhs=-2.0000000000000000e0"));
}

#[test]
fn sweep_roundtrip_files_and_exit_codes() {
    let dir = std::env::temp_dir().join(format!("mlag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("sweep.json");
    let records_path = dir.join("records.csv");
    let summary_path = dir.join("summary.json");
    std::fs::write(
        &config_path,
        r#"{
            "k": 2,
            "index_cap": 2,
            "alpha_set": ["1", "1/2"],
            "x_grid": {"mode": "grid", "values": ["0", "1", "5/2"]},
            "bounds": ["theorem1", "theorem2"],
            "comparison_policy": "float_guarded"
        }"#,
    )
    .unwrap();
    let out = mlaguerre(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        records_path.to_str().unwrap(),
        "--summary-out",
        summary_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(&records_path).unwrap();
    assert!(csv.starts_with("k,n_vec,alpha,x_vec,value,bound_source,bound,tightness,verdict\n"));
    // 9 n-vectors x 2 alphas x 9 points x 2 bounds data rows + header
    assert_eq!(csv.lines().count(), 1 + 9 * 2 * 9 * 2);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&summary_path).unwrap()).unwrap();
    assert_eq!(summary["violations"], 0);
    assert_eq!(summary["records"], 9 * 2 * 9 * 2);
    assert!(summary["max_tightness"]["theorem1"]["tightness"].is_f64());
    assert!(summary["winners"].as_array().unwrap().len() == 3);

    // repeated run with an explicit thread cap is byte-identical
    let records2 = dir.join("records2.csv");
    let out = mlaguerre(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        records2.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv, std::fs::read_to_string(&records2).unwrap());

    // JSON record format parses and matches the schema
    let out = mlaguerre(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 9 * 2 * 9 * 2);
    assert!(rows[0]["bound_source"].is_string());

    // malformed config -> 2; missing file -> 4
    std::fs::write(&config_path, "{not json").unwrap();
    let out = mlaguerre(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = mlaguerre(&[
        "sweep",
        "--config",
        dir.join("absent.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn help_lists_every_subcommand_flag() {
    for (sub, flags) in [
        ("eval", vec!["--k", "--n", "--alpha", "--x", "--method"]),
        (
            "bound",
            vec!["--theorem", "--k", "--n", "--alpha", "--x", "--format"],
        ),
        ("check", vec!["--theorem", "--k", "--n", "--alpha", "--x"]),
        (
            "sweep",
            vec!["--config", "--format", "--out", "--summary-out"],
        ),
        ("diagonal", vec!["--k", "--alpha", "--x", "--n-max"]),
        (
            "mc-check",
            vec![
                "--k",
                "--n",
                "--alphas",
                "--beta",
                "--variant",
                "--alpha",
                "--x",
                "--samples",
                "--seed",
            ],
        ),
        ("ratio", vec!["--k", "--n-max"]),
    ] {
        let out = mlaguerre(&[sub, "--help"]);
        let text = stdout(&out);
        for flag in flags {
            assert!(text.contains(flag), "{sub} --help misses {flag}:\n{text}");
        }
    }
}
