//! End-to-end checks of the command-line interface: subcommand output
//! shapes, exit codes, and file round-trips. Each test shells out to the
//! built binary.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bandgrowth"));
    c.env_remove("BANDGROWTH_CORRUPT_CHECK");
    c
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().expect("exit code");
    let stdout = String::from_utf8(out.stdout).expect("utf8 stdout");
    let value = serde_json::from_str(&stdout)
        .unwrap_or_else(|e| panic!("bad JSON from {args:?}: {e}\n{stdout}"));
    (value, code)
}

#[test]
fn construct_reports_exact_toy_values() {
    let (v, code) = json_of(&["construct", "--m", "4", "--k", "3", "--unchecked"]);
    assert_eq!(code, 0);
    assert_eq!(v["sizeA"], "38416");
    assert_eq!(v["sizeB"], 16);
    assert_eq!(v["exactProb"]["num"], "6");
    assert_eq!(v["exactProb"]["den"], "7");
    assert_eq!(v["blockBand"]["low"], 1);
    assert_eq!(v["blockBand"]["width"], 3);
}

#[test]
fn construct_from_delta_picks_documented_parameters() {
    let (v, code) = json_of(&["construct", "--delta", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["k"], 9);
    assert_eq!(v["m"], 812);
    assert_eq!(v["ell"], 402);
    assert_eq!(v["hypothesisMet"], true);
}

#[test]
fn closure_monte_carlo_is_seed_stable() {
    let args = [
        "closure", "--m", "4", "--k", "3", "--unchecked", "--samples", "500", "--seed", "7",
    ];
    let (a, code_a) = json_of(&args);
    let (b, code_b) = json_of(&args);
    assert_eq!((code_a, code_b), (0, 0));
    assert_eq!(a["mc"], b["mc"]);
    let est = a["mc"]["estimate"].as_f64().unwrap();
    assert!((est - 6.0 / 7.0).abs() < 0.08, "estimate {est} far from 6/7");
}

#[test]
fn csv_format_flattens_trial_records() {
    let out = bin()
        .args([
            "--format", "csv", "isoperimetry", "--D", "11", "--k", "1", "--trials", "2",
            "--seed", "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.split(',').any(|h| h == "outside"), "header: {header}");
    assert_eq!(lines.count(), 2, "one row per trial");
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .args(["compare-fp", "--p", "3", "--n", "4"])
        .arg("--output")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["closure"]["num"], "1");
    assert_eq!(v["closure"]["den"], "2");
}

#[test]
fn petridis_and_ruzsa_consume_set_files() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.set");
    let b_path = dir.path().join("b.set");
    let mut f = std::fs::File::create(&a_path).unwrap();
    writeln!(f, "dense D=4\n0\n1\n2\n3").unwrap();
    let mut f = std::fs::File::create(&b_path).unwrap();
    writeln!(f, "dense D=4\n0\n8").unwrap();

    let a_str = a_path.to_str().unwrap();
    let b_str = b_path.to_str().unwrap();
    let (v, code) = json_of(&["petridis", "--a", a_str, "--b", b_str, "--kmax", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["K0"]["num"], "2");
    assert_eq!(v["allWithinPower"], true);

    let (v, code) = json_of(&[
        "ruzsa-verify", "--a", a_str, "--b", b_str, "--K", "2", "--k", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "witness");
    assert!(v["subsetSize"].as_u64().unwrap() >= 2);
}

#[test]
fn ruzsa_reports_hypothesis_failure_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.set");
    let b_path = dir.path().join("b.set");
    std::fs::write(&a_path, "dense D=4\n0\n").unwrap();
    std::fs::write(&b_path, "dense D=4\n1\n2\n4\n8\n").unwrap();
    let out = bin()
        .args([
            "ruzsa-verify",
            "--a",
            a_path.to_str().unwrap(),
            "--b",
            b_path.to_str().unwrap(),
            "--K",
            "2",
            "--k",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("hypothesis (1) fails"),
        "stderr missing the mandated prefix: {err}"
    );
}

#[test]
fn domain_errors_exit_with_code_two() {
    for args in [
        ["construct", "--m", "4", "--k", "2", "--unchecked"].as_slice(),
        ["construct", "--m", "4", "--k", "3"].as_slice(),
        ["bench", "--D", "29"].as_slice(),
        ["claim4", "--m", "10", "--k", "1"].as_slice(),
    ] {
        let out = bin().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn verification_failures_exit_with_code_one() {
    let out = bin()
        .args(["verify-all", "--seed", "0"])
        .env("BANDGROWTH_CORRUPT_CHECK", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["allPass"], false);
}

#[test]
fn claim4_reads_an_index_family_file() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("family.txt");
    std::fs::write(&fam, "# full first column\n1: 1,2,3,4,5,6,7,8,9,10,11\n").unwrap();
    let (v, code) = json_of(&[
        "claim4", "--m", "11", "--k", "1", "--family",
        fam.to_str().unwrap(), "--j", "1", "--size", "30", "--seed", "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["passes"], true);
    assert_eq!(v["singleBlockExit"], true);
    assert_eq!(v["goodSize"], 11);
}

#[test]
fn witness_subcommands_report_exact_ratios() {
    let (v, code) = json_of(&["witness-column", "--m", "4", "--k", "3", "--unchecked"]);
    assert_eq!(code, 0);
    assert_eq!(v["growth"]["ratio"]["num"], "8");
    assert_eq!(v["growth"]["ratio"]["den"], "7");
    assert_eq!(v["denseCheck"]["identical"], true);

    let (v, code) = json_of(&["witness-row", "--m", "4", "--k", "3", "--unchecked"]);
    assert_eq!(code, 0);
    assert_eq!(v["growth"]["ratio"]["num"], "1");
    assert_eq!(v["growth"]["ratio"]["den"], "1");
    assert_eq!(v["blockVerified"], true);
}
