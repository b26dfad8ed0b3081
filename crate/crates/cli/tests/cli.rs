use std::fs;
use std::process::{Command, Output};

fn trapz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn study_csv_schema() {
    let out = trapz(&[
        "study",
        "--integrand",
        "gaussian",
        "--dims",
        "1",
        "--budgets",
        "25,50,100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "budget_N,points_used,estimate,reference,relative_error,predicted_bound,h,lambda"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("25,"));
    assert!(lines[3].starts_with("100,"));
    assert!(!text.contains('\r'));
}

#[test]
fn study_is_byte_identical_across_runs() {
    let args = [
        "study",
        "--integrand",
        "exp_moment",
        "--dims",
        "2",
        "--budgets",
        "121,225,441",
        "--lambda",
        "0.8",
    ];
    let first = trapz(&args);
    let second = trapz(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn study_then_fit_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    let budgets = "11,21,31,41,51,61,71,81,91,101";
    let out = trapz(&[
        "study",
        "--budgets",
        budgets,
        "--out",
        records.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let out = trapz(&[
        "fit",
        "--input",
        records.to_str().unwrap(),
        "--model",
        "exp-rate",
        "--dims",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let c: f64 = text
        .lines()
        .find(|l| l.trim_start().starts_with("\"c\""))
        .and_then(|l| l.split('"').nth(3))
        .unwrap()
        .parse()
        .unwrap();
    assert!((1.35..=1.85).contains(&c), "c = {c}");
    assert!(fs::metadata(&records).unwrap().len() > 0);
}

#[test]
fn adaptive_sinc_study() {
    let out = trapz(&[
        "study",
        "--integrand",
        "sinc",
        "--adaptive",
        "--a",
        "5",
        "--M-list",
        "10,20,40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 4);
}

#[test]
fn plan_json_has_plan_and_report() {
    let out = trapz(&["plan", "--budget", "100", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"plan\""));
    assert!(text.contains("\"constant_Cs_omega\""));
}

#[test]
fn integrate_prints_one_record() {
    let out = trapz(&[
        "integrate",
        "--integrand",
        "gaussian_aniso",
        "--dims",
        "2",
        "--sigma",
        "4,1",
        "--budget",
        "400",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    assert!(row[3].starts_with("1.5707963267948966"));
}

#[test]
fn lemma_check_succeeds() {
    let out = trapz(&["lemma-check", "--precision", "40"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out)
        .lines()
        .next()
        .unwrap()
        .starts_with("label,brute,bound"));
}

#[test]
fn exit_codes() {
    let budget = trapz(&[
        "plan",
        "--integrand",
        "exp_moment",
        "--dims",
        "2",
        "--budget",
        "81",
        "--lambda",
        "0.8",
    ]);
    assert_eq!(budget.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&budget.stderr).contains("budget too small"));

    assert_eq!(
        trapz(&["plan", "--budget", "10", "--integrand", "cauchy"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        trapz(&["plan", "--budget", "10", "--precision", "5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(trapz(&["plan", "--bogus"]).status.code(), Some(3));
    assert_eq!(
        trapz(&[
            "fit",
            "--input",
            "/no/such/file.csv",
            "--model",
            "exp-rate",
            "--dims",
            "1"
        ])
        .status
        .code(),
        Some(4)
    );
    assert_eq!(trapz(&["--help"]).status.code(), Some(0));
}
