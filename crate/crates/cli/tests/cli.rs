use std::process::{Command, Output};

fn istanbul(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_istanbul")).args(args).env_remove("ISTANBUL_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const BASE: [&str; 12] =
    ["--s0", "57", "--strike", "63", "--barrier", "60", "--rate", "0.05", "--vol", "0.3", "--maturity", "0.5"];

fn with(extra: &[&'static str]) -> Vec<&'static str> {
    BASE.iter().copied().chain(extra.iter().copied()).collect()
}

#[test]
fn prices_with_each_engine() {
    let out = istanbul(&[&["price"][..], &BASE].concat());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "price 1.28862\n");

    let out = istanbul(&[&["price"][..], &with(&["--engine", "quadrature"])].concat());
    assert_eq!(stdout(&out), "price 1.28862\n");

    let out =
        istanbul(&[&["price"][..], &with(&["--engine", "mc", "--cv", "--steps", "100", "--paths", "500"])].concat());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("price ") && text.contains("\nstd_error "), "{text}");
}

#[test]
fn seed_falls_back_to_environment() {
    let args = [&["price"][..], &with(&["--engine", "mc", "--steps", "50", "--paths", "300"])].concat();
    let flag = istanbul(&[&args[..], &["--seed", "17"]].concat());
    let env = Command::new(env!("CARGO_BIN_EXE_istanbul")).args(&args).env("ISTANBUL_SEED", "17").output().unwrap();
    let default = istanbul(&args);
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, default.stdout);
}

#[test]
fn delta_defaults_to_central_differences() {
    let central = istanbul(&[&["delta"][..], &BASE].concat());
    let forward = istanbul(&[&["delta"][..], &with(&["--forward"])].concat());
    let bumped = istanbul(&[&["delta"][..], &with(&["--bump", "0.57"])].concat());
    assert!(central.status.success() && forward.status.success());
    assert_eq!(central.stdout, bumped.stdout);
    assert_ne!(central.stdout, forward.stdout);
    let d: f64 = stdout(&central).trim().strip_prefix("delta ").unwrap().parse().unwrap();
    assert!((0.0..1.0).contains(&d));
}

#[test]
fn domain_errors_exit_with_two() {
    let out = istanbul(&[
        "price",
        "--s0",
        "-1",
        "--strike",
        "63",
        "--barrier",
        "60",
        "--rate",
        "0.05",
        "--vol",
        "0.3",
        "--maturity",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spot"));
    let out = istanbul(&[&["delta"][..], &with(&["--bump", "50"])].concat());
    assert_eq!(out.status.code(), Some(2));
    let out = istanbul(&[&["price"][..], &with(&["--engine", "mc", "--paths", "1"])].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig3.csv");
    let p = path.to_str().unwrap();
    let out = istanbul(&["report", "--id", "fig3", "--out", p]);
    assert!(out.status.success());
    let first = std::fs::read(&path).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    assert!(text.starts_with("panel,sigma,T,S0,K,B,delta\n"));
    assert!(!text.contains('\r') && text.ends_with('\n'));
    assert_eq!(text.lines().count(), 1 + 75 + 63);

    istanbul(&["report", "--id", "fig3", "--out", p, "--seed", "5"]);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn unwritable_report_path_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("no").join("such").join("dir.csv");
    let out = istanbul(&["report", "--id", "fig1", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unknown_report_is_rejected() {
    let out = istanbul(&["report", "--id", "table9", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
}
