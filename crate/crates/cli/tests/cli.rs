//! Process-level checks of the binary: exit codes, sidecar files, and
//! flag/config precedence as seen by a shell user.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_optomech"))
}

#[test]
fn evolve_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    let status = bin()
        .args(["evolve", "--steps", "16", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("tau,P1,P2,C1,C2,C_ave\n"));
    assert_eq!(body.lines().count(), 17);
    let meta = fs::read_to_string(out.with_extension("csv.meta")).unwrap();
    assert!(meta.contains("command=evolve\n"));
    assert!(meta.contains("steps=16\n"));
}

#[test]
fn bad_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    // domain validation error
    let status =
        bin().args(["evolve", "--ratio", "1", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // parse error from the argument parser itself
    let status = bin().args(["evolve", "--steps", "abc", "--out"]).arg(&out).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // unknown subcommand
    let status = bin().arg("frobnicate").status().unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn config_file_feeds_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "steps=8\nratio=20\n").unwrap();
    let out = dir.path().join("c.csv");
    let status = bin()
        .args(["figure", "average", "--steps", "4", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let body = fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().count(), 5); // header + 4 rows: the flag won
    let meta = fs::read_to_string(sidecar(&out)).unwrap();
    assert!(meta.contains("ratio=2.0000000000000000e1\n")); // from the file
}

#[test]
fn validate_reports_summary_and_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let output = bin()
        .args(["validate", "--ratios", "10,30", "--steps", "40", "--tau-max", "3.14", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("layered validation summary"));
    assert!(stdout.contains("all layered invariants hold"));
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("ratio,tau,f_exact_chain,f_rwa_analytic,f_exact_analytic,dP,dC,leakage\n"));
    assert_eq!(body.lines().count(), 1 + 2 * 40);
}

#[test]
fn scan_rows_are_sorted_by_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = bin()
        .args(["scan", "--ratios", "30,10", "--steps", "60", "--tau-max", "6.3", "--nb", "10", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let body = fs::read_to_string(&out).unwrap();
    let ratios: Vec<f64> = body
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios, vec![10.0, 30.0]);
}

fn sidecar(out: &Path) -> std::path::PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".meta");
    os.into()
}
