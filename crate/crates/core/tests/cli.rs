use std::fs;
use std::process::Command;

fn cbmimo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cbmimo"))
}

#[test]
fn codebook_dump_has_one_row_per_entry() {
    let out = cbmimo().args(["codebook", "--m", "4", "--t", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("flat"));
    assert_eq!(lines.count(), 4 * 8);
}

#[test]
fn analyze_marks_one_argmax_per_prediction() {
    let out = cbmimo().args(["analyze", "--m", "8", "--k", "8,16,32", "--variant", "t1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3 * 8);
    assert_eq!(rows.iter().filter(|r| &r[7] == "1").count(), 3);
}

#[test]
fn run_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "m = 4\nk = [6]\nsnr_db = [10.0]\ndrops = 5\nschemes = [\"partial_inr\", \"zfbf_sus\"]\n").unwrap();
    let out_path = dir.path().join("out/run.csv");
    let out = cbmimo().arg("run").arg(&cfg).arg("--out").arg(&out_path).args(["--seed", "3"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(&out_path).unwrap();
    assert_eq!(rows.lines().count(), 2 + 5 * 2);
    let summary = fs::read_to_string(dir.path().join("out/run_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2 + 2);
}

#[test]
fn preset_prints_its_config() {
    let out = cbmimo().args(["preset", "fig7", "--print-config"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("name = \"fig7\""));
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "m = 0\nk = [6]\nsnr_db = [10.0]\ndrops = 5\nschemes = [\"rbf\"]\n").unwrap();
    let out = cbmimo().arg("run").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let out = cbmimo().args(["preset", "fig42", "--print-config"]).output().unwrap();
    assert!(!out.status.success());
    let out = cbmimo().args(["analyze", "--m", "4", "--k", "8", "--base", "7"]).output().unwrap();
    assert!(!out.status.success());
}
