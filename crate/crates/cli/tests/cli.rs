use std::path::Path;
use std::process::{Command, Output};

fn eeps(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eeps"))
        .current_dir(dir)
        .env_remove("EEPS_THREADS")
        .args(args)
        .output()
        .expect("run eeps")
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn tb_bands_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = eeps(dir.path(), &["tb-bands", "--L", "512", "--bands", "1,2,3", "--out", "bands.csv", "--svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("bands.csv")).unwrap();
    assert!(csv.starts_with("# eeps "));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("2,512,"));
    let svg = std::fs::read_to_string(dir.path().join("bands.svg")).unwrap();
    assert!(svg.contains("<svg"));
}

#[test]
fn default_output_is_named_after_the_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let out = eeps(dir.path(), &["bell-oracle", "--L", "6", "--samples", "50"]);
    assert!(out.status.success());
    assert!(dir.path().join("bell-oracle.csv").exists());
    assert!(!dir.path().join("bell-oracle.svg").exists());
}

#[test]
fn unknown_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = eeps(dir.path(), &["fig9"]);
    assert!(!out.status.success());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn erasure_factor_needs_three_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = eeps(dir.path(), &["erasure-factor", "--L", "32,64", "--models", "bell"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error:"), "{err}");
    assert!(err.contains("3 distinct"), "{err}");
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "sites = [8]\nsamples = 7\noutput = \"from-file.csv\"\n",
    )
    .unwrap();
    let out = eeps(dir.path(), &["two-particle", "--config", "run.toml", "--L", "16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("from-file.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.starts_with("16,")));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "sites = [8]\nlength = 3\n").unwrap();
    let out = eeps(dir.path(), &["two-particle", "--config", "bad.toml"]);
    assert!(!out.status.success());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["anderson-erasure", "--L", "96", "--N", "2,4", "--W", "4", "--realizations", "5"];
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let name = format!("t{threads}.csv");
        let out = Command::new(env!("CARGO_BIN_EXE_eeps"))
            .current_dir(dir.path())
            .env("EEPS_THREADS", threads)
            .args(args)
            .args(["--out", &name])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn bad_thread_count_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = eeps(dir.path(), &["tb-bands", "--L", "64", "--threads", "0"]);
    assert!(!out.status.success());
}
