use std::fs;
use std::process::Command;

fn sublab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sublab"))
}

fn write_config(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn passing_run_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[levels]\nn = [256, 1024]\n");
    let out = dir.path().join("out");
    let status = sublab()
        .args(["levels", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(["--jobs", "2"])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stdout));
    let stdout = String::from_utf8(status.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("PASS levels.capture_k0")));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["kind"], "levels");
    assert!(out.join("levels.csv").exists());
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // the default ratio window is not met by the Mathieu asymptotics
    let config = write_config(dir.path(), "[spectrum]\nn = [64, 256]\nlevels = 1\n");
    let output = sublab()
        .args(["spectrum", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stdout).contains("FAIL spectrum.ratio_window"));
}

#[test]
fn invalid_config_exits_two_with_field_message() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[subcritical]\nn = []\n");
    let output = sublab()
        .args(["subcritical", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("subcritical.n"));
    let missing = sublab()
        .args(["invariance", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unknown_kind_is_rejected_by_the_parser() {
    let output = sublab().args(["spectra", "--config", "x.toml"]).output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("spectrum"));
}

#[test]
fn output_directory_defaults_to_the_config_value() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config");
    let config = write_config(
        dir.path(),
        &format!("output = {:?}\n[normalform-check]\nsamples = 2\nsymbol_halving_window = [0, 100]\nsymbol_doubling_window = [1.5, 2.5]\n", target.display().to_string()),
    );
    let output = sublab().args(["normalform-check", "--config"]).arg(&config).output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stdout));
    assert!(target.join("manifest.json").exists());
}

#[test]
fn repeated_cli_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "seed = 9\n[ladder-check]\nn = [64, 256]\nsamples = 3\n");
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let status = sublab()
            .args(["ladder-check", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--jobs", jobs])
            .status()
            .unwrap();
        assert!(status.success());
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    assert_eq!(run("a", "1"), run("b", "3"));
}
