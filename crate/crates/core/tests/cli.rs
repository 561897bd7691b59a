use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_magicflux"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn tdoped_writes_tables_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, stderr) =
        run(&["tdoped", "--qubits", "4,8", "--nt-max", "3", "--samples", "12", "--seed", "5", "--out", out]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("neg_ln_delta_i2: slope"));
    for f in ["tdoped_samples.csv", "tdoped_summary.csv", "tdoped_fits.csv", "tdoped.svg", "tdoped_terms.svg"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let summary = String::from_utf8(read(dir.path(), "tdoped_summary.csv")).unwrap();
    assert!(summary.starts_with("n,n_t,samples,mean_i2,delta_i2,neg_ln_delta_i2,"));
    assert_eq!(summary.lines().count(), 1 + 2 * 4);
    let svg = String::from_utf8(read(dir.path(), "tdoped.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn output_bytes_do_not_depend_on_threads() {
    let mut seen = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        let (code, _, stderr) = run(&[
            "mipt", "--qubits", "4,8", "--instances", "6", "--cycles", "5", "--pm-grid", "0.1:0.3:0.1", "--theta", "0,pi/4",
            "--seed", "11", "--threads", threads, "--out", out,
        ]);
        assert_eq!(code, 0, "{stderr}");
        seen.push((read(dir.path(), "mipt_samples.csv"), read(dir.path(), "mipt_summary.csv")));
    }
    assert_eq!(seen[0], seen[1]);
}

#[test]
fn json_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, stderr) =
        run(&["renyi4", "--qubits", "4", "--nt-max", "2", "--samples", "6", "--format", "json", "--out", out]);
    assert_eq!(code, 0, "{stderr}");
    let v: serde_json::Value = serde_json::from_slice(&read(dir.path(), "renyi4_summary.json")).unwrap();
    assert_eq!(v["columns"][0], "n");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    // T gates on the tableau backend
    assert_eq!(run(&["tdoped", "--qubits", "8", "--nt-max", "2", "--backend", "tableau", "--out", out]).0, 2);
    // n = 12 has no integral eighth
    assert_eq!(run(&["tdoped", "--qubits", "12", "--subsystem-fraction", "1/8", "--out", out]).0, 2);
    assert_eq!(run(&["mipt", "--pm-grid", "0.3:0.1:0.05", "--out", out]).0, 2);
    assert_eq!(run(&["mipt", "--theta", "tau", "--out", out]).0, 2);
    assert_eq!(run(&["tdoped", "--config", "/nonexistent/file.toml", "--out", out]).0, 2);
    // nothing was simulated
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn resource_errors_exit_with_three_before_simulating() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let (code, _, stderr) = run(&["mipt", "--qubits", "16", "--theta", "pi/4", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("cap"));
    assert!(!out.exists());
    assert_eq!(run(&["tdoped", "--qubits", "28", "--out", out.to_str().unwrap()]).0, 3);
}

#[test]
fn config_file_with_cli_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    fs::write(
        &cfg,
        format!(
            "kind = \"kurtosis\"\nqubits = [4]\nnt_values = [0, 1]\nsamples = 30\nmaster_seed = 3\nout = \"{}\"\n",
            out.display()
        ),
    )
    .unwrap();
    let (code, _, stderr) = run(&["kurtosis", "--config", cfg.to_str().unwrap(), "--samples", "8"]);
    assert_eq!(code, 0, "{stderr}");
    let summary = String::from_utf8(read(&out, "kurtosis_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("4,0,8,"));
    // a file for another experiment is a config error
    assert_eq!(run(&["tdoped", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn oracle_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, stderr) = run(&["oracle", "--qubits", "8", "--samples", "400", "--seed", "1", "--out", out]);
    assert_eq!(code, 0, "{stdout}{stderr}");
    assert!(!stdout.contains("FAIL"));
    assert!(stdout.contains("PASS t_contraction_diagonal"));
    let report = String::from_utf8(read(dir.path(), "oracle_report.csv")).unwrap();
    assert!(report.starts_with("check,n,parameter,value,expected,tolerance,margin,pass"));
    // the leading-order decay prediction does not hold at n = 4: failures
    // are reported and the exit code says so
    let (code, stdout, _) = run(&["oracle", "--qubits", "4", "--samples", "300", "--out", out]);
    assert_eq!(code, 1);
    assert!(stdout.contains("FAIL fourth_moment_decay") && stdout.contains("PASS t_contraction_diagonal"));

    let (code, _, stderr) = run(&["tdoped", "--qubits", "4", "--nt-max", "2", "--samples", "5", "--out", out]);
    assert_eq!(code, 0, "{stderr}");
    let svg = dir.path().join("custom.svg");
    let input = dir.path().join("tdoped_summary.csv");
    let (code, _, stderr) = run(&[
        "plot", "--input", input.to_str().unwrap(), "--x", "n_t", "--y", "neg_ln_delta_s2_ab", "--out", svg.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(fs::read_to_string(svg).unwrap().contains("<polyline"));
}
