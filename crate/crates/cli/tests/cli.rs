use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cxlab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cxlab"))
        .args(args)
        .current_dir(dir)
        .env("LAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn missing_seed_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "g.toml",
        "[experiment]\nkind = \"growth\"\n\n[target]\npreset = \"line\"\n",
    );
    let out = cxlab(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("seed"), "{err}");
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn unknown_preset_and_bad_syntax_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write(
        tmp.path(),
        "a.toml",
        "[experiment]\nkind = \"degree\"\nseed = 1\n[target]\npreset = \"nope\"\n",
    );
    assert_eq!(cxlab(&["run", &a], tmp.path()).status.code(), Some(2));
    let b = write(tmp.path(), "b.toml", "[experiment\nkind = 3\n");
    assert_eq!(cxlab(&["run", &b], tmp.path()).status.code(), Some(2));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cxlab(&["run", "absent.toml"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_flag_overrides_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "g.toml",
        "[experiment]\nkind = \"growth\"\nseed = 3\n[target]\npreset = \"parabola\"\n",
    );
    assert_eq!(
        cxlab(&["run", &cfg, "--budget", "1000"], tmp.path())
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn degree_run_writes_results_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cubic.toml",
        "[experiment]\nkind = \"degree\"\nseed = 7\n\n[target]\npreset = \"fermat_cubic\"\n\n[params]\nbudget = 1000\n",
    );
    let out = cxlab(&["run", &cfg], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("out/cubic");
    let results: Value =
        serde_json::from_slice(&std::fs::read(dir.join("results.json")).unwrap()).unwrap();
    assert_eq!(results["slicing"]["degree"], 3);
    assert_eq!(results["volume"]["degree"], 3);
    let report: Value =
        serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["experiment"]["seed"], 7);
    assert_eq!(report["threads"], 2);
    assert_eq!(report["results"], results);
}

#[test]
fn seed_override_changes_slicing_draws() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "v.toml",
        "[experiment]\nkind = \"volume\"\nseed = 1\n[target]\npreset = \"parabola\"\n[params]\nmethods = [\"slice\"]\nbudget = 2000\n",
    );
    let read = |sub: &str| std::fs::read(tmp.path().join(sub).join("results.json")).unwrap();
    cxlab(&["run", &cfg, "--out", "a"], tmp.path());
    cxlab(&["run", &cfg, "--out", "b"], tmp.path());
    cxlab(&["run", &cfg, "--out", "c", "--seed", "2"], tmp.path());
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn inconclusive_runs_exit_4() {
    let tmp = tempfile::tempdir().unwrap();
    // No member of z^m gets within 1e-300 of the limit.
    let cfg = write(
        tmp.path(),
        "s.toml",
        "[experiment]\nkind = \"montel\"\n[target]\npreset = \"power_family\"\n[params]\ntol = 1e-300\n",
    );
    let out = cxlab(&["run", &cfg], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(tmp.path().join("out/s/report.json").exists());
}

#[test]
fn list_presets_covers_the_catalog() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cxlab(&["list-presets"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "parabola",
        "fermat_cubic",
        "exp_graph",
        "power_family",
        "two_sheet",
    ] {
        assert!(text.contains(name), "{name}");
    }
    assert!(text.contains("[non-algebraic]"));
    let json = cxlab(&["list-presets", "--json"], tmp.path());
    let v: Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.as_array().unwrap().len() >= 20);
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for sub in ["acceptance", "examples"] {
        for entry in std::fs::read_dir(root.join(sub)).unwrap() {
            let path = entry.unwrap().path();
            cxlab_cli::ExperimentConfig::from_path(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            n += 1;
        }
    }
    assert!(n >= 25);
}
