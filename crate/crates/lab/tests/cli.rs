use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hypercross(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercross"))
        .args(args)
        .env("HYPERCROSS_OUT", out)
        .output()
        .expect("spawn hypercross")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn files_with(dir: &Path, ext: &str) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

#[test]
fn constants_t7_is_one_over_pi() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypercross(&["constants", "--theorem", "T7", "--n", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("0.3183098861837907"), "{text}");
}

#[test]
fn eig_writes_hashed_artifacts_under_hypercross_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypercross(&["eig", "--alpha", "2", "--k", "5"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lowest = stdout_json(&o)["lowest"].as_array().unwrap().clone();
    for (k, v) in lowest.iter().enumerate() {
        let want = (2 * k + 1) as f64;
        assert!((v.as_f64().unwrap() - want).abs() < 1e-6 * want);
    }
    let csvs = files_with(dir.path(), "csv");
    assert_eq!(csvs.len(), 1);
    let body = fs::read_to_string(&csvs[0]).unwrap();
    let hash = body.lines().next().unwrap().strip_prefix("# config_hash: ").unwrap().to_string();
    assert_eq!(hash.len(), 64);
    assert!(csvs[0].to_string_lossy().contains(&hash[..12]));
    for j in files_with(dir.path(), "json") {
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&j).unwrap()).unwrap();
        assert_eq!(v["config_hash"], hash.as_str(), "{}", j.display());
    }
    assert!(!files_with(dir.path(), "dat").is_empty());
    let summary = files_with(dir.path(), "json").into_iter().find(|p| p.to_string_lossy().contains("summary")).unwrap();
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    for key in ["inputs", "outputs", "versions", "seed", "timing"] {
        assert!(!s[key].is_null(), "summary lacks {key}");
    }
}

#[test]
fn reruns_produce_identical_csv() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["fk", "--alpha", "2,1", "--t", "0.5,1", "--paths", "2000", "--seed", "7"];
    assert_eq!(hypercross(&args, a.path()).status.code(), Some(0));
    assert_eq!(hypercross(&args, b.path()).status.code(), Some(0));
    let (ca, cb) = (files_with(a.path(), "csv"), files_with(b.path(), "csv"));
    assert_eq!(ca.len(), cb.len());
    assert!(!ca.is_empty());
    for (x, y) in ca.iter().zip(&cb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn out_flag_overrides_the_environment() {
    let (env_dir, flag_dir) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let o = hypercross(&["constants", "--theorem", "T4", "--out", flag_dir.path().to_str().unwrap()], env_dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(files_with(env_dir.path(), "json").is_empty());
    assert!(!files_with(flag_dir.path(), "json").is_empty());
}

#[test]
fn config_file_round_trip_keeps_the_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypercross(&["eig", "--alpha", "1", "--k", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let cfg = files_with(dir.path(), "txt").pop().unwrap();
    let again = tempfile::tempdir().unwrap();
    let o = hypercross(&["eig", "--config", cfg.to_str().unwrap()], again.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let names = |d: &Path| files_with(d, "csv").iter().map(|p| p.file_name().unwrap().to_owned()).collect::<Vec<_>>();
    assert_eq!(names(dir.path()), names(again.path()));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["eig", "--set", "nope=1"][..],
        &["eig", "--alpha", "1,x"],
        &["eig", "--alpha", "-1"],
        &["verify", "--suite", "13"],
        &["fit", "--input", "/nonexistent/counts.csv"],
    ] {
        assert_eq!(hypercross(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exhausted_refinement_budget_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypercross(
        &["eig", "--method", "fd", "--alpha", "2", "--k", "5", "--rel-tol", "1e-14", "--set", "max_refinements=1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_subset_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hypercross(&["verify", "--suite", "2,12"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["passed"], true);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("criterion  2 [PASS]") && err.contains("criterion 12 [PASS]"), "{err}");
}

#[test]
fn fit_recovers_a_power_law_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("counts.csv");
    let mut body = String::from("E,N\n");
    for i in 1..40 {
        let e = 0.5 * i as f64;
        body.push_str(&format!("{e},{}\n", 3.0 * e.powf(1.5)));
    }
    fs::write(&input, body).unwrap();
    let o = hypercross(&["fit", "--input", input.to_str().unwrap(), "--d", "0,1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let law = &stdout_json(&o)["law"];
    assert_eq!(law["log_power"], 0);
    assert!((law["power"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!((law["constant"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}
