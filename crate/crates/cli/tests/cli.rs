use std::process::{Command, Output};

fn selfcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfcorr")).args(args).env_remove("SELFCORR_WORKERS").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn trivial_barrier_is_four() {
    let v = json(&selfcorr(&["barrier", "--model", "rbh-trivial", "--L", "3", "--symmetry", "enforced"]));
    assert_eq!(v["results"][0]["barrier"], 4.0);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 16);
}

#[test]
fn symmetric_barrier_witness_replays() {
    let v = json(&selfcorr(&["barrier", "--model", "rbh", "--L", "2"]));
    let r = &v["results"][0];
    assert_eq!(r["found"], true);
    assert_eq!(r["replay_max_energy"], r["barrier"]);
    assert!(!r["witness_ops"].as_array().unwrap().is_empty());
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_selfcorr"))
            .args(["sample", "--L", "2", "--beta", "0.5,1.5", "--trials", "3", "--events", "5000", "--seed", "9"])
            .arg("-o")
            .arg(&path)
            .env("SELFCORR_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(&path).unwrap(), std::fs::read(path.with_extension("csv")).unwrap())
    };
    let a = run("a.jsonl", "1");
    let b = run("b.jsonl", "2");
    assert_eq!(a, b);
    assert!(String::from_utf8(a.1).unwrap().starts_with("# selfcorr"));

    let m1 = selfcorr(&["memory", "--L", "2", "--trials", "20", "--seed", "5"]);
    let m2 = selfcorr(&["memory", "--L", "2", "--trials", "20", "--seed", "5", "--workers", "1"]);
    assert!(m1.status.success());
    assert_eq!(m1.stdout, m2.stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "model = \"rbh\"\nL = [3]\nk-max = 4\n").unwrap();
    let out = selfcorr(&["peierls", "-c", cfg.to_str().unwrap(), "--sublattice", "dual"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 3 L^3 plaquettes at L = 3
    assert!(text.lines().any(|l| l == "3,dual,4,81,16875,0.0048"), "{text}");
    assert!(!text.contains("primal"));
}

#[test]
fn invalid_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\nmodel = \"rbh\"\nbeta = -1.0\n").unwrap();
    let out = selfcorr(&["memory", "-c", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.toml:3:"), "{err}");

    std::fs::write(&cfg, "seed = 1\ntrails = 4\n").unwrap();
    let err = String::from_utf8(selfcorr(&["memory", "-c", cfg.to_str().unwrap()]).stderr).unwrap();
    assert!(err.contains("bad.toml:2:") && err.contains("trails"), "{err}");
}

#[test]
fn randomized_commands_need_a_seed() {
    let out = selfcorr(&["sample", "--L", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn capped_search_exits_cleanly() {
    let v = json(&selfcorr(&["barrier", "--model", "rbh", "--L", "3", "--max-energy", "2"]));
    assert_eq!(v["results"][0]["capped"], true);
    assert_eq!(v["results"][0]["found"], false);
}

#[test]
fn gauge_verify_on_both_families() {
    for model in ["color2d", "gcc"] {
        let v = json(&selfcorr(&["gauge-verify", "--model", model, "--size", "1,2"]));
        assert_eq!(v["all_hold"], true, "{model}");
        let reports = v["reports"].as_array().unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| !r["constraints"].as_array().unwrap().is_empty()));
    }
    let out = selfcorr(&["gauge-verify", "--model", "rbh"]);
    assert!(!out.status.success());
}

#[test]
fn build_and_colex_file() {
    let v = json(&selfcorr(&["build", "--model", "rbh", "--L", "2"]));
    assert_eq!(v["models"][0]["k"], 1);
    assert_eq!(v["models"][0]["model"]["n"], 46);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.colex");
    let text = selfcorr::complex::colex::Colex::tetrahedral(1).unwrap().to_text();
    std::fs::write(&path, text).unwrap();
    let from_file = json(&selfcorr(&["build", "--model", "gcc", "--colex-file", path.to_str().unwrap()]));
    let generated = json(&selfcorr(&["build", "--model", "gcc", "--size", "1"]));
    assert_eq!(from_file["models"][0]["model"], generated["models"][0]["model"]);
    assert!(from_file["config"]["colex_sha256"].is_string());
}
