use std::process::{Command, Output};

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hga-forge"))
        .args(args)
        .env_remove("HGA_FORGE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_phi() {
    let o = forge(&["count", "phi", "--n-max", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1 1 2 5 14 42\n");
}

#[test]
fn count_ha() {
    let o = forge(&["count", "ha", "--n-max", "5"]);
    assert_eq!(stdout(&o), "0 2 25 254 2421\n");
}

#[test]
fn count_hc() {
    assert_eq!(stdout(&forge(&["count", "hc", "--n-max", "3"])), "1 4 15\n");
}

#[test]
fn verify_exits_zero() {
    let o = forge(&["verify", "phi-twisting", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = v.as_array().unwrap();
    assert_eq!(a.len(), 4);
    for r in a {
        assert_eq!(r["schema"], 1);
        assert_eq!(r["residual_terms"], 0);
        assert_eq!(r["complete"], true);
    }
}

#[test]
fn verify_writes_file() {
    let dir = std::env::temp_dir().join(format!("hga-forge-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let o = forge(&["verify", "poly-shc", "--n-max", "2", "--exp-max", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v[1]["stats"]["exp_max"], 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn trace_is_emitted() {
    let o = forge(&["verify", "hc-homotopy-fwd", "--n-max", "2", "--trace"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v[1]["trace"].as_array().unwrap().is_empty());
}

#[test]
fn resource_abort_exits_two() {
    let o = forge(&["verify", "ha-homotopy", "--ceiling", "50"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_three() {
    for args in [
        &["verify", "no-such-check"][..],
        &["verify", "phi-twisting", "--n-max", "0"],
        &["count", "psi", "--n-max", "3"],
        &["count", "phi"],
        &["frobnicate"],
        &["dump", "phi", "--n", "0"],
    ] {
        assert_eq!(forge(args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn bad_thread_variable_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_hga-forge"))
        .args(["count", "phi", "--n-max", "3"])
        .env("HGA_FORGE_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn dump_is_stable_across_threads() {
    let a = forge(&["--threads", "1", "dump", "ha", "--n", "3"]);
    let b = forge(&["--threads", "4", "dump", "ha", "--n", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 25);
    let c = forge(&["--threads", "3", "count", "ha", "--n-max", "4"]);
    assert_eq!(stdout(&c), "0 2 25 254\n");
}

#[test]
fn dump_json() {
    let o = forge(&["dump", "hc", "--n", "2", "--reverse", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    assert_eq!(v["schema"], 1);
}

#[test]
fn bench_ha() {
    let o = forge(&["bench", "ha", "--n", "3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("count=25"), "{s}");
    assert!(s.contains("residual=0"), "{s}");
}

#[test]
fn all_quick() {
    let o = forge(&["all", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks: std::collections::BTreeSet<&str> =
        v.as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(checks.len(), 14);
}
