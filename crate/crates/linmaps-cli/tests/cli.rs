use std::path::PathBuf;
use std::process::{Command, Output};

fn linmaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linmaps")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("linmaps-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// Rank of a 2×2 matrix over F_2 packed as four bits.
fn rank22(a: u8) -> u32 {
    let det = ((a & 1) & (a >> 3 & 1)) ^ ((a >> 1 & 1) & (a >> 2 & 1));
    match (a, det) {
        (0, _) => 0,
        (_, 1) => 2,
        _ => 1,
    }
}

#[test]
fn verify_lemmas_passes_at_two_by_two() {
    let out = linmaps(&["verify-lemmas", "--q", "2", "--dimv", "2", "--dimw", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 10);
    for line in &lines {
        assert_eq!(line["pass"], true, "{line}");
        assert!(line["instances_checked"].as_u64().unwrap() > 0);
        assert!(line["max_err"].as_f64().unwrap() < 1e-9);
        assert!(line["lemma_id"].is_string());
    }
}

#[test]
fn expansion_row_has_exact_stay_probability() {
    let out = linmaps(&["expansion", "--q", "2", "--dimv", "2", "--dimw", "2", "--set", "builtin:rank-threshold:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "q,n,m,set_id,globalness_order,globalness_level,stay_prob,bound");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], ["2", "2", "2", "rank-threshold:1"]);

    // One step along a uniformly random rank-one map from a uniform point of the set.
    let set: Vec<u8> = (0..16).filter(|&a| rank22(a) <= 1).collect();
    let steps: Vec<u8> = (0..16).filter(|&a| rank22(a) == 1).collect();
    let stays = set.iter().flat_map(|a| steps.iter().map(move |r| a ^ r)).filter(|b| rank22(*b) <= 1).count();
    let expected = stays as f64 / (set.len() * steps.len()) as f64;
    let observed: f64 = row[6].parse().unwrap();
    assert!((observed - expected).abs() < 1e-12, "{observed} vs {expected}");
    assert_eq!(row[7].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn sharpness_spectrum_sits_on_one_level() {
    let out = linmaps(&["spectrum", "--function", "builtin:sharpness:1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<Vec<f64>> =
        stdout(&out).lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    // Nine rank-one characters over F_2 at 2×2, each with coefficient one.
    assert_eq!(rows[1], [1.0, 9.0, 9.0]);
    assert_eq!(rows[0][2] + rows[2][2], 0.0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(linmaps(&["bogus"]).status.code(), Some(2));
    assert_eq!(linmaps(&["spectrum", "--nope"]).status.code(), Some(2));
    assert_eq!(linmaps(&["spectrum", "--q", "5", "--profile", "desk"]).status.code(), Some(2));
    assert_eq!(linmaps(&["verify-lemmas", "--dimv", "3", "--dimw", "3", "--profile", "desk"]).status.code(), Some(2));
    assert_eq!(linmaps(&["expansion", "--set", "builtin:unknown"]).status.code(), Some(2));
    assert_eq!(linmaps(&["check-hyp", "--d", "5"]).status.code(), Some(2));
}

#[test]
fn failed_check_exits_one_with_instance() {
    let dir = scratch("fail");
    // With C0 = 0 every set meets the hypothesis, and the rank ≤ 1 set stays with probability 0.6 > 1/2.
    let out = linmaps(&["expansion", "--c0", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let instance: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("failing_instance.json")).unwrap()).unwrap();
    assert_eq!(instance["q"], 2);
    assert_eq!(instance["values"].as_array().unwrap().len(), 16);
    assert!(String::from_utf8_lossy(&out.stderr).contains("failing instance"));
    assert!(dir.join("expansion.csv").exists());
}

#[test]
fn reports_are_reproducible() {
    let args = ["expansion", "--q", "3", "--dimv", "1", "--dimw", "2", "--set", "family", "--seed", "11"];
    let (a, b) = (linmaps(&args), linmaps(&args));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().count() > 10);
    let hyp = ["check-hyp", "--function", "builtin:random-boolean:0.3,5", "--d", "1"];
    assert_eq!(linmaps(&hyp).stdout, linmaps(&hyp).stdout);
}

#[test]
fn config_file_supplies_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "q = 3\n[expansion]\nset = random:0.5,9\n[spectrum]\nset = ignored\n").unwrap();
    let out = linmaps(&["expansion", "--config", cfg.to_str().unwrap(), "--dimv", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("3,1,2,\"random:0.5,9\","), "{row}");
    // Explicit flags override the file.
    let out = linmaps(&["expansion", "--config", cfg.to_str().unwrap(), "--q", "2"]);
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("2,2,2,"));
}

#[test]
fn cube_and_sharpness_reports() {
    let out =
        linmaps(&["check-cube", "--p", "3", "--n", "3", "--d", "2", "--function", "builtin:subcube:1", "--rho", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], true);
    assert!(report["expansion"]["stay_probability"].is_number());

    let out = linmaps(&["sharpness", "--q", "2", "--dimv", "2", "--dimw", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["observed_constant"].as_f64().unwrap() > 0.0));
}

#[test]
fn bf_threads_is_validated() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_linmaps")).args(["spectrum"]).env("BF_THREADS", "many").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_linmaps")).args(["spectrum"]).env("BF_THREADS", "1").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
