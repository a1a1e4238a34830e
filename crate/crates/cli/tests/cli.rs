use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circulattice"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn search_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# random search\nq=3\np=71\nmode=random\nsamples=200\nseed=11\n").unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}.json"));
        let status = run(&[
            "search",
            "--config",
            cfg.to_str().unwrap(),
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        outputs.push(read(&out));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let v: Value = serde_json::from_str(&outputs[0]).unwrap();
    assert_eq!(v["codes_total"], 200);
    assert_eq!(v["mode"], "random");
}

#[test]
fn command_line_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "q=3\np=5\nseed=5\nw2=4\n").unwrap();
    let out = run(&["search", "--config", cfg.to_str().unwrap(), "--seed", "6"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["seed"], 6);
    assert_eq!(v["w_sq"], 4);
    assert_eq!(v["codes_total"], 125);
}

#[test]
fn exhaustive_search_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("hist.csv");
    let out = run(&["search", "--q", "3", "--p", "5", "--w2", "2", "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_of(&out);
    let hist = v["histogram"].as_object().unwrap();
    let total: u64 = hist.values().map(|c| c.as_u64().unwrap()).sum();
    assert_eq!(total, 125);
    let text = read(&csv);
    assert!(text.starts_with("d_sq,codes\n"));
    let csv_total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(csv_total, 125);
    assert!(v["prob_estimate"]["num"].is_string());
}

#[test]
fn budget_exhaustion_exits_2_with_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("partial.json");
    let out = run(&[
        "search",
        "--q",
        "3",
        "--p",
        "11",
        "--budget",
        "40",
        "--word-budget",
        "100000",
        "--no-reduce",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_str(&read(&path)).unwrap();
    assert_eq!(v["partial"], true);
    assert_eq!(v["codes_total"], 40);

    let min = run(&["min-norm", "--q", "3", "--p", "11", "--a", "1,2,3", "--budget", "10"]);
    assert_eq!(min.status.code(), Some(2));
}

#[test]
fn errors_exit_1() {
    assert_eq!(run(&["min-norm", "--q", "4", "--p", "5", "--a", "1,1,1,1"]).status.code(), Some(1));
    assert_eq!(run(&["count-ball", "--n", "6", "--p", "5", "--d2", "9"]).status.code(), Some(1));
    assert_eq!(run(&["moment-bound", "--q", "3", "--p", "7", "--w2", "2"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["min-norm", "--q", "3", "--p", "5"]).status.code(), Some(1));
}

#[test]
fn select_prime() {
    let v = json_of(&run(&["select-prime", "--q", "3"]));
    assert_eq!(v["p"], 71);
    assert_eq!(v["method"], "direct");
    assert_eq!(v["window"]["lo"], "64");
    let l = json_of(&run(&["select-prime", "--q", "11", "--method", "linnik"]));
    assert_eq!(l["witnesses"]["modulus"], 1573);
}

#[test]
fn min_norm_and_lattice() {
    let v = json_of(&run(&["min-norm", "--q", "3", "--p", "5", "--a", "1,1,1"]));
    assert_eq!(v["d2"], 2);
    assert_eq!(v["words_visited"], 125);
    assert_eq!(v["witness"].as_array().unwrap().len(), 6);
    let neg = json_of(&run(&["min-norm", "--q", "3", "--p", "5", "--a", "-1,1,1", "--strategy", "sphere"]));
    assert!(neg["d2"].as_u64().unwrap() >= 1);

    let l = json_of(&run(&["build-lattice", "--q", "3", "--p", "5", "--a", "1,1,1", "--hnf", "--gram"]));
    assert_eq!(l["det"], "125");
    assert_eq!(l["mu"], 2);
    assert_eq!(l["basis"].as_array().unwrap().len(), 6);
    assert_eq!(l["hnf"].as_array().unwrap().len(), 6);
    assert_eq!(l["gram"][0][0], 4);
    let delta = l["delta"].as_f64().unwrap();
    assert!((delta - 0.0051677).abs() < 1e-6);
}

#[test]
fn counting_commands() {
    let b = json_of(&run(&["count-ball", "--n", "2", "--p", "5", "--d2", "1"]));
    assert_eq!(b["count"], "5");
    let m = json_of(&run(&["moment-bound", "--q", "3", "--p", "5", "--w2", "2"]));
    assert!(m["closed_form_bound"]["num"].is_string());
    let c = json_of(&run(&["orbit-census", "--q", "3", "--p", "5"]));
    assert_eq!(c["orbits"]["6"], 2600);
    assert_eq!(c["vectors"], 15625);
    let s = json_of(&run(&["orbit-census", "--q", "3", "--p", "5", "--w2", "4", "--strategy", "ball"]));
    assert_eq!(s["strategy"], "ball");
}

#[test]
fn lemma_suite_exit_codes() {
    let ok = run(&["verify-lemmas", "--q", "3", "--p", "5"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json_of(&ok)["status"], "pass");
    let seven = json_of(&run(&["verify-lemmas", "--q", "3", "--p", "7"]));
    let two = seven["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "two-code-structure")
        .unwrap()
        .clone();
    assert_eq!(two["status"], "not-applicable");
    let skipped = run(&["verify-lemmas", "--q", "3", "--p", "5", "--budget", "0"]);
    assert_eq!(skipped.status.code(), Some(2));
    assert_eq!(json_of(&skipped)["status"], "skipped");
}
