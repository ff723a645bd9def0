//! Helpers shared by the CLI and acceptance targets.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

/// Small sample counts and budgets so every command finishes in seconds.
pub const SMALL: &str = r#"{
  "n": 600,
  "n_opt": 300,
  "n_reference": 2000,
  "front_budget": 12,
  "solver": { "pop": 9, "max_iter": 4 }
}"#;

pub fn limbsynth(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_limbsynth"))
        .args(args)
        .env_remove("LIMBSYNTH_OUTPUT_DIR")
        .output()
        .unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn ok(args: &[&str]) -> String {
    let (code, stdout, stderr) = limbsynth(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    stdout
}

pub fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, SMALL).unwrap();
    path
}

pub fn files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// Runs every command once into `out` with the given thread count.
pub fn run_everything(config: &Path, out: &Path, threads: &str) {
    let cfg = config.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    let base = ["--config", cfg, "--out-dir", out_s, "--threads", threads, "--seed", "3"];
    let with = |extra: &[&str]| -> Vec<String> { base.iter().chain(extra).map(|s| s.to_string()).collect() };
    let call = |extra: &[&str]| {
        let args = with(extra);
        ok(&args.iter().map(String::as_str).collect::<Vec<_>>())
    };
    for mode in ["srl-upper", "srl-lower", "human-arm", "cane"] {
        call(&["workspace", "--mode", mode]);
    }
    let reduced = out.join("reduced.csv");
    call(&["workspace", "--mode", "srl-lower", "--reduced", "--out", reduced.to_str().unwrap()]);
    let upper = out.join("workspace-srl-upper-seed3.csv");
    call(&["fit", upper.to_str().unwrap()]);
    call(&["fit", reduced.to_str().unwrap()]);
    let csv = out.join("profile.csv");
    call(&["eval", "--x", "0.1,0.4,0.3,0.2,0.19", "--csv", csv.to_str().unwrap()]);
    for algo in ["mscfa", "fa", "random"] {
        call(&["optimize", "--algo", algo]);
    }
    call(&["bench", "--runs", "2"]);
    call(&["front"]);
}


/// Runs every command into three directories, two of them with four
/// threads, and lists the files that are not byte-identical across all three.
pub fn thread_count_differences(dir: &Path) -> (usize, Vec<PathBuf>) {
    let config = small_config(dir);
    let (a, b, c) = (dir.join("a"), dir.join("b"), dir.join("c"));
    run_everything(&config, &a, "1");
    run_everything(&config, &b, "4");
    run_everything(&config, &c, "4");
    let (fa, fb, fc) = (files(&a), files(&b), files(&c));
    let mut differing: Vec<PathBuf> = fa
        .iter()
        .filter(|(p, bytes)| fb.get(*p) != Some(*bytes) || fc.get(*p) != Some(*bytes))
        .map(|(p, _)| p.clone())
        .collect();
    differing.extend(fb.keys().filter(|p| !fa.contains_key(*p)).cloned());
    (fa.len(), differing)
}
