#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

pub const BIN: &str = env!("CARGO_BIN_EXE_afd");

/// The binary with a clean environment, run from `dir` so no stray
/// `afd.toml` or `AFD_*` variable leaks in.
pub fn afd(dir: &Path) -> Command {
    let mut cmd = Command::new(BIN);
    cmd.current_dir(dir);
    for (k, _) in std::env::vars() {
        if k.starts_with("AFD_") || k == "OPENAI_API_KEY" || k == "RUST_LOG" {
            cmd.env_remove(k);
        }
    }
    cmd
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn records(o: &Output) -> Vec<Value> {
    stdout(o).lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).unwrap()).collect()
}

pub fn write_lines(path: &Path, values: &[Value]) {
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(path, text).unwrap();
}

/// Gold/predicted pairs with confusion [[8, 2], [3, 7]] over keep/delete.
pub fn two_label_predictions() -> Vec<Value> {
    let mut out = Vec::new();
    for (gold, predicted, n) in [("keep", "keep", 8), ("keep", "delete", 2), ("delete", "keep", 3), ("delete", "delete", 7)] {
        for _ in 0..n {
            out.push(json!({"gold": gold, "predicted": predicted}));
        }
    }
    out
}

/// Scored discussions where negative sentences occur exactly in delete
/// outcomes (or exactly outside them when `anti`).
pub fn aligned_scores(anti: bool) -> Vec<Value> {
    let outcomes = ["delete", "keep", "merge", "delete", "redirect", "keep", "delete", "no consensus", "keep"];
    outcomes
        .iter()
        .map(|o| {
            let negative = (*o == "delete") != anti;
            let strength = 0.8;
            let sentence = if negative {
                json!({"label": "negative", "probability": strength})
            } else {
                json!({"label": "positive", "probability": strength})
            };
            json!({"outcome": o, "sentences": [sentence.clone(), sentence]})
        })
        .collect()
}
