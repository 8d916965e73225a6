#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mixlab")
}

/// Writes `config` into `dir/config.json` and returns its path.
pub fn write_config(dir: &Path, config: &Value) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(config).unwrap()).unwrap();
    p
}

pub fn mixlab(command: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(bin())
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("MIXLAB_THREADS")
        .output()
        .expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&read(path)).unwrap()
}

/// Data rows of a CSV as split cells.
pub fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

/// Table potential `ln P(a | last k symbols)` from row-major probabilities.
pub fn table_potential(alphabet: &str, order: usize, probs: &[f64]) -> Value {
    let syms: Vec<char> = alphabet.chars().collect();
    let n = syms.len();
    let mut table = serde_json::Map::new();
    for (i, p) in probs.iter().enumerate() {
        let mut word = String::new();
        let mut rest = i;
        let mut digits = vec![0; order + 1];
        for d in digits.iter_mut().rev() {
            *d = rest % n;
            rest /= n;
        }
        digits.iter().for_each(|&d| word.push(syms[d]));
        table.insert(word, json!(p.ln()));
    }
    json!({ "alphabet": alphabet, "memory_order": order, "table": table })
}

/// The two-state chain `((0.9, 0.1), (0.2, 0.8))`.
pub fn markov() -> Value {
    table_potential("01", 1, &[0.9, 0.1, 0.2, 0.8])
}
