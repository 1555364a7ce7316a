//! Committed fixtures and byte-exact golden files.
//!
//! Goldens are regenerated with `MC_BLESS=1 cargo test`; without it a
//! mismatch fails.

use std::fs;
use std::path::{Path, PathBuf};

use metacc::mlopt::dataset::Dataset;
use metacc::mlopt::synthetic;
use metacc::mlopt::{ForestParams, Schema};

use super::corpus::crate_dir;

pub const TRAIN_SEED: u64 = 2024;
pub const TEST_SEED: u64 = 2025;
pub const TRAIN_ROWS: usize = 200;
pub const TEST_ROWS: usize = 100;

pub fn fixtures_dir() -> PathBuf {
    crate_dir().join("tests").join("fixtures")
}

pub fn golden_dir() -> PathBuf {
    fixtures_dir().join("golden")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

pub fn blessing() -> bool {
    std::env::var_os("MC_BLESS").is_some_and(|v| v != "0")
}

/// Compares `actual` with the golden file `name`, or rewrites it when blessing.
pub fn golden_mismatch(name: &str, actual: &str) -> Option<String> {
    file_mismatch(&golden_dir().join(name), actual)
}

/// Compares `actual` with the committed file at `path`, or rewrites it when blessing.
pub fn file_mismatch(path: &Path, actual: &str) -> Option<String> {
    if blessing() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(path, actual).unwrap();
        return None;
    }
    match fs::read_to_string(path) {
        Ok(expected) if expected == actual => None,
        Ok(expected) => Some(first_difference(&expected, actual)),
        Err(e) => Some(format!("{}: {e}", path.display())),
    }
}

pub fn assert_golden(name: &str, actual: &str) {
    if let Some(d) = golden_mismatch(name, actual) {
        panic!("golden {name}: {d}");
    }
}

fn first_difference(expected: &str, actual: &str) -> String {
    let line = expected.lines().zip(actual.lines()).position(|(a, b)| a != b);
    match line {
        Some(i) => format!(
            "line {}: expected `{}`, got `{}`",
            i + 1,
            expected.lines().nth(i).unwrap(),
            actual.lines().nth(i).unwrap()
        ),
        None => format!("expected {} lines, got {}", expected.lines().count(), actual.lines().count()),
    }
}

/// Backend config `name` with `@FIXTURES@` resolved, written into `dir`.
pub fn config(name: &str, dir: &Path) -> PathBuf {
    let text = fs::read_to_string(fixture(name)).unwrap();
    let out = dir.join(name);
    fs::write(&out, text.replace("@FIXTURES@", &fixtures_dir().display().to_string())).unwrap();
    out
}

/// Copies fixture sources into `dir`.
pub fn stage(dir: &Path, names: &[&str]) -> Vec<PathBuf> {
    names
        .iter()
        .map(|n| {
            let p = dir.join(n);
            fs::copy(fixture(n), &p).unwrap();
            p
        })
        .collect()
}

pub fn synthetic_train() -> Dataset {
    Dataset::parse(&fs::read_to_string(fixture("synthetic_train.csv")).unwrap()).unwrap()
}

pub fn synthetic_test() -> Dataset {
    Dataset::parse(&fs::read_to_string(fixture("synthetic_test.csv")).unwrap()).unwrap()
}

pub fn regenerate_synthetic() -> (Dataset, Dataset) {
    (synthetic::generate(TRAIN_SEED, TRAIN_ROWS, "tr"), synthetic::generate(TEST_SEED, TEST_ROWS, "te"))
}

/// Parameters of the committed prediction model.
pub fn fixture_model_params() -> ForestParams {
    ForestParams { n_trees: 15, seed: 7, ..Default::default() }
}

pub fn synthetic_schema() -> Schema {
    Schema::new(&synthetic::EVENTS)
}
