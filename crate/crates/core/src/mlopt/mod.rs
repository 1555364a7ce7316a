//! Counter features, training labels and a random-forest optimizer predictor.

pub mod dataset;
mod forest;
mod model_io;
pub mod synthetic;

use std::collections::{BTreeMap, BTreeSet};

use sha2::{Digest, Sha256};

use crate::profiler::CounterSet;

pub use forest::{predict, train, train_with_bootstrap, ForestModel, ForestParams, Node, TrainingTrace, Tree};
pub use model_io::{load_model, parse_model, render_model, save_model, MODEL_MAGIC};

#[derive(Debug, thiserror::Error)]
pub enum MlError {
    #[error("{0}: zero retired instructions")]
    ZeroInstructions(String),
    #[error("{0}: no allowed target has a timing")]
    NoAllowedTarget(String),
    #[error("feature schema mismatch (model {model}, vector {vector})")]
    SchemaMismatch { model: String, vector: String },
    #[error("empty training set")]
    EmptyDataset,
    #[error("instance {index} has {got} features, expected {expected}")]
    FeatureCount { index: usize, got: usize, expected: usize },
    #[error("unsupported model version `{0}`")]
    VersionMismatch(String),
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error("dataset line {line}: {message}")]
    BadDataset { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// Ordered event names of the feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema(pub Vec<String>);

impl Schema {
    pub fn new<S: AsRef<str>>(events: &[S]) -> Self {
        Schema(events.iter().map(|e| e.as_ref().to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First 16 hex digits of the sha256 of the newline-joined names.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.0.join("\n").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub loop_id: String,
    pub values: Vec<f64>,
    pub schema_hash: String,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `count / (instructions / 1000)`, evaluated on the reduced fraction so
/// that scaling every count by the same factor gives identical bits.
pub fn pki(count: u64, instructions: u64) -> f64 {
    let num = count as u128 * 1000;
    let den = instructions as u128;
    let g = gcd(num, den).max(1);
    (num / g) as f64 / (den / g) as f64
}

pub fn normalize_pki(raw: &CounterSet, schema: &Schema) -> Result<FeatureVector, MlError> {
    if raw.instructions == 0 {
        return Err(MlError::ZeroInstructions(raw.loop_id.clone()));
    }
    let values = schema
        .0
        .iter()
        .map(|e| match raw.counters.get(e) {
            Some(&c) => pki(c, raw.instructions),
            None => {
                log::warn!("{}: event `{e}` missing; using 0", raw.loop_id);
                0.0
            }
        })
        .collect();
    Ok(FeatureVector { loop_id: raw.loop_id.clone(), values, schema_hash: schema.fingerprint() })
}

/// Allowed targets per compilation mode.
pub fn targets_for_mode(mode: &str) -> Option<BTreeSet<String>> {
    let names: &[&str] = match mode {
        "serial" => &["clang", "gcc", "icc", "polly"],
        "parallel" => &["icc", "polly"],
        _ => return None,
    };
    Some(names.iter().map(|s| s.to_string()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingInstance {
    pub loop_id: String,
    pub features: Vec<f64>,
    pub per_backend_ns: BTreeMap<String, u64>,
    pub label: String,
}

/// Backend with the lowest time among `allowed`; ties go to the first name.
pub fn restricted_argmin(per_backend_ns: &BTreeMap<String, u64>, allowed: &BTreeSet<String>) -> Option<String> {
    let mut best: Option<(&String, u64)> = None;
    for (b, &ns) in per_backend_ns.iter().filter(|(b, _)| allowed.contains(*b)) {
        if best.is_none_or(|(_, m)| ns < m) {
            best = Some((b, ns));
        }
    }
    best.map(|(b, _)| b.clone())
}

/// Labels each instance with its fastest backend; a fastest backend outside
/// `allowed` is replaced by the fastest allowed one.
pub fn label_and_relabel(
    instances: &[(String, Vec<f64>, BTreeMap<String, u64>)],
    allowed: &BTreeSet<String>,
) -> Result<Vec<TrainingInstance>, MlError> {
    let all: BTreeSet<String> = instances.iter().flat_map(|(_, _, t)| t.keys().cloned()).collect();
    let mut relabeled = 0;
    let out = instances
        .iter()
        .map(|(id, features, times)| {
            let label = restricted_argmin(times, allowed).ok_or_else(|| MlError::NoAllowedTarget(id.clone()))?;
            if restricted_argmin(times, &all).as_ref() != Some(&label) {
                relabeled += 1;
            }
            Ok(TrainingInstance {
                loop_id: id.clone(),
                features: features.clone(),
                per_backend_ns: times.clone(),
                label,
            })
        })
        .collect::<Result<Vec<_>, MlError>>()?;
    if relabeled > 0 {
        log::info!("relabeled {relabeled} instances whose fastest backend is not a target");
    }
    Ok(out)
}
