use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::forest::{ForestModel, ForestParams, Node, Tree};
use super::{MlError, Schema};

pub const MODEL_MAGIC: &str = "MCMODEL 1";

/// Text form of a model; the last line is the sha256 of everything before it.
pub fn render_model(m: &ForestModel) -> String {
    let p = &m.params;
    let mut s = String::new();
    let _ = writeln!(s, "{MODEL_MAGIC}");
    let _ = writeln!(s, "mode {}", m.mode);
    let _ = writeln!(s, "schema {}", m.schema.0.join(" "));
    let _ = writeln!(s, "classes {}", m.classes.join(" "));
    let _ = writeln!(
        s,
        "params n_trees={} max_depth={} min_samples_leaf={} feature_subset_size={} max_categories={} seed={}",
        p.n_trees, p.max_depth, p.min_samples_leaf, p.feature_subset_size, p.max_categories, p.seed
    );
    let _ = writeln!(s, "oob {}", m.oob_accuracy);
    for t in &m.trees {
        for n in &t.nodes {
            match n {
                Node::Split { feature, threshold, .. } => writeln!(s, "N {feature} {threshold}"),
                Node::Leaf { class } => writeln!(s, "L {class}"),
            }
            .unwrap();
        }
    }
    let sum = hex(&Sha256::digest(s.as_bytes()));
    let _ = writeln!(s, "checksum {sum}");
    s
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_model(m: &ForestModel, path: &Path) -> Result<(), MlError> {
    fs::write(path, render_model(m)).map_err(|e| MlError::Io(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<ForestModel, MlError> {
    let bytes = fs::read(path).map_err(|e| MlError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;
    parse_model(&text)
}

fn corrupt(msg: impl Into<String>) -> MlError {
    MlError::CorruptModel(msg.into())
}

pub fn parse_model(text: &str) -> Result<ForestModel, MlError> {
    let body = text.strip_suffix('\n').ok_or_else(|| corrupt("missing final newline"))?;
    let (content, last) = match body.rfind('\n') {
        Some(i) => (&text[..=i], &body[i + 1..]),
        None => return Err(corrupt("truncated")),
    };
    let sum = last.strip_prefix("checksum ").ok_or_else(|| corrupt("missing checksum"))?;
    if sum != hex(&Sha256::digest(content.as_bytes())) {
        return Err(corrupt("checksum mismatch"));
    }

    let mut lines = content.lines();
    let mut field = |key: &str| -> Result<&str, MlError> {
        let line = lines.next().ok_or_else(|| corrupt(format!("missing `{key}`")))?;
        if key == "MCMODEL" {
            return Ok(line);
        }
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' ').or(if r.is_empty() { Some("") } else { None }))
            .ok_or_else(|| corrupt(format!("expected `{key}`, found `{line}`")))
    };
    let magic = field("MCMODEL")?;
    if magic != MODEL_MAGIC {
        return match magic.strip_prefix("MCMODEL ") {
            Some(v) => Err(MlError::VersionMismatch(v.to_string())),
            None => Err(corrupt("bad magic line")),
        };
    }
    let mode = field("mode")?.to_string();
    let schema = Schema(words(field("schema")?));
    let classes = words(field("classes")?);
    let params = parse_params(field("params")?)?;
    let oob_accuracy: f64 = field("oob")?.parse().map_err(|_| corrupt("bad oob"))?;

    let nodes: Vec<&str> = lines.collect();
    let mut pos = 0;
    let mut trees = Vec::with_capacity(params.n_trees);
    for _ in 0..params.n_trees {
        let mut t = Tree::default();
        read_subtree(&nodes, &mut pos, &mut t.nodes, schema.len(), classes.len())?;
        trees.push(t);
    }
    if pos != nodes.len() {
        return Err(corrupt("trailing node lines"));
    }
    Ok(ForestModel { mode, schema, classes, params, trees, oob_accuracy, trace: None })
}

fn words(s: &str) -> Vec<String> {
    s.split(' ').filter(|w| !w.is_empty()).map(str::to_string).collect()
}

fn parse_params(s: &str) -> Result<ForestParams, MlError> {
    let mut p = ForestParams::default();
    for kv in s.split(' ') {
        let (k, v) = kv.split_once('=').ok_or_else(|| corrupt(format!("bad param `{kv}`")))?;
        let bad = || corrupt(format!("bad param `{kv}`"));
        match k {
            "n_trees" => p.n_trees = v.parse().map_err(|_| bad())?,
            "max_depth" => p.max_depth = v.parse().map_err(|_| bad())?,
            "min_samples_leaf" => p.min_samples_leaf = v.parse().map_err(|_| bad())?,
            "feature_subset_size" => p.feature_subset_size = v.parse().map_err(|_| bad())?,
            "max_categories" => p.max_categories = v.parse().map_err(|_| bad())?,
            "seed" => p.seed = v.parse().map_err(|_| bad())?,
            _ => return Err(bad()),
        }
    }
    Ok(p)
}

fn read_subtree(
    lines: &[&str],
    pos: &mut usize,
    nodes: &mut Vec<Node>,
    n_features: usize,
    n_classes: usize,
) -> Result<(), MlError> {
    let line = *lines.get(*pos).ok_or_else(|| corrupt("truncated tree"))?;
    *pos += 1;
    let f: Vec<&str> = line.split(' ').collect();
    match f[..] {
        ["L", class] => {
            let class: usize = class.parse().map_err(|_| corrupt(format!("bad leaf `{line}`")))?;
            if class >= n_classes {
                return Err(corrupt(format!("leaf class {class} out of range")));
            }
            nodes.push(Node::Leaf { class });
        }
        ["N", feature, threshold] => {
            let feature: usize = feature.parse().map_err(|_| corrupt(format!("bad node `{line}`")))?;
            let threshold: f64 = threshold.parse().map_err(|_| corrupt(format!("bad node `{line}`")))?;
            if feature >= n_features {
                return Err(corrupt(format!("feature {feature} out of range")));
            }
            let at = nodes.len();
            nodes.push(Node::Split { feature, threshold, right: 0 });
            read_subtree(lines, pos, nodes, n_features, n_classes)?;
            let right_at = nodes.len();
            if let Node::Split { right, .. } = &mut nodes[at] {
                *right = right_at;
            }
            read_subtree(lines, pos, nodes, n_features, n_classes)?;
        }
        _ => return Err(corrupt(format!("bad node line `{line}`"))),
    }
    Ok(())
}
