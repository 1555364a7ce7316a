//! Candidate objects of one compiled unit, for link-time selection.

use std::fmt::Write as _;
use std::path::PathBuf;

use super::SynthError;
use crate::extractor::Variant;

/// `loop_id<TAB>backend<TAB>object_path<TAB>variant`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ManifestEntry {
    pub loop_id: String,
    pub backend: String,
    pub object_path: PathBuf,
    pub variant: Variant,
}

pub fn render_manifest(entries: &[ManifestEntry]) -> String {
    let mut sorted = entries.to_vec();
    sorted.sort();
    let mut s = String::new();
    for e in sorted {
        let _ = writeln!(s, "{}\t{}\t{}\t{}", e.loop_id, e.backend, e.object_path.display(), e.variant);
    }
    s
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, SynthError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| SynthError::BadManifest { line: i + 1, message };
        let f: Vec<&str> = line.split('\t').collect();
        let [loop_id, backend, path, variant] = f[..] else { return Err(bad("expected 4 fields".into())) };
        if loop_id.is_empty() || backend.is_empty() || path.is_empty() {
            return Err(bad("empty field".into()));
        }
        let variant: Variant = variant.parse().map_err(|_| bad(format!("unknown variant `{variant}`")))?;
        out.push(ManifestEntry { loop_id: loop_id.into(), backend: backend.into(), object_path: path.into(), variant });
    }
    Ok(out)
}
