//! Training dataset CSV: `loop_id,<events...>,time_<backend>...`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{label_and_relabel, MlError, Schema, TrainingInstance};

const TIME_PREFIX: &str = "time_";

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub loop_id: String,
    pub features: Vec<f64>,
    /// Missing cells are absent.
    pub times: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub schema: Schema,
    pub backends: Vec<String>,
    pub rows: Vec<DatasetRow>,
}

impl Dataset {
    pub fn parse(text: &str) -> Result<Dataset, MlError> {
        let bad = |line: usize, message: String| MlError::BadDataset { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty dataset".into()))?;
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        if cols.first() != Some(&"loop_id") {
            return Err(bad(1, "first column must be loop_id".into()));
        }
        let n_events = cols[1..].iter().take_while(|c| !c.starts_with(TIME_PREFIX)).count();
        let schema = Schema::new(&cols[1..1 + n_events]);
        let mut backends = Vec::new();
        for c in &cols[1 + n_events..] {
            let b = c.strip_prefix(TIME_PREFIX).filter(|b| !b.is_empty());
            backends.push(b.ok_or_else(|| bad(1, format!("column `{c}` after the timings")))?.to_string());
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let f: Vec<&str> = line.trim_end().split(',').collect();
            if f.len() != cols.len() {
                return Err(bad(i + 1, format!("expected {} fields, found {}", cols.len(), f.len())));
            }
            let features = f[1..1 + n_events]
                .iter()
                .map(|v| v.trim().parse::<f64>().map_err(|_| bad(i + 1, format!("bad value `{v}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mut times = BTreeMap::new();
            for (b, v) in backends.iter().zip(&f[1 + n_events..]) {
                if v.trim().is_empty() {
                    continue;
                }
                let ns = v.trim().parse::<u64>().map_err(|_| bad(i + 1, format!("bad time `{v}`")))?;
                times.insert(b.clone(), ns);
            }
            rows.push(DatasetRow { loop_id: f[0].to_string(), features, times });
        }
        Ok(Dataset { schema, backends, rows })
    }

    pub fn render(&self) -> String {
        let mut s = String::from("loop_id");
        for e in &self.schema.0 {
            let _ = write!(s, ",{e}");
        }
        for b in &self.backends {
            let _ = write!(s, ",{TIME_PREFIX}{b}");
        }
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.loop_id);
            for v in &r.features {
                let _ = write!(s, ",{v}");
            }
            for b in &self.backends {
                s.push(',');
                if let Some(ns) = r.times.get(b) {
                    let _ = write!(s, "{ns}");
                }
            }
            s.push('\n');
        }
        s
    }

    /// Labels every row against `allowed`.
    pub fn instances(&self, allowed: &BTreeSet<String>) -> Result<Vec<TrainingInstance>, MlError> {
        let raw: Vec<_> = self.rows.iter().map(|r| (r.loop_id.clone(), r.features.clone(), r.times.clone())).collect();
        label_and_relabel(&raw, allowed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let text = "loop_id,l2_miss,br_miss,time_icc,time_polly\nL0,0.25,1.5,100,120\nL1,0,2,90,\n";
        let d = Dataset::parse(text).unwrap();
        assert_eq!(d.schema, Schema::new(&["l2_miss", "br_miss"]));
        assert_eq!(d.backends, ["icc", "polly"]);
        assert_eq!(d.rows[1].times.len(), 1);
        assert_eq!(d.render(), text);
    }

    #[test]
    fn rejects_ragged_rows() {
        let e = Dataset::parse("loop_id,a,time_icc\nL0,1\n").unwrap_err();
        assert!(matches!(e, MlError::BadDataset { line: 2, .. }));
        assert!(Dataset::parse("loop_id,time_icc,a\n").is_err());
    }
}
