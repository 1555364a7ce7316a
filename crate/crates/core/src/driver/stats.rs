use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("baseline and composed timings cover different applications")]
    MismatchedKeys,
    #[error("{0}: time must be positive")]
    NonpositiveTime(String),
    #[error("no applications")]
    Empty,
}

/// Geometric mean over applications of `baseline / composed`.
pub fn geomean_speedup(
    baseline_ns: &BTreeMap<String, f64>,
    composed_ns: &BTreeMap<String, f64>,
) -> Result<f64, StatsError> {
    if !baseline_ns.keys().eq(composed_ns.keys()) {
        return Err(StatsError::MismatchedKeys);
    }
    if baseline_ns.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut log_sum = 0.0;
    for (app, &base) in baseline_ns {
        let composed = composed_ns[app];
        if !(base > 0.0 && composed > 0.0) {
            return Err(StatsError::NonpositiveTime(app.clone()));
        }
        log_sum += (base / composed).ln();
    }
    Ok((log_sum / baseline_ns.len() as f64).exp())
}
