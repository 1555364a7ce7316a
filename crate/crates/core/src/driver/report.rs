use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::profiler::TimingTable;
use crate::synthesizer::SelectionPlan;

/// `loop_id,chosen_backend,reason,median_ns_<backend>...`, one row per loop
/// in id order. Timing columns cover every backend of `table`; cells
/// without a median stay empty.
pub fn render_selection_report(plan: &SelectionPlan, table: Option<&TimingTable>) -> String {
    let backends: Vec<&str> = table.map(|t| t.backends().into_iter().collect()).unwrap_or_default();
    let mut s = String::from("loop_id,chosen_backend,reason");
    for b in &backends {
        let _ = write!(s, ",median_ns_{b}");
    }
    s.push('\n');
    for (id, c) in &plan.choices {
        let _ = write!(s, "{id},{},{}", c.backend, c.reason);
        for b in &backends {
            s.push(',');
            if let Some(m) = table.and_then(|t| t.median(id, b)) {
                let _ = write!(s, "{m}");
            }
        }
        s.push('\n');
    }
    s
}

pub fn emit_selection_report(plan: &SelectionPlan, table: Option<&TimingTable>, path: &Path) -> std::io::Result<()> {
    fs::write(path, render_selection_report(plan, table))
}
