use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{tool_argv, ProfileError};
use crate::backends::{Invocation, ProcessRunner, RunError};

/// Reserved event carrying the retired-instruction count.
pub const INSTRUCTIONS_EVENT: &str = "inst_retired";
const HEADER: &str = "loop_id,event,count";

/// Hardware counters of one loop region.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CounterSet {
    pub loop_id: String,
    /// Every event except the instruction count.
    pub counters: BTreeMap<String, u64>,
    pub instructions: u64,
}

/// Parses the interchange CSV; repeated (loop, event) rows add up.
pub fn parse_counter_csv(text: &str) -> Result<Vec<CounterSet>, ProfileError> {
    let bad = |line: usize, message: String| ProfileError::BadCounterCsv { line, message };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == HEADER => {}
        _ => return Err(bad(1, format!("expected header `{HEADER}`"))),
    }
    let mut sets: BTreeMap<String, CounterSet> = BTreeMap::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.trim_end().split(',').collect();
        let [loop_id, event, count] = f[..] else { return Err(bad(i + 1, "expected 3 fields".into())) };
        let count: u64 = count.trim().parse().map_err(|_| bad(i + 1, format!("bad count `{count}`")))?;
        let set = sets
            .entry(loop_id.to_string())
            .or_insert_with(|| CounterSet { loop_id: loop_id.to_string(), ..Default::default() });
        if event == INSTRUCTIONS_EVENT {
            set.instructions += count;
        } else {
            *set.counters.entry(event.to_string()).or_insert(0) += count;
        }
    }
    Ok(sets.into_values().collect())
}

/// Canonical CSV: loops sorted, instruction count first, then events sorted.
pub fn render_counter_csv(sets: &[CounterSet]) -> String {
    let mut sorted: Vec<&CounterSet> = sets.iter().collect();
    sorted.sort_by(|a, b| a.loop_id.cmp(&b.loop_id));
    let mut s = format!("{HEADER}\n");
    for c in sorted {
        let _ = writeln!(s, "{},{INSTRUCTIONS_EVENT},{}", c.loop_id, c.instructions);
        for (e, n) in &c.counters {
            let _ = writeln!(s, "{},{e},{n}", c.loop_id);
        }
    }
    s
}

/// Runs the baseline executable under the counter provider and reads its CSV.
pub fn collect_counters(
    runner: &dyn ProcessRunner,
    baseline_exe: &Path,
    input_args: &[String],
    provider_template: &str,
    out_csv: &Path,
) -> Result<Vec<CounterSet>, ProfileError> {
    let exe = baseline_exe.display().to_string();
    let out = out_csv.display().to_string();
    let argv = tool_argv(provider_template, &[("{exe}", &exe), ("{out_csv}", &out)], input_args);
    let inv = Invocation::from_argv(&argv)
        .ok_or_else(|| ProfileError::ProviderUnavailable("empty provider template".into()))?;
    let _ = fs::remove_file(out_csv);
    let _guard = super::exclusive();
    let o = match runner.run(&inv) {
        Ok(o) => o,
        Err(RunError::NotFound(p)) => return Err(ProfileError::ProviderUnavailable(format!("`{p}` not found"))),
        Err(e) => return Err(e.into()),
    };
    if !o.success() {
        return Err(ProfileError::RunFailed { exe: inv.program, code: o.code, stderr: o.stderr_text() });
    }
    let text = fs::read_to_string(out_csv).map_err(|e| ProfileError::Io(format!("{out}: {e}")))?;
    parse_counter_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_example() {
        let sets = parse_counter_csv("loop_id,event,count\nL0,inst_retired,2000000\nL0,l2_miss,500\n").unwrap();
        assert_eq!(
            sets,
            [CounterSet {
                loop_id: "L0".into(),
                counters: [("l2_miss".to_string(), 500)].into(),
                instructions: 2_000_000
            }]
        );
    }

    #[test]
    fn render_is_canonical() {
        let text = "loop_id,event,count\nL1,cycles,9\nL0,l2_miss,5\nL0,inst_retired,100\n";
        let sets = parse_counter_csv(text).unwrap();
        let canon = render_counter_csv(&sets);
        assert_eq!(canon, "loop_id,event,count\nL0,inst_retired,100\nL0,l2_miss,5\nL1,inst_retired,0\nL1,cycles,9\n");
        assert_eq!(render_counter_csv(&parse_counter_csv(&canon).unwrap()), canon);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_counter_csv("loop,event,count\n").is_err());
        let e = parse_counter_csv("loop_id,event,count\nL0,x,-3\n").unwrap_err();
        assert!(matches!(e, ProfileError::BadCounterCsv { line: 2, .. }));
    }

    #[test]
    fn missing_provider_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let e = collect_counters(
            &crate::backends::SystemRunner,
            Path::new("app"),
            &[],
            "mc-no-such-provider-xyz {exe} {out_csv}",
            &dir.path().join("c.csv"),
        )
        .unwrap_err();
        assert!(matches!(e, ProfileError::ProviderUnavailable(_)));
    }
}
