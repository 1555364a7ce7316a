//! Profiled runs, timing-record ingestion and hardware-counter collection.

mod counters;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::{Mutex, MutexGuard};

use crate::backends::{expand_template, Invocation, ProcessRunner, RunError};

pub use counters::{collect_counters, parse_counter_csv, render_counter_csv, CounterSet, INSTRUCTIONS_EVENT};

#[derive(Debug, thiserror::Error)]
pub enum ProfileError {
    #[error("median of an empty sample list")]
    EmptySamples,
    #[error("{exe} exited with {code:?}: {stderr}")]
    RunFailed { exe: String, code: Option<i32>, stderr: String },
    #[error("cannot run {0}")]
    Launch(#[from] RunError),
    #[error("counter provider unavailable: {0}; use profile-based search instead")]
    ProviderUnavailable(String),
    #[error("counter CSV line {line}: {message}")]
    BadCounterCsv { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

/// `MC\t<loop_id>\t<elapsed_ns>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingRecord {
    pub loop_id: String,
    pub elapsed_ns: u64,
}

impl TimingRecord {
    pub fn parse(line: &str) -> Option<TimingRecord> {
        let mut f = line.split('\t');
        if f.next()? != "MC" {
            return None;
        }
        let loop_id = f.next().filter(|s| !s.is_empty())?;
        let ns = f.next()?;
        if f.next().is_some() || !ns.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        Some(TimingRecord { loop_id: loop_id.to_string(), elapsed_ns: ns.parse().ok()? })
    }

    pub fn render(&self) -> String {
        format!("MC\t{}\t{}\n", self.loop_id, self.elapsed_ns)
    }
}

/// Sums the records of one run per loop; returns the totals and the number
/// of malformed lines skipped.
pub fn ingest_run(report: &str) -> (BTreeMap<String, u64>, usize) {
    let mut totals = BTreeMap::new();
    let mut malformed = 0;
    for line in report.lines() {
        match TimingRecord::parse(line) {
            Some(r) => *totals.entry(r.loop_id).or_insert(0u64) += r.elapsed_ns,
            None => malformed += 1,
        }
    }
    (totals, malformed)
}

/// Standard median; for an even count the lower-middle sample.
pub fn median_ns(samples: &[u64]) -> Result<u64, ProfileError> {
    if samples.is_empty() {
        return Err(ProfileError::EmptySamples);
    }
    let mut s = samples.to_vec();
    s.sort_unstable();
    Ok(s[(s.len() - 1) / 2])
}

/// Per-run loop totals of every backend.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TimingTable {
    entries: BTreeMap<(String, String), Vec<u64>>,
    pub runs: usize,
}

impl TimingTable {
    pub fn new(runs: usize) -> Self {
        TimingTable { entries: BTreeMap::new(), runs }
    }

    pub fn push(&mut self, loop_id: &str, backend: &str, total_ns: u64) {
        self.entries.entry((loop_id.to_string(), backend.to_string())).or_default().push(total_ns);
    }

    /// Adds the run totals of one backend.
    pub fn merge(&mut self, backend: &str, runs: &[BTreeMap<String, u64>]) {
        for run in runs {
            for (id, ns) in run {
                self.push(id, backend, *ns);
            }
        }
    }

    pub fn per_run(&self, loop_id: &str, backend: &str) -> Option<&[u64]> {
        self.entries.get(&(loop_id.to_string(), backend.to_string())).map(Vec::as_slice)
    }

    pub fn median(&self, loop_id: &str, backend: &str) -> Option<u64> {
        self.per_run(loop_id, backend).and_then(|s| median_ns(s).ok())
    }

    /// Medians of `loop_id` by backend.
    pub fn medians(&self, loop_id: &str) -> BTreeMap<String, u64> {
        self.entries
            .iter()
            .filter(|((l, _), _)| l == loop_id)
            .filter_map(|((_, b), s)| Some((b.clone(), median_ns(s).ok()?)))
            .collect()
    }

    pub fn loops(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(l, _)| l.as_str()).collect()
    }

    pub fn backends(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(_, b)| b.as_str()).collect()
    }

    pub fn remove_backend(&mut self, backend: &str) {
        self.entries.retain(|(_, b), _| b != backend);
    }

    /// `loop_id<TAB>backend<TAB>median<TAB>run totals...`, sorted.
    pub fn dump(&self) -> String {
        let mut s = String::from("loop_id\tbackend\tmedian_ns\truns_ns\n");
        for ((l, b), runs) in &self.entries {
            let med = median_ns(runs).map(|m| m.to_string()).unwrap_or_default();
            let runs: Vec<String> = runs.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "{l}\t{b}\t{med}\t{}", runs.join(","));
        }
        s
    }
}

// measured executions never overlap, even across pipelines in one process
static EXCLUSIVE: Mutex<()> = Mutex::new(());

/// Held for the duration of any measured execution.
pub fn exclusive() -> MutexGuard<'static, ()> {
    EXCLUSIVE.lock().unwrap_or_else(|p| p.into_inner())
}

/// Runs `exe` `runs` times, one after another, each with a fresh report file
/// under `workdir`. Returns per-run loop totals.
pub fn run_profiled(
    runner: &dyn ProcessRunner,
    exe: &Path,
    input_args: &[String],
    runs: usize,
    workdir: &Path,
) -> Result<Vec<BTreeMap<String, u64>>, ProfileError> {
    let _guard = exclusive();
    let stem = exe.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "exe".into());
    let mut out = Vec::with_capacity(runs);
    for k in 0..runs.max(1) {
        let report = workdir.join(format!("{stem}.run{k}.mc"));
        let _ = fs::remove_file(&report);
        let inv = Invocation::new(exe.display().to_string(), input_args.to_vec())
            .with_env("MC_PROFILE_OUT", report.display().to_string())
            .with_env("MC_RUN_INDEX", k.to_string());
        let o = runner.run(&inv)?;
        if !o.success() {
            return Err(ProfileError::RunFailed {
                exe: exe.display().to_string(),
                code: o.code,
                stderr: o.stderr_text(),
            });
        }
        let text = fs::read_to_string(&report).unwrap_or_default();
        let (totals, malformed) = ingest_run(&text);
        if malformed > 0 {
            log::warn!("{}: skipped {malformed} malformed timing records", report.display());
        }
        out.push(totals);
    }
    Ok(out)
}

/// Expands a measurement-tool template; `{args}` splices the program
/// arguments and the named placeholders are replaced inside words.
pub fn tool_argv(template: &str, placeholders: &[(&str, &str)], args: &[String]) -> Vec<String> {
    expand_template(template, placeholders, "{args}", args)
}
