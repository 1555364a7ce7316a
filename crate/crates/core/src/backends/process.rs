//! External process invocation behind a trait, so pipelines can run against
//! real toolchains, in-process mock artifacts, or a recording stub.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::mock;

/// One argv-style process invocation; never interpreted by a shell.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Invocation {
    pub program: String,
    pub args: Vec<String>,
    pub env: BTreeMap<String, String>,
    pub cwd: Option<PathBuf>,
}

impl Invocation {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        Invocation { program: program.into(), args, ..Default::default() }
    }

    pub fn from_argv(argv: &[String]) -> Option<Self> {
        let (program, args) = argv.split_first()?;
        Some(Invocation::new(program.clone(), args.to_vec()))
    }

    pub fn with_env(mut self, key: &str, value: impl Into<String>) -> Self {
        self.env.insert(key.to_string(), value.into());
        self
    }

    /// Space-joined argv, for logs and transcripts.
    pub fn display(&self) -> String {
        shell_words::join(std::iter::once(&self.program).chain(&self.args))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: Option<i32>,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

impl Outcome {
    pub fn ok() -> Self {
        Outcome { code: Some(0), ..Default::default() }
    }

    pub fn failed(code: i32, stderr: impl Into<String>) -> Self {
        Outcome { code: Some(code), stderr: stderr.into().into_bytes(), ..Default::default() }
    }

    pub fn success(&self) -> bool {
        self.code == Some(0)
    }

    pub fn stderr_text(&self) -> String {
        String::from_utf8_lossy(&self.stderr).into_owned()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("`{0}` not found")]
    NotFound(String),
    #[error("cannot run `{program}`: {source}")]
    Io { program: String, source: io::Error },
}

pub trait ProcessRunner: Send + Sync {
    fn run(&self, inv: &Invocation) -> Result<Outcome, RunError>;
}

/// Runs real processes. Mock executables and the bundled fake measurement
/// tools are interpreted in-process instead.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemRunner;

impl ProcessRunner for SystemRunner {
    fn run(&self, inv: &Invocation) -> Result<Outcome, RunError> {
        match inv.program.as_str() {
            mock::FAKE_COUNTERS => return Ok(mock::fake_counters(self, inv)),
            mock::FAKE_ENERGY => return Ok(mock::fake_energy(self, inv)),
            _ => {}
        }
        let path = Path::new(&inv.program);
        if mock::is_mock_executable(path) {
            return Ok(mock::execute(path, inv));
        }
        let mut cmd = Command::new(&inv.program);
        cmd.args(&inv.args).envs(&inv.env);
        if let Some(dir) = &inv.cwd {
            cmd.current_dir(dir);
        }
        match cmd.output() {
            Ok(o) => Ok(Outcome { code: o.status.code(), stdout: o.stdout, stderr: o.stderr }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(RunError::NotFound(inv.program.clone())),
            Err(source) => Err(RunError::Io { program: inv.program.clone(), source }),
        }
    }
}

/// Records every invocation and reports success without running anything,
/// except that files named after `-o` are created empty. Tracks the peak
/// number of overlapping calls.
#[derive(Debug, Default)]
pub struct TranscriptRunner {
    transcript: Mutex<Vec<Invocation>>,
    active: AtomicUsize,
    peak: AtomicUsize,
    /// Programs reported as missing.
    pub missing: Vec<String>,
    /// Simulated duration of each call.
    pub latency: Duration,
}

impl TranscriptRunner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_missing(mut self, programs: &[&str]) -> Self {
        self.missing = programs.iter().map(|p| p.to_string()).collect();
        self
    }

    pub fn with_latency(mut self, latency: Duration) -> Self {
        self.latency = latency;
        self
    }

    pub fn transcript(&self) -> Vec<Invocation> {
        self.transcript.lock().unwrap().clone()
    }

    pub fn peak_concurrency(&self) -> usize {
        self.peak.load(Ordering::SeqCst)
    }
}

impl ProcessRunner for TranscriptRunner {
    fn run(&self, inv: &Invocation) -> Result<Outcome, RunError> {
        let now = self.active.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        self.transcript.lock().unwrap().push(inv.clone());
        if !self.latency.is_zero() {
            std::thread::sleep(self.latency);
        }
        let result = if self.missing.contains(&inv.program) {
            Err(RunError::NotFound(inv.program.clone()))
        } else {
            if let Some(i) = inv.args.iter().position(|a| a == "-o") {
                if let Some(out) = inv.args.get(i + 1) {
                    let _ = std::fs::write(out, b"");
                }
            }
            Ok(Outcome::ok())
        };
        self.active.fetch_sub(1, Ordering::SeqCst);
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_binary_is_not_found() {
        let inv = Invocation::new("mc-definitely-not-installed-xyz", vec![]);
        assert!(matches!(SystemRunner.run(&inv), Err(RunError::NotFound(_))));
    }

    #[test]
    fn transcript_keeps_order_and_creates_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.o");
        let r = TranscriptRunner::new();
        r.run(&Invocation::new("cc", vec!["-c".into(), "a.c".into(), "-o".into(), out.display().to_string()])).unwrap();
        r.run(&Invocation::new("ld", vec![])).unwrap();
        let t = r.transcript();
        assert_eq!(t.iter().map(|i| i.program.as_str()).collect::<Vec<_>>(), ["cc", "ld"]);
        assert!(out.exists());
        assert_eq!(r.peak_concurrency(), 1);
    }

    #[test]
    fn display_quotes_arguments() {
        let inv = Invocation::new("cc", vec!["-DX=a b".into()]);
        assert_eq!(inv.display(), "cc '-DX=a b'");
    }
}
