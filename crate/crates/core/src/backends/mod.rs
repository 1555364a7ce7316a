//! Candidate code optimizers: registry, configuration and compilation.

pub mod mock;
pub mod process;
mod registry;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::extractor::{instrument, Variant};
pub use process::{Invocation, Outcome, ProcessRunner, RunError, SystemRunner, TranscriptRunner};
pub use registry::{
    default_registry, expand_template, BackendKind, BackendSpec, CompileMode, ConfigError, Registry,
    DEFAULT_ENERGY_TOOL,
};

/// What a compile job builds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UnitRef {
    Base { stem: String },
    Loop { loop_id: String, variant: Variant },
}

impl fmt::Display for UnitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitRef::Base { stem } => write!(f, "base {stem}"),
            UnitRef::Loop { loop_id, variant } => write!(f, "loop {loop_id} {variant}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompileJob {
    pub backend: String,
    pub mode: CompileMode,
    pub source_path: PathBuf,
    pub object_path: PathBuf,
    pub unit: UnitRef,
    /// User `-I`/`-D` flags and the runtime include path.
    pub extra_args: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompileStatus {
    Ok,
    Failed,
}

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("backend `{backend}` unavailable: `{program}` not found")]
    Unavailable { backend: String, program: String },
    #[error("{backend} failed on {source_path}")]
    CompileFailed { backend: String, source_path: String },
    #[error("unknown backend `{0}`")]
    Unknown(String),
    #[error("backend `{backend}` does not support {mode} mode")]
    UnsupportedMode { backend: String, mode: CompileMode },
    #[error("{0}")]
    Io(String),
}

#[derive(Debug)]
pub struct CompileResult {
    pub backend: String,
    pub status: CompileStatus,
    pub diagnostics: String,
    pub object_path: PathBuf,
    pub error: Option<BackendError>,
}

impl CompileResult {
    pub fn is_ok(&self) -> bool {
        self.status == CompileStatus::Ok
    }

    pub fn unavailable(&self) -> bool {
        matches!(self.error, Some(BackendError::Unavailable { .. }))
    }
}

/// One mock compilation, as recorded in the ledger.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LedgerEntry {
    pub backend: String,
    pub mode: CompileMode,
    pub unit: String,
    pub source: String,
    pub object: String,
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}\t{}", self.backend, self.mode, self.unit, self.source, self.object)
    }
}

/// The registry of a run together with the process runner used to invoke it.
pub struct Toolchain {
    pub registry: Registry,
    runner: Arc<dyn ProcessRunner>,
    ledger: Mutex<Vec<LedgerEntry>>,
}

impl Toolchain {
    pub fn new(registry: Registry, runner: Arc<dyn ProcessRunner>) -> Self {
        Toolchain { registry, runner, ledger: Mutex::new(Vec::new()) }
    }

    pub fn runner(&self) -> &dyn ProcessRunner {
        self.runner.as_ref()
    }

    /// Mock compilations so far, in completion order.
    pub fn ledger(&self) -> Vec<LedgerEntry> {
        self.ledger.lock().unwrap().clone()
    }

    pub fn compile(&self, job: &CompileJob) -> CompileResult {
        match self.registry.get(&job.backend) {
            Some(spec) => compile(job, spec, self),
            None => failure(job, BackendError::Unknown(job.backend.clone()), String::new()),
        }
    }

    /// Runs `jobs` with at most `pool_size` concurrent compilations. Results
    /// are in job order.
    pub fn compile_all(&self, jobs: &[CompileJob], pool_size: usize) -> Vec<CompileResult> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(pool_size.max(1)).build();
        match pool {
            Ok(pool) => pool.install(|| jobs.par_iter().map(|j| self.compile(j)).collect()),
            Err(e) => {
                log::warn!("cannot start compile pool ({e}); compiling serially");
                jobs.iter().map(|j| self.compile(j)).collect()
            }
        }
    }

    fn invoke(&self, backend: &str, argv: Vec<String>, source: &Path) -> Result<String, (BackendError, String)> {
        let inv = Invocation::from_argv(&argv)
            .ok_or_else(|| (BackendError::Io(format!("{backend}: empty command")), String::new()))?;
        log::debug!("{}", inv.display());
        match self.runner.run(&inv) {
            Ok(o) if o.success() => Ok(o.stderr_text()),
            Ok(o) => Err((
                BackendError::CompileFailed { backend: backend.to_string(), source_path: source.display().to_string() },
                o.stderr_text(),
            )),
            Err(RunError::NotFound(program)) => {
                Err((BackendError::Unavailable { backend: backend.to_string(), program }, String::new()))
            }
            Err(e) => Err((BackendError::Io(e.to_string()), String::new())),
        }
    }
}

fn failure(job: &CompileJob, error: BackendError, diagnostics: String) -> CompileResult {
    CompileResult {
        backend: job.backend.clone(),
        status: CompileStatus::Failed,
        diagnostics,
        object_path: job.object_path.clone(),
        error: Some(error),
    }
}

fn success(job: &CompileJob, diagnostics: String) -> CompileResult {
    CompileResult {
        backend: job.backend.clone(),
        status: CompileStatus::Ok,
        diagnostics,
        object_path: job.object_path.clone(),
        error: None,
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

/// Compiles one file with `spec`. Failures are reported in the result.
pub fn compile(job: &CompileJob, spec: &BackendSpec, tc: &Toolchain) -> CompileResult {
    if !spec.supports(job.mode) {
        let e = BackendError::UnsupportedMode { backend: spec.name.clone(), mode: job.mode };
        return failure(job, e, String::new());
    }
    let result = match spec.kind {
        BackendKind::Direct => {
            let mut argv =
                spec.expand(&path_str(&job.source_path), &path_str(&job.object_path), &spec.flags_for(job.mode));
            argv.extend(job.extra_args.iter().cloned());
            tc.invoke(&spec.name, argv, &job.source_path)
        }
        BackendKind::SourceToSource => source_to_source(job, spec, tc),
        BackendKind::Mock => mock_compile(job, spec, tc),
    };
    match result {
        Ok(diag) => success(job, diag),
        Err((e, diag)) => failure(job, e, diag),
    }
}

/// Transform with `spec`, then compile the result with its downstream backend.
fn source_to_source(job: &CompileJob, spec: &BackendSpec, tc: &Toolchain) -> Result<String, (BackendError, String)> {
    let io = |e: std::io::Error| (BackendError::Io(e.to_string()), String::new());
    let downstream_name = spec.downstream.as_deref().unwrap_or_default();
    let downstream = tc
        .registry
        .get(downstream_name)
        .ok_or_else(|| (BackendError::Unknown(downstream_name.to_string()), String::new()))?;
    let stem = job.object_path.with_extension("");
    let tag: String = spec.name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    let mut input = job.source_path.clone();
    if let (Some((before, after)), UnitRef::Loop { loop_id, .. }) = (&spec.region_markers, &job.unit) {
        let text = fs::read_to_string(&job.source_path).map_err(io)?;
        input = PathBuf::from(format!("{}.{tag}.in.c", stem.display()));
        fs::write(
            &input,
            instrument::wrap_nest(&text, loop_id, std::slice::from_ref(before), std::slice::from_ref(after)),
        )
        .map_err(io)?;
    }
    let transformed = PathBuf::from(format!("{}.{tag}.c", stem.display()));
    let argv = spec.expand(&path_str(&input), &path_str(&transformed), &spec.flags_for(job.mode));
    let mut diag = tc.invoke(&spec.name, argv, &job.source_path)?;
    // transformed parallel code carries OpenMP pragmas
    let mut flags = downstream.flags_serial.clone();
    if matches!(job.mode, CompileMode::Parallel | CompileMode::OpenMp) {
        flags.extend(downstream.flags_openmp.iter().cloned());
    }
    let mut argv = downstream.expand(&path_str(&transformed), &path_str(&job.object_path), &flags);
    argv.extend(job.extra_args.iter().cloned());
    diag.push_str(&tc.invoke(&spec.name, argv, &job.source_path)?);
    Ok(diag)
}

fn mock_compile(job: &CompileJob, spec: &BackendSpec, tc: &Toolchain) -> Result<String, (BackendError, String)> {
    let behavior = spec.mock.clone().unwrap_or_default();
    let file_name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tc.ledger.lock().unwrap().push(LedgerEntry {
        backend: spec.name.clone(),
        mode: job.mode,
        unit: job.unit.to_string(),
        source: file_name(&job.source_path),
        object: file_name(&job.object_path),
    });
    let source = fs::read(&job.source_path)
        .map_err(|e| (BackendError::Io(format!("{}: {e}", job.source_path.display())), String::new()))?;
    let loop_id = match &job.unit {
        UnitRef::Loop { loop_id, .. } => Some(loop_id.as_str()),
        UnitRef::Base { .. } => None,
    };
    if loop_id.is_some_and(|id| behavior.fails(id)) {
        let e = BackendError::CompileFailed { backend: spec.name.clone(), source_path: path_str(&job.source_path) };
        return Err((e, format!("{}: injected failure\n", spec.name)));
    }
    let obj = mock::MockObject {
        backend: spec.name.clone(),
        mode: job.mode.to_string(),
        unit: job.unit.to_string(),
        profile: loop_id.and_then(|id| behavior.profiles.get(id).cloned()),
        power: behavior.power.unwrap_or(mock::DEFAULT_POWER),
        crash: behavior.crash,
        source_sha256: mock::sha256_hex(&source),
    };
    fs::write(&job.object_path, obj.render())
        .map_err(|e| (BackendError::Io(format!("{}: {e}", job.object_path.display())), String::new()))?;
    Ok(String::new())
}
