//! Per-loop backend selection and the final mixed-toolchain link.

mod manifest;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use crate::backends::{mock, BackendKind, CompileMode, Invocation, ProcessRunner, Registry, RunError};
use crate::mlopt::{predict, FeatureVector, ForestModel, MlError};
use crate::profiler::TimingTable;

pub use manifest::{parse_manifest, render_manifest, ManifestEntry};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("no object for loop {loop_id} from {backend}")]
    MissingObject { loop_id: String, backend: String },
    #[error("unknown backend `{0}`")]
    UnknownBackend(String),
    #[error("link failed: {diagnostics}")]
    LinkFailed { diagnostics: String },
    #[error("manifest line {line}: {message}")]
    BadManifest { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Reason {
    Profiled,
    Predicted,
    DefaultFallback,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Profiled => "profiled",
            Reason::Predicted => "predicted",
            Reason::DefaultFallback => "default_fallback",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Choice {
    pub backend: String,
    pub reason: Reason,
}

/// One choice per loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionPlan {
    pub choices: BTreeMap<String, Choice>,
    pub default_backend: String,
}

impl SelectionPlan {
    fn fallback(&self) -> Choice {
        Choice { backend: self.default_backend.clone(), reason: Reason::DefaultFallback }
    }

    pub fn count(&self, reason: Reason) -> usize {
        self.choices.values().filter(|c| c.reason == reason).count()
    }
}

/// Lowest median wins; a tie involving the default backend goes to it,
/// other ties to the first name.
pub fn fastest(medians: &BTreeMap<String, u64>, default_backend: &str) -> Option<String> {
    let best = *medians.values().min()?;
    if medians.get(default_backend) == Some(&best) {
        return Some(default_backend.to_string());
    }
    medians.iter().find(|(_, &m)| m == best).map(|(b, _)| b.clone())
}

pub fn select_by_profile(table: &TimingTable, loops: &[String], default_backend: &str) -> SelectionPlan {
    let mut plan = SelectionPlan { choices: BTreeMap::new(), default_backend: default_backend.to_string() };
    for id in loops {
        let choice = match fastest(&table.medians(id), default_backend) {
            Some(backend) => Choice { backend, reason: Reason::Profiled },
            None => plan.fallback(),
        };
        plan.choices.insert(id.clone(), choice);
    }
    plan
}

pub fn select_by_prediction(
    model: &ForestModel,
    fvs: &[FeatureVector],
    loops: &[String],
    default_backend: &str,
) -> Result<SelectionPlan, MlError> {
    let by_loop: BTreeMap<&str, &FeatureVector> = fvs.iter().map(|f| (f.loop_id.as_str(), f)).collect();
    let mut plan = SelectionPlan { choices: BTreeMap::new(), default_backend: default_backend.to_string() };
    for id in loops {
        let choice = match by_loop.get(id.as_str()) {
            Some(fv) => Choice { backend: predict(model, fv)?, reason: Reason::Predicted },
            None => plan.fallback(),
        };
        plan.choices.insert(id.clone(), choice);
    }
    Ok(plan)
}

/// In OpenMP mode, replaces choices whose OpenMP runtime differs from the
/// default backend's. Returns the demoted loops.
pub fn demote_incompatible(plan: &mut SelectionPlan, registry: &Registry, mode: CompileMode) -> Vec<String> {
    if mode != CompileMode::OpenMp {
        return Vec::new();
    }
    let group = |name: &str| registry.get(name).map(|s| s.compat_group.clone());
    let default_group = group(&plan.default_backend);
    let mut demoted = Vec::new();
    for (id, c) in plan.choices.iter_mut() {
        if c.backend != plan.default_backend && group(&c.backend) != default_group {
            log::warn!(
                "{id}: {} uses an OpenMP runtime incompatible with {}; using {}",
                c.backend,
                plan.default_backend,
                plan.default_backend
            );
            c.backend = plan.default_backend.clone();
            demoted.push(id.clone());
        }
    }
    demoted
}

/// Objects and libraries of the final link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkPlan {
    /// Chosen clean loop objects in loop order, then the base objects.
    pub objects: Vec<PathBuf>,
    /// Mode flags of the default backend needed at link time.
    pub flags: Vec<String>,
    /// User `-L` flags, the backends' runtime libraries, then user `-l` flags.
    pub libs: Vec<String>,
    pub output: PathBuf,
}

/// `clean_objects` maps (loop, backend) to the clean object of that build.
pub fn link_plan(
    plan: &SelectionPlan,
    clean_objects: &BTreeMap<(String, String), PathBuf>,
    base_objects: &[PathBuf],
    registry: &Registry,
    mode: CompileMode,
    user_link_flags: &[String],
    output: &Path,
) -> Result<LinkPlan, SynthError> {
    let mut objects = Vec::new();
    let mut backends: Vec<&str> = vec![&plan.default_backend];
    for (id, c) in &plan.choices {
        let key = (id.clone(), c.backend.clone());
        let obj = clean_objects
            .get(&key)
            .ok_or_else(|| SynthError::MissingObject { loop_id: id.clone(), backend: c.backend.clone() })?;
        objects.push(obj.clone());
        backends.push(&c.backend);
    }
    objects.extend(base_objects.iter().cloned());

    let (search, named): (Vec<&String>, Vec<&String>) = user_link_flags.iter().partition(|f| f.starts_with("-L"));
    let mut libs: Vec<String> = search.into_iter().cloned().collect();
    let mut seen: BTreeSet<String> = libs.iter().cloned().collect();
    let mut add = |l: &String, libs: &mut Vec<String>| {
        if seen.insert(l.clone()) {
            libs.push(l.clone());
        }
    };
    for b in backends {
        let spec = registry.get(b).ok_or_else(|| SynthError::UnknownBackend(b.to_string()))?;
        for l in &spec.link_libs {
            add(l, &mut libs);
        }
        if let Some(down) = spec.downstream.as_deref().and_then(|d| registry.get(d)) {
            for l in &down.link_libs {
                add(l, &mut libs);
            }
        }
    }
    for l in named {
        add(l, &mut libs);
    }

    let default =
        registry.get(&plan.default_backend).ok_or_else(|| SynthError::UnknownBackend(plan.default_backend.clone()))?;
    let flags = match mode {
        CompileMode::Parallel => default.flags_parallel.clone(),
        CompileMode::OpenMp => default.flags_openmp.clone(),
        CompileMode::Serial | CompileMode::BaselineO1 => Vec::new(),
    };
    Ok(LinkPlan { objects, flags, libs, output: output.to_path_buf() })
}

/// Argv of the link: `driver flags objects -o output libs`.
pub fn link_argv(plan: &LinkPlan, driver: &str) -> Vec<String> {
    let mut argv = vec![driver.to_string()];
    argv.extend(plan.flags.iter().cloned());
    argv.extend(plan.objects.iter().map(|o| o.display().to_string()));
    argv.push("-o".into());
    argv.push(plan.output.display().to_string());
    argv.extend(plan.libs.iter().cloned());
    argv
}

/// Links with the default backend's driver; a mock default links in-process.
pub fn link(plan: &LinkPlan, registry: &Registry, runner: &dyn ProcessRunner) -> Result<PathBuf, SynthError> {
    let default = registry.default_backend();
    if default.kind == BackendKind::Mock {
        let objects: Vec<&Path> = plan.objects.iter().map(PathBuf::as_path).collect();
        mock::link(&objects, &plan.output).map_err(|diagnostics| SynthError::LinkFailed { diagnostics })?;
        return Ok(plan.output.clone());
    }
    let argv = link_argv(plan, &default.driver());
    let inv = Invocation::from_argv(&argv).expect("argv has a driver");
    log::debug!("{}", inv.display());
    match runner.run(&inv) {
        Ok(o) if o.success() => Ok(plan.output.clone()),
        Ok(o) => Err(SynthError::LinkFailed { diagnostics: o.stderr_text() }),
        Err(RunError::NotFound(p)) => Err(SynthError::LinkFailed { diagnostics: format!("`{p}` not found") }),
        Err(e) => Err(SynthError::LinkFailed { diagnostics: e.to_string() }),
    }
}
