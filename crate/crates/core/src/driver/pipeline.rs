//! Phase orchestration for every driver action.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use super::cli::{Action, RunConfig, TrainMode};
use super::preprocess::header_env;
use super::report::emit_selection_report;
use super::{runtime, DriverError};
use crate::backends::{CompileJob, CompileMode, ProcessRunner, Registry, Toolchain, UnitRef};
use crate::cparse::{self, FileId, HeaderEnv};
use crate::energyrep::{emit_energy_csv, run_energy_profile, EnergyRecord};
use crate::extractor::{analyze, c_identifier, generate, ExtractOptions, GeneratedArtifacts, Ineligibility, Variant};
use crate::mlopt::dataset::Dataset;
use crate::mlopt::{load_model, normalize_pki, save_model, targets_for_mode, train, ForestParams, MlError};
use crate::profiler::{collect_counters, run_profiled, ProfileError, TimingTable};
use crate::synthesizer::{
    demote_incompatible, link, link_plan, parse_manifest, render_manifest, select_by_prediction, select_by_profile,
    Choice, ManifestEntry, Reason, SelectionPlan, SynthError,
};

/// What a run produced.
#[derive(Debug, Default)]
pub struct Summary {
    pub artifacts: Vec<PathBuf>,
    pub plan: Option<SelectionPlan>,
    pub table: Option<TimingTable>,
    pub energy: Vec<EnergyRecord>,
    /// Trained models and their out-of-bag accuracy.
    pub models: Vec<(PathBuf, f64)>,
    /// Nests left in place, with their reason tags.
    pub skipped: Vec<(String, Vec<&'static str>)>,
}

pub const DEFAULT_OUTPUT: &str = "a.out";
pub const MANIFEST_SUFFIX: &str = ".mcmanifest";

pub fn load_registry(cfg: &RunConfig) -> Result<Registry, DriverError> {
    let mut registry = match &cfg.backend_config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| DriverError::Config(format!("{}: {e}", p.display())))?;
            Registry::from_config(&text)
                .map_err(|e| DriverError::Config(format!("{}:{}: {}", p.display(), e.line, e.message)))?
        }
        None => Registry::default(),
    };
    for name in &cfg.exclude {
        if registry.get(name).is_some_and(|s| s.is_default) {
            log::warn!("the default backend `{name}` cannot be excluded");
        }
        registry.exclude(name);
    }
    Ok(registry)
}

/// Runs the action of `cfg`.
pub fn run(cfg: &RunConfig, runner: Arc<dyn ProcessRunner>) -> Result<Summary, DriverError> {
    cfg.validate()?;
    if cfg.action == Action::Train {
        return train_models(cfg);
    }
    let registry = load_registry(cfg)?;
    let tc = Toolchain::new(registry, runner);
    if cfg.compile_only {
        let mut summary = Summary::default();
        for src in &cfg.sources {
            let s = compile_only(cfg, &tc, src)?;
            summary.artifacts.extend(s.artifacts);
            summary.skipped.extend(s.skipped);
        }
        return Ok(summary);
    }
    let output = cfg.output.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));
    let mut p = Pipeline::new(cfg, &tc, &output)?;
    p.prepare()?;
    match cfg.action {
        Action::ProfileSearch => p.profile_search(),
        Action::Predict | Action::AdvancedProfile => p.predict(),
        Action::PowerProfile => p.power_profile(),
        Action::Train => unreachable!("handled above"),
    }?;
    Ok(p.summary)
}

fn train_models(cfg: &RunConfig) -> Result<Summary, DriverError> {
    let data = cfg.train_data.as_ref().expect("validated train action");
    let text = fs::read_to_string(data).map_err(|e| DriverError::Io(format!("{}: {e}", data.display())))?;
    let ds = Dataset::parse(&text)?;
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("model.mcm"));
    let modes = match cfg.train_mode {
        Some(m) => vec![(m, out.clone())],
        None => [TrainMode::Serial, TrainMode::Parallel]
            .into_iter()
            .map(|m| (m, PathBuf::from(format!("{}.{}", out.display(), m.as_str()))))
            .collect(),
    };
    let params = ForestParams { n_trees: cfg.n_trees, seed: cfg.seed, ..Default::default() };
    let mut summary = Summary::default();
    for (mode, path) in modes {
        let allowed = targets_for_mode(mode.as_str()).expect("known mode");
        let instances = ds.instances(&allowed)?;
        let model = train(mode.as_str(), &ds.schema, &instances, &params)?;
        save_model(&model, &path)?;
        summary.models.push((path.clone(), model.oob_accuracy));
        summary.artifacts.push(path);
    }
    Ok(summary)
}

struct Workspace {
    src: PathBuf,
    obj: PathBuf,
    bin: PathBuf,
    profile: PathBuf,
    include: PathBuf,
}

impl Workspace {
    fn create(output: &Path) -> Result<Self, DriverError> {
        let root = PathBuf::from(format!("{}.mcbuild", output.display()));
        let ws = Workspace {
            src: root.join("src"),
            obj: root.join("obj"),
            bin: root.join("bin"),
            profile: root.join("profile"),
            include: root.join("include"),
        };
        for d in [&ws.src, &ws.obj, &ws.bin, &ws.profile] {
            fs::create_dir_all(d).map_err(|e| DriverError::Io(format!("{}: {e}", d.display())))?;
        }
        runtime::install(&ws.include).map_err(|e| DriverError::Io(format!("{}: {e}", ws.include.display())))?;
        Ok(ws)
    }

    fn loop_source(&self, id: &str, v: Variant) -> PathBuf {
        match v {
            Variant::Clean => self.src.join(format!("{id}.c")),
            _ => self.src.join(format!("{id}.{v}.c")),
        }
    }

    fn loop_object(&self, id: &str, backend: &str, v: Variant) -> PathBuf {
        self.obj.join(format!("{id}.{}.{v}.o", c_identifier(backend)))
    }
}

struct Unit {
    path: PathBuf,
    stem: String,
    text: String,
    file_id: FileId,
    env: HeaderEnv,
    art: GeneratedArtifacts,
}

fn build_artifacts(
    unit: &Unit,
    min_loop_lines: u32,
    forced: &BTreeSet<String>,
) -> Result<GeneratedArtifacts, DriverError> {
    let opts = ExtractOptions { min_loop_lines, header_env: unit.env.clone() };
    let ast = cparse::parse_unit_with(&unit.text, unit.file_id, &unit.env)
        .map_err(|e| DriverError::Extract { path: unit.path.display().to_string(), message: e.to_string() })?;
    let mut nests = analyze(&ast, &unit.stem, &opts);
    for n in nests.iter_mut().filter(|n| forced.contains(n.loop_id.as_str())) {
        n.demote(Ineligibility::DefaultCompileFailed);
    }
    Ok(generate(&ast, &unit.stem, nests))
}

struct Pipeline<'a> {
    cfg: &'a RunConfig,
    tc: &'a Toolchain,
    ws: Workspace,
    output: PathBuf,
    units: Vec<Unit>,
    /// Objects given on the command line, linked as they are.
    extra_objects: Vec<PathBuf>,
    /// Eligible loops, sorted.
    loops: Vec<String>,
    /// (loop, backend, variant) -> object.
    objects: BTreeMap<(String, String, Variant), PathBuf>,
    /// Backends that can build every variant of some loop, registry order.
    backends: Vec<String>,
    summary: Summary,
}

impl<'a> Pipeline<'a> {
    fn new(cfg: &'a RunConfig, tc: &'a Toolchain, output: &Path) -> Result<Self, DriverError> {
        Ok(Pipeline {
            cfg,
            tc,
            ws: Workspace::create(output)?,
            output: output.to_path_buf(),
            units: Vec::new(),
            extra_objects: Vec::new(),
            loops: Vec::new(),
            objects: BTreeMap::new(),
            backends: Vec::new(),
            summary: Summary::default(),
        })
    }

    fn registry(&self) -> &Registry {
        &self.tc.registry
    }

    fn default_name(&self) -> String {
        self.registry().default_backend().name.clone()
    }

    /// Extracts C sources and reads the manifests of prebuilt objects.
    fn prepare(&mut self) -> Result<(), DriverError> {
        let (c_sources, objects): (Vec<&PathBuf>, Vec<&PathBuf>) =
            self.cfg.sources.iter().partition(|p| p.extension().is_none_or(|e| e != "o"));
        if !objects.is_empty() && self.cfg.action != Action::ProfileSearch {
            return Err(DriverError::Usage("prediction and energy modes need C sources, not objects".into()));
        }
        for o in objects {
            self.add_object(o)?;
        }
        self.units = extract_units(self.cfg, self.registry(), &c_sources)?;
        for u in &self.units {
            record_skipped(&mut self.summary, &u.art);
            self.loops.extend(u.art.loop_files.keys().map(|id| id.0.clone()));
        }
        self.loops.sort();
        self.loops.dedup();
        Ok(())
    }

    fn add_object(&mut self, obj: &Path) -> Result<(), DriverError> {
        let manifest = PathBuf::from(format!("{}{MANIFEST_SUFFIX}", obj.display()));
        self.extra_objects.push(obj.to_path_buf());
        let Ok(text) = fs::read_to_string(&manifest) else {
            log::info!("{}: no manifest; linked as is", obj.display());
            return Ok(());
        };
        for e in parse_manifest(&text)? {
            self.loops.push(e.loop_id.clone());
            if !self.backends.contains(&e.backend) {
                self.backends.push(e.backend.clone());
            }
            self.objects.insert((e.loop_id, e.backend, e.variant), e.object_path);
        }
        Ok(())
    }

    fn compile_args(&self) -> Vec<String> {
        let mut args = self.cfg.cpp_flags.clone();
        args.push(format!("-I{}", self.ws.include.display()));
        let mut dirs = BTreeSet::new();
        for u in &self.units {
            let dir = u.path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if dirs.insert(dir.to_path_buf()) {
                args.push(format!("-I{}", dir.display()));
            }
        }
        args
    }

    fn write_sources(&self) -> Result<(), DriverError> {
        let io = |p: &Path, e: std::io::Error| DriverError::Io(format!("{}: {e}", p.display()));
        for u in &self.units {
            let base = self.ws.src.join(format!("{}.c", u.stem));
            fs::write(&base, &u.art.base_file).map_err(|e| io(&base, e))?;
            for (id, files) in &u.art.loop_files {
                for v in Variant::ALL {
                    let p = self.ws.loop_source(id.as_str(), v);
                    fs::write(&p, files.get(v)).map_err(|e| io(&p, e))?;
                }
            }
        }
        Ok(())
    }

    /// Builds `variants` of every loop with every backend that supports the
    /// mode (or only `only`). A (loop, backend) pair is kept when all its
    /// variants built; loops the default backend cannot build are put back
    /// in place.
    fn compile_loops(&mut self, variants: &[Variant], only: Option<&BTreeSet<String>>) -> Result<(), DriverError> {
        self.write_sources()?;
        let mode = self.cfg.mode;
        let default = self.default_name();
        let args = self.compile_args();
        let energy_args = self.registry().energy_cflags.clone();
        let specs: Vec<String> = self
            .registry()
            .specs()
            .iter()
            .filter(|s| s.supports(mode))
            .filter(|s| s.is_default || only.is_none_or(|o| o.contains(&s.name)))
            .map(|s| s.name.clone())
            .collect();
        let mut jobs = Vec::new();
        for b in &specs {
            for id in &self.loops {
                for &v in variants {
                    let mut extra_args = args.clone();
                    if v == Variant::Energized {
                        extra_args.extend(energy_args.iter().cloned());
                    }
                    jobs.push(CompileJob {
                        backend: b.clone(),
                        mode,
                        source_path: self.ws.loop_source(id, v),
                        object_path: self.ws.loop_object(id, b, v),
                        unit: UnitRef::Loop { loop_id: id.clone(), variant: v },
                        extra_args,
                    });
                }
            }
        }
        let results = self.tc.compile_all(&jobs, self.cfg.pool_size);
        let mut unavailable = BTreeSet::new();
        let mut built: BTreeMap<(String, String), Vec<(Variant, PathBuf)>> = BTreeMap::new();
        for (job, r) in jobs.iter().zip(&results) {
            let UnitRef::Loop { loop_id, variant } = &job.unit else { continue };
            if r.unavailable() {
                if unavailable.insert(job.backend.clone()) {
                    log::warn!("{}", r.error.as_ref().map(|e| e.to_string()).unwrap_or_default());
                }
                continue;
            }
            if r.is_ok() {
                built
                    .entry((loop_id.clone(), job.backend.clone()))
                    .or_default()
                    .push((*variant, r.object_path.clone()));
            } else if let Some(e) = &r.error {
                log::warn!("{loop_id}: {e}");
                log::debug!("{}", r.diagnostics);
            }
        }
        if unavailable.contains(&default) {
            return Err(DriverError::Compile(format!(
                "default backend `{default}` is unavailable; choose another default in the backend config"
            )));
        }
        for ((id, b), objs) in built {
            if objs.len() != variants.len() {
                log::warn!("{id}: {b} built only some variants; not a candidate");
                continue;
            }
            for (v, p) in objs {
                self.objects.insert((id.clone(), b.clone(), v), p);
            }
        }
        for b in specs {
            if !self.backends.contains(&b) && self.objects.keys().any(|(_, ob, _)| *ob == b) {
                self.backends.push(b);
            }
        }
        let failed: BTreeSet<String> = self
            .loops
            .iter()
            .filter(|id| variants.iter().any(|&v| !self.objects.contains_key(&((*id).clone(), default.clone(), v))))
            .cloned()
            .collect();
        if !failed.is_empty() {
            self.demote(&failed)?;
        }
        Ok(())
    }

    /// Puts `failed` loops back into their base files.
    fn demote(&mut self, failed: &BTreeSet<String>) -> Result<(), DriverError> {
        for id in failed {
            log::warn!("{id}: the default backend cannot build it; left in place");
        }
        let min = self.cfg.min_loop_lines;
        for i in 0..self.units.len() {
            let u = &self.units[i];
            if !u.art.loop_files.keys().any(|id| failed.contains(id.as_str())) {
                continue;
            }
            let art = build_artifacts(u, min, failed)?;
            self.units[i].art = art;
        }
        self.loops.retain(|id| !failed.contains(id));
        self.objects.retain(|(id, _, _), _| !failed.contains(id));
        self.summary
            .skipped
            .extend(failed.iter().map(|id| (id.clone(), vec![Ineligibility::DefaultCompileFailed.tag()])));
        self.write_sources()
    }

    /// Base files compiled by the default backend in `mode`.
    fn compile_bases(&self, mode: CompileMode, tag: &str) -> Result<Vec<PathBuf>, DriverError> {
        let default = self.default_name();
        let args = self.compile_args();
        let jobs: Vec<CompileJob> = self
            .units
            .iter()
            .map(|u| CompileJob {
                backend: default.clone(),
                mode,
                source_path: self.ws.src.join(format!("{}.c", u.stem)),
                object_path: self.ws.obj.join(format!("{}.{tag}.o", u.stem)),
                unit: UnitRef::Base { stem: u.stem.clone() },
                extra_args: args.clone(),
            })
            .collect();
        let mut out = self.extra_objects.clone();
        for (job, r) in jobs.iter().zip(self.tc.compile_all(&jobs, self.cfg.pool_size)) {
            if !r.is_ok() {
                let e = r.error.map(|e| e.to_string()).unwrap_or_default();
                return Err(DriverError::Compile(format!("{}: {e}\n{}", job.source_path.display(), r.diagnostics)));
            }
            out.push(r.object_path);
        }
        Ok(out)
    }

    /// Links loop objects of `variant` chosen by `choose`; loops without
    /// such an object use the default backend's clean object.
    fn link_with(
        &self,
        choose: &dyn Fn(&str) -> String,
        variant: Variant,
        bases: &[PathBuf],
        extra_libs: &[String],
        out: &Path,
    ) -> Result<PathBuf, DriverError> {
        let default = self.default_name();
        let mut plan = SelectionPlan { choices: BTreeMap::new(), default_backend: default.clone() };
        let mut objs = BTreeMap::new();
        for id in &self.loops {
            let b = choose(id);
            let (b, obj) = match self.objects.get(&(id.clone(), b.clone(), variant)) {
                Some(o) => (b, o.clone()),
                None => {
                    let o = self
                        .objects
                        .get(&(id.clone(), default.clone(), Variant::Clean))
                        .ok_or_else(|| SynthError::MissingObject { loop_id: id.clone(), backend: default.clone() })?;
                    (default.clone(), o.clone())
                }
            };
            plan.choices.insert(id.clone(), Choice { backend: b.clone(), reason: Reason::Profiled });
            objs.insert((id.clone(), b), obj);
        }
        let mut lp = link_plan(&plan, &objs, bases, self.registry(), self.cfg.mode, &self.cfg.link_flags, out)?;
        lp.libs.extend(extra_libs.iter().cloned());
        Ok(link(&lp, self.registry(), self.tc.runner())?)
    }

    fn final_link(&mut self, mut plan: SelectionPlan, table: Option<TimingTable>) -> Result<(), DriverError> {
        demote_incompatible(&mut plan, self.registry(), self.cfg.mode);
        let bases = self.compile_bases(self.cfg.mode, "base")?;
        let choices = plan.choices.clone();
        let exe = self.link_with(&|id| choices[id].backend.clone(), Variant::Clean, &bases, &[], &self.output)?;
        let report = PathBuf::from(format!("{}.selection.csv", self.output.display()));
        emit_selection_report(&plan, table.as_ref(), &report)
            .map_err(|e| DriverError::Io(format!("{}: {e}", report.display())))?;
        self.summary.artifacts.extend([exe, report]);
        self.summary.plan = Some(plan);
        self.summary.table = table;
        Ok(())
    }

    fn profile_search(&mut self) -> Result<(), DriverError> {
        if !self.units.is_empty() {
            self.compile_loops(&[Variant::Clean, Variant::Timed], None)?;
        }
        let bases = self.compile_bases(self.cfg.mode, "base")?;
        let mut table = TimingTable::new(self.cfg.runs);
        for b in self.backends.clone() {
            let exe = self.ws.bin.join(format!("{}.profiled", c_identifier(&b)));
            if let Err(e) = self.link_with(&|_| b.clone(), Variant::Timed, &bases, &[], &exe) {
                log::warn!("{b}: profiled build failed to link; excluded ({e})");
                continue;
            }
            log::info!("profiling {b}");
            match run_profiled(self.tc.runner(), &exe, &self.cfg.input_args, self.cfg.runs, &self.ws.profile) {
                Ok(runs) => table.merge(&b, &runs),
                Err(e) => log::warn!("{b}: excluded ({e})"),
            }
        }
        let known: BTreeSet<&String> = self.loops.iter().collect();
        let stray: Vec<String> =
            table.loops().into_iter().filter(|l| !known.contains(&l.to_string())).map(str::to_string).collect();
        if !stray.is_empty() {
            log::warn!("timing records for unknown loops ignored: {}", stray.join(", "));
        }
        let dump = PathBuf::from(format!("{}.timing.tsv", self.output.display()));
        fs::write(&dump, table.dump()).map_err(|e| DriverError::Io(format!("{}: {e}", dump.display())))?;
        self.summary.artifacts.push(dump);
        let plan = select_by_profile(&table, &self.loops, &self.default_name());
        self.final_link(plan, Some(table))
    }

    fn predict(&mut self) -> Result<(), DriverError> {
        let advanced_only = self.cfg.action == Action::AdvancedProfile;
        let model = match (&self.cfg.model_path, advanced_only) {
            (Some(p), false) => Some(load_model(p)?),
            _ => None,
        };
        let expected = if self.cfg.mode == CompileMode::Parallel { "parallel" } else { "serial" };
        if let Some(m) = model.as_ref().filter(|m| m.mode != expected) {
            return Err(
                MlError::CorruptModel(format!("model is for {} builds, this build is {expected}", m.mode)).into()
            );
        }
        let template =
            self.registry().counter_provider.clone().ok_or_else(|| {
                ProfileError::ProviderUnavailable("no `counter_provider` in the backend config".into())
            })?;

        // Candidate objects: only the classes the model can predict.
        let classes: BTreeSet<String> = model.iter().flat_map(|m| m.classes.iter().cloned()).collect();
        self.compile_loops(&[Variant::Clean], Some(&classes))?;

        let default = self.default_name();
        let args = self.compile_args();
        let jobs: Vec<CompileJob> = self
            .loops
            .iter()
            .map(|id| CompileJob {
                backend: default.clone(),
                mode: CompileMode::BaselineO1,
                source_path: self.ws.loop_source(id, Variant::Energized),
                object_path: self.ws.obj.join(format!("{id}.baseline.o")),
                unit: UnitRef::Loop { loop_id: id.clone(), variant: Variant::Energized },
                extra_args: args.clone(),
            })
            .collect();
        let mut baseline_objs = BTreeMap::new();
        for (job, r) in jobs.iter().zip(self.tc.compile_all(&jobs, self.cfg.pool_size)) {
            if !r.is_ok() {
                return Err(DriverError::Compile(format!("baseline {}: {}", job.source_path.display(), r.diagnostics)));
            }
            if let UnitRef::Loop { loop_id, .. } = &job.unit {
                baseline_objs.insert((loop_id.clone(), default.clone()), r.object_path);
            }
        }
        let baseline_bases = self.compile_bases(CompileMode::BaselineO1, "baseline")?;
        let exe = self.ws.bin.join("baseline");
        let plan = SelectionPlan {
            choices: self
                .loops
                .iter()
                .map(|id| (id.clone(), Choice { backend: default.clone(), reason: Reason::Profiled }))
                .collect(),
            default_backend: default.clone(),
        };
        let lp = link_plan(
            &plan,
            &baseline_objs,
            &baseline_bases,
            self.registry(),
            CompileMode::Serial,
            &self.cfg.link_flags,
            &exe,
        )?;
        link(&lp, self.registry(), self.tc.runner())?;

        log::info!("collecting hardware counters");
        let csv = self.ws.profile.join("counters.csv");
        let sets = collect_counters(self.tc.runner(), &exe, &self.cfg.input_args, &template, &csv)?;
        if advanced_only {
            fs::copy(&csv, &self.output).map_err(|e| DriverError::Io(format!("{}: {e}", self.output.display())))?;
            self.summary.artifacts.push(self.output.clone());
            return Ok(());
        }
        let model = model.expect("model loaded for prediction");
        let known: BTreeSet<&String> = self.loops.iter().collect();
        let mut fvs = Vec::new();
        for set in sets.iter().filter(|s| known.contains(&s.loop_id)) {
            match normalize_pki(set, &model.schema) {
                Ok(fv) => fvs.push(fv),
                Err(e) => log::warn!("{e}; using the default backend"),
            }
        }
        let mut plan = select_by_prediction(&model, &fvs, &self.loops, &default)?;
        for (id, c) in plan.choices.iter_mut() {
            if !self.objects.contains_key(&(id.clone(), c.backend.clone(), Variant::Clean)) {
                log::warn!("{id}: predicted {} has no build; using {default}", c.backend);
                c.backend = default.clone();
            }
        }
        self.final_link(plan, None)
    }

    fn power_profile(&mut self) -> Result<(), DriverError> {
        self.compile_loops(&[Variant::Clean, Variant::Energized], None)?;
        let bases = self.compile_bases(self.cfg.mode, "base")?;
        let libs = self.registry().energy_libs.clone();
        let mut exes = BTreeMap::new();
        for b in self.backends.clone() {
            let exe = self.ws.bin.join(format!("{}.energized", c_identifier(&b)));
            match self.link_with(&|_| b.clone(), Variant::Energized, &bases, &libs, &exe) {
                Ok(p) => {
                    exes.insert(b, p);
                }
                Err(e) => log::warn!("{b}: energized build failed to link; excluded ({e})"),
            }
        }
        let records = run_energy_profile(
            self.tc.runner(),
            &exes,
            &self.registry().energy_tool,
            &self.cfg.input_args,
            &self.ws.profile,
        )?;
        let csv = PathBuf::from(format!("{}.energy.csv", self.output.display()));
        emit_energy_csv(&records, &csv)?;
        self.summary.artifacts.push(csv);
        self.summary.energy = records;
        Ok(())
    }
}

fn record_skipped(summary: &mut Summary, art: &GeneratedArtifacts) {
    for n in art.nests.iter().filter(|n| !n.eligible) {
        log::info!("{}: left in place ({})", n.loop_id, n.reason_tags().join(","));
        summary.skipped.push((n.loop_id.0.clone(), n.reason_tags()));
    }
}

fn extract_units(cfg: &RunConfig, registry: &Registry, sources: &[&PathBuf]) -> Result<Vec<Unit>, DriverError> {
    let pp = registry.preprocessor();
    let units = sources
        .par_iter()
        .enumerate()
        .map(|(i, path)| {
            let text = fs::read_to_string(path).map_err(|e| DriverError::Io(format!("{}: {e}", path.display())))?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let env = pp.as_deref().and_then(|cc| header_env(cc, path, &cfg.cpp_flags)).unwrap_or_default();
            let mut unit = Unit {
                path: path.to_path_buf(),
                stem,
                text,
                file_id: FileId(i as u32),
                env,
                art: GeneratedArtifacts {
                    stem: String::new(),
                    base_file: String::new(),
                    loop_files: BTreeMap::new(),
                    sigs: BTreeMap::new(),
                    extern_decls: Vec::new(),
                    nests: Vec::new(),
                },
            };
            unit.art = build_artifacts(&unit, cfg.min_loop_lines, &BTreeSet::new())?;
            Ok(unit)
        })
        .collect::<Result<Vec<Unit>, DriverError>>()?;
    let mut stems = BTreeSet::new();
    for u in &units {
        if !stems.insert(c_identifier(&u.stem)) {
            return Err(DriverError::Usage(format!("two sources share the name `{}`", u.stem)));
        }
    }
    Ok(units)
}

/// `-c`: base object at the output path plus a manifest of loop candidates.
fn compile_only(cfg: &RunConfig, tc: &Toolchain, src: &Path) -> Result<Summary, DriverError> {
    let stem = src.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let obj = cfg.output.clone().unwrap_or_else(|| PathBuf::from(format!("{stem}.o")));
    let mut p = Pipeline::new(cfg, tc, &obj)?;
    p.units = extract_units(cfg, &tc.registry, &[&src.to_path_buf()])?;
    for u in &p.units {
        p.loops.extend(u.art.loop_files.keys().map(|id| id.0.clone()));
        record_skipped(&mut p.summary, &u.art);
    }
    p.compile_loops(&[Variant::Clean, Variant::Timed], None)?;
    let bases = p.compile_bases(cfg.mode, "base")?;
    fs::copy(&bases[0], &obj).map_err(|e| DriverError::Io(format!("{}: {e}", obj.display())))?;
    let entries: Vec<ManifestEntry> = p
        .objects
        .iter()
        .map(|((loop_id, backend, variant), path)| ManifestEntry {
            loop_id: loop_id.clone(),
            backend: backend.clone(),
            object_path: std::path::absolute(path).unwrap_or_else(|_| path.clone()),
            variant: *variant,
        })
        .collect();
    let manifest = PathBuf::from(format!("{}{MANIFEST_SUFFIX}", obj.display()));
    fs::write(&manifest, render_manifest(&entries))
        .map_err(|e| DriverError::Io(format!("{}: {e}", manifest.display())))?;
    p.summary.artifacts.extend([obj, manifest]);
    Ok(p.summary)
}
