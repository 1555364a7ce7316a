use std::fmt;
use std::str::FromStr;

use super::mock::MockBehavior;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BackendKind {
    Direct,
    SourceToSource,
    Mock,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Direct => "direct",
            BackendKind::SourceToSource => "source_to_source",
            BackendKind::Mock => "mock",
        }
    }
}

impl FromStr for BackendKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(BackendKind::Direct),
            "source_to_source" => Ok(BackendKind::SourceToSource),
            "mock" => Ok(BackendKind::Mock),
            _ => Err(format!("unknown backend kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompileMode {
    Serial,
    /// Auto-parallelization.
    Parallel,
    OpenMp,
    /// Unoptimized build of the default backend used for counter collection.
    BaselineO1,
}

impl CompileMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CompileMode::Serial => "serial",
            CompileMode::Parallel => "parallel",
            CompileMode::OpenMp => "openmp",
            CompileMode::BaselineO1 => "baseline_o1",
        }
    }
}

impl fmt::Display for CompileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One candidate code optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendSpec {
    pub name: String,
    pub kind: BackendKind,
    /// argv template with `{input}`, `{output}` and a standalone `{flags}`.
    pub compile_template: String,
    pub flags_serial: Vec<String>,
    /// Appended to the serial flags in auto-parallel mode; empty when the
    /// backend cannot auto-parallelize.
    pub flags_parallel: Vec<String>,
    /// Appended to the serial flags in OpenMP mode.
    pub flags_openmp: Vec<String>,
    pub link_libs: Vec<String>,
    pub is_default: bool,
    /// Direct backend compiling the output of a source-to-source backend.
    pub downstream: Option<String>,
    /// Backends sharing a group have link-compatible OpenMP runtimes.
    pub compat_group: String,
    /// Flags of the unoptimized counter-collection build.
    pub baseline_flags: Vec<String>,
    /// Lines placed around the nest before a source-to-source transform.
    pub region_markers: Option<(String, String)>,
    pub mock: Option<MockBehavior>,
}

impl BackendSpec {
    fn new(name: &str, kind: BackendKind, template: &str, serial: &str, parallel: &str, openmp: &str) -> Self {
        BackendSpec {
            name: name.to_string(),
            kind,
            compile_template: template.to_string(),
            flags_serial: words(serial),
            flags_parallel: words(parallel),
            flags_openmp: words(openmp),
            link_libs: Vec::new(),
            is_default: false,
            downstream: None,
            compat_group: name.to_string(),
            baseline_flags: vec!["-O1".to_string()],
            region_markers: None,
            mock: None,
        }
    }

    pub fn supports(&self, mode: CompileMode) -> bool {
        match mode {
            CompileMode::Parallel => !self.flags_parallel.is_empty(),
            CompileMode::BaselineO1 => self.is_default,
            CompileMode::Serial | CompileMode::OpenMp => true,
        }
    }

    pub fn flags_for(&self, mode: CompileMode) -> Vec<String> {
        match mode {
            CompileMode::Serial => self.flags_serial.clone(),
            CompileMode::Parallel => [&self.flags_serial[..], &self.flags_parallel[..]].concat(),
            CompileMode::OpenMp => [&self.flags_serial[..], &self.flags_openmp[..]].concat(),
            CompileMode::BaselineO1 => self.baseline_flags.clone(),
        }
    }

    /// Program named by the template, also used as the link driver.
    pub fn driver(&self) -> String {
        shell_words::split(&self.compile_template).ok().and_then(|w| w.into_iter().next()).unwrap_or_default()
    }

    /// The compile argv for one file.
    pub fn expand(&self, input: &str, output: &str, flags: &[String]) -> Vec<String> {
        expand_template(&self.compile_template, &[("{input}", input), ("{output}", output)], "{flags}", flags)
    }
}

/// Splits `template` into argv, replacing `placeholders` inside words and
/// splicing `list` in place of the standalone word `list_placeholder`.
pub fn expand_template(
    template: &str,
    placeholders: &[(&str, &str)],
    list_placeholder: &str,
    list: &[String],
) -> Vec<String> {
    let words = shell_words::split(template).unwrap_or_else(|_| words(template));
    let mut out = Vec::new();
    for w in words {
        if w == list_placeholder {
            out.extend(list.iter().cloned());
            continue;
        }
        let mut w = w;
        for (k, v) in placeholders {
            w = w.replace(k, v);
        }
        out.push(w);
    }
    out
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// The candidate optimizers of the reference setup, with icc as default.
pub fn default_registry() -> Vec<BackendSpec> {
    use BackendKind::*;
    let mut clang = BackendSpec::new(
        "clang",
        Direct,
        "clang {flags} -c {input} -o {output}",
        "-Ofast -march=native",
        "",
        "-fopenmp",
    );
    clang.compat_group = "intel".into();
    let mut gcc =
        BackendSpec::new("gcc", Direct, "gcc {flags} -c {input} -o {output}", "-Ofast -march=native", "", "-fopenmp");
    gcc.compat_group = "gnu".into();
    let mut icc =
        BackendSpec::new("icc", Direct, "icc {flags} -c {input} -o {output}", "-Ofast -xHost", "-parallel", "-qopenmp");
    icc.is_default = true;
    icc.compat_group = "intel".into();
    icc.link_libs = words("-limf -lsvml -lirc");
    let mut pgcc = BackendSpec::new(
        "pgcc",
        Direct,
        "pgcc {flags} -c {input} -o {output}",
        "-fast -tp=skylake -Mllvm",
        "-Mconcur",
        "-mp",
    );
    pgcc.compat_group = "pgi".into();
    pgcc.link_libs = words("-lpgmath -lpgc");
    let mut pluto =
        BackendSpec::new("pluto", SourceToSource, "polycc {input} {flags} -o {output}", "--tile", "--parallel", "");
    pluto.downstream = Some("icc".into());
    pluto.compat_group = "intel".into();
    pluto.region_markers = Some(("#pragma scop".into(), "#pragma endscop".into()));
    let mut polly = BackendSpec::new(
        "polly",
        Direct,
        "pollycc {flags} -c {input} -o {output}",
        "-O3 -march=native -polly -polly-tiling -polly-vectorizer=stripmine",
        "-polly-parallel",
        "-fopenmp",
    );
    polly.compat_group = "intel".into();
    vec![clang, gcc, icc, pgcc, pluto, polly]
}

pub const DEFAULT_ENERGY_TOOL: &str = "likwid-perfctr -C 0 -g ENERGY -m -o {out} {exe} {args}";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("backend config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

/// Backends of one run plus the measurement tool templates.
#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    specs: Vec<BackendSpec>,
    /// Counter provider template with `{exe}`, `{args}`, `{out_csv}`.
    pub counter_provider: Option<String>,
    /// Energy tool template with `{exe}`, `{args}`, `{out}`.
    pub energy_tool: String,
    /// Extra compile flags and link libraries of energized builds.
    pub energy_cflags: Vec<String>,
    pub energy_libs: Vec<String>,
    /// Preprocessor used to learn header names; defaults to the default
    /// backend's driver when that compiles directly.
    pub preprocessor: Option<String>,
}

impl Default for Registry {
    fn default() -> Self {
        Registry {
            specs: default_registry(),
            counter_provider: None,
            energy_tool: DEFAULT_ENERGY_TOOL.into(),
            energy_cflags: vec!["-DMC_ENERGY_PERFMON".into()],
            energy_libs: vec!["-llikwid".into()],
            preprocessor: None,
        }
    }
}

impl Registry {
    /// The default registry with `config` applied.
    pub fn from_config(config: &str) -> Result<Self, ConfigError> {
        let mut r = Registry::default();
        r.apply_config(config)?;
        Ok(r)
    }

    pub fn specs(&self) -> &[BackendSpec] {
        &self.specs
    }

    pub fn get(&self, name: &str) -> Option<&BackendSpec> {
        self.specs.iter().find(|s| s.name == name)
    }

    pub fn default_backend(&self) -> &BackendSpec {
        self.specs.iter().find(|s| s.is_default).expect("registry has a default backend")
    }

    pub fn names(&self) -> Vec<&str> {
        self.specs.iter().map(|s| s.name.as_str()).collect()
    }

    /// Preprocessor for header discovery, if any.
    pub fn preprocessor(&self) -> Option<String> {
        self.preprocessor.clone().or_else(|| {
            let d = self.default_backend();
            (d.kind == BackendKind::Direct).then(|| d.driver())
        })
    }

    /// Drops backends, never the default one.
    pub fn exclude(&mut self, name: &str) {
        self.specs.retain(|s| s.is_default || s.name != name);
    }

    /// Applies a line-oriented config:
    ///
    /// ```text
    /// name<TAB>kind<TAB>template<TAB>serial|parallel|openmp<TAB>link_libs
    /// set<TAB>default|counter_provider|energy_tool|energy_cflags|energy_libs|preprocessor<TAB>value
    /// attr<TAB>name<TAB>downstream|compat_group|baseline_flags|region_markers<TAB>value
    /// attr<TAB>name<TAB>profile|power|fail|crash<TAB>value      (mock backends)
    /// remove<TAB>name
    /// clear
    /// ```
    pub fn apply_config(&mut self, config: &str) -> Result<(), ConfigError> {
        for (i, raw) in config.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ConfigError { line, message };
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            match fields[0] {
                "clear" => self.specs.clear(),
                "remove" => {
                    let name = fields.get(1).ok_or_else(|| err("remove needs a name".into()))?;
                    self.specs.retain(|s| s.name != *name);
                }
                "set" => {
                    let [_, key, value] = fields[..] else { return Err(err("expected set<TAB>key<TAB>value".into())) };
                    match key {
                        "default" => {
                            if self.get(value).is_none() {
                                return Err(err(format!("unknown backend `{value}`")));
                            }
                            for s in &mut self.specs {
                                s.is_default = s.name == value;
                            }
                        }
                        "counter_provider" => self.counter_provider = Some(value.to_string()),
                        "energy_tool" => self.energy_tool = value.to_string(),
                        "energy_cflags" => self.energy_cflags = words(value),
                        "energy_libs" => self.energy_libs = words(value),
                        "preprocessor" => self.preprocessor = Some(value.to_string()).filter(|v| !v.is_empty()),
                        _ => return Err(err(format!("unknown setting `{key}`"))),
                    }
                }
                "attr" => {
                    let [_, name, key, value] = fields[..] else {
                        return Err(err("expected attr<TAB>name<TAB>key<TAB>value".into()));
                    };
                    let spec = self
                        .specs
                        .iter_mut()
                        .find(|s| s.name == name)
                        .ok_or_else(|| err(format!("unknown backend `{name}`")))?;
                    match key {
                        "downstream" => spec.downstream = Some(value.to_string()),
                        "compat_group" => spec.compat_group = value.to_string(),
                        "baseline_flags" => spec.baseline_flags = words(value),
                        "region_markers" => {
                            let (a, b) = value
                                .split_once('|')
                                .ok_or_else(|| err("region_markers needs `before|after`".into()))?;
                            spec.region_markers = Some((a.to_string(), b.to_string()));
                        }
                        "profile" | "power" | "fail" | "crash" => {
                            let m = spec.mock.get_or_insert_with(MockBehavior::default);
                            match key {
                                "profile" => m.add_profile(value).map_err(err)?,
                                "power" => m.set_power(value).map_err(err)?,
                                "fail" => m.fail_compile.extend(value.split_whitespace().map(str::to_string)),
                                _ => m.crash = value == "true",
                            }
                        }
                        _ => return Err(err(format!("unknown attribute `{key}`"))),
                    }
                }
                _ => {
                    let spec = parse_spec_line(&fields).map_err(err)?;
                    match self.specs.iter_mut().find(|s| s.name == spec.name) {
                        Some(old) => {
                            let is_default = old.is_default;
                            *old = BackendSpec { is_default, ..spec };
                        }
                        None => self.specs.push(spec),
                    }
                }
            }
        }
        self.validate().map_err(|message| ConfigError { line: 0, message })
    }

    /// Registry-wide invariants.
    pub fn validate(&self) -> Result<(), String> {
        let defaults = self.specs.iter().filter(|s| s.is_default).count();
        if defaults != 1 {
            return Err(format!("expected exactly one default backend, found {defaults}"));
        }
        for s in &self.specs {
            for p in ["{input}", "{output}", "{flags}"] {
                if !s.compile_template.contains(p) {
                    return Err(format!("{}: template lacks {p}", s.name));
                }
            }
            if s.kind == BackendKind::SourceToSource {
                let d = s.downstream.as_deref().ok_or_else(|| format!("{}: no downstream backend", s.name))?;
                match self.get(d) {
                    Some(ds) if ds.kind != BackendKind::SourceToSource => {}
                    _ => return Err(format!("{}: downstream `{d}` is not a direct backend", s.name)),
                }
            }
        }
        if self.default_backend().kind == BackendKind::SourceToSource {
            return Err("the default backend must compile directly".into());
        }
        Ok(())
    }
}

fn parse_spec_line(fields: &[&str]) -> Result<BackendSpec, String> {
    let [name, kind, template, flags, libs] = fields[..] else {
        return Err(format!("expected 5 tab-separated fields, found {}", fields.len()));
    };
    let kind: BackendKind = kind.parse()?;
    let modes: Vec<&str> = flags.split('|').collect();
    let [serial, parallel, openmp] = modes[..] else {
        return Err("flags must be `serial|parallel|openmp`".into());
    };
    let mut spec = BackendSpec::new(name, kind, template, serial, parallel, openmp);
    spec.link_libs = words(libs);
    if kind == BackendKind::Mock {
        spec.mock = Some(MockBehavior::default());
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_splices_flags() {
        let r = Registry::default();
        let gcc = r.get("gcc").unwrap();
        assert_eq!(
            gcc.expand("a.c", "a.o", &gcc.flags_for(CompileMode::Serial)),
            ["gcc", "-Ofast", "-march=native", "-c", "a.c", "-o", "a.o"]
        );
        assert_eq!(gcc.driver(), "gcc");
    }

    #[test]
    fn parallel_and_openmp_extend_serial() {
        let r = Registry::default();
        let icc = r.get("icc").unwrap();
        assert_eq!(icc.flags_for(CompileMode::Parallel), ["-Ofast", "-xHost", "-parallel"]);
        assert_eq!(icc.flags_for(CompileMode::OpenMp), ["-Ofast", "-xHost", "-qopenmp"]);
        assert_eq!(icc.flags_for(CompileMode::BaselineO1), ["-O1"]);
        assert!(!r.get("gcc").unwrap().supports(CompileMode::Parallel));
    }

    #[test]
    fn config_adds_overrides_and_sets_default() {
        let cfg = "# desk setup\n\
                   gcc\tdirect\tgcc-12 {flags} -c {input} -o {output}\t-O3|-ftree-parallelize-loops=4|-fopenmp\t-lgomp\n\
                   tcc\tdirect\ttcc {flags} -c {input} -o {output}\t-O2||\t\n\
                   set\tdefault\tgcc\n\
                   set\tcounter_provider\tperf-wrap {exe} {args} {out_csv}\n\
                   attr\ttcc\tcompat_group\tgnu\n\
                   remove\tpgcc\n";
        let r = Registry::from_config(cfg).unwrap();
        assert_eq!(r.default_backend().name, "gcc");
        assert_eq!(r.get("gcc").unwrap().flags_parallel, ["-ftree-parallelize-loops=4"]);
        assert_eq!(r.get("gcc").unwrap().link_libs, ["-lgomp"]);
        assert_eq!(r.get("tcc").unwrap().compat_group, "gnu");
        assert!(r.get("pgcc").is_none());
        assert_eq!(r.counter_provider.as_deref(), Some("perf-wrap {exe} {args} {out_csv}"));
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let e = Registry::from_config("\nbad\tline\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = Registry::from_config("x\tdirect\tx -c {input}\t||\t\n").unwrap_err();
        assert!(e.message.contains("{output}"), "{e}");
        let e = Registry::from_config("clear\n").unwrap_err();
        assert!(e.message.contains("default"));
    }

    #[test]
    fn exclude_keeps_default() {
        let mut r = Registry::default();
        r.exclude("icc");
        r.exclude("pgcc");
        assert!(r.get("icc").is_some());
        assert!(r.get("pgcc").is_none());
    }
}
