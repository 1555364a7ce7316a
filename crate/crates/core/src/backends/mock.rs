//! Deterministic stand-ins for compilers, executables and measurement tools.
//!
//! A mock backend "compiles" by writing a small text object that carries the
//! backend's synthetic per-loop timing profile. Linking concatenates objects
//! into a mock executable, which [`super::SystemRunner`] interprets: timed
//! loop objects append records to `$MC_PROFILE_OUT` for run `$MC_RUN_INDEX`.
//! The fake counter provider and energy tool wrap such runs the way real
//! tools wrap real binaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use sha2::{Digest, Sha256};

use super::process::{Invocation, Outcome, ProcessRunner};
use crate::extractor::Variant;

pub const OBJECT_MAGIC: &str = "MCMOCKOBJ 1";
pub const EXE_MAGIC: &str = "MCMOCKEXE 1";
pub const FAKE_COUNTERS: &str = "mc-fake-counters";
pub const FAKE_ENERGY: &str = "mc-fake-energy";

/// Executions of one loop: per run, the elapsed ns of each dynamic execution.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunProfile(pub Vec<Vec<u64>>);

impl RunProfile {
    /// `40+60/100/90`: runs separated by `/`, executions by `+`, `-` for a
    /// run in which the loop does not execute.
    pub fn parse(s: &str) -> Result<Self, String> {
        let runs = s
            .split('/')
            .map(|run| {
                if run.trim() == "-" {
                    return Ok(Vec::new());
                }
                run.split('+')
                    .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad execution time `{x}`")))
                    .collect()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RunProfile(runs))
    }

    /// Executions in run `index`; profiles shorter than the run count cycle.
    pub fn run(&self, index: usize) -> &[u64] {
        if self.0.is_empty() {
            return &[];
        }
        &self.0[index % self.0.len()]
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|r| {
                if r.is_empty() {
                    "-".to_string()
                } else {
                    r.iter().map(u64::to_string).collect::<Vec<_>>().join("+")
                }
            })
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Per-backend mock configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MockBehavior {
    pub profiles: BTreeMap<String, RunProfile>,
    /// Package and DRAM power in watts reported by the fake energy tool.
    pub power: Option<(f64, f64)>,
    /// Loop ids (or `*`) whose compilation fails.
    pub fail_compile: BTreeSet<String>,
    /// Executables containing an object of this backend exit nonzero.
    pub crash: bool,
}

pub const DEFAULT_POWER: (f64, f64) = (40.0, 5.0);

impl MockBehavior {
    /// `loop_id=profile;loop_id=profile`.
    pub fn add_profile(&mut self, value: &str) -> Result<(), String> {
        for entry in value.split(';').filter(|e| !e.trim().is_empty()) {
            let (id, spec) = entry.split_once('=').ok_or_else(|| format!("profile entry `{entry}` lacks `=`"))?;
            self.profiles.insert(id.trim().to_string(), RunProfile::parse(spec)?);
        }
        Ok(())
    }

    /// `pkg_W dram_W`.
    pub fn set_power(&mut self, value: &str) -> Result<(), String> {
        let v: Vec<f64> = value
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| format!("bad power `{x}`")))
            .collect::<Result<_, _>>()?;
        let [pkg, dram] = v[..] else { return Err("power needs `pkg_W dram_W`".into()) };
        self.power = Some((pkg, dram));
        Ok(())
    }

    pub fn fails(&self, loop_id: &str) -> bool {
        self.fail_compile.contains("*") || self.fail_compile.contains(loop_id)
    }
}

/// Contents of a mock object file.
#[derive(Debug, Clone, PartialEq)]
pub struct MockObject {
    pub backend: String,
    pub mode: String,
    /// `loop <id> <variant>` or `base <stem>`.
    pub unit: String,
    pub profile: Option<RunProfile>,
    pub power: (f64, f64),
    pub crash: bool,
    pub source_sha256: String,
}

impl MockObject {
    pub fn loop_unit(&self) -> Option<(&str, Variant)> {
        let mut w = self.unit.split_whitespace();
        if w.next() != Some("loop") {
            return None;
        }
        let id = w.next()?;
        Some((id, w.next()?.parse().ok()?))
    }

    pub fn render(&self) -> String {
        let mut s = format!("{OBJECT_MAGIC}\nbackend {}\nmode {}\nunit {}\n", self.backend, self.mode, self.unit);
        if let Some(p) = &self.profile {
            let _ = writeln!(s, "profile {}", p.render());
        }
        let _ = writeln!(s, "power {} {}", self.power.0, self.power.1);
        if self.crash {
            s.push_str("crash\n");
        }
        let _ = writeln!(s, "source {}", self.source_sha256);
        s
    }

    pub fn parse(text: &str) -> Option<MockObject> {
        let mut lines = text.lines();
        if lines.next()? != OBJECT_MAGIC {
            return None;
        }
        let mut o = MockObject {
            backend: String::new(),
            mode: String::new(),
            unit: String::new(),
            profile: None,
            power: DEFAULT_POWER,
            crash: false,
            source_sha256: String::new(),
        };
        for l in lines {
            let (k, v) = l.split_once(' ').unwrap_or((l, ""));
            match k {
                "backend" => o.backend = v.to_string(),
                "mode" => o.mode = v.to_string(),
                "unit" => o.unit = v.to_string(),
                "profile" => o.profile = RunProfile::parse(v).ok(),
                "power" => {
                    let mut b = MockBehavior::default();
                    b.set_power(v).ok()?;
                    o.power = b.power?;
                }
                "crash" => o.crash = true,
                "source" => o.source_sha256 = v.to_string(),
                _ => return None,
            }
        }
        Some(o)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn is_mock_executable(path: &Path) -> bool {
    let Ok(mut f) = fs::File::open(path) else { return false };
    let mut head = [0u8; EXE_MAGIC.len()];
    std::io::Read::read_exact(&mut f, &mut head).is_ok() && head == EXE_MAGIC.as_bytes()
}

/// Concatenates mock objects into a mock executable.
pub fn link(objects: &[&Path], output: &Path) -> Result<(), String> {
    let mut exe = format!("{EXE_MAGIC}\n");
    for o in objects {
        let text = fs::read_to_string(o).map_err(|e| format!("{}: {e}", o.display()))?;
        if MockObject::parse(&text).is_none() {
            return Err(format!("{}: not a mock object", o.display()));
        }
        let name = o.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = writeln!(exe, "object {name}");
        exe.push_str(&text);
        exe.push_str("end\n");
    }
    fs::write(output, exe).map_err(|e| format!("{}: {e}", output.display()))
}

/// Objects of a mock executable, in link order.
pub fn read_executable(path: &Path) -> Option<Vec<MockObject>> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != EXE_MAGIC {
        return None;
    }
    let mut out = Vec::new();
    let mut block = String::new();
    for l in lines {
        if l.starts_with("object ") {
            block.clear();
        } else if l == "end" {
            out.push(MockObject::parse(&block)?);
        } else {
            block.push_str(l);
            block.push('\n');
        }
    }
    Some(out)
}

static ACTIVE_RUNS: AtomicUsize = AtomicUsize::new(0);
static PEAK_RUNS: AtomicUsize = AtomicUsize::new(0);

/// Highest number of mock executables that ever ran at the same time.
pub fn peak_concurrent_runs() -> usize {
    PEAK_RUNS.load(Ordering::SeqCst)
}

fn append(path: &str, text: &str) -> std::io::Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(text.as_bytes())
}

/// Runs a mock executable in-process.
pub fn execute(path: &Path, inv: &Invocation) -> Outcome {
    let now = ACTIVE_RUNS.fetch_add(1, Ordering::SeqCst) + 1;
    PEAK_RUNS.fetch_max(now, Ordering::SeqCst);
    let out = execute_inner(path, inv);
    ACTIVE_RUNS.fetch_sub(1, Ordering::SeqCst);
    out
}

fn execute_inner(path: &Path, inv: &Invocation) -> Outcome {
    let Some(objects) = read_executable(path) else {
        return Outcome::failed(126, format!("{}: corrupt mock executable", path.display()));
    };
    let env = |k: &str| inv.env.get(k).cloned().or_else(|| std::env::var(k).ok());
    let run_index: usize = env("MC_RUN_INDEX").and_then(|v| v.parse().ok()).unwrap_or(0);
    if let Some(trace) = env("MC_MOCK_TRACE") {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let _ = append(&trace, &format!("run {name} {run_index} {}\n", inv.args.join(" ")));
    }
    if objects.iter().any(|o| o.crash) {
        return Outcome::failed(1, "mock executable crashed");
    }
    let mut records = String::new();
    let mut loops = 0;
    for o in &objects {
        let Some((id, variant)) = o.loop_unit() else { continue };
        loops += 1;
        if variant != Variant::Timed {
            continue;
        }
        for ns in o.profile.as_ref().map(|p| p.run(run_index)).unwrap_or(&[]) {
            let _ = writeln!(records, "MC\t{id}\t{ns}");
        }
    }
    if let Some(out) = env("MC_PROFILE_OUT").filter(|p| !p.is_empty()) {
        if let Err(e) = append(&out, &records) {
            return Outcome::failed(1, format!("{out}: {e}"));
        }
    }
    Outcome { code: Some(0), stdout: format!("mock program: {loops} loops\n").into_bytes(), stderr: Vec::new() }
}

/// Splits `[flags...] -o <out> <exe> [args...]` style tool arguments.
/// Options, executable and program arguments of a tool invocation.
type ToolArgs<'a> = (BTreeMap<String, &'a str>, &'a str, &'a [String]);

fn tool_args<'a>(args: &'a [String], flags: &[&str]) -> Result<ToolArgs<'a>, String> {
    let mut opts = BTreeMap::new();
    let mut i = 0;
    while i < args.len() && args[i].starts_with('-') {
        let key = args[i].as_str();
        if !flags.contains(&key) {
            return Err(format!("unknown option {key}"));
        }
        let v = args.get(i + 1).ok_or_else(|| format!("{key} needs a value"))?;
        opts.insert(key.to_string(), v.as_str());
        i += 2;
    }
    let exe = args.get(i).ok_or("missing executable")?;
    Ok((opts, exe, &args[i + 1..]))
}

/// `mc-fake-counters --replay <csv> -o <out_csv> <exe> [args...]`: runs the
/// executable and writes the replayed interchange CSV.
pub fn fake_counters(runner: &dyn ProcessRunner, inv: &Invocation) -> Outcome {
    let (opts, exe, args) = match tool_args(&inv.args, &["--replay", "-o"]) {
        Ok(v) => v,
        Err(e) => return Outcome::failed(2, format!("{FAKE_COUNTERS}: {e}")),
    };
    let (Some(replay), Some(out)) = (opts.get("--replay"), opts.get("-o")) else {
        return Outcome::failed(2, format!("{FAKE_COUNTERS}: --replay and -o are required"));
    };
    let run = Invocation { program: exe.to_string(), args: args.to_vec(), ..inv.clone() };
    match runner.run(&run) {
        Ok(o) if o.success() => {}
        Ok(o) => return o,
        Err(e) => return Outcome::failed(127, e.to_string()),
    }
    match fs::copy(replay, out) {
        Ok(_) => Outcome::ok(),
        Err(e) => Outcome::failed(1, format!("{replay}: {e}")),
    }
}

/// `mc-fake-energy -o <out> <exe> [args...]`: runs a mock executable and
/// writes region blocks for its energized loops in the marker-mode report
/// layout of the real tool. Runtime is the sum of the first run's executions.
pub fn fake_energy(runner: &dyn ProcessRunner, inv: &Invocation) -> Outcome {
    let (opts, exe, args) = match tool_args(&inv.args, &["-o"]) {
        Ok(v) => v,
        Err(e) => return Outcome::failed(2, format!("{FAKE_ENERGY}: {e}")),
    };
    let Some(out) = opts.get("-o") else { return Outcome::failed(2, format!("{FAKE_ENERGY}: -o is required")) };
    let Some(objects) = read_executable(Path::new(exe)) else {
        return Outcome::failed(2, format!("{FAKE_ENERGY}: {exe} is not a mock executable"));
    };
    let run = Invocation { program: exe.to_string(), args: args.to_vec(), ..inv.clone() };
    match runner.run(&run) {
        Ok(o) if o.success() => {}
        Ok(o) => return o,
        Err(e) => return Outcome::failed(127, e.to_string()),
    }
    let mut report = String::new();
    for o in &objects {
        let Some((id, Variant::Energized)) = o.loop_unit() else { continue };
        let execs = o.profile.as_ref().map(|p| p.run(0)).unwrap_or(&[]);
        if execs.is_empty() {
            continue;
        }
        let runtime = execs.iter().sum::<u64>() as f64 * 1e-9;
        let (pkg_w, dram_w) = o.power;
        report.push_str(&region_block(id, execs.len(), runtime, runtime * pkg_w, runtime * dram_w));
    }
    match fs::write(out, report) {
        Ok(()) => Outcome::ok(),
        Err(e) => Outcome::failed(1, format!("{out}: {e}")),
    }
}

fn region_block(region: &str, calls: usize, runtime: f64, pkg: f64, dram: f64) -> String {
    let rule = "+---------------------+------------+\n";
    let row = |k: &str, v: String| format!("| {k:^19} | {v:>10} |\n");
    let mut s = String::new();
    s.push_str("--------------------------------------------------------------------------------\n");
    let _ = writeln!(s, "Region {region}, Group 1: ENERGY");
    s.push_str(rule);
    s.push_str(&row("Region Info", "HWThread 0".into()));
    s.push_str(rule);
    s.push_str(&row("RDTSC Runtime [s]", runtime.to_string()));
    s.push_str(&row("call count", calls.to_string()));
    s.push_str(rule);
    s.push_str(rule);
    s.push_str(&row("Metric", "HWThread 0".into()));
    s.push_str(rule);
    s.push_str(&row("Runtime (RDTSC) [s]", runtime.to_string()));
    s.push_str(&row("Energy [J]", pkg.to_string()));
    s.push_str(&row("Power [W]", if runtime > 0.0 { (pkg / runtime).to_string() } else { "0".into() }));
    s.push_str(&row("Energy DRAM [J]", dram.to_string()));
    s.push_str(&row("Power DRAM [W]", if runtime > 0.0 { (dram / runtime).to_string() } else { "0".into() }));
    s.push_str(rule);
    s
}
