//! Per-loop package and DRAM energy of every backend's build.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::backends::{Invocation, ProcessRunner, RunError};
use crate::profiler::{exclusive, tool_argv};

pub const CSV_HEADER: &str = "loop_id,backend,pkg_energy_J,dram_energy_J,elapsed_s,avg_power_W";

#[derive(Debug, thiserror::Error)]
pub enum EnergyError {
    #[error("energy tool unavailable: {0}; install it or set `energy_tool` in the backend config")]
    ToolUnavailable(String),
    #[error("region report: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyRecord {
    pub loop_id: String,
    pub backend: String,
    pub pkg_energy_j: f64,
    pub dram_energy_j: f64,
    pub elapsed_s: f64,
    /// `(pkg + dram) / elapsed`, or 0 when nothing elapsed.
    pub avg_power_w: f64,
    pub zero_elapsed: bool,
}

impl EnergyRecord {
    pub fn new(loop_id: &str, backend: &str, pkg_energy_j: f64, dram_energy_j: f64, elapsed_s: f64) -> Self {
        let zero_elapsed = elapsed_s <= 0.0;
        let avg_power_w = if zero_elapsed { 0.0 } else { (pkg_energy_j + dram_energy_j) / elapsed_s };
        EnergyRecord {
            loop_id: loop_id.to_string(),
            backend: backend.to_string(),
            pkg_energy_j,
            dram_energy_j,
            elapsed_s,
            avg_power_w,
            zero_elapsed,
        }
    }
}

/// Measurements of one marker region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionEnergy {
    pub region: String,
    pub pkg_energy_j: f64,
    pub dram_energy_j: f64,
    pub runtime_s: f64,
}

#[derive(Default)]
struct Partial {
    region: String,
    pkg: Option<f64>,
    dram: Option<f64>,
    runtime: Option<f64>,
}

impl Partial {
    fn finish(self) -> Result<RegionEnergy, EnergyError> {
        let missing = |what: &str| EnergyError::Parse(format!("region {}: no `{what}` row", self.region));
        Ok(RegionEnergy {
            pkg_energy_j: self.pkg.ok_or_else(|| missing("Energy [J]"))?,
            dram_energy_j: self.dram.ok_or_else(|| missing("Energy DRAM [J]"))?,
            runtime_s: self.runtime.ok_or_else(|| missing("Runtime (RDTSC) [s]"))?,
            region: self.region,
        })
    }
}

/// Reads `Region <name>, Group ...` blocks and their `| key | value |`
/// rows; the first value column is used.
pub fn parse_region_report(text: &str) -> Result<Vec<RegionEnergy>, EnergyError> {
    let mut out = Vec::new();
    let mut cur: Option<Partial> = None;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("Region ") {
            if let Some(p) = cur.take() {
                out.push(p.finish()?);
            }
            let name = rest.split(',').next().unwrap_or_default().trim();
            if name.is_empty() {
                return Err(EnergyError::Parse(format!("unnamed region in `{line}`")));
            }
            cur = Some(Partial { region: name.to_string(), ..Default::default() });
            continue;
        }
        let Some(p) = cur.as_mut() else { continue };
        let cells: Vec<&str> = line.split('|').map(str::trim).collect();
        if cells.len() < 4 {
            continue;
        }
        let slot = match cells[1] {
            "Energy [J]" => &mut p.pkg,
            "Energy DRAM [J]" => &mut p.dram,
            "Runtime (RDTSC) [s]" => &mut p.runtime,
            _ => continue,
        };
        let v: f64 = cells[2]
            .parse()
            .map_err(|_| EnergyError::Parse(format!("region {}: bad value `{}`", p.region, cells[2])))?;
        if v < 0.0 {
            return Err(EnergyError::Parse(format!("region {}: negative `{}`", p.region, cells[1])));
        }
        *slot = Some(v);
    }
    if let Some(p) = cur {
        out.push(p.finish()?);
    }
    Ok(out)
}

/// Header plus rows sorted by (loop, backend).
pub fn render_energy_csv(records: &[EnergyRecord]) -> String {
    let mut sorted: Vec<&EnergyRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.loop_id, &a.backend).cmp(&(&b.loop_id, &b.backend)));
    let mut s = format!("{CSV_HEADER}\n");
    for r in sorted {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.loop_id, r.backend, r.pkg_energy_j, r.dram_energy_j, r.elapsed_s, r.avg_power_w
        );
    }
    s
}

pub fn emit_energy_csv(records: &[EnergyRecord], path: &Path) -> Result<(), EnergyError> {
    fs::write(path, render_energy_csv(records)).map_err(|e| EnergyError::Io(format!("{}: {e}", path.display())))
}

/// Runs every backend's energized executable under the energy tool, one at
/// a time. A backend whose report cannot be read is left out.
pub fn run_energy_profile(
    runner: &dyn ProcessRunner,
    executables: &BTreeMap<String, PathBuf>,
    tool_template: &str,
    input_args: &[String],
    workdir: &Path,
) -> Result<Vec<EnergyRecord>, EnergyError> {
    let mut records = Vec::new();
    for (backend, exe) in executables {
        let out = workdir.join(format!("{backend}.energy.txt"));
        let _ = fs::remove_file(&out);
        let (exe_s, out_s) = (exe.display().to_string(), out.display().to_string());
        let argv = tool_argv(tool_template, &[("{exe}", &exe_s), ("{out}", &out_s)], input_args);
        let inv =
            Invocation::from_argv(&argv).ok_or_else(|| EnergyError::ToolUnavailable("empty tool template".into()))?;
        let outcome = {
            let _guard = exclusive();
            runner.run(&inv)
        };
        match outcome {
            Ok(o) if o.success() => {}
            Ok(o) => {
                log::warn!("{backend}: energy run failed ({:?}): {}", o.code, o.stderr_text().trim());
                continue;
            }
            Err(RunError::NotFound(p)) => return Err(EnergyError::ToolUnavailable(format!("`{p}` not found"))),
            Err(e) => return Err(EnergyError::Io(e.to_string())),
        }
        let parsed = fs::read_to_string(&out)
            .map_err(|e| EnergyError::Parse(format!("{out_s}: {e}")))
            .and_then(|t| parse_region_report(&t));
        match parsed {
            Ok(regions) => {
                for r in regions {
                    let rec = EnergyRecord::new(&r.region, backend, r.pkg_energy_j, r.dram_energy_j, r.runtime_s);
                    if rec.zero_elapsed {
                        log::warn!("{}/{backend}: zero elapsed time; power reported as 0", rec.loop_id);
                    }
                    records.push(rec);
                }
            }
            Err(e) => log::warn!("{backend}: {e}; rows omitted"),
        }
    }
    Ok(records)
}
