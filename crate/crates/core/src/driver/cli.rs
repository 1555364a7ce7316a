use std::path::PathBuf;

use clap::{ArgAction, Parser, ValueEnum};

use super::DriverError;
use crate::backends::CompileMode;

/// What a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    /// Profile every backend and link the fastest per loop.
    ProfileSearch,
    /// Predict each loop's backend from hardware counters.
    Predict,
    /// Only collect the counter CSV of the baseline build.
    AdvancedProfile,
    /// Energy report of every backend's build.
    PowerProfile,
    /// Fit a model from a training dataset.
    Train,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainMode {
    Serial,
    Parallel,
}

impl TrainMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrainMode::Serial => "serial",
            TrainMode::Parallel => "parallel",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "mc", version, about = "Builds each loop nest with the best of several compilers")]
pub struct Cli {
    /// C sources, or objects produced with -c.
    pub sources: Vec<PathBuf>,
    /// Output executable, object, model or counter CSV.
    #[arg(short = 'o', value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Compile only; selection happens when the objects are linked.
    #[arg(short = 'c')]
    pub compile_only: bool,
    /// Arguments for profiled runs, split like a shell would.
    #[arg(long, value_name = "ARGS", allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Choose backends with a trained model instead of profiling.
    #[arg(long, conflicts_with_all = ["power_profile", "train"])]
    pub predict: bool,
    /// Model file for --predict.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Report per-loop energy of every backend's build.
    #[arg(long, conflicts_with = "train")]
    pub power_profile: bool,
    /// Auto-parallelizing builds.
    #[arg(long, conflicts_with = "openmp")]
    pub parallel: bool,
    /// OpenMP builds.
    #[arg(long)]
    pub openmp: bool,
    /// Profiled runs per backend; the median decides.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,
    /// Concurrent compilations; defaults to the logical CPU count.
    #[arg(short = 'j', value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Backend config applied on top of the built-in registry.
    #[arg(long, value_name = "PATH")]
    pub backend_config: Option<PathBuf>,
    /// Train a model from a dataset CSV.
    #[arg(long, value_name = "CSV")]
    pub train: Option<PathBuf>,
    /// Target set of the trained model; both when omitted.
    #[arg(long, value_enum, requires = "train")]
    pub mode: Option<TrainMode>,
    /// Seed of the forest's bootstrap and feature sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trees in a trained forest.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    pub trees: u32,
    /// Collect the counter CSV and stop.
    #[arg(long, conflicts_with_all = ["power_profile", "train"])]
    pub advanced_profile_only: bool,
    /// Nests shorter than this many lines stay in place.
    #[arg(long, default_value_t = 0)]
    pub min_loop_lines: u32,
    /// Backends left out of this run.
    #[arg(long, value_name = "NAME", action = ArgAction::Append)]
    pub exclude: Vec<String>,
    /// Include directory for every compilation.
    #[arg(short = 'I', value_name = "DIR", action = ArgAction::Append)]
    pub include_dirs: Vec<String>,
    /// Macro definition for every compilation.
    #[arg(short = 'D', value_name = "MACRO", action = ArgAction::Append)]
    pub defines: Vec<String>,
    /// Library directory for the final link.
    #[arg(short = 'L', value_name = "DIR", action = ArgAction::Append)]
    pub lib_dirs: Vec<String>,
    /// Library for the final link.
    #[arg(short = 'l', value_name = "LIB", action = ArgAction::Append)]
    pub libs: Vec<String>,
}

/// Validated settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sources: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub action: Action,
    pub compile_only: bool,
    pub mode: CompileMode,
    /// Train only; `None` trains both target sets.
    pub train_mode: Option<TrainMode>,
    pub train_data: Option<PathBuf>,
    pub input_args: Vec<String>,
    pub runs: usize,
    pub pool_size: usize,
    pub backend_config: Option<PathBuf>,
    pub model_path: Option<PathBuf>,
    pub seed: u64,
    pub n_trees: usize,
    pub min_loop_lines: u32,
    pub exclude: Vec<String>,
    /// `-I` and `-D` flags for every compilation.
    pub cpp_flags: Vec<String>,
    /// `-L` and `-l` flags for every link.
    pub link_flags: Vec<String>,
}

impl RunConfig {
    /// Profile-search defaults for `sources`.
    pub fn new(sources: Vec<PathBuf>, output: Option<PathBuf>) -> Self {
        RunConfig {
            sources,
            output,
            action: Action::ProfileSearch,
            compile_only: false,
            mode: CompileMode::Serial,
            train_mode: None,
            train_data: None,
            input_args: Vec::new(),
            runs: 3,
            pool_size: default_pool(),
            backend_config: None,
            model_path: None,
            seed: 0,
            n_trees: 100,
            min_loop_lines: 0,
            exclude: Vec::new(),
            cpp_flags: Vec::new(),
            link_flags: Vec::new(),
        }
    }

    pub fn from_cli(cli: Cli) -> Result<Self, DriverError> {
        let action = if cli.train.is_some() {
            Action::Train
        } else if cli.advanced_profile_only {
            Action::AdvancedProfile
        } else if cli.predict {
            Action::Predict
        } else if cli.power_profile {
            Action::PowerProfile
        } else {
            Action::ProfileSearch
        };
        let mode = match (cli.parallel, cli.openmp) {
            (true, true) => return Err(DriverError::Usage("--parallel and --openmp are exclusive".into())),
            (true, false) => CompileMode::Parallel,
            (false, true) => CompileMode::OpenMp,
            (false, false) => CompileMode::Serial,
        };
        let input_args = match &cli.input {
            Some(s) => shell_words::split(s).map_err(|e| DriverError::Usage(format!("--input: {e}")))?,
            None => Vec::new(),
        };
        let mut cpp_flags: Vec<String> = cli.include_dirs.iter().map(|d| format!("-I{d}")).collect();
        cpp_flags.extend(cli.defines.iter().map(|d| format!("-D{d}")));
        let mut link_flags: Vec<String> = cli.lib_dirs.iter().map(|d| format!("-L{d}")).collect();
        link_flags.extend(cli.libs.iter().map(|l| format!("-l{l}")));
        let cfg = RunConfig {
            sources: cli.sources,
            output: cli.output,
            action,
            compile_only: cli.compile_only,
            mode,
            train_mode: cli.mode,
            train_data: cli.train,
            input_args,
            runs: cli.runs as usize,
            pool_size: cli.jobs.map(|j| j as usize).unwrap_or_else(default_pool),
            backend_config: cli.backend_config,
            model_path: cli.model,
            seed: cli.seed,
            n_trees: cli.trees as usize,
            min_loop_lines: cli.min_loop_lines,
            exclude: cli.exclude,
            cpp_flags,
            link_flags,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that the requested work is coherent before any of it starts.
    pub fn validate(&self) -> Result<(), DriverError> {
        let usage = |m: &str| Err(DriverError::Usage(m.to_string()));
        if self.runs == 0 {
            return usage("--runs must be at least 1");
        }
        match self.action {
            Action::Train => {
                if !self.sources.is_empty() || self.compile_only {
                    return usage("--train takes no sources");
                }
                if self.mode != CompileMode::Serial {
                    return usage("--train selects targets with --mode");
                }
            }
            _ if self.sources.is_empty() => return usage("no input files"),
            Action::Predict if self.model_path.is_none() => return usage("--predict needs --model"),
            Action::Predict | Action::AdvancedProfile if self.mode == CompileMode::OpenMp => {
                return usage("prediction is not available for OpenMP builds");
            }
            _ => {}
        }
        if self.compile_only && self.action != Action::ProfileSearch {
            return usage("-c only supports profile-based selection at link time");
        }
        if self.compile_only && self.output.is_some() && self.sources.len() > 1 {
            return usage("-o with -c needs a single source");
        }
        Ok(())
    }
}

fn default_pool() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
