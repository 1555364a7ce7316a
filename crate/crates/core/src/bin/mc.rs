use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use metacc::backends::SystemRunner;
use metacc::driver::{self, Cli, DriverError, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("mc: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mc: {e:#}");
            let usage = e.downcast_ref::<DriverError>().is_some_and(|d| matches!(d, DriverError::Usage(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn run(cfg: &RunConfig) -> anyhow::Result<()> {
    let summary = driver::run(cfg, Arc::new(SystemRunner))?;
    if let Some(plan) = &summary.plan {
        for (id, c) in &plan.choices {
            println!("{id}\t{}\t{}", c.backend, c.reason);
        }
    }
    for (path, oob) in &summary.models {
        println!("model {} (out-of-bag accuracy {oob:.4})", path.display());
    }
    for p in &summary.artifacts {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}
