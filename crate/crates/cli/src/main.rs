use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypmt_cli::{emit_report, output_path, run, write_atomic, CliError, RunConfig, OUTPUT_DIR_ENV};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("hypmt: {e}");
            return match e {
                CliError::Usage { .. } => ExitCode::from(2),
                _ => ExitCode::from(3),
            };
        }
    };
    let bytes = emit_report(&report, cfg.format);
    let env_dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match output_path(&cfg, env_dir.as_deref()) {
        Some(path) => {
            if let Err(e) = write_atomic(&path, &bytes) {
                eprintln!("hypmt: {e}");
                return ExitCode::from(3);
            }
            eprintln!(
                "hypmt: {} items, {}/{} checks passed -> {}",
                report.summary.items,
                report.summary.passed,
                report.summary.checks,
                path.display()
            );
        }
        None => {
            use std::io::Write;
            if std::io::stdout().write_all(&bytes).is_err() {
                return ExitCode::from(3);
            }
        }
    }
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
