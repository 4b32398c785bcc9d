use clap::Parser;
use erd_cli::config::JobConfig;
use erd_cli::run::{execute, CliError, Command};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Analyse X = e^E / P ∂/∂z: configuration trees, words, strips and portraits.
#[derive(Parser, Debug)]
#[command(name = "erd", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON job file.
    #[arg(long)]
    config: PathBuf,
    /// Write the document here instead of the configured path or stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides tolerances.quad_rel.
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let src = std::fs::read_to_string(&cli.config).map_err(|e| CliError::Io(format!("{}: {e}", cli.config.display())))?;
    let mut cfg = JobConfig::from_json(&src)?;
    if let Some(t) = cli.tol {
        cfg.tolerances.quad_rel = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let em = execute(cli.command, &cfg)?;
    for (p, text) in &em.extra {
        write(p, text)?;
    }
    match cli.out.or(em.default_path) {
        Some(p) => {
            write(&p, &em.document)?;
            print!("{}", em.summary);
        }
        None => {
            print!("{}", em.document);
            eprint!("{}", em.summary);
        }
    }
    std::io::stdout().flush().map_err(|e| CliError::Io(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let help = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            return ExitCode::from(if help { 0 } else { 1 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("erd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
