use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shapfx_cli::selftest::run_selftest;
use shapfx_cli::{figure1, figure1_csv, parse_betas, rho_steps, run_text, CliError};

#[derive(Parser)]
#[command(name = "shapfx", version, about = "Shapley effects for dependent inputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the problem described by a JSON configuration.
    Run { config: PathBuf },
    /// Emit lognormal relative-importance curves as CSV.
    Figure1 {
        /// Semicolon-separated β pairs.
        #[arg(long, default_value = "8,1;4,1;2,1")]
        betas: String,
        /// Interior grid size: |ρ| = k/(N+1) for k = 0..=N.
        #[arg(long, default_value_t = 99)]
        rho_steps: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery.
    Selftest,
}

fn write_out(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            let (cfg, rendered) = run_text(&text)?;
            write_out(cfg.output.path.as_deref().map(std::path::Path::new), &rendered)?;
        }
        Command::Figure1 { betas, rho_steps: n, out } => {
            let rows = figure1(&parse_betas(&betas)?, &rho_steps(n))?;
            write_out(out.as_deref(), &figure1_csv(&rows))?;
        }
        Command::Selftest => {
            let checks = run_selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("shapfx: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
