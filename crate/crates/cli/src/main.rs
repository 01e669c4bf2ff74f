use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrf_cli::config::parse_config;
use qrf_cli::fig2::fig2_scenario;
use qrf_cli::run::{run_scenario, RunOutput};
use qrf_cli::{acceptance, CliError};

#[derive(Parser)]
#[command(name = "qrf", version, about = "Relational decoherence under quantum reference frame changes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a scenario file.
    Run {
        config: PathBuf,
        /// Output directory; overrides `dir` in [output].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Check,
    /// Reproduce the decoherence-factor figure.
    Fig2 {
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn report(output: &RunOutput, dir: &Path) -> Result<(), CliError> {
    for path in output.write_to(dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn run(config: &Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let text = fs::read_to_string(config).map_err(|source| CliError::Io {
        path: config.to_path_buf(),
        source,
    })?;
    let scenario = parse_config(&text)?;
    let dir = out
        .or_else(|| scenario.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let output = run_scenario(&scenario)?;
    report(&output, &dir)
}

fn check() -> ExitCode {
    let mut failed = 0;
    for f in acceptance::checks() {
        let r = f();
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} check(s) failed");
        ExitCode::from(3)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run(&config, out),
        Command::Check => return check(),
        Command::Fig2 { out } => run_scenario(&fig2_scenario()).and_then(|o| report(&o, &out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qrf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
