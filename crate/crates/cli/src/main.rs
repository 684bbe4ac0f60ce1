use clap::{Parser, Subcommand};
use enkappa_cli::{parse_config, run_scenario, CliError, Context, SCENARIOS};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "enkappa", about = "Scenario runner for the relativistic fluid laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (or the whole desk suite) from a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override for the randomized sweeps.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the available scenario ids.
    List,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for id in SCENARIOS {
                println!("{id}");
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, seed } => match run(config, out, seed) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e @ (CliError::InvalidConfig(_) | CliError::UnknownScenario(_))) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
    }
}

fn run(config_path: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| CliError::InvalidConfig(format!("{}: {e}", config_path.display())))?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let out_dir = out.unwrap_or_else(|| PathBuf::from(&config.out_dir));
    let ctx = Context::new(config, out_dir)?;
    let bundle = run_scenario(&ctx)?;
    for check in &bundle.checks {
        println!(
            "[{}] {}: {} (tolerance {})",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.value,
            check.tolerance
        );
    }
    let passed = bundle.checks.iter().filter(|c| c.pass).count();
    println!(
        "{} of {} checks passed; {} files written to {}",
        passed,
        bundle.checks.len(),
        bundle.files.len(),
        ctx.out_dir.display()
    );
    Ok(bundle.all_pass())
}
