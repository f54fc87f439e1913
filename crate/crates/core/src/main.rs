use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kycrec::domain::Condition;
use kycrec::harness::{cmd_generate, cmd_report, cmd_run, exit_code, RunOptions, TableFormat};
use kycrec::simulator::ClickModel;
use kycrec::Result;

/// KYC-tiered recommendation experiments over a synthetic world.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a world snapshot (JSONL) and its manifest.
    Generate {
        /// Scenario TOML; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "world.jsonl")]
        out: PathBuf,
    },
    /// Run conditions over a snapshot and write tables, plot data and logs.
    Run {
        #[arg(long, default_value = "world.jsonl")]
        world: PathBuf,
        /// Comma-separated condition names, e.g. `Baseline,AdvancedKyc`.
        #[arg(long, value_delimiter = ',', value_parser = parse_condition)]
        conditions: Option<Vec<Condition>>,
        /// Comma-separated cutoffs, e.g. `1,3,5`.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<usize>>,
        #[arg(long, value_parser = parse_click_model)]
        click_model: Option<ClickModel>,
        /// Reseeds Bernoulli clicks; the world itself is fixed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "run")]
        out: PathBuf,
        /// How tables are echoed to standard output.
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: TableFormat,
    },
    /// Print the tables of a finished run.
    Report {
        #[arg(default_value = "run")]
        run: PathBuf,
        #[arg(long, default_value = "text", value_parser = parse_format)]
        format: TableFormat,
    },
}

fn parse_condition(s: &str) -> Result<Condition> {
    Condition::parse(s)
}

fn parse_click_model(s: &str) -> Result<ClickModel> {
    ClickModel::parse(s)
}

fn parse_format(s: &str) -> Result<TableFormat> {
    TableFormat::parse(s)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate { config, seed, out } => {
            let m = cmd_generate(config.as_deref(), seed, &out)?;
            println!(
                "{} (run {}, config {})",
                out.display(),
                m.run_id,
                m.config_sha256
            );
        }
        Command::Run {
            world,
            conditions,
            k,
            click_model,
            seed,
            out,
            format,
        } => {
            let opts = RunOptions {
                conditions,
                ks: k,
                click_model,
                seed,
            };
            let (_, tables) = cmd_run(&world, &opts, &out)?;
            print!("{}", format.render(&tables));
        }
        Command::Report { run, format } => print!("{}", cmd_report(&run, format)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
