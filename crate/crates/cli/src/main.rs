use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use syncmdp::{Limits, SyncMode, WinMode};
use syncmdp_cli::{
    analyze, parse_query, regions, render, verify, AnalyzeOptions, CliError, Region, Report,
    VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "syncmdp",
    version,
    about = "Synchronizing objectives in Markov decision processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide the verdict matrix (or one query) for a target.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        /// A single query, MODE:WINMODE.
        #[arg(long, value_parser = parse_query)]
        query: Option<(SyncMode, WinMode)>,
        /// Simulation depth for witness checks.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Cross-check verdicts and bounds against brute-force oracles.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: String,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Print one region of the model.
    Regions {
        #[command(flatten)]
        common: Common,
        /// Target set name; the empty name is the empty set.
        #[arg(long)]
        set: Option<String>,
        /// pre, pre-lasso, mec, safety, reach, almost-sure, support-lasso.
        #[arg(long)]
        which: Region,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    model: PathBuf,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
    /// Enumeration budget in strategy-steps.
    #[arg(long, default_value_t = Limits::default().enumeration_budget)]
    budget: u64,
    /// Longest support lasso explored.
    #[arg(long, default_value_t = Limits::default().max_lasso)]
    max_lasso: usize,
    /// Widest target searched subset by subset.
    #[arg(long, default_value_t = Limits::default().max_subset_width)]
    max_subset_width: usize,
    /// Bit size above which bounds are reported by formula only.
    #[arg(long, default_value_t = Limits::default().bound_bits_cap)]
    bound_bits: u64,
}

impl Common {
    fn limits(&self) -> Result<Limits, CliError> {
        if self.budget == 0 || self.max_lasso == 0 {
            return Err(CliError::Usage("budgets must be positive".into()));
        }
        Ok(Limits {
            max_lasso: self.max_lasso,
            max_subset_width: self.max_subset_width,
            enumeration_budget: self.budget,
            bound_bits_cap: self.bound_bits,
        })
    }
}

fn emit(report: &Report, json: Option<&PathBuf>) -> Result<(), CliError> {
    let text = report.to_json_string();
    match json {
        Some(p) if p.as_os_str() == "-" => {
            print!("{text}");
            return Ok(());
        }
        Some(p) => std::fs::write(p, &text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => {}
    }
    print!("{}", render::text(report));
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze {
            common,
            target,
            query,
            horizon,
        } => {
            let model = analyze::load(&common.model)?;
            let opts = AnalyzeOptions {
                query,
                horizon,
                limits: common.limits()?,
            };
            emit(&analyze(&model, &target, &opts)?, common.json.as_ref())
        }
        Command::Verify {
            common,
            target,
            horizon,
        } => {
            let model = analyze::load(&common.model)?;
            if horizon == Some(0) {
                return Err(CliError::Usage("horizon must be positive".into()));
            }
            let opts = VerifyOptions {
                horizon,
                limits: common.limits()?,
            };
            emit(&verify(&model, &target, &opts)?, common.json.as_ref())
        }
        Command::Regions { common, set, which } => {
            let model = analyze::load(&common.model)?;
            emit(
                &regions(&model, set.as_deref(), which, &common.limits()?)?,
                common.json.as_ref(),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("syncmdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
