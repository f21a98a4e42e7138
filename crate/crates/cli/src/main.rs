//! `robustrate` — rate lists from vote files, probe robustness under
//! simulated collusion, and reproduce the reference scenarios.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use robustrate_core::simulate::Mode;

use commands::{cmd_export, cmd_rate, cmd_scenario, cmd_sweep, CliError};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "robustrate",
    version,
    about = "Collusion-resistant rating of voted lists"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rate every list in a vote file (CSV out, one row per list).
    Rate {
        /// Vote file: user,item,rating[,timestamp] rows.
        #[arg(long)]
        input: PathBuf,
        /// Destination for the ratings CSV.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Measure RMS score movement under a growing injected attack.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Destination for the plot-ready sweep CSV.
        #[arg(long)]
        output: PathBuf,
        /// Attack direction: promote low-rated or demote high-rated lists.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Comma-separated attack fractions (of each target's vote count).
        #[arg(long, default_value = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2")]
        fractions: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in reference scenario and print its report.
    Scenario {
        /// scenario1 (five consistent voters) or scenario2 (colluded vote).
        name: String,
        /// Also write the report to this file.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-emit a vote file as normalized user,item,level rows.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Write the internal→external voter id table here.
        #[arg(long)]
        voters_sidecar: Option<PathBuf>,
        /// Write the internal→external list id table here.
        #[arg(long)]
        lists_sidecar: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Flags shared by every command; each overrides its config-file key.
#[derive(Args)]
struct Common {
    /// Trust discrimination exponent (≥ 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Convergence threshold on the credibility residual.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Iteration cap; exceeding it exits 2, not an error.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Weighted-score sharpening exponent (≥ 1).
    #[arg(long)]
    p: Option<f64>,
    /// Rating levels per list.
    #[arg(long)]
    levels: Option<usize>,
    /// Seed for scenario generation and attack injection.
    #[arg(long)]
    seed: Option<u64>,
    /// Config file (key = value); overrides ROBUSTRATE_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn build_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = std::env::var_os("ROBUSTRATE_CONFIG") {
            cfg.apply_file(Path::new(&path))
                .map_err(|e| CliError::Input(format!("ROBUSTRATE_CONFIG: {e}")))?;
        }
        if let Some(path) = &self.config {
            cfg.apply_file(path).map_err(CliError::from)?;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.p {
            cfg.p_exponent = v;
        }
        if let Some(v) = self.levels {
            cfg.levels = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Promotion,
    Demotion,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Promotion => Mode::Promotion,
            ModeArg::Demotion => Mode::Demotion,
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Cmd::Rate {
            input,
            output,
            common,
        } => cmd_rate(&input, &output, &common.build_config()?),
        Cmd::Sweep {
            input,
            output,
            mode,
            fractions,
            common,
        } => cmd_sweep(
            &input,
            &output,
            mode.into(),
            &fractions,
            &common.build_config()?,
        ),
        Cmd::Scenario {
            name,
            output,
            common,
        } => cmd_scenario(&name, output.as_deref(), &common.build_config()?),
        Cmd::Export {
            input,
            output,
            voters_sidecar,
            lists_sidecar,
            common,
        } => cmd_export(
            &input,
            &output,
            voters_sidecar.as_deref(),
            lists_sidecar.as_deref(),
            &common.build_config()?,
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful outcomes; everything else is an
            // input error.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
