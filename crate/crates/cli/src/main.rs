use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use singularity_cli::commands::default_rebase_month;
use singularity_cli::{
    cmd_figure1, cmd_mc_check, cmd_table1, cmd_transfers, cmd_veto, GammaSweep, Month,
    OutputFormat, RunConfig,
};
use singularity_core::exact::{TABLE1_P, TABLE1_XI};

#[derive(Parser)]
#[command(
    name = "singularity",
    version,
    about = "Asset prices under an AI singularity"
)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price-dividend grid over singularity and extinction probabilities.
    Table1 {
        /// Singularity probabilities, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = TABLE1_P)]
        p: Vec<f64>,
        /// Extinction probabilities, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = TABLE1_XI)]
        xi: Vec<f64>,
    },
    /// Development-veto values and decisions.
    Veto(VetoArgs),
    /// Transfer panels over the tax grid.
    Transfers {
        /// Use the high-deadweight stress case.
        #[arg(long)]
        stress: bool,
    },
    /// Closed form vs. recursion vs. Monte Carlo.
    McCheck {
        #[arg(long)]
        n_paths: Option<usize>,
    },
    /// Trailing P/D and rebased index ratio from market data.
    Figure1 {
        /// Shiller-format `month,price,dividend` file.
        #[arg(long)]
        shiller: PathBuf,
        /// `month,close` file for the numerator index.
        #[arg(long)]
        nasdaq: PathBuf,
        /// `month,close` file for the denominator index.
        #[arg(long)]
        spx: PathBuf,
        /// Month that reads 100 in the ratio series (YYYY-MM).
        #[arg(long, default_value_t = default_rebase_month())]
        rebase: Month,
    },
}

#[derive(Args)]
struct VetoArgs {
    /// Scan risk aversion and locate the veto threshold.
    #[arg(long)]
    gamma_sweep: bool,
    #[arg(long, default_value_t = GammaSweep::default().lo)]
    gamma_lo: f64,
    #[arg(long, default_value_t = GammaSweep::default().hi)]
    gamma_hi: f64,
    #[arg(long, default_value_t = GammaSweep::default().step)]
    gamma_step: f64,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = cli.out {
        cfg.output_dir = out;
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if let Some(seed) = cli.seed {
        cfg.mc.get_or_insert_with(Default::default).seed = seed;
    }

    let output = match cli.command {
        Command::Table1 { p, xi } => cmd_table1(&cfg, &p, &xi)?,
        Command::Veto(args) => {
            let sweep = args.gamma_sweep.then_some(GammaSweep {
                lo: args.gamma_lo,
                hi: args.gamma_hi,
                step: args.gamma_step,
            });
            cmd_veto(&cfg, sweep)?
        }
        Command::Transfers { stress } => cmd_transfers(&cfg, stress)?,
        Command::McCheck { n_paths } => {
            if let Some(n) = n_paths {
                cfg.mc.get_or_insert_with(Default::default).n_paths = n;
            }
            cmd_mc_check(&cfg)?
        }
        Command::Figure1 {
            shiller,
            nasdaq,
            spx,
            rebase,
        } => cmd_figure1(&cfg, &shiller, &nasdaq, &spx, rebase)?,
    };

    for note in &output.notes {
        println!("{note}");
    }
    for file in &output.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}
