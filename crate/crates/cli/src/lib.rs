//! Command-line reports for the singularity pricing model: reference grid,
//! veto analysis, transfer panels, Monte Carlo checks and market-data series.

pub mod commands;
pub mod config;
pub mod error;
pub mod market;
pub mod report;

pub use commands::{
    cmd_figure1, cmd_mc_check, cmd_table1, cmd_transfers, cmd_veto, CommandOutput, GammaSweep,
};
pub use config::{McSettings, OutputFormat, RunConfig, TransferSettings};
pub use error::CliError;
pub use market::{MarketSeries, Month};
