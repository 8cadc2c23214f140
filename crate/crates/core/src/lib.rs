//! Asset pricing under AI-singularity displacement risk.
//!
//! A representative household prices two public stocks (AI and non-AI)
//! through its own CRRA Euler equation. Each period a singularity may arrive:
//! aggregate consumption jumps, the household's consumption share is
//! displaced, and the AI dividend share expands. Because the household cannot
//! trade the restricted AI equity that would hedge the displacement, AI stocks
//! carry a hedging premium.
//!
//! Modules:
//!
//! - [`model`]: parameters, growth factors, existence factors and closed-form
//!   price-dividend ratios.
//! - [`exact`]: exact AI price-dividend ratios by backward recursion over the
//!   chain of post-singularity AI shares, and the reference grid.
//! - [`veto`]: value functions for vetoing or developing AI.
//! - [`transfer`]: government transfers, effective displacement and the
//!   existence frontier in the tax rate.
//! - [`mc`]: a seeded Monte Carlo pricer used as an independent oracle.

pub mod error;
pub mod exact;
pub mod mc;
pub mod model;
pub mod transfer;
pub mod veto;

pub use error::{Error, Result};
pub use exact::{
    build_theta_chain, exact_pd_ai, table1_grid, RecursionResult, Table1Row, ThetaChain,
};
pub use mc::{mc_price, simulate_path, MCPrice, PathConfig, PeriodRecord};
pub use model::{
    closed_form_pd, existence_factor, growth_factors, pd_ratio, round_display, AssetKind,
    GammaPair, ModelParams, PDQuote,
};
pub use transfer::{
    existence_frontier, figure2_panels, pd_with_transfers, phi_effective,
    post_transfer_consumption, Figure2Row, Scenario, TransferOutcome, TransferParams,
};
pub use veto::{
    delta_u, gamma_threshold, value_develop, value_veto, veto_decisions, veto_report, Market,
    ThresholdSearch, VetoParams, VetoReport,
};
