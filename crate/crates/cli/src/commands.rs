//! Subcommand bodies. Each writes its tables under the configured output
//! directory and returns what it wrote plus human-readable notes.

use std::path::{Path, PathBuf};

use singularity_core::error::Error as ModelError;
use singularity_core::exact::DEFAULT_EPSILON;
use singularity_core::transfer::default_tau_grid;
use singularity_core::{
    closed_form_pd, exact_pd_ai, gamma_threshold, mc_price, pd_with_transfers, round_display,
    table1_grid, veto_decisions, veto_report, AssetKind, ModelParams, PathConfig, Scenario,
    TransferParams,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::market::{read_index, read_shiller, rebased_ratio, trailing_pd, Month};
use crate::report::{
    write_records, McCheckRecord, PdRecord, RatioRecord, Table1Record, ThresholdRecord,
    TransferRecord, VetoRecord, VetoSweepRecord,
};

/// Deadweight severity of the stress case.
pub const STRESS_DELTA: f64 = 0.9;
/// Share jump of the small-jump Monte Carlo cell.
pub const SMALL_JUMP: f64 = 1e-6;
/// Allowed relative gap between recursion and closed form at [`SMALL_JUMP`].
pub const SMALL_JUMP_GAP: f64 = 1e-4;

#[derive(Debug, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

fn ratio(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? / b?)
}

pub fn cmd_table1(
    cfg: &RunConfig,
    p_list: &[f64],
    xi_list: &[f64],
) -> Result<CommandOutput, CliError> {
    let rows = table1_grid(&cfg.model, p_list, xi_list, DEFAULT_EPSILON)?;
    let exact: Vec<Table1Record> = rows
        .iter()
        .map(|r| Table1Record {
            p: r.p,
            xi: r.xi,
            pd_ai: r.pd_ai,
            pd_n: r.pd_n,
            ratio: r.ratio,
        })
        .collect();
    let rounded: Vec<Table1Record> = exact
        .iter()
        .map(|r| Table1Record {
            pd_ai: r.pd_ai.map(round_display),
            pd_n: r.pd_n.map(round_display),
            ratio: r.ratio.map(round_display),
            ..r.clone()
        })
        .collect();
    let dir = &cfg.output_dir;
    Ok(CommandOutput {
        files: vec![
            write_records(dir, "table1", cfg.format, &rounded)?,
            write_records(dir, "table1_unrounded", cfg.format, &exact)?,
        ],
        notes: Vec::new(),
    })
}

/// Risk-aversion range scanned for the veto threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSweep {
    pub lo: f64,
    pub hi: f64,
    /// Grid step of the brute-force scan.
    pub step: f64,
}

impl Default for GammaSweep {
    fn default() -> Self {
        Self {
            lo: 2.0,
            hi: 12.0,
            step: 0.01,
        }
    }
}

impl GammaSweep {
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step).round() as usize;
        // Snap to a decimal grid so reported values print cleanly.
        (0..=n)
            .map(|i| ((self.lo + i as f64 * self.step) * 1e10).round() / 1e10)
            .collect()
    }
}

pub fn cmd_veto(cfg: &RunConfig, sweep: Option<GammaSweep>) -> Result<CommandOutput, CliError> {
    let vp = cfg.veto.ok_or(CliError::Config {
        line: 0,
        message: "veto parameters missing".into(),
    })?;
    let report = veto_report(&vp, 1.0)?;
    let dir = &cfg.output_dir;
    let mut out = CommandOutput::default();
    out.files.push(write_records(
        dir,
        "veto",
        cfg.format,
        &[VetoRecord {
            gamma: vp.base.gamma,
            v_veto: report.v_veto,
            v_develop_im: report.v_develop_im,
            v_develop_cm: report.v_develop_cm,
            vetoes_im: report.vetoes_im,
            vetoes_cm: report.vetoes_cm,
        }],
    )?);
    out.notes.push(format!(
        "incomplete markets: {}; complete markets: {}",
        if report.vetoes_im { "veto" } else { "develop" },
        if report.vetoes_cm { "veto" } else { "develop" },
    ));

    let Some(sweep) = sweep else {
        return Ok(out);
    };
    let gammas = sweep.grid();
    let decisions = veto_decisions(&vp, &gammas)?;
    let scan: Vec<VetoSweepRecord> = gammas
        .iter()
        .zip(&decisions)
        .map(|(&gamma, &vetoes_im)| VetoSweepRecord { gamma, vetoes_im })
        .collect();
    out.files
        .push(write_records(dir, "veto_sweep", cfg.format, &scan)?);

    let mut thresholds = vec![ThresholdRecord {
        method: "scan".into(),
        gamma: scan.iter().find(|r| r.vetoes_im).map(|r| r.gamma),
    }];
    for w in scan.windows(2).filter(|w| w[0].vetoes_im != w[1].vetoes_im) {
        out.notes.push(format!(
            "scan: decision changes between gamma {} and {}",
            w[0].gamma, w[1].gamma
        ));
    }
    match gamma_threshold(&vp, sweep.lo, sweep.hi, 1e-6) {
        Ok(search) => {
            thresholds.push(ThresholdRecord {
                method: "bisection".into(),
                gamma: search.threshold,
            });
            thresholds.extend(search.crossings.iter().map(|&c| ThresholdRecord {
                method: "crossing".into(),
                gamma: Some(c),
            }));
            if !search.is_monotone() {
                out.notes.push(format!(
                    "{} crossings; decision is not monotone",
                    search.crossings.len()
                ));
            }
        }
        Err(ModelError::HypothesisViolated { value }) => out.notes.push(format!(
            "no threshold search: phi (1 + eta) = {value} is not below one"
        )),
        Err(e) => return Err(e.into()),
    }
    out.files.push(write_records(
        dir,
        "veto_threshold",
        cfg.format,
        &thresholds,
    )?);
    Ok(out)
}

pub fn cmd_transfers(cfg: &RunConfig, stress: bool) -> Result<CommandOutput, CliError> {
    let settings = cfg.transfer.unwrap_or_default();
    let delta = if stress { STRESS_DELTA } else { settings.delta };
    let mut records = Vec::new();
    for scenario in Scenario::ALL {
        for tau in default_tau_grid() {
            let tp = TransferParams {
                base: scenario.model_params(),
                alpha: settings.alpha,
                tau,
                delta,
            };
            let outcome = pd_with_transfers(&tp, DEFAULT_EPSILON)?;
            records.push(TransferRecord {
                scenario: scenario.label().to_string(),
                tau,
                pd_ai: outcome.pd_ai(),
                multiple: outcome.consumption_multiple,
            });
        }
    }
    Ok(CommandOutput {
        files: vec![write_records(
            &cfg.output_dir,
            "transfers",
            cfg.format,
            &records,
        )?],
        notes: vec![format!("deadweight delta = {delta}")],
    })
}

fn mc_cells(model: &ModelParams) -> [(&'static str, ModelParams); 3] {
    [
        ("baseline", *model),
        ("no_singularity", model.with_p(0.0)),
        ("small_jump", model.with_delta_theta(SMALL_JUMP)),
    ]
}

pub fn cmd_mc_check(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let settings = cfg.mc.unwrap_or_default();
    let mut out = CommandOutput::default();
    let mut records = Vec::new();
    for (cell, params) in mc_cells(&cfg.model) {
        let recursion = exact_pd_ai(&params, DEFAULT_EPSILON)?.pd_initial;
        let path_cfg = PathConfig::with_tail_bound(
            params,
            settings.seed,
            settings.n_paths,
            settings.target_tolerance,
        );
        for asset in AssetKind::ALL {
            let closed = closed_form_pd(&params, asset)?.pd;
            // The non-AI closed form is exact, so it doubles as the recursion.
            let reference = match asset {
                AssetKind::Ai => recursion,
                AssetKind::NonAi => closed,
            };
            let mc = path_cfg.as_ref().map_err(Clone::clone).and_then(|c| {
                let price = mc_price(c, asset)?;
                Ok((price, c.tail_bound(asset)))
            });
            let (mc_mean, mc_se, tail_bound, mut pass) = match (&mc, reference) {
                (Ok((price, tail)), Some(target)) => (
                    Some(price.mean_pd),
                    Some(price.std_error),
                    Some(*tail),
                    (price.mean_pd - target).abs() <= 3.0 * price.std_error + tail,
                ),
                (Ok((price, tail)), None) => (
                    Some(price.mean_pd),
                    Some(price.std_error),
                    Some(*tail),
                    false,
                ),
                (Err(e), _) => {
                    out.notes.push(format!("{cell}/{asset}: {e}"));
                    (None, None, None, false)
                }
            };
            if cell == "small_jump" && asset == AssetKind::Ai {
                let gap = ratio(recursion, closed).map(|r| (r - 1.0).abs());
                pass &= gap.is_some_and(|g| g < SMALL_JUMP_GAP);
            }
            out.notes.push(format!(
                "{cell}/{asset}: {}",
                if pass { "pass" } else { "FAIL" }
            ));
            records.push(McCheckRecord {
                cell: cell.into(),
                asset: asset.label().into(),
                closed_form: closed,
                recursion: reference,
                mc_mean,
                mc_se,
                tail_bound,
                pass,
            });
        }
    }
    out.files.push(write_records(
        &cfg.output_dir,
        "mc_check",
        cfg.format,
        &records,
    )?);
    Ok(out)
}

/// Calendar month the index ratio is rebased to by default.
pub fn default_rebase_month() -> Month {
    Month::new(2015, 1).expect("valid month")
}

pub fn cmd_figure1(
    cfg: &RunConfig,
    shiller: &Path,
    nasdaq: &Path,
    spx: &Path,
    rebase: Month,
) -> Result<CommandOutput, CliError> {
    let (price, dividend) = read_shiller(shiller)?;
    let pd: Vec<PdRecord> = trailing_pd(&price, &dividend)
        .into_iter()
        .map(|(month, pd)| PdRecord { month, pd })
        .collect();
    let ratio: Vec<RatioRecord> = rebased_ratio(
        &read_index(nasdaq, "nasdaq")?,
        &read_index(spx, "spx")?,
        rebase,
    )?
    .into_iter()
    .map(|(month, ratio_rebased)| RatioRecord {
        month,
        ratio_rebased,
    })
    .collect();
    let dir = &cfg.output_dir;
    Ok(CommandOutput {
        files: vec![
            write_records(dir, "figure1_pd", cfg.format, &pd)?,
            write_records(dir, "figure1_ratio", cfg.format, &ratio)?,
        ],
        notes: vec![format!(
            "{} P/D months, {} ratio months",
            pd.len(),
            ratio.len()
        )],
    })
}
