//! Government transfers to the household in the singularity state.
//!
//! A tax `tau` on AI owners' post-singularity consumption is handed to the
//! household after deadweight losses of `delta * tau` of the transfer. The
//! household's singularity-state consumption becomes
//! `phi_eff * alpha * (1+eta) (1+g) C`, and pricing proceeds with `phi`
//! replaced by `phi_eff`, evaluated at the initial share `alpha`.

use rayon::prelude::*;

use crate::error::Result;
use crate::exact::{exact_pd_ai_unchecked, RecursionResult};
use crate::model::{check, closed_form_pd_unchecked, AssetKind, ModelParams, PDQuote};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferParams {
    pub base: ModelParams,
    /// Household consumption share before the singularity.
    pub alpha: f64,
    /// Tax rate on AI owners' post-singularity consumption.
    pub tau: f64,
    /// Deadweight severity: a fraction `delta * tau` of the transfer is lost.
    pub delta: f64,
}

impl TransferParams {
    pub fn with_tau(self, tau: f64) -> Self {
        Self { tau, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        check(
            "alpha",
            self.alpha,
            self.alpha > 0.0 && self.alpha < 1.0,
            "0 < alpha < 1",
        )?;
        check(
            "tau",
            self.tau,
            (0.0..1.0).contains(&self.tau),
            "0 <= tau < 1",
        )?;
        check("delta", self.delta, self.delta >= 0.0, "delta >= 0")
    }

    /// `tau (1 - delta tau)`: fraction of the AI owners' surplus that reaches
    /// the household.
    pub fn net_transfer(&self) -> f64 {
        self.tau * (1.0 - self.delta * self.tau)
    }

    /// True when waste exceeds the whole transfer (`delta tau > 1`).
    pub fn waste_exceeds_transfer(&self) -> bool {
        self.delta * self.tau > 1.0
    }

    /// Largest tax rate over which the net transfer is still increasing.
    pub fn tau_peak(&self) -> f64 {
        if self.delta > 0.0 {
            (0.5 / self.delta).min(1.0)
        } else {
            1.0
        }
    }

    fn displaced_share(&self) -> f64 {
        self.base.phi * self.alpha
    }
}

/// Summary of household consumption and valuations at one tax rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOutcome {
    pub tau: f64,
    pub net_transfer: f64,
    pub phi_eff: f64,
    /// Singularity-state consumption relative to the pre-singularity level.
    pub consumption_multiple: f64,
    /// Post- to no-transfer singularity-state consumption.
    pub transfer_ratio: f64,
    /// Closed-form AI quote under `phi_eff`; carries the existence factor.
    pub ai: PDQuote,
    /// Non-AI quote under `phi_eff` (the closed form is exact).
    pub non_ai: PDQuote,
    /// Exact AI valuation under `phi_eff`.
    pub ai_exact: RecursionResult,
}

impl TransferOutcome {
    pub fn pd_ai(&self) -> Option<f64> {
        self.ai_exact.pd_initial
    }
}

/// Household consumption in a non-extinction singularity state after taxes
/// and transfers, given aggregate consumption `c_t` in the preceding period.
pub fn post_transfer_consumption(tp: &TransferParams, c_t: f64) -> Result<f64> {
    tp.validate()?;
    check("c_t", c_t, c_t > 0.0, "c_t > 0")?;
    let scale = (1.0 + tp.base.eta) * c_t * (1.0 + tp.base.g);
    let displaced = tp.displaced_share();
    Ok(displaced * scale + tp.net_transfer() * (1.0 - displaced) * scale)
}

pub fn phi_effective(tp: &TransferParams) -> Result<f64> {
    tp.validate()?;
    Ok(phi_effective_unchecked(tp))
}

fn phi_effective_unchecked(tp: &TransferParams) -> f64 {
    tp.base.phi + tp.net_transfer() * (1.0 - tp.displaced_share()) / tp.alpha
}

/// Ratio of post-transfer to no-transfer singularity-state consumption; does
/// not depend on `eta`.
pub fn transfer_ratio(tp: &TransferParams) -> Result<f64> {
    tp.validate()?;
    let displaced = tp.displaced_share();
    Ok(1.0 + tp.net_transfer() * (1.0 - displaced) / displaced)
}

fn effective_params(tp: &TransferParams) -> Result<ModelParams> {
    let params = tp.base.with_phi(phi_effective_unchecked(tp));
    params.validate_effective()?;
    Ok(params)
}

/// Prices both assets with the displacement factor replaced by `phi_eff`.
///
/// `phi_eff` is not clamped at one.
pub fn pd_with_transfers(tp: &TransferParams, epsilon: f64) -> Result<TransferOutcome> {
    tp.validate()?;
    let params = effective_params(tp)?;
    let ai = closed_form_pd_unchecked(&params, AssetKind::Ai);
    let non_ai = closed_form_pd_unchecked(&params, AssetKind::NonAi);
    let ai_exact = if params.delta_theta == 0.0 {
        RecursionResult {
            pd_by_state: ai.pd.into_iter().collect(),
            pd_initial: ai.pd,
            diverged_at: (!ai.is_finite()).then_some(0),
        }
    } else {
        exact_pd_ai_unchecked(&params, epsilon)?
    };
    Ok(TransferOutcome {
        tau: tp.tau,
        net_transfer: tp.net_transfer(),
        phi_eff: params.phi,
        consumption_multiple: params.phi * (1.0 + tp.base.eta),
        transfer_ratio: transfer_ratio(tp)?,
        ai,
        non_ai,
        ai_exact,
    })
}

/// Smallest tax rate at which the AI existence factor drops below one.
///
/// The search is confined to `[0, tau_peak]`, where the net transfer, and so
/// `phi_eff`, is increasing in `tau`. Returns `None` if the existence
/// condition fails across that range. The `tau` of `tp` is ignored.
pub fn existence_frontier(tp: &TransferParams, tol: f64) -> Result<Option<f64>> {
    tp.with_tau(0.0).validate()?;
    check("tol", tol, tol > 0.0, "tol > 0")?;

    let factor = |tau: f64| -> Result<f64> {
        let params = effective_params(&tp.with_tau(tau))?;
        Ok(closed_form_pd_unchecked(&params, AssetKind::Ai).existence_factor)
    };

    if factor(0.0)? < 1.0 {
        return Ok(Some(0.0));
    }
    let (mut lo, mut hi) = (0.0, tp.tau_peak());
    if factor(hi)? >= 1.0 {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if factor(mid)? < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Parameterizations of the transfer experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `eta = 0.5`, `phi = 0.5`.
    Baseline,
    /// `eta = 9`, `phi = 0.05`.
    Large,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Baseline, Scenario::Large];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Baseline => "baseline",
            Scenario::Large => "large",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.label() == label)
    }

    /// Reference calibration with `p = 0.5%`, `xi = 5%`.
    pub fn model_params(self) -> ModelParams {
        let base = ModelParams::table1_baseline().with_p(0.005).with_xi(0.05);
        match self {
            Scenario::Baseline => base.with_eta(0.5).with_phi(0.5),
            Scenario::Large => base.with_eta(9.0).with_phi(0.05),
        }
    }

    pub fn transfer_params(self, tau: f64, delta: f64) -> TransferParams {
        TransferParams {
            base: self.model_params(),
            alpha: 0.70,
            tau,
            delta,
        }
    }
}

/// Deadweight severity used for the panel data.
pub const FIGURE2_DELTA: f64 = 0.5;

/// Tax rates 0, 0.01, ..., 0.50.
pub fn default_tau_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Figure2Row {
    pub scenario: Scenario,
    pub tau: f64,
    /// Exact AI price-dividend ratio; `None` where prices diverge.
    pub pd_ai: Option<f64>,
    pub consumption_multiple: f64,
    pub phi_eff: f64,
}

/// Valuation and consumption panels over a tax grid, scenario-major.
pub fn figure2_panels(
    taus: &[f64],
    scenarios: &[Scenario],
    delta: f64,
    epsilon: f64,
) -> Result<Vec<Figure2Row>> {
    let points: Vec<(Scenario, f64)> = scenarios
        .iter()
        .flat_map(|&s| taus.iter().map(move |&tau| (s, tau)))
        .collect();
    points
        .par_iter()
        .map(|&(scenario, tau)| {
            let outcome = pd_with_transfers(&scenario.transfer_params(tau, delta), epsilon)?;
            Ok(Figure2Row {
                scenario,
                tau,
                pd_ai: outcome.pd_ai(),
                consumption_multiple: outcome.consumption_multiple,
                phi_eff: outcome.phi_eff,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_pd_ai, DEFAULT_EPSILON};
    use crate::model::round_display;
    use proptest::prelude::*;

    const EXACT: f64 = 1e-12;

    fn large(tau: f64, delta: f64) -> TransferParams {
        Scenario::Large.transfer_params(tau, delta)
    }

    #[test]
    fn no_tax_means_no_transfer() {
        let tp = large(0.0, 0.5);
        let expected = 0.05 * 0.7 * 10.0 * 1.02;
        assert!((post_transfer_consumption(&tp, 1.0).unwrap() - expected).abs() < EXACT);
        assert_eq!(phi_effective(&tp).unwrap(), 0.05);
        assert_eq!(transfer_ratio(&tp).unwrap(), 1.0);
    }

    #[test]
    fn stress_case_multiple() {
        let tp = large(0.30, 0.9);
        assert!((tp.net_transfer() - 0.219).abs() < EXACT);
        let pre = tp.alpha * 1.0 * 1.02;
        let multiple = post_transfer_consumption(&tp, 1.0).unwrap() / pre;
        assert_eq!(round_display(multiple), 3.5);
    }

    #[test]
    fn fully_wasted_transfer() {
        let tp = large(0.5, 2.0);
        let none = large(0.0, 2.0);
        assert!(!tp.waste_exceeds_transfer());
        assert!(
            (post_transfer_consumption(&tp, 1.0).unwrap()
                - post_transfer_consumption(&none, 1.0).unwrap())
            .abs()
                < EXACT
        );
        assert!(large(0.6, 2.0).waste_exceeds_transfer());
    }

    #[test]
    fn effective_displacement_by_substitution() {
        let tp = large(0.30, 0.5);
        let phi_eff = phi_effective(&tp).unwrap();
        assert!((phi_eff - (0.05 + 0.255 * 0.965 / 0.70)).abs() < EXACT);
        assert!((phi_eff - 0.4015).abs() < 1e-4);
        // Oracle: factor the consumption level directly.
        let direct = post_transfer_consumption(&tp, 1.0).unwrap() / (0.7 * 10.0 * 1.02);
        assert!((phi_eff - direct).abs() < EXACT);
        assert_eq!(round_display(phi_eff * 10.0), 4.0);
    }

    #[test]
    fn large_singularity_diverges_without_transfers() {
        let outcome = pd_with_transfers(&large(0.0, 0.5), DEFAULT_EPSILON).unwrap();
        assert!(outcome.ai.existence_factor > 1.0);
        assert!(!outcome.ai.is_finite());
        assert!(outcome.pd_ai().is_none());
        assert_eq!(outcome.consumption_multiple, 0.5);

        let outcome = pd_with_transfers(&large(0.3, 0.5), DEFAULT_EPSILON).unwrap();
        assert!(outcome.ai.is_finite());
        assert!(outcome.pd_ai().is_some());
    }

    #[test]
    fn baseline_without_transfers_matches_grid() {
        let tp = Scenario::Baseline.transfer_params(0.0, 0.5);
        let outcome = pd_with_transfers(&tp, DEFAULT_EPSILON).unwrap();
        assert_eq!(round_display(outcome.pd_ai().unwrap()), 15.0);
        assert_eq!(outcome.consumption_multiple, 0.75);
        let exact = exact_pd_ai(&tp.base, DEFAULT_EPSILON).unwrap();
        assert_eq!(outcome.ai_exact, exact);
    }

    #[test]
    fn frontier_for_baseline_is_zero() {
        let tp = Scenario::Baseline.transfer_params(0.0, 0.5);
        assert_eq!(existence_frontier(&tp, 1e-10).unwrap(), Some(0.0));
    }

    #[test]
    fn frontier_for_large_singularity() {
        let tol = 1e-10;
        let tau = existence_frontier(&large(0.0, 0.5), tol).unwrap().unwrap();
        assert!(tau > 0.0 && tau < 0.5);
        let factor = |tau| {
            pd_with_transfers(&large(tau, 0.5), DEFAULT_EPSILON)
                .unwrap()
                .ai
                .existence_factor
        };
        assert!(factor(tau) < 1.0);
        assert!(factor(tau - 2.0 * tol) >= 1.0);
        assert!(
            (tau - 0.035_352_800_457_886_2).abs() < 1e-9,
            "frontier {tau}"
        );
    }

    #[test]
    fn frontier_not_found_when_waste_dominates() {
        assert_eq!(existence_frontier(&large(0.0, 1e6), 1e-10).unwrap(), None);
    }

    #[test]
    fn panels_at_zero_tax() {
        let rows =
            figure2_panels(&[0.0, 0.3], &Scenario::ALL, FIGURE2_DELTA, DEFAULT_EPSILON).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].scenario, Scenario::Baseline);
        assert_eq!(rows[0].consumption_multiple, 0.75);
        assert_eq!(round_display(rows[0].pd_ai.unwrap()), 15.0);
        assert_eq!(rows[2].scenario, Scenario::Large);
        assert_eq!(rows[2].consumption_multiple, 0.5);
        assert_eq!(rows[2].pd_ai, None);
        assert!(rows[3].pd_ai.is_some());
    }

    #[test]
    fn default_grid_spans_half() {
        let grid = default_tau_grid();
        assert_eq!(grid.len(), 51);
        assert_eq!(grid[30], 0.3);
        assert_eq!(grid[50], 0.5);
    }

    prop_compose! {
        fn transfer_setup()(
            tau in 0.0..0.99f64,
            delta in 0.0..3.0f64,
            alpha in 0.05..0.95f64,
            phi in 0.01..1.0f64,
        ) -> TransferParams {
            TransferParams {
                base: Scenario::Baseline.model_params().with_phi(phi),
                alpha,
                tau,
                delta,
            }
        }
    }

    proptest! {
        #[test]
        fn ratio_ignores_productivity_jump(tp in transfer_setup()) {
            let small = TransferParams { base: tp.base.with_eta(0.5), ..tp };
            let big = TransferParams { base: tp.base.with_eta(9.0), ..tp };
            let a = transfer_ratio(&small).unwrap();
            let b = transfer_ratio(&big).unwrap();
            prop_assert!((a - b).abs() < EXACT);
            // Direct ratio of consumption levels.
            let none = |t: TransferParams| post_transfer_consumption(&t.with_tau(0.0), 1.0).unwrap();
            let with = |t: TransferParams| post_transfer_consumption(&t, 1.0).unwrap();
            prop_assert!((with(big) / none(big) - with(small) / none(small)).abs() < 1e-10);
        }

        #[test]
        fn ratio_exceeds_one_iff_net_gain(tp in transfer_setup()) {
            let ratio = transfer_ratio(&tp).unwrap();
            let gains = tp.tau > 0.0 && tp.delta * tp.tau < 1.0;
            prop_assert_eq!(ratio > 1.0, gains);
        }

        #[test]
        fn multiple_is_consistent(tp in transfer_setup()) {
            prop_assume!(!tp.waste_exceeds_transfer());
            let outcome = pd_with_transfers(&tp, 1e-8).unwrap();
            let lhs = outcome.transfer_ratio * tp.base.phi * (1.0 + tp.base.eta);
            prop_assert!((lhs - outcome.consumption_multiple).abs() < EXACT);
            prop_assert!((outcome.phi_eff / tp.base.phi - outcome.transfer_ratio).abs() < 1e-9);
        }

        #[test]
        fn transfers_compress_valuations(tp in transfer_setup(), step in 0.001..0.1f64) {
            let higher = tp.tau + step;
            prop_assume!(higher < tp.tau_peak());
            let lo = pd_with_transfers(&tp, 1e-8).unwrap();
            let hi = pd_with_transfers(&tp.with_tau(higher), 1e-8).unwrap();
            prop_assert!(hi.consumption_multiple > lo.consumption_multiple);
            if let (Some(a), Some(b)) = (lo.pd_ai(), hi.pd_ai()) {
                prop_assert!(b < a);
            }
        }
    }
}
