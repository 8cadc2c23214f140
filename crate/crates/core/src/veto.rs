//! Veto versus development of AI.
//!
//! The household may veto AI development at a permanent consumption cost
//! `kappa`. If it lets development proceed, a singularity arrives with
//! probability `p` each period; conditional on non-extinction it is positive
//! with probability `q` (share rises to `min(1, alpha / phi)`) or negative
//! (share falls to `phi * alpha`). After the first singularity the economy
//! grows deterministically at the new share. Extinction utility is zero.
//!
//! Under complete markets the household consumes `alpha (1+eta) C (1+g)` in
//! both singularity outcomes.

use crate::error::{Error, Result};
use crate::model::{check, ModelParams};

/// Step of the coarse risk-aversion scan before bisection.
pub const GAMMA_SCAN_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VetoParams {
    pub base: ModelParams,
    /// Household consumption share.
    pub alpha: f64,
    /// Probability that a non-extinction singularity is positive.
    pub q: f64,
    /// Permanent fraction of consumption lost to a veto.
    pub kappa: f64,
}

impl VetoParams {
    /// Numerical example: baseline displacement with `p = 1%`, `xi = 5%`,
    /// `gamma = 10`, `alpha = 0.7`, `q = 0.7`, `kappa = 1%`.
    pub fn reference_example() -> Self {
        Self {
            base: ModelParams::table1_baseline()
                .with_p(0.01)
                .with_xi(0.05)
                .with_gamma(10.0),
            alpha: 0.70,
            q: 0.70,
            kappa: 0.01,
        }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self {
            base: self.base.with_gamma(gamma),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        check(
            "alpha",
            self.alpha,
            self.alpha > 0.0 && self.alpha < 1.0,
            "0 < alpha < 1",
        )?;
        check("q", self.q, self.q > 0.0 && self.q <= 1.0, "0 < q <= 1")?;
        check(
            "kappa",
            self.kappa,
            (0.0..1.0).contains(&self.kappa),
            "0 <= kappa < 1",
        )
    }

    /// The maintained assumption that the positive singularity is the more
    /// likely outcome. Reported, not enforced.
    pub fn positive_more_likely(&self) -> bool {
        self.q > 0.5
    }

    /// Kaldor-Hicks efficiency of a non-extinction singularity.
    pub fn socially_efficient(&self) -> bool {
        1.0 + self.base.eta > 1.0
    }

    /// Household share after a positive singularity.
    pub fn alpha_plus(&self) -> f64 {
        (self.alpha / self.base.phi).min(1.0)
    }

    /// `phi (1+eta)`: household consumption multiple on a negative singularity.
    pub fn displacement_multiple(&self) -> f64 {
        self.base.phi * (1.0 + self.base.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Market {
    Incomplete,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VetoReport {
    pub v_veto: f64,
    pub v_develop_im: f64,
    pub v_develop_cm: f64,
    pub vetoes_im: bool,
    pub vetoes_cm: bool,
}

pub(crate) fn crra(c: f64, gamma: f64) -> f64 {
    c.powf(1.0 - gamma) / (1.0 - gamma)
}

/// Expected one-period utility gain from a non-extinction singularity under
/// incomplete markets.
pub fn delta_u(vp: &VetoParams) -> Result<f64> {
    vp.validate()?;
    let gamma = vp.base.gamma;
    let jump = 1.0 + vp.base.eta;
    Ok(vp.q * crra(vp.alpha_plus() * jump, gamma)
        + (1.0 - vp.q) * crra(vp.base.phi * vp.alpha * jump, gamma)
        - crra(vp.alpha, gamma))
}

fn deterministic_discount(vp: &VetoParams) -> Result<f64> {
    let factor = vp.base.growth_discount();
    if factor >= 1.0 {
        return Err(Error::DivergentSum { factor });
    }
    Ok(factor)
}

/// Lifetime utility under a veto, for initial aggregate consumption `c0`.
pub fn value_veto(vp: &VetoParams, c0: f64) -> Result<f64> {
    vp.validate()?;
    check("c0", c0, c0 > 0.0, "c0 > 0")?;
    let discount = deterministic_discount(vp)?;
    Ok(crra((1.0 - vp.kappa) * vp.alpha * c0, vp.base.gamma) / (1.0 - discount))
}

/// Lifetime utility when AI development proceeds.
///
/// Solves `V = u(alpha c0) + beta [(1-p) (1+g)^(1-gamma) V + p (1-xi) E W]`
/// where `W(a)` is the value of deterministic growth at share `a` from
/// post-singularity consumption `(1+eta)(1+g) c0`.
pub fn value_develop(vp: &VetoParams, market: Market, c0: f64) -> Result<f64> {
    vp.validate()?;
    check("c0", c0, c0 > 0.0, "c0 > 0")?;
    let base = &vp.base;
    let discount = deterministic_discount(vp)?;
    let continuation = discount * (1.0 - base.p);
    if continuation >= 1.0 {
        return Err(Error::DivergentSum {
            factor: continuation,
        });
    }

    let post = (1.0 + base.eta) * (1.0 + base.g) * c0;
    let after = |share: f64| crra(share * post, base.gamma) / (1.0 - discount);
    let expected_after = match market {
        Market::Incomplete => {
            vp.q * after(vp.alpha_plus()) + (1.0 - vp.q) * after(base.phi * vp.alpha)
        }
        Market::Complete => after(vp.alpha),
    };

    Ok(
        (crra(vp.alpha * c0, base.gamma) + base.beta * base.p * (1.0 - base.xi) * expected_after)
            / (1.0 - continuation),
    )
}

pub fn veto_report(vp: &VetoParams, c0: f64) -> Result<VetoReport> {
    let v_veto = value_veto(vp, c0)?;
    let v_develop_im = value_develop(vp, Market::Incomplete, c0)?;
    let v_develop_cm = value_develop(vp, Market::Complete, c0)?;
    Ok(VetoReport {
        v_veto,
        v_develop_im,
        v_develop_cm,
        vetoes_im: v_veto > v_develop_im,
        vetoes_cm: v_veto > v_develop_cm,
    })
}

/// Incomplete-market veto decision at each risk aversion in `gammas`.
pub fn veto_decisions(vp: &VetoParams, gammas: &[f64]) -> Result<Vec<bool>> {
    gammas
        .iter()
        .map(|&gamma| Ok(veto_report(&vp.with_gamma(gamma), 1.0)?.vetoes_im))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSearch {
    /// Smallest risk aversion in the range at which the household vetoes.
    pub threshold: Option<f64>,
    /// Every sign change of `V_veto - V_develop` located in the range.
    pub crossings: Vec<f64>,
}

impl ThresholdSearch {
    pub fn is_monotone(&self) -> bool {
        self.crossings.len() <= 1
    }
}

/// Locates the risk-aversion threshold above which the household vetoes
/// under incomplete markets.
///
/// A coarse scan at [`GAMMA_SCAN_STEP`] brackets every sign change, and each
/// bracket is refined by bisection until it is narrower than `tol`.
pub fn gamma_threshold(
    vp: &VetoParams,
    gamma_lo: f64,
    gamma_hi: f64,
    tol: f64,
) -> Result<ThresholdSearch> {
    vp.validate()?;
    let multiple = vp.displacement_multiple();
    if multiple >= 1.0 {
        return Err(Error::HypothesisViolated { value: multiple });
    }
    check("gamma_lo", gamma_lo, gamma_lo > 1.0, "gamma_lo > 1")?;
    check(
        "gamma_hi",
        gamma_hi,
        gamma_hi > gamma_lo,
        "gamma_hi > gamma_lo",
    )?;
    check("tol", tol, tol > 0.0, "tol > 0")?;

    let gap = |gamma: f64| -> Result<f64> {
        let report = veto_report(&vp.with_gamma(gamma), 1.0)?;
        Ok(report.v_veto - report.v_develop_im)
    };

    let steps = ((gamma_hi - gamma_lo) / GAMMA_SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|i| (gamma_lo + i as f64 * GAMMA_SCAN_STEP).min(gamma_hi))
        .collect();

    let mut crossings = Vec::new();
    let mut threshold = None;
    let mut prev = (grid[0], gap(grid[0])? > 0.0);
    if prev.1 {
        threshold = Some(gamma_lo);
    }
    for &gamma in &grid[1..] {
        let vetoes = gap(gamma)? > 0.0;
        if vetoes != prev.1 {
            let (mut lo, mut hi) = (prev.0, gamma);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if (gap(mid)? > 0.0) == prev.1 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            // `hi` sits on the side whose decision matches `vetoes`.
            crossings.push(hi);
            if vetoes && threshold.is_none() {
                threshold = Some(hi);
            }
        }
        prev = (gamma, vetoes);
    }

    Ok(ThresholdSearch {
        threshold,
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> VetoParams {
        VetoParams::reference_example()
    }

    #[test]
    fn positive_share_clamps_at_one() {
        assert_eq!(example().alpha_plus(), 1.0);
        let vp = VetoParams {
            alpha: 0.3,
            ..example()
        };
        assert!((vp.alpha_plus() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn sure_positive_singularity_is_a_gain() {
        let vp = VetoParams {
            q: 1.0,
            ..example()
        };
        assert!(delta_u(&vp).unwrap() > 0.0);
    }

    #[test]
    fn gain_falls_without_bound_in_risk_aversion() {
        let gains: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&g| delta_u(&example().with_gamma(g)).unwrap())
            .collect();
        assert!(gains.windows(2).all(|w| w[1] < w[0]));
        assert!(gains[3] < -1e15);
    }

    #[test]
    fn veto_value_golden() {
        let v = value_veto(&example(), 1.0).unwrap();
        // Oracle: truncated summation of the discounted utility stream.
        let discount = 0.96 * 1.02f64.powf(-9.0);
        let u = crra(0.99 * 0.7, 10.0);
        let truncated: f64 = (0..10_000).map(|t| discount.powi(t) * u).sum();
        assert!(((v - truncated) / truncated).abs() < 1e-10);
        assert!((v - -15.322196363927503).abs() < 1e-12);
    }

    #[test]
    fn veto_value_falls_without_bound_as_cost_grows() {
        let values: Vec<f64> = [0.5, 0.9, 0.99, 0.9999]
            .iter()
            .map(|&kappa| value_veto(&VetoParams { kappa, ..example() }, 1.0).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert!(values[3] < -1e30);
    }

    #[test]
    fn costless_veto_without_singularity_is_indifferent() {
        let vp = VetoParams {
            kappa: 0.0,
            base: example().base.with_p(0.0),
            ..example()
        };
        let report = veto_report(&vp, 1.0).unwrap();
        assert_eq!(report.v_veto, report.v_develop_im);
        assert_eq!(report.v_veto, report.v_develop_cm);
        assert!(!report.vetoes_im && !report.vetoes_cm);
    }

    #[test]
    fn no_singularity_develop_value() {
        let vp = VetoParams {
            base: example().base.with_p(0.0),
            ..example()
        };
        let expected = crra(0.7, 10.0) / (1.0 - vp.base.growth_discount());
        for market in [Market::Incomplete, Market::Complete] {
            let v = value_develop(&vp, market, 1.0).unwrap();
            assert!(((v - expected) / expected).abs() < 1e-14);
        }
    }

    #[test]
    fn numerical_example_decisions() {
        let report = veto_report(&example(), 1.0).unwrap();
        assert!(report.v_veto < 0.0 && report.v_develop_im < 0.0 && report.v_develop_cm < 0.0);
        assert!(report.vetoes_im);
        assert!(!report.vetoes_cm);
    }

    #[test]
    fn divergent_discounting_is_an_error() {
        let vp = VetoParams {
            base: ModelParams {
                beta: 0.99,
                g: -0.05,
                ..example().base
            },
            ..example()
        };
        assert!(matches!(
            value_veto(&vp, 1.0),
            Err(Error::DivergentSum { .. })
        ));
        assert!(matches!(
            value_develop(&vp, Market::Complete, 1.0),
            Err(Error::DivergentSum { .. })
        ));
    }

    #[test]
    fn threshold_brackets_example() {
        let search = gamma_threshold(&example(), 1.5, 15.0, 1e-6).unwrap();
        let threshold = search.threshold.unwrap();
        assert!(threshold > 9.0 && threshold <= 10.0);
        assert!(search.is_monotone());
        assert!(
            veto_report(&example().with_gamma(threshold + 1e-5), 1.0)
                .unwrap()
                .vetoes_im
        );
        assert!(
            !veto_report(&example().with_gamma(threshold - 1e-5), 1.0)
                .unwrap()
                .vetoes_im
        );
    }

    #[test]
    fn threshold_agrees_with_fine_scan() {
        // Oracle: brute-force decision scan on a 0.01 grid.
        let gammas: Vec<f64> = (0..=1300).map(|i| 2.0 + i as f64 * 0.01).collect();
        let decisions = veto_decisions(&example(), &gammas).unwrap();
        let first = decisions.iter().position(|&v| v).unwrap();
        let brute = gammas[first];
        let search = gamma_threshold(&example(), 2.0, 15.0, 1e-6).unwrap();
        let threshold = search.threshold.unwrap();
        assert!(threshold <= brute && threshold > brute - 0.01 - 1e-6);
    }

    #[test]
    fn sure_positive_singularity_never_vetoes() {
        let vp = VetoParams {
            q: 1.0,
            ..example()
        };
        let search = gamma_threshold(&vp, 1.5, 40.0, 1e-6).unwrap();
        assert_eq!(search.threshold, None);
        assert!(search.crossings.is_empty());
    }

    #[test]
    fn threshold_requires_consumption_drop() {
        let vp = VetoParams {
            base: example().base.with_phi(0.8),
            ..example()
        };
        assert!(matches!(
            gamma_threshold(&vp, 2.0, 10.0, 1e-6),
            Err(Error::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn complete_markets_never_veto_for_small_cost() {
        for gamma in 2..=12 {
            let report = veto_report(&example().with_gamma(gamma as f64), 1.0).unwrap();
            assert!(report.v_develop_cm > report.v_veto, "gamma = {gamma}");
        }
    }

    #[test]
    fn develop_value_rises_with_extinction_risk() {
        // Extinction pays the normalized utility 0, above any CRRA level.
        let values: Vec<f64> = [0.0, 0.05, 0.2, 0.5]
            .iter()
            .map(|&xi| {
                let vp = VetoParams {
                    base: example().base.with_xi(xi),
                    ..example()
                };
                value_develop(&vp, Market::Incomplete, 1.0).unwrap()
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }

    prop_compose! {
        fn valid_veto()(
            beta in 0.85..0.99f64,
            g in 0.0..0.05f64,
            gamma in 1.5..12.0f64,
            p in 0.0..0.05f64,
            xi in 0.0..0.5f64,
            eta in 0.0..2.0f64,
            phi in 0.2..0.95f64,
            alpha in 0.1..0.95f64,
            q in 0.05..0.95f64,
            kappa in 0.0..0.2f64,
        ) -> VetoParams {
            VetoParams {
                base: ModelParams { beta, g, gamma, p, xi, eta, phi, ..ModelParams::table1_baseline() },
                alpha,
                q,
                kappa,
            }
        }
    }

    proptest! {
        #[test]
        fn decisions_invariant_to_consumption_scale(vp in valid_veto(), scale in 0.1..10.0f64) {
            let unit = veto_report(&vp, 1.0).unwrap();
            let scaled = veto_report(&vp, scale).unwrap();
            let factor = scale.powf(1.0 - vp.base.gamma);
            for (a, b) in [
                (unit.v_veto, scaled.v_veto),
                (unit.v_develop_im, scaled.v_develop_im),
                (unit.v_develop_cm, scaled.v_develop_cm),
            ] {
                prop_assert!(((a * factor - b) / b).abs() < 1e-10);
            }
            prop_assert_eq!(unit.vetoes_im, scaled.vetoes_im);
            prop_assert_eq!(unit.vetoes_cm, scaled.vetoes_cm);
        }

        #[test]
        fn complete_markets_dominate_fair_share_lotteries(vp in valid_veto()) {
            // Jensen: when the expected post-singularity share does not exceed
            // alpha, hedging the share weakly raises expected utility.
            prop_assume!(vp.q * vp.alpha_plus() + (1.0 - vp.q) * vp.base.phi * vp.alpha <= vp.alpha);
            let im = value_develop(&vp, Market::Incomplete, 1.0).unwrap();
            let cm = value_develop(&vp, Market::Complete, 1.0).unwrap();
            prop_assert!(cm >= im);
            if vp.base.p * (1.0 - vp.base.xi) > 1e-4 {
                prop_assert!(cm > im);
            }
        }

        #[test]
        fn veto_cost_only_moves_veto_value(vp in valid_veto(), bump in 0.001..0.5f64) {
            let costlier = VetoParams { kappa: vp.kappa + bump, ..vp };
            prop_assert!(value_veto(&costlier, 1.0).unwrap() < value_veto(&vp, 1.0).unwrap());
            for market in [Market::Incomplete, Market::Complete] {
                prop_assert_eq!(
                    value_develop(&costlier, market, 1.0).unwrap(),
                    value_develop(&vp, market, 1.0).unwrap()
                );
            }
        }

        #[test]
        fn values_are_negative(vp in valid_veto()) {
            let report = veto_report(&vp, 1.0).unwrap();
            prop_assert!(report.v_veto < 0.0);
            prop_assert!(report.v_develop_im < 0.0);
            prop_assert!(report.v_develop_cm < 0.0);
        }
    }
}
