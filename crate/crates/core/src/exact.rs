//! Exact AI price-dividend ratios by backward recursion over the chain of
//! post-singularity AI shares.
//!
//! Each non-extinction singularity moves the AI share along
//! `theta' = theta + delta_theta (1 - theta)`, so the AI growth factor, and
//! with it the price-dividend ratio, depends on how many singularities have
//! already happened. Writing `v_k` for the ratio at chain state `k`, the Euler
//! equation gives
//!
//! ```text
//! v_k = A_no (v_k + 1) + A_sing(theta_k) (v_{k+1} + 1)
//! ```
//!
//! which is solved for `v_k` from a terminal state close to `theta = 1`, where
//! the stationary closed form becomes exact.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ai_growth_at, check, closed_form_pd_unchecked, AssetKind, ModelParams};

/// Default terminal gap `1 - theta_K` for the recursion.
pub const DEFAULT_EPSILON: f64 = 1e-10;

/// Singularity probabilities of the reference grid.
pub const TABLE1_P: [f64; 5] = [0.001, 0.002, 0.005, 0.008, 0.010];
/// Extinction probabilities of the reference grid.
pub const TABLE1_XI: [f64; 4] = [0.0, 0.05, 0.10, 0.20];

/// AI shares `theta_0 < theta_1 < ... < theta_K` reached after successive
/// non-extinction singularities.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaChain {
    thetas: Vec<f64>,
}

impl ThetaChain {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Number of singularity steps `K`; the chain holds `K + 1` shares.
    pub fn steps(&self) -> usize {
        self.thetas.len() - 1
    }

    pub fn terminal_gap(&self) -> f64 {
        1.0 - self.thetas[self.thetas.len() - 1]
    }
}

/// Builds the shortest chain whose terminal gap `1 - theta_K` is at most
/// `epsilon`.
pub fn build_theta_chain(theta0: f64, delta_theta: f64, epsilon: f64) -> Result<ThetaChain> {
    check(
        "theta",
        theta0,
        theta0 > 0.0 && theta0 < 1.0,
        "0 < theta < 1",
    )?;
    check(
        "delta_theta",
        delta_theta,
        (0.0..1.0).contains(&delta_theta),
        "0 <= delta_theta < 1",
    )?;
    check("epsilon", epsilon, epsilon > 0.0, "epsilon > 0")?;
    if delta_theta == 0.0 {
        return Err(Error::ChainDegenerate);
    }

    // Iterate on the gap so that 1 - theta_{k+1} = (1 - delta_theta)(1 - theta_k)
    // holds without cancellation.
    let mut gap = 1.0 - theta0;
    let mut thetas = vec![theta0];
    while gap > epsilon {
        gap *= 1.0 - delta_theta;
        thetas.push(1.0 - gap);
    }
    Ok(ThetaChain { thetas })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecursionResult {
    /// `v_k` aligned with the chain; empty when the recursion diverges.
    pub pd_by_state: Vec<f64>,
    /// `v_0`, the quoted AI price-dividend ratio.
    pub pd_initial: Option<f64>,
    /// Chain index at which a per-state existence condition failed.
    pub diverged_at: Option<usize>,
}

impl RecursionResult {
    pub fn is_finite(&self) -> bool {
        self.pd_initial.is_some()
    }

    fn diverged(index: usize) -> Self {
        Self {
            pd_by_state: Vec::new(),
            pd_initial: None,
            diverged_at: Some(index),
        }
    }
}

/// Numerically exact AI price-dividend ratio at the current AI share.
pub fn exact_pd_ai(params: &ModelParams, epsilon: f64) -> Result<RecursionResult> {
    params.validate()?;
    exact_pd_ai_unchecked(params, epsilon)
}

pub(crate) fn exact_pd_ai_unchecked(params: &ModelParams, epsilon: f64) -> Result<RecursionResult> {
    let chain = build_theta_chain(params.theta, params.delta_theta, epsilon)?;
    let last = chain.steps();

    let no_singularity = params.growth_discount() * (1.0 - params.p);
    if no_singularity >= 1.0 {
        return Ok(RecursionResult::diverged(last));
    }

    let terminal = closed_form_pd_unchecked(&params.with_theta(chain.thetas[last]), AssetKind::Ai);
    let Some(mut next) = terminal.pd else {
        return Ok(RecursionResult::diverged(last));
    };

    // Tiny share jumps give chains of tens of millions of states, so the
    // shares are overwritten in place by the values they produce.
    let jump = params.growth_discount() * params.singularity_weight();
    let mut pd_by_state = chain.thetas;
    pd_by_state[last] = next;
    for k in (0..last).rev() {
        let growth = ai_growth_at(pd_by_state[k], params.delta_theta, params.eta);
        next = (no_singularity + jump * growth * (next + 1.0)) / (1.0 - no_singularity);
        pd_by_state[k] = next;
    }

    Ok(RecursionResult {
        pd_initial: Some(pd_by_state[0]),
        pd_by_state,
        diverged_at: None,
    })
}

/// One cell of the reference grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Row {
    pub p: f64,
    pub xi: f64,
    /// Exact AI ratio from the recursion.
    pub pd_ai: Option<f64>,
    /// Non-AI closed form, which is exact.
    pub pd_n: Option<f64>,
    pub ratio: Option<f64>,
}

/// Evaluates every `(p, xi)` pair in row-major order (`p` outer).
///
/// With `delta_theta = 0` the closed form is exact for both assets and is used
/// in place of the recursion.
pub fn table1_grid(
    base: &ModelParams,
    p_list: &[f64],
    xi_list: &[f64],
    epsilon: f64,
) -> Result<Vec<Table1Row>> {
    let cells: Vec<(f64, f64)> = p_list
        .iter()
        .flat_map(|&p| xi_list.iter().map(move |&xi| (p, xi)))
        .collect();
    cells
        .par_iter()
        .map(|&(p, xi)| {
            let params = base.with_p(p).with_xi(xi);
            params.validate()?;
            let n = closed_form_pd_unchecked(&params, AssetKind::NonAi);
            let pd_ai = if params.delta_theta == 0.0 {
                closed_form_pd_unchecked(&params, AssetKind::Ai).pd
            } else {
                exact_pd_ai_unchecked(&params, epsilon)?.pd_initial
            };
            let ratio = match (pd_ai, n.pd) {
                (Some(ai), Some(non_ai)) => Some(ai / non_ai),
                _ => None,
            };
            Ok(Table1Row {
                p,
                xi,
                pd_ai,
                pd_n: n.pd,
                ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{closed_form_pd, round_display};

    fn baseline() -> ModelParams {
        ModelParams::table1_baseline()
    }

    #[test]
    fn chain_length_matches_log_formula() {
        let chain = build_theta_chain(0.15, 0.2, 1e-10).unwrap();
        let k = ((1e-10f64 / 0.85).ln() / 0.8f64.ln()).ceil() as usize;
        assert_eq!(k, 103);
        assert_eq!(chain.steps(), k);
        assert!(chain.terminal_gap() <= 1e-10);
        assert!((chain.thetas()[1] - 0.32).abs() < 1e-15);
    }

    #[test]
    fn chain_follows_share_update() {
        let chain = build_theta_chain(0.15, 0.2, 1e-10).unwrap();
        for w in chain.thetas().windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] - (w[0] + 0.2 * (1.0 - w[0]))).abs() < 1e-15);
        }
    }

    #[test]
    fn already_terminal_chain() {
        let chain = build_theta_chain(0.15, 0.2, 0.9).unwrap();
        assert_eq!(chain.thetas(), &[0.15]);
        assert_eq!(chain.steps(), 0);
    }

    #[test]
    fn degenerate_chain_is_rejected() {
        assert_eq!(
            build_theta_chain(0.15, 0.0, 1e-10),
            Err(Error::ChainDegenerate)
        );
        assert!(build_theta_chain(0.15, 0.2, 0.0).is_err());
        assert!(exact_pd_ai(&baseline().with_delta_theta(0.0), 1e-10).is_err());
    }

    #[test]
    fn reference_cells() {
        for (p, xi, expected) in [(0.005, 0.0, 15.5), (0.01, 0.0, 26.5), (0.001, 0.2, 10.2)] {
            let r = exact_pd_ai(&baseline().with_p(p).with_xi(xi), DEFAULT_EPSILON).unwrap();
            assert_eq!(
                round_display(r.pd_initial.unwrap()),
                expected,
                "p={p} xi={xi}"
            );
        }
    }

    #[test]
    fn values_decrease_along_chain() {
        let r = exact_pd_ai(&baseline().with_p(0.01), DEFAULT_EPSILON).unwrap();
        assert!(r.pd_by_state.iter().all(|&v| v > 0.0));
        for w in r.pd_by_state.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn terminal_seed_is_immaterial() {
        let params = baseline().with_p(0.01).with_xi(0.05);
        let loose = exact_pd_ai(&params, 1e-8).unwrap().pd_initial.unwrap();
        let tight = exact_pd_ai(&params, 1e-12).unwrap().pd_initial.unwrap();
        assert!((loose - tight).abs() < 1e-9);
    }

    #[test]
    fn divergent_terminal_is_reported() {
        let params = baseline().with_eta(9.0).with_phi(0.05).with_xi(0.05);
        let r = exact_pd_ai(&params, DEFAULT_EPSILON).unwrap();
        assert!(!r.is_finite());
        assert!(r.pd_by_state.is_empty());
        let chain = build_theta_chain(0.15, 0.2, DEFAULT_EPSILON).unwrap();
        assert_eq!(r.diverged_at, Some(chain.steps()));
    }

    #[test]
    fn small_share_jump_matches_closed_form() {
        let params = baseline().with_p(0.01).with_delta_theta(1e-6);
        let exact = exact_pd_ai(&params, DEFAULT_EPSILON)
            .unwrap()
            .pd_initial
            .unwrap();
        let closed = closed_form_pd(&params, AssetKind::Ai).unwrap().pd.unwrap();
        assert!(((exact - closed) / closed).abs() < 1e-4);
    }

    #[test]
    fn grid_without_singularity_prices_assets_alike() {
        let rows = table1_grid(&baseline(), &[0.0], &TABLE1_XI, DEFAULT_EPSILON).unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows {
            assert!((row.pd_ai.unwrap() - row.pd_n.unwrap()).abs() < 1e-9);
            assert_eq!(round_display(row.ratio.unwrap()), 1.0);
        }
    }

    #[test]
    fn grid_order_and_bottom_row() {
        let rows = table1_grid(&baseline(), &TABLE1_P, &TABLE1_XI, DEFAULT_EPSILON).unwrap();
        assert_eq!(rows.len(), 20);
        assert_eq!((rows[1].p, rows[1].xi), (0.001, 0.05));
        assert_eq!((rows[4].p, rows[4].xi), (0.002, 0.0));
        let last = rows[19];
        assert_eq!(
            (
                round_display(last.pd_ai.unwrap()),
                round_display(last.pd_n.unwrap()),
                round_display(last.ratio.unwrap())
            ),
            (20.5, 12.0, 1.7)
        );
    }

    #[test]
    fn grid_is_monotone_in_p() {
        let rows = table1_grid(&baseline(), &TABLE1_P, &TABLE1_XI, DEFAULT_EPSILON).unwrap();
        for xi_idx in 0..TABLE1_XI.len() {
            let column: Vec<f64> = rows
                .iter()
                .skip(xi_idx)
                .step_by(TABLE1_XI.len())
                .map(|r| r.pd_ai.unwrap())
                .collect();
            assert!(column.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
