//! Model parameters, singularity growth factors and closed-form valuations.

use std::fmt;

use crate::error::{Error, Result};

/// Full parameter vector of the pricing model. All rates are per period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Subjective discount factor, in (0, 1).
    pub beta: f64,
    /// Baseline aggregate consumption growth, > -1.
    pub g: f64,
    /// Relative risk aversion, > 1.
    pub gamma: f64,
    /// Singularity probability.
    pub p: f64,
    /// Extinction probability conditional on a singularity.
    pub xi: f64,
    /// Aggregate productivity jump on a non-extinction singularity.
    pub eta: f64,
    /// Fraction of its consumption share the household keeps when displaced.
    pub phi: f64,
    /// Current AI dividend share of aggregate consumption.
    pub theta: f64,
    /// Fraction of the non-AI remainder that moves to AI on a singularity.
    pub delta_theta: f64,
}

impl ModelParams {
    /// Calibration of the reference price-dividend grid at `p = 0.5%`, `xi = 0`.
    pub fn table1_baseline() -> Self {
        Self {
            beta: 0.96,
            g: 0.02,
            gamma: 4.0,
            p: 0.005,
            xi: 0.0,
            eta: 0.5,
            phi: 0.5,
            theta: 0.15,
            delta_theta: 0.2,
        }
    }

    pub fn with_p(self, p: f64) -> Self {
        Self { p, ..self }
    }

    pub fn with_xi(self, xi: f64) -> Self {
        Self { xi, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn with_delta_theta(self, delta_theta: f64) -> Self {
        Self {
            delta_theta,
            ..self
        }
    }

    /// Checks every field against its domain, reporting the first offender.
    pub fn validate(&self) -> Result<()> {
        self.check_common()?;
        check(
            "phi",
            self.phi,
            self.phi > 0.0 && self.phi <= 1.0,
            "0 < phi <= 1",
        )
    }

    /// Domain check used when pricing with an effective displacement factor,
    /// which may exceed one under generous transfers.
    pub(crate) fn validate_effective(&self) -> Result<()> {
        self.check_common()?;
        check("phi", self.phi, self.phi > 0.0, "phi > 0")
    }

    fn check_common(&self) -> Result<()> {
        check(
            "beta",
            self.beta,
            self.beta > 0.0 && self.beta < 1.0,
            "0 < beta < 1",
        )?;
        check("g", self.g, self.g > -1.0, "1 + g > 0")?;
        check("gamma", self.gamma, self.gamma > 1.0, "gamma > 1")?;
        check("p", self.p, (0.0..=1.0).contains(&self.p), "0 <= p <= 1")?;
        check(
            "xi",
            self.xi,
            (0.0..=1.0).contains(&self.xi),
            "0 <= xi <= 1",
        )?;
        check("eta", self.eta, self.eta >= 0.0, "eta >= 0")?;
        check(
            "theta",
            self.theta,
            self.theta > 0.0 && self.theta < 1.0,
            "0 < theta < 1",
        )?;
        check(
            "delta_theta",
            self.delta_theta,
            (0.0..1.0).contains(&self.delta_theta),
            "0 <= delta_theta < 1",
        )
    }

    /// `beta (1+g)^(1-gamma)`: the discounted, marginal-utility-weighted
    /// growth factor on the no-singularity branch.
    pub fn growth_discount(&self) -> f64 {
        self.beta * (1.0 + self.g).powf(1.0 - self.gamma)
    }

    /// `p (1-xi) (1+eta)^(-gamma) phi^(-gamma)`: weight that multiplies a
    /// dividend growth factor in the non-extinction singularity state.
    pub fn singularity_weight(&self) -> f64 {
        self.p * (1.0 - self.xi) * (1.0 + self.eta).powf(-self.gamma) * self.phi.powf(-self.gamma)
    }

    /// Existence factor for a dividend stream whose singularity growth factor
    /// is `growth`.
    pub(crate) fn existence_at(&self, growth: f64) -> f64 {
        self.growth_discount() * ((1.0 - self.p) + self.singularity_weight() * growth)
    }
}

pub(crate) fn check(
    field: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            expected,
        })
    }
}

/// AI dividend growth factor on a non-extinction singularity when the current
/// AI share is `theta`.
pub(crate) fn ai_growth_at(theta: f64, delta_theta: f64, eta: f64) -> f64 {
    (theta + delta_theta * (1.0 - theta)) / theta * (1.0 + eta)
}

pub(crate) fn non_ai_growth(delta_theta: f64, eta: f64) -> f64 {
    (1.0 - delta_theta) * (1.0 + eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssetKind {
    Ai,
    NonAi,
}

impl AssetKind {
    pub const ALL: [AssetKind; 2] = [AssetKind::Ai, AssetKind::NonAi];

    pub fn label(self) -> &'static str {
        match self {
            AssetKind::Ai => "ai",
            AssetKind::NonAi => "non_ai",
        }
    }
}

impl fmt::Display for AssetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Dividend growth factors conditional on a non-extinction singularity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma_ai: f64,
    pub gamma_n: f64,
}

impl GammaPair {
    pub fn get(&self, asset: AssetKind) -> f64 {
        match asset {
            AssetKind::Ai => self.gamma_ai,
            AssetKind::NonAi => self.gamma_n,
        }
    }
}

/// Closed-form valuation of one asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PDQuote {
    pub asset: AssetKind,
    pub existence_factor: f64,
    /// `None` when the pricing sum diverges.
    pub pd: Option<f64>,
}

impl PDQuote {
    pub fn from_existence_factor(asset: AssetKind, existence_factor: f64) -> Self {
        let pd = (existence_factor < 1.0).then(|| existence_factor / (1.0 - existence_factor));
        Self {
            asset,
            existence_factor,
            pd,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pd.is_some()
    }
}

pub fn growth_factors(params: &ModelParams) -> Result<GammaPair> {
    params.validate()?;
    Ok(growth_factors_unchecked(params))
}

pub(crate) fn growth_factors_unchecked(params: &ModelParams) -> GammaPair {
    GammaPair {
        gamma_ai: ai_growth_at(params.theta, params.delta_theta, params.eta),
        gamma_n: non_ai_growth(params.delta_theta, params.eta),
    }
}

/// SDF-weighted expected dividend growth per period; prices are finite iff
/// this is below one.
pub fn existence_factor(params: &ModelParams, asset: AssetKind) -> Result<f64> {
    params.validate()?;
    Ok(existence_factor_unchecked(params, asset))
}

pub(crate) fn existence_factor_unchecked(params: &ModelParams, asset: AssetKind) -> f64 {
    params.existence_at(growth_factors_unchecked(params).get(asset))
}

/// Stationary price-dividend ratio `A / (1 - A)`.
///
/// Exact for non-AI stocks. For AI stocks it assumes the post-singularity
/// ratio equals the pre-singularity one, which is only exact as
/// `delta_theta -> 0`; see [`crate::exact::exact_pd_ai`].
pub fn closed_form_pd(params: &ModelParams, asset: AssetKind) -> Result<PDQuote> {
    params.validate()?;
    Ok(closed_form_pd_unchecked(params, asset))
}

pub(crate) fn closed_form_pd_unchecked(params: &ModelParams, asset: AssetKind) -> PDQuote {
    PDQuote::from_existence_factor(asset, existence_factor_unchecked(params, asset))
}

/// Ratio of the AI to the non-AI price-dividend ratio.
pub fn pd_ratio(ai: &PDQuote, n: &PDQuote) -> Result<f64> {
    let ai_pd = ai.pd.ok_or(Error::UndefinedRatio(ai.asset.label()))?;
    let n_pd = n.pd.ok_or(Error::UndefinedRatio(n.asset.label()))?;
    Ok(ai_pd / n_pd)
}

/// Rounds half away from zero to one decimal, the display convention of the
/// reference tables.
pub fn round_display(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}
