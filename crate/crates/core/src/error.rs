use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{field}` = {value} is out of domain: {expected}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("price-dividend ratio is undefined: the {0} quote diverges")]
    UndefinedRatio(&'static str),

    #[error("theta chain is degenerate for delta_theta = 0; the closed form is already exact")]
    ChainDegenerate,

    #[error("geometric utility sum diverges: discount factor {factor} >= 1")]
    DivergentSum { factor: f64 },

    #[error("hypothesis phi*(1+eta) < 1 does not hold (phi*(1+eta) = {value})")]
    HypothesisViolated { value: f64 },

    #[error(
        "horizon {horizon} too short: truncation tail bound {bound:e} exceeds limit {limit:e}"
    )]
    HorizonTooShort {
        horizon: usize,
        bound: f64,
        limit: f64,
    },
}
