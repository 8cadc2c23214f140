//! Monte Carlo pricing oracle.
//!
//! Simulates singularity arrivals, extinction, displacement and AI-share
//! jumps period by period, and prices each asset as the sample mean of
//! `sum_t beta^t (c_t / c_0)^(-gamma) D_t / D_0` over independent paths.
//! Every path draws from its own ChaCha stream keyed by the path index, so
//! results do not depend on how paths are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ai_growth_at, non_ai_growth, AssetKind, ModelParams};

/// The truncation tail must stay below this fraction of the target tolerance.
pub const TAIL_FRACTION: f64 = 0.1;

/// Paths per work item; fixes the reduction order independently of threads.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub seed: u64,
    pub n_paths: usize,
    /// Number of simulated periods per path.
    pub horizon: usize,
    pub params: ModelParams,
    /// Absolute accuracy the estimate is meant to resolve, in P/D units.
    pub target_tolerance: f64,
}

impl PathConfig {
    /// Picks the shortest horizon whose truncation tail bound for both
    /// assets is below [`TAIL_FRACTION`] of `target_tolerance`.
    pub fn with_tail_bound(
        params: ModelParams,
        seed: u64,
        n_paths: usize,
        target_tolerance: f64,
    ) -> Result<Self> {
        params.validate()?;
        crate::model::check(
            "target_tolerance",
            target_tolerance,
            target_tolerance > 0.0,
            "target_tolerance > 0",
        )?;
        let factor = AssetKind::ALL
            .iter()
            .map(|&a| max_existence_factor(&params, a))
            .fold(0.0, f64::max);
        if factor >= 1.0 {
            return Err(Error::HorizonTooShort {
                horizon: usize::MAX,
                bound: f64::INFINITY,
                limit: TAIL_FRACTION * target_tolerance,
            });
        }
        // factor^(T+1) / (1 - factor) < limit
        let limit = TAIL_FRACTION * target_tolerance;
        let horizon = if factor == 0.0 {
            1
        } else {
            let needed = ((limit * (1.0 - factor)).ln() / factor.ln()).ceil() as usize;
            needed.max(1)
        };
        Ok(Self {
            seed,
            n_paths,
            horizon,
            params,
            target_tolerance,
        })
    }

    /// Upper bound on the expected discounted dividends omitted beyond the
    /// horizon, in P/D units.
    pub fn tail_bound(&self, asset: AssetKind) -> f64 {
        let factor = max_existence_factor(&self.params, asset);
        if factor >= 1.0 {
            return f64::INFINITY;
        }
        factor.powi(self.horizon as i32 + 1) / (1.0 - factor)
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_paths == 0 {
            return Err(Error::InvalidParameter {
                field: "n_paths",
                value: 0.0,
                expected: "n_paths >= 1",
            });
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter {
                field: "horizon",
                value: 0.0,
                expected: "horizon >= 1",
            });
        }
        Ok(())
    }
}

/// Largest per-period existence factor the asset can face along a path. The
/// AI growth factor falls as the AI share rises, so the initial share is the
/// worst case.
fn max_existence_factor(params: &ModelParams, asset: AssetKind) -> f64 {
    let growth = match asset {
        AssetKind::Ai => ai_growth_at(params.theta, params.delta_theta, params.eta),
        AssetKind::NonAi => non_ai_growth(params.delta_theta, params.eta),
    };
    params.existence_at(growth)
}

/// One simulated period. Growth factors map period `t` levels to `t + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodRecord {
    pub singularity: bool,
    pub extinct: bool,
    /// AI share at the start of the period.
    pub theta: f64,
    pub aggregate_growth: f64,
    pub household_growth: f64,
    pub ai_growth: f64,
    pub non_ai_growth: f64,
}

struct PathSimulator<'a> {
    params: &'a ModelParams,
    rng: ChaCha8Rng,
    theta: f64,
    remaining: usize,
    done: bool,
}

impl<'a> PathSimulator<'a> {
    fn new(cfg: &'a PathConfig, path_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(path_index);
        Self {
            params: &cfg.params,
            rng,
            theta: cfg.params.theta,
            remaining: cfg.horizon,
            done: false,
        }
    }
}

impl Iterator for PathSimulator<'_> {
    type Item = PeriodRecord;

    fn next(&mut self) -> Option<PeriodRecord> {
        if self.done || self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let params = self.params;
        let base = 1.0 + params.g;
        let draw: f64 = self.rng.random();
        let theta = self.theta;

        let record = if draw >= params.p {
            PeriodRecord {
                singularity: false,
                extinct: false,
                theta,
                aggregate_growth: base,
                household_growth: base,
                ai_growth: base,
                non_ai_growth: base,
            }
        } else if draw < params.p * params.xi {
            self.done = true;
            PeriodRecord {
                singularity: true,
                extinct: true,
                theta,
                aggregate_growth: 0.0,
                household_growth: 0.0,
                ai_growth: 0.0,
                non_ai_growth: 0.0,
            }
        } else {
            let jump = base * (1.0 + params.eta);
            self.theta = theta + params.delta_theta * (1.0 - theta);
            PeriodRecord {
                singularity: true,
                extinct: false,
                theta,
                aggregate_growth: jump,
                household_growth: params.phi * jump,
                ai_growth: ai_growth_at(theta, params.delta_theta, params.eta) * base,
                non_ai_growth: non_ai_growth(params.delta_theta, params.eta) * base,
            }
        };
        Some(record)
    }
}

/// Simulates one path. Extinction ends the path early; all later
/// consumption and dividends are zero.
pub fn simulate_path(cfg: &PathConfig, path_index: usize) -> Result<Vec<PeriodRecord>> {
    cfg.validate()?;
    if path_index >= cfg.n_paths {
        return Err(Error::InvalidParameter {
            field: "path_index",
            value: path_index as f64,
            expected: "path_index < n_paths",
        });
    }
    Ok(PathSimulator::new(cfg, path_index as u64).collect())
}

fn path_value(cfg: &PathConfig, path_index: u64, asset: AssetKind) -> f64 {
    let beta = cfg.params.beta;
    let gamma = cfg.params.gamma;
    let mut weight = 1.0;
    let mut total = 0.0;
    for period in PathSimulator::new(cfg, path_index) {
        if period.extinct {
            break;
        }
        let dividend_growth = match asset {
            AssetKind::Ai => period.ai_growth,
            AssetKind::NonAi => period.non_ai_growth,
        };
        weight *= beta * period.household_growth.powf(-gamma) * dividend_growth;
        total += weight;
    }
    total
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(self, x: f64) -> Self {
        let count = self.count + 1.0;
        let delta = x - self.mean;
        let mean = self.mean + delta / count;
        Self {
            count,
            mean,
            m2: self.m2 + delta * (x - mean),
        }
    }

    fn merge(self, other: Self) -> Self {
        if other.count == 0.0 {
            return self;
        }
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Self {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCPrice {
    pub asset: AssetKind,
    pub mean_pd: f64,
    pub std_error: f64,
    pub n_effective: usize,
}

/// Simulated price-dividend ratio with its standard error.
pub fn mc_price(cfg: &PathConfig, asset: AssetKind) -> Result<MCPrice> {
    cfg.validate()?;
    let bound = cfg.tail_bound(asset);
    let limit = TAIL_FRACTION * cfg.target_tolerance;
    if bound.is_nan() || bound >= limit {
        return Err(Error::HorizonTooShort {
            horizon: cfg.horizon,
            bound,
            limit,
        });
    }

    let n = cfg.n_paths;
    let partials: Vec<Moments> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n);
            (start..end).fold(Moments::default(), |m, i| {
                m.push(path_value(cfg, i as u64, asset))
            })
        })
        .collect();
    let moments = partials
        .into_iter()
        .fold(Moments::default(), Moments::merge);

    let std_error = if n > 1 {
        (moments.m2 / (n as f64 - 1.0) / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(MCPrice {
        asset,
        mean_pd: moments.mean,
        std_error,
        n_effective: n,
    })
}
