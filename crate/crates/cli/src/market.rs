//! Monthly market series: CSV ingestion, trailing P/D and rebased ratios.
//!
//! Shiller-format files carry `month,price,dividend`, where the dividend is
//! an annualized monthly figure. Index files carry `month,close`. Months are
//! written `YYYY-MM`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

/// Months of dividends in the trailing window.
pub const TRAILING_MONTHS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    year: i32,
    month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 12 + self.month as i64 - 1
    }

    /// Whole months from `self` to `later`.
    pub fn months_until(self, later: Month) -> i64 {
        later.ordinal() - self.ordinal()
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid month `{s}`, expected YYYY-MM");
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year = y.parse().map_err(|_| bad())?;
        let month = m.parse().map_err(|_| bad())?;
        Month::new(year, month).ok_or_else(bad)
    }
}

impl Serialize for Month {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Month {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Monthly observations in strictly increasing date order.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSeries {
    label: String,
    observations: Vec<(Month, f64)>,
}

impl MarketSeries {
    pub fn new(
        label: impl Into<String>,
        observations: Vec<(Month, f64)>,
    ) -> Result<Self, CliError> {
        let label = label.into();
        let fail = |message: String| CliError::Series {
            label: label.clone(),
            message,
        };
        if let Some(w) = observations.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(fail(format!("{} does not follow {}", w[1].0, w[0].0)));
        }
        if let Some((m, v)) = observations
            .iter()
            .find(|(_, v)| !(*v > 0.0 && v.is_finite()))
        {
            return Err(fail(format!("non-positive value {v} at {m}")));
        }
        Ok(Self {
            label,
            observations,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn observations(&self) -> &[(Month, f64)] {
        &self.observations
    }

    pub fn get(&self, month: Month) -> Option<f64> {
        self.observations
            .binary_search_by_key(&month, |&(m, _)| m)
            .ok()
            .map(|i| self.observations[i].1)
    }
}

#[derive(Deserialize)]
struct ShillerRow {
    month: Month,
    price: f64,
    dividend: f64,
}

#[derive(Deserialize)]
struct IndexRow {
    month: Month,
    close: f64,
}

/// Deserializes every data row, tagging each with its 1-based file line.
fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<(u64, T)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })?;
    let headers = reader
        .headers()
        .map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .clone();
    let parse_error = |line: u64, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .deserialize(Some(&headers))
            .map_err(|e| parse_error(line, e.to_string()))?;
        rows.push((line, row));
    }
    Ok(rows)
}

/// Rejects out-of-order months and non-positive values with the offending line.
fn check_rows(path: &Path, rows: &[(u64, Month, &[f64])]) -> Result<(), CliError> {
    let mut previous: Option<Month> = None;
    for &(line, month, values) in rows {
        let fail = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if previous.is_some_and(|p| month <= p) {
            return Err(fail(format!(
                "month {month} is not after {}",
                previous.unwrap()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(fail(format!("value {v} must be positive")));
        }
        previous = Some(month);
    }
    Ok(())
}

/// Reads a Shiller-format file into (price, annualized dividend) series.
pub fn read_shiller(path: &Path) -> Result<(MarketSeries, MarketSeries), CliError> {
    let rows: Vec<(u64, ShillerRow)> = read_rows(path)?;
    let values: Vec<[f64; 2]> = rows.iter().map(|(_, r)| [r.price, r.dividend]).collect();
    let checks: Vec<(u64, Month, &[f64])> = rows
        .iter()
        .zip(&values)
        .map(|((line, r), v)| (*line, r.month, v.as_slice()))
        .collect();
    check_rows(path, &checks)?;
    let price = rows.iter().map(|(_, r)| (r.month, r.price)).collect();
    let dividend = rows.iter().map(|(_, r)| (r.month, r.dividend)).collect();
    Ok((
        MarketSeries::new("price", price)?,
        MarketSeries::new("dividend", dividend)?,
    ))
}

/// Reads a `month,close` index file.
pub fn read_index(path: &Path, label: &str) -> Result<MarketSeries, CliError> {
    let rows: Vec<(u64, IndexRow)> = read_rows(path)?;
    let closes: Vec<[f64; 1]> = rows.iter().map(|(_, r)| [r.close]).collect();
    let checks: Vec<(u64, Month, &[f64])> = rows
        .iter()
        .zip(&closes)
        .map(|((line, r), v)| (*line, r.month, v.as_slice()))
        .collect();
    check_rows(path, &checks)?;
    MarketSeries::new(
        label,
        rows.iter().map(|(_, r)| (r.month, r.close)).collect(),
    )
}

/// Price over the trailing twelve months of dividends, for every month that
/// closes a complete window of consecutive dividend observations.
///
/// Dividends are annualized monthly rates, so the twelve-month sum of paid
/// dividends is their mean.
pub fn trailing_pd(price: &MarketSeries, dividend: &MarketSeries) -> Vec<(Month, f64)> {
    dividend
        .observations()
        .windows(TRAILING_MONTHS)
        .filter(|w| w[0].0.months_until(w[TRAILING_MONTHS - 1].0) == TRAILING_MONTHS as i64 - 1)
        .filter_map(|w| {
            let month = w[TRAILING_MONTHS - 1].0;
            let paid: f64 = w.iter().map(|&(_, d)| d).sum::<f64>() / TRAILING_MONTHS as f64;
            price.get(month).map(|p| (month, p / paid))
        })
        .collect()
}

/// `numerator / denominator` on common months, scaled so the `base` month
/// reads 100.
pub fn rebased_ratio(
    numerator: &MarketSeries,
    denominator: &MarketSeries,
    base: Month,
) -> Result<Vec<(Month, f64)>, CliError> {
    let ratio: Vec<(Month, f64)> = numerator
        .observations()
        .iter()
        .filter_map(|&(m, n)| denominator.get(m).map(|d| (m, n / d)))
        .collect();
    let anchor = ratio
        .iter()
        .find(|(m, _)| *m == base)
        .map(|&(_, r)| r)
        .ok_or_else(|| CliError::RebaseMissing {
            month: base.to_string(),
        })?;
    Ok(ratio
        .into_iter()
        .map(|(m, r)| (m, 100.0 * r / anchor))
        .collect())
}
