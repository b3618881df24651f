//! Rate fits of mean vertex counts from a run record.

use std::fmt;
use std::str::FromStr;

use blockbeta_core::asymptotics::{fit_rate_fixed, fit_rate_free, RateFits, RatePoint};

use crate::error::{CliError, Result};
use crate::record::{Prediction, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogPower {
    /// The predicted power `#k_max - 1`.
    Auto,
    Fixed(u32),
}

impl FromStr for LogPower {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(LogPower::Auto),
            _ => s.parse::<u32>().map(LogPower::Fixed).map_err(|_| {
                CliError::Usage(format!("--log-power must be 'auto' or a non-negative integer, got {s:?}"))
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitSummary {
    pub label: String,
    pub predicted: Option<Prediction>,
    pub log_power: u32,
    pub points: Vec<RatePoint>,
    pub fits: RateFits,
}

impl fmt::Display for FitSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "container {}", self.label)?;
        match &self.predicted {
            Some(p) => writeln!(f, "predicted  {} (exponent {:.6}, log power {})", p.formula, p.exponent, p.log_power)?,
            None => writeln!(f, "predicted  none (negative beta)")?,
        }
        writeln!(f, "fitted     {}", self.fits.fixed)?;
        writeln!(f, "diagnostic {}", self.fits.free)
    }
}

pub fn rate_points(record: &RunRecord) -> Vec<RatePoint> {
    record.aggregates.iter().map(|a| RatePoint::new(a.n as f64, a.f0_mean, a.f0_se)).collect()
}

pub fn fit_record(record: &RunRecord, log_power: LogPower) -> Result<FitSummary> {
    let p = match (log_power, &record.predicted) {
        (LogPower::Fixed(p), _) => p,
        (LogPower::Auto, Some(pred)) => pred.log_power,
        (LogPower::Auto, None) => {
            return Err(CliError::Usage("no predicted log power for this record; pass --log-power <int>".into()))
        }
    };
    let points = rate_points(record);
    let fits = RateFits { fixed: fit_rate_fixed(&points, p)?, free: fit_rate_free(&points)? };
    let label = format!("{:?}", record.config.block_dims);
    Ok(FitSummary { label, predicted: record.predicted.clone(), log_power: p, points, fits })
}
