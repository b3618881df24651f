//! Weighted least-squares fits of `mean(n) ≈ C n^e (ln n)^p`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::RatePrediction;

/// Aggregated observable at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub n: f64,
    pub mean: f64,
    /// Standard error of `mean`; zero for noiseless data.
    pub se: f64,
}

impl RatePoint {
    pub fn new(n: f64, mean: f64, se: f64) -> Self {
        Self { n, mean, se }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    /// `ln mean = ln C + e ln n + p ln ln n` with `p` held fixed.
    FixedLogPower(u32),
    /// `p` fitted alongside `e`.
    Free,
}

impl fmt::Display for RateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateModel::FixedLogPower(p) => write!(f, "fixed_log_power({p})"),
            RateModel::Free => f.write_str("free"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub exponent_hat: f64,
    pub exponent_se: f64,
    /// Fixed value, or the fitted one for [`RateModel::Free`].
    pub log_power: f64,
    pub log_power_se: f64,
    /// Intercept `ln C`.
    pub log_coeff: f64,
    pub r_squared: f64,
    pub model: RateModel,
}

impl fmt::Display for RateFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: exponent {:.4} ± {:.4}, log power {:.3}",
            self.model, self.exponent_hat, self.exponent_se, self.log_power
        )?;
        if self.model == RateModel::Free {
            write!(f, " ± {:.3}", self.log_power_se)?;
        }
        write!(f, ", ln C {:.4}, r² {:.6}", self.log_coeff, self.r_squared)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFits {
    pub fixed: RateFit,
    /// Diagnostic only: the log power is poorly identified at moderate `n`.
    pub free: RateFit,
}

fn check_data(data: &[RatePoint]) -> Result<()> {
    if data.iter().any(|p| !(p.n > 1.0) || !(p.mean > 0.0) || !(p.se >= 0.0) || !p.se.is_finite()) {
        return Err(Error::Precondition("rate fitting needs n > 1, positive means and finite se".into()));
    }
    let mut ns: Vec<f64> = data.iter().map(|p| p.n).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 5 {
        return Err(Error::Precondition(format!("insufficient span: {} distinct n, need 5", ns.len())));
    }
    let decades = (ns[ns.len() - 1] / ns[0]).log10();
    if decades < 1.5 {
        return Err(Error::Precondition(format!("insufficient span: n covers {decades:.2} decades, need 1.5")));
    }
    Ok(())
}

/// Weights `(mean/se)²` on the log scale when every point has a positive
/// standard error, equal weights otherwise.
fn weights(data: &[RatePoint]) -> (Vec<f64>, bool) {
    if data.iter().all(|p| p.se > 0.0) {
        (data.iter().map(|p| (p.mean / p.se).powi(2)).collect(), true)
    } else {
        (vec![1.0; data.len()], false)
    }
}

struct Wls {
    beta: Vec<f64>,
    cov: Vec<Vec<f64>>,
    r_squared: f64,
}

fn invert(mut a: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let k = a.len();
    let mut inv: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| (i == j) as u8 as f64).collect()).collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Precondition("rate fit design matrix is singular".into()));
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..k {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..k {
            if i != col {
                let f = a[i][col];
                for j in 0..k {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

/// Covariance is scaled by the reduced χ², floored at 1 when the weights are
/// genuine inverse variances.
fn wls(rows: &[Vec<f64>], y: &[f64], w: &[f64], true_weights: bool) -> Result<Wls> {
    let k = rows[0].len();
    let mut xtwx = vec![vec![0.0; k]; k];
    let mut xtwy = vec![0.0; k];
    for ((x, &yi), &wi) in rows.iter().zip(y).zip(w) {
        for a in 0..k {
            xtwy[a] += wi * x[a] * yi;
            for b in 0..k {
                xtwx[a][b] += wi * x[a] * x[b];
            }
        }
    }
    let inv = invert(xtwx)?;
    let beta: Vec<f64> = (0..k).map(|a| (0..k).map(|b| inv[a][b] * xtwy[b]).sum()).collect();
    let sw: f64 = w.iter().sum();
    let ybar = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for ((x, &yi), &wi) in rows.iter().zip(y).zip(w) {
        let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
        ss_res += wi * (yi - fit).powi(2);
        ss_tot += wi * (yi - ybar).powi(2);
    }
    let dof = (y.len() - k).max(1) as f64;
    let mut sigma2 = ss_res / dof;
    if true_weights {
        sigma2 = sigma2.max(1.0);
    }
    let cov = inv.into_iter().map(|row| row.into_iter().map(|v| v * sigma2).collect()).collect();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(Wls { beta, cov, r_squared })
}

pub fn fit_rate_fixed(data: &[RatePoint], log_power: u32) -> Result<RateFit> {
    check_data(data)?;
    let p = f64::from(log_power);
    let rows: Vec<Vec<f64>> = data.iter().map(|d| vec![1.0, d.n.ln()]).collect();
    let y: Vec<f64> = data.iter().map(|d| d.mean.ln() - p * d.n.ln().ln()).collect();
    let (w, true_weights) = weights(data);
    let fit = wls(&rows, &y, &w, true_weights)?;
    Ok(RateFit {
        exponent_hat: fit.beta[1],
        exponent_se: fit.cov[1][1].max(0.0).sqrt(),
        log_power: p,
        log_power_se: 0.0,
        log_coeff: fit.beta[0],
        r_squared: fit.r_squared,
        model: RateModel::FixedLogPower(log_power),
    })
}

pub fn fit_rate_free(data: &[RatePoint]) -> Result<RateFit> {
    check_data(data)?;
    let rows: Vec<Vec<f64>> = data.iter().map(|d| vec![1.0, d.n.ln(), d.n.ln().ln()]).collect();
    let y: Vec<f64> = data.iter().map(|d| d.mean.ln()).collect();
    let (w, true_weights) = weights(data);
    let fit = wls(&rows, &y, &w, true_weights)?;
    Ok(RateFit {
        exponent_hat: fit.beta[1],
        exponent_se: fit.cov[1][1].max(0.0).sqrt(),
        log_power: fit.beta[2],
        log_power_se: fit.cov[2][2].max(0.0).sqrt(),
        log_coeff: fit.beta[0],
        r_squared: fit.r_squared,
        model: RateModel::Free,
    })
}

/// Fixed-log-power fit at the predicted power, plus the free fit.
pub fn fit_rate(data: &[RatePoint], predicted: &RatePrediction) -> Result<RateFits> {
    Ok(RateFits { fixed: fit_rate_fixed(data, predicted.log_power)?, free: fit_rate_free(data)? })
}

/// Slope `A` and its standard error in `mean ≈ A (ln n)^p + B`, weighted by
/// `1/se²` when available.
pub fn log_power_coefficient(data: &[RatePoint], log_power: u32) -> Result<(f64, f64)> {
    check_data(data)?;
    let p = f64::from(log_power);
    let rows: Vec<Vec<f64>> = data.iter().map(|d| vec![1.0, d.n.ln().powf(p)]).collect();
    let y: Vec<f64> = data.iter().map(|d| d.mean).collect();
    let (w, true_weights) = if data.iter().all(|d| d.se > 0.0) {
        (data.iter().map(|d| d.se.powi(-2)).collect(), true)
    } else {
        (vec![1.0; data.len()], false)
    };
    let fit = wls(&rows, &y, &w, true_weights)?;
    Ok((fit.beta[1], fit.cov[1][1].max(0.0).sqrt()))
}
