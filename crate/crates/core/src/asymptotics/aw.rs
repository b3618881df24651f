//! `I(n) = ∫_{[0,1]^m} (1 - c x₁⋯x_m)^{n-α} ∏ x_i^{a_i} dx` and its
//! leading-order behaviour as `n → ∞`.

use crate::error::{Error, Result};
use crate::metacube::quadrature::{integrate, QuadratureSpec};
use crate::metacube::special::{digamma, incomplete_beta, ln_gamma};

/// Absolute tolerance for treating two exponents `a_i` as tied.
pub const AW_TIE_TOLERANCE: f64 = 1e-12;

/// Largest `m` evaluated by nested quadrature.
pub const AW_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct AwConfig {
    alpha: f64,
    a: Vec<f64>,
    c: f64,
}

impl AwConfig {
    /// Exponents are sorted into non-increasing order.
    pub fn new(alpha: f64, mut a: Vec<f64>, c: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain("need at least one exponent".into()));
        }
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
        }
        if a.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Domain(format!("exponents must be positive, got {a:?}")));
        }
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::Domain(format!("c must lie in (0,1], got {c}")));
        }
        a.sort_by(|x, y| y.total_cmp(x));
        Ok(Self { alpha, a, c })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Which leading-order regime applies.
    pub fn case(&self) -> AwCase {
        let m = self.m();
        let last = self.a[m - 1];
        let ell = self.a.iter().position(|&x| x - last <= AW_TIE_TOLERANCE).unwrap_or(m - 1) + 1;
        if ell == m {
            AwCase::Distinct
        } else {
            AwCase::Tied { ell }
        }
    }
}

/// `Distinct`: `a_{m-1} > a_m`. `Tied { ell }`: `a_{ℓ-1} > a_ℓ = ⋯ = a_m`
/// with `ℓ < m` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AwCase {
    Distinct,
    Tied { ell: usize },
}

/// `∫₀¹ (1 - k x)^{N} x^{a} dx = k^{-a-1} B(a+1, N+1; k)`.
fn innermost(a: f64, big_n: f64, k: f64) -> Result<f64> {
    if k == 0.0 {
        return Ok(1.0 / (a + 1.0));
    }
    Ok(incomplete_beta(a + 1.0, big_n + 1.0, k)? * (-(a + 1.0) * k.ln()).exp())
}

/// Outer variables run over `x = e^{-u}`, `u ∈ [0, ln(cn) + 60]`; the last
/// variable is integrated in closed form.
fn outer(
    cfg: &AwConfig,
    big_n: f64,
    level: usize,
    log_prod: f64,
    u_max: f64,
    knee: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let m = cfg.m();
    if level == m - 1 {
        return innermost(cfg.a[m - 1], big_n, cfg.c * log_prod.exp());
    }
    let a = cfg.a[level];
    let inner_q = q.inner();
    let f = |u: f64| -> Result<f64> {
        let w = (-(a + 1.0) * u).exp();
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * outer(cfg, big_n, level + 1, log_prod - u, u_max, knee, &inner_q)?)
    };
    let breaks: Vec<f64> = [knee + log_prod, knee + log_prod + 5.0, knee + log_prod - 5.0].to_vec();
    Ok(integrate(f, 0.0, u_max, &breaks, q)?.value)
}

/// Evaluates `I(n)` to relative accuracy `1e-8`.
pub fn aw_integral_numeric(cfg: &AwConfig, n: f64) -> Result<f64> {
    aw_integral_numeric_with(cfg, n, &QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-8, max_depth: 2000 })
}

pub fn aw_integral_numeric_with(cfg: &AwConfig, n: f64, q: &QuadratureSpec) -> Result<f64> {
    if cfg.m() > AW_MAX_DIM {
        return Err(Error::Unsupported(format!("m = {} > {AW_MAX_DIM}", cfg.m())));
    }
    let big_n = n - cfg.alpha;
    if !(big_n > -1.0) || !n.is_finite() {
        return Err(Error::Domain(format!("need n - alpha > -1, got n = {n}, alpha = {}", cfg.alpha)));
    }
    let knee = (cfg.c * n).max(1.0).ln();
    let u_max = knee + 60.0;
    outer(cfg, big_n, 0, 0.0, u_max, knee, q)
}

/// Leading-order value
/// `Γ(a_ℓ+1) (cn)^{-(a_ℓ+1)} (ln n)^{m-ℓ} / ((m-ℓ)! ∏_{i<ℓ} (a_i - a_ℓ))`,
/// with `ℓ = m` when the smallest exponent is simple.
pub fn aw_asymptotic(cfg: &AwConfig, n: f64) -> f64 {
    let m = cfg.m();
    let ell = match cfg.case() {
        AwCase::Distinct => m,
        AwCase::Tied { ell } => ell,
    };
    let a_min = cfg.a[m - 1];
    let ties = (m - ell) as i32;
    let denom: f64 = cfg.a[..ell - 1].iter().map(|&x| x - a_min).product();
    let fact: f64 = (1..=ties).map(f64::from).product();
    let ln_lead = ln_gamma(a_min + 1.0) - (a_min + 1.0) * (cfg.c * n).ln();
    ln_lead.exp() * n.ln().powi(ties) / (fact * denom)
}

/// Leading order plus the next term when exactly two exponents tie at the
/// minimum: `Γ(a+1)(cn)^{-a-1} (ln(cn) - ψ(a+1) - Σ_{i<ℓ} 1/(a_i - a)) / ∏ (a_i - a)`.
/// `None` in every other case.
pub fn aw_two_term(cfg: &AwConfig, n: f64) -> Option<f64> {
    let m = cfg.m();
    match cfg.case() {
        AwCase::Tied { ell } if ell == m - 1 => {
            let a_min = cfg.a[m - 1];
            let gaps = &cfg.a[..ell - 1];
            let denom: f64 = gaps.iter().map(|&x| x - a_min).product();
            let shift: f64 = gaps.iter().map(|&x| 1.0 / (x - a_min)).sum();
            let lead = (ln_gamma(a_min + 1.0) - (a_min + 1.0) * (cfg.c * n).ln()).exp();
            Some(lead * ((cfg.c * n).ln() - digamma(a_min + 1.0) - shift) / denom)
        }
        _ => None,
    }
}
