//! Gamma and beta function kernels shared by the sampler, the meta-cube
//! contents and the integral asymptotics.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Stirling series is used above this argument.
const STIRLING_MIN: f64 = 20.0;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    if x >= STIRLING_MIN {
        return stirling(x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn stirling_correction(x: f64) -> f64 {
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
}

fn stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_correction(x)
}

pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        ln_gamma(x).exp()
    }
}

/// `ln Γ(b) - ln Γ(b + a)` without forming the two large logarithms when
/// `b` is large.
pub fn ln_gamma_ratio(b: f64, a: f64) -> f64 {
    if b >= STIRLING_MIN && a >= 0.0 {
        let s = b + a;
        -(b - 0.5) * (a / b).ln_1p() - a * s.ln() + a + stirling_correction(b) - stirling_correction(s)
    } else {
        ln_gamma(b) - ln_gamma(b + a)
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    ln_gamma(small) + ln_gamma_ratio(large, small)
}

pub fn beta(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// Digamma `ψ(x)` for `x > 0`: upward recurrence to `x ≥ 12`, then the
/// asymptotic series.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r * (1.0 / 12.0 - r * (1.0 / 120.0 - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r / 132.0))));
    acc + x.ln() - 0.5 / x - series
}

/// Volume of the unit ball `B^k`, `π^{k/2} / Γ(k/2 + 1)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    (h * PI.ln() - ln_gamma(h + 1.0)).exp()
}

/// Surface area `ω_k` of the unit sphere `S^{k-1} ⊂ R^k`; `ω_1 = 2`.
pub fn sphere_area(k: usize) -> f64 {
    let h = k as f64 / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// Normalising constant `c_{β,k} = Γ(k/2 + β + 1) / (π^{k/2} Γ(β + 1))` of
/// the beta density on `B^k`; `c_{β,0} = 1`.
pub fn beta_ball_const(beta: f64, k: usize) -> f64 {
    let h = k as f64 / 2.0;
    (-ln_gamma_ratio(beta + 1.0, h) - h * PI.ln()).exp()
}

/// One-dimensional constant `c_β = c_{β,1}`.
pub fn beta_line_const(beta: f64) -> f64 {
    beta_ball_const(beta, 1)
}

const CF_MAX_ITER: usize = 20_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence { estimate: h, error: f64::NAN })
}

fn check_beta_args(a: f64, b: f64, x: f64) -> Result<()> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("incomplete beta needs a, b > 0 (got a={a}, b={b})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("incomplete beta needs x in [0,1] (got {x})")));
    }
    Ok(())
}

/// `ln(x^a (1-x)^b)`, the continued-fraction prefactor.
fn ln_front(a: f64, b: f64, x: f64) -> f64 {
    a * x.ln() + b * (-x).ln_1p()
}

/// Unnormalised incomplete beta `B(a, b; x) = ∫₀ˣ z^{a-1} (1-z)^{b-1} dz`.
pub fn incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    check_beta_args(a, b, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(beta(a, b));
    }
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front(a, b, x).exp() / a * beta_cf(a, b, x)?)
    } else {
        let tail = ln_front(b, a, 1.0 - x).exp() / b * beta_cf(b, a, 1.0 - x)?;
        Ok(beta(a, b) - tail)
    }
}

/// Regularised incomplete beta `I_x(a, b)`; the CDF of `Beta(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    check_beta_args(a, b, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let lb = ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok((ln_front(a, b, x) - lb).exp() / a * beta_cf(a, b, x)?)
    } else {
        Ok(1.0 - (ln_front(b, a, 1.0 - x) - lb).exp() / b * beta_cf(b, a, 1.0 - x)?)
    }
}

/// Upper tail `∫ₓ¹ z^{a-1} (1-z)^{b-1} dz`, accurate when it is small.
pub fn incomplete_beta_upper(a: f64, b: f64, x: f64) -> Result<f64> {
    check_beta_args(a, b, x)?;
    incomplete_beta(b, a, 1.0 - x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-14);
        assert!((digamma(3.0) - (1.5 - euler)).abs() < 1e-14);
        assert!((digamma(0.5) + euler + 2.0 * 2f64.ln()).abs() < 1e-14);
        assert!((digamma(100.0) - 4.600_161_852_738_087).abs() < 1e-14);
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(5.0), 24.0) < 1e-14);
        assert!(rel(gamma(2.5), 0.75 * PI.sqrt()) < 1e-14);
        // across the Lanczos / Stirling switch
        let mut f = 1.0f64;
        for k in 1..40 {
            f *= k as f64;
            assert!((ln_gamma(k as f64 + 1.0) - f.ln()).abs() < 8.0 * f64::EPSILON * f.ln().max(1.0), "k={k}");
        }
    }

    #[test]
    fn ln_gamma_ratio_large_argument() {
        // Γ(b)/Γ(b+3) = 1/(b(b+1)(b+2))
        for &b in &[25.0, 1e3, 1e6, 1e9] {
            let exact = -(b * (b + 1.0) * (b + 2.0) as f64).ln();
            assert!((ln_gamma_ratio(b, 3.0) - exact).abs() < 1e-13, "b={b}");
        }
    }

    #[test]
    fn constants() {
        assert!(rel(unit_ball_volume(2), PI) < 1e-14);
        assert!(rel(unit_ball_volume(3), 4.0 * PI / 3.0) < 1e-14);
        assert!(rel(sphere_area(1), 2.0) < 1e-14);
        assert!(rel(sphere_area(2), 2.0 * PI) < 1e-14);
        assert!(rel(sphere_area(3), 4.0 * PI) < 1e-14);
        assert!(rel(beta_ball_const(0.0, 2), 1.0 / PI) < 1e-14);
        assert!(rel(beta_line_const(1.0), 0.75) < 1e-14);
        assert!(rel(beta_line_const(0.0), 0.5) < 1e-14);
        assert!((beta_ball_const(0.7, 0) - 1.0).abs() < 1e-14);
        for k in 1..6 {
            assert!(rel(beta_ball_const(0.0, k), 1.0 / unit_ball_volume(k)) < 1e-14);
        }
    }

    #[test]
    fn incomplete_beta_examples() {
        assert!((incomplete_beta(1.0, 1.0, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!(rel(incomplete_beta(0.5, 0.5, 1.0).unwrap(), PI) < 1e-14);
        // ∫₀^½ z(1-z)² dz = [z²/2 - 2z³/3 + z⁴/4]₀^½ = 1/8 - 1/12 + 1/64
        let exact = 0.125 - 1.0 / 12.0 + 1.0 / 64.0;
        assert!(rel(incomplete_beta(2.0, 3.0, 0.5).unwrap(), exact) < 1e-13);
        assert!(incomplete_beta(0.0, 1.0, 0.5).is_err());
        assert!(incomplete_beta(1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn incomplete_beta_with_huge_second_argument() {
        // B(3, n+1; x) for x well past the mean is ≈ B(3, n+1) = 2/((n+1)(n+2)(n+3)).
        let n = 1e6;
        let full = 2.0 / ((n + 1.0) * (n + 2.0) * (n + 3.0));
        assert!(rel(incomplete_beta(3.0, n + 1.0, 0.5).unwrap(), full) < 1e-12);
        assert!(rel(beta(3.0, n + 1.0), full) < 1e-12);
        // and halfway through its mass the two branches agree with the
        // regularised value
        let x = 3.0 / n;
        let i = regularized_incomplete_beta(3.0, n + 1.0, x).unwrap();
        assert!(rel(incomplete_beta(3.0, n + 1.0, x).unwrap(), i * full) < 1e-12);
    }

    #[test]
    fn regularized_complements() {
        for &(a, b, x) in &[(0.5, 0.5, 0.2), (2.0, 7.0, 0.6), (1.5, 1.0, 0.9), (30.0, 0.3, 0.99)] {
            let lo = regularized_incomplete_beta(a, b, x).unwrap();
            let hi = regularized_incomplete_beta(b, a, 1.0 - x).unwrap();
            assert!((lo + hi - 1.0).abs() < 1e-13, "({a},{b},{x})");
            let upper = incomplete_beta_upper(a, b, x).unwrap();
            assert!(rel(upper, (1.0 - lo) * beta(a, b)) < 1e-11);
        }
    }
}
