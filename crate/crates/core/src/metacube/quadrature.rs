//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.
//!
//! The integrand may itself fail (nested integrals), so it returns a
//! `Result`. Known kinks are passed as breakpoints and seed the initial
//! partition.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of interval bisections.
    pub max_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-10, max_depth: 400 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(Error::Domain("quadrature tolerances must be positive".into()));
        }
        Ok(Self { abs_tol, rel_tol, max_depth })
    }

    /// Spec for an integral nested inside this one.
    pub fn inner(&self) -> Self {
        Self { abs_tol: self.abs_tol * 0.05, rel_tol: self.rel_tol * 0.05, max_depth: self.max_depth }
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kr = fc * WGK[7];
    let mut ga = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kr += WGK[j] * s;
        if j % 2 == 1 {
            ga += WG[j / 2] * s;
        }
    }
    let value = kr * h;
    let error = ((kr - ga) * h).abs();
    Ok(Estimate { value, error })
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Integrates `f` over `[a, b]`, splitting first at every breakpoint that
/// falls strictly inside the interval.
pub fn integrate<F>(mut f: F, a: f64, b: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in edges.windows(2) {
        let est = kronrod(&mut f, w[0], w[1])?;
        total += est.value;
        total_err += est.error;
        heap.push(Piece { a: w[0], b: w[1], est });
    }

    let mut splits = 0;
    while total_err > spec.target(total) {
        if splits >= spec.max_depth {
            return Err(Error::NonConvergence { estimate: sign * total, error: total_err });
        }
        let worst = heap.pop().expect("nonempty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(worst);
            return Err(Error::NonConvergence { estimate: sign * total, error: total_err });
        }
        let left = kronrod(&mut f, worst.a, mid)?;
        let right = kronrod(&mut f, mid, worst.b)?;
        total += left.value + right.value - worst.est.value;
        total_err += left.error + right.error - worst.est.error;
        heap.push(Piece { a: worst.a, b: mid, est: left });
        heap.push(Piece { a: mid, b: worst.b, est: right });
        splits += 1;
        if splits % 64 == 0 {
            // refresh the running sums to shed accumulated cancellation
            total = heap.iter().map(|p| p.est.value).sum();
            total_err = heap.iter().map(|p| p.est.error).sum();
        }
    }
    total = heap.iter().map(|p| p.est.value).sum();
    total_err = heap.iter().map(|p| p.est.error).sum();
    Ok(Estimate { value: sign * total, error: total_err })
}

/// Adaptive Simpson rule, kept as an independent check of [`integrate`].
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x| Ok(x.powi(5) - 3.0 * x * x), -1.0, 2.0, &[], &spec).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((est.value - exact).abs() < 1e-13);
    }

    #[test]
    fn kink_with_breakpoint() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x: f64| Ok((x - 0.3).abs()), 0.0, 1.0, &[0.3], &spec).unwrap();
        assert!((est.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫₀¹ x^{-1/2} dx = 2
        let spec = QuadratureSpec { abs_tol: 1e-9, rel_tol: 1e-9, max_depth: 400 };
        let est = integrate(|x: f64| Ok(if x > 0.0 { x.powf(-0.5) } else { 0.0 }), 0.0, 1.0, &[], &spec).unwrap();
        assert!((est.value - 2.0).abs() < 1e-8, "{}", est.value);
    }

    #[test]
    fn reversed_interval_and_errors() {
        let spec = QuadratureSpec::default();
        let est = integrate(|x| Ok(x), 1.0, 0.0, &[], &spec).unwrap();
        assert!((est.value + 0.5).abs() < 1e-15);
        let tight = QuadratureSpec { abs_tol: 1e-300, rel_tol: 1e-300, max_depth: 3 };
        let err = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, &[], &tight).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
        let failing = integrate(|_| Err(Error::Domain("x".into())), 0.0, 1.0, &[], &spec);
        assert!(failing.is_err());
    }

    #[test]
    fn simpson_matches_kronrod() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let s = adaptive_simpson(&f, 0.0, 4.0, 1e-12);
        let k = integrate(|x| Ok(f(x)), 0.0, 4.0, &[], &QuadratureSpec::default()).unwrap();
        assert!((s - k.value).abs() < 1e-10);
    }
}
