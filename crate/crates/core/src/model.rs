//! Block structure of the container `Z = B^{d_1} x ... x B^{d_m}`, the
//! block-beta exponents, and the facet growth-rate predictor.
//!
//! Points of `R^d` are plain `&[f64]` slices; [`BlockStructure::blocks`]
//! yields the per-block views.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Tolerance used to detect ties in the beta-adjusted dimensions when the
/// exponents are only known as floats.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl BlockStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidBlocks("at least one block is required".into()));
        }
        if let Some(i) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidBlocks(format!("block {i} has dimension 0")));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut total = 0;
        for &d in &dims {
            offsets.push(total);
            total += d;
        }
        Ok(Self { dims, offsets, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Starting coordinate of each block (`l_j = d_1 + ... + d_{j-1}`).
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Total dimension `d`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of blocks `m`.
    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn block<'a>(&self, x: &'a [f64], i: usize) -> &'a [f64] {
        &x[self.offsets[i]..self.offsets[i] + self.dims[i]]
    }

    pub fn blocks<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = &'a [f64]> + 'a {
        self.offsets.iter().zip(&self.dims).map(move |(&o, &d)| &x[o..o + d])
    }

    pub fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.total {
            return Err(Error::DimensionMismatch { expected: self.total, actual: x.len() });
        }
        Ok(())
    }

    /// Euclidean norm of every block of `x`.
    pub fn block_norms(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(self.blocks(x).map(norm2).collect())
    }

    /// Lebesgue volume of the container, `prod_i Vol(B^{d_i})`.
    pub fn container_volume(&self) -> f64 {
        self.dims.iter().map(|&d| crate::metacube::special::unit_ball_volume(d)).product()
    }
}

impl fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Block-beta exponents, optionally carried as exact rationals so that ties
/// between beta-adjusted dimensions are decided exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaParams {
    betas: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl BetaParams {
    pub fn new(betas: Vec<f64>) -> Result<Self> {
        validate_betas(&betas)?;
        Ok(Self { betas, exact: None })
    }

    pub fn from_rationals(exact: Vec<BigRational>) -> Result<Self> {
        let betas = exact.iter().map(rational_to_f64).collect::<Vec<_>>();
        validate_betas(&betas)?;
        Ok(Self { betas, exact: Some(exact) })
    }

    /// `β = (0, ..., 0)`, the uniform distribution on the container.
    pub fn uniform(m: usize) -> Self {
        Self { betas: vec![0.0; m], exact: Some(vec![BigRational::zero(); m]) }
    }

    /// Parses each entry as an integer, a decimal (`0.25`), or a fraction
    /// (`3/2`). All of these are exact rationals.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let exact = items.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::from_rationals(exact)
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn exact(&self) -> Option<&[BigRational]> {
        self.exact.as_deref()
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// `β = Σ β_i`.
    pub fn total_beta(&self) -> f64 {
        self.betas.iter().sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.betas.iter().all(|&b| b == 0.0)
    }

    pub fn check_paired(&self, bs: &BlockStructure) -> Result<()> {
        if self.len() != bs.num_blocks() {
            return Err(Error::InvalidBetas(format!("{} exponents for {} blocks", self.len(), bs.num_blocks())));
        }
        Ok(())
    }
}

fn validate_betas(betas: &[f64]) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::InvalidBetas("empty parameter list".into()));
    }
    for (i, &b) in betas.iter().enumerate() {
        if !(b > -1.0) || !b.is_finite() {
            return Err(Error::InvalidBetas(format!("beta[{i}] = {b} must be a finite number > -1")));
        }
    }
    Ok(())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator individually overflow f64; fall back to division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `"3"`, `"-0.5"`, `"1e-3"`, `"5/2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidBetas(format!("cannot parse '{s}' as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Support function of the container: `h(Z, w) = Σ_i ‖w^{(i)}‖₂`.
pub fn support_function(bs: &BlockStructure, w: &[f64]) -> Result<f64> {
    bs.check_len(w)?;
    Ok(bs.blocks(w).map(norm2).sum())
}

/// Closed-container membership: `max_i ‖x^{(i)}‖₂ <= 1`.
pub fn contains(bs: &BlockStructure, x: &[f64]) -> Result<bool> {
    contains_with_tolerance(bs, x, 0.0)
}

/// Membership in `{max_i ‖x^{(i)}‖₂ <= 1 + tol}`; a negative `tol` gives a
/// shrunken open-set test.
pub fn contains_with_tolerance(bs: &BlockStructure, x: &[f64], tol: f64) -> Result<bool> {
    bs.check_len(x)?;
    let limit = (1.0 + tol).max(0.0);
    Ok(bs.blocks(x).all(|b| norm2(b) <= limit))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePrediction {
    /// Beta-adjusted dimensions `k_i = (d_i + β_i) / (1 + β_i)`.
    pub k: Vec<f64>,
    pub k_max: f64,
    pub count_k_max: usize,
    /// `(k_max - 1) / (k_max + 1)`.
    pub exponent: f64,
    /// `count_k_max - 1`.
    pub log_power: u32,
    /// Exact exponent when the betas were given as rationals.
    pub exact_exponent: Option<BigRational>,
}

impl fmt::Display for RatePrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exp = match &self.exact_exponent {
            Some(r) if r.is_integer() => format!("{}", r.numer()),
            Some(r) => format!("{}/{}", r.numer(), r.denom()),
            None => format!("{:.6}", self.exponent),
        };
        match self.log_power {
            0 => write!(f, "n^({exp})"),
            1 => write!(f, "n^({exp}) ln n"),
            p => write!(f, "n^({exp}) (ln n)^{p}"),
        }
    }
}

/// Facet growth rate `n^{(k_max-1)/(k_max+1)} (ln n)^{#k_max - 1}`.
pub fn predict_rate(bs: &BlockStructure, bp: &BetaParams) -> Result<RatePrediction> {
    bp.check_paired(bs)?;
    for (index, &value) in bp.betas().iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeBeta { index, value });
        }
    }
    let k: Vec<f64> = bs.dims().iter().zip(bp.betas()).map(|(&d, &b)| (d as f64 + b) / (1.0 + b)).collect();

    let (arg_max, count_k_max, exact_exponent) = match bp.exact() {
        Some(exact) => {
            let kq: Vec<BigRational> = bs
                .dims()
                .iter()
                .zip(exact)
                .map(|(&d, b)| (BigRational::from_integer(BigInt::from(d)) + b) / (BigRational::one() + b))
                .collect();
            let mut best = 0;
            for i in 1..kq.len() {
                if kq[i] > kq[best] {
                    best = i;
                }
            }
            let count = kq.iter().filter(|q| **q == kq[best]).count();
            let one = BigRational::one();
            let e = (&kq[best] - &one) / (&kq[best] + &one);
            (best, count, Some(e))
        }
        None => {
            let mut best = 0;
            for i in 1..k.len() {
                if k[i].partial_cmp(&k[best]) == Some(Ordering::Greater) {
                    best = i;
                }
            }
            let count = k.iter().filter(|&&ki| (ki - k[best]).abs() <= TIE_TOLERANCE).count();
            (best, count, None)
        }
    };
    let k_max = k[arg_max];
    let exponent = match &exact_exponent {
        Some(e) => rational_to_f64(e),
        None => (k_max - 1.0) / (k_max + 1.0),
    };
    debug_assert!(exact_exponent.as_ref().map_or(true, |e| !e.is_negative()));
    Ok(RatePrediction { k, k_max, count_k_max, exponent, log_power: (count_k_max - 1) as u32, exact_exponent })
}
