//! Exact sampling from the beta distribution on `B^k` and from the
//! block-beta distribution on the product container.
//!
//! A beta point is drawn as `R · U` with `R² ~ Beta(k/2, β+1)` (two Gamma
//! variates) and `U` uniform on `S^{k-1}` (a normalised Gaussian vector).
//! This is exact for every `β > -1`, including the unbounded-density range.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::metacube::special::{beta_ball_const, regularized_incomplete_beta};
use crate::model::{norm2, BetaParams, BlockStructure};
use crate::report::{ks_p_value, ks_statistic, ks_two_sample, Report, StatKind};

/// Reproducible random stream identified by `(root_seed, stream_index)`.
///
/// Streams with the same root seed and different indices are disjoint
/// ChaCha8 keystreams, so replications can run on any worker in any order.
#[derive(Debug, Clone)]
pub struct RngStream {
    root_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(root_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
        rng.set_stream(stream_index);
        Self { root_seed, stream_index, rng }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Independent stream derived from this one's root seed.
    pub fn sibling(&self, stream_index: u64) -> Self {
        Self::new(self.root_seed, stream_index)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Beta law on `B^k` with density `c_{β,k} (1 - ‖y‖²)^β`.
#[derive(Debug, Clone)]
pub struct BetaBallLaw {
    dim: usize,
    beta: f64,
    norm_const: f64,
    radial_num: Gamma<f64>,
    radial_den: Gamma<f64>,
}

impl BetaBallLaw {
    pub fn new(dim: usize, beta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBlocks("beta law needs dimension >= 1".into()));
        }
        if !(beta > -1.0) || !beta.is_finite() {
            return Err(Error::InvalidBetas(format!("beta = {beta} must be > -1")));
        }
        let gamma = |shape: f64| Gamma::new(shape, 1.0).map_err(|e| Error::InvalidBetas(e.to_string()));
        Ok(Self {
            dim,
            beta,
            norm_const: beta_ball_const(beta, dim),
            radial_num: gamma(dim as f64 / 2.0)?,
            radial_den: gamma(beta + 1.0)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm_const(&self) -> f64 {
        self.norm_const
    }

    /// Squared radius `‖Y‖² ~ Beta(k/2, β+1)`.
    pub fn sample_squared_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.radial_num.sample(rng);
            let y = self.radial_den.sample(rng);
            let t = x / (x + y);
            if t.is_finite() {
                return t;
            }
        }
    }

    /// Writes one draw into `out` (length `dim`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.dim);
        let radius = self.sample_squared_radius(rng).sqrt();
        loop {
            for v in out.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let norm = norm2(out);
            if norm > 0.0 {
                let scale = radius / norm;
                out.iter_mut().for_each(|v| *v *= scale);
                return;
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.sample_into(rng, &mut out);
        out
    }

    pub fn density(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if r2 > 1.0 {
            0.0
        } else {
            self.norm_const * (1.0 - r2).powf(self.beta)
        }
    }
}

pub fn sample_beta_ball<R: Rng + ?Sized>(law: &BetaBallLaw, rng: &mut R) -> Vec<f64> {
    law.sample(rng)
}

/// Product of independent beta laws, one per block.
#[derive(Debug, Clone)]
pub struct BlockBetaSampler {
    blocks: BlockStructure,
    laws: Vec<BetaBallLaw>,
}

impl BlockBetaSampler {
    pub fn new(bs: &BlockStructure, bp: &BetaParams) -> Result<Self> {
        bp.check_paired(bs)?;
        let laws =
            bs.dims().iter().zip(bp.betas()).map(|(&d, &b)| BetaBallLaw::new(d, b)).collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks: bs.clone(), laws })
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn laws(&self) -> &[BetaBallLaw] {
        &self.laws
    }

    pub fn dim(&self) -> usize {
        self.blocks.total()
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.blocks.total());
        for (law, &off) in self.laws.iter().zip(self.blocks.offsets()) {
            law.sample_into(rng, &mut out[off..off + law.dim]);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        out
    }

    /// `n` independent points.
    pub fn sample_cloud<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

pub fn sample_block_beta<R: Rng + ?Sized>(bs: &BlockStructure, bp: &BetaParams, rng: &mut R) -> Result<Vec<f64>> {
    Ok(BlockBetaSampler::new(bs, bp)?.sample(rng))
}

/// Block-beta density `∏ c_{β_i,d_i} (1 - ‖x^{(i)}‖²)^{β_i}`, zero outside
/// the container.
pub fn density(bs: &BlockStructure, bp: &BetaParams, x: &[f64]) -> Result<f64> {
    bp.check_paired(bs)?;
    bs.check_len(x)?;
    let mut value = 1.0;
    for ((block, &d), &beta) in bs.blocks(x).zip(bs.dims()).zip(bp.betas()) {
        let r2: f64 = block.iter().map(|v| v * v).sum();
        if r2 > 1.0 {
            return Ok(0.0);
        }
        value *= beta_ball_const(beta, d) * (1.0 - r2).powf(beta);
    }
    Ok(value)
}

/// KS test of `‖X‖²` against `Beta(k/2, β+1)` for `X` beta on `B^k`.
pub fn verify_squared_radius(k: usize, beta: f64, n_samples: usize, rng: &mut RngStream, level: f64) -> Result<Report> {
    let law = BetaBallLaw::new(k, beta)?;
    let r2: Vec<f64> = (0..n_samples).map(|_| law.sample_squared_radius(rng)).collect();
    let (a, b) = (k as f64 / 2.0, beta + 1.0);
    let d = ks_statistic(&r2, |x| regularized_incomplete_beta(a, b, x.clamp(0.0, 1.0)).unwrap_or(f64::NAN));
    let p = ks_p_value(d, n_samples as f64);
    let mut report = Report::new();
    report.push(format!("sampler[k={k};beta={beta}]:radius2-ks"), d, level, StatKind::PValue, p, p >= level);
    Ok(report)
}

/// The first `k` coordinates of a uniform point of `B^n` are beta on `B^k`
/// with `β = (n-k)/2`. Compares squared radii of both constructions with a
/// two-sample KS test and the projected ones against the exact law.
pub fn verify_projection(n: usize, k: usize, n_samples: usize, rng: &mut RngStream, level: f64) -> Result<Report> {
    if k == 0 || k >= n {
        return Err(Error::Domain(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    let uniform = BetaBallLaw::new(n, 0.0)?;
    let beta = (n - k) as f64 / 2.0;
    let target = BetaBallLaw::new(k, beta)?;
    let mut buf = vec![0.0; n];
    let projected: Vec<f64> = (0..n_samples)
        .map(|_| {
            uniform.sample_into(rng, &mut buf);
            norm2(&buf[..k]).powi(2)
        })
        .collect();
    let direct: Vec<f64> = (0..n_samples).map(|_| target.sample_squared_radius(rng)).collect();
    let tag = format!("sampler[projection n={n} k={k}]");
    let mut report = Report::new();
    let d = ks_two_sample(&projected, &direct);
    let p = ks_p_value(d, n_samples as f64 / 2.0);
    report.push(format!("{tag}:two-sample-ks"), d, level, StatKind::PValue, p, p >= level);
    let (a, b) = (k as f64 / 2.0, beta + 1.0);
    let d = ks_statistic(&projected, |x| regularized_incomplete_beta(a, b, x.clamp(0.0, 1.0)).unwrap_or(f64::NAN));
    let p = ks_p_value(d, n_samples as f64);
    report.push(format!("{tag}:exact-ks"), d, level, StatKind::PValue, p, p >= level);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut s = RngStream::new(42, 7);
            (0..8).map(|_| s.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut s = RngStream::new(42, 7);
            (0..8).map(|_| s.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut s = RngStream::new(42, 8);
            (0..8).map(|_| s.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn law_rejects_bad_parameters() {
        assert!(BetaBallLaw::new(2, -1.0).is_err());
        assert!(BetaBallLaw::new(0, 0.0).is_err());
        assert!(BetaBallLaw::new(2, f64::NAN).is_err());
        assert!(BetaBallLaw::new(2, -0.99).is_ok());
    }

    #[test]
    fn uniform_interval_moments() {
        let law = BetaBallLaw::new(1, 0.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)[0]).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        // sd of the mean is sqrt(1/3/n) ≈ 0.0013
        assert!(mean.abs() < 0.006, "mean {mean}");
        assert!((var - 1.0 / 3.0).abs() < 0.005, "var {var}");
    }

    #[test]
    fn samples_stay_in_container() {
        let bs = BlockStructure::new(vec![3, 1, 2]).unwrap();
        let bp = BetaParams::new(vec![-0.5, 0.0, 2.0]).unwrap();
        let sampler = BlockBetaSampler::new(&bs, &bp).unwrap();
        let mut rng = RngStream::new(3, 1);
        for _ in 0..10_000 {
            let x = sampler.sample(&mut rng);
            assert!(crate::model::contains(&bs, &x).unwrap());
        }
    }

    #[test]
    fn cylinder_inner_fraction() {
        // uniform on B² x [-1,1]: P(‖x_{12}‖ <= 1/2) = 1/4 exactly
        let bs = BlockStructure::new(vec![2, 1]).unwrap();
        let sampler = BlockBetaSampler::new(&bs, &BetaParams::uniform(2)).unwrap();
        let mut rng = RngStream::new(11, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| {
                let x = sampler.sample(&mut rng);
                x[0].hypot(x[1]) <= 0.5
            })
            .count();
        let p = hits as f64 / n as f64;
        let sigma = (0.25 * 0.75 / n as f64).sqrt();
        assert!((p - 0.25).abs() <= 3.0 * sigma, "p = {p}");
    }

    #[test]
    fn density_examples() {
        let b2 = BlockStructure::new(vec![2]).unwrap();
        let d = density(&b2, &BetaParams::uniform(1), &[0.0, 0.0]).unwrap();
        assert!((d - 1.0 / PI).abs() < 1e-14);
        let b1 = BlockStructure::new(vec![1]).unwrap();
        let d = density(&b1, &BetaParams::new(vec![1.0]).unwrap(), &[0.0]).unwrap();
        assert!((d - 0.75).abs() < 1e-14);
        let b21 = BlockStructure::new(vec![2, 1]).unwrap();
        assert_eq!(density(&b21, &BetaParams::uniform(2), &[0.9, 0.9, 0.0]).unwrap(), 0.0);
        assert_eq!(density(&b21, &BetaParams::uniform(2), &[0.0, 0.0, 1.2]).unwrap(), 0.0);
    }
}
