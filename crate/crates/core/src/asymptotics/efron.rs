//! `E f₀(P_n) = n (1 - E Vol(P_{n-1}) / Vol(Z))` for uniform points.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hull::convex_hull;
use crate::model::{BetaParams, BlockStructure};
use crate::report::{mean_and_se, z_score, Report, StatKind};
use crate::sampler::{BlockBetaSampler, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfronOptions {
    pub n: usize,
    pub reps: usize,
    pub root_seed: u64,
    /// Uniform probe points per replication for the hit-or-miss estimate of
    /// the missed volume.
    pub probes: usize,
}

impl EfronOptions {
    pub fn new(n: usize, reps: usize, root_seed: u64) -> Self {
        Self { n, reps, root_seed, probes: 1000 }
    }
}

#[derive(Debug, Clone)]
pub struct EfronOutcome {
    pub report: Report,
    /// `(mean, se)` of `f₀(P_n)`.
    pub vertices: (f64, f64),
    /// `n (1 - E Vol(P_{n-1}) / Vol(Z))` from exact hull volumes.
    pub volume_side: (f64, f64),
    /// The same from hit-or-miss probes.
    pub probe_side: (f64, f64),
}

struct Rep {
    f0: f64,
    volume: f64,
    missed: f64,
}

fn one_rep(sampler: &BlockBetaSampler, opts: &EfronOptions, rep: usize) -> Result<Rep> {
    let mut rng = RngStream::new(opts.root_seed, 2 * rep as u64);
    let cloud = sampler.sample_cloud(&mut rng, opts.n);
    let f0 = convex_hull(&cloud)?.vertex_ids.len() as f64;

    let mut rng = RngStream::new(opts.root_seed, 2 * rep as u64 + 1);
    let cloud = sampler.sample_cloud(&mut rng, opts.n - 1);
    let hull = convex_hull(&cloud)?;
    let mut probe = vec![0.0; sampler.dim()];
    let mut outside = 0usize;
    for _ in 0..opts.probes {
        sampler.sample_into(&mut rng, &mut probe);
        outside += !hull.contains_point(&probe) as usize;
    }
    Ok(Rep { f0, volume: hull.volume, missed: outside as f64 / opts.probes.max(1) as f64 })
}

/// Estimates both sides of the identity by independent replications and
/// checks that their 3σ intervals overlap.
pub fn efron_check(bs: &BlockStructure, bp: &BetaParams, opts: &EfronOptions) -> Result<EfronOutcome> {
    bp.check_paired(bs)?;
    if bp.betas().iter().any(|&b| b != 0.0) {
        return Err(Error::Precondition("the Efron identity needs uniform points (all beta = 0)".into()));
    }
    let d = bs.total();
    if opts.n < d + 2 {
        return Err(Error::Precondition(format!("need n >= d + 2 = {}, got {}", d + 2, opts.n)));
    }
    if opts.reps < 2 || opts.probes == 0 {
        return Err(Error::Precondition("need at least two replications and one probe".into()));
    }
    let sampler = BlockBetaSampler::new(bs, bp)?;
    let reps: Vec<Rep> = (0..opts.reps).into_par_iter().map(|r| one_rep(&sampler, opts, r)).collect::<Result<_>>()?;

    let n = opts.n as f64;
    let vol_z = bs.container_volume();
    let (f0, f0_se) = mean_and_se(&reps.iter().map(|r| r.f0).collect::<Vec<_>>());
    let (v, v_se) = mean_and_se(&reps.iter().map(|r| r.volume).collect::<Vec<_>>());
    let (miss, miss_se) = mean_and_se(&reps.iter().map(|r| r.missed).collect::<Vec<_>>());
    let volume_side = (n * (1.0 - v / vol_z), n * v_se / vol_z);
    let probe_side = (n * miss, n * miss_se);

    let tag = format!("efron[{bs};n={}]", opts.n);
    let mut report = Report::new();
    for (what, (x, se)) in [("volume", volume_side), ("hit-or-miss", probe_side)] {
        let overlap = (f0 - x).abs() <= 3.0 * (f0_se + se);
        report.push(format!("{tag}:f0-vs-{what}"), f0, x, StatKind::Z, z_score(f0, f0_se, x, se), overlap);
    }
    Ok(EfronOutcome { report, vertices: (f0, f0_se), volume_side, probe_side })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preconditions() {
        let bs = BlockStructure::new(vec![2, 1]).unwrap();
        let opts = EfronOptions::new(4, 10, 1);
        assert!(efron_check(&bs, &BetaParams::uniform(2), &opts).is_err());
        let beta = BetaParams::new(vec![0.5, 0.0]).unwrap();
        assert!(efron_check(&bs, &beta, &EfronOptions::new(50, 10, 1)).is_err());
    }

    #[test]
    fn small_square_run() {
        let bs = BlockStructure::new(vec![1, 1]).unwrap();
        let out = efron_check(&bs, &BetaParams::uniform(2), &EfronOptions::new(20, 400, 5)).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        let again = efron_check(&bs, &BetaParams::uniform(2), &EfronOptions::new(20, 400, 5)).unwrap();
        assert_eq!(out.vertices, again.vertices);
    }
}
