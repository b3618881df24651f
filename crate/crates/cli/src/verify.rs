//! Verification suites behind `blockbeta verify`. Each suite returns a line
//! report and an overall verdict; `Scale::Full` runs at acceptance size.

use std::fmt;

use blockbeta_core::asymptotics::{
    aw_asymptotic, aw_integral_numeric, aw_two_term, efron_check, AwCase, AwConfig, EfronOptions,
};
use blockbeta_core::hull::{
    brute_force_facets, convex_hull, euler_relation_holds, hinman_violation, ridges_are_regular,
};
use blockbeta_core::metacube::{
    verify_blaschke_petkantschin_2d, verify_bounds, verify_polyspherical, verify_reduction, BoundsGrid, QuadratureSpec,
    TestFn, REDUCTION_PASS_FRACTION,
};
use blockbeta_core::report::{Report, StatKind};
use blockbeta_core::sampler::{verify_projection, verify_squared_radius, BlockBetaSampler, RngStream};
use blockbeta_core::{BetaParams, BlockStructure};
use clap::ValueEnum;
use rand::Rng;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Sampler,
    Hull,
    Reduction,
    Aw,
    Polyspherical,
    Bp2d,
    Bounds,
    Efron,
    All,
}

impl Suite {
    pub const EACH: [Suite; 8] = [
        Suite::Sampler,
        Suite::Hull,
        Suite::Reduction,
        Suite::Aw,
        Suite::Polyspherical,
        Suite::Bp2d,
        Suite::Bounds,
        Suite::Efron,
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub scale: Scale,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { seed: 20_240_601, scale: Scale::Quick }
    }
}

impl VerifyOptions {
    fn pick<T>(&self, quick: T, full: T) -> T {
        match self.scale {
            Scale::Quick => quick,
            Scale::Full => full,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub report: Report,
    pub passed: bool,
}

impl SuiteOutcome {
    fn strict(report: Report) -> Self {
        let passed = report.passed();
        Self { report, passed }
    }
}

/// Familywise level over all KS tests of the suite (Holm step-down).
pub const SAMPLER_LEVEL: f64 = 0.01;

pub fn sampler_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let n = opts.pick(20_000, 100_000);
    let mut rng = RngStream::new(opts.seed, 0x5a);
    let mut report = Report::new();
    for k in 1..=4 {
        for beta in [0.0, 0.5, 2.0] {
            report.extend(verify_squared_radius(k, beta, n, &mut rng, SAMPLER_LEVEL)?);
        }
    }
    for (big, k) in [(2, 1), (3, 1), (4, 2), (5, 3), (6, 2)] {
        report.extend(verify_projection(big, k, n, &mut rng, SAMPLER_LEVEL)?);
    }
    report.apply_holm(SAMPLER_LEVEL);
    Ok(SuiteOutcome::strict(report))
}

/// Euler, ridge regularity and Hinman on hulls of random clouds,
/// `d ∈ 2..=6`, `n ∈ d+2..=200`.
pub fn hull_properties(runs: usize, seed: u64) -> Result<Report> {
    let mut rng = RngStream::new(seed, 0x41);
    let (mut euler, mut ridges, mut hinman) = (0, 0, 0);
    for run in 0..runs {
        let d = 2 + run % 5;
        let n = rng.random_range(d + 2..=200);
        let dims = if run % 2 == 0 { vec![d] } else { vec![1; d] };
        let bs = BlockStructure::new(dims)?;
        let beta = if run % 3 == 0 { 1.5 } else { 0.0 };
        let sampler = BlockBetaSampler::new(&bs, &BetaParams::new(vec![beta; bs.num_blocks()])?)?;
        let hull = convex_hull(&sampler.sample_cloud(&mut rng, n))?;
        euler += euler_relation_holds(&hull.f_vector) as usize;
        ridges += ridges_are_regular(&hull.facets, d) as usize;
        hinman += hinman_violation(&hull.f_vector).is_none() as usize;
    }
    let mut report = Report::new();
    for (what, ok) in [("euler", euler), ("ridges", ridges), ("hinman", hinman)] {
        let frac = ok as f64 / runs as f64;
        report.push(format!("hull:{what}"), frac, 1.0, StatKind::Fraction, ok as f64, ok == runs);
    }
    Ok(report)
}

/// Facet sets against brute force, `d ≤ 4`, `n ≤ 15`.
pub fn hull_oracle(instances: usize, seed: u64) -> Result<Report> {
    let mut rng = RngStream::new(seed, 0x42);
    let mut agree = 0;
    for i in 0..instances {
        let d = 2 + i % 3;
        let n = rng.random_range(d + 1..=15);
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let ours: std::collections::BTreeSet<Vec<usize>> = convex_hull(&points)?.facet_sets().into_iter().collect();
        agree += (ours == brute_force_facets(&points)?) as usize;
    }
    let mut report = Report::new();
    let frac = agree as f64 / instances as f64;
    report.push("hull:oracle", frac, 1.0, StatKind::Fraction, agree as f64, agree == instances);
    Ok(report)
}

pub fn hull_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut report = hull_properties(opts.pick(200, 1000), opts.seed)?;
    report.extend(hull_oracle(opts.pick(50, 200), opts.seed)?);
    Ok(SuiteOutcome::strict(report))
}

pub const REDUCTION_CONFIGS: [&[usize]; 4] = [&[2, 1], &[2, 2], &[3, 1], &[1, 1, 1]];

/// Pooled over all configurations, at least 98% of checks within 3 se.
pub fn reduction_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let (trials, samples) = opts.pick((10, 20_000), (50, 1_000_000));
    let q = QuadratureSpec::default();
    let mut report = Report::new();
    let (mut within, mut total, mut worst) = (0, 0, 0.0f64);
    for (i, dims) in REDUCTION_CONFIGS.iter().enumerate() {
        for (j, beta) in [0.0, 0.5].into_iter().enumerate() {
            let bs = BlockStructure::new(dims.to_vec())?;
            let bp = BetaParams::new(vec![beta; dims.len()])?;
            let mut rng = RngStream::new(opts.seed, 0x100 + 2 * i as u64 + j as u64);
            let out = verify_reduction(&bs, &bp, trials, samples, &mut rng, &q)?;
            within += out.within_3se;
            total += out.checks;
            worst = worst.max(out.worst_z);
            report.extend(out.report);
        }
    }
    let frac = within as f64 / total as f64;
    let passed = frac >= REDUCTION_PASS_FRACTION;
    report.push("reduction:pooled-within-3se", frac, REDUCTION_PASS_FRACTION, StatKind::Z, worst, passed);
    Ok(SuiteOutcome { report, passed })
}

/// `(a, c, tolerance)` evaluated at `n = 10⁶`.
pub const AW_CONFIGS: [(&[f64], f64, f64); 5] = [
    (&[2.0], 1.0, 0.05),
    (&[2.0, 1.0], 0.5, 0.05),
    (&[3.0, 2.0, 1.0], 1.0, 0.05),
    (&[1.0, 1.0], 1.0, 0.10),
    (&[3.0, 2.0, 2.0], 1.0, 0.10),
];

pub const AW_N: f64 = 1e6;

fn fmt_a(a: &[f64]) -> String {
    let parts: Vec<String> = a.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(","))
}

/// Leading-order ratio at `n = 10⁶`, monotone approach along
/// `10³, …, 10⁶`, and for double ties the two-term expansion.
pub fn aw_suite(_opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let mut report = Report::new();
    for (a, c, tol) in AW_CONFIGS {
        let cfg = AwConfig::new(0.0, a.to_vec(), c)?;
        let tag = format!("aw[a={};c={c}]", fmt_a(a));
        let ratios: Vec<f64> = [1e3, 1e4, 1e5, AW_N]
            .iter()
            .map(|&n| Ok(aw_integral_numeric(&cfg, n)? / aw_asymptotic(&cfg, n)))
            .collect::<Result<_>>()?;
        let last = ratios[3];
        report.push(format!("{tag}:ratio@1e6"), last, 1.0, StatKind::Ratio, last - 1.0, (last - 1.0).abs() <= tol);
        let monotone = ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs());
        report.push(format!("{tag}:monotone"), ratios[0], last, StatKind::Ratio, ratios[0] - 1.0, monotone);
        if matches!(cfg.case(), AwCase::Tied { .. }) {
            if let Some(two) = aw_two_term(&cfg, AW_N) {
                let r = aw_integral_numeric(&cfg, AW_N)? / two;
                report.push(format!("{tag}:two-term@1e6"), r, 1.0, StatKind::Ratio, r - 1.0, (r - 1.0).abs() <= 1e-3);
            }
        }
    }
    Ok(SuiteOutcome::strict(report))
}

pub fn polyspherical_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let n = opts.pick(100_000, 1_000_000);
    let mut rng = RngStream::new(opts.seed, 0x70);
    let mut report = Report::new();
    for dims in [vec![1, 1], vec![2, 1], vec![2, 2, 1], vec![3, 3]] {
        let bs = BlockStructure::new(dims)?;
        for f in [TestFn::Constant, TestFn::FirstBlockNormSq, TestFn::ExpFirst] {
            report.extend(verify_polyspherical(&bs, f, n, &mut rng)?);
        }
    }
    Ok(SuiteOutcome::strict(report))
}

pub fn bp2d_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let n = opts.pick(200_000, 2_000_000);
    let mut rng = RngStream::new(opts.seed, 0x71);
    let mut report = Report::new();
    for f in [TestFn::Constant, TestFn::DiskIndicator, TestFn::GaussianKernel] {
        report.extend(verify_blaschke_petkantschin_2d(f, n, &mut rng)?);
    }
    Ok(SuiteOutcome::strict(report))
}

pub const BOUNDS_CONFIGS: [&[f64]; 11] = [
    &[0.0],
    &[-0.5],
    &[0.5],
    &[2.5],
    &[0.0, 0.0],
    &[0.5, 0.5],
    &[2.0, 0.5],
    &[1.0, 2.5],
    &[0.0, 0.0, 0.0],
    &[0.5, 0.5, 0.5],
    &[1.0, 0.0, 2.5],
];

pub fn bounds_suite(_opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let q = QuadratureSpec::default();
    let grid = BoundsGrid::default();
    let mut report = Report::new();
    for betas in BOUNDS_CONFIGS {
        report.extend(verify_bounds(betas.len(), betas, &grid, &q)?);
    }
    Ok(SuiteOutcome::strict(report))
}

pub fn efron_suite(opts: &VerifyOptions) -> Result<SuiteOutcome> {
    let reps = opts.pick(60, 200);
    let bs = BlockStructure::new(vec![2, 1])?;
    let mut report = Report::new();
    for n in [100, 1000] {
        let o = EfronOptions::new(n, reps, opts.seed ^ n as u64);
        report.extend(efron_check(&bs, &BetaParams::uniform(2), &o)?.report);
    }
    Ok(SuiteOutcome::strict(report))
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteOutcome> {
    match suite {
        Suite::Sampler => sampler_suite(opts),
        Suite::Hull => hull_suite(opts),
        Suite::Reduction => reduction_suite(opts),
        Suite::Aw => aw_suite(opts),
        Suite::Polyspherical => polyspherical_suite(opts),
        Suite::Bp2d => bp2d_suite(opts),
        Suite::Bounds => bounds_suite(opts),
        Suite::Efron => efron_suite(opts),
        Suite::All => {
            let mut report = Report::new();
            let mut passed = true;
            for s in Suite::EACH {
                let out = run_suite(s, opts)?;
                passed &= out.passed;
                report.extend(out.report);
            }
            Ok(SuiteOutcome { report, passed })
        }
    }
}
