//! Monte Carlo cross-checks: the reduction from caps of the product body to
//! meta-caps, the growth of meta-cap and meta-section contents, polyspherical
//! coordinates and the planar affine Blaschke–Petkantschin formula.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use super::caps::{cap_content_meta, section_content_meta, MetaCap, MAX_META_DIM};
use super::quadrature::QuadratureSpec;
use super::special::{beta_ball_const, beta_line_const, sphere_area};
use crate::error::{Error, Result};
use crate::model::{BetaParams, BlockStructure};
use crate::report::{mean_and_se, z_score, Report, StatKind};
use crate::sampler::{BlockBetaSampler, RngStream};

/// Meta-cube exponents `β̃_i = (d_i - 1)/2 + β_i`.
pub fn meta_betas(bs: &BlockStructure, bp: &BetaParams) -> Result<Vec<f64>> {
    bp.check_paired(bs)?;
    Ok(bs.dims().iter().zip(bp.betas()).map(|(&d, &b)| (d as f64 - 1.0) / 2.0 + b).collect())
}

/// `∏ c_{β_i,d_i} / (c_{β_i,d_i-1} c_{β̃_i})`. The one-dimensional constant
/// is taken at the meta exponent `β̃_i`; with that choice the product is 1.
pub fn reduction_constant(bs: &BlockStructure, bp: &BetaParams) -> Result<f64> {
    let tilde = meta_betas(bs, bp)?;
    Ok(bs
        .dims()
        .iter()
        .zip(bp.betas())
        .zip(&tilde)
        .map(|((&d, &b), &bt)| beta_ball_const(b, d) / (beta_ball_const(b, d - 1) * beta_line_const(bt)))
        .product())
}

/// Splits a direction into block norms `v_i = ‖w^{(i)}‖`.
pub fn meta_normal(bs: &BlockStructure, w: &[f64]) -> Result<Vec<f64>> {
    bs.block_norms(w)
}

/// Content of `Z ∩ {x·w ≥ s}` via the meta-cube.
pub fn cap_content_full(bs: &BlockStructure, bp: &BetaParams, w: &[f64], s: f64, q: &QuadratureSpec) -> Result<f64> {
    let v = meta_normal(bs, w)?;
    let cap = MetaCap::from_direction(&v, s)?;
    Ok(reduction_constant(bs, bp)? * cap_content_meta(&cap, &meta_betas(bs, bp)?, q)?)
}

/// Hit-or-miss estimate of `P(X·w ≥ s)` for block-beta `X`, with its
/// binomial standard error.
pub fn cap_content_full_mc(
    bs: &BlockStructure,
    bp: &BetaParams,
    w: &[f64],
    s: f64,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    bs.check_len(w)?;
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("direction has norm {norm}, expected 1")));
    }
    if n_samples == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    let sampler = BlockBetaSampler::new(bs, bp)?;
    let mut x = vec![0.0; bs.total()];
    let mut hits = 0usize;
    for _ in 0..n_samples {
        sampler.sample_into(rng, &mut x);
        if x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() >= s {
            hits += 1;
        }
    }
    let p = hits as f64 / n_samples as f64;
    Ok((p, (p * (1.0 - p) / n_samples as f64).sqrt()))
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return g.into_iter().map(|x| x / n).collect();
        }
    }
}

fn random_meta_normal<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<f64> {
    random_unit(rng, m).into_iter().map(f64::abs).collect()
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.4}")).collect();
    format!("({})", parts.join(","))
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub report: Report,
    pub checks: usize,
    pub within_3se: usize,
    pub worst_z: f64,
}

impl ReductionReport {
    pub fn pass_fraction(&self) -> f64 {
        self.within_3se as f64 / self.checks.max(1) as f64
    }
}

/// Fraction of reduction checks that must land within three standard errors.
pub const REDUCTION_PASS_FRACTION: f64 = 0.98;

/// Compares hit-or-miss cap contents of the product body with the meta-cube
/// quadrature for random `(v, s)` with `s ∈ (s₁(v), ‖v‖₁)` and random block
/// directions `u_i`. The standard error is the binomial one under the
/// quadrature value, plus a half-count continuity correction.
pub fn verify_reduction(
    bs: &BlockStructure,
    bp: &BetaParams,
    trials: usize,
    n_samples: usize,
    rng: &mut RngStream,
    q: &QuadratureSpec,
) -> Result<ReductionReport> {
    let m = bs.num_blocks();
    if m > MAX_META_DIM {
        return Err(Error::Unsupported(format!("{m} blocks > {MAX_META_DIM}")));
    }
    let constant = reduction_constant(bs, bp)?;
    let tilde = meta_betas(bs, bp)?;
    let tag = format!("reduction[{bs};beta={}]", fmt_list(bp.betas()));
    let mut report = Report::new();
    let (mut within, mut worst) = (0, 0.0f64);
    let n = n_samples as f64;
    for trial in 0..trials {
        let v = if m == 1 { vec![1.0] } else { random_meta_normal(rng, m) };
        let probe = MetaCap::from_direction(&v, 0.0)?;
        let (lo, hi) = (probe.s1(), probe.one_norm());
        let s = lo + (hi - lo) * rng.random::<f64>();
        let cap = probe.with_offset(s);
        let mut w = Vec::with_capacity(bs.total());
        for (i, &d) in bs.dims().iter().enumerate() {
            w.extend(random_unit(rng, d).into_iter().map(|x| x * cap.v()[i]));
        }
        let reference = constant * cap_content_meta(&cap, &tilde, q)?;
        let (mc, _) = cap_content_full_mc(bs, bp, &w, s, n_samples, rng)?;
        let se = (reference * (1.0 - reference) / n).max(0.0).sqrt();
        let diff = (mc - reference).abs();
        let ok = diff <= 3.0 * se + 0.5 / n;
        let z = if se > 0.0 {
            (mc - reference) / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        within += ok as usize;
        worst = worst.max(z.abs());
        report.push(format!("{tag}#{trial}:v={},s={s:.6}", fmt_list(cap.v())), mc, reference, StatKind::Z, z, ok);
    }
    let fraction = within as f64 / trials.max(1) as f64;
    report.push(
        format!("{tag}:within-3se"),
        fraction,
        REDUCTION_PASS_FRACTION,
        StatKind::Z,
        worst,
        fraction >= REDUCTION_PASS_FRACTION,
    );
    Ok(ReductionReport { report, checks: trials, within_3se: within, worst_z: worst })
}

/// Grid for the growth checks of meta-cap and meta-section contents.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsGrid {
    /// Number of log-spaced gaps `‖v‖₁ - s`.
    pub points: usize,
    /// Gaps run from `lo_frac·g` to `hi_frac·g`, `g = ‖v‖₁ - max(s₁, 0)`.
    pub lo_frac: f64,
    pub hi_frac: f64,
    /// Random meta-normals per configuration, on top of the diagonal.
    pub directions: usize,
    /// Random meta-normals have every component at least this large.
    pub min_component: f64,
    pub seed: u64,
    pub max_slope: f64,
    pub max_spread: f64,
}

impl Default for BoundsGrid {
    fn default() -> Self {
        Self {
            points: 16,
            lo_frac: 1e-4,
            hi_frac: 0.1,
            directions: 3,
            min_component: 0.1,
            seed: 0xb0_0d5,
            max_slope: 0.05,
            max_spread: 1e3,
        }
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn spread(rs: &[f64]) -> f64 {
    let max = rs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rs.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

/// Checks that meta-cap contents scale like `gap^{β+m} ∏ v_i^{-β_i-1}` for
/// `s ∈ (s₁, ‖v‖₁)`, meta-sections like `gap^{β+m-1} ∏ v_i^{-β_i-1}` for
/// `s ∈ (max(s₁,0), ‖v‖₁)`, and that caps stay within a bounded factor of
/// `∏ min{gap/(2v_i), 1}^{β_i+1}` for all `s`.
///
/// Sections are only covered for `β ≥ 0` when `m ≥ 2`; other exponents are
/// refused.
pub fn verify_bounds(m: usize, betas: &[f64], grid: &BoundsGrid, q: &QuadratureSpec) -> Result<Report> {
    if betas.len() != m || m == 0 {
        return Err(Error::DimensionMismatch { expected: m, actual: betas.len() });
    }
    if m > MAX_META_DIM {
        return Err(Error::Unsupported(format!("meta-dimension {m} > {MAX_META_DIM}")));
    }
    if m >= 2 && betas.iter().any(|&b| b < 0.0) {
        return Err(Error::Precondition("section bounds need beta >= 0 when m >= 2".into()));
    }
    if grid.points < 3 || !(grid.lo_frac > 0.0 && grid.lo_frac < grid.hi_frac && grid.hi_frac <= 1.0) {
        return Err(Error::Precondition("bounds grid needs >= 3 points and 0 < lo_frac < hi_frac <= 1".into()));
    }
    let beta: f64 = betas.iter().sum();
    let tag = format!("bounds[m={m};beta={}]", fmt_list(betas));
    let mut rng = RngStream::new(grid.seed, m as u64);
    let mut directions = vec![vec![1.0 / (m as f64).sqrt(); m]];
    while directions.len() < grid.directions + 1 && m > 1 {
        let v = random_meta_normal(&mut rng, m);
        if v.iter().all(|&x| x >= grid.min_component) {
            directions.push(v);
        }
    }

    let mut report = Report::new();
    let (mut cap_ratios, mut sec_ratios, mut global_ratios) = (Vec::new(), Vec::new(), Vec::new());
    for v in &directions {
        let probe = MetaCap::new(v.clone(), 0.0)?;
        let norm1 = probe.one_norm();
        let g = norm1 - probe.s1().max(0.0);
        let gaps = geometric(grid.lo_frac * g, grid.hi_frac * g, grid.points);
        let log_v: f64 = v.iter().zip(betas).map(|(&x, &b)| -(b + 1.0) * x.ln()).sum();
        let (mut xs, mut rc, mut rs) = (Vec::new(), Vec::new(), Vec::new());
        for &gap in &gaps {
            let cap = probe.with_offset(norm1 - gap);
            let c = cap_content_meta(&cap, betas, q)?;
            let sec = section_content_meta(&cap, betas, q)?;
            xs.push(gap.ln());
            rc.push(c / ((beta + m as f64) * gap.ln() + log_v).exp());
            rs.push(sec / ((beta + m as f64 - 1.0) * gap.ln() + log_v).exp());
        }
        let vname = fmt_list(v);
        for (what, ratios, all) in [("cap", &rc, &mut cap_ratios), ("section", &rs, &mut sec_ratios)] {
            let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
            let logs: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
            let slope = if finite { ls_slope(&xs, &logs) } else { f64::NAN };
            report.push(
                format!("{tag}:{what}-slope:v={vname}"),
                slope,
                0.0,
                StatKind::Slope,
                slope,
                finite && slope.abs() <= grid.max_slope,
            );
            all.extend_from_slice(ratios);
        }

        // all offsets: gap over (0, 2‖v‖₁)
        let span = 2.0 * norm1;
        for &frac in &geometric(1e-3, 0.999, grid.points) {
            let gap = frac * span;
            let c = cap_content_meta(&probe.with_offset(norm1 - gap), betas, q)?;
            let bound: f64 = v.iter().zip(betas).map(|(&x, &b)| (gap / (2.0 * x)).min(1.0).powf(b + 1.0)).product();
            global_ratios.push(c / bound);
        }
    }
    for (what, ratios) in [("cap", &cap_ratios), ("section", &sec_ratios), ("cap-all-offsets", &global_ratios)] {
        let sp = spread(ratios);
        let ok = sp.is_finite() && ratios.iter().all(|r| *r > 0.0) && sp <= grid.max_spread;
        report.push(format!("{tag}:{what}-spread"), sp, grid.max_spread, StatKind::Spread, sp, ok);
    }
    Ok(report)
}

/// Built-in test functions for the integral-geometric checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFn {
    /// `f ≡ 1`.
    Constant,
    /// `w ↦ ‖w^{(1)}‖²`.
    FirstBlockNormSq,
    /// `w ↦ exp(w₁)`.
    ExpFirst,
    /// `(x₁, x₂) ↦ 1{‖x₁‖ ≤ 1, ‖x₂‖ ≤ 1}`.
    DiskIndicator,
    /// `(x₁, x₂) ↦ exp(-‖x₁ - x₂‖²)`.
    GaussianKernel,
}

impl TestFn {
    pub const ALL: [TestFn; 5] =
        [TestFn::Constant, TestFn::FirstBlockNormSq, TestFn::ExpFirst, TestFn::DiskIndicator, TestFn::GaussianKernel];

    pub fn name(self) -> &'static str {
        match self {
            TestFn::Constant => "const",
            TestFn::FirstBlockNormSq => "block1-norm2",
            TestFn::ExpFirst => "exp1",
            TestFn::DiskIndicator => "disk",
            TestFn::GaussianKernel => "gauss",
        }
    }

    fn on_sphere(self, bs: &BlockStructure, w: &[f64]) -> Result<f64> {
        match self {
            TestFn::Constant => Ok(1.0),
            TestFn::FirstBlockNormSq => Ok(bs.block(w, 0).iter().map(|x| x * x).sum()),
            TestFn::ExpFirst => Ok(w[0].exp()),
            _ => Err(Error::Unsupported(format!("test function {} is for point pairs", self.name()))),
        }
    }

    fn on_pair(self, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
        match self {
            TestFn::Constant => Ok(1.0),
            TestFn::DiskIndicator => Ok((x[0].hypot(x[1]) <= 1.0 && y[0].hypot(y[1]) <= 1.0) as u8 as f64),
            TestFn::GaussianKernel => Ok((-((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2))).exp()),
            _ => Err(Error::Unsupported(format!("test function {} is for sphere points", self.name()))),
        }
    }
}

impl fmt::Display for TestFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFn::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown test function {s:?}")))
    }
}

/// `∫_{S^{d-1}} f dσ` estimated directly and through polyspherical
/// coordinates `w = (v₁u₁, …, v_m u_m)` with weight `∏ v_i^{d_i-1}`.
pub fn verify_polyspherical(bs: &BlockStructure, f: TestFn, n_samples: usize, rng: &mut RngStream) -> Result<Report> {
    let (d, m) = (bs.total(), bs.num_blocks());
    if d > 6 || m > 3 {
        return Err(Error::Unsupported(format!("polyspherical check needs d <= 6 and m <= 3, got {bs}")));
    }
    if n_samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    let omega_d = sphere_area(d);
    let mut lhs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let w = random_unit(rng, d);
        lhs.push(omega_d * f.on_sphere(bs, &w)?);
    }
    // S₊^{m-1} has measure ω_m / 2^m; each S^{d_i-1} has measure ω_{d_i}
    let scale = sphere_area(m) / 2f64.powi(m as i32) * bs.dims().iter().map(|&k| sphere_area(k)).product::<f64>();
    let mut rhs = Vec::with_capacity(n_samples);
    let mut w = vec![0.0; d];
    for _ in 0..n_samples {
        let v = random_meta_normal(rng, m);
        let mut weight = 1.0;
        for (i, (&k, &off)) in bs.dims().iter().zip(bs.offsets()).enumerate() {
            let u = random_unit(rng, k);
            w[off..off + k].iter_mut().zip(&u).for_each(|(dst, x)| *dst = v[i] * x);
            weight *= v[i].powi(k as i32 - 1);
        }
        rhs.push(scale * weight * f.on_sphere(bs, &w)?);
    }
    let (l, sl) = mean_and_se(&lhs);
    let (r, sr) = mean_and_se(&rhs);
    let tag = format!("polyspherical[{bs};{f}]");
    let mut report = Report::new();
    let z = z_score(l, sl, r, sr);
    report.push(format!("{tag}:direct-vs-polyspherical"), l, r, StatKind::Z, z, z.abs() <= 3.0);
    let exact = match f {
        TestFn::Constant => Some(omega_d),
        TestFn::FirstBlockNormSq => Some(omega_d * bs.dims()[0] as f64 / d as f64),
        _ => None,
    };
    if let Some(exact) = exact {
        let z = z_score(r, sr, exact, 0.0);
        report.push(format!("{tag}:polyspherical-vs-exact"), r, exact, StatKind::Z, z, z.abs() <= 3.0);
    }
    Ok(report)
}

/// Planar affine Blaschke–Petkantschin formula on `[-1,1]²`:
/// `∫∫ f dx₁dx₂ = ½ ∫_{S¹} ∫_ℝ ∫∫_{H(w,s)²} f |t₁ - t₂| dt₁dt₂ ds dσ(w)`.
pub fn verify_blaschke_petkantschin_2d(f: TestFn, n_samples: usize, rng: &mut RngStream) -> Result<Report> {
    if n_samples < 2 {
        return Err(Error::Precondition("need at least two samples".into()));
    }
    f.on_pair([0.0; 2], [0.0; 2])?;
    let mut lhs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let y = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        lhs.push(16.0 * f.on_pair(x, y)?);
    }
    // lines meeting the square have |s| ≤ √2
    let s_max = 2f64.sqrt();
    let scale = 0.5 * 2.0 * PI * 2.0 * s_max;
    let mut rhs = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let theta = rng.random_range(0.0..2.0 * PI);
        let (w, perp) = ([theta.cos(), theta.sin()], [-theta.sin(), theta.cos()]);
        let s = rng.random_range(-s_max..s_max);
        let Some((t0, t1)) = chord(w, perp, s) else {
            rhs.push(0.0);
            continue;
        };
        let len = t1 - t0;
        let ta = rng.random_range(0.0..1.0) * len + t0;
        let tb = rng.random_range(0.0..1.0) * len + t0;
        let at = |t: f64| [s * w[0] + t * perp[0], s * w[1] + t * perp[1]];
        rhs.push(scale * len * len * (ta - tb).abs() * f.on_pair(at(ta), at(tb))?);
    }
    let (l, sl) = mean_and_se(&lhs);
    let (r, sr) = mean_and_se(&rhs);
    let tag = format!("bp2d[{f}]");
    let mut report = Report::new();
    let z = z_score(l, sl, r, sr);
    report.push(format!("{tag}:square-vs-lines"), l, r, StatKind::Z, z, z.abs() <= 3.0);
    let exact = match f {
        TestFn::Constant => Some(16.0),
        TestFn::DiskIndicator => Some(PI * PI),
        _ => None,
    };
    if let Some(exact) = exact {
        let z = z_score(r, sr, exact, 0.0);
        report.push(format!("{tag}:lines-vs-exact"), r, exact, StatKind::Z, z, z.abs() <= 3.0);
    }
    Ok(report)
}

/// Parameter interval of `{s w + t w⊥} ∩ [-1,1]²`.
fn chord(w: [f64; 2], perp: [f64; 2], s: f64) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..2 {
        let base = s * w[k];
        if perp[k].abs() < 1e-300 {
            if base.abs() > 1.0 {
                return None;
            }
            continue;
        }
        let (a, b) = ((-1.0 - base) / perp[k], (1.0 - base) / perp[k]);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    (lo < hi).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_constant_is_one() {
        for (dims, betas) in [
            (vec![2, 1], vec![0.0, 0.0]),
            (vec![3, 1], vec![0.5, 0.5]),
            (vec![4], vec![2.5]),
            (vec![1, 1, 1], vec![0.0, -0.5, 1.0]),
            (vec![5, 2], vec![-0.3, 7.0]),
        ] {
            let bs = BlockStructure::new(dims).unwrap();
            let bp = BetaParams::new(betas).unwrap();
            let c = reduction_constant(&bs, &bp).unwrap();
            assert!((c - 1.0).abs() < 1e-13, "{bs}: {c}");
        }
    }

    #[test]
    fn one_block_reduction_against_closed_form() {
        // B³ uniform: marginal of x₁ is (3/4)(1-t²), P(x₁ ≥ s) = (3/4)(2/3 - s + s³/3)
        let bs = BlockStructure::new(vec![3]).unwrap();
        let bp = BetaParams::uniform(1);
        let w = [0.0, 0.6, 0.8];
        for s in [-0.5, 0.2, 0.7] {
            let got = cap_content_full(&bs, &bp, &w, s, &QuadratureSpec::default()).unwrap();
            let exact = 0.75 * (2.0 / 3.0 - s + s * s * s / 3.0);
            assert!((got - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn full_mc_trivial_cases() {
        let bs = BlockStructure::new(vec![2, 1]).unwrap();
        let bp = BetaParams::uniform(2);
        let w = [0.6, 0.0, 0.8];
        let mut rng = RngStream::new(3, 0);
        let (p, se) = cap_content_full_mc(&bs, &bp, &w, -1.5, 1000, &mut rng).unwrap();
        assert_eq!((p, se), (1.0, 0.0));
        let (p, se) = cap_content_full_mc(&bs, &bp, &w, 0.0, 100_000, &mut rng).unwrap();
        assert!((p - 0.5).abs() <= 3.0 * se);
        assert!(cap_content_full_mc(&bs, &bp, &[1.0, 1.0, 0.0], 0.0, 10, &mut rng).is_err());
    }

    #[test]
    fn small_reduction_run() {
        let bs = BlockStructure::new(vec![2, 1]).unwrap();
        let bp = BetaParams::uniform(2);
        let mut rng = RngStream::new(8, 0);
        let out = verify_reduction(&bs, &bp, 10, 20_000, &mut rng, &QuadratureSpec::default()).unwrap();
        assert_eq!(out.report.lines.len(), 11);
        assert!(out.within_3se >= 9, "{}", out.report);
    }

    #[test]
    fn chord_clipping() {
        let (t0, t1) = chord([1.0, 0.0], [0.0, 1.0], 0.5).unwrap();
        assert_eq!((t0, t1), (-1.0, 1.0));
        assert!(chord([1.0, 0.0], [0.0, 1.0], 1.2).is_none());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (t0, t1) = chord([r, r], [-r, r], 0.0).unwrap();
        assert!((t1 - t0 - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn test_function_names_round_trip() {
        for t in TestFn::ALL {
            assert_eq!(t.name().parse::<TestFn>().unwrap(), t);
        }
        assert!("nope".parse::<TestFn>().is_err());
    }

    #[test]
    fn bounds_refuses_negative_sections() {
        let g = BoundsGrid::default();
        assert!(verify_bounds(2, &[0.0, -0.5], &g, &QuadratureSpec::default()).is_err());
        assert!(verify_bounds(1, &[-0.5], &g, &QuadratureSpec::default()).is_ok());
    }
}
