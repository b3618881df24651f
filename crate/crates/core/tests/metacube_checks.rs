use blockbeta_core::metacube::*;
use blockbeta_core::report::mean_and_se;
use blockbeta_core::sampler::RngStream;
use blockbeta_core::{BetaParams, BlockStructure};
use rand_distr::{Beta, Distribution};

#[test]
fn corner_triangle_is_exact_for_uniform_square() {
    let q = QuadratureSpec::default();
    for (v1, v2) in [(0.6, 0.8), (1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()), (0.2, 0.979_795_897_113_271_2)] {
        let probe = MetaCap::new(vec![v1, v2], 0.0).unwrap();
        for frac in [0.1, 0.5, 0.99] {
            let gap = frac * 2.0 * v1.min(v2);
            let cap = probe.with_offset(v1 + v2 - gap);
            let exact = gap * gap / (8.0 * v1 * v2);
            let got = cap_content_meta(&cap, &[0.0, 0.0], &q).unwrap();
            assert!((got - exact).abs() < 1e-12 * exact.max(1e-300), "{got} vs {exact}");
            let section = section_content_meta(&cap, &[0.0, 0.0], &q).unwrap();
            assert!((section - gap / (4.0 * v1 * v2)).abs() < 1e-12);
        }
    }
}

#[test]
fn meta_caps_against_direct_sampling() {
    let q = QuadratureSpec::default();
    let mut rng = RngStream::new(404, 0);
    for (betas, v, s) in [
        (vec![1.0, 0.5], vec![0.6, 0.8], 0.9),
        (vec![0.0, 2.0], vec![0.8, 0.6], 0.1),
        (vec![0.5, 0.5, 0.5], vec![0.48, 0.6, 0.64], 0.8),
        (vec![-0.5, 0.3], vec![0.6, 0.8], 1.2),
    ] {
        let laws: Vec<Beta<f64>> = betas.iter().map(|&b| Beta::new(b + 1.0, b + 1.0).unwrap()).collect();
        let n = 400_000;
        let hits: Vec<f64> = (0..n)
            .map(|_| {
                let dot: f64 = laws.iter().zip(&v).map(|(l, vi)| (2.0 * l.sample(&mut rng) - 1.0) * vi).sum();
                (dot >= s) as u8 as f64
            })
            .collect();
        let (p, se) = mean_and_se(&hits);
        let cap = MetaCap::new(v.clone(), s).unwrap();
        let exact = cap_content_meta(&cap, &betas, &q).unwrap();
        assert!((p - exact).abs() <= 4.0 * se + 1e-6, "beta={betas:?}: mc {p} ± {se}, quadrature {exact}");
    }
}

#[test]
fn reduction_identity_small_run() {
    let q = QuadratureSpec::default();
    for (dims, betas) in [(vec![2, 1], vec![0.0, 0.0]), (vec![1, 1, 1], vec![0.5, 0.5, 0.5]), (vec![3], vec![0.0])] {
        let bs = BlockStructure::new(dims).unwrap();
        let bp = BetaParams::new(betas).unwrap();
        let mut rng = RngStream::new(12, 0);
        let out = verify_reduction(&bs, &bp, 20, 50_000, &mut rng, &q).unwrap();
        assert!(out.within_3se >= 19, "{}", out.report);
    }
}

#[test]
fn full_cap_is_orthogonally_invariant_within_blocks() {
    let q = QuadratureSpec::default();
    let bs = BlockStructure::new(vec![2, 2]).unwrap();
    let bp = BetaParams::new(vec![0.5, 1.0]).unwrap();
    let a = cap_content_full(&bs, &bp, &[0.6, 0.0, 0.0, 0.8], 0.3, &q).unwrap();
    let b = cap_content_full(&bs, &bp, &[0.0, -0.6, 0.48, 0.64], 0.3, &q).unwrap();
    assert!((a - b).abs() < 1e-13);
}

#[test]
fn bounds_suites_pass_on_default_grid() {
    let q = QuadratureSpec::default();
    for (m, betas) in
        [(1, vec![0.0]), (1, vec![-0.5]), (2, vec![0.0, 0.0]), (2, vec![2.0, 0.5]), (3, vec![1.0, 0.0, 0.5])]
    {
        let report = verify_bounds(m, &betas, &BoundsGrid::default(), &q).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn polyspherical_and_planar_formulae() {
    let mut rng = RngStream::new(8, 0);
    for dims in [vec![1, 1], vec![2, 1], vec![2, 2, 1]] {
        let bs = BlockStructure::new(dims).unwrap();
        for f in [TestFn::Constant, TestFn::FirstBlockNormSq, TestFn::ExpFirst] {
            let report = verify_polyspherical(&bs, f, 100_000, &mut rng).unwrap();
            assert!(report.passed(), "{report}");
        }
    }
    assert!(
        verify_polyspherical(&BlockStructure::new(vec![1, 1]).unwrap(), TestFn::DiskIndicator, 10, &mut rng).is_err()
    );
    for f in [TestFn::Constant, TestFn::DiskIndicator, TestFn::GaussianKernel] {
        let report = verify_blaschke_petkantschin_2d(f, 400_000, &mut rng).unwrap();
        assert!(report.passed(), "{report}");
    }
}

#[test]
fn planar_gaussian_kernel_against_closed_form() {
    // (2√π erf 2 - (1 - e⁻⁴))², erf 2 from mpmath
    let erf2 = 0.995_322_265_018_952_7;
    let one_d = 2.0 * std::f64::consts::PI.sqrt() * erf2 - (1.0 - (-4.0f64).exp());
    let exact = one_d * one_d;
    let mut rng = RngStream::new(10, 0);
    let report = verify_blaschke_petkantschin_2d(TestFn::GaussianKernel, 400_000, &mut rng).unwrap();
    let line = &report.lines[0];
    let n = 400_000.0;
    // the square side has standard deviation below 16/√n
    assert!((line.value - exact).abs() < 4.0 * 16.0 / f64::sqrt(n), "{} vs {exact}", line.value);
}
