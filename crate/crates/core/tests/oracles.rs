mod common;

use common::{golden_integrand, naive_integral, sample_box, scan_roots};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavekin::collision::{evaluate, integrand, level_estimate, QuadratureConfig};
use wavekin::kernel::reduced_integrand;
use wavekin::quadrature::{BoxLayout, ScaleCutoff};
use wavekin::resonance::{solve_vertical, Branch};
use wavekin::spectral::{PhysicalConstants, SpectralExponents, Wavenumber};

/// Integrand at `(x, y) = (4, 0)`, `p = (1, 1)`, `(k1, k2) = (0.7, 0.9)` from
/// the straight-line oracle, frozen once.
const GOLDEN_GM_SPOT: f64 = 1.513_057_202_314_204e-1;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn golden_spot_value() {
    let oracle = golden_integrand(4.0, 0.0, 1.0, 1.0, 0.7, 0.9);
    let lib = integrand(&SpectralExponents::new(4.0, 0.0), Wavenumber::new(1.0, 1.0).unwrap(), 0.7, 0.9).unwrap();
    println!("oracle {oracle:.17e} library {lib:.17e}");
    assert!(rel(oracle, GOLDEN_GM_SPOT) < 1e-12, "oracle drifted from frozen value: {oracle:e}");
    assert!(rel(lib, GOLDEN_GM_SPOT) < 1e-12, "library {lib:e} vs frozen {GOLDEN_GM_SPOT:e}");
}

#[test]
fn integrand_matches_straight_line_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let x = rng.random_range(1.0..5.0);
        let y = rng.random_range(-1.5..2.5);
        let k = rng.random_range(0.2..5.0);
        let m = rng.random_range(0.2..5.0);
        let (k1, k2) = sample_box(&mut rng, k, 4.0);
        let s = SpectralExponents::new(x, y);
        let oracle = golden_integrand(x, y, k, m, k1, k2);
        let lib = integrand(&s, Wavenumber::new(k, m).unwrap(), k1, k2).unwrap();
        let scale = reduced_integrand(&s, &PhysicalConstants::default(), k, m, k1, k2).largest_term;
        let delta = wavekin::resonance::delta_jacobian(k, k1, k2).unwrap();
        // cancellation between terms limits relative agreement to the largest term
        assert!(
            (oracle - lib).abs() <= 1e-9 * scale / delta,
            "(x, y) = ({x}, {y}), p = ({k}, {m}), ({k1}, {k2}): oracle {oracle:e}, library {lib:e}"
        );
    }
}

#[test]
fn resonance_roots_match_scan_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let k = rng.random_range(0.1..10.0);
        let m = rng.random_range(0.1..10.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let (k1, k2) = sample_box(&mut rng, k, 5.0);
        for branch in Branch::ALL {
            let lib = solve_vertical(branch, k, k1, k2, m).unwrap();
            let oracle = scan_roots(branch, k, k1, k2, m, 100_000);
            assert_eq!(lib.len(), oracle.len(), "case {case} {branch:?}: {lib:?} vs {oracle:?}");
            for (r, (m1, m2)) in lib.iter().zip(&oracle) {
                let scale = r.m1.abs().max(m.abs());
                assert!((r.m1 - m1).abs() <= 1e-6 * scale, "case {case} {branch:?}: m1 {} vs {m1}", r.m1);
                assert!((r.m2 - m2).abs() <= 1e-6 * scale, "case {case} {branch:?}: m2 {} vs {m2}", r.m2);
            }
        }
    }
}

#[test]
fn symmetric_sum_roots_pair_up() {
    let roots = solve_vertical(Branch::Sum, 2.0, 1.2, 1.2, 1.0).unwrap();
    let oracle = scan_roots(Branch::Sum, 2.0, 1.2, 1.2, 1.0, 100_000);
    assert_eq!(roots.len(), oracle.len());
    for r in &roots {
        assert!(roots.iter().any(|q| (q.m1 - r.m2).abs() < 1e-9 && (q.m2 - r.m1).abs() < 1e-9));
    }
}

fn layout_sum(s: &SpectralExponents, layout: &BoxLayout) -> f64 {
    let c = PhysicalConstants::default();
    let mut nodes = Vec::new();
    let mut total = 0.0;
    for i in 0..layout.rays() {
        nodes.clear();
        layout.ray_nodes(i, &mut nodes);
        total += nodes.iter().map(|n| n.weight * reduced_integrand(s, &c, 1.0, 1.0, n.k1, n.k2).value).sum::<f64>();
    }
    total
}

fn naive_with_error(s: &SpectralExponents, cutoff: f64) -> (f64, f64) {
    let c = PhysicalConstants::default();
    let f = |k1: f64, k2: f64| reduced_integrand(s, &c, 1.0, 1.0, k1, k2).value;
    let coarse = naive_integral(1.0, cutoff, 1, f);
    let fine = naive_integral(1.0, cutoff, 2, f);
    (fine, (fine - coarse).abs())
}

#[test]
fn fixed_level_quadrature_matches_naive_integrator() {
    let cfg = QuadratureConfig::default();
    let p = Wavenumber::new(1.0, 1.0).unwrap();
    for (x, y) in [(3.5, 0.5), (3.0, 1.0)] {
        let s = SpectralExponents::new(x, y);
        let (naive, naive_err) = naive_with_error(&s, cfg.cutoff_at(0));
        // default level 0 resolves the cutoff integral to within rel_tol of the reference scale
        let lvl = level_estimate(&s, p, &cfg, 0).unwrap();
        let diff = (lvl.value - naive).abs();
        println!("({x}, {y}): level 0 {:e}, naive {naive:e} +- {naive_err:e}, |diff| / scale {:.2e}", lvl.value, diff / lvl.reference_scale);
        assert!(diff <= 3.0 * naive_err + cfg.rel_tol * lvl.reference_scale);
        // a finer layout of the same cutoff closes the gap
        let fine = layout_sum(&s, &BoxLayout::new(ScaleCutoff::new(cfg.cutoff_at(0)), 256, 512));
        let diff = (fine - naive).abs();
        println!("({x}, {y}): 256 x 512 layout {fine:e}, |diff| / scale {:.2e}", diff / lvl.reference_scale);
        assert!(diff <= 3.0 * naive_err + 1e-6 * lvl.reference_scale);
    }
}

#[test]
fn exact_solution_cancels_under_the_scale_cutoff() {
    // the cutoff depends only on side ratios, so the cancellation is exact at any cutoff
    let s = SpectralExponents::new(3.5, 0.5);
    let (naive, err) = naive_with_error(&s, 1e4);
    let scale = {
        let c = PhysicalConstants::default();
        naive_integral(1.0, 1e4, 1, |k1, k2| reduced_integrand(&s, &c, 1.0, 1.0, k1, k2).value.abs())
    };
    assert!(naive.abs() <= 1e-9 * scale, "{naive:e} +- {err:e} of {scale:e}");
}

#[test]
fn evaluate_is_deterministic_across_execution_modes() {
    use wavekin::par::Execution;
    let s = SpectralExponents::new(3.8, 0.3);
    let p = Wavenumber::new(1.0, 1.0).unwrap();
    let par = evaluate(&s, p, &QuadratureConfig { execution: Execution::Parallel, ..Default::default() }).unwrap();
    let seq = evaluate(&s, p, &QuadratureConfig { execution: Execution::Sequential, ..Default::default() }).unwrap();
    assert_eq!(par, seq);
    assert_eq!(par, evaluate(&s, p, &QuadratureConfig::default()).unwrap());
}
