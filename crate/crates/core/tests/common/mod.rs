//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's resonance solver, matrix elements or quadrature.

#![allow(dead_code)]

use rand::Rng;
use wavekin::resonance::Branch;

/// Horizontal sides `(k1, k2)` strictly inside the box for side `k`, drawn
/// through `k1 + k2 = k cosh(eta)`, `k2 - k1 = k cos(phi)`.
pub fn sample_box<R: Rng>(rng: &mut R, k: f64, eta_max: f64) -> (f64, f64) {
    let eta: f64 = rng.random_range(1e-3..eta_max);
    let phi: f64 = rng.random_range(1e-3..std::f64::consts::PI - 1e-3);
    let sh = (0.5 * eta).sinh().powi(2);
    (k * (sh + (0.5 * phi).sin().powi(2)), k * (sh + (0.5 * phi).cos().powi(2)))
}

fn omega(k: f64, m: f64) -> f64 {
    k / m.abs()
}

/// `(sum leg, first lower leg, second lower leg)` as `(k, m)` pairs for a
/// branch, with `m2` from the vertical delta.
fn legs(branch: Branch, k: f64, k1: f64, k2: f64, m: f64, m1: f64) -> [(f64, f64); 3] {
    match branch {
        // m = m1 + m2
        Branch::Sum => [(k, m), (k1, m1), (k2, m - m1)],
        // m1 = m + m2
        Branch::Diff1 => [(k1, m1), (k, m), (k2, m1 - m)],
        // m2 = m1 + m
        Branch::Diff2 => [(k2, m1 + m), (k1, m1), (k, m)],
    }
}

fn other_m(branch: Branch, m: f64, m1: f64) -> f64 {
    match branch {
        Branch::Sum => m - m1,
        Branch::Diff1 => m1 - m,
        Branch::Diff2 => m1 + m,
    }
}

/// `omega(sum leg) - omega(lower legs)` as a function of `m1`.
fn residual(branch: Branch, k: f64, k1: f64, k2: f64, m: f64, m1: f64) -> f64 {
    let [s, a, b] = legs(branch, k, k1, k2, m, m1);
    omega(s.0, s.1) - omega(a.0, a.1) - omega(b.0, b.1)
}

/// `d residual / d m1`, differentiating each leg's `k / |m(m1)|`.
fn residual_slope(branch: Branch, _k: f64, k1: f64, k2: f64, m: f64, m1: f64) -> f64 {
    let d = |kk: f64, mm: f64, dm: f64| -kk * mm.signum() / (mm * mm) * dm;
    let m2 = other_m(branch, m, m1);
    match branch {
        Branch::Sum => -d(k1, m1, 1.0) - d(k2, m2, -1.0),
        Branch::Diff1 => d(k1, m1, 1.0) - d(k2, m2, 1.0),
        Branch::Diff2 => d(k2, m2, 1.0) - d(k1, m1, 1.0),
    }
}

/// Roots `(m1, m2)` of a branch's resonance found by scanning `m1` on a
/// sinh-stretched grid of `points` nodes for sign changes away from the
/// poles, each refined by bisection to machine precision.
pub fn scan_roots(branch: Branch, k: f64, k1: f64, k2: f64, m: f64, points: usize) -> Vec<(f64, f64)> {
    let scale = 1e-4 * m.abs();
    let reach = (1e6 * m.abs() * (k + k1 + k2) / k.min(k1).min(k2) / scale).asinh();
    let at = |i: usize| scale * (reach * (2.0 * i as f64 / points as f64 - 1.0)).sinh();
    let f = |m1: f64| residual(branch, k, k1, k2, m, m1);
    let pole_between = |a: f64, b: f64| {
        a.signum() != b.signum() || other_m(branch, m, a).signum() != other_m(branch, m, b).signum()
    };
    let mut roots = Vec::new();
    let (mut a, mut fa) = (at(0), f(at(0)));
    for i in 1..=points {
        let b = at(i);
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 && !pole_between(a, b) {
            let (mut lo, mut hi, flo) = (a, b, fa);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if f(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots.into_iter().map(|r| (r, other_m(branch, m, r))).collect()
}

/// Same closed-form triangle, but from the squared-sum expression rather
/// than Heron's factored form.
fn delta(k: f64, k1: f64, k2: f64) -> f64 {
    let (a, b, c) = (k * k, k1 * k1, k2 * k2);
    0.5 * (2.0 * (a * b + a * c + b * c) - a * a - b * b - c * c).sqrt()
}

/// One interaction term: `-(N / 4 sqrt(2 g)) cos(b, c) sqrt(w_b w_c / w_a) k_a`
/// with `N = g = 1`.
fn u(ka: f64, wa: f64, wb: f64, wc: f64, cos_bc: f64) -> f64 {
    -cos_bc * (wb * wc / wa).sqrt() * ka / (4.0 * 2f64.sqrt())
}

/// Interaction coefficient of the triangle with sum side `s = a + b`.
fn v(s: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (ws, wa, wb) = (omega(s.0, s.1), omega(a.0, a.1), omega(b.0, b.1));
    let (ks, ka, kb) = (s.0, a.0, b.0);
    let cos_ab = (ks * ks - ka * ka - kb * kb) / (2.0 * ka * kb);
    let cos_sa = (ks * ks + ka * ka - kb * kb) / (2.0 * ks * ka);
    let cos_sb = (ks * ks + kb * kb - ka * ka) / (2.0 * ks * kb);
    u(ks, ws, wa, wb, cos_ab) + u(ka, wa, ws, wb, cos_sb) + u(kb, wb, ws, wa, cos_sa)
}

/// Straight-line pointwise integrand at `(k1, k2)` for `p = (k, m)`:
/// `sum over branches and roots of sign f |V|^2 k k1 k2 J / (k Delta)`.
pub fn golden_integrand(x: f64, y: f64, k: f64, m: f64, k1: f64, k2: f64) -> f64 {
    let n = |kk: f64, mm: f64| kk.powf(-x) * mm.abs().powf(-y);
    let mut total = 0.0;
    for (branch, sign) in [(Branch::Sum, 1.0), (Branch::Diff1, -1.0), (Branch::Diff2, -1.0)] {
        for (m1, _) in scan_roots(branch, k, k1, k2, m, 100_000) {
            let [s, a, b] = legs(branch, k, k1, k2, m, m1);
            let f = n(a.0, a.1) * n(b.0, b.1) - n(s.0, s.1) * (n(a.0, a.1) + n(b.0, b.1));
            let jac = 1.0 / residual_slope(branch, k, k1, k2, m, m1).abs();
            let vv = v(s, a, b);
            total += sign * f * vv * vv * k * k1 * k2 * jac / (k * delta(k, k1, k2));
        }
    }
    total
}

/// Five-point Gauss-Legendre rule on `[-1, 1]`.
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Panel edges on `[0, end]`: geometric from `first` up to `knee`, then
/// uniform panels no wider than `width`; every panel split `refine` times.
fn graded_edges(first: f64, ratio: f64, knee: f64, width: f64, end: f64, refine: usize) -> Vec<f64> {
    let mut edges = vec![0.0, first];
    while *edges.last().unwrap() * ratio < knee {
        let next = edges.last().unwrap() * ratio;
        edges.push(next);
    }
    let start = *edges.last().unwrap();
    let n = ((end - start) / width).ceil().max(1.0) as usize;
    edges.extend((1..=n).map(|i| start + (end - start) * i as f64 / n as f64));
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        out.extend((1..=refine).map(|j| w[0] + (w[1] - w[0]) * j as f64 / refine as f64));
    }
    out
}

fn nodes(edges: &[f64]) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .flat_map(|w| {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            GL5.iter().map(move |&(t, wt)| (c + h * t, h * wt))
        })
        .collect()
}

/// Tensor-product integral of `integrand * cutoff` over the whole box in
/// `(eta, phi)` with `k1 = k (cosh eta - cos phi) / 2`,
/// `k2 = k (cosh eta + cos phi) / 2`, where `dk1 dk2 / Delta = d eta d phi`.
///
/// `reduced(k1, k2)` must return `Delta * integrand`. The cutoff is
/// `exp(-(ln(max side / min side) / ln cutoff)^8)`. Panels are graded
/// towards both infrared corners; `refine` subdivides every panel.
pub fn naive_integral<F: Fn(f64, f64) -> f64>(k: f64, cutoff: f64, refine: usize, reduced: F) -> f64 {
    let ln_cut = cutoff.ln();
    // far enough out that the cutoff weight is below e^-70
    let eta_max = (2.0 * cutoff.powf(1.7)).acosh();
    let eta = nodes(&graded_edges(1e-7, 1.3, 0.5, 0.1, eta_max, refine));
    let half = nodes(&graded_edges(1e-7, 1.3, 0.5, 0.1, 0.5 * std::f64::consts::PI, refine));
    let phi: Vec<(f64, f64)> = half
        .iter()
        .copied()
        .chain(half.iter().map(|&(p, w)| (std::f64::consts::PI - p, w)))
        .collect();
    let mut total = 0.0;
    for &(e, we) in &eta {
        let sh = (0.5 * e).sinh().powi(2);
        let mut row = 0.0;
        for &(p, wp) in &phi {
            // half-angle forms keep the corners free of cancellation
            let (k1, k2) = (k * (sh + (0.5 * p).sin().powi(2)), k * (sh + (0.5 * p).cos().powi(2)));
            let hi = k.max(k1).max(k2);
            let lo = k.min(k1).min(k2);
            let weight = (-((hi / lo).ln() / ln_cut).powi(8)).exp();
            if weight < 1e-30 {
                continue;
            }
            row += wp * weight * reduced(k1, k2);
        }
        total += we * row;
    }
    total
}
