//! Kinematic box, horizontal triangle geometry and the vertical resonance
//! conditions for the three collision terms.
//!
//! The frequency delta is resolved against `m1`: on each sign case of
//! `(m1, m2)` the condition `omega_s = omega_a + omega_b` is a quadratic in
//! `m1`, whose roots are validated against the case and polished.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Wavenumber;

/// Relative frequency residual a validated root must satisfy.
pub const RESONANCE_TOLERANCE: f64 = 1e-10;

/// Discriminants below this fraction of `B^2` are treated as double roots.
const DOUBLE_ROOT_TOLERANCE: f64 = 1e-12;

/// Which collision term a triad belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// `p = p1 + p2`, the `R^p_{p1 p2}` term.
    Sum,
    /// `p1 = p + p2`, the `R^{p1}_{p p2}` term.
    Diff1,
    /// `p2 = p1 + p`, the `R^{p2}_{p1 p}` term.
    Diff2,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::Sum, Branch::Diff1, Branch::Diff2];

    /// Sign of the term in the kinetic equation.
    pub fn sign(self) -> f64 {
        match self {
            Branch::Sum => 1.0,
            Branch::Diff1 | Branch::Diff2 => -1.0,
        }
    }

    /// Linear relation `m2 = offset + slope * m1` imposed by the vertical delta
    /// (for `m > 0`), as `(offset, slope)`.
    fn vertical_map(self, m: f64) -> (f64, f64) {
        match self {
            Branch::Sum => (m, -1.0),
            Branch::Diff1 => (-m, 1.0),
            Branch::Diff2 => (m, 1.0),
        }
    }

    /// Signs `(c0 sign, e1, e2)` of the residual
    /// `F(m1) = c0 + e1 k1/|m1| + e2 k2/|m2|` with `|c0| = k/m`.
    fn residual_signs(self) -> (f64, f64, f64) {
        match self {
            Branch::Sum => (1.0, -1.0, -1.0),
            Branch::Diff1 => (-1.0, 1.0, -1.0),
            Branch::Diff2 => (-1.0, -1.0, 1.0),
        }
    }
}

/// True iff `(k, k1, k2)` form a non-degenerate triangle.
pub fn in_kinematic_box(k: f64, k1: f64, k2: f64) -> bool {
    k > 0.0 && k1 > 0.0 && k2 > 0.0 && k < k1 + k2 && k1 < k + k2 && k2 < k + k1
}

/// `Delta = sqrt(2[(k k1)^2 + (k k2)^2 + (k1 k2)^2] - k^4 - k1^4 - k2^4) / 2`,
/// i.e. twice the triangle area, evaluated in Heron's factored form.
pub fn delta_jacobian(k: f64, k1: f64, k2: f64) -> Result<f64> {
    if !in_kinematic_box(k, k1, k2) {
        return Err(Error::OutsideKinematicBox { k, k1, k2 });
    }
    let d = heron_delta(k, k1, k2);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::OutsideKinematicBox { k, k1, k2 })
    }
}

#[inline]
pub(crate) fn heron_delta(k: f64, k1: f64, k2: f64) -> f64 {
    let r = (k + k1 + k2) * (k1 + k2 - k) * (k + k2 - k1) * (k + k1 - k2);
    0.5 * r.max(0.0).sqrt()
}

/// Side lengths and pairwise cosines of the closed triangle `k = k1 + k2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleGeometry {
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    /// between `k` and `k1`
    pub cos01: f64,
    /// between `k` and `k2`
    pub cos02: f64,
    /// between `k1` and `k2`
    pub cos12: f64,
}

impl TriangleGeometry {
    pub fn cosines(&self) -> crate::spectral::TriadCosines {
        crate::spectral::TriadCosines { k1_k2: self.cos12, k_k1: self.cos01, k_k2: self.cos02 }
    }
}

/// Law of cosines for the vector triangle `k = k1 + k2`.
pub fn triangle_cosines(k: f64, k1: f64, k2: f64) -> Result<TriangleGeometry> {
    if !(k > 0.0 && k1 > 0.0 && k2 > 0.0) {
        return Err(Error::DegenerateTriangle { k, k1, k2 });
    }
    if !in_kinematic_box(k, k1, k2) {
        return Err(Error::OutsideKinematicBox { k, k1, k2 });
    }
    let (cos12, cos01, cos02) = sum_cosines(k, k1, k2);
    Ok(TriangleGeometry { k, k1, k2, cos01, cos02, cos12 })
}

/// Cosine of the angle between sides `x` and `y` opposite side `z`.
///
/// Written as `((x - z)(x + z) + y^2) / 2xy` with `x >= y`; since
/// `|x - z| <= y` no term exceeds `O(xy)`, so thin triangles keep full
/// relative accuracy.
#[inline]
fn included_cosine(x: f64, y: f64, z: f64) -> f64 {
    let (x, y) = if x >= y { (x, y) } else { (y, x) };
    (((x - z) * (x + z) + y * y) / (2.0 * x * y)).clamp(-1.0, 1.0)
}

/// `(cos(a, b), cos(s, a), cos(s, b))` for vectors with `s = a + b`.
#[inline]
pub(crate) fn sum_cosines(s: f64, a: f64, b: f64) -> (f64, f64, f64) {
    (-included_cosine(a, b, s), included_cosine(s, a, b), included_cosine(s, b, a))
}

/// One validated solution of the vertical resonance conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalRoot {
    pub m1: f64,
    pub m2: f64,
    /// `|dF/dm1|` of the frequency residual at the root.
    pub slope: f64,
}

/// A complete resonant triad with its branch and horizontal geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonantTriad {
    pub p: Wavenumber,
    pub p1: Wavenumber,
    pub p2: Wavenumber,
    pub branch: Branch,
    pub geometry: TriangleGeometry,
}

impl ResonantTriad {
    /// Relative residuals `(vertical, frequency)` of the branch conditions,
    /// each scaled by the largest magnitude involved.
    pub fn residuals(&self) -> (f64, f64) {
        let w = |q: Wavenumber| q.k / q.m.abs();
        let (s, a, b) = match self.branch {
            Branch::Sum => (self.p, self.p1, self.p2),
            Branch::Diff1 => (self.p1, self.p, self.p2),
            Branch::Diff2 => (self.p2, self.p1, self.p),
        };
        let mscale = s.m.abs().max(a.m.abs()).max(b.m.abs());
        let wscale = w(s).max(w(a)).max(w(b));
        ((s.m - a.m - b.m).abs() / mscale, (w(s) - w(a) - w(b)).abs() / wscale)
    }
}

#[derive(Clone, Copy)]
struct Residual {
    c0: f64,
    e1: f64,
    e2: f64,
    k1: f64,
    k2: f64,
    offset: f64,
    slope: f64,
}

impl Residual {
    fn new(branch: Branch, k: f64, k1: f64, k2: f64, m: f64) -> Self {
        let (s0, e1, e2) = branch.residual_signs();
        let (offset, slope) = branch.vertical_map(m);
        Self { c0: s0 * k / m, e1, e2, k1, k2, offset, slope }
    }

    #[inline]
    fn m2(&self, m1: f64) -> f64 {
        self.offset + self.slope * m1
    }

    #[inline]
    fn value(&self, m1: f64) -> f64 {
        self.c0 + self.e1 * self.k1 / m1.abs() + self.e2 * self.k2 / self.m2(m1).abs()
    }

    #[inline]
    fn derivative(&self, m1: f64) -> f64 {
        let m2 = self.m2(m1);
        -self.e1 * self.k1 * m1.signum() / (m1 * m1)
            - self.e2 * self.k2 * m2.signum() * self.slope / (m2 * m2)
    }

    /// Largest frequency magnitude among the three terms, used to scale residuals.
    fn scale(&self, m1: f64) -> f64 {
        self.c0.abs().max(self.k1 / m1.abs()).max(self.k2 / self.m2(m1).abs())
    }
}

/// Frequency residual `F(m1)` of a branch, exposed for oracles and diagnostics.
pub fn frequency_residual(branch: Branch, k: f64, k1: f64, k2: f64, m: f64, m1: f64) -> f64 {
    let (m, m1) = if m < 0.0 { (-m, -m1) } else { (m, m1) };
    Residual::new(branch, k, k1, k2, m).value(m1)
}

/// The vertical wavenumber `m2` paired with `m1` on a branch.
pub fn paired_m2(branch: Branch, m: f64, m1: f64) -> f64 {
    let (offset, slope) = branch.vertical_map(m.abs());
    m.signum() * (offset + slope * m1 * m.signum())
}

/// All validated `(m1, m2)` solving the branch's resonance at `(k, k1, k2, m)`.
///
/// Roots are sorted by `m1`. Negative `m` is handled by mirror symmetry.
pub fn solve_vertical(branch: Branch, k: f64, k1: f64, k2: f64, m: f64) -> Result<Vec<VerticalRoot>> {
    if m == 0.0 || !m.is_finite() {
        return Err(Error::InvalidWavenumber { k, m });
    }
    if !in_kinematic_box(k, k1, k2) {
        return Err(Error::OutsideKinematicBox { k, k1, k2 });
    }
    let mut roots = Vec::with_capacity(4);
    solve_into(branch, k, k1, k2, m.abs(), &mut roots);
    if m < 0.0 {
        for r in roots.iter_mut() {
            r.m1 = -r.m1;
            r.m2 = -r.m2;
        }
        roots.reverse();
    }
    Ok(roots)
}

/// Root solver for `m > 0` and an in-box triple; appends to `out`.
pub(crate) fn solve_into(branch: Branch, k: f64, k1: f64, k2: f64, m: f64, out: &mut Vec<VerticalRoot>) {
    let f = Residual::new(branch, k, k1, k2, m);
    let start = out.len();
    for s1 in [-1.0f64, 1.0] {
        for s2 in [-1.0f64, 1.0] {
            // F * s1 m1 * s2 m2 = A m1^2 + B m1 + C on this sign case
            let a = f.c0 * s1 * s2 * f.slope;
            let b = f.c0 * s1 * s2 * f.offset + f.e1 * f.k1 * s2 * f.slope + f.e2 * f.k2 * s1;
            let c = f.e1 * f.k1 * s2 * f.offset;
            let disc = b * b - 4.0 * a * c;
            if disc < -DOUBLE_ROOT_TOLERANCE * b * b {
                continue;
            }
            let mut cands = [f64::NAN; 2];
            if disc <= DOUBLE_ROOT_TOLERANCE * b * b {
                cands[0] = -b / (2.0 * a);
            } else {
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                cands[0] = q / a;
                cands[1] = c / q;
            }
            for &r in cands.iter().filter(|r| r.is_finite()) {
                if !in_case(&f, r, s1, s2) {
                    continue;
                }
                let r = polish(&f, r, s1, s2);
                let m2 = f.m2(r);
                if f.value(r).abs() > RESONANCE_TOLERANCE * f.scale(r) {
                    continue;
                }
                let slope = f.derivative(r).abs();
                let dup = out[start..].iter().any(|q: &VerticalRoot| (q.m1 - r).abs() <= 1e-9 * r.abs().max(m));
                if !dup {
                    out.push(VerticalRoot { m1: r, m2, slope });
                }
            }
        }
    }
    out[start..].sort_by(|a, b| a.m1.total_cmp(&b.m1));
}

#[inline]
fn in_case(f: &Residual, m1: f64, s1: f64, s2: f64) -> bool {
    let m2 = f.m2(m1);
    m1 != 0.0 && m2 != 0.0 && m1.signum() == s1 && m2.signum() == s2
}

/// A couple of Newton steps on the residual, kept inside the sign case.
fn polish(f: &Residual, mut r: f64, s1: f64, s2: f64) -> f64 {
    for _ in 0..3 {
        let d = f.derivative(r);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = r - f.value(r) / d;
        if !next.is_finite() || !in_case(f, next, s1, s2) {
            break;
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r.abs() {
            r = next;
            break;
        }
        r = next;
    }
    r
}

/// Every resonant triad through `p` with horizontal sides `(k1, k2)`.
pub fn resonant_triads(p: Wavenumber, k1: f64, k2: f64) -> Result<Vec<ResonantTriad>> {
    let geometry = triangle_cosines(p.k, k1, k2)?;
    let mut triads = Vec::new();
    for branch in Branch::ALL {
        for r in solve_vertical(branch, p.k, k1, k2, p.m)? {
            triads.push(ResonantTriad {
                p,
                p1: Wavenumber { k: k1, m: r.m1 },
                p2: Wavenumber { k: k2, m: r.m2 },
                branch,
                geometry,
            });
        }
    }
    Ok(triads)
}
