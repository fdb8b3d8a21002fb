//! Pointwise integrand of the angle-averaged kinetic equation.

use crate::resonance::{self, Branch, VerticalRoot};
use crate::spectral::{action_unchecked, f_term, u_term, PhysicalConstants, SpectralExponents};

/// Roots with `1/|dF/dm1|` above this are tangential crossings and dropped.
pub const TANGENCY_LIMIT: f64 = 1e12;

/// Integrand contribution at one `(k1, k2)` with the `1/Delta` factor removed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointValue {
    /// Signed sum of all branch contributions.
    pub value: f64,
    /// Largest single additive term in absolute value, with the kinetic factor
    /// expanded into its three products of occupation numbers.
    pub largest_term: f64,
    /// Number of resonant roots that contributed.
    pub roots: u32,
    /// Number of tangential roots dropped.
    pub tangential: u32,
}

/// `V^s_{ab}` for the triangle whose sum side is `s`; frequencies precomputed.
#[inline]
fn v_element(ks: f64, ka: f64, kb: f64, ws: f64, wa: f64, wb: f64, coupling: f64) -> f64 {
    let (cab, csa, csb) = resonance::sum_cosines(ks, ka, kb);
    u_term(ws, wa, wb, ks, cab, coupling)
        + (u_term(wa, ws, wb, ka, csb, coupling) + u_term(wb, ws, wa, kb, csa, coupling))
}

/// `Delta * integrand` at `(k1, k2)` for `p = (k, m)`, `m > 0`, inside the box.
pub fn reduced_integrand(
    s: &SpectralExponents,
    c: &PhysicalConstants,
    k: f64,
    m: f64,
    k1: f64,
    k2: f64,
) -> PointValue {
    let mut roots: Vec<VerticalRoot> = Vec::with_capacity(4);
    let mut out = PointValue::default();
    let coupling = c.coupling();
    let n = action_unchecked(k, m, s);
    let w = c.buoyancy * k / m;
    for branch in Branch::ALL {
        roots.clear();
        resonance::solve_into(branch, k, k1, k2, m, &mut roots);
        for r in &roots {
            // the root slope was computed with unit N; frequencies scale with N
            let jac = 1.0 / (c.buoyancy * r.slope);
            if !(jac <= TANGENCY_LIMIT) {
                out.tangential += 1;
                continue;
            }
            let n1 = action_unchecked(k1, r.m1, s);
            let n2 = action_unchecked(k2, r.m2, s);
            let w1 = c.buoyancy * k1 / r.m1.abs();
            let w2 = c.buoyancy * k2 / r.m2.abs();
            // (sum leg, lower legs) of the kinetic factor
            let (ns, na, nb, v) = match branch {
                Branch::Sum => (n, n1, n2, v_element(k, k1, k2, w, w1, w2, coupling)),
                Branch::Diff1 => (n1, n, n2, v_element(k1, k, k2, w1, w, w2, coupling)),
                Branch::Diff2 => (n2, n1, n, v_element(k2, k1, k, w2, w1, w, coupling)),
            };
            let weight = v * v * k1 * k2 * jac;
            out.value += branch.sign() * f_term(ns, na, nb) * weight;
            let piece = (na * nb).abs().max((ns * na).abs()).max((ns * nb).abs());
            out.largest_term = out.largest_term.max(piece * weight);
            out.roots += 1;
        }
    }
    out
}
