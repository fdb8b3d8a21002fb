//! Gauss-Legendre rules and the node layout over the kinematic box.
//!
//! The box `|k1 - k2| < k < k1 + k2` is parametrised by
//! `k1 + k2 = k cosh(eta)` and `k1 - k2 = k sin(theta)`, which turns the
//! measure `dk1 dk2 / Delta` into `d(eta) d(theta)` and removes the edge
//! singularity. The remaining small-wavenumber corner `(eta, theta) = (0, -pi/2)`
//! is resolved with log-polar coordinates centred on it. Only `theta <= 0` is
//! laid out; the integrand is symmetric under `k1 <-> k2`.
//!
//! The box is unbounded, and for most spectra the integral is not absolutely
//! convergent at either extreme of scale separation. Nodes therefore carry a
//! smooth weight `exp(-a^8)`, `a = ln(largest/smallest side) / ln(cutoff)`.
//! The triangle aspect ratio is invariant under rescaling and under the
//! relabelings that exchange small- and large-wavenumber interactions, so the
//! weight does not favour either end.

use std::f64::consts::{FRAC_PI_2, PI};

/// Points per panel of the composite rules.
pub const PANEL_ORDER: usize = 16;

/// Exponent of the smooth scale-separation weight.
const CUTOFF_POWER: i32 = 8;

/// Weight is negligible (`< 1e-18`) beyond this multiple of `ln(cutoff)`.
const CUTOFF_REACH: f64 = 1.6;

/// Nodes whose cutoff weight falls below this are skipped.
const NEGLIGIBLE_WEIGHT: f64 = 1e-20;

/// Extra e-folds of log-radius below the cutoff reach.
const RADIAL_MARGIN: f64 = 6.0;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, nodes ascending. Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Composite rule on `[a, b]` with `panels` equal panels, as `(node, weight)`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let h = (b - a) / panels as f64;
        let mut out = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let left = a + h * p as f64;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((left + 0.5 * h * (x + 1.0), 0.5 * h * w));
            }
        }
        out
    }
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, 0.0);
    for j in 0..n {
        let p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
    }
    let d = n as f64 * (z * p0 - p1) / (z * z - 1.0);
    (p0, d)
}

/// Smooth, rescaling-invariant weight on triangle scale separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleCutoff {
    ratio: f64,
    ln_ratio: f64,
}

impl ScaleCutoff {
    /// `ratio` is the side ratio at which the weight has dropped to `1/e`.
    pub fn new(ratio: f64) -> Self {
        assert!(ratio > 1.0, "scale cutoff ratio must exceed 1");
        Self { ratio, ln_ratio: ratio.ln() }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn weight(&self, k: f64, k1: f64, k2: f64) -> f64 {
        let hi = k.max(k1).max(k2);
        let lo = k.min(k1).min(k2);
        let a = (hi / lo).ln() / self.ln_ratio;
        (-a.powi(CUTOFF_POWER)).exp()
    }
}

/// One quadrature node in units of `k`; `weight` includes the measure, the
/// cutoff weight and the factor 2 for the mirrored half of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxNode {
    pub k1: f64,
    pub k2: f64,
    pub weight: f64,
}

/// Tensor layout of nodes over half the kinematic box for one cutoff.
#[derive(Debug, Clone)]
pub struct BoxLayout {
    cutoff: ScaleCutoff,
    angles: Vec<(f64, f64)>,
    radial: Vec<(f64, f64)>,
    eta_max: f64,
}

impl BoxLayout {
    /// `angular` and `radial` node counts are rounded up to whole panels.
    pub fn new(cutoff: ScaleCutoff, angular: usize, radial: usize) -> Self {
        let rule = GaussLegendre::new(PANEL_ORDER);
        let reach = CUTOFF_REACH * cutoff.ln_ratio;
        let eta_max = (2.0 * reach.exp()).acosh();
        let t_min = -cutoff.ln_ratio - RADIAL_MARGIN;
        Self {
            cutoff,
            angles: rule.composite(0.0, FRAC_PI_2, angular.div_ceil(PANEL_ORDER).max(1)),
            radial: rule.composite(t_min, 0.0, radial.div_ceil(PANEL_ORDER).max(1)),
            eta_max,
        }
    }

    pub fn cutoff(&self) -> ScaleCutoff {
        self.cutoff
    }

    /// Number of rays (angular nodes).
    pub fn rays(&self) -> usize {
        self.angles.len()
    }

    /// Nodes per ray before cutoff pruning.
    pub fn nodes_per_ray(&self) -> usize {
        self.radial.len()
    }

    /// Appends the non-negligible nodes of ray `i` to `out`.
    pub fn ray_nodes(&self, i: usize, out: &mut Vec<BoxNode>) {
        let (psi, w_psi) = self.angles[i];
        let (c, s) = (psi.cos(), psi.sin());
        let r_max = (self.eta_max / c).min(FRAC_PI_2 / s);
        for &(t, w_t) in &self.radial {
            let r = r_max * t.exp();
            let (eta, phi) = (r * c, r * s);
            // k1 = (cosh eta - cos phi)/2 without cancellation near the corner
            let sh = (0.5 * eta).sinh();
            let sp = (0.5 * phi).sin();
            let k1 = sh * sh + sp * sp;
            let k2 = (0.5 * (eta.cosh() + phi.cos())).max(0.0);
            if !(k1 > 0.0 && k2 > 0.0) {
                continue;
            }
            let cut = self.cutoff.weight(1.0, k1, k2);
            if cut < NEGLIGIBLE_WEIGHT {
                continue;
            }
            out.push(BoxNode { k1, k2, weight: 2.0 * w_psi * w_t * r * r * cut });
        }
    }
}
