//! The collision integral `I(x, y)`: the right-hand side of the kinetic
//! equation evaluated on a power-law spectrum at one wavenumber.
//!
//! Each refinement level integrates over the kinematic box with a fixed
//! scale-separation cutoff (see [`crate::quadrature`]). Successive levels
//! widen the cutoff by `cutoff_growth` and double the radial node count, so a
//! level sequence tells converging integrals apart from growing ones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::reduced_integrand;
use crate::par::{self, Execution};
use crate::quadrature::{BoxLayout, BoxNode, ScaleCutoff, PANEL_ORDER};
use crate::resonance::{delta_jacobian, in_kinematic_box};
use crate::spectral::{PhysicalConstants, SpectralExponents, Wavenumber};

/// Settings of the level sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Angular nodes at every level; radial nodes are twice this at level 0.
    pub base_resolution: usize,
    /// Number of levels tried before giving up.
    pub max_levels: usize,
    /// Convergence threshold on the level-to-level change, relative to the
    /// integral of `|integrand|`.
    pub rel_tol: f64,
    /// Scale-separation cutoff (largest over smallest triangle side) at level 0.
    pub domain_scale: f64,
    /// Level-to-level growth of `|I|` beyond which the integral is flagged
    /// divergent.
    pub divergence_growth: f64,
    /// Factor by which the cutoff widens per level.
    pub cutoff_growth: f64,
    pub execution: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            base_resolution: 64,
            max_levels: 3,
            rel_tol: 1e-3,
            domain_scale: 1e5,
            divergence_growth: 2.0,
            cutoff_growth: 10f64.sqrt(),
            execution: Execution::Parallel,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.base_resolution == 0 {
            return bad("base_resolution must be positive".into());
        }
        if self.max_levels < 2 {
            return bad(format!("max_levels must be at least 2, got {}", self.max_levels));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.domain_scale > 1.0 && self.domain_scale.is_finite()) {
            return bad(format!("domain_scale must exceed 1, got {}", self.domain_scale));
        }
        if !(self.divergence_growth > 1.0 && self.divergence_growth.is_finite()) {
            return bad(format!("divergence_growth must exceed 1, got {}", self.divergence_growth));
        }
        if !(self.cutoff_growth > 1.0 && self.cutoff_growth.is_finite()) {
            return bad(format!("cutoff_growth must exceed 1, got {}", self.cutoff_growth));
        }
        let last = self.domain_scale.ln() + (self.max_levels - 1) as f64 * self.cutoff_growth.ln();
        if last > 100.0 {
            return bad("cutoff at the last level exceeds floating-point range".into());
        }
        Ok(())
    }

    /// Scale-separation cutoff used at `level`.
    pub fn cutoff_at(&self, level: usize) -> f64 {
        self.domain_scale * self.cutoff_growth.powi(level as i32)
    }

    /// Node layout of `level`.
    pub fn layout_at(&self, level: usize) -> BoxLayout {
        let angular = self.base_resolution.div_ceil(PANEL_ORDER) * PANEL_ORDER;
        BoxLayout::new(ScaleCutoff::new(self.cutoff_at(level)), angular, (2 * angular) << level)
    }
}

/// Outcome class of a level sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IntegralStatus {
    Converged,
    MaxLevels,
    Divergent,
}

impl IntegralStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            IntegralStatus::Converged => "CONVERGED",
            IntegralStatus::MaxLevels => "MAX_LEVELS",
            IntegralStatus::Divergent => "DIVERGENT",
        }
    }
}

impl std::fmt::Display for IntegralStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IntegralStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CONVERGED" => Ok(IntegralStatus::Converged),
            "MAX_LEVELS" => Ok(IntegralStatus::MaxLevels),
            "DIVERGENT" => Ok(IntegralStatus::Divergent),
            other => Err(Error::InvalidArgument(format!("unknown status {other:?}"))),
        }
    }
}

/// Result of [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    /// Estimate at the last level evaluated.
    pub value: f64,
    /// `|I_L - I_{L-1}|` for the last two levels.
    pub error_estimate: f64,
    pub status: IntegralStatus,
    pub levels_used: usize,
    /// Integrand evaluations over all levels.
    pub evaluations: u64,
    /// Integral of `|integrand|` at the last level.
    pub reference_scale: f64,
    /// `|value| / reference_scale`.
    pub normalized_residual: f64,
    /// Scale-separation cutoff of the last level.
    pub cutoff: f64,
    /// Tangential roots dropped at the last level.
    pub tangential_roots: u64,
}

/// One fixed-cutoff quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEstimate {
    pub value: f64,
    pub reference_scale: f64,
    pub evaluations: u64,
    pub tangential_roots: u64,
    pub cutoff: f64,
}

/// Pointwise integrand at `(k1, k2)` with unit physical constants.
pub fn integrand(s: &SpectralExponents, p: Wavenumber, k1: f64, k2: f64) -> Result<f64> {
    integrand_with(s, &PhysicalConstants::default(), p, k1, k2)
}

/// Pointwise integrand: the three collision terms with the frequency delta
/// resolved against `m1`, divided by `Delta`.
pub fn integrand_with(
    s: &SpectralExponents,
    c: &PhysicalConstants,
    p: Wavenumber,
    k1: f64,
    k2: f64,
) -> Result<f64> {
    if !(p.m > 0.0) {
        return Err(Error::InvalidWavenumber { k: p.k, m: p.m });
    }
    if !in_kinematic_box(p.k, k1, k2) {
        return Err(Error::OutsideKinematicBox { k: p.k, k1, k2 });
    }
    let delta = delta_jacobian(p.k, k1, k2)?;
    let v = reduced_integrand(s, c, p.k, p.m, k1, k2).value / delta;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { x: s.x, y: s.y, k1, k2 })
    }
}

#[derive(Default)]
struct RaySum {
    value: f64,
    magnitude: f64,
    evaluations: u64,
    tangential: u64,
}

/// Quadrature at one level of `cfg`.
pub fn level_estimate(
    s: &SpectralExponents,
    p: Wavenumber,
    cfg: &QuadratureConfig,
    level: usize,
) -> Result<LevelEstimate> {
    cfg.validate()?;
    check_point(p)?;
    let layout = cfg.layout_at(level);
    integrate_layout(s, p, &layout, cfg.execution)
}

fn check_point(p: Wavenumber) -> Result<()> {
    if !(p.k > 0.0 && p.m > 0.0 && p.k.is_finite() && p.m.is_finite()) {
        return Err(Error::InvalidWavenumber { k: p.k, m: p.m });
    }
    Ok(())
}

fn integrate_layout(
    s: &SpectralExponents,
    p: Wavenumber,
    layout: &BoxLayout,
    mode: Execution,
) -> Result<LevelEstimate> {
    let c = PhysicalConstants::default();
    let rays = par::map_indexed(layout.rays(), mode, |i| -> Result<RaySum> {
        let mut nodes: Vec<BoxNode> = Vec::with_capacity(layout.nodes_per_ray());
        layout.ray_nodes(i, &mut nodes);
        let mut acc = RaySum::default();
        for n in &nodes {
            let (k1, k2) = (p.k * n.k1, p.k * n.k2);
            let pv = reduced_integrand(s, &c, p.k, p.m, k1, k2);
            if !pv.value.is_finite() {
                return Err(Error::NonFiniteIntegrand { x: s.x, y: s.y, k1, k2 });
            }
            acc.value += n.weight * pv.value;
            acc.magnitude += n.weight * pv.value.abs();
            acc.evaluations += 1;
            acc.tangential += u64::from(pv.tangential);
        }
        Ok(acc)
    });
    let mut total = RaySum::default();
    for r in rays {
        let r = r?;
        total.value += r.value;
        total.magnitude += r.magnitude;
        total.evaluations += r.evaluations;
        total.tangential += r.tangential;
    }
    Ok(LevelEstimate {
        value: total.value,
        reference_scale: total.magnitude,
        evaluations: total.evaluations,
        tangential_roots: total.tangential,
        cutoff: layout.cutoff().ratio(),
    })
}

/// Evaluates `I(x, y)` at `p` through the level sequence of `cfg`.
///
/// Stops with `CONVERGED` once two levels agree to `rel_tol` times the
/// integral of `|integrand|`, with `DIVERGENT` once `|I|` grows by more than
/// `divergence_growth` between levels, and with `MAX_LEVELS` otherwise.
pub fn evaluate(s: &SpectralExponents, p: Wavenumber, cfg: &QuadratureConfig) -> Result<IntegralResult> {
    cfg.validate()?;
    check_point(p)?;
    let mut evaluations = 0;
    let mut prev: Option<LevelEstimate> = None;
    let mut error_estimate = f64::INFINITY;
    for level in 0..cfg.max_levels {
        let est = integrate_layout(s, p, &cfg.layout_at(level), cfg.execution)?;
        evaluations += est.evaluations;
        let finish = |status, error_estimate| IntegralResult {
            value: est.value,
            error_estimate,
            status,
            levels_used: level + 1,
            evaluations,
            reference_scale: est.reference_scale,
            normalized_residual: normalized(est.value, est.reference_scale),
            cutoff: est.cutoff,
            tangential_roots: est.tangential_roots,
        };
        if let Some(prev) = prev {
            error_estimate = (est.value - prev.value).abs();
            if error_estimate <= cfg.rel_tol * est.reference_scale {
                return Ok(finish(IntegralStatus::Converged, error_estimate));
            }
            if est.value.abs() > cfg.divergence_growth * prev.value.abs() {
                return Ok(finish(IntegralStatus::Divergent, error_estimate));
            }
        }
        if level + 1 == cfg.max_levels {
            return Ok(finish(IntegralStatus::MaxLevels, error_estimate));
        }
        prev = Some(est);
    }
    unreachable!("validated config has at least two levels")
}

fn normalized(value: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        value.abs() / reference
    } else {
        0.0
    }
}

/// Exponents `(a, b)` with `I(alpha k, beta m) = alpha^a beta^b I(k, m)`.
///
/// The action spectrum contributes `n^2 ~ k^-2x m^-2y`; the squared matrix
/// element, the Jacobian of the frequency delta and the measure contribute
/// `k^4 m`.
pub fn homogeneity_exponents(s: &SpectralExponents) -> (f64, f64) {
    (4.0 - 2.0 * s.x, 1.0 - 2.0 * s.y)
}

/// Measured and predicted ratio `I(alpha k, beta m) / I(k, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub measured: f64,
    pub expected: f64,
    /// Combined relative error estimate of the two evaluations.
    pub tolerance: f64,
    pub base: IntegralResult,
    pub scaled: IntegralResult,
}

impl ScalingCheck {
    /// `|measured / expected - 1|`.
    pub fn relative_deviation(&self) -> f64 {
        (self.measured / self.expected - 1.0).abs()
    }
}

/// Compares `I(alpha k, beta m) / I(k, m)` with [`homogeneity_exponents`].
pub fn scaling_exponent_check(
    s: &SpectralExponents,
    p: Wavenumber,
    alpha: f64,
    beta: f64,
    cfg: &QuadratureConfig,
) -> Result<ScalingCheck> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("scale factors must be positive, got ({alpha}, {beta})")));
    }
    let scaled_p = Wavenumber::new(alpha * p.k, beta * p.m)?;
    let (base, scaled) = par::join(cfg.execution, || evaluate(s, p, cfg), || evaluate(s, scaled_p, cfg));
    let (base, scaled) = (base?, scaled?);
    if base.value.abs() <= cfg.rel_tol * base.reference_scale {
        return Err(Error::VanishingReference(base.value));
    }
    let (a, b) = homogeneity_exponents(s);
    Ok(ScalingCheck {
        measured: scaled.value / base.value,
        expected: alpha.powf(a) * beta.powf(b),
        tolerance: base.error_estimate / base.value.abs() + scaled.error_estimate / scaled.value.abs(),
        base,
        scaled,
    })
}

/// Reduced integrand ratio at scaled nodes against [`homogeneity_exponents`],
/// as `(measured, expected)`.
pub fn node_scaling_check(
    s: &SpectralExponents,
    p: Wavenumber,
    alpha: f64,
    beta: f64,
    k1: f64,
    k2: f64,
) -> (f64, f64) {
    let c = PhysicalConstants::default();
    let base = reduced_integrand(s, &c, p.k, p.m, k1, k2).value;
    let scaled = reduced_integrand(s, &c, alpha * p.k, beta * p.m, alpha * k1, alpha * k2).value;
    let (a, b) = homogeneity_exponents(s);
    (scaled / base, alpha.powf(a) * beta.powf(b))
}
