//! Zero set of `I(x, y)`: bracketed root finding on slices, continuation
//! along the curve, and tensor-grid sampling for contour plots.

use serde::{Deserialize, Serialize};

use crate::collision::{evaluate, IntegralResult, IntegralStatus, QuadratureConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{SpectralExponents, Wavenumber};

/// Normalized residual at which a slice search stops.
pub const RESIDUAL_TOLERANCE: f64 = 1e-3;
/// Bracket width at which a slice search stops.
pub const BRACKET_TOLERANCE: f64 = 1e-3;
/// Offset in `y` at which curve thickness is sampled.
pub const THICKNESS_OFFSET: f64 = 0.25;

const MIN_BRACKET: f64 = 0.1;
const BRACKET_RETRIES: usize = 3;
/// Times a failing continuation step is halved before tracing stops.
const STEP_HALVINGS: usize = 2;
const MAX_SLICE_STEPS: usize = 60;
/// Step for the finite-difference slope at the seed.
const SEED_DIFFERENCE: f64 = 0.02;

/// Which coordinate a slice search varied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SliceAxis {
    /// `y` at fixed `x`.
    Y,
    /// `x` at fixed `y`.
    X,
}

/// One located zero of `I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub normalized_residual: f64,
    pub bracket_width: f64,
    pub axis: SliceAxis,
    /// Slope `dy/dx` used to predict this point during tracing.
    pub slope: f64,
    /// Normalized `|I|` at `y - THICKNESS_OFFSET`, when recorded.
    pub thickness_below: Option<f64>,
    /// Normalized `|I|` at `y + THICKNESS_OFFSET`, when recorded.
    pub thickness_above: Option<f64>,
}

/// Points of a traced curve, ordered by `x`, with the reasons tracing
/// stopped short of either end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub points: Vec<CurvePoint>,
    pub stopped_low: Option<String>,
    pub stopped_high: Option<String>,
}

impl CurveTrace {
    /// Linear interpolation of `y` at `x`, if `x` lies within the traced span.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        y_at(&self.points, x)
    }
}

/// Linear interpolation of `y(x)` along consecutive points; the first
/// segment straddling `x` wins.
pub fn y_at(points: &[CurvePoint], x: f64) -> Option<f64> {
    if let [only] = points {
        return (only.x == x).then_some(only.y);
    }
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        let (lo, hi) = if a.x <= b.x { (a.x, b.x) } else { (b.x, a.x) };
        if x < lo || x > hi {
            return None;
        }
        if hi == lo {
            return Some(a.y);
        }
        Some(a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x))
    })
}

/// Settings of the slice search and the tracer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroFinder {
    pub quadrature: QuadratureConfig,
    /// Wavenumber at which `I` is evaluated.
    pub point: Wavenumber,
    pub residual_tol: f64,
    pub bracket_tol: f64,
    /// Known zero the tracer starts from.
    pub seed: (f64, f64),
    /// Half-width of the `y` bracket around the seed.
    pub seed_half_width: f64,
    pub record_thickness: bool,
}

impl Default for ZeroFinder {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            point: Wavenumber { k: 1.0, m: 1.0 },
            residual_tol: RESIDUAL_TOLERANCE,
            bracket_tol: BRACKET_TOLERANCE,
            seed: (3.5, 0.5),
            seed_half_width: 0.3,
            record_thickness: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    t: f64,
    value: f64,
    residual: f64,
}

impl ZeroFinder {
    pub fn with_quadrature(quadrature: QuadratureConfig) -> Self {
        Self { quadrature, ..Self::default() }
    }

    /// `I` at exponents `(x, y)`.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<IntegralResult> {
        evaluate(&SpectralExponents::new(x, y), self.point, &self.quadrature)
    }

    fn coords(axis: SliceAxis, fixed: f64, t: f64) -> (f64, f64) {
        match axis {
            SliceAxis::Y => (fixed, t),
            SliceAxis::X => (t, fixed),
        }
    }

    fn sample(&self, axis: SliceAxis, fixed: f64, t: f64) -> Result<(Sample, IntegralStatus)> {
        let (x, y) = Self::coords(axis, fixed, t);
        let r = self.evaluate(x, y)?;
        Ok((Sample { t, value: r.value, residual: r.normalized_residual }, r.status))
    }

    /// Zero of `I(x, .)` in `[y_lo, y_hi]`.
    pub fn find_zero_on_slice(&self, x: f64, y_lo: f64, y_hi: f64) -> Result<CurvePoint> {
        self.solve(SliceAxis::Y, x, y_lo, y_hi)
    }

    /// Zero of `I(., y)` in `[x_lo, x_hi]`, for steep stretches of the curve.
    pub fn find_zero_on_row(&self, y: f64, x_lo: f64, x_hi: f64) -> Result<CurvePoint> {
        self.solve(SliceAxis::X, y, x_lo, x_hi)
    }

    /// Bisection with secant steps while they keep shrinking the bracket.
    fn solve(&self, axis: SliceAxis, fixed: f64, lo: f64, hi: f64) -> Result<CurvePoint> {
        if !(lo < hi && lo.is_finite() && hi.is_finite() && fixed.is_finite()) {
            return Err(Error::InvalidArgument(format!("bracket [{lo}, {hi}] must be finite and ordered")));
        }
        let mode = self.quadrature.execution;
        let (a, b) = par::join(mode, || self.sample(axis, fixed, lo), || self.sample(axis, fixed, hi));
        let ((mut a, sa), (mut b, sb)) = (a?, b?);
        for (s, status) in [(a, sa), (b, sb)] {
            if status == IntegralStatus::Divergent {
                let (x, y) = Self::coords(axis, fixed, s.t);
                return Err(Error::NonConvergent { x, y });
            }
        }
        if a.value.signum() == b.value.signum() && a.value != 0.0 && b.value != 0.0 {
            let name = match axis {
                SliceAxis::Y => 'x',
                SliceAxis::X => 'y',
            };
            return Err(Error::NoSignChange { fixed: name, at: fixed, lo, hi, f_lo: a.value, f_hi: b.value });
        }
        let point = |s: Sample, width: f64| {
            let (x, y) = Self::coords(axis, fixed, s.t);
            CurvePoint {
                x,
                y,
                normalized_residual: s.residual,
                bracket_width: width,
                axis,
                slope: 0.0,
                thickness_below: None,
                thickness_above: None,
            }
        };
        let mut last_width = b.t - a.t;
        for _ in 0..MAX_SLICE_STEPS {
            let width = b.t - a.t;
            let best = if a.residual <= b.residual { a } else { b };
            if best.residual <= self.residual_tol || best.value == 0.0 || width <= self.bracket_tol {
                return Ok(point(best, width));
            }
            let secant = b.t - b.value * (b.t - a.t) / (b.value - a.value);
            let margin = 0.1 * width;
            let t = if secant > a.t + margin && secant < b.t - margin && width <= 0.5 * last_width + 1e-15 {
                secant
            } else {
                0.5 * (a.t + b.t)
            };
            last_width = width;
            let (m, _) = self.sample(axis, fixed, t)?;
            if m.value == 0.0 || m.residual <= self.residual_tol {
                return Ok(point(m, width));
            }
            if m.value.signum() == a.value.signum() {
                a = m;
            } else {
                b = m;
            }
        }
        let best = if a.residual <= b.residual { a } else { b };
        Ok(point(best, b.t - a.t))
    }

    /// Traces the zero curve from the seed towards `x_start` and `x_end`.
    ///
    /// Each new slice is bracketed around the linear prediction with width
    /// `4 step |slope|` (at least 0.1), widened up to three times; a steep
    /// stretch falls back to a search in `x` at the predicted `y`. When both
    /// fail the step is halved, and after two halvings tracing in that
    /// direction stops with the reason recorded.
    pub fn trace_curve(&self, x_start: f64, x_end: f64, step: f64) -> Result<CurveTrace> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidArgument(format!("trace step must be positive, got {step}")));
        }
        if !(x_start < x_end) {
            return Err(Error::InvalidArgument(format!("trace range [{x_start}, {x_end}] is empty")));
        }
        let (sx, sy) = self.seed;
        if !(x_start <= sx && sx <= x_end) {
            return Err(Error::InvalidArgument(format!("seed x = {sx} is outside [{x_start}, {x_end}]")));
        }
        let mut seed = self.find_zero_on_slice(sx, sy - self.seed_half_width, sy + self.seed_half_width)?;
        seed.slope = self.seed_slope(&seed)?;
        let mode = self.quadrature.execution;
        let (high, low) = par::join(
            mode,
            || self.march(seed, step, x_end),
            || self.march(seed, -step, x_start),
        );
        let ((high, stopped_high), (low, stopped_low)) = (high?, low?);
        let mut points: Vec<CurvePoint> = low.into_iter().rev().collect();
        points.push(seed);
        points.extend(high);
        if self.record_thickness {
            self.add_thickness(&mut points)?;
        }
        Ok(CurveTrace { points, stopped_low, stopped_high })
    }

    /// `dy/dx = -I_x / I_y` by one-sided differences at the seed.
    fn seed_slope(&self, seed: &CurvePoint) -> Result<f64> {
        let h = SEED_DIFFERENCE;
        let mode = self.quadrature.execution;
        let (c, (dx, dy)) = par::join(
            mode,
            || self.evaluate(seed.x, seed.y),
            || par::join(mode, || self.evaluate(seed.x + h, seed.y), || self.evaluate(seed.x, seed.y + h)),
        );
        let (c, dx, dy) = (c?.value, dx?.value, dy?.value);
        let slope = -(dx - c) / (dy - c);
        Ok(if slope.is_finite() { slope } else { 0.0 })
    }

    fn march(&self, start: CurvePoint, step: f64, end: f64) -> Result<(Vec<CurvePoint>, Option<String>)> {
        let dir = step.signum();
        let mut out = Vec::new();
        let mut prev = start;
        let mut slope = start.slope;
        loop {
            let remaining = dir * (end - prev.x);
            if remaining <= 1e-9 {
                return Ok((out, None));
            }
            let mut h = step.abs();
            let mut failure = String::new();
            let mut found = None;
            for _ in 0..=STEP_HALVINGS {
                let x = if remaining < h * (1.0 + 1e-9) { end } else { prev.x + dir * h };
                match self.advance(prev, slope, x, h)? {
                    Ok(p) => {
                        found = Some(p);
                        break;
                    }
                    Err(why) => failure = format!("no bracket near x = {x:.4}: {why}"),
                }
                h *= 0.5;
            }
            let Some(mut p) = found else {
                return Ok((out, Some(failure)));
            };
            p.slope = slope;
            slope = (p.y - prev.y) / (p.x - prev.x);
            out.push(p);
            prev = p;
        }
    }

    /// One continuation step to `x`; the inner error explains a failed bracket.
    fn advance(&self, prev: CurvePoint, slope: f64, x: f64, step: f64) -> Result<Result<CurvePoint, Error>> {
        let dir = (x - prev.x).signum();
        let predicted = prev.y + slope * (x - prev.x);
        let width = (4.0 * step * slope.abs()).max(MIN_BRACKET);
        let mut last_err = None;
        for retry in 0..=BRACKET_RETRIES {
            let half = 0.5 * width * f64::from(1u32 << retry);
            match self.find_zero_on_slice(x, predicted - half, predicted + half) {
                Ok(p) => return Ok(Ok(p)),
                Err(e @ (Error::NoSignChange { .. } | Error::NonConvergent { .. })) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if slope.abs() > 1.0 {
            // steep: solve for x at the predicted y instead
            let (lo, hi) = if dir > 0.0 { (prev.x, x + step) } else { (x - step, prev.x) };
            match self.find_zero_on_row(predicted, lo, hi) {
                Ok(p) if dir * (p.x - prev.x) > 1e-9 => return Ok(Ok(p)),
                Ok(_) => {}
                Err(e @ (Error::NoSignChange { .. } | Error::NonConvergent { .. })) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Ok(Err(last_err.unwrap_or_else(|| Error::InvalidArgument("row search went backwards".into()))))
    }

    fn add_thickness(&self, points: &mut [CurvePoint]) -> Result<()> {
        let mode = self.quadrature.execution;
        let samples = par::map_indexed(2 * points.len(), mode, |i| {
            let p = points[i / 2];
            let dy = if i % 2 == 0 { -THICKNESS_OFFSET } else { THICKNESS_OFFSET };
            self.evaluate(p.x, p.y + dy).map(|r| r.normalized_residual)
        });
        for (i, s) in samples.into_iter().enumerate() {
            let s = s?;
            if i % 2 == 0 {
                points[i / 2].thickness_below = Some(s);
            } else {
                points[i / 2].thickness_above = Some(s);
            }
        }
        Ok(())
    }
}

/// `I` sampled on a tensor grid; rows follow `y_axis`, columns `x_axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub status: Vec<Vec<IntegralStatus>>,
    /// Integral of `|integrand|` per cell.
    pub reference_scale: Vec<Vec<f64>>,
}

impl GridField {
    /// `I / reference_scale` at row `j`, column `i`; `None` for divergent cells.
    pub fn normalized(&self, j: usize, i: usize) -> Option<f64> {
        if self.status[j][i] == IntegralStatus::Divergent {
            return None;
        }
        let r = self.reference_scale[j][i];
        Some(if r > 0.0 { self.values[j][i] / r } else { 0.0 })
    }

    pub fn count(&self, status: IntegralStatus) -> usize {
        self.status.iter().flatten().filter(|&&s| s == status).count()
    }
}

/// Evenly spaced axis of `n` points over `range`, endpoints included.
pub fn axis(range: (f64, f64), n: usize) -> Vec<f64> {
    let (a, b) = range;
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

/// Evaluates `I` on an `nx` by `ny` grid at wavenumber `point`.
pub fn grid(
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    point: Wavenumber,
    cfg: &QuadratureConfig,
) -> Result<GridField> {
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidArgument(format!("grid needs at least 2x2 points, got {nx}x{ny}")));
    }
    for (lo, hi) in [x_range, y_range] {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid range [{lo}, {hi}] must be finite and ordered")));
        }
    }
    cfg.validate()?;
    let x_axis = axis(x_range, nx);
    let y_axis = axis(y_range, ny);
    let cells = par::map_indexed(nx * ny, cfg.execution, |c| {
        let s = SpectralExponents::new(x_axis[c % nx], y_axis[c / nx]);
        evaluate(&s, point, cfg)
    });
    let mut values = vec![vec![0.0; nx]; ny];
    let mut status = vec![vec![IntegralStatus::Converged; nx]; ny];
    let mut reference_scale = vec![vec![0.0; nx]; ny];
    for (c, r) in cells.into_iter().enumerate() {
        let r = r?;
        let (j, i) = (c / nx, c % nx);
        values[j][i] = r.value;
        status[j][i] = r.status;
        reference_scale[j][i] = r.reference_scale;
    }
    Ok(GridField { x_axis, y_axis, values, status, reference_scale })
}
