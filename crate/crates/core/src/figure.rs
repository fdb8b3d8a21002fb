//! Standalone SVG of the `(x, y)` plane: iso-lines of the collision
//! integral, the traced zero curve, observation markers and reference dots.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::collision::IntegralStatus;
use crate::error::{Error, Result};
use crate::observations::{builtin_observations, ObservationRecord, WavenumberBasis};
use crate::zero_curve::{grid, y_at, CurvePoint, GridField, ZeroFinder};

/// Frame of the comparison figure in `x`.
pub const FRAME_X: (f64, f64) = (1.0, 5.0);
/// Frame of the comparison figure in `y`.
pub const FRAME_Y: (f64, f64) = (-1.5, 2.5);
/// Grid points per axis of the default figure.
pub const DEFAULT_GRID_POINTS: usize = 81;
/// Tracing step of the default figure.
pub const DEFAULT_TRACE_STEP: f64 = 0.1;

/// Iso-levels of `I / integral(|integrand|)`; drawn with both signs.
pub const CONTOUR_LEVELS: [f64; 5] = [0.01, 0.03, 0.1, 0.3, 0.6];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 64.0;
const POSITIVE: &str = "#d62728";
const NEGATIVE: &str = "#1f77b4";

/// A labelled point of the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
}

/// The three closed-form reference spectra.
pub fn reference_points() -> Vec<ReferencePoint> {
    [("exact-solution", 3.5, 0.5), ("GM", 4.0, 0.0), ("equipartition", 1.0, -1.0)]
        .into_iter()
        .map(|(label, x, y)| ReferencePoint { label: label.into(), x, y })
        .collect()
}

/// Everything drawn in the figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureBundle {
    pub grid: GridField,
    pub curve: Vec<CurvePoint>,
    pub observations: Vec<ObservationRecord>,
    pub reference_points: Vec<ReferencePoint>,
}

/// A computed bundle and the reasons the curve trace stopped short.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRun {
    pub bundle: FigureBundle,
    pub stopped_low: Option<String>,
    pub stopped_high: Option<String>,
}

/// Samples the grid over the frame and traces the zero curve across its
/// full `x` extent.
pub fn compute_figure(
    finder: &ZeroFinder,
    x_range: (f64, f64),
    y_range: (f64, f64),
    nx: usize,
    ny: usize,
    step: f64,
) -> Result<FigureRun> {
    let field = grid(x_range, y_range, nx, ny, finder.point, &finder.quadrature)?;
    let trace = finder.trace_curve(x_range.0, x_range.1, step)?;
    Ok(FigureRun {
        bundle: FigureBundle {
            grid: field,
            curve: trace.points,
            observations: builtin_observations(),
            reference_points: reference_points(),
        },
        stopped_low: trace.stopped_low,
        stopped_high: trace.stopped_high,
    })
}

/// A line segment in data coordinates.
pub type Segment = ((f64, f64), (f64, f64));

/// Marching squares over the cells whose four corners are finite; `field` is
/// indexed `[row][column]` with rows along `ys`.
pub fn iso_segments(xs: &[f64], ys: &[f64], field: &[Vec<Option<f64>>], level: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for j in 0..ys.len().saturating_sub(1) {
        for i in 0..xs.len().saturating_sub(1) {
            let corners = [field[j][i], field[j][i + 1], field[j + 1][i + 1], field[j + 1][i]];
            let [Some(a), Some(b), Some(c), Some(d)] = corners else {
                continue;
            };
            // corners counter-clockwise from (x_i, y_j)
            let p = [(xs[i], ys[j]), (xs[i + 1], ys[j]), (xs[i + 1], ys[j + 1]), (xs[i], ys[j + 1])];
            let v = [a, b, c, d];
            let case = v.iter().enumerate().fold(0, |acc, (k, &f)| acc | (usize::from(f > level) << k));
            let cross = |e: usize| {
                let (k0, k1) = (e, (e + 1) % 4);
                let t = (level - v[k0]) / (v[k1] - v[k0]);
                (p[k0].0 + t * (p[k1].0 - p[k0].0), p[k0].1 + t * (p[k1].1 - p[k0].1))
            };
            // edges: 0 bottom, 1 right, 2 top, 3 left
            let pairs: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 | 10 => {
                    let center_above = 0.25 * (a + b + c + d) > level;
                    // corners 0 and 2 agree; the saddle centre decides the pairing
                    if (case == 5) == center_above {
                        &[(3, 2), (0, 1)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                _ => unreachable!(),
            };
            out.extend(pairs.iter().map(|&(e0, e1)| (cross(e0), cross(e1))));
        }
    }
    out
}

/// True when some 2x2 block of grid points is free of divergent cells.
pub fn has_contour_block(grid: &GridField) -> bool {
    let ok = |j: usize, i: usize| grid.status[j][i] != IntegralStatus::Divergent;
    (0..grid.y_axis.len().saturating_sub(1)).any(|j| {
        (0..grid.x_axis.len().saturating_sub(1)).any(|i| ok(j, i) && ok(j, i + 1) && ok(j + 1, i) && ok(j + 1, i + 1))
    })
}

/// Signed distance in `y` from each observation midpoint to the curve at the
/// same `x`; `None` where the curve does not reach that `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proximity {
    pub name: String,
    pub basis: WavenumberBasis,
    pub midpoint: (f64, f64),
    pub curve_y: Option<f64>,
    pub distance: Option<f64>,
}

pub fn proximity(curve: &[CurvePoint], observations: &[ObservationRecord]) -> Vec<Proximity> {
    observations
        .iter()
        .map(|r| {
            let midpoint = r.midpoint();
            let curve_y = y_at(curve, midpoint.0);
            Proximity {
                name: r.name.clone(),
                basis: r.wavenumber_basis,
                midpoint,
                curve_y,
                distance: curve_y.map(|y| (midpoint.1 - y).abs()),
            }
        })
        .collect()
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Writes the figure as a standalone SVG document.
pub fn render_figure<W: Write>(bundle: &FigureBundle, mut out: W) -> Result<()> {
    out.write_all(svg_document(bundle)?.as_bytes())?;
    Ok(())
}

/// The figure as SVG text.
pub fn svg_document(bundle: &FigureBundle) -> Result<String> {
    let grid = &bundle.grid;
    if bundle.curve.is_empty() {
        return Err(Error::EmptyData("curve"));
    }
    if grid.x_axis.len() < 2 || grid.y_axis.len() < 2 || !has_contour_block(grid) {
        return Err(Error::InsufficientCells);
    }
    let f = Frame {
        x0: grid.x_axis[0],
        x1: *grid.x_axis.last().unwrap(),
        y0: grid.y_axis[0],
        y1: *grid.y_axis.last().unwrap(),
    };
    let mut s = String::new();
    let w = &mut s;
    // writing to a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(w, r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);

    divergent_cells(w, grid, &f);
    contours(w, grid, &f);

    let pts: Vec<String> =
        bundle.curve.iter().map(|p| format!("{:.2},{:.2}", f.px(p.x), f.py(p.y))).collect();
    let _ = writeln!(
        w,
        r#"<polyline class="zero-curve" clip-path="url(#plot)" fill="none" stroke="black" stroke-width="2" points="{}"/>"#,
        pts.join(" ")
    );

    let _ = writeln!(w, r#"<g class="observations">"#);
    for r in &bundle.observations {
        let name = escape(&r.name);
        let ((xa, ya), (xb, yb)) = r.segment();
        let (mx, my) = r.midpoint();
        let dash = if r.wavenumber_basis == WavenumberBasis::Horizontal { r#" stroke-dasharray="3,2""# } else { "" };
        if r.is_point() {
            let _ = writeln!(
                w,
                r#"<circle class="observation" data-name="{name}" cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="blue" stroke-width="1.5"{dash}/>"#,
                f.px(mx),
                f.py(my)
            );
        } else {
            let _ = writeln!(
                w,
                r#"<line class="observation" data-name="{name}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="blue" stroke-width="3" stroke-linecap="round"{dash}/>"#,
                f.px(xa),
                f.py(ya),
                f.px(xb),
                f.py(yb)
            );
        }
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" fill="blue">{name}</text>"#, f.px(mx) + 7.0, f.py(my) - 7.0);
    }
    let _ = writeln!(w, "</g>");

    let _ = writeln!(w, r#"<g class="references">"#);
    for p in &bundle.reference_points {
        let label = escape(&p.label);
        let _ = writeln!(
            w,
            r#"<circle class="reference" data-label="{label}" cx="{:.2}" cy="{:.2}" r="5" fill="red"/>"#,
            f.px(p.x),
            f.py(p.y)
        );
        let _ = writeln!(w, r#"<text x="{:.2}" y="{:.2}" fill="red">{label}</text>"#, f.px(p.x) + 7.0, f.py(p.y) + 14.0);
    }
    let _ = writeln!(w, "</g>");

    axes(w, &f);
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

fn divergent_cells(w: &mut String, grid: &GridField, f: &Frame) {
    let (nx, ny) = (grid.x_axis.len(), grid.y_axis.len());
    let dx = 0.5 * (grid.x_axis[nx - 1] - grid.x_axis[0]) / (nx - 1) as f64;
    let dy = 0.5 * (grid.y_axis[ny - 1] - grid.y_axis[0]) / (ny - 1) as f64;
    let _ = writeln!(w, r##"<g class="divergent" fill="#e8e8e8" clip-path="url(#plot)">"##);
    for j in 0..ny {
        for i in 0..nx {
            if grid.status[j][i] != IntegralStatus::Divergent {
                continue;
            }
            let (x, y) = (grid.x_axis[i], grid.y_axis[j]);
            let _ = writeln!(
                w,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
                f.px(x - dx),
                f.py(y + dy),
                f.px(x + dx) - f.px(x - dx),
                f.py(y - dy) - f.py(y + dy)
            );
        }
    }
    let _ = writeln!(w, "</g>");
}

fn contours(w: &mut String, grid: &GridField, f: &Frame) {
    let field: Vec<Vec<Option<f64>>> = (0..grid.y_axis.len())
        .map(|j| (0..grid.x_axis.len()).map(|i| grid.normalized(j, i)).collect())
        .collect();
    for (class, color, sign) in [("positive", POSITIVE, 1.0), ("negative", NEGATIVE, -1.0)] {
        let _ = writeln!(w, r#"<g class="contours {class}" stroke="{color}" fill="none" clip-path="url(#plot)">"#);
        for level in CONTOUR_LEVELS {
            let segs = iso_segments(&grid.x_axis, &grid.y_axis, &field, sign * level);
            let mut d = String::new();
            for ((xa, ya), (xb, yb)) in segs {
                let _ = write!(d, "M{:.2} {:.2}L{:.2} {:.2}", f.px(xa), f.py(ya), f.px(xb), f.py(yb));
            }
            let _ = writeln!(w, r#"<path class="contour" data-level="{}" d="{d}"/>"#, sign * level);
        }
        let _ = writeln!(w, "</g>");
    }
}

fn axes(w: &mut String, f: &Frame) {
    let (l, r, t, b) = (f.px(f.x0), f.px(f.x1), f.py(f.y1), f.py(f.y0));
    let _ = writeln!(w, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(w, r#"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}"/>"#, r - l, b - t);
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<g class="ticks" stroke="black">"#);
    let mut labels = String::new();
    for x in ticks(f.x0, f.x1, 0.5) {
        let px = f.px(x);
        let _ = writeln!(w, r#"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}"/>"#, b + 5.0);
        let _ = writeln!(labels, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"#, b + 18.0);
    }
    for y in ticks(f.y0, f.y1, 0.5) {
        let py = f.py(y);
        let _ = writeln!(w, r#"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}"/>"#, l - 5.0);
        let _ = writeln!(labels, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{y}</text>"#, l - 8.0, py + 4.0);
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<g class="tick-labels">"#);
    w.push_str(&labels);
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">x</text>"#, 0.5 * (l + r), b + 40.0);
    let _ = writeln!(
        w,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">y</text>"#,
        l - 42.0,
        0.5 * (t + b),
        l - 42.0,
        0.5 * (t + b)
    );
}

/// Multiples of `step` within `[lo, hi]`.
fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}
