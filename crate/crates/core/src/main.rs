use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wavekin::collision::{
    evaluate, node_scaling_check, scaling_exponent_check, IntegralResult, IntegralStatus, QuadratureConfig,
};
use wavekin::config::load_config;
use wavekin::figure::{
    compute_figure, proximity, svg_document, FigureRun, Proximity, DEFAULT_GRID_POINTS, DEFAULT_TRACE_STEP,
};
use wavekin::kernel::reduced_integrand;
use wavekin::observations::builtin_observations;
use wavekin::output::{write_curve_csv, write_grid_csv, write_json, write_observations_csv};
use wavekin::spectral::{PhysicalConstants, SpectralExponents, Wavenumber};
use wavekin::zero_curve::{grid, ZeroFinder};
use wavekin::{Error, Result};

#[derive(Parser)]
#[command(name = "wavekin", version, about = "Collision integral of internal-wave power-law spectra")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Quadrature settings file (`key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Horizontal wavenumber of the evaluation point
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Vertical wavenumber of the evaluation point
    #[arg(long, default_value_t = 1.0)]
    m: f64,
}

impl Common {
    fn quadrature(&self) -> Result<QuadratureConfig> {
        match &self.config {
            Some(path) => load_config(path),
            None => Ok(QuadratureConfig::default()),
        }
    }

    fn point(&self) -> Result<Wavenumber> {
        Wavenumber::new(self.k, self.m)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the collision integral at exponents (x, y)
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Trace the zero curve through the exact solution
    Curve {
        #[arg(long, allow_hyphen_values = true)]
        x_start: f64,
        #[arg(long, allow_hyphen_values = true)]
        x_end: f64,
        #[arg(long)]
        step: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: DataFormat,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also sample |I| above and below each point
        #[arg(long)]
        thickness: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the collision integral on a tensor grid
    Grid {
        /// `lo,hi`
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        x_range: (f64, f64),
        /// `lo,hi`
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        y_range: (f64, f64),
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: DataFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the embedded observation table
    Obs {
        #[arg(long, value_enum, default_value = "table")]
        format: TableFormat,
    },
    /// Render contours, zero curve and observations as SVG
    Figure {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        nx: usize,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        ny: usize,
        /// Tracing step in x
        #[arg(long, default_value_t = DEFAULT_TRACE_STEP)]
        step: f64,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "1,5")]
        x_range: (f64, f64),
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-1.5,2.5")]
        y_range: (f64, f64),
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in consistency checks
    Selftest {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("not a number: {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("not a number: {b:?}"))?;
    Ok((lo, hi))
}

fn destination(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("wavekin: error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Eval { x, y, common } => {
            let r = evaluate(&SpectralExponents::new(x, y), common.point()?, &common.quadrature()?)?;
            write_json(&r, io::stdout().lock())?;
        }
        Command::Curve { x_start, x_end, step, format, out, thickness, common } => {
            let finder = ZeroFinder {
                point: common.point()?,
                record_thickness: thickness,
                ..ZeroFinder::with_quadrature(common.quadrature()?)
            };
            let trace = finder.trace_curve(x_start, x_end, step)?;
            for (side, why) in [("low", &trace.stopped_low), ("high", &trace.stopped_high)] {
                if let Some(why) = why {
                    eprintln!("wavekin: {side} end stopped early: {why}");
                }
            }
            let mut w = destination(out.as_deref())?;
            match format {
                DataFormat::Csv => write_curve_csv(&trace.points, &mut w)?,
                DataFormat::Json => write_json(&trace, &mut w)?,
            }
            w.flush()?;
        }
        Command::Grid { x_range, y_range, nx, ny, format, out, common } => {
            let g = grid(x_range, y_range, nx, ny, common.point()?, &common.quadrature()?)?;
            let mut w = destination(out.as_deref())?;
            match format {
                DataFormat::Csv => write_grid_csv(&g, &mut w)?,
                DataFormat::Json => write_json(&g, &mut w)?,
            }
            w.flush()?;
        }
        Command::Obs { format } => {
            let records = builtin_observations();
            let mut w = io::stdout().lock();
            match format {
                TableFormat::Csv => write_observations_csv(&records, &mut w)?,
                TableFormat::Json => {
                    #[derive(Serialize)]
                    struct Table<'a> {
                        observations: &'a [wavekin::observations::ObservationRecord],
                    }
                    write_json(&Table { observations: &records }, &mut w)?
                }
                TableFormat::Table => {
                    writeln!(w, "{:<8} {:>10} {:>10} {:<10} {:>10} {:>11}", "name", "a", "b", "basis", "x", "y")?;
                    for r in &records {
                        let basis = serde_json::to_value(r.wavenumber_basis).expect("enum serialises");
                        writeln!(
                            w,
                            "{:<8} {:>10} {:>10} {:<10} {:>10} {:>11}",
                            r.name,
                            r.omega_exponent.to_string(),
                            r.vertical_exponent.to_string(),
                            basis.as_str().unwrap_or_default(),
                            rounded(r.derived_x),
                            rounded(r.derived_y),
                        )?;
                    }
                }
            }
            w.flush()?;
        }
        Command::Figure { out, nx, ny, step, x_range, y_range, common } => {
            let finder = ZeroFinder { point: common.point()?, ..ZeroFinder::with_quadrature(common.quadrature()?) };
            let FigureRun { bundle, stopped_low, stopped_high } =
                compute_figure(&finder, x_range, y_range, nx, ny, step)?;
            let report = proximity(&bundle.curve, &bundle.observations);
            let svg = svg_document(&bundle)?;
            std::fs::write(&out, svg).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;

            #[derive(Serialize)]
            struct Summary {
                out: PathBuf,
                converged_cells: usize,
                max_levels_cells: usize,
                divergent_cells: usize,
                curve_points: usize,
                stopped_low: Option<String>,
                stopped_high: Option<String>,
                proximity: Vec<Proximity>,
            }
            let summary = Summary {
                out,
                converged_cells: bundle.grid.count(IntegralStatus::Converged),
                max_levels_cells: bundle.grid.count(IntegralStatus::MaxLevels),
                divergent_cells: bundle.grid.count(IntegralStatus::Divergent),
                curve_points: bundle.curve.len(),
                stopped_low,
                stopped_high,
                proximity: report,
            };
            write_json(&summary, io::stdout().lock())?;
        }
        Command::Selftest { config } => {
            let cfg = match config {
                Some(path) => load_config(&path)?,
                None => QuadratureConfig::default(),
            };
            let checks = selftest(&cfg)?;
            let mut w = io::stdout().lock();
            for c in &checks {
                writeln!(w, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                eprintln!("wavekin: error: {failed} of {} self-checks failed", checks.len());
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Midpoint, or `lo..hi`, rounded for display.
fn rounded(e: wavekin::observations::Exponent) -> String {
    let r = |v: f64| format!("{}", (v * 1e9).round() / 1e9);
    if e.is_interval() {
        format!("{}..{}", r(e.lo()), r(e.hi()))
    } else {
        r(e.mid())
    }
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Points of the open box at `k = 1` from a golden-ratio sequence.
fn box_samples(n: usize) -> impl Iterator<Item = (f64, f64)> {
    const G1: f64 = 0.754_877_666_246_692_8;
    const G2: f64 = 0.569_840_290_998_053_3;
    (1..=n).map(|i| {
        let u = (0.5 + G1 * i as f64).fract();
        let v = (0.5 + G2 * i as f64).fract();
        let eta = 3.0 * u.max(1e-3);
        let phi = std::f64::consts::PI * v.clamp(1e-3, 1.0 - 1e-3);
        (0.5 * (eta.cosh() - phi.cos()), 0.5 * (eta.cosh() + phi.cos()))
    })
}

fn selftest(cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let unit = Wavenumber::new(1.0, 1.0)?;
    let mut checks = Vec::new();

    let r: IntegralResult = evaluate(&SpectralExponents::new(3.5, 0.5), unit, cfg)?;
    checks.push(Check {
        name: "exact solution (3.5, 0.5) is a zero",
        passed: r.status == IntegralStatus::Converged && r.normalized_residual <= 1e-2,
        detail: format!("status {}, normalized residual {:.3e}", r.status, r.normalized_residual),
    });

    let eq = SpectralExponents::equipartition();
    let c = PhysicalConstants::default();
    let worst = box_samples(1000)
        .map(|(k1, k2)| {
            let v = reduced_integrand(&eq, &c, 1.0, 1.0, k1, k2);
            if v.largest_term > 0.0 { v.value.abs() / v.largest_term } else { 0.0 }
        })
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "equipartition cancels pointwise",
        passed: worst <= 1e-10,
        detail: format!("worst |sum| / largest term {worst:.3e} over 1000 nodes"),
    });

    let mut worst = 0.0f64;
    for (i, (k1, k2)) in box_samples(50).enumerate() {
        let s = SpectralExponents::new(2.0 + 0.05 * i as f64, -1.0 + 0.06 * i as f64);
        let (alpha, beta) = (0.5 + 0.07 * i as f64, 2.5 - 0.04 * i as f64);
        let (measured, expected) = node_scaling_check(&s, unit, alpha, beta, k1, k2);
        if measured.is_finite() {
            worst = worst.max((measured / expected - 1.0).abs());
        }
    }
    checks.push(Check {
        name: "integrand bihomogeneity",
        passed: worst <= 1e-12,
        detail: format!("worst relative deviation {worst:.3e} over 50 nodes"),
    });

    let sc = scaling_exponent_check(&SpectralExponents::new(4.0, 0.0), unit, 2.0, 0.5, cfg)?;
    let dev = sc.relative_deviation();
    checks.push(Check {
        name: "integral bihomogeneity at (4, 0)",
        passed: dev <= 5.0 * sc.tolerance.max(cfg.rel_tol),
        detail: format!("ratio {:.9e} vs {:.9e}, deviation {dev:.3e}", sc.measured, sc.expected),
    });
    Ok(checks)
}
