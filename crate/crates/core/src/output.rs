//! CSV and JSON emission (and CSV parsing back) for observations, traced
//! curves and grids.
//!
//! CSV files are UTF-8 with a header row and LF line endings; reals are
//! printed with 9 significant digits. Grids are written in long form, one
//! row per cell.

use std::io::{Read, Write};

use serde::Serialize;

use crate::collision::IntegralStatus;
use crate::error::{Error, Result};
use crate::observations::ObservationRecord;
use crate::zero_curve::{CurvePoint, GridField, SliceAxis};

/// Significant digits of printed reals.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// `v` with 9 significant digits, `%g` style: trailing zeros dropped,
/// exponent form outside `1e-5 <= |v| < 1e9`.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::from(io),
        other => Error::Io(format!("{other:?}")),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_real).unwrap_or_default()
}

pub fn write_observations_csv<W: Write>(records: &[ObservationRecord], out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyData("observation list"));
    }
    let mut w = writer(out);
    w.write_record([
        "name",
        "omega_exponent_lo",
        "omega_exponent_hi",
        "vertical_exponent_lo",
        "vertical_exponent_hi",
        "wavenumber_basis",
        "derived_x_lo",
        "derived_x_hi",
        "derived_y_lo",
        "derived_y_hi",
        "notes",
    ])
    .map_err(csv_err)?;
    for r in records {
        let basis = serde_json::to_value(r.wavenumber_basis).expect("enum serialises");
        w.write_record([
            r.name.clone(),
            format_real(r.omega_exponent.lo()),
            format_real(r.omega_exponent.hi()),
            format_real(r.vertical_exponent.lo()),
            format_real(r.vertical_exponent.hi()),
            basis.as_str().unwrap_or_default().to_string(),
            format_real(r.derived_x.lo()),
            format_real(r.derived_x.hi()),
            format_real(r.derived_y.lo()),
            format_real(r.derived_y.hi()),
            r.notes.clone(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

const CURVE_HEADER: [&str; 8] =
    ["x", "y", "normalized_residual", "bracket_width", "axis", "slope", "thickness_below", "thickness_above"];

pub fn write_curve_csv<W: Write>(points: &[CurvePoint], out: W) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyData("curve"));
    }
    let mut w = writer(out);
    w.write_record(CURVE_HEADER).map_err(csv_err)?;
    for p in points {
        let axis = match p.axis {
            SliceAxis::Y => "Y",
            SliceAxis::X => "X",
        };
        w.write_record([
            format_real(p.x),
            format_real(p.y),
            format_real(p.normalized_residual),
            format_real(p.bracket_width),
            axis.to_string(),
            format_real(p.slope),
            opt(p.thickness_below),
            opt(p.thickness_above),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn field(rec: &csv::StringRecord, i: usize, line: usize) -> Result<&str> {
    rec.get(i).ok_or_else(|| Error::Parse { line, msg: format!("missing column {}", i + 1) })
}

fn real(s: &str, line: usize) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse { line, msg: format!("not a number: {s:?}") })
}

fn opt_real(s: &str, line: usize) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        real(s, line).map(Some)
    }
}

fn reader<R: Read>(input: R, header: &[&str]) -> Result<csv::Reader<R>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found = r.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse { line: 1, msg: format!("unexpected header {found:?}") });
    }
    Ok(r)
}

/// Inverse of [`write_curve_csv`] up to printed precision.
pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<CurvePoint>> {
    let mut r = reader(input, &CURVE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let axis = match field(&rec, 4, line)? {
            "Y" => SliceAxis::Y,
            "X" => SliceAxis::X,
            other => return Err(Error::Parse { line, msg: format!("unknown axis {other:?}") }),
        };
        out.push(CurvePoint {
            x: real(field(&rec, 0, line)?, line)?,
            y: real(field(&rec, 1, line)?, line)?,
            normalized_residual: real(field(&rec, 2, line)?, line)?,
            bracket_width: real(field(&rec, 3, line)?, line)?,
            axis,
            slope: real(field(&rec, 5, line)?, line)?,
            thickness_below: opt_real(field(&rec, 6, line)?, line)?,
            thickness_above: opt_real(field(&rec, 7, line)?, line)?,
        });
    }
    Ok(out)
}

const GRID_HEADER: [&str; 5] = ["x", "y", "value", "status", "reference_scale"];

pub fn write_grid_csv<W: Write>(grid: &GridField, out: W) -> Result<()> {
    if grid.x_axis.is_empty() || grid.y_axis.is_empty() {
        return Err(Error::EmptyData("grid"));
    }
    let mut w = writer(out);
    w.write_record(GRID_HEADER).map_err(csv_err)?;
    for (j, y) in grid.y_axis.iter().enumerate() {
        for (i, x) in grid.x_axis.iter().enumerate() {
            w.write_record([
                format_real(*x),
                format_real(*y),
                format_real(grid.values[j][i]),
                grid.status[j][i].as_str().to_string(),
                format_real(grid.reference_scale[j][i]),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_grid_csv`]; rows must come `y`-major as written.
pub fn read_grid_csv<R: Read>(input: R) -> Result<GridField> {
    let mut r = reader(input, &GRID_HEADER)?;
    let mut cells: Vec<(f64, f64, f64, IntegralStatus, f64)> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let status = field(&rec, 3, line)?
            .parse()
            .map_err(|e: Error| Error::Parse { line, msg: e.to_string() })?;
        cells.push((
            real(field(&rec, 0, line)?, line)?,
            real(field(&rec, 1, line)?, line)?,
            real(field(&rec, 2, line)?, line)?,
            status,
            real(field(&rec, 4, line)?, line)?,
        ));
    }
    let Some(&(_, y0, ..)) = cells.first() else {
        return Err(Error::EmptyData("grid"));
    };
    let nx = cells.iter().take_while(|c| c.1 == y0).count();
    if !cells.len().is_multiple_of(nx) {
        return Err(Error::Parse { line: cells.len() + 1, msg: "ragged grid".into() });
    }
    let ny = cells.len() / nx;
    let x_axis: Vec<f64> = cells[..nx].iter().map(|c| c.0).collect();
    let y_axis: Vec<f64> = (0..ny).map(|j| cells[j * nx].1).collect();
    let mut grid = GridField {
        x_axis,
        y_axis,
        values: vec![vec![0.0; nx]; ny],
        status: vec![vec![IntegralStatus::Converged; nx]; ny],
        reference_scale: vec![vec![0.0; nx]; ny],
    };
    for (c, cell) in cells.into_iter().enumerate() {
        let (j, i) = (c / nx, c % nx);
        if cell.0 != grid.x_axis[i] || cell.1 != grid.y_axis[j] {
            return Err(Error::Parse { line: c + 2, msg: "cell out of grid order".into() });
        }
        grid.values[j][i] = cell.2;
        grid.status[j][i] = cell.3;
        grid.reference_scale[j][i] = cell.4;
    }
    Ok(grid)
}

/// Pretty JSON of one top-level object followed by a newline.
pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}
