//! Deterministic file formats: field/spectrum/vortex CSV, 16-bit PGM
//! intensity maps, HSV-wheel PPM phase maps, and the JSON run manifest.
//!
//! All text output is locale independent. Field samples are written with 17
//! significant digits so a parsed CSV reproduces the original f64 bits.

use num_complex::Complex64;
use std::io::{self, BufRead, Write};

use crate::propagation::FieldGrid;
use crate::vortex::VortexSet;

/// CSV of the complex field: header `x,y,re,im`, row-major, x fastest.
pub fn write_field_csv<W: Write>(mut out: W, grid: &FieldGrid) -> io::Result<()> {
    writeln!(out, "x,y,re,im")?;
    let n = grid.n();
    for iy in 0..n {
        let y = grid.coord(iy);
        for ix in 0..n {
            let x = grid.coord(ix);
            let v = grid.at(ix, iy);
            writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", x, y, v.re, v.im)?;
        }
    }
    Ok(())
}

/// Failure while parsing a field CSV; carries the 1-based line number.
#[derive(Debug)]
pub struct MalformedCsv {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for MalformedCsv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for MalformedCsv {}

/// Parse a field CSV back into a grid. The samples must form a complete
/// odd-sided square in the writer's row-major order.
pub fn read_field_csv<R: BufRead>(reader: R) -> Result<FieldGrid, MalformedCsv> {
    let fail = |line: usize, message: String| MalformedCsv { line, message };
    let mut rows: Vec<(f64, f64, Complex64)> = Vec::new();
    let mut lineno = 0usize;
    for line in reader.lines() {
        lineno += 1;
        let line = line.map_err(|e| fail(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if lineno == 1 {
            if trimmed != "x,y,re,im" {
                return Err(fail(1, format!("expected header x,y,re,im, got {trimmed}")));
            }
            continue;
        }
        let parts: Vec<&str> = trimmed.split(',').collect();
        if parts.len() != 4 {
            return Err(fail(
                lineno,
                format!("expected 4 fields, got {}", parts.len()),
            ));
        }
        let mut vals = [0.0f64; 4];
        for (slot, text) in vals.iter_mut().zip(&parts) {
            *slot = text
                .parse()
                .map_err(|e| fail(lineno, format!("bad number {text:?}: {e}")))?;
        }
        rows.push((vals[0], vals[1], Complex64::new(vals[2], vals[3])));
    }
    let count = rows.len();
    let n = (count as f64).sqrt().round() as usize;
    if n * n != count || n < 3 || n.is_multiple_of(2) {
        return Err(fail(
            lineno,
            format!("sample count {count} is not an odd-sided square"),
        ));
    }
    let extent = rows.iter().map(|r| r.0.abs()).fold(0.0, f64::max);
    if extent.is_nan() || extent <= 0.0 {
        return Err(fail(lineno, "degenerate coordinates".into()));
    }
    // verify the writer's layout so vortex coordinates are trustworthy
    let step = 2.0 * extent / (n - 1) as f64;
    for (idx, row) in rows.iter().enumerate() {
        let expect_x = -extent + step * (idx % n) as f64;
        let expect_y = -extent + step * (idx / n) as f64;
        if (row.0 - expect_x).abs() > 1e-9 * extent || (row.1 - expect_y).abs() > 1e-9 * extent {
            return Err(fail(
                idx + 2,
                format!("coordinates out of order: ({}, {})", row.0, row.1),
            ));
        }
    }
    let samples = rows.into_iter().map(|r| r.2).collect();
    Ok(FieldGrid::new(n, extent, samples, 0.0, 0.0))
}

/// Spectrum CSV: `m,re_c,im_c,probability` sorted by m, then a trailing
/// `# tail_probability=<value>` comment.
pub fn write_spectrum_csv<W: Write>(
    mut out: W,
    spec: &crate::analytic::SpectralDecomposition,
) -> io::Result<()> {
    writeln!(out, "m,re_c,im_c,probability")?;
    for e in spec.entries() {
        writeln!(out, "{},{},{},{}", e.m, e.c.re, e.c.im, e.c.norm_sqr())?;
    }
    writeln!(out, "# tail_probability={}", spec.tail_probability())
}

/// Vortex CSV: `x,y,charge` plus `# net_charge_within_radius=<int>`.
pub fn write_vortex_csv<W: Write>(
    mut out: W,
    vset: &VortexSet,
    radius: f64,
    net_charge: i64,
) -> io::Result<()> {
    writeln!(out, "x,y,charge")?;
    for v in vset.vortices() {
        writeln!(out, "{:.16e},{:.16e},{}", v.x, v.y, v.charge)?;
    }
    writeln!(out, "# radius={radius}")?;
    writeln!(out, "# net_charge_within_radius={net_charge}")
}

/// Binary 16-bit PGM (P5, big-endian samples), max-normalised.
/// Rows run from +y down to −y so images display with y upward.
pub fn write_intensity_pgm<W: Write>(mut out: W, grid: &FieldGrid) -> io::Result<()> {
    let n = grid.n();
    let intensity = grid.intensity();
    let peak = intensity.iter().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 { 65535.0 / peak } else { 0.0 };
    write!(out, "P5\n{n} {n}\n65535\n")?;
    let mut buf = Vec::with_capacity(2 * n * n);
    for iy in (0..n).rev() {
        for ix in 0..n {
            let v = (intensity[iy * n + ix] * scale).round().clamp(0.0, 65535.0) as u16;
            buf.extend_from_slice(&v.to_be_bytes());
        }
    }
    out.write_all(&buf)
}

/// Map h ∈ [0, 1) on the fully saturated HSV wheel to RGB bytes.
pub fn hue_to_rgb(h: f64) -> [u8; 3] {
    let h6 = (h - h.floor()) * 6.0;
    let x = 1.0 - (h6 % 2.0 - 1.0).abs();
    let (r, g, b) = match h6 as usize {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

/// Binary 8-bit PPM (P6) phase map: hue = phase/2π at full saturation and
/// value, so phase 0 and 2π share one colour. Row order as in the PGM.
pub fn write_phase_ppm<W: Write>(mut out: W, grid: &FieldGrid) -> io::Result<()> {
    let n = grid.n();
    let phase = grid.phase();
    write!(out, "P6\n{n} {n}\n255\n")?;
    let mut buf = Vec::with_capacity(3 * n * n);
    for iy in (0..n).rev() {
        for ix in 0..n {
            buf.extend_from_slice(&hue_to_rgb(phase[iy * n + ix] / std::f64::consts::TAU));
        }
    }
    out.write_all(&buf)
}

/// Record of one CLI invocation: the resolved configuration and the files
/// it produced. Re-running the recorded subcommand reproduces the outputs
/// bit-identically; `created_unix` is the only field allowed to differ.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub created_unix: u64,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: serde_json::Value, outputs: Vec<String>) -> Self {
        RunManifest {
            tool: "frac-oam".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            created_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
            outputs,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialises")
    }
}
