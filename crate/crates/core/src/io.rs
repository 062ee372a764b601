//! CSV artifacts with JSON sidecars.
//!
//! Schemas: curves `s,re,im`; samples `y_ij,y_kj,y_il`; densities `x,f`.
//! Floats are written in shortest round-trip form, so reading a file back
//! reproduces the values bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deconvolution::DensityEstimate;
use crate::error::{Error, Result};
use crate::model::{ComplexCurve, CurveKind, FreqGrid, ModelConfig, SampleSet, TripleSample};

#[derive(Serialize, Deserialize)]
struct CurveRow {
    s: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct DensityRow {
    x: f64,
    f: f64,
}

/// `foo.csv` → `foo.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &[u8]) -> Result<Vec<(u64, T)>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let row: T = rec?;
        // header is line 1; csv positions are 1-based as well
        out.push((out.len() as u64 + 2, row));
    }
    Ok(out)
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    File::open(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}

pub fn curve_to_csv(curve: &ComplexCurve) -> Result<Vec<u8>> {
    to_csv(curve.points().map(|(s, v)| CurveRow {
        s,
        re: v.re,
        im: v.im,
    }))
}

pub fn write_curve_csv(curve: &ComplexCurve, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, curve_to_csv(curve)?)?;
    Ok(())
}

/// Parses a curve, rebuilding its grid from the `s` column.
pub fn curve_from_csv(text: &[u8], kind: CurveKind) -> Result<ComplexCurve> {
    let rows: Vec<(u64, CurveRow)> = from_csv(text)?;
    if rows.len() < 3 {
        return Err(Error::Csv {
            line: rows.last().map_or(1, |r| r.0),
            reason: "a curve needs at least three rows".into(),
        });
    }
    for (line, r) in &rows {
        if !(r.s.is_finite() && r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::Csv {
                line: *line,
                reason: "non-finite value".into(),
            });
        }
    }
    let s_max = rows[rows.len() - 1].1.s;
    let grid = FreqGrid::new(s_max, rows.len()).map_err(|e| Error::Csv {
        line: rows[rows.len() - 1].0,
        reason: format!("rows do not form a symmetric odd grid: {e}"),
    })?;
    let tol = 1e-9 * s_max.max(1.0);
    for (i, (line, r)) in rows.iter().enumerate() {
        if (r.s - grid.value(i)).abs() > tol {
            return Err(Error::Csv {
                line: *line,
                reason: format!("s = {} breaks the uniform grid (expected {})", r.s, grid.value(i)),
            });
        }
    }
    let values = rows.iter().map(|(_, r)| Complex64::new(r.re, r.im)).collect();
    ComplexCurve::new(grid, values, kind)
}

pub fn read_curve_csv(path: impl AsRef<Path>, kind: CurveKind) -> Result<ComplexCurve> {
    curve_from_csv(&read_bytes(path.as_ref())?, kind)
}

/// Provenance stored next to a samples CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplesSidecar {
    pub n: usize,
    pub seed: u64,
    pub config: Option<ModelConfig>,
}

pub fn samples_to_csv(samples: &SampleSet) -> Result<Vec<u8>> {
    to_csv(samples.triples().iter())
}

pub fn samples_sidecar(samples: &SampleSet) -> SamplesSidecar {
    SamplesSidecar {
        n: samples.len(),
        seed: samples.seed(),
        config: samples.config().copied(),
    }
}

/// Writes the CSV and its sidecar.
pub fn write_samples(samples: &SampleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv = samples_to_csv(samples)?;
    let side = serde_json::to_string_pretty(&samples_sidecar(samples))?;
    std::fs::write(path, csv)?;
    let mut f = File::create(sidecar_path(path))?;
    writeln!(f, "{side}")?;
    Ok(())
}

/// Reads samples; seed and config come from the sidecar when present.
pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    let rows: Vec<(u64, TripleSample)> = from_csv(&read_bytes(path)?)?;
    for (line, t) in &rows {
        if !t.is_finite() {
            return Err(Error::Csv {
                line: *line,
                reason: "non-finite value".into(),
            });
        }
    }
    let side = sidecar_path(path);
    let meta: Option<SamplesSidecar> = if side.exists() {
        Some(serde_json::from_slice(&read_bytes(&side)?)?)
    } else {
        None
    };
    SampleSet::new(
        rows.into_iter().map(|(_, t)| t).collect(),
        meta.as_ref().map_or(0, |m| m.seed),
        meta.and_then(|m| m.config),
    )
}

/// Metadata stored next to a density CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySidecar {
    pub cutoff: f64,
    pub window: crate::deconvolution::Window,
    pub imaginary_residual: f64,
    pub mass: f64,
    pub negative_mass: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

pub fn density_to_csv(est: &DensityEstimate) -> Result<Vec<u8>> {
    to_csv(est.points().map(|(x, f)| DensityRow { x, f }))
}

pub fn density_sidecar(est: &DensityEstimate) -> DensitySidecar {
    DensitySidecar {
        cutoff: est.cutoff,
        window: est.window,
        imaginary_residual: est.imaginary_residual,
        mass: est.mass,
        negative_mass: est.negative_mass,
        x_min: est.x_grid.x_min,
        x_max: est.x_grid.x_max,
        n_points: est.x_grid.n_points,
    }
}

pub fn write_density(est: &DensityEstimate, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, density_to_csv(est)?)?;
    let mut f = File::create(sidecar_path(path))?;
    writeln!(f, "{}", serde_json::to_string_pretty(&density_sidecar(est))?)?;
    Ok(())
}

/// `(x, f)` pairs of a density CSV.
pub fn read_density_points(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let rows: Vec<(u64, DensityRow)> = from_csv(&read_bytes(path.as_ref())?)?;
    Ok(rows.into_iter().map(|(_, r)| (r.x, r.f)).collect())
}

/// Rebuilds a density estimate from its CSV and sidecar.
pub fn read_density(path: impl AsRef<Path>) -> Result<DensityEstimate> {
    let path = path.as_ref();
    let points = read_density_points(path)?;
    let meta: DensitySidecar = serde_json::from_slice(&read_bytes(&sidecar_path(path))?)?;
    let x_grid = crate::deconvolution::SpatialGrid::new(meta.x_min, meta.x_max, meta.n_points)?;
    if points.len() != meta.n_points {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: meta.n_points,
        });
    }
    Ok(DensityEstimate {
        x_grid,
        values: points.into_iter().map(|(_, f)| f).collect(),
        cutoff: meta.cutoff,
        window: meta.window,
        imaginary_residual: meta.imaginary_residual,
        mass: meta.mass,
        negative_mass: meta.negative_mass,
    })
}
