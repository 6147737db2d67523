//! File formats: matrices as JSON `{dim, data}` (row-major) or CSV, curves as
//! JSON `{manifold, dim, grid, values}`, and the canonical JSON writer.
//!
//! The canonical writer prints every float with 17 significant digits in
//! scientific notation so identical inputs produce byte-identical files.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::curves::{ManifoldTag, SampledCurve};
use crate::error::{Error, Result};
use crate::matfun::{RealMatrix, SpectralTolerance};

/// A square matrix in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &RealMatrix) -> Self {
        let dim = m.nrows();
        let data = (0..dim).flat_map(|i| (0..dim).map(move |j| m[(i, j)])).collect();
        Self { dim, data }
    }

    pub fn to_matrix(&self) -> Result<RealMatrix> {
        check_dim(self.dim, "dim")?;
        if self.data.len() != self.dim * self.dim {
            return Err(Error::format(
                "data",
                format!("expected {} entries, found {}", self.dim * self.dim, self.data.len()),
            ));
        }
        if let Some(k) = self.data.iter().position(|x| !x.is_finite()) {
            return Err(Error::format(format!("data[{k}]"), "entry is not finite"));
        }
        Ok(RealMatrix::from_row_slice(self.dim, self.dim, &self.data))
    }
}

/// A sampled curve; `values[i]` is the row-major matrix at `grid[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveFile {
    pub manifold: ManifoldTag,
    pub dim: usize,
    pub grid: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl CurveFile {
    pub fn from_curve(curve: &SampledCurve) -> Self {
        Self {
            manifold: curve.tag(),
            dim: curve.dim(),
            grid: curve.grid().to_vec(),
            values: curve
                .values()
                .iter()
                .map(|m| MatrixFile::from_matrix(m).data)
                .collect(),
        }
    }

    pub fn to_curve(&self, tol: SpectralTolerance) -> Result<SampledCurve> {
        check_dim(self.dim, "dim")?;
        if self.grid.len() != self.values.len() {
            return Err(Error::format(
                "values",
                format!("expected {} matrices (one per grid node), found {}", self.grid.len(), self.values.len()),
            ));
        }
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, data)| {
                MatrixFile {
                    dim: self.dim,
                    data: data.clone(),
                }
                .to_matrix()
                .map_err(|e| prefix_field(e, &format!("values[{i}]")))
            })
            .collect::<Result<Vec<_>>>()?;
        SampledCurve::new(self.grid.clone(), values, self.manifold, tol)
    }
}

fn prefix_field(e: Error, prefix: &str) -> Error {
    match e {
        Error::Format { field, message } if field == "data" => Error::format(prefix, message),
        Error::Format { field, message } => {
            Error::format(format!("{prefix}{}", field.trim_start_matches("data")), message)
        }
        other => other,
    }
}

fn check_dim(dim: usize, field: &str) -> Result<()> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::format(field, format!("must be even and positive, got {dim}")));
    }
    Ok(())
}

fn field<'a>(object: &'a Value, name: &str) -> Result<&'a Value> {
    object
        .get(name)
        .ok_or_else(|| Error::format(name, "missing"))
}

fn as_dim(value: &Value) -> Result<usize> {
    value
        .as_u64()
        .map(|d| d as usize)
        .ok_or_else(|| Error::format("dim", "must be a non-negative integer"))
}

fn as_reals(value: &Value, name: &str) -> Result<Vec<f64>> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::format(name, "must be an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, x)| {
            x.as_f64()
                .ok_or_else(|| Error::format(format!("{name}[{k}]"), "must be a number"))
        })
        .collect()
}

fn parse_json(text: &str) -> Result<Value> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::format("<document>", e.to_string()))?;
    if !value.is_object() {
        return Err(Error::format("<document>", "expected a JSON object"));
    }
    Ok(value)
}

/// Parses `{"dim": d, "data": [...]}`.
pub fn parse_matrix_json(text: &str) -> Result<RealMatrix> {
    let value = parse_json(text)?;
    let dim = as_dim(field(&value, "dim")?)?;
    let data = as_reals(field(&value, "data")?, "data")?;
    MatrixFile { dim, data }.to_matrix()
}

/// Parses `dim` rows of `dim` comma-separated reals.
pub fn parse_matrix_csv(text: &str) -> Result<RealMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(format!("row {}", i + 1), e.to_string()))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                cell.parse::<f64>().map_err(|_| {
                    Error::format(format!("row {}, column {}", i + 1, j + 1), format!("'{cell}' is not a number"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let dim = rows.len();
    check_dim(dim, "rows")?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::format(
                format!("row {}", i + 1),
                format!("expected {dim} columns, found {}", row.len()),
            ));
        }
    }
    MatrixFile {
        dim,
        data: rows.concat(),
    }
    .to_matrix()
    .map_err(|e| match e {
        Error::Format { field, message } if field.starts_with("data[") => {
            let k: usize = field[5..field.len() - 1].parse().unwrap_or(0);
            Error::format(format!("row {}, column {}", k / dim + 1, k % dim + 1), message)
        }
        other => other,
    })
}

/// Reads a matrix, treating `.csv` files (or content not starting with `{`) as CSV.
pub fn read_matrix(path: &Path) -> Result<RealMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        || !text.trim_start().starts_with('{');
    if is_csv {
        parse_matrix_csv(&text)
    } else {
        parse_matrix_json(&text)
    }
}

pub fn matrix_to_json(m: &RealMatrix) -> String {
    to_canonical_json(&MatrixFile::from_matrix(m))
}

pub fn write_matrix(path: &Path, m: &RealMatrix) -> Result<()> {
    write_text(path, &matrix_to_json(m))
}

/// Parses a curve file and validates it as a [`SampledCurve`].
pub fn parse_curve_json(text: &str, tol: SpectralTolerance) -> Result<SampledCurve> {
    let value = parse_json(text)?;
    let manifold = field(&value, "manifold")?
        .as_str()
        .ok_or_else(|| Error::format("manifold", "must be a string"))?
        .parse::<ManifoldTag>()
        .map_err(|e| Error::format("manifold", e.to_string()))?;
    let dim = as_dim(field(&value, "dim")?)?;
    let grid = as_reals(field(&value, "grid")?, "grid")?;
    let values = field(&value, "values")?
        .as_array()
        .ok_or_else(|| Error::format("values", "must be an array of arrays"))?
        .iter()
        .enumerate()
        .map(|(i, v)| as_reals(v, &format!("values[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    CurveFile {
        manifold,
        dim,
        grid,
        values,
    }
    .to_curve(tol)
}

pub fn read_curve(path: &Path, tol: SpectralTolerance) -> Result<SampledCurve> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_curve_json(&text, tol)
}

pub fn curve_to_json(curve: &SampledCurve) -> String {
    to_canonical_json(&CurveFile::from_curve(curve))
}

pub fn write_curve(path: &Path, curve: &SampledCurve) -> Result<()> {
    write_text(path, &curve_to_json(curve))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// `x` with 17 significant digits, or `NaN`/`inf`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty-printed JSON with fixed float formatting.
struct CanonicalFormatter<'a> {
    pretty: PrettyFormatter<'a>,
}

impl Formatter for CanonicalFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

/// Serializes `value` with two-space indentation, 17 significant digits for
/// floats, `null` for non-finite floats, and a trailing newline.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let formatter = CanonicalFormatter {
        pretty: PrettyFormatter::with_indent(b"  "),
    };
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, formatter);
    value
        .serialize(&mut serializer)
        .expect("serializing to memory does not fail");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON output is UTF-8")
}
