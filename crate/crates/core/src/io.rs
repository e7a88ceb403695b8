//! Fixed-format serialization: vectors as JSON, tables and scan
//! traces as CSV.
//!
//! The formats are part of the tool's external contract and are kept
//! deliberately small:
//!
//! * vectors — JSON list of `{"vertex": .., "num": .., "den": ..}`
//!   (exact) or `{"vertex": .., "re": .., "im": ..}` (approximate)
//!   entries; a file holds one kind, never a mixture, and repeated
//!   vertices accumulate;
//! * per-vertex weight tables — CSV `i,j,re,im` (grid vertices only;
//!   exact values are rounded to doubles on the way out);
//! * per-layer weight lists — CSV `i,re,im` with `i` the 0-based layer
//!   index, rows consecutive from layer 0; a loaded list has no tail
//!   rule;
//! * scan traces — CSV `n,quantity`;
//! * region scans — CSV `r,s_re,s_im,in_norm,abs_lambda,region-tag`;
//! * strip right-inverse coefficient tables — CSV
//!   `i,s,numerator,denominator`, exact.
//!
//! Writers emit a header line and `\n` separators and are
//! deterministic (same value, same bytes). Readers tolerate `\r\n`,
//! blank lines, and an optional header, and report malformed content
//! with 1-based line numbers.

use crate::criteria::ScanPoint;
use crate::error::{Error, Result};
use crate::graph::{GraphModel, Vertex};
use crate::rightinv::AlphaTable;
use crate::space::{LayerTail, LayerWeights, SparseVector, WeightTable, WeightValue};
use crate::spectral::{RegionReport, RegionTag};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A parsed vector file: exact entries or approximate ones.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorData {
    Exact(SparseVector<BigRational>),
    Approx(SparseVector<Complex64>),
}

#[derive(Serialize, Deserialize)]
struct VecEntry {
    vertex: Vertex,
    #[serde(flatten)]
    value: VecValue,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VecValue {
    Exact { num: String, den: String },
    Approx { re: f64, im: f64 },
}

/// One-line JSON for an exact vector.
pub fn vector_to_json_exact(vec: &SparseVector<BigRational>) -> String {
    let entries: Vec<VecEntry> = vec
        .iter()
        .map(|(v, c)| VecEntry {
            vertex: *v,
            value: VecValue::Exact {
                num: c.numer().to_string(),
                den: c.denom().to_string(),
            },
        })
        .collect();
    serde_json::to_string(&entries).expect("vector entries always serialize")
}

/// One-line JSON for an approximate vector.
pub fn vector_to_json_approx(vec: &SparseVector<Complex64>) -> String {
    let entries: Vec<VecEntry> = vec
        .iter()
        .map(|(v, c)| VecEntry {
            vertex: *v,
            value: VecValue::Approx { re: c.re, im: c.im },
        })
        .collect();
    serde_json::to_string(&entries).expect("vector entries always serialize")
}

/// Parses a vector file against a model. An empty list is the exact
/// zero vector; mixing exact and approximate entries is an error.
pub fn vector_from_json(model: GraphModel, text: &str) -> Result<VectorData> {
    let entries: Vec<VecEntry> =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("vector JSON: {e}")))?;
    let exact = entries
        .iter()
        .all(|e| matches!(e.value, VecValue::Exact { .. }));
    let approx = entries
        .iter()
        .all(|e| matches!(e.value, VecValue::Approx { .. }));
    if exact {
        let mut vec = SparseVector::zero(model);
        for (pos, e) in entries.iter().enumerate() {
            let VecValue::Exact { num, den } = &e.value else {
                unreachable!()
            };
            let num: BigInt = num
                .parse()
                .map_err(|_| Error::parse(format!("entry {pos}: bad numerator {num:?}")))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| Error::parse(format!("entry {pos}: bad denominator {den:?}")))?;
            if den.is_zero() {
                return Err(Error::parse(format!("entry {pos}: zero denominator")));
            }
            vec.add_assign_at(e.vertex, BigRational::new(num, den))?;
        }
        Ok(VectorData::Exact(vec))
    } else if approx {
        let mut vec = SparseVector::zero(model);
        for e in &entries {
            let VecValue::Approx { re, im } = e.value else {
                unreachable!()
            };
            vec.add_assign_at(e.vertex, Complex64::new(re, im))?;
        }
        Ok(VectorData::Approx(vec))
    } else {
        Err(Error::parse(
            "vector JSON mixes exact (num/den) and approximate (re/im) entries",
        ))
    }
}

/// Splits CSV text into trimmed data lines, skipping blanks and an
/// optional header (any first line whose first field is not a
/// number). Yields 1-based line numbers for error reporting.
fn csv_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim_end_matches('\r').trim()))
        .filter(|(_, line)| !line.is_empty())
        .filter(|(lineno, line)| {
            let first = line.split(',').next().unwrap_or("").trim();
            !(*lineno == 1 && first.parse::<f64>().is_err())
        })
}

fn field<'a>(
    fields: &mut impl Iterator<Item = &'a str>,
    lineno: usize,
    name: &str,
) -> Result<&'a str> {
    fields
        .next()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::parse(format!("line {lineno}: missing {name} column")))
}

fn parse_num<T: std::str::FromStr>(raw: &str, lineno: usize, name: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::parse(format!("line {lineno}: bad {name} value {raw:?}")))
}

fn end_of_line<'a>(mut fields: impl Iterator<Item = &'a str>, lineno: usize) -> Result<()> {
    match fields.next() {
        None => Ok(()),
        Some(extra) => Err(Error::parse(format!(
            "line {lineno}: unexpected trailing field {extra:?}"
        ))),
    }
}

/// CSV image of a per-vertex weight table (`i,j,re,im`). Grid
/// vertices only; exact values round to doubles.
pub fn weight_table_to_csv(table: &WeightTable) -> Result<String> {
    let mut out = String::from("i,j,re,im\n");
    for (v, value) in table.iter() {
        let Vertex::Grid { i, j } = v else {
            return Err(Error::domain(
                "the i,j,re,im table format covers grid vertices only",
            ));
        };
        let (re, im) = match value {
            WeightValue::Exact(r) => (r.to_f64().unwrap_or(f64::NAN), 0.0),
            WeightValue::Approx(z) => (z.re, z.im),
        };
        out.push_str(&format!("{i},{j},{re},{im}\n"));
    }
    Ok(out)
}

/// Loads a per-vertex table from `i,j,re,im` CSV. Values come back
/// approximate; duplicate vertices are rejected.
pub fn weight_table_from_csv(text: &str) -> Result<WeightTable> {
    let mut entries = Vec::new();
    for (lineno, line) in csv_lines(text) {
        let mut fields = line.split(',');
        let i: i64 = parse_num(field(&mut fields, lineno, "i")?, lineno, "i")?;
        let j: i64 = parse_num(field(&mut fields, lineno, "j")?, lineno, "j")?;
        let re: f64 = parse_num(field(&mut fields, lineno, "re")?, lineno, "re")?;
        let im: f64 = parse_num(field(&mut fields, lineno, "im")?, lineno, "im")?;
        end_of_line(fields, lineno)?;
        let v = Vertex::grid(i, j);
        if entries.iter().any(|(u, _)| *u == v) {
            return Err(Error::parse(format!("line {lineno}: duplicate vertex {v}")));
        }
        entries.push((v, WeightValue::Approx(Complex64::new(re, im))));
    }
    Ok(WeightTable::new(entries, None))
}

/// CSV image of a per-layer weight list (`i,re,im`, layers from 0).
/// The tail rule is not representable in this format and is dropped.
pub fn layer_weights_to_csv(layers: &LayerWeights) -> String {
    let mut out = String::from("i,re,im\n");
    for (i, value) in layers.values.iter().enumerate() {
        let (re, im) = match value {
            WeightValue::Exact(r) => (r.to_f64().unwrap_or(f64::NAN), 0.0),
            WeightValue::Approx(z) => (z.re, z.im),
        };
        out.push_str(&format!("{i},{re},{im}\n"));
    }
    out
}

/// Loads a per-layer list from `i,re,im` CSV. Rows must cover layers
/// `0, 1, 2, ...` consecutively; the loaded list has no tail rule, so
/// lookups past the last row are domain errors at evaluation time.
pub fn layer_weights_from_csv(text: &str) -> Result<LayerWeights> {
    let mut values = Vec::new();
    for (lineno, line) in csv_lines(text) {
        let mut fields = line.split(',');
        let i: usize = parse_num(field(&mut fields, lineno, "i")?, lineno, "i")?;
        let re: f64 = parse_num(field(&mut fields, lineno, "re")?, lineno, "re")?;
        let im: f64 = parse_num(field(&mut fields, lineno, "im")?, lineno, "im")?;
        end_of_line(fields, lineno)?;
        if i != values.len() {
            return Err(Error::parse(format!(
                "line {lineno}: layer {i} out of order; expected layer {}",
                values.len()
            )));
        }
        values.push(WeightValue::Approx(Complex64::new(re, im)));
    }
    Ok(LayerWeights {
        values,
        tail: LayerTail::None,
    })
}

/// CSV image of a criterion scan trace (`n,quantity`).
pub fn trace_to_csv(points: &[ScanPoint]) -> String {
    let mut out = String::from("n,quantity\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.n, p.value));
    }
    out
}

/// CSV image of a region scan
/// (`r,s_re,s_im,in_norm,abs_lambda,region-tag`).
pub fn region_to_csv(report: &RegionReport) -> String {
    let mut out = String::from("r,s_re,s_im,in_norm,abs_lambda,region-tag\n");
    for p in &report.points {
        let tag = match p.tag {
            RegionTag::SubUnit => "sub-unit",
            RegionTag::SuperUnit => "super-unit",
            RegionTag::Neutral => "neutral",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.r, p.s_re, p.s_im, p.in_norm, p.abs_lambda, tag
        ));
    }
    out
}

/// CSV image of a strip right-inverse coefficient table
/// (`i,s,numerator,denominator`), exact.
pub fn alpha_to_csv(table: &AlphaTable) -> String {
    let mut out = String::from("i,s,numerator,denominator\n");
    for i in 1..=table.rows() {
        for s in 1..=i {
            let alpha = table
                .entry(i, s)
                .expect("indices inside the table's triangle");
            out.push_str(&format!("{i},{s},{},{}\n", alpha.numer(), alpha.denom()));
        }
    }
    out
}
