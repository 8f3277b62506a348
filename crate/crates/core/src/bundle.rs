//! The single-document JSON bundle: field, complex, sheaf and optional
//! function, orientation field and marked vertices.
//!
//! Canonical form: keys sorted, cells and stalks sorted lexicographically by
//! vertex tuple, scalars as `"n"` or `"n/d"` strings, zero stalks and zero
//! matrices omitted, two-space indentation and a trailing newline.

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cellsp::{build_complex, CellComplex};
use crate::error::{Error, Result};
use crate::exactlin::{BoundedComplex, Field, Matrix};
use crate::micro::{MarkedVertexSet, OrientationField};
use crate::morse::PLFunction;
use crate::sheaf::{validate_sheaf, CellularSheaf, ChainMap, Violation};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub field: Field,
    pub complex: CellComplex,
    pub sheaf: CellularSheaf,
    pub function: Option<PLFunction>,
    pub orientation: Option<OrientationField>,
    pub marked: Option<MarkedVertexSet>,
}

impl Bundle {
    pub fn new(complex: CellComplex, sheaf: CellularSheaf) -> Self {
        Bundle { field: sheaf.field(), complex, sheaf, function: None, orientation: None, marked: None }
    }

    /// Sheaf-condition violations; empty for a valid bundle.
    pub fn validate(&self) -> Vec<Violation> {
        validate_sheaf(&self.complex, &self.sheaf)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    format_version: u32,
    field: String,
    complex: ComplexDoc,
    sheaf: SheafDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    function: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<Vec<OrientDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    marked: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexDoc {
    vertices: usize,
    cells: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SheafDoc {
    #[serde(default)]
    stalks: Vec<StalkDoc>,
    #[serde(default)]
    maps: Vec<MapDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StalkDoc {
    cell: Vec<usize>,
    lo: i64,
    ranks: Vec<usize>,
    #[serde(default)]
    differentials: Vec<Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    face: Vec<usize>,
    coface: Vec<usize>,
    matrices: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrientDoc {
    edge: Vec<usize>,
    terminal: usize,
}

fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
        other => Error::Parse(format!("{path}: {other}")),
    }
}

fn matrix(field: Field, rows: usize, cols: usize, data: &[Vec<String>], path: &str) -> Result<Matrix> {
    if data.len() != rows {
        return Err(Error::Parse(format!("{path}: expected {rows} rows, found {}", data.len())));
    }
    let mut m = Matrix::zeros(field, rows, cols);
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!("{path}[{i}]: expected {cols} entries, found {}", row.len())));
        }
        for (j, s) in row.iter().enumerate() {
            m.set(i, j, field.parse(s).map_err(at(&format!("{path}[{i}][{j}]")))?);
        }
    }
    Ok(m)
}

fn rows(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

/// Parses a bundle; syntax and schema errors carry line and column, semantic
/// errors the offending field path. The sheaf is shape-checked but not
/// validated; see [`Bundle::validate`].
pub fn parse_bundle(text: &str) -> Result<Bundle> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Parse(format!("format_version: unsupported version {}", doc.format_version)));
    }
    let field: Field = doc.field.parse().map_err(at("field"))?;
    let x = build_complex(doc.complex.vertices, &doc.complex.cells).map_err(at("complex.cells"))?;
    let mut stalks = vec![BoundedComplex::zero(field); x.len()];
    for (k, s) in doc.sheaf.stalks.iter().enumerate() {
        let path = format!("sheaf.stalks[{k}]");
        let c = x.index_of(&s.cell).ok_or_else(|| Error::Parse(format!("{path}.cell: {:?} is not a cell", s.cell)))?;
        if !stalks[c].is_zero() {
            return Err(Error::Parse(format!("{path}.cell: second stalk for {:?}", s.cell)));
        }
        let expected = s.ranks.len().saturating_sub(1);
        if s.differentials.len() != expected {
            return Err(Error::Parse(format!("{path}.differentials: expected {expected} matrices, found {}", s.differentials.len())));
        }
        let diffs = s
            .differentials
            .iter()
            .enumerate()
            .map(|(i, d)| matrix(field, s.ranks[i + 1], s.ranks[i], d, &format!("{path}.differentials[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        stalks[c] = BoundedComplex::new(field, s.lo, &s.ranks, diffs).map_err(at(&path))?;
    }
    let mut maps: BTreeMap<(usize, usize), ChainMap> = BTreeMap::new();
    for (k, m) in doc.sheaf.maps.iter().enumerate() {
        let path = format!("sheaf.maps[{k}]");
        let s = x.index_of(&m.face).ok_or_else(|| Error::Parse(format!("{path}.face: {:?} is not a cell", m.face)))?;
        let t = x.index_of(&m.coface).ok_or_else(|| Error::Parse(format!("{path}.coface: {:?} is not a cell", m.coface)))?;
        if x.incidence(s, t).is_none() {
            return Err(Error::Parse(format!("{path}: {:?} is not a codimension-1 face of {:?}", m.face, m.coface)));
        }
        let mut cm = ChainMap::new();
        for (deg, data) in &m.matrices {
            let mpath = format!("{path}.matrices.{deg}");
            let n: i64 = deg.parse().map_err(|_| Error::Parse(format!("{mpath}: degree must be an integer")))?;
            cm.insert(n, matrix(field, stalks[t].rank(n), stalks[s].rank(n), data, &mpath)?);
        }
        if maps.insert((s, t), cm).is_some() {
            return Err(Error::Parse(format!("{path}: second map for this face relation")));
        }
    }
    let sheaf = CellularSheaf::from_parts(&x, field, stalks, maps).map_err(at("sheaf"))?;
    let function = doc.function.as_ref().map(|f| function_from_map(&x, f)).transpose().map_err(at("function"))?;
    let orientation = doc
        .orientation
        .as_ref()
        .map(|o| OrientationField::from_tuples(&x, &o.iter().map(|p| (p.edge.clone(), p.terminal)).collect::<Vec<_>>()))
        .transpose()
        .map_err(at("orientation"))?;
    let marked = match &doc.marked {
        None => None,
        Some(m) => {
            if let Some(v) = m.iter().find(|&&v| v >= x.vertex_count()) {
                return Err(Error::Parse(format!("marked: vertex {v} out of range")));
            }
            Some(m.iter().copied().collect())
        }
    };
    Ok(Bundle { field, complex: x, sheaf, function, orientation, marked })
}

fn function_from_map(x: &CellComplex, map: &BTreeMap<String, String>) -> Result<PLFunction> {
    let mut values: Vec<Option<BigRational>> = vec![None; x.vertex_count()];
    for (k, v) in map {
        let idx: usize = k.parse().map_err(|_| Error::Parse(format!("key {k:?} is not a vertex")))?;
        if idx >= values.len() {
            return Err(Error::Parse(format!("vertex {idx} out of range")));
        }
        let q = match Field::Rational.parse(v)? {
            crate::exactlin::Scalar::Q(q) => q,
            _ => unreachable!("rational field"),
        };
        values[idx] = Some(q);
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Parse(format!("no value for vertex {i}"))))
        .collect::<Result<Vec<_>>>()?;
    PLFunction::new(x, values)
}

/// Reads a function file: either a bare `{"vertex": "value"}` map or a
/// document with a `function` member.
pub fn parse_function(x: &CellComplex, text: &str) -> Result<PLFunction> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let inner = v.get("function").cloned().unwrap_or(v);
    let map: BTreeMap<String, String> = serde_json::from_value(inner).map_err(|e| Error::Parse(format!("function: {e}")))?;
    function_from_map(x, &map).map_err(at("function"))
}

fn rational_text(q: &BigRational) -> String {
    crate::exactlin::Scalar::Q(q.clone()).to_string()
}

/// Canonical text of a bundle.
pub fn write_bundle(b: &Bundle) -> String {
    let x = &b.complex;
    let mut cells: Vec<Vec<usize>> = x.cells().to_vec();
    cells.sort();
    let mut stalks: Vec<StalkDoc> = (0..x.len())
        .filter(|&c| !b.sheaf.stalk(c).is_zero() && b.sheaf.stalk(c).total_rank() > 0)
        .map(|c| {
            let s = b.sheaf.stalk(c);
            StalkDoc {
                cell: x.cell(c).to_vec(),
                lo: s.lo(),
                ranks: s.ranks(),
                differentials: (s.lo()..s.hi()).map(|n| rows(&s.differential(n))).collect(),
            }
        })
        .collect();
    stalks.sort_by(|a, b| a.cell.cmp(&b.cell));
    let mut maps: Vec<MapDoc> = b
        .sheaf
        .maps()
        .iter()
        .filter_map(|(&(s, t), cm)| {
            let matrices: BTreeMap<String, Vec<Vec<String>>> =
                cm.iter().filter(|(_, m)| !m.is_zero()).map(|(n, m)| (n.to_string(), rows(m))).collect();
            (!matrices.is_empty()).then(|| MapDoc { face: x.cell(s).to_vec(), coface: x.cell(t).to_vec(), matrices })
        })
        .collect();
    maps.sort_by(|a, b| (&a.face, &a.coface).cmp(&(&b.face, &b.coface)));
    let function = b
        .function
        .as_ref()
        .map(|f| f.values().iter().enumerate().map(|(i, q)| (i.to_string(), rational_text(q))).collect());
    let orientation = b.orientation.as_ref().map(|o| {
        let mut v: Vec<OrientDoc> = o.pairs().map(|(e, t)| OrientDoc { edge: x.cell(e).to_vec(), terminal: t }).collect();
        v.sort_by(|a, b| a.edge.cmp(&b.edge));
        v
    });
    let doc = Doc {
        format_version: FORMAT_VERSION,
        field: b.field.to_string(),
        complex: ComplexDoc { vertices: x.vertex_count(), cells },
        sheaf: SheafDoc { stalks, maps },
        function,
        orientation,
        marked: b.marked.as_ref().map(|m| m.iter().copied().collect()),
    };
    // through Value so that every object's keys come out sorted
    let value = serde_json::to_value(&doc).expect("bundle documents serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    text
}

pub fn read_bundle_file(path: &Path) -> Result<Bundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_bundle(&text)
}

pub fn write_bundle_file(b: &Bundle, path: &Path) -> Result<()> {
    std::fs::write(path, write_bundle(b)).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
