use std::path::Path;

use anyhow::{anyhow, bail, Context};
use epsilon_cells::bundle::{parse_function, read_bundle_file};
use epsilon_cells::cellsp::CellSet;
use epsilon_cells::exactlin::{cohomology as cohomology_of, torsion};
use epsilon_cells::micro::{characteristic_cycle, check_one_manifold, check_transversal, epsilon_factorization, microlocal_index};
use epsilon_cells::morse::morse_filtration;
use epsilon_cells::sheaf::{global_euler, sections_complex, Violation};
use epsilon_cells::{Bundle, CellComplex, MarkedVertexSet, OrientationField, PLFunction};
use serde_json::{json, Value};

use crate::report::Report;

fn load(path: &Path) -> anyhow::Result<Bundle> {
    read_bundle_file(path).map_err(|e| anyhow!("{e}"))
}

/// Loads and refuses bundles whose sheaf is invalid.
fn load_valid(path: &Path) -> anyhow::Result<Bundle> {
    let b = load(path)?;
    if let Some(v) = b.validate().first() {
        bail!("{}: invalid sheaf: {}", path.display(), describe(&b.complex, v));
    }
    Ok(b)
}

fn cell(x: &CellComplex, c: usize) -> String {
    format!("{:?}", x.cell(c))
}

fn describe(x: &CellComplex, v: &Violation) -> String {
    match *v {
        Violation::NotChainMap { face, coface, degree } => {
            format!("map {} -> {} is not a chain map in degree {degree}", cell(x, face), cell(x, coface))
        }
        Violation::NonCommutingSquare { face, coface, via, degree } => format!(
            "square {} -> {{{}, {}}} -> {} does not commute in degree {degree}",
            cell(x, face),
            cell(x, via.0),
            cell(x, via.1),
            cell(x, coface)
        ),
    }
}

fn dims_json(h: &[(i64, usize)]) -> Value {
    Value::Object(h.iter().map(|(n, d)| (n.to_string(), json!(d))).collect())
}

fn dims_text(h: &[(i64, usize)]) -> String {
    let nonzero: Vec<String> = h.iter().filter(|p| p.1 > 0).map(|(n, d)| format!("H^{n} = {d}")).collect();
    if nonzero.is_empty() {
        "acyclic".into()
    } else {
        nonzero.join(", ")
    }
}

pub fn check(path: &Path) -> anyhow::Result<Report> {
    let b = load(path)?;
    let x = &b.complex;
    let mut problems: Vec<String> = b.validate().iter().map(|v| describe(x, v)).collect();
    if let (Some(nu), Some(y)) = (&b.orientation, &b.marked) {
        match check_transversal(x, &b.sheaf, nu, y) {
            Ok(bad) => problems.extend(bad.iter().map(|v| format!("not transversal at vertex {v}: its lens complex is not acyclic"))),
            Err(e) => problems.push(format!("orientation: {e}")),
        }
    } else if let Some(nu) = &b.orientation {
        if let Err(e) = nu.check_valid_off(x, &MarkedVertexSet::new()) {
            problems.push(format!("orientation: {e}"));
        }
    }
    let mut lines = vec![format!(
        "{}: field {}, {} vertices, {} cells, dimension {}",
        path.display(),
        b.field,
        x.vertex_count(),
        x.len(),
        x.dimension().map_or("empty".into(), |d| d.to_string())
    )];
    if problems.is_empty() {
        lines.push("valid".into());
    } else {
        lines.extend(problems.iter().map(|p| format!("violation: {p}")));
    }
    let report = Report::new(lines, json!({ "valid": problems.is_empty(), "violations": problems }));
    Ok(if problems.is_empty() { report } else { report.failed() })
}

pub fn cohomology(path: &Path) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let c = sections_complex(&b.complex, &b.sheaf, &CellSet::all(&b.complex))?;
    let h = cohomology_of(&c).dimensions();
    Ok(Report::new(
        vec![format!("chain ranks from degree {}: {:?}", c.lo(), c.ranks()), dims_text(&h)],
        json!({ "lo": c.lo(), "ranks": c.ranks(), "cohomology": dims_json(&h) }),
    ))
}

pub fn euler(path: &Path) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let all = CellSet::all(&b.complex);
    let by_ranks = global_euler(&b.complex, &b.sheaf, &all)?;
    let by_h = cohomology_of(&sections_complex(&b.complex, &b.sheaf, &all)?).euler_characteristic();
    let report = Report::new(vec![format!("euler characteristic: {by_ranks}")], json!({ "euler": by_ranks, "from_cohomology": by_h }));
    Ok(if by_ranks == by_h { report } else { report.failed() })
}

pub fn det(path: &Path) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let c = sections_complex(&b.complex, &b.sheaf, &CellSet::all(&b.complex))?;
    let h = cohomology_of(&c);
    let tau = torsion(&c, &h)?;
    let chi = c.euler_characteristic();
    Ok(Report::new(
        vec![
            format!("determinant line degree: {chi}"),
            format!("torsion: {tau}{}", if h.is_acyclic() { " (acyclic)" } else { " (against recorded cohomology bases)" }),
        ],
        json!({ "degree": chi, "torsion": tau.to_string(), "acyclic": h.is_acyclic() }),
    ))
}

fn function_for(b: &Bundle, override_path: Option<&Path>) -> anyhow::Result<PLFunction> {
    match override_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("{}", p.display()))?;
            parse_function(&b.complex, &text).map_err(|e| anyhow!("{}: {e}", p.display()))
        }
        None => b.function.clone().ok_or_else(|| anyhow!("the bundle has no function; pass --function")),
    }
}

pub fn morse(path: &Path, function: Option<&Path>) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let f = function_for(&b, function)?;
    let m = morse_filtration(&b.complex, &b.sheaf, &f)?;
    let chi = global_euler(&b.complex, &b.sheaf, &CellSet::all(&b.complex))?;
    let mut lines = vec![format!("{:>6}  {:>8}  {:>6}  {:>6}  cohomology", "vertex", "value", "cells", "chi")];
    let mut rows = Vec::new();
    for d in &m.data {
        let h = cohomology_of(&d.complex).dimensions();
        lines.push(format!("{:>6}  {:>8}  {:>6}  {:>6}  {}", d.vertex, f.value(d.vertex).to_string(), d.lower_star.len(), d.euler, dims_text(&h)));
        rows.push(json!({
            "vertex": d.vertex,
            "value": f.value(d.vertex).to_string(),
            "lower_star": d.lower_star.to_vertex_tuples(&b.complex),
            "euler": d.euler,
            "cohomology": dims_json(&h),
        }));
    }
    lines.push(format!("sum of local euler characteristics: {}; euler characteristic: {chi}", m.index()));
    lines.push(format!("filtration sign: {}", m.sign));
    let report = Report::new(lines, json!({ "vertices": rows, "index": m.index(), "euler": chi, "sign": m.sign.to_string() }));
    Ok(if m.index() == chi { report } else { report.failed() })
}

pub fn epsilon(path: &Path, points: Option<Vec<usize>>, reverse: bool) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let x = &b.complex;
    check_one_manifold(x)?;
    let y: MarkedVertexSet = match points {
        Some(p) => p.into_iter().collect(),
        None => b.marked.clone().ok_or_else(|| anyhow!("no marked vertices; pass --points"))?,
    };
    let nu = match &b.orientation {
        Some(nu) => nu.clone(),
        None => OrientationField::consistent(x)?,
    };
    let e = epsilon_factorization(x, &b.sheaf, &nu, &y, reverse)?;
    let mut lines = vec![format!("{:>6}  {:>5}  {:>4}  {:>10}  cohomology", "vertex", "cells", "chi", "torsion")];
    let mut rows = Vec::new();
    for fct in &e.factors {
        let h = fct.cohomology.dimensions();
        lines.push(format!("{:>6}  {:>5}  {:>4}  {:>10}  {}", fct.vertex, fct.arc.len(), fct.euler(), fct.torsion().to_string(), dims_text(&h)));
        rows.push(json!({
            "vertex": fct.vertex,
            "arc": fct.arc.to_vertex_tuples(x),
            "euler": fct.euler(),
            "torsion": fct.torsion().to_string(),
            "cohomology": dims_json(&h),
        }));
    }
    lines.push(format!("global torsion: {}", e.global_torsion));
    lines.push(format!("regrouping sign: {}", e.regrouping_sign));
    lines.push(format!(
        "scalar: {} ({})",
        e.scalar,
        if e.acyclic { "all acyclic, basis-free" } else { "relative to recorded cohomology bases" }
    ));
    Ok(Report::new(
        lines,
        json!({
            "factors": rows,
            "global_torsion": e.global_torsion.to_string(),
            "global_cohomology": dims_json(&e.global_cohomology.dimensions()),
            "regrouping_sign": e.regrouping_sign.to_string(),
            "scalar": e.scalar.to_string(),
            "acyclic": e.acyclic,
            "reverse": reverse,
        }),
    ))
}

pub fn cc(path: &Path) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let x = &b.complex;
    let cyc = characteristic_cycle(x, &b.sheaf)?;
    let mut lines = vec![format!("{:>6}  {:>5}  {:>5}  {:>5}", "vertex", "zero", "plus", "minus")];
    for v in &cyc.vertices {
        lines.push(format!("{:>6}  {:>5}  {:>5}  {:>5}", v.vertex, v.zero, v.plus, v.minus));
    }
    for &(e, m) in &cyc.edges {
        lines.push(format!("edge {}: {m}", cell(x, e)));
    }
    Ok(Report::new(
        lines,
        json!({
            "vertices": cyc.vertices.iter().map(|v| json!({"vertex": v.vertex, "zero": v.zero, "plus": v.plus, "minus": v.minus})).collect::<Vec<_>>(),
            "edges": cyc.edges.iter().map(|&(e, m)| json!({"edge": x.cell(e), "multiplicity": m})).collect::<Vec<_>>(),
        }),
    ))
}

pub fn index(path: &Path, function: Option<&Path>) -> anyhow::Result<Report> {
    let b = load_valid(path)?;
    let f = function_for(&b, function)?;
    let idx = microlocal_index(&b.complex, &b.sheaf, &f)?;
    let chi = global_euler(&b.complex, &b.sheaf, &CellSet::all(&b.complex))?;
    let report = Report::new(
        vec![format!("microlocal index: {}", idx.total), format!("euler characteristic: {chi}")],
        json!({
            "index": idx.total,
            "euler": chi,
            "per_vertex": idx.per_vertex.iter().map(|&(v, m)| json!({"vertex": v, "euler": m})).collect::<Vec<_>>(),
        }),
    );
    Ok(if idx.total == chi { report } else { report.failed() })
}
