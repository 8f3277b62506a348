use std::path::Path;

use anyhow::{anyhow, bail};
use epsilon_cells::bundle::{read_bundle_file, write_bundle, write_bundle_file};
use epsilon_cells::cellsp::circle;
use epsilon_cells::generate::{
    random_circle_sheaf, random_marked_set, random_orientation, random_pl_function, random_surface, random_surface_sheaf,
    random_transversal_circle_sheaf, trial_rng,
};
use epsilon_cells::{Bundle, CellularSheaf, Field};
use serde_json::json;

use crate::report::Report;
use crate::Kind;

pub struct Params {
    pub seed: u64,
    pub vertices: usize,
    pub max_rank: usize,
    pub max_cells: usize,
    pub terms: usize,
    pub density: f64,
    pub field: Field,
    pub transversal: bool,
}

fn base(p: &Params, input: Option<&Path>) -> anyhow::Result<Bundle> {
    match input {
        Some(path) => read_bundle_file(path).map_err(|e| anyhow!("{e}")),
        None => {
            let x = circle(p.vertices)?;
            let f = CellularSheaf::constant(&x, p.field);
            Ok(Bundle::new(x, f))
        }
    }
}

pub fn build(kind: Kind, p: &Params, input: Option<&Path>) -> anyhow::Result<Bundle> {
    if !(0.0..=1.0).contains(&p.density) {
        bail!("--density must lie in [0, 1], got {}", p.density);
    }
    let mut rng = trial_rng(p.seed, 0);
    let b = match kind {
        Kind::CircleSheaf => {
            let x = circle(p.vertices)?;
            if p.transversal {
                let y = random_marked_set(&mut rng, &x, p.density)?;
                let nu = random_orientation(&mut rng, &x, &y)?;
                let f = random_transversal_circle_sheaf(&mut rng, &x, p.field, p.max_rank, &nu, &y)?;
                Bundle { orientation: Some(nu), marked: Some(y), ..Bundle::new(x, f) }
            } else {
                let f = random_circle_sheaf(&mut rng, &x, p.field, p.max_rank)?;
                Bundle::new(x, f)
            }
        }
        Kind::SurfaceSheaf => {
            let x = random_surface(&mut rng, p.max_cells)?;
            let f = random_surface_sheaf(&mut rng, &x, p.field, p.terms)?;
            Bundle::new(x, f)
        }
        Kind::PlFunction => {
            let mut b = base(p, input)?;
            b.function = Some(random_pl_function(&mut rng, &b.complex)?);
            b
        }
        Kind::Orientation => {
            let mut b = base(p, input)?;
            let y = match b.marked.take() {
                Some(y) => y,
                None => random_marked_set(&mut rng, &b.complex, p.density)?,
            };
            b.orientation = Some(random_orientation(&mut rng, &b.complex, &y)?);
            b.marked = Some(y);
            b
        }
        Kind::MarkedSet => {
            let mut b = base(p, input)?;
            b.marked = Some(random_marked_set(&mut rng, &b.complex, p.density)?);
            b
        }
    };
    Ok(b)
}

pub fn generate(kind: Kind, p: &Params, input: Option<&Path>, out: Option<&Path>) -> anyhow::Result<Report> {
    let b = build(kind, p, input)?;
    let text = write_bundle(&b);
    match out {
        Some(path) => {
            write_bundle_file(&b, path)?;
            let mut r = Report::new(
                vec![format!("wrote {} ({} cells)", path.display(), b.complex.len())],
                json!({ "path": path.display().to_string(), "cells": b.complex.len() }),
            );
            r.provenance = json!({ "seed": p.seed });
            Ok(r)
        }
        None => {
            let mut r = Report::new(Vec::new(), serde_json::from_str(&text)?);
            r.provenance = json!({ "seed": p.seed });
            r.raw = Some(text);
            Ok(r)
        }
    }
}
