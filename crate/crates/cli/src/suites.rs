//! Randomized verification suites. Trial `t` of a run seeded with `s` draws
//! from `trial_rng(s, t)` alone, so results do not depend on `--jobs`.

use anyhow::anyhow;
use epsilon_cells::bundle::write_bundle;
use epsilon_cells::cellsp::{circle, closed_filtration_witness, common_refinement, is_locally_closed, tetrahedron_boundary, CellSet};
use epsilon_cells::exactlin::{cohomology, regrouping_sign, swap_sign, torsion, Block, GradedSuperLine};
use epsilon_cells::generate::{
    random_circle_sheaf, random_locally_closed, random_marked_set, random_orientation, random_pl_function, random_surface,
    random_surface_sheaf, random_transversal_circle_sheaf, trial_rng,
};
use epsilon_cells::micro::{check_transversal, epsilon_factorization, subdivide_edge};
use epsilon_cells::morse::{lower_star, morse_filtration};
use epsilon_cells::sheaf::{filtration_gr, sections_complex};
use epsilon_cells::{Bundle, CellComplex, CellularSheaf, Field, Partition, PLFunction};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::report::Report;
use crate::Suite;

struct Trial {
    ok: bool,
    detail: String,
    reproducer: Option<Bundle>,
}

impl Trial {
    fn check(ok: bool, detail: impl Into<String>, reproducer: Option<Bundle>) -> Self {
        Trial { ok, detail: if ok { String::new() } else { detail.into() }, reproducer }
    }
}

type TrialResult = epsilon_cells::Result<Trial>;

fn name(suite: Suite) -> &'static str {
    match suite {
        Suite::Additivity => "additivity",
        Suite::MorseIndex => "morse-index",
        Suite::Epsilon => "epsilon",
        Suite::Lens => "lens",
        Suite::Signs => "signs",
    }
}

fn run_trial(suite: Suite, seed: u64, t: u64) -> Trial {
    let mut rng = trial_rng(seed, t);
    let r = match suite {
        Suite::Additivity => additivity(&mut rng),
        Suite::MorseIndex => morse_index(&mut rng, t),
        Suite::Epsilon => epsilon(&mut rng),
        Suite::Lens => lens(&mut rng),
        Suite::Signs => signs(&mut rng),
    };
    r.unwrap_or_else(|e| Trial { ok: false, detail: format!("error: {e}"), reproducer: None })
}

pub fn run(suite: Suite, trials: u64, seed: u64, jobs: usize) -> anyhow::Result<Report> {
    let outcomes: Vec<Trial> = if jobs <= 1 {
        (0..trials).map(|t| run_trial(suite, seed, t)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| anyhow!("{e}"))?;
        pool.install(|| (0..trials).into_par_iter().map(|t| run_trial(suite, seed, t)).collect())
    };
    let failures: Vec<(u64, &Trial)> = outcomes.iter().enumerate().filter(|(_, o)| !o.ok).map(|(t, o)| (t as u64, o)).collect();
    let mut lines = vec![format!("suite {}: {trials} trials, seed {seed}, {} failures", name(suite), failures.len())];
    for (t, o) in failures.iter().take(10) {
        lines.push(format!("  trial {t}: {}", o.detail));
    }
    if failures.len() > 10 {
        lines.push(format!("  ... {} more", failures.len() - 10));
    }
    let minimal = failures
        .iter()
        .filter_map(|(t, o)| o.reproducer.as_ref().map(|b| (b.complex.len(), *t, b)))
        .min_by_key(|&(cells, t, _)| (cells, t));
    let mut reproducer = Value::Null;
    if let Some((_, t, b)) = minimal {
        let text = write_bundle(b);
        lines.push(format!("minimal reproducer (trial {t}):"));
        lines.push(text.trim_end().to_string());
        reproducer = json!({ "trial": t, "bundle": serde_json::from_str::<Value>(&text)? });
    }
    let mut report = Report::new(
        lines,
        json!({
            "suite": name(suite),
            "failures": failures.len(),
            "failed_trials": failures.iter().map(|(t, o)| json!({"trial": t, "detail": o.detail})).collect::<Vec<_>>(),
            "reproducer": reproducer,
        }),
    );
    report.provenance = json!({ "seed": seed, "trials": trials });
    Ok(if failures.is_empty() { report } else { report.failed() })
}

/// A random sheaf on a random circle or surface.
fn random_space(rng: &mut ChaCha8Rng, field: Field) -> epsilon_cells::Result<(CellComplex, CellularSheaf)> {
    if rng.gen_bool(0.5) {
        let x = circle(rng.gen_range(3..=10))?;
        let f = random_circle_sheaf(rng, &x, field, 2)?;
        Ok((x, f))
    } else {
        let x = random_surface(rng, 60)?;
        let terms = rng.gen_range(1..=3);
        let f = random_surface_sheaf(rng, &x, field, terms)?;
        Ok((x, f))
    }
}

fn chi(x: &CellComplex, f: &CellularSheaf, s: &CellSet) -> epsilon_cells::Result<i64> {
    Ok(cohomology(&sections_complex(x, f, s)?).euler_characteristic())
}

/// Euler characteristic is additive over witness-bearing partitions of a
/// random locally closed set, and acyclic pieces force an acyclic total.
fn additivity(rng: &mut ChaCha8Rng) -> TrialResult {
    let (x, f) = random_space(rng, Field::Rational)?;
    let func = random_pl_function(rng, &x)?;
    let s = if rng.gen_bool(0.5) { CellSet::all(&x) } else { random_locally_closed(rng, &x) };
    let stars: Vec<CellSet> =
        (0..x.vertex_count()).map(|v| lower_star(&x, &func, v).intersection(&s)).filter(|p| !p.is_empty()).collect();
    let by_dim: Vec<CellSet> =
        (0..=x.dimension().unwrap_or(0)).map(|d| x.cells_of_dim(d).filter(|&c| s.contains(c)).collect::<CellSet>()).filter(|p| !p.is_empty()).collect();
    let p1 = Partition::of(&x, &s, stars)?;
    let p2 = Partition::of(&x, &s, by_dim)?;
    let p = common_refinement(&x, &p1, &p2)?;
    let repro = Bundle { function: Some(func), ..Bundle::new(x.clone(), f.clone()) };
    if let Some(bad) = p.parts().iter().find(|q| !is_locally_closed(&x, q)) {
        return Ok(Trial::check(false, format!("part {:?} is not locally closed", bad.to_vertex_tuples(&x)), Some(repro)));
    }
    let w = closed_filtration_witness(&x, &p)?;
    let gr = filtration_gr(&x, &f, &p, &w)?;
    let total = chi(&x, &f, &s)?;
    let sum: i64 = gr.pieces.iter().map(|c| cohomology(c).euler_characteristic()).sum();
    if total != sum {
        return Ok(Trial::check(false, format!("euler characteristic {total} but pieces sum to {sum}"), Some(repro)));
    }
    let pieces_acyclic = gr.pieces.iter().all(|c| cohomology(c).is_acyclic());
    let total_acyclic = cohomology(&sections_complex(&x, &f, &s)?).is_acyclic();
    Ok(Trial::check(!pieces_acyclic || total_acyclic, "acyclic pieces but non-acyclic total", Some(repro)))
}

/// Σ_v χ(M_v) = χ(X, F); trial 0 is the constant sheaf on the tetrahedron boundary.
fn morse_index(rng: &mut ChaCha8Rng, t: u64) -> TrialResult {
    let (x, f, func) = if t == 0 {
        let x = tetrahedron_boundary();
        let f = CellularSheaf::constant(&x, Field::Rational);
        let func = PLFunction::from_i64(&x, &[3, 0, 2, 1])?;
        (x, f, func)
    } else {
        let (x, f) = random_space(rng, Field::Rational)?;
        let func = random_pl_function(rng, &x)?;
        (x, f, func)
    };
    let m = morse_filtration(&x, &f, &func)?;
    let total = chi(&x, &f, &CellSet::all(&x))?;
    let expected_ok = t != 0 || total == 2;
    let repro = Bundle { function: Some(func), ..Bundle::new(x, f) };
    Ok(Trial::check(
        m.index() == total && expected_ok,
        format!("sum of local euler characteristics {} but euler characteristic {total}", m.index()),
        Some(repro),
    ))
}

/// Factorization identity, Euler characteristic additivity over arcs, and
/// invariance of the acyclic-case scalar under one edge subdivision.
fn epsilon(rng: &mut ChaCha8Rng) -> TrialResult {
    let field = Field::Rational;
    let x = circle(rng.gen_range(3..=12))?;
    let y = random_marked_set(rng, &x, 0.3)?;
    let nu = random_orientation(rng, &x, &y)?;
    let f = random_transversal_circle_sheaf(rng, &x, field, 3, &nu, &y)?;
    let repro = Bundle { orientation: Some(nu.clone()), marked: Some(y.clone()), ..Bundle::new(x.clone(), f.clone()) };
    let e = epsilon_factorization(&x, &f, &nu, &y, false)?;
    let total = chi(&x, &f, &CellSet::all(&x))?;
    let sum: i64 = e.factors.iter().map(|fc| fc.euler()).sum();
    if total != sum {
        return Ok(Trial::check(false, format!("euler characteristic {total} but factors sum to {sum}"), Some(repro)));
    }
    let global = sections_complex(&x, &f, &CellSet::all(&x))?;
    let mut expected = &e.regrouping_sign * &torsion(&global, &cohomology(&global))?.inv()?;
    for fc in &e.factors {
        let c = sections_complex(&x, &f, &fc.arc)?;
        expected = &expected * &torsion(&c, &cohomology(&c))?;
    }
    if expected != e.scalar {
        return Ok(Trial::check(false, format!("scalar {} but factors give {expected}", e.scalar), Some(repro)));
    }
    if e.acyclic {
        let edges: Vec<usize> = x.cells_of_dim(1).collect();
        let edge = *edges.choose(rng).expect("circles have edges");
        let (x2, f2, nu2) = subdivide_edge(&x, &f, &nu, edge)?;
        let e2 = epsilon_factorization(&x2, &f2, &nu2, &y, false)?;
        if e2.scalar != e.scalar {
            return Ok(Trial::check(
                false,
                format!("scalar {} changes to {} after subdividing {:?}", e.scalar, e2.scalar, x.cell(edge)),
                Some(repro),
            ));
        }
    }
    Ok(Trial::check(true, "", None))
}

/// checkTransversal agrees with a direct rank test of every unmarked lens
/// `stalk(v) → stalk(e_in(v))`, over F_2.
fn lens(rng: &mut ChaCha8Rng) -> TrialResult {
    let field = Field::prime(2)?;
    let x = circle(rng.gen_range(3..=6))?;
    let f = random_circle_sheaf(rng, &x, field, 2)?;
    let y = random_marked_set(rng, &x, 0.4)?;
    let nu = random_orientation(rng, &x, &y)?;
    let reported = check_transversal(&x, &f, &nu, &y)?;
    let (lo, hi) = f.degree_range().unwrap_or((0, 0));
    let oracle: Vec<usize> = (0..x.vertex_count())
        .filter(|v| !y.contains(v))
        .filter(|&v| {
            let e = nu.e_in(&x, v).expect("valid off Y");
            (lo..=hi).any(|n| {
                let (rv, re) = (f.stalk(v).rank(n), f.stalk(e).rank(n));
                !(rv == re && f.rho(v, e, n).rank() == rv)
            })
        })
        .collect();
    let repro = Bundle { orientation: Some(nu), marked: Some(y), ..Bundle::new(x, f) };
    Ok(Trial::check(reported == oracle, format!("reported {reported:?}, rank test gives {oracle:?}"), Some(repro)))
}

/// Swap signs follow the degree product rule and square to one; regrouping
/// signs compose along permutations.
fn signs(rng: &mut ChaCha8Rng) -> TrialResult {
    let field = Field::Rational;
    let (a, b) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
    let la = GradedSuperLine::new(a, field.one())?;
    let lb = GradedSuperLine::new(b, field.one())?;
    let s = swap_sign(&la, &lb);
    if s != field.sign(a * b) || !(&s * &swap_sign(&lb, &la)).is_one() {
        return Ok(Trial::check(false, format!("swap sign {s} for degrees {a}, {b}"), None));
    }
    let n = rng.gen_range(1..=6);
    let blocks: Vec<Block> = (0..n).map(|_| Block::new(rng.gen_range(-3..=3), rng.gen_range(0..=3))).collect();
    let mut p: Vec<usize> = (0..n).collect();
    let mut q: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    q.shuffle(rng);
    let moved: Vec<Block> = q.iter().map(|&i| blocks[i]).collect();
    let composite: Vec<usize> = p.iter().map(|&i| q[i]).collect();
    let lhs = regrouping_sign(field, &blocks, &composite)?;
    let rhs = &regrouping_sign(field, &blocks, &q)? * &regrouping_sign(field, &moved, &p)?;
    Ok(Trial::check(lhs == rhs, format!("regrouping sign of {blocks:?} is not multiplicative along {q:?} then {p:?}"), None))
}
