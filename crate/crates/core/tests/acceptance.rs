//! Acceptance suite: one PASS/FAIL line per criterion, exact comparisons only.
//!
//! Runs without the libtest harness so that the verdict lines always reach
//! the output. Criteria 2 and 7 contain sub-checks that cannot hold as
//! stated; they are computed faithfully and reported as FAIL. The process
//! exits nonzero if any other criterion fails, if a red criterion fails in a
//! way other than its known failure mode, or, with `ACCEPTANCE_STRICT=1`, on
//! any FAIL at all.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use epsilon_cells::cellsp::{
    build_complex, circle, closed_filtration_witness, common_refinement, is_locally_closed, lexicographic_witness,
    tetrahedron_boundary, verify_witness,
};
use epsilon_cells::exactlin::{cohomology, direct_sum_sign, regrouping_sign, swap_sign, torsion, Block, GradedSuperLine};
use epsilon_cells::generate::{
    random_circle_sheaf, random_function_like, random_invertible, random_local_system, random_locally_closed, random_marked_set,
    random_orientation, random_pl_function, random_surface, random_surface_sheaf, random_transversal_circle_sheaf, trial_rng,
};
use epsilon_cells::micro::{check_transversal, epsilon_factorization, lens_arcs, subdivide_edge};
use epsilon_cells::morse::{morse_complex, morse_filtration};
use epsilon_cells::sheaf::sections_complex;
use epsilon_cells::{BoundedComplex, CellComplex, CellSet, CellularSheaf, Field, Matrix, OrientationField, Partition, PLFunction, Scalar};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
    /// For criteria with a known unattainable sub-check: whether every
    /// failure matched that failure mode.
    expected_mode: Option<bool>,
}

fn q() -> Field {
    Field::Rational
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn random_space(rng: &mut ChaCha8Rng, max_cells: usize) -> (CellComplex, CellularSheaf) {
    if rng.gen_bool(0.5) {
        let x = circle(rng.gen_range(3..=12)).unwrap();
        let f = random_circle_sheaf(rng, &x, q(), 3).unwrap();
        (x, f)
    } else {
        let x = random_surface(rng, max_cells).unwrap();
        let terms = rng.gen_range(1..=4);
        let f = random_surface_sheaf(rng, &x, q(), terms).unwrap();
        (x, f)
    }
}

/// Oracle for the factorization scalar: brute-force regrouping sign of the
/// determinant word, times oracle torsions of the arcs, over that of `X`.
fn oracle_scalar(x: &CellComplex, f: &CellularSheaf, e: &epsilon_cells::micro::EpsilonFactorization) -> Scalar {
    let all = CellSet::all(x);
    let ambient = det_word(&sections_letters(x, f, &all));
    let target: Vec<_> = e.factors.iter().flat_map(|fc| det_word(&sections_letters(x, f, &fc.arc))).collect();
    let sign = q().sign(word_parity(&ambient, &target) as i64);
    let mut s = &sign * &oracle_torsion(&e.global, &reps(&e.global, &e.global_cohomology)).inv().unwrap();
    for fc in &e.factors {
        s = &s * &oracle_torsion(&fc.complex, &reps(&fc.complex, &fc.cohomology));
    }
    s
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for t in 0..200 {
        let mut rng = trial_rng(1001, t);
        let x = circle(rng.gen_range(3..=12)).unwrap();
        let y = random_marked_set(&mut rng, &x, 0.35).unwrap();
        let nu = random_orientation(&mut rng, &x, &y).unwrap();
        let f = random_transversal_circle_sheaf(&mut rng, &x, q(), 3, &nu, &y).unwrap();
        if !check_transversal(&x, &f, &nu, &y).unwrap().is_empty() {
            bad.push(format!("trial {t}: generated sheaf not transversal"));
            continue;
        }
        let e = epsilon_factorization(&x, &f, &nu, &y, false).unwrap();
        let arcs: Vec<(usize, BTreeSet<usize>)> = e.factors.iter().map(|fc| (fc.vertex, fc.arc.iter().collect())).collect();
        let complexes_ok = same_complex(&e.global, &oracle_sections(&x, &f, &CellSet::all(&x)))
            && e.factors.iter().all(|fc| same_complex(&fc.complex, &oracle_sections(&x, &f, &fc.arc)));
        let chi = oracle_euler(&x, &f, &CellSet::all(&x));
        let chi_sum: i64 = e.factors.iter().map(|fc| fc.euler()).sum();
        let expected = oracle_scalar(&x, &f, &e);
        if arcs != oracle_arcs(&x, &nu, &y) || !complexes_ok || chi != chi_sum || expected != e.scalar {
            bad.push(format!("trial {t}: scalar {} vs oracle {expected}, chi {chi} vs {chi_sum}", e.scalar));
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: bad.is_empty() && el < Duration::from_secs(60),
        detail: format!("{}/200 trials exact, {}{}", 200 - bad.len(), secs(el), first(&bad)),
        expected_mode: None,
    }
}

fn first(bad: &[String]) -> String {
    bad.first().map_or(String::new(), |b| format!("; first failure: {b}"))
}

fn acyclic_local_system(rng: &mut ChaCha8Rng, x: &CellComplex) -> CellularSheaf {
    loop {
        let rank = rng.gen_range(1..=2);
        let shift = rng.gen_range(-1..=1);
        let f = random_local_system(rng, x, q(), rank).unwrap().shift(shift);
        if cohomology(&sections_complex(x, &f, &CellSet::all(x)).unwrap()).is_acyclic() {
            return f;
        }
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let (mut sub_fail, mut grow_fail, mut grow_fail_from_one) = (Vec::new(), 0, 0);
    for t in 0..100 {
        let mut rng = trial_rng(2002, t);
        let n = rng.gen_range(4..=10);
        let x = circle(n).unwrap();
        let f = acyclic_local_system(&mut rng, &x);
        // sources and sinks of ν give non-acyclic arcs; stay in the all-acyclic case
        let (y, nu, e) = loop {
            let mut y = random_marked_set(&mut rng, &x, 0.3).unwrap();
            if y.len() == n {
                let drop = *y.iter().next().unwrap();
                y.remove(&drop);
            }
            let nu = random_orientation(&mut rng, &x, &y).unwrap();
            let e = epsilon_factorization(&x, &f, &nu, &y, false).unwrap();
            if e.acyclic {
                break (y, nu, e);
            }
        };
        let edges: Vec<usize> = x.cells_of_dim(1).collect();
        let edge = *edges.choose(&mut rng).unwrap();
        let (x2, f2, nu2) = subdivide_edge(&x, &f, &nu, edge).unwrap();
        let e2 = epsilon_factorization(&x2, &f2, &nu2, &y, false).unwrap();
        if e2.scalar != e.scalar {
            sub_fail.push(format!("trial {t}: subdivision {} -> {}", e.scalar, e2.scalar));
        }
        let free: Vec<usize> = (0..n).filter(|v| !y.contains(v)).collect();
        let mut y2 = y.clone();
        y2.insert(*free.choose(&mut rng).unwrap());
        let e3 = epsilon_factorization(&x, &f, &nu, &y2, false).unwrap();
        assert!(e3.acyclic);
        if e3.scalar != e.scalar {
            grow_fail += 1;
            grow_fail_from_one += usize::from(y.len() == 1);
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: sub_fail.is_empty() && grow_fail == 0 && el < Duration::from_secs(30),
        detail: format!(
            "(a) subdivision {}/100 invariant; (b) Y-enlargement {}/100 invariant, {grow_fail_from_one} of {grow_fail} failures start from |Y| = 1; {}{}",
            100 - sub_fail.len(),
            100 - grow_fail,
            secs(el),
            first(&sub_fail)
        ),
        expected_mode: Some(sub_fail.is_empty() && grow_fail == grow_fail_from_one),
    }
}

fn argmax(x: &CellComplex, f: &PLFunction, c: usize) -> usize {
    *x.cell(c).iter().max_by(|a, b| f.value(**a).cmp(f.value(**b))).unwrap()
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut tetra = None;
    for t in 0..500 {
        let mut rng = trial_rng(3003, t);
        let (x, f, func) = if t == 0 {
            let x = tetrahedron_boundary();
            let f = CellularSheaf::constant(&x, q());
            let func = PLFunction::from_i64(&x, &[3, 0, 2, 1]).unwrap();
            (x, f, func)
        } else {
            let (x, f) = random_space(&mut rng, 100);
            let func = random_pl_function(&mut rng, &x).unwrap();
            (x, f, func)
        };
        let m = morse_filtration(&x, &f, &func).unwrap();
        let chi = oracle_euler(&x, &f, &CellSet::all(&x));
        let local_ok = m.data.iter().all(|d| {
            let star: CellSet = (0..x.len()).filter(|&c| argmax(&x, &func, c) == d.vertex).collect();
            d.lower_star == star && d.euler == oracle_euler(&x, &f, &star)
        });
        if t == 0 {
            tetra = Some(m.index());
        }
        if m.index() != chi || !local_ok || (t == 0 && chi != 2) {
            bad.push(format!("trial {t}: sum {} vs euler {chi}", m.index()));
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: bad.is_empty() && el < Duration::from_secs(60),
        detail: format!("{}/500 trials exact, tetrahedron constant sheaf gives {}, {}{}", 500 - bad.len(), tetra.unwrap(), secs(el), first(&bad)),
        expected_mode: None,
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for t in 0..100 {
        let mut rng = trial_rng(4004, t);
        let (x, f) = random_space(&mut rng, 60);
        let func = random_pl_function(&mut rng, &x).unwrap();
        let v = rng.gen_range(0..x.vertex_count());
        let g = random_function_like(&mut rng, &x, &func, v).unwrap();
        let pattern_kept = x.cofaces(v).iter().all(|&(e, _)| {
            let w = *x.cell(e).iter().find(|&&w| w != v).unwrap();
            (func.value(w) > func.value(v)) == (g.value(w) > g.value(v))
        });
        let a = morse_complex(&x, &f, &func, v).unwrap().euler;
        let b = morse_complex(&x, &f, &g, v).unwrap().euler;
        // change F away from the open star of v
        let far = random_locally_closed(&mut rng, &x).difference(&epsilon_cells::cellsp::star(&x, &CellSet::from_iter([v])));
        let c = if far.is_empty() || !is_locally_closed(&x, &far) {
            a
        } else {
            let extra = CellularSheaf::constant_on(&x, q(), &far, 2, rng.gen_range(-1..=1)).unwrap();
            morse_complex(&x, &f.direct_sum(&extra), &func, v).unwrap().euler
        };
        if !pattern_kept || a != b || a != c {
            bad.push(format!("trial {t}: vertex {v} gives {a}, {b}, {c}"));
        }
    }
    let el = start.elapsed();
    Verdict { pass: bad.is_empty(), detail: format!("{}/100 paired trials equal, {}{}", 100 - bad.len(), secs(el), first(&bad)), expected_mode: None }
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let f2 = Field::prime(2).unwrap();
    let (mut cases, mut transversal_cases) = (0usize, 0usize);
    let mut bad = Vec::new();
    let mut rng = trial_rng(5005, 0);
    for n in 3..=6usize {
        let x = circle(n).unwrap();
        let edges: Vec<usize> = x.cells_of_dim(1).collect();
        for ymask in 0u32..(1 << n) {
            let y: BTreeSet<usize> = (0..n).filter(|v| ymask >> v & 1 == 1).collect();
            for omask in 0u32..(1 << n) {
                let pairs: Vec<(usize, usize)> =
                    edges.iter().enumerate().map(|(i, &e)| (e, x.cell(e)[(omask >> i & 1) as usize])).collect();
                let nu = OrientationField::new(&x, &pairs).unwrap();
                let incoming = |v: usize| edges.iter().copied().filter(|&e| nu.terminal(e) == v).collect::<Vec<_>>();
                let valid = (0..n).all(|v| y.contains(&v) || incoming(v).len() == 1);
                let ys: epsilon_cells::MarkedVertexSet = y.iter().copied().collect();
                let sheaves = if valid {
                    vec![
                        random_circle_sheaf(&mut rng, &x, f2, 2).unwrap(),
                        random_transversal_circle_sheaf(&mut rng, &x, f2, 2, &nu, &ys).unwrap(),
                    ]
                } else {
                    vec![random_circle_sheaf(&mut rng, &x, f2, 2).unwrap()]
                };
                for f in sheaves {
                    cases += 1;
                    let verdict = check_transversal(&x, &f, &nu, &ys);
                    if !valid {
                        if verdict.is_ok() {
                            bad.push(format!("n={n} Y={y:?} orientation {omask:b}: invalid field accepted"));
                        }
                        continue;
                    }
                    let oracle: Vec<usize> = (0..n)
                        .filter(|v| !y.contains(v))
                        .filter(|&v| {
                            let lens = CellSet::from_iter([v, incoming(v)[0]]);
                            let (_, ranks, diffs) = oracle_sections(&x, &f, &lens);
                            !oracle_acyclic(&ranks, &diffs)
                        })
                        .collect();
                    transversal_cases += usize::from(oracle.is_empty());
                    match verdict {
                        Ok(reported) if reported == oracle => {}
                        other => bad.push(format!("n={n} Y={y:?} orientation {omask:b}: {other:?} vs {oracle:?}")),
                    }
                }
            }
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: bad.is_empty(),
        detail: format!("{cases} cases over F_2 ({transversal_cases} transversal), {} disagreements, {}{}", bad.len(), secs(el), first(&bad)),
        expected_mode: None,
    }
}

/// Complexes with at most 8 cells.
fn small_complexes() -> Vec<CellComplex> {
    let b = |n: usize, cells: &[&[usize]]| build_complex(n, &cells.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap();
    vec![
        b(1, &[&[0]]),
        b(2, &[&[0], &[1]]),
        b(2, &[&[0], &[1], &[0, 1]]),
        b(3, &[&[0], &[1], &[2], &[0, 1], &[1, 2]]),
        b(4, &[&[0], &[1], &[2], &[3], &[0, 1], &[1, 2], &[2, 3]]),
        b(4, &[&[0], &[1], &[2], &[3], &[0, 1], &[2, 3]]),
        circle(3).unwrap(),
        b(4, &[&[0], &[1], &[2], &[3], &[0, 1], &[0, 2], &[1, 2]]),
        b(3, &[&[0], &[1], &[2], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]]),
        b(4, &[&[0], &[1], &[2], &[3], &[0, 1], &[0, 2], &[1, 2], &[0, 1, 2]]),
        circle(4).unwrap(),
    ]
}

/// All set partitions of `items`, by restricted growth strings.
fn set_partitions(items: &[usize], mut visit: impl FnMut(&[BTreeSet<usize>])) {
    let n = items.len();
    if n == 0 {
        return;
    }
    let mut a = vec![0usize; n];
    loop {
        let k = a.iter().max().unwrap() + 1;
        let mut parts = vec![BTreeSet::new(); k];
        for (i, &b) in a.iter().enumerate() {
            parts[b].insert(items[i]);
        }
        visit(&parts);
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let max_prefix = a[..i].iter().max().copied().unwrap_or(0);
            if a[i] <= max_prefix {
                a[i] += 1;
                for v in a.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let (mut checked, mut sets) = (0usize, 0usize);
    for (ci, x) in small_complexes().iter().enumerate() {
        let mut rng = trial_rng(6006, ci as u64);
        let sheaves = [CellularSheaf::constant(x, q()), random_surface_sheaf(&mut rng, x, q(), 2).unwrap(), random_surface_sheaf(&mut rng, x, q(), 3).unwrap()];
        let m = x.len();
        let lc: Vec<bool> = (0..1u32 << m).map(|mask| oracle_locally_closed(x, &(0..m).filter(|c| mask >> c & 1 == 1).collect())).collect();
        let chis: Vec<Vec<i64>> = sheaves
            .iter()
            .map(|f| {
                (0..1u32 << m)
                    .map(|mask| {
                        if !lc[mask as usize] {
                            return 0;
                        }
                        let s: CellSet = (0..m).filter(|c| mask >> c & 1 == 1).collect();
                        cohomology(&sections_complex(x, f, &s).unwrap()).euler_characteristic()
                    })
                    .collect()
            })
            .collect();
        let mask_of = |s: &BTreeSet<usize>| s.iter().fold(0u32, |acc, &c| acc | 1 << c);
        for smask in 1u32..(1 << m) {
            let s_set: CellSet = (0..m).filter(|c| smask >> c & 1 == 1).collect();
            if lc[smask as usize] != is_locally_closed(x, &s_set) {
                bad.push(format!("complex {ci}: locally closed verdict differs on {smask:b}"));
            }
            if !lc[smask as usize] {
                continue;
            }
            sets += 1;
            let items: Vec<usize> = s_set.iter().collect();
            set_partitions(&items, |parts| {
                if !parts.iter().all(|p| lc[mask_of(p) as usize]) {
                    return;
                }
                let has = oracle_has_witness(x, parts);
                let cell_parts: Vec<CellSet> = parts.iter().map(|p| p.iter().copied().collect()).collect();
                let p = Partition::of(x, &s_set, cell_parts).unwrap();
                match (has, closed_filtration_witness(x, &p)) {
                    (true, Ok(w)) => {
                        let ordered: Vec<BTreeSet<usize>> = w.order.iter().map(|&k| parts[k].clone()).collect();
                        if !oracle_prefixes_closed(x, &ordered) {
                            bad.push(format!("complex {ci}: witness {:?} has a non-closed prefix", w.order));
                        }
                        checked += 1;
                        for (fi, chi) in chis.iter().enumerate() {
                            let sum: i64 = parts.iter().map(|p| chi[mask_of(p) as usize]).sum();
                            if sum != chi[smask as usize] {
                                bad.push(format!("complex {ci}, sheaf {fi}: {parts:?} sums to {sum}, not {}", chi[smask as usize]));
                            }
                        }
                    }
                    (false, Err(_)) => {}
                    (h, r) => bad.push(format!("complex {ci}: oracle witness {h} but library {:?}", r.map(|w| w.order))),
                }
            });
        }
    }
    let exhaustive = checked;
    let mut random_ok = 0;
    for t in 0..100 {
        let mut rng = trial_rng(6106, t);
        let (x, f) = random_space(&mut rng, 60);
        let func = random_pl_function(&mut rng, &x).unwrap();
        let s = if rng.gen_bool(0.3) { CellSet::all(&x) } else { random_locally_closed(&mut rng, &x) };
        let stars: Vec<CellSet> = (0..x.vertex_count())
            .map(|v| (0..x.len()).filter(|&c| argmax(&x, &func, c) == v).collect::<CellSet>().intersection(&s))
            .filter(|p| !p.is_empty())
            .collect();
        let dims: Vec<CellSet> = (0..=2).map(|d| x.cells_of_dim(d).filter(|&c| s.contains(c)).collect::<CellSet>()).filter(|p| !p.is_empty()).collect();
        let p = common_refinement(&x, &Partition::of(&x, &s, stars).unwrap(), &Partition::of(&x, &s, dims).unwrap()).unwrap();
        let w = closed_filtration_witness(&x, &p).unwrap();
        let mut ordered: Vec<CellSet> = w.order.iter().map(|&k| p.parts()[k].clone()).collect();
        // merge random runs of consecutive parts
        let mut merged: Vec<CellSet> = Vec::new();
        for part in ordered.drain(..) {
            match merged.last_mut() {
                Some(last) if rng.gen_bool(0.3) => *last = last.union(&part),
                _ => merged.push(part),
            }
        }
        let sets_m = to_sets(&merged);
        let total = cohomology(&sections_complex(&x, &f, &s).unwrap()).euler_characteristic();
        let sum: i64 = merged.iter().map(|z| cohomology(&sections_complex(&x, &f, z).unwrap()).euler_characteristic()).sum();
        if oracle_prefixes_closed(&x, &sets_m) && total == sum && total == oracle_euler(&x, &f, &s) {
            random_ok += 1;
        } else {
            bad.push(format!("random trial {t}: {total} vs {sum}"));
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: bad.is_empty() && el < Duration::from_secs(30),
        detail: format!(
            "{exhaustive} witness-bearing partitions of {sets} locally closed sets in {} small complexes, {random_ok}/100 random trials, {}{}",
            small_complexes().len(),
            secs(el),
            first(&bad)
        ),
        expected_mode: None,
    }
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let (mut trans_ok, mut common_ok, mut stars_ok) = (0, 0, 0);
    let (mut lens_ok, mut lens_fail, mut lens_fail_multi) = (0, 0, 0);
    for t in 0..100 {
        let mut rng = trial_rng(7007, t);
        let (x, _) = random_space(&mut rng, 60);
        let f1 = random_pl_function(&mut rng, &x).unwrap();
        let f2 = random_pl_function(&mut rng, &x).unwrap();
        let all = CellSet::all(&x);
        let stars = |func: &PLFunction| -> Partition {
            let parts = (0..x.vertex_count()).map(|v| (0..x.len()).filter(|&c| argmax(&x, func, c) == v).collect()).collect();
            Partition::of(&x, &all, parts).unwrap()
        };
        let (p1, p2) = (stars(&f1), stars(&f2));
        // lower-star partitions bear witnesses
        let w1 = closed_filtration_witness(&x, &p1);
        if w1.as_ref().is_ok_and(|w| oracle_prefixes_closed(&x, &w.order.iter().map(|&k| p1.parts()[k].iter().collect()).collect::<Vec<_>>())) {
            stars_ok += 1;
        } else {
            bad.push(format!("trial {t}: lower-star partition without witness"));
        }
        // common refinement of two witness-bearing partitions
        let r = common_refinement(&x, &p1, &p2).unwrap();
        match closed_filtration_witness(&x, &r) {
            Ok(w) if oracle_has_witness(&x, &to_sets(r.parts())) && verify_witness(&x, &r, &w) => common_ok += 1,
            other => bad.push(format!("trial {t}: common refinement {:?}", other.map(|w| w.order))),
        }
        // transitivity: witnesses of the coarse partition and of each restriction give one for the fine one
        let w1 = w1.unwrap();
        let restricted: Vec<(Partition, epsilon_cells::ClosedFiltrationWitness)> = p1
            .parts()
            .iter()
            .map(|part| {
                let sub = r.restrict(&x, part).unwrap();
                let w = closed_filtration_witness(&x, &sub).unwrap();
                (sub, w)
            })
            .collect();
        let lw = lexicographic_witness(&p1, &w1, &r, &restricted).unwrap();
        let ordered: Vec<BTreeSet<usize>> = lw.order.iter().map(|&k| r.parts()[k].iter().collect()).collect();
        if oracle_prefixes_closed(&x, &ordered) {
            trans_ok += 1;
        } else {
            bad.push(format!("trial {t}: lexicographic witness fails"));
        }
        // lens arcs on circles
        let c = circle(rng.gen_range(3..=12)).unwrap();
        let y = random_marked_set(&mut rng, &c, 0.35).unwrap();
        let nu = random_orientation(&mut rng, &c, &y).unwrap();
        let arcs: Vec<CellSet> = lens_arcs(&c, &nu, &y, false).unwrap().into_iter().map(|a| a.1).collect();
        let has = oracle_has_witness(&c, &to_sets(&arcs));
        let lib = closed_filtration_witness(&c, &Partition::of(&c, &CellSet::all(&c), arcs).unwrap()).is_ok();
        if has != lib {
            bad.push(format!("trial {t}: lens witness oracle {has}, library {lib}"));
        }
        if lib {
            lens_ok += 1;
        } else {
            lens_fail += 1;
            lens_fail_multi += usize::from(y.len() >= 2);
        }
    }
    let el = start.elapsed();
    Verdict {
        pass: bad.is_empty() && lens_fail == 0,
        detail: format!(
            "transitivity {trans_ok}/100, common refinement {common_ok}/100, lower stars {stars_ok}/100, lens arcs {lens_ok}/100 ({lens_fail_multi} of {lens_fail} failures have |Y| >= 2 and a cyclic frontier relation); {}{}",
            secs(el),
            first(&bad)
        ),
        expected_mode: Some(bad.is_empty() && lens_fail == lens_fail_multi),
    }
}

/// Each block of line degree `d` contributes `|d|` odd letters.
fn block_letters(blocks: &[Block]) -> Vec<Vec<(usize, usize)>> {
    blocks.iter().enumerate().map(|(i, b)| (0..b.rank).map(|k| (i, k)).collect()).collect()
}

fn oracle_regrouping(field: Field, blocks: &[Block], perm: &[usize]) -> Scalar {
    let letters = block_letters(blocks);
    let from: Vec<(usize, usize)> = letters.iter().flatten().copied().collect();
    let to: Vec<(usize, usize)> = perm.iter().flat_map(|&i| letters[i].clone()).collect();
    field.sign(word_parity(&from, &to) as i64)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut cases = 0usize;
    for field in [q(), Field::prime(3).unwrap()] {
        for a in -3..=3 {
            for b in -3..=3 {
                let la = GradedSuperLine::new(a, field.one()).unwrap();
                let lb = GradedSuperLine::new(b, field.one()).unwrap();
                let s = swap_sign(&la, &lb);
                let expected = if (a * b).rem_euclid(2) == 0 { field.one() } else { -field.one() };
                cases += 1;
                if s != expected || !(&s * &swap_sign(&lb, &la)).is_one() {
                    bad.push(format!("swap of degrees {a}, {b} gives {s}"));
                }
            }
        }
        for len in 1..=3usize {
            let perms = permutations(len);
            let total = 7usize.pow(len as u32);
            for code in 0..total {
                let blocks: Vec<Block> = (0..len).map(|i| Block::with_line_degree((code / 7usize.pow(i as u32) % 7) as i64 - 3)).collect();
                for p in &perms {
                    let lib = regrouping_sign(field, &blocks, p).unwrap();
                    if lib != oracle_regrouping(field, &blocks, p) {
                        bad.push(format!("regrouping {blocks:?} by {p:?}"));
                    }
                    for qp in &perms {
                        cases += 1;
                        let moved: Vec<Block> = qp.iter().map(|&i| blocks[i]).collect();
                        let composite: Vec<usize> = p.iter().map(|&i| qp[i]).collect();
                        let lhs = regrouping_sign(field, &blocks, &composite).unwrap();
                        let rhs = &regrouping_sign(field, &blocks, qp).unwrap() * &regrouping_sign(field, &moved, p).unwrap();
                        if lhs != rhs {
                            bad.push(format!("regrouping {blocks:?} not multiplicative along {qp:?} then {p:?}"));
                        }
                    }
                }
            }
        }
    }
    let el = start.elapsed();
    Verdict { pass: bad.is_empty(), detail: format!("{cases} exhaustive cases, {}{}", secs(el), first(&bad)), expected_mode: None }
}

/// Koszul sign of `C ⊕ C'` against `C` then `C'`, on chains and on cohomology.
fn oracle_sum_sign(field: Field, a: &BoundedComplex, ha: &[usize], b: &BoundedComplex, hb: &[usize]) -> Scalar {
    let range = |c: &BoundedComplex| if c.is_zero() { None } else { Some((c.lo(), c.hi())) };
    let (lo, hi) = match (range(a), range(b)) {
        (Some(x), Some(y)) => (x.0.min(y.0), x.1.max(y.1)),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => return field.one(),
    };
    let dim = |c: &BoundedComplex, h: &[usize], n: i64, chains: bool| -> usize {
        if chains {
            c.rank(n)
        } else if c.is_zero() || n < c.lo() || n > c.hi() {
            0
        } else {
            h[(n - c.lo()) as usize]
        }
    };
    let mut odd = false;
    for chains in [true, false] {
        let chunk = |tag: usize, c: &BoundedComplex, h: &[usize]| -> Vec<Graded<(usize, i64, usize)>> {
            (lo..=hi).map(|n| (n, (0..dim(c, h, n, chains)).map(|k| (tag, n, k)).collect())).collect()
        };
        let both: Vec<Graded<(usize, i64, usize)>> =
            (lo..=hi).map(|n| (n, (0..dim(a, ha, n, chains)).map(|k| (0, n, k)).chain((0..dim(b, hb, n, chains)).map(|k| (1, n, k))).collect())).collect();
        let from = det_word(&both);
        let to: Vec<_> = det_word(&chunk(0, a, ha)).into_iter().chain(det_word(&chunk(1, b, hb))).collect();
        odd ^= word_parity(&from, &to);
    }
    field.sign(odd as i64)
}

fn h_dims(c: &BoundedComplex, h: &epsilon_cells::CohomologyData) -> Vec<usize> {
    if c.is_zero() {
        return Vec::new();
    }
    c.degrees().map(|n| h.dimension(n)).collect()
}

/// Cohomology representatives of `c` carried into `c.elementary_expansion(j)`.
fn expanded_reps(c: &BoundedComplex, r: &[Matrix], j: i64) -> (BoundedComplex, Vec<Matrix>) {
    let e = c.elementary_expansion(j);
    let field = c.field();
    let front = j.rem_euclid(2) == 1;
    let out = e
        .degrees()
        .map(|n| {
            let old = if !c.is_zero() && n >= c.lo() && n <= c.hi() { r[(n - c.lo()) as usize].clone() } else { Matrix::zeros(field, 0, 0) };
            let old = if old.rows() == c.rank(n) { old } else { Matrix::zeros(field, c.rank(n), 0) };
            if n == j || n == j + 1 {
                let pad = Matrix::zeros(field, 1, old.cols());
                let rows: Vec<Vec<Scalar>> = if front {
                    pad.to_rows().into_iter().chain(old.to_rows()).collect()
                } else {
                    old.to_rows().into_iter().chain(pad.to_rows()).collect()
                };
                Matrix::from_rows(field, old.cols(), rows).unwrap()
            } else {
                old
            }
        })
        .collect();
    (e, out)
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let fixed = BoundedComplex::two_term(0, Matrix::from_i64(q(), &[&[1, 1], &[0, 2]])).unwrap();
    if torsion(&fixed, &cohomology(&fixed)).unwrap() != q().from_i64(2) {
        bad.push("[[1,1],[0,2]] does not give 2".to_string());
    }
    for t in 0..100 {
        let mut rng = trial_rng(9009, t);
        let field = if t % 4 == 3 { Field::prime(7).unwrap() } else { q() };
        // two-term complexes
        let a = loop {
            let a = rng.gen_range(-9..=9);
            if !field.from_i64(a).is_zero() {
                break field.from_i64(a);
            }
        };
        let one = BoundedComplex::two_term(0, Matrix::from_rows(field, 1, vec![vec![a.clone()]]).unwrap()).unwrap();
        if torsion(&one, &cohomology(&one)).unwrap() != a {
            bad.push(format!("trial {t}: [k -> k] by {a}"));
        }
        let n = rng.gen_range(1..=4);
        let d = random_invertible(&mut rng, field, n);
        let two = BoundedComplex::two_term(0, d.clone()).unwrap();
        if torsion(&two, &cohomology(&two)).unwrap() != d.determinant().unwrap() {
            bad.push(format!("trial {t}: {n}x{n} two-term complex"));
        }
        // oracle torsion agrees with the library on random complexes
        let c1 = random_complex(&mut rng, field);
        let c2 = random_complex(&mut rng, field);
        let (h1, h2) = (cohomology(&c1), cohomology(&c2));
        let (t1, t2) = (torsion(&c1, &h1).unwrap(), torsion(&c2, &h2).unwrap());
        if t1 != oracle_torsion(&c1, &reps(&c1, &h1)) || t2 != oracle_torsion(&c2, &reps(&c2, &h2)) {
            bad.push(format!("trial {t}: torsion differs from oracle"));
        }
        // direct sums
        let sum = c1.direct_sum(&c2);
        let hs = h1.direct_sum(&h2);
        let sign = oracle_sum_sign(field, &c1, &h_dims(&c1, &h1), &c2, &h_dims(&c2, &h2));
        let ts = torsion(&sum, &hs).unwrap();
        if ts != &(&t1 * &t2) * &sign || direct_sum_sign(&c1, &h1, &c2, &h2) != sign {
            bad.push(format!("trial {t}: direct sum {ts} vs {t1} * {t2} * {sign}"));
        }
        // elementary expansion
        let j = rng.gen_range(c1.lo() - 1..=c1.hi());
        let (e, er) = expanded_reps(&c1, &reps(&c1, &h1), j);
        if oracle_torsion(&e, &er) != t1 {
            bad.push(format!("trial {t}: expansion at {j} changes torsion"));
        }
        if h1.is_acyclic() && torsion(&e, &cohomology(&e)).unwrap() != t1 {
            bad.push(format!("trial {t}: library torsion of acyclic expansion at {j} differs"));
        }
    }
    let el = start.elapsed();
    Verdict { pass: bad.is_empty(), detail: format!("100 trials, {} failures, {}{}", bad.len(), secs(el), first(&bad)), expected_mode: None }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    // `cargo test -- <filter>` style arguments are accepted and ignored.
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 9] = [
        ("circle epsilon-factorization", criterion_1),
        ("choice-independence", criterion_2),
        ("Morse index formula", criterion_3),
        ("local Morse stability", criterion_4),
        ("lens vanishing and transversality", criterion_5),
        ("additivity", criterion_6),
        ("partition machinery", criterion_7),
        ("sign coherence", criterion_8),
        ("torsion conventions", criterion_9),
    ];
    let mut unexpected = 0;
    let mut red = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        println!("criterion {} {name}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            red += 1;
            if v.expected_mode != Some(true) {
                unexpected += 1;
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - red);
    if unexpected > 0 || (strict && red > 0) {
        std::process::exit(1);
    }
}

