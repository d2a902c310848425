//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use morsegraded::automaton::{
    brute_force_counts, build_degree_d_automaton, build_quadratic_automaton, rational_series, Word, DEFAULT_STATE_BUDGET,
};
use morsegraded::cancel::{
    cancel_interval, check_321_uniqueness, enumerate_gradient_paths, is_321_avoiding, morse_boundary, non_essential_sets,
    transforming_permutation, CancellationResult, Uniqueness, DEFAULT_PATH_CAP,
};
use morsegraded::facets::{check_crossing_condition, FacetOrder};
use morsegraded::fixtures;
use morsegraded::groebner::toric_groebner_basis;
use morsegraded::homology::{below_vanishing_bound, tor_ranks, verify_vanishing, OrderComplex};
use morsegraded::linalg::Field;
use morsegraded::morse::{
    build_face_matching, direct_interval_system, morse_numbers, msi_characterization, reduced_euler, unreduced,
    IntervalMorse,
};
use morsegraded::words::{class_of, jprime_classes};
use morsegraded::{GroebnerBasis, Monomial, Multidegree, OrderKind, SemigroupPresentation, TermOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CEILING: u32 = 20;
const FIELDS: [Field; 3] = [Field(0), Field(2), Field(3)];

struct Ring {
    name: String,
    sg: SemigroupPresentation,
    gb: GroebnerBasis,
    cfg: FacetOrder,
}

fn ring(name: &str) -> Ring {
    let sg = fixtures::by_name(name).unwrap();
    let order = TermOrder::default_lex(sg.ngens());
    ring_with(name, sg, order).unwrap()
}

fn ring_with(name: &str, sg: SemigroupPresentation, order: TermOrder) -> morsegraded::Result<Ring> {
    let gb = toric_groebner_basis(&sg, &order, CEILING)?;
    Ok(Ring { name: name.to_string(), sg, gb, cfg: FacetOrder::new(order) })
}

/// Cancels every nonzero interval of the window, in parallel.
fn cancel_window(r: &Ring, max_degree: u32) -> Vec<(Multidegree, IntervalMorse, CancellationResult)> {
    r.sg.elements_up_to_degree(max_degree)
        .into_par_iter()
        .filter(|l| !l.is_zero())
        .map(|l| {
            let (m, c) = cancel_interval(&r.sg, &r.gb, &r.cfg, &l, DEFAULT_PATH_CAP).unwrap();
            (l, m, c)
        })
        .collect()
}

fn padded(mut v: Vec<usize>, len: usize) -> Vec<usize> {
    v.resize(len.max(v.len()), 0);
    v
}

fn same_counts(a: &[usize], b: &[usize]) -> bool {
    let n = a.len().max(b.len());
    padded(a.to_vec(), n) == padded(b.to_vec(), n)
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let r = ring("e1");
    let lambda = Multidegree(vec![2, 2, 1, 1]);
    let (m, c) = cancel_interval(&r.sg, &r.gb, &r.cfg, &lambda, DEFAULT_PATH_CAP).unwrap();
    let cell = |labels: &[usize]| m.critical.iter().find(|c| c.labels == labels).cloned();
    let (Some(top), Some(low)) = (cell(&[3, 2, 1, 4]), cell(&[2, 1, 3, 4])) else {
        return check(false, "expected critical cells missing");
    };
    let shapes = top.ranks == [1, 2, 3] && top.dim == 2 && low.ranks == [1, 2] && low.dim == 1;
    let paths = enumerate_gradient_paths(&m.table, &m.partner, top.face, low.face, DEFAULT_PATH_CAP).unwrap().len();
    let survivors = unreduced(&c.morse_numbers(), true);
    let oracle = OrderComplex::build(&r.sg, &Multidegree::zero(4), &lambda).reduced_betti(Field::RATIONALS);
    let oracle_reduced = padded(oracle[1..].to_vec(), 3);
    let ok = shapes && paths == 1 && survivors == [1, 0, 2] && oracle_reduced == [0, 0, 2];
    check(
        ok,
        format!(
            "cells {:?}/{} and {:?}/{}, {paths} path, survivors {survivors:?}, oracle reduced {oracle_reduced:?}",
            top.ranks, top.dim, low.ranks, low.dim
        ),
    )
}

fn criterion_2() -> Outcome {
    let r = ring("e2");
    let lambda = r.sg.phi(&Monomial::from_indices(6, &[1, 2, 3, 4, 5]));
    let m = build_face_matching(&r.sg, &r.gb, &r.cfg, &Multidegree::zero(5), &lambda).unwrap();
    let facet = [3, 2, 1, 4, 5];
    let Some(stated) = m.critical.iter().find(|c| c.labels == facet) else {
        return check(false, "facet contributes no critical cell");
    };
    let j = stated.facet;
    let span = (facet.iter().position(|&x| x == 1).unwrap(), facet.iter().position(|&x| x == 5).unwrap());
    let sets = non_essential_sets(&m, &r.cfg, &m.partner, j, DEFAULT_PATH_CAP).unwrap();
    let members: BTreeSet<usize> =
        sets.iter().filter(|s| s.span == span).flat_map(|s| s.members.iter().map(|x| x.label)).collect();
    let set_ok = members == BTreeSet::from([2, 3, 4]);

    // Crit(T): the labels outside T descend below z1, those in T follow it.
    let facet_of = |t: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = [4, 3, 2].into_iter().filter(|x| !t.contains(x)).collect();
        v.push(1);
        v.extend(t.iter().copied());
        v.push(5);
        v
    };
    let subsets: Vec<Vec<usize>> = (0..8u32)
        .map(|b| [2, 3, 4].into_iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, x)| x).collect())
        .collect();
    let mut cells = Vec::new();
    for t in &subsets {
        match m.critical.iter().find(|c| c.labels == facet_of(t)) {
            Some(c) if c.dim == 3 - t.len() as i32 => cells.push(c.face),
            _ => return check(false, format!("Crit({t:?}) missing or of wrong dimension")),
        }
    }
    let mut bad = 0;
    let mut edges = 0;
    for (a, ta) in subsets.iter().enumerate() {
        for (b, tb) in subsets.iter().enumerate() {
            if tb.len() != ta.len() + 1 {
                continue;
            }
            let n = enumerate_gradient_paths(&m.table, &m.partner, cells[a], cells[b], DEFAULT_PATH_CAP).unwrap().len();
            let covers = ta.iter().all(|x| tb.contains(x));
            edges += usize::from(n > 0);
            if n != usize::from(covers) {
                bad += 1;
            }
        }
    }
    check(
        set_ok && bad == 0,
        format!(
            "cell on ranks {:?} dim {}, non-essential set {members:?}, {edges} one-path covering edges, {bad} mismatches",
            stated.ranks, stated.dim
        ),
    )
}

fn random_semigroups(count: usize, log: &mut Vec<String>) -> Vec<Ring> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_5eed);
    let mut out = Vec::new();
    let mut attempt = 0;
    while out.len() < count && attempt < 1000 {
        attempt += 1;
        let n = rng.gen_range(3..=6);
        let e = rng.gen_range(1..=5);
        let gens: Vec<Vec<u32>> = (0..n).map(|_| (0..e).map(|_| rng.gen_range(0..=3)).collect()).collect();
        let sg = match SemigroupPresentation::new(e, gens.clone()) {
            Ok(s) => s,
            Err(err) => {
                log.push(format!("resample {gens:?}: {err}"));
                continue;
            }
        };
        match ring_with(&format!("random{attempt} {gens:?}"), sg, TermOrder::default_lex(n)) {
            Ok(r) => out.push(r),
            Err(err) => log.push(format!("resample {gens:?}: {err}")),
        }
    }
    out
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut log = Vec::new();
    let mut rings: Vec<Ring> = ["e1", "e2", "e3", "sharp3"].into_iter().map(ring).collect();
    let random = random_semigroups(20, &mut log);
    let nrandom = random.len();
    rings.extend(random);
    let mut checks = 0;
    let mut violations = Vec::new();
    for r in &rings {
        let t = Instant::now();
        // any term order's basis degree gives a valid bound; take the smaller
        let grevlex = TermOrder::new(OrderKind::GradedRevlex, (0..r.sg.ngens()).rev().collect()).unwrap();
        let d = match toric_groebner_basis(&r.sg, &grevlex, CEILING) {
            Ok(g) => g.effective_degree().min(r.gb.effective_degree()),
            Err(_) => r.gb.effective_degree(),
        };
        let rep = verify_vanishing(&r.sg, d, 6, &FIELDS);
        println!("    {}: d={d}, {} checks ({:.1}s)", r.name, rep.checks, t.elapsed().as_secs_f64());
        checks += rep.checks;
        for v in rep.violations {
            violations.push(format!("{} at {:?} dim {} over {:?}", r.name, v.multidegree.0, v.dim, v.field));
        }
    }
    for line in &log {
        println!("    {line}");
    }
    for v in violations.iter().take(5) {
        println!("    violation: {v}");
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        violations.is_empty() && nrandom >= 20 && secs <= 600.0,
        format!(
            "{} rings ({nrandom} random, {} resampled), {checks} checks, {} violations, {secs:.1}s",
            rings.len(),
            log.len(),
            violations.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [2usize, 3] {
        let r = ring(&format!("sharp{d}"));
        let lambda = r.sg.phi(&Monomial::from_indices(2 * d, &(0..d).collect::<Vec<_>>()));
        let betti = OrderComplex::build(&r.sg, &Multidegree::zero(d * d), &lambda).reduced_betti(Field::RATIONALS);
        let b0 = betti.get(1).copied().unwrap_or(0);
        let deg = r.sg.degree(&lambda).unwrap();
        let d_gb = r.gb.effective_degree();
        // the bound must not force H̃_0 to vanish here
        let untouched = !below_vanishing_bound(0, deg, d_gb);
        let (_, c) = cancel_interval(&r.sg, &r.gb, &r.cfg, &lambda, DEFAULT_PATH_CAP).unwrap();
        let zero_cells = c.survivors.iter().filter(|s| s.dim == 0).count();
        ok &= b0 >= 1 && untouched && d_gb == d as u32 && zero_cells >= 1;
        parts.push(format!("d={d}: b0={b0}, surviving 0-cells {zero_cells}"));
    }
    check(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let plan = [
        ("e1", 5),
        ("e2", 5),
        ("e3", 5),
        ("sharp2", 6),
        ("sharp3", 5),
        ("free3", 4),
        ("quartic", 6),
        ("num345", 6),
    ];
    let mut intervals = 0;
    let mut failures = Vec::new();
    for (name, deg) in plan {
        let r = ring(name);
        let rows: Vec<(Multidegree, bool, bool)> = cancel_window(&r, deg)
            .into_par_iter()
            .map(|(l, m, c)| {
                let oc = OrderComplex::build(&r.sg, &Multidegree::zero(r.sg.dimension()), &l);
                let euler = oc.reduced_euler();
                let mut ineq = true;
                let mut eul = true;
                for counts in [morse_numbers(&m.critical), c.morse_numbers()] {
                    eul &= reduced_euler(&counts) == euler;
                    for field in FIELDS {
                        let b = oc.reduced_betti(field);
                        let n = counts.len().max(b.len());
                        let (mc, bc) = (padded(counts.clone(), n), padded(b, n));
                        ineq &= mc.iter().zip(&bc).all(|(x, y)| x >= y);
                        let (mu, bu) = (unreduced(&mc, true), unreduced(&bc, true));
                        ineq &= mu.iter().zip(&bu).all(|(x, y)| x >= y);
                    }
                }
                (l, ineq, eul)
            })
            .collect();
        intervals += rows.len();
        for (l, ineq, eul) in rows {
            if !ineq || !eul {
                failures.push(format!("{name} {:?} inequalities {ineq} euler {eul}", l.0));
            }
        }
    }
    for f in failures.iter().take(5) {
        println!("    {f}");
    }
    check(failures.is_empty(), format!("{intervals} intervals, {} failures", failures.len()))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["e1", "e3"] {
        let r = ring(name);
        let tor = tor_ranks(&r.sg, 5, Field::RATIONALS);
        let mut mismatches = 0;
        let mut bad_boundary = 0;
        let window = cancel_window(&r, 5);
        for (l, m, c) in &window {
            if !same_counts(&c.morse_numbers(), &tor.interval_betti[l]) {
                mismatches += 1;
            }
            let b = morse_boundary(m, c);
            if !b.is_minimal() || !b.squares_to_zero {
                bad_boundary += 1;
            }
        }
        ok &= mismatches == 0 && bad_boundary == 0;
        parts.push(format!("{name}: {} multidegrees, {mismatches} m≠β, {bad_boundary} boundary failures", window.len()));
    }
    check(ok, parts.join("; "))
}

/// Survivor token words and accepted words of each multidegree differ.
fn language_mismatches(r: &Ring, deg: u32) -> (usize, usize, bool) {
    let a = build_degree_d_automaton(&r.gb, &r.cfg, DEFAULT_STATE_BUDGET).unwrap();
    let window = cancel_window(r, deg);
    let mut bad = 0;
    let mut lengths_ok = true;
    for (l, m, c) in &window {
        let survivors: BTreeSet<Word> = c
            .survivors
            .iter()
            .map(|s| {
                let w = s.token_word(m);
                lengths_ok &= w.len() as i32 == s.dim + 2;
                w
            })
            .collect();
        let accepted: BTreeSet<Word> =
            r.sg.fiber_factorizations(l).iter().flat_map(|f| a.words_with_content(f)).collect();
        if survivors != accepted {
            bad += 1;
        }
    }
    (window.len(), bad, lengths_ok)
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, deg) in [("e1", 6), ("e2", 6), ("e3", 6), ("sharp2", 6), ("sharp3", 6), ("free4", 6)] {
        let r = ring(name);
        let (n, bad, lengths_ok) = language_mismatches(&r, deg);
        let a = build_degree_d_automaton(&r.gb, &r.cfg, DEFAULT_STATE_BUDGET).unwrap();
        let series = rational_series(&a).expand(9);
        let dfa: Vec<u64> = a.count_words(8).iter().map(|c| u64::try_from(c).unwrap()).collect();
        let brute = brute_force_counts(&r.gb, &r.cfg, 8);
        let mut counts_ok = (0..=8).all(|k| series[k] == brute[k].into() && dfa[k] == brute[k]);
        if r.gb.effective_degree() <= 2 {
            let q = build_quadratic_automaton(&r.gb, &r.cfg, DEFAULT_STATE_BUDGET).unwrap();
            counts_ok &= q.count_words(8) == a.count_words(8);
        }
        ok &= bad == 0 && lengths_ok && counts_ok;
        parts.push(format!("{name} {bad}/{n}"));
    }
    let r = ring("e1");
    let series = rational_series(&build_degree_d_automaton(&r.gb, &r.cfg, DEFAULT_STATE_BUDGET).unwrap()).expand(3);
    let tor = tor_ranks(&r.sg, 2, Field::RATIONALS);
    let e1_ok = series[1] == 5.into() && series[2] == 11.into() && tor.total(1) == 5 && tor.total(2) == 11;
    ok &= e1_ok;
    check(
        ok,
        format!(
            "language mismatches {}; e1 t^1={} t^2={} tor totals {} {}",
            parts.join(", "),
            series[1],
            series[2],
            tor.total(1),
            tor.total(2)
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["e1", "e2"] {
        let r = ring(name);
        let mut by_content: BTreeMap<Monomial, Vec<Vec<usize>>> = BTreeMap::new();
        for (_, _, c) in cancel_window(&r, 6) {
            for s in c.survivors {
                by_content.entry(s.content.clone()).or_default().push(s.word());
            }
        }
        let contents: Vec<Monomial> = r
            .sg
            .elements_up_to_degree(6)
            .iter()
            .flat_map(|l| r.sg.fiber_factorizations(l))
            .filter(|f| !f.is_one() && f.degree() <= 6)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let bad: usize = contents
            .par_iter()
            .map(|content| {
                let classes = jprime_classes(&r.gb, &r.cfg, content);
                let live = classes.iter().filter(|c| !c.stuttering).count();
                let words = by_content.get(content).cloned().unwrap_or_default();
                let mut hit = BTreeSet::new();
                let mut fine = live == words.len();
                for w in &words {
                    match class_of(&r.gb, &r.cfg, &classes, w) {
                        Some(k) if !classes[k].stuttering && classes[k].representative == *w => fine &= hit.insert(k),
                        _ => fine = false,
                    }
                }
                usize::from(!fine)
            })
            .sum();
        ok &= bad == 0;
        parts.push(format!("{name}: {} contents, {bad} mismatches", contents.len()));
    }
    check(ok, parts.join("; "))
}

fn content_lex_orders(n: usize) -> Vec<(String, TermOrder)> {
    let down: Vec<usize> = (0..n).rev().collect();
    let up: Vec<usize> = (0..n).collect();
    let mut out = vec![
        ("lex".to_string(), TermOrder::new(OrderKind::Lex, down.clone()).unwrap()),
        ("lex-reversed".to_string(), TermOrder::new(OrderKind::Lex, up.clone()).unwrap()),
        ("grlex".to_string(), TermOrder::new(OrderKind::GradedLex, down.clone()).unwrap()),
        ("grevlex".to_string(), TermOrder::new(OrderKind::GradedRevlex, down).unwrap()),
    ];
    let mut shuffled = up;
    shuffled.rotate_left(n / 2);
    out.push(("lex-rotated".to_string(), TermOrder::new(OrderKind::Lex, shuffled).unwrap()));
    out
}

fn criterion_9() -> Outcome {
    let mut intervals = 0;
    let mut facets = 0;
    let mut crossing = Vec::new();
    let mut characterization = 0;
    for (name, deg) in [("e1", 5), ("e2", 4), ("e3", 5), ("sharp2", 5), ("sharp3", 4), ("quartic", 5), ("num345", 6)] {
        let sg = fixtures::by_name(name).unwrap();
        for (oname, order) in content_lex_orders(sg.ngens()) {
            let r = ring_with(name, fixtures::by_name(name).unwrap(), order).unwrap();
            let rows: Vec<(usize, bool, usize)> = r
                .sg
                .elements_up_to_degree(deg)
                .into_par_iter()
                .filter(|l| !l.is_zero())
                .map(|l| {
                    let m = build_face_matching(&r.sg, &r.gb, &r.cfg, &Multidegree::zero(r.sg.dimension()), &l).unwrap();
                    let cross = check_crossing_condition(&m.facets).is_ok();
                    let mut diff = 0;
                    for (j, f) in m.facets.iter().enumerate() {
                        let direct = direct_interval_system(&m.facets, j).unwrap();
                        let msi: Vec<(usize, usize)> =
                            msi_characterization(&r.gb, &r.cfg, &f.labels).iter().map(|i| (i.lo, i.hi)).collect();
                        diff += usize::from(direct != msi);
                    }
                    (m.facets.len(), cross, diff)
                })
                .collect();
            intervals += rows.len();
            for (nf, cross, diff) in rows {
                facets += nf;
                characterization += diff;
                if !cross {
                    crossing.push(format!("{name}/{oname}"));
                }
            }
        }
    }
    crossing.dedup();
    check(
        crossing.is_empty() && characterization == 0,
        format!(
            "{intervals} intervals, {facets} facets, crossing failures {crossing:?}, {characterization} characterization discrepancies"
        ),
    )
}

/// Replays each ledger on a fresh copy of the matching and counts paths
/// independently before every reversal.
fn criterion_10() -> Outcome {
    let mut certified = 0;
    let mut wrong = 0;
    for (name, deg) in [("e1", 5), ("e2", 5), ("e3", 5), ("sharp2", 6), ("sharp3", 6)] {
        let r = ring(name);
        for (_, m, c) in cancel_window(&r, deg) {
            let mut partner = m.partner.clone();
            for p in &c.ledger {
                let n = enumerate_gradient_paths(&m.table, &partner, p.tau.face, p.sigma.face, DEFAULT_PATH_CAP)
                    .map(|v| v.len())
                    .unwrap_or(usize::MAX);
                if p.verdict == Uniqueness::UniqueByTheorem {
                    certified += 1;
                    wrong += usize::from(n != 1);
                }
                let cells = &p.path.cells;
                for k in (0..cells.len().saturating_sub(1)).step_by(2) {
                    partner[cells[k]] = Some(cells[k + 1]);
                    partner[cells[k + 1]] = Some(cells[k]);
                }
            }
        }
    }

    // pairs of critical cells whose labels differ by a 321-containing
    // permutation and which are joined by at least one path
    let r = ring("sharp3");
    let counts: Vec<usize> = cancel_window(&r, 5)
        .into_par_iter()
        .flat_map_iter(|(_, m, _)| {
            let mut out = Vec::new();
            for t in &m.critical {
                for s in &m.critical {
                    if t.dim != s.dim + 1 || t.content != s.content {
                        continue;
                    }
                    let Some(p) = transforming_permutation(&t.labels, &s.labels) else { continue };
                    if is_321_avoiding(&p) {
                        continue;
                    }
                    debug_assert_eq!(check_321_uniqueness(&r.cfg, &t.labels, &s.labels), Uniqueness::NeedsEnumeration);
                    let n = enumerate_gradient_paths(&m.table, &m.partner, t.face, s.face, DEFAULT_PATH_CAP).unwrap().len();
                    if n > 0 {
                        out.push(n);
                    }
                }
            }
            out
        })
        .collect();
    let over = counts.iter().filter(|&&n| n > 2).count();
    check(
        certified > 0 && wrong == 0 && counts.len() >= 5 && over == 0,
        format!(
            "{certified} certified pairs, {wrong} without exactly one path; {} 321-containing pairs, max {} paths",
            counts.len(),
            counts.iter().max().unwrap_or(&0)
        ),
    )
}

/// Not a criterion: the mixed-degree quartic, where interspersed leading
/// terms are outside what the word construction models.
fn quartic_note() -> String {
    let r = ring("quartic");
    let (n, bad, _) = language_mismatches(&r, 7);
    let tor = tor_ranks(&r.sg, 7, Field::RATIONALS);
    let minimal = cancel_window(&r, 7).iter().filter(|(l, _, c)| same_counts(&c.morse_numbers(), &tor.interval_betti[l])).count();
    format!("quartic degree 7: {bad}/{n} multidegrees with differing word sets, m=β on {minimal}/{n}")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("E1 interval (2,2,1,1)", criterion_1),
        ("E2 Boolean algebra of critical cells", criterion_2),
        ("vanishing below the bound", criterion_3),
        ("sharpness rings", criterion_4),
        ("Morse inequalities and Euler characteristic", criterion_5),
        ("quadratic minimality", criterion_6),
        ("automaton and series", criterion_7),
        ("commutation classes", criterion_8),
        ("crossing condition and interval characterization", criterion_9),
        ("path uniqueness", criterion_10),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let status = if out.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!out.ok);
        println!("criterion {:>2} {status}: {title}: {} ({:.1}s)", i + 1, out.detail, start.elapsed().as_secs_f64());
    }
    println!("note: {}", quartic_note());
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
