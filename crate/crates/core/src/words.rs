//! Words in the generators read from the top of a chain down, the partial
//! commutation they inherit from the initial ideal, and the units (letters
//! and increasing leading terms of degree at least three) that survivor
//! words are built from.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::facets::FacetOrder;
use crate::groebner::GroebnerBasis;
use crate::monomial::Monomial;
use crate::morse::{msi_characterization, IntervalKind};

/// Two labels commute when their product is a standard monomial.
pub fn letters_commute(gb: &GroebnerBasis, a: usize, b: usize) -> bool {
    !gb.in_initial_ideal(&Monomial::from_indices(gb.nvars(), &[a, b]))
}

/// Letters plus one unit per leading term of degree three or more, each
/// stored top-down (largest label first).
#[derive(Clone, Debug, Serialize)]
pub struct UnitAlphabet {
    pub units: Vec<Vec<usize>>,
    /// Position of each unit in the order of its top-down labels.
    pub rank: Vec<usize>,
    pub commute: Vec<Vec<bool>>,
    #[serde(skip)]
    index: HashMap<Vec<usize>, usize>,
    /// Quadratic leading terms as ordered pairs `(low, high)`.
    pub quadratic: Vec<(usize, usize)>,
}

impl UnitAlphabet {
    pub fn new(gb: &GroebnerBasis, cfg: &FacetOrder) -> UnitAlphabet {
        let n = gb.nvars();
        let mut units: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut quadratic = Vec::new();
        for lt in gb.leading_terms() {
            let mut labels = cfg.sorted_labels(&lt.indices());
            match labels.len() {
                0 | 1 => {}
                2 => quadratic.push((labels[0], labels[1])),
                _ => {
                    labels.reverse();
                    units.push(labels);
                }
            }
        }
        let mut by_order: Vec<usize> = (0..units.len()).collect();
        by_order.sort_by(|&a, &b| cfg.compare_words(&units[a], &units[b]));
        let mut rank = vec![0; units.len()];
        for (r, &u) in by_order.iter().enumerate() {
            rank[u] = r;
        }
        let m = units.len();
        let mut commute = vec![vec![false; m]; m];
        for a in 0..m {
            for b in 0..m {
                commute[a][b] = units_commute(gb, &units[a], &units[b]);
            }
        }
        let index = units.iter().enumerate().map(|(i, u)| (u.clone(), i)).collect();
        UnitAlphabet { units, rank, commute, index, quadratic }
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn is_letter(&self, u: usize) -> bool {
        self.units[u].len() == 1
    }

    pub fn lookup(&self, top_down: &[usize]) -> Option<usize> {
        self.index.get(top_down).copied()
    }

    /// Largest and smallest label of a unit.
    pub fn top(&self, u: usize) -> usize {
        self.units[u][0]
    }

    pub fn bottom(&self, u: usize) -> usize {
        *self.units[u].last().unwrap()
    }

    /// Whether unit `below` may follow unit `above` in a top-down word: a
    /// descent across the boundary, or a quadratic leading term spanning it.
    pub fn may_follow(&self, cfg: &FacetOrder, above: usize, below: usize) -> bool {
        let (lo, hi) = (self.top(below), self.bottom(above));
        cfg.label_cmp(lo, hi) == Ordering::Greater || self.quadratic.contains(&(lo, hi))
    }

    /// Token blocks a unit contributes: a letter, or the top label of a leading
    /// term followed by the rest of it.
    pub fn symbols(&self, u: usize) -> Vec<Vec<usize>> {
        let w = &self.units[u];
        if w.len() == 1 {
            vec![w.clone()]
        } else {
            vec![vec![w[0]], w[1..].to_vec()]
        }
    }

    /// Splits bottom-up chain labels into units, read top-down. `None` unless
    /// the skipped intervals are disjoint, cover every rank, and each one of
    /// height two or more is exactly a leading term not sharing labels with
    /// another.
    pub fn decompose(&self, gb: &GroebnerBasis, cfg: &FacetOrder, labels: &[usize]) -> Option<Vec<usize>> {
        if labels.is_empty() {
            return Some(vec![]);
        }
        let sys = msi_characterization(gb, cfg, labels);
        let mut covered = vec![false; labels.len()];
        let mut spans: BTreeMap<usize, usize> = BTreeMap::new();
        for r in &sys {
            for x in r.lo..=r.hi {
                if std::mem::replace(&mut covered[x], true) {
                    return None;
                }
            }
            if let IntervalKind::Syzygy { element } = r.kind {
                let (p, q) = r.label_span();
                if q > p + 1 {
                    if Monomial::from_indices(gb.nvars(), &labels[p..=q]) != gb.elements[element].plus {
                        return None;
                    }
                    spans.insert(p, q);
                }
            }
        }
        if !covered[1..].iter().all(|&c| c) {
            return None;
        }
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < labels.len() {
            match spans.get(&pos) {
                Some(&q) => {
                    let u: Vec<usize> = labels[pos..=q].iter().rev().copied().collect();
                    out.push(self.lookup(&u)?);
                    pos = q + 1;
                }
                None => {
                    out.push(labels[pos]);
                    pos += 1;
                }
            }
        }
        // a later span starting inside an earlier one means shared labels
        if spans.iter().zip(spans.iter().skip(1)).any(|((_, &q), (&p2, _))| p2 <= q) {
            return None;
        }
        out.reverse();
        Some(out)
    }

    /// Whether a top-down unit word is the least member of its commutation
    /// class and no unit recurs with only commuting units in between.
    pub fn is_normal(&self, word: &[usize]) -> bool {
        let mut state = NormalState::default();
        word.iter().all(|&u| state.push(self, u))
    }
}

/// Letter `x` against unit `u` of degree `k ≥ 3`: `x` commutes with every
/// label of `u` and with both degree-`k−1` faces of it.
fn letter_unit_commute(gb: &GroebnerBasis, x: usize, u: &[usize]) -> bool {
    if u.len() == 1 {
        return letters_commute(gb, x, u[0]);
    }
    let n = gb.nvars();
    let mut without_top: Vec<usize> = u[1..].to_vec();
    without_top.push(x);
    let mut without_bottom: Vec<usize> = u[..u.len() - 1].to_vec();
    without_bottom.push(x);
    !gb.in_initial_ideal(&Monomial::from_indices(n, &without_top))
        && !gb.in_initial_ideal(&Monomial::from_indices(n, &without_bottom))
        && u.iter().all(|&y| letters_commute(gb, x, y))
}

fn units_commute(gb: &GroebnerBasis, s: &[usize], t: &[usize]) -> bool {
    if s.len() == 1 {
        return letter_unit_commute(gb, s[0], t);
    }
    if t.len() == 1 {
        return letter_unit_commute(gb, t[0], s);
    }
    s.iter().all(|&x| letter_unit_commute(gb, x, t)) && t.iter().all(|&y| letter_unit_commute(gb, y, s))
}

/// Incremental normal-form check: `pending` holds units that would make the
/// word non-normal if read next, `open` the units whose next occurrence
/// would stutter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalState {
    pub last: Option<usize>,
    pub pending: Vec<usize>,
    pub open: Vec<usize>,
}

impl NormalState {
    /// Reads a unit; false if the word stops being normal.
    pub fn push(&mut self, alpha: &UnitAlphabet, u: usize) -> bool {
        if self.pending.contains(&u) || (self.open.contains(&u) && alpha.commute[u][u]) {
            return false;
        }
        let c = &alpha.commute[u];
        self.pending.retain(|&v| c[v]);
        for v in 0..alpha.len() {
            if alpha.rank[v] < alpha.rank[u] && c[v] && !self.pending.contains(&v) {
                self.pending.push(v);
            }
        }
        self.pending.sort_unstable();
        self.open.retain(|&v| c[v]);
        if !self.open.contains(&u) {
            self.open.push(u);
            self.open.sort_unstable();
        }
        self.last = Some(u);
        true
    }
}

/// Equivalence class of words of one content under commutation of labels
/// whose product is standard.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JPrimeClass {
    pub content: Monomial,
    /// Lexicographically least member, top-down.
    pub representative: Vec<usize>,
    pub size: usize,
    pub stuttering: bool,
}

fn permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = sorted.to_vec();
    loop {
        out.push(cur.clone());
        // next permutation in place
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// All non-stuttering commutation classes of words with the given content.
/// Stuttering classes are returned too, flagged.
pub fn jprime_classes(gb: &GroebnerBasis, cfg: &FacetOrder, content: &Monomial) -> Vec<JPrimeClass> {
    let mut letters = content.indices();
    letters.sort_unstable();
    let words = permutations(&letters);
    let pos: HashMap<&[usize], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut parent: Vec<usize> = (0..words.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut buf = Vec::new();
    for (i, w) in words.iter().enumerate() {
        for k in 0..w.len().saturating_sub(1) {
            if w[k] != w[k + 1] && letters_commute(gb, w[k], w[k + 1]) {
                buf.clear();
                buf.extend_from_slice(w);
                buf.swap(k, k + 1);
                let j = pos[buf.as_slice()];
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut classes: BTreeMap<usize, (Vec<usize>, usize, bool)> = BTreeMap::new();
    for (i, w) in words.iter().enumerate() {
        let r = find(&mut parent, i);
        let stutter = w.windows(2).any(|p| p[0] == p[1] && letters_commute(gb, p[0], p[0]));
        let e = classes.entry(r).or_insert_with(|| (w.clone(), 0, false));
        if cfg.compare_words(w, &e.0) == Ordering::Less {
            e.0 = w.clone();
        }
        e.1 += 1;
        e.2 |= stutter;
    }
    let mut out: Vec<JPrimeClass> = classes
        .into_values()
        .map(|(representative, size, stuttering)| JPrimeClass { content: content.clone(), representative, size, stuttering })
        .collect();
    out.sort_by(|a, b| cfg.compare_words(&a.representative, &b.representative));
    out
}

/// Index of the class containing `word`, if any.
pub fn class_of(gb: &GroebnerBasis, cfg: &FacetOrder, classes: &[JPrimeClass], word: &[usize]) -> Option<usize> {
    let rep = lex_least_equivalent(gb, cfg, word);
    classes.iter().position(|c| c.representative == rep)
}

/// Lexicographically least word reachable by commuting adjacent letters:
/// repeatedly take the least letter that commutes with everything before it.
pub fn lex_least_equivalent(gb: &GroebnerBasis, cfg: &FacetOrder, word: &[usize]) -> Vec<usize> {
    let mut rest = word.to_vec();
    let mut out = Vec::with_capacity(word.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for k in 0..rest.len() {
            if rest[..k].iter().all(|&y| y != rest[k] && letters_commute(gb, y, rest[k]))
                && best.map_or(true, |b| cfg.label_cmp(rest[k], rest[b]) == Ordering::Less)
            {
                best = Some(k);
            }
        }
        let k = best.unwrap();
        out.push(rest.remove(k));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::{toric_groebner_basis, TermOrder};
    use crate::fixtures;
    use proptest::prelude::*;

    fn setup(name: &str) -> (GroebnerBasis, FacetOrder) {
        let s = fixtures::by_name(name).unwrap();
        let o = TermOrder::default_lex(s.ngens());
        (toric_groebner_basis(&s, &o, 20).unwrap(), FacetOrder::new(o))
    }

    #[test]
    fn e1_classes() {
        let (gb, cfg) = setup("e1");
        let c = jprime_classes(&gb, &cfg, &Monomial::from_indices(5, &[1, 2, 3, 4]));
        assert_eq!(c.iter().filter(|c| !c.stuttering).count(), 2);
        assert_eq!(c.iter().map(|c| c.size).sum::<usize>(), 24);
        let c = jprime_classes(&gb, &cfg, &Monomial::from_indices(5, &[0, 0, 2, 3]));
        assert!(c.iter().all(|c| c.stuttering));
        let c = jprime_classes(&gb, &cfg, &Monomial::from_indices(5, &[3]));
        assert_eq!(c.len(), 1);
        assert!(!c[0].stuttering);
    }

    #[test]
    fn units_of_sharpness_ring() {
        let (gb, cfg) = setup("sharp3");
        let a = UnitAlphabet::new(&gb, &cfg);
        assert_eq!(a.len(), 7);
        assert_eq!(a.units[6], vec![5, 4, 3]);
        assert_eq!(a.symbols(6), vec![vec![5], vec![4, 3]]);
        // z3 z4 z5 bottom-up is one unit
        assert_eq!(a.decompose(&gb, &cfg, &[3, 4, 5]), Some(vec![6]));
        assert_eq!(a.decompose(&gb, &cfg, &[2, 1, 0]), Some(vec![0, 1, 2]));
        assert_eq!(a.decompose(&gb, &cfg, &[0, 1]), None);
    }

    #[test]
    fn quadratic_boundaries() {
        let (gb, cfg) = setup("e1");
        let a = UnitAlphabet::new(&gb, &cfg);
        assert_eq!(a.len(), 5);
        assert_eq!(a.decompose(&gb, &cfg, &[3, 2, 1, 4]), Some(vec![4, 1, 2, 3]));
        assert!(a.may_follow(&cfg, 4, 1));
        assert!(a.may_follow(&cfg, 2, 3));
        assert!(!a.may_follow(&cfg, 3, 2));
    }

    proptest! {
        #[test]
        fn least_equivalent_is_class_representative(w in proptest::collection::vec(0usize..5, 1..6)) {
            let (gb, cfg) = setup("e1");
            let content = Monomial::from_indices(5, &w);
            let classes = jprime_classes(&gb, &cfg, &content);
            let rep = lex_least_equivalent(&gb, &cfg, &w);
            prop_assert!(classes.iter().any(|c| c.representative == rep));
        }

        #[test]
        fn normal_words_are_class_minima(w in proptest::collection::vec(0usize..5, 1..6)) {
            let (gb, cfg) = setup("e1");
            let a = UnitAlphabet::new(&gb, &cfg);
            let least = lex_least_equivalent(&gb, &cfg, &w);
            let stutters = jprime_classes(&gb, &cfg, &Monomial::from_indices(5, &w))
                .into_iter()
                .find(|c| c.representative == least)
                .unwrap()
                .stuttering;
            prop_assert_eq!(a.is_normal(&w), least == w && !stutters);
        }
    }
}
