//! Gradient paths between critical cells, certified cancellation of pairs
//! joined by a unique path, and the boundary maps of the resulting Morse
//! complex.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::facets::FacetOrder;
use crate::groebner::GroebnerBasis;
use crate::monomial::Monomial;
use crate::morse::{build_face_matching, FaceTable, IntervalKind, IntervalMorse};
use crate::semigroup::{Multidegree, SemigroupPresentation};
use crate::words::UnitAlphabet;

pub const DEFAULT_PATH_CAP: usize = 10_000;

/// Cells visited by a gradient path: `τ, β₀, α₁, β₁, …, α_r, β_r = σ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GradientPath {
    pub cells: Vec<usize>,
}

impl GradientPath {
    pub fn source(&self) -> usize {
        self.cells[0]
    }

    pub fn target(&self) -> usize {
        *self.cells.last().unwrap()
    }

    /// Forman weight: `[τ:β₀] · Π (−[α_i:β_{i−1}][α_i:β_i])`.
    pub fn sign(&self, table: &FaceTable) -> i64 {
        let c = &self.cells;
        let mut s = table.incidence(c[0], c[1]);
        let mut k = 2;
        while k + 1 < c.len() {
            s *= -table.incidence(c[k], c[k - 1]) * table.incidence(c[k], c[k + 1]);
            k += 2;
        }
        s
    }
}

fn matched_up(partner: &[Option<usize>], table: &FaceTable, f: usize) -> Option<usize> {
    partner[f].filter(|&a| table.faces[a].len() > table.faces[f].len())
}

/// Every gradient path from `tau` to `sigma`, by depth-first search over the
/// modified Hasse diagram.
pub fn enumerate_gradient_paths(
    table: &FaceTable,
    partner: &[Option<usize>],
    tau: usize,
    sigma: usize,
    cap: usize,
) -> Result<Vec<GradientPath>> {
    let mut out = Vec::new();
    if table.faces[tau].len() != table.faces[sigma].len() + 1 || table.faces[tau].is_empty() {
        return Ok(out);
    }
    let mut cells = vec![tau];
    fn walk(
        table: &FaceTable,
        partner: &[Option<usize>],
        beta: usize,
        from: usize,
        sigma: usize,
        cap: usize,
        cells: &mut Vec<usize>,
        out: &mut Vec<GradientPath>,
    ) -> Result<()> {
        cells.push(beta);
        if beta == sigma {
            if out.len() >= cap {
                return Err(Error::PathCapExceeded { cap });
            }
            out.push(GradientPath { cells: cells.clone() });
        } else if let Some(alpha) = matched_up(partner, table, beta).filter(|&a| a != from) {
            cells.push(alpha);
            for (b2, _) in table.boundary(alpha) {
                if b2 != beta {
                    walk(table, partner, b2, alpha, sigma, cap, cells, out)?;
                }
            }
            cells.pop();
        }
        cells.pop();
        Ok(())
    }
    for (beta, _) in table.boundary(tau) {
        walk(table, partner, beta, tau, sigma, cap, &mut cells, &mut out)?;
    }
    Ok(out)
}

/// Number of gradient paths and their signed sum from `tau` to every
/// critical cell one dimension lower.
pub fn path_weights(table: &FaceTable, partner: &[Option<usize>], tau: usize) -> BTreeMap<usize, (u64, i64)> {
    let mut memo: HashMap<usize, Vec<(usize, u64, i64)>> = HashMap::new();
    // faces reached, processed bottom-up in DFS post-order
    fn weights(
        table: &FaceTable,
        partner: &[Option<usize>],
        beta: usize,
        memo: &mut HashMap<usize, Vec<(usize, u64, i64)>>,
    ) -> Vec<(usize, u64, i64)> {
        if let Some(v) = memo.get(&beta) {
            return v.clone();
        }
        let res = match partner[beta] {
            None => vec![(beta, 1, 1)],
            Some(alpha) if table.faces[alpha].len() > table.faces[beta].len() => {
                let mut acc: BTreeMap<usize, (u64, i64)> = BTreeMap::new();
                let up = table.incidence(alpha, beta);
                for (b2, s2) in table.boundary(alpha) {
                    if b2 == beta {
                        continue;
                    }
                    let step = -up * s2;
                    for (t, n, w) in weights(table, partner, b2, memo) {
                        let e = acc.entry(t).or_insert((0, 0));
                        e.0 = e.0.saturating_add(n);
                        e.1 += step * w;
                    }
                }
                acc.into_iter().map(|(t, (n, w))| (t, n, w)).collect()
            }
            Some(_) => Vec::new(),
        };
        memo.insert(beta, res.clone());
        res
    }
    let mut out: BTreeMap<usize, (u64, i64)> = BTreeMap::new();
    if table.faces[tau].is_empty() {
        return out;
    }
    for (beta, s) in table.boundary(tau) {
        for (t, n, w) in weights(table, partner, beta, &mut memo) {
            let e = out.entry(t).or_insert((0, 0));
            e.0 = e.0.saturating_add(n);
            e.1 += s * w;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    UniqueByTheorem,
    NeedsEnumeration,
}

/// Positions `p` with `b[i] = a[p[i]]`, matching repeated labels in order.
pub fn transforming_permutation(a: &[usize], b: &[usize]) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; a.len()];
    let mut p = Vec::with_capacity(b.len());
    for &x in b {
        let k = (0..a.len()).find(|&k| !used[k] && a[k] == x)?;
        used[k] = true;
        p.push(k);
    }
    Some(p)
}

pub fn is_321_avoiding(p: &[usize]) -> bool {
    // avoids 321 iff it is a union of two increasing subsequences; check via
    // the longest decreasing subsequence being at most 2
    let n = p.len();
    let mut best = vec![1usize; n];
    for i in 0..n {
        for j in 0..i {
            if p[j] > p[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
        if best[i] >= 3 {
            return false;
        }
    }
    true
}

/// Unique-by-theorem when `σ`'s labels come from `τ`'s by moving one
/// weakly ascending block up past a run of labels, or one label down.
pub fn check_321_uniqueness(cfg: &FacetOrder, tau: &[usize], sigma: &[usize]) -> Uniqueness {
    let Some(p) = transforming_permutation(tau, sigma) else { return Uniqueness::NeedsEnumeration };
    if !is_321_avoiding(&p) {
        return Uniqueness::NeedsEnumeration;
    }
    let n = p.len();
    let Some(i) = (0..n).find(|&k| p[k] != k) else { return Uniqueness::NeedsEnumeration };
    let m = (0..n).rev().find(|&k| p[k] != k).unwrap();
    // σ[i..=m] = τ[k+1..=m] ++ τ[i..=k] for some k
    for k in i..m {
        let rotated: Vec<usize> = ((k + 1)..=m).chain(i..=k).collect();
        if p[i..=m] != rotated[..] {
            continue;
        }
        let block_up = tau[i..=k].windows(2).all(|w| cfg.label_cmp(w[0], w[1]) != Ordering::Greater);
        let single_down = k + 1 == m;
        if block_up || single_down {
            return Uniqueness::UniqueByTheorem;
        }
    }
    Uniqueness::NeedsEnumeration
}

/// A critical cell described by the facet contributing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellInfo {
    pub face: usize,
    pub dim: i32,
    pub facet: usize,
    /// Bottom-up labels of the contributing facet.
    pub labels: Vec<usize>,
    pub ranks: Vec<usize>,
    pub content: Monomial,
}

impl CellInfo {
    pub fn of(m: &IntervalMorse, face: usize) -> CellInfo {
        let facet = m.table.owner[face];
        let mask = m.table.owner_mask[face];
        let f = &m.facets[facet];
        CellInfo {
            face,
            dim: m.table.dim(face),
            facet,
            labels: f.labels.clone(),
            ranks: (1..f.length()).filter(|r| mask >> r & 1 == 1).collect(),
            content: f.content.clone(),
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.ranks.len() + 1 == self.labels.len()
    }

    /// Labels read from the top of the chain down.
    pub fn word(&self) -> Vec<usize> {
        self.labels.iter().rev().copied().collect()
    }

    /// Label blocks read top-down, cut at the highest rank of each
    /// J-interval: one block per letter for saturated cells, and a leading
    /// term `a_1 ⋯ a_k` spanning a J-interval splits as `a_k` then the rest.
    pub fn token_word(&self, m: &IntervalMorse) -> Vec<Vec<usize>> {
        let mut cuts = vec![0];
        cuts.extend(m.systems[self.facet].j_intervals.iter().map(|r| r.hi));
        cuts.push(self.labels.len());
        let mut blocks: Vec<Vec<usize>> =
            cuts.windows(2).map(|w| self.labels[w[0]..w[1]].iter().rev().copied().collect()).collect();
        blocks.reverse();
        blocks
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchedPair {
    pub tau: CellInfo,
    pub sigma: CellInfo,
    pub path: GradientPath,
    pub verdict: Uniqueness,
    pub rule: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CancellationResult {
    pub multidegree: Multidegree,
    pub survivors: Vec<CellInfo>,
    pub ledger: Vec<MatchedPair>,
    #[serde(skip)]
    pub partner: Vec<Option<usize>>,
    pub notes: Vec<String>,
}

impl CancellationResult {
    /// Reduced survivor counts, index 0 being dimension −1.
    pub fn morse_numbers(&self) -> Vec<usize> {
        let max = self.survivors.iter().map(|c| c.dim).max().unwrap_or(-1);
        let mut out = vec![0usize; (max + 2) as usize];
        for c in &self.survivors {
            out[(c.dim + 1) as usize] += 1;
        }
        out
    }
}

/// Sequential certified cancellation on one interval.
pub struct Canceller<'a> {
    pub morse: &'a IntervalMorse,
    pub cfg: &'a FacetOrder,
    pub partner: Vec<Option<usize>>,
    pub critical: BTreeSet<usize>,
    pub ledger: Vec<MatchedPair>,
    pub cap: usize,
    pub notes: Vec<String>,
}

impl<'a> Canceller<'a> {
    pub fn new(morse: &'a IntervalMorse, cfg: &'a FacetOrder, cap: usize) -> Self {
        Canceller {
            morse,
            cfg,
            partner: morse.partner.clone(),
            critical: morse.critical.iter().map(|c| c.face).collect(),
            ledger: Vec::new(),
            cap,
            notes: Vec::new(),
        }
    }

    pub fn table(&self) -> &FaceTable {
        &self.morse.table
    }

    pub fn info(&self, face: usize) -> CellInfo {
        CellInfo::of(self.morse, face)
    }

    pub fn weights(&self, tau: usize) -> BTreeMap<usize, (u64, i64)> {
        path_weights(&self.morse.table, &self.partner, tau)
    }

    /// Reverses the path from `tau` to `sigma` if it is the only one.
    /// Returns whether the pair was cancelled.
    pub fn try_cancel(&mut self, tau: usize, sigma: usize, rule: &str) -> Result<bool> {
        if !self.critical.contains(&tau) || !self.critical.contains(&sigma) {
            return Ok(false);
        }
        let paths = match enumerate_gradient_paths(&self.morse.table, &self.partner, tau, sigma, self.cap) {
            Ok(p) => p,
            Err(Error::PathCapExceeded { .. }) => {
                self.notes.push(format!("path cap exceeded for pair ({tau}, {sigma})"));
                return Ok(false);
            }
            Err(e) => return Err(e),
        };
        if paths.len() != 1 {
            return Ok(false);
        }
        let path = paths.into_iter().next().unwrap();
        let (ti, si) = (self.info(tau), self.info(sigma));
        let verdict = check_321_uniqueness(self.cfg, &ti.labels, &si.labels);
        let c = &path.cells;
        let mut k = 0;
        while k + 1 < c.len() {
            self.partner[c[k]] = Some(c[k + 1]);
            self.partner[c[k + 1]] = Some(c[k]);
            k += 2;
        }
        self.critical.remove(&tau);
        self.critical.remove(&sigma);
        self.ledger.push(MatchedPair { tau: ti, sigma: si, path, verdict, rule: rule.to_string() });
        Ok(true)
    }

    pub fn finish(self) -> Result<CancellationResult> {
        if !crate::morse::verify_acyclic(&self.morse.table, &self.partner) {
            return Err(Error::AcyclicityFailure("matching after path reversals".into()));
        }
        let survivors = self.critical.iter().map(|&f| CellInfo::of(self.morse, f)).collect();
        Ok(CancellationResult {
            multidegree: self.morse.interval.top.clone(),
            survivors,
            ledger: self.ledger,
            partner: self.partner,
            notes: self.notes,
        })
    }
}

/// Syzygy intervals of a facet as label spans `(p, q)` with their basis element.
pub fn syzygy_spans(m: &IntervalMorse, facet: usize) -> Vec<(usize, usize, usize)> {
    m.systems[facet]
        .i_intervals
        .iter()
        .filter_map(|r| match r.kind {
            IntervalKind::Syzygy { element } => {
                let (p, q) = r.label_span();
                Some((p, q, element))
            }
            IntervalKind::Descent => None,
        })
        .collect()
}

/// Critical cells whose word is a normal form built from letters and
/// leading terms; these are kept by every cancellation strategy below.
pub fn is_protected(m: &IntervalMorse, gb: &GroebnerBasis, cfg: &FacetOrder, alpha: &UnitAlphabet, face: usize) -> bool {
    let info = CellInfo::of(m, face);
    alpha.decompose(gb, cfg, &info.labels).is_some_and(|units| alpha.is_normal(&units))
}

/// Cancels unprotected pairs of equal content joined by a unique gradient
/// path until none is left, scanning from the last critical cell.
fn greedy(c: &mut Canceller, protected: &BTreeSet<usize>, rule: &str) -> Result<()> {
    loop {
        let mut progress = false;
        let open: Vec<usize> = c.critical.iter().copied().filter(|f| !protected.contains(f)).collect();
        'scan: for &tau in open.iter().rev() {
            let content = c.info(tau).content;
            for (sigma, (n, _)) in c.weights(tau) {
                if n == 1 && !protected.contains(&sigma) && c.info(sigma).content == content && c.try_cancel(tau, sigma, rule)? {
                    progress = true;
                    break 'scan;
                }
            }
        }
        if !progress {
            return Ok(());
        }
    }
}

fn protected_cells(m: &IntervalMorse, gb: &GroebnerBasis, cfg: &FacetOrder) -> BTreeSet<usize> {
    let alpha = UnitAlphabet::new(gb, cfg);
    m.critical.iter().map(|c| c.face).filter(|&f| is_protected(m, gb, cfg, &alpha, f)).collect()
}

/// Quadratic case: every critical cell outside the normal-form words is
/// cancelled; a leftover unsaturated cell is an error.
pub fn cancel_quadratic(m: &IntervalMorse, gb: &GroebnerBasis, cfg: &FacetOrder, cap: usize) -> Result<CancellationResult> {
    if gb.effective_degree() > 2 {
        return Err(Error::InvalidBasis(format!("expected a quadratic basis, found degree {}", gb.effective_degree())));
    }
    let protected = protected_cells(m, gb, cfg);
    let mut c = Canceller::new(m, cfg, cap);
    greedy(&mut c, &protected, "normal-form")?;
    for &f in c.critical.iter().filter(|f| !protected.contains(f)) {
        let info = c.info(f);
        if !info.is_saturated() {
            return Err(Error::UnmatchedUnsaturatedCell(format!("{:?} ranks {:?}", info.labels, info.ranks)));
        }
        c.notes.push(format!("saturated cell {:?} outside the normal forms survived", info.labels));
    }
    c.finish()
}

/// Lowest dimension a surviving cell may have at a multidegree of degree
/// `deg` when the basis has degree `d`.
pub fn dimension_bound(deg: u32, d: u32) -> i32 {
    let d = d.max(2) as i32;
    let deg = deg as i32;
    if deg == 0 {
        return -1;
    }
    (deg - 1 + d - 2) / (d - 1) - 1
}

/// Any degree: the same normal-form guided greedy engine, then a check that
/// nothing below the dimension bound survived.
pub fn cancel_degree_d(
    m: &IntervalMorse,
    gb: &GroebnerBasis,
    cfg: &FacetOrder,
    deg: u32,
    cap: usize,
) -> Result<CancellationResult> {
    let protected = protected_cells(m, gb, cfg);
    let mut c = Canceller::new(m, cfg, cap);
    greedy(&mut c, &protected, "normal-form")?;
    let bound = dimension_bound(deg, gb.effective_degree());
    for &f in &c.critical {
        let info = c.info(f);
        if info.dim < bound {
            return Err(Error::ResidualLowCell(format!(
                "{:?} ranks {:?} dim {} below {bound}; intervals {:?}",
                info.labels, info.ranks, info.dim, m.systems[info.facet].i_intervals
            )));
        }
    }
    let leftover = c.critical.iter().filter(|f| !protected.contains(f)).count();
    if leftover > 0 {
        c.notes.push(format!("{leftover} surviving cells are not normal-form words"));
    }
    c.finish()
}

/// One member of a non-essential set with the path that witnesses it.
#[derive(Clone, Debug, Serialize)]
pub struct NonEssentialMember {
    pub label: usize,
    /// Whether the label sits inside the syzygy interval on this facet.
    pub inside: bool,
    /// Bottom-up labels of the facet on the other side of the shift.
    pub shifted: Vec<usize>,
    pub path: GradientPath,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonEssentialSet {
    /// Label positions of the syzygy interval.
    pub span: (usize, usize),
    pub element: usize,
    pub members: Vec<NonEssentialMember>,
}

fn insert_sorted(cfg: &FacetOrder, labels: &mut Vec<usize>, from: usize, to: usize, x: usize, descending: bool) {
    let mut at = to;
    for k in from..to {
        let o = cfg.label_cmp(labels[k], x);
        if (descending && o == Ordering::Less) || (!descending && o == Ordering::Greater) {
            at = k;
            break;
        }
    }
    labels.insert(at, x);
}

/// Labels that can be shifted into (or out of) a syzygy interval of the
/// facet with a single gradient path between the two critical cells.
pub fn non_essential_sets(
    m: &IntervalMorse,
    cfg: &FacetOrder,
    partner: &[Option<usize>],
    facet: usize,
    cap: usize,
) -> Result<Vec<NonEssentialSet>> {
    let f = &m.facets[facet];
    let crit_of = |labels: &[usize]| -> Option<usize> {
        let j = m.facets.iter().position(|g| g.labels == labels)?;
        m.critical.iter().find(|c| c.facet == j).map(|c| c.face)
    };
    let Some(here) = crit_of(&f.labels) else { return Ok(vec![]) };
    let mut out = Vec::new();
    for (p, q, element) in syzygy_spans(m, facet) {
        let mut members: Vec<NonEssentialMember> = Vec::new();
        let mut tried = BTreeSet::new();
        for pos in 0..f.labels.len() {
            let x = f.labels[pos];
            if pos == p || pos == q || !tried.insert((x, p < pos && pos < q)) {
                continue;
            }
            let mut labels = f.labels.clone();
            labels.remove(pos);
            let inside = p < pos && pos < q;
            let (up, down) = if inside {
                // move below the interval, into the descending run under it
                let mut start = p.saturating_sub(1);
                while start > 0 && cfg.label_cmp(labels[start - 1], labels[start]) == Ordering::Greater {
                    start -= 1;
                }
                insert_sorted(cfg, &mut labels, start, p, x, true);
                let Some(other) = crit_of(&labels) else { continue };
                (other, here)
            } else {
                let (lo, hi) = if pos < p { (p, q) } else { (p + 1, q + 1) };
                insert_sorted(cfg, &mut labels, lo, hi - 1, x, false);
                let Some(other) = crit_of(&labels) else { continue };
                (here, other)
            };
            let paths = match enumerate_gradient_paths(&m.table, partner, up, down, cap) {
                Ok(p) => p,
                Err(Error::PathCapExceeded { .. }) => continue,
                Err(e) => return Err(e),
            };
            if paths.len() == 1 && !members.iter().any(|mm| mm.label == x) {
                members.push(NonEssentialMember { label: x, inside, shifted: labels, path: paths.into_iter().next().unwrap() });
            }
        }
        members.sort_by_key(|mm| mm.label);
        out.push(NonEssentialSet { span: (p, q), element, members });
    }
    Ok(out)
}

/// Signed counts of gradient paths between surviving cells one dimension
/// apart, all of the same multidegree.
#[derive(Clone, Debug, Serialize)]
pub struct MorseBoundary {
    pub multidegree: Multidegree,
    /// Nonzero entries `(τ, σ, coefficient, path count)` keyed by the
    /// dimension of `τ`, cells named by face index.
    pub entries: BTreeMap<i32, Vec<(usize, usize, i64, u64)>>,
    pub squares_to_zero: bool,
}

impl MorseBoundary {
    /// Minimal when no two cells of equal multidegree are incident.
    pub fn is_minimal(&self) -> bool {
        self.entries.values().all(|v| v.iter().all(|e| e.2 == 0))
    }
}

pub fn morse_boundary(m: &IntervalMorse, result: &CancellationResult) -> MorseBoundary {
    let survivors: BTreeSet<usize> = result.survivors.iter().map(|c| c.face).collect();
    let mut coeff: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut entries: BTreeMap<i32, Vec<(usize, usize, i64, u64)>> = BTreeMap::new();
    for c in &result.survivors {
        for (s, (n, w)) in path_weights(&m.table, &result.partner, c.face) {
            if survivors.contains(&s) && n > 0 {
                entries.entry(c.dim).or_default().push((c.face, s, w, n));
                coeff.insert((c.face, s), w);
            }
        }
    }
    // (∂∂)(τ, ρ) = Σ_σ ∂(τ, σ) ∂(σ, ρ)
    let mut sq: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    for (&(t, s), &a) in &coeff {
        for (&(s2, r), &b) in coeff.range((s, 0)..=(s, usize::MAX)) {
            debug_assert_eq!(s2, s);
            *sq.entry((t, r)).or_insert(0) += a * b;
        }
    }
    MorseBoundary { multidegree: result.multidegree.clone(), entries, squares_to_zero: sq.values().all(|&v| v == 0) }
}

/// Builds the matching of `[0, λ]` and cancels it with the engine suited
/// to the basis degree.
pub fn cancel_interval(
    sg: &SemigroupPresentation,
    gb: &GroebnerBasis,
    cfg: &FacetOrder,
    lambda: &Multidegree,
    cap: usize,
) -> Result<(IntervalMorse, CancellationResult)> {
    let m = build_face_matching(sg, gb, cfg, &Multidegree::zero(sg.dimension()), lambda)?;
    let r = if gb.effective_degree() <= 2 {
        cancel_quadratic(&m, gb, cfg, cap)?
    } else {
        let deg = sg.degree(lambda).unwrap_or(0);
        cancel_degree_d(&m, gb, cfg, deg, cap)?
    };
    Ok((m, r))
}
