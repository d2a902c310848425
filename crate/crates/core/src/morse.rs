//! The lex-like discrete Morse function of a content-lex facet order:
//! interval systems, J-intervals, critical cells and the face matching.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::facets::{complement_mask, is_interval_mask, saturated_chains, Facet, FacetOrder};
use crate::groebner::GroebnerBasis;
use crate::monomial::Monomial;
use crate::semigroup::{IntervalData, Multidegree, SemigroupPresentation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum IntervalKind {
    Descent,
    /// Witnessed by the basis element at this position.
    Syzygy { element: usize },
}

/// A run `lo..=hi` of interior ranks of a facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RankInterval {
    pub lo: usize,
    pub hi: usize,
    pub kind: IntervalKind,
}

impl RankInterval {
    pub fn height(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn mask(&self) -> u64 {
        ((1u64 << (self.hi + 1)) - 1) & !((1u64 << self.lo) - 1)
    }

    pub fn contains(&self, other: &RankInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Label positions (0-based) spanned: the cover below `lo` through the cover above `hi`.
    pub fn label_span(&self) -> (usize, usize) {
        (self.lo - 1, self.hi)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalSystem {
    pub i_intervals: Vec<RankInterval>,
    pub j_intervals: Vec<RankInterval>,
    /// Whether the I-intervals cover every interior rank.
    pub covered: bool,
    /// Whether the J-intervals cover every interior rank; only then does the
    /// facet contribute a critical cell.
    pub j_covered: bool,
}

fn product_in_initial(gb: &GroebnerBasis, labels: &[usize]) -> Option<usize> {
    let m = Monomial::from_indices(gb.nvars(), labels);
    gb.elements.iter().position(|b| b.plus.divides(&m))
}

/// Minimal skipped intervals read off the labels: descents, and weakly
/// increasing runs whose product lies in the initial ideal while neither the
/// run without its first label nor the run without its last label does.
pub fn msi_characterization(gb: &GroebnerBasis, cfg: &FacetOrder, labels: &[usize]) -> Vec<RankInterval> {
    let len = labels.len();
    let mut out = Vec::new();
    for i in 0..len {
        for k in (i + 1)..len {
            if cfg.label_cmp(labels[k - 1], labels[k]) == Ordering::Greater {
                if k == i + 1 {
                    out.push(RankInterval { lo: i + 1, hi: i + 1, kind: IntervalKind::Descent });
                }
                break;
            }
            let run = &labels[i..=k];
            let Some(element) = product_in_initial(gb, run) else { continue };
            if product_in_initial(gb, &run[1..]).is_none() && product_in_initial(gb, &run[..run.len() - 1]).is_none() {
                out.push(RankInterval { lo: i + 1, hi: k, kind: IntervalKind::Syzygy { element } });
            }
            // any longer run contains this one
            break;
        }
    }
    out.sort();
    out
}

/// Minimal skipped intervals of `facets[j]` computed from the overlaps with
/// all earlier facets.
pub fn direct_interval_system(facets: &[Facet], j: usize) -> Result<Vec<(usize, usize)>> {
    let f = &facets[j];
    let masks: Vec<u64> = facets[..j].iter().map(|g| f.overlap_mask(g)).collect();
    let mut out = Vec::new();
    for (i, &m) in masks.iter().enumerate() {
        if masks.iter().enumerate().any(|(k, &m2)| m2 & m == m && (m2 != m || k < i)) {
            continue;
        }
        let skipped = complement_mask(m, f.length());
        if !is_interval_mask(skipped) {
            return Err(Error::CrossingViolation {
                facet: f.labels.clone(),
                ranks: (1..f.length()).filter(|r| skipped >> r & 1 == 1).collect(),
            });
        }
        let lo = skipped.trailing_zeros() as usize;
        let hi = 63 - skipped.leading_zeros() as usize;
        out.push((lo, hi));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Truncation of I-intervals into disjoint J-intervals: repeatedly keep the
/// lowest interval, chop its ranks off the others, and discard any interval
/// that is no longer minimal.
pub fn truncate_to_j_intervals(i_intervals: &[RankInterval]) -> Vec<RankInterval> {
    let mut rem: Vec<RankInterval> = i_intervals.to_vec();
    rem.sort();
    let mut out = Vec::new();
    while !rem.is_empty() {
        let first = rem.remove(0);
        out.push(first);
        let mut next: Vec<RankInterval> = rem
            .into_iter()
            .filter_map(|mut r| {
                if r.lo <= first.hi {
                    r.lo = first.hi + 1;
                }
                (r.lo <= r.hi).then_some(r)
            })
            .collect();
        next.sort();
        let mut kept: Vec<RankInterval> = Vec::new();
        for (a, r) in next.iter().enumerate() {
            let non_minimal = next
                .iter()
                .enumerate()
                .any(|(b, s)| b != a && r.contains(s) && ((s.lo, s.hi) != (r.lo, r.hi) || b < a));
            if !non_minimal {
                kept.push(*r);
            }
        }
        rem = kept;
    }
    out
}

pub fn interval_system(i_intervals: Vec<RankInterval>, interior: usize) -> IntervalSystem {
    let union = i_intervals.iter().fold(0u64, |acc, r| acc | r.mask());
    let covered = union == complement_mask(0, interior + 1);
    let j_intervals = truncate_to_j_intervals(&i_intervals);
    let j_union = j_intervals.iter().fold(0u64, |acc, r| acc | r.mask());
    let j_covered = j_union == complement_mask(0, interior + 1);
    IntervalSystem { i_intervals, j_intervals, covered, j_covered }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalCell {
    /// Position of the contributing facet in the facet order.
    pub facet: usize,
    /// Interior ranks of that facet forming the cell.
    pub ranks: Vec<usize>,
    /// Index into the face table.
    pub face: usize,
    pub dim: i32,
    pub labels: Vec<usize>,
    pub content: Monomial,
    pub multidegree: Multidegree,
}

/// Critical cell of a facet: the lowest rank of each J-interval, present
/// only when the J-intervals cover every interior rank.
pub fn critical_ranks(system: &IntervalSystem) -> Option<Vec<usize>> {
    system.j_covered.then(|| system.j_intervals.iter().map(|r| r.lo).collect())
}

fn mask_of(ranks: &[usize]) -> u64 {
    ranks.iter().fold(0u64, |acc, r| acc | 1 << r)
}

/// All faces of the order complex of an open interval, each tagged with the
/// earliest facet containing it.
#[derive(Clone, Debug, Default)]
pub struct FaceTable {
    pub faces: Vec<Vec<u32>>,
    pub owner: Vec<usize>,
    pub owner_mask: Vec<u64>,
    index: HashMap<Vec<u32>, usize>,
}

impl FaceTable {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn get(&self, verts: &[u32]) -> Option<usize> {
        self.index.get(verts).copied()
    }

    pub fn dim(&self, f: usize) -> i32 {
        self.faces[f].len() as i32 - 1
    }

    /// Codimension-one faces with their simplicial incidence signs.
    pub fn boundary(&self, f: usize) -> Vec<(usize, i64)> {
        let v = &self.faces[f];
        let mut out = Vec::with_capacity(v.len());
        let mut buf: Vec<u32> = Vec::with_capacity(v.len());
        for j in 0..v.len() {
            buf.clear();
            buf.extend_from_slice(&v[..j]);
            buf.extend_from_slice(&v[j + 1..]);
            let idx = self.index[&buf[..]];
            out.push((idx, if j % 2 == 0 { 1 } else { -1 }));
        }
        out
    }

    /// Incidence `[big : small]` when `small` is a facet of `big`.
    pub fn incidence(&self, big: usize, small: usize) -> i64 {
        let b = &self.faces[big];
        let s = &self.faces[small];
        let j = (0..b.len()).find(|&j| j == s.len() || b[j] != s[j]).unwrap_or(s.len());
        if j % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn count_by_dim(&self) -> Vec<usize> {
        let max = self.faces.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut out = vec![0usize; max + 1];
        for f in &self.faces {
            out[f.len()] += 1;
        }
        out
    }
}

/// Everything the Morse construction produces for one interval.
#[derive(Clone, Debug)]
pub struct IntervalMorse {
    pub interval: IntervalData,
    pub facets: Vec<Facet>,
    pub systems: Vec<IntervalSystem>,
    pub table: FaceTable,
    /// `None` for critical faces.
    pub partner: Vec<Option<usize>>,
    pub critical: Vec<CriticalCell>,
    /// Facets whose covering I-intervals did not yield covering J-intervals.
    pub notes: Vec<String>,
}

/// Builds the face matching of the facet order on `[bottom, top]`.
pub fn build_face_matching(
    sg: &SemigroupPresentation,
    gb: &GroebnerBasis,
    cfg: &FacetOrder,
    bottom: &Multidegree,
    top: &Multidegree,
) -> Result<IntervalMorse> {
    let interval = sg.interval(bottom, top)?;
    let mut facets = saturated_chains(&interval, sg.ngens());
    cfg.sort(&mut facets);
    if facets.iter().any(|f| f.length() > 63) {
        return Err(Error::Invariant("chains longer than 63 covers are not supported".into()));
    }
    let mut table = FaceTable::default();
    let mut partner_of: Vec<Option<usize>> = Vec::new();
    let mut systems = Vec::with_capacity(facets.len());
    let mut critical = Vec::new();
    let mut notes = Vec::new();
    for (j, f) in facets.iter().enumerate() {
        let interior = f.interior();
        let system = interval_system(msi_characterization(gb, cfg, &f.labels), interior);
        // new faces are exactly the rank sets hitting every I-interval
        let i_masks: Vec<u64> = system.i_intervals.iter().map(|r| r.mask()).collect();
        let mut new_masks: Vec<u64> = Vec::new();
        for sub in 0..(1u64 << interior) {
            let mask = sub << 1;
            let verts = f.face(mask);
            let hits = i_masks.iter().all(|m| m & mask != 0);
            let seen = table.index.contains_key(&verts);
            if hits == seen {
                return Err(Error::Invariant(format!(
                    "facet {:?}: rank set {mask:#b} newness disagrees with its interval system",
                    f.labels
                )));
            }
            if hits {
                let id = table.faces.len();
                table.index.insert(verts.clone(), id);
                table.faces.push(verts);
                table.owner.push(j);
                table.owner_mask.push(mask);
                partner_of.push(None);
                new_masks.push(mask);
            }
        }
        let crit = critical_ranks(&system);
        let crit_mask = crit.as_ref().map(|c| mask_of(c));
        let j_cover = system.j_intervals.iter().fold(0u64, |acc, r| acc | r.mask());
        let all = complement_mask(0, f.length());
        let i_cover = system.i_intervals.iter().fold(0u64, |acc, r| acc | r.mask());
        // first J-interval where the face differs from its lowest rank; then
        // the lowest rank outside every J-interval (I-intervals cover) or the
        // lowest cone point (they do not)
        let toggle = |mask: u64| -> Option<u64> {
            if system.covered {
                for r in &system.j_intervals {
                    if mask & r.mask() != 1 << r.lo {
                        return Some(mask ^ (1 << r.lo));
                    }
                }
                let rest = all & !j_cover;
                (rest != 0).then(|| mask ^ (1 << rest.trailing_zeros()))
            } else {
                let free = all & !i_cover;
                Some(mask ^ (1 << free.trailing_zeros()))
            }
        };
        if system.covered && !system.j_covered {
            notes.push(format!("facet {:?}: I-intervals cover every rank but J-intervals do not", f.labels));
        }
        for &mask in &new_masks {
            let id = table.index[&f.face(mask)];
            match toggle(mask) {
                None => {
                    let ranks: Vec<usize> = (1..f.length()).filter(|r| mask >> r & 1 == 1).collect();
                    if crit_mask != Some(mask) {
                        return Err(Error::Invariant(format!("facet {:?}: unmatched non-critical face", f.labels)));
                    }
                    critical.push(CriticalCell {
                        facet: j,
                        dim: ranks.len() as i32 - 1,
                        ranks,
                        face: id,
                        labels: f.labels.clone(),
                        content: f.content.clone(),
                        multidegree: interval.top.clone(),
                    });
                }
                Some(other) => {
                    let oid = table.get(&f.face(other)).filter(|&o| table.owner[o] == j).ok_or_else(|| {
                        Error::Invariant(format!("facet {:?}: partner of {mask:#b} is not a new face", f.labels))
                    })?;
                    if toggle(other) != Some(mask) {
                        return Err(Error::Invariant(format!("facet {:?}: matching is not an involution", f.labels)));
                    }
                    partner_of[id] = Some(oid);
                }
            }
        }
        systems.push(system);
    }
    let out = IntervalMorse { interval, facets, systems, table, partner: partner_of, critical, notes };
    if !verify_acyclic(&out.table, &out.partner) {
        return Err(Error::AcyclicityFailure("face matching of the facet order".into()));
    }
    Ok(out)
}

/// Topological sort of the Hasse diagram with matched edges reversed.
pub fn verify_acyclic(table: &FaceTable, partner: &[Option<usize>]) -> bool {
    let n = table.len();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for f in 0..n {
        if table.faces[f].is_empty() {
            continue;
        }
        for (g, _) in table.boundary(f) {
            let matched = partner[g] == Some(f) && partner[f] == Some(g);
            let (a, b) = if matched { (g, f) } else { (f, g) };
            out_edges[a].push(b);
            indeg[b] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &w in &out_edges[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    seen == n
}

/// Critical cell counts by dimension, index 0 being dimension −1.
pub fn morse_numbers(cells: &[CriticalCell]) -> Vec<usize> {
    let max = cells.iter().map(|c| c.dim).max().unwrap_or(-1);
    let mut out = vec![0usize; (max + 2) as usize];
    for c in cells {
        out[(c.dim + 1) as usize] += 1;
    }
    out
}

/// Reduced Morse numbers (index 0 is dimension −1) converted to the
/// unreduced count starting at dimension 0.
pub fn unreduced(reduced: &[usize], nonempty: bool) -> Vec<usize> {
    let mut out: Vec<usize> = reduced.iter().skip(1).copied().collect();
    if nonempty {
        if out.is_empty() {
            out.push(0);
        }
        out[0] += 1;
    }
    out
}

/// Σ (−1)^i m_i over the reduced counts.
pub fn reduced_euler(counts: &[usize]) -> i64 {
    counts.iter().enumerate().map(|(i, &c)| if i % 2 == 0 { -(c as i64) } else { c as i64 }).sum()
}
