//! Saturated chains of an interval, the content-lex facet order, and the
//! crossing condition.

use std::cmp::Ordering;

use serde::Serialize;

use crate::groebner::TermOrder;
use crate::monomial::Monomial;
use crate::semigroup::IntervalData;

/// A saturated chain, stored bottom-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Facet {
    /// Generator index of each cover, bottom cover first.
    pub labels: Vec<usize>,
    /// Interval element index at each rank; `chain[0]` is the bottom.
    pub chain: Vec<usize>,
    pub content: Monomial,
}

impl Facet {
    pub fn length(&self) -> usize {
        self.labels.len()
    }

    /// Number of interior ranks, i.e. vertices of the facet in the order complex.
    pub fn interior(&self) -> usize {
        self.labels.len().saturating_sub(1)
    }

    pub fn element_at(&self, rank: usize) -> usize {
        self.chain[rank]
    }

    /// Rank of an interval element on this chain.
    pub fn rank_of(&self, element: usize) -> Option<usize> {
        self.chain.binary_search(&element).ok()
    }

    /// Bitmask (bit `r`) of interior ranks whose elements also lie on `other`.
    pub fn overlap_mask(&self, other: &Facet) -> u64 {
        let mut mask = 0u64;
        for r in 1..self.length() {
            if other.chain.binary_search(&self.chain[r]).is_ok() {
                mask |= 1 << r;
            }
        }
        mask
    }

    /// The face spanned by a set of interior ranks, as sorted element indices.
    pub fn face(&self, ranks_mask: u64) -> Vec<u32> {
        (1..self.length()).filter(|r| ranks_mask >> r & 1 == 1).map(|r| self.chain[r] as u32).collect()
    }
}

/// Enumerates every maximal chain of the interval exactly once.
pub fn saturated_chains(ivl: &IntervalData, nvars: usize) -> Vec<Facet> {
    let top = ivl.top_index();
    let mut up: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ivl.elements.len()];
    for &(a, b, k) in &ivl.covers {
        up[a].push((b, k));
    }
    let mut out = Vec::new();
    let mut labels = Vec::new();
    let mut chain = vec![0usize];
    fn dfs(
        at: usize,
        top: usize,
        up: &[Vec<(usize, usize)>],
        nvars: usize,
        labels: &mut Vec<usize>,
        chain: &mut Vec<usize>,
        out: &mut Vec<Facet>,
    ) {
        if at == top {
            out.push(Facet {
                labels: labels.clone(),
                chain: chain.clone(),
                content: Monomial::from_indices(nvars, labels),
            });
            return;
        }
        for &(b, k) in &up[at] {
            labels.push(k);
            chain.push(b);
            dfs(b, top, up, nvars, labels, chain, out);
            labels.pop();
            chain.pop();
        }
    }
    if ivl.elements.len() > 1 {
        dfs(0, top, &up, nvars, &mut labels, &mut chain, &mut out);
    } else {
        out.push(Facet { labels: vec![], chain: vec![0], content: Monomial::one(nvars) });
    }
    out
}

/// Content by term order first, then labels lexicographically bottom-up with
/// the label order induced on variables.
#[derive(Clone, Debug)]
pub struct FacetOrder {
    pub order: TermOrder,
    label_rank: Vec<usize>,
}

impl FacetOrder {
    pub fn new(order: TermOrder) -> Self {
        let label_rank = (0..order.nvars()).map(|v| order.var_rank(v)).collect();
        FacetOrder { order, label_rank }
    }

    /// Position of a label in the label order, 0 for the smallest.
    pub fn label_rank(&self, label: usize) -> usize {
        self.label_rank[label]
    }

    pub fn label_cmp(&self, a: usize, b: usize) -> Ordering {
        self.label_rank[a].cmp(&self.label_rank[b])
    }

    pub fn compare_words(&self, a: &[usize], b: &[usize]) -> Ordering {
        for (x, y) in a.iter().zip(b) {
            match self.label_cmp(*x, *y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        a.len().cmp(&b.len())
    }

    pub fn compare(&self, a: &Facet, b: &Facet) -> Ordering {
        self.order.compare(&a.content, &b.content).then_with(|| self.compare_words(&a.labels, &b.labels))
    }

    pub fn sort(&self, facets: &mut [Facet]) {
        facets.sort_by(|a, b| self.compare(a, b));
    }

    /// Labels ascending in the label order.
    pub fn sorted_labels(&self, labels: &[usize]) -> Vec<usize> {
        let mut v = labels.to_vec();
        v.sort_by_key(|&l| self.label_rank[l]);
        v
    }
}

pub fn is_interval_mask(mask: u64) -> bool {
    if mask == 0 {
        return true;
    }
    let shifted = mask >> mask.trailing_zeros();
    shifted & (shifted + 1) == 0
}

/// Interior ranks `1..len` of a facet not in `mask`.
pub fn complement_mask(mask: u64, len: usize) -> u64 {
    let all = if len <= 1 { 0 } else { ((1u64 << len) - 1) & !1 };
    all & !mask
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossingWitness {
    /// Position of the later facet in the facet order.
    pub facet: usize,
    /// Position of the earlier facet.
    pub earlier: usize,
    /// Skipped interior ranks of the later facet (not an interval).
    pub skipped: Vec<usize>,
}

/// Exhaustive check of the crossing condition for facets listed in order.
pub fn check_crossing_condition(facets: &[Facet]) -> std::result::Result<(), CrossingWitness> {
    for (j, f) in facets.iter().enumerate() {
        let masks: Vec<u64> = facets[..j].iter().map(|g| f.overlap_mask(g)).collect();
        for (i, &m) in masks.iter().enumerate() {
            let skipped = complement_mask(m, f.length());
            if is_interval_mask(skipped) {
                continue;
            }
            let rescued = masks.iter().any(|&m2| m2 != m && m2 & m == m);
            if !rescued {
                return Err(CrossingWitness {
                    facet: j,
                    earlier: i,
                    skipped: (1..f.length()).filter(|r| skipped >> r & 1 == 1).collect(),
                });
            }
        }
    }
    Ok(())
}

/// Checks that in every subinterval the least chain has weakly increasing
/// labels and its content precedes the content of every other chain.
pub fn is_least_content_increasing(ivl: &IntervalData, cfg: &FacetOrder, nvars: usize) -> bool {
    first_least_content_failure(ivl, cfg, nvars).is_none()
}

/// The first subinterval `(x, y)` (element indices) violating the least
/// content-increasing property, if any.
pub fn first_least_content_failure(ivl: &IntervalData, cfg: &FacetOrder, nvars: usize) -> Option<(usize, usize)> {
    let n = ivl.elements.len();
    let mut up: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for &(a, b, k) in &ivl.covers {
        up[a].push((b, k));
    }
    for x in 0..n {
        // all chains starting at x, grouped by endpoint
        let mut by_end: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(x, vec![])];
        while let Some((at, labels)) = stack.pop() {
            if !labels.is_empty() {
                by_end[at].push(labels.clone());
            }
            for &(b, k) in &up[at] {
                let mut l = labels.clone();
                l.push(k);
                stack.push((b, l));
            }
        }
        for (y, chains) in by_end.iter().enumerate() {
            if chains.len() < 2 {
                continue;
            }
            let key = |l: &Vec<usize>| Monomial::from_indices(nvars, l);
            let least = chains
                .iter()
                .min_by(|a, b| cfg.order.compare(&key(a), &key(b)).then_with(|| cfg.compare_words(a, b)))
                .unwrap();
            let increasing = least.windows(2).all(|w| cfg.label_cmp(w[0], w[1]) != Ordering::Greater);
            let precedes = chains.iter().all(|c| cfg.compare_words(least, &cfg.sorted_labels(c)) != Ordering::Greater);
            if !increasing || !precedes {
                return Some((x, y));
            }
        }
    }
    None
}
