//! Affine semigroups Λ ⊆ ℕ^e given by marked generators, ordered by
//! μ ≤ λ iff λ − μ ∈ Λ.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::bareiss_rank;
use crate::monomial::Monomial;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Multidegree(pub Vec<u32>);

impl Multidegree {
    pub fn zero(e: usize) -> Self {
        Multidegree(vec![0; e])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Multidegree) -> Multidegree {
        Multidegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference, `None` if some coordinate would go negative.
    pub fn checked_sub(&self, other: &Multidegree) -> Option<Multidegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Multidegree)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Debug for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub struct SemigroupPresentation {
    e: usize,
    generators: Vec<Multidegree>,
    memo: RwLock<HashMap<Vec<u32>, bool>>,
}

impl Clone for SemigroupPresentation {
    fn clone(&self) -> Self {
        SemigroupPresentation {
            e: self.e,
            generators: self.generators.clone(),
            memo: RwLock::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for SemigroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupPresentation")
            .field("e", &self.e)
            .field("generators", &self.generators)
            .finish()
    }
}

/// The closed interval `[bottom, top]` with its cover graph.
#[derive(Clone, Debug, Serialize)]
pub struct IntervalData {
    pub bottom: Multidegree,
    pub top: Multidegree,
    /// Sorted by coordinate sum, then lexicographically; `elements[0]` is the bottom.
    pub elements: Vec<Multidegree>,
    /// `(from, to, generator)` as indices into `elements`.
    pub covers: Vec<(usize, usize, usize)>,
    #[serde(skip)]
    index: HashMap<Multidegree, usize>,
}

impl IntervalData {
    pub fn index_of(&self, g: &Multidegree) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn top_index(&self) -> usize {
        self.index[&self.top]
    }

    /// Outgoing covers of an element, as `(target, generator)`.
    pub fn up_covers(&self, from: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.covers.iter().filter(move |c| c.0 == from).map(|c| (c.1, c.2))
    }
}

impl SemigroupPresentation {
    pub fn new(e: usize, generators: Vec<Vec<u32>>) -> Result<Self> {
        if e == 0 {
            return Err(Error::InvalidPresentation("dimension must be positive".into()));
        }
        if generators.is_empty() {
            return Err(Error::InvalidPresentation("no generators".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != e {
                return Err(Error::InvalidPresentation(format!(
                    "generator {i} has {} coordinates, expected {e}",
                    g.len()
                )));
            }
            if g.iter().all(|&c| c == 0) {
                return Err(Error::InvalidPresentation(format!("generator {i} is zero")));
            }
        }
        let mut seen = HashSet::new();
        for (i, g) in generators.iter().enumerate() {
            if !seen.insert(g.clone()) {
                return Err(Error::InvalidPresentation(format!("generator {i} is repeated")));
            }
        }
        let sg = SemigroupPresentation {
            e,
            generators: generators.into_iter().map(Multidegree).collect(),
            memo: RwLock::new(HashMap::new()),
        };
        // a generator that is a sum of others would make cover steps ambiguous
        for i in 0..sg.ngens() {
            if sg.fiber_factorizations(&sg.generators[i]).len() > 1 {
                return Err(Error::InvalidPresentation(format!(
                    "generator {i} is a sum of other generators"
                )));
            }
        }
        Ok(sg)
    }

    pub fn dimension(&self) -> usize {
        self.e
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Multidegree] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Multidegree {
        &self.generators[i]
    }

    /// Image of a monomial in the `z` variables under `z_i ↦ α_i`.
    pub fn phi(&self, m: &Monomial) -> Multidegree {
        let mut out = vec![0u32; self.e];
        for (i, &k) in m.0.iter().enumerate() {
            for (c, &a) in self.generators[i].0.iter().enumerate() {
                out[c] += k * a;
            }
        }
        Multidegree(out)
    }

    fn mult_bound(&self, i: usize, target: &[u32]) -> u32 {
        self.generators[i]
            .0
            .iter()
            .zip(target)
            .filter(|(a, _)| **a > 0)
            .map(|(a, t)| t / a)
            .min()
            .unwrap_or(0)
    }

    /// Whether `v ∈ Λ`.
    pub fn contains(&self, v: &Multidegree) -> bool {
        if v.is_zero() {
            return true;
        }
        if let Some(&b) = self.memo.read().unwrap().get(&v.0) {
            return b;
        }
        let found = self.search_member(&v.0, 0);
        self.memo.write().unwrap().insert(v.0.clone(), found);
        found
    }

    fn search_member(&self, rest: &[u32], from: usize) -> bool {
        if rest.iter().all(|&c| c == 0) {
            return true;
        }
        if from == self.ngens() {
            return false;
        }
        let bound = self.mult_bound(from, rest);
        let mut cur = rest.to_vec();
        for k in 0..=bound {
            if k > 0 {
                for (c, a) in cur.iter_mut().zip(&self.generators[from].0) {
                    *c -= a;
                }
            }
            if self.search_member(&cur, from + 1) {
                return true;
            }
        }
        false
    }

    pub fn leq(&self, mu: &Multidegree, lambda: &Multidegree) -> bool {
        match lambda.checked_sub(mu) {
            Some(d) => self.contains(&d),
            None => false,
        }
    }

    /// All factorizations of `lambda`, as exponent vectors over the generators,
    /// in ascending lexicographic order.
    pub fn fiber_factorizations(&self, lambda: &Multidegree) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.ngens()];
        self.search_all(&lambda.0, 0, &mut cur, &mut out);
        out.sort();
        out
    }

    fn search_all(&self, rest: &[u32], from: usize, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if rest.iter().all(|&c| c == 0) {
            out.push(Monomial(cur.clone()));
            return;
        }
        if from == self.ngens() {
            return;
        }
        let bound = self.mult_bound(from, rest);
        let mut r = rest.to_vec();
        for k in 0..=bound {
            if k > 0 {
                for (c, a) in r.iter_mut().zip(&self.generators[from].0) {
                    *c -= a;
                }
            }
            cur[from] = k;
            self.search_all(&r, from + 1, cur, out);
        }
        cur[from] = 0;
    }

    /// Length of a shortest factorization; `Some(0)` for the zero element and
    /// `None` outside Λ.
    pub fn degree(&self, lambda: &Multidegree) -> Option<u32> {
        self.fiber_factorizations(lambda).iter().map(|m| m.degree()).min()
    }

    /// Whether every element has all factorizations of equal length. Holds
    /// when the generators lie on an affine hyperplane not through 0.
    pub fn is_graded(&self) -> bool {
        // solve w · α_i = 1 for all i over ℚ
        let rows: Vec<Vec<BigInt>> = self
            .generators
            .iter()
            .map(|g| g.0.iter().map(|&c| BigInt::from(c)).collect())
            .collect();
        let aug: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.push(BigInt::from(1));
                r
            })
            .collect();
        bareiss_rank(&rows) == bareiss_rank(&aug)
    }

    pub fn interval(&self, mu: &Multidegree, lambda: &Multidegree) -> Result<IntervalData> {
        let diff = lambda
            .checked_sub(mu)
            .filter(|d| self.contains(d))
            .ok_or_else(|| Error::NotComparable { bottom: mu.0.clone(), top: lambda.0.clone() })?;
        let mut deltas: BTreeSet<Vec<u32>> = BTreeSet::new();
        for f in self.fiber_factorizations(&diff) {
            submultisets(&f.0, &mut |sub| {
                let d = self.phi(&Monomial(sub.to_vec()));
                deltas.insert(d.0);
            });
        }
        let mut elements: Vec<Multidegree> = deltas.into_iter().map(|d| mu.add(&Multidegree(d))).collect();
        elements.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
        let index: HashMap<Multidegree, usize> =
            elements.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        let mut covers = Vec::new();
        for (i, g) in elements.iter().enumerate() {
            for (k, a) in self.generators.iter().enumerate() {
                if let Some(&j) = index.get(&g.add(a)) {
                    covers.push((i, j, k));
                }
            }
        }
        Ok(IntervalData { bottom: mu.clone(), top: lambda.clone(), elements, covers, index })
    }

    /// Every element of Λ whose shortest factorization has length at most `max_degree`.
    pub fn elements_up_to_degree(&self, max_degree: u32) -> Vec<Multidegree> {
        let mut seen: HashSet<Multidegree> = HashSet::new();
        let mut frontier = vec![Multidegree::zero(self.e)];
        seen.insert(frontier[0].clone());
        for _ in 0..max_degree {
            let mut next = Vec::new();
            for g in &frontier {
                for a in &self.generators {
                    let h = g.add(a);
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        let mut out: Vec<Multidegree> = seen.into_iter().collect();
        out.sort_by(|a, b| a.total().cmp(&b.total()).then_with(|| a.cmp(b)));
        out
    }
}

fn submultisets(exps: &[u32], f: &mut impl FnMut(&[u32])) {
    let mut cur = vec![0u32; exps.len()];
    loop {
        f(&cur);
        let mut i = 0;
        loop {
            if i == exps.len() {
                return;
            }
            if cur[i] < exps[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn e1() -> SemigroupPresentation {
        SemigroupPresentation::new(
            4,
            vec![vec![1, 1, 0, 0], vec![2, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![0, 2, 0, 0]],
        )
        .unwrap()
    }

    fn md(v: &[u32]) -> Multidegree {
        Multidegree(v.to_vec())
    }

    #[test]
    fn e1_order() {
        let s = e1();
        assert!(s.leq(&md(&[0, 0, 0, 0]), &md(&[2, 2, 0, 0])));
        assert!(!s.leq(&md(&[0, 0, 0, 0]), &md(&[1, 0, 0, 0])));
        assert!(s.leq(&md(&[1, 1, 0, 0]), &md(&[1, 1, 0, 0])));
    }

    #[test]
    fn e1_fibers_and_degree() {
        let s = e1();
        let f = s.fiber_factorizations(&md(&[2, 2, 1, 1]));
        let idx: Vec<Vec<usize>> = f.iter().map(|m| m.indices()).collect();
        assert_eq!(idx, vec![vec![1, 2, 3, 4], vec![0, 0, 2, 3]]);
        let f = s.fiber_factorizations(&md(&[2, 2, 0, 0]));
        assert_eq!(f.len(), 2);
        assert_eq!(s.degree(&md(&[2, 2, 0, 0])), Some(2));
        assert_eq!(s.degree(&md(&[2, 2, 1, 1])), Some(4));
        assert_eq!(s.degree(&md(&[0, 0, 0, 0])), Some(0));
        assert_eq!(s.degree(&md(&[1, 0, 0, 0])), None);
        assert_eq!(s.fiber_factorizations(&Multidegree::zero(4)).len(), 1);
    }

    #[test]
    fn small_intervals() {
        let s = e1();
        let iv = s.interval(&Multidegree::zero(4), &md(&[0, 0, 1, 0])).unwrap();
        assert_eq!(iv.elements.len(), 2);
        assert_eq!(iv.covers, vec![(0, 1, 2)]);
        let free = SemigroupPresentation::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let iv = free.interval(&Multidegree::zero(2), &md(&[1, 1])).unwrap();
        assert_eq!(iv.elements.len(), 4);
        assert_eq!(iv.covers.len(), 4);
        assert!(s.interval(&md(&[0, 0, 1, 0]), &md(&[0, 0, 0, 1])).is_err());
    }

    #[test]
    fn rejects_bad_presentations() {
        assert!(SemigroupPresentation::new(2, vec![]).is_err());
        assert!(SemigroupPresentation::new(2, vec![vec![0, 0]]).is_err());
        assert!(SemigroupPresentation::new(2, vec![vec![1, 0], vec![1, 0]]).is_err());
        assert!(SemigroupPresentation::new(2, vec![vec![1, 0], vec![2, 0]]).is_err());
        assert!(SemigroupPresentation::new(2, vec![vec![1, 0, 0]]).is_err());
    }

    #[test]
    fn gradedness() {
        assert!(e1().is_graded());
        let s = SemigroupPresentation::new(1, vec![vec![2], vec![3]]).unwrap();
        assert!(!s.is_graded());
    }
}
