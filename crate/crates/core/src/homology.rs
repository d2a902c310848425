//! Reduced simplicial homology of order complexes, computed directly from
//! the poset and independently of the Morse construction.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::cancel::cancel_interval;
use crate::facets::FacetOrder;
use crate::groebner::GroebnerBasis;
use crate::linalg::{smith_invariants, Field, SparseMatrix};
use crate::semigroup::{Multidegree, SemigroupPresentation};

/// All chains of the open interval `(bottom, top)`, grouped by size. The
/// group of size 0 holds the empty face.
#[derive(Clone, Debug)]
pub struct OrderComplex {
    pub vertices: Vec<Multidegree>,
    pub faces: Vec<Vec<Vec<u32>>>,
}

impl OrderComplex {
    pub fn build(sg: &SemigroupPresentation, bottom: &Multidegree, top: &Multidegree) -> OrderComplex {
        Self::skeleton(sg, bottom, top, usize::MAX)
    }

    /// The faces with at most `max_size` vertices.
    pub fn skeleton(sg: &SemigroupPresentation, bottom: &Multidegree, top: &Multidegree, max_size: usize) -> OrderComplex {
        let Ok(ivl) = sg.interval(bottom, top) else {
            return OrderComplex { vertices: vec![], faces: vec![] };
        };
        let vertices: Vec<Multidegree> =
            ivl.elements.iter().filter(|g| *g != bottom && *g != top).cloned().collect();
        let n = vertices.len();
        // comparability straight from the semigroup order
        let above: Vec<Vec<u32>> = (0..n)
            .map(|a| (0..n).filter(|&b| b != a && sg.leq(&vertices[a], &vertices[b])).map(|b| b as u32).collect())
            .collect();
        let mut faces: Vec<Vec<Vec<u32>>> = vec![vec![vec![]]];
        let mut frontier: Vec<Vec<u32>> = (0..n as u32).map(|v| vec![v]).collect();
        while !frontier.is_empty() && faces.len() <= max_size {
            let mut next = Vec::new();
            for f in &frontier {
                let last = *f.last().unwrap() as usize;
                for &b in &above[last] {
                    let mut g = f.clone();
                    g.push(b);
                    next.push(g);
                }
            }
            faces.push(frontier);
            frontier = next;
        }
        // chains are listed bottom-up; store them as sorted vertex sets
        for group in faces.iter_mut() {
            for f in group.iter_mut() {
                f.sort_unstable();
            }
            group.sort();
        }
        OrderComplex { vertices, faces }
    }

    /// Dimension of the complex; −1 for the complex holding only the empty face.
    pub fn dim(&self) -> i32 {
        self.faces.len() as i32 - 2
    }

    pub fn face_counts(&self) -> Vec<usize> {
        self.faces.iter().map(|g| g.len()).collect()
    }

    /// Reduced Euler characteristic Σ (−1)^i f_i over i ≥ −1.
    pub fn reduced_euler(&self) -> i64 {
        self.faces
            .iter()
            .enumerate()
            .map(|(k, g)| if k % 2 == 0 { -(g.len() as i64) } else { g.len() as i64 })
            .sum()
    }

    /// Boundary from faces of size `k` to faces of size `k-1`, rows indexed
    /// by the smaller faces.
    pub fn boundary_matrix(&self, k: usize) -> SparseMatrix {
        let lower = &self.faces[k - 1];
        let upper = &self.faces[k];
        let pos: HashMap<&[u32], usize> = lower.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
        // row-major over the transpose is cheaper to build; rank is unchanged
        let mut m = SparseMatrix::new(upper.len(), lower.len());
        let mut buf = Vec::with_capacity(k);
        for (r, f) in upper.iter().enumerate() {
            for j in 0..f.len() {
                buf.clear();
                buf.extend_from_slice(&f[..j]);
                buf.extend_from_slice(&f[j + 1..]);
                m.push(r, pos[buf.as_slice()], if j % 2 == 0 { 1 } else { -1 });
            }
        }
        for row in m.rows.iter_mut() {
            row.sort_unstable();
        }
        m
    }

    /// `b̃_{-1}, b̃_0, …, b̃_dim`.
    pub fn reduced_betti(&self, field: Field) -> Vec<usize> {
        let sizes = self.face_counts();
        if sizes.is_empty() {
            return vec![];
        }
        let ranks: Vec<usize> = (0..=sizes.len())
            .into_par_iter()
            .map(|k| if k == 0 || k >= sizes.len() { 0 } else { self.boundary_matrix(k).rank(field) })
            .collect();
        (0..sizes.len()).map(|k| sizes[k] - ranks[k] - ranks[k + 1]).collect()
    }

    /// `b̃_{-1}, …, b̃_{max_dim}`, exact on a skeleton holding the faces
    /// of up to `max_dim + 2` vertices.
    pub fn reduced_betti_up_to(&self, field: Field, max_dim: i32) -> Vec<usize> {
        let sizes = self.face_counts();
        let top = sizes.len().min((max_dim + 2).max(0) as usize);
        let ranks: Vec<usize> = (0..=top)
            .into_par_iter()
            .map(|k| if k == 0 || k >= sizes.len() { 0 } else { self.boundary_matrix(k).rank(field) })
            .collect();
        (0..top).map(|k| sizes[k] - ranks[k] - ranks[k + 1]).collect()
    }

    /// Torsion coefficients of reduced integral homology in each dimension
    /// (index 0 is dimension −1), from Smith normal forms.
    pub fn integral_torsion(&self) -> Vec<Vec<BigInt>> {
        let sizes = self.face_counts();
        let mut out = vec![Vec::new(); sizes.len()];
        for k in 1..sizes.len() {
            // torsion in H_{k-2} comes from the boundary of faces of size k
            let d = self.boundary_matrix(k).to_dense();
            out[k - 1] = smith_invariants(&d).into_iter().filter(|v| *v > BigInt::from(1)).collect();
        }
        out
    }
}

/// Rank of Tor_i(k,k)_λ, keyed by multidegree then homological degree.
#[derive(Clone, Debug)]
pub struct BettiTable {
    pub field: Field,
    pub entries: BTreeMap<Multidegree, BTreeMap<usize, usize>>,
    /// Reduced Betti numbers of each interval, index 0 is dimension −1.
    pub interval_betti: BTreeMap<Multidegree, Vec<usize>>,
    pub degrees: BTreeMap<Multidegree, u32>,
}

impl Serialize for BettiTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row<'a> {
            multidegree: &'a Multidegree,
            degree: u32,
            tor: Vec<(usize, usize)>,
            reduced_betti: Option<&'a Vec<usize>>,
        }
        #[derive(Serialize)]
        struct Table<'a> {
            field: Field,
            rows: Vec<Row<'a>>,
        }
        let rows = self
            .entries
            .iter()
            .map(|(l, r)| Row {
                multidegree: l,
                degree: self.degrees.get(l).copied().unwrap_or(0),
                tor: r.iter().map(|(&i, &b)| (i, b)).collect(),
                reduced_betti: self.interval_betti.get(l),
            })
            .collect();
        Table { field: self.field, rows }.serialize(s)
    }
}

impl BettiTable {
    pub fn total(&self, i: usize) -> usize {
        self.entries.values().map(|row| row.get(&i).copied().unwrap_or(0)).sum()
    }

    pub fn get(&self, lambda: &Multidegree, i: usize) -> usize {
        self.entries.get(lambda).and_then(|r| r.get(&i)).copied().unwrap_or(0)
    }

    pub fn to_tsv(&self) -> String {
        let max_i = self.entries.values().flat_map(|r| r.keys().copied()).max().unwrap_or(0);
        let mut s = String::from("multidegree");
        for i in 0..=max_i {
            s.push_str(&format!("\tTor_{i}"));
        }
        s.push('\n');
        for (lambda, row) in &self.entries {
            let coords: Vec<String> = lambda.0.iter().map(|c| c.to_string()).collect();
            s.push_str(&coords.join(","));
            for i in 0..=max_i {
                s.push_str(&format!("\t{}", row.get(&i).copied().unwrap_or(0)));
            }
            s.push('\n');
        }
        s
    }
}

/// Tor ranks over every λ with degree at most `max_degree`, using
/// `Tor_i(k,k)_λ = b̃_{i-2}(Δ(0, λ))` for λ ≠ 0.
pub fn tor_ranks(sg: &SemigroupPresentation, max_degree: u32, field: Field) -> BettiTable {
    let window = sg.elements_up_to_degree(max_degree);
    let zero = Multidegree::zero(sg.dimension());
    let rows: Vec<(Multidegree, Vec<usize>)> = window
        .par_iter()
        .filter(|l| !l.is_zero())
        .map(|l| (l.clone(), OrderComplex::build(sg, &zero, l).reduced_betti(field)))
        .collect();
    let mut entries = BTreeMap::new();
    let mut interval_betti = BTreeMap::new();
    let mut degrees = BTreeMap::new();
    entries.insert(zero.clone(), BTreeMap::from([(0usize, 1usize)]));
    degrees.insert(zero.clone(), 0);
    for (l, betti) in rows {
        let mut row = BTreeMap::new();
        for (k, &b) in betti.iter().enumerate() {
            if b > 0 {
                // index k is dimension k-1, which is Tor_{k+1}
                row.insert(k + 1, b);
            }
        }
        degrees.insert(l.clone(), sg.degree(&l).unwrap_or(0));
        entries.insert(l.clone(), row);
        interval_betti.insert(l, betti);
    }
    BettiTable { field, entries, interval_betti, degrees }
}

/// Whether `b̃_i` must vanish at a multidegree of the given degree when the
/// basis has degree `d`: `i < −1 + (deg − 1)/(d − 1)`.
pub fn below_vanishing_bound(i: i32, deg: u32, d: u32) -> bool {
    let d = d.max(2) as i64;
    ((i as i64) + 1) * (d - 1) < deg as i64 - 1
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingViolation {
    pub multidegree: Multidegree,
    pub dim: i32,
    pub betti: usize,
    pub field: Field,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub basis_degree: u32,
    pub checks: usize,
    pub violations: Vec<VanishingViolation>,
    /// Nonzero homology in the lowest dimension the bound allows.
    pub sharp_witnesses: Vec<(Multidegree, i32)>,
}

pub fn verify_vanishing(sg: &SemigroupPresentation, basis_degree: u32, max_degree: u32, fields: &[Field]) -> VanishingReport {
    let zero = Multidegree::zero(sg.dimension());
    let mut window = sg.elements_up_to_degree(max_degree);
    window.retain(|l| !l.is_zero());
    // one complex per interval, its homology over every field
    let rows: Vec<(Multidegree, u32, Vec<Vec<usize>>)> = window
        .into_par_iter()
        .map(|l| {
            let deg = sg.degree(&l).unwrap_or(0);
            // homology is needed through one dimension past the bound
            let mut last = -2;
            while below_vanishing_bound(last + 1, deg, basis_degree) {
                last += 1;
            }
            if last < -1 {
                return (l, deg, vec![]);
            }
            let oc = OrderComplex::skeleton(sg, &zero, &l, (last + 3) as usize);
            let betti = fields.iter().map(|&f| oc.reduced_betti_up_to(f, last + 1)).collect();
            (l, deg, betti)
        })
        .collect();
    let mut checks = 0;
    let mut violations = Vec::new();
    let mut sharp = Vec::new();
    for (lambda, deg, per_field) in rows {
        for (&field, betti) in fields.iter().zip(&per_field) {
            for (k, &b) in betti.iter().enumerate() {
                let dim = k as i32 - 1;
                if below_vanishing_bound(dim, deg, basis_degree) {
                    checks += 1;
                    if b != 0 {
                        violations.push(VanishingViolation { multidegree: lambda.clone(), dim, betti: b, field });
                    }
                } else if b != 0 && dim >= 0 && below_vanishing_bound(dim - 1, deg, basis_degree) && field == fields[0] {
                    sharp.push((lambda.clone(), dim));
                }
            }
        }
    }
    VanishingReport { basis_degree, checks, violations, sharp_witnesses: sharp }
}

/// Cohen-Macaulay and Koszul evidence over a window: each interval's
/// homology sits in its top dimension, the cancellation leaves only top
/// cells (plus the empty face of an atom), and when the semigroup is
/// standard graded Tor is concentrated on the diagonal.
#[derive(Clone, Debug, Serialize)]
pub struct CmKoszulReport {
    pub intervals: usize,
    /// Multidegrees where homology or survivors leave the top dimension.
    pub failures: Vec<Multidegree>,
    /// `None` when the semigroup is not standard graded.
    pub koszul: Option<bool>,
    pub notice: Option<String>,
}

pub fn cm_koszul_witness(
    sg: &SemigroupPresentation,
    gb: &GroebnerBasis,
    cfg: &FacetOrder,
    max_degree: u32,
    field: Field,
    cap: usize,
) -> crate::error::Result<CmKoszulReport> {
    if gb.effective_degree() > 2 {
        return Err(crate::error::Error::InvalidBasis("Koszul witness needs a quadratic basis".into()));
    }
    let window: Vec<Multidegree> = sg.elements_up_to_degree(max_degree).into_iter().filter(|l| !l.is_zero()).collect();
    let zero = Multidegree::zero(sg.dimension());
    let rows: Vec<crate::error::Result<(Multidegree, bool, bool)>> = window
        .par_iter()
        .map(|l| {
            let c = OrderComplex::build(sg, &zero, l);
            let betti = c.reduced_betti(field);
            let top = c.dim();
            let concentrated = betti.iter().enumerate().all(|(k, &b)| b == 0 || k as i32 - 1 == top);
            let (_, r) = cancel_interval(sg, gb, cfg, l, cap)?;
            let witness = r.survivors.iter().all(|s| s.dim == top);
            // diagonal: Tor_i at λ only for i = deg λ, that is b̃ only in dimension deg − 2
            let deg = sg.degree(l).unwrap_or(0) as i32;
            let diagonal = betti.iter().enumerate().all(|(k, &b)| b == 0 || k as i32 - 1 == deg - 2);
            Ok((l.clone(), concentrated && witness, diagonal))
        })
        .collect();
    let mut failures = Vec::new();
    let mut diagonal = true;
    for r in rows {
        let (l, ok, diag) = r?;
        if !ok {
            failures.push(l);
        }
        diagonal &= diag;
    }
    let graded = sg.is_graded();
    Ok(CmKoszulReport {
        intervals: window.len(),
        failures,
        koszul: graded.then_some(diagonal),
        notice: (!graded).then(|| "not standard graded; diagonal check skipped".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::tests::e1;

    #[test]
    fn two_points() {
        let free = SemigroupPresentation::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let c = OrderComplex::build(&free, &Multidegree::zero(2), &Multidegree(vec![1, 1]));
        assert_eq!(c.reduced_betti(Field::RATIONALS), vec![0, 1]);
        assert_eq!(c.reduced_euler(), 1);
    }

    #[test]
    fn e1_wedge_of_two_spheres() {
        let c = OrderComplex::build(&e1(), &Multidegree::zero(4), &Multidegree(vec![2, 2, 1, 1]));
        for f in [Field::RATIONALS, Field::prime(2), Field::prime(3)] {
            assert_eq!(c.reduced_betti(f), vec![0, 0, 0, 2]);
        }
        assert!(c.integral_torsion().iter().all(|t| t.is_empty()));
    }

    #[test]
    fn skeleton_agrees_in_low_dimensions() {
        let sg = SemigroupPresentation::new(2, vec![vec![3, 2], vec![3, 1], vec![1, 1]]).unwrap();
        for l in sg.elements_up_to_degree(4) {
            let full = OrderComplex::build(&sg, &Multidegree::zero(2), &l).reduced_betti(Field::RATIONALS);
            for d in -1..3 {
                let sk = OrderComplex::skeleton(&sg, &Multidegree::zero(2), &l, (d + 2) as usize);
                let low = sk.reduced_betti_up_to(Field::RATIONALS, d);
                assert_eq!(low.as_slice(), &full[..low.len()]);
                assert_eq!(low.len(), full.len().min((d + 2) as usize));
            }
        }
    }

    #[test]
    fn e1_tor_low_degrees() {
        let t = tor_ranks(&e1(), 2, Field::RATIONALS);
        assert_eq!(t.total(0), 1);
        assert_eq!(t.total(1), 5);
        assert_eq!(t.total(2), 11);
        assert!(t.to_tsv().starts_with("multidegree\tTor_0"));
    }

    #[test]
    fn koszul_rings() {
        for name in ["e1", "e3", "free2"] {
            let s = crate::fixtures::by_name(name).unwrap();
            let o = crate::groebner::TermOrder::default_lex(s.ngens());
            let gb = crate::groebner::toric_groebner_basis(&s, &o, 20).unwrap();
            let r = cm_koszul_witness(&s, &gb, &FacetOrder::new(o), 4, Field::RATIONALS, 10_000).unwrap();
            assert!(r.failures.is_empty(), "{name}: {:?}", r.failures);
            assert_eq!(r.koszul, Some(true));
        }
    }

    #[test]
    fn bound_arithmetic() {
        // d = 2: everything below deg - 2 vanishes
        assert!(below_vanishing_bound(1, 4, 2));
        assert!(!below_vanishing_bound(2, 4, 2));
        // d = 3, deg 3: only the empty-face dimension must vanish
        assert!(below_vanishing_bound(-1, 3, 3));
        assert!(!below_vanishing_bound(0, 3, 3));
    }
}
