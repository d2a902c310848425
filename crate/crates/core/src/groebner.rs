//! Term orders, binomials and Gröbner bases of toric ideals.
//!
//! The toric ideal is computed by elimination from the graph ideal
//! `⟨z_i − x^{α_i}⟩`; a cheaper fiber-collision enumeration of low-degree
//! binomials is kept as an independent cross-check.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::semigroup::SemigroupPresentation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    Lex,
    GradedLex,
    GradedRevlex,
    /// Rows compared in turn, ties broken by lex.
    Weight(Vec<Vec<i64>>),
}

/// A monomial order on `nvars` variables. `priority[0]` is the largest
/// variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermOrder {
    pub kind: OrderKind,
    pub priority: Vec<usize>,
}

impl TermOrder {
    /// Lex with `z_{n-1} > … > z_0`.
    pub fn default_lex(nvars: usize) -> Self {
        TermOrder { kind: OrderKind::Lex, priority: (0..nvars).rev().collect() }
    }

    pub fn new(kind: OrderKind, priority: Vec<usize>) -> Result<Self> {
        let n = priority.len();
        let mut seen = vec![false; n];
        for &p in &priority {
            if p >= n || seen[p] {
                return Err(Error::InvalidTermOrder(format!("{priority:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if let OrderKind::Weight(rows) = &kind {
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidTermOrder("weight row length differs from variable count".into()));
            }
            // every variable must exceed 1: its weight column is lexicographically non-negative
            for v in 0..n {
                if let Some(w) = rows.iter().map(|r| r[v]).find(|&w| w != 0) {
                    if w < 0 {
                        return Err(Error::InvalidTermOrder(format!("variable {v} would be smaller than 1")));
                    }
                }
            }
        }
        Ok(TermOrder { kind, priority })
    }

    pub fn nvars(&self) -> usize {
        self.priority.len()
    }

    fn lex(&self, a: &Monomial, b: &Monomial) -> Ordering {
        for &v in &self.priority {
            match a.0[v].cmp(&b.0[v]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match &self.kind {
            OrderKind::Lex => self.lex(a, b),
            OrderKind::GradedLex => a.degree().cmp(&b.degree()).then_with(|| self.lex(a, b)),
            OrderKind::GradedRevlex => a.degree().cmp(&b.degree()).then_with(|| {
                for &v in self.priority.iter().rev() {
                    match a.0[v].cmp(&b.0[v]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
            OrderKind::Weight(rows) => {
                for r in rows {
                    let wa: i64 = r.iter().zip(&a.0).map(|(w, &e)| w * e as i64).sum();
                    let wb: i64 = r.iter().zip(&b.0).map(|(w, &e)| w * e as i64).sum();
                    match wa.cmp(&wb) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                self.lex(a, b)
            }
        }
    }

    /// The same order written as weight rows (followed by the lex tiebreak).
    pub fn weight_rows(&self) -> Vec<Vec<i64>> {
        let n = self.nvars();
        let unit = |v: usize, s: i64| {
            let mut r = vec![0i64; n];
            r[v] = s;
            r
        };
        match &self.kind {
            OrderKind::Lex => self.priority.iter().map(|&v| unit(v, 1)).collect(),
            OrderKind::GradedLex => {
                let mut rows = vec![vec![1i64; n]];
                rows.extend(self.priority.iter().map(|&v| unit(v, 1)));
                rows
            }
            OrderKind::GradedRevlex => {
                let mut rows = vec![vec![1i64; n]];
                rows.extend(self.priority.iter().rev().map(|&v| unit(v, -1)));
                rows
            }
            OrderKind::Weight(rows) => {
                let mut rows = rows.clone();
                rows.extend(self.priority.iter().map(|&v| unit(v, 1)));
                rows
            }
        }
    }

    /// Position of variable `v` among the variables, 0 for the smallest.
    pub fn var_rank(&self, v: usize) -> usize {
        self.nvars() - 1 - self.priority.iter().position(|&p| p == v).expect("variable out of range")
    }

    /// Variables from smallest to largest.
    pub fn variables_ascending(&self) -> Vec<usize> {
        self.priority.iter().rev().copied().collect()
    }
}

/// `plus − minus` with `plus ≻ minus` once oriented.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Binomial {
    pub plus: Monomial,
    pub minus: Monomial,
}

impl fmt::Debug for Binomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} - {:?}", self.plus, self.minus)
    }
}

impl Binomial {
    /// Orients the pair so that the leading term comes first; `None` when the
    /// two monomials coincide.
    pub fn oriented(a: Monomial, b: Monomial, order: &TermOrder) -> Option<Binomial> {
        match order.compare(&a, &b) {
            Ordering::Greater => Some(Binomial { plus: a, minus: b }),
            Ordering::Less => Some(Binomial { plus: b, minus: a }),
            Ordering::Equal => None,
        }
    }

    fn without_common_factor(&self) -> Binomial {
        let g = self.plus.gcd(&self.minus);
        Binomial { plus: self.plus.div(&g), minus: self.minus.div(&g) }
    }

    pub fn degree(&self) -> u32 {
        self.plus.degree().max(self.minus.degree())
    }
}

fn leading_reduce(f: Binomial, basis: &[Binomial], order: &TermOrder) -> Option<Binomial> {
    let mut cur = f;
    loop {
        let Some(g) = basis.iter().find(|g| g.plus.divides(&cur.plus)) else { return Some(cur) };
        let replaced = cur.plus.div(&g.plus).mul(&g.minus);
        cur = Binomial::oriented(replaced, cur.minus, order)?;
    }
}

/// Normal form of a monomial: the standard monomial it reduces to.
pub fn normal_form(m: &Monomial, basis: &[Binomial]) -> Monomial {
    let mut cur = m.clone();
    while let Some(g) = basis.iter().find(|g| g.plus.divides(&cur)) {
        cur = cur.div(&g.plus).mul(&g.minus);
    }
    cur
}

fn s_binomial(f: &Binomial, g: &Binomial, order: &TermOrder) -> Option<Binomial> {
    let l = f.plus.lcm(&g.plus);
    Binomial::oriented(l.div(&f.plus).mul(&f.minus), l.div(&g.plus).mul(&g.minus), order)
}

/// Buchberger completion on pure-difference binomials.
///
/// With `saturate`, common monomial factors are divided out of every new
/// element; that is sound exactly when the ideal is prime and contains no
/// monomials, as for toric and graph ideals.
pub fn buchberger_with(
    gens: &[Binomial],
    order: &TermOrder,
    ceiling: u32,
    saturate: bool,
) -> Result<Vec<Binomial>> {
    let prep = |b: Binomial| if saturate { b.without_common_factor() } else { b };
    let mut basis: Vec<Binomial> = Vec::new();
    for g in gens {
        if let Some(b) = Binomial::oriented(g.plus.clone(), g.minus.clone(), order) {
            let b = prep(b);
            if b.plus != b.minus && !basis.contains(&b) {
                basis.push(b);
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        if basis[i].plus.is_coprime(&basis[j].plus) {
            continue;
        }
        let Some(s) = s_binomial(&basis[i], &basis[j], order) else { continue };
        let Some(r) = leading_reduce(s, &basis, order) else { continue };
        let r = if saturate {
            match Binomial::oriented(r.plus.clone(), r.minus.clone(), order) {
                Some(b) => b.without_common_factor(),
                None => continue,
            }
        } else {
            r
        };
        if r.degree() > ceiling {
            return Err(Error::DegreeExplosion { ceiling });
        }
        let k = basis.len();
        basis.push(r);
        for i in 0..k {
            pairs.push((i, k));
        }
    }
    Ok(reduce_basis(basis, order))
}

/// Plain Buchberger completion of the ideal generated by `gens`.
pub fn buchberger(gens: &[Binomial], order: &TermOrder, ceiling: u32) -> Result<GroebnerBasis> {
    let elements = buchberger_with(gens, order, ceiling, false)?;
    Ok(GroebnerBasis::from_parts(order.clone(), elements))
}

/// Minimalizes and tail-reduces a Gröbner basis, then sorts it by leading
/// term ascending.
fn reduce_basis(mut basis: Vec<Binomial>, order: &TermOrder) -> Vec<Binomial> {
    basis.sort_by(|a, b| order.compare(&a.plus, &b.plus));
    basis.dedup();
    let mut minimal: Vec<Binomial> = Vec::new();
    for (i, b) in basis.iter().enumerate() {
        let redundant = basis
            .iter()
            .enumerate()
            .any(|(j, c)| j != i && c.plus.divides(&b.plus) && (c.plus != b.plus || j < i));
        if !redundant {
            minimal.push(b.clone());
        }
    }
    let lts: Vec<Binomial> = minimal.clone();
    let mut out: Vec<Binomial> = minimal
        .into_iter()
        .map(|b| Binomial { minus: normal_form(&b.minus, &lts), plus: b.plus })
        .collect();
    out.sort_by(|a, b| order.compare(&a.plus, &b.plus));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GroebnerBasis {
    pub order: TermOrder,
    pub elements: Vec<Binomial>,
    /// Largest total degree of a leading term; 0 for the empty basis.
    pub degree: u32,
}

impl GroebnerBasis {
    pub fn from_parts(order: TermOrder, elements: Vec<Binomial>) -> Self {
        let degree = elements.iter().map(|b| b.plus.degree()).max().unwrap_or(0);
        GroebnerBasis { order, elements, degree }
    }

    pub fn nvars(&self) -> usize {
        self.order.nvars()
    }

    /// `d` in the vanishing bound: the basis degree, never below 2.
    pub fn effective_degree(&self) -> u32 {
        self.degree.max(2)
    }

    pub fn leading_terms(&self) -> impl Iterator<Item = &Monomial> {
        self.elements.iter().map(|b| &b.plus)
    }

    pub fn dividing_leading_term(&self, m: &Monomial) -> Option<&Binomial> {
        self.elements.iter().find(|b| b.plus.divides(m))
    }

    pub fn in_initial_ideal(&self, m: &Monomial) -> bool {
        self.dividing_leading_term(m).is_some()
    }

    pub fn normal_form(&self, m: &Monomial) -> Monomial {
        normal_form(m, &self.elements)
    }

    /// Buchberger criterion over all pairs.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        let el = &self.elements;
        for j in 0..el.len() {
            for i in 0..j {
                if let Some(s) = s_binomial(&el[i], &el[j], &self.order) {
                    if leading_reduce(s, el, &self.order).is_some() {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_reduced(&self) -> bool {
        self.elements.iter().enumerate().all(|(i, b)| {
            self.elements.iter().enumerate().all(|(j, c)| {
                i == j || (!c.plus.divides(&b.plus) && !c.plus.divides(&b.minus))
            })
        })
    }

    /// Checks a user-supplied basis: every element lies in the toric ideal,
    /// is oriented by the order, the S-pair criterion holds, and every element
    /// of the independently computed basis reduces to zero.
    pub fn verify_supplied(
        sg: &SemigroupPresentation,
        order: TermOrder,
        elements: Vec<Binomial>,
        ceiling: u32,
    ) -> Result<GroebnerBasis> {
        let n = sg.ngens();
        for b in &elements {
            if b.plus.nvars() != n || b.minus.nvars() != n {
                return Err(Error::InvalidBasis(format!("{b:?} has the wrong number of variables")));
            }
            if b.plus == b.minus {
                return Err(Error::InvalidBasis(format!("{b:?} is zero")));
            }
            if sg.phi(&b.plus) != sg.phi(&b.minus) {
                return Err(Error::InvalidBasis(format!("{b:?} is not in the toric ideal")));
            }
            if order.compare(&b.plus, &b.minus) != Ordering::Greater {
                return Err(Error::InvalidBasis(format!("{b:?}: plus part is not the leading term")));
            }
        }
        let gb = GroebnerBasis::from_parts(order.clone(), elements);
        if !gb.s_pairs_reduce_to_zero() {
            return Err(Error::InvalidBasis("an S-pair does not reduce to zero".into()));
        }
        let reference = toric_groebner_basis(sg, &order, ceiling)?;
        for b in &reference.elements {
            if gb.normal_form(&b.plus) != gb.normal_form(&b.minus) {
                return Err(Error::InvalidBasis(format!("toric relation {b:?} is not generated")));
            }
        }
        Ok(gb)
    }
}

/// All primitive binomials `z^u − z^v` with `φ(u) = φ(v)`, coprime parts and
/// both degrees at most `cap`, found by grouping monomials by multidegree.
pub fn toric_ideal_basis(sg: &SemigroupPresentation, cap: u32, order: &TermOrder) -> Vec<Binomial> {
    let n = sg.ngens();
    let mut fibers: BTreeMap<Vec<u32>, Vec<Monomial>> = BTreeMap::new();
    let mut cur = vec![0u32; n];
    fn rec(
        i: usize,
        left: u32,
        cur: &mut Vec<u32>,
        sg: &SemigroupPresentation,
        fibers: &mut BTreeMap<Vec<u32>, Vec<Monomial>>,
    ) {
        if i == cur.len() {
            let m = Monomial(cur.clone());
            fibers.entry(sg.phi(&m).0).or_default().push(m);
            return;
        }
        for k in 0..=left {
            cur[i] = k;
            rec(i + 1, left - k, cur, sg, fibers);
        }
        cur[i] = 0;
    }
    rec(0, cap, &mut cur, sg, &mut fibers);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for ms in fibers.values() {
        for j in 0..ms.len() {
            for i in 0..j {
                if ms[i].is_coprime(&ms[j]) {
                    if let Some(b) = Binomial::oriented(ms[i].clone(), ms[j].clone(), order) {
                        if seen.insert(b.clone()) {
                            out.push(b);
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| order.compare(&a.plus, &b.plus).then_with(|| order.compare(&a.minus, &b.minus)));
    out
}

/// Reduced Gröbner basis of the toric ideal `I_Λ` under `order`, by
/// eliminating the `x` variables from the graph ideal.
pub fn toric_groebner_basis(
    sg: &SemigroupPresentation,
    order: &TermOrder,
    ceiling: u32,
) -> Result<GroebnerBasis> {
    let n = sg.ngens();
    let e = sg.dimension();
    if order.nvars() != n {
        return Err(Error::InvalidTermOrder(format!("order has {} variables, expected {n}", order.nvars())));
    }
    // variables: z_0..z_{n-1}, then x_0..x_{e-1}
    let total = n + e;
    let mut rows = Vec::new();
    let mut xdeg = vec![0i64; total];
    for c in xdeg.iter_mut().skip(n) {
        *c = 1;
    }
    rows.push(xdeg);
    for r in order.weight_rows() {
        let mut row = r.clone();
        row.extend(std::iter::repeat_n(0, e));
        rows.push(row);
    }
    let mut priority: Vec<usize> = (n..total).rev().collect();
    priority.extend(order.priority.iter().copied());
    let big = TermOrder::new(OrderKind::Weight(rows), priority)?;
    let mut gens = Vec::new();
    for i in 0..n {
        let mut z = vec![0u32; total];
        z[i] = 1;
        let mut x = vec![0u32; total];
        for (c, &a) in sg.generator(i).0.iter().enumerate() {
            x[n + c] = a;
        }
        gens.push(Binomial { plus: Monomial(x), minus: Monomial(z) });
    }
    let xceiling = ceiling.saturating_add(sg.generators().iter().map(|g| g.total()).max().unwrap_or(0) * ceiling);
    let full = buchberger_with(&gens, &big, xceiling, true)?;
    let mut out = Vec::new();
    for b in full {
        if b.plus.0[n..].iter().all(|&c| c == 0) && b.minus.0[n..].iter().all(|&c| c == 0) {
            let plus = Monomial(b.plus.0[..n].to_vec());
            let minus = Monomial(b.minus.0[..n].to_vec());
            if plus.degree() > ceiling {
                return Err(Error::DegreeExplosion { ceiling });
            }
            out.push(Binomial { plus, minus });
        }
    }
    Ok(GroebnerBasis::from_parts(order.clone(), reduce_basis(out, order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::tests::e1;

    fn m(v: &[u32]) -> Monomial {
        Monomial(v.to_vec())
    }

    #[test]
    fn default_lex_leading_term() {
        let o = TermOrder::default_lex(5);
        assert_eq!(o.compare(&m(&[0, 1, 0, 0, 1]), &m(&[2, 0, 0, 0, 0])), Ordering::Greater);
        assert_eq!(o.compare(&m(&[1, 0, 0, 0, 0]), &m(&[1, 0, 0, 0, 0])), Ordering::Equal);
    }

    #[test]
    fn grevlex_matches_reference() {
        let o = TermOrder::new(OrderKind::GradedRevlex, vec![2, 1, 0]).unwrap();
        // reference: degree, then the smaller exponent of the smallest variable wins
        let reference = |a: &Monomial, b: &Monomial| {
            a.degree().cmp(&b.degree()).then_with(|| {
                for v in 0..3 {
                    if a.0[v] != b.0[v] {
                        return b.0[v].cmp(&a.0[v]);
                    }
                }
                Ordering::Equal
            })
        };
        let a = m(&[1, 0, 1]);
        let b = m(&[0, 2, 0]);
        assert_eq!(o.compare(&a, &b), reference(&a, &b));
        assert_eq!(o.compare(&a, &b), Ordering::Less);
        let w = TermOrder::new(OrderKind::Weight(o.weight_rows()), vec![2, 1, 0]).unwrap();
        assert_eq!(w.compare(&a, &b), Ordering::Less);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(TermOrder::new(OrderKind::Lex, vec![0, 0]).is_err());
        assert!(TermOrder::new(OrderKind::Weight(vec![vec![-1, 1]]), vec![1, 0]).is_err());
        assert!(TermOrder::new(OrderKind::Weight(vec![vec![0, 1]]), vec![1, 0]).is_ok());
    }

    #[test]
    fn e1_toric_ideal() {
        let s = e1();
        let o = TermOrder::default_lex(5);
        let low = toric_ideal_basis(&s, 2, &o);
        assert_eq!(low, vec![Binomial { plus: m(&[0, 1, 0, 0, 1]), minus: m(&[2, 0, 0, 0, 0]) }]);
        let gb = toric_groebner_basis(&s, &o, 20).unwrap();
        assert_eq!(gb.elements, low);
        assert_eq!(gb.degree, 2);
        let found = gb.dividing_leading_term(&m(&[0, 1, 1, 0, 1])).unwrap();
        assert_eq!(found.plus, m(&[0, 1, 0, 0, 1]));
        assert!(gb.dividing_leading_term(&Monomial::one(5)).is_none());
    }

    #[test]
    fn free_semigroup_has_no_relations() {
        let s = SemigroupPresentation::new(2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let o = TermOrder::default_lex(2);
        assert!(toric_ideal_basis(&s, 4, &o).is_empty());
        assert!(toric_groebner_basis(&s, &o, 20).unwrap().elements.is_empty());
        assert!(buchberger(&[], &o, 10).unwrap().elements.is_empty());
    }

    #[test]
    fn twisted_cubic_minors() {
        // generators (3,0),(2,1),(1,2),(0,3): the 2x2 minors of a 2x3 Hankel matrix
        let s = SemigroupPresentation::new(2, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]).unwrap();
        let o = TermOrder::new(OrderKind::GradedRevlex, vec![0, 1, 2, 3]).unwrap();
        let gb = toric_groebner_basis(&s, &o, 20).unwrap();
        // textbook: z1^2 - z0 z2, z1 z2 - z0 z3, z2^2 - z1 z3
        let mut lts: Vec<Monomial> = gb.leading_terms().cloned().collect();
        lts.sort();
        assert_eq!(lts, vec![m(&[0, 0, 2, 0]), m(&[0, 1, 1, 0]), m(&[0, 2, 0, 0])]);
        assert!(gb.s_pairs_reduce_to_zero());
        assert!(gb.is_reduced());
        // two of the three minors generate a strictly smaller ideal
        let two: Vec<Binomial> = gb.elements.iter().filter(|b| b.plus != m(&[0, 1, 1, 0])).cloned().collect();
        let plain = buchberger(&two, &o, 20).unwrap();
        assert_ne!(plain.normal_form(&m(&[0, 1, 1, 0])), plain.normal_form(&m(&[1, 0, 0, 1])));
        assert!(GroebnerBasis::verify_supplied(&s, o.clone(), two, 20).is_err());
        assert!(plain.s_pairs_reduce_to_zero());
    }

    #[test]
    fn supplied_basis_checks() {
        let s = e1();
        let o = TermOrder::default_lex(5);
        let good = vec![Binomial { plus: m(&[0, 1, 0, 0, 1]), minus: m(&[2, 0, 0, 0, 0]) }];
        assert!(GroebnerBasis::verify_supplied(&s, o.clone(), good, 20).is_ok());
        assert!(GroebnerBasis::verify_supplied(&s, o.clone(), vec![], 20).is_err());
        let wrong = vec![Binomial { plus: m(&[0, 1, 0, 0, 1]), minus: m(&[1, 0, 0, 0, 0]) }];
        assert!(GroebnerBasis::verify_supplied(&s, o, wrong, 20).is_err());
    }
}
