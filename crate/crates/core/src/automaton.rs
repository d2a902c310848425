//! Finite automata accepting the top-down label words of surviving critical
//! cells, and the rational generating function of their lengths.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::facets::FacetOrder;
use crate::groebner::GroebnerBasis;
use crate::monomial::Monomial;
use crate::words::{NormalState, UnitAlphabet};

pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

/// A word is a sequence of symbols; a symbol is a letter `[x]` or a
/// collection of labels listed top-down.
pub type Word = Vec<Vec<usize>>;

/// Deterministic automaton over letters and label collections.
#[derive(Clone, Debug, Serialize)]
pub struct MorseAutomaton {
    pub symbols: Vec<Vec<usize>>,
    /// Outgoing `(symbol, target)` pairs per state, sorted by symbol.
    pub transitions: Vec<Vec<(usize, usize)>>,
    pub finals: Vec<bool>,
    pub initial: usize,
    /// States of the automaton before subset construction.
    pub nfa_states: usize,
}

enum NfaState {
    Core(NormalState),
    /// Inside a leading-term unit: the remaining collection, then the target.
    Mid { symbol: usize, target: usize },
}

fn build(gb: &GroebnerBasis, cfg: &FacetOrder, budget: usize) -> Result<MorseAutomaton> {
    let alpha = UnitAlphabet::new(gb, cfg);
    let mut symbols: Vec<Vec<usize>> = Vec::new();
    let mut symbol_id: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut intern = |s: Vec<usize>, symbols: &mut Vec<Vec<usize>>| -> usize {
        *symbol_id.entry(s.clone()).or_insert_with(|| {
            symbols.push(s);
            symbols.len() - 1
        })
    };
    let unit_symbols: Vec<Vec<usize>> =
        (0..alpha.len()).map(|u| alpha.symbols(u).into_iter().map(|s| intern(s, &mut symbols)).collect()).collect();

    // nondeterministic automaton over normal-form states
    let mut states: Vec<NfaState> = vec![NfaState::Core(NormalState::default())];
    let mut core_id: HashMap<NormalState, usize> = HashMap::from([(NormalState::default(), 0)]);
    let mut mid_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let NfaState::Core(st) = &states[s] else { continue };
        let st = st.clone();
        for u in 0..alpha.len() {
            if st.last.is_some_and(|l| !alpha.may_follow(cfg, l, u)) {
                continue;
            }
            let mut next = st.clone();
            if !next.push(&alpha, u) {
                continue;
            }
            let t = match core_id.get(&next) {
                Some(&t) => t,
                None => {
                    if states.len() >= budget {
                        return Err(Error::StateBudgetExceeded { budget });
                    }
                    states.push(NfaState::Core(next.clone()));
                    edges.push(Vec::new());
                    core_id.insert(next, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            let syms = &unit_symbols[u];
            if syms.len() == 1 {
                edges[s].push((syms[0], t));
            } else {
                let m = *mid_id.entry((syms[1], t)).or_insert_with(|| {
                    states.push(NfaState::Mid { symbol: syms[1], target: t });
                    edges.push(Vec::new());
                    states.len() - 1
                });
                edges[s].push((syms[0], m));
            }
        }
    }
    for (s, st) in states.iter().enumerate() {
        if let NfaState::Mid { symbol, target } = st {
            edges[s].push((*symbol, *target));
        }
    }
    let is_core: Vec<bool> = states.iter().map(|s| matches!(s, NfaState::Core(_))).collect();

    // subset construction
    let mut dfa_sets: Vec<Vec<usize>> = vec![vec![0]];
    let mut dfa_id: HashMap<Vec<usize>, usize> = HashMap::from([(vec![0], 0)]);
    let mut transitions: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut k = 0;
    while k < dfa_sets.len() {
        let mut by_symbol: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for &s in &dfa_sets[k] {
            for &(sym, t) in &edges[s] {
                by_symbol.entry(sym).or_default().insert(t);
            }
        }
        for (sym, set) in by_symbol {
            let set: Vec<usize> = set.into_iter().collect();
            let t = match dfa_id.get(&set) {
                Some(&t) => t,
                None => {
                    if dfa_sets.len() >= budget {
                        return Err(Error::StateBudgetExceeded { budget });
                    }
                    dfa_sets.push(set.clone());
                    transitions.push(Vec::new());
                    dfa_id.insert(set, dfa_sets.len() - 1);
                    dfa_sets.len() - 1
                }
            };
            transitions[k].push((sym, t));
        }
        k += 1;
    }
    let finals = dfa_sets.iter().map(|set| set.iter().any(|&s| is_core[s])).collect();
    Ok(MorseAutomaton { symbols, transitions, finals, initial: 0, nfa_states: states.len() })
}

/// Automaton for a quadratic basis: words are letter sequences.
pub fn build_quadratic_automaton(gb: &GroebnerBasis, cfg: &FacetOrder, budget: usize) -> Result<MorseAutomaton> {
    if gb.effective_degree() > 2 {
        return Err(Error::InvalidBasis(format!("expected a quadratic basis, found degree {}", gb.effective_degree())));
    }
    build(gb, cfg, budget)
}

/// Automaton for a basis of any degree; a leading term `a_1 ⋯ a_k` with
/// `k ≥ 3` is read as the letter `a_k` followed by the collection
/// `a_{k−1} … a_1`.
pub fn build_degree_d_automaton(gb: &GroebnerBasis, cfg: &FacetOrder, budget: usize) -> Result<MorseAutomaton> {
    build(gb, cfg, budget)
}

impl MorseAutomaton {
    pub fn num_states(&self) -> usize {
        self.transitions.len()
    }

    fn step(&self, s: usize, sym: usize) -> Option<usize> {
        let row = &self.transitions[s];
        row.binary_search_by_key(&sym, |&(a, _)| a).ok().map(|i| row[i].1)
    }

    pub fn symbol_index(&self, sym: &[usize]) -> Option<usize> {
        self.symbols.iter().position(|s| s == sym)
    }

    pub fn accepts(&self, word: &[Vec<usize>]) -> bool {
        let mut s = self.initial;
        for sym in word {
            let Some(k) = self.symbol_index(sym) else { return false };
            match self.step(s, k) {
                Some(t) => s = t,
                None => return false,
            }
        }
        self.finals[s]
    }

    /// Accepted words of each length `0..=max_len`.
    pub fn count_words(&self, max_len: usize) -> Vec<BigUint> {
        let mut cur = vec![BigUint::zero(); self.num_states()];
        cur[self.initial] = BigUint::one();
        let mut out = Vec::with_capacity(max_len + 1);
        for len in 0..=max_len {
            out.push(cur.iter().zip(&self.finals).filter(|(_, &f)| f).map(|(c, _)| c).sum());
            if len == max_len {
                break;
            }
            let mut next = vec![BigUint::zero(); self.num_states()];
            for (s, c) in cur.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for &(_, t) in &self.transitions[s] {
                    next[t] += c;
                }
            }
            cur = next;
        }
        out
    }

    /// All accepted words whose labels multiply to `content`.
    pub fn words_with_content(&self, content: &Monomial) -> Vec<Word> {
        let mut out = Vec::new();
        let mut word = Vec::new();
        let mut rest = content.0.clone();
        self.walk(self.initial, &mut rest, &mut word, &mut out);
        out
    }

    fn walk(&self, s: usize, rest: &mut [u32], word: &mut Word, out: &mut Vec<Word>) {
        if rest.iter().all(|&c| c == 0) {
            if self.finals[s] {
                out.push(word.clone());
            }
            return;
        }
        for &(sym, t) in &self.transitions[s] {
            let letters = &self.symbols[sym];
            let mut ok = true;
            for &x in letters {
                if rest[x] == 0 {
                    ok = false;
                }
                rest[x] = rest[x].wrapping_sub(1);
            }
            if ok {
                word.push(letters.clone());
                self.walk(t, rest, word, out);
                word.pop();
            }
            for &x in letters {
                rest[x] = rest[x].wrapping_add(1);
            }
        }
    }

    /// Merges states with the same future by partition refinement; the
    /// language is unchanged.
    pub fn minimized(&self) -> MorseAutomaton {
        let n = self.num_states();
        let mut class: Vec<usize> = self.finals.iter().map(|&f| usize::from(f)).collect();
        let mut count = 0;
        loop {
            let mut sig_id: HashMap<(usize, Vec<(usize, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..n)
                .map(|s| {
                    let sig = (class[s], self.transitions[s].iter().map(|&(a, t)| (a, class[t])).collect());
                    let len = sig_id.len();
                    *sig_id.entry(sig).or_insert(len)
                })
                .collect();
            let new_count = sig_id.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut transitions = vec![Vec::new(); count];
        let mut finals = vec![false; count];
        for s in 0..n {
            finals[class[s]] = self.finals[s];
            transitions[class[s]] = self.transitions[s].iter().map(|&(a, t)| (a, class[t])).collect();
        }
        MorseAutomaton {
            symbols: self.symbols.clone(),
            transitions,
            finals,
            initial: class[self.initial],
            nfa_states: self.nfa_states,
        }
    }
}

/// `numerator / denominator` with integer coefficients, constant term of the
/// denominator equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalSeries {
    #[serde(serialize_with = "as_strings")]
    pub numerator: Vec<BigInt>,
    #[serde(serialize_with = "as_strings")]
    pub denominator: Vec<BigInt>,
}

fn as_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl RationalSeries {
    /// Power series coefficients `0..=n`.
    pub fn expand(&self, n: usize) -> Vec<BigInt> {
        let q = &self.denominator;
        let mut c: Vec<BigInt> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut v = self.numerator.get(k).cloned().unwrap_or_default();
            for j in 1..q.len().min(k + 1) {
                v -= &q[j] * &c[k - j];
            }
            c.push(v);
        }
        c
    }
}

fn poly_string(p: &[BigInt]) -> String {
    let mut terms = Vec::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match k {
            0 => mag.to_string(),
            _ if mag.is_one() => if k == 1 { "t".into() } else { format!("t^{k}") },
            1 => format!("{mag}t"),
            _ => format!("{mag}t^{k}"),
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        if terms.is_empty() {
            terms.push(if c.is_negative() { format!("-{body}") } else { body });
        } else {
            terms.push(format!("{sign} {body}"));
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" ")
    }
}

impl fmt::Display for RationalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", poly_string(&self.numerator), poly_string(&self.denominator))
    }
}

/// Shortest linear recurrence of a sequence over ℚ; returns the connection
/// polynomial `1 + c_1 t + … + c_L t^L`.
fn berlekamp_massey(seq: &[BigRational]) -> Vec<BigRational> {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = BigRational::one();
    for n in 0..seq.len() {
        let mut d = seq[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &seq[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bd;
        let old = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = old;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(l + 1);
    c.resize(l + 1, BigRational::zero());
    c
}

/// Generating function of accepted-word counts by length, from the transfer
/// matrix of the minimized automaton.
pub fn rational_series(a: &MorseAutomaton) -> RationalSeries {
    let small = a.minimized();
    let n = small.num_states();
    let counts = small.count_words(2 * n + 2);
    let seq: Vec<BigRational> = counts.iter().map(|c| BigRational::from_integer(BigInt::from(c.clone()))).collect();
    let mut den = berlekamp_massey(&seq);
    // the recurrence holds from index L on, so the numerator has degree < L
    let mut num: Vec<BigRational> = (0..den.len() - 1)
        .map(|k| (0..=k.min(den.len() - 1)).map(|j| &den[j] * &seq[k - j]).fold(BigRational::zero(), |x, y| x + y))
        .collect();
    for v in [&mut num, &mut den] {
        while v.len() > 1 && v.last().is_some_and(|x| x.is_zero()) {
            v.pop();
        }
    }
    let lcm = den.iter().chain(&num).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let to_int = |v: &[BigRational]| -> Vec<BigInt> { v.iter().map(|x| (x * &lcm).to_integer()).collect() };
    let mut s = RationalSeries { numerator: to_int(&num), denominator: to_int(&den) };
    // normalize the constant term of the denominator to 1
    let g = s.denominator.iter().chain(&s.numerator).fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in s.numerator.iter_mut().chain(s.denominator.iter_mut()) {
            *x /= &g;
        }
    }
    s
}

/// Counts accepted words by length without the automaton: depth-first over
/// unit sequences, pruning as soon as a prefix is rejected.
pub fn brute_force_counts(gb: &GroebnerBasis, cfg: &FacetOrder, max_len: usize) -> Vec<u64> {
    let alpha = UnitAlphabet::new(gb, cfg);
    let mut out = vec![0u64; max_len + 1];
    fn go(alpha: &UnitAlphabet, cfg: &FacetOrder, word: &mut Vec<usize>, len: usize, max_len: usize, out: &mut [u64]) {
        out[len] += 1;
        for u in 0..alpha.len() {
            let l = len + alpha.symbols(u).len();
            if l > max_len {
                continue;
            }
            if word.last().is_some_and(|&p| !alpha.may_follow(cfg, p, u)) {
                continue;
            }
            word.push(u);
            if alpha.is_normal(word) {
                go(alpha, cfg, word, l, max_len, out);
            }
            word.pop();
        }
    }
    go(&alpha, cfg, &mut Vec::new(), 0, max_len, &mut out);
    out
}
