//! Exact rank computations for sparse integer matrices.
//!
//! Ranks over ℚ use elimination restricted to unit pivots (which keeps every
//! entry integral and small), followed by fraction-free Bareiss elimination
//! over big integers on whatever block has no unit entry left. Ranks over
//! `F_p` use ordinary modular elimination. Smith normal form is available for
//! torsion reports on small matrices.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient field for rank computations: characteristic 0 (ℚ) or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Field(pub u32);

impl Field {
    pub const RATIONALS: Field = Field(0);

    pub fn prime(p: u32) -> Field {
        assert!(is_prime(p), "{p} is not prime");
        Field(p)
    }

    pub fn characteristic(self) -> u32 {
        self.0
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Row-major sparse integer matrix with sorted column indices per row.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn push(&mut self, row: usize, col: usize, value: i64) {
        if value != 0 {
            self.rows[row].push((col, value));
        }
    }

    fn normalized(&self) -> Vec<Vec<(usize, i64)>> {
        self.rows
            .iter()
            .map(|r| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(c, v) in r {
                    *acc.entry(c).or_insert(0) += v;
                }
                let mut v: Vec<(usize, i64)> = acc.into_iter().filter(|&(_, v)| v != 0).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.ncols]; self.nrows];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                d[i][c] += v;
            }
        }
        d
    }

    pub fn rank(&self, field: Field) -> usize {
        if field.0 == 0 {
            rank_rational(self)
        } else {
            rank_mod_p(self, field.0 as u64)
        }
    }
}

fn add_scaled(target: &[(usize, i64)], pivot: &[(usize, i64)], factor: i64) -> Option<Vec<(usize, i64)>> {
    // target - factor * pivot
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let take_t = j >= pivot.len() || (i < target.len() && target[i].0 < pivot[j].0);
        let take_p = i >= target.len() || (j < pivot.len() && pivot[j].0 < target[i].0);
        if take_t {
            out.push(target[i]);
            i += 1;
        } else if take_p {
            let v = pivot[j].1.checked_mul(factor)?.checked_neg()?;
            out.push((pivot[j].0, v));
            j += 1;
        } else {
            let v = target[i].1.checked_sub(pivot[j].1.checked_mul(factor)?)?;
            if v != 0 {
                out.push((target[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Rank over ℚ. Exact.
pub fn rank_rational(m: &SparseMatrix) -> usize {
    streaming_rank_z(m).unwrap_or_else(|| pivoting_rank_z(m))
}

/// `a·x − b·y` on sorted sparse rows, dropping zeros.
fn combine(x: &[(usize, i64)], a: i64, y: &[(usize, i64)], b: i64) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push((x[i].0, x[i].1.checked_mul(a)?));
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, y[j].1.checked_mul(b)?.checked_neg()?));
            j += 1;
        } else {
            let v = x[i].1.checked_mul(a)?.checked_sub(y[j].1.checked_mul(b)?)?;
            if v != 0 {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    let g = out.iter().fold(0i64, |g, &(_, v)| g.gcd(&v));
    if g > 1 {
        for e in out.iter_mut() {
            e.1 /= g;
        }
    }
    Some(out)
}

/// Row-by-row echelon reduction over ℤ, fraction free. `None` on overflow.
fn streaming_rank_z(m: &SparseMatrix) -> Option<usize> {
    let mut rows = m.normalized();
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());
    let mut pivots: HashMap<usize, Vec<(usize, i64)>> = HashMap::new();
    for mut cur in rows {
        while let Some(&(lead, a)) = cur.first() {
            let Some(prow) = pivots.get(&lead) else {
                pivots.insert(lead, cur);
                break;
            };
            let b = prow[0].1;
            let g = a.gcd(&b);
            cur = combine(&cur, b / g, prow, a / g)?;
        }
    }
    Some(pivots.len())
}

/// Elimination on unit pivots, then Bareiss on what is left.
fn pivoting_rank_z(m: &SparseMatrix) -> usize {
    let mut rows = m.normalized();
    let mut rank = 0usize;
    let mut alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m.ncols];
    for (i, r) in rows.iter().enumerate() {
        for &(c, _) in r {
            col_rows[c].push(i);
        }
    }
    let mut overflow = false;
    loop {
        // choose a unit pivot with the shortest row
        let mut best: Option<(usize, usize, i64)> = None;
        let mut best_len = usize::MAX;
        for (i, r) in rows.iter().enumerate() {
            if !alive[i] || r.len() >= best_len {
                continue;
            }
            if let Some(&(c, v)) = r.iter().find(|&&(_, v)| v == 1 || v == -1) {
                best = Some((i, c, v));
                best_len = r.len();
                if best_len == 1 {
                    break;
                }
            }
        }
        let Some((pi, pc, pv)) = best else { break };
        let pivot_row = rows[pi].clone();
        alive[pi] = false;
        rank += 1;
        let touched: Vec<usize> = std::mem::take(&mut col_rows[pc]);
        for &ri in &touched {
            if ri == pi || !alive[ri] {
                continue;
            }
            let Some(&(_, v)) = rows[ri].iter().find(|&&(c, _)| c == pc) else { continue };
            // v / pv is exact because pv = ±1
            let factor = v * pv;
            match add_scaled(&rows[ri], &pivot_row, factor) {
                Some(new_row) => {
                    for &(c, _) in &new_row {
                        if c != pc {
                            col_rows[c].push(ri);
                        }
                    }
                    rows[ri] = new_row;
                    if rows[ri].is_empty() {
                        alive[ri] = false;
                    }
                }
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        if overflow {
            break;
        }
        for c in col_rows.iter_mut() {
            if c.len() > 64 {
                c.sort_unstable();
                c.dedup();
            }
        }
    }
    if overflow {
        let dense: Vec<Vec<BigInt>> =
            m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        return bareiss_rank(&dense);
    }
    let rest: Vec<Vec<(usize, i64)>> =
        rows.into_iter().zip(alive).filter(|(r, a)| *a && !r.is_empty()).map(|(r, _)| r).collect();
    if rest.is_empty() {
        return rank;
    }
    let mut cols: Vec<usize> = rest.iter().flat_map(|r| r.iter().map(|&(c, _)| c)).collect();
    cols.sort_unstable();
    cols.dedup();
    let pos: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let dense: Vec<Vec<BigInt>> = rest
        .iter()
        .map(|r| {
            let mut d = vec![BigInt::zero(); cols.len()];
            for &(c, v) in r {
                d[pos[&c]] = BigInt::from(v);
            }
            d
        })
        .collect();
    rank + bareiss_rank(&dense)
}

/// Fraction-free Gaussian elimination; returns the rank over ℚ.
pub fn bareiss_rank(a: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in (r + 1)..nrows {
            for j in (c + 1)..ncols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Rank over `F_p`.
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let to_fp = |v: i64| -> u64 { v.rem_euclid(p as i64) as u64 };
    let mut rows: Vec<Vec<(usize, u64)>> = m
        .normalized()
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, to_fp(v))).filter(|&(_, v)| v != 0).collect())
        .collect();
    rows.retain(|r| !r.is_empty());
    rows.sort_by_key(|r| r.len());
    // pivot column -> reduced pivot row (leading entry normalized to 1)
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    let mut rank = 0;
    for row in rows {
        let mut cur = row;
        while let Some(&(lead, lv)) = cur.first() {
            if let Some(prow) = pivots.get(&lead) {
                // cur -= lv * prow
                let mut out = Vec::with_capacity(cur.len() + prow.len());
                let (mut i, mut j) = (0, 0);
                while i < cur.len() || j < prow.len() {
                    if j >= prow.len() || (i < cur.len() && cur[i].0 < prow[j].0) {
                        out.push(cur[i]);
                        i += 1;
                    } else if i >= cur.len() || prow[j].0 < cur[i].0 {
                        out.push((prow[j].0, (p - lv * prow[j].1 % p) % p));
                        j += 1;
                    } else {
                        let v = (cur[i].1 + p - lv * prow[j].1 % p) % p;
                        if v != 0 {
                            out.push((cur[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                cur = out;
            } else {
                let inv = inv_mod(lv, p);
                let normalized: Vec<(usize, u64)> = cur.iter().map(|&(c, v)| (c, v * inv % p)).collect();
                pivots.insert(lead, normalized);
                rank += 1;
                break;
            }
        }
    }
    rank
}

/// Invariant factors (the nonzero diagonal of the Smith normal form).
pub fn smith_invariants(a: &[Vec<i64>]) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let nrows = m.len();
    let ncols = if nrows == 0 { 0 } else { m[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        let mut done = false;
        while !done {
            done = true;
            for i in (t + 1)..nrows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..ncols {
                    let v = &m[i][j] - &q * &m[t][j];
                    m[i][j] = v;
                }
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    done = false;
                }
            }
            for j in (t + 1)..ncols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let v = &row[j] - &q * &row[t];
                    row[j] = v;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    done = false;
                }
            }
            if done {
                // enforce divisibility of the rest of the block
                'outer: for i in (t + 1)..nrows {
                    for j in (t + 1)..ncols {
                        if !(&m[i][j] % &m[t][t]).is_zero() {
                            for jj in t..ncols {
                                let v = &m[t][jj] + &m[i][jj];
                                m[t][jj] = v;
                            }
                            done = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}
