//! Exponent-vector monomials in the presentation variables `z_0 .. z_{n-1}`.
//!
//! A monomial doubles as a multiset of generator indices: the content of a
//! saturated chain, or a factorization of a semigroup element.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    /// Builds the monomial whose exponents count the occurrences of each index.
    pub fn from_indices(nvars: usize, indices: &[usize]) -> Self {
        let mut e = vec![0; nvars];
        for &i in indices {
            e[i] += 1;
        }
        Monomial(e)
    }

    /// The multiset of variable indices in ascending order.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (i, &k) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, k as usize));
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        debug_assert!(other.divides(self));
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Smallest and largest variable index in the support.
    pub fn support_range(&self) -> Option<(usize, usize)> {
        let lo = self.0.iter().position(|&e| e > 0)?;
        let hi = self.0.iter().rposition(|&e| e > 0)?;
        Some((lo, hi))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "z{i}")?;
            } else {
                write!(f, "z{i}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_roundtrip() {
        let m = Monomial::from_indices(5, &[3, 0, 0, 2]);
        assert_eq!(m.0, vec![2, 0, 1, 1, 0]);
        assert_eq!(m.indices(), vec![0, 0, 2, 3]);
        assert_eq!(m.support_range(), Some((0, 3)));
    }

    #[test]
    fn lcm_gcd_divides() {
        let a = Monomial(vec![1, 0, 2]);
        let b = Monomial(vec![0, 1, 1]);
        assert_eq!(a.lcm(&b).0, vec![1, 1, 2]);
        assert_eq!(a.gcd(&b).0, vec![0, 0, 1]);
        assert!(a.gcd(&b).divides(&a));
        assert!(!a.is_coprime(&b));
        assert_eq!(format!("{:?}", a), "z0*z2^2");
    }
}
