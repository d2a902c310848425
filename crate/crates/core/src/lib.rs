//! Lexicographic discrete Morse functions on intervals of affine semigroup
//! posets, their cancellation, and the resulting bounds on Tor.

pub mod automaton;
pub mod cancel;
pub mod cli;
pub mod error;
pub mod facets;
pub mod fixtures;
pub mod groebner;
pub mod homology;
pub mod linalg;
pub mod monomial;
pub mod morse;
pub mod semigroup;
pub mod words;

pub use error::{Error, Result};
pub use groebner::{Binomial, GroebnerBasis, OrderKind, TermOrder};
pub use monomial::Monomial;
pub use semigroup::{IntervalData, Multidegree, SemigroupPresentation};
