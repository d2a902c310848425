//! Small named semigroups used by the tests, the acceptance suite and the
//! `--example` flag of the command line tool.

use crate::semigroup::SemigroupPresentation;

/// `k[z0..z4]/(z1 z4 − z0²)`.
pub fn e1() -> SemigroupPresentation {
    SemigroupPresentation::new(4, vec![vec![1, 1, 0, 0], vec![2, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![0, 2, 0, 0]])
        .unwrap()
}

/// `k[z0..z5]/(z1 z5 − z0²)`.
pub fn e2() -> SemigroupPresentation {
    SemigroupPresentation::new(
        5,
        vec![
            vec![1, 1, 0, 0, 0],
            vec![2, 0, 0, 0, 0],
            vec![0, 0, 1, 0, 0],
            vec![0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 1],
            vec![0, 2, 0, 0, 0],
        ],
    )
    .unwrap()
}

/// The Segre product of two lines, `k[z0..z3]/(z0 z1 − z2 z3)`.
pub fn e3() -> SemigroupPresentation {
    SemigroupPresentation::new(4, vec![vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 0, 1], vec![0, 1, 1, 0]]).unwrap()
}

/// Row and column sums of a `d × d` grid: `2d` generators with the single
/// relation (product of rows) = (product of columns) of degree `d`.
pub fn sharpness(d: usize) -> SemigroupPresentation {
    let mut gens = Vec::with_capacity(2 * d);
    for i in 0..d {
        gens.push((0..d * d).map(|k| u32::from(k / d == i)).collect());
    }
    for j in 0..d {
        gens.push((0..d * d).map(|k| u32::from(k % d == j)).collect());
    }
    SemigroupPresentation::new(d * d, gens).unwrap()
}

/// The rational quartic curve `(s⁴, s³t, st³, t⁴)`.
pub fn quartic() -> SemigroupPresentation {
    SemigroupPresentation::new(2, vec![vec![4, 0], vec![3, 1], vec![1, 3], vec![0, 4]]).unwrap()
}

/// The numerical semigroup generated by 3, 4 and 5.
pub fn numerical345() -> SemigroupPresentation {
    SemigroupPresentation::new(1, vec![vec![3], vec![4], vec![5]]).unwrap()
}

/// The free commutative monoid on `n` generators.
pub fn free(n: usize) -> SemigroupPresentation {
    SemigroupPresentation::new(n, (0..n).map(|i| (0..n).map(|k| u32::from(k == i)).collect()).collect()).unwrap()
}

pub fn by_name(name: &str) -> Option<SemigroupPresentation> {
    match name {
        "e1" => Some(e1()),
        "e2" => Some(e2()),
        "e3" => Some(e3()),
        "sharp2" => Some(sharpness(2)),
        "sharp3" => Some(sharpness(3)),
        "quartic" => Some(quartic()),
        "num345" => Some(numerical345()),
        _ => name.strip_prefix("free").and_then(|n| n.parse().ok()).filter(|&n| n > 0).map(free),
    }
}
