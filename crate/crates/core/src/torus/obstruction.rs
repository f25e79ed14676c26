//! Bounded search for an iterate of `[A]` agreeing with a Frobenius power on
//! a nontrivial subtorus, i.e. `det(A^r - p^s I) = 0`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::PrimeModulus;
use crate::intalg::{exact_log, IntMatrix};
use crate::lrs::CharRoots;

pub const DEFAULT_R_MAX: u32 = 12;
pub const DEFAULT_S_MAX: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Obstruction {
    /// `A^r` has the eigenvalue `p^s`; `(r, s)` is lexicographically least.
    Obstructed { r: u32, s: u32 },
    /// No `r <= r_max`, `s <= s_max` works; nothing is claimed beyond that.
    ClearToBound { r_max: u32, s_max: u32 },
}

impl Obstruction {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, Obstruction::Obstructed { .. })
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Obstruction::Obstructed { r, s } => write!(f, "obstructed({r},{s})"),
            Obstruction::ClearToBound { r_max, s_max } => write!(f, "clear-to-bound({r_max},{s_max})"),
        }
    }
}

pub fn frobenius_obstruction(a: &IntMatrix, p: PrimeModulus, r_max: u32, s_max: u32) -> Obstruction {
    // an integer eigenvalue ±p^b settles it without bounds: r = 1 or r = 2
    let roots = CharRoots::of(&a.minimal_polynomial());
    let mut best: Option<(u32, u32)> = None;
    for (lambda, _) in &roots.integer_roots {
        if lambda.is_zero() {
            continue;
        }
        if let Some(b) = exact_log(&lambda.abs(), p.get()).filter(|&b| b >= 1) {
            let cand = if lambda.is_positive() { (1, b) } else { (2, 2 * b) };
            best = Some(best.map_or(cand, |cur| cur.min(cand)));
        }
    }
    let pb = BigInt::from(p.get());
    let mut ar = IntMatrix::identity(a.dim());
    for r in 1..=r_max {
        if best.is_some_and(|(br, _)| br < r) {
            break;
        }
        ar = ar.mul(a);
        let chi = ar.char_poly();
        let mut ps = BigInt::from(1);
        for s in 1..=s_max {
            if best.is_some_and(|cur| cur <= (r, s)) {
                break;
            }
            ps *= &pb;
            if chi.eval(&ps).is_zero() {
                best = Some((r, s));
                break;
            }
        }
    }
    match best {
        Some((r, s)) => Obstruction::Obstructed { r, s },
        None => Obstruction::ClearToBound { r_max, s_max },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn verdicts() {
        let p5 = PrimeModulus::new(5).unwrap();
        let p3 = PrimeModulus::new(3).unwrap();
        assert_eq!(frobenius_obstruction(&m(&[vec![5, 0], vec![0, 5]]), p5, 12, 24), Obstruction::Obstructed { r: 1, s: 1 });
        assert_eq!(frobenius_obstruction(&m(&[vec![0, 3], vec![1, 0]]), p3, 12, 24), Obstruction::Obstructed { r: 2, s: 1 });
        assert_eq!(
            frobenius_obstruction(&m(&[vec![2]]), p5, 12, 24),
            Obstruction::ClearToBound { r_max: 12, s_max: 24 }
        );
        assert_eq!(frobenius_obstruction(&m(&[vec![-25]]), p5, 1, 1), Obstruction::Obstructed { r: 2, s: 4 });
        assert_eq!(frobenius_obstruction(&m(&[vec![1, 0], vec![0, 9]]), p3, 12, 24), Obstruction::Obstructed { r: 1, s: 2 });
    }

    #[test]
    fn obstructed_verdicts_have_vanishing_determinant() {
        let p = PrimeModulus::new(3).unwrap();
        let mut found = 0;
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    for d in [-3i64, 0, 3] {
                        let mat = m(&[vec![a, b], vec![c, d]]);
                        if let Obstruction::Obstructed { r, s } = frobenius_obstruction(&mat, p, 4, 6) {
                            let shifted = mat.pow(r as u64).sub(&IntMatrix::scalar(2, &BigInt::from(3).pow(s)));
                            assert!(shifted.det().is_zero(), "{mat}");
                            found += 1;
                        }
                    }
                }
            }
        }
        assert!(found > 0);
    }
}
