//! Integer linear recurrence sequences.
//!
//! An [`Lrs`] of order `d` stores `c_0, ..., c_{d-1}` and `u_0, ..., u_{d-1}`
//! for the recurrence `u_{n+d} + c_{d-1} u_{n+d-1} + ... + c_0 u_n = 0`.
//! The stored recurrence is never minimized behind the caller's back.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};
use crate::intalg::{exact_log, factor_bigint_partial, IntMatrix, IntPoly};

/// Default bound on the cyclotomic orders tried by [`Lrs::nondegenerate_split`].
pub const DEFAULT_CYCLOTOMIC_BOUND: usize = 64;

/// Below this many steps `eval` walks the recurrence instead of powering.
const DIRECT_EVAL_STEPS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lrs {
    coeffs: Vec<BigInt>,
    initial: Vec<BigInt>,
}

impl Lrs {
    pub fn new(coeffs: Vec<BigInt>, initial: Vec<BigInt>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Validation("recurrence order must be at least 1".into()));
        }
        if coeffs.len() != initial.len() {
            return Err(Error::Validation(format!(
                "order {} recurrence needs {} initial terms, got {}",
                coeffs.len(),
                coeffs.len(),
                initial.len()
            )));
        }
        Ok(Lrs { coeffs, initial })
    }

    pub fn from_i64s(coeffs: &[i64], initial: &[i64]) -> Result<Self> {
        Lrs::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), initial.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// The recurrence whose characteristic polynomial is `poly` (monic), with the given initial terms.
    pub fn with_char_poly(poly: &IntPoly, initial: Vec<BigInt>) -> Result<Self> {
        if !poly.is_monic() || poly.degree().unwrap_or(0) == 0 {
            return Err(Error::Validation("characteristic polynomial must be monic of degree >= 1".into()));
        }
        let d = poly.degree().unwrap();
        Lrs::new(poly.coeffs()[..d].to_vec(), initial)
    }

    /// `u_n = c` for all n.
    pub fn constant(c: BigInt) -> Self {
        Lrs { coeffs: vec![BigInt::from(-1)], initial: vec![c] }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn initial(&self) -> &[BigInt] {
        &self.initial
    }

    /// `x^d + c_{d-1} x^{d-1} + ... + c_0`.
    pub fn char_poly(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.push(BigInt::one());
        IntPoly::new(c)
    }

    /// The matrix sending the state `(u_n, ..., u_{n+d-1})` to `(u_{n+1}, ..., u_{n+d})`.
    pub fn companion(&self) -> IntMatrix {
        let d = self.order();
        let mut m = IntMatrix::zero(d);
        for i in 0..d - 1 {
            m.set(i, i + 1, BigInt::one());
        }
        for (j, c) in self.coeffs.iter().enumerate() {
            m.set(d - 1, j, -c);
        }
        m
    }

    fn next_term(&self, window: &[BigInt]) -> BigInt {
        -self.coeffs.iter().zip(window).map(|(c, u)| c * u).sum::<BigInt>()
    }

    /// Exact `u_n`.
    pub fn eval(&self, n: u64) -> BigInt {
        let d = self.order() as u64;
        if n < d {
            return self.initial[n as usize].clone();
        }
        if n < DIRECT_EVAL_STEPS {
            return self.iter().nth(n as usize).expect("infinite iterator");
        }
        let state = self.companion().pow(n).mul_vec(&self.initial);
        state.into_iter().next().expect("order >= 1")
    }

    /// `u_0, u_1, ...` by walking the recurrence.
    pub fn iter(&self) -> LrsIter<'_> {
        LrsIter { seq: self, window: self.initial.clone() }
    }

    /// First `count` terms.
    pub fn terms(&self, count: usize) -> Vec<BigInt> {
        self.iter().take(count).collect()
    }

    /// `v_k = u_{ak+b}`: recurrence from the characteristic polynomial of `C^a`.
    pub fn subsequence(&self, a: u64, b: u64) -> Result<Lrs> {
        if a == 0 {
            return Err(Error::Domain("subsequence step must be at least 1".into()));
        }
        let d = self.order();
        let poly = self.companion().pow(a).char_poly();
        let initial = (0..d as u64).map(|k| self.eval(a * k + b)).collect();
        Lrs::with_char_poly(&poly, initial)
    }

    /// True iff `u_{ak+b} = 0` for every k.
    ///
    /// The subsequence satisfies a recurrence of order `d'`, so it vanishes
    /// identically iff its first `d'` terms do.
    pub fn certify_zero_progression(&self, a: u64, b: u64) -> Result<bool> {
        let sub = self.subsequence(a, b)?;
        Ok(sub.initial.iter().all(|u| u.is_zero()))
    }

    pub fn is_zero_sequence(&self) -> bool {
        self.initial.iter().all(|u| u.is_zero())
    }

    /// Integer roots (with multiplicity) of the characteristic polynomial and the cofactor left over.
    pub fn char_roots(&self) -> CharRoots {
        CharRoots::of(&self.char_poly())
    }

    /// Splits `N_0` into the residue classes mod `M` on which the sequence is
    /// non-degenerate, where `M` is the least modulus killing every root of
    /// unity among the roots and every ratio `-1` between integer roots.
    pub fn nondegenerate_split(&self, cyclotomic_bound: usize) -> Result<NondegenerateSplit> {
        let roots = self.char_roots();
        let mut rest = roots.unresolved.clone();
        let mut modulus: u64 = 1;
        for order in 3..=cyclotomic_bound {
            if rest.degree().unwrap_or(0) == 0 {
                break;
            }
            let phi = IntPoly::cyclotomic(order);
            loop {
                let (q, r) = rest.divmod_monic(&phi);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                modulus = modulus.lcm(&(order as u64));
            }
        }
        if rest.degree().unwrap_or(0) > 0 {
            return Err(Error::Unsupported(format!(
                "characteristic factor {rest} is neither split over Z nor cyclotomic of order <= {cyclotomic_bound}"
            )));
        }
        let ints: Vec<&BigInt> = roots.integer_roots.iter().map(|(r, _)| r).collect();
        let has_minus_one = ints.iter().any(|r| **r == BigInt::from(-1));
        let has_opposite = ints.iter().any(|r| !r.is_zero() && ints.iter().any(|s| *s == &-(*r)));
        if has_minus_one || has_opposite {
            modulus = modulus.lcm(&2);
        }
        let mut pieces = Vec::with_capacity(modulus as usize);
        for offset in 0..modulus {
            let piece = self.subsequence(modulus, offset)?;
            if !piece.char_roots().is_nondegenerate() {
                return Err(Error::Invariant(format!(
                    "piece {offset} mod {modulus} is still degenerate"
                )));
            }
            pieces.push(SplitPiece { step: modulus, offset, seq: piece });
        }
        Ok(NondegenerateSplit { modulus, pieces })
    }
}

pub struct LrsIter<'a> {
    seq: &'a Lrs,
    window: Vec<BigInt>,
}

impl Iterator for LrsIter<'_> {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let next = self.seq.next_term(&self.window);
        self.window.push(next);
        Some(self.window.remove(0))
    }
}

/// Text form `order;c_0,...,c_{d-1};u_0,...,u_{d-1}`.
impl fmt::Display for Lrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{};{};{}", self.order(), join(&self.coeffs), join(&self.initial))
    }
}

impl std::str::FromStr for Lrs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Lrs> {
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected `order;coeffs;initial`, got `{s}`")));
        }
        let order: usize = parts[0].trim().parse().map_err(|_| Error::Parse(format!("bad order `{}`", parts[0])))?;
        let list = |t: &str| -> Result<Vec<BigInt>> {
            t.split(',')
                .map(|x| x.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("bad integer `{}`", x.trim()))))
                .collect()
        };
        let coeffs = list(parts[1])?;
        let initial = list(parts[2])?;
        if coeffs.len() != order {
            return Err(Error::Parse(format!("order {order} but {} coefficients", coeffs.len())));
        }
        Lrs::new(coeffs, initial)
    }
}

/// Integer roots of a monic integer polynomial plus the unresolved cofactor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharRoots {
    /// Distinct integer roots, ascending, with multiplicities.
    pub integer_roots: Vec<(BigInt, usize)>,
    /// Monic part that does not split over Z (1 when everything split).
    pub unresolved: IntPoly,
}

impl CharRoots {
    /// Candidate roots are the divisors of the lowest nonzero coefficient;
    /// each hit is removed by synthetic division.
    ///
    /// Divisors are built from a partial factorization; a root whose absolute
    /// value contains a prime factor beyond reach stays in `unresolved`,
    /// which downstream code treats as "not split" and handles by search.
    pub fn of(poly: &IntPoly) -> CharRoots {
        let mut f = poly.clone();
        let mut found: BTreeMap<BigInt, usize> = BTreeMap::new();
        while f.degree().unwrap_or(0) > 0 && f.coeffs()[0].is_zero() {
            f = f.divmod_monic(&IntPoly::from_i64s(&[0, 1])).0;
            *found.entry(BigInt::zero()).or_default() += 1;
        }
        if f.degree().unwrap_or(0) > 0 {
            let (primes, cofactor) = factor_bigint_partial(&f.coeffs()[0], 100_000);
            let mut divisors = vec![BigInt::one()];
            let mut all_primes = primes;
            if !cofactor.is_one() {
                all_primes.push((cofactor, 1));
            }
            for (q, e) in &all_primes {
                let mut next = Vec::new();
                for d in &divisors {
                    let mut pw = BigInt::one();
                    for _ in 0..=*e {
                        next.push(d * &pw);
                        pw *= q;
                    }
                }
                divisors = next;
            }
            divisors.sort();
            'outer: for d in divisors {
                for r in [d.clone(), -d] {
                    loop {
                        if f.degree().unwrap_or(0) == 0 {
                            break 'outer;
                        }
                        if !f.eval(&r).is_zero() {
                            break;
                        }
                        f = f.divmod_monic(&IntPoly::linear(&r)).0;
                        *found.entry(r.clone()).or_default() += 1;
                    }
                }
            }
        }
        CharRoots { integer_roots: found.into_iter().collect(), unresolved: f }
    }

    /// Rebuilds `prod (x - r)^mult * unresolved`.
    pub fn reconstruct(&self) -> IntPoly {
        self.integer_roots
            .iter()
            .fold(self.unresolved.clone(), |acc, (r, m)| acc.mul(&IntPoly::linear(r).pow(*m)))
    }

    pub fn is_split(&self) -> bool {
        self.unresolved.degree().unwrap_or(0) == 0
    }

    /// All roots are integers, none is a root of unity other than 1, and no
    /// two distinct roots have ratio -1.
    pub fn is_nondegenerate(&self) -> bool {
        if !self.is_split() {
            return false;
        }
        let roots: Vec<&BigInt> = self.integer_roots.iter().map(|(r, _)| r).collect();
        let minus_one = BigInt::from(-1);
        !roots.iter().any(|r| **r == minus_one)
            && !roots.iter().any(|r| !r.is_zero() && roots.iter().any(|s| *s == &-(*r)))
    }

    /// Per-root multiplicative dependence with `p`; see [`RootDependence`].
    pub fn p_dependence(&self, p: PrimeModulus) -> PDependence {
        let roots = self
            .integer_roots
            .iter()
            .map(|(r, _)| {
                let verdict = match exact_log(r, p.get()) {
                    Some(s) => RootDependence::Dependent { s, negative: r.is_negative() },
                    None => RootDependence::Independent,
                };
                (r.clone(), verdict)
            })
            .collect();
        let unresolved = if self.is_split() { None } else { Some(RootDependence::Unknown) };
        PDependence { roots, unresolved }
    }
}

/// Whether `r^j = p^k` has a solution `(j, k) != (0, 0)`.
///
/// For an integer root this happens exactly when `|r|` is a power of `p`
/// (`r = ±1` included, via `r^2 = p^0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootDependence {
    Independent,
    /// `|r| = p^s`.
    Dependent { s: u32, negative: bool },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PDependence {
    pub roots: Vec<(BigInt, RootDependence)>,
    /// Verdict for the roots hidden in the unresolved factor, if any.
    pub unresolved: Option<RootDependence>,
}

impl PDependence {
    pub fn all_independent(&self) -> bool {
        self.unresolved.is_none() && self.roots.iter().all(|(_, v)| *v == RootDependence::Independent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPiece {
    /// The progression `{step * k + offset}`.
    pub step: u64,
    pub offset: u64,
    /// `k -> u_{step k + offset}`.
    pub seq: Lrs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NondegenerateSplit {
    pub modulus: u64,
    pub pieces: Vec<SplitPiece>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> Lrs {
        Lrs::from_i64s(&[-1, -1], &[0, 1]).unwrap()
    }

    fn three_pow_minus_two() -> Lrs {
        // (x - 3)(x - 1) = x^2 - 4x + 3
        Lrs::from_i64s(&[3, -4], &[-1, 1]).unwrap()
    }

    /// Reference evaluation straight from the defining recurrence.
    fn naive(s: &Lrs, n: usize) -> BigInt {
        let mut v: Vec<BigInt> = s.initial().to_vec();
        while v.len() <= n {
            let k = v.len() - s.order();
            let next: BigInt = -(0..s.order()).map(|i| &s.coeffs()[i] * &v[k + i]).sum::<BigInt>();
            v.push(next);
        }
        v[n].clone()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(fib().eval(10), BigInt::from(55));
        let seven = Lrs::constant(BigInt::from(7));
        assert!((0..20).all(|n| seven.eval(n) == BigInt::from(7)));
        assert_eq!(three_pow_minus_two().eval(3), BigInt::from(25));
    }

    #[test]
    fn powering_agrees_with_walking() {
        let s = fib();
        for n in [255u64, 256, 300, 1000] {
            assert_eq!(s.eval(n), naive(&s, n as usize), "n = {n}");
        }
    }

    #[test]
    fn subsequence_examples() {
        let even = fib().subsequence(2, 0).unwrap();
        assert_eq!(even.char_poly(), IntPoly::from_i64s(&[1, -3, 1]));
        assert_eq!(even.initial(), &[BigInt::from(0), BigInt::from(1)]);
        assert_eq!(even.eval(3), BigInt::from(8));
        assert_eq!(even.eval(3), fib().eval(6));
        assert_eq!(fib().subsequence(1, 0).unwrap(), fib());
        let two_pow = Lrs::from_i64s(&[-2], &[1]).unwrap();
        let sub = two_pow.subsequence(3, 1).unwrap();
        assert_eq!(sub, Lrs::from_i64s(&[-8], &[2]).unwrap());
        assert!(two_pow.subsequence(0, 0).is_err());
    }

    #[test]
    fn zero_progressions() {
        // 1 - (-1)^n: recurrence x^2 - 1
        let s = Lrs::from_i64s(&[-1, 0], &[0, 2]).unwrap();
        assert!(s.certify_zero_progression(2, 0).unwrap());
        assert!(!s.certify_zero_progression(2, 1).unwrap());
        let zero = Lrs::from_i64s(&[3, 1], &[0, 0]).unwrap();
        assert!(zero.certify_zero_progression(5, 3).unwrap());
    }

    #[test]
    fn char_roots_examples() {
        let r = three_pow_minus_two().char_roots();
        assert_eq!(r.integer_roots, vec![(BigInt::from(1), 1), (BigInt::from(3), 1)]);
        assert!(r.unresolved.is_one());
        let r = fib().char_roots();
        assert!(r.integer_roots.is_empty());
        assert_eq!(r.unresolved, IntPoly::from_i64s(&[-1, -1, 1]));
        let sq = Lrs::from_i64s(&[4, -4], &[1, 2]).unwrap().char_roots();
        assert_eq!(sq.integer_roots, vec![(BigInt::from(2), 2)]);
        let with_zero = Lrs::from_i64s(&[0, 0, -2], &[1, 1, 1]).unwrap().char_roots();
        assert_eq!(with_zero.integer_roots, vec![(BigInt::from(0), 2), (BigInt::from(2), 1)]);
    }

    #[test]
    fn char_roots_with_huge_constant_term() {
        // roots 3^50 and -7
        let r = BigInt::from(3).pow(50);
        let poly = IntPoly::linear(&r).mul(&IntPoly::linear(&BigInt::from(-7)));
        let roots = CharRoots::of(&poly);
        assert_eq!(roots.integer_roots, vec![(BigInt::from(-7), 1), (r, 1)]);
        assert_eq!(roots.reconstruct(), poly);
    }

    #[test]
    fn split_examples() {
        // (-2)^n + 2^n: x^2 - 4
        let s = Lrs::from_i64s(&[-4, 0], &[2, 0]).unwrap();
        let split = s.nondegenerate_split(DEFAULT_CYCLOTOMIC_BOUND).unwrap();
        assert_eq!(split.modulus, 2);
        let even = &split.pieces[0].seq;
        assert_eq!(even.char_roots().integer_roots, vec![(BigInt::from(4), 2)]);
        assert!((0..10).all(|k| even.eval(k) == BigInt::from(2) * BigInt::from(4).pow(k as u32)));
        assert!(split.pieces[1].seq.is_zero_sequence());

        let split = three_pow_minus_two().nondegenerate_split(DEFAULT_CYCLOTOMIC_BOUND).unwrap();
        assert_eq!(split.modulus, 1);
        assert_eq!(split.pieces[0].seq, three_pow_minus_two());

        let split = Lrs::constant(BigInt::from(4)).nondegenerate_split(DEFAULT_CYCLOTOMIC_BOUND).unwrap();
        assert_eq!(split.modulus, 1);
    }

    #[test]
    fn split_with_cyclotomic_factor() {
        // period-3 pattern 1, 0, 0: x^3 - 1 = (x - 1)(x^2 + x + 1)
        let s = Lrs::from_i64s(&[-1, 0, 0], &[1, 0, 0]).unwrap();
        let split = s.nondegenerate_split(DEFAULT_CYCLOTOMIC_BOUND).unwrap();
        assert_eq!(split.modulus, 3);
        assert!(split.pieces[1].seq.is_zero_sequence());
        assert!(matches!(fib().nondegenerate_split(64), Err(Error::Unsupported(_))));
    }

    #[test]
    fn p_dependence_examples() {
        let p = PrimeModulus::new(5).unwrap();
        let roots = CharRoots {
            integer_roots: vec![(BigInt::from(-5), 1), (BigInt::from(3), 1), (BigInt::from(25), 1)],
            unresolved: IntPoly::one(),
        };
        let dep = roots.p_dependence(p);
        assert_eq!(dep.roots[0].1, RootDependence::Dependent { s: 1, negative: true });
        assert_eq!(dep.roots[1].1, RootDependence::Independent);
        assert_eq!(dep.roots[2].1, RootDependence::Dependent { s: 2, negative: false });
        assert!(!dep.all_independent());
        assert_eq!(fib().char_roots().p_dependence(p).unresolved, Some(RootDependence::Unknown));
    }

    #[test]
    fn text_form() {
        let s = three_pow_minus_two();
        assert_eq!(s.to_string(), "2;3,-4;-1,1");
        assert_eq!("2;3,-4;-1,1".parse::<Lrs>().unwrap(), s);
        assert!("2;3;-1,1".parse::<Lrs>().is_err());
    }
}
