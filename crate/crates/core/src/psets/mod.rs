//! Arithmetic progressions, p-sets `{sum_j c_j p^(k_j n_j) : n_j >= 0}` and
//! finite unions of both used to describe return sets.
//!
//! A p-set is read as a set of non-negative integers: values that are
//! negative or non-integral are not members.

mod desc;
mod dp;
pub mod fit;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};

pub use desc::{desc_verify, ReturnSetDesc};

/// Above this many exponent combinations `ap_intersect_pset` gives up.
const MAX_RESIDUE_COMBINATIONS: u128 = 1_000_000;
/// Largest bound for which bounded intersections try to fit and verify a description.
const MAX_VERIFY_BOUND: u64 = 50_000_000;

/// `{a k + b : k >= 0}`; `a = 0` is the singleton `{b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArithProg {
    pub modulus: u64,
    pub offset: u64,
}

impl ArithProg {
    pub fn new(modulus: u64, offset: u64) -> Self {
        ArithProg { modulus, offset }
    }

    pub fn singleton(b: u64) -> Self {
        ArithProg { modulus: 0, offset: b }
    }

    pub fn contains(&self, n: u64) -> bool {
        if self.modulus == 0 {
            n == self.offset
        } else {
            n >= self.offset && (n - self.offset) % self.modulus == 0
        }
    }

    pub fn contains_big(&self, n: &BigInt) -> bool {
        n.to_u64().is_some_and(|v| self.contains(v))
    }
}

impl fmt::Display for ArithProg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*k+{}", self.modulus, self.offset)
    }
}

impl FromStr for ArithProg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad arithmetic progression `{s}`"));
        let (a, b) = compact.split_once("*k+").ok_or_else(bad)?;
        Ok(ArithProg { modulus: a.parse().map_err(|_| bad())?, offset: b.parse().map_err(|_| bad())? })
    }
}

/// One term `coeff * p^(step * n)`; `step = 0` is a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PTerm {
    pub coeff: BigRational,
    pub step: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PSet {
    terms: Vec<PTerm>,
}

impl PSet {
    pub fn new(terms: Vec<(BigRational, u32)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Validation("a p-set needs at least one term".into()));
        }
        Ok(PSet { terms: terms.into_iter().map(|(coeff, step)| PTerm { coeff, step }).collect() })
    }

    pub fn from_ints(terms: &[(i64, u32)]) -> Result<Self> {
        Self::new(terms.iter().map(|&(c, k)| (BigRational::from_integer(c.into()), k)).collect())
    }

    pub fn constant(c: BigRational) -> Self {
        PSet { terms: vec![PTerm { coeff: c, step: 0 }] }
    }

    pub fn terms(&self) -> &[PTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms with `step >= 1` and a nonzero coefficient.
    pub fn nontrivial_count(&self) -> usize {
        self.terms.iter().filter(|t| t.step > 0 && !t.coeff.is_zero()).count()
    }

    /// `sum_j c_j p^(k_j n_j)` for the given exponents.
    pub fn value_at(&self, p: PrimeModulus, exps: &[u64]) -> Result<BigRational> {
        if exps.len() != self.terms.len() {
            return Err(Error::Usage("witness length does not match the p-set".into()));
        }
        let pb = BigInt::from(p.get());
        let mut acc = BigRational::zero();
        for (t, &n) in self.terms.iter().zip(exps) {
            let e = (t.step as u64)
                .checked_mul(n)
                .and_then(|e| u32::try_from(e).ok())
                .ok_or_else(|| Error::Resource("exponent too large to evaluate".into()))?;
            acc += &t.coeff * BigRational::from_integer(pb.pow(e));
        }
        Ok(acc)
    }

    /// Common denominator `D` and the integers `D c_j`.
    fn scaled(&self) -> (BigInt, Vec<BigInt>) {
        let d = self.terms.iter().fold(BigInt::one(), |acc, t| acc.lcm(t.coeff.denom()));
        let a = self
            .terms
            .iter()
            .map(|t| {
                let v = &t.coeff * BigRational::from_integer(d.clone());
                debug_assert!(v.is_integer());
                v.to_integer()
            })
            .collect();
        (d, a)
    }

    /// Splits into the constant offset (scaled) and the DP terms.
    fn dp_terms(&self) -> Result<(BigInt, BigInt, Vec<dp::ActiveTerm>)> {
        let (d, a) = self.scaled();
        let mut constant = BigInt::zero();
        let mut active = Vec::new();
        for (j, (t, aj)) in self.terms.iter().zip(&a).enumerate() {
            if aj.is_zero() {
                continue;
            }
            if t.step == 0 {
                constant += aj;
            } else {
                active.push(dp::ActiveTerm { index: j, coeff: dp::to_i128(aj)?, step: t.step as u64 });
            }
        }
        Ok((d, constant, active))
    }

    fn with_sign(active: &[dp::ActiveTerm], negate: bool) -> Vec<dp::ActiveTerm> {
        active
            .iter()
            .map(|t| dp::ActiveTerm { coeff: if negate { -t.coeff } else { t.coeff }, ..t.clone() })
            .collect()
    }
}

impl fmt::Display for PSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, t) in self.terms.iter().enumerate() {
            if j > 0 {
                write!(f, "+")?;
            }
            write!(f, "{}*p^({}*n_{})", t.coeff, t.step, j + 1)?;
        }
        Ok(())
    }
}

impl FromStr for PSet {
    type Err = Error;

    /// Accepts `c*p^(k*n_j)` terms joined by `+`; a bare rational is a constant term.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |piece: &str| Error::Parse(format!("bad p-set term `{piece}`"));
        let mut terms = Vec::new();
        for piece in compact.split('+') {
            if piece.is_empty() {
                return Err(bad(piece));
            }
            let (coeff, step) = match piece.split_once("*p^(") {
                Some((c, rest)) => {
                    let inner = rest.strip_suffix(')').ok_or_else(|| bad(piece))?;
                    let (k, var) = inner.split_once("*n").ok_or_else(|| bad(piece))?;
                    let var = var.strip_prefix('_').unwrap_or(var);
                    if var.is_empty() || !var.chars().all(|c| c.is_ascii_digit()) {
                        return Err(bad(piece));
                    }
                    (c, k.parse::<u32>().map_err(|_| bad(piece))?)
                }
                None => (piece, 0),
            };
            let coeff: BigRational = coeff.parse().map_err(|_| bad(piece))?;
            terms.push((coeff, step));
        }
        PSet::new(terms)
    }
}

/// Exponents `(n_1, ..., n_m)` with `M = sum c_j p^(k_j n_j)`, lexicographically least.
///
/// Terms with `k_j = 0` or `c_j = 0` get exponent 0. Negative `M` is allowed.
pub fn pset_membership(m: &BigInt, s: &PSet, p: PrimeModulus) -> Result<Option<Vec<u64>>> {
    let (d, constant, active) = s.dp_terms()?;
    let target = m * &d - constant;
    let Some(found) = dp::solve(&target, &active, p)? else {
        return Ok(None);
    };
    let mut witness = vec![0u64; s.len()];
    for (t, n) in active.iter().zip(found) {
        witness[t.index] = n;
    }
    Ok(Some(witness))
}

/// The elements of `s` in `[0, bound]`, sorted.
pub fn pset_enumerate(s: &PSet, p: PrimeModulus, bound: &BigInt) -> Result<Vec<BigInt>> {
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let (d, scaled) = s.scaled();
    let mut constant = BigInt::zero();
    let mut positive: Vec<(BigInt, u32)> = Vec::new();
    for (t, a) in s.terms.iter().zip(&scaled) {
        if t.step == 0 {
            constant += a;
        } else if !a.is_zero() {
            positive.push((a.clone(), t.step));
        }
    }
    let lo = -&constant;
    let hi = bound * &d - &constant;
    let mut targets: Vec<BigInt> = Vec::new();
    if positive.iter().all(|(a, _)| a.is_positive()) {
        // no cancellation, so coefficients of any size are fine here
        enumerate_positive(&positive, p, &hi, &BigInt::zero(), &mut targets);
    } else {
        let (_, _, active) = s.dp_terms()?;
        if hi >= BigInt::zero() {
            targets.extend(dp::generate(&hi, &PSet::with_sign(&active, false), p)?);
        }
        if lo < BigInt::zero() {
            // targets in [lo, -1]: generate their negations with negated terms
            let neg = dp::generate(&-&lo, &PSet::with_sign(&active, true), p)?;
            targets.extend(neg.into_iter().filter(|v| !v.is_zero()).map(|v| -v));
        }
    }
    let mut out = BTreeSet::new();
    for t in targets {
        if t < lo || t > hi {
            continue;
        }
        let (q, r) = (t + &constant).div_rem(&d);
        if r.is_zero() && !q.is_negative() && &q <= bound {
            out.insert(q);
        }
    }
    Ok(out.into_iter().collect())
}

/// Depth-first over exponents when every term is positive, so partial sums only grow.
fn enumerate_positive(terms: &[(BigInt, u32)], p: PrimeModulus, hi: &BigInt, partial: &BigInt, out: &mut Vec<BigInt>) {
    let Some(((coeff, step), rest)) = terms.split_first() else {
        out.push(partial.clone());
        return;
    };
    let rest_min: BigInt = rest.iter().map(|(a, _)| a).sum();
    let step = BigInt::from(p.get()).pow(*step);
    let mut power = coeff.clone();
    loop {
        let v = partial + &power;
        if &v + &rest_min > *hi {
            break;
        }
        enumerate_positive(rest, p, hi, &v, out);
        power *= &step;
    }
}

/// Eventual periodicity of `x^n mod q`: `(preperiod, period, first preperiod + period values)`.
fn power_cycle(x: u64, q: u64) -> (usize, usize, Vec<u64>) {
    let mut seen: HashMap<u64, usize> = HashMap::new();
    let mut values = Vec::new();
    let mut v = 1 % q;
    loop {
        if let Some(&first) = seen.get(&v) {
            return (first, values.len() - first, values);
        }
        seen.insert(v, values.len());
        values.push(v);
        v = ((v as u128 * x as u128) % q as u128) as u64;
    }
}

/// `A ∩ S` as a finite union of p-sets, exact.
///
/// When the offset of `A` is at least its modulus, members of `S` below the
/// offset that lie in the residue class would have to be removed; that case
/// is reported as unsupported unless there are none.
pub fn ap_intersect_pset(a: &ArithProg, s: &PSet, p: PrimeModulus) -> Result<Vec<PSet>> {
    if a.modulus == 0 {
        return Ok(match pset_membership(&BigInt::from(a.offset), s, p)? {
            Some(_) => vec![PSet::constant(BigRational::from_integer(a.offset.into()))],
            None => Vec::new(),
        });
    }
    if a.offset >= a.modulus && a.offset > 0 {
        let below = pset_enumerate(s, p, &BigInt::from(a.offset - 1))?;
        let residue = BigInt::from(a.offset % a.modulus);
        if below.iter().any(|x| x.mod_floor(&BigInt::from(a.modulus)) == residue) {
            return Err(Error::Unsupported(format!(
                "{a} excludes members of the p-set below its offset; no p-set union represents that"
            )));
        }
    }
    let (d, scaled) = s.scaled();
    let q = (&d * BigInt::from(a.modulus))
        .to_u64()
        .filter(|q| *q < (1u64 << 40))
        .ok_or_else(|| Error::Resource("modulus times denominator too large".into()))?;
    let qb = BigInt::from(q);
    let target = (&d * BigInt::from(a.offset % a.modulus)).mod_floor(&qb).to_u64().expect("reduced");

    let mut fixed_sum = 0u64;
    let mut free: Vec<(usize, u64, usize, usize, Vec<u64>)> = Vec::new(); // (index, a mod q, rho, pi, values)
    for (j, (t, aj)) in s.terms.iter().zip(&scaled).enumerate() {
        let amod = aj.mod_floor(&qb).to_u64().expect("reduced");
        if t.step == 0 || aj.is_zero() {
            fixed_sum = (fixed_sum + amod) % q;
        } else {
            let base = BigInt::from(p.get()).modpow(&BigInt::from(t.step), &qb).to_u64().expect("reduced");
            let (rho, pi, values) = power_cycle(base, q);
            free.push((j, amod, rho, pi, values));
        }
    }
    let combos: u128 = free.iter().map(|f| (f.2 + f.3) as u128).product();
    if combos > MAX_RESIDUE_COMBINATIONS {
        return Err(Error::Resource(format!("{combos} residue combinations")));
    }
    let mut out: Vec<PSet> = Vec::new();
    let mut choice = vec![0usize; free.len()];
    loop {
        let mut sum = fixed_sum as u128;
        for (f, &n) in free.iter().zip(&choice) {
            sum += f.1 as u128 * f.4[n] as u128;
        }
        if (sum % q as u128) as u64 == target {
            let set = emit_residue_pset(s, p, &free, &choice);
            if !out.contains(&set) {
                out.push(set);
            }
        }
        // next combination
        let mut i = 0;
        loop {
            if i == free.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < free[i].2 + free[i].3 {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn emit_residue_pset(s: &PSet, p: PrimeModulus, free: &[(usize, u64, usize, usize, Vec<u64>)], choice: &[usize]) -> PSet {
    let pb = BigInt::from(p.get());
    let mut constant = BigRational::zero();
    let mut terms: Vec<(BigRational, u32)> = Vec::new();
    let mut free_at: HashMap<usize, (usize, usize, usize)> = HashMap::new();
    for (f, &n) in free.iter().zip(choice) {
        free_at.insert(f.0, (f.2, f.3, n));
    }
    for (j, t) in s.terms.iter().enumerate() {
        match free_at.get(&j) {
            None => constant += &t.coeff,
            Some(&(rho, pi, n)) => {
                let value = &t.coeff * BigRational::from_integer(pb.pow(t.step * n as u32));
                if n < rho {
                    constant += value;
                } else {
                    terms.push((value, t.step * pi as u32));
                }
            }
        }
    }
    if !constant.is_zero() || terms.is_empty() {
        terms.push((constant, 0));
    }
    PSet::new(terms).expect("nonempty")
}

/// Exact elements of `S1 ∩ S2` up to `bound`, plus a verified p-set description when one is found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedIntersection {
    pub elements: Vec<BigInt>,
    pub candidate: Option<Vec<PSet>>,
}

pub fn pset_intersect_bounded(s1: &PSet, s2: &PSet, p: PrimeModulus, bound: &BigInt) -> Result<BoundedIntersection> {
    let e1 = pset_enumerate(s1, p, bound)?;
    let e2: BTreeSet<BigInt> = pset_enumerate(s2, p, bound)?.into_iter().collect();
    let elements: Vec<BigInt> = e1.into_iter().filter(|x| e2.contains(x)).collect();
    let max_terms = s1.len().max(s2.len());
    let candidate = match bound.to_u64().filter(|b| *b <= MAX_VERIFY_BOUND) {
        None => None,
        Some(b) => fit_intersection(&elements, s1, s2, p, b, max_terms)?,
    };
    Ok(BoundedIntersection { elements, candidate })
}

fn fit_intersection(
    elements: &[BigInt],
    s1: &PSet,
    s2: &PSet,
    p: PrimeModulus,
    bound: u64,
    max_terms: usize,
) -> Result<Option<Vec<PSet>>> {
    let members: BTreeSet<u64> = elements.iter().map(|x| x.to_u64().expect("within bound")).collect();
    let mut attempts: Vec<Vec<PSet>> = Vec::new();
    if members.is_empty() {
        attempts.push(Vec::new());
    }
    attempts.push(vec![s1.clone()]);
    attempts.push(vec![s2.clone()]);
    let sorted: Vec<u64> = members.iter().copied().collect();
    let fitted = fit::fit_psets(&sorted, p, bound, max_terms)?;
    if fitted.leftover.is_empty() {
        attempts.push(fitted.psets);
    }
    for psets in attempts {
        let mut d = ReturnSetDesc::new(p, Vec::new(), psets, Vec::new());
        if desc_verify(&mut d, |n| members.contains(&n), bound)? {
            return Ok(Some(d.psets));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
