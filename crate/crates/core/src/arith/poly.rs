use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::Zero;

use super::{check_len, FpElem, PrimeModulus};
use crate::error::{Error, Result};

/// A polynomial over F_p in the variable `t`, coefficients lowest degree first.
///
/// Canonical form: no trailing zero coefficients, so the zero polynomial is the
/// empty list and `degree = len - 1` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpPoly {
    coeffs: Vec<u64>,
    modulus: PrimeModulus,
}

impl FpPoly {
    /// Builds a polynomial from residues that are already reduced or not; trims trailing zeros.
    pub fn new(coeffs: Vec<u64>, modulus: PrimeModulus) -> Self {
        let p = modulus.get();
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        trim(&mut coeffs);
        FpPoly { coeffs, modulus }
    }

    pub fn from_i64s(coeffs: &[i64], modulus: PrimeModulus) -> Self {
        FpPoly::new(coeffs.iter().map(|&c| modulus.reduce_i64(c)).collect(), modulus)
    }

    pub fn from_elems(coeffs: &[FpElem], modulus: PrimeModulus) -> Result<Self> {
        if let Some(bad) = coeffs.iter().find(|c| c.modulus() != modulus) {
            return Err(Error::Usage(format!(
                "coefficient over F_{} in a polynomial over F_{modulus}",
                bad.modulus()
            )));
        }
        Ok(FpPoly::new(coeffs.iter().map(|c| c.value()).collect(), modulus))
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        FpPoly { coeffs: Vec::new(), modulus }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        FpPoly::constant(1, modulus)
    }

    pub fn constant(c: u64, modulus: PrimeModulus) -> Self {
        FpPoly::new(vec![c], modulus)
    }

    /// The polynomial `t`.
    pub fn t(modulus: PrimeModulus) -> Self {
        FpPoly::new(vec![0, 1], modulus)
    }

    /// `c * t^deg`.
    pub fn monomial(c: u64, deg: usize, modulus: PrimeModulus) -> Self {
        let mut coeffs = vec![0; deg + 1];
        coeffs[deg] = c;
        FpPoly::new(coeffs, modulus)
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FpElem {
        FpElem::new(self.coeffs.get(i).copied().unwrap_or(0), self.modulus)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &FpPoly) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::Usage(format!(
                "mixing F_{}[t] and F_{}[t]",
                self.modulus, other.modulus
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &FpPoly) -> Result<FpPoly> {
        self.check(other)?;
        let m = self.modulus;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut out = long.clone();
        for (o, &s) in out.iter_mut().zip(short) {
            *o = m.add(*o, s);
        }
        trim(&mut out);
        Ok(FpPoly { coeffs: out, modulus: m })
    }

    pub fn checked_sub(&self, other: &FpPoly) -> Result<FpPoly> {
        self.check(other)?;
        self.checked_add(&other.neg_ref())
    }

    fn neg_ref(&self) -> FpPoly {
        let m = self.modulus;
        FpPoly { coeffs: self.coeffs.iter().map(|&c| m.neg(c)).collect(), modulus: m }
    }

    pub fn checked_mul(&self, other: &FpPoly) -> Result<FpPoly> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(FpPoly::zero(self.modulus));
        }
        check_len((self.coeffs.len() + other.coeffs.len() - 1) as u128)?;
        Ok(self.mul_unchecked(other))
    }

    /// Schoolbook product; the sparser factor drives the outer loop so that
    /// sparse-times-dense costs `nnz * len`.
    fn mul_unchecked(&self, other: &FpPoly) -> FpPoly {
        let m = self.modulus;
        let p = m.get();
        let (outer, inner) = if self.weight() <= other.weight() { (self, other) } else { (other, self) };
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in outer.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in inner.coeffs.iter().enumerate() {
                if b != 0 {
                    let slot = &mut out[i + j];
                    *slot = (*slot + a * b) % p;
                }
            }
        }
        trim(&mut out);
        FpPoly { coeffs: out, modulus: m }
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let m = self.modulus;
        let c = c % m.get();
        let mut out: Vec<u64> = self.coeffs.iter().map(|&a| m.mul(a, c)).collect();
        trim(&mut out);
        FpPoly { coeffs: out, modulus: m }
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divmod(&self, divisor: &FpPoly) -> Result<(FpPoly, FpPoly)> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(Error::Domain("division by the zero polynomial".into()));
        }
        let m = self.modulus;
        let dl = divisor.coeffs.len();
        if self.coeffs.len() < dl {
            return Ok((FpPoly::zero(m), self.clone()));
        }
        let inv_lead = m.inv(divisor.leading()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dl + 1];
        for shift in (0..quot.len()).rev() {
            let top = rem[shift + dl - 1];
            if top == 0 {
                continue;
            }
            let q = m.mul(top, inv_lead);
            quot[shift] = q;
            for (k, &d) in divisor.coeffs.iter().enumerate() {
                if d != 0 {
                    rem[shift + k] = m.sub(rem[shift + k], m.mul(q, d));
                }
            }
        }
        rem.truncate(dl - 1);
        trim(&mut rem);
        trim(&mut quot);
        Ok((FpPoly { coeffs: quot, modulus: m }, FpPoly { coeffs: rem, modulus: m }))
    }

    /// Quotient of a division that is known to be exact.
    pub fn div_exact(&self, divisor: &FpPoly) -> Result<FpPoly> {
        let (q, r) = self.divmod(divisor)?;
        if !r.is_zero() {
            return Err(Error::Invariant("polynomial division was not exact".into()));
        }
        Ok(q)
    }

    pub fn rem(&self, divisor: &FpPoly) -> Result<FpPoly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Returns `(leading coefficient, monic associate)`; zero maps to `(0, 0)`.
    pub fn monic(&self) -> (u64, FpPoly) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let lead = self.leading();
        let inv = self.modulus.inv(lead).expect("nonzero leading coefficient");
        (lead, self.scale(inv))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &FpPoly) -> Result<FpPoly> {
        self.check(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic().1)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let m = self.modulus;
        let x = x % m.get();
        self.coeffs.iter().rev().fold(0, |acc, &c| m.add(m.mul(acc, x), c))
    }

    /// `self^(p^k)`, computed as `self(t^(p^k))`: over F_p the Frobenius fixes
    /// coefficients, so this is a pure re-indexing.
    pub fn frobenius(&self, k: u32) -> Result<FpPoly> {
        if self.is_constant() || k == 0 {
            return Ok(self.clone());
        }
        let p = self.modulus.get() as u128;
        let step = p
            .checked_pow(k)
            .ok_or_else(|| Error::Resource(format!("t^(p^{k}) overflows the degree range")))?;
        let deg = self.coeffs.len() as u128 - 1;
        let new_len = deg
            .checked_mul(step)
            .and_then(|d| d.checked_add(1))
            .ok_or_else(|| Error::Resource("Frobenius degree overflow".into()))?;
        check_len(new_len)?;
        let step = step as usize;
        let mut out = vec![0u64; new_len as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * step] = c;
        }
        Ok(FpPoly { coeffs: out, modulus: self.modulus })
    }

    /// `self^e` by square-and-multiply, subject to the degree cap.
    pub fn pow(&self, mut e: u64) -> Result<FpPoly> {
        let m = self.modulus;
        if let Some(d) = self.degree() {
            check_len((d as u128) * (e as u128) + 1)?;
        }
        let mut acc = FpPoly::one(m);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked_or_zero(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked_or_zero(&base);
            }
        }
        Ok(acc)
    }

    fn mul_unchecked_or_zero(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            FpPoly::zero(self.modulus)
        } else {
            self.mul_unchecked(other)
        }
    }

    /// `self * other mod g`.
    pub(crate) fn mulmod(&self, other: &FpPoly, g: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.modulus);
        }
        self.mul_unchecked(other).rem(g).expect("nonzero modulus polynomial")
    }

    /// `self^e mod g` for a big exponent.
    pub(crate) fn powmod(&self, e: &BigUint, g: &FpPoly) -> FpPoly {
        let mut acc = FpPoly::one(self.modulus).rem(g).expect("nonzero modulus polynomial");
        if e.is_zero() {
            return acc;
        }
        let base = self.rem(g).expect("nonzero modulus polynomial");
        for i in (0..e.bits()).rev() {
            acc = acc.mulmod(&acc, g);
            if e.bit(i) {
                acc = acc.mulmod(&base, g);
            }
        }
        acc
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Add for &FpPoly {
    type Output = FpPoly;
    fn add(self, rhs: &FpPoly) -> FpPoly {
        self.checked_add(rhs).expect("F_p[t] modulus mismatch")
    }
}

impl Sub for &FpPoly {
    type Output = FpPoly;
    fn sub(self, rhs: &FpPoly) -> FpPoly {
        self.checked_sub(rhs).expect("F_p[t] modulus mismatch")
    }
}

impl Mul for &FpPoly {
    type Output = FpPoly;
    fn mul(self, rhs: &FpPoly) -> FpPoly {
        assert_eq!(self.modulus, rhs.modulus, "F_p[t] modulus mismatch");
        self.mul_unchecked_or_zero(rhs)
    }
}

impl Neg for &FpPoly {
    type Output = FpPoly;
    fn neg(self) -> FpPoly {
        self.neg_ref()
    }
}

/// Comma-separated coefficients, lowest degree first; the zero polynomial prints as `0`.
impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FpPoly {
    /// Parses the comma-separated coefficient form written by `Display`.
    /// Coefficients may be any base-10 integers; they are reduced mod p.
    pub fn parse(s: &str, modulus: PrimeModulus) -> Result<FpPoly> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let p = num_bigint::BigInt::from(modulus.get());
        let mut coeffs = Vec::new();
        for tok in s.split(',') {
            let v: num_bigint::BigInt = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{}`", tok.trim())))?;
            let r = num_integer::Integer::mod_floor(&v, &p);
            coeffs.push(num_traits::ToPrimitive::to_u64(&r).expect("residue fits u64"));
        }
        Ok(FpPoly::new(coeffs, modulus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn poly(c: &[i64], p: u64) -> FpPoly {
        FpPoly::from_i64s(c, m(p))
    }

    #[test]
    fn gcd_is_monic() {
        // t^2 - 1 and t - 1 over F_5
        let g = poly(&[-1, 0, 1], 5).gcd(&poly(&[-1, 1], 5)).unwrap();
        assert_eq!(g, poly(&[-1, 1], 5));
        let g = poly(&[2, 2], 5).gcd(&poly(&[0, 3], 5)).unwrap();
        assert!(g.is_one());
    }

    #[test]
    fn product_reduces_coefficients() {
        // (t + 1)(t + 2) = t^2 + 3t + 2 = t^2 + 2 over F_3
        assert_eq!(&poly(&[1, 1], 3) * &poly(&[2, 1], 3), poly(&[2, 0, 1], 3));
    }

    #[test]
    fn long_division_over_f2() {
        let (q, r) = poly(&[0, 0, 0, 1], 2).divmod(&poly(&[1, 1], 2)).unwrap();
        assert_eq!(q, poly(&[1, 1, 1], 2));
        assert_eq!(r, poly(&[1], 2));
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        assert!(matches!(poly(&[1], 5).divmod(&FpPoly::zero(m(5))), Err(Error::Domain(_))));
    }

    #[test]
    fn mismatched_moduli() {
        assert!(matches!(poly(&[1], 5).checked_add(&poly(&[1], 7)), Err(Error::Usage(_))));
    }

    #[test]
    fn frobenius_is_reindexing() {
        let f = poly(&[1, 2], 3);
        assert_eq!(f.frobenius(1).unwrap(), f.pow(3).unwrap());
        assert_eq!(f.frobenius(1).unwrap(), poly(&[1, 0, 0, 2], 3));
    }

    #[test]
    fn degree_cap_is_enforced() {
        let f = poly(&[1, 1], 5);
        assert!(matches!(f.frobenius(12), Err(Error::Resource(_))));
        assert!(matches!(f.pow(10_000_000), Err(Error::Resource(_))));
    }

    #[test]
    fn display_round_trip() {
        for f in [poly(&[], 7), poly(&[3], 7), poly(&[0, 6, 0, 1], 7)] {
            assert_eq!(FpPoly::parse(&f.to_string(), m(7)).unwrap(), f);
        }
        assert_eq!(FpPoly::parse("-1, 8", m(7)).unwrap(), poly(&[6, 1], 7));
        assert!(FpPoly::parse("1,x", m(7)).is_err());
    }

    #[test]
    fn powmod_agrees_with_plain_power() {
        let g = poly(&[2, 1, 0, 1], 5);
        let f = poly(&[1, 3, 4], 5);
        for e in 0u64..40 {
            let direct = f.pow(e).unwrap().rem(&g).unwrap();
            assert_eq!(f.powmod(&BigUint::from(e), &g), direct, "e = {e}");
        }
    }
}
