use std::fmt;

use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

use super::{check_len, FpPoly, PrimeModulus};
use crate::error::{Error, Result};

/// An element of F_p(t) in canonical form: `gcd(num, den) = 1`, `den` monic.
///
/// Canonical form makes `==` decide equality of rational functions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: FpPoly,
    den: FpPoly,
}

impl RatFunc {
    /// Normalizes `num / den`.
    pub fn new(num: FpPoly, den: FpPoly) -> Result<Self> {
        if num.modulus() != den.modulus() {
            return Err(Error::Usage("numerator and denominator over different primes".into()));
        }
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        let m = num.modulus();
        if num.is_zero() {
            return Ok(RatFunc::zero(m));
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g)?, den.div_exact(&g)?) };
        let (lead, den) = den.monic();
        let inv = m.inv(lead).expect("nonzero leading coefficient");
        Ok(RatFunc { num: num.scale(inv), den })
    }

    pub fn from_poly(num: FpPoly) -> Self {
        let m = num.modulus();
        RatFunc { num, den: FpPoly::one(m) }
    }

    pub fn constant(c: u64, modulus: PrimeModulus) -> Self {
        RatFunc::from_poly(FpPoly::constant(c, modulus))
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        RatFunc { num: FpPoly::zero(modulus), den: FpPoly::one(modulus) }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        RatFunc::constant(1, modulus)
    }

    /// The rational function `t`.
    pub fn t(modulus: PrimeModulus) -> Self {
        RatFunc::from_poly(FpPoly::t(modulus))
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.num.modulus()
    }

    pub fn num(&self) -> &FpPoly {
        &self.num
    }

    pub fn den(&self) -> &FpPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn add(&self, other: &RatFunc) -> Result<RatFunc> {
        if self.den == other.den {
            return RatFunc::new(self.num.checked_add(&other.num)?, self.den.clone());
        }
        let num = self.num.checked_mul(&other.den)?.checked_add(&other.num.checked_mul(&self.den)?)?;
        RatFunc::new(num, self.den.checked_mul(&other.den)?)
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> Result<RatFunc> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> Result<RatFunc> {
        if self.is_zero() || other.is_zero() {
            return Ok(RatFunc::zero(self.modulus()));
        }
        // Cross-cancel first so the products stay coprime.
        let g1 = self.num.gcd(&other.den)?;
        let g2 = other.num.gcd(&self.den)?;
        let num = self.num.div_exact(&g1)?.checked_mul(&other.num.div_exact(&g2)?)?;
        let den = self.den.div_exact(&g2)?.checked_mul(&other.den.div_exact(&g1)?)?;
        let (lead, den) = den.monic();
        let inv = self.modulus().inv(lead).expect("nonzero");
        Ok(RatFunc { num: num.scale(inv), den })
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero in F_p(t)".into()));
        }
        let (lead, num) = self.num.monic();
        let inv = self.modulus().inv(lead).expect("nonzero");
        Ok(RatFunc { num: self.den.scale(inv), den: num })
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.mul(&other.inv()?)
    }

    /// `self^(p^k)` by re-indexing numerator and denominator.
    pub fn frobenius_power(&self, k: u32) -> Result<RatFunc> {
        Ok(RatFunc { num: self.num.frobenius(k)?, den: self.den.frobenius(k)? })
    }

    /// `self^m` through the base-p expansion `m = sum d_i p^i`, i.e. the
    /// product of `frobenius_power(self^d_i, i)`. Numerator and denominator
    /// are powered separately; powers of coprime polynomials stay coprime.
    pub fn int_pow(&self, m: &BigInt) -> Result<RatFunc> {
        let (base, e) = self.signed_base(m)?;
        let e = e.to_biguint().expect("non-negative");
        if e.is_zero() {
            return Ok(RatFunc::one(self.modulus()));
        }
        base.check_pow_len(&e)?;
        let p = self.modulus().get() as u32;
        let digits = e.to_radix_le(p);
        let num = pow_by_digits(&base.num, &digits)?;
        let den = pow_by_digits(&base.den, &digits)?;
        Ok(RatFunc { num, den })
    }

    /// `self^m` by plain square-and-multiply; the reference route for `int_pow`.
    pub fn pow_binary(&self, m: &BigInt) -> Result<RatFunc> {
        let (base, e) = self.signed_base(m)?;
        let e = e.to_biguint().expect("non-negative");
        if e.is_zero() {
            return Ok(RatFunc::one(self.modulus()));
        }
        base.check_pow_len(&e)?;
        let e = e.to_u64().ok_or_else(|| Error::Resource("exponent too large".into()))?;
        Ok(RatFunc { num: base.num.pow(e)?, den: base.den.pow(e)? })
    }

    fn signed_base(&self, m: &BigInt) -> Result<(RatFunc, BigInt)> {
        match m.sign() {
            Sign::Minus => {
                if self.is_zero() {
                    return Err(Error::Domain("zero to a negative power".into()));
                }
                Ok((self.inv()?, -m))
            }
            _ => Ok((self.clone(), m.clone())),
        }
    }

    fn check_pow_len(&self, e: &num_bigint::BigUint) -> Result<()> {
        let d = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        if d == 0 {
            return Ok(());
        }
        let len = e * num_bigint::BigUint::from(d) + 1u32;
        check_len(len.to_u128().unwrap_or(u128::MAX))
    }

    /// Parses `num/den` (or a bare polynomial, meaning `den = 1`).
    pub fn parse(s: &str, modulus: PrimeModulus) -> Result<RatFunc> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        RatFunc::new(FpPoly::parse(n, modulus)?, FpPoly::parse(d, modulus)?)
    }
}

fn pow_by_digits(f: &FpPoly, digits: &[u8]) -> Result<FpPoly> {
    let m = f.modulus();
    let mut acc = FpPoly::one(m);
    for (i, &d) in digits.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let piece = f.pow(d as u64)?.frobenius(i as u32)?;
        acc = acc.checked_mul(&piece)?;
    }
    Ok(acc)
}

/// `num/den` with both polynomials in comma-separated low-to-high form.
impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn rf(n: &[i64], d: &[i64], p: u64) -> RatFunc {
        RatFunc::new(FpPoly::from_i64s(n, m(p)), FpPoly::from_i64s(d, m(p))).unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(rf(&[2, 2], &[1, 1], 5), rf(&[2], &[1], 5));
        // (t^2 - 1)/(2t - 2) = (t + 1)/2 = 3t + 3
        let x = rf(&[-1, 0, 1], &[-2, 2], 5);
        assert_eq!(x.num(), &FpPoly::from_i64s(&[3, 3], m(5)));
        assert!(x.den().is_one());
        assert_eq!(rf(&[0, 1], &[0, 2], 3), rf(&[2], &[1], 3));
    }

    #[test]
    fn zero_denominator() {
        let r = RatFunc::new(FpPoly::one(m(5)), FpPoly::zero(m(5)));
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn frobenius_examples() {
        let x = rf(&[1, 1], &[1], 5);
        let mut expect = vec![0i64; 26];
        expect[0] = 1;
        expect[25] = 1;
        assert_eq!(x.frobenius_power(2).unwrap(), rf(&expect, &[1], 5));
        assert_eq!(x.frobenius_power(0).unwrap(), x);
        // (2t + 1)^3 over F_3 = 2t^3 + 1
        assert_eq!(rf(&[1, 2], &[1], 3).frobenius_power(1).unwrap(), rf(&[1, 0, 0, 2], &[1], 3));
    }

    #[test]
    fn int_pow_examples() {
        let x = rf(&[1, 1], &[1], 5);
        let a = x.int_pow(&BigInt::from(26)).unwrap();
        assert_eq!(a, x.pow_binary(&BigInt::from(26)).unwrap());
        assert_eq!(a, x.mul(&x.frobenius_power(2).unwrap()).unwrap());
        assert!(x.int_pow(&BigInt::from(0)).unwrap().is_one());
        assert_eq!(x.int_pow(&BigInt::from(-1)).unwrap(), rf(&[1], &[1, 1], 5));
        assert!(matches!(RatFunc::zero(m(5)).int_pow(&BigInt::from(-2)), Err(Error::Domain(_))));
    }

    #[test]
    fn text_round_trip() {
        let x = rf(&[1, 1], &[1], 5);
        assert_eq!(x.to_string(), "1,1/1");
        assert_eq!(RatFunc::parse("1,1/1", m(5)).unwrap(), x);
        assert_eq!(RatFunc::zero(m(5)).to_string(), "0/1");
        assert_eq!(RatFunc::parse("0/1", m(5)).unwrap(), RatFunc::zero(m(5)));
        assert!(RatFunc::parse("1/0", m(5)).is_err());
    }
}
