use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::PrimeModulus;
use crate::error::{Error, Result};

/// An element of the prime field F_p, always held in `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElem {
    value: u64,
    modulus: PrimeModulus,
}

impl FpElem {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        FpElem { value: value % modulus.get(), modulus }
    }

    pub fn from_i64(value: i64, modulus: PrimeModulus) -> Self {
        FpElem { value: modulus.reduce_i64(value), modulus }
    }

    pub fn from_bigint(value: &BigInt, modulus: PrimeModulus) -> Self {
        let r = value.mod_floor(&BigInt::from(modulus.get()));
        FpElem { value: r.to_u64().expect("residue fits u64"), modulus }
    }

    pub fn zero(modulus: PrimeModulus) -> Self {
        FpElem { value: 0, modulus }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        FpElem::new(1, modulus)
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn same(self, other: FpElem) -> Result<PrimeModulus> {
        if self.modulus != other.modulus {
            return Err(Error::Usage(format!(
                "mixing F_{} and F_{}",
                self.modulus, other.modulus
            )));
        }
        Ok(self.modulus)
    }

    pub fn checked_add(self, other: FpElem) -> Result<FpElem> {
        let m = self.same(other)?;
        Ok(FpElem { value: m.add(self.value, other.value), modulus: m })
    }

    pub fn checked_sub(self, other: FpElem) -> Result<FpElem> {
        let m = self.same(other)?;
        Ok(FpElem { value: m.sub(self.value, other.value), modulus: m })
    }

    pub fn checked_mul(self, other: FpElem) -> Result<FpElem> {
        let m = self.same(other)?;
        Ok(FpElem { value: m.mul(self.value, other.value), modulus: m })
    }

    pub fn inv(self) -> Result<FpElem> {
        self.modulus
            .inv(self.value)
            .map(|value| FpElem { value, modulus: self.modulus })
            .ok_or_else(|| Error::Domain("inverse of zero in F_p".into()))
    }

    pub fn pow(self, e: u64) -> FpElem {
        FpElem { value: self.modulus.pow(self.value, e), modulus: self.modulus }
    }

    /// `self^e` for a signed big exponent; zero to a negative power is a domain error.
    pub fn pow_bigint(self, e: &BigInt) -> Result<FpElem> {
        if self.value == 0 {
            return match e.sign() {
                num_bigint::Sign::Minus => Err(Error::Domain("zero to a negative power".into())),
                num_bigint::Sign::NoSign => Ok(FpElem::one(self.modulus)),
                num_bigint::Sign::Plus => Ok(self),
            };
        }
        // The multiplicative group has order p - 1.
        let order = BigInt::from(self.modulus.get() - 1);
        let r = e.mod_floor(&order).to_u64().expect("reduced exponent fits u64");
        Ok(self.pow(r))
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        self.checked_add(rhs).expect("F_p modulus mismatch")
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        self.checked_sub(rhs).expect("F_p modulus mismatch")
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        self.checked_mul(rhs).expect("F_p modulus mismatch")
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem { value: self.modulus.neg(self.value), modulus: self.modulus }
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp(v: u64, p: u64) -> FpElem {
        FpElem::new(v, PrimeModulus::new(p).unwrap())
    }

    #[test]
    fn small_examples() {
        assert_eq!(fp(2, 5).inv().unwrap(), fp(3, 5));
        assert_eq!(fp(3, 7).pow(6), fp(1, 7));
        assert_eq!(fp(4, 5) + fp(4, 5), fp(3, 5));
        assert_eq!(-fp(2, 5), fp(3, 5));
        assert_eq!(fp(1, 5) - fp(3, 5), fp(3, 5));
    }

    #[test]
    fn errors() {
        assert!(matches!(fp(0, 5).inv(), Err(Error::Domain(_))));
        assert!(matches!(fp(1, 5).checked_add(fp(1, 7)), Err(Error::Usage(_))));
        assert!(fp(0, 5).pow_bigint(&BigInt::from(-1)).is_err());
        assert_eq!(fp(2, 5).pow_bigint(&BigInt::from(-1)).unwrap(), fp(3, 5));
    }

    #[test]
    fn field_axioms_exhaustive_small_prime() {
        let p = PrimeModulus::new(7).unwrap();
        let all: Vec<FpElem> = (0..7).map(|v| FpElem::new(v, p)).collect();
        for &a in &all {
            for &b in &all {
                for &c in &all {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), FpElem::one(p));
            }
        }
    }
}
