//! Torus points written over a coprime basis of monic polynomials.
//!
//! Orbit exponents grow like the entries of `A^n`, so dense coordinates are
//! hopeless beyond a few steps. Writing every coordinate as
//! `unit * prod_b b^(e_b)` over pairwise coprime monic `b` makes the affine
//! step an integer-matrix step on exponent vectors; the representation is
//! unique, so equality of points is equality of exponents and units.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{FpPoly, PrimeModulus, RatFunc};
use crate::error::{Error, Result};
use crate::intalg::IntMatrix;

use super::zerotest::{Summand, ZeroTester};
use super::{TorusPoint, Variety};

/// Pairwise coprime monic polynomials of positive degree, sorted.
#[derive(Debug, Clone)]
pub(crate) struct CoprimeBasis {
    p: PrimeModulus,
    elems: Vec<FpPoly>,
}

impl CoprimeBasis {
    /// The coarsest coprime basis that factors every input (zero inputs are rejected).
    pub(crate) fn build(p: PrimeModulus, polys: &[FpPoly]) -> Result<Self> {
        let mut elems: Vec<FpPoly> = Vec::new();
        for f in polys {
            if f.is_zero() {
                return Err(Error::Domain("zero has no factorization".into()));
            }
            let (_, m) = f.monic();
            if !m.is_constant() && !elems.contains(&m) {
                elems.push(m);
            }
        }
        // split any pair with a common factor until none is left; the total
        // degree drops with every split
        'again: loop {
            for i in 0..elems.len() {
                for j in i + 1..elems.len() {
                    let g = elems[i].gcd(&elems[j])?;
                    if g.is_constant() {
                        continue;
                    }
                    let a = elems[i].div_exact(&g)?;
                    let b = elems[j].div_exact(&g)?;
                    elems.swap_remove(j);
                    elems.swap_remove(i);
                    for q in [g, a, b] {
                        if !q.is_constant() && !elems.contains(&q) {
                            elems.push(q);
                        }
                    }
                    continue 'again;
                }
            }
            break;
        }
        elems.sort_by(|a, b| (a.degree(), a.coeffs()).cmp(&(b.degree(), b.coeffs())));
        Ok(CoprimeBasis { p, elems })
    }

    pub(crate) fn elems(&self) -> &[FpPoly] {
        &self.elems
    }

    pub(crate) fn len(&self) -> usize {
        self.elems.len()
    }

    /// `f = unit * prod b^e`; fails if `f` does not factor over the basis.
    fn factor_poly(&self, f: &FpPoly) -> Result<(u64, Vec<BigInt>)> {
        let (unit, mut rest) = f.monic();
        let mut exps = vec![BigInt::zero(); self.elems.len()];
        for (b, e) in self.elems.iter().zip(exps.iter_mut()) {
            loop {
                let (q, r) = rest.divmod(b)?;
                if !r.is_zero() {
                    break;
                }
                rest = q;
                *e += 1;
            }
        }
        if !rest.is_one() {
            return Err(Error::Invariant(format!("{f} does not factor over the coprime basis")));
        }
        Ok((unit, exps))
    }

    pub(crate) fn factor(&self, r: &RatFunc) -> Result<Factored> {
        if r.is_zero() {
            return Err(Error::Domain("zero is not a torus coordinate".into()));
        }
        let (un, en) = self.factor_poly(r.num())?;
        let (ud, ed) = self.factor_poly(r.den())?;
        let inv = self.p.inv(ud).expect("nonzero unit");
        Ok(Factored { unit: self.p.mul(un, inv), exps: en.iter().zip(&ed).map(|(a, b)| a - b).collect() })
    }

    #[cfg(test)]
    pub(crate) fn expand(&self, f: &Factored) -> Result<RatFunc> {
        let mut out = RatFunc::constant(f.unit, self.p);
        for (b, e) in self.elems.iter().zip(&f.exps) {
            if !e.is_zero() {
                out = out.mul(&RatFunc::from_poly(b.clone()).int_pow(e)?)?;
            }
        }
        Ok(out)
    }
}

/// `unit * prod b^(exps_b)` over some [`CoprimeBasis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Factored {
    pub(crate) unit: u64,
    pub(crate) exps: Vec<BigInt>,
}

/// A torus point with factored coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FactoredPoint {
    pub(crate) coords: Vec<Factored>,
}

impl FactoredPoint {
    pub(crate) fn identity(n: usize, width: usize) -> Self {
        FactoredPoint { coords: vec![Factored { unit: 1, exps: vec![BigInt::zero(); width] }; n] }
    }

    pub(crate) fn of(basis: &CoprimeBasis, x: &TorusPoint) -> Result<Self> {
        Ok(FactoredPoint { coords: x.coords().iter().map(|c| basis.factor(c)).collect::<Result<_>>()? })
    }

    #[cfg(test)]
    pub(crate) fn expand(&self, basis: &CoprimeBasis) -> Result<TorusPoint> {
        TorusPoint::new(self.coords.iter().map(|c| basis.expand(c)).collect::<Result<_>>()?)
    }

    /// `[A]x`.
    pub(crate) fn endo(&self, a: &IntMatrix, p: PrimeModulus) -> Self {
        let n = self.coords.len();
        let width = self.coords.first().map_or(0, |c| c.exps.len());
        let order = BigInt::from(p.get() - 1);
        let coords = (0..n)
            .map(|i| {
                let mut unit = 1u64;
                let mut exps = vec![BigInt::zero(); width];
                for j in 0..n {
                    let aij = a.get(i, j);
                    if aij.is_zero() {
                        continue;
                    }
                    let src = &self.coords[j];
                    let e = aij.mod_floor(&order).to_u64().expect("small");
                    unit = p.mul(unit, p.pow(src.unit, e));
                    for (dst, s) in exps.iter_mut().zip(&src.exps) {
                        *dst += aij * s;
                    }
                }
                Factored { unit, exps }
            })
            .collect();
        FactoredPoint { coords }
    }

    /// Coordinatewise product.
    pub(crate) fn times(&self, other: &Self, p: PrimeModulus) -> Self {
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| Factored {
                unit: p.mul(a.unit, b.unit),
                exps: a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect(),
            })
            .collect();
        FactoredPoint { coords }
    }

    /// `[k]x`, the k-th power in the group.
    pub(crate) fn power(&self, k: &BigInt, p: PrimeModulus) -> Self {
        let e = k.mod_floor(&BigInt::from(p.get() - 1)).to_u64().expect("small");
        let coords = self
            .coords
            .iter()
            .map(|c| Factored { unit: p.pow(c.unit, e), exps: c.exps.iter().map(|x| x * k).collect() })
            .collect();
        FactoredPoint { coords }
    }
}

/// One equation with factored coefficients: `sum_tau c_tau x^(e_tau)`.
struct FactoredEquation {
    terms: Vec<(Vec<BigInt>, Factored)>,
}

/// Decides membership of factored points in a fixed variety.
pub(crate) struct FactoredVariety {
    p: PrimeModulus,
    equations: Vec<FactoredEquation>,
    tester: ZeroTester,
}

impl FactoredVariety {
    pub(crate) fn new(basis: &CoprimeBasis, v: &Variety) -> Result<Self> {
        let mut equations = Vec::with_capacity(v.equations().len());
        for eq in v.equations() {
            let mut terms = Vec::with_capacity(eq.len());
            for (exps, c) in eq {
                if c.is_zero() {
                    continue;
                }
                terms.push((exps.iter().map(|&e| BigInt::from(e)).collect(), basis.factor(c)?));
            }
            equations.push(FactoredEquation { terms });
        }
        Ok(FactoredVariety { p: basis.p, equations, tester: ZeroTester::new(basis.p, basis.elems())? })
    }

    pub(crate) fn contains(&self, x: &FactoredPoint) -> Result<bool> {
        let p = self.p;
        let order = BigInt::from(p.get() - 1);
        for eq in &self.equations {
            let summands: Vec<Summand> = eq
                .terms
                .iter()
                .map(|(mono, c)| {
                    let mut unit = c.unit;
                    let mut exps = c.exps.clone();
                    for (m, xi) in mono.iter().zip(&x.coords) {
                        if m.is_zero() {
                            continue;
                        }
                        unit = p.mul(unit, p.pow(xi.unit, m.mod_floor(&order).to_u64().expect("small")));
                        for (dst, s) in exps.iter_mut().zip(&xi.exps) {
                            *dst += m * s;
                        }
                    }
                    (exps, unit)
                })
                .collect();
            if !self.tester.is_zero(&summands)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub(crate) fn polys_of(points: &[&TorusPoint]) -> Vec<FpPoly> {
    let mut polys = Vec::new();
    for x in points {
        for c in x.coords() {
            polys.push(c.num().clone());
            polys.push(c.den().clone());
        }
    }
    polys
}

/// Every polynomial that needs factoring for the given data: numerators and
/// denominators of the points and of the equation coefficients.
pub(crate) fn basis_for(p: PrimeModulus, points: &[&TorusPoint], v: Option<&Variety>) -> Result<CoprimeBasis> {
    let mut polys = polys_of(points);
    if let Some(v) = v {
        for eq in v.equations() {
            for (_, c) in eq {
                if !c.is_zero() {
                    polys.push(c.num().clone());
                    polys.push(c.den().clone());
                }
            }
        }
    }
    CoprimeBasis::build(p, &polys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_is_coprime_and_factors_inputs() {
        let p = PrimeModulus::new(5).unwrap();
        let polys: Vec<FpPoly> = [&[0, 1, 1][..], &[0, 0, 1], &[1, 2, 1], &[3, 3]]
            .iter()
            .map(|c| FpPoly::from_i64s(c, p))
            .collect();
        let basis = CoprimeBasis::build(p, &polys).unwrap();
        // t^2+t = t(t+1), t^2, (t+1)^2, 3(t+1) -> {t, t+1}
        assert_eq!(basis.len(), 2);
        for (i, a) in basis.elems().iter().enumerate() {
            for b in &basis.elems()[i + 1..] {
                assert!(a.gcd(b).unwrap().is_constant());
            }
        }
        for f in &polys {
            let r = RatFunc::from_poly(f.clone());
            assert_eq!(basis.expand(&basis.factor(&r).unwrap()).unwrap(), r);
        }
    }

    #[test]
    fn factored_orbit_expands_to_dense_orbit() {
        let p = PrimeModulus::new(3).unwrap();
        let rf = |c: &[i64]| RatFunc::from_poly(FpPoly::from_i64s(c, p));
        let a = IntMatrix::from_i64_rows(&[vec![1, -1], vec![2, 1]]).unwrap();
        let y = TorusPoint::new(vec![rf(&[1, 1]), rf(&[0, 1]).inv().unwrap()]).unwrap();
        let x0 = TorusPoint::new(vec![rf(&[2]), rf(&[1, 0, 1])]).unwrap();
        let phi = super::super::TorusSelfMap::new(a.clone(), y.clone()).unwrap();
        let basis = basis_for(p, &[&y, &x0], None).unwrap();
        let fy = FactoredPoint::of(&basis, &y).unwrap();
        let mut fx = FactoredPoint::of(&basis, &x0).unwrap();
        let mut dense = x0;
        for _ in 0..5 {
            fx = fy.times(&fx.endo(&a, p), p);
            dense = phi.apply(&dense).unwrap();
            assert_eq!(fx.expand(&basis).unwrap(), dense);
        }
    }
}
