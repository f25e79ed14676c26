use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{PrimeModulus, RatFunc};
use crate::error::{Error, Result};
use crate::intalg::IntMatrix;
use crate::lrs::Lrs;
use crate::torus::{basis_for, FactoredPoint, TorusInstance, TorusPoint, TorusSelfMap, Variety};

use super::{build_pset_variety, PsetVariety};

/// `π(Φ^n(Q)) = P^(u_n)` with `Φ = [C]` for the companion matrix `C` of `u`,
/// `Q = (P^(u_0), ..., P^(u_{d-1}))` and `π` the monomial `x^pi_exponents`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrsEncoding {
    pub u: Lrs,
    pub phi_matrix: IntMatrix,
    pub pi_exponents: Vec<i64>,
    pub q: TorusPoint,
    pub base: RatFunc,
}

pub fn encode_lrs(u: &Lrs, base: &RatFunc, p: PrimeModulus) -> Result<LrsEncoding> {
    if base.is_zero() {
        return Err(Error::Domain("the base point must be nonzero".into()));
    }
    if base.modulus() != p {
        return Err(Error::Validation("base point over a different prime".into()));
    }
    let q = TorusPoint::new(u.initial().iter().map(|e| base.int_pow(e)).collect::<Result<_>>()?)?;
    let mut pi_exponents = vec![0; u.order()];
    pi_exponents[0] = 1;
    Ok(LrsEncoding { u: u.clone(), phi_matrix: u.companion(), pi_exponents, q, base: base.clone() })
}

impl LrsEncoding {
    pub fn dim(&self) -> usize {
        self.u.order()
    }

    pub fn map(&self) -> TorusSelfMap {
        TorusSelfMap::endomorphism(self.phi_matrix.clone(), self.base.modulus())
    }

    /// `prod_j x_j^(pi_j)`.
    pub fn project(&self, x: &TorusPoint) -> Result<RatFunc> {
        let mut out = RatFunc::one(self.base.modulus());
        for (xj, &e) in x.coords().iter().zip(&self.pi_exponents) {
            if e != 0 {
                out = out.mul(&xj.int_pow(&BigInt::from(e))?)?;
            }
        }
        Ok(out)
    }

    /// Checks `π(Φ^n(Q)) = P^(u_n)` for all `n <= n_max`. Both sides are kept
    /// factored over the base point's coprime factors, so the check is exact
    /// however large `u_n` grows.
    pub fn verify(&self, n_max: u64) -> Result<bool> {
        let p = self.base.modulus();
        let b = TorusPoint::new(vec![self.base.clone()])?;
        let basis = basis_for(p, &[&b, &self.q], None)?;
        let fb = FactoredPoint::of(&basis, &b)?;
        let mut x = FactoredPoint::of(&basis, &self.q)?;
        let width = basis.len();
        for (n, un) in self.u.iter().take(n_max as usize + 1).enumerate() {
            if n > 0 {
                x = x.endo(&self.phi_matrix, p);
            }
            let mut lhs = FactoredPoint::identity(1, width);
            for (i, &e) in self.pi_exponents.iter().enumerate() {
                if e != 0 {
                    let coord = FactoredPoint { coords: vec![x.coords[i].clone()] };
                    lhs = lhs.times(&coord.power(&BigInt::from(e), p), p);
                }
            }
            if lhs != fb.power(&un, p) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A return-set instance whose hits are `{n : u_n ∈ {sum_j c_j p^(n_j)}}`.
#[derive(Debug, Clone)]
pub struct DmlInstance {
    pub map: TorusSelfMap,
    pub start: TorusPoint,
    pub variety: Variety,
    pub pset_variety: PsetVariety,
}

impl DmlInstance {
    pub fn to_torus_instance(&self, n_max: u64) -> Result<TorusInstance> {
        TorusInstance::new(self.map.clone(), self.start.clone(), self.variety.clone(), n_max)
    }
}

/// One companion block per coordinate of `P = (t+1, ..., t+p-1)`; the
/// variety is `X` with each `x_a` replaced by the first coordinate of block `a`.
pub fn dml_instance(u: &Lrs, p: PrimeModulus, c: &[u64]) -> Result<DmlInstance> {
    let pv = build_pset_variety(p, c)?;
    let d = u.order();
    let blocks = pv.point.dim();
    let dim = blocks * d;
    let comp = u.companion();
    let mut a = IntMatrix::zero(dim);
    let mut start = Vec::with_capacity(dim);
    for (blk, base) in pv.point.coords().iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                let v = comp.get(i, j);
                if !v.is_zero() {
                    a.set(blk * d + i, blk * d + j, v.clone());
                }
            }
        }
        let enc = encode_lrs(u, base, p)?;
        start.extend(enc.q.coords().iter().cloned());
    }
    let equations = pv
        .variety
        .equations()
        .iter()
        .map(|eq| {
            eq.iter()
                .map(|(e, coef)| {
                    let mut big = vec![0i64; dim];
                    for (blk, &k) in e.iter().enumerate() {
                        big[blk * d] = k;
                    }
                    (big, coef.clone())
                })
                .collect()
        })
        .collect();
    Ok(DmlInstance {
        map: TorusSelfMap::endomorphism(a, p),
        start: TorusPoint::new(start)?,
        variety: Variety::new(dim, equations)?,
        pset_variety: pv,
    })
}
