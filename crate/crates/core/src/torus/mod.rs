//! Affine self-maps of the split torus `G_m^N` over `F_p(t)`.
//!
//! A self-map is `x -> y * [A]x` where `([A]x)_i = prod_j x_j^(A_ij)`.
//! Dense operations work on explicit rational functions and are bounded by
//! the degree cap; orbit scans go through a factored representation whose
//! cost grows with the bit length of the exponents rather than the degrees.

mod factored;
mod instance;
mod obstruction;
mod pipeline;
mod reduction;
mod zerotest;

use std::collections::hash_map::{Entry, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{FpPoly, PrimeModulus, RatFunc};
use crate::error::{Error, Result};
use crate::intalg::{IntMatrix, IntPoly};

pub use instance::TorusInstance;
pub use obstruction::{frobenius_obstruction, Obstruction, DEFAULT_R_MAX, DEFAULT_S_MAX};
pub use pipeline::{full_pipeline, PipelineReport};
pub use reduction::{reduction_decompose, verify_reduction, ReductionData};

pub(crate) use factored::{basis_for, FactoredPoint, FactoredVariety};

/// A point of `G_m^N`: every coordinate is a nonzero rational function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    coords: Vec<RatFunc>,
}

impl TorusPoint {
    pub fn new(coords: Vec<RatFunc>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Validation("a torus point needs at least one coordinate".into()));
        }
        if let Some(i) = coords.iter().position(RatFunc::is_zero) {
            return Err(Error::Validation(format!("coordinate {} is zero", i + 1)));
        }
        let p = coords[0].modulus();
        if coords.iter().any(|c| c.modulus() != p) {
            return Err(Error::Validation("coordinates over different primes".into()));
        }
        Ok(TorusPoint { coords })
    }

    /// The identity element `(1, ..., 1)`.
    pub fn identity(n: usize, p: PrimeModulus) -> Self {
        TorusPoint { coords: vec![RatFunc::one(p); n] }
    }

    pub fn coords(&self) -> &[RatFunc] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.coords[0].modulus()
    }

    pub fn is_identity(&self) -> bool {
        self.coords.iter().all(RatFunc::is_one)
    }

    pub fn times(&self, other: &TorusPoint) -> Result<TorusPoint> {
        check_dims(self.dim(), other.dim())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?;
        Ok(TorusPoint { coords })
    }

    /// `[k]x`: every coordinate raised to the integer `k`.
    pub fn power(&self, k: &BigInt) -> Result<TorusPoint> {
        let coords = self.coords.iter().map(|c| c.int_pow(k)).collect::<Result<_>>()?;
        Ok(TorusPoint { coords })
    }
}

/// `x -> y * [A]x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSelfMap {
    pub a: IntMatrix,
    pub y: TorusPoint,
}

impl TorusSelfMap {
    pub fn new(a: IntMatrix, y: TorusPoint) -> Result<Self> {
        check_dims(a.dim(), y.dim())?;
        Ok(TorusSelfMap { a, y })
    }

    /// The pure endomorphism `[A]`.
    pub fn endomorphism(a: IntMatrix, p: PrimeModulus) -> Self {
        let y = TorusPoint::identity(a.dim(), p);
        TorusSelfMap { a, y }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.y.modulus()
    }

    pub fn apply(&self, x: &TorusPoint) -> Result<TorusPoint> {
        self.y.times(&endo_apply(&self.a, x)?)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TorusSelfMap) -> Result<TorusSelfMap> {
        let y = self.y.times(&endo_apply(&self.a, &other.y)?)?;
        Ok(TorusSelfMap { a: self.a.mul(&other.a), y })
    }
}

/// A Laurent monomial sum with rational-function coefficients.
pub type Equation = Vec<(Vec<i64>, RatFunc)>;

/// The common zero set of finitely many Laurent polynomials; no equations
/// means the whole torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variety {
    dim: usize,
    equations: Vec<Equation>,
}

impl Variety {
    pub fn new(dim: usize, equations: Vec<Equation>) -> Result<Self> {
        for eq in &equations {
            for (exps, _) in eq {
                if exps.len() != dim {
                    return Err(Error::Validation(format!(
                        "monomial with {} exponents in dimension {dim}",
                        exps.len()
                    )));
                }
            }
        }
        Ok(Variety { dim, equations })
    }

    pub fn whole(dim: usize) -> Self {
        Variety { dim, equations: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Value of one equation at `x`.
    pub fn evaluate(eq: &Equation, x: &TorusPoint) -> Result<RatFunc> {
        let polynomial = x.coords().iter().all(|c| c.den().is_one())
            && eq.iter().all(|(e, c)| c.den().is_one() && e.iter().all(|&k| k >= 0));
        if polynomial {
            return Ok(RatFunc::from_poly(evaluate_poly(eq, x)?));
        }
        let mut acc = RatFunc::zero(x.modulus());
        for (exps, c) in eq {
            let mut term = c.clone();
            for (e, xi) in exps.iter().zip(x.coords()) {
                if *e != 0 {
                    term = term.mul(&xi.int_pow(&BigInt::from(*e))?)?;
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// [`Variety::evaluate`] when everything in sight is a polynomial: no
/// normalization, and each power `x_i^k` computed once.
fn evaluate_poly(eq: &Equation, x: &TorusPoint) -> Result<FpPoly> {
    let mut powers: HashMap<(usize, i64), FpPoly> = HashMap::new();
    let mut acc = FpPoly::zero(x.modulus());
    for (exps, c) in eq {
        let mut term = c.num().clone();
        for (i, (&e, xi)) in exps.iter().zip(x.coords()).enumerate() {
            if e != 0 {
                let pw = match powers.entry((i, e)) {
                    Entry::Occupied(o) => o.into_mut(),
                    Entry::Vacant(v) => v.insert(xi.num().pow(e as u64)?),
                };
                term = term.checked_mul(pw)?;
            }
        }
        acc = acc.checked_add(&term)?;
    }
    Ok(acc)
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Validation(format!("dimension mismatch: {a} vs {b}")));
    }
    Ok(())
}

/// `([A]x)_i = prod_j x_j^(A_ij)`.
pub fn endo_apply(a: &IntMatrix, x: &TorusPoint) -> Result<TorusPoint> {
    check_dims(a.dim(), x.dim())?;
    let p = x.modulus();
    let mut coords = Vec::with_capacity(x.dim());
    for i in 0..a.dim() {
        let mut c = RatFunc::one(p);
        for (j, xj) in x.coords().iter().enumerate() {
            let e = a.get(i, j);
            if !e.is_zero() {
                c = c.mul(&xj.int_pow(e)?)?;
            }
        }
        coords.push(c);
    }
    Ok(TorusPoint { coords })
}

/// `Φ^n(α)` by binary powering of the affine pair `(A, y)`.
pub fn selfmap_iterate(phi: &TorusSelfMap, alpha: &TorusPoint, mut n: u64) -> Result<TorusPoint> {
    check_dims(phi.dim(), alpha.dim())?;
    let mut acc: Option<TorusSelfMap> = None;
    let mut base = phi.clone();
    while n > 0 {
        if n & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(m) => m.compose(&base)?,
            });
        }
        n >>= 1;
        if n > 0 {
            base = base.compose(&base)?;
        }
    }
    match acc {
        None => Ok(alpha.clone()),
        Some(m) => m.apply(alpha),
    }
}

pub fn variety_contains(v: &Variety, x: &TorusPoint) -> Result<bool> {
    check_dims(v.dim(), x.dim())?;
    for eq in v.equations() {
        if !Variety::evaluate(eq, x)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{n <= n_max : Φ^n(α) ∈ V}`, one affine step per `n`.
///
/// Points are kept factored over a coprime basis and each equation is
/// decided by an exact zero test, so large exponents cost bits rather than degrees.
pub fn return_set(phi: &TorusSelfMap, alpha: &TorusPoint, v: &Variety, n_max: u64) -> Result<Vec<u64>> {
    check_dims(phi.dim(), alpha.dim())?;
    check_dims(phi.dim(), v.dim())?;
    if v.equations().is_empty() {
        return Ok((0..=n_max).collect());
    }
    let p = phi.modulus();
    let basis = basis_for(p, &[&phi.y, alpha], Some(v))?;
    let fv = FactoredVariety::new(&basis, v)?;
    let fy = FactoredPoint::of(&basis, &phi.y)?;
    let mut x = FactoredPoint::of(&basis, alpha)?;
    let mut hits = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            x = fy.times(&x.endo(&phi.a, p), p);
        }
        if fv.contains(&x)? {
            hits.push(n);
        }
    }
    Ok(hits)
}

/// [`return_set`] with dense coordinates; the reference route for small orbits.
pub fn return_set_dense(phi: &TorusSelfMap, alpha: &TorusPoint, v: &Variety, n_max: u64) -> Result<Vec<u64>> {
    let mut x = alpha.clone();
    let mut hits = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            x = phi.apply(&x)?;
        }
        if variety_contains(v, &x)? {
            hits.push(n);
        }
    }
    Ok(hits)
}

/// The minimal polynomial of `A` over the rationals (monic, integral).
pub fn minimal_polynomial(a: &IntMatrix) -> IntPoly {
    a.minimal_polynomial()
}
