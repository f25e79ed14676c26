//! Closed form of the orbit through the minimal polynomial of `A`.
//!
//! With `P = x^l + ...` the minimal polynomial, `x^n mod P = sum_i v_i(n) x^i`
//! and `sum_{j<n} x^j mod P = sum_i s_i(n) x^i`, so
//! `Φ^n(α) = prod_i [v_i(n)](A^i α) * prod_{i=1..l} [s_{i-1}(n) - s_i(n)] Q_i`
//! where `Q_i = prod_{j<i} [A^j] y` and `s_l = 0`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::intalg::IntPoly;
use crate::lrs::Lrs;

use super::factored::CoprimeBasis;
use super::{endo_apply, minimal_polynomial, FactoredPoint, TorusPoint, TorusSelfMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionData {
    pub minpoly: IntPoly,
    /// `u^(1), ..., u^(l)`.
    pub u_seqs: Vec<Lrs>,
    /// `v^(0), ..., v^(l-1)`.
    pub v_seqs: Vec<Lrs>,
    /// `Q_1, ..., Q_l`.
    pub q_points: Vec<TorusPoint>,
}

/// Coefficients of `f mod P` padded to `l` entries.
fn reduce(f: &IntPoly, minpoly: &IntPoly, l: usize) -> Vec<BigInt> {
    let r = f.divmod_monic(minpoly).1;
    let mut c = r.coeffs().to_vec();
    c.resize(l, BigInt::zero());
    c
}

/// The data depends only on the map; `α` enters through the `A^i α` factors at evaluation time.
pub fn reduction_decompose(phi: &TorusSelfMap, _alpha: &TorusPoint) -> Result<ReductionData> {
    let minpoly = minimal_polynomial(&phi.a);
    let l = minpoly.degree().expect("nonzero minimal polynomial");
    let x = IntPoly::from_i64s(&[0, 1]);

    let mut v_seqs = Vec::with_capacity(l);
    for i in 0..l {
        let initial = (0..l).map(|n| BigInt::from((n == i) as i64)).collect();
        v_seqs.push(Lrs::with_char_poly(&minpoly, initial)?);
    }

    // s(n) for n = 0..=l, the l + 1 initial terms of the order l + 1 recurrence
    let mut s_terms: Vec<Vec<BigInt>> = Vec::with_capacity(l + 1);
    let mut s = vec![BigInt::zero(); l];
    let mut xn = IntPoly::one();
    for _ in 0..=l {
        s_terms.push(s.clone());
        let r = reduce(&xn, &minpoly, l);
        for (a, b) in s.iter_mut().zip(r) {
            *a += b;
        }
        xn = xn.mul(&x).divmod_monic(&minpoly).1;
    }
    let u_poly = minpoly.mul(&IntPoly::from_i64s(&[-1, 1]));
    let mut u_seqs = Vec::with_capacity(l);
    for i in 1..=l {
        let initial = s_terms
            .iter()
            .map(|s| {
                let hi = if i < l { s[i].clone() } else { BigInt::zero() };
                &s[i - 1] - hi
            })
            .collect();
        u_seqs.push(Lrs::with_char_poly(&u_poly, initial)?);
    }

    let mut q_points = Vec::with_capacity(l);
    let mut q = phi.y.clone();
    let mut ajy = phi.y.clone();
    for i in 1..=l {
        q_points.push(q.clone());
        if i < l {
            ajy = endo_apply(&phi.a, &ajy)?;
            q = q.times(&ajy)?;
        }
    }
    Ok(ReductionData { minpoly, u_seqs, v_seqs, q_points })
}

/// Checks `Φ^n(α)` against the closed form for every `n <= n_max`, with
/// both sides kept factored over a common coprime basis.
pub fn verify_reduction(rd: &ReductionData, phi: &TorusSelfMap, alpha: &TorusPoint, n_max: u64) -> Result<bool> {
    let l = rd.v_seqs.len();
    if rd.u_seqs.len() != l || rd.q_points.len() != l || rd.q_points.iter().any(|q| q.dim() != phi.dim()) {
        return Ok(false);
    }
    let p = phi.modulus();
    let mut points: Vec<&TorusPoint> = vec![&phi.y, alpha];
    points.extend(rd.q_points.iter());
    let basis = CoprimeBasis::build(p, &super::factored::polys_of(&points))?;
    let fy = FactoredPoint::of(&basis, &phi.y)?;
    let qs: Vec<FactoredPoint> = rd.q_points.iter().map(|q| FactoredPoint::of(&basis, q)).collect::<Result<_>>()?;
    let mut a_alpha = Vec::with_capacity(l);
    let mut cur = FactoredPoint::of(&basis, alpha)?;
    for _ in 0..l {
        let next = cur.endo(&phi.a, p);
        a_alpha.push(std::mem::replace(&mut cur, next));
    }
    let count = n_max as usize + 1;
    let u_terms: Vec<Vec<BigInt>> = rd.u_seqs.iter().map(|u| u.terms(count)).collect();
    let v_terms: Vec<Vec<BigInt>> = rd.v_seqs.iter().map(|v| v.terms(count)).collect();

    let width = basis.len();
    let mut lhs = FactoredPoint::of(&basis, alpha)?;
    for n in 0..count {
        if n > 0 {
            lhs = fy.times(&lhs.endo(&phi.a, p), p);
        }
        let mut rhs = FactoredPoint::identity(phi.dim(), width);
        for i in 0..l {
            if !u_terms[i][n].is_zero() {
                rhs = rhs.times(&qs[i].power(&u_terms[i][n], p), p);
            }
            if !v_terms[i][n].is_zero() {
                let k = &v_terms[i][n];
                let term = if k.is_one() { a_alpha[i].clone() } else { a_alpha[i].power(k, p) };
                rhs = rhs.times(&term, p);
            }
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}
