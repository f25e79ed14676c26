//! Instances whose return sets are prescribed p-sets.
//!
//! [`build_pset_variety`] gives a subvariety `X` of `G_m^(p-1)` and the point
//! `P = (t+1, ..., t+p-1)` with `{m : [m]P ∈ X} = {sum_j c_j p^(n_j)}`;
//! [`encode_lrs`] realizes `P^(u_n)` as the first coordinate of an orbit;
//! [`dml_instance`] glues the two together.

mod encoding;
mod implicit;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{check_len, FpPoly, PrimeModulus, RatFunc};
use crate::error::{Error, Result};
use crate::torus::{basis_for, variety_contains, Equation, FactoredPoint, FactoredVariety, TorusPoint, Variety};

use implicit::{image_coefficients, relations, MPoly};

pub use encoding::{dml_instance, encode_lrs, DmlInstance, LrsEncoding};

/// Sample counts for the construction-time self-check.
const MEMBER_SAMPLES: usize = 50;
const NON_MEMBER_SAMPLES: usize = 50;

/// `A` with `sum_a A[k][a-1] a^j = [j ≡ k mod p-1]`: the inverse of the
/// Vandermonde matrix `(a^j)` over `F_p`, rows `k = 0..p-2`, columns `a = 1..p-1`.
pub fn vandermonde_inverse(p: PrimeModulus) -> Result<Vec<Vec<u64>>> {
    let q = p.get();
    if q < 3 {
        return Err(Error::Domain("the Vandermonde construction needs p >= 3".into()));
    }
    let n = (q - 1) as usize;
    // solve A V = I, i.e. V^T A^T = I, by Gauss-Jordan on [V^T | I]
    let mut m: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            let mut row: Vec<u64> = (1..q).map(|a| p.pow(a, j as u64)).collect();
            row.extend((0..n).map(|i| (i == j) as u64));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0).expect("Vandermonde matrices are invertible");
        m.swap(col, piv);
        let inv = p.inv(m[col][col]).expect("nonzero");
        for x in m[col].iter_mut() {
            *x = p.mul(*x, inv);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let c = m[r][col];
                let pivot_row = m[col].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x = p.sub(*x, p.mul(c, *y));
                }
            }
        }
    }
    // m = [I | (V^T)^-1] and (V^T)^-1 = A^T
    Ok((0..n).map(|k| (0..n).map(|a| m[a][n + k]).collect()).collect())
}

/// `X ⊂ G_m^(p-1)` with `{m : [m]P ∈ X} = {sum_j c_j p^(n_j)}`.
#[derive(Debug, Clone)]
pub struct PsetVariety {
    pub p: PrimeModulus,
    pub c: Vec<u64>,
    pub variety: Variety,
    pub point: TorusPoint,
    pub a_inv: Vec<Vec<u64>>,
    /// Row set to 1, i.e. `sum c_j`.
    pub unit_row: usize,
    /// Rows set to 0.
    pub zero_rows: Vec<usize>,
    /// Relations among rows `0..unit_row` cutting the image down to the given multiplicities.
    relations: Vec<MPoly>,
}

/// Linear form `sum_a A[k][a-1] x_a` as an equation, minus `rhs`.
fn row_equation(a_inv: &[Vec<u64>], k: usize, rhs: u64, p: PrimeModulus) -> Equation {
    let n = a_inv.len();
    let mut eq: Equation = a_inv[k]
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(a, c)| {
            let mut e = vec![0i64; n];
            e[a] = 1;
            (e, RatFunc::constant(*c, p))
        })
        .collect();
    if rhs != 0 {
        eq.push((vec![0; n], RatFunc::constant(p.neg(rhs), p)));
    }
    eq
}

/// Row indices set to zero for each candidate reading of "rows beyond the unit row".
fn zero_row_candidates(unit_row: usize, n: usize) -> Vec<Vec<usize>> {
    let inside: Vec<usize> = (unit_row + 1..n).collect();
    // reading the last index p - 1 cyclically as row 0
    let mut wrapped = inside.clone();
    wrapped.push(0);
    vec![inside, wrapped]
}

pub fn build_pset_variety(p: PrimeModulus, c: &[u64]) -> Result<PsetVariety> {
    if c.is_empty() || c.contains(&0) {
        return Err(Error::Domain("multiplicities must be positive".into()));
    }
    let ell: u64 = c.iter().sum();
    if p.get() < 3 || ell >= p.get() - 1 {
        return Err(Error::Domain(format!("need sum of multiplicities {ell} < p - 1 = {}", p.get().saturating_sub(1))));
    }
    let unit_row = ell as usize;
    let n = (p.get() - 1) as usize;
    let a_inv = vandermonde_inverse(p)?;
    let point = TorusPoint::new((1..p.get()).map(|a| RatFunc::from_poly(FpPoly::new(vec![a, 1], p))).collect())?;

    let image = image_coefficients(c, p);
    let rels = if c.iter().all(|&x| x == 1) {
        Vec::new()
    } else {
        relations(&image[..unit_row], c.len(), (ell * (ell - 1)) as u32, p)?
    };
    // pull the relations back through e_k = sum_a A[k][a-1] x_a
    let forms: Vec<MPoly> = (0..unit_row)
        .map(|k| {
            let mut f = MPoly::zero();
            for (a, &v) in a_inv[k].iter().enumerate() {
                f.add_scaled(&MPoly::var(a, n), v, p);
            }
            f
        })
        .collect();
    let pulled: Vec<Equation> = rels
        .iter()
        .map(|r| {
            r.compose(&forms, n, p)
                .terms
                .into_iter()
                .map(|(e, v)| (e.into_iter().map(i64::from).collect(), RatFunc::constant(v, p)))
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(p.get() * 1_000_003 + c.iter().fold(0, |h, &x| h * 31 + x));
    let members: Vec<TorusPoint> = (0..MEMBER_SAMPLES)
        .map(|_| {
            let ys: Vec<FpPoly> = (0..c.len()).map(|_| random_poly(&mut rng, p, 1, 3)).collect();
            nu_point(&ys, c, p)
        })
        .collect::<Result<_>>()?;
    let non_members = non_member_samples(&mut rng, p, c)?;

    for zero_rows in zero_row_candidates(unit_row, n) {
        let mut equations = vec![row_equation(&a_inv, unit_row, 1, p)];
        equations.extend(zero_rows.iter().map(|&k| row_equation(&a_inv, k, 0, p)));
        equations.extend(pulled.iter().cloned());
        let variety = Variety::new(n, equations)?;
        let mut ok = true;
        for x in &members {
            ok &= variety_contains(&variety, x)?;
        }
        for x in &non_members {
            ok &= !variety_contains(&variety, x)?;
        }
        if ok {
            return Ok(PsetVariety { p, c: c.to_vec(), variety, point, a_inv, unit_row, zero_rows, relations: rels });
        }
    }
    Err(Error::Construction(format!("no candidate variety for multiplicities {c:?} over F_{p} passed the self-check")))
}

fn random_poly(rng: &mut ChaCha8Rng, p: PrimeModulus, min_deg: usize, max_deg: usize) -> FpPoly {
    let deg = rng.gen_range(min_deg..=max_deg);
    let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p.get())).collect();
    coeffs.push(rng.gen_range(1..p.get()));
    FpPoly::new(coeffs, p)
}

/// `(prod_j (y_j + a)^(c_j))_{a = 1..p-1}`.
fn nu_point(ys: &[FpPoly], c: &[u64], p: PrimeModulus) -> Result<TorusPoint> {
    let coords = (1..p.get())
        .map(|a| {
            let mut prod = FpPoly::one(p);
            for (y, &cj) in ys.iter().zip(c) {
                prod = prod.checked_mul(&(y + &FpPoly::constant(a, p)).pow(cj)?)?;
            }
            Ok(RatFunc::from_poly(prod))
        })
        .collect::<Result<_>>()?;
    TorusPoint::new(coords)
}

/// Partitions of `n` in non-increasing order.
fn partitions(n: u64) -> Vec<Vec<u64>> {
    fn go(left: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=max.min(left)).rev() {
            cur.push(k);
            go(left - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Whether the parts of `fine` can be grouped to give the parts of `coarse`.
fn coarsens(coarse: &[u64], fine: &[u64]) -> bool {
    fn go(fine: &[u64], k: usize, left: &mut Vec<u64>) -> bool {
        if k == fine.len() {
            return left.iter().all(|&x| x == 0);
        }
        for i in 0..left.len() {
            if left[i] >= fine[k] {
                left[i] -= fine[k];
                if go(fine, k + 1, left) {
                    return true;
                }
                left[i] += fine[k];
            }
        }
        false
    }
    go(fine, 0, &mut coarse.to_vec())
}

/// Points that must not lie on the variety: images of multiplicity patterns
/// that do not arise from `c` by merging roots, then unrelated points.
fn non_member_samples(rng: &mut ChaCha8Rng, p: PrimeModulus, c: &[u64]) -> Result<Vec<TorusPoint>> {
    let ell: u64 = c.iter().sum();
    let foreign: Vec<Vec<u64>> = partitions(ell).into_iter().filter(|q| !coarsens(q, c)).collect();
    let mut out = Vec::with_capacity(NON_MEMBER_SAMPLES);
    for i in 0..NON_MEMBER_SAMPLES / 2 {
        let Some(q) = foreign.get(i % foreign.len().max(1)) else { break };
        // distinct roots of distinct degrees, so no unintended merging
        let ys: Vec<FpPoly> = (0..q.len()).map(|j| random_poly(rng, p, j + 1, j + 1)).collect();
        out.push(nu_point(&ys, q, p)?);
    }
    while out.len() < NON_MEMBER_SAMPLES {
        let coords = (1..p.get()).map(|_| RatFunc::from_poly(random_poly(rng, p, 0, 4))).collect();
        out.push(TorusPoint::new(coords)?);
    }
    Ok(out)
}

impl PsetVariety {
    /// Whether `[m]P ∈ X`, for any integer `m`, through the factored zero test.
    pub fn contains_multiple(&self, m: &BigInt) -> Result<bool> {
        let basis = basis_for(self.p, &[&self.point], Some(&self.variety))?;
        let fv = FactoredVariety::new(&basis, &self.variety)?;
        let x = FactoredPoint::of(&basis, &self.point)?.power(m, self.p);
        fv.contains(&x)
    }

    /// The p-set this construction realizes: `{sum_j c_j p^(n_j)}`.
    pub fn target(&self) -> crate::psets::PSet {
        let terms: Vec<(i64, u32)> = self.c.iter().map(|&c| (c as i64, 1)).collect();
        crate::psets::PSet::from_ints(&terms).expect("nonempty")
    }
}

fn sparse_of(f: &FpPoly) -> Vec<(usize, u64)> {
    f.coeffs().iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i, *c)).collect()
}

fn sparse_mul(a: &[(usize, u64)], b: &[(usize, u64)], p: PrimeModulus) -> Vec<(usize, u64)> {
    let mut out: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
    for &(da, ca) in a {
        for &(db, cb) in b {
            let slot = out.entry(da + db).or_insert(0);
            *slot = p.add(*slot, p.mul(ca, cb));
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// `{m ∈ [0, bound] : [m]P ∈ X}` by exact evaluation, stepping `(t+a)^m` one
/// factor at a time. Negative `m` never qualify (the unit row acquires a pole).
pub fn exponent_set(pv: &PsetVariety, bound: &BigInt) -> Result<Vec<BigInt>> {
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let bound = bound.to_u64().ok_or_else(|| Error::Resource("bound too large".into()))?;
    check_len(bound as u128 + 1)?;
    let p = pv.p;
    let n = pv.a_inv.len();
    let linear: Vec<FpPoly> = (1..p.get()).map(|a| FpPoly::new(vec![a, 1], p)).collect();
    let mut xs = vec![FpPoly::one(p); n];
    let row = |xs: &[FpPoly], k: usize| -> FpPoly {
        let mut acc = FpPoly::zero(p);
        for (x, &c) in xs.iter().zip(&pv.a_inv[k]) {
            if c != 0 {
                acc = &acc + &x.scale(c);
            }
        }
        acc
    };
    let mut out = Vec::new();
    for m in 0..=bound {
        if m > 0 {
            for (x, l) in xs.iter_mut().zip(&linear) {
                *x = x.checked_mul(l)?;
            }
        }
        if !row(&xs, pv.unit_row).is_one() || pv.zero_rows.iter().any(|&k| !row(&xs, k).is_zero()) {
            continue;
        }
        if !pv.relations.is_empty() {
            let e: Vec<Vec<(usize, u64)>> = (0..pv.unit_row).map(|k| sparse_of(&row(&xs, k))).collect();
            let holds = pv.relations.iter().all(|r| {
                let mut total: std::collections::BTreeMap<usize, u64> = std::collections::BTreeMap::new();
                for (mono, c) in &r.terms {
                    let mut term = vec![(0usize, *c)];
                    for (k, &pw) in mono.iter().enumerate() {
                        for _ in 0..pw {
                            term = sparse_mul(&term, &e[k], p);
                        }
                    }
                    for (d, v) in term {
                        let slot = total.entry(d).or_insert(0);
                        *slot = p.add(*slot, v);
                    }
                }
                total.values().all(|v| *v == 0)
            });
            if !holds {
                continue;
            }
        }
        out.push(BigInt::from(m));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
