//! Polynomial relations among the coefficients of `prod_j (a + y_j)^(c_j)`.
//!
//! Writing that product as `sum_k E_k(y) a^k`, the image of
//! `y -> (E_0(y), ..., E_{l-1}(y))` is cut out by the polynomials `R` with
//! `R(E_0, ..., E_{l-1}) = 0` in `F_p[y]`. `E_k` is homogeneous of degree
//! `l - k`, so the relations are found weight by weight with linear algebra
//! over `F_p`, keeping only those not generated by lower-weight ones.

use std::collections::BTreeMap;

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};

/// Largest number of monomials handled at a single weight.
const MONOMIAL_CAP: usize = 4000;

/// A sparse multivariate polynomial over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MPoly {
    pub(crate) terms: BTreeMap<Vec<u32>, u64>,
}

impl MPoly {
    pub(crate) fn zero() -> Self {
        MPoly { terms: BTreeMap::new() }
    }

    pub(crate) fn constant(c: u64, vars: usize) -> Self {
        let mut m = MPoly::zero();
        if c != 0 {
            m.terms.insert(vec![0; vars], c);
        }
        m
    }

    pub(crate) fn var(i: usize, vars: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        MPoly { terms: BTreeMap::from([(e, 1)]) }
    }

    pub(crate) fn add_scaled(&mut self, other: &MPoly, c: u64, p: PrimeModulus) {
        if c == 0 {
            return;
        }
        for (e, v) in &other.terms {
            let slot = self.terms.entry(e.clone()).or_insert(0);
            *slot = p.add(*slot, p.mul(*v, c));
            if *slot == 0 {
                self.terms.remove(e);
            }
        }
    }

    pub(crate) fn mul(&self, other: &MPoly, p: PrimeModulus) -> MPoly {
        let mut out = MPoly::zero();
        for (ea, va) in &self.terms {
            for (eb, vb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let slot = out.terms.entry(e).or_insert(0);
                *slot = p.add(*slot, p.mul(*va, *vb));
            }
        }
        out.terms.retain(|_, v| *v != 0);
        out
    }

    pub(crate) fn pow(&self, k: u32, vars: usize, p: PrimeModulus) -> MPoly {
        (0..k).fold(MPoly::constant(1, vars), |acc, _| acc.mul(self, p))
    }

    /// Substitutes `subs[i]` for variable `i`.
    pub(crate) fn compose(&self, subs: &[MPoly], vars: usize, p: PrimeModulus) -> MPoly {
        let mut out = MPoly::zero();
        let mut cache: BTreeMap<(usize, u32), MPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut term = MPoly::constant(*c, vars);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let f = cache.entry((i, k)).or_insert_with(|| subs[i].pow(k, vars, p));
                    term = term.mul(f, p);
                }
            }
            out.add_scaled(&term, 1, p);
        }
        out
    }
}

/// `E_0, ..., E_l` (with `E_l = 1`) for `prod_j (a + y_j)^(c_j)`, in `c.len()` variables.
pub(crate) fn image_coefficients(c: &[u64], p: PrimeModulus) -> Vec<MPoly> {
    let vars = c.len();
    let mut coeffs = vec![MPoly::constant(1, vars)];
    for (j, &cj) in c.iter().enumerate() {
        let y = MPoly::var(j, vars);
        for _ in 0..cj {
            // (sum_k f_k a^k)(a + y) = sum_k (f_{k-1} + y f_k) a^k
            let mut next = vec![MPoly::zero(); coeffs.len() + 1];
            for (k, f) in coeffs.iter().enumerate() {
                next[k + 1].add_scaled(f, 1, p);
                next[k].add_scaled(&y.mul(f, p), 1, p);
            }
            coeffs = next;
        }
    }
    coeffs
}

/// Exponent vectors `n` with `sum_k n_k * weights[k] = w`.
fn monomials_of_weight(weights: &[u32], w: u32) -> Vec<Vec<u32>> {
    fn go(weights: &[u32], k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for n in 0..=left / weights[k] {
            cur.push(n);
            go(weights, k + 1, left - n * weights[k], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(weights, 0, w, &mut Vec::new(), &mut out);
    out
}

/// Row echelon form over `F_p`, grown one vector at a time.
struct Echelon {
    p: PrimeModulus,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    fn new(p: PrimeModulus) -> Self {
        Echelon { p, rows: Vec::new() }
    }

    /// Reduces `v` against the stored rows (first `len` columns only); returns the pivot if nonzero.
    fn reduce(&self, v: &mut [u64], len: usize) -> Option<usize> {
        let p = self.p;
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = p.sub(*x, p.mul(c, *r));
                }
            }
        }
        v[..len].iter().position(|&x| x != 0)
    }

    /// Inserts `v` if independent of the first `len` columns of the stored rows.
    fn insert(&mut self, mut v: Vec<u64>, len: usize) -> Option<Vec<u64>> {
        match self.reduce(&mut v, len) {
            None => Some(v),
            Some(piv) => {
                let p = self.p;
                let inv = p.inv(v[piv]).expect("nonzero pivot");
                for x in v.iter_mut() {
                    *x = p.mul(*x, inv);
                }
                for (_, row) in self.rows.iter_mut() {
                    let c = row[piv];
                    if c != 0 {
                        for (x, r) in row.iter_mut().zip(&v) {
                            *x = p.sub(*x, p.mul(c, *r));
                        }
                    }
                }
                self.rows.push((piv, v));
                None
            }
        }
    }
}

/// Minimal new relations among `E_0..E_{l-1}` up to weight `max_weight`, as
/// polynomials in `l` variables.
pub(crate) fn relations(e: &[MPoly], vars: usize, max_weight: u32, p: PrimeModulus) -> Result<Vec<MPoly>> {
    let l = e.len();
    let weights: Vec<u32> = (0..l).map(|k| (l - k) as u32).collect();
    let mut found: Vec<(u32, MPoly)> = Vec::new();
    for w in 1..=max_weight {
        let monos = monomials_of_weight(&weights, w);
        if monos.len() > MONOMIAL_CAP {
            return Err(Error::Resource(format!("{} monomials of weight {w} in the implicitization", monos.len())));
        }
        let index: BTreeMap<&Vec<u32>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let images: Vec<MPoly> = monos
            .iter()
            .map(|m| MPoly { terms: BTreeMap::from([(m.clone(), 1)]) }.compose(e, vars, p))
            .collect();
        let mut ycols: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for f in &images {
            for k in f.terms.keys() {
                let next = ycols.len();
                ycols.entry(k.clone()).or_insert(next);
            }
        }
        let ny = ycols.len();
        let width = ny + monos.len();

        // kernel of monomial -> image, via [image | identity]
        let mut ech = Echelon::new(p);
        let mut kernel = Vec::new();
        for (i, f) in images.iter().enumerate() {
            let mut v = vec![0u64; width];
            for (k, c) in &f.terms {
                v[ycols[k]] = *c;
            }
            v[ny + i] = 1;
            if let Some(rest) = ech.insert(v, ny) {
                kernel.push(rest[ny..].to_vec());
            }
        }
        if kernel.is_empty() {
            continue;
        }

        // the part already generated by lower relations
        let mut span = Echelon::new(p);
        for (wr, r) in &found {
            for mono in monomials_of_weight(&weights, w - wr) {
                let shifted = MPoly { terms: BTreeMap::from([(mono, 1)]) }.mul(r, p);
                let mut v = vec![0u64; monos.len()];
                for (k, c) in &shifted.terms {
                    v[index[k]] = *c;
                }
                span.insert(v, monos.len());
            }
        }
        for v in kernel {
            if span.insert(v.clone(), monos.len()).is_none() {
                let mut r = MPoly::zero();
                for (i, c) in v.iter().enumerate() {
                    if *c != 0 {
                        r.terms.insert(monos[i].clone(), *c);
                    }
                }
                found.push((w, r));
            }
        }
    }
    Ok(found.into_iter().map(|(_, r)| r).collect())
}
