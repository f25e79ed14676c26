//! Deciding whether `sum_i w_i prod_b b^(H_ib)` vanishes in `F_p[t]` when the
//! exponents are far too large to expand densely.
//!
//! A nonzero residue modulo an irreducible `g` proves the sum nonzero; the
//! powers are reduced with exponents taken modulo `p^deg(g) - 1`. When every
//! residue vanishes the sum is expanded exactly in sparse form, writing
//! `b^H` as `prod_i b(t^(p^i))^(h_i)` over the base-p digits `h_i` of `H`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{FpPoly, PrimeModulus};
use crate::error::{Error, Result};

/// Number of irreducible moduli tried before expanding exactly.
const MODULI: usize = 3;
/// The moduli have `p^k` at least `2^MODULUS_BITS`.
const MODULUS_BITS: f64 = 62.0;
/// Largest sparse polynomial built during exact expansion.
const TERM_CAP: usize = 2_000_000;
/// Largest number of coefficient products in one sparse multiplication.
const WORK_CAP: u128 = 200_000_000;

/// One summand: an `F_p` weight times a monomial in the basis.
pub(crate) type Summand = (Vec<BigInt>, u64);

pub(crate) struct ZeroTester {
    p: PrimeModulus,
    basis: Vec<FpPoly>,
    moduli: Vec<Residues>,
}

struct Residues {
    g: FpPoly,
    /// `p^deg(g) - 1`, the order of `(F_p[t]/g)^*`.
    order: BigUint,
    /// Each basis element modulo `g`.
    basis: Vec<FpPoly>,
}

impl ZeroTester {
    pub(crate) fn new(p: PrimeModulus, basis: &[FpPoly]) -> Result<Self> {
        let moduli = moduli_for(p)?
            .into_iter()
            .map(|g| {
                let k = g.degree().expect("nonconstant") as u32;
                let order = BigUint::from(p.get()).pow(k) - 1u32;
                let basis = basis.iter().map(|b| b.rem(&g)).collect::<Result<Vec<_>>>()?;
                Ok(Residues { g, order, basis })
            })
            .collect::<Result<_>>()?;
        Ok(ZeroTester { p, basis: basis.to_vec(), moduli })
    }

    /// Whether the sum of the summands is the zero polynomial (or rational function).
    pub(crate) fn is_zero(&self, summands: &[Summand]) -> Result<bool> {
        let mut grouped: BTreeMap<&[BigInt], u64> = BTreeMap::new();
        for (exps, w) in summands {
            let e = grouped.entry(exps.as_slice()).or_insert(0);
            *e = (*e + w) % self.p.get();
        }
        grouped.retain(|_, w| *w != 0);
        if grouped.len() <= 1 {
            return Ok(grouped.is_empty());
        }
        // clear denominators: shift every exponent by the least one in its column
        let width = self.basis.len();
        let mins: Vec<BigInt> = (0..width)
            .map(|b| grouped.keys().map(|e| e[b].clone()).min().expect("nonempty"))
            .collect();
        let shifted: Vec<(Vec<BigInt>, u64)> = grouped
            .iter()
            .map(|(e, w)| (e.iter().zip(&mins).map(|(x, m)| x - m).collect(), *w))
            .collect();
        for r in &self.moduli {
            if !self.residue(r, &shifted).is_zero() {
                return Ok(false);
            }
        }
        self.expand_is_zero(&shifted)
    }

    fn residue(&self, r: &Residues, terms: &[(Vec<BigInt>, u64)]) -> FpPoly {
        // monomials of one equation share most of their exponents
        let mut powers: HashMap<(usize, &BigInt), FpPoly> = HashMap::new();
        let mut acc = FpPoly::zero(self.p);
        for (exps, w) in terms {
            let mut prod = FpPoly::constant(*w, self.p);
            for (i, (e, b)) in exps.iter().zip(&r.basis).enumerate() {
                if e.is_zero() {
                    continue;
                }
                if b.is_zero() {
                    prod = FpPoly::zero(self.p);
                    break;
                }
                let pw = powers.entry((i, e)).or_insert_with(|| b.powmod(&(e.magnitude() % &r.order), &r.g));
                prod = prod.mulmod(pw, &r.g);
            }
            acc = &acc + &prod;
        }
        acc
    }

    fn expand_is_zero(&self, terms: &[(Vec<BigInt>, u64)]) -> Result<bool> {
        let pb = BigInt::from(self.p.get());
        let mut total: HashMap<u128, u64> = HashMap::new();
        for (exps, w) in terms {
            let degree: BigInt = exps.iter().zip(&self.basis).map(|(e, b)| e * b.degree().unwrap_or(0)).sum();
            if degree.bits() > 120 {
                return Err(Error::Resource(format!("exact expansion of degree {degree} is out of reach")));
            }
            let mut poly: Vec<(u128, u64)> = vec![(0, *w)];
            for (e, b) in exps.iter().zip(&self.basis) {
                let mut rest = e.clone();
                let mut scale: u128 = 1;
                while rest.is_positive() {
                    let digit = (&rest % &pb).to_u64().expect("digit");
                    rest /= &pb;
                    if digit > 0 {
                        let dense = b.pow(digit)?;
                        let factor: Vec<(u128, u64)> = dense
                            .coeffs()
                            .iter()
                            .enumerate()
                            .filter(|(_, c)| **c != 0)
                            .map(|(i, c)| (i as u128 * scale, *c))
                            .collect();
                        poly = sparse_mul(&poly, &factor, self.p)?;
                    }
                    if rest.is_positive() {
                        scale = scale.checked_mul(self.p.get() as u128).ok_or_else(|| Error::Resource("exponent overflow".into()))?;
                    }
                }
            }
            for (d, c) in poly {
                let e = total.entry(d).or_insert(0);
                *e = (*e + c) % self.p.get();
            }
            if total.len() > TERM_CAP {
                return Err(Error::Resource("exact expansion exceeded the term cap".into()));
            }
        }
        Ok(total.values().all(|c| *c == 0))
    }
}

/// The fixed irreducible moduli for `p`, found once per process.
fn moduli_for(p: PrimeModulus) -> Result<Vec<FpPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<FpPoly>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(found) = cache.lock().expect("cache lock").get(&p.get()) {
        return Ok(found.clone());
    }
    let k = (MODULUS_BITS / (p.get() as f64).log2()).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ p.get());
    let mut moduli: Vec<FpPoly> = Vec::with_capacity(MODULI);
    while moduli.len() < MODULI {
        let mut coeffs: Vec<u64> = (0..k).map(|_| rng.gen_range(0..p.get())).collect();
        coeffs.push(1);
        let g = FpPoly::new(coeffs, p);
        if !moduli.contains(&g) && is_irreducible(&g)? {
            moduli.push(g);
        }
    }
    cache.lock().expect("cache lock").insert(p.get(), moduli.clone());
    Ok(moduli)
}

fn sparse_mul(a: &[(u128, u64)], b: &[(u128, u64)], p: PrimeModulus) -> Result<Vec<(u128, u64)>> {
    if (a.len() as u128) * (b.len() as u128) > WORK_CAP {
        return Err(Error::Resource("exact expansion exceeded the work cap".into()));
    }
    let mut out: HashMap<u128, u64> = HashMap::with_capacity(a.len() * b.len());
    for &(da, ca) in a {
        for &(db, cb) in b {
            let e = out.entry(da + db).or_insert(0);
            *e = ((*e as u128 + ca as u128 * cb as u128) % p.get() as u128) as u64;
        }
    }
    if out.len() > TERM_CAP {
        return Err(Error::Resource("exact expansion exceeded the term cap".into()));
    }
    let mut v: Vec<(u128, u64)> = out.into_iter().filter(|(_, c)| *c != 0).collect();
    v.sort_unstable();
    Ok(v)
}

/// Rabin's test: `t^(p^k) = t (mod g)` and `gcd(t^(p^(k/q)) - t, g) = 1` for primes `q | k`.
pub(crate) fn is_irreducible(g: &FpPoly) -> Result<bool> {
    let p = g.modulus();
    let k = match g.degree() {
        None | Some(0) => return Ok(false),
        Some(1) => return Ok(true),
        Some(k) => k,
    };
    let t = FpPoly::t(p);
    let pe = BigUint::from(p.get());
    let mut powers = Vec::with_capacity(k + 1); // powers[i] = t^(p^i) mod g
    powers.push(t.rem(g)?);
    for i in 1..=k {
        let next = powers[i - 1].powmod(&pe, g);
        powers.push(next);
    }
    if powers[k] != t.rem(g)? {
        return Ok(false);
    }
    let mut m = k;
    let mut q = 2;
    let mut primes = Vec::new();
    while q * q <= m {
        if m % q == 0 {
            primes.push(q);
            while m % q == 0 {
                m /= q;
            }
        }
        q += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for q in primes {
        let h = &powers[k / q] - &t;
        if !h.gcd(g)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}
