//! Heuristic fitting of arithmetic progressions and p-sets to a finite list
//! of solutions. Every result here is a guess; callers verify it with
//! [`desc_verify`](super::desc_verify) before reporting it.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{pset_enumerate, ArithProg, PSet, ReturnSetDesc};
use crate::arith::PrimeModulus;
use crate::error::Result;

/// Largest AP modulus tried.
pub const AP_PERIOD_CAP: u64 = 360;
/// Largest exponent step tried for fitted p-set terms.
pub const MAX_FIT_STEP: u32 = 4;
/// A fitted p-set must account for at least this many solutions.
pub const MIN_COVER: usize = 3;
/// How many of the smallest unexplained solutions anchor the hypotheses.
const ANCHORS: usize = 5;

/// Which structures the fit may use besides exceptional points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitShape {
    /// Only arithmetic progressions.
    ApOnly,
    /// Progressions plus p-sets with at most two nontrivial terms and a constant.
    ApAndPsets,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApFit {
    pub aps: Vec<ArithProg>,
    pub residual: Vec<u64>,
}

/// Progressions whose residue class is entirely solutions throughout the
/// upper half of `[0, n_max]` (with at least three members there), extended
/// downwards as far as the class stays solutions.
pub fn extract_aps(solutions: &[u64], n_max: u64) -> ApFit {
    let hit = indicator(solutions, n_max);
    let half = n_max.div_ceil(2);
    let mut best: Option<(usize, u64, Vec<ArithProg>)> = None;
    let cap = AP_PERIOD_CAP.min(n_max / 6);
    for q in 1..=cap {
        let mut aps = Vec::new();
        let mut covered = vec![false; hit.len()];
        for r in 0..q {
            let first = half + (r + q - half % q) % q;
            let mut count = 0;
            let mut full = true;
            let mut n = first;
            while n <= n_max {
                if !hit[n as usize] {
                    full = false;
                    break;
                }
                count += 1;
                n += q;
            }
            if !full || count < 3 {
                continue;
            }
            let mut start = first;
            while start >= q && hit[(start - q) as usize] {
                start -= q;
            }
            let mut n = start;
            while n <= n_max {
                covered[n as usize] = true;
                n += q;
            }
            aps.push(ArithProg::new(q, start));
        }
        if aps.is_empty() {
            continue;
        }
        let uncovered = (half..=n_max).filter(|&n| hit[n as usize] && !covered[n as usize]).count();
        if best.as_ref().is_none_or(|b| uncovered < b.0) {
            best = Some((uncovered, q, aps));
        }
    }
    let aps = best.map(|b| b.2).unwrap_or_default();
    let residual = solutions.iter().copied().filter(|&n| !aps.iter().any(|a| a.contains(n))).collect();
    ApFit { aps, residual }
}

fn indicator(solutions: &[u64], n_max: u64) -> Vec<bool> {
    let mut hit = vec![false; n_max as usize + 1];
    for &n in solutions {
        if n <= n_max {
            hit[n as usize] = true;
        }
    }
    hit
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsetFit {
    pub psets: Vec<PSet>,
    pub leftover: Vec<u64>,
}

/// Greedily covers `residual` with p-sets `d0 + d1 p^(l1 n1) [+ d2 p^(l2 n2)]`
/// whose elements up to `bound` all lie in `universe`. Each p-set uses at
/// most `max_terms` terms counting a nonzero constant.
pub fn fit_psets_within(
    residual: &[u64],
    universe: &BTreeSet<u64>,
    p: PrimeModulus,
    bound: u64,
    max_terms: usize,
) -> Result<PsetFit> {
    let mut remaining: BTreeSet<u64> = residual.iter().copied().collect();
    let mut psets = Vec::new();
    while remaining.len() >= MIN_COVER {
        let anchors: Vec<u64> = remaining.iter().take(ANCHORS).copied().collect();
        let mut tried: HashSet<PSet> = HashSet::new();
        let mut best: Option<(usize, usize, PSet, Vec<u64>)> = None;
        for cand in hypotheses(&anchors, p, max_terms) {
            if !tried.insert(cand.clone()) {
                continue;
            }
            let Some(elements) = elements_within(&cand, p, bound, universe)? else { continue };
            let cover: Vec<u64> = elements.into_iter().filter(|e| remaining.contains(e)).collect();
            if cover.len() < MIN_COVER {
                continue;
            }
            let better = match &best {
                None => true,
                Some((c, t, _, _)) => cover.len() > *c || (cover.len() == *c && cand.len() < *t),
            };
            if better {
                best = Some((cover.len(), cand.len(), cand, cover));
            }
        }
        let Some((_, _, set, cover)) = best else { break };
        for e in cover {
            remaining.remove(&e);
        }
        psets.push(set);
    }
    Ok(PsetFit { psets, leftover: remaining.into_iter().collect() })
}

/// [`fit_psets_within`] with the residual itself as the universe.
pub fn fit_psets(residual: &[u64], p: PrimeModulus, bound: u64, max_terms: usize) -> Result<PsetFit> {
    let universe: BTreeSet<u64> = residual.iter().copied().collect();
    fit_psets_within(residual, &universe, p, bound, max_terms)
}

/// Elements of `s` up to `bound` if they all lie in `universe`.
fn elements_within(s: &PSet, p: PrimeModulus, bound: u64, universe: &BTreeSet<u64>) -> Result<Option<Vec<u64>>> {
    let mut out = Vec::new();
    for x in pset_enumerate(s, p, &BigInt::from(bound))? {
        let v = x.to_u64().expect("within bound");
        if !universe.contains(&v) {
            return Ok(None);
        }
        out.push(v);
    }
    Ok(Some(out))
}

fn rat(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn build(d0: BigRational, nontrivial: Vec<(BigRational, u32)>, max_terms: usize) -> Option<PSet> {
    if nontrivial.iter().any(|(c, _)| !c.is_positive()) {
        return None;
    }
    let mut terms = nontrivial;
    if !d0.is_zero() {
        terms.push((d0, 0));
    }
    if terms.len() > max_terms {
        return None;
    }
    PSet::new(terms).ok()
}

/// Candidate p-sets through some of the anchors at small exponents.
fn hypotheses(anchors: &[u64], p: PrimeModulus, max_terms: usize) -> Vec<PSet> {
    let pw = |e: u32| rat(p.get()).pow(e as i32);
    let mut out = Vec::new();
    if max_terms == 0 {
        return out;
    }
    let n = anchors.len();
    for l in 1..=MAX_FIT_STEP {
        for i in 0..n {
            for j in i + 1..n {
                let d1 = (rat(anchors[j]) - rat(anchors[i])) / (pw(l) - BigRational::one());
                let d0 = rat(anchors[i]) - &d1;
                out.extend(build(d0, vec![(d1, l)], max_terms));
            }
        }
    }
    if max_terms < 2 {
        return out;
    }
    const PAIRS: [(u32, u32); 6] = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)];
    for l1 in 1..=MAX_FIT_STEP {
        for l2 in l1..=MAX_FIT_STEP {
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let rs = [anchors[i], anchors[j], anchors[k]];
                        for a in 0..6 {
                            for b in 0..6 {
                                for c in 0..6 {
                                    if a == b || b == c || a == c {
                                        continue;
                                    }
                                    let rows: Vec<[BigRational; 3]> = [PAIRS[a], PAIRS[b], PAIRS[c]]
                                        .iter()
                                        .map(|&(e1, e2)| [BigRational::one(), pw(l1 * e1), pw(l2 * e2)])
                                        .collect();
                                    let Some([d0, d1, d2]) = solve3(&rows, &rs.map(rat)) else { continue };
                                    out.extend(build(d0, vec![(d1, l1), (d2, l2)], max_terms));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn det3(m: &[[BigRational; 3]]) -> BigRational {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Cramer's rule; `None` when singular.
fn solve3(m: &[[BigRational; 3]], rhs: &[BigRational; 3]) -> Option<[BigRational; 3]> {
    let d = det3(m);
    if d.is_zero() {
        return None;
    }
    let col = |c: usize| {
        let replaced: Vec<[BigRational; 3]> = m
            .iter()
            .zip(rhs)
            .map(|(row, r)| {
                let mut row = row.clone();
                row[c] = r.clone();
                row
            })
            .collect();
        det3(&replaced) / &d
    };
    Some([col(0), col(1), col(2)])
}

/// An unverified description of `solutions` within `[0, n_max]`.
pub fn fit_description(solutions: &[u64], n_max: u64, p: PrimeModulus, shape: FitShape) -> Result<ReturnSetDesc> {
    let ApFit { aps, residual } = extract_aps(solutions, n_max);
    let (psets, exceptional) = match shape {
        FitShape::ApOnly => (Vec::new(), residual),
        FitShape::ApAndPsets => {
            let universe: BTreeSet<u64> = solutions.iter().copied().collect();
            let fit = fit_psets_within(&residual, &universe, p, n_max, 3)?;
            (fit.psets, fit.leftover)
        }
    };
    Ok(ReturnSetDesc::new(p, aps, psets, exceptional))
}
