//! Polynomial-exponential equations `u_n = c_1 p^(k_1 n_1) + ... + c_m p^(k_m n_m)`
//! for a linear recurrence `u`, and sums of recurrences along progressions.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};
use crate::intalg::exact_log;
use crate::lrs::{Lrs, DEFAULT_CYCLOTOMIC_BOUND};
use crate::psets::fit::{fit_description, FitShape};
use crate::psets::{desc_verify, pset_membership, ArithProg, PSet, ReturnSetDesc};
use crate::textfmt::Document;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PexpInstance {
    pub u: Lrs,
    pub p: PrimeModulus,
    /// `(c_i, k_i)`; empty is the void equation, satisfied by every `n`.
    pub terms: Vec<(BigInt, u32)>,
}

/// One solution `n` with the least exponent witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PexpSolution {
    pub n: u64,
    pub witness: Vec<u64>,
}

impl PexpInstance {
    pub fn new(u: Lrs, p: PrimeModulus, terms: Vec<(BigInt, u32)>) -> Self {
        PexpInstance { u, p, terms }
    }

    /// The right-hand side as a p-set, `None` for the void equation.
    pub fn pset(&self) -> Option<PSet> {
        if self.terms.is_empty() {
            return None;
        }
        let terms = self.terms.iter().map(|(c, k)| (BigRational::from_integer(c.clone()), *k)).collect();
        Some(PSet::new(terms).expect("nonempty"))
    }

    pub fn nontrivial_terms(&self) -> usize {
        self.terms.iter().filter(|(c, k)| *k > 0 && !c.is_zero()).count()
    }

    pub fn write_into(&self, d: &mut Document) {
        d.push("p", self.p);
        d.push("lrs", &self.u);
        d.push("terms", self.pset().map_or(String::new(), |s| s.to_string()));
    }

    /// Reads `p`, `lrs` and `terms` (a p-set with integer coefficients, possibly empty).
    pub fn from_document(d: &Document) -> Result<Self> {
        let p = PrimeModulus::new(d.require_parsed("p")?)?;
        let u: Lrs = d.require("lrs")?.parse()?;
        let terms_text = d.require("terms")?;
        let terms = if terms_text.is_empty() {
            Vec::new()
        } else {
            let s: PSet = terms_text.parse()?;
            s.terms()
                .iter()
                .map(|t| {
                    if t.coeff.is_integer() {
                        Ok((t.coeff.to_integer(), t.step))
                    } else {
                        Err(Error::Validation(format!("coefficient {} is not an integer", t.coeff)))
                    }
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(PexpInstance { u, p, terms })
    }
}

/// Tab-separated `n, n_1, ..., n_m`, one solution per line.
pub fn witness_table(solutions: &[PexpSolution]) -> String {
    let mut out = String::new();
    for s in solutions {
        out.push_str(&s.n.to_string());
        for w in &s.witness {
            out.push('\t');
            out.push_str(&w.to_string());
        }
        out.push('\n');
    }
    out
}

/// All `n <= n_max` for which `u_n` is representable, with least witnesses.
pub fn pexp_solve(inst: &PexpInstance, n_max: u64) -> Result<Vec<PexpSolution>> {
    let Some(set) = inst.pset() else {
        return Ok((0..=n_max).map(|n| PexpSolution { n, witness: Vec::new() }).collect());
    };
    let mut out = Vec::new();
    for (n, value) in (0..=n_max).zip(inst.u.iter()) {
        if let Some(witness) = pset_membership(&value, &set, inst.p)? {
            out.push(PexpSolution { n, witness });
        }
    }
    Ok(out)
}

/// Which branch of the classification produced a description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyPath {
    /// No terms: every index solves.
    Void,
    /// All roots are integers independent of `p`: progressions and points only.
    ProgressionsOnly,
    /// At most two nontrivial terms: progressions, two-term p-sets and points.
    WithPsets,
    /// Anything else: the raw solutions as exceptional points.
    Raw,
}

impl fmt::Display for ClassifyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifyPath::Void => "void",
            ClassifyPath::ProgressionsOnly => "progressions-only",
            ClassifyPath::WithPsets => "with-psets",
            ClassifyPath::Raw => "raw",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub desc: ReturnSetDesc,
    /// Path taken on each piece of the non-degenerate split, in offset order.
    pub paths: Vec<ClassifyPath>,
    pub split_modulus: u64,
    /// Reasons a more specific path could not be used.
    pub flags: Vec<String>,
    pub solutions: Vec<PexpSolution>,
}

/// Describes the solution set on `[0, n_max]` and verifies the description there.
///
/// The recurrence is first split into non-degenerate pieces along residue
/// classes; each piece is fitted in its own index `k` (with `n = M k + r`)
/// and the pieces are mapped back and merged.
pub fn pexp_classify(inst: &PexpInstance, n_max: u64) -> Result<Classification> {
    let solutions = pexp_solve(inst, n_max)?;
    let hits: Vec<u64> = solutions.iter().map(|s| s.n).collect();
    let hit_set: BTreeSet<u64> = hits.iter().copied().collect();
    let mut flags = Vec::new();
    if inst.terms.is_empty() {
        let mut desc = ReturnSetDesc::new(inst.p, vec![ArithProg::new(1, 0)], Vec::new(), Vec::new());
        if !desc_verify(&mut desc, |n| hit_set.contains(&n), n_max)? {
            return Err(Error::Invariant("void equation description failed verification".into()));
        }
        return Ok(Classification { desc, paths: vec![ClassifyPath::Void], split_modulus: 1, flags, solutions });
    }
    let pieces: Vec<(u64, u64, Lrs)> = match inst.u.nondegenerate_split(DEFAULT_CYCLOTOMIC_BOUND) {
        Ok(split) => split.pieces.into_iter().map(|pc| (pc.step, pc.offset, pc.seq)).collect(),
        Err(Error::Unsupported(msg)) => {
            flags.push(format!("non-degenerate split unavailable: {msg}"));
            vec![(1, 0, inst.u.clone())]
        }
        Err(e) => return Err(e),
    };
    let modulus = pieces[0].0;
    let mut aps = Vec::new();
    let mut psets = Vec::new();
    let mut exceptional = Vec::new();
    let mut paths = Vec::new();
    for (step, offset, seq) in &pieces {
        if *offset > n_max {
            paths.push(ClassifyPath::Raw);
            continue;
        }
        let k_max = (n_max - offset) / step;
        let local: Vec<u64> = hits.iter().filter(|&&n| n >= *offset && (n - offset) % step == 0).map(|n| (n - offset) / step).collect();
        let roots = seq.char_roots();
        let dependence = roots.p_dependence(inst.p);
        let path = if roots.is_split() && dependence.all_independent() {
            ClassifyPath::ProgressionsOnly
        } else if inst.nontrivial_terms() <= 2 {
            if !roots.is_split() {
                flags.push(format!("piece {offset} mod {step}: characteristic roots not all integers"));
            }
            ClassifyPath::WithPsets
        } else {
            flags.push(format!("piece {offset} mod {step}: more than two nontrivial terms"));
            ClassifyPath::Raw
        };
        let piece_desc = match path {
            ClassifyPath::ProgressionsOnly => fit_description(&local, k_max, inst.p, FitShape::ApOnly)?,
            ClassifyPath::WithPsets => fit_description(&local, k_max, inst.p, FitShape::ApAndPsets)?,
            _ => ReturnSetDesc::new(inst.p, Vec::new(), Vec::new(), local.clone()),
        };
        for a in piece_desc.aps {
            aps.push(if a.modulus == 0 {
                ArithProg::singleton(a.offset * step + offset)
            } else {
                ArithProg::new(a.modulus * step, a.offset * step + offset)
            });
        }
        for s in piece_desc.psets {
            psets.push(rescale_pset(&s, *step, *offset));
        }
        exceptional.extend(piece_desc.exceptional.iter().map(|k| k * step + offset));
        paths.push(path);
    }
    let mut desc = ReturnSetDesc::new(inst.p, aps, psets, exceptional);
    if !desc_verify(&mut desc, |n| hit_set.contains(&n), n_max)? {
        flags.push("fitted description failed verification; reporting raw solutions".into());
        desc = ReturnSetDesc::new(inst.p, Vec::new(), Vec::new(), hits.clone());
        if !desc_verify(&mut desc, |n| hit_set.contains(&n), n_max)? {
            return Err(Error::Invariant("raw description failed verification".into()));
        }
        paths = vec![ClassifyPath::Raw; paths.len()];
    }
    Ok(Classification { desc, paths, split_modulus: modulus, flags, solutions })
}

/// `{step * x + offset : x in s}`.
fn rescale_pset(s: &PSet, step: u64, offset: u64) -> PSet {
    if step == 1 && offset == 0 {
        return s.clone();
    }
    let scale = BigRational::from_integer(step.into());
    let mut terms: Vec<(BigRational, u32)> = s.terms().iter().map(|t| (&t.coeff * &scale, t.step)).collect();
    if offset != 0 {
        terms.push((BigRational::from_integer(offset.into()), 0));
    }
    PSet::new(terms).expect("nonempty")
}

/// `U_n = U^(1)_(n_1) + ... + U^(m)_(n_m)` for `n` in an arithmetic progression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FArithSeq {
    pub ap: ArithProg,
    pub u: Lrs,
    pub parts: Vec<Lrs>,
    pub p: PrimeModulus,
}

/// How one part enters the equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartForm {
    /// A constant sequence: a fixed summand.
    Trivial(BigInt),
    /// `d + gamma p^(b k)`: a constant plus one p-set term.
    PsetTerm { constant: BigRational, coeff: BigRational, step: u32 },
    /// Anything else: searched over `k <= cap`.
    Searched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FArithOutcome {
    pub solutions: Vec<u64>,
    /// Indices where the bounded search over unconverted parts found nothing;
    /// these are undecided, not non-solutions.
    pub cap_exhausted: Vec<u64>,
    pub search_cap: u64,
}

/// Classifies a part: constant, one root `p^b` (plus possibly root 1), or neither.
pub fn part_form(part: &Lrs, p: PrimeModulus) -> PartForm {
    let d = part.order();
    let head = part.terms(d + 1);
    if head.iter().all(|x| *x == head[0]) {
        return PartForm::Trivial(head[0].clone());
    }
    let roots = part.char_roots();
    if !roots.is_split() || roots.integer_roots.iter().any(|(_, m)| *m > 1) {
        return PartForm::Searched;
    }
    let mut big_root = None;
    for (r, _) in &roots.integer_roots {
        if r.is_one() {
            continue;
        }
        match (exact_log(r, p.get()), big_root) {
            (Some(b), None) if b >= 1 && r.is_positive() => big_root = Some(b),
            _ => return PartForm::Searched,
        }
    }
    let Some(b) = big_root else { return PartForm::Searched };
    let has_one = roots.integer_roots.iter().any(|(r, _)| r.is_one());
    // u_k = constant + gamma (p^b)^k: read gamma and the constant off u_0, u_1
    let lambda = BigRational::from_integer(BigInt::from(p.get()).pow(b));
    let (u0, u1) = (BigRational::from_integer(head[0].clone()), BigRational::from_integer(head[1].clone()));
    let (constant, coeff) = if has_one {
        let gamma = (&u1 - &u0) / (&lambda - BigRational::one());
        (&u0 - &gamma, gamma)
    } else {
        (BigRational::zero(), u0)
    };
    PartForm::PsetTerm { constant, coeff, step: b }
}

/// Indices `n = a k + b <= n_max` at which `U_n` is a sum of part values.
pub fn farith_solve(seq: &FArithSeq, n_max: u64) -> Result<FArithOutcome> {
    let indices: Vec<u64> = if seq.ap.modulus == 0 {
        if seq.ap.offset <= n_max { vec![seq.ap.offset] } else { Vec::new() }
    } else {
        (seq.ap.offset..=n_max).step_by(seq.ap.modulus as usize).collect()
    };
    if seq.parts.is_empty() {
        // the void equation
        return Ok(FArithOutcome { solutions: indices, cap_exhausted: Vec::new(), search_cap: 0 });
    }
    let values: Vec<BigInt> = {
        let mut out = Vec::with_capacity(indices.len());
        let mut it = seq.u.iter().enumerate();
        for &n in &indices {
            let v = it.by_ref().find(|(i, _)| *i as u64 == n).map(|(_, v)| v).expect("iterator is infinite");
            out.push(v);
        }
        out
    };
    let mut fixed = BigRational::zero();
    let mut pset_terms: Vec<(BigRational, u32)> = Vec::new();
    let mut searched: Vec<&Lrs> = Vec::new();
    for part in &seq.parts {
        match part_form(part, seq.p) {
            PartForm::Trivial(c) => fixed += BigRational::from_integer(c),
            PartForm::PsetTerm { constant, coeff, step } => {
                fixed += constant;
                pset_terms.push((coeff, step));
            }
            PartForm::Searched => searched.push(part),
        }
    }
    let max_abs = values.iter().map(|v| v.abs()).max().unwrap_or_default();
    let cap = search_cap(&max_abs, seq.p);
    let searched_values: Vec<Vec<BigInt>> = searched.iter().map(|s| s.terms(cap as usize + 1)).collect();
    let pset = if pset_terms.is_empty() { None } else { Some(PSet::new(pset_terms)?) };
    let mut solutions = Vec::new();
    let mut cap_exhausted = Vec::new();
    for (&n, value) in indices.iter().zip(&values) {
        let target = BigRational::from_integer(value.clone()) - &fixed;
        if representable(&target, &searched_values, pset.as_ref(), seq.p)? {
            solutions.push(n);
        } else if !searched_values.is_empty() {
            cap_exhausted.push(n);
        }
    }
    Ok(FArithOutcome { solutions, cap_exhausted, search_cap: cap })
}

/// `4 log_p(1 + |U|) + 16`.
fn search_cap(max_abs: &BigInt, p: PrimeModulus) -> u64 {
    let bits = (max_abs + 1u32).bits() as f64;
    (4.0 * (bits / (p.get() as f64).log2())).ceil() as u64 + 16
}

/// Whether `target` is a sum of one value from each searched list plus an element of `pset`.
fn representable(target: &BigRational, searched: &[Vec<BigInt>], pset: Option<&PSet>, p: PrimeModulus) -> Result<bool> {
    let Some((first, rest)) = searched.split_first() else {
        return Ok(match pset {
            None => target.is_zero(),
            Some(s) if target.is_integer() => pset_membership(&target.to_integer(), s, p)?.is_some(),
            Some(s) => rational_membership(target, s, p)?,
        });
    };
    for v in first {
        if representable(&(target - BigRational::from_integer(v.clone())), rest, pset, p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Membership of a non-integral rational, by moving it into the p-set as a constant.
fn rational_membership(target: &BigRational, s: &PSet, p: PrimeModulus) -> Result<bool> {
    let mut terms: Vec<(BigRational, u32)> = s.terms().iter().map(|t| (t.coeff.clone(), t.step)).collect();
    terms.push((-target.clone(), 0));
    Ok(pset_membership(&BigInt::zero(), &PSet::new(terms)?, p)?.is_some())
}

/// Indices solving every sequence, sorted; undecided indices that survive
/// the other sequences turn into a cap error.
pub fn general_farith_intersect(seqs: &[FArithSeq], n_max: u64) -> Result<Vec<u64>> {
    if seqs.is_empty() {
        return Err(Error::Usage("need at least one F-arithmetic sequence".into()));
    }
    let outcomes = seqs.iter().map(|s| farith_solve(s, n_max)).collect::<Result<Vec<_>>>()?;
    let possible = |o: &FArithOutcome, n: u64| o.solutions.binary_search(&n).is_ok() || o.cap_exhausted.binary_search(&n).is_ok();
    let mut out = Vec::new();
    let candidates: BTreeSet<u64> = outcomes[0].solutions.iter().chain(&outcomes[0].cap_exhausted).copied().collect();
    for n in candidates {
        if !outcomes.iter().all(|o| possible(o, n)) {
            continue;
        }
        if let Some(o) = outcomes.iter().find(|o| o.cap_exhausted.binary_search(&n).is_ok()) {
            return Err(Error::CapExhausted(format!("index {n} undecided within search cap {}", o.search_cap)));
        }
        out.push(n);
    }
    Ok(out)
}
