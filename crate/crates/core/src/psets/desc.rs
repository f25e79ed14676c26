use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{pset_enumerate, pset_membership, ArithProg, PSet};
use crate::arith::PrimeModulus;
use crate::error::{Error, Result};
use crate::textfmt::{split_list, Document};

/// A finite union of arithmetic progressions, p-sets and exceptional points.
///
/// `verified_bound` is `Some(b)` only after the membership predicate has been
/// compared with an oracle at every `n` in `[0, b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnSetDesc {
    pub p: PrimeModulus,
    pub aps: Vec<ArithProg>,
    pub psets: Vec<PSet>,
    pub exceptional: Vec<u64>,
    pub verified_bound: Option<u64>,
}

impl ReturnSetDesc {
    pub fn new(p: PrimeModulus, aps: Vec<ArithProg>, psets: Vec<PSet>, mut exceptional: Vec<u64>) -> Self {
        exceptional.sort_unstable();
        exceptional.dedup();
        ReturnSetDesc { p, aps, psets, exceptional, verified_bound: None }
    }

    pub fn contains(&self, n: u64) -> Result<bool> {
        if self.aps.iter().any(|a| a.contains(n)) || self.exceptional.binary_search(&n).is_ok() {
            return Ok(true);
        }
        let big = BigInt::from(n);
        for s in &self.psets {
            if pset_membership(&big, s, self.p)?.is_some() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Indicator of the members in `[0, bound]`.
    pub fn members_up_to(&self, bound: u64) -> Result<Vec<bool>> {
        let len = usize::try_from(bound)
            .ok()
            .and_then(|b| b.checked_add(1))
            .ok_or_else(|| Error::Resource("bound too large".into()))?;
        let mut hit = vec![false; len];
        for a in &self.aps {
            if a.modulus == 0 {
                if a.offset <= bound {
                    hit[a.offset as usize] = true;
                }
            } else {
                let mut n = a.offset;
                while n <= bound {
                    hit[n as usize] = true;
                    n += a.modulus;
                }
            }
        }
        for s in &self.psets {
            for x in pset_enumerate(s, self.p, &BigInt::from(bound))? {
                hit[x.to_usize().expect("within bound")] = true;
            }
        }
        for &e in &self.exceptional {
            if e <= bound {
                hit[e as usize] = true;
            }
        }
        Ok(hit)
    }

    /// True when no p-set has a term with a positive exponent step.
    pub fn is_ap_only(&self) -> bool {
        self.psets.iter().all(|s| s.nontrivial_count() == 0)
    }

    pub fn to_document(&self) -> Document {
        let mut d = Document::new();
        self.write_into(&mut d);
        d
    }

    pub fn write_into(&self, d: &mut Document) {
        d.push("p", self.p);
        d.push("aps", self.aps.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "));
        d.push("psets", self.psets.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "));
        d.push("exceptional", self.exceptional.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
        d.push("verified_bound", self.verified_bound.map_or("none".to_string(), |b| b.to_string()));
    }

    pub fn from_document(d: &Document) -> Result<Self> {
        let p = PrimeModulus::new(d.require_parsed("p")?)?;
        let aps = split_list(d.require("aps")?, ';').into_iter().map(str::parse).collect::<Result<Vec<_>>>()?;
        let psets = split_list(d.require("psets")?, ';').into_iter().map(str::parse).collect::<Result<Vec<_>>>()?;
        let exceptional = split_list(d.require("exceptional")?, ',')
            .into_iter()
            .map(|v| v.parse::<u64>().map_err(|_| Error::Parse(format!("bad exceptional point `{v}`"))))
            .collect::<Result<Vec<_>>>()?;
        let verified_bound = match d.require("verified_bound")? {
            "none" => None,
            v => Some(v.parse().map_err(|_| Error::Parse(format!("bad verified_bound `{v}`")))?),
        };
        let mut out = ReturnSetDesc::new(p, aps, psets, exceptional);
        out.verified_bound = verified_bound;
        Ok(out)
    }
}

impl fmt::Display for ReturnSetDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_document().render())
    }
}

/// Compares `d` with `oracle` at every `n` in `[0, bound]`; on agreement
/// records `bound` as the verified bound.
pub fn desc_verify(d: &mut ReturnSetDesc, mut oracle: impl FnMut(u64) -> bool, bound: u64) -> Result<bool> {
    let hit = d.members_up_to(bound)?;
    let agree = hit.iter().enumerate().all(|(n, &h)| h == oracle(n as u64));
    if agree {
        d.verified_bound = Some(bound);
    }
    Ok(agree)
}
