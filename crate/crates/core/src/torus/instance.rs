//! Text form of a return-set instance.
//!
//! ```text
//! p: 5
//! N: 2
//! matrix: 1,1; 0,1
//! y: 0,1/1; 1,1/1
//! alpha: 1/1; 1/1
//! equation: 1,0 : 1/1; 0,0 : 4/1
//! n_max: 40
//! ```
//!
//! Coordinates are `num/den` with comma-separated coefficients, lowest
//! degree first. Each `equation` line is a `;`-separated list of
//! `exponents : coefficient` terms; no equation lines means the whole torus.

use num_bigint::BigInt;

use crate::arith::{PrimeModulus, RatFunc};
use crate::error::{Error, Result};
use crate::intalg::IntMatrix;
use crate::textfmt::{split_list, Document};

use super::{Equation, TorusPoint, TorusSelfMap, Variety};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusInstance {
    pub map: TorusSelfMap,
    pub alpha: TorusPoint,
    pub variety: Variety,
    pub n_max: u64,
}

impl TorusInstance {
    pub fn new(map: TorusSelfMap, alpha: TorusPoint, variety: Variety, n_max: u64) -> Result<Self> {
        if map.dim() != alpha.dim() || map.dim() != variety.dim() {
            return Err(Error::Validation("map, start point and variety have different dimensions".into()));
        }
        if map.modulus() != alpha.modulus() {
            return Err(Error::Validation("map and start point over different primes".into()));
        }
        Ok(TorusInstance { map, alpha, variety, n_max })
    }

    pub fn p(&self) -> PrimeModulus {
        self.map.modulus()
    }

    pub fn write_into(&self, d: &mut Document) {
        d.push("p", self.p());
        d.push("N", self.map.dim());
        let rows: Vec<String> = self
            .map
            .a
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        d.push("matrix", rows.join("; "));
        d.push("y", point_text(&self.map.y));
        d.push("alpha", point_text(&self.alpha));
        for eq in self.variety.equations() {
            let terms: Vec<String> = eq
                .iter()
                .map(|(e, c)| {
                    let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                    format!("{} : {c}", exps.join(","))
                })
                .collect();
            d.push("equation", terms.join("; "));
        }
        d.push("n_max", self.n_max);
    }

    pub fn to_document(&self) -> Document {
        let mut d = Document::new();
        self.write_into(&mut d);
        d
    }

    pub fn from_document(d: &Document) -> Result<Self> {
        if d.entries().is_empty() {
            return Err(Error::Validation("empty instance".into()));
        }
        let p = PrimeModulus::new(d.require_parsed("p")?)?;
        let n: usize = d.require_parsed("N")?;
        if n == 0 {
            return Err(Error::Validation("N must be positive".into()));
        }
        let rows: Vec<Vec<BigInt>> = split_list(d.require("matrix")?, ';')
            .iter()
            .map(|r| {
                split_list(r, ',')
                    .iter()
                    .map(|x| x.parse().map_err(|_| Error::Parse(format!("bad matrix entry `{x}`"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation(format!("matrix must be {n}x{n}")));
        }
        let a = IntMatrix::from_rows(rows)?;
        let y = parse_point(d.require("y")?, n, p)?;
        let alpha = parse_point(d.require("alpha")?, n, p)?;
        let mut equations = Vec::new();
        for line in d.get_all("equation") {
            let mut eq: Equation = Vec::new();
            for term in split_list(line, ';') {
                let (e, c) = term
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("equation term `{term}` lacks `:`")))?;
                let exps = split_list(e, ',')
                    .iter()
                    .map(|x| x.parse::<i64>().map_err(|_| Error::Parse(format!("bad exponent `{x}`"))))
                    .collect::<Result<Vec<_>>>()?;
                eq.push((exps, RatFunc::parse(c, p)?));
            }
            equations.push(eq);
        }
        let variety = Variety::new(n, equations)?;
        let n_max = d.require_parsed("n_max")?;
        TorusInstance::new(TorusSelfMap::new(a, y)?, alpha, variety, n_max)
    }
}

fn point_text(x: &TorusPoint) -> String {
    x.coords().iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; ")
}

fn parse_point(s: &str, n: usize, p: PrimeModulus) -> Result<TorusPoint> {
    let coords = split_list(s, ';').iter().map(|c| RatFunc::parse(c, p)).collect::<Result<Vec<_>>>()?;
    if coords.len() != n {
        return Err(Error::Validation(format!("expected {n} coordinates, got {}", coords.len())));
    }
    TorusPoint::new(coords)
}
