//! Integer polynomials and integer matrices over `BigInt`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A polynomial in `x` with `BigInt` coefficients, lowest degree first, trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn one() -> Self {
        IntPoly::from_i64s(&[1])
    }

    /// `x - r`.
    pub fn linear(r: &BigInt) -> Self {
        IntPoly::new(vec![-r, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, e: usize) -> IntPoly {
        (0..e).fold(IntPoly::one(), |acc, _| acc.mul(self))
    }

    /// Division by a monic polynomial; returns `(quotient, remainder)`.
    pub fn divmod_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dl = divisor.coeffs.len();
        if self.coeffs.len() < dl {
            return (IntPoly::new(vec![]), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); rem.len() - dl + 1];
        for shift in (0..quot.len()).rev() {
            let q = rem[shift + dl - 1].clone();
            if q.is_zero() {
                continue;
            }
            for (k, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + k] -= &q * d;
            }
            quot[shift] = q;
        }
        rem.truncate(dl - 1);
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// The M-th cyclotomic polynomial.
    pub fn cyclotomic(m: usize) -> IntPoly {
        assert!(m >= 1);
        let mut xm1 = vec![BigInt::zero(); m + 1];
        xm1[0] = BigInt::from(-1);
        xm1[m] = BigInt::one();
        let mut f = IntPoly::new(xm1);
        for d in 1..m {
            if m % d == 0 {
                f = f.divmod_monic(&IntPoly::cyclotomic(d)).0;
            }
        }
        f
    }
}

/// Human-readable form in `x`, highest degree first, e.g. `x^2 - x - 1`.
impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => {}
                (_, false) => write!(f, "{mag}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A dense square integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Validation("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("matrix is not square".into()));
        }
        Ok(IntMatrix { n, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        IntMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect())
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::scalar(n, &BigInt::one())
    }

    pub fn scalar(n: usize, c: &BigInt) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = c.clone();
        }
        IntMatrix { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix { n, entries: vec![BigInt::zero(); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * &other.entries[k * n + j];
                }
            }
        }
        IntMatrix { n, entries: out }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| &self.entries[i * self.n + j] * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        IntMatrix { n: self.n, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        IntMatrix { n: self.n, entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix { n: self.n, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].clone();
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.n);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Characteristic polynomial `det(xI - A)` by Faddeev-LeVerrier; every
    /// division is exact over the integers.
    pub fn char_poly(&self) -> IntPoly {
        let n = self.n;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = IntMatrix::zero(n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            m = self.mul(&m).add(&IntMatrix::scalar(n, &coeffs[n - k + 1]));
            let t = self.mul(&m).trace();
            let (q, r) = t.div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            coeffs[n - k] = -q;
        }
        IntPoly::new(coeffs)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        let mut a: Vec<Vec<BigInt>> = self.rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    /// `f(A)` by Horner's rule.
    pub fn eval_poly(&self, f: &IntPoly) -> IntMatrix {
        f.coeffs()
            .iter()
            .rev()
            .fold(IntMatrix::zero(self.n), |acc, c| self.mul(&acc).add(&IntMatrix::scalar(self.n, c)))
    }

    /// Minimal polynomial over Q: the first linear dependence among
    /// `I, A, A^2, ...`, found by incremental elimination over the rationals.
    /// Its coefficients are integers because `A` is integral over Z.
    pub fn minimal_polynomial(&self) -> IntPoly {
        let n = self.n;
        let size = n * n;
        // Echelon rows: (pivot column, row over Q, combination of powers giving this row).
        let mut echelon: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new();
        let mut power = IntMatrix::identity(n);
        for d in 0..=n {
            let mut row: Vec<BigRational> = power.entries.iter().map(|e| BigRational::from_integer(e.clone())).collect();
            let mut combo = vec![BigRational::zero(); n + 1];
            combo[d] = BigRational::one();
            for (piv, erow, ecombo) in &echelon {
                if row[*piv].is_zero() {
                    continue;
                }
                let f = row[*piv].clone() / &erow[*piv];
                for j in 0..size {
                    if !erow[j].is_zero() {
                        row[j] = &row[j] - &f * &erow[j];
                    }
                }
                for j in 0..=n {
                    if !ecombo[j].is_zero() {
                        combo[j] = &combo[j] - &f * &ecombo[j];
                    }
                }
            }
            match row.iter().position(|v| !v.is_zero()) {
                Some(piv) => echelon.push((piv, row, combo)),
                None => {
                    // combo is monic in x^d already
                    let coeffs = combo[..=d]
                        .iter()
                        .map(|c| {
                            debug_assert!(c.is_integer());
                            c.to_integer()
                        })
                        .collect();
                    return IntPoly::new(coeffs);
                }
            }
            power = power.mul(self);
        }
        unreachable!("Cayley-Hamilton bounds the degree by n")
    }

}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

/// Full factorization of a `u64` by trial division plus Pollard's rho.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    let mut factors: Vec<u64> = Vec::new();
    let mut n = n;
    for d in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        while n % d == 0 && n > 1 {
            factors.push(d);
            n /= d;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if crate::arith::is_prime_u64(m) {
            factors.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    factors.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for f in factors {
        match out.last_mut() {
            Some((q, e)) if *q == f => *e += 1,
            _ => out.push((f, 1)),
        }
    }
    out
}

fn pollard_rho(n: u64) -> u64 {
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    for c in 1u64.. {
        let f = |x: u64| (mul(x, x) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

/// All positive divisors of `n`, ascending.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (q, e) in factor_u64(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for &d in &divs {
            let mut pw = 1u64;
            for _ in 0..=e {
                next.push(d * pw);
                pw = pw.saturating_mul(q);
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

/// `|n| = p^s`? Returns `s`.
pub fn exact_log(n: &BigInt, p: u64) -> Option<u32> {
    let mut m = n.abs();
    if m.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut s = 0;
    while !m.is_one() {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return None;
        }
        m = q;
        s += 1;
    }
    Some(s)
}

/// Partial factorization of `|n|`: primes up to `trial_limit` by trial
/// division, then the cofactor is split completely if it fits a `u64`.
/// Returns the prime powers found and the unfactored cofactor (1 if none).
pub fn factor_bigint_partial(n: &BigInt, trial_limit: u64) -> (Vec<(BigInt, u32)>, BigInt) {
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    if m.is_zero() {
        return (out, m);
    }
    if let Some(small) = m.to_u64() {
        return (factor_u64(small).into_iter().map(|(q, e)| (BigInt::from(q), e)).collect(), BigInt::one());
    }
    let mut d = 2u64;
    while d <= trial_limit {
        let db = BigInt::from(d);
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&db);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.push((db, e));
        }
        if let Some(small) = m.to_u64() {
            out.extend(factor_u64(small).into_iter().map(|(q, e)| (BigInt::from(q), e)));
            return (out, BigInt::one());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    (out, m)
}
