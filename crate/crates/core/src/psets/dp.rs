//! Carry-propagating base-p digit DP deciding `M = sum a_j p^(k_j n_j)`.
//!
//! Levels are base-p digit positions. A state at level `L` is
//! `(carry, placed)`, where `placed` is the set of terms already assigned a
//! level. Placing the subset `S` at level `L` requires
//! `carry + sum_S a_j = d_L (mod p)` and moves to
//! `carry' = (carry + sum_S a_j - d_L) / p`; starting from zero the carry
//! never exceeds `sum |a_j| + 1` in absolute value. Once every term is
//! placed the remaining digits must equal the carry.
//!
//! Above the top digit (and above any pinned level) a layer of states
//! depends only on the previous layer and `L mod lcm(k_j)`, so the layers
//! become periodic and the search stops at the first repeat.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::PrimeModulus;
use crate::error::{Error, Result};

/// Safety net on the number of levels walked before periodicity is detected.
const MAX_LEVELS: usize = 2_000_000;

/// One term `coeff * p^(step * n)` with `step >= 1` and `coeff != 0`.
#[derive(Debug, Clone)]
pub(crate) struct ActiveTerm {
    pub index: usize,
    pub coeff: i128,
    pub step: u64,
}

type State = (i128, u32);

/// Decides whether `target = sum_j coeff_j * p^(step_j * n_j)` has a
/// solution with all `n_j >= 0`; returns the lexicographically least
/// `(n_j)` in the order given.
pub(crate) fn solve(target: &BigInt, terms: &[ActiveTerm], p: PrimeModulus) -> Result<Option<Vec<u64>>> {
    if terms.is_empty() {
        return Ok(if target.is_zero() { Some(Vec::new()) } else { None });
    }
    let (target, coeffs): (BigInt, Vec<i128>) = if target.sign() == Sign::Minus {
        (-target, terms.iter().map(|t| -t.coeff).collect())
    } else {
        (target.clone(), terms.iter().map(|t| t.coeff).collect())
    };
    let ctx = Context::new(&target, coeffs, terms.iter().map(|t| t.step).collect(), p)?;
    let mut fixed: Vec<Option<u64>> = vec![None; terms.len()];
    for j in 0..terms.len() {
        let Some(graph) = ctx.live_graph(&fixed)? else {
            debug_assert!(j == 0, "fixing a feasible level keeps the problem feasible");
            return Ok(None);
        };
        fixed[j] = Some(graph.first_placement(j).expect("live graph places every term"));
    }
    Ok(Some(fixed.iter().zip(terms).map(|(l, t)| l.expect("all fixed") / t.step).collect()))
}

/// All `T` in `[0, max_target]` of the form `sum_j coeff_j p^(step_j n_j)`, sorted.
///
/// Every path through the DP below the top digit of `max_target` fixes the
/// digits of `T`, so candidates are generated level by level; one survives
/// if the unplaced terms can still close the carry to zero on the all-zero
/// digits above.
pub(crate) fn generate(max_target: &BigInt, terms: &[ActiveTerm], p: PrimeModulus) -> Result<Vec<BigInt>> {
    if max_target.is_negative() {
        return Ok(Vec::new());
    }
    if terms.is_empty() {
        return Ok(vec![BigInt::zero()]);
    }
    let limit = max_target
        .to_i128()
        .filter(|v| *v < (1i128 << 100))
        .ok_or_else(|| Error::Resource("enumeration bound too large".into()))?;
    let ctx = Context::new(&BigInt::zero(), terms.iter().map(|t| t.coeff).collect(), terms.iter().map(|t| t.step).collect(), p)?;
    let pi = ctx.p;
    let mut ndigits = 0usize;
    let mut scale: i128 = 1;
    while scale <= limit {
        scale *= pi;
        ndigits += 1;
    }
    let none = vec![None; ctx.coeffs.len()];
    let mut layer: HashMap<State, Vec<i128>> = HashMap::from([((0, 0), vec![0])]);
    let mut weight: i128 = 1;
    for level in 0..ndigits {
        let mut next: HashMap<State, Vec<i128>> = HashMap::new();
        for (&(carry, placed), partials) in &layer {
            for subset in ctx.choices(level, placed, &none) {
                let v = carry + ctx.subset_sum(subset);
                let digit = v.rem_euclid(pi);
                let entry = next.entry(((v - digit) / pi, placed | subset)).or_default();
                entry.extend(partials.iter().map(|x| x + digit * weight));
            }
        }
        for partials in next.values_mut() {
            partials.sort_unstable();
            partials.dedup();
            partials.retain(|x| *x <= limit);
        }
        next.retain(|_, v| !v.is_empty());
        layer = next;
        weight *= pi;
    }
    let mut out: Vec<i128> = Vec::new();
    let mut cache: HashMap<State, bool> = HashMap::new();
    for (state, partials) in layer {
        let ok = match cache.get(&state) {
            Some(&ok) => ok,
            None => {
                let ok = ctx.closes_to_zero(state, ndigits)?;
                cache.insert(state, ok);
                ok
            }
        };
        if ok {
            out.extend(partials);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out.into_iter().map(BigInt::from).collect())
}

struct Context {
    p: i128,
    digits: Vec<u8>,
    /// `top[i] = T_{digits.len() - i}` while it fits an `i128`.
    top: Vec<i128>,
    coeffs: Vec<i128>,
    steps: Vec<u64>,
    period: usize,
    carry_bound: i128,
}

struct LiveGraph {
    /// Per level, the subsets placed on edges that lie on some accepting path.
    placed: Vec<Vec<u32>>,
}

impl LiveGraph {
    fn first_placement(&self, term: usize) -> Option<u64> {
        let bit = 1u32 << term;
        self.placed.iter().position(|es| es.iter().any(|&s| s & bit != 0)).map(|l| l as u64)
    }
}

impl Context {
    fn new(target: &BigInt, coeffs: Vec<i128>, steps: Vec<u64>, p: PrimeModulus) -> Result<Self> {
        if coeffs.len() > 20 {
            return Err(Error::Resource("digit DP supports at most 20 nontrivial terms".into()));
        }
        let digits = if target.is_zero() { Vec::new() } else { target.to_radix_le(p.get() as u32).1 };
        let pi = p.get() as i128;
        let mut top = vec![0i128];
        let mut acc: i128 = 0;
        for &d in digits.iter().rev() {
            match acc.checked_mul(pi).and_then(|v| v.checked_add(d as i128)) {
                Some(v) if v < i128::MAX / 4 => {
                    acc = v;
                    top.push(v);
                }
                _ => break,
            }
        }
        let abs_sum = coeffs
            .iter()
            .try_fold(0i128, |acc, c| acc.checked_add(c.abs()))
            .filter(|s| *s < (1i128 << 60))
            .ok_or_else(|| Error::Resource("digit DP coefficients too large".into()))?;
        let period = steps.iter().fold(1u64, |acc, s| acc.lcm(s));
        let period = usize::try_from(period)
            .ok()
            .filter(|k| *k <= MAX_LEVELS)
            .ok_or_else(|| Error::Resource("exponent steps have too large a common multiple".into()))?;
        Ok(Context { p: pi, digits, top, coeffs, steps, period, carry_bound: abs_sum + 1 })
    }

    fn digit(&self, level: usize) -> i128 {
        self.digits.get(level).copied().unwrap_or(0) as i128
    }

    /// `T_level` if it is small enough to be compared with a carry.
    fn suffix(&self, level: usize) -> Option<i128> {
        let n = self.digits.len();
        if level >= n {
            return Some(0);
        }
        self.top.get(n - level).copied()
    }

    fn full(&self) -> u32 {
        (1u32 << self.coeffs.len()) - 1
    }

    fn subset_sum(&self, subset: u32) -> i128 {
        (0..self.coeffs.len()).filter(|j| subset & (1 << j) != 0).map(|j| self.coeffs[j]).sum()
    }

    /// Subsets of unplaced terms that may be placed at `level`, honouring pinned levels.
    fn choices(&self, level: usize, placed: u32, fixed: &[Option<u64>]) -> Vec<u32> {
        let mut must = 0u32;
        let mut may = 0u32;
        for j in 0..self.coeffs.len() {
            let bit = 1u32 << j;
            if placed & bit != 0 {
                continue;
            }
            match fixed[j] {
                Some(l) if l as usize == level => must |= bit,
                Some(l) if (l as usize) < level => return Vec::new(),
                Some(_) => {}
                None if level as u64 % self.steps[j] == 0 => may |= bit,
                None => {}
            }
        }
        let mut out = Vec::new();
        let mut sub = may;
        loop {
            out.push(must | sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & may;
        }
        out
    }

    fn step(&self, level: usize, (carry, placed): State, subset: u32) -> Option<State> {
        let diff = carry + self.subset_sum(subset) - self.digit(level);
        if diff.rem_euclid(self.p) != 0 {
            return None;
        }
        let next = diff / self.p;
        (next.abs() <= self.carry_bound).then_some((next, placed | subset))
    }

    /// A level above every digit that is congruent to `r` modulo the period.
    fn quiet_level(&self, r: usize) -> usize {
        self.digits.len().next_multiple_of(self.period) + r
    }

    fn accepts(&self, level: usize, (carry, placed): State) -> bool {
        placed == self.full() && self.suffix(level) == Some(carry)
    }

    /// Whether `state` at `level` (above every nonzero digit) can reach carry zero with all terms placed.
    fn closes_to_zero(&self, state: State, level: usize) -> Result<bool> {
        let none = vec![None; self.coeffs.len()];
        let start = (state.0, state.1, level % self.period);
        let mut seen: HashSet<(i128, u32, usize)> = HashSet::from([start]);
        let mut stack = vec![start];
        while let Some((carry, placed, r)) = stack.pop() {
            if placed == self.full() && carry == 0 {
                return Ok(true);
            }
            let level = self.quiet_level(r);
            for subset in self.choices(level, placed, &none) {
                if let Some(to) = self.step(level, (carry, placed), subset) {
                    let key = (to.0, to.1, (r + 1) % self.period);
                    if seen.insert(key) {
                        if seen.len() > MAX_LEVELS {
                            return Err(Error::Resource("digit DP tail search too large".into()));
                        }
                        stack.push(key);
                    }
                }
            }
        }
        Ok(false)
    }

    /// Forward layers until they repeat, then liveness by fixpoint; `None`
    /// when nothing respects the pinned levels.
    fn live_graph(&self, fixed: &[Option<u64>]) -> Result<Option<LiveGraph>> {
        let full = self.full();
        let quiet_from = fixed.iter().flatten().map(|l| *l as usize + 1).fold(self.digits.len(), usize::max);
        let mut layers: Vec<Vec<State>> = vec![vec![(0, 0)]];
        let mut edges: Vec<Vec<(State, u32, State)>> = Vec::new();
        let mut seen_layers: HashMap<(usize, Vec<State>), usize> = HashMap::new();
        // level whose layer equals the last one, once periodicity is found
        let mut wrap: Option<usize> = None;
        loop {
            let level = layers.len() - 1;
            if level >= quiet_from {
                let key = (level % self.period, layers[level].clone());
                if let Some(&earlier) = seen_layers.get(&key) {
                    wrap = Some(earlier);
                    break;
                }
                seen_layers.insert(key, level);
            }
            if level >= MAX_LEVELS {
                return Err(Error::Resource(format!("digit DP exceeded {MAX_LEVELS} levels")));
            }
            let mut next: HashSet<State> = HashSet::new();
            let mut layer_edges = Vec::new();
            for &state in &layers[level] {
                if state.1 == full {
                    continue;
                }
                for subset in self.choices(level, state.1, fixed) {
                    if let Some(to) = self.step(level, state, subset) {
                        layer_edges.push((state, subset, to));
                        next.insert(to);
                    }
                }
            }
            edges.push(layer_edges);
            let mut next: Vec<State> = next.into_iter().collect();
            next.sort_unstable();
            let empty = next.is_empty();
            layers.push(next);
            if empty {
                break;
            }
        }
        // The last layer repeats layer `wrap`, so its liveness is that of `wrap`.
        let depth = layers.len();
        let mut live: Vec<HashSet<State>> = layers
            .iter()
            .enumerate()
            .map(|(level, states)| states.iter().copied().filter(|&s| self.accepts(level, s)).collect())
            .collect();
        loop {
            let mut changed = false;
            if let Some(w) = wrap {
                let carried: Vec<State> = live[w].iter().copied().collect();
                for st in carried {
                    changed |= live[depth - 1].insert(st);
                }
            }
            for level in (0..edges.len()).rev() {
                for &(from, _, to) in &edges[level] {
                    if live[level + 1].contains(&to) {
                        changed |= live[level].insert(from);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if !live[0].contains(&(0, 0)) {
            return Ok(None);
        }
        let mut reach: HashSet<State> = HashSet::from([(0, 0)]);
        let mut placed = Vec::with_capacity(edges.len());
        for (level, es) in edges.iter().enumerate() {
            let mut next_reach = HashSet::new();
            let mut subsets = Vec::new();
            for &(from, subset, to) in es {
                if reach.contains(&from) && live[level + 1].contains(&to) {
                    next_reach.insert(to);
                    subsets.push(subset);
                }
            }
            placed.push(subsets);
            reach = next_reach;
        }
        Ok(Some(LiveGraph { placed }))
    }
}

/// Converts a scaled coefficient for the DP, rejecting ones that do not fit.
pub(crate) fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .filter(|x| x.abs() < (1i128 << 60))
        .ok_or_else(|| Error::Resource(format!("coefficient {v} too large for the digit DP")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(index: usize, coeff: i128, step: u64) -> ActiveTerm {
        ActiveTerm { index, coeff, step }
    }

    fn p(v: u64) -> PrimeModulus {
        PrimeModulus::new(v).unwrap()
    }

    #[test]
    fn sums_of_two_powers_of_three() {
        let ts = [term(0, 1, 1), term(1, 1, 1)];
        assert_eq!(solve(&BigInt::from(4), &ts, p(3)).unwrap(), Some(vec![0, 1]));
        assert_eq!(solve(&BigInt::from(5), &ts, p(3)).unwrap(), None);
        assert_eq!(solve(&BigInt::from(2), &ts, p(3)).unwrap(), Some(vec![0, 0]));
        assert_eq!(solve(&BigInt::from(18), &ts, p(3)).unwrap(), Some(vec![2, 2]));
    }

    #[test]
    fn cancellation_at_high_levels() {
        let ts = [term(0, 1, 1), term(1, -1, 1), term(2, 1, 1)];
        assert_eq!(solve(&BigInt::from(1), &ts, p(2)).unwrap(), Some(vec![0, 0, 0]));
        // 2*3^a - 3^b = 3 first at a = b = 1
        let ts = [term(0, 2, 1), term(1, -1, 1)];
        assert_eq!(solve(&BigInt::from(3), &ts, p(3)).unwrap(), Some(vec![1, 1]));
        // 5^a - 5^b = -24 = 1 - 25
        let ts = [term(0, 1, 1), term(1, -1, 1)];
        assert_eq!(solve(&BigInt::from(-24), &ts, p(5)).unwrap(), Some(vec![0, 2]));
        // 2^a - 2^b = 0 has (0, 0)
        assert_eq!(solve(&BigInt::zero(), &ts, p(2)).unwrap(), Some(vec![0, 0]));
    }

    #[test]
    fn step_divisibility() {
        let ts = [term(0, 3, 2)];
        assert_eq!(solve(&BigInt::from(75), &ts, p(5)).unwrap(), Some(vec![1]));
        assert_eq!(solve(&BigInt::from(15), &ts, p(5)).unwrap(), None);
    }

    #[test]
    fn lexicographic_order_is_by_term_index() {
        let ts = [term(0, 1, 1), term(1, 3, 1)];
        // 3^a + 3 * 3^b = 6 only as (1, 0)
        assert_eq!(solve(&BigInt::from(6), &ts, p(3)).unwrap(), Some(vec![1, 0]));
        // 12 = 9 + 3 = 3 + 9: (1, 1) beats (2, 0)
        assert_eq!(solve(&BigInt::from(12), &ts, p(3)).unwrap(), Some(vec![1, 1]));
    }

    #[test]
    fn huge_targets() {
        let big = BigInt::from(5).pow(4000) + BigInt::from(5).pow(17);
        let ts = [term(0, 1, 1), term(1, 1, 1)];
        assert_eq!(solve(&big, &ts, p(5)).unwrap(), Some(vec![17, 4000]));
        assert_eq!(solve(&(big + 2), &ts, p(5)).unwrap(), None);
    }

    #[test]
    fn generate_small() {
        let ts = [term(0, 1, 1), term(1, -1, 1)];
        let got: Vec<i64> = generate(&BigInt::from(10), &ts, p(3)).unwrap().iter().map(|x| x.to_i64().unwrap()).collect();
        assert_eq!(got, vec![0, 2, 6, 8]);
    }
}
