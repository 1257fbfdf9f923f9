//! Reachability tables over denominator-cleared generators.
//!
//! After multiplying by the common denominator every generator and every
//! monoid element below a bound becomes a nonnegative integer. Small ranges
//! use a bitset; large ones (huge common denominators with few elements, as
//! in prime-indexed families) use an ordered set.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest scaled bound handled by the bitset backend.
pub(crate) const DENSE_LIMIT: u64 = 1 << 27;

#[derive(Debug, Clone)]
enum Backend {
    Dense { words: Vec<u64>, bound: u64 },
    Sparse { members: BTreeSet<BigUint> },
}

/// All elements `0 ≤ m ≤ bound` of the monoid generated by `gens`
/// (scaled integers).
#[derive(Debug, Clone)]
pub(crate) struct MemberTable {
    backend: Backend,
}

impl MemberTable {
    /// `cap` bounds the number of members the sparse backend may hold.
    pub fn build(gens: &[BigUint], bound: &BigUint, cap: usize) -> Result<Self> {
        match bound.to_u64().filter(|&b| b <= DENSE_LIMIT) {
            Some(b) => Ok(Self::dense(gens, b)),
            None => Self::sparse(gens, bound, cap),
        }
    }

    fn dense(gens: &[BigUint], bound: u64) -> Self {
        let nbits = bound as usize + 1;
        let mut words = vec![0u64; nbits.div_ceil(64)];
        words[0] = 1;
        let mut small: Vec<u64> = gens
            .iter()
            .filter_map(|g| g.to_u64())
            .filter(|&g| g >= 1 && g <= bound)
            .collect();
        small.sort_unstable();
        small.dedup();
        for g in small {
            // Closing under +g by doubling: after shifting by g, 2g, 4g, ...
            // every multiple up to the bound has been added.
            let mut shift = g;
            loop {
                shift_or(&mut words, shift);
                if shift > bound / 2 {
                    break;
                }
                shift *= 2;
            }
        }
        let tail = nbits % 64;
        if tail != 0 {
            *words.last_mut().unwrap() &= (1u64 << tail) - 1;
        }
        MemberTable { backend: Backend::Dense { words, bound } }
    }

    fn sparse(gens: &[BigUint], bound: &BigUint, cap: usize) -> Result<Self> {
        let mut members = BTreeSet::new();
        members.insert(BigUint::zero());
        let mut sorted: Vec<&BigUint> = gens.iter().filter(|g| !g.is_zero() && *g <= bound).collect();
        sorted.sort();
        sorted.dedup();
        for g in sorted {
            let snapshot: Vec<BigUint> = members.iter().cloned().collect();
            for v in snapshot {
                let mut w = v + g;
                while &w <= bound && !members.contains(&w) {
                    members.insert(w.clone());
                    if members.len() > cap {
                        return Err(Error::ElementCapExceeded {
                            what: "element enumeration".into(),
                            cap,
                        });
                    }
                    w += g;
                }
            }
        }
        Ok(MemberTable { backend: Backend::Sparse { members } })
    }

    pub fn contains(&self, v: &BigUint) -> bool {
        match &self.backend {
            Backend::Dense { words, bound } => match v.to_u64() {
                Some(i) if i <= *bound => bit(words, i),
                _ => false,
            },
            Backend::Sparse { members, .. } => members.contains(v),
        }
    }

    /// Members in `[lo, hi]`, ascending.
    pub fn members_in(&self, lo: &BigUint, hi: &BigUint) -> Vec<BigUint> {
        if lo > hi {
            return Vec::new();
        }
        match &self.backend {
            Backend::Dense { words, bound } => {
                let Some(lo) = lo.to_u64().filter(|l| l <= bound) else { return Vec::new() };
                let hi = hi.to_u64().map_or(*bound, |h| h.min(*bound));
                (lo..=hi).filter(|&i| bit(words, i)).map(BigUint::from).collect()
            }
            Backend::Sparse { members, .. } => members.range(lo.clone()..=hi.clone()).cloned().collect(),
        }
    }

    /// Number of members in `[lo, hi]`.
    pub fn count_in(&self, lo: &BigUint, hi: &BigUint) -> usize {
        if lo > hi {
            return 0;
        }
        match &self.backend {
            Backend::Dense { words, bound } => {
                let Some(lo) = lo.to_u64().filter(|l| l <= bound) else { return 0 };
                let hi = hi.to_u64().map_or(*bound, |h| h.min(*bound));
                (lo..=hi).filter(|&i| bit(words, i)).count()
            }
            Backend::Sparse { members, .. } => members.range(lo.clone()..=hi.clone()).count(),
        }
    }

    /// Smallest `δ` with `1 ≤ δ ≤ max_delta`, `δ < x`, and both `x − δ` and
    /// `x + δ` members. The caller sizes the table to cover `x + max_delta`.
    pub fn smallest_symmetric_gap(&self, x: &BigUint, max_delta: &BigUint) -> Option<BigUint> {
        if x.is_zero() || max_delta.is_zero() {
            return None;
        }
        let limit = if max_delta < x { max_delta.clone() } else { x - 1u32 };
        match &self.backend {
            Backend::Dense { words, bound } => {
                let x = x.to_u64()?;
                let limit = limit.to_u64()?;
                (1..=limit)
                    .take_while(|d| x + d <= *bound)
                    .find(|d| bit(words, x - d) && bit(words, x + d))
                    .map(BigUint::from)
            }
            Backend::Sparse { members, .. } => {
                let lo = x - &limit;
                members
                    .range(lo..x.clone())
                    .rev()
                    .map(|d| x - d)
                    .find(|delta| members.contains(&(x + delta)))
            }
        }
    }
}

fn bit(words: &[u64], i: u64) -> bool {
    (words[(i / 64) as usize] >> (i % 64)) & 1 == 1
}

/// `words |= words << shift`, in place.
fn shift_or(words: &mut [u64], shift: u64) {
    let w = (shift / 64) as usize;
    let b = (shift % 64) as u32;
    let n = words.len();
    if w >= n {
        return;
    }
    for i in (w..n).rev() {
        let mut v = words[i - w] << b;
        if b != 0 && i > w {
            v |= words[i - w - 1] >> (64 - b);
        }
        words[i] |= v;
    }
}

/// Feasibility search `Σ c_i·gens[i] = target` with `c_i ≥ 0`, largest
/// generator first, remainder-gcd pruning and a memo of dead states.
pub(crate) struct Knapsack<'a> {
    gens: &'a [BigUint],
    suffix_gcd: Vec<BigUint>,
    dead: std::collections::HashSet<(usize, BigUint)>,
}

impl<'a> Knapsack<'a> {
    /// `gens` must be sorted descending and nonzero.
    pub fn new(gens: &'a [BigUint]) -> Self {
        let mut suffix_gcd = vec![BigUint::zero(); gens.len() + 1];
        for i in (0..gens.len()).rev() {
            suffix_gcd[i] = num_integer::Integer::gcd(&suffix_gcd[i + 1], &gens[i]);
        }
        Knapsack { gens, suffix_gcd, dead: Default::default() }
    }

    /// One solution, if any.
    pub fn solve(&mut self, target: &BigUint) -> Option<Vec<BigUint>> {
        let mut coeffs = vec![BigUint::zero(); self.gens.len()];
        self.search(0, target.clone(), &mut coeffs).then_some(coeffs)
    }

    fn search(&mut self, i: usize, rem: BigUint, coeffs: &mut [BigUint]) -> bool {
        if rem.is_zero() {
            return true;
        }
        if i == self.gens.len() || !(&rem % &self.suffix_gcd[i]).is_zero() {
            return false;
        }
        if self.dead.contains(&(i, rem.clone())) {
            return false;
        }
        let g = &self.gens[i];
        let mut c = &rem / g;
        loop {
            let next = &rem - &c * g;
            if self.search(i + 1, next, coeffs) {
                coeffs[i] = c;
                return true;
            }
            if c.is_zero() {
                break;
            }
            c -= BigUint::one();
        }
        self.dead.insert((i, rem));
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn oracle(gens: &[u64], bound: u64) -> Vec<u64> {
        let mut r = vec![false; bound as usize + 1];
        r[0] = true;
        for v in 1..=bound {
            r[v as usize] = gens.iter().any(|&g| g <= v && r[(v - g) as usize]);
        }
        (0..=bound).filter(|&v| r[v as usize]).collect()
    }

    #[test]
    fn dense_and_sparse_agree_with_oracle() {
        for gens in [vec![2u64, 3], vec![5, 7, 11], vec![64, 65, 200], vec![1], vec![130, 97]] {
            let big_gens: Vec<BigUint> = gens.iter().map(|&g| b(g)).collect();
            let expect = oracle(&gens, 700);
            let dense = MemberTable::dense(&big_gens, 700);
            let sparse = MemberTable::sparse(&big_gens, &b(700), usize::MAX).unwrap();
            for t in [dense, sparse] {
                let got: Vec<u64> = t.members_in(&b(0), &b(700)).iter().map(|v| v.to_u64().unwrap()).collect();
                assert_eq!(got, expect, "{gens:?}");
            }
        }
    }

    #[test]
    fn sparse_respects_cap() {
        let r = MemberTable::sparse(&[b(1)], &b(100), 10);
        assert!(matches!(r, Err(Error::ElementCapExceeded { .. })));
    }

    #[test]
    fn symmetric_gap_on_both_backends() {
        let gens = [b(4), b(6), b(9)];
        let dense = MemberTable::dense(&gens, 40);
        let sparse = MemberTable::sparse(&gens, &b(40), usize::MAX).unwrap();
        for t in [&dense, &sparse] {
            // 11 is missing; 12 ± 2 = 10, 14 are both sums
            assert_eq!(t.smallest_symmetric_gap(&b(12), &b(5)), Some(b(2)));
            assert_eq!(t.smallest_symmetric_gap(&b(12), &b(1)), None);
            // 9 ± 1 = 8, 10
            assert_eq!(t.smallest_symmetric_gap(&b(9), &b(5)), Some(b(1)));
        }
    }

    #[test]
    fn knapsack_finds_solutions() {
        let gens = [b(9), b(6), b(4)];
        let mut k = Knapsack::new(&gens);
        let sol = k.solve(&b(14)).unwrap();
        let total: BigUint = sol.iter().zip(&gens).map(|(c, g)| c * g).sum();
        assert_eq!(total, b(14));
        assert!(k.solve(&b(5)).is_none());
        assert!(k.solve(&b(0)).is_some());
    }
}
