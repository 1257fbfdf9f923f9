//! Symbolic descriptions of (possibly infinite) generating sets.

use std::fmt;

use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{PositiveRational, PrimeTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// The index map `k ↦ slope·k + intercept` over `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineIndex {
    pub slope: u64,
    pub intercept: u64,
}

impl AffineIndex {
    pub fn new(slope: u64, intercept: u64) -> Self {
        AffineIndex { slope, intercept }
    }

    pub fn at(&self, k: u64) -> u64 {
        self.slope * k + self.intercept
    }

    /// Whether some `k ≥ 1` maps to `j`.
    pub fn hits(&self, j: u64) -> bool {
        j >= self.at(1) && (j - self.intercept).is_multiple_of(self.slope)
    }

    /// Whether the two index ranges share a value.
    pub fn intersects(&self, other: &AffineIndex) -> bool {
        // a1 k1 + b1 = a2 k2 + b2 has a solution with k1, k2 >= 1 iff one
        // exists within one period past the larger starting value.
        let start = self.at(1).max(other.at(1));
        let period = num_integer::lcm(self.slope, other.slope);
        (start..start + period).any(|j| self.hits(j) && other.hits(j))
    }
}

impl fmt::Display for AffineIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.slope, self.intercept) {
            (1, 0) => write!(f, "k"),
            (1, b) => write!(f, "k+{b}"),
            (a, 0) => write!(f, "{a}*k"),
            (a, b) => write!(f, "{a}*k+{b}"),
        }
    }
}

/// One parametric term `offset ± 1/p_{index(k)}`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PrimeTerm {
    pub offset: PositiveRational,
    pub sign: Sign,
    pub index: AffineIndex,
}

impl PrimeTerm {
    pub fn new(offset: PositiveRational, sign: Sign, index: AffineIndex) -> Self {
        PrimeTerm { offset, sign, index }
    }

    /// The `k`-th realized value.
    pub fn value(&self, k: u64, primes: &PrimeTable) -> Result<PositiveRational> {
        let p = primes.nth(self.index.at(k))?;
        let step = PositiveRational::new(1u32, p)?;
        match self.sign {
            Sign::Plus => Ok(&self.offset + &step),
            Sign::Minus => self.offset.checked_sub(&step).filter(|v| !v.is_zero()).ok_or_else(|| {
                Error::InvalidSpec(format!("term {self} is not positive at k = {k}"))
            }),
        }
    }

    /// Whether `v` is one of the realized values.
    pub fn realizes(&self, v: &PositiveRational, primes: &PrimeTable) -> Result<bool> {
        let gap = match self.sign {
            Sign::Plus => v.checked_sub(&self.offset),
            Sign::Minus => self.offset.checked_sub(v),
        };
        let Some(gap) = gap else { return Ok(false) };
        if gap.is_zero() || !gap.numer().is_one() {
            return Ok(false);
        }
        let Some(p) = gap.denom().to_u64() else { return Ok(false) };
        if p > primes.largest() {
            // p is beyond the table: it can only be realized at an index we
            // cannot resolve.
            return Err(Error::PrimeCapacityExceeded {
                requested: u64::MAX,
                capacity: primes.capacity(),
            });
        }
        Ok(primes.index_of(p).is_some_and(|j| self.index.hits(j)))
    }
}

impl fmt::Display for PrimeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{} {} 1/p({})", self.offset, s, self.index)
    }
}

/// A generating set `S`; the monoid under study is `⟨S⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum GeneratorSpec {
    /// An explicit finite list.
    Finite(Vec<PositiveRational>),
    /// `{b^n | n ≥ 0}`.
    Geometric(PositiveRational),
    /// `{c ± 1/p_{i(k)} | k ≥ 1}` for each term.
    PrimeFamily(Vec<PrimeTerm>),
    /// `{b^n | b ∈ B, n ≥ 0}`.
    MultiCyclic(Vec<PositiveRational>),
    Union(Vec<GeneratorSpec>),
}

impl GeneratorSpec {
    pub fn finite<I, T>(gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<PositiveRational>,
    {
        let spec = GeneratorSpec::Finite(gens.into_iter().map(Into::into).collect());
        spec.validate()?;
        Ok(spec)
    }

    /// `{3 + 1/p_{2k}, 3 − 1/p_{2k+1} | k ≥ 1}`: atomic, FFM, and neither
    /// well-ordered nor co-well-ordered.
    pub fn prime_offset_three() -> Self {
        let three = PositiveRational::from_integer(3u32);
        GeneratorSpec::PrimeFamily(vec![
            PrimeTerm::new(three.clone(), Sign::Plus, AffineIndex::new(2, 0)),
            PrimeTerm::new(three, Sign::Minus, AffineIndex::new(2, 1)),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(PrimeTable::global())
    }

    pub fn validate_with(&self, primes: &PrimeTable) -> Result<()> {
        let positive = |qs: &[PositiveRational], what: &str| -> Result<()> {
            if qs.is_empty() {
                return Err(Error::InvalidSpec(format!("{what} list is empty")));
            }
            match qs.iter().find(|q| q.is_zero()) {
                Some(_) => Err(Error::InvalidSpec(format!("{what} must be positive"))),
                None => Ok(()),
            }
        };
        match self {
            GeneratorSpec::Finite(gens) => positive(gens, "generator"),
            GeneratorSpec::Geometric(b) => positive(std::slice::from_ref(b), "base"),
            GeneratorSpec::MultiCyclic(bases) => positive(bases, "base"),
            GeneratorSpec::PrimeFamily(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidSpec("prime family has no terms".into()));
                }
                for t in terms {
                    if t.index.slope == 0 {
                        return Err(Error::InvalidSpec(format!("term {t}: index slope must be at least 1")));
                    }
                    // Minus terms increase in k, so positivity at k = 1 suffices.
                    t.value(1, primes)?;
                }
                Ok(())
            }
            GeneratorSpec::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidSpec("union has no parts".into()));
                }
                parts.iter().try_for_each(|p| p.validate_with(primes))
            }
        }
    }

    /// The generators realized at `depth` (unsorted, possibly repeated).
    pub fn realize(&self, depth: u32, primes: &PrimeTable) -> Result<Vec<PositiveRational>> {
        if depth == 0 {
            return Err(Error::InvalidDepth);
        }
        let powers = |b: &PositiveRational| (0..=depth).map(|n| b.pow(n)).collect::<Vec<_>>();
        Ok(match self {
            GeneratorSpec::Finite(gens) => gens.clone(),
            GeneratorSpec::Geometric(b) => powers(b),
            GeneratorSpec::MultiCyclic(bases) => bases.iter().flat_map(powers).collect(),
            GeneratorSpec::PrimeFamily(terms) => {
                let mut out = Vec::with_capacity(terms.len() * depth as usize);
                for t in terms {
                    for k in 1..=u64::from(depth) {
                        out.push(t.value(k, primes)?);
                    }
                }
                out
            }
            GeneratorSpec::Union(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.realize(depth, primes)?);
                }
                out
            }
        })
    }

    /// Whether `v` belongs to the full (infinite) generating set.
    pub fn contains_value(&self, v: &PositiveRational, primes: &PrimeTable) -> Result<bool> {
        if v.is_zero() {
            return Ok(false);
        }
        Ok(match self {
            GeneratorSpec::Finite(gens) => gens.contains(v),
            GeneratorSpec::Geometric(b) => is_power_of(b, v),
            GeneratorSpec::MultiCyclic(bases) => bases.iter().any(|b| is_power_of(b, v)),
            GeneratorSpec::PrimeFamily(terms) => {
                for t in terms {
                    if t.realizes(v, primes)? {
                        return Ok(true);
                    }
                }
                false
            }
            GeneratorSpec::Union(parts) => {
                for p in parts {
                    if p.contains_value(v, primes)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }

    /// `c·S`. Only explicit lists (and unions of them) have a scaled form
    /// among the spec variants.
    pub fn scale(&self, c: &PositiveRational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidSpec("scale factor must be positive".into()));
        }
        match self {
            GeneratorSpec::Finite(gens) => Ok(GeneratorSpec::Finite(gens.iter().map(|g| g * c).collect())),
            GeneratorSpec::Union(parts) => parts
                .iter()
                .map(|p| p.scale(c))
                .collect::<Result<Vec<_>>>()
                .map(GeneratorSpec::Union),
            other => Err(Error::Unsupported(format!("scaling {} is not representable", other.kind_name()))),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GeneratorSpec::Finite(_) => "finite",
            GeneratorSpec::Geometric(_) => "geometric",
            GeneratorSpec::PrimeFamily(_) => "prime_family",
            GeneratorSpec::MultiCyclic(_) => "multicyclic",
            GeneratorSpec::Union(_) => "union",
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            GeneratorSpec::Finite(_) => true,
            GeneratorSpec::Geometric(b) => b.numer() == b.denom(),
            GeneratorSpec::MultiCyclic(bases) => bases.iter().all(|b| b.numer() == b.denom()),
            GeneratorSpec::PrimeFamily(_) => false,
            GeneratorSpec::Union(parts) => parts.iter().all(GeneratorSpec::is_finite),
        }
    }
}

/// Whether `v = b^n` for some `n ≥ 0`.
pub(crate) fn is_power_of(b: &PositiveRational, v: &PositiveRational) -> bool {
    let one = PositiveRational::one();
    if *b == one || v.is_zero() {
        return *v == one;
    }
    let growing = *b > one;
    let mut p = one;
    loop {
        if p == *v {
            return true;
        }
        if (growing && p > *v) || (!growing && p < *v) {
            return false;
        }
        p = &p * b;
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |qs: &[PositiveRational]| qs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
        match self {
            GeneratorSpec::Finite(g) => write!(f, "Finite({})", list(g)),
            GeneratorSpec::Geometric(b) => write!(f, "Geometric({b})"),
            GeneratorSpec::MultiCyclic(b) => write!(f, "MultiCyclic({{{}}})", list(b)),
            GeneratorSpec::PrimeFamily(terms) => {
                let t: Vec<String> = terms.iter().map(ToString::to_string).collect();
                write!(f, "PrimeFamily({})", t.join(", "))
            }
            GeneratorSpec::Union(parts) => {
                let t: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "Union({})", t.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    #[test]
    fn prime_example_values() {
        let primes = PrimeTable::global();
        let spec = GeneratorSpec::prime_offset_three();
        let mut vals = spec.realize(2, primes).unwrap();
        vals.sort();
        let expect: Vec<_> = ["14/5", "32/11", "22/7", "10/3"].iter().map(|s| q(s)).collect();
        assert_eq!(vals, expect);
    }

    #[test]
    fn contains_value_per_family() {
        let primes = PrimeTable::global();
        let spec = GeneratorSpec::prime_offset_three();
        assert!(spec.contains_value(&q("10/3"), primes).unwrap());
        assert!(spec.contains_value(&q("14/5"), primes).unwrap());
        // 3 + 1/5 has an odd prime index: not realized by the plus term.
        assert!(!spec.contains_value(&q("16/5"), primes).unwrap());
        assert!(!spec.contains_value(&q("3"), primes).unwrap());

        let g = GeneratorSpec::Geometric(q("2/3"));
        assert!(g.contains_value(&q("16/81"), primes).unwrap());
        assert!(g.contains_value(&q("1"), primes).unwrap());
        assert!(!g.contains_value(&q("4/3"), primes).unwrap());
        let mc = GeneratorSpec::MultiCyclic(vec![q("2"), q("5")]);
        assert!(mc.contains_value(&q("125"), primes).unwrap());
        assert!(!mc.contains_value(&q("10"), primes).unwrap());
    }

    #[test]
    fn validation_rejects_bad_terms() {
        assert!(GeneratorSpec::finite([q("0"), q("1")]).is_err());
        let bad = GeneratorSpec::PrimeFamily(vec![PrimeTerm::new(q("1/5"), Sign::Minus, AffineIndex::new(1, 0))]);
        assert!(bad.validate().is_err());
        let ok = GeneratorSpec::PrimeFamily(vec![PrimeTerm::new(q("1"), Sign::Minus, AffineIndex::new(1, 0))]);
        assert!(ok.validate().is_ok());
        assert!(GeneratorSpec::Union(vec![]).validate().is_err());
    }

    #[test]
    fn affine_index_intersections() {
        let even = AffineIndex::new(2, 0);
        let odd = AffineIndex::new(2, 1);
        assert!(!even.intersects(&odd));
        assert!(even.intersects(&AffineIndex::new(3, 0)));
        assert!(AffineIndex::new(1, 5).intersects(&even));
        assert!(even.hits(2) && !even.hits(0) && !odd.hits(1) && odd.hits(3));
    }

    #[test]
    fn scaling_finite_only() {
        let s = GeneratorSpec::finite([q("1/2"), q("1/3")]).unwrap();
        assert_eq!(s.scale(&q("6")).unwrap(), GeneratorSpec::finite([q("3"), q("2")]).unwrap());
        assert!(GeneratorSpec::Geometric(q("2")).scale(&q("2")).is_err());
    }
}
