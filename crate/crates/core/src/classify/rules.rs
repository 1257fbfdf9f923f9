//! Analytic facts read off a generating-set description.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::Result;
use crate::numeric::{PositiveRational, PrimeTable};
use crate::spec::{GeneratorSpec, PrimeTerm, Sign};

/// Whether `0` is a limit point of the generating set (equivalently of the
/// nonzero monoid elements).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroLimitPoint {
    #[serde(rename = "Proved-No")]
    No,
    #[serde(rename = "Proved-Yes")]
    Yes,
    Unknown,
}

pub fn zero_limit_point(spec: &GeneratorSpec) -> ZeroLimitPoint {
    let one = PositiveRational::one();
    match spec {
        GeneratorSpec::Finite(_) => ZeroLimitPoint::No,
        // Minus terms are validated positive and increase with k; plus terms
        // stay above their offset.
        GeneratorSpec::PrimeFamily(_) => ZeroLimitPoint::No,
        GeneratorSpec::Geometric(b) => {
            if *b < one {
                ZeroLimitPoint::Yes
            } else {
                ZeroLimitPoint::No
            }
        }
        GeneratorSpec::MultiCyclic(bases) => {
            if bases.iter().any(|b| *b < one) {
                ZeroLimitPoint::Yes
            } else {
                ZeroLimitPoint::No
            }
        }
        GeneratorSpec::Union(parts) => {
            let each: Vec<_> = parts.iter().map(zero_limit_point).collect();
            if each.contains(&ZeroLimitPoint::Yes) {
                ZeroLimitPoint::Yes
            } else if each.contains(&ZeroLimitPoint::Unknown) {
                ZeroLimitPoint::Unknown
            } else {
                ZeroLimitPoint::No
            }
        }
    }
}

/// Order type of the generating set as a subset of the reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrderType {
    /// Finite, hence both well-ordered and co-well-ordered.
    Both,
    WellOrdered,
    CoWellOrdered,
    Neither,
    Unknown,
}

impl OrderType {
    pub fn is_well_ordered(self) -> bool {
        matches!(self, OrderType::Both | OrderType::WellOrdered)
    }

    pub fn is_co_well_ordered(self) -> bool {
        matches!(self, OrderType::Both | OrderType::CoWellOrdered)
    }

    fn from_flags(well: bool, co: bool) -> Self {
        match (well, co) {
            (true, true) => OrderType::Both,
            (true, false) => OrderType::WellOrdered,
            (false, true) => OrderType::CoWellOrdered,
            (false, false) => OrderType::Neither,
        }
    }
}

pub fn order_type(spec: &GeneratorSpec) -> OrderType {
    let one = PositiveRational::one();
    match spec {
        GeneratorSpec::Finite(_) => OrderType::Both,
        GeneratorSpec::Geometric(b) => OrderType::from_flags(*b >= one, *b <= one),
        GeneratorSpec::MultiCyclic(bases) => {
            OrderType::from_flags(bases.iter().all(|b| *b >= one), bases.iter().all(|b| *b <= one))
        }
        GeneratorSpec::PrimeFamily(terms) => {
            // c + 1/p decreases in k, c − 1/p increases.
            let has_plus = terms.iter().any(|t| t.sign == Sign::Plus);
            let has_minus = terms.iter().any(|t| t.sign == Sign::Minus);
            OrderType::from_flags(!has_plus, !has_minus)
        }
        GeneratorSpec::Union(parts) => {
            let each: Vec<OrderType> = parts.iter().map(order_type).collect();
            if each.contains(&OrderType::Unknown) {
                return OrderType::Unknown;
            }
            OrderType::from_flags(
                each.iter().all(|o| o.is_well_ordered()),
                each.iter().all(|o| o.is_co_well_ordered()),
            )
        }
    }
}

/// `𝔩(S)`: limit points of `S` that belong to `S`, ascending.
///
/// Geometric parts contribute nothing (their only possible limit, `0`, is
/// never a generator); each prime term `c ± 1/p` accumulates at `c`, which
/// counts when `c` itself is a generator of the whole set.
pub fn limit_points_in(spec: &GeneratorSpec) -> Result<Vec<PositiveRational>> {
    let primes = PrimeTable::global();
    let mut candidates = BTreeSet::new();
    collect_offsets(spec, &mut candidates);
    let mut out = Vec::new();
    for c in candidates {
        if spec.contains_value(&c, primes)? {
            out.push(c);
        }
    }
    Ok(out)
}

fn collect_offsets(spec: &GeneratorSpec, out: &mut BTreeSet<PositiveRational>) {
    match spec {
        GeneratorSpec::PrimeFamily(terms) => out.extend(terms.iter().map(|t| t.offset.clone())),
        GeneratorSpec::Union(parts) => parts.iter().for_each(|p| collect_offsets(p, out)),
        _ => {}
    }
}

/// The divisibility observation for prime families: with integer offsets and
/// pairwise disjoint prime indices every generator has its own prime
/// denominator, so a generator `a` dividing `x` either has `d(a) | d(x)` or
/// `x` absorbs `d(a)` copies of it; each `x` then has finitely many divisors.
pub(crate) fn prime_family_divisibility(spec: &GeneratorSpec) -> bool {
    match spec {
        GeneratorSpec::PrimeFamily(terms) => terms.iter().all(|t| t.offset.is_integer()) && indices_disjoint(terms),
        _ => false,
    }
}

fn indices_disjoint(terms: &[PrimeTerm]) -> bool {
    terms
        .iter()
        .enumerate()
        .all(|(i, a)| terms[i + 1..].iter().all(|b| !a.index.intersects(&b.index)))
}

/// Outcome of the pairwise-coprime denominator test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Coprimality {
    /// Pairwise coprime for the whole infinite set.
    Structural,
    /// Pairwise coprime among the generators realized at this depth.
    UpToDepth(u32),
    NotCoprime,
}

pub(crate) fn coprime_denominators(spec: &GeneratorSpec, depth: u32) -> Result<Coprimality> {
    if structurally_coprime(spec) {
        return Ok(Coprimality::Structural);
    }
    let gens = crate::truncation::truncate(spec, depth)?;
    let dens: Vec<&BigUint> = gens.generators().iter().map(PositiveRational::denom).collect();
    let pairwise = dens
        .iter()
        .enumerate()
        .all(|(i, a)| dens[i + 1..].iter().all(|b| a.gcd(b).is_one()));
    Ok(if pairwise { Coprimality::UpToDepth(depth) } else { Coprimality::NotCoprime })
}

/// Integer-offset prime terms on disjoint indices, integer bases, and
/// explicit generators whose denominators avoid each other and every prime
/// the terms can reach.
fn structurally_coprime(spec: &GeneratorSpec) -> bool {
    let parts: Vec<&GeneratorSpec> = match spec {
        GeneratorSpec::Union(parts) => parts.iter().collect(),
        other => vec![other],
    };
    let mut terms: Vec<PrimeTerm> = Vec::new();
    let mut finite: Vec<&PositiveRational> = Vec::new();
    for p in &parts {
        match p {
            GeneratorSpec::PrimeFamily(ts) => terms.extend(ts.iter().cloned()),
            GeneratorSpec::Finite(gs) => finite.extend(gs),
            GeneratorSpec::Geometric(b) if b.is_integer() => {}
            GeneratorSpec::MultiCyclic(bs) if bs.iter().all(PositiveRational::is_integer) => {}
            _ => return false,
        }
    }
    if !terms.iter().all(|t| t.offset.is_integer()) || !indices_disjoint(&terms) {
        return false;
    }
    let dens: Vec<&BigUint> = finite.iter().map(|g| g.denom()).collect();
    if !dens.iter().enumerate().all(|(i, a)| dens[i + 1..].iter().all(|b| a.gcd(b).is_one())) {
        return false;
    }
    let primes = PrimeTable::global();
    dens.iter().all(|d| {
        let Some(d) = d.to_u64() else { return false };
        prime_factors(d).into_iter().all(|q| match primes.index_of(q) {
            Some(j) => terms.iter().all(|t| !t.index.hits(j)),
            None => terms.is_empty(),
        })
    })
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Known atomicity of cyclic-type families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum AtomicFact {
    /// `⟨q^n⟩` with `q < 1` and numerator above 1 is atomic.
    CyclicAtomic,
    /// Every generator is a positive multiple of a smaller one, so there are
    /// no atoms at all.
    NoAtoms,
}

pub(crate) fn atomic_fact(spec: &GeneratorSpec) -> Option<AtomicFact> {
    let one = PositiveRational::one();
    let bases: &[PositiveRational] = match spec {
        GeneratorSpec::Geometric(b) => std::slice::from_ref(b),
        GeneratorSpec::MultiCyclic(bs) => bs,
        _ => return None,
    };
    let unit_fraction = |b: &PositiveRational| b.numer().is_one() && *b < one;
    if bases.iter().any(unit_fraction) && bases.iter().all(|b| b.is_integer() || unit_fraction(b)) {
        return Some(AtomicFact::NoAtoms);
    }
    if let [b] = bases {
        if *b < one && !b.numer().is_one() {
            return Some(AtomicFact::CyclicAtomic);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::AffineIndex;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    fn plus_term(offset: &str, slope: u64, intercept: u64) -> PrimeTerm {
        PrimeTerm::new(q(offset), Sign::Plus, AffineIndex::new(slope, intercept))
    }

    #[test]
    fn zero_limit_examples() {
        assert_eq!(zero_limit_point(&GeneratorSpec::Geometric(q("2/3"))), ZeroLimitPoint::Yes);
        assert_eq!(zero_limit_point(&GeneratorSpec::prime_offset_three()), ZeroLimitPoint::No);
        assert_eq!(zero_limit_point(&GeneratorSpec::Finite(vec![q("1/2"), q("1/3")])), ZeroLimitPoint::No);
        assert_eq!(zero_limit_point(&GeneratorSpec::MultiCyclic(vec![q("2"), q("1/2")])), ZeroLimitPoint::Yes);
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_type(&GeneratorSpec::Geometric(q("3/2"))), OrderType::WellOrdered);
        assert_eq!(order_type(&GeneratorSpec::Geometric(q("2/3"))), OrderType::CoWellOrdered);
        assert_eq!(order_type(&GeneratorSpec::prime_offset_three()), OrderType::Neither);
        assert_eq!(order_type(&GeneratorSpec::Finite(vec![q("1")])), OrderType::Both);
        assert_eq!(order_type(&GeneratorSpec::MultiCyclic(vec![q("2/3"), q("3/2")])), OrderType::Neither);
        let u = GeneratorSpec::Union(vec![GeneratorSpec::Geometric(q("2")), GeneratorSpec::Finite(vec![q("1/2")])]);
        assert_eq!(order_type(&u), OrderType::WellOrdered);
    }

    #[test]
    fn limit_point_examples() {
        assert!(limit_points_in(&GeneratorSpec::Geometric(q("2/3"))).unwrap().is_empty());
        let fam = GeneratorSpec::PrimeFamily(vec![plus_term("3", 2, 0)]);
        assert!(limit_points_in(&fam).unwrap().is_empty());
        let u = GeneratorSpec::Union(vec![fam, GeneratorSpec::Finite(vec![q("3")])]);
        assert_eq!(limit_points_in(&u).unwrap(), vec![q("3")]);
    }

    #[test]
    fn coprimality() {
        assert_eq!(coprime_denominators(&GeneratorSpec::prime_offset_three(), 4).unwrap(), Coprimality::Structural);
        let u = GeneratorSpec::Union(vec![
            GeneratorSpec::PrimeFamily(vec![plus_term("3", 2, 0)]),
            GeneratorSpec::Finite(vec![q("3"), q("1/5")]),
        ]);
        // 5 = p_3 is never reached by even indices
        assert_eq!(coprime_denominators(&u, 3).unwrap(), Coprimality::Structural);
        let clash = GeneratorSpec::Union(vec![
            GeneratorSpec::PrimeFamily(vec![plus_term("3", 2, 0)]),
            GeneratorSpec::Finite(vec![q("1/7")]),
        ]);
        assert_eq!(coprime_denominators(&clash, 3).unwrap(), Coprimality::NotCoprime);
        let half = GeneratorSpec::PrimeFamily(vec![plus_term("5/2", 1, 0)]);
        assert_eq!(coprime_denominators(&half, 3).unwrap(), Coprimality::NotCoprime);
        assert_eq!(
            coprime_denominators(&GeneratorSpec::Finite(vec![q("1/2"), q("1/3")]), 1).unwrap(),
            Coprimality::Structural
        );
    }

    #[test]
    fn divisibility_analyzer_scope() {
        assert!(prime_family_divisibility(&GeneratorSpec::prime_offset_three()));
        let overlapping = GeneratorSpec::PrimeFamily(vec![plus_term("3", 2, 0), plus_term("4", 1, 0)]);
        assert!(!prime_family_divisibility(&overlapping));
    }

    #[test]
    fn atomic_facts() {
        assert_eq!(atomic_fact(&GeneratorSpec::Geometric(q("2/3"))), Some(AtomicFact::CyclicAtomic));
        assert_eq!(atomic_fact(&GeneratorSpec::Geometric(q("1/2"))), Some(AtomicFact::NoAtoms));
        assert_eq!(atomic_fact(&GeneratorSpec::MultiCyclic(vec![q("1/2"), q("3")])), Some(AtomicFact::NoAtoms));
        assert_eq!(atomic_fact(&GeneratorSpec::Geometric(q("3/2"))), None);
    }
}
