//! Factorizations, length sets, monotone refinement and symmetric gaps.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoid::{self, member_table, scaled_atoms_desc, Limits};
use crate::numeric::PositiveRational;
use crate::table::DENSE_LIMIT;
use crate::truncation::Truncation;

/// A multiset of atoms, stored as ascending `(atom, multiplicity)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    atoms: Vec<(PositiveRational, u64)>,
    length: u64,
}

impl Factorization {
    /// Multiplicities of zero are dropped; order of input pairs is irrelevant.
    pub fn new(pairs: impl IntoIterator<Item = (PositiveRational, u64)>) -> Self {
        let mut merged: BTreeMap<PositiveRational, u64> = BTreeMap::new();
        for (a, m) in pairs {
            if m > 0 {
                *merged.entry(a).or_default() += m;
            }
        }
        let length = merged.values().sum();
        Factorization { atoms: merged.into_iter().collect(), length }
    }

    pub fn atom_multiplicities(&self) -> &[(PositiveRational, u64)] {
        &self.atoms
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    /// `π(z)`.
    pub fn image(&self) -> PositiveRational {
        self.atoms
            .iter()
            .map(|(a, m)| a * &PositiveRational::from(*m))
            .sum()
    }

    pub fn sorted_view(&self) -> SortedFactorizationView {
        SortedFactorizationView(
            self.atoms
                .iter()
                .flat_map(|(a, m)| std::iter::repeat_n(a.clone(), *m as usize))
                .collect(),
        )
    }
}

impl std::fmt::Display for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, m)| if *m == 1 { a.to_string() } else { format!("{m}*{a}") })
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

/// The atoms of a factorization listed with repetition, nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SortedFactorizationView(pub Vec<PositiveRational>);

impl SortedFactorizationView {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coordinate(&self, i: usize) -> &PositiveRational {
        &self.0[i]
    }
}

/// Every factorization of `x` in `⟨t⟩`, ordered lexicographically by sorted
/// view. Empty when `x` is not a member.
pub fn factorizations(x: &PositiveRational, t: &Truncation) -> Result<Vec<Factorization>> {
    factorizations_with(x, t, &Limits::default())
}

pub fn factorizations_with(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Vec<Factorization>> {
    let Some(target) = t.to_scaled(x) else { return Ok(Vec::new()) };
    let atoms = scaled_atoms_desc(t);
    let values: Vec<BigUint> = atoms.iter().map(|(v, _)| v.clone()).collect();
    let mut search = Enumerator {
        atoms: &values,
        feasible: HashMap::new(),
        coeffs: vec![0; values.len()],
        out: Vec::new(),
        cap: limits.factorization_cap,
    };
    search.walk(0, target).map_err(|_| Error::FactorizationCapExceeded { x: x.clone(), cap: limits.factorization_cap })?;
    let mut zs: Vec<Factorization> = search
        .out
        .into_iter()
        .map(|c| Factorization::new(atoms.iter().map(|(_, a)| a.clone()).zip(c)))
        .collect();
    zs.sort_by_cached_key(|z| z.sorted_view());
    Ok(zs)
}

struct Enumerator<'a> {
    atoms: &'a [BigUint],
    feasible: HashMap<(usize, BigUint), bool>,
    coeffs: Vec<u64>,
    out: Vec<Vec<u64>>,
    cap: usize,
}

struct CapHit;

impl Enumerator<'_> {
    fn can_reach(&mut self, i: usize, rem: &BigUint) -> bool {
        if rem.is_zero() {
            return true;
        }
        if i == self.atoms.len() {
            return false;
        }
        if let Some(&r) = self.feasible.get(&(i, rem.clone())) {
            return r;
        }
        let a = &self.atoms[i];
        let mut r = false;
        let mut left = rem.clone();
        loop {
            if self.can_reach(i + 1, &left) {
                r = true;
                break;
            }
            if &left < a {
                break;
            }
            left -= a;
        }
        self.feasible.insert((i, rem.clone()), r);
        r
    }

    fn walk(&mut self, i: usize, rem: BigUint) -> std::result::Result<(), CapHit> {
        if rem.is_zero() {
            if self.out.len() >= self.cap {
                return Err(CapHit);
            }
            let mut c = self.coeffs.clone();
            c[i..].iter_mut().for_each(|v| *v = 0);
            self.out.push(c);
            return Ok(());
        }
        if !self.can_reach(i, &rem) {
            return Ok(());
        }
        let a = self.atoms[i].clone();
        let max = (&rem / &a).to_u64().unwrap_or(u64::MAX);
        for c in (0..=max).rev() {
            let next = &rem - &a * c;
            if self.can_reach(i + 1, &next) {
                self.coeffs[i] = c;
                self.walk(i + 1, next)?;
            }
        }
        self.coeffs[i] = 0;
        Ok(())
    }
}

/// `L(x)`: the set of factorization lengths; `{0}` for `x = 0`.
pub fn lengths(x: &PositiveRational, t: &Truncation) -> Result<BTreeSet<u64>> {
    lengths_with(x, t, &Limits::default())
}

pub fn lengths_with(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<BTreeSet<u64>> {
    Ok(factorizations_with(x, t, limits)?.iter().map(Factorization::length).collect())
}

/// Groups factorizations by length (the equal-length classes refinement acts on).
pub fn group_by_length(zs: &[Factorization]) -> BTreeMap<u64, Vec<SortedFactorizationView>> {
    let mut groups: BTreeMap<u64, Vec<SortedFactorizationView>> = BTreeMap::new();
    for z in zs {
        groups.entry(z.length()).or_default().push(z.sorted_view());
    }
    groups
}

/// Largest factorization length of `x` without enumerating factorizations.
pub fn max_length(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Option<u64>> {
    let Some(target) = t.to_scaled(x) else { return Ok(None) };
    Ok(LengthTable::build(x, t, limits)?.max_length(&target))
}

/// Maximum factorization lengths of every member up to a bound (scaled),
/// by dynamic programming over the atoms.
pub(crate) enum LengthTable {
    Dense(Vec<u32>),
    Sparse(HashMap<BigUint, u64>),
}

impl LengthTable {
    const UNREACHABLE: u32 = u32::MAX;

    pub fn build(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Self> {
        let bound = monoid::scaled_floor(x, t);
        let atoms: Vec<BigUint> = scaled_atoms_desc(t).into_iter().map(|(v, _)| v).collect();
        if let Some(b) = bound.to_u64().filter(|&b| b <= DENSE_LIMIT) {
            let small: Vec<usize> = atoms.iter().filter_map(|a| a.to_u64()).filter(|&a| a <= b).map(|a| a as usize).collect();
            let mut best = vec![Self::UNREACHABLE; b as usize + 1];
            best[0] = 0;
            for v in 1..best.len() {
                let mut m = Self::UNREACHABLE;
                for &a in &small {
                    if a <= v {
                        let prev = best[v - a];
                        if prev != Self::UNREACHABLE && (m == Self::UNREACHABLE || prev + 1 > m) {
                            m = prev + 1;
                        }
                    }
                }
                best[v] = m;
            }
            return Ok(LengthTable::Dense(best));
        }
        let table = member_table(t, &bound, limits)?;
        let members = monoid::scaled_elements(&table, &bound, limits.element_cap, "length table")?;
        let mut best: HashMap<BigUint, u64> = HashMap::with_capacity(members.len() + 1);
        best.insert(BigUint::zero(), 0);
        for m in members {
            let l = atoms.iter().filter(|a| *a <= &m).filter_map(|a| best.get(&(&m - a))).max().map(|l| l + 1);
            if let Some(l) = l {
                best.insert(m, l);
            }
        }
        Ok(LengthTable::Sparse(best))
    }

    pub fn max_length(&self, v: &BigUint) -> Option<u64> {
        match self {
            LengthTable::Dense(best) => v
                .to_usize()
                .and_then(|i| best.get(i))
                .filter(|&&l| l != Self::UNREACHABLE)
                .map(|&l| u64::from(l)),
            LengthTable::Sparse(best) => best.get(v).copied(),
        }
    }
}

/// `⌈x / ε⌉`, an upper bound on factorization lengths when every atom is at
/// least `ε`.
pub fn length_bound(x: &PositiveRational, epsilon: &PositiveRational) -> Result<BigUint> {
    x.ceil_div(epsilon).ok_or(Error::ZeroEpsilon)
}

/// Per-coordinate behaviour of a refined sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Constant,
    Increasing,
    Decreasing,
}

impl Tag {
    const ALL: [Tag; 3] = [Tag::Constant, Tag::Increasing, Tag::Decreasing];

    pub fn holds(self, a: &PositiveRational, b: &PositiveRational) -> bool {
        match self {
            Tag::Constant => a == b,
            Tag::Increasing => a < b,
            Tag::Decreasing => a > b,
        }
    }
}

/// Output of [`monotone_refine`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    /// Positions of the kept views in the input, ascending.
    pub indices: Vec<usize>,
    pub views: Vec<SortedFactorizationView>,
    pub tags: Vec<Tag>,
}

/// Above this many coordinates the exhaustive tag search is skipped.
const EXACT_TAG_COORDINATES: usize = 6;

/// Extracts a subsequence whose every coordinate is constant, strictly
/// increasing or strictly decreasing.
///
/// Coordinates are refined one at a time, lowest first, each time keeping
/// the longest monotone run. For up to six coordinates the best joint choice
/// of tags is also computed and used when it keeps strictly more views.
pub fn monotone_refine(zs: &[SortedFactorizationView]) -> Result<Refinement> {
    let Some(first) = zs.first() else { return Err(Error::EmptyInput("monotone_refine")) };
    let l = first.len();
    if l == 0 {
        return Err(Error::EmptyInput("zero-length factorization views"));
    }
    if let Some(other) = zs.iter().find(|z| z.len() != l) {
        return Err(Error::MixedLengths { first: l, other: other.len() });
    }

    let mut kept: Vec<usize> = (0..zs.len()).collect();
    let mut tags = Vec::with_capacity(l);
    for c in 0..l {
        let (tag, chain) = Tag::ALL
            .iter()
            .map(|&tag| (tag, longest_chain(zs, &kept, &[(c, tag)])))
            .max_by(|(ta, a), (tb, b)| a.len().cmp(&b.len()).then_with(|| b.cmp(a)).then_with(|| tb.cmp(ta)))
            .expect("three tags");
        kept = chain;
        tags.push(tag);
    }

    if l <= EXACT_TAG_COORDINATES {
        let all: Vec<usize> = (0..zs.len()).collect();
        let mut best: Option<(Vec<Tag>, Vec<usize>)> = None;
        for code in 0..3usize.pow(l as u32) {
            let mut rest = code;
            let candidate: Vec<Tag> = (0..l)
                .map(|_| {
                    let t = Tag::ALL[rest % 3];
                    rest /= 3;
                    t
                })
                .collect();
            let constraint: Vec<(usize, Tag)> = candidate.iter().copied().enumerate().collect();
            let chain = longest_chain(zs, &all, &constraint);
            let better = match &best {
                None => true,
                Some((_, b)) => chain.len() > b.len() || (chain.len() == b.len() && chain < *b),
            };
            if better {
                best = Some((candidate, chain));
            }
        }
        let (exact_tags, exact_chain) = best.expect("at least one tag vector");
        if exact_chain.len() > kept.len() {
            kept = exact_chain;
            tags = exact_tags;
        }
    }

    Ok(Refinement { views: kept.iter().map(|&i| zs[i].clone()).collect(), indices: kept, tags })
}

/// Longest subsequence of `pool` (positions into `zs`, ascending) whose
/// consecutive entries satisfy every `(coordinate, tag)` constraint. Among
/// longest chains the lexicographically smallest index list is returned.
fn longest_chain(zs: &[SortedFactorizationView], pool: &[usize], constraint: &[(usize, Tag)]) -> Vec<usize> {
    let n = pool.len();
    if n == 0 {
        return Vec::new();
    }
    let rel = |a: usize, b: usize| constraint.iter().all(|&(c, tag)| tag.holds(zs[a].coordinate(c), zs[b].coordinate(c)));
    // from[i]: longest valid chain starting at pool[i]
    let mut from = vec![1usize; n];
    for i in (0..n).rev() {
        for j in i + 1..n {
            if from[j] + 1 > from[i] && rel(pool[i], pool[j]) {
                from[i] = from[j] + 1;
            }
        }
    }
    let best = *from.iter().max().expect("nonempty");
    let mut chain = Vec::with_capacity(best);
    let mut cur = (0..n).find(|&i| from[i] == best).expect("maximum attained");
    chain.push(pool[cur]);
    while from[cur] > 1 {
        cur = (cur + 1..n)
            .find(|&j| from[j] == from[cur] - 1 && rel(pool[cur], pool[j]))
            .expect("chain continues");
        chain.push(pool[cur]);
    }
    chain
}

/// Which symmetric gap [`find_delta_with`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaStrategy {
    /// Smallest `δ` overall.
    #[default]
    Smallest,
    /// Largest generator `g < ε` that is itself a symmetric gap, falling back
    /// to the smallest `δ` when no generator qualifies.
    PreferGenerator,
}

/// Smallest `δ` with `0 < δ < ε` such that `x − δ` and `x + δ` are both
/// members of `⟨t⟩`. `None` is exhaustive for the truncation.
pub fn find_delta(x: &PositiveRational, t: &Truncation, epsilon: &PositiveRational) -> Result<Option<PositiveRational>> {
    find_delta_with(x, t, epsilon, DeltaStrategy::Smallest, &Limits::default())
}

pub fn find_delta_with(
    x: &PositiveRational,
    t: &Truncation,
    epsilon: &PositiveRational,
    strategy: DeltaStrategy,
    limits: &Limits,
) -> Result<Option<PositiveRational>> {
    if epsilon.is_zero() {
        return Err(Error::ZeroEpsilon);
    }
    let not_member = || Error::NotInMonoid(x.clone());
    let target = t.to_scaled(x).ok_or_else(not_member)?;
    // δ < ε on the scaled grid means δ ≤ ⌈ε·L⌉ − 1.
    let eps_scaled = epsilon.numer() * t.scale();
    let ceil = (&eps_scaled + epsilon.denom() - 1u32) / epsilon.denom();
    if ceil <= BigUint::from(1u32) {
        if !monoid::is_member(x, t) {
            return Err(not_member());
        }
        return Ok(None);
    }
    let max_delta = ceil - 1u32;
    let table = member_table(t, &(&target + &max_delta), limits)?;
    if !table.contains(&target) {
        return Err(not_member());
    }
    if strategy == DeltaStrategy::PreferGenerator {
        let hit = t
            .scaled_generators()
            .iter()
            .rev()
            .filter(|g| *g <= &max_delta && *g < &target)
            .find(|g| table.contains(&(&target - *g)) && table.contains(&(&target + *g)));
        if let Some(g) = hit {
            return Ok(Some(t.unscale(g.clone())));
        }
    }
    Ok(table.smallest_symmetric_gap(&target, &max_delta).map(|d| t.unscale(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::GeneratorSpec;
    use crate::truncation::truncate;
    use proptest::prelude::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<PositiveRational> {
        v.iter().map(|s| q(s)).collect()
    }

    fn fin(v: &[&str]) -> Truncation {
        Truncation::from_generators(qs(v)).unwrap()
    }

    fn view(v: &[u64]) -> SortedFactorizationView {
        SortedFactorizationView(v.iter().map(|&n| PositiveRational::from(n)).collect())
    }

    #[test]
    fn factorization_examples() {
        let zs = factorizations(&q("6"), &fin(&["2", "3"])).unwrap();
        let views: Vec<_> = zs.iter().map(|z| z.sorted_view().0).collect();
        assert_eq!(views, vec![qs(&["2", "2", "2"]), qs(&["3", "3"])]);

        let zs = factorizations(&q("1"), &fin(&["1/2", "1/3"])).unwrap();
        let views: Vec<_> = zs.iter().map(|z| z.sorted_view().0).collect();
        assert_eq!(views, vec![qs(&["1/3", "1/3", "1/3"]), qs(&["1/2", "1/2"])]);

        assert!(factorizations(&q("1/6"), &fin(&["1/2", "1/3"])).unwrap().is_empty());
        assert!(factorizations(&q("1/7"), &fin(&["1/2", "1/3"])).unwrap().is_empty());
        let zero = factorizations(&q("0"), &fin(&["2"])).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].length(), 0);
    }

    #[test]
    fn factorization_json_shape() {
        let z = Factorization::new([(q("1/3"), 2), (q("1/2"), 1)]);
        assert_eq!(
            serde_json::to_string(&z).unwrap(),
            r#"{"atoms":[["1/3",2],["1/2",1]],"length":3}"#
        );
        assert_eq!(z.image(), q("7/6"));
        assert_eq!(z.to_string(), "2*1/3 + 1/2");
    }

    #[test]
    fn factorization_cap_trips() {
        let limits = Limits { factorization_cap: 1, ..Limits::default() };
        let e = factorizations_with(&q("6"), &fin(&["2", "3"]), &limits).unwrap_err();
        assert!(e.is_guard_trip());
    }

    #[test]
    fn length_examples() {
        let t = fin(&["2", "3"]);
        assert_eq!(lengths(&q("6"), &t).unwrap(), BTreeSet::from([2, 3]));
        assert_eq!(lengths(&q("0"), &t).unwrap(), BTreeSet::from([0]));
        assert_eq!(lengths(&q("5"), &t).unwrap(), BTreeSet::from([2]));
        assert!(lengths(&q("1"), &t).unwrap().is_empty());
        assert_eq!(max_length(&q("6"), &t, &Limits::default()).unwrap(), Some(3));
        assert_eq!(max_length(&q("1"), &t, &Limits::default()).unwrap(), None);
    }

    #[test]
    fn length_bound_examples() {
        assert_eq!(length_bound(&q("6"), &q("2")).unwrap(), BigUint::from(3u32));
        assert_eq!(length_bound(&q("1"), &q("1/3")).unwrap(), BigUint::from(3u32));
        assert_eq!(length_bound(&q("7"), &q("2")).unwrap(), BigUint::from(4u32));
        assert_eq!(length_bound(&q("7"), &q("0")).unwrap_err(), Error::ZeroEpsilon);
    }

    #[test]
    fn grouping_by_length() {
        let zs = factorizations(&q("12"), &fin(&["2", "3"])).unwrap();
        let g = group_by_length(&zs);
        assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![4, 5, 6]);
        assert_eq!(g[&4], vec![view(&[3, 3, 3, 3])]);
    }

    #[test]
    fn refine_examples() {
        let r = monotone_refine(&[view(&[1, 5]), view(&[2, 4]), view(&[3, 3])]).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2]);
        assert_eq!(r.tags, vec![Tag::Increasing, Tag::Decreasing]);

        let r = monotone_refine(&[view(&[1, 1]), view(&[2, 2]), view(&[1, 3])]).unwrap();
        assert_eq!(r.indices.len(), 2);
        assert!(r.indices == vec![0, 1] || r.indices == vec![0, 2]);

        let r = monotone_refine(&[view(&[2, 2])]).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert_eq!(r.tags, vec![Tag::Constant, Tag::Constant]);

        let e = monotone_refine(&[view(&[1, 2]), view(&[1])]).unwrap_err();
        assert_eq!(e, Error::MixedLengths { first: 2, other: 1 });
        assert!(monotone_refine(&[]).is_err());
    }

    #[test]
    fn find_delta_examples() {
        let g6 = truncate(&GeneratorSpec::Geometric(q("2/3")), 6).unwrap();
        let limits = Limits::default();
        let d = find_delta_with(&q("2"), &g6, &q("1/5"), DeltaStrategy::PreferGenerator, &limits).unwrap();
        assert_eq!(d, Some(q("16/81")));
        assert_eq!(find_delta(&q("2"), &g6, &q("1/5")).unwrap(), Some(q("2/729")));

        assert_eq!(find_delta(&q("6"), &fin(&["2", "3"]), &q("1")).unwrap(), None);
        assert_eq!(find_delta(&q("1"), &fin(&["1"]), &q("1/2")).unwrap(), None);
        assert_eq!(find_delta(&q("1"), &fin(&["2", "3"]), &q("1")).unwrap_err(), Error::NotInMonoid(q("1")));
        assert_eq!(find_delta(&q("2"), &fin(&["2"]), &q("0")).unwrap_err(), Error::ZeroEpsilon);
    }

    fn check_refinement(zs: &[SortedFactorizationView], r: &Refinement) {
        assert!(r.indices.windows(2).all(|w| w[0] < w[1]));
        for (k, &i) in r.indices.iter().enumerate() {
            assert_eq!(r.views[k], zs[i]);
        }
        for (c, tag) in r.tags.iter().enumerate() {
            for w in r.views.windows(2) {
                assert!(tag.holds(w[0].coordinate(c), w[1].coordinate(c)));
            }
        }
        let bound = (zs.len() as f64).powf(1.0 / 2f64.powi(r.tags.len() as i32)).ceil() as usize;
        assert!(r.views.len() >= bound, "{} < {bound}", r.views.len());
    }

    proptest! {
        #[test]
        fn refinement_is_valid(raw in prop::collection::btree_set(prop::collection::vec(1u64..6, 3), 1..40)) {
            let zs: Vec<_> = raw.into_iter().map(|mut v| { v.sort(); view(&v) }).collect::<BTreeSet<_>>().into_iter().collect();
            let r = monotone_refine(&zs).unwrap();
            check_refinement(&zs, &r);
        }

        #[test]
        fn factorizations_evaluate_to_x(a in 2u64..9, b in 2u64..9, x in 0u64..40) {
            let t = Truncation::from_generators(vec![a.into(), b.into()]).unwrap();
            let x = PositiveRational::from(x);
            let zs = factorizations(&x, &t).unwrap();
            prop_assert_eq!(zs.is_empty(), !monoid::is_member(&x, &t));
            for z in &zs {
                prop_assert_eq!(z.image(), x.clone());
            }
            let ls = lengths(&x, &t).unwrap();
            prop_assert_eq!(ls.iter().next_back().copied(), max_length(&x, &t, &Limits::default()).unwrap());
        }
    }
}
