//! Cyclic rational semirings `ℕ[r]`: multiplicative atoms, bi-atoms and the
//! six-statement equivalence suite.
//!
//! The multiplicative monoid of `ℕ[r]` is not finitely generated, so every
//! multiplicative computation runs on a bounded universe: the elements
//! `≤ bound` of the additive truncation at a fixed depth. Factorizations
//! that need a factor outside that universe are invisible, and reports
//! carry a `soundness_note` whenever that can happen.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    accp_chain_search, classify, Direction, DivisibilityChain, Property, SearchConfig, Status, Verdict,
};
use crate::error::{Error, Result};
use crate::monoid::{self, member_table, scaled_elements, scaled_floor, Limits};
use crate::numeric::PositiveRational;
use crate::spec::GeneratorSpec;
use crate::truncation::{truncate, Truncation};

/// Depth used when a caller does not pick one.
pub const DEFAULT_DEPTH: u32 = 4;

/// Depths for the additive divisibility chain reported when `ℕ[r]` fails the
/// ACCP.
const CHAIN_DEPTHS: [u32; 3] = [2, 4, 6];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum SemiringSpec {
    CyclicSemiring(PositiveRational),
}

impl SemiringSpec {
    pub fn cyclic(r: PositiveRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidSpec("the semiring base must be positive".into()));
        }
        Ok(SemiringSpec::CyclicSemiring(r))
    }

    pub fn base(&self) -> &PositiveRational {
        match self {
            SemiringSpec::CyclicSemiring(r) => r,
        }
    }

    /// `(ℕ[r], +)` as a generating spec.
    pub fn additive(&self) -> GeneratorSpec {
        GeneratorSpec::Geometric(self.base().clone())
    }

    pub fn additive_truncation(&self, depth: u32) -> Result<Truncation> {
        truncate(&self.additive(), depth)
    }

    /// Square of the largest additive generator at `depth`.
    pub fn default_bound(&self, depth: u32) -> Result<PositiveRational> {
        let t = self.additive_truncation(depth)?;
        Ok(t.max_generator().pow(2))
    }

    /// Elements `≤ bound` of the additive truncation; always contains 1.
    pub fn universe(&self, depth: u32, bound: &PositiveRational, limits: &Limits) -> Result<Vec<PositiveRational>> {
        monoid::elements_below_with(bound, &self.additive_truncation(depth)?, limits)
    }

    /// Why the bounded universe may hide multiplicative factorizations, if
    /// it can.
    fn boundary_caveat(&self, depth: u32, bound: &PositiveRational) -> Option<String> {
        let r = self.base();
        let one = PositiveRational::one();
        if r.is_integer() {
            None
        } else if *r < one {
            Some(format!(
                "elements below 1 exist, so factors above the bound {bound} may combine into elements of the universe"
            ))
        } else if r.pow(depth + 1) <= *bound {
            Some(format!("r^{} = {} lies below the bound but outside the depth-{depth} truncation", depth + 1, r.pow(depth + 1)))
        } else {
            None
        }
    }
}

impl std::fmt::Display for SemiringSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CyclicSemiring({})", self.base())
    }
}

/// The universe in scaled integer form: `value · scale`, ascending.
struct ScaledUniverse {
    scale: u128,
    bound: u128,
    values: Vec<u128>,
    members: BTreeSet<u128>,
}

impl ScaledUniverse {
    fn build(spec: &SemiringSpec, depth: u32, bound: &PositiveRational, limits: &Limits) -> Result<Self> {
        if *bound < PositiveRational::one() {
            return Err(Error::InvalidSpec(format!("multiplicative bound {bound} is below 1")));
        }
        let t = spec.additive_truncation(depth)?;
        let scaled_bound = scaled_floor(bound, &t);
        let table = member_table(&t, &scaled_bound, limits)?;
        let values = scaled_elements(&table, &scaled_bound, limits.element_cap, "multiplicative universe")?;
        let narrow = |v: &BigUint| {
            v.to_u64().map(u128::from).ok_or_else(|| Error::Unsupported(format!("scaled value {v} exceeds 64 bits")))
        };
        let values = values.iter().map(narrow).collect::<Result<Vec<_>>>()?;
        Ok(ScaledUniverse {
            scale: narrow(t.scale())?,
            bound: narrow(&scaled_bound)?,
            members: values.iter().copied().collect(),
            values,
        })
    }

    fn to_rational(&self, v: u128) -> PositiveRational {
        PositiveRational::from_scaled(BigUint::from(v), &BigUint::from(self.scale))
    }

    /// Products `u·v` (`u ≤ v`, neither equal to 1) that land in the
    /// universe, as `(product, u, v)`.
    fn products(&self) -> Vec<(u128, u128, u128)> {
        let one = self.scale;
        let mut out: Vec<_> = self
            .values
            .par_iter()
            .enumerate()
            .filter(|(_, &u)| u != one)
            .flat_map_iter(|(i, &u)| {
                self.values[i..]
                    .iter()
                    .filter(move |&&v| v != one)
                    .map(move |&v| (u * v, v))
                    .take_while(move |&(p, _)| p / one <= self.bound)
                    .filter(move |&(p, _)| p % one == 0 && self.members.contains(&(p / one)))
                    .map(move |(p, v)| (p / one, u, v))
            })
            .collect();
        out.sort_unstable();
        out
    }
}

/// Elements of the universe other than 1 that are not a product of two
/// universe elements other than 1.
pub fn mult_atoms(spec: &SemiringSpec, depth: u32, bound: &PositiveRational) -> Result<Vec<PositiveRational>> {
    mult_atoms_with(spec, depth, bound, &Limits::default())
}

pub fn mult_atoms_with(
    spec: &SemiringSpec,
    depth: u32,
    bound: &PositiveRational,
    limits: &Limits,
) -> Result<Vec<PositiveRational>> {
    let u = ScaledUniverse::build(spec, depth, bound, limits)?;
    Ok(scaled_mult_atoms(&u).into_iter().map(|v| u.to_rational(v)).collect())
}

fn scaled_mult_atoms(u: &ScaledUniverse) -> Vec<u128> {
    let composite: BTreeSet<u128> = u.products().into_iter().map(|(p, _, _)| p).collect();
    u.values.iter().copied().filter(|&v| v != u.scale && !composite.contains(&v)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiAtomReport {
    pub depth: u32,
    pub bound: PositiveRational,
    pub additive_atoms: Vec<PositiveRational>,
    pub multiplicative_atoms_below_bound: Vec<PositiveRational>,
    pub bi_atoms: Vec<PositiveRational>,
    pub soundness_note: Option<String>,
}

pub fn bi_atoms(spec: &SemiringSpec, depth: u32, bound: &PositiveRational) -> Result<BiAtomReport> {
    bi_atoms_with(spec, depth, bound, &Limits::default())
}

pub fn bi_atoms_with(spec: &SemiringSpec, depth: u32, bound: &PositiveRational, limits: &Limits) -> Result<BiAtomReport> {
    let additive_atoms = monoid::atoms(&spec.additive_truncation(depth)?);
    let mult = mult_atoms_with(spec, depth, bound, limits)?;
    let bi_atoms = additive_atoms.iter().filter(|a| mult.binary_search(a).is_ok()).cloned().collect();
    Ok(BiAtomReport {
        depth,
        bound: bound.clone(),
        additive_atoms,
        multiplicative_atoms_below_bound: mult,
        bi_atoms,
        soundness_note: spec.boundary_caveat(depth, bound),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiReducedReport {
    pub holds: bool,
    pub structural: bool,
    pub rule: String,
    /// A universe element below 1 together with its inverse, when found.
    pub unit: Option<(PositiveRational, PositiveRational)>,
}

/// `(S, +)` is reduced because every element is nonnegative; `(S•, ·)` is
/// checked for a nontrivial unit `u < 1` whose inverse lies in the
/// universe.
pub fn bi_reduced_check(spec: &SemiringSpec, depth: u32) -> Result<BiReducedReport> {
    let r = spec.base();
    let bound = spec.default_bound(depth)?.max(r.recip().expect("positive base"));
    let universe = spec.universe(depth, &bound, &Limits::default())?;
    let one = PositiveRational::one();
    let unit = universe
        .iter()
        .filter(|u| **u < one)
        .find_map(|u| {
            let inv = u.recip().expect("positive element");
            universe.binary_search(&inv).is_ok().then(|| (u.clone(), inv))
        });
    let structural = *r >= one || r.numer() > &BigUint::one();
    let rule = if structural {
        "cyclic semiring with r ≥ 1 or n(r) > 1: 1 is the only multiplicative unit".to_string()
    } else if let Some((u, inv)) = &unit {
        format!("{u} · {inv} = 1 is a nontrivial unit")
    } else {
        format!("no nontrivial unit among elements ≤ {bound} at depth {depth}")
    };
    Ok(BiReducedReport { holds: structural || unit.is_none(), structural, rule, unit })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicativeCount {
    pub depth: u32,
    pub bound: PositiveRational,
    pub universe_size: usize,
    pub atoms: usize,
    /// Largest number of multiplicative factorizations of a single element.
    pub max_factorizations: u64,
    pub soundness_note: Option<String>,
}

/// Counts factorizations into multiplicative atoms inside the universe.
fn multiplicative_counts(spec: &SemiringSpec, depth: u32, limits: &Limits) -> Result<MultiplicativeCount> {
    let bound = spec.default_bound(depth)?;
    let u = ScaledUniverse::build(spec, depth, &bound, limits)?;
    let atoms = scaled_mult_atoms(&u);
    let atom_index: HashMap<u128, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();

    // divisors[p] = atoms a with p = a · q for some universe element q
    let mut splits: HashMap<u128, Vec<(usize, u128)>> = HashMap::new();
    for (p, a, b) in u.products() {
        if let Some(&i) = atom_index.get(&a) {
            splits.entry(p).or_default().push((i, b));
        }
        if a != b {
            if let Some(&i) = atom_index.get(&b) {
                splits.entry(p).or_default().push((i, a));
            }
        }
    }

    // count(p, i): factorizations of p using atoms of index ≥ i
    fn count(
        p: u128,
        i: usize,
        atom_index: &HashMap<u128, usize>,
        splits: &HashMap<u128, Vec<(usize, u128)>>,
        memo: &mut HashMap<(u128, usize), u64>,
    ) -> u64 {
        if let Some(&c) = memo.get(&(p, i)) {
            return c;
        }
        let mut c = u64::from(atom_index.get(&p).is_some_and(|&j| j >= i));
        if let Some(parts) = splits.get(&p) {
            for &(j, q) in parts {
                if j >= i {
                    c = c.saturating_add(count(q, j, atom_index, splits, memo));
                }
            }
        }
        memo.insert((p, i), c);
        c
    }

    let mut memo = HashMap::new();
    let max_factorizations = u
        .values
        .iter()
        .filter(|&&v| v != u.scale)
        .map(|&v| count(v, 0, &atom_index, &splits, &mut memo))
        .max()
        .unwrap_or(0);
    Ok(MultiplicativeCount {
        depth,
        bound: bound.clone(),
        universe_size: u.values.len(),
        atoms: atoms.len(),
        max_factorizations,
        soundness_note: spec.boundary_caveat(depth, &bound),
    })
}

/// One entry of an equivalence report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Statement {
    pub index: u8,
    pub name: &'static str,
    pub verdict: Verdict,
}

impl Statement {
    /// `Some(true)` for Proved or supporting evidence.
    pub fn polarity(&self) -> bool {
        match self.verdict.status {
            Status::Proved => true,
            Status::Refuted => false,
            Status::EvidenceAtDepth { direction, .. } => direction == Direction::Supports,
        }
    }
}

fn decided_conflict(statements: &[Statement]) -> bool {
    let any = |s: Status| statements.iter().any(|st| st.verdict.status == s);
    any(Status::Proved) && any(Status::Refuted)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BiffsReport {
    pub semiring: String,
    pub bi_reduced: BiReducedReport,
    pub statements: Vec<Statement>,
    pub multiplicative: Vec<MultiplicativeCount>,
    /// All three statements point the same way.
    pub agreement: bool,
}

/// Statements (1) bi-FFS, (2) additive FFM and (3) no `x` is a limit point
/// of `D(2x)`.
pub fn biffs_equivalence(spec: &SemiringSpec, config: &SearchConfig) -> Result<BiffsReport> {
    config.validate()?;
    let bi_reduced = bi_reduced_check(spec, config.depths[0])?;
    let classification = classify(&spec.additive(), config)?;
    let ffm = classification.verdict(Property::Ffm).clone();

    let mut multiplicative = Vec::new();
    let mut notes = Vec::new();
    for &depth in &config.depths {
        match multiplicative_counts(spec, depth, &config.limits) {
            Ok(c) => multiplicative.push(c),
            Err(e) if e.is_guard_trip() || matches!(e, Error::Unsupported(_)) => {
                notes.push(format!("multiplicative count at depth {depth} skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    let bi_ffs = match ffm.status {
        Status::Refuted => Verdict {
            rule: format!("additive half fails: {}", ffm.rule),
            notes: notes.clone(),
            ..ffm.clone()
        },
        Status::EvidenceAtDepth { direction: Direction::Contradicts, .. } => Verdict {
            rule: format!("additive half contradicted: {}", ffm.rule),
            notes: notes.clone(),
            ..ffm.clone()
        },
        _ => {
            let counts: Vec<String> =
                multiplicative.iter().map(|c| format!("depth {}: {}", c.depth, c.max_factorizations)).collect();
            let mut n = notes.clone();
            n.push(format!("additive half: {}", ffm.rule));
            Verdict {
                property: Property::Ffm,
                status: Status::EvidenceAtDepth { depth: config.deepest(), direction: Direction::Supports },
                rule: format!(
                    "multiplicative factorization counts stay finite (max per element, {})",
                    counts.join("; ")
                ),
                schedule: Some(config.depths.clone()),
                witness: None,
                notes: n,
            }
        }
    };
    let no_limit_point = Verdict {
        rule: format!("same test as additive FFM: {}", ffm.rule),
        ..ffm.clone()
    };

    let statements = vec![
        Statement { index: 1, name: "bi-FFS", verdict: bi_ffs },
        Statement { index: 2, name: "additive FFM", verdict: ffm },
        Statement { index: 3, name: "no x is a limit point of D(2x)", verdict: no_limit_point },
    ];
    let agreement = statements.iter().all(|s| s.polarity() == statements[0].polarity()) && !decided_conflict(&statements);
    Ok(BiffsReport { semiring: spec.to_string(), bi_reduced, statements, multiplicative, agreement })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteOutcome {
    AllHold,
    AllFail,
    Evidence,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicSuiteReport {
    pub semiring: String,
    pub outcome: SuiteOutcome,
    /// Why ℕ[r] is (or is not known to be) bi-atomic.
    pub precondition: String,
    pub statements: Vec<Statement>,
    pub bi_atoms: Option<BiAtomReport>,
    pub chain: Option<DivisibilityChain>,
    /// No statement is Proved while another is Refuted.
    pub consistent: bool,
    pub notes: Vec<String>,
}

const SUITE_NAMES: [&str; 6] = ["additive FFM", "additive BFM", "additive ACCP", "bi-FFS", "bi-BFS", "bi-ACCP"];
const SUITE_PROPERTIES: [Property; 3] = [Property::Ffm, Property::Bfm, Property::Accp];

fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(n) if n >= 2 => (2..).take_while(|d: &u64| d * d <= n).all(|d| n % d != 0),
        Some(_) => false,
        None => {
            // beyond 64 bits: trial division is still exact, just slow
            let two = BigUint::from(2u32);
            let mut d = two.clone();
            while &d * &d <= *n {
                if n.is_multiple_of(&d) {
                    return false;
                }
                d += 1u32;
            }
            true
        }
    }
}

fn decided(index: usize, status: Status, rule: &str) -> Statement {
    let property = SUITE_PROPERTIES[index % 3];
    Statement {
        index: index as u8 + 1,
        name: SUITE_NAMES[index],
        verdict: Verdict { property, status, rule: rule.to_string(), schedule: None, witness: None, notes: Vec::new() },
    }
}

/// The six equivalent statements for a bi-atomic `ℕ[r]`.
pub fn cyclic_suite(r: &PositiveRational, config: &SearchConfig) -> Result<CyclicSuiteReport> {
    config.validate()?;
    let spec = SemiringSpec::cyclic(r.clone())?;
    let one = PositiveRational::one();
    let (n, d) = r.num_den();
    let mut notes = Vec::new();

    if *r < one && n.is_one() {
        return Ok(CyclicSuiteReport {
            semiring: spec.to_string(),
            outcome: SuiteOutcome::NotApplicable,
            precondition: format!("{r} is a unit fraction: every power is a multiple of the next, so there are no atoms"),
            statements: Vec::new(),
            bi_atoms: None,
            chain: None,
            consistent: true,
            notes,
        });
    }

    let depth = DEFAULT_DEPTH;
    let bound = spec.default_bound(depth)?;
    let bi = match bi_atoms_with(&spec, depth, &bound, &config.limits) {
        Ok(b) => Some(b),
        Err(e) if e.is_guard_trip() || matches!(e, Error::Unsupported(_)) => {
            notes.push(format!("bi-atom scan skipped: {e}"));
            None
        }
        Err(e) => return Err(e),
    };

    let mut chain = None;
    let (precondition, statements) = if *r >= one {
        let rule = "r ≥ 1: the powers of r form a well-ordered generating set";
        ("r ≥ 1: bi-atomic".to_string(), (0..6).map(|i| decided(i, Status::Proved, rule)).collect::<Vec<_>>())
    } else if is_prime(&d) {
        let rule = "r < 1 with n(r) > 1 and prime d(r): ℕ[r] is bi-atomic but fails the bi-ACCP";
        let start = PositiveRational::from(2);
        chain = accp_chain_search(&spec.additive(), &CHAIN_DEPTHS, &start, 3, &config.limits)?;
        if chain.is_none() {
            notes.push("no divisibility chain of length ≥ 3 from 2 at depth 6".into());
        }
        (
            "r < 1 with n(r) > 1: bi-atomic".to_string(),
            (0..6).map(|i| decided(i, Status::Refuted, rule)).collect(),
        )
    } else {
        let c = classify(&spec.additive(), config)?;
        let additive: Vec<Statement> = SUITE_PROPERTIES
            .iter()
            .enumerate()
            .map(|(i, p)| Statement { index: i as u8 + 1, name: SUITE_NAMES[i], verdict: c.verdict(*p).clone() })
            .collect();
        let bi: Vec<Statement> = additive
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut verdict = s.verdict.clone();
                verdict.rule = format!("equivalent to statement ({}) for bi-atomic ℕ[r]: {}", i + 1, verdict.rule);
                Statement { index: i as u8 + 4, name: SUITE_NAMES[i + 3], verdict }
            })
            .collect();
        ("r < 1 with n(r) > 1: bi-atomic".to_string(), additive.into_iter().chain(bi).collect())
    };

    let consistent = !decided_conflict(&statements);
    let outcome = if statements.iter().all(|s| s.verdict.status == Status::Proved) {
        SuiteOutcome::AllHold
    } else if statements.iter().all(|s| s.verdict.status == Status::Refuted) {
        SuiteOutcome::AllFail
    } else {
        SuiteOutcome::Evidence
    };
    Ok(CyclicSuiteReport {
        semiring: spec.to_string(),
        outcome,
        precondition,
        statements,
        bi_atoms: bi,
        chain,
        consistent,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    fn cyclic(s: &str) -> SemiringSpec {
        SemiringSpec::cyclic(q(s)).unwrap()
    }

    #[test]
    fn mult_atoms_of_naturals_are_primes() {
        let atoms = mult_atoms(&cyclic("2"), 6, &q("30")).unwrap();
        let primes: Vec<_> = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29].map(PositiveRational::from).to_vec();
        assert_eq!(atoms, primes);
    }

    #[test]
    fn mult_atom_examples() {
        assert!(mult_atoms(&cyclic("3/2"), 3, &q("4")).unwrap().contains(&q("3/2")));
        assert!(mult_atoms(&cyclic("2/3"), 4, &q("2")).unwrap().contains(&q("2/3")));
    }

    #[test]
    fn bi_atom_examples() {
        let r = bi_atoms(&cyclic("3/2"), 3, &q("4")).unwrap();
        assert_eq!(r.bi_atoms, vec![q("3/2")]);
        assert!(bi_atoms(&cyclic("2"), 4, &q("30")).unwrap().bi_atoms.is_empty());
        let r = bi_atoms(&cyclic("2/3"), 4, &q("2")).unwrap();
        assert!(r.bi_atoms.contains(&q("2/3")));
        assert!(r.soundness_note.is_some());
    }

    #[test]
    fn bi_reduced() {
        for r in ["3/2", "2/3", "2"] {
            let rep = bi_reduced_check(&cyclic(r), 4).unwrap();
            assert!(rep.holds && rep.structural, "{r}");
        }
        let rep = bi_reduced_check(&cyclic("1/2"), 4).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.unit, Some((q("1/2"), q("2"))));
    }

    #[test]
    fn suite_outcomes() {
        let config = SearchConfig::default();
        let s = cyclic_suite(&q("3/2"), &config).unwrap();
        assert_eq!(s.outcome, SuiteOutcome::AllHold);
        assert_eq!(s.bi_atoms.unwrap().bi_atoms, vec![q("3/2")]);

        let s = cyclic_suite(&q("2/3"), &config).unwrap();
        assert_eq!(s.outcome, SuiteOutcome::AllFail);
        let chain = s.chain.unwrap();
        assert_eq!(chain.depth, 6);
        assert!(chain.len() >= 3);

        assert_eq!(cyclic_suite(&q("1/2"), &config).unwrap().outcome, SuiteOutcome::NotApplicable);
        assert_eq!(cyclic_suite(&q("5"), &config).unwrap().outcome, SuiteOutcome::AllHold);
    }

    #[test]
    fn composite_denominator_falls_back_to_evidence() {
        let s = cyclic_suite(&q("5/6"), &SearchConfig { depths: vec![2, 4], ..SearchConfig::default() }).unwrap();
        assert!(s.consistent);
        assert_eq!(s.statements.len(), 6);
        assert_eq!(s.statements[3].verdict.status, s.statements[0].verdict.status);
    }

    #[test]
    fn biffs_agreement() {
        let config = SearchConfig { depths: vec![2, 4], ..SearchConfig::default() };
        for r in ["3/2", "2/3", "2"] {
            let rep = biffs_equivalence(&cyclic(r), &config).unwrap();
            assert!(rep.agreement, "{r}");
            assert_eq!(rep.statements[1].verdict.status, rep.statements[2].verdict.status);
        }
        let rep = biffs_equivalence(&cyclic("2/3"), &SearchConfig::default()).unwrap();
        assert!(rep.agreement);
        assert!(!rep.statements[1].polarity());
    }
}
