//! Verdicts on the four factorization properties of `⟨S⟩`.
//!
//! Analytic rules for recognized families come first and are the only
//! source of `Proved`/`Refuted`. Everything computed from truncations is
//! reported as evidence at the depth schedule that produced it: a
//! finitely generated truncation always has finite factorization sets, so
//! truncation data alone cannot settle the infinite case.

mod reduce;
mod rules;
mod search;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::monoid;
use crate::numeric::PositiveRational;
use crate::spec::GeneratorSpec;
use crate::truncation::truncate;

pub use reduce::{reduce_generators, ReductionReport, Validity};
pub use rules::{limit_points_in, order_type, zero_limit_point, OrderType, ZeroLimitPoint};
pub use search::{
    accp_chain_search, witness_search, DeltaStep, DivisibilityChain, LimitPointWitness, SearchConfig, StepCoverage,
    WitnessReport,
};

use rules::{AtomicFact, Coprimality};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Property {
    Atomic,
    #[serde(rename = "ACCP")]
    Accp,
    #[serde(rename = "BFM")]
    Bfm,
    #[serde(rename = "FFM")]
    Ffm,
}

impl Property {
    /// Strongest first: each implies the next.
    pub const CHAIN: [Property; 4] = [Property::Ffm, Property::Bfm, Property::Accp, Property::Atomic];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Supports,
    Contradicts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Proved,
    Refuted,
    EvidenceAtDepth { depth: u32, direction: Direction },
}

impl Status {
    fn name(&self) -> &'static str {
        match self {
            Status::Proved => "Proved",
            Status::Refuted => "Refuted",
            Status::EvidenceAtDepth { .. } => "EvidenceAtDepth",
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, Status::Proved | Status::Refuted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    LimitPoint(LimitPointWitness),
    Chain(DivisibilityChain),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub property: Property,
    pub status: Status,
    pub rule: String,
    /// Depths examined; present for every evidence status.
    pub schedule: Option<Vec<u32>>,
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn decided(property: Property, status: Status, rule: impl Into<String>) -> Self {
        Verdict { property, status, rule: rule.into(), schedule: None, witness: None, notes: Vec::new() }
    }

    fn evidence(property: Property, config: &SearchConfig, direction: Direction, rule: impl Into<String>) -> Self {
        Verdict {
            property,
            status: Status::EvidenceAtDepth { depth: config.deepest(), direction },
            rule: rule.into(),
            schedule: Some(config.depths.clone()),
            witness: None,
            notes: Vec::new(),
        }
    }

    fn with_witness(mut self, w: Option<Witness>) -> Self {
        self.witness = w;
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (depth, direction) = match self.status {
            Status::EvidenceAtDepth { depth, direction } => (Some(depth), Some(direction)),
            _ => (None, None),
        };
        let mut s = serializer.serialize_struct("Verdict", 8)?;
        s.serialize_field("property", &self.property)?;
        s.serialize_field("status", self.status.name())?;
        s.serialize_field("depth", &depth)?;
        s.serialize_field("direction", &direction)?;
        s.serialize_field("rule", &self.rule)?;
        s.serialize_field("schedule", &self.schedule)?;
        s.serialize_field("witness", &self.witness)?;
        s.serialize_field("notes", &self.notes)?;
        s.end()
    }
}

/// Full report produced by [`classify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub spec: String,
    pub zero_limit_point: ZeroLimitPoint,
    pub order_type: OrderType,
    /// In the order Atomic, ACCP, BFM, FFM.
    pub verdicts: Vec<Verdict>,
    pub reduction: Option<ReductionReport>,
    pub witness_search: Option<WitnessReport>,
}

impl Classification {
    pub fn verdict(&self, p: Property) -> &Verdict {
        self.verdicts.iter().find(|v| v.property == p).expect("all four properties are present")
    }

    pub fn status(&self, p: Property) -> Status {
        self.verdict(p).status
    }

    /// `(Atomic, ACCP, BFM, FFM)` statuses.
    pub fn status_vector(&self) -> [Status; 4] {
        [Property::Atomic, Property::Accp, Property::Bfm, Property::Ffm].map(|p| self.status(p))
    }

    /// Whether Proved flows down and Refuted flows up the implication chain.
    pub fn respects_implications(&self) -> bool {
        Property::CHAIN.windows(2).all(|w| {
            let (stronger, weaker) = (self.status(w[0]), self.status(w[1]));
            (stronger != Status::Proved || weaker == Status::Proved)
                && (weaker != Status::Refuted || stronger == Status::Refuted)
        })
    }
}

/// BFM via "0 is not a limit point"; otherwise growth of the longest
/// factorization of a fixed probe across the depth schedule.
pub fn bfm_rule(spec: &GeneratorSpec, config: &SearchConfig) -> Result<Verdict> {
    config.validate()?;
    let chain = probe_chain(spec, config);
    Ok(bfm_from(spec, config, &chain))
}

fn bfm_from(spec: &GeneratorSpec, config: &SearchConfig, chain: &Result<Option<DivisibilityChain>>) -> Verdict {
    if zero_limit_point(spec) == ZeroLimitPoint::No {
        return Verdict::decided(Property::Bfm, Status::Proved, "0 is not a limit point of the generators");
    }
    growth_evidence(Property::Bfm, config, chain, "longest factorization length of the probe")
}

fn growth_evidence(
    property: Property,
    config: &SearchConfig,
    chain: &Result<Option<DivisibilityChain>>,
    what: &str,
) -> Verdict {
    match chain {
        Ok(Some(c)) if c.grows_with_depth => {
            Verdict::evidence(property, config, Direction::Contradicts, format!("{what} grows at every depth"))
                .with_witness(Some(Witness::Chain(c.clone())))
        }
        Ok(Some(c)) => Verdict::evidence(property, config, Direction::Supports, format!("{what} stabilizes"))
            .with_witness(Some(Witness::Chain(c.clone()))),
        Ok(None) => Verdict::evidence(property, config, Direction::Supports, format!("{what}: no long chain found")),
        Err(e) => Verdict::evidence(property, config, Direction::Supports, format!("{what}: search aborted"))
            .with_note(format!("error: {e}; no contradicting data was produced")),
    }
}

/// Chain from `2·(largest generator at the first depth)`.
fn probe_chain(spec: &GeneratorSpec, config: &SearchConfig) -> Result<Option<DivisibilityChain>> {
    let t = truncate(spec, config.depths[0])?;
    let start = t.max_generator() * &PositiveRational::from(2);
    accp_chain_search(spec, &config.depths, &start, 2, &config.limits)
}

/// FFM rules in precedence order, ending with the witness search.
pub fn ffm_rules(spec: &GeneratorSpec, config: &SearchConfig) -> Result<(Verdict, Option<WitnessReport>)> {
    config.validate()?;
    let bfm = bfm_rule(spec, config)?;
    ffm_from(spec, config, &bfm)
}

fn ffm_from(spec: &GeneratorSpec, config: &SearchConfig, bfm: &Verdict) -> Result<(Verdict, Option<WitnessReport>)> {
    let order = order_type(spec);
    if order.is_well_ordered() {
        return Ok((Verdict::decided(Property::Ffm, Status::Proved, "well-ordered generating set"), None));
    }
    if order.is_co_well_ordered() && bfm.status.is_decided() {
        let rule = format!("co-well-ordered generating set: FFM iff BFM ({})", bfm.rule);
        return Ok((Verdict::decided(Property::Ffm, bfm.status, rule), None));
    }
    if rules::prime_family_divisibility(spec) {
        let rule = "prime-family divisibility analyzer (example-specific): each element has finitely many divisors";
        return Ok((Verdict::decided(Property::Ffm, Status::Proved, rule), None));
    }
    let zero = zero_limit_point(spec);
    let coprime = if zero == ZeroLimitPoint::No {
        rules::coprime_denominators(spec, config.deepest())?
    } else {
        Coprimality::NotCoprime
    };
    if coprime == Coprimality::Structural {
        let rule = "pairwise coprime denominators and 0 is not a limit point";
        return Ok((Verdict::decided(Property::Ffm, Status::Proved, rule), None));
    }

    let report = match witness_search(spec, config) {
        Ok(r) => r,
        Err(e) => {
            let v = Verdict::evidence(Property::Ffm, config, Direction::Supports, "limit-point witness search aborted")
                .with_note(format!("error: {e}; no contradicting data was produced"));
            return Ok((v, None));
        }
    };
    let mut verdict = match report.witness() {
        Some(w) => Verdict::evidence(
            Property::Ffm,
            config,
            Direction::Contradicts,
            format!("x = {} is a limit point of D(2x) along the schedule", w.x),
        )
        .with_witness(Some(Witness::LimitPoint(w.clone()))),
        None => Verdict::evidence(Property::Ffm, config, Direction::Supports, "no limit-point witness within the schedule"),
    };
    if report.witnesses.len() > 1 {
        let xs: Vec<String> = report.witnesses.iter().map(|w| w.x.to_string()).collect();
        verdict.notes.push(format!("witnessing x: {}", xs.join(", ")));
    }
    if let Coprimality::UpToDepth(d) = coprime {
        verdict.notes.push(format!("denominators pairwise coprime up to depth {d}"));
    }
    for trip in report.guard_trips() {
        verdict.notes.push(format!("depth {} skipped: {}", trip.depth, trip.guard_trip.as_deref().unwrap_or("")));
    }
    Ok((verdict, Some(report)))
}

fn atomic_from(spec: &GeneratorSpec, config: &SearchConfig) -> Verdict {
    match rules::atomic_fact(spec) {
        Some(AtomicFact::CyclicAtomic) => {
            return Verdict::decided(Property::Atomic, Status::Proved, "cyclic generating set q^n with q < 1 and n(q) > 1");
        }
        Some(AtomicFact::NoAtoms) => {
            return Verdict::decided(
                Property::Atomic,
                Status::Refuted,
                "every generator is a multiple of a smaller generator, so there are no atoms",
            );
        }
        None => {}
    }
    // Generators at the first depth that stay atoms at the deepest depth.
    let stable = (|| -> Result<usize> {
        let first = truncate(spec, config.depths[0])?;
        let deep = truncate(spec, config.deepest())?;
        let atoms = monoid::atoms(&deep);
        Ok(first.generators().iter().filter(|g| atoms.binary_search(g).is_ok()).count())
    })();
    match stable {
        Ok(0) => Verdict::evidence(
            Property::Atomic,
            config,
            Direction::Contradicts,
            "no early generator survives as an atom at the deepest depth",
        ),
        Ok(n) => Verdict::evidence(
            Property::Atomic,
            config,
            Direction::Supports,
            format!("{n} early generators remain atoms at the deepest depth"),
        ),
        Err(e) => Verdict::evidence(Property::Atomic, config, Direction::Supports, "atom stability check aborted")
            .with_note(format!("error: {e}; no contradicting data was produced")),
    }
}

fn accp_from(config: &SearchConfig, chain: &Result<Option<DivisibilityChain>>) -> Verdict {
    growth_evidence(Property::Accp, config, chain, "longest divisibility chain from the probe")
}

/// Runs every rule and reconciles the four verdicts along
/// FFM ⟹ BFM ⟹ ACCP ⟹ Atomic.
pub fn classify(spec: &GeneratorSpec, config: &SearchConfig) -> Result<Classification> {
    config.validate()?;
    spec.validate()?;
    let zero = zero_limit_point(spec);
    let order = order_type(spec);

    let chain = if zero == ZeroLimitPoint::No { Ok(None) } else { probe_chain(spec, config) };
    let bfm = bfm_from(spec, config, &chain);

    let (reduction, reduced_ffm) = match multicyclic_reduction(spec, config)? {
        Some((report, Some(inner))) => (Some(report), Some(inner)),
        Some((report, None)) => (Some(report), None),
        None => (None, None),
    };
    let (ffm, witness_report) = match reduced_ffm {
        Some(pair) => pair,
        None => ffm_from(spec, config, &bfm)?,
    };

    let accp = if bfm.status == Status::Proved {
        Verdict::decided(Property::Accp, Status::Proved, "implied by BFM")
    } else {
        accp_from(config, &chain)
    };
    let atomic = atomic_from(spec, config);

    let mut verdicts = vec![atomic, accp, bfm, ffm];
    reconcile(&mut verdicts);
    Ok(Classification {
        spec: spec.to_string(),
        zero_limit_point: zero,
        order_type: order,
        verdicts,
        reduction,
        witness_search: witness_report,
    })
}

type ReducedFfm = (Verdict, Option<WitnessReport>);

/// For multicyclic sets mixing bases below and at-or-above 1, the FFM verdict
/// is that of the bases below 1 alone.
fn multicyclic_reduction(spec: &GeneratorSpec, config: &SearchConfig) -> Result<Option<(ReductionReport, Option<ReducedFfm>)>> {
    let GeneratorSpec::MultiCyclic(bases) = spec else { return Ok(None) };
    let one = PositiveRational::one();
    let (small, large): (Vec<_>, Vec<_>) = bases.iter().cloned().partition(|b| *b < one);
    if small.is_empty() || large.is_empty() {
        return Ok(None);
    }
    let report = reduce_generators(spec, &GeneratorSpec::MultiCyclic(large), &config.depths)?;
    if report.validity != Validity::Valid {
        return Ok(Some((report, None)));
    }
    let reduced = report.reduced.clone().expect("valid reductions carry the reduced spec");
    let inner_bfm = bfm_rule(&reduced, config)?;
    let (mut ffm, witnesses) = ffm_from(&reduced, config, &inner_bfm)?;
    ffm.rule = format!("same FFM verdict as {reduced} ({}): {}", report.rule, ffm.rule);
    ffm.notes.insert(0, format!("equivalent to {reduced}"));
    Ok(Some((report, Some((ffm, witnesses)))))
}

fn reconcile(verdicts: &mut [Verdict]) {
    let index = |p: Property| match p {
        Property::Atomic => 0,
        Property::Accp => 1,
        Property::Bfm => 2,
        Property::Ffm => 3,
    };
    // Proved flows from FFM towards Atomic.
    for w in Property::CHAIN.windows(2) {
        let (s, t) = (index(w[0]), index(w[1]));
        if verdicts[s].status == Status::Proved && verdicts[t].status != Status::Proved {
            let from = format!("{:?}", w[0]).to_uppercase();
            let previous = std::mem::take(&mut verdicts[t].rule);
            verdicts[t] = Verdict::decided(w[1], Status::Proved, format!("implied by {from}"))
                .with_note(format!("superseded: {previous}"));
        }
    }
    // Refuted flows from Atomic towards FFM.
    for w in Property::CHAIN.windows(2).rev() {
        let (s, t) = (index(w[0]), index(w[1]));
        if verdicts[t].status == Status::Refuted && verdicts[s].status != Status::Refuted {
            let previous = std::mem::take(&mut verdicts[s].rule);
            let from = match w[1] {
                Property::Atomic => "not atomic",
                Property::Accp => "ACCP fails",
                Property::Bfm => "not a BFM",
                Property::Ffm => "not an FFM",
            };
            verdicts[s] = Verdict::decided(w[0], Status::Refuted, format!("{from}, so the stronger property fails"))
                .with_note(format!("superseded: {previous}"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    fn statuses(spec: &GeneratorSpec) -> Classification {
        classify(spec, &SearchConfig::default()).unwrap()
    }

    #[test]
    fn well_ordered_is_proved_everywhere() {
        let c = statuses(&GeneratorSpec::Geometric(q("3/2")));
        assert!(c.status_vector().iter().all(|s| *s == Status::Proved));
        assert_eq!(c.verdict(Property::Ffm).rule, "well-ordered generating set");
    }

    #[test]
    fn two_thirds_contradicts_ffm() {
        let c = statuses(&GeneratorSpec::Geometric(q("2/3")));
        assert_eq!(c.status(Property::Atomic), Status::Proved);
        let contradicts = Status::EvidenceAtDepth { depth: 8, direction: Direction::Contradicts };
        assert_eq!(c.status(Property::Ffm), contradicts);
        assert_eq!(c.status(Property::Bfm), contradicts);
        assert_eq!(c.status(Property::Accp), contradicts);
        assert!(c.respects_implications());
    }

    #[test]
    fn prime_family_is_proved() {
        let c = statuses(&GeneratorSpec::prime_offset_three());
        assert!(c.status_vector().iter().all(|s| *s == Status::Proved));
        assert_eq!(c.order_type, OrderType::Neither);
        assert_eq!(c.verdict(Property::Bfm).rule, "0 is not a limit point of the generators");
    }

    #[test]
    fn unit_fraction_is_not_atomic() {
        let c = statuses(&GeneratorSpec::Geometric(q("1/2")));
        assert!(c.status_vector().iter().all(|s| *s == Status::Refuted));
        assert!(c.respects_implications());
    }

    #[test]
    fn mixed_multicyclic_reduces() {
        let mixed = statuses(&GeneratorSpec::MultiCyclic(vec![q("2/3"), q("3/2")]));
        let small = statuses(&GeneratorSpec::MultiCyclic(vec![q("2/3")]));
        assert_eq!(mixed.status(Property::Ffm), small.status(Property::Ffm));
        assert_eq!(mixed.reduction.as_ref().unwrap().validity, Validity::Valid);
        assert!(mixed.verdict(Property::Ffm).notes[0].contains("equivalent to MultiCyclic({2/3})"));
    }

    #[test]
    fn verdict_json_shape() {
        let v = Verdict::decided(Property::Ffm, Status::Proved, "r");
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"property":"FFM","status":"Proved","depth":null,"direction":null,"rule":"r","schedule":null,"witness":null,"notes":[]}"#
        );
    }
}
