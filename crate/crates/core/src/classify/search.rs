//! Bounded searches over deepening truncations: symmetric-gap witnesses and
//! divisibility chains.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::DeltaStrategy;
use crate::monoid::{self, member_table, scaled_atoms_desc, scaled_floor, Limits};
use crate::numeric::PositiveRational;
use crate::spec::GeneratorSpec;
use crate::table::MemberTable;
use crate::truncation::{truncate, Truncation};

/// Depth and tolerance schedules shared by every search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchConfig {
    pub depths: Vec<u32>,
    pub epsilons: Vec<PositiveRational>,
    /// `None` means four times the largest generator at depth 2.
    pub x_bound: Option<PositiveRational>,
    pub limits: Limits,
}

impl Default for SearchConfig {
    fn default() -> Self {
        let eps = [2u64, 5, 10, 20, 50].map(|d| PositiveRational::new(1u32, d).expect("nonzero"));
        SearchConfig { depths: vec![2, 4, 6, 8], epsilons: eps.to_vec(), x_bound: None, limits: Limits::default() }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depths.is_empty() || self.epsilons.is_empty() {
            return Err(Error::InvalidSchedule("depth and epsilon schedules must be nonempty".into()));
        }
        if self.depths[0] == 0 {
            return Err(Error::InvalidDepth);
        }
        if self.depths.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule("depths must be strictly increasing".into()));
        }
        if self.epsilons.iter().any(PositiveRational::is_zero) {
            return Err(Error::ZeroEpsilon);
        }
        if self.epsilons.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidSchedule("epsilons must be strictly decreasing".into()));
        }
        if self.limits.element_cap == 0 || self.limits.factorization_cap == 0 {
            return Err(Error::InvalidSchedule("caps must be positive".into()));
        }
        Ok(())
    }

    pub fn deepest(&self) -> u32 {
        *self.depths.last().expect("validated schedule")
    }

    /// `(depth, ε)` per step; the shorter schedule repeats its last entry.
    pub fn steps(&self) -> Vec<(u32, PositiveRational)> {
        let n = self.depths.len().max(self.epsilons.len());
        (0..n)
            .map(|i| {
                let d = self.depths[i.min(self.depths.len() - 1)];
                let e = self.epsilons[i.min(self.epsilons.len() - 1)].clone();
                (d, e)
            })
            .collect()
    }

    pub fn resolve_x_bound(&self, spec: &GeneratorSpec) -> Result<PositiveRational> {
        match &self.x_bound {
            Some(b) => Ok(b.clone()),
            None => {
                let t = truncate(spec, 2)?;
                Ok(t.max_generator() * &PositiveRational::from(4))
            }
        }
    }
}

/// `x` together with strictly decreasing gaps `δ` such that `x ± δ` are
/// members at the recorded depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitPointWitness {
    pub x: PositiveRational,
    pub deltas: Vec<DeltaStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaStep {
    pub depth: u32,
    pub epsilon: PositiveRational,
    pub delta: PositiveRational,
}

impl LimitPointWitness {
    /// Re-checks every step with independent membership certificates.
    pub fn verify(&self, spec: &GeneratorSpec) -> Result<bool> {
        let mut previous: Option<&PositiveRational> = None;
        for step in &self.deltas {
            if step.delta.is_zero() || step.delta >= step.epsilon || previous.is_some_and(|p| &step.delta >= p) {
                return Ok(false);
            }
            let t = truncate(spec, step.depth)?;
            let Some(low) = self.x.checked_sub(&step.delta) else { return Ok(false) };
            let high = &self.x + &step.delta;
            for v in [&low, &high] {
                match monoid::membership(v, &t) {
                    Some(c) if &c.evaluate() == v => {}
                    _ => return Ok(false),
                }
            }
            previous = Some(&step.delta);
        }
        Ok(!self.deltas.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepCoverage {
    pub depth: u32,
    pub epsilon: PositiveRational,
    /// Members `≤ x_bound` at this depth (`None` when a guard tripped).
    pub elements: Option<usize>,
    /// Grid points whose gap chain is still alive after this step.
    pub surviving: usize,
    pub guard_trip: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub x_bound: PositiveRational,
    /// Every grid point whose chain survived all steps, ascending in `x`.
    pub witnesses: Vec<LimitPointWitness>,
    pub coverage: Vec<StepCoverage>,
}

impl WitnessReport {
    /// The smallest witnessing `x`.
    pub fn witness(&self) -> Option<&LimitPointWitness> {
        self.witnesses.first()
    }

    pub fn witness_at(&self, x: &PositiveRational) -> Option<&LimitPointWitness> {
        self.witnesses.iter().find(|w| &w.x == x)
    }

    pub fn guard_trips(&self) -> impl Iterator<Item = &StepCoverage> {
        self.coverage.iter().filter(|c| c.guard_trip.is_some())
    }
}

/// Runs the gap search over the schedule. The grid is the set of members
/// `≤ x_bound` at the first depth whose table fits the guards; at each later
/// step a grid point survives when it has a gap `δ` below both the step's
/// `ε` and its previous gap.
pub fn witness_search(spec: &GeneratorSpec, config: &SearchConfig) -> Result<WitnessReport> {
    config.validate()?;
    spec.validate()?;
    let x_bound = config.resolve_x_bound(spec)?;
    let limits = &config.limits;

    // grid point -> chain so far (None once the chain broke)
    let mut grid: Option<Vec<(PositiveRational, Option<Vec<DeltaStep>>)>> = None;
    let mut coverage = Vec::new();

    for (depth, epsilon) in config.steps() {
        let step = (|| -> Result<(Truncation, MemberTable, BigUint, usize)> {
            let t = truncate(spec, depth)?;
            let bound = scaled_floor(&x_bound, &t);
            let max_delta = max_scaled_delta(&epsilon, &t);
            let table = member_table(&t, &(&bound + &max_delta), limits)?;
            let count = table.count_in(&BigUint::from(1u32), &bound);
            if count > limits.element_cap {
                return Err(Error::ElementCapExceeded { what: format!("elements up to {x_bound}"), cap: limits.element_cap });
            }
            Ok((t, table, max_delta, count))
        })();
        let (t, table, max_delta, count) = match step {
            Ok(s) => s,
            Err(e) if e.is_guard_trip() => {
                let surviving = grid.as_ref().map_or(0, |g| g.iter().filter(|(_, c)| c.is_some()).count());
                coverage.push(StepCoverage { depth, epsilon, elements: None, surviving, guard_trip: Some(e.to_string()) });
                continue;
            }
            Err(e) => return Err(e),
        };

        let points = grid.get_or_insert_with(|| {
            let bound = scaled_floor(&x_bound, &t);
            table
                .members_in(&BigUint::from(1u32), &bound)
                .into_iter()
                .map(|v| (t.unscale(v), Some(Vec::new())))
                .collect()
        });

        points.par_iter_mut().for_each(|(x, chain)| {
            let Some(steps) = chain else { return };
            let cap = match steps.last() {
                Some(prev) if prev.delta < epsilon => prev.delta.clone(),
                _ => epsilon.clone(),
            };
            let cap_scaled = max_scaled_delta(&cap, &t).min(max_delta.clone());
            let x_scaled = t.to_scaled(x).expect("grid points are members of every deeper truncation");
            match delta_in_table(&table, &t, &x_scaled, &cap_scaled, DeltaStrategy::PreferGenerator) {
                Some(delta) => steps.push(DeltaStep { depth, epsilon: epsilon.clone(), delta }),
                None => *chain = None,
            }
        });

        let surviving = points.iter().filter(|(_, c)| c.is_some()).count();
        coverage.push(StepCoverage { depth, epsilon, elements: Some(count), surviving, guard_trip: None });
    }

    let witnesses = grid
        .unwrap_or_default()
        .into_iter()
        .filter_map(|(x, chain)| chain.filter(|c| !c.is_empty()).map(|deltas| LimitPointWitness { x, deltas }))
        .collect();
    Ok(WitnessReport { x_bound, witnesses, coverage })
}

/// Largest scaled `δ` with `δ < ε`, i.e. `⌈ε·L⌉ − 1`.
pub(crate) fn max_scaled_delta(epsilon: &PositiveRational, t: &Truncation) -> BigUint {
    let num = epsilon.numer() * t.scale();
    let ceil = (&num + epsilon.denom() - 1u32) / epsilon.denom();
    if ceil.is_zero() {
        ceil
    } else {
        ceil - 1u32
    }
}

/// The gap for `x` (scaled) with `1 ≤ δ ≤ max_delta` chosen per `strategy`.
/// The table must cover `x + max_delta`.
pub(crate) fn delta_in_table(
    table: &MemberTable,
    t: &Truncation,
    x: &BigUint,
    max_delta: &BigUint,
    strategy: DeltaStrategy,
) -> Option<PositiveRational> {
    if max_delta.is_zero() {
        return None;
    }
    if strategy == DeltaStrategy::PreferGenerator {
        let hit = t
            .scaled_generators()
            .iter()
            .rev()
            .filter(|g| *g <= max_delta && *g < x)
            .find(|g| table.contains(&(x - *g)) && table.contains(&(x + *g)));
        if let Some(g) = hit {
            return Some(t.unscale(g.clone()));
        }
    }
    table.smallest_symmetric_gap(x, max_delta).map(|d| t.unscale(d))
}

/// `x_0 > x_1 > … > x_k > 0` with every difference an atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisibilityChain {
    pub depth: u32,
    pub elements: Vec<PositiveRational>,
    /// Longest chain length from the same start at each searched depth.
    pub lengths_by_depth: Vec<(u32, usize)>,
    /// Whether the longest chain grew strictly at every deepening.
    pub grows_with_depth: bool,
}

impl DivisibilityChain {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Every consecutive difference is a nonzero member at `depth`.
    pub fn verify(&self, spec: &GeneratorSpec) -> Result<bool> {
        let t = truncate(spec, self.depth)?;
        Ok(self.elements.iter().all(|x| monoid::is_member(x, &t))
            && self.elements.windows(2).all(|w| {
                w[0].checked_sub(&w[1]).is_some_and(|d| !d.is_zero() && monoid::is_member(&d, &t))
            }))
    }
}

/// Longest descending divisibility chain from the largest member
/// `≤ start_bound` of the first-depth truncation. Reports the chain at the
/// deepest depth that fits the guards when it has at least `min_chain`
/// elements.
pub fn accp_chain_search(
    spec: &GeneratorSpec,
    depths: &[u32],
    start_bound: &PositiveRational,
    min_chain: usize,
    limits: &Limits,
) -> Result<Option<DivisibilityChain>> {
    if min_chain < 2 {
        return Err(Error::InvalidSchedule("min_chain must be at least 2".into()));
    }
    let Some(&first) = depths.first() else { return Err(Error::EmptyInput("depth schedule")) };
    let t0 = truncate(spec, first)?;
    let Some(start) = largest_member_below(start_bound, &t0, limits)? else { return Ok(None) };

    let mut lengths = Vec::new();
    let mut last: Option<(u32, Vec<PositiveRational>)> = None;
    for &depth in depths {
        let t = truncate(spec, depth)?;
        match longest_chain_from(&start, &t, limits) {
            Ok(chain) => {
                lengths.push((depth, chain.len()));
                last = Some((depth, chain));
            }
            Err(e) if e.is_guard_trip() => continue,
            Err(e) => return Err(e),
        }
    }
    let grows = lengths.len() >= 2 && lengths.windows(2).all(|w| w[0].1 < w[1].1);
    Ok(last.filter(|(_, c)| c.len() >= min_chain).map(|(depth, elements)| DivisibilityChain {
        depth,
        elements,
        lengths_by_depth: lengths,
        grows_with_depth: grows,
    }))
}

pub(crate) fn largest_member_below(bound: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Option<PositiveRational>> {
    let b = scaled_floor(bound, t);
    let table = member_table(t, &b, limits)?;
    Ok(table.members_in(&BigUint::from(1u32), &b).pop().map(|v| t.unscale(v)))
}

/// A maximum-length factorization unrolled one atom at a time, largest
/// removable atom first.
fn longest_chain_from(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Vec<PositiveRational>> {
    let lengths = crate::factor::LengthTable::build(x, t, limits)?;
    let atoms = scaled_atoms_desc(t);
    let Some(mut cur) = t.to_scaled(x) else { return Ok(Vec::new()) };
    let Some(mut remaining) = lengths.max_length(&cur) else { return Ok(Vec::new()) };
    let mut chain = Vec::with_capacity(remaining as usize);
    while !cur.is_zero() {
        chain.push(t.unscale(cur.clone()));
        let next = atoms
            .iter()
            .filter(|(a, _)| a <= &cur)
            .map(|(a, _)| &cur - a)
            .find(|rest| lengths.max_length(rest) == Some(remaining - 1))
            .expect("a maximal factorization loses one atom per step");
        cur = next;
        remaining -= 1;
    }
    Ok(chain)
}
