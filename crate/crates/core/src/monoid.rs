//! Membership, element enumeration, divisor sets and atoms of a truncated
//! monoid `⟨t.generators⟩`.
//!
//! Everything here is exact for the truncated (finitely generated) monoid.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::PositiveRational;
use crate::table::{Knapsack, MemberTable};
use crate::truncation::Truncation;

/// Resource guards for enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest element list any enumeration may produce.
    pub element_cap: usize,
    /// Largest factorization set any enumeration may produce.
    pub factorization_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { element_cap: 1_000_000, factorization_cap: 100_000 }
    }
}

/// A witnessed representation `x = Σ c_g · g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipCertificate {
    /// Nonzero multiplicities, generators ascending.
    pub coefficients: Vec<(PositiveRational, BigUint)>,
}

impl MembershipCertificate {
    pub fn evaluate(&self) -> PositiveRational {
        self.coefficients
            .iter()
            .map(|(g, c)| g * &PositiveRational::from_integer(c.clone()))
            .sum()
    }

    pub fn multiplicity(&self, g: &PositiveRational) -> BigUint {
        self.coefficients
            .iter()
            .find(|(h, _)| h == g)
            .map_or_else(BigUint::zero, |(_, c)| c.clone())
    }
}

/// Exhaustive knapsack membership test. `None` proves `x ∉ ⟨t⟩`.
pub fn membership(x: &PositiveRational, t: &Truncation) -> Option<MembershipCertificate> {
    let target = t.to_scaled(x)?;
    let gens = t.scaled_generators();
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.reverse();
    let desc: Vec<BigUint> = order.iter().map(|&i| gens[i].clone()).collect();
    let coeffs = Knapsack::new(&desc).solve(&target)?;
    let mut coefficients: Vec<(PositiveRational, BigUint)> = order
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&i, c)| (t.generators()[i].clone(), c))
        .collect();
    coefficients.sort_by(|a, b| a.0.cmp(&b.0));
    Some(MembershipCertificate { coefficients })
}

pub fn is_member(x: &PositiveRational, t: &Truncation) -> bool {
    membership(x, t).is_some()
}

/// Scaled reachability table covering `[0, bound]`.
pub(crate) fn member_table(t: &Truncation, bound: &BigUint, limits: &Limits) -> Result<MemberTable> {
    MemberTable::build(t.scaled_generators(), bound, limits.element_cap)
}

/// `⌊q · scale⌋`.
pub(crate) fn scaled_floor(q: &PositiveRational, t: &Truncation) -> BigUint {
    (q.numer() * t.scale()) / q.denom()
}

/// Scaled members in `[1, bound]`, cap-checked.
pub(crate) fn scaled_elements(table: &MemberTable, bound: &BigUint, cap: usize, what: &str) -> Result<Vec<BigUint>> {
    let one = BigUint::from(1u32);
    if table.count_in(&one, bound) > cap {
        return Err(Error::ElementCapExceeded { what: what.to_string(), cap });
    }
    Ok(table.members_in(&one, bound))
}

/// `{m ∈ ⟨t⟩ | 0 < m ≤ bound}`, ascending.
pub fn elements_below(bound: &PositiveRational, t: &Truncation) -> Result<Vec<PositiveRational>> {
    elements_below_with(bound, t, &Limits::default())
}

pub fn elements_below_with(bound: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Vec<PositiveRational>> {
    let b = scaled_floor(bound, t);
    let table = member_table(t, &b, limits)?;
    let scaled = scaled_elements(&table, &b, limits.element_cap, "elements_below")?;
    Ok(scaled.into_iter().map(|v| t.unscale(v)).collect())
}

/// `D(x)`: nonzero divisors of `x` in `⟨t⟩`, ascending.
pub fn divisor_set(x: &PositiveRational, t: &Truncation) -> Result<Vec<PositiveRational>> {
    divisor_set_with(x, t, &Limits::default())
}

pub fn divisor_set_with(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Vec<PositiveRational>> {
    let not_member = || Error::NotInMonoid(x.clone());
    let target = t.to_scaled(x).ok_or_else(not_member)?;
    let table = member_table(t, &target, limits)?;
    if !table.contains(&target) {
        return Err(not_member());
    }
    let candidates = scaled_elements(&table, &target, limits.element_cap, "divisor_set")?;
    Ok(candidates
        .into_iter()
        .filter(|d| table.contains(&(&target - d)))
        .map(|d| t.unscale(d))
        .collect())
}

/// `𝒜(⟨t⟩)`: generators not expressible as a sum of smaller generators.
pub fn atoms(t: &Truncation) -> Vec<PositiveRational> {
    t.atoms_cell()
        .get_or_init(|| {
            let gens = t.scaled_generators();
            (0..gens.len())
                .filter(|&i| {
                    let smaller: Vec<BigUint> = gens[..i].iter().rev().cloned().collect();
                    Knapsack::new(&smaller).solve(&gens[i]).is_none()
                })
                .map(|i| t.generators()[i].clone())
                .collect()
        })
        .clone()
}

/// `A(x) = D(x) ∩ 𝒜`.
pub fn atom_divisors(x: &PositiveRational, t: &Truncation) -> Result<Vec<PositiveRational>> {
    atom_divisors_with(x, t, &Limits::default())
}

pub fn atom_divisors_with(x: &PositiveRational, t: &Truncation, limits: &Limits) -> Result<Vec<PositiveRational>> {
    let divisors = divisor_set_with(x, t, limits)?;
    let atoms = atoms(t);
    Ok(divisors.into_iter().filter(|d| atoms.binary_search(d).is_ok()).collect())
}

/// Scaled atoms sorted descending, paired with their rational values.
pub(crate) fn scaled_atoms_desc(t: &Truncation) -> Vec<(BigUint, PositiveRational)> {
    let mut out: Vec<(BigUint, PositiveRational)> = atoms(t)
        .into_iter()
        .map(|a| (t.to_scaled(&a).expect("atoms are generators"), a))
        .collect();
    out.reverse();
    out
}
