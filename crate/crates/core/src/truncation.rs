use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{common_denominator, PositiveRational, PrimeTable};
use crate::spec::GeneratorSpec;

/// A finite generating set realized from a [`GeneratorSpec`] at a depth.
///
/// Generators are sorted ascending and deduplicated. The denominator-cleared
/// generators are cached alongside.
#[derive(Clone, Serialize)]
pub struct Truncation {
    source: GeneratorSpec,
    depth: u32,
    generators: Vec<PositiveRational>,
    #[serde(skip)]
    scale: BigUint,
    #[serde(skip)]
    scaled: Vec<BigUint>,
    #[serde(skip)]
    atoms: OnceLock<Vec<PositiveRational>>,
}

/// Realizes `spec` at `depth`: the first `depth` terms of each parametric
/// family, powers `0..=depth` of each base, or the whole explicit list.
pub fn truncate(spec: &GeneratorSpec, depth: u32) -> Result<Truncation> {
    truncate_with(spec, depth, PrimeTable::global())
}

pub fn truncate_with(spec: &GeneratorSpec, depth: u32, primes: &PrimeTable) -> Result<Truncation> {
    if depth == 0 {
        return Err(Error::InvalidDepth);
    }
    spec.validate_with(primes)?;
    let gens = spec.realize(depth, primes)?;
    Ok(Truncation::assemble(spec.clone(), depth, gens))
}

impl Truncation {
    /// A truncation over an explicit list (recorded as a `Finite` source).
    pub fn from_generators(gens: Vec<PositiveRational>) -> Result<Self> {
        let spec = GeneratorSpec::Finite(gens);
        spec.validate()?;
        let GeneratorSpec::Finite(gens) = &spec else { unreachable!() };
        let gens = gens.clone();
        Ok(Truncation::assemble(spec, 1, gens))
    }

    fn assemble(source: GeneratorSpec, depth: u32, mut gens: Vec<PositiveRational>) -> Self {
        gens.sort();
        gens.dedup();
        let scale = common_denominator(&gens);
        let scaled = gens
            .iter()
            .map(|g| g.scaled_integer(&scale).expect("common denominator clears every generator"))
            .collect();
        Truncation { source, depth, generators: gens, scale, scaled, atoms: OnceLock::new() }
    }

    pub fn source(&self) -> &GeneratorSpec {
        &self.source
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn generators(&self) -> &[PositiveRational] {
        &self.generators
    }

    pub fn min_generator(&self) -> &PositiveRational {
        &self.generators[0]
    }

    pub fn max_generator(&self) -> &PositiveRational {
        self.generators.last().expect("nonempty")
    }

    /// `c·t`: the isomorphic truncation with every generator multiplied by `c`.
    pub fn scaled_by(&self, c: &PositiveRational) -> Result<Truncation> {
        if c.is_zero() {
            return Err(Error::InvalidSpec("scale factor must be positive".into()));
        }
        let gens: Vec<_> = self.generators.iter().map(|g| g * c).collect();
        let source = self.source.scale(c).unwrap_or_else(|_| GeneratorSpec::Finite(gens.clone()));
        Ok(Truncation::assemble(source, self.depth, gens))
    }

    /// Common denominator of the generators.
    pub(crate) fn scale(&self) -> &BigUint {
        &self.scale
    }

    pub(crate) fn scaled_generators(&self) -> &[BigUint] {
        &self.scaled
    }

    /// `x` in scaled units, when `x` has a denominator dividing the scale.
    /// Anything else cannot be a member.
    pub(crate) fn to_scaled(&self, x: &PositiveRational) -> Option<BigUint> {
        x.scaled_integer(&self.scale)
    }

    pub(crate) fn unscale(&self, v: BigUint) -> PositiveRational {
        PositiveRational::from_scaled(v, &self.scale)
    }

    pub(crate) fn atoms_cell(&self) -> &OnceLock<Vec<PositiveRational>> {
        &self.atoms
    }
}

impl PartialEq for Truncation {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth && self.generators == other.generators && self.source == other.source
    }
}

impl fmt::Debug for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Truncation")
            .field("source", &self.source)
            .field("depth", &self.depth)
            .field("generators", &self.generators)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> PositiveRational {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<PositiveRational> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn truncate_examples() {
        let t = truncate(&GeneratorSpec::Geometric(q("2/3")), 3).unwrap();
        assert_eq!(t.generators(), qs(&["8/27", "4/9", "2/3", "1"]));
        let t = truncate(&GeneratorSpec::prime_offset_three(), 2).unwrap();
        assert_eq!(t.generators(), qs(&["14/5", "32/11", "22/7", "10/3"]));
        let t = truncate(&GeneratorSpec::MultiCyclic(vec![q("3/2")]), 2).unwrap();
        assert_eq!(t.generators(), qs(&["1", "3/2", "9/4"]));
        let t = truncate(&GeneratorSpec::Finite(qs(&["3", "2", "3"])), 7).unwrap();
        assert_eq!(t.generators(), qs(&["2", "3"]));
    }

    #[test]
    fn union_duplicates_merge() {
        let spec = GeneratorSpec::Union(vec![
            GeneratorSpec::Geometric(q("2")),
            GeneratorSpec::MultiCyclic(vec![q("4")]),
        ]);
        let t = truncate(&spec, 2).unwrap();
        assert_eq!(t.generators(), qs(&["1", "2", "4", "16"]));
    }

    #[test]
    fn deepening_is_monotone() {
        let specs = [
            GeneratorSpec::Geometric(q("2/3")),
            GeneratorSpec::prime_offset_three(),
            GeneratorSpec::MultiCyclic(vec![q("2/3"), q("5/2")]),
        ];
        for s in &specs {
            for n in 1..6 {
                let a = truncate(s, n).unwrap();
                let b = truncate(s, n + 1).unwrap();
                assert!(a.generators().iter().all(|g| b.generators().contains(g)));
            }
        }
    }

    #[test]
    fn rejects_zero_depth() {
        assert_eq!(truncate(&GeneratorSpec::Geometric(q("2")), 0).unwrap_err(), Error::InvalidDepth);
    }

    #[test]
    fn prime_capacity_is_reported() {
        let small = PrimeTable::with_capacity(10);
        let err = truncate_with(&GeneratorSpec::prime_offset_three(), 6, &small).unwrap_err();
        assert!(matches!(err, Error::PrimeCapacityExceeded { .. }));
    }
}
