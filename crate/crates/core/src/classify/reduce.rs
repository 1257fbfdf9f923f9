//! Removing part of a generating set without changing the FFM verdict.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{PositiveRational, PrimeTable};
use crate::spec::{is_power_of, GeneratorSpec, PrimeTerm};

use super::rules::limit_points_in;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Validity {
    Valid,
    Invalid,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    /// `S ∖ A` as a spec, when it has one.
    pub reduced: Option<GeneratorSpec>,
    pub validity: Validity,
    pub rule: String,
}

/// The pieces a removal can name: explicit values, geometric bases and
/// prime terms.
#[derive(Default)]
struct Pieces {
    values: Vec<PositiveRational>,
    bases: Vec<PositiveRational>,
    terms: Vec<PrimeTerm>,
}

impl Pieces {
    fn of(spec: &GeneratorSpec) -> Self {
        let mut p = Pieces::default();
        p.add(spec);
        p
    }

    fn add(&mut self, spec: &GeneratorSpec) {
        match spec {
            GeneratorSpec::Finite(v) => self.values.extend(v.iter().cloned()),
            GeneratorSpec::Geometric(b) => self.bases.push(b.clone()),
            GeneratorSpec::MultiCyclic(bs) => self.bases.extend(bs.iter().cloned()),
            GeneratorSpec::PrimeFamily(ts) => self.terms.extend(ts.iter().cloned()),
            GeneratorSpec::Union(parts) => parts.iter().for_each(|p| self.add(p)),
        }
    }
}

/// Drops the pieces named by `removal` from `spec`, returning `None` when
/// some piece has no exact counterpart.
fn subtract(spec: &GeneratorSpec, removal: &mut Pieces) -> Option<GeneratorSpec> {
    fn take<T: PartialEq>(pool: &mut Vec<T>, item: &T) -> bool {
        match pool.iter().position(|x| x == item) {
            Some(i) => {
                pool.remove(i);
                true
            }
            None => false,
        }
    }
    match spec {
        GeneratorSpec::Finite(v) => {
            let kept: Vec<_> = v.iter().filter(|g| !take(&mut removal.values, g)).cloned().collect();
            (!kept.is_empty()).then_some(GeneratorSpec::Finite(kept))
        }
        GeneratorSpec::Geometric(b) => (!take(&mut removal.bases, b)).then(|| GeneratorSpec::Geometric(b.clone())),
        GeneratorSpec::MultiCyclic(bs) => {
            let kept: Vec<_> = bs.iter().filter(|b| !take(&mut removal.bases, b)).cloned().collect();
            (!kept.is_empty()).then_some(GeneratorSpec::MultiCyclic(kept))
        }
        GeneratorSpec::PrimeFamily(ts) => {
            let kept: Vec<_> = ts.iter().filter(|t| !take(&mut removal.terms, t)).cloned().collect();
            (!kept.is_empty()).then_some(GeneratorSpec::PrimeFamily(kept))
        }
        GeneratorSpec::Union(parts) => {
            let mut kept: Vec<_> = parts.iter().filter_map(|p| subtract(p, removal)).collect();
            match kept.len() {
                0 => None,
                1 => kept.pop(),
                _ => Some(GeneratorSpec::Union(kept)),
            }
        }
    }
}

/// Computes `S ∖ A` and decides whether the two generating sets have the
/// same FFM verdict.
///
/// `A` is what `removal` describes minus whatever the remaining pieces
/// still generate (for example `1 = b⁰` shared by every base). The verdict
/// transfers when `A` is the underlying set of a sequence increasing to
/// infinity, or when `A` is finite (hence closed) and the limit points of
/// `S` lying in `S` are unchanged.
pub fn reduce_generators(spec: &GeneratorSpec, removal: &GeneratorSpec, depths: &[u32]) -> Result<ReductionReport> {
    spec.validate()?;
    removal.validate()?;
    let primes = PrimeTable::global();
    for &depth in depths {
        for v in removal.realize(depth, primes)? {
            if !spec.contains_value(&v, primes)? {
                return Err(Error::NotASubset(v));
            }
        }
    }

    let mut pieces = Pieces::of(removal);
    let reduced = subtract(spec, &mut pieces);
    let consumed = pieces.values.is_empty() && pieces.bases.is_empty() && pieces.terms.is_empty();
    let Some(reduced) = reduced.filter(|_| consumed) else {
        return Ok(ReductionReport {
            reduced: None,
            validity: Validity::Undecided,
            rule: "the remaining generators have no spec form".into(),
        });
    };

    let removed = Pieces::of(removal);
    let one = PositiveRational::one();
    if !removed.terms.is_empty() || removed.bases.iter().any(|b| *b < one) {
        return Ok(ReductionReport {
            reduced: Some(reduced),
            validity: Validity::Undecided,
            rule: "removed set accumulates at a finite point; neither closure rule applies".into(),
        });
    }

    // Powers of b > 1 stay in S ∖ A only when b is a power of a kept base.
    let kept = Pieces::of(&reduced);
    let unbounded = removed
        .bases
        .iter()
        .any(|b| *b > one && !kept.bases.iter().any(|c| *c > one && is_power_of(c, b)));
    if unbounded {
        return Ok(ReductionReport {
            reduced: Some(reduced),
            validity: Validity::Valid,
            rule: "removed generators form a strongly increasing sequence".into(),
        });
    }

    let before = limit_points_in(spec)?;
    let after = limit_points_in(&reduced)?;
    let validity = if before == after { Validity::Valid } else { Validity::Invalid };
    let rule = if validity == Validity::Valid {
        "finite (closed) removal with the same limit points in the set"
    } else {
        "finite removal changes the limit points lying in the set"
    };
    Ok(ReductionReport { reduced: Some(reduced), validity, rule: rule.into() })
}
