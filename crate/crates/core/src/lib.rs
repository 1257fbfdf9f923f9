//! Exact arithmetic and factorization analysis for additive submonoids of
//! the nonnegative rationals.
//!
//! A monoid is described by a [`GeneratorSpec`]; every computation runs on a
//! finite [`Truncation`] of it. Properties that concern the infinite monoid
//! are reported by the classifier as proved, refuted, or supported by
//! bounded evidence.

pub mod classify;
pub mod error;
pub mod factor;
pub mod monoid;
pub mod numeric;
pub mod semiring;
pub mod spec;
pub mod specfile;
mod table;
pub mod truncation;

pub use error::{Error, Result};
pub use monoid::{atom_divisors, atoms, divisor_set, elements_below, membership, Limits, MembershipCertificate};
pub use numeric::{make_rational, nth_prime, PositiveRational, PrimeTable};
pub use spec::{AffineIndex, GeneratorSpec, PrimeTerm, Sign};
pub use specfile::{parse_spec, render_spec};
pub use truncation::{truncate, truncate_with, Truncation};
pub use classify::{classify, Classification, Direction, Property, SearchConfig, Status, Verdict};
pub use semiring::{bi_atoms, biffs_equivalence, cyclic_suite, mult_atoms, BiAtomReport, CyclicSuiteReport, SemiringSpec, SuiteOutcome};
