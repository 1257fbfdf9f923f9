//! Exact nonnegative rationals and the prime table used by prime-indexed
//! generator families.
//!
//! Every value is kept in lowest terms, so `numer`/`denom` are the reduced
//! numerator and denominator. Zero is `0/1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A nonnegative rational number in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PositiveRational(Ratio<BigUint>);

impl PositiveRational {
    /// Builds `n/d` in lowest terms. Rejects `d = 0`.
    pub fn new(n: impl Into<BigUint>, d: impl Into<BigUint>) -> Result<Self> {
        let d = d.into();
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(PositiveRational(Ratio::new(n.into(), d)))
    }

    pub fn from_integer(n: impl Into<BigUint>) -> Self {
        PositiveRational(Ratio::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        PositiveRational(Ratio::zero())
    }

    pub fn one() -> Self {
        PositiveRational(Ratio::one())
    }

    pub fn numer(&self) -> &BigUint {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigUint {
        self.0.denom()
    }

    /// `(n(q), d(q))`.
    pub fn num_den(&self) -> (BigUint, BigUint) {
        (self.numer().clone(), self.denom().clone())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        if *self < *rhs {
            None
        } else {
            Some(PositiveRational(&self.0 - &rhs.0))
        }
    }

    /// `|self - rhs|`.
    pub fn abs_diff(&self, rhs: &Self) -> Self {
        if self >= rhs {
            PositiveRational(&self.0 - &rhs.0)
        } else {
            PositiveRational(&rhs.0 - &self.0)
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(PositiveRational(&self.0 / &rhs.0))
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(PositiveRational(self.0.recip()))
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        PositiveRational(Ratio::new_raw(
            self.numer().pow(exp),
            self.denom().pow(exp),
        ))
    }

    /// `⌈self / rhs⌉`; `None` when `rhs = 0`.
    pub fn ceil_div(&self, rhs: &Self) -> Option<BigUint> {
        let q = self.checked_div(rhs)?;
        Some(q.0.ceil().to_integer())
    }

    pub fn floor(&self) -> BigUint {
        self.0.floor().to_integer()
    }

    /// `self * scale` when that product is an integer.
    pub fn scaled_integer(&self, scale: &BigUint) -> Option<BigUint> {
        let (q, r) = (self.numer() * scale).div_rem(self.denom());
        r.is_zero().then_some(q)
    }

    /// Inverse of [`scaled_integer`](Self::scaled_integer).
    pub fn from_scaled(value: BigUint, scale: &BigUint) -> Self {
        PositiveRational(Ratio::new(value, scale.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// `make_rational(n, d)`.
pub fn make_rational(n: u64, d: u64) -> Result<PositiveRational> {
    PositiveRational::new(n, d)
}

/// `(n(q), d(q))`; zero maps to `(0, 1)`.
pub fn num_den(q: &PositiveRational) -> (BigUint, BigUint) {
    q.num_den()
}

/// Least common multiple of the denominators; scaling by it clears every
/// denominator in the list.
pub fn common_denominator<'a, I>(qs: I) -> BigUint
where
    I: IntoIterator<Item = &'a PositiveRational>,
{
    qs.into_iter()
        .fold(BigUint::one(), |acc, q| acc.lcm(q.denom()))
}

impl Ord for PositiveRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl PartialOrd for PositiveRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for PositiveRational {
    type Output = PositiveRational;
    fn add(self, rhs: Self) -> Self {
        PositiveRational(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a PositiveRational> for &'a PositiveRational {
    type Output = PositiveRational;
    fn add(self, rhs: &PositiveRational) -> PositiveRational {
        PositiveRational(&self.0 + &rhs.0)
    }
}

impl Mul for PositiveRational {
    type Output = PositiveRational;
    fn mul(self, rhs: Self) -> Self {
        PositiveRational(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a PositiveRational> for &'a PositiveRational {
    type Output = PositiveRational;
    fn mul(self, rhs: &PositiveRational) -> PositiveRational {
        PositiveRational(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for PositiveRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(PositiveRational::zero(), |a, b| a + b)
    }
}

impl From<u64> for PositiveRational {
    fn from(n: u64) -> Self {
        PositiveRational::from_integer(n)
    }
}

impl fmt::Display for PositiveRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for PositiveRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PositiveRational {
    type Err = Error;

    /// Accepts `n` or `n/d`, decimal digits only.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLiteral(s.to_string());
        let digits = |t: &str| -> Result<BigUint> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            BigUint::parse_bytes(t.as_bytes(), 10).ok_or_else(bad)
        };
        match s.split_once('/') {
            None => Ok(PositiveRational::from_integer(digits(s)?)),
            Some((n, d)) => PositiveRational::new(digits(n)?, digits(d)?),
        }
    }
}

impl Serialize for PositiveRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PositiveRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Default number of primes held by the global table.
pub const DEFAULT_PRIME_CAPACITY: usize = 100_000;

/// The first `capacity` primes, sieved once.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn with_capacity(capacity: usize) -> Self {
        let mut limit = sieve_limit(capacity);
        loop {
            let mut primes = sieve(limit);
            if primes.len() >= capacity {
                primes.truncate(capacity);
                return PrimeTable { primes };
            }
            limit *= 2;
        }
    }

    /// Shared table with [`DEFAULT_PRIME_CAPACITY`] primes.
    pub fn global() -> &'static PrimeTable {
        static TABLE: OnceLock<PrimeTable> = OnceLock::new();
        TABLE.get_or_init(|| PrimeTable::with_capacity(DEFAULT_PRIME_CAPACITY))
    }

    pub fn capacity(&self) -> usize {
        self.primes.len()
    }

    /// The `k`-th prime, `p_1 = 2`.
    pub fn nth(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::InvalidSpec("prime indices start at 1".into()));
        }
        usize::try_from(k - 1)
            .ok()
            .and_then(|i| self.primes.get(i).copied())
            .ok_or(Error::PrimeCapacityExceeded {
                requested: k,
                capacity: self.capacity(),
            })
    }

    /// `Some(k)` with `p_k = p` when `p` is a prime inside the table.
    pub fn index_of(&self, p: u64) -> Option<u64> {
        self.primes.binary_search(&p).ok().map(|i| i as u64 + 1)
    }

    pub fn largest(&self) -> u64 {
        self.primes.last().copied().unwrap_or(1)
    }
}

/// `p_k` from the global table.
pub fn nth_prime(k: u64) -> Result<u64> {
    PrimeTable::global().nth(k)
}

fn sieve_limit(n: usize) -> usize {
    if n < 6 {
        return 15;
    }
    let n = n as f64;
    (n * (n.ln() + n.ln().ln())).ceil() as usize + 1
}

fn sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}
