//! Exact combinatorics, the rational carrier, and the double-double type used
//! by the floating-point routes.

mod combinatorics;
pub mod dd;
pub(crate) mod dyadic;
pub mod rational;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use combinatorics::{
    binomial_dd, binomial_exact, binomial_u128, gamma_capital, gamma_small, log_binomial,
    log_factorial, sqrt_binomial, BigCount, SQRT_BINOMIAL_EXACT_LIMIT,
};
pub use dd::DoubleDouble;
pub use rational::ExactRational;

use crate::error::{Error, Result};

/// Field element a probability table can be built over: `f64` for the
/// floating-point routes, [`ExactRational`] for the oracle.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;

    /// Pick the carrier matching this scalar out of a dual-carrier parameter.
    fn from_carrier(real: f64, exact: Option<&ExactRational>) -> Result<Self>;
    fn from_count(v: &BigUint) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// `C(n,k)`, 0 outside `0 <= k <= n`.
    fn binomial(n: i64, k: i64) -> Self {
        if n < 0 || k < 0 || k > n {
            return Self::zero();
        }
        Self::from_count(&binomial_exact(n as u64, k))
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_carrier(real: f64, _exact: Option<&ExactRational>) -> Result<Self> {
        Ok(real)
    }
    fn from_count(v: &BigUint) -> Self {
        num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn binomial(n: i64, k: i64) -> Self {
        binom_dd(n, k).to_f64()
    }
}

impl Scalar for ExactRational {
    const EXACT: bool = true;

    fn from_carrier(real: f64, exact: Option<&ExactRational>) -> Result<Self> {
        exact.cloned().ok_or_else(|| Error::InvalidParameter {
            name: "parameter",
            value: real.to_string(),
            reason: "rational precision needs an exact p/q value",
        })
    }
    fn from_count(v: &BigUint) -> Self {
        ExactRational::from_biguint(v)
    }
    fn to_f64(&self) -> f64 {
        ExactRational::to_f64(self)
    }
    fn abs(&self) -> Self {
        ExactRational::abs(self)
    }
}

/// Rows of Pascal's triangle kept in double-double, with their square roots.
/// Each row is built on first use, so small queries stay cheap.
const CACHED_ROWS: usize = 256;

struct CachedRow {
    value: Vec<DoubleDouble>,
    sqrt: Vec<DoubleDouble>,
}

fn cached_row(n: usize) -> &'static CachedRow {
    static ROWS: OnceLock<Vec<OnceLock<CachedRow>>> = OnceLock::new();
    let rows = ROWS.get_or_init(|| (0..=CACHED_ROWS).map(|_| OnceLock::new()).collect());
    rows[n].get_or_init(|| {
        let mut c = BigUint::one();
        let mut value = Vec::with_capacity(n + 1);
        for k in 0..=n {
            value.push(DoubleDouble::from_biguint(&c));
            c = c * BigUint::from(n - k) / BigUint::from(k + 1);
        }
        let sqrt = value.iter().map(|c| c.sqrt()).collect();
        CachedRow { value, sqrt }
    })
}

/// `C(n,k)` in double-double; 0 outside `0 <= k <= n`.
pub(crate) fn binom_dd(n: i64, k: i64) -> DoubleDouble {
    if n < 0 || k < 0 || k > n {
        return DoubleDouble::ZERO;
    }
    if n as usize <= CACHED_ROWS {
        cached_row(n as usize).value[k as usize]
    } else {
        binomial_dd(n as u64, k)
    }
}

/// `sqrt(C(n,k))` in double-double; 0 outside `0 <= k <= n`.
pub(crate) fn sqrt_binom_dd(n: i64, k: i64) -> DoubleDouble {
    if n < 0 || k < 0 || k > n {
        return DoubleDouble::ZERO;
    }
    if n as usize <= CACHED_ROWS {
        cached_row(n as usize).sqrt[k as usize]
    } else {
        binomial_dd(n as u64, k).sqrt()
    }
}

/// `{a * b}_n = sum_{m=0}^{n} a_m b_{n-m}` with missing entries read as 0.
pub fn convolve_at<T: Scalar>(a: &[T], b: &[T], n: usize) -> T {
    let lo = n.saturating_sub(b.len().saturating_sub(1));
    let hi = n.min(a.len().saturating_sub(1));
    let mut acc = T::zero();
    if a.is_empty() || b.is_empty() || lo > hi {
        return acc;
    }
    for m in lo..=hi {
        acc = acc + a[m].clone() * b[n - m].clone();
    }
    acc
}
