//! Exact binomial products and log-factorials.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::dd::DoubleDouble;

/// Arbitrary-precision non-negative integer.
pub type BigCount = BigUint;

/// `n! / (k! (n-k)!)`, and 0 whenever `k < 0` or `k > n`.
pub fn binomial_exact(n: u64, k: i64) -> BigCount {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for t in 1..=k {
        acc *= n - k + t;
        acc /= t;
    }
    acc
}

/// Binomial as a `u128` when it fits, `None` otherwise. Out of range `k` gives 0.
pub fn binomial_u128(n: u64, k: i64) -> Option<u128> {
    if k < 0 || k as u64 > n {
        return Some(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc: u128 = 1;
    for t in 1..=k {
        // acc * (n-k+t) / t stays integral at every step
        let g = gcd(acc, t as u128);
        let (a, d) = (acc / g, t as u128 / g);
        acc = a.checked_mul((n - k + t) as u128 / d)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Binomial in double-double precision (exact below 2^106).
pub fn binomial_dd(n: u64, k: i64) -> DoubleDouble {
    match binomial_u128(n, k) {
        Some(v) => DoubleDouble::from_u128(v),
        None => DoubleDouble::from_biguint(&binomial_exact(n, k)),
    }
}

fn binom_i(n: i64, k: i64) -> BigCount {
    if n < 0 {
        return BigUint::zero();
    }
    binomial_exact(n as u64, k)
}

/// `C(i,n) C(k,m) C(n+m,n) C(i-n+k-m, i-n)`: the weight of the output
/// `|n+m, i-n+k-m>` reached when `n` of the `i` photons and `m` of the `k`
/// photons end up in the first mode.
pub fn gamma_capital(i: u64, k: u64, n: u64, m: u64) -> BigCount {
    let (i, k, n, m) = (i as i64, k as i64, n as i64, m as i64);
    binom_i(i, n) * binom_i(k, m) * binom_i(n + m, n) * binom_i(i - n + k - m, i - n)
}

/// `C(i,m) C(k,n-m) C(n,j) C(i+k-n, i-j)`, symmetric in `(m, j)`.
pub fn gamma_small(i: u64, k: u64, n: u64, m: u64, j: u64) -> BigCount {
    let (i, k, n, m, j) = (i as i64, k as i64, n as i64, m as i64, j as i64);
    binom_i(i, m) * binom_i(k, n - m) * binom_i(n, j) * binom_i(i + k - n, i - j)
}

const LOG_FACTORIAL_TABLE: usize = 1 << 12;

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(LOG_FACTORIAL_TABLE + 1);
        let mut acc = DoubleDouble::ZERO;
        out.push(0.0);
        for k in 1..=LOG_FACTORIAL_TABLE {
            acc += DoubleDouble::from_f64((k as f64).ln());
            out.push(acc.to_f64());
        }
        out
    })
}

/// `ln(n!)`. Tabulated up to 4096, Stirling series with four correction
/// terms beyond.
pub fn log_factorial(n: u64) -> f64 {
    if (n as usize) <= LOG_FACTORIAL_TABLE {
        return log_factorial_table()[n as usize];
    }
    stirling_log_factorial(n)
}

fn stirling_log_factorial(n: u64) -> f64 {
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + series
}

pub fn log_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// Below this size `sqrt(C(n,k))` is taken from the exact integer.
pub const SQRT_BINOMIAL_EXACT_LIMIT: u64 = 256;

/// `sqrt(C(n,k))` in `f64`, 0 outside `0 <= k <= n`.
pub fn sqrt_binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    if n <= SQRT_BINOMIAL_EXACT_LIMIT {
        binomial_exact(n, k).to_f64().unwrap_or(f64::INFINITY).sqrt()
    } else {
        (0.5 * log_binomial(n, k as u64)).exp()
    }
}
