//! Exact evaluation of alternating sums at a floating-point parameter.
//!
//! Every finite `f64` is a dyadic rational `mantissa * 2^exponent`, so a sum
//! of binomial-weighted monomials in `eta` and `1 - eta` can be carried out
//! in big integers and rounded once. Used when the double-double fast path
//! would lose the result to cancellation.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

/// `x = mantissa * 2^exponent`, exactly. `x` must be finite and non-negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Dyadic {
    pub mantissa: u64,
    pub exponent: i64,
}

impl Dyadic {
    pub fn new(x: f64) -> Self {
        debug_assert!(x.is_finite() && x >= 0.0);
        if x == 0.0 {
            return Self { mantissa: 0, exponent: 0 };
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut mantissa, mut exponent) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let tz = mantissa.trailing_zeros();
        mantissa >>= tz;
        exponent += tz as i64;
        Self { mantissa, exponent }
    }

    /// `(mantissa^e, exponent * e)`.
    pub fn pow(self, e: u32) -> (BigUint, i64) {
        (num_traits::pow(BigUint::from(self.mantissa), e as usize), self.exponent * e as i64)
    }
}

/// `v * 2^exp` rounded to `f64`.
pub(crate) fn scaled_to_f64(v: &BigInt, exp: i64) -> f64 {
    if v.is_zero() {
        return 0.0;
    }
    let bits = v.bits() as i64;
    let (head, exp) = if bits > 120 {
        let shift = bits - 120;
        (v >> (shift as usize), exp + shift)
    } else {
        (v.clone(), exp)
    };
    let mut out = head.to_f64().unwrap_or(f64::NAN);
    // apply 2^exp in steps that stay inside the normal range
    let mut e = exp;
    while e > 0 {
        let step = e.min(1000);
        out *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = e.max(-1000);
        out *= 2f64.powi(step as i32);
        e -= step;
    }
    out
}

/// `floor(sqrt(c * eta^a * comp^b) * 2^frac_bits)` for an integer weight `c`.
pub(crate) fn sqrt_monomial_fixed(c: &BigUint, eta: Dyadic, a: u32, comp: Dyadic, b: u32, frac_bits: u32) -> BigUint {
    let (ea, xa) = eta.pow(a);
    let (cb, xb) = comp.pow(b);
    let mut x = c * ea * cb;
    let shift = xa + xb + 2 * frac_bits as i64;
    if shift >= 0 {
        x <<= shift as usize;
    } else {
        x >>= (-shift) as usize;
    }
    x.sqrt()
}

/// Exact `sum_t sign_t * c_t * eta^{a_t} * comp^{b_t}`, returned as `(v, exp)`
/// with value `v * 2^exp`.
pub(crate) fn monomial_sum(terms: &[(bool, BigUint, u32, u32)], eta: Dyadic, comp: Dyadic) -> (BigInt, i64) {
    let scaled: Vec<(bool, BigUint, i64)> = terms
        .iter()
        .map(|(neg, c, a, b)| {
            let (ea, xa) = eta.pow(*a);
            let (cb, xb) = comp.pow(*b);
            (*neg, c * ea * cb, xa + xb)
        })
        .collect();
    let base = scaled.iter().map(|t| t.2).min().unwrap_or(0);
    let mut acc = BigInt::zero();
    for (neg, v, x) in scaled {
        let v = BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, v << ((x - base) as usize));
        acc += v;
    }
    (acc, base)
}
