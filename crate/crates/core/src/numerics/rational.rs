use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Displays canonically as `p/q`, or `p` when `q = 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        Self::from_integer(BigInt::from(v.clone()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn pow(&self, exp: u32) -> Self {
        Self(num_traits::pow(self.0.clone(), exp as usize))
    }

    /// `[1, x, ..., x^(len-1)]`.
    pub fn power_table(&self, len: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(len);
        let mut acc = Self::one();
        for _ in 0..len {
            out.push(acc.clone());
            acc = &acc * self;
        }
        out
    }

    pub fn one_minus(&self) -> Self {
        Self(BigRational::one() - &self.0)
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `p/q` or a bare integer `p`. Decimal literals are refused so that
/// an exact computation never starts from a silently rounded value.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("not a rational literal: {s:?}")))
        };
        match s.split_once('/') {
            Some((p, q)) => Self::new(parse_int(p)?, parse_int(q)?),
            None => Ok(Self::from_integer(parse_int(s)?)),
        }
    }
}

impl Zero for ExactRational {
    fn zero() -> Self {
        Self(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for ExactRational {
    fn one() -> Self {
        Self(BigRational::one())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for &'a ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &'a ExactRational) -> ExactRational {
                ExactRational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> ExactRational {
        ExactRational::new(p, q).unwrap()
    }

    #[test]
    fn lowest_terms_and_positive_denominator() {
        let r = rat(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(rat(4, 2).to_string(), "2");
        assert_eq!(rat(0, 5).to_string(), "0");
    }

    #[test]
    fn parse_literals() {
        assert_eq!("1/2".parse::<ExactRational>().unwrap(), rat(1, 2));
        assert_eq!(" 3 ".parse::<ExactRational>().unwrap(), rat(3, 1));
        assert!("0.5".parse::<ExactRational>().is_err());
        assert!("1/0".parse::<ExactRational>().is_err());
    }

    proptest! {
        #[test]
        fn field_axioms_on_random_triples(
            a in (-50i64..50, 1i64..40),
            b in (-50i64..50, 1i64..40),
            c in (-50i64..50, 1i64..40),
        ) {
            let (a, b, c) = (rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a - &b) + &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
            prop_assert!(r_is_reduced(&a));
        }
    }

    fn r_is_reduced(r: &ExactRational) -> bool {
        use num_integer::Integer;
        r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
    }
}
