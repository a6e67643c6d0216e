//! Transition probabilities `B^{(i,k)}_n` and `A^{(i,k)}_n`.
//!
//! `B` is an integer-coefficient polynomial in `eta` (the `gamma` double sum),
//! so a rational `eta = p/q` gives an exact value with denominator `q^{i+k}`.
//! The floating-point route evaluates the same double sum in double-double.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::dyadic::{monomial_sum, scaled_to_f64, Dyadic};
use crate::numerics::{binom_dd, gamma_small, log_binomial, DoubleDouble, ExactRational};
use crate::params::{BeamSplitterParam, Device, DeviceParam, PhotonConfig, SqueezerParam};

/// A probability, with its exact value when the parameter was rational.
#[derive(Clone, Debug, PartialEq)]
pub struct Probability {
    pub value: f64,
    pub exact: Option<ExactRational>,
}

impl Probability {
    fn float(value: f64) -> Self {
        Self { value, exact: None }
    }

    fn exact(value: ExactRational) -> Self {
        Self { value: value.to_f64(), exact: Some(value) }
    }
}

/// log2 of the largest summed magnitude the double-double path accepts.
const DD_MAGNITUDE_BITS: f64 = 40.0;

/// The double sum at a floating-point `eta`. Runs in double-double when the
/// terms are moderate and exactly over the dyadic value of `eta` otherwise.
pub(crate) fn bs_prob_f64(i: usize, k: usize, n: usize, eta: f64, complement: f64) -> f64 {
    if n > i + k {
        return 0.0;
    }
    let (ii, kk, nn) = (i as i64, k as i64, n as i64);
    let lo = (nn - kk).max(0);
    let hi = ii.min(nn);
    // the (m, j) term is the geometric mean of the (m, m) and (j, j) terms
    let ln_pow = |x: f64, e: i64| if e == 0 { 0.0 } else { e as f64 * x.ln() };
    let ln_diag = (lo..=hi)
        .map(|m| {
            log_binomial(i as u64, m as u64)
                + log_binomial(k as u64, (nn - m) as u64)
                + log_binomial(n as u64, m as u64)
                + log_binomial((ii + kk - nn) as u64, (ii - m) as u64)
                + ln_pow(eta, kk - nn + 2 * m)
                + ln_pow(complement, ii + nn - 2 * m)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let count = (hi - lo + 1) as f64;
    let bits = (ln_diag + 2.0 * count.ln()) / std::f64::consts::LN_2;
    if bits <= DD_MAGNITUDE_BITS {
        bs_prob_dd(i, k, n, eta, complement).to_f64()
    } else {
        let mut terms = Vec::with_capacity(((hi - lo + 1) * (hi - lo + 1)) as usize);
        for m in lo..=hi {
            for j in lo..=hi {
                let g = gamma_small(i as u64, k as u64, n as u64, m as u64, j as u64);
                terms.push(((m + j) % 2 == 1, g, (kk - nn + m + j) as u32, (ii + nn - m - j) as u32));
            }
        }
        let (v, x) = monomial_sum(&terms, Dyadic::new(eta), Dyadic::new(complement));
        scaled_to_f64(&v, x)
    }
}

fn bs_prob_dd(i: usize, k: usize, n: usize, eta: f64, complement: f64) -> DoubleDouble {
    let len = i + k + 1;
    let ep = DoubleDouble::from_f64(eta).power_table(len);
    let cp = DoubleDouble::from_f64(complement).power_table(len);
    let (i, k, n) = (i as i64, k as i64, n as i64);
    let lo = (n - k).max(0);
    let hi = i.min(n);
    // gamma_{n,m,j} = C(i,m) C(k,n-m) C(n,j) C(i+k-n,i-j) splits into a factor per index
    let left: Vec<DoubleDouble> = (lo..=hi).map(|m| binom_dd(i, m) * binom_dd(k, n - m)).collect();
    let right: Vec<DoubleDouble> = (lo..=hi).map(|j| binom_dd(n, j) * binom_dd(i + k - n, i - j)).collect();
    let mut acc = DoubleDouble::ZERO;
    for m in lo..=hi {
        for j in lo..=hi {
            let g = left[(m - lo) as usize] * right[(j - lo) as usize];
            let term = g * ep[(k - n + m + j) as usize] * cp[(i + n - m - j) as usize];
            if (m + j) % 2 == 0 {
                acc += term;
            } else {
                acc += -term;
            }
        }
    }
    acc
}

/// Same double sum over the integers: returns the numerator over `q^{i+k}`.
fn bs_prob_numerator(i: usize, k: usize, n: usize, p: &BigInt, q: &BigInt) -> BigInt {
    if n > i + k {
        return BigInt::zero();
    }
    let len = i + k + 1;
    let qp = q - p;
    let pp = powers(p, len);
    let qq = powers(&qp, len);
    let (ii, kk, nn) = (i as i64, k as i64, n as i64);
    let lo = (nn - kk).max(0);
    let hi = ii.min(nn);
    let mut acc = BigInt::zero();
    for m in lo..=hi {
        for j in lo..=hi {
            let g = BigInt::from(gamma_small(i as u64, k as u64, n as u64, m as u64, j as u64));
            let term = g * &pp[(kk - nn + m + j) as usize] * &qq[(ii + nn - m - j) as usize];
            if (m + j) % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
    }
    acc
}

fn powers(x: &BigInt, len: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len);
    let mut acc = BigInt::one();
    for _ in 0..len {
        out.push(acc.clone());
        acc *= x;
    }
    out
}

fn exact_in_unit_interval(name: &'static str, v: &ExactRational) -> Result<()> {
    if v.is_negative() || v.one_minus().is_negative() {
        return Err(Error::InvalidParameter {
            name,
            value: v.to_string(),
            reason: "must lie in [0, 1]",
        });
    }
    Ok(())
}

pub(crate) fn bs_prob_exact_raw(i: usize, k: usize, n: usize, eta: &ExactRational) -> ExactRational {
    let num = bs_prob_numerator(i, k, n, eta.numer(), eta.denom());
    let den = num_traits::pow(eta.denom().clone(), i + k);
    ExactRational::new(num, den).expect("denominator is positive")
}

/// `B^{(i,k)}_n` by the alternating double sum over `m, j in [max(0,n-k), min(i,n)]`.
pub fn bs_prob_direct(c: &PhotonConfig, p: &BeamSplitterParam) -> Result<Probability> {
    c.expect(Device::Bs)?;
    let v = bs_prob_f64(c.i, c.k, c.n, p.eta(), p.one_minus_eta());
    Ok(Probability::float(v.max(0.0)))
}

/// Exact `B^{(i,k)}_n` for rational `eta`.
pub fn bs_prob_exact(c: &PhotonConfig, eta: &ExactRational) -> Result<ExactRational> {
    c.expect(Device::Bs)?;
    exact_in_unit_interval("eta", eta)?;
    Ok(bs_prob_exact_raw(c.i, c.k, c.n, eta))
}

/// `B^{(i,k)}_n`, exact when the parameter carries a rational value.
pub fn bs_prob(c: &PhotonConfig, p: &BeamSplitterParam) -> Result<Probability> {
    match p.exact_eta() {
        Some(eta) => bs_prob_exact(c, eta).map(Probability::exact),
        None => bs_prob_direct(c, p),
    }
}

/// `A^{(i,k)}_n = (1-lambda) B^{(i,n+k-i)}_n` at `eta = 1 - lambda`; 0 when `n+k < i`.
pub fn tms_prob(c: &PhotonConfig, p: &SqueezerParam) -> Result<Probability> {
    c.expect(Device::Tms)?;
    if let Some(lambda) = p.exact_lambda() {
        return tms_prob_exact(c, lambda).map(Probability::exact);
    }
    let m = c.m();
    if m < 0 {
        return Ok(Probability::float(0.0));
    }
    let bs = BeamSplitterParam::time_reversed(p);
    let v = bs.eta() * bs_prob_f64(c.i, m as usize, c.n, bs.eta(), bs.one_minus_eta());
    Ok(Probability::float(v.max(0.0)))
}

/// Exact `A^{(i,k)}_n` for rational `lambda`.
pub fn tms_prob_exact(c: &PhotonConfig, lambda: &ExactRational) -> Result<ExactRational> {
    c.expect(Device::Tms)?;
    exact_in_unit_interval("lambda", lambda)?;
    if lambda.one_minus().is_zero() {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda.to_string(),
            reason: "squeezing parameter must be below 1",
        });
    }
    let m = c.m();
    if m < 0 {
        return Ok(ExactRational::zero());
    }
    let eta = lambda.one_minus();
    Ok(&eta * &bs_prob_exact_raw(c.i, m as usize, c.n, &eta))
}

/// Tail target for the squeezer normalization sum.
pub const TMS_TAIL_TOLERANCE: f64 = 1e-14;

/// Output cutoff `ceil((10 (i+k+1) + 40) / (1-lambda))` for the squeezer sum.
/// The additive 40 covers `ln(1e14) ~ 32` e-foldings of the geometric tail.
pub fn tms_cutoff(i: usize, k: usize, lambda: f64) -> usize {
    ((10.0 * (i + k + 1) as f64 + 40.0) / (1.0 - lambda)).ceil() as usize
}

/// `|sum_n P^{(i,k)}_n - 1|` over all reachable outputs.
///
/// The squeezer sum is infinite. It runs to [`tms_cutoff`] and is accepted
/// when the geometric tail estimate `P_N r / (1-r)`, with `r = P_N/P_{N-1}`,
/// is below [`TMS_TAIL_TOLERANCE`]; otherwise the result is
/// [`Error::NotConverged`].
pub fn normalization_residual(i: usize, k: usize, p: &DeviceParam) -> Result<f64> {
    match p {
        DeviceParam::Bs(p) => {
            let total: DoubleDouble = (0..=i + k)
                .map(|n| DoubleDouble::from_f64(bs_prob_f64(i, k, n, p.eta(), p.one_minus_eta())))
                .sum();
            Ok((total - DoubleDouble::ONE).to_f64().abs())
        }
        DeviceParam::Tms(p) => {
            let bs = BeamSplitterParam::time_reversed(p);
            let cutoff = tms_cutoff(i, k, p.lambda());
            let mut total = DoubleDouble::ZERO;
            let (mut prev, mut last) = (0.0, 0.0);
            for n in i.saturating_sub(k)..=cutoff {
                let m = n + k - i;
                let t = bs.eta() * bs_prob_f64(i, m, n, bs.eta(), bs.one_minus_eta());
                total += DoubleDouble::from_f64(t);
                prev = last;
                last = t;
            }
            let bound = if last == 0.0 {
                0.0
            } else {
                let r = last / prev;
                if r < 1.0 { last * r / (1.0 - r) } else { f64::INFINITY }
            };
            if bound < TMS_TAIL_TOLERANCE {
                return Ok((total - DoubleDouble::ONE).to_f64().abs());
            }
            Err(Error::NotConverged { what: "squeezer normalization sum", bound, cutoff })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn bs(eta: f64) -> BeamSplitterParam {
        BeamSplitterParam::new(eta).unwrap()
    }

    fn tms(lambda: f64) -> SqueezerParam {
        SqueezerParam::new(lambda).unwrap()
    }

    #[test]
    fn beam_splitter_examples() {
        let c = PhotonConfig::bs(1, 1, 1);
        assert!(bs_prob_direct(&c, &bs(0.5)).unwrap().value <= 1e-15);
        assert_eq!(bs_prob_direct(&PhotonConfig::bs(0, 0, 0), &bs(0.8)).unwrap().value, 1.0);
        assert!((bs_prob_direct(&c, &bs(0.3)).unwrap().value - 0.16).abs() < 1e-15);
    }

    #[test]
    fn exact_examples() {
        assert!(bs_prob_exact(&PhotonConfig::bs(1, 1, 1), &rat("1/2")).unwrap().is_zero());
        assert_eq!(bs_prob_exact(&PhotonConfig::bs(1, 1, 0), &rat("1/2")).unwrap(), rat("1/2"));
        assert_eq!(bs_prob_exact(&PhotonConfig::bs(2, 0, 1), &rat("1/3")).unwrap(), rat("4/9"));
        assert!(bs_prob_exact(&PhotonConfig::bs(2, 0, 1), &rat("4/3")).is_err());
    }

    #[test]
    fn squeezer_examples() {
        assert!(tms_prob(&PhotonConfig::tms(1, 1, 1), &tms(0.5)).unwrap().value <= 1e-15);
        assert!((tms_prob(&PhotonConfig::tms(0, 0, 0), &tms(0.25)).unwrap().value - 0.75).abs() < 1e-15);
        assert!((tms_prob(&PhotonConfig::tms(1, 1, 1), &tms(0.2)).unwrap().value - 0.288).abs() < 1e-15);
        let exact = tms_prob_exact(&PhotonConfig::tms(1, 1, 1), &rat("1/2")).unwrap();
        assert!(exact.is_zero());
        assert_eq!(tms_prob_exact(&PhotonConfig::tms(3, 0, 1), &rat("1/2")).unwrap(), ExactRational::zero());
    }

    #[test]
    fn exact_and_float_agree() {
        let eta = rat("2/7");
        let p = BeamSplitterParam::exact(eta.clone()).unwrap();
        for i in 0..=12 {
            for k in 0..=12 {
                for n in 0..=i + k {
                    let c = PhotonConfig::bs(i, k, n);
                    let e = bs_prob_exact(&c, &eta).unwrap().to_f64();
                    let f = bs_prob_direct(&c, &p).unwrap().value;
                    assert!((e - f).abs() <= 1e-12, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn square_of_amplitude() {
        let p = bs(0.61);
        for i in 0..=20 {
            for k in 0..=20 {
                for n in 0..=i + k {
                    let c = PhotonConfig::bs(i, k, n);
                    let a = crate::amplitudes::bs_amplitude_direct(&c, &p).unwrap().probability();
                    let b = bs_prob_direct(&c, &p).unwrap().value;
                    assert!((a - b).abs() <= 1e-10, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn degenerate_splitters_are_permutations() {
        for i in 0..=5 {
            for k in 0..=5 {
                for n in 0..=i + k {
                    let full = bs_prob_exact(&PhotonConfig::bs(i, k, n), &rat("1")).unwrap();
                    let none = bs_prob_exact(&PhotonConfig::bs(i, k, n), &rat("0")).unwrap();
                    assert_eq!(full, if n == i { ExactRational::one() } else { ExactRational::zero() });
                    assert_eq!(none, if n == k { ExactRational::one() } else { ExactRational::zero() });
                }
            }
        }
        // lambda = 0 is the identity
        let id = SqueezerParam::new(0.0).unwrap();
        assert_eq!(tms_prob(&PhotonConfig::tms(3, 2, 3), &id).unwrap().value, 1.0);
        assert_eq!(tms_prob(&PhotonConfig::tms(3, 2, 4), &id).unwrap().value, 0.0);
    }

    #[test]
    fn normalization_examples() {
        assert!(normalization_residual(3, 2, &bs(0.7).into()).unwrap() <= 1e-12);
        assert!(normalization_residual(0, 0, &tms(0.5).into()).unwrap() <= 1e-12);
        assert!(normalization_residual(2, 2, &tms(0.6).into()).unwrap() <= 1e-10);
        assert!(normalization_residual(4, 1, &tms(0.0).into()).unwrap() <= 1e-15);
    }

    #[test]
    fn squeezer_rows_normalize() {
        for lambda in [0.1, 0.4, 0.8] {
            for i in 0..=8 {
                for k in 0..=8 {
                    let r = normalization_residual(i, k, &tms(lambda).into()).unwrap();
                    assert!(r <= 1e-10, "i={i} k={k} lambda={lambda}: {r}");
                }
            }
        }
    }

    #[test]
    fn energy_shell_is_doubly_stochastic() {
        let eta = rat("3/8");
        for total in 0..=12usize {
            let m: Vec<Vec<ExactRational>> = (0..=total)
                .map(|i| {
                    (0..=total)
                        .map(|n| bs_prob_exact(&PhotonConfig::bs(i, total - i, n), &eta).unwrap())
                        .collect()
                })
                .collect();
            for r in 0..=total {
                let row = m[r].iter().fold(ExactRational::zero(), |a, b| a + b);
                let col = m.iter().fold(ExactRational::zero(), |a, row| a + &row[r]);
                assert!(row.is_one() && col.is_one(), "shell {total}");
            }
        }
    }
}
