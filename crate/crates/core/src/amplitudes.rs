//! Fock-basis transition amplitudes `b^{(i,k)}_n = <n,m|U_BS|i,k>` and
//! `a^{(i,k)}_n = <n,m|U_TMS|i,k>`.
//!
//! Every route is an alternating sum of terms
//! `sqrt(prod C(.,.) * eta^te * (1-eta)^re)`. Near `eta = 1/2` the largest
//! term exceeds the result by roughly `C(i+k, i)` (1e6 at i = k = 25, 1e28 at
//! i = k = 100), so each sum is first sized in log space: moderate sums run in
//! double-double, larger ones exactly in fixed point over the dyadic value of
//! the parameter.

use num_bigint::{BigInt, BigUint, Sign};

use crate::error::Result;
use crate::numerics::dyadic::{scaled_to_f64, sqrt_monomial_fixed, Dyadic};
use crate::numerics::{binomial_exact, log_binomial, sqrt_binom_dd, DoubleDouble};
use crate::params::{BeamSplitterParam, Device, PhotonConfig, SqueezerParam};

/// Above this total photon number `bs_amplitude` switches from the direct sum
/// to the convolution.
pub const DIRECT_ROUTE_LIMIT: usize = 60;

/// log2 of the summed term magnitude up to which double-double is trusted.
const DD_MAGNITUDE_BITS: f64 = 40.0;

/// Fractional bits of the fixed-point fallback.
const FIXED_FRAC_BITS: u32 = 96;

/// A real transition amplitude.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Amplitude(pub f64);

impl Amplitude {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn probability(self) -> f64 {
        self.0 * self.0
    }
}

/// `sqrt(prod C(n,k) * eta^te * (1-eta)^re)`.
#[derive(Clone, Debug)]
struct Factor {
    binomials: Vec<(i64, i64)>,
    te: i64,
    re: i64,
}

impl Factor {
    fn new(binomials: &[(i64, i64)], te: i64, re: i64) -> Self {
        Self { binomials: binomials.to_vec(), te, re }
    }

    fn vanishes(&self) -> bool {
        self.binomials.iter().any(|&(n, k)| n < 0 || k < 0 || k > n)
    }
}

/// Signed product of factors; the grouping only affects the double-double
/// rounding, the fixed-point path merges them.
#[derive(Clone, Debug)]
struct Term {
    negative: bool,
    factors: Vec<Factor>,
}

struct Splitter {
    eta: f64,
    comp: f64,
}

impl Splitter {
    fn of(p: &BeamSplitterParam) -> Self {
        Self { eta: p.eta(), comp: p.one_minus_eta() }
    }

    fn ln_magnitude(&self, t: &Term) -> f64 {
        let mut acc = 0.0;
        for f in &t.factors {
            for &(n, k) in &f.binomials {
                acc += 0.5 * log_binomial(n as u64, k as u64);
            }
            acc += half_ln_pow(self.eta, f.te) + half_ln_pow(self.comp, f.re);
        }
        acc
    }

    fn sum(&self, terms: &[Term]) -> f64 {
        let terms: Vec<&Term> = terms.iter().filter(|t| !t.factors.iter().any(Factor::vanishes)).collect();
        if terms.is_empty() {
            return 0.0;
        }
        let ln = terms.iter().map(|t| self.ln_magnitude(t)).fold(f64::NEG_INFINITY, f64::max);
        let bits = (ln + (terms.len() as f64).ln()) / std::f64::consts::LN_2;
        if bits <= DD_MAGNITUDE_BITS {
            self.sum_dd(&terms)
        } else {
            self.sum_fixed(&terms)
        }
    }

    fn sum_dd(&self, terms: &[&Term]) -> f64 {
        let max_pow = terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.te.max(f.re)))
            .max()
            .unwrap_or(0) as usize;
        let t = DoubleDouble::from_f64(self.eta).sqrt().power_table(max_pow + 1);
        let r = DoubleDouble::from_f64(self.comp).sqrt().power_table(max_pow + 1);
        let mut acc = DoubleDouble::ZERO;
        for term in terms {
            let mut v = DoubleDouble::ONE;
            for f in &term.factors {
                let mut g = t[f.te as usize] * r[f.re as usize];
                for &(n, k) in &f.binomials {
                    g = g * sqrt_binom_dd(n, k);
                }
                v = v * g;
            }
            acc += if term.negative { -v } else { v };
        }
        acc.to_f64()
    }

    fn sum_fixed(&self, terms: &[&Term]) -> f64 {
        let (de, dc) = (Dyadic::new(self.eta), Dyadic::new(self.comp));
        let mut acc = BigInt::from(0u8);
        for term in terms {
            let mut weight = BigUint::from(1u8);
            let (mut te, mut re) = (0i64, 0i64);
            for f in &term.factors {
                for &(n, k) in &f.binomials {
                    weight *= binomial_exact(n as u64, k);
                }
                te += f.te;
                re += f.re;
            }
            let v = sqrt_monomial_fixed(&weight, de, te as u32, dc, re as u32, FIXED_FRAC_BITS);
            acc += BigInt::from_biguint(if term.negative { Sign::Minus } else { Sign::Plus }, v);
        }
        scaled_to_f64(&acc, -(FIXED_FRAC_BITS as i64))
    }
}

fn half_ln_pow(x: f64, e: i64) -> f64 {
    if e == 0 {
        0.0
    } else {
        0.5 * e as f64 * x.ln()
    }
}

fn odd(x: i64) -> bool {
    x.rem_euclid(2) == 1
}

/// Terms of the direct sum over `m in [max(0,n-k), min(i,n)]`; `extra_te`
/// multiplies every term by `sqrt(eta)^extra_te`.
fn direct_terms(i: usize, k: usize, n: usize, extra_te: i64) -> Vec<Term> {
    if n > i + k {
        return Vec::new();
    }
    let (i, k, n) = (i as i64, k as i64, n as i64);
    ((n - k).max(0)..=i.min(n))
        .map(|m| Term {
            negative: odd(i - m),
            factors: vec![Factor::new(
                &[(i, m), (k, n - m), (n, m), (i + k - n, i - m)],
                2 * m + k - n + extra_te,
                i - 2 * m + n,
            )],
        })
        .collect()
}

/// Terms of the convolution `sum_t sqrt(C(n,t) C(i+k-n,i-t)) b^{(i,0)}_t b^{(0,k)}_{n-t}`.
fn convolution_terms(i: usize, k: usize, n: usize, extra_te: i64) -> Vec<Term> {
    if n > i + k {
        return Vec::new();
    }
    let (i, k, n) = (i as i64, k as i64, n as i64);
    ((n - k).max(0)..=n.min(i))
        .map(|t| Term {
            negative: odd(i - t),
            factors: vec![
                Factor::new(&[(n, t), (i + k - n, i - t)], extra_te, 0),
                Factor::new(&[(i, t)], t, i - t),
                Factor::new(&[(k, n - t)], k - n + t, n - t),
            ],
        })
        .collect()
}

/// `b^{(i,0)}_n = (-1)^{i-n} sqrt(C(i,n) eta^n (1-eta)^{i-n})`, 0 unless `n <= i`.
pub fn bs_vacuum_row(i: usize, n: usize, p: &BeamSplitterParam) -> Amplitude {
    if n > i {
        return Amplitude(0.0);
    }
    let (i, n) = (i as i64, n as i64);
    let term = Term { negative: odd(i - n), factors: vec![Factor::new(&[(i, n)], n, i - n)] };
    Amplitude(Splitter::of(p).sum(&[term]))
}

/// `a^{(i,0)}_n = sqrt(C(n,i)) (1-lambda)^{(1+i)/2} lambda^{(n-i)/2}`, 0 unless `n >= i`.
pub fn tms_vacuum_row(i: usize, n: usize, p: &SqueezerParam) -> Amplitude {
    if n < i {
        return Amplitude(0.0);
    }
    let (i, n) = (i as i64, n as i64);
    let term = Term { negative: false, factors: vec![Factor::new(&[(n, i)], 1 + i, n - i)] };
    Amplitude(Splitter::of(&BeamSplitterParam::time_reversed(p)).sum(&[term]))
}

/// Closed-form alternating sum over `m in [max(0,n-k), min(i,n)]`.
pub fn bs_amplitude_direct(c: &PhotonConfig, p: &BeamSplitterParam) -> Result<Amplitude> {
    c.expect(Device::Bs)?;
    Ok(Amplitude(Splitter::of(p).sum(&direct_terms(c.i, c.k, c.n, 0))))
}

/// Convolution of the two single-input rows `b^{(i,0)}` and `b^{(0,k)}`.
pub fn bs_amplitude_convolution(c: &PhotonConfig, p: &BeamSplitterParam) -> Result<Amplitude> {
    c.expect(Device::Bs)?;
    Ok(Amplitude(Splitter::of(p).sum(&convolution_terms(c.i, c.k, c.n, 0))))
}

/// Direct route up to [`DIRECT_ROUTE_LIMIT`] photons, convolution beyond.
pub fn bs_amplitude(c: &PhotonConfig, p: &BeamSplitterParam) -> Result<Amplitude> {
    if c.i + c.k > DIRECT_ROUTE_LIMIT {
        bs_amplitude_convolution(c, p)
    } else {
        bs_amplitude_direct(c, p)
    }
}

/// `a^{(i,k)}_n = sqrt(1-lambda) b^{(i,m)}_n` at `eta = 1 - lambda`, with `m = n+k-i`.
pub fn tms_amplitude(c: &PhotonConfig, p: &SqueezerParam) -> Result<Amplitude> {
    c.expect(Device::Tms)?;
    let m = c.m();
    if m < 0 {
        return Ok(Amplitude(0.0));
    }
    let m = m as usize;
    // the sqrt(1-lambda) prefactor is one extra power of sqrt(eta)
    let terms = if c.i + m > DIRECT_ROUTE_LIMIT {
        convolution_terms(c.i, m, c.n, 1)
    } else {
        direct_terms(c.i, m, c.n, 1)
    };
    Ok(Amplitude(Splitter::of(&BeamSplitterParam::time_reversed(p)).sum(&terms)))
}

/// `a^{(i,k)}_n` assembled from the vacuum rows `a^{(t,0)}_n` and the `n = 0`
/// column `a^{(i-t,k)}_0`, summing over `t in [max(0,i-k), min(i,n)]`.
pub fn tms_amplitude_convolution(c: &PhotonConfig, p: &SqueezerParam) -> Result<Amplitude> {
    c.expect(Device::Tms)?;
    if c.m() < 0 {
        return Ok(Amplitude(0.0));
    }
    let (i, k, n) = (c.i as i64, c.k as i64, c.n as i64);
    let terms: Vec<Term> = ((i - k).max(0)..=i.min(n))
        .map(|t| Term {
            negative: odd(i - t),
            factors: vec![
                Factor::new(&[(i, t), (n - i + k, n - t)], 0, 0),
                // a^{(t,0)}_n / sqrt(1-lambda)
                Factor::new(&[(n, t)], t, n - t),
                // a^{(i-t,k)}_0 = sqrt(1-lambda) b^{(i-t,k-i+t)}_0, a single-term sum
                Factor::new(&[(k, i - t)], 1 + k - i + t, i - t),
            ],
        })
        .collect();
    Ok(Amplitude(Splitter::of(&BeamSplitterParam::time_reversed(p)).sum(&terms)))
}
