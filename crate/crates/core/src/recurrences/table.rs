//! Probability tables over `(i, k)` and the builders that fill them.

use serde::Serialize;

use crate::amplitudes::bs_amplitude_convolution;
use crate::error::{Error, Result};
use crate::numerics::{ExactRational, Scalar};
use crate::parallel::{self, Execution};
use crate::params::{BeamSplitterParam, Device, DeviceParam, PhotonConfig, SqueezerParam};
use crate::probabilities::{bs_prob_exact_raw, bs_prob_f64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Convolution,
    Recurrence,
    Exact,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Convolution => "convolution",
            Method::Recurrence => "recurrence",
            Method::Exact => "exact",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Float,
    Rational,
}

/// One stored value with its indices.
#[derive(Clone, Copy, Debug)]
pub struct Entry<'a, T> {
    pub i: usize,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub value: &'a T,
}

/// `P^{(i,k)}_n` for `0 <= i <= imax`, `0 <= k <= kmax`.
///
/// Beam splitter rows hold `n = 0..=i+k`. Squeezer rows hold `n = 0..=nmax`,
/// with zeros where `n+k < i`.
#[derive(Clone, Debug)]
pub struct ProbabilityTable<T> {
    param: DeviceParam,
    method: Method,
    imax: usize,
    kmax: usize,
    nmax: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> ProbabilityTable<T> {
    pub fn device(&self) -> Device {
        self.param.device()
    }

    pub fn param(&self) -> &DeviceParam {
        &self.param
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn precision(&self) -> Precision {
        if T::EXACT { Precision::Rational } else { Precision::Float }
    }

    pub fn imax(&self) -> usize {
        self.imax
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Largest output index stored; `imax + kmax` for the beam splitter.
    pub fn nmax(&self) -> usize {
        self.nmax
    }

    fn index(&self, i: usize, k: usize) -> usize {
        i * (self.kmax + 1) + k
    }

    /// Row `(i, k)`; an empty slice for negative indices.
    pub fn row(&self, i: i64, k: i64) -> Result<&[T]> {
        if i < 0 || k < 0 {
            return Ok(&[]);
        }
        if i as usize > self.imax || k as usize > self.kmax {
            return Err(Error::Coverage { i, k, n: 0 });
        }
        Ok(&self.rows[self.index(i as usize, k as usize)])
    }

    /// `P^{(i,k)}_n`: 0 for negative indices and unreachable outputs, a
    /// coverage error beyond the table.
    pub fn get(&self, i: i64, k: i64, n: i64) -> Result<T> {
        if i < 0 || k < 0 || n < 0 {
            return Ok(T::zero());
        }
        let row = self.row(i, k).map_err(|_| Error::Coverage { i, k, n })?;
        match row.get(n as usize) {
            Some(v) => Ok(v.clone()),
            None if self.device() == Device::Bs => Ok(T::zero()),
            None => Err(Error::Coverage { i, k, n }),
        }
    }

    /// Reachable entries in `(i, k, n)` order.
    pub fn entries(&self) -> impl Iterator<Item = Entry<'_, T>> + '_ {
        let device = self.device();
        (0..=self.imax).flat_map(move |i| {
            (0..=self.kmax).flat_map(move |k| {
                let row = &self.rows[self.index(i, k)];
                row.iter().enumerate().filter_map(move |(n, value)| {
                    let m = PhotonConfig { i, k, n, device }.m();
                    (m >= 0).then_some(Entry { i, k, n, m: m as usize, value })
                })
            })
        })
    }

    /// Largest `|sum_n P^{(i,k)}_n - 1|` over beam splitter rows. `None` for
    /// squeezer tables, whose rows are truncated at `nmax`.
    pub fn max_row_residual(&self) -> Option<f64> {
        if self.device() != Device::Bs {
            return None;
        }
        let worst = self
            .rows
            .iter()
            .map(|row| {
                let total = row.iter().cloned().fold(T::zero(), |a, b| a + b);
                (total - T::one()).abs().to_f64()
            })
            .fold(0.0, f64::max);
        Some(worst)
    }

    /// Whether every stored value lies in `[0, 1]`, with `slack` for rounding.
    pub fn values_in_unit_interval(&self, slack: f64) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|v| {
                let x = v.to_f64();
                x >= -slack && x <= 1.0 + slack
            })
    }
}

fn at<T: Scalar>(row: &[T], n: i64) -> T {
    if n >= 0 && (n as usize) < row.len() {
        row[n as usize].clone()
    } else {
        T::zero()
    }
}

/// One beam splitter row from its three predecessors.
fn bs_cell<'a, T: Scalar>(i: usize, k: usize, w: &(T, T), prev: impl Fn(usize, usize) -> &'a [T]) -> Vec<T> {
    let (eta, comp) = w;
    if i == 0 && k == 0 {
        return vec![T::one()];
    }
    (0..=(i + k) as i64)
        .map(|n| {
            if k == 0 {
                let r = prev(i - 1, 0);
                eta.clone() * at(r, n - 1) + comp.clone() * at(r, n)
            } else if i == 0 {
                let r = prev(0, k - 1);
                eta.clone() * at(r, n) + comp.clone() * at(r, n - 1)
            } else {
                let a = prev(i - 1, k);
                let b = prev(i, k - 1);
                let c = prev(i - 1, k - 1);
                eta.clone() * at(a, n - 1) + comp.clone() * at(a, n) + eta.clone() * at(b, n)
                    + comp.clone() * at(b, n - 1)
                    - at(c, n - 1)
            }
        })
        .collect()
}

/// Cells `(i, shell - i)` inside the `imax x kmax` box.
fn shell_cells(shell: usize, imax: usize, kmax: usize) -> Vec<(usize, usize)> {
    (shell.saturating_sub(kmax)..=shell.min(imax)).map(|i| (i, shell - i)).collect()
}

/// Beam splitter table by the five-term `j = 1` recurrence, filled shell by
/// shell in `N = i + k` from `B^{(0,0)} = [1]`.
pub fn bs_table_recurrence<T: Scalar>(imax: usize, kmax: usize, p: &BeamSplitterParam) -> Result<ProbabilityTable<T>> {
    bs_table_recurrence_with(imax, kmax, p, Execution::default())
}

pub fn bs_table_recurrence_with<T: Scalar>(
    imax: usize,
    kmax: usize,
    p: &BeamSplitterParam,
    exec: Execution,
) -> Result<ProbabilityTable<T>> {
    let w = p.weights::<T>()?;
    let width = kmax + 1;
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); (imax + 1) * width];
    for shell in 0..=imax + kmax {
        let cells = shell_cells(shell, imax, kmax);
        let fresh = {
            let rows = &rows;
            let prev = |a: usize, b: usize| -> &[T] {
                let r = &rows[a * width + b];
                assert_eq!(r.len(), a + b + 1, "row ({a},{b}) read before its shell was filled");
                r
            };
            parallel::map(exec, &cells, |&(i, k)| bs_cell(i, k, &w, prev))
        };
        for ((i, k), row) in cells.into_iter().zip(fresh) {
            rows[i * width + k] = row;
        }
    }
    Ok(ProbabilityTable { param: p.clone().into(), method: Method::Recurrence, imax, kmax, nmax: imax + kmax, rows })
}

/// Diagonal rows `B^{(i,i)}` for `i = 0..=imax`, by the same recurrence but
/// keeping only the last two shells in memory.
pub fn bs_diagonal_recurrence<T: Scalar>(imax: usize, p: &BeamSplitterParam, exec: Execution) -> Result<Vec<Vec<T>>> {
    struct Shell<T> {
        lo: usize,
        rows: Vec<Vec<T>>,
    }
    let w = p.weights::<T>()?;
    let empty = || Shell { lo: 0, rows: Vec::new() };
    let (mut older, mut last) = (empty(), empty());
    let mut diagonal = Vec::with_capacity(imax + 1);
    for shell in 0..=2 * imax {
        let cells = shell_cells(shell, imax, imax);
        let rows = {
            let (older, last) = (&older, &last);
            let prev = |a: usize, b: usize| -> &[T] {
                let s = match shell - (a + b) {
                    1 => last,
                    2 => older,
                    _ => panic!("row ({a},{b}) is not in the two previous shells"),
                };
                &s.rows[a - s.lo]
            };
            parallel::map(exec, &cells, |&(i, k)| bs_cell(i, k, &w, prev))
        };
        if shell % 2 == 0 {
            let i = shell / 2;
            diagonal.push(rows[i - cells[0].0].clone());
        }
        older = std::mem::replace(&mut last, Shell { lo: cells[0].0, rows });
    }
    Ok(diagonal)
}

/// Fill every `(i, k)` cell independently.
fn cellwise<T: Scalar + Send>(
    imax: usize,
    kmax: usize,
    f: impl Fn(usize, usize) -> Result<Vec<T>> + Sync + Send,
) -> Result<Vec<Vec<T>>> {
    let cells: Vec<(usize, usize)> = (0..=imax).flat_map(|i| (0..=kmax).map(move |k| (i, k))).collect();
    parallel::try_map(Execution::default(), &cells, |&(i, k)| f(i, k))
}

/// Beam splitter table from the direct double sum.
pub fn bs_table_direct(imax: usize, kmax: usize, p: &BeamSplitterParam) -> Result<ProbabilityTable<f64>> {
    let rows = cellwise(imax, kmax, |i, k| {
        Ok((0..=i + k).map(|n| bs_prob_f64(i, k, n, p.eta(), p.one_minus_eta()).max(0.0)).collect())
    })?;
    Ok(ProbabilityTable { param: p.clone().into(), method: Method::Direct, imax, kmax, nmax: imax + kmax, rows })
}

/// Beam splitter table from squared convolution-route amplitudes.
pub fn bs_table_convolution(imax: usize, kmax: usize, p: &BeamSplitterParam) -> Result<ProbabilityTable<f64>> {
    let rows = cellwise(imax, kmax, |i, k| {
        (0..=i + k)
            .map(|n| bs_amplitude_convolution(&PhotonConfig::bs(i, k, n), p).map(|a| a.probability()))
            .collect()
    })?;
    Ok(ProbabilityTable { param: p.clone().into(), method: Method::Convolution, imax, kmax, nmax: imax + kmax, rows })
}

/// Beam splitter table from the exact rational double sum.
pub fn bs_table_exact(imax: usize, kmax: usize, eta: &ExactRational) -> Result<ProbabilityTable<ExactRational>> {
    let p = BeamSplitterParam::exact(eta.clone())?;
    let rows = cellwise(imax, kmax, |i, k| Ok((0..=i + k).map(|n| bs_prob_exact_raw(i, k, n, eta)).collect()))?;
    Ok(ProbabilityTable { param: p.into(), method: Method::Exact, imax, kmax, nmax: imax + kmax, rows })
}

fn power<T: Scalar>(x: &T, e: usize) -> T {
    num_traits::pow(x.clone(), e)
}

/// Squeezer table by the five-term `j = 1` recurrence.
///
/// Cells go in shells of `i + k`, each cell in increasing `n`. The `k = 0`
/// column uses the two-term amplifier recurrence seeded by
/// `A^{(0,0)}_0 = 1 - lambda`; the `n = 0` entries come from the time-reversed
/// beam splitter vacuum row, `(1-lambda) C(k,i) lambda^i (1-lambda)^{k-i}`.
pub fn tms_table_recurrence<T: Scalar>(
    imax: usize,
    kmax: usize,
    nmax: usize,
    p: &SqueezerParam,
) -> Result<ProbabilityTable<T>> {
    tms_table_recurrence_with(imax, kmax, nmax, p, Execution::default())
}

pub fn tms_table_recurrence_with<T: Scalar>(
    imax: usize,
    kmax: usize,
    nmax: usize,
    p: &SqueezerParam,
    exec: Execution,
) -> Result<ProbabilityTable<T>> {
    let (lambda, comp) = p.weights::<T>()?;
    let width = kmax + 1;
    let mut rows: Vec<Vec<T>> = vec![Vec::new(); (imax + 1) * width];
    for shell in 0..=imax + kmax {
        let cells = shell_cells(shell, imax, kmax);
        let fresh = {
            let rows = &rows;
            let prev = |a: usize, b: usize| -> &[T] {
                let r = &rows[a * width + b];
                assert_eq!(r.len(), nmax + 1, "row ({a},{b}) read before its shell was filled");
                r
            };
            parallel::map(exec, &cells, |&(i, k)| {
                let mut row: Vec<T> = Vec::with_capacity(nmax + 1);
                let seed = if i <= k {
                    comp.clone() * T::binomial(k as i64, i as i64) * power(&lambda, i) * power(&comp, k - i)
                } else {
                    T::zero()
                };
                row.push(seed);
                for n in 1..=nmax as i64 {
                    let here = at(&row, n - 1);
                    let v = if k == 0 {
                        let left = if i > 0 { at(prev(i - 1, 0), n - 1) } else { T::zero() };
                        comp.clone() * left + lambda.clone() * here
                    } else {
                        let up = prev(i, k - 1);
                        let mut v = comp.clone() * at(up, n) + lambda.clone() * here;
                        if i > 0 {
                            let diag = prev(i - 1, k - 1);
                            v = v + lambda.clone() * at(diag, n) + comp.clone() * at(prev(i - 1, k), n - 1)
                                - at(diag, n - 1);
                        }
                        v
                    };
                    row.push(v);
                }
                row
            })
        };
        for ((i, k), row) in cells.into_iter().zip(fresh) {
            rows[i * width + k] = row;
        }
    }
    Ok(ProbabilityTable { param: p.clone().into(), method: Method::Recurrence, imax, kmax, nmax, rows })
}

/// Squeezer table through the time-reversed beam splitter double sum.
pub fn tms_table_direct(imax: usize, kmax: usize, nmax: usize, p: &SqueezerParam) -> Result<ProbabilityTable<f64>> {
    let bs = BeamSplitterParam::time_reversed(p);
    let rows = cellwise(imax, kmax, |i, k| {
        Ok((0..=nmax)
            .map(|n| {
                if n + k < i {
                    return 0.0;
                }
                (bs.eta() * bs_prob_f64(i, n + k - i, n, bs.eta(), bs.one_minus_eta())).max(0.0)
            })
            .collect())
    })?;
    Ok(ProbabilityTable { param: p.clone().into(), method: Method::Direct, imax, kmax, nmax, rows })
}

/// Exact squeezer table through the time-reversed beam splitter double sum.
pub fn tms_table_exact(
    imax: usize,
    kmax: usize,
    nmax: usize,
    lambda: &ExactRational,
) -> Result<ProbabilityTable<ExactRational>> {
    let p = SqueezerParam::exact(lambda.clone())?;
    let eta = lambda.one_minus();
    let rows = cellwise(imax, kmax, |i, k| {
        Ok((0..=nmax)
            .map(|n| {
                if n + k < i {
                    return ExactRational::from_integer(0);
                }
                &eta * &bs_prob_exact_raw(i, n + k - i, n, &eta)
            })
            .collect())
    })?;
    Ok(ProbabilityTable { param: p.into(), method: Method::Exact, imax, kmax, nmax, rows })
}
