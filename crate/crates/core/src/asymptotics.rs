//! Large-photon-number laws on the balanced devices.
//!
//! At `eta = 1/2`, `B^{(i,i)}_n ~ (1 + (-1)^n) / (pi sqrt(n (2i - n)))`, an
//! arcsine law with every odd outcome suppressed. The squeezer analogue at
//! `lambda = 1/2` is `A^{(i,k)}_k ~ (1 + (-1)^i) / (2 pi sqrt(i (2k - i)))`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::params::{BeamSplitterParam, Device, SqueezerParam};
use crate::recurrences::{bs_diagonal_recurrence, tms_table_recurrence, ProbabilityTable};

/// Predicted `B^{(i,i)}_n` at `eta = 1/2`, for `0 < n < 2i`.
pub fn bs_diag_asymptotic(i: usize, n: usize) -> Result<f64> {
    if n == 0 || n >= 2 * i {
        return Err(Error::Domain(format!("diagonal law needs 0 < n < 2i, got i = {i}, n = {n}")));
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    Ok(2.0 / (PI * ((n * (2 * i - n)) as f64).sqrt()))
}

/// Predicted `A^{(i,k)}_k` at `lambda = 1/2`, for `0 < i < 2k`.
pub fn tms_asymptotic(i: usize, k: usize) -> Result<f64> {
    if i == 0 || i >= 2 * k {
        return Err(Error::Domain(format!("squeezer law needs 0 < i < 2k, got i = {i}, k = {k}")));
    }
    if i % 2 == 1 {
        return Ok(0.0);
    }
    Ok(1.0 / (PI * ((i * (2 * k - i)) as f64).sqrt()))
}

/// One compared outcome. For the beam splitter `size` is `i` and `index` is
/// `n`; for the squeezer `size` is `k` (and `n = k`) and `index` is `i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub size: usize,
    pub index: usize,
    pub exact: f64,
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub device: Device,
    pub index_list: Vec<usize>,
    /// Even-parity outcomes in the central half-range.
    pub rows: Vec<AsymptoticRow>,
    /// `(size, index, exact)` for the odd outcomes, where the law predicts 0.
    pub parity_zeros: Vec<(usize, usize, f64)>,
    /// Largest relative error per entry of `index_list`.
    pub max_rel_error: Vec<f64>,
    /// Whether `max_rel_error` never increases along `index_list`.
    pub monotone: bool,
}

impl AsymptoticReport {
    /// The row for `(size, index)`, if it was compared.
    pub fn row(&self, size: usize, index: usize) -> Option<&AsymptoticRow> {
        self.rows.iter().find(|r| r.size == size && r.index == index)
    }
}

/// `[ceil(s/2), floor(3s/2)]`, where the law is compared.
fn central_range(s: usize) -> std::ops::RangeInclusive<usize> {
    s.div_ceil(2)..=(3 * s) / 2
}

/// Compare the law with floating-point recurrence tables on the central
/// half-range of each size in `sizes`.
///
/// Beam splitter sizes are `i` of `B^{(i,i)}_n`; all diagonals come from one
/// streaming pass. Squeezer sizes are `k` of `A^{(i,k)}_k`.
pub fn convergence_report(sizes: &[usize], device: Device) -> Result<AsymptoticReport> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes.first() == Some(&0) {
        return Err(Error::Domain(format!("sizes must be positive and increasing, got {sizes:?}")));
    }
    let largest = sizes.last().copied().unwrap_or(0);
    let mut rows = Vec::new();
    let mut parity_zeros = Vec::new();
    let mut max_rel_error = Vec::with_capacity(sizes.len());
    let mut compare = |s: usize, exact: &dyn Fn(usize) -> Result<f64>, law: &dyn Fn(usize) -> Result<f64>| -> Result<()> {
        let mut worst = 0.0f64;
        for idx in central_range(s) {
            let (e, p) = (exact(idx)?, law(idx)?);
            if idx % 2 == 1 {
                parity_zeros.push((s, idx, e));
                continue;
            }
            let rel_error = (e - p).abs() / e;
            worst = worst.max(rel_error);
            rows.push(AsymptoticRow { size: s, index: idx, exact: e, predicted: p, rel_error });
        }
        max_rel_error.push(worst);
        Ok(())
    };
    match device {
        Device::Bs => {
            let half = BeamSplitterParam::new(0.5)?;
            let diagonal: Vec<Vec<f64>> = bs_diagonal_recurrence(largest, &half, Execution::default())?;
            for &i in sizes {
                compare(i, &|n| Ok(diagonal[i][n]), &|n| bs_diag_asymptotic(i, n))?;
            }
        }
        Device::Tms => {
            let half = SqueezerParam::new(0.5)?;
            for &k in sizes {
                let table: ProbabilityTable<f64> = tms_table_recurrence(3 * k / 2, k, k, &half)?;
                compare(k, &|i| table.get(i as i64, k as i64, k as i64), &|i| tms_asymptotic(i, k))?;
            }
        }
    }
    let monotone = max_rel_error.windows(2).all(|w| w[1] <= w[0]);
    Ok(AsymptoticReport { device, index_list: sizes.to_vec(), rows, parity_zeros, max_rel_error, monotone })
}
