//! Recurrences in the input photon numbers.
//!
//! The general-`j` identities are exposed as residual checks; the `j = 1`
//! special cases drive the table builders in [`table`]. Indices are signed
//! throughout so that right-hand sides can reach below zero, where every
//! probability is 0.

pub mod classical;
pub mod table;

pub use classical::{classical_half_sum_check, classical_prob, classical_recurrence_check, ClassicalTable};
pub use table::{
    bs_diagonal_recurrence, bs_table_convolution, bs_table_direct, bs_table_exact, bs_table_recurrence,
    bs_table_recurrence_with, tms_table_direct, tms_table_exact, tms_table_recurrence, tms_table_recurrence_with,
    Entry, Method, Precision, ProbabilityTable,
};

use crate::error::{Error, Result};
use crate::numerics::{convolve_at, Scalar};
use crate::params::{Device, DeviceParam};

/// Number of `l` terms in the general-`j` sums, `0 <= j <= i+k`.
pub fn c_coeff(i: usize, k: usize, j: usize) -> Result<u64> {
    if j > i + k {
        return Err(Error::Domain(format!("j = {j} exceeds i + k = {}", i + k)));
    }
    let c = if j <= i && j <= k {
        1 + j
    } else if j >= i && j <= k {
        1 + i
    } else if j <= i && j >= k {
        1 + k
    } else {
        1 + i + k - j
    };
    Ok(c as u64)
}

fn expect_device<T: Scalar>(t: &ProbabilityTable<T>, device: Device) -> Result<()> {
    if t.device() == device {
        Ok(())
    } else {
        Err(Error::DeviceMismatch { expected: device, found: t.device() })
    }
}

/// `sum_{l=max(0,j-i)}^{min(j,k)} {B^{(j-l,l)} * B^{(i-j+l,k-l)}}_n`, with
/// the convolution over the output index. 0 when any index is negative or
/// `j > i+k`.
pub fn bs_tilde<T: Scalar>(i: i64, k: i64, j: i64, n: i64, t: &ProbabilityTable<T>) -> Result<T> {
    expect_device(t, Device::Bs)?;
    let mut acc = T::zero();
    if i < 0 || k < 0 || j < 0 || n < 0 || j > i + k {
        return Ok(acc);
    }
    for l in (j - i).max(0)..=j.min(k) {
        let a = t.row(j - l, l)?;
        let b = t.row(i - j + l, k - l)?;
        acc = acc + convolve_at(a, b, n as usize);
    }
    Ok(acc)
}

/// `|B^{(i,k)}_n - (tilde B^{(i,k,j)}_n - tilde B^{(i-1,k-1,j-1)}_{n-1})|`.
pub fn bs_recurrence_check<T: Scalar>(i: usize, k: usize, n: usize, j: usize, t: &ProbabilityTable<T>) -> Result<T> {
    if j > i + k {
        return Err(Error::Domain(format!("j = {j} exceeds i + k = {}", i + k)));
    }
    let (i, k, n, j) = (i as i64, k as i64, n as i64, j as i64);
    let lhs = t.get(i, k, n)?;
    let rhs = bs_tilde(i, k, j, n, t)? - bs_tilde(i - 1, k - 1, j - 1, n - 1, t)?;
    Ok((lhs - rhs).abs())
}

/// `sum_{l=max(0,j-k)}^{min(j,n)} {A^{(*,j-l)}_l * A^{(*,k-j+l)}_{n-l}}_i`,
/// with the convolution over the first input index. 0 when any index is
/// negative or `j > n+k`.
pub fn tms_tilde<T: Scalar>(i: i64, k: i64, n: i64, j: i64, t: &ProbabilityTable<T>) -> Result<T> {
    expect_device(t, Device::Tms)?;
    let mut acc = T::zero();
    if i < 0 || k < 0 || n < 0 || j < 0 || j > n + k {
        return Ok(acc);
    }
    for l in (j - k).max(0)..=j.min(n) {
        for m in 0..=i {
            let a = t.get(m, j - l, l)?;
            if a.is_zero() {
                continue;
            }
            acc = acc + a * t.get(i - m, k - j + l, n - l)?;
        }
    }
    Ok(acc)
}

/// `|(1-lambda) A^{(i,k)}_n - (tilde A^{(i,k)}_{n,j} - tilde A^{(i-1,k-1)}_{n-1,j-1})|`.
pub fn tms_recurrence_check<T: Scalar>(i: usize, k: usize, n: usize, j: usize, t: &ProbabilityTable<T>) -> Result<T> {
    let comp = match t.param() {
        DeviceParam::Tms(p) => p.weights::<T>()?.1,
        DeviceParam::Bs(_) => return Err(Error::DeviceMismatch { expected: Device::Tms, found: Device::Bs }),
    };
    if j > n + k {
        return Err(Error::Domain(format!("j = {j} exceeds n + k = {}", n + k)));
    }
    let (i, k, n, j) = (i as i64, k as i64, n as i64, j as i64);
    let lhs = comp * t.get(i, k, n)?;
    let rhs = tms_tilde(i, k, n, j, t)? - tms_tilde(i - 1, k - 1, n - 1, j - 1, t)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ExactRational;
    use crate::params::{BeamSplitterParam, SqueezerParam};
    use num_traits::Zero;

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn bs_exact(imax: usize, kmax: usize, eta: &str) -> ProbabilityTable<ExactRational> {
        bs_table_recurrence(imax, kmax, &BeamSplitterParam::exact(q(eta)).unwrap()).unwrap()
    }

    #[test]
    fn coefficient_branches() {
        assert_eq!(c_coeff(2, 3, 1).unwrap(), 2);
        assert_eq!(c_coeff(0, 0, 0).unwrap(), 1);
        assert_eq!(c_coeff(2, 2, 3).unwrap(), 2);
        assert_eq!(c_coeff(3, 2, 4).unwrap(), 2);
        assert!(matches!(c_coeff(1, 1, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn coefficient_counts_terms() {
        for i in 0..=10usize {
            for k in 0..=10usize {
                for j in 0..=i + k {
                    let lo = j.saturating_sub(i);
                    let count = (lo..=j.min(k)).count() as u64;
                    assert_eq!(c_coeff(i, k, j).unwrap(), count, "({i},{k},{j})");
                }
            }
        }
    }

    #[test]
    fn tilde_edge_cases() {
        let t = bs_exact(3, 3, "1/3");
        for (i, k) in [(2, 1), (3, 3), (0, 2)] {
            for n in 0..=i + k {
                assert_eq!(bs_tilde(i, k, 0, n, &t).unwrap(), t.get(i, k, n).unwrap());
                assert!(bs_tilde(i, k, i + k + 1, n, &t).unwrap().is_zero());
            }
        }
        // both l terms give 1/2 at balance; the identity then subtracts tilde B^{(0,0,0)}_0 = 1
        let t = bs_exact(1, 1, "1/2");
        assert_eq!(bs_tilde(1, 1, 1, 1, &t).unwrap(), q("1"));
        assert_eq!(bs_tilde(0, 0, 0, 0, &t).unwrap(), q("1"));
    }

    #[test]
    fn general_j_identity_exact() {
        let t = bs_exact(6, 6, "1/3");
        for i in 0..=6 {
            for k in 0..=6 {
                for n in 0..=i + k {
                    for j in 0..=i + k {
                        assert!(bs_recurrence_check(i, k, n, j, &t).unwrap().is_zero(), "({i},{k},{n},{j})");
                    }
                }
            }
        }
        assert!(bs_recurrence_check(1, 1, 1, 3, &t).is_err());
    }

    #[test]
    fn hom_from_the_identity() {
        let t = bs_exact(1, 1, "1/2");
        assert!(bs_recurrence_check(1, 1, 1, 1, &t).unwrap().is_zero());
        assert!(t.get(1, 1, 1).unwrap().is_zero());
    }

    #[test]
    fn squeezer_identity_exact() {
        let p = SqueezerParam::exact(q("2/5")).unwrap();
        let t: ProbabilityTable<ExactRational> = tms_table_recurrence(5, 5, 5, &p).unwrap();
        for i in 0..=5 {
            for k in 0..=5 {
                for n in 0..=5 {
                    for j in 0..=n + k {
                        assert!(tms_recurrence_check(i, k, n, j, &t).unwrap().is_zero(), "({i},{k},{n},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn squeezer_suppression_from_the_identity() {
        let p = SqueezerParam::exact(q("1/2")).unwrap();
        let t: ProbabilityTable<ExactRational> = tms_table_recurrence(1, 1, 1, &p).unwrap();
        assert!(tms_recurrence_check(1, 1, 1, 1, &t).unwrap().is_zero());
        assert!(t.get(1, 1, 1).unwrap().is_zero());
        assert!(tms_tilde(1, 1, 1, 1, &t).unwrap() == tms_tilde(0, 0, 0, 0, &t).unwrap());
    }

    #[test]
    fn wrong_table_kind() {
        let t = bs_exact(1, 1, "1/2");
        assert!(matches!(tms_recurrence_check(0, 0, 0, 0, &t), Err(Error::DeviceMismatch { .. })));
    }
}
