//! Distinguishable photons: each photon is routed independently, so the
//! output count is a convolution of two binomials and nothing interferes.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::c_coeff;
use crate::error::{Error, Result};
use crate::numerics::{convolve_at, Scalar};
use crate::params::BeamSplitterParam;

type RowCache<T> = RwLock<HashMap<(usize, usize), Arc<Vec<T>>>>;

/// `p(n|i,k)` rows, computed on first use and kept.
#[derive(Debug)]
pub struct ClassicalTable<T = f64> {
    param: BeamSplitterParam,
    eta: T,
    comp: T,
    rows: RowCache<T>,
}

impl<T: Scalar> ClassicalTable<T> {
    pub fn new(p: &BeamSplitterParam) -> Result<Self> {
        let (eta, comp) = p.weights::<T>()?;
        Ok(Self { param: p.clone(), eta, comp, rows: RwLock::default() })
    }

    pub fn param(&self) -> &BeamSplitterParam {
        &self.param
    }

    fn binomial_row(&self, count: usize, hit: &T, miss: &T) -> Vec<T> {
        (0..=count)
            .map(|n| {
                T::binomial(count as i64, n as i64)
                    * num_traits::pow(hit.clone(), n)
                    * num_traits::pow(miss.clone(), count - n)
            })
            .collect()
    }

    /// `p(.|i,k)`, of length `i+k+1`.
    pub fn row(&self, i: usize, k: usize) -> Arc<Vec<T>> {
        if let Some(row) = self.rows.read().expect("classical row cache poisoned").get(&(i, k)) {
            return Arc::clone(row);
        }
        // photons from mode a reach output a with probability eta, photons from b with 1 - eta
        let a = self.binomial_row(i, &self.eta, &self.comp);
        let b = self.binomial_row(k, &self.comp, &self.eta);
        let row = Arc::new((0..=i + k).map(|n| convolve_at(&a, &b, n)).collect::<Vec<T>>());
        let mut cache = self.rows.write().expect("classical row cache poisoned");
        Arc::clone(cache.entry((i, k)).or_insert(row))
    }

    /// `p(n|i,k)`; 0 for negative or unreachable indices.
    pub fn prob(&self, i: i64, k: i64, n: i64) -> T {
        if i < 0 || k < 0 || n < 0 || n > i + k {
            return T::zero();
        }
        self.row(i as usize, k as usize)[n as usize].clone()
    }

    /// `(1/c) sum_l {p(.|j-l,l) * p(.|i-j+l,k-l)}_n`.
    pub fn split_sum(&self, i: usize, k: usize, n: usize, j: usize) -> Result<T> {
        let c = c_coeff(i, k, j)?;
        let mut acc = T::zero();
        for l in j.saturating_sub(i)..=j.min(k) {
            acc = acc + convolve_at(&self.row(j - l, l), &self.row(i + l - j, k - l), n);
        }
        Ok(acc / T::from_count(&c.into()))
    }

    /// `|p(n|i,k) - split_sum(i,k,n,j)|`.
    pub fn recurrence_check(&self, i: usize, k: usize, n: usize, j: usize) -> Result<T> {
        let split = self.split_sum(i, k, n, j)?;
        Ok((self.prob(i as i64, k as i64, n as i64) - split).abs())
    }

    /// Residual of the `j = 1` form
    /// `2 p(n|i,k) = eta p(n-1|i-1,k) + (1-eta) p(n|i-1,k) + eta p(n|i,k-1) + (1-eta) p(n-1|i,k-1)`,
    /// i.e. the quantum five-term recurrence without its interference term.
    pub fn half_sum_check(&self, i: usize, k: usize, n: usize) -> Result<T> {
        if i == 0 || k == 0 {
            return Err(Error::Domain(format!("half-sum form needs i, k >= 1, got ({i},{k})")));
        }
        let (i, k, n) = (i as i64, k as i64, n as i64);
        let (e, c) = (self.eta.clone(), self.comp.clone());
        let four = e.clone() * self.prob(i - 1, k, n - 1)
            + c.clone() * self.prob(i - 1, k, n)
            + e * self.prob(i, k - 1, n)
            + c * self.prob(i, k - 1, n - 1);
        let two = T::one() + T::one();
        Ok((self.prob(i, k, n) * two.clone() - four).abs() / two)
    }

    /// Largest `|sum_n p(n|i,k) - 1|` over the cached rows.
    pub fn max_row_residual(&self) -> f64 {
        let cache = self.rows.read().expect("classical row cache poisoned");
        cache
            .values()
            .map(|row| {
                let total = row.iter().cloned().fold(T::zero(), |a, b| a + b);
                (total - T::one()).abs().to_f64()
            })
            .fold(0.0, f64::max)
    }
}

/// `p(n|i,k)` in floating point.
pub fn classical_prob(i: usize, k: usize, n: usize, p: &BeamSplitterParam) -> f64 {
    let t = ClassicalTable::<f64>::new(p).expect("f64 weights always exist");
    t.prob(i as i64, k as i64, n as i64)
}

/// `|p(n|i,k) - (1/c) sum_l {p * p}_n|` in floating point.
pub fn classical_recurrence_check(i: usize, k: usize, n: usize, j: usize, p: &BeamSplitterParam) -> Result<f64> {
    ClassicalTable::<f64>::new(p)?.recurrence_check(i, k, n, j)
}

/// Residual of the `j = 1` half-sum form in floating point.
pub fn classical_half_sum_check(i: usize, k: usize, n: usize, p: &BeamSplitterParam) -> Result<f64> {
    ClassicalTable::<f64>::new(p)?.half_sum_check(i, k, n)
}
