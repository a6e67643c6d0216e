//! Closed-form generating functions of the amplitudes (`g`) and
//! probabilities (`f`), plus truncated-series checks against the tables.
//!
//! `g` sums `<n,m|U|i,k> x^i y^k z^n w^m / sqrt(i! k! n! m!)` and is entire.
//! `f` sums `|<n,m|U|i,k>|^2 x^i y^k z^n w^m`; it is a rational function whose
//! series has nonnegative coefficients, so for nonnegative coordinates the
//! series converges exactly when the denominator stays positive along the
//! ray from the origin to the point (Pringsheim). That is the domain test
//! used here, with coordinates restricted to `[0, 1]`.

use crate::amplitudes::bs_amplitude;
use crate::error::{Error, Result};
use crate::numerics::log_factorial;
use crate::parallel::Execution;
use crate::params::{BeamSplitterParam, DeviceParam, PhotonConfig, SqueezerParam};
use crate::recurrences::{bs_diagonal_recurrence, bs_table_recurrence, ProbabilityTable};

/// Series truncation target and hard cap on the truncation order.
pub const SERIES_TAIL_TARGET: f64 = 1e-10;
pub const SERIES_MAX_ORDER: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenFunPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl GenFunPoint {
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    /// Whether the probability series of the given device converges here.
    pub fn in_domain(&self, p: &DeviceParam) -> bool {
        self.coords().iter().all(|c| (0.0..=1.0).contains(c)) && ray_positive(quadratic_part(self, p), self.x * self.y * self.z * self.w)
    }
}

/// The `t^2` coefficient `a` of the denominator `1 - a t^2 + b t^4` at `t v`.
fn quadratic_part(pt: &GenFunPoint, p: &DeviceParam) -> f64 {
    let GenFunPoint { x, y, z, w } = *pt;
    match p {
        DeviceParam::Bs(p) => {
            let (e, c) = (p.eta(), p.one_minus_eta());
            e * x * z + c * x * w + e * y * w + c * y * z
        }
        DeviceParam::Tms(p) => {
            let (l, c) = (p.lambda(), 1.0 - p.lambda());
            c * x * z + l * x * y + c * y * w + l * w * z
        }
    }
}

/// `min_{s in [0,1]} 1 - a s + b s^2 > 0`.
fn ray_positive(a: f64, b: f64) -> bool {
    let at = |s: f64| 1.0 - a * s + b * s * s;
    let mut lowest = at(1.0);
    if b > 0.0 {
        let vertex = a / (2.0 * b);
        if vertex > 0.0 && vertex < 1.0 {
            lowest = lowest.min(at(vertex));
        }
    }
    lowest > 0.0
}

fn domain_error(pt: &GenFunPoint, p: &DeviceParam) -> Error {
    Error::Domain(format!(
        "({}, {}, {}, {}) is outside the convergence domain of f for {} at {}",
        pt.x,
        pt.y,
        pt.z,
        pt.w,
        p.device(),
        p
    ))
}

/// `exp(sqrt(eta)(xz + yw) + sqrt(1-eta)(yz - xw))`.
pub fn eval_g_bs(pt: &GenFunPoint, p: &BeamSplitterParam) -> f64 {
    let GenFunPoint { x, y, z, w } = *pt;
    (p.eta().sqrt() * (x * z + y * w) + p.one_minus_eta().sqrt() * (y * z - x * w)).exp()
}

/// `sqrt(1-lambda) exp(sqrt(1-lambda)(xz + yw) + sqrt(lambda)(zw - xy))`.
pub fn eval_g_tms(pt: &GenFunPoint, p: &SqueezerParam) -> f64 {
    let GenFunPoint { x, y, z, w } = *pt;
    let c = (1.0 - p.lambda()).sqrt();
    c * (c * (x * z + y * w) + p.lambda().sqrt() * (z * w - x * y)).exp()
}

/// `1 / (1 - eta xz - (1-eta) xw - eta yw - (1-eta) yz + xyzw)`.
pub fn eval_f_bs(pt: &GenFunPoint, p: &BeamSplitterParam) -> Result<f64> {
    let dp = DeviceParam::Bs(p.clone());
    if !pt.in_domain(&dp) {
        return Err(domain_error(pt, &dp));
    }
    Ok(1.0 / (1.0 - quadratic_part(pt, &dp) + pt.x * pt.y * pt.z * pt.w))
}

/// `(1-lambda) / (1 - (1-lambda) xz - lambda xy - (1-lambda) yw - lambda wz + xyzw)`.
pub fn eval_f_tms(pt: &GenFunPoint, p: &SqueezerParam) -> Result<f64> {
    let dp = DeviceParam::Tms(p.clone());
    if !pt.in_domain(&dp) {
        return Err(domain_error(pt, &dp));
    }
    Ok((1.0 - p.lambda()) / (1.0 - quadratic_part(pt, &dp) + pt.x * pt.y * pt.z * pt.w))
}

/// `f` of either device.
pub fn eval_f(pt: &GenFunPoint, p: &DeviceParam) -> Result<f64> {
    match p {
        DeviceParam::Bs(p) => eval_f_bs(pt, p),
        DeviceParam::Tms(p) => eval_f_tms(pt, p),
    }
}

/// `sum_{i,k,n} B^{(i,k)}_n x^i y^k z^n`: the beam splitter `f` at `w = 1`.
pub fn f_bs_w1(x: f64, y: f64, z: f64, p: &BeamSplitterParam) -> Result<f64> {
    eval_f_bs(&GenFunPoint::new(x, y, z, 1.0), p)
}

/// `|f(v) - f(scaled v)|` under the scaling that leaves the device's
/// conserved quantity unchanged: `(tx, ty, z/t, w/t)` for the beam splitter,
/// `(tx, y/t, z/t, tw)` for the squeezer. Any monomial `x^i y^k z^n w^m`
/// with `i + m = n + k` is invariant under the latter; leaving `w` unscaled
/// is not an identity.
pub fn check_energy_scaling(pt: &GenFunPoint, t: f64, p: &DeviceParam) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("scale factor must be positive, got {t}")));
    }
    let GenFunPoint { x, y, z, w } = *pt;
    let scaled = match p {
        DeviceParam::Bs(_) => GenFunPoint::new(t * x, t * y, z / t, w / t),
        DeviceParam::Tms(_) => GenFunPoint::new(t * x, y / t, z / t, t * w),
    };
    Ok((eval_f(pt, p)? - eval_f(&scaled, p)?).abs())
}

/// Closed form of `sum_{i,n} B^{(i,i)}_n x^i z^n`:
/// `1 / sqrt((1 + xz)^2 - 4 (eta + (1-eta) z)(x (1-eta) + eta x z))`.
pub fn diagonal_gf_bs(x: f64, z: f64, p: &BeamSplitterParam) -> Result<f64> {
    let (e, c) = (p.eta(), p.one_minus_eta());
    let radicand = (1.0 + x * z).powi(2) - 4.0 * (e + c * z) * (x * c + e * x * z);
    if radicand.is_nan() || radicand <= 0.0 {
        return Err(Error::Domain(format!("diagonal generating function radicand {radicand} at x = {x}, z = {z}")));
    }
    Ok(1.0 / radicand.sqrt())
}

/// A truncated series compared with its closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesCheck {
    pub closed: f64,
    pub series: f64,
    /// Truncation order actually used.
    pub order: usize,
    /// Bound on the omitted tail.
    pub tail_bound: f64,
    /// Whether the tail bound reached [`SERIES_TAIL_TARGET`] within [`SERIES_MAX_ORDER`].
    pub converged: bool,
}

impl SeriesCheck {
    pub fn difference(&self) -> f64 {
        (self.closed - self.series).abs()
    }
}

/// Smallest order `M <= SERIES_MAX_ORDER` whose tail bound meets the target,
/// or the cap with `converged = false`.
fn choose_order(tail: impl Fn(usize) -> f64) -> (usize, f64, bool) {
    for m in 0..=SERIES_MAX_ORDER {
        let b = tail(m);
        if b < SERIES_TAIL_TARGET {
            return (m, b, true);
        }
    }
    (SERIES_MAX_ORDER, tail(SERIES_MAX_ORDER), false)
}

/// `sum_{N > m} (N+1) r^N`.
fn weighted_geometric_tail(r: f64, m: usize) -> f64 {
    if r >= 1.0 {
        return f64::INFINITY;
    }
    let q = 1.0 - r;
    r.powi(m as i32 + 1) * ((m as f64 + 2.0) / q + r / (q * q))
}

/// Series of `g_BS` over inputs with `i + k <= order` (total degree `2 order`).
///
/// Terms of input shell `N` are bounded by `R^{2N} (N+1) 2^N / N!` with
/// `R` the largest coordinate magnitude, since `|b| <= 1` and by
/// Cauchy-Schwarz `sum_{i+k=N} 1/sqrt(i! k!) <= sqrt((N+1) 2^N / N!)`.
pub fn g_bs_series(pt: &GenFunPoint, p: &BeamSplitterParam, order: Option<usize>) -> Result<SeriesCheck> {
    let r = pt.coords().iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let shell_bound = |n: usize| -> f64 {
        let n_f = n as f64;
        (2.0 * n_f * r.ln() + (n_f + 1.0).ln() + n_f * std::f64::consts::LN_2 - log_factorial(n as u64)).exp()
    };
    let tail = |m: usize| -> f64 {
        let mut total = 0.0;
        let mut n = m + 1;
        loop {
            let t = shell_bound(n);
            total += t;
            // shell bounds decrease geometrically once N+1 > 2 R^2 (N+2)/(N+1)
            if n > m + 4 && t < 1e-18 * total.max(1e-300) || n > m + 400 {
                break;
            }
            n += 1;
        }
        total
    };
    let (order, tail_bound, converged) = match order {
        Some(m) => (m, tail(m), tail(m) < SERIES_TAIL_TARGET),
        None => choose_order(tail),
    };
    let GenFunPoint { x, y, z, w } = *pt;
    let mut series = 0.0;
    for i in 0..=order {
        for k in 0..=order - i {
            for n in 0..=i + k {
                let m = i + k - n;
                let amp = bs_amplitude(&PhotonConfig::bs(i, k, n), p)?.value();
                if amp == 0.0 {
                    continue;
                }
                let norm = (0.5 * (log_factorial(i as u64) + log_factorial(k as u64) + log_factorial(n as u64) + log_factorial(m as u64))).exp();
                series += amp * x.powi(i as i32) * y.powi(k as i32) * z.powi(n as i32) * w.powi(m as i32) / norm;
            }
        }
    }
    Ok(SeriesCheck { closed: eval_g_bs(pt, p), series, order, tail_bound, converged })
}

/// Series of `f_BS(x, y, z, 1)` from the recurrence table, over `i + k <= order`.
///
/// With `z <= 1` each input shell contributes at most `(N+1) max(x,y)^N`.
pub fn f_bs_w1_series(x: f64, y: f64, z: f64, p: &BeamSplitterParam, order: Option<usize>) -> Result<SeriesCheck> {
    let closed = f_bs_w1(x, y, z, p)?;
    let r = x.max(y);
    let (order, tail_bound, converged) = match order {
        Some(m) => (m, weighted_geometric_tail(r, m), weighted_geometric_tail(r, m) < SERIES_TAIL_TARGET),
        None => choose_order(|m| weighted_geometric_tail(r, m)),
    };
    let table: ProbabilityTable<f64> = bs_table_recurrence(order, order, p)?;
    let mut series = 0.0;
    for e in table.entries().filter(|e| e.i + e.k <= order) {
        series += e.value * x.powi(e.i as i32) * y.powi(e.k as i32) * z.powi(e.n as i32);
    }
    Ok(SeriesCheck { closed, series, order, tail_bound, converged })
}

/// Series of the diagonal generating function over `i <= order`, for
/// `0 <= x < 1` and `0 <= z <= 1`; row `i` contributes at most `x^i`.
pub fn diagonal_series(x: f64, z: f64, p: &BeamSplitterParam, order: Option<usize>) -> Result<SeriesCheck> {
    if !((0.0..1.0).contains(&x) && (0.0..=1.0).contains(&z)) {
        return Err(Error::Domain(format!("diagonal series needs 0 <= x < 1 and 0 <= z <= 1, got ({x}, {z})")));
    }
    let closed = diagonal_gf_bs(x, z, p)?;
    let tail = |m: usize| x.powi(m as i32 + 1) / (1.0 - x);
    let (order, tail_bound, converged) = match order {
        Some(m) => (m, tail(m), tail(m) < SERIES_TAIL_TARGET),
        None => choose_order(tail),
    };
    let rows: Vec<Vec<f64>> = bs_diagonal_recurrence(order, p, Execution::default())?;
    let mut series = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let inner: f64 = row.iter().enumerate().map(|(n, b)| b * z.powi(n as i32)).sum();
        series += inner * x.powi(i as i32);
    }
    Ok(SeriesCheck { closed, series, order, tail_bound, converged })
}
