//! Device parameters and Fock index tuples.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ExactRational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    Bs,
    Tms,
}

impl Device {
    pub fn label(self) -> &'static str {
        match self {
            Device::Bs => "bs",
            Device::Tms => "tms",
        }
    }
}

impl fmt::Display for Device {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Input photons `(i, k)` in modes a and b, output `n` in mode a. The second
/// output index is fixed by the device: `m = i+k-n` for the beam splitter
/// (photon number is conserved) and `m = n+k-i` for the squeezer (the
/// difference is conserved).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhotonConfig {
    pub i: usize,
    pub k: usize,
    pub n: usize,
    pub device: Device,
}

impl PhotonConfig {
    pub fn bs(i: usize, k: usize, n: usize) -> Self {
        Self { i, k, n, device: Device::Bs }
    }

    pub fn tms(i: usize, k: usize, n: usize) -> Self {
        Self { i, k, n, device: Device::Tms }
    }

    pub fn m(&self) -> i64 {
        let (i, k, n) = (self.i as i64, self.k as i64, self.n as i64);
        match self.device {
            Device::Bs => i + k - n,
            Device::Tms => n + k - i,
        }
    }

    pub fn reachable(&self) -> bool {
        self.m() >= 0
    }

    pub(crate) fn expect(&self, device: Device) -> Result<()> {
        if self.device == device {
            Ok(())
        } else {
            Err(Error::DeviceMismatch { expected: device, found: self.device })
        }
    }
}

/// Parse a parameter literal: a decimal, or `p/q` which also sets the exact carrier.
fn parse_literal(s: &str) -> Result<(f64, Option<ExactRational>)> {
    let s = s.trim();
    if s.contains('/') || (!s.is_empty() && s.bytes().all(|b| b.is_ascii_digit() || b == b'-' || b == b'+')) {
        let exact: ExactRational = s.parse()?;
        return Ok((exact.to_f64(), Some(exact)));
    }
    let value: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
    Ok((value, None))
}

/// Beam splitter of transmittance `eta = cos^2(theta)`.
///
/// Carries `1 - eta` separately so that a splitter obtained from a squeezer
/// by time reversal keeps `lambda` exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamSplitterParam {
    eta: f64,
    complement: f64,
    exact: Option<ExactRational>,
}

impl BeamSplitterParam {
    pub fn new(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, complement: 1.0 - eta, exact: None })
    }

    pub fn exact(eta: ExactRational) -> Result<Self> {
        let real = eta.to_f64();
        check_eta(real)?;
        if eta.is_negative() || eta.one_minus().is_negative() {
            return Err(invalid("eta", &eta, "transmittance must lie in [0, 1]"));
        }
        let complement = eta.one_minus().to_f64();
        Ok(Self { eta: real, complement, exact: Some(eta) })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn one_minus_eta(&self) -> f64 {
        self.complement
    }

    pub fn exact_eta(&self) -> Option<&ExactRational> {
        self.exact.as_ref()
    }

    pub fn theta(&self) -> f64 {
        self.eta.sqrt().acos()
    }

    /// `(eta, 1 - eta)` in the requested scalar.
    pub fn weights<T: Scalar>(&self) -> Result<(T, T)> {
        let eta = T::from_carrier(self.eta, self.exact.as_ref())?;
        let comp = T::from_carrier(self.complement, self.exact.as_ref().map(|e| e.one_minus()).as_ref())?;
        Ok((eta, comp))
    }

    /// The splitter with `eta = 1 - lambda` that the squeezer maps onto under
    /// partial time reversal.
    pub fn time_reversed(sq: &SqueezerParam) -> Self {
        Self {
            eta: 1.0 - sq.lambda,
            complement: sq.lambda,
            exact: sq.exact.as_ref().map(|l| l.one_minus()),
        }
    }
}

impl FromStr for BeamSplitterParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match parse_literal(s)? {
            (_, Some(exact)) => Self::exact(exact),
            (real, None) => Self::new(real),
        }
    }
}

impl fmt::Display for BeamSplitterParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "{}", self.eta),
        }
    }
}

/// Two-mode squeezer with `lambda = tanh^2(r)` and gain `G = 1/(1 - lambda)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqueezerParam {
    lambda: f64,
    exact: Option<ExactRational>,
}

impl SqueezerParam {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { lambda, exact: None })
    }

    pub fn exact(lambda: ExactRational) -> Result<Self> {
        if lambda.is_negative() || lambda.one_minus() <= ExactRational::zero() {
            return Err(invalid("lambda", &lambda, "squeezing parameter must lie in [0, 1)"));
        }
        let real = lambda.to_f64();
        check_lambda(real)?;
        Ok(Self { lambda: real, exact: Some(lambda) })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn exact_lambda(&self) -> Option<&ExactRational> {
        self.exact.as_ref()
    }

    pub fn r(&self) -> f64 {
        self.lambda.sqrt().atanh()
    }

    pub fn gain(&self) -> f64 {
        1.0 / (1.0 - self.lambda)
    }

    /// `(lambda, 1 - lambda)` in the requested scalar.
    pub fn weights<T: Scalar>(&self) -> Result<(T, T)> {
        let lambda = T::from_carrier(self.lambda, self.exact.as_ref())?;
        let comp = T::from_carrier(1.0 - self.lambda, self.exact.as_ref().map(|e| e.one_minus()).as_ref())?;
        Ok((lambda, comp))
    }
}

impl FromStr for SqueezerParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match parse_literal(s)? {
            (_, Some(exact)) => Self::exact(exact),
            (real, None) => Self::new(real),
        }
    }
}

impl fmt::Display for SqueezerParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "{}", self.lambda),
        }
    }
}

/// Either device's parameter, tagged.
#[derive(Clone, Debug, PartialEq)]
pub enum DeviceParam {
    Bs(BeamSplitterParam),
    Tms(SqueezerParam),
}

impl DeviceParam {
    pub fn device(&self) -> Device {
        match self {
            DeviceParam::Bs(_) => Device::Bs,
            DeviceParam::Tms(_) => Device::Tms,
        }
    }

    pub fn exact(&self) -> Option<&ExactRational> {
        match self {
            DeviceParam::Bs(p) => p.exact_eta(),
            DeviceParam::Tms(p) => p.exact_lambda(),
        }
    }
}

impl From<BeamSplitterParam> for DeviceParam {
    fn from(p: BeamSplitterParam) -> Self {
        DeviceParam::Bs(p)
    }
}

impl From<SqueezerParam> for DeviceParam {
    fn from(p: SqueezerParam) -> Self {
        DeviceParam::Tms(p)
    }
}

impl fmt::Display for DeviceParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeviceParam::Bs(p) => p.fmt(f),
            DeviceParam::Tms(p) => p.fmt(f),
        }
    }
}

fn invalid(name: &'static str, value: &dyn fmt::Display, reason: &'static str) -> Error {
    Error::InvalidParameter { name, value: value.to_string(), reason }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(invalid("eta", &eta, "transmittance must lie in [0, 1]"))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(invalid("lambda", &lambda, "squeezing parameter must lie in [0, 1)"))
    }
}
