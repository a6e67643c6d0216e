//! Fock-basis transition amplitudes and probabilities of the two-mode beam
//! splitter and two-mode squeezer, computed by independent routes and
//! cross-checked against an exact rational oracle.

pub mod amplitudes;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod genfun;
pub mod numerics;
pub mod parallel;
pub mod params;
pub mod probabilities;
pub mod recurrences;

pub use error::{Error, Result};
