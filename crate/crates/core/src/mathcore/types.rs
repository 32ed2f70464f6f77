use std::fmt;

use crate::error::{Error, Result};

/// A probability in `[0, 1]`. NaN is rejected.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    /// Clamps a computed value into `[0, 1]`. Panics on NaN, which always
    /// indicates a bug upstream.
    pub(crate) fn clamped(value: f64) -> Self {
        assert!(!value.is_nan(), "NaN probability");
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// A nonnegative linear power ratio.
///
/// The library works in linear units throughout; decibel views exist for the
/// configuration boundary.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Snr(f64);

impl Snr {
    pub fn new(linear: f64) -> Result<Self> {
        if linear >= 0.0 && !linear.is_nan() {
            Ok(Snr(linear))
        } else {
            Err(Error::domain(format!("SNR {linear} must be nonnegative")))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if db.is_nan() {
            return Err(Error::domain("SNR in dB is NaN"));
        }
        Snr::new(10f64.powf(db / 10.0))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }

    pub fn scaled(self, factor: f64) -> Result<Self> {
        Snr::new(self.0 * factor)
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:.3} dB)", self.0, self.db())
    }
}
