//! Scalar kernels for the univariate and bivariate standard normal
//! distribution.

#![allow(clippy::excessive_precision)]

mod bivariate;
mod normal;

pub use bivariate::{bvn_cdf, frechet_bounds, solve_bvn_correlation};
pub use normal::{std_normal_cdf, std_normal_cdf_both, std_normal_inv_cdf, std_normal_pdf};

use crate::error::{Error, Result};

/// A probability in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::ProbabilityDomain(value))
        }
    }

    /// Accepts only the open interval (0, 1).
    pub fn interior(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::ProbabilityDomain(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// A correlation coefficient in [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(value: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::CorrelationDomain(value))
        }
    }

    /// Clamps into [−1, 1]; the flag reports whether clamping changed the value.
    pub fn clamped(value: f64) -> (Self, bool) {
        let c = value.clamp(-1.0, 1.0);
        (Self(c), c != value)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}
