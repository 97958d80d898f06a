//! Polytropic equation of state `p(rho) = rho^gamma`, `gamma >= 1`.
//!
//! The specific internal energy follows the closure `rho^2 eps'(rho) = p(rho)`
//! with zero integration constant, so `eps = rho^(gamma-1) / (gamma-1)` for
//! `gamma > 1` and `eps = ln rho` for the isothermal law.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasLaw {
    gamma: f64,
}

impl GasLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.p(rho))
    }

    pub fn internal_energy(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.eps(rho))
    }

    /// `rho eps(rho) + rho |v|^2 / 2`.
    pub fn energy_density(&self, rho: f64, speed_sq: f64) -> Result<f64> {
        check_density(rho)?;
        if !(speed_sq >= 0.0) || !speed_sq.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "squared speed must be finite and nonnegative, got {speed_sq}"
            )));
        }
        Ok(self.energy(rho, speed_sq))
    }

    /// `p'(rho) = gamma rho^(gamma-1)`.
    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.dp(rho))
    }

    // Unchecked kernels. Callers guarantee rho > 0.

    #[inline]
    pub(crate) fn p(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            rho
        } else if self.gamma == 2.0 {
            rho * rho
        } else {
            rho.powf(self.gamma)
        }
    }

    #[inline]
    pub(crate) fn dp(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            1.0
        } else {
            self.gamma * rho.powf(self.gamma - 1.0)
        }
    }

    #[inline]
    pub(crate) fn eps(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            rho.ln()
        } else {
            rho.powf(self.gamma - 1.0) / (self.gamma - 1.0)
        }
    }

    #[inline]
    pub(crate) fn energy(&self, rho: f64, speed_sq: f64) -> f64 {
        rho * self.eps(rho) + 0.5 * rho * speed_sq
    }

    #[inline]
    pub(crate) fn sound_speed(&self, rho: f64) -> f64 {
        self.dp(rho).sqrt()
    }
}

pub(crate) fn check_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDensity(rho))
    }
}
