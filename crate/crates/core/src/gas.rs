//! Equation of state.

use crate::{Error, Result};

/// Pressure and its partial derivatives at `(ρ, e)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureEval {
    pub p: f64,
    /// `∂P/∂ρ` at fixed `e`
    pub p_rho: f64,
    /// `∂P/∂e` at fixed `ρ`
    pub p_e: f64,
}

/// A gas law `P = P(ρ, e)`.
pub trait GasModel: Send + Sync {
    fn pressure(&self, rho: f64, e: f64) -> Result<PressureEval>;

    /// `c = √(P P_e + ρ² P_ρ) / ρ`, valid for any `P(ρ, e)`.
    fn sound_speed(&self, rho: f64, e: f64) -> Result<f64> {
        sound_speed_from(rho, &self.pressure(rho, e)?)
    }
}

/// Sound speed from an already evaluated pressure.
#[inline]
pub fn sound_speed_from(rho: f64, pe: &PressureEval) -> Result<f64> {
    let radicand = pe.p * pe.p_e + rho * rho * pe.p_rho;
    if !(radicand > 0.0) {
        return Err(Error::InvalidState(format!(
            "non-positive sound-speed radicand {radicand:e} at rho = {rho}"
        )));
    }
    Ok(radicand.sqrt() / rho)
}

/// `P = (γ − 1) ρ e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealGas {
    gamma: f64,
}

impl IdealGas {
    pub const DEFAULT_GAMMA: f64 = 1.4;

    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `√(γP/ρ)`
    pub fn sound_speed_ideal(&self, rho: f64, e: f64) -> Result<f64> {
        let p = self.pressure(rho, e)?.p;
        Ok((self.gamma * p / rho).sqrt())
    }

    /// Specific internal energy for a given pressure and density.
    pub fn energy_from_pressure(&self, rho: f64, p: f64) -> f64 {
        p / ((self.gamma - 1.0) * rho)
    }
}

impl Default for IdealGas {
    fn default() -> Self {
        Self {
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}

impl GasModel for IdealGas {
    #[inline]
    fn pressure(&self, rho: f64, e: f64) -> Result<PressureEval> {
        if !(rho > 0.0 && e > 0.0) {
            return Err(Error::InvalidState(format!(
                "non-positive density or internal energy (rho = {rho}, e = {e})"
            )));
        }
        let gm1 = self.gamma - 1.0;
        Ok(PressureEval {
            p: gm1 * rho * e,
            p_rho: gm1 * e,
            p_e: gm1 * rho,
        })
    }
}
