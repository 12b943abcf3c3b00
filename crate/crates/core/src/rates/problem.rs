use serde::{Deserialize, Serialize};

use super::window::DeltaWindow;
use crate::error::{Error, Result};
use crate::pathcore::{PotentialModel, ThermoParams};
use crate::surfaces::{SurfaceSpec, DEFAULT_PHI_FLOOR};

/// Log-weight above which `exp(beta g_P^2 / 2 m P)` counts as divergent.
pub const DEFAULT_LOG_WEIGHT_GUARD: f64 = 700.0;

/// Everything that defines one `k Z_a` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProblem {
    pub params: ThermoParams,
    pub potential: PotentialModel,
    /// Surface and dividing value `d`.
    pub surface: SurfaceSpec,
    pub window: DeltaWindow,
    pub log_weight_guard: f64,
    pub phi_floor: f64,
}

impl RateProblem {
    pub fn new(params: ThermoParams, potential: PotentialModel, surface: SurfaceSpec) -> Self {
        Self {
            params,
            potential,
            surface,
            window: DeltaWindow::default(),
            log_weight_guard: DEFAULT_LOG_WEIGHT_GUARD,
            phi_floor: DEFAULT_PHI_FLOOR,
        }
    }

    pub fn with_beads(&self, p: usize) -> Result<Self> {
        Ok(Self {
            params: self.params.with_beads(p)?,
            ..self.clone()
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.surface.validate(self.params.beads(), self.phi_floor)?;
        self.window.validate()?;
        if !(self.log_weight_guard.is_finite() && self.log_weight_guard > 0.0) {
            return Err(Error::invalid("log_weight_guard", "must be finite and > 0"));
        }
        Ok(())
    }

    /// `sqrt(P / (2 pi m beta))`.
    pub fn prefactor(&self) -> f64 {
        let t = &self.params;
        (t.beads() as f64 / (std::f64::consts::TAU * t.mass() * t.beta())).sqrt()
    }

    /// `P / (2 pi hbar beta)`, the prefactor in front of the `eta_0`
    /// integral.
    pub fn ha_prefactor(&self) -> f64 {
        let t = &self.params;
        t.beads() as f64 / (std::f64::consts::TAU * t.hbar() * t.beta())
    }

    /// Coefficient `a` in `f = a * centroid + h(internal)`; the sampling
    /// back ends need it.
    pub fn centroid_coefficient(&self) -> Result<f64> {
        let a = self
            .surface
            .centroid_coefficient(self.params.beads())
            .ok_or_else(|| {
                Error::Unsupported(
                    "surface is not linear in the centroid (Fourier mode 0 or P)".into(),
                )
            })?;
        if a == 0.0 {
            return Err(Error::Unsupported(
                "surface does not depend on the centroid".into(),
            ));
        }
        Ok(a)
    }

    /// Default `sigma_f = |a| hbar sqrt(beta / m)`.
    pub fn default_sigma_f(&self) -> Result<f64> {
        Ok(self.centroid_coefficient()?.abs() * self.params.thermal_length())
    }

    pub fn absolute_widths(&self) -> Result<Vec<f64>> {
        Ok(self.window.absolute(self.default_sigma_f()?))
    }
}
