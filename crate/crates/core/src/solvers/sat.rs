use crate::error::{FsbpError, Result};

const RELATION_TOL: f64 = 1e-14;

/// Penalty weights of the three-term interface SATs (jump, derivative jump,
/// adjoint `D1ᵀ e` jump) at the left and right end of each block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SatCoefficients {
    pub sigma1_l: f64,
    pub sigma2_l: f64,
    pub sigma3_l: f64,
    pub sigma1_r: f64,
    pub sigma2_r: f64,
    pub sigma3_r: f64,
    pub a: f64,
    pub eps: f64,
}

impl SatCoefficients {
    /// The stable family fixed by the two free parameters `σ1R ≤ a/2`
    /// and `σ2R`.
    pub fn new(a: f64, eps: f64, sigma1_r: f64, sigma2_r: f64) -> Result<Self> {
        let sats = Self {
            sigma1_l: sigma1_r - a,
            sigma2_l: eps + sigma2_r,
            sigma3_l: -sigma2_r,
            sigma1_r,
            sigma2_r,
            sigma3_r: -eps - sigma2_r,
            a,
            eps,
        };
        sats.validate()?;
        Ok(sats)
    }

    /// `σ1R = 0`, `σ2R = −ε/2`.
    pub fn standard(a: f64, eps: f64) -> Result<Self> {
        Self::new(a, eps, 0.0, -eps / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let scale = 1.0 + self.a.abs() + self.eps.abs();
        let checks = [
            ("σ1L = σ1R − a", self.sigma1_l - (self.sigma1_r - self.a)),
            ("σ2L = ε + σ2R", self.sigma2_l - (self.eps + self.sigma2_r)),
            ("σ3R = −ε − σ2R", self.sigma3_r - (-self.eps - self.sigma2_r)),
            ("σ3L = −σ2R", self.sigma3_l + self.sigma2_r),
        ];
        for (name, defect) in checks {
            if !(defect.abs() <= RELATION_TOL * scale) {
                return Err(FsbpError::InvalidSat(format!("{name} violated by {defect:e}")));
            }
        }
        if !(self.sigma1_r <= self.a / 2.0 + RELATION_TOL * scale) {
            return Err(FsbpError::InvalidSat(format!("σ1R = {} exceeds a/2 = {}", self.sigma1_r, self.a / 2.0)));
        }
        if !(self.eps >= 0.0) {
            return Err(FsbpError::InvalidSat(format!("diffusivity must be nonnegative, got {}", self.eps)));
        }
        Ok(())
    }
}
