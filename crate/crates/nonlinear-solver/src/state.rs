use spectral_core::{biot_savart, GridSpec, PhysParams, SpectralField};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("component fields must share one grid")]
    GridMismatch,
    #[error("state contains non-finite coefficients")]
    NonFinite,
    #[error("reality symmetry violated by {err:.3e} at amplitude {amp:.3e}")]
    RealityViolated { err: f64, amp: f64 },
}

/// Vorticity, current density, and temperature at one instant. The velocity
/// and magnetic field are derived on demand, never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub w: SpectralField,
    pub j: SpectralField,
    pub theta: SpectralField,
    pub t: f64,
    pub params: PhysParams,
}

impl SystemState {
    pub fn new(
        w: SpectralField,
        j: SpectralField,
        theta: SpectralField,
        t: f64,
        params: PhysParams,
    ) -> Result<Self, StateError> {
        let state = Self { w, j, theta, t, params };
        state.validate()?;
        Ok(state)
    }

    pub fn zeros(grid: GridSpec, params: PhysParams) -> Self {
        Self {
            w: SpectralField::zeros(grid),
            j: SpectralField::zeros(grid),
            theta: SpectralField::zeros(grid),
            t: 0.0,
            params,
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.w.grid
    }

    pub fn validate(&self) -> Result<(), StateError> {
        if self.j.grid != self.w.grid || self.theta.grid != self.w.grid {
            return Err(StateError::GridMismatch);
        }
        if !(self.w.is_finite() && self.j.is_finite() && self.theta.is_finite() && self.t.is_finite())
        {
            return Err(StateError::NonFinite);
        }
        let amp = self.max_amplitude();
        let err = self
            .w
            .reality_error()
            .max(self.j.reality_error())
            .max(self.theta.reality_error());
        if err > 1e-8 * (1.0 + amp) {
            return Err(StateError::RealityViolated { err, amp });
        }
        Ok(())
    }

    /// Largest coefficient magnitude over all three components.
    pub fn max_amplitude(&self) -> f64 {
        self.w.max_abs().max(self.j.max_abs()).max(self.theta.max_abs())
    }

    /// Velocity from the vorticity; exactly divergence-free by construction.
    pub fn materialized_velocity(&self) -> (SpectralField, SpectralField) {
        biot_savart(&self.w)
    }

    /// Magnetic field from the current density; exactly divergence-free.
    pub fn materialized_magnetic(&self) -> (SpectralField, SpectralField) {
        biot_savart(&self.j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::C64;

    fn grid() -> GridSpec {
        GridSpec::new(8, 8, 16.0 * std::f64::consts::PI, true).unwrap()
    }

    fn params() -> PhysParams {
        PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap()
    }

    #[test]
    fn rejects_mismatched_grids() {
        let other = GridSpec::new(8, 16, 16.0 * std::f64::consts::PI, true).unwrap();
        let r = SystemState::new(
            SpectralField::zeros(grid()),
            SpectralField::zeros(other),
            SpectralField::zeros(grid()),
            0.0,
            params(),
        );
        assert_eq!(r.unwrap_err(), StateError::GridMismatch);
    }

    #[test]
    fn rejects_broken_reality() {
        let mut w = SpectralField::zeros(grid());
        w.set_mode(1, 2, C64::new(1.0, 1.0)); // no mirror partner set
        let r = SystemState::new(
            w,
            SpectralField::zeros(grid()),
            SpectralField::zeros(grid()),
            0.0,
            params(),
        );
        assert!(matches!(r, Err(StateError::RealityViolated { .. })));
    }

    #[test]
    fn rejects_non_finite() {
        let mut th = SpectralField::zeros(grid());
        th.set_mode(0, 1, C64::new(f64::NAN, 0.0));
        let r = SystemState::new(
            SpectralField::zeros(grid()),
            SpectralField::zeros(grid()),
            th,
            0.0,
            params(),
        );
        assert_eq!(r.unwrap_err(), StateError::NonFinite);
    }
}
