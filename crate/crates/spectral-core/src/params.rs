/// Errors raised when validating [`PhysParams`].
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ParamError {
    #[error("diffusivities must lie in (0, 1], got nu={nu}, mu={mu}, eta={eta}")]
    OutOfRange { nu: f64, mu: f64, eta: f64 },
    #[error("linear checks need nu = mu <= eta <= 1, got nu={nu}, mu={mu}, eta={eta}")]
    LinearRegime { nu: f64, mu: f64, eta: f64 },
    #[error("nonlinear checks need nu = mu = eta, got nu={nu}, mu={mu}, eta={eta}")]
    NonlinearRegime { nu: f64, mu: f64, eta: f64 },
}

/// Physical parameters: viscosity, magnetic diffusivity, thermal diffusivity,
/// and the weight exponent `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    pub nu: f64,
    pub mu: f64,
    pub eta: f64,
    pub b: f64,
}

impl PhysParams {
    pub fn new(nu: f64, mu: f64, eta: f64, b: f64) -> Result<Self, ParamError> {
        let ok = |v: f64| v.is_finite() && v > 0.0 && v <= 1.0;
        if !(ok(nu) && ok(mu) && ok(eta) && b.is_finite()) {
            return Err(ParamError::OutOfRange { nu, mu, eta });
        }
        Ok(Self { nu, mu, eta, b })
    }

    /// Regime for the per-mode decay checks: nu = mu <= eta <= 1.
    pub fn require_linear_regime(&self) -> Result<(), ParamError> {
        if self.nu == self.mu && self.mu <= self.eta && self.eta <= 1.0 {
            Ok(())
        } else {
            Err(ParamError::LinearRegime { nu: self.nu, mu: self.mu, eta: self.eta })
        }
    }

    /// Regime for the full-system runs: nu = mu = eta.
    pub fn require_nonlinear_regime(&self) -> Result<(), ParamError> {
        if self.nu == self.mu && self.mu == self.eta {
            Ok(())
        } else {
            Err(ParamError::NonlinearRegime { nu: self.nu, mu: self.mu, eta: self.eta })
        }
    }

    /// Uniform-diffusivity constructor used by the nonlinear solver.
    pub fn uniform(nu: f64, b: f64) -> Result<Self, ParamError> {
        Self::new(nu, nu, nu, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regime_checks() {
        let p = PhysParams::new(0.5, 0.5, 1.0, 1.1).unwrap();
        assert!(p.require_linear_regime().is_ok());
        assert!(p.require_nonlinear_regime().is_err());
        let q = PhysParams::uniform(0.5, 1.1).unwrap();
        assert!(q.require_nonlinear_regime().is_ok());
        assert!(PhysParams::new(0.0, 0.5, 1.0, 1.0).is_err());
        assert!(PhysParams::new(0.5, 0.5, 1.5, 1.0).is_err());
    }
}
