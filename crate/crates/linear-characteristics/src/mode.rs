//! Per-mode dynamics along a shear characteristic.
//!
//! Sign convention: physical multiplication by y acts as +i d/dxi on
//! coefficients, so a column at wavenumber k drifts as xi(t) = xi_init - k t.
//! All published checks involve norms and are convention-independent.

use spectral_core::{dissipation_integral, C64};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("the (k, xi) = (0, 0) mean mode is gauge-held constant; no closure for b1 there")]
    MeanModeGauge,
    #[error("rates must be finite and nonnegative, got nu={nu}, mu={mu}, eta={eta}")]
    BadRates { nu: f64, mu: f64, eta: f64 },
}

/// Diffusion rates for the three components. Unlike `PhysParams` this allows
/// zero rates, which exist purely so transport can be validated in isolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub nu: f64,
    pub mu: f64,
    pub eta: f64,
}

impl Rates {
    pub fn new(nu: f64, mu: f64, eta: f64) -> Result<Self, ModeError> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(nu) && ok(mu) && ok(eta) {
            Ok(Self { nu, mu, eta })
        } else {
            Err(ModeError::BadRates { nu, mu, eta })
        }
    }

    /// All-zero rates: pure transport, for solver validation only.
    pub fn zero() -> Self {
        Self { nu: 0.0, mu: 0.0, eta: 0.0 }
    }
}

impl From<&spectral_core::PhysParams> for Rates {
    fn from(p: &spectral_core::PhysParams) -> Self {
        Self { nu: p.nu, mu: p.mu, eta: p.eta }
    }
}

/// Time derivative of (theta, w, j) at instantaneous frequency xi:
///
///   theta' = -eta (xi^2 + k^2) theta
///   w'     = -nu  (xi^2 + k^2) w + i k j + i k theta
///   j'     = -mu  (xi^2 + k^2) j + i k w - (2 k xi / (k^2 + xi^2)) j
///
/// The last term is the magnetic stretching closure b1 = d_y (-Lap)^{-1} j.
pub fn mode_rhs(
    nu: f64,
    mu: f64,
    eta: f64,
    k: i64,
    xi: f64,
    state: [C64; 3],
) -> Result<[C64; 3], ModeError> {
    if k == 0 && xi == 0.0 {
        return Err(ModeError::MeanModeGauge);
    }
    let kf = k as f64;
    let d = xi * xi + kf * kf;
    let ik = C64::new(0.0, kf);
    let [theta, w, j] = state;
    let dtheta = -eta * d * theta;
    let dw = -nu * d * w + ik * j + ik * theta;
    let dj = -mu * d * j + ik * w - (2.0 * kf * xi / d) * j;
    Ok([dtheta, dw, dj])
}

/// One mode evolved along its characteristic. `xi_init` is the moving-frame
/// frequency (constant); the instantaneous frequency is xi_init - k t.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCharacteristic {
    pub k: i64,
    pub xi_init: f64,
    pub state: [C64; 3],
    pub t: f64,
}

impl ModeCharacteristic {
    pub fn new(k: i64, xi_init: f64, state: [C64; 3]) -> Self {
        Self { k, xi_init, state, t: 0.0 }
    }

    /// Instantaneous frequency at the mode's current time.
    pub fn xi(&self) -> f64 {
        self.xi_init - self.k as f64 * self.t
    }

    /// Advance to `self.t + dt` with `substeps` equal substeps.
    pub fn advance(&mut self, rates: Rates, dt: f64, substeps: usize) {
        assert!(substeps > 0 && dt >= 0.0);
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            let (next, _err) = lawson_substep(rates, self.k, self.xi(), h, self.state);
            self.state = next;
            self.t += h;
        }
    }
}

/// One integrating-factor RK4 substep of length `h` from instantaneous
/// frequency `xi0` (so xi(tau) = xi0 - k tau on the substep).
///
/// The substitution z = diag(e^{r_c g(tau)}) x with g(tau) the accumulated
/// characteristic dissipation integral removes the stiff diagonal exactly;
/// the transformed generator keeps only the bounded couplings
///
///   z_w' = i k e^{(nu-eta) g} z_theta + i k e^{(nu-mu) g} z_j
///   z_j' = i k e^{(mu-nu) g} z_w - (2 k xi / (k^2 + xi^2)) z_j
///
/// and z_theta' = 0, so the theta update never reads w or j. Returns the new
/// state and a relative local-error estimate (RK4 against the embedded
/// midpoint value).
pub(crate) fn lawson_substep(
    rates: Rates,
    k: i64,
    xi0: f64,
    h: f64,
    state: [C64; 3],
) -> ([C64; 3], f64) {
    let Rates { nu, mu, eta } = rates;
    if k == 0 {
        // Pure heat modes: exact.
        let d = xi0 * xi0;
        let out = [
            state[0] * (-eta * d * h).exp(),
            state[1] * (-nu * d * h).exp(),
            state[2] * (-mu * d * h).exp(),
        ];
        return (out, 0.0);
    }
    let kf = k as f64;
    let g_half = dissipation_integral(k, xi0, 0.0, 0.5 * h);
    let g_full = dissipation_integral(k, xi0, 0.0, h);

    let sigma = |tau: f64| {
        let xi = xi0 - kf * tau;
        -2.0 * kf * xi / (kf * kf + xi * xi)
    };
    // Stage factors e^{(a-b) g(tau)}; collapse to 1 when the rates agree.
    let cross = |a: f64, b: f64, g: f64| if a == b { 1.0 } else { ((a - b) * g).exp() };

    let apply = |f_wt: f64, f_wj: f64, s: f64, z: &[C64; 3]| -> [C64; 3] {
        let ik = C64::new(0.0, kf);
        [
            C64::new(0.0, 0.0),
            ik * (f_wt * z[0] + f_wj * z[2]),
            ik * (z[1] / f_wj) + s * z[2],
        ]
    };

    let b0 = (1.0, 1.0, sigma(0.0));
    let bh = (
        cross(nu, eta, g_half),
        cross(nu, mu, g_half),
        sigma(0.5 * h),
    );
    let bf = (cross(nu, eta, g_full), cross(nu, mu, g_full), sigma(h));

    let zip = |z: &[C64; 3], s: f64, d: &[C64; 3]| -> [C64; 3] {
        [z[0] + s * d[0], z[1] + s * d[1], z[2] + s * d[2]]
    };

    let z0 = state;
    let k1 = apply(b0.0, b0.1, b0.2, &z0);
    let k2 = apply(bh.0, bh.1, bh.2, &zip(&z0, 0.5 * h, &k1));
    let k3 = apply(bh.0, bh.1, bh.2, &zip(&z0, 0.5 * h, &k2));
    let k4 = apply(bf.0, bf.1, bf.2, &zip(&z0, h, &k3));

    let sixth = h / 6.0;
    let z_rk4 = [
        z0[0] + sixth * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
        z0[1] + sixth * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        z0[2] + sixth * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2]),
    ];
    // Embedded midpoint solution for the error estimate.
    let z_mid = zip(&z0, h, &k2);
    let diff = (0..3)
        .map(|i| (z_rk4[i] - z_mid[i]).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = (0..3)
        .map(|i| z_rk4[i].norm_sqr().max(z0[i].norm_sqr()))
        .sum::<f64>()
        .sqrt();
    let err = if scale > 0.0 { diff / scale } else { 0.0 };

    // Undo the substitution: multiply by the exact decay factors.
    let out = [
        z_rk4[0] * (-eta * g_full).exp(),
        z_rk4[1] * (-nu * g_full).exp(),
        z_rk4[2] * (-mu * g_full).exp(),
    ];
    (out, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_update_never_reads_w_or_j() {
        let rates = Rates::new(0.3, 0.3, 0.6).unwrap();
        let base = [C64::new(0.4, -0.2), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let loud = [C64::new(0.4, -0.2), C64::new(9.0, 3.0), C64::new(-7.0, 1.0)];
        let (a, _) = lawson_substep(rates, 3, 1.7, 0.01, base);
        let (b, _) = lawson_substep(rates, 3, 1.7, 0.01, loud);
        // Bit-identical, not merely close.
        assert_eq!(a[0], b[0]);
    }

    #[test]
    fn substep_matches_rhs_to_first_order() {
        let rates = Rates::new(0.2, 0.35, 0.5, ).unwrap();
        let state = [C64::new(0.5, 0.1), C64::new(-0.3, 0.2), C64::new(0.1, 0.9)];
        let h = 1e-6;
        let (stepped, _) = lawson_substep(rates, 2, -0.8, h, state);
        let rhs = mode_rhs(rates.nu, rates.mu, rates.eta, 2, -0.8, state).unwrap();
        for i in 0..3 {
            let taylor = state[i] + h * rhs[i];
            assert!(
                (stepped[i] - taylor).norm() < 1e-11 * state[i].norm().max(1.0),
                "component {i} mismatch"
            );
        }
    }

    #[test]
    fn error_estimate_tracks_step_size() {
        let rates = Rates::new(0.1, 0.1, 0.2).unwrap();
        let state = [C64::new(0.5, 0.1), C64::new(-0.3, 0.2), C64::new(0.1, 0.9)];
        let (_, e_big) = lawson_substep(rates, 4, 0.3, 0.1, state);
        let (_, e_small) = lawson_substep(rates, 4, 0.3, 0.0125, state);
        assert!(e_big > 100.0 * e_small, "e_big={e_big:.3e} e_small={e_small:.3e}");
    }

    #[test]
    fn rates_reject_negative_or_nan() {
        assert!(Rates::new(-0.1, 0.2, 0.3).is_err());
        assert!(Rates::new(0.1, f64::NAN, 0.3).is_err());
        assert!(Rates::new(0.0, 0.0, 0.0).is_ok());
    }
}
