//! Assembled Fourier-multiplier symbols over integer `k` and continuous `xi`.

use crate::phi::phi_profile;
use crate::phi_k::phi_k_with_xi0;
use crate::xi0::solve_xi0;
use spectral_core::PhysParams;
use std::f64::consts::PI;

/// Which weight a [`MultiplierSymbol`] evaluates.
///
/// `MTheta` is the temperature weight (built from the thermal rate), `MPrime`
/// the vorticity/current weight for the linearized runs, `M1`/`M2`/`M3` the
/// three k-dependent parts of the composite weight `MTotal = M1 + M2 + M3 + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    MTheta,
    MPrime,
    M1,
    M2,
    M3,
    MTotal,
}

/// A real even symbol `m(k, xi)` with its analytic `d/dxi`.
///
/// Every kind depends on `k` only through `|k|` and `sgn(k) xi`, vanishes at
/// `k = 0` (except the constant 1 inside `MTotal`), and is nonnegative.
#[derive(Clone, Copy, Debug)]
pub struct MultiplierSymbol {
    pub kind: SymbolKind,
    rate: f64,
}

/// Builds the symbol for `kind`, drawing the rate from `params`: the thermal
/// diffusivity for `MTheta`, the viscosity for every other kind.
pub fn build_symbol(kind: SymbolKind, params: &PhysParams) -> MultiplierSymbol {
    let rate = match kind {
        SymbolKind::MTheta => params.eta,
        _ => params.nu,
    };
    MultiplierSymbol { kind, rate }
}

impl MultiplierSymbol {
    /// The diffusion rate the profile argument is scaled with.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn value(&self, k: i64, xi: f64) -> f64 {
        self.eval(k, xi).0
    }

    pub fn dxi(&self, k: i64, xi: f64) -> f64 {
        self.eval(k, xi).1
    }

    /// `(value, d/dxi)` in one call.
    pub fn eval(&self, k: i64, xi: f64) -> (f64, f64) {
        if k == 0 {
            return match self.kind {
                SymbolKind::MTotal => (1.0, 0.0),
                _ => (0.0, 0.0),
            };
        }
        let xi0 = match self.kind {
            SymbolKind::MTheta | SymbolKind::M1 | SymbolKind::M3 => 0.0,
            _ => solve_xi0(self.rate, k).xi0,
        };
        eval_parts(self.kind, self.rate, k, xi0, xi)
    }
}

/// Shared evaluator; `xi0` is only read by the kinds that need it. Scans that
/// sweep `xi` at fixed `(rate, k)` call this directly with a cached root.
pub(crate) fn eval_parts(
    kind: SymbolKind,
    rate: f64,
    k: i64,
    xi0: f64,
    xi: f64,
) -> (f64, f64) {
    debug_assert!(k != 0);
    let sgn = if k > 0 { 1.0 } else { -1.0 };
    let s = sgn * xi;
    match kind {
        SymbolKind::MTheta | SymbolKind::M1 => scaled_profile(rate, k, sgn, s),
        SymbolKind::M2 => {
            let (v, sl) = phi_k_with_xi0(k, xi0, s);
            (v, sgn * sl)
        }
        SymbolKind::M3 => arctan_part(k, xi),
        SymbolKind::MPrime => {
            let (v1, d1) = scaled_profile(rate, k, sgn, s);
            let (v2, sl2) = phi_k_with_xi0(k, xi0, s);
            (v1 + v2, d1 + sgn * sl2)
        }
        SymbolKind::MTotal => {
            let (v1, d1) = scaled_profile(rate, k, sgn, s);
            let (v2, sl2) = phi_k_with_xi0(k, xi0, s);
            let (v3, d3) = arctan_part(k, xi);
            (v1 + v2 + v3 + 1.0, d1 + sgn * sl2 + d3)
        }
    }
}

/// `phi(rate^{1/3} |k|^{-1/3} sgn(k) xi)` with its chain-rule derivative.
fn scaled_profile(rate: f64, k: i64, sgn: f64, s: f64) -> (f64, f64) {
    let scale = rate.cbrt() / (k.unsigned_abs() as f64).cbrt();
    let (v, p) = phi_profile(scale * s);
    (v, p * scale * sgn)
}

/// `(arctan(xi/k) + pi/2) / k^2`; its `xi`-derivative telescopes to
/// `1 / (k (k^2 + xi^2))`, so `k * dxi` is exactly `1 / (k^2 + xi^2)`.
fn arctan_part(k: i64, xi: f64) -> (f64, f64) {
    let kf = k as f64;
    let kk = kf * kf;
    (((xi / kf).atan() + PI / 2.0) / kk, 1.0 / (kf * (kk + xi * xi)))
}
