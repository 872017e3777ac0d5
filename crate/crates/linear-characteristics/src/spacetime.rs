//! Assembly of the weighted space-time estimate from a finished run: six
//! measured norms (two amplitude suprema, four dissipation-type time
//! integrals), the initial-data bracket they are controlled by, and the
//! implied stability constant.

use crate::solve::LinearSeries;
use serde::{Deserialize, Serialize};
use spectral_core::weighted_norm;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpacetimeError {
    #[error("weight exponent {requested} does not match the run's {stored}")]
    WeightMismatch { requested: f64, stored: f64 },
    #[error("series holds fewer than two samples")]
    TooShort,
}

/// Measured space-time norms for one run. The vorticity/current terms carry
/// their rate prefactors (1, nu^{1/2}, nu^{1/6}); the temperature terms
/// carry theirs (1, eta^{1/2}, eta^{1/6}) but not the common block factor
/// nu^{-4} (nu eta)^{-1/6}, which enters only `lhs_total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeReport {
    pub b: f64,
    pub sup_lam_wj: f64,
    pub l2_grad_lam_wj: f64,
    pub l2_dx13_lam_wj: f64,
    pub sup_dx13_lam_theta: f64,
    pub l2_grad_dx13_lam_theta: f64,
    pub l2_dx23_lam_theta: f64,
    pub lhs_total: f64,
    pub rhs_bracket: f64,
    /// lhs / rhs; None when the run started from zero data.
    pub measured_c: Option<f64>,
}

fn sup(vals: impl Iterator<Item = f64>) -> f64 {
    vals.fold(0.0, f64::max)
}

/// sqrt of the trapezoid integral of the squared track.
fn l2_time(times: &[f64], vals: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        acc += 0.5 * (vals[i] * vals[i] + vals[i - 1] * vals[i - 1]) * dt;
    }
    acc.sqrt()
}

pub fn spacetime_norms(series: &LinearSeries, b: f64) -> Result<SpacetimeReport, SpacetimeError> {
    let stored = series.params.b;
    if b != stored {
        return Err(SpacetimeError::WeightMismatch { requested: b, stored });
    }
    if series.weighted.len() < 2 {
        return Err(SpacetimeError::TooShort);
    }
    let nu = series.rates.nu;
    let eta = series.rates.eta;
    let times = &series.times;
    let w = &series.weighted;
    let pick = |f: fn(&crate::solve::WeightedSample) -> f64| -> Vec<f64> {
        w.iter().map(f).collect()
    };

    let sup_lam_wj = sup(w.iter().map(|s| s.lam_wj));
    let l2_grad_lam_wj = nu.sqrt() * l2_time(times, &pick(|s| s.grad_lam_wj));
    let l2_dx13_lam_wj = nu.powf(1.0 / 6.0) * l2_time(times, &pick(|s| s.dx13_lam_wj));
    let sup_dx13_lam_theta = sup(w.iter().map(|s| s.dx13_lam_theta));
    let l2_grad_dx13_lam_theta = eta.sqrt() * l2_time(times, &pick(|s| s.grad_dx13_lam_theta));
    let l2_dx23_lam_theta = eta.powf(1.0 / 6.0) * l2_time(times, &pick(|s| s.dx23_lam_theta));

    let block = nu.powi(-4) * (nu * eta).powf(-1.0 / 6.0);
    let lhs_total = sup_lam_wj
        + l2_grad_lam_wj
        + l2_dx13_lam_wj
        + block * (sup_dx13_lam_theta + l2_grad_dx13_lam_theta + l2_dx23_lam_theta);

    let init = &series.snapshots[0];
    let t0 = times[0];
    let wj0 = (weighted_norm(&init.w, t0, b, 0.0).powi(2)
        + weighted_norm(&init.j, t0, b, 0.0).powi(2))
    .sqrt();
    let th0 = weighted_norm(&init.theta, t0, b, 1.0 / 3.0);
    let rhs_bracket = nu.powi(-2) * wj0 + block * th0;

    let measured_c = if rhs_bracket > 0.0 {
        Some(lhs_total / rhs_bracket)
    } else {
        None
    };

    Ok(SpacetimeReport {
        b,
        sup_lam_wj,
        l2_grad_lam_wj,
        l2_dx13_lam_wj,
        sup_dx13_lam_theta,
        l2_grad_dx13_lam_theta,
        l2_dx23_lam_theta,
        lhs_total,
        rhs_bracket,
        measured_c,
    })
}
