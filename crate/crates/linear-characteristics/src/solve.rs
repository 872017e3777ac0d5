//! Grid-level integration: every column advances along its characteristics
//! in macro steps of length dxi, after which the accumulated frequency drift
//! is exactly one slot spacing per unit wavenumber and the column is realigned
//! by an integer index shift (out-of-band content is dropped, vacated slots
//! are zero-filled). Norms and weighted norms are sampled at every realigned
//! time, where grid labels equal instantaneous frequencies.

use crate::fits::NormKind;
use crate::mode::{lawson_substep, Rates};
use crate::state::LinearState;
use serde::{Deserialize, Serialize};
use spectral_core::{lambda_symbol, GridSpec, C64};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("t_max must be positive and finite, got {0}")]
    BadTMax(f64),
    #[error("dt must be positive and finite, got {0}")]
    BadDt(f64),
    #[error("substep at t = {t} (k = {k}) rejected: local error {err:.3e} > tol {tol:.3e}")]
    StepRejected { t: f64, k: i64, err: f64, tol: f64 },
    #[error("non-finite values at t = {t}")]
    NonFinite { t: f64 },
}

/// Spec-default step: min(0.01, 0.1 / (nu xi_max^2)) with a 0.9 safety factor.
pub fn default_dt(nu: f64, grid: GridSpec) -> f64 {
    let cap = 0.1 / (nu * grid.xi_max() * grid.xi_max());
    cap.min(0.01) * 0.9
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Keep a full snapshot every this many macro steps (0 = auto: ~8 evenly
    /// spaced). The initial and final states are always kept.
    pub snapshot_stride: usize,
    /// Relative per-substep local-error tolerance before rejection.
    pub reject_tol: f64,
    /// Validation hook: integrate with these rates instead of the params'
    /// (allows the all-zero pure-transport configuration).
    pub rates_override: Option<Rates>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { snapshot_stride: 0, reject_tol: 1e-4, rates_override: None }
    }
}

/// Per-column norms at one sample time: plain, (w,j) pair, and the
/// xi-weighted first and second y-derivative variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeNorms {
    pub theta: Vec<f64>,
    pub wj: Vec<f64>,
    pub dy_theta: Vec<f64>,
    pub dy_wj: Vec<f64>,
    pub dy2_theta: Vec<f64>,
    pub dy2_wj: Vec<f64>,
}

/// Weighted norms entering the space-time estimate, sampled at one time.
/// Lam is the moving-frame weight of exponent b = params.b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub t: f64,
    /// ||(Lam w, Lam j)||
    pub lam_wj: f64,
    /// ||(grad Lam w, grad Lam j)||
    pub grad_lam_wj: f64,
    /// || |Dx|^{1/3} (Lam w, Lam j) ||
    pub dx13_lam_wj: f64,
    /// || |Dx|^{1/3} Lam theta ||
    pub dx13_lam_theta: f64,
    /// || grad |Dx|^{1/3} Lam theta ||
    pub grad_dx13_lam_theta: f64,
    /// || |Dx|^{2/3} Lam theta ||
    pub dx23_lam_theta: f64,
}

/// Output of a linear run: sample times, per-column norm tracks, weighted
/// samples, and a sparse set of full snapshots (always including first/last).
#[derive(Debug, Clone)]
pub struct LinearSeries {
    pub grid: GridSpec,
    pub params: spectral_core::PhysParams,
    pub rates: Rates,
    pub times: Vec<f64>,
    pub norms: Vec<ModeNorms>,
    pub weighted: Vec<WeightedSample>,
    pub snapshots: Vec<LinearState>,
    pub dt_requested: f64,
    pub macro_step: f64,
}

impl LinearSeries {
    /// Norm track for column k; None if k is off-grid or the kind's
    /// derivative order is not stored (orders 0..=2).
    pub fn norm_track(&self, k: i64, kind: NormKind) -> Option<Vec<f64>> {
        let i = self.grid.index_of_k(k)?;
        let pick = |n: &ModeNorms| -> Option<f64> {
            Some(match kind {
                NormKind::Theta | NormKind::DyTheta(0) => n.theta[i],
                NormKind::Wj | NormKind::DyWj(0) => n.wj[i],
                NormKind::DyTheta(1) => n.dy_theta[i],
                NormKind::DyWj(1) => n.dy_wj[i],
                NormKind::DyTheta(2) => n.dy2_theta[i],
                NormKind::DyWj(2) => n.dy2_wj[i],
                _ => return None,
            })
        };
        self.norms.iter().map(pick).collect()
    }

    /// Columns with any initial content.
    pub fn populated_ks(&self) -> Vec<i64> {
        self.snapshots[0].populated_ks()
    }
}

pub fn integrate_spectrum(
    init: &LinearState,
    t_max: f64,
    dt: f64,
) -> Result<LinearSeries, SolveError> {
    integrate_spectrum_with(init, t_max, dt, &RunOptions::default())
}

pub fn integrate_spectrum_with(
    init: &LinearState,
    t_max: f64,
    dt: f64,
    opts: &RunOptions,
) -> Result<LinearSeries, SolveError> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(SolveError::BadTMax(t_max));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SolveError::BadDt(dt));
    }
    let grid = init.grid();
    let rates = opts.rates_override.unwrap_or_else(|| Rates::from(&init.params));
    let tau = grid.dxi();
    let n_macro = ((t_max / tau) - 1e-9).ceil().max(1.0) as usize;
    let stride = if opts.snapshot_stride == 0 {
        (n_macro / 8).max(1)
    } else {
        opts.snapshot_stride
    };

    let mut state = init.clone();
    let mut series = LinearSeries {
        grid,
        params: init.params,
        rates,
        times: Vec::with_capacity(n_macro + 1),
        norms: Vec::with_capacity(n_macro + 1),
        weighted: Vec::with_capacity(n_macro + 1),
        snapshots: Vec::new(),
        dt_requested: dt,
        macro_step: tau,
    };
    sample(&mut series, &state);
    series.snapshots.push(state.clone());

    let mut col_old = vec![C64::new(0.0, 0.0); grid.ny];
    for step in 1..=n_macro {
        let t_start = init.t + (step - 1) as f64 * tau;
        for i in 0..grid.nx {
            let k = grid.k_of(i);
            advance_column(&mut state, i, k, rates, tau, dt, t_start, opts, &mut col_old)?;
        }
        state.t = init.t + step as f64 * tau;
        if !state.is_finite() {
            return Err(SolveError::NonFinite { t: state.t });
        }
        sample(&mut series, &state);
        if step % stride == 0 || step == n_macro {
            series.snapshots.push(state.clone());
        }
    }
    Ok(series)
}

/// Advance one column by a full macro step, then realign by k slots.
#[allow(clippy::too_many_arguments)]
fn advance_column(
    state: &mut LinearState,
    i: usize,
    k: i64,
    rates: Rates,
    tau: f64,
    dt: f64,
    t_start: f64,
    opts: &RunOptions,
    col_old: &mut [C64],
) -> Result<(), SolveError> {
    let grid = state.grid();
    let ny = grid.ny;
    if k == 0 {
        // No drift: exact heat factors over the whole macro step.
        for j in 0..ny {
            let d = grid.xi_of(j).powi(2);
            state.theta.coef[[i, j]] *= (-rates.eta * d * tau).exp();
            state.w.coef[[i, j]] *= (-rates.nu * d * tau).exp();
            state.j.coef[[i, j]] *= (-rates.mu * d * tau).exp();
        }
        return Ok(());
    }

    let n_sub = ((tau / dt).ceil() as usize).max(13).max(8 * k.unsigned_abs() as usize);
    let h = tau / n_sub as f64;
    for j in 0..ny {
        let mut z = [
            state.theta.coef[[i, j]],
            state.w.coef[[i, j]],
            state.j.coef[[i, j]],
        ];
        if z.iter().all(|v| v.norm_sqr() == 0.0) {
            continue;
        }
        let xi_label = grid.xi_of(j);
        for s in 0..n_sub {
            let xi_here = xi_label - k as f64 * (s as f64 * h);
            let (next, err) = lawson_substep(rates, k, xi_here, h, z);
            if err > opts.reject_tol {
                return Err(SolveError::StepRejected {
                    t: t_start + s as f64 * h,
                    k,
                    err,
                    tol: opts.reject_tol,
                });
            }
            z = next;
        }
        state.theta.coef[[i, j]] = z[0];
        state.w.coef[[i, j]] = z[1];
        state.j.coef[[i, j]] = z[2];
    }

    // Realign: content carried from label m now sits at frequency (m - k) dxi.
    for f in [&mut state.theta, &mut state.w, &mut state.j] {
        for (j, slot) in col_old.iter_mut().enumerate() {
            *slot = f.coef[[i, j]];
        }
        for j in 0..ny {
            let m = grid.m_of(j);
            f.coef[[i, j]] = match grid.index_of_m(m + k) {
                Some(src) => col_old[src],
                None => C64::new(0.0, 0.0),
            };
        }
    }
    Ok(())
}

/// Push per-column norms and the weighted sample for the current state.
fn sample(series: &mut LinearSeries, state: &LinearState) {
    let grid = series.grid;
    let cell = grid.cell_measure();
    let b = series.params.b;
    let t = state.t;
    let nx = grid.nx;
    let mut n = ModeNorms {
        theta: vec![0.0; nx],
        wj: vec![0.0; nx],
        dy_theta: vec![0.0; nx],
        dy_wj: vec![0.0; nx],
        dy2_theta: vec![0.0; nx],
        dy2_wj: vec![0.0; nx],
    };
    let mut w = WeightedSample {
        t,
        lam_wj: 0.0,
        grad_lam_wj: 0.0,
        dx13_lam_wj: 0.0,
        dx13_lam_theta: 0.0,
        grad_dx13_lam_theta: 0.0,
        dx23_lam_theta: 0.0,
    };
    for i in 0..nx {
        let k = grid.k_of(i);
        let kf = k as f64;
        let k13 = if k == 0 { 0.0 } else { kf.abs().cbrt() };
        let k23 = k13 * k13;
        let k43 = k23 * k23;
        for jj in 0..grid.ny {
            let xi = grid.xi_of(jj);
            let xi2 = xi * xi;
            let grad2 = xi2 + kf * kf;
            let th2 = state.theta.coef[[i, jj]].norm_sqr();
            let wj2 = state.w.coef[[i, jj]].norm_sqr() + state.j.coef[[i, jj]].norm_sqr();
            n.theta[i] += th2;
            n.wj[i] += wj2;
            n.dy_theta[i] += xi2 * th2;
            n.dy_wj[i] += xi2 * wj2;
            n.dy2_theta[i] += xi2 * xi2 * th2;
            n.dy2_wj[i] += xi2 * xi2 * wj2;

            let lam = lambda_symbol(t, b, k, xi);
            let lam2 = lam * lam;
            w.lam_wj += lam2 * wj2;
            w.grad_lam_wj += grad2 * lam2 * wj2;
            w.dx13_lam_wj += k23 * lam2 * wj2;
            w.dx13_lam_theta += k23 * lam2 * th2;
            w.grad_dx13_lam_theta += grad2 * k23 * lam2 * th2;
            w.dx23_lam_theta += k43 * lam2 * th2;
        }
    }
    let fin = |v: &mut f64| *v = (*v * cell).sqrt();
    for i in 0..nx {
        fin(&mut n.theta[i]);
        fin(&mut n.wj[i]);
        fin(&mut n.dy_theta[i]);
        fin(&mut n.dy_wj[i]);
        fin(&mut n.dy2_theta[i]);
        fin(&mut n.dy2_wj[i]);
    }
    fin(&mut w.lam_wj);
    fin(&mut w.grad_lam_wj);
    fin(&mut w.dx13_lam_wj);
    fin(&mut w.dx13_lam_theta);
    fin(&mut w.grad_dx13_lam_theta);
    fin(&mut w.dx23_lam_theta);
    series.times.push(t);
    series.norms.push(n);
    series.weighted.push(w);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::localized_random_state;
    use spectral_core::PhysParams;

    fn grid() -> GridSpec {
        GridSpec::new(6, 64, 16.0 * std::f64::consts::PI, true).unwrap()
    }

    #[test]
    fn run_covers_t_max_with_whole_macro_steps() {
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let st = localized_random_state(grid(), params, &[1], 6, 3);
        let series = integrate_spectrum(&st, 0.3, 1e-2).unwrap();
        let tau = grid().dxi();
        assert_eq!(series.times.len(), 4); // 0, tau, 2 tau, 3 tau
        let last = *series.times.last().unwrap();
        assert!(last >= 0.3 && (last - 3.0 * tau).abs() < 1e-12);
        assert_eq!(series.snapshots.first().unwrap().t, 0.0);
        assert_eq!(series.snapshots.last().unwrap().t, last);
    }

    #[test]
    fn mean_mode_is_held_constant() {
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let mut st = LinearState::zeros(grid(), params);
        st.theta.set_mode(0, 0, C64::new(0.7, 0.0));
        st.w.set_mode(0, 0, C64::new(-0.2, 0.0));
        let series = integrate_spectrum(&st, 0.5, 1e-2).unwrap();
        let last = series.snapshots.last().unwrap();
        assert_eq!(last.theta.mode(0, 0), C64::new(0.7, 0.0));
        assert_eq!(last.w.mode(0, 0), C64::new(-0.2, 0.0));
    }

    #[test]
    fn reality_is_preserved() {
        let params = PhysParams::new(0.3, 0.3, 0.5, 1.1).unwrap();
        let st = localized_random_state(grid(), params, &[1, 2], 8, 11);
        let series = integrate_spectrum(&st, 1.0, 1e-2).unwrap();
        let last = series.snapshots.last().unwrap();
        assert!(last.theta.reality_error() < 1e-12);
        assert!(last.w.reality_error() < 1e-12);
        assert!(last.j.reality_error() < 1e-12);
    }

    #[test]
    fn tiny_reject_tolerance_raises_step_rejection() {
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let st = localized_random_state(grid(), params, &[2], 6, 5);
        let opts = RunOptions { reject_tol: 1e-16, ..RunOptions::default() };
        let err = integrate_spectrum_with(&st, 0.5, 1e-2, &opts).unwrap_err();
        assert!(matches!(err, SolveError::StepRejected { .. }));
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let params = PhysParams::new(0.5, 0.5, 0.5, 1.1).unwrap();
        let st = LinearState::zeros(grid(), params);
        assert!(matches!(
            integrate_spectrum(&st, -1.0, 1e-2),
            Err(SolveError::BadTMax(_))
        ));
        assert!(matches!(
            integrate_spectrum(&st, 1.0, 0.0),
            Err(SolveError::BadDt(_))
        ));
    }
}
