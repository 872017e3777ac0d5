use crate::checkpoint::{save_checkpoint, CheckpointError};
use crate::engine::NlEngine;
use crate::state::{StateError, SystemState};
use crate::stepper::{step, StepError, StepOptions};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spectral_core::{weighted_norm, GridError, GridSpec, ParamError, PhysParams, SpectralField, C64};
use std::path::PathBuf;
use thiserror::Error;

fn default_ly() -> f64 {
    GridSpec::default_ly()
}

fn default_stride() -> usize {
    1
}

/// Full description of a nonlinear run. Deserializes directly from the
/// harness config file; every field without a default must be present.
///
/// `eps` together with the exponents `alpha`, `beta`, `delta` sizes the
/// initial data: the temperature is scaled so both its plain weighted norm
/// and its extra-third-derivative norm sit at `eps * nu^alpha` resp.
/// `eps * nu^delta` (whichever binds), and the vorticity/current pair
/// jointly at `eps * nu^beta`. `eps = 0` requests the exact zero state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub nu: f64,
    pub b: f64,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default = "default_ly")]
    pub ly: f64,
    pub t_max: f64,
    /// Requested substep size; the stepper's own floors still apply.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Diagnostic overrides. The nonlinear system is only run with a single
    /// dissipation rate, so these must equal `nu` when given; they exist so
    /// a config that tries to split the rates fails loudly instead of
    /// silently running something else.
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    /// Record every n-th macro interval (the initial state is always kept).
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    /// Write a checkpoint every n-th macro interval; 0 disables.
    #[serde(default)]
    pub checkpoint_stride: usize,
    #[serde(default)]
    pub checkpoint_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("the nonlinear system runs with a single dissipation rate; overrides gave nu = {nu}, mu = {mu}, eta = {eta}")]
    MismatchedDissipation { nu: f64, mu: f64, eta: f64 },
    #[error("bad run configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One recorded instant of a run: the weighted norms the stability statement
/// tracks, evaluated with the time-moving weight, plus stepper diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub t: f64,
    /// Weighted norm of the temperature.
    pub theta_norm: f64,
    /// Weighted norm of the temperature with the extra `|D_x|^{1/3}` factor.
    pub theta_dx_norm: f64,
    /// Joint weighted norm of vorticity and current.
    pub wj_norm: f64,
    pub max_amplitude: f64,
    pub dt: f64,
    pub cfl: f64,
    pub dealias_energy_removed: f64,
}

/// Where a run aborted and why; the last finite state is dumped next to the
/// checkpoints when a checkpoint directory is configured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceEvent {
    pub t: f64,
    pub detail: String,
    pub dump: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub samples: Vec<SampleRow>,
    pub divergence: Option<DivergenceEvent>,
    /// Macro intervals actually completed.
    pub macro_steps: usize,
    pub dealias_energy_removed: f64,
    pub final_state: SystemState,
}

/// Observer fed every recorded sample as the run produces it.
pub trait TrajectorySink {
    fn on_sample(&mut self, state: &SystemState, row: &SampleRow);
}

/// Sink that drops everything; the summary still collects the rows.
pub struct NullSink;

impl TrajectorySink for NullSink {
    fn on_sample(&mut self, _state: &SystemState, _row: &SampleRow) {}
}

impl RunConfig {
    fn validate(&self) -> Result<(), RunError> {
        let bad = |msg: String| Err(RunError::BadConfig(msg));
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return bad(format!("eps must be finite and nonnegative, got {}", self.eps));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return bad(format!("t_max must be positive, got {}", self.t_max));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.delta.is_finite()) {
            return bad("scaling exponents must be finite".to_string());
        }
        if let Some(d) = self.dt {
            if !(d.is_finite() && d > 0.0) {
                return bad(format!("dt must be positive when given, got {d}"));
            }
        }
        if self.sample_stride == 0 {
            return bad("sample_stride must be at least 1".to_string());
        }
        Ok(())
    }

    fn params(&self) -> Result<PhysParams, RunError> {
        let mu = self.mu.unwrap_or(self.nu);
        let eta = self.eta.unwrap_or(self.nu);
        let p = PhysParams::new(self.nu, mu, eta, self.b)?;
        if p.require_nonlinear_regime().is_err() {
            return Err(RunError::MismatchedDissipation { nu: self.nu, mu, eta });
        }
        Ok(p)
    }
}

/// Draw one coherent y-localized packet per streamwise wavenumber: a random
/// complex amplitude under a Gaussian envelope in `xi` (width drawn from
/// [2, 3]) recentred near the channel midline by a random shift within
/// `ly/16`. Localization keeps the data comfortably inside the periodic
/// truncation; the envelope keeps it resolved.
fn seeded_field(grid: GridSpec, rng: &mut ChaCha8Rng) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    let kmax = grid.kmax_dealiased().clamp(1, 4);
    let m_cap = ((grid.ny / 3) as i64 - 1).clamp(1, 32);
    for k in 0..=kmax {
        let sigma: f64 = rng.gen_range(2.0..3.0);
        let yc: f64 = rng.gen_range(-grid.ly / 16.0..grid.ly / 16.0);
        let amp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for m in -m_cap..=m_cap {
            if k == 0 && m <= 0 {
                continue;
            }
            let xi = m as f64 * grid.dxi();
            let envelope = (-0.5 * (xi * sigma).powi(2)).exp();
            let phase = C64::new(0.0, -xi * yc).exp();
            f.set_mode(k, m, amp * envelope * phase);
        }
    }
    f.enforce_reality();
    f.apply_dealias_mask();
    f
}

/// Build the scaled initial state for a config. Separate from `run` so the
/// starting norms can be inspected directly.
pub fn initial_state(cfg: &RunConfig) -> Result<SystemState, RunError> {
    cfg.validate()?;
    let grid = GridSpec::new(cfg.nx, cfg.ny, cfg.ly, true)?;
    let params = cfg.params()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w_raw = seeded_field(grid, &mut rng);
    let j_raw = seeded_field(grid, &mut rng);
    let th_raw = seeded_field(grid, &mut rng);

    let th_plain = weighted_norm(&th_raw, 0.0, params.b, 0.0);
    let th_dx = weighted_norm(&th_raw, 0.0, params.b, 1.0 / 3.0);
    let wj = weighted_norm(&w_raw, 0.0, params.b, 0.0).hypot(weighted_norm(&j_raw, 0.0, params.b, 0.0));
    if !(th_plain > 0.0 && th_dx > 0.0 && wj > 0.0) {
        return Err(RunError::BadConfig("seeded fields are degenerate; grid too small".to_string()));
    }

    let (s_th, s_wj) = if cfg.eps == 0.0 {
        (0.0, 0.0)
    } else {
        let s_th =
            (cfg.eps * cfg.nu.powf(cfg.alpha) / th_plain).min(cfg.eps * cfg.nu.powf(cfg.delta) / th_dx);
        (s_th, cfg.eps * cfg.nu.powf(cfg.beta) / wj)
    };

    let state = SystemState::new(
        w_raw.scaled(s_wj),
        j_raw.scaled(s_wj),
        th_raw.scaled(s_th),
        0.0,
        params,
    )?;
    Ok(state)
}

fn sample_row(state: &SystemState, dt: f64, cfl: f64, removed: f64) -> SampleRow {
    let b = state.params.b;
    SampleRow {
        t: state.t,
        theta_norm: weighted_norm(&state.theta, state.t, b, 0.0),
        theta_dx_norm: weighted_norm(&state.theta, state.t, b, 1.0 / 3.0),
        wj_norm: weighted_norm(&state.w, state.t, b, 0.0)
            .hypot(weighted_norm(&state.j, state.t, b, 0.0)),
        max_amplitude: state.max_amplitude(),
        dt,
        cfl,
        dealias_energy_removed: removed,
    }
}

/// Integrate the configured initial data to `t_max`, recording samples and
/// checkpoints on their strides. An instability trip or non-finite blowup
/// does not error out: the run stops, the last finite state is dumped if a
/// checkpoint directory exists, and the event is reported in the summary.
pub fn run(cfg: &RunConfig, sink: &mut dyn TrajectorySink) -> Result<RunSummary, RunError> {
    let mut state = initial_state(cfg)?;
    let grid = state.grid();
    let engine = NlEngine::new(grid);
    let tau = grid.dxi();
    let n_macro = ((cfg.t_max / tau - 1e-9).ceil()).max(1.0) as usize;
    let dt_req = cfg.dt.unwrap_or(tau);
    let opts = StepOptions::default();

    if let Some(dir) = &cfg.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
    }

    let mut samples = Vec::new();
    let mut total_removed = 0.0;
    let mut divergence = None;
    let mut macro_steps = 0usize;

    let row0 = sample_row(&state, 0.0, 0.0, 0.0);
    sink.on_sample(&state, &row0);
    samples.push(row0);
    if cfg.checkpoint_stride > 0 {
        if let Some(dir) = &cfg.checkpoint_dir {
            save_checkpoint(&dir.join("checkpoint_000000.json"), &state)?;
        }
    }

    for idx in 1..=n_macro {
        match step(&engine, &state, dt_req, &opts) {
            Ok((next, stats)) => {
                total_removed += stats.dealias_energy_removed;
                state = next;
                macro_steps += 1;
                if idx % cfg.sample_stride == 0 || idx == n_macro {
                    let row =
                        sample_row(&state, stats.dt, stats.cfl, stats.dealias_energy_removed);
                    sink.on_sample(&state, &row);
                    samples.push(row);
                }
                if cfg.checkpoint_stride > 0 && idx % cfg.checkpoint_stride == 0 {
                    if let Some(dir) = &cfg.checkpoint_dir {
                        save_checkpoint(&dir.join(format!("checkpoint_{idx:06}.json")), &state)?;
                    }
                }
            }
            Err(e @ (StepError::Unstable { .. } | StepError::NonFinite { .. })) => {
                let dump = match &cfg.checkpoint_dir {
                    Some(dir) => {
                        let path = dir.join(format!("diverged_{idx:06}.json"));
                        save_checkpoint(&path, &state)?;
                        Some(path)
                    }
                    None => None,
                };
                divergence = Some(DivergenceEvent { t: state.t, detail: e.to_string(), dump });
                break;
            }
            Err(e) => return Err(RunError::BadConfig(e.to_string())),
        }
    }

    Ok(RunSummary {
        samples,
        divergence,
        macro_steps,
        dealias_energy_removed: total_removed,
        final_state: state,
    })
}
