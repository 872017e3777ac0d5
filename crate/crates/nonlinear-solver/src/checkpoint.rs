use crate::state::{StateError, SystemState};
use serde::{Deserialize, Serialize};
use spectral_core::{GridError, GridSpec, ParamError, PhysParams, SpectralField, C64};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("coefficient array has {got} entries, grid wants {want}")]
    Shape { got: usize, want: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// On-disk snapshot: grid geometry, physical parameters, time, and the three
/// coefficient arrays split into real and imaginary parts, row-major with the
/// streamwise index outermost.
#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    nx: usize,
    ny: usize,
    ly: f64,
    dealias: bool,
    nu: f64,
    mu: f64,
    eta: f64,
    b: f64,
    t: f64,
    w_re: Vec<f64>,
    w_im: Vec<f64>,
    j_re: Vec<f64>,
    j_im: Vec<f64>,
    theta_re: Vec<f64>,
    theta_im: Vec<f64>,
}

fn split(f: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let re = f.coef.iter().map(|c| c.re).collect();
    let im = f.coef.iter().map(|c| c.im).collect();
    (re, im)
}

fn join(grid: GridSpec, re: &[f64], im: &[f64]) -> Result<SpectralField, CheckpointError> {
    let want = grid.nx * grid.ny;
    if re.len() != want || im.len() != want {
        return Err(CheckpointError::Shape { got: re.len().min(im.len()), want });
    }
    let mut f = SpectralField::zeros(grid);
    for (slot, (&a, &b)) in f.coef.iter_mut().zip(re.iter().zip(im)) {
        *slot = C64::new(a, b);
    }
    Ok(f)
}

pub fn save_checkpoint(path: &Path, state: &SystemState) -> Result<(), CheckpointError> {
    let grid = state.grid();
    let (w_re, w_im) = split(&state.w);
    let (j_re, j_im) = split(&state.j);
    let (theta_re, theta_im) = split(&state.theta);
    let snap = Snapshot {
        version: 1,
        nx: grid.nx,
        ny: grid.ny,
        ly: grid.ly,
        dealias: grid.dealias,
        nu: state.params.nu,
        mu: state.params.mu,
        eta: state.params.eta,
        b: state.params.b,
        t: state.t,
        w_re,
        w_im,
        j_re,
        j_im,
        theta_re,
        theta_im,
    };
    let writer = BufWriter::new(File::create(path)?);
    serde_json::to_writer(writer, &snap)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<SystemState, CheckpointError> {
    let reader = BufReader::new(File::open(path)?);
    let snap: Snapshot = serde_json::from_reader(reader)?;
    let grid = GridSpec::new(snap.nx, snap.ny, snap.ly, snap.dealias)?;
    let params = PhysParams::new(snap.nu, snap.mu, snap.eta, snap.b)?;
    let w = join(grid, &snap.w_re, &snap.w_im)?;
    let j = join(grid, &snap.j_re, &snap.j_im)?;
    let theta = join(grid, &snap.theta_re, &snap.theta_im)?;
    Ok(SystemState::new(w, j, theta, snap.t, params)?)
}
