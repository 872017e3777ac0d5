use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::C64;
use ndarray::Array2;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Planned 2D transforms between spectral coefficients and physical samples.
///
/// Both directions carry the unitary `1/sqrt(nx*ny)` factor, so
/// `sum |fhat|^2 * cell_measure` equals the physical Riemann sum
/// `sum |f(x_i,y_j)|^2 * cell_measure` (a resolution-independent stand-in for
/// the continuum L2 integral). Physical samples of a field with coefficients
/// `fhat` are `f(x_i, y_j) = (nx*ny)^{-1/2} sum fhat e^{i(k x_i + xi y_j)}`.
/// Fields representing real scalars come back with imaginary parts at
/// roundoff level.
pub struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx: grid.nx,
            ny: grid.ny,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
        }
    }

    fn apply_rows(fft: &Arc<dyn Fft<f64>>, data: &mut Array2<C64>) {
        // Axis 1 is contiguous in the standard layout: the whole array is one
        // batch of row transforms.
        let slice = data.as_slice_mut().expect("standard layout");
        fft.process(slice);
    }

    /// Column transforms via transpose, batched FFT, and scaled write-back,
    /// so the length-nx passes run on contiguous memory and the unitary
    /// normalization costs no extra sweep.
    fn apply_cols_scaled(
        fft: &Arc<dyn Fft<f64>>,
        data: &mut Array2<C64>,
        nx: usize,
        ny: usize,
        scale: f64,
    ) {
        let slice = data.as_slice_mut().expect("standard layout");
        let mut t = vec![C64::new(0.0, 0.0); nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                t[j * nx + i] = slice[i * ny + j];
            }
        }
        fft.process(&mut t);
        for i in 0..nx {
            for j in 0..ny {
                slice[i * ny + j] = t[j * nx + i] * scale;
            }
        }
    }

    /// Spectral coefficients -> physical samples on the `(x_i, y_j)` grid.
    pub fn to_physical(&self, f: &SpectralField) -> Array2<C64> {
        let mut data = f.coef.clone();
        self.inverse_inplace(&mut data);
        data
    }

    /// Physical samples -> spectral coefficients.
    pub fn to_spectral(&self, grid: GridSpec, samples: &Array2<C64>) -> SpectralField {
        let mut data = samples.clone();
        self.forward_inplace(&mut data);
        SpectralField::from_coef(grid, data)
    }

    /// In-place spectral -> physical, including the unitary scale. Lets a
    /// caller that packs two real fields into one complex array (one in the
    /// real parts, one shifted to the imaginary parts) transform both at the
    /// price of one pass.
    pub fn inverse_inplace(&self, data: &mut Array2<C64>) {
        assert_eq!(data.dim(), (self.nx, self.ny));
        let scale = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        Self::apply_rows(&self.inv_y, data);
        Self::apply_cols_scaled(&self.inv_x, data, self.nx, self.ny, scale);
    }

    /// In-place physical -> spectral, including the unitary scale.
    pub fn forward_inplace(&self, data: &mut Array2<C64>) {
        assert_eq!(data.dim(), (self.nx, self.ny));
        let scale = 1.0 / ((self.nx * self.ny) as f64).sqrt();
        Self::apply_rows(&self.fwd_y, data);
        Self::apply_cols_scaled(&self.fwd_x, data, self.nx, self.ny, scale);
    }
}
