use crate::grid::GridSpec;
use crate::C64;
use ndarray::Array2;

/// Complex Fourier coefficients of a scalar field, indexed `[k-index, xi-index]`
/// in FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coef: Array2<C64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coef: Array2::zeros((grid.nx, grid.ny)) }
    }

    pub fn from_coef(grid: GridSpec, coef: Array2<C64>) -> Self {
        assert_eq!(coef.dim(), (grid.nx, grid.ny), "coefficient shape must match grid");
        Self { grid, coef }
    }

    /// Set the coefficient for wavenumbers `(k, m*dxi)`; panics off-grid.
    pub fn set_mode(&mut self, k: i64, m: i64, value: C64) {
        let i = self.grid.index_of_k(k).expect("k off grid");
        let j = self.grid.index_of_m(m).expect("m off grid");
        self.coef[[i, j]] = value;
    }

    /// Coefficient for wavenumbers `(k, m*dxi)`, or zero off-grid.
    pub fn mode(&self, k: i64, m: i64) -> C64 {
        match (self.grid.index_of_k(k), self.grid.index_of_m(m)) {
            (Some(i), Some(j)) => self.coef[[i, j]],
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coef.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `coef(-k,-xi) = conj(coef(k,xi))`. Modes without a
    /// partner on the grid (the Nyquist lines) are measured against a real
    /// value, which is what reality forces there.
    pub fn reality_error(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut worst = 0.0f64;
        for i in 0..nx {
            for j in 0..ny {
                let c = self.coef[[i, j]];
                let (ineg, jneg) = (self.grid.index_of_k(-self.grid.k_of(i)), self.grid.index_of_m(-self.grid.m_of(j)));
                let err = match (ineg, jneg) {
                    (Some(ii), Some(jj)) => (self.coef[[ii, jj]].conj() - c).norm(),
                    _ => c.im.abs(),
                };
                worst = worst.max(err);
            }
        }
        worst
    }

    /// Symmetrize coefficients so the represented field is exactly real.
    pub fn enforce_reality(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for i in 0..nx {
            for j in 0..ny {
                let k = self.grid.k_of(i);
                let m = self.grid.m_of(j);
                match (self.grid.index_of_k(-k), self.grid.index_of_m(-m)) {
                    (Some(ii), Some(jj)) => {
                        if (ii, jj) > (i, j) {
                            let avg = 0.5 * (self.coef[[i, j]] + self.coef[[ii, jj]].conj());
                            self.coef[[i, j]] = avg;
                            self.coef[[ii, jj]] = avg.conj();
                        } else if (ii, jj) == (i, j) {
                            self.coef[[i, j]] = C64::new(self.coef[[i, j]].re, 0.0);
                        }
                    }
                    _ => {
                        self.coef[[i, j]] = C64::new(self.coef[[i, j]].re, 0.0);
                    }
                }
            }
        }
    }

    /// Zero every mode the two-thirds rule drops.
    pub fn apply_dealias_mask(&mut self) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for i in 0..nx {
            for j in 0..ny {
                if !self.grid.dealias_keep(i, j) {
                    self.coef[[i, j]] = C64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Plain L2 norm (cell-measure weighted Parseval sum).
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.coef.iter().map(|c| c.norm_sqr()).sum();
        (sum * self.grid.cell_measure()).sqrt()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coef.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// self += scale * other (grids must match).
    pub fn axpy(&mut self, scale: C64, other: &SpectralField) {
        assert_eq!(self.grid, other.grid);
        ndarray::Zip::from(&mut self.coef).and(&other.coef).for_each(|a, &b| *a += scale * b);
    }

    pub fn scaled(&self, scale: f64) -> SpectralField {
        SpectralField { grid: self.grid, coef: self.coef.mapv(|c| c * scale) }
    }
}
