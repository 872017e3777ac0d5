use std::f64::consts::PI;

/// Errors raised when constructing a [`GridSpec`].
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("grid counts must be even and >= 4, got nx={nx}, ny={ny}")]
    BadCounts { nx: usize, ny: usize },
    #[error("y-period must be positive and finite, got ly={ly}")]
    BadPeriod { ly: f64 },
}

/// Discretization of the periodic domain `[0, 2*pi) x [0, ly)`.
///
/// x-wavenumbers are the integers `{-nx/2+1, ..., nx/2}`; y-wavenumbers are
/// `(2*pi/ly) * {-ny/2+1, ..., ny/2}`. Both are stored in FFT order
/// (non-negative half first).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub ly: f64,
    pub dealias: bool,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, ly: f64, dealias: bool) -> Result<Self, GridError> {
        if nx < 4 || ny < 4 || !nx.is_multiple_of(2) || !ny.is_multiple_of(2) {
            return Err(GridError::BadCounts { nx, ny });
        }
        if !(ly.is_finite() && ly > 0.0) {
            return Err(GridError::BadPeriod { ly });
        }
        Ok(Self { nx, ny, ly, dealias })
    }

    /// Default y-truncation: a box of length `16*pi`.
    pub fn default_ly() -> f64 {
        16.0 * PI
    }

    /// Spacing of the y-wavenumber lattice, `2*pi/ly`.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.ly
    }

    /// Integer x-wavenumber at FFT index `i`.
    pub fn k_of(&self, i: usize) -> i64 {
        debug_assert!(i < self.nx);
        if i <= self.nx / 2 {
            i as i64
        } else {
            i as i64 - self.nx as i64
        }
    }

    /// Integer y-lattice coordinate at FFT index `j` (multiply by `dxi` for xi).
    pub fn m_of(&self, j: usize) -> i64 {
        debug_assert!(j < self.ny);
        if j <= self.ny / 2 {
            j as i64
        } else {
            j as i64 - self.ny as i64
        }
    }

    /// y-wavenumber at FFT index `j`.
    pub fn xi_of(&self, j: usize) -> f64 {
        self.m_of(j) as f64 * self.dxi()
    }

    /// FFT index of integer x-wavenumber `k`, if representable.
    pub fn index_of_k(&self, k: i64) -> Option<usize> {
        let half = self.nx as i64 / 2;
        if k > half || k <= -half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.nx as i64) as usize })
    }

    /// FFT index of integer y-lattice coordinate `m`, if representable.
    pub fn index_of_m(&self, m: i64) -> Option<usize> {
        let half = self.ny as i64 / 2;
        if m > half || m <= -half {
            return None;
        }
        Some(if m >= 0 { m as usize } else { (m + self.ny as i64) as usize })
    }

    /// Physical x sample point at column `i`.
    pub fn x_of(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.nx as f64
    }

    /// Physical y sample point at row `j`, in `[0, ly)`.
    pub fn y_of(&self, j: usize) -> f64 {
        self.ly * j as f64 / self.ny as f64
    }

    /// Centered shear coordinate in `[-ly/2, ly/2)`: the periodic stand-in for
    /// the unbounded y of the shear profile.
    pub fn y_centered(&self, j: usize) -> f64 {
        let y = self.y_of(j);
        if y < self.ly / 2.0 {
            y
        } else {
            y - self.ly
        }
    }

    /// Quadrature weight making spectral sums approximate continuum L2
    /// integrals: `(2*pi/nx) * (ly/ny)`.
    pub fn cell_measure(&self) -> f64 {
        (2.0 * PI / self.nx as f64) * (self.ly / self.ny as f64)
    }

    /// Two-thirds-rule mask: true when the mode at `(i, j)` survives.
    pub fn dealias_keep(&self, i: usize, j: usize) -> bool {
        let k = self.k_of(i).unsigned_abs() as usize;
        let m = self.m_of(j).unsigned_abs() as usize;
        3 * k <= self.nx && 3 * m <= self.ny
    }

    /// Largest retained |k| under the two-thirds rule.
    pub fn kmax_dealiased(&self) -> i64 {
        (self.nx / 3) as i64
    }

    /// Largest y-wavenumber magnitude on the grid, `(ny/2) * dxi`.
    pub fn xi_max(&self) -> f64 {
        self.ny as f64 / 2.0 * self.dxi()
    }
}
