use ndarray::{Array2, Zip};
use spectral_core::{biot_savart, Fft2, GridSpec, SpectralField, C64};

/// Pseudo-spectral workhorse for the coupled vorticity/current/temperature
/// system. Owns the FFT plans and knows how to evaluate every quadratic
/// term in the sheared frame: products are formed pointwise in physical
/// space on the advected lattice, where colocation makes them exact, and
/// derivatives use the instantaneous wavenumber `(k, xi - k s)`.
///
/// `s` below is always the time elapsed since the last remesh, so `s = 0`
/// means the labels coincide with the physical frequencies.
pub struct NlEngine {
    grid: GridSpec,
    fft: Fft2,
}

impl NlEngine {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, fft: Fft2::new(grid) }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Copy of `f` with the 2/3-rule mask applied when the grid asks for it.
    fn masked(&self, f: &SpectralField) -> SpectralField {
        let mut g = f.clone();
        if self.grid.dealias {
            g.apply_dealias_mask();
        }
        g
    }

    fn spec(&self, samples: &Array2<C64>) -> SpectralField {
        let mut f = self.fft.to_spectral(self.grid, samples);
        if self.grid.dealias {
            f.apply_dealias_mask();
        }
        f
    }

    /// d/dx in spectral form; frame independent.
    fn dx_field(&self, f: &SpectralField) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for i in 0..self.grid.nx {
            let k = self.grid.k_of(i) as f64;
            for j in 0..self.grid.ny {
                out.coef[[i, j]] = C64::new(0.0, k) * f.coef[[i, j]];
            }
        }
        out
    }

    /// d/dy at frame offset `s`: multiply by `i (xi - k s)`.
    fn dy_field_at(&self, f: &SpectralField, s: f64) -> SpectralField {
        let mut out = SpectralField::zeros(self.grid);
        for i in 0..self.grid.nx {
            let k = self.grid.k_of(i) as f64;
            for j in 0..self.grid.ny {
                let xi = self.grid.xi_of(j) - k * s;
                out.coef[[i, j]] = C64::new(0.0, xi) * f.coef[[i, j]];
            }
        }
        out
    }

    /// Velocity (or magnetic) field recovered from a vorticity-like scalar
    /// at frame offset `s`. At `s = 0` this reproduces `biot_savart` exactly,
    /// arithmetic included; the mean mode carries no stream function and is
    /// gauged to zero.
    pub fn velocity_at(&self, f: &SpectralField, s: f64) -> (SpectralField, SpectralField) {
        if s == 0.0 {
            return biot_savart(f);
        }
        let mut c1 = SpectralField::zeros(self.grid);
        let mut c2 = SpectralField::zeros(self.grid);
        for i in 0..self.grid.nx {
            let k = self.grid.k_of(i) as f64;
            for j in 0..self.grid.ny {
                let xi = self.grid.xi_of(j) - k * s;
                let denom = k * k + xi * xi;
                if denom == 0.0 {
                    continue;
                }
                let fh = f.coef[[i, j]];
                c1.coef[[i, j]] = C64::new(0.0, xi / denom) * fh;
                c2.coef[[i, j]] = C64::new(0.0, -k / denom) * fh;
            }
        }
        (c1, c2)
    }

    /// Dealiased pointwise product of two spectral fields.
    pub fn product(&self, a: &SpectralField, b: &SpectralField) -> SpectralField {
        let ap = self.fft.to_physical(&self.masked(a));
        let bp = self.fft.to_physical(&self.masked(b));
        let mut prod = ap;
        Zip::from(&mut prod).and(&bp).for_each(|x, &y| *x *= y);
        self.spec(&prod)
    }

    /// Advection term `(u . grad) f` evaluated at frame offset `s`.
    pub fn advect(
        &self,
        u1: &SpectralField,
        u2: &SpectralField,
        f: &SpectralField,
        s: f64,
    ) -> SpectralField {
        let fm = self.masked(f);
        let u1p = self.fft.to_physical(&self.masked(u1));
        let u2p = self.fft.to_physical(&self.masked(u2));
        let dxp = self.fft.to_physical(&self.dx_field(&fm));
        let dyp = self.fft.to_physical(&self.dy_field_at(&fm, s));
        let mut sum = u1p;
        Zip::from(&mut sum).and(&dxp).and(&u2p).and(&dyp).for_each(|acc, &dx, &v, &dy| {
            *acc = *acc * dx + v * dy;
        });
        self.spec(&sum)
    }

    /// `-y d_x f` with `y` the centered sawtooth coordinate of the periodic
    /// strip. Linear, so no dealias mask; the pointwise multiply agrees with
    /// the circulant convolution stencil to machine precision.
    pub(crate) fn transport(&self, f: &SpectralField) -> SpectralField {
        let mut phys = self.fft.to_physical(&self.dx_field(f));
        for ((_, jj), v) in phys.indexed_iter_mut() {
            *v *= -self.grid.y_centered(jj);
        }
        self.fft.to_spectral(self.grid, &phys)
    }

    /// The four gradient factors entering the quadratic current source:
    /// `d_x b1`, `d_x u2 + d_y u1`, `d_x u1`, `d_x b2 + d_y b1`.
    fn source_factors(
        &self,
        u1: &SpectralField,
        u2: &SpectralField,
        b1: &SpectralField,
        b2: &SpectralField,
        s: f64,
    ) -> [SpectralField; 4] {
        let q1 = self.dx_field(b1);
        let mut q2 = self.dx_field(u2);
        q2.axpy(C64::new(1.0, 0.0), &self.dy_field_at(u1, s));
        let q3 = self.dx_field(u1);
        let mut q4 = self.dx_field(b2);
        q4.axpy(C64::new(1.0, 0.0), &self.dy_field_at(b1, s));
        [q1, q2, q3, q4]
    }

    /// Quadratic source in the current equation,
    /// `2 (d_x b1 (d_x u2 + d_y u1) - d_x u1 (d_x b2 + d_y b1))`,
    /// for explicitly supplied velocity and magnetic fields in the static
    /// frame.
    pub fn quadratic_source(
        &self,
        u1: &SpectralField,
        u2: &SpectralField,
        b1: &SpectralField,
        b2: &SpectralField,
    ) -> SpectralField {
        let [q1, q2, q3, q4] = self.source_factors(
            &self.masked(u1),
            &self.masked(u2),
            &self.masked(b1),
            &self.masked(b2),
            0.0,
        );
        let q1p = self.fft.to_physical(&q1);
        let q2p = self.fft.to_physical(&q2);
        let q3p = self.fft.to_physical(&q3);
        let q4p = self.fft.to_physical(&q4);
        let mut comb = q1p;
        Zip::from(&mut comb).and(&q2p).and(&q3p).and(&q4p).for_each(|a, &b, &c, &d| {
            *a = (*a * b - c * d) * 2.0;
        });
        self.spec(&comb)
    }

    /// Everything in the sheared-frame tendency except viscous damping and
    /// bulk transport: linear couplings plus (optionally) the full set of
    /// quadratic terms, all at frame offset `s`. Products read the masked
    /// state; the couplings act on the coefficients as given.
    ///
    /// Every physical factor of every product is a diagonal multiple of one
    /// of the three state spectra and all of them are real fields, so they
    /// are evaluated two per transform: one packed into real parts, the
    /// other into imaginary parts, with the diagonal symbols applied while
    /// packing. Seven inverse and two forward passes replace the seventeen
    /// a field-at-a-time evaluation would take; the Hermitian split on the
    /// way back separates the pair exactly.
    ///
    /// Returns `(dw, dj, dtheta)`.
    pub(crate) fn nonstiff_tendency(
        &self,
        w: &SpectralField,
        j: &SpectralField,
        theta: &SpectralField,
        s: f64,
        nonlinear: bool,
    ) -> (SpectralField, SpectralField, SpectralField) {
        let grid = self.grid;
        let (nx, ny) = (grid.nx, grid.ny);
        let (mut dw, mut dj, dth) = if nonlinear {
            let n = nx * ny;
            // The mask is separable, so the row factor (at m = 0) and column
            // factor (at k = 0) reproduce dealias_keep exactly.
            let keep_row: Vec<bool> =
                (0..nx).map(|i| !grid.dealias || grid.dealias_keep(i, 0)).collect();
            let keep_col: Vec<bool> =
                (0..ny).map(|jj| !grid.dealias || grid.dealias_keep(0, jj)).collect();
            let xi0: Vec<f64> = (0..ny).map(|jj| grid.xi_of(jj)).collect();

            let shape = (nx, ny);
            // u1 + i u2, b1 + i b2, and the packed gradient/source factors.
            let mut p_u = Array2::<C64>::zeros(shape);
            let mut p_b = Array2::<C64>::zeros(shape);
            let mut p_gw = Array2::<C64>::zeros(shape);
            let mut p_gj = Array2::<C64>::zeros(shape);
            let mut p_gt = Array2::<C64>::zeros(shape);
            let mut p_q12 = Array2::<C64>::zeros(shape);
            let mut p_q34 = Array2::<C64>::zeros(shape);
            {
                let ws = w.coef.as_slice().expect("standard layout");
                let js = j.coef.as_slice().expect("standard layout");
                let ts = theta.coef.as_slice().expect("standard layout");
                let pu = p_u.as_slice_mut().unwrap();
                let pb = p_b.as_slice_mut().unwrap();
                let pgw = p_gw.as_slice_mut().unwrap();
                let pgj = p_gj.as_slice_mut().unwrap();
                let pgt = p_gt.as_slice_mut().unwrap();
                let pq12 = p_q12.as_slice_mut().unwrap();
                let pq34 = p_q34.as_slice_mut().unwrap();
                // a + i b with real-field inputs packed as complex values
                let pk = |a: C64, b: C64| C64::new(a.re - b.im, a.im + b.re);
                // i * f * z
                let itf = |f: f64, z: C64| C64::new(-f * z.im, f * z.re);
                let mut idx = 0;
                for (i, &kr) in keep_row.iter().enumerate() {
                    let k = grid.k_of(i) as f64;
                    for (jj, &kc) in keep_col.iter().enumerate() {
                        let xi = xi0[jj] - k * s;
                        let keep = kr && kc;
                        let (wv, jv, tv) = if keep {
                            (ws[idx], js[idx], ts[idx])
                        } else {
                            (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
                        };
                        let d = k * k + xi * xi;
                        let (r1, r2, qa, qb) = if d > 0.0 {
                            (xi / d, -k / d, -k * xi / d, (k * k - xi * xi) / d)
                        } else {
                            (0.0, 0.0, 0.0, 0.0)
                        };
                        pu[idx] = pk(itf(r1, wv), itf(r2, wv));
                        pb[idx] = pk(itf(r1, jv), itf(r2, jv));
                        pgw[idx] = pk(itf(k, wv), itf(xi, wv));
                        pgj[idx] = pk(itf(k, jv), itf(xi, jv));
                        pgt[idx] = pk(itf(k, tv), itf(xi, tv));
                        pq12[idx] = pk(jv * qa, wv * qb);
                        pq34[idx] = pk(wv * qa, jv * qb);
                        idx += 1;
                    }
                }
            }
            for p in [&mut p_u, &mut p_b, &mut p_gw, &mut p_gj, &mut p_gt, &mut p_q12, &mut p_q34]
            {
                self.fft.inverse_inplace(p);
            }

            let mut out_wj = Array2::<C64>::zeros(shape);
            let mut out_t = Array2::<C64>::zeros(shape);
            {
                let pu = p_u.as_slice().unwrap();
                let pb = p_b.as_slice().unwrap();
                let pgw = p_gw.as_slice().unwrap();
                let pgj = p_gj.as_slice().unwrap();
                let pgt = p_gt.as_slice().unwrap();
                let pq12 = p_q12.as_slice().unwrap();
                let pq34 = p_q34.as_slice().unwrap();
                let owj = out_wj.as_slice_mut().unwrap();
                let ot = out_t.as_slice_mut().unwrap();
                for idx in 0..n {
                    let (u1, u2) = (pu[idx].re, pu[idx].im);
                    let (b1, b2) = (pb[idx].re, pb[idx].im);
                    let (dxw, dyw) = (pgw[idx].re, pgw[idx].im);
                    let (dxj, dyj) = (pgj[idx].re, pgj[idx].im);
                    let (dxt, dyt) = (pgt[idx].re, pgt[idx].im);
                    let (q1, q2) = (pq12[idx].re, pq12[idx].im);
                    let (q3, q4) = (pq34[idx].re, pq34[idx].im);
                    let wn = -(u1 * dxw + u2 * dyw) + (b1 * dxj + b2 * dyj);
                    let jn = -(u1 * dxj + u2 * dyj)
                        + (b1 * dxw + b2 * dyw)
                        + 2.0 * (q1 * q2 - q3 * q4);
                    let tn = -(u1 * dxt + u2 * dyt);
                    owj[idx] = C64::new(wn, jn);
                    ot[idx] = C64::new(tn, 0.0);
                }
            }
            self.fft.forward_inplace(&mut out_wj);
            self.fft.forward_inplace(&mut out_t);

            let mut dw = SpectralField::zeros(grid);
            let mut dj = SpectralField::zeros(grid);
            let mut dth = SpectralField::zeros(grid);
            {
                let src = out_wj.as_slice().unwrap();
                let tsrc = out_t.as_slice().unwrap();
                let dws = dw.coef.as_slice_mut().unwrap();
                let djs = dj.coef.as_slice_mut().unwrap();
                let dths = dth.coef.as_slice_mut().unwrap();
                let mut idx = 0;
                for (i, &kr) in keep_row.iter().enumerate() {
                    let ni = (nx - i) % nx;
                    for (jj, &kc) in keep_col.iter().enumerate() {
                        if kr && kc {
                            let njj = (ny - jj) % ny;
                            let c = src[idx];
                            let cn = src[ni * ny + njj].conj();
                            dws[idx] = (c + cn) * 0.5;
                            let dd = c - cn;
                            djs[idx] = C64::new(0.5 * dd.im, -0.5 * dd.re);
                            dths[idx] = tsrc[idx];
                        }
                        idx += 1;
                    }
                }
            }
            (dw, dj, dth)
        } else {
            (
                SpectralField::zeros(self.grid),
                SpectralField::zeros(self.grid),
                SpectralField::zeros(self.grid),
            )
        };

        // Linear couplings: buoyancy and field-line tension in the vorticity
        // equation, tension plus the shear-induced stretching term in the
        // current equation. Stretching is 2 d_x b1 of the mean-flow coupling,
        // which per mode reads -2 k xi_s / (k^2 + xi_s^2) acting on j.
        for i in 0..self.grid.nx {
            let k = self.grid.k_of(i) as f64;
            if k == 0.0 {
                continue;
            }
            for jj in 0..self.grid.ny {
                let xi = self.grid.xi_of(jj) - k * s;
                let ik = C64::new(0.0, k);
                dw.coef[[i, jj]] += ik * (j.coef[[i, jj]] + theta.coef[[i, jj]]);
                let denom = k * k + xi * xi;
                dj.coef[[i, jj]] +=
                    ik * w.coef[[i, jj]] - C64::new(2.0 * k * xi / denom, 0.0) * j.coef[[i, jj]];
            }
        }
        (dw, dj, dth)
    }
}
