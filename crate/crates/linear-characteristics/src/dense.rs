//! Independent dense oracle: assemble the full linear generator per column on
//! the truncated frequency grid and apply a scaling-and-squaring matrix
//! exponential. Deliberately brute force - no characteristics, no remeshing -
//! so it shares nothing with the solver it cross-checks.

use crate::mode::Rates;
use crate::state::LinearState;
use spectral_core::{GridSpec, C64};
use std::cell::RefCell;
use std::collections::HashMap;
use thiserror::Error;

/// Hard cap: the generator is (3 ny)^2 dense complex entries per column.
pub const DENSE_NY_CAP: usize = 256;

#[derive(Debug, Error, PartialEq)]
pub enum DenseError {
    #[error("dense oracle is capped at ny <= {cap}, got ny = {ny}")]
    GridTooLarge { ny: usize, cap: usize },
    #[error("state grid does not match the propagator grid")]
    GridMismatch,
}

/// Square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMat {
    pub n: usize,
    pub a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut C64 {
        &mut self.a[i * self.n + j]
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.a {
            *v *= s;
        }
    }

    /// self += s * other
    pub fn add_scaled(&mut self, s: C64, other: &CMat) {
        for (v, o) in self.a.iter_mut().zip(other.a.iter()) {
            *v += s * o;
        }
    }

    /// Matrix product, ikj loop order for cache-friendly row accumulation.
    pub fn mul(&self, other: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            let row_out = &mut out.a[i * n..(i + 1) * n];
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let row_b = &other.a[k * n..(k + 1) * n];
                for (o, b) in row_out.iter_mut().zip(row_b.iter()) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            let row = &self.a[i * n..(i + 1) * n];
            for (a, v) in row.iter().zip(x.iter()) {
                acc += a * v;
            }
            *o = acc;
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let n = self.n;
        let mut best = 0.0f64;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self.at(i, j).norm();
            }
            best = best.max(s);
        }
        best
    }

    /// Solve self * X = rhs by partial-pivot LU; consumes a copy of self.
    pub fn solve_mat(&self, rhs: &CMat) -> CMat {
        let n = self.n;
        let mut lu = self.a.clone();
        let mut x = rhs.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let mut best = col;
            let mut best_mag = lu[piv[col] * n + col].norm();
            for (r, &p) in piv.iter().enumerate().skip(col + 1) {
                let mag = lu[p * n + col].norm();
                if mag > best_mag {
                    best = r;
                    best_mag = mag;
                }
            }
            piv.swap(col, best);
            let prow = piv[col];
            let pivot = lu[prow * n + col];
            assert!(pivot.norm() > 0.0, "singular matrix in dense solve");
            for &p in piv.iter().skip(col + 1) {
                let factor = lu[p * n + col] / pivot;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                lu[p * n + col] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[prow * n + j];
                    lu[p * n + j] -= sub;
                }
                for j in 0..n {
                    let sub = factor * x.a[prow * n + j];
                    x.a[p * n + j] -= sub;
                }
            }
        }
        // Back substitution in pivot order.
        let mut out = CMat::zeros(n);
        for col in (0..n).rev() {
            let prow = piv[col];
            let pivot = lu[prow * n + col];
            for j in 0..n {
                let mut acc = x.a[prow * n + j];
                for upper in col + 1..n {
                    acc -= lu[prow * n + upper] * out.a[upper * n + j];
                }
                out.a[col * n + j] = acc / pivot;
            }
        }
        out
    }
}

/// Matrix exponential by Pade-13 with scaling and squaring.
pub(crate) fn expm(m: &CMat) -> CMat {
    const THETA_13: f64 = 5.371920351148152;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let n = m.n;
    let norm = m.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as u32
    } else {
        0
    };
    let mut a = m.clone();
    if s > 0 {
        a.scale(0.5f64.powi(s as i32));
    }

    let id = CMat::eye(n);
    let a2 = a.mul(&a);
    let a4 = a2.mul(&a2);
    let a6 = a2.mul(&a4);

    let r = |c: f64| C64::new(c, 0.0);
    // U = A [ A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I ]
    let mut inner = CMat::zeros(n);
    inner.add_scaled(r(B[13]), &a6);
    inner.add_scaled(r(B[11]), &a4);
    inner.add_scaled(r(B[9]), &a2);
    let mut u = a6.mul(&inner);
    u.add_scaled(r(B[7]), &a6);
    u.add_scaled(r(B[5]), &a4);
    u.add_scaled(r(B[3]), &a2);
    u.add_scaled(r(B[1]), &id);
    let u = a.mul(&u);
    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let mut inner = CMat::zeros(n);
    inner.add_scaled(r(B[12]), &a6);
    inner.add_scaled(r(B[10]), &a4);
    inner.add_scaled(r(B[8]), &a2);
    let mut v = a6.mul(&inner);
    v.add_scaled(r(B[6]), &a6);
    v.add_scaled(r(B[4]), &a4);
    v.add_scaled(r(B[2]), &a2);
    v.add_scaled(r(B[0]), &id);

    // (V - U) X = (V + U)
    let mut vmu = v.clone();
    vmu.add_scaled(r(-1.0), &u);
    let mut vpu = v;
    vpu.add_scaled(r(1.0), &u);
    let mut x = vmu.solve_mat(&vpu);
    for _ in 0..s {
        x = x.mul(&x);
    }
    x
}

/// Spectral differentiation in xi built from the sawtooth shear samples:
/// D = analysis o (-i ytilde) o synthesis, circulant in slot index.
fn transport_matrix(grid: GridSpec) -> CMat {
    let n = grid.ny;
    let nf = n as f64;
    // c_d = -(i/N) sum_j ytilde_j e^{2 pi i j d / N}
    let mut c = vec![C64::new(0.0, 0.0); n];
    for (d, slot) in c.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let phase = 2.0 * std::f64::consts::PI * (j * d % n) as f64 / nf;
            acc += grid.y_centered(j) * C64::new(0.0, phase).exp();
        }
        *slot = C64::new(0.0, -1.0 / nf) * acc;
    }
    let mut t = CMat::zeros(n);
    for m in 0..n {
        for l in 0..n {
            *t.at_mut(m, l) = c[(l + n - m) % n];
        }
    }
    t
}

/// Generator for one column: stacked (theta, w, j) slots.
fn column_generator(grid: GridSpec, rates: Rates, k: i64, transport: &CMat) -> CMat {
    let n = grid.ny;
    let kf = k as f64;
    let mut a = CMat::zeros(3 * n);
    let (th, wo, jo) = (0usize, n, 2 * n);
    for m in 0..n {
        for l in 0..n {
            let tr = kf * transport.at(m, l);
            *a.at_mut(th + m, th + l) += tr;
            *a.at_mut(wo + m, wo + l) += tr;
            *a.at_mut(jo + m, jo + l) += tr;
        }
    }
    let ik = C64::new(0.0, kf);
    for m in 0..n {
        let xi = grid.xi_of(m);
        let d = xi * xi + kf * kf;
        *a.at_mut(th + m, th + m) += C64::new(-rates.eta * d, 0.0);
        *a.at_mut(wo + m, wo + m) += C64::new(-rates.nu * d, 0.0);
        *a.at_mut(jo + m, jo + m) += C64::new(-rates.mu * d, 0.0);
        *a.at_mut(jo + m, jo + m) += C64::new(-2.0 * kf * xi / d, 0.0);
        *a.at_mut(wo + m, th + m) += ik;
        *a.at_mut(wo + m, jo + m) += ik;
        *a.at_mut(jo + m, wo + m) += ik;
    }
    a
}

/// Matrix-exponential propagator for a fixed horizon. Column propagators are
/// built lazily and cached, so repeated applications (many initial conditions,
/// one horizon) pay each exponential once.
pub struct DensePropagator {
    grid: GridSpec,
    rates: Rates,
    t: f64,
    cache: RefCell<HashMap<usize, CMat>>,
    transport: CMat,
}

impl DensePropagator {
    pub fn new(grid: GridSpec, rates: Rates, t: f64) -> Result<Self, DenseError> {
        if grid.ny > DENSE_NY_CAP {
            return Err(DenseError::GridTooLarge { ny: grid.ny, cap: DENSE_NY_CAP });
        }
        Ok(Self {
            grid,
            rates,
            t,
            cache: RefCell::new(HashMap::new()),
            transport: transport_matrix(grid),
        })
    }

    pub fn apply(&self, init: &LinearState) -> Result<LinearState, DenseError> {
        if init.grid() != self.grid {
            return Err(DenseError::GridMismatch);
        }
        let g = self.grid;
        let n = g.ny;
        let mut out = init.clone();
        out.t = init.t + self.t;
        for i in 0..g.nx {
            let k = g.k_of(i);
            let populated = (0..n).any(|j| {
                init.theta.coef[[i, j]].norm_sqr() > 0.0
                    || init.w.coef[[i, j]].norm_sqr() > 0.0
                    || init.j.coef[[i, j]].norm_sqr() > 0.0
            });
            if !populated {
                continue;
            }
            if k == 0 {
                // Decoupled heat factors; (0,0) is held by e^0 = 1 automatically.
                for j in 0..n {
                    let d = g.xi_of(j).powi(2);
                    out.theta.coef[[i, j]] = init.theta.coef[[i, j]] * (-self.rates.eta * d * self.t).exp();
                    out.w.coef[[i, j]] = init.w.coef[[i, j]] * (-self.rates.nu * d * self.t).exp();
                    out.j.coef[[i, j]] = init.j.coef[[i, j]] * (-self.rates.mu * d * self.t).exp();
                }
                continue;
            }
            let mut cache = self.cache.borrow_mut();
            let prop = cache.entry(i).or_insert_with(|| {
                let mut gen = column_generator(g, self.rates, k, &self.transport);
                gen.scale(self.t);
                expm(&gen)
            });
            let mut x = vec![C64::new(0.0, 0.0); 3 * n];
            for j in 0..n {
                x[j] = init.theta.coef[[i, j]];
                x[n + j] = init.w.coef[[i, j]];
                x[2 * n + j] = init.j.coef[[i, j]];
            }
            let y = prop.matvec(&x);
            for j in 0..n {
                out.theta.coef[[i, j]] = y[j];
                out.w.coef[[i, j]] = y[n + j];
                out.j.coef[[i, j]] = y[2 * n + j];
            }
        }
        Ok(out)
    }
}

/// One-shot oracle: propagate `init` by `t` using the rates in its params.
pub fn dense_oracle(init: &LinearState, t: f64) -> Result<LinearState, DenseError> {
    let prop = DensePropagator::new(init.grid(), Rates::from(&init.params), t)?;
    prop.apply(init)
}

/// Convenience for tests: l2 distance between two states' coefficients.
pub fn state_distance(a: &LinearState, b: &LinearState) -> f64 {
    let g = a.grid();
    let mut sum = 0.0f64;
    for i in 0..g.nx {
        for j in 0..g.ny {
            sum += (a.theta.coef[[i, j]] - b.theta.coef[[i, j]]).norm_sqr();
            sum += (a.w.coef[[i, j]] - b.w.coef[[i, j]]).norm_sqr();
            sum += (a.j.coef[[i, j]] - b.j.coef[[i, j]]).norm_sqr();
        }
    }
    (sum * g.cell_measure()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = CMat::zeros(5);
        let e = expm(&z);
        let id = CMat::eye(5);
        let diff: f64 = e.a.iter().zip(id.a.iter()).map(|(a, b)| (a - b).norm()).sum();
        assert!(diff < 1e-14);
    }

    #[test]
    fn expm_matches_scalar_exponentials_on_diagonal() {
        let mut m = CMat::zeros(3);
        *m.at_mut(0, 0) = c(-1.2, 0.0);
        *m.at_mut(1, 1) = c(0.3, 2.0);
        *m.at_mut(2, 2) = c(0.0, -7.5);
        let e = expm(&m);
        for i in 0..3 {
            let want = m.at(i, i).exp();
            assert!((e.at(i, i) - want).norm() < 1e-13 * want.norm().max(1.0));
            for j in 0..3 {
                if i != j {
                    assert!(e.at(i, j).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn expm_of_nilpotent_truncates_exactly() {
        // exp([[0, a], [0, 0]]) = [[1, a], [0, 1]]
        let mut m = CMat::zeros(2);
        *m.at_mut(0, 1) = c(3.0, -4.0);
        let e = expm(&m);
        assert!((e.at(0, 0) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((e.at(0, 1) - c(3.0, -4.0)).norm() < 1e-13);
        assert!(e.at(1, 0).norm() < 1e-14);
        assert!((e.at(1, 1) - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_of_rotation_generator_is_rotation() {
        // exp(theta [[0,-1],[1,0]]) = [[cos,-sin],[sin,cos]], theta = 23.7
        // forces several squaring rounds.
        let theta = 23.7f64;
        let mut m = CMat::zeros(2);
        *m.at_mut(0, 1) = c(-theta, 0.0);
        *m.at_mut(1, 0) = c(theta, 0.0);
        let e = expm(&m);
        assert!((e.at(0, 0) - c(theta.cos(), 0.0)).norm() < 1e-11);
        assert!((e.at(0, 1) - c(-theta.sin(), 0.0)).norm() < 1e-11);
        assert!((e.at(1, 0) - c(theta.sin(), 0.0)).norm() < 1e-11);
        assert!((e.at(1, 1) - c(theta.cos(), 0.0)).norm() < 1e-11);
    }

    #[test]
    fn solve_mat_inverts_a_known_system() {
        // A = [[2, i], [-i, 1]], solve A X = I and check A X restores I.
        let mut a = CMat::zeros(2);
        *a.at_mut(0, 0) = c(2.0, 0.0);
        *a.at_mut(0, 1) = c(0.0, 1.0);
        *a.at_mut(1, 0) = c(0.0, -1.0);
        *a.at_mut(1, 1) = c(1.0, 0.0);
        let x = a.solve_mat(&CMat::eye(2));
        let ax = a.mul(&x);
        let id = CMat::eye(2);
        let diff: f64 = ax.a.iter().zip(id.a.iter()).map(|(p, q)| (p - q).norm()).sum();
        assert!(diff < 1e-14, "residual {diff}");
    }

    #[test]
    fn transport_matrix_differentiates_smooth_columns() {
        // Apply D to a smooth band-limited profile and compare with the
        // analytic xi-derivative; the sawtooth seam is irrelevant because the
        // profile is y-localized near 0 (Gaussian of width ~1 in xi).
        let grid = GridSpec::new(4, 128, 16.0 * std::f64::consts::PI, true).unwrap();
        let d = transport_matrix(grid);
        let prof = |xi: f64| (-0.5 * xi * xi).exp();
        let dprof = |xi: f64| -xi * (-0.5 * xi * xi).exp();
        let x: Vec<C64> = (0..grid.ny).map(|j| c(prof(grid.xi_of(j)), 0.0)).collect();
        let dx = d.matvec(&x);
        let mut worst = 0.0f64;
        for (j, v) in dx.iter().enumerate() {
            worst = worst.max((v - c(dprof(grid.xi_of(j)), 0.0)).norm());
        }
        assert!(worst < 1e-8, "derivative error {worst}");
    }
}
