//! Direct solver for `(sigma I - L) u = rhs` with `L = D1 d_xx + D2 d_yy`,
//! diagonalized in the discrete sine basis along both axes.
//!
//! The DST-I of length `n` is computed from a complex FFT of the odd
//! extension (length `2(n+1)`): `Y_k = -2i X_k`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{second_difference_eigenvalue, AnisotropicOperator};
use crate::error::{ChevronError, Result};
use crate::field::{Field, Scalar};

pub struct HelmholtzSolver {
    op: AnisotropicOperator,
    fft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    /// `D1 lambda_k + D2 lambda_m`, indexed `k * ny + m` (0-based modes).
    spectrum: Vec<f64>,
}

impl std::fmt::Debug for HelmholtzSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HelmholtzSolver").field("op", &self.op).finish_non_exhaustive()
    }
}

impl HelmholtzSolver {
    pub fn new(op: AnisotropicOperator) -> Self {
        let g = op.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let mut planner = FftPlanner::new();
        let fft_x = planner.plan_fft_forward(2 * (nx + 1));
        let fft_y = planner.plan_fft_forward(2 * (ny + 1));
        let lam_x: Vec<f64> = (1..=nx).map(|k| op.d1 * second_difference_eigenvalue(k, nx, g.dx())).collect();
        let lam_y: Vec<f64> = (1..=ny).map(|m| op.d2 * second_difference_eigenvalue(m, ny, g.dy())).collect();
        let spectrum = lam_x.iter().flat_map(|&lx| lam_y.iter().map(move |&ly| lx + ly)).collect();
        Self { op, fft_x, fft_y, spectrum }
    }

    pub fn operator(&self) -> &AnisotropicOperator {
        &self.op
    }

    pub fn solve<T: Scalar>(&self, sigma: f64, rhs: &Field<T>) -> Result<Field<T>> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(ChevronError::InvalidParameter(format!("Helmholtz shift must be > 0, got {sigma}")));
        }
        rhs.ensure_same_grid(&self.op.grid)?;
        let mut re: Vec<f64> = rhs.values().iter().map(|v| v.re()).collect();
        self.solve_in_place(sigma, &mut re);
        let values = if T::IS_COMPLEX {
            let mut im: Vec<f64> = rhs.values().iter().map(|v| v.im()).collect();
            self.solve_in_place(sigma, &mut im);
            re.into_iter().zip(im).map(|(r, i)| T::from_re_im(r, i)).collect()
        } else {
            re.into_iter().map(|r| T::from_re_im(r, 0.0)).collect()
        };
        Field::from_values(self.op.grid, values)
    }

    fn solve_in_place(&self, sigma: f64, data: &mut [f64]) {
        self.sine_transform_2d(data);
        let g = self.op.grid;
        let norm = 4.0 / ((g.nx() + 1) as f64 * (g.ny() + 1) as f64);
        for (v, lam) in data.iter_mut().zip(&self.spectrum) {
            *v *= norm / (sigma - lam);
        }
        self.sine_transform_2d(data);
    }

    /// Unnormalized DST-I along y then x. Applying it twice multiplies by
    /// `(nx+1)(ny+1)/4`.
    fn sine_transform_2d(&self, data: &mut [f64]) {
        let g = self.op.grid;
        let (nx, ny) = (g.nx(), g.ny());
        dst_lines(self.fft_y.as_ref(), ny, data);
        let mut t = transpose(data, nx, ny);
        dst_lines(self.fft_x.as_ref(), nx, &mut t);
        data.copy_from_slice(&transpose(&t, ny, nx));
    }
}

/// DST-I of every contiguous length-`n` line of `data`, in place.
fn dst_lines(fft: &dyn Fft<f64>, n: usize, data: &mut [f64]) {
    let m = 2 * (n + 1);
    let lines = data.len() / n;
    let mut buf = vec![Complex64::new(0.0, 0.0); lines * m];
    for (line, chunk) in data.chunks_exact(n).zip(buf.chunks_exact_mut(m)) {
        for (j, &x) in line.iter().enumerate() {
            chunk[j + 1] = Complex64::new(x, 0.0);
            chunk[m - j - 1] = Complex64::new(-x, 0.0);
        }
    }
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(&mut buf, &mut scratch);
    for (line, chunk) in data.chunks_exact_mut(n).zip(buf.chunks_exact(m)) {
        for (k, x) in line.iter_mut().enumerate() {
            *x = -0.5 * chunk[k + 1].im;
        }
    }
}

fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// One-shot `(sigma I - op) u = rhs`. Prefer a cached [`HelmholtzSolver`] when
/// solving repeatedly with the same operator.
pub fn solve_helmholtz<T: Scalar>(op: &AnisotropicOperator, sigma: f64, rhs: &Field<T>) -> Result<Field<T>> {
    HelmholtzSolver::new(*op).solve(sigma, rhs)
}
