//! Second-order finite-difference operators under homogeneous Dirichlet
//! conditions. Out-of-range neighbors read as zero ghost values.

mod helmholtz;

pub use helmholtz::{solve_helmholtz, HelmholtzSolver};

use crate::error::{ChevronError, Result};
use crate::field::{Field, Scalar};
use crate::grid::Grid2D;

/// The operator `D1 d_xx + D2 d_yy` on interior nodes.
///
/// Symmetric negative-definite; the plain Laplacian is the `D1 = D2 = 1` case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropicOperator {
    pub d1: f64,
    pub d2: f64,
    pub grid: Grid2D,
}

impl AnisotropicOperator {
    pub fn new(grid: Grid2D, d1: f64, d2: f64) -> Result<Self> {
        if !(d1.is_finite() && d1 > 0.0 && d2.is_finite() && d2 > 0.0) {
            return Err(ChevronError::InvalidParameter(format!(
                "diffusion coefficients must be > 0, got D1 = {d1}, D2 = {d2}"
            )));
        }
        Ok(Self { d1, d2, grid })
    }

    pub fn laplacian(grid: Grid2D) -> Self {
        Self { d1: 1.0, d2: 1.0, grid }
    }

    pub fn apply<T: Scalar>(&self, f: &Field<T>) -> Result<Field<T>> {
        f.ensure_same_grid(&self.grid)?;
        Ok(weighted_laplacian(f, self.d1, self.d2))
    }

    /// Eigenvalue of the operator on the discrete sine mode `(k, m)`, `k, m >= 1`.
    pub fn eigenvalue(&self, k: usize, m: usize) -> f64 {
        self.d1 * second_difference_eigenvalue(k, self.grid.nx(), self.grid.dx())
            + self.d2 * second_difference_eigenvalue(m, self.grid.ny(), self.grid.dy())
    }
}

/// Eigenvalue `-(2/h^2)(1 - cos(k pi / (n+1)))` of the 1D Dirichlet second difference.
pub fn second_difference_eigenvalue(k: usize, n: usize, h: f64) -> f64 {
    let theta = k as f64 * std::f64::consts::PI / (n + 1) as f64;
    -(2.0 / (h * h)) * (1.0 - theta.cos())
}

fn weighted_laplacian<T: Scalar>(f: &Field<T>, d1: f64, d2: f64) -> Field<T> {
    let g = *f.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let wx = d1 / (g.dx() * g.dx());
    let wy = d2 / (g.dy() * g.dy());
    let v = f.values();
    let mut out = Field::zeros(g);
    let o = out.values_mut();
    for i in 0..nx {
        let row = i * ny;
        for j in 0..ny {
            let c = v[row + j];
            let xm = if i > 0 { v[row - ny + j] } else { T::zero() };
            let xp = if i + 1 < nx { v[row + ny + j] } else { T::zero() };
            let ym = if j > 0 { v[row + j - 1] } else { T::zero() };
            let yp = if j + 1 < ny { v[row + j + 1] } else { T::zero() };
            o[row + j] = (xp + xm - c * 2.0) * wx + (yp + ym - c * 2.0) * wy;
        }
    }
    out
}

/// 5-point Laplacian.
pub fn laplacian<T: Scalar>(f: &Field<T>) -> Field<T> {
    weighted_laplacian(f, 1.0, 1.0)
}

/// `D1 d_xx f + D2 d_yy f`.
pub fn anisotropic_laplacian<T: Scalar>(f: &Field<T>, d1: f64, d2: f64) -> Result<Field<T>> {
    AnisotropicOperator::new(*f.grid(), d1, d2)?.apply(f)
}

/// Central difference `(f_{i,j+1} - f_{i,j-1}) / (2 dy)` with zero ghost nodes.
pub fn d_dy<T: Scalar>(f: &Field<T>) -> Field<T> {
    let g = *f.grid();
    let ny = g.ny();
    let w = 0.5 / g.dy();
    let v = f.values();
    let mut out = Field::zeros(g);
    for (src, dst) in v.chunks_exact(ny).zip(out.values_mut().chunks_exact_mut(ny)) {
        for j in 0..ny {
            let ym = if j > 0 { src[j - 1] } else { T::zero() };
            let yp = if j + 1 < ny { src[j + 1] } else { T::zero() };
            dst[j] = (yp - ym) * w;
        }
    }
    out
}

/// Discrete `||grad f||^2` from forward differences over every cell face,
/// boundary faces included, so that `-(laplacian(f), f) = grad_norm_sq(f)`
/// holds exactly.
pub fn grad_norm_sq<T: Scalar>(f: &Field<T>) -> f64 {
    let g = *f.grid();
    let (nx, ny) = (g.nx() as isize, g.ny() as isize);
    let mut sx = 0.0;
    for i in -1..nx {
        for j in 0..ny {
            sx += (f.get_or_zero(i + 1, j) - f.get_or_zero(i, j)).abs_sq();
        }
    }
    let mut sy = 0.0;
    for i in 0..nx {
        for j in -1..ny {
            sy += (f.get_or_zero(i, j + 1) - f.get_or_zero(i, j)).abs_sq();
        }
    }
    g.cell_area() * (sx / (g.dx() * g.dx()) + sy / (g.dy() * g.dy()))
}

/// `l4 / (2 l2 grad)`, the Ladyzhenskaya ratio; at most 1 in the continuum.
/// Returns 0 for the zero field.
pub fn ladyzhenskaya_ratio<T: Scalar>(f: &Field<T>) -> f64 {
    let denom = 2.0 * f.l2_norm_sq() * grad_norm_sq(f);
    if denom == 0.0 {
        0.0
    } else {
        f.l4_norm_4() / denom
    }
}
