//! Node-value arrays on a [`Grid2D`] and their discrete L2 / L4 algebra.
//!
//! Quadrature is node value times cell area, so `l2_norm_sq(f) = dx dy sum |f_ij|^2`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{ChevronError, Result};
use crate::grid::Grid2D;

/// Scalar type stored at grid nodes: `f64` for the director angle, `Complex64`
/// for the amplitude.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
{
    const IS_COMPLEX: bool;

    fn abs_sq(self) -> f64;
    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn from_re_im(re: f64, im: f64) -> Self;

    fn is_finite(self) -> bool {
        self.re().is_finite() && self.im().is_finite()
    }

    fn zero() -> Self {
        Self::default()
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn abs_sq(self) -> f64 {
        self * self
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn from_re_im(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

/// Interior node values of a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid2D,
    values: Vec<T>,
}

pub type RealField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: Scalar> Field<T> {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![T::zero(); grid.len()] }
    }

    pub fn constant(grid: Grid2D, value: T) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn from_values(grid: Grid2D, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(ChevronError::InvalidParameter(format!(
                "expected {} node values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let field = Self { grid, values };
        field.check_finite("field")?;
        Ok(field)
    }

    /// Samples `f(x, y)` at every interior node.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx() {
            let x = grid.x(i);
            for j in 0..grid.ny() {
                values.push(f(x, grid.y(j)));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.grid.index(i, j)]
    }

    /// Value at `(i, j)` with out-of-range indices mapped to the zero boundary.
    #[inline]
    pub fn get_or_zero(&self, i: isize, j: isize) -> T {
        if i < 0 || j < 0 || i as usize >= self.grid.nx() || j as usize >= self.grid.ny() {
            T::zero()
        } else {
            self.values[self.grid.index(i as usize, j as usize)]
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map<U: Scalar, V: Scalar>(&self, other: &Field<U>, f: impl Fn(T, U) -> V) -> Result<Field<V>> {
        self.ensure_same_grid(other.grid())?;
        Ok(Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a - b)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.zip_map(other, |a, b| a + b * alpha)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs_sq()).fold(0.0, f64::max).sqrt()
    }

    pub fn ensure_same_grid(&self, other: &Grid2D) -> Result<()> {
        if self.grid != *other {
            return Err(ChevronError::GridMismatch);
        }
        Ok(())
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(ChevronError::NonFinite { what, i: k / self.grid.ny(), j: k % self.grid.ny() }),
        }
    }

    /// Discrete `||f||^2 = dx dy sum |f_ij|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v.abs_sq()).sum::<f64>()
    }

    /// Discrete `||f||_{L4}^4 = dx dy sum |f_ij|^4`.
    pub fn l4_norm_4(&self) -> f64 {
        self.grid.cell_area() * self.values.iter().map(|v| v.abs_sq() * v.abs_sq()).sum::<f64>()
    }

    /// Discrete `(f, g) = dx dy sum f_ij conj(g_ij)`.
    pub fn inner_product(&self, other: &Self) -> Result<T> {
        self.ensure_same_grid(other.grid())?;
        let sum = self.values.iter().zip(&other.values).fold(T::zero(), |acc, (&a, &b)| acc + a * b.conj());
        Ok(sum * self.grid.cell_area())
    }
}

impl ComplexField {
    pub fn from_parts(re: &RealField, im: &RealField) -> Result<Self> {
        re.zip_map(im, Complex64::new)
    }

    pub fn re(&self) -> RealField {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> RealField {
        self.map(|z| z.im)
    }

    pub fn modulus_sq(&self) -> RealField {
        self.map(|z| z.norm_sqr())
    }
}

impl RealField {
    pub fn to_complex(&self) -> ComplexField {
        self.map(|v| Complex64::new(v, 0.0))
    }
}

/// Free-function forms of the field norms.
pub fn l2_norm_sq<T: Scalar>(f: &Field<T>) -> f64 {
    f.l2_norm_sq()
}

pub fn l4_norm_4<T: Scalar>(f: &Field<T>) -> f64 {
    f.l4_norm_4()
}

pub fn inner_product<T: Scalar>(f: &Field<T>, g: &Field<T>) -> Result<T> {
    f.inner_product(g)
}
