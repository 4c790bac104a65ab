use crate::error::{ChevronError, Result};
use crate::field::{ComplexField, RealField};
use crate::grid::Grid2D;

/// Snapshot `(A, phi, t)` of the PDE system.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub a: ComplexField,
    pub phi: RealField,
    pub t: f64,
}

impl SimState {
    pub fn new(a: ComplexField, phi: RealField, t: f64) -> Result<Self> {
        a.ensure_same_grid(phi.grid())?;
        if !(t.is_finite() && t >= 0.0) {
            return Err(ChevronError::InvalidParameter(format!("time must be finite and >= 0, got {t}")));
        }
        Ok(Self { a, phi, t })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self { a: ComplexField::zeros(grid), phi: RealField::zeros(grid), t: 0.0 }
    }

    pub fn grid(&self) -> &Grid2D {
        self.a.grid()
    }

    pub fn max_abs_a(&self) -> f64 {
        self.a.max_abs()
    }
}
