use crate::error::{ChevronError, Result};

/// Uniform rectangular grid on `[0, Lx] x [0, Ly]`.
///
/// Only the `nx * ny` interior nodes `(i dx, j dy)`, `1 <= i <= nx`,
/// `1 <= j <= ny` are stored; boundary values are identically zero.
/// Storage is row-major with the x index as the row: node `(i, j)` (0-based)
/// lives at `i * ny + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid2D {
    pub const MIN_NODES: usize = 3;

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        if nx < Self::MIN_NODES || ny < Self::MIN_NODES {
            return Err(ChevronError::InvalidParameter(format!(
                "grid needs at least {} interior nodes per axis, got {nx}x{ny}",
                Self::MIN_NODES
            )));
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(ChevronError::InvalidParameter(format!(
                "side lengths must be positive, got {lx} x {ly}"
            )));
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Unit square with `n x n` interior nodes.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::new(n, n, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn dx(&self) -> f64 {
        self.lx / (self.nx + 1) as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / (self.ny + 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Measure of the domain, `|Omega| = Lx Ly`.
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        i * self.ny + j
    }

    /// x coordinate of the 0-based interior column `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dx()
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dy()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_area() {
        let g = Grid2D::new(3, 7, 2.0, 4.0).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.dy(), 0.5);
        assert_eq!(g.area(), 8.0);
        assert_eq!(g.len(), 21);
        assert_eq!(g.x(0), 0.5);
        assert_eq!(g.y(6), 3.5);
        assert_eq!(g.index(2, 6), 20);
    }

    #[test]
    fn rejects_small_or_degenerate() {
        assert!(Grid2D::new(2, 5, 1.0, 1.0).is_err());
        assert!(Grid2D::new(5, 5, 0.0, 1.0).is_err());
        assert!(Grid2D::new(5, 5, 1.0, f64::INFINITY).is_err());
    }
}
