use crate::error::{ChevronError, Result};

/// Physical coefficients of the coupled amplitude / director-angle system.
///
/// `tau` scales the amplitude time, `d1`/`d2` are the anisotropic diffusion
/// coefficients of the director angle, `c1`/`c2` the torque couplings, `h` the
/// magnetic dampening and `beta` the phase-gradient coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChevronParams {
    pub tau: f64,
    pub d1: f64,
    pub d2: f64,
    pub c1: f64,
    pub c2: f64,
    pub h: f64,
    pub beta: f64,
}

impl Default for ChevronParams {
    fn default() -> Self {
        Self { tau: 1.0, d1: 1.0, d2: 0.5, c1: 0.5, c2: 1.0, h: 0.5, beta: 0.5 }
    }
}

impl ChevronParams {
    pub fn new(tau: f64, d1: f64, d2: f64, c1: f64, c2: f64, h: f64, beta: f64) -> Result<Self> {
        let p = Self { tau, d1, d2, c1, c2, h, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("tau", self.tau), ("D1", self.d1), ("D2", self.d2)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(ChevronError::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        let nonneg = [("c1", self.c1), ("c2", self.c2), ("h", self.h)];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ChevronError::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !self.beta.is_finite() {
            return Err(ChevronError::InvalidParameter(format!("beta must be finite, got {}", self.beta)));
        }
        Ok(())
    }

    /// True iff the energy estimates close: `c1 < 1`, or `c1 >= 2 c2 > 0`.
    pub fn dissipative_regime(&self) -> bool {
        self.c1 < 1.0 || (self.c2 > 0.0 && self.c1 >= 2.0 * self.c2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_diffusion() {
        assert!(ChevronParams::new(1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ChevronParams::new(-1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0).is_err());
        assert!(ChevronParams::new(1.0, 1.0, 1.0, -0.1, 0.0, 1.0, 0.0).is_err());
        assert!(ChevronParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, f64::NAN).is_err());
        assert!(ChevronParams::new(1.0, 1.0, 1.0, 0.0, 0.0, 0.0, -3.0).is_ok());
    }

    #[test]
    fn regime_query() {
        let base = ChevronParams::default();
        let with = |c1, c2| ChevronParams { c1, c2, ..base };
        assert!(with(0.0, 0.0).dissipative_regime());
        assert!(with(0.99, 5.0).dissipative_regime());
        assert!(with(2.0, 1.0).dissipative_regime());
        assert!(!with(2.0, 1.5).dissipative_regime());
        assert!(!with(1.0, 0.0).dissipative_regime());
        assert!(!with(1.5, 0.0).dissipative_regime());
    }
}
