//! Polar form `A = rho e^{i psi}` of the amplitude equation.
//!
//! The polar right-hand side is evaluated with neighbor stencils written in
//! terms of the phase difference `psi_nb - psi_c`, e.g. the Laplacian part of
//! the rho equation is `sum_nb w (rho_nb cos(psi_nb - psi_c) - rho_c)`. This
//! is a consistent second-order discretization of `lap rho - rho |grad psi|^2`
//! that never differences wrapped phases directly, and it is algebraically the
//! Cartesian stencil seen in the rotating frame, so the chain rule holds
//! node by node.

use num_complex::Complex64;

use crate::error::{ChevronError, Result};
use crate::fdops::{d_dy, AnisotropicOperator};
use crate::field::RealField;
use crate::params::ChevronParams;
use crate::state::SimState;

/// Below this modulus the phase is considered undefined.
pub const RHO_MIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarState {
    pub rho: RealField,
    /// Phase in `(-pi, pi]`.
    pub psi: RealField,
    pub phi: RealField,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarRhs {
    pub drho: RealField,
    pub dpsi: RealField,
    pub dphi: RealField,
}

/// Nodewise modulus and argument; the phase is 0 where `A = 0`.
pub fn to_polar(state: &SimState) -> PolarState {
    PolarState {
        rho: state.a.map(|z| z.norm()),
        psi: state.a.map(|z| if z == Complex64::new(0.0, 0.0) { 0.0 } else { z.arg() }),
        phi: state.phi.clone(),
        t: state.t,
    }
}

pub fn from_polar(ps: &PolarState) -> Result<SimState> {
    if let Some(k) = ps.rho.values().iter().position(|&r| !(r >= 0.0)) {
        let ny = ps.rho.grid().ny();
        return Err(ChevronError::InvalidParameter(format!(
            "rho must be >= 0, got {} at node ({}, {})",
            ps.rho.values()[k],
            k / ny,
            k % ny
        )));
    }
    let a = ps.rho.zip_map(&ps.psi, |r, p| if r == 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::from_polar(r, p) })?;
    SimState::new(a, ps.phi.clone(), ps.t)
}

/// `(d rho/dt, d psi/dt, d phi/dt)` from the polar equations.
///
/// Fails with [`ChevronError::PhaseSingularity`] if `rho < RHO_MIN` anywhere.
pub fn rhs_polar(ps: &PolarState, p: &ChevronParams) -> Result<PolarRhs> {
    let grid = *ps.rho.grid();
    ps.rho.ensure_same_grid(ps.psi.grid())?;
    ps.rho.ensure_same_grid(ps.phi.grid())?;
    let (nx, ny) = (grid.nx(), grid.ny());
    if let Some(k) = ps.rho.values().iter().position(|&r| !(r >= RHO_MIN)) {
        return Err(ChevronError::PhaseSingularity { i: k / ny, j: k % ny, rho: ps.rho.values()[k] });
    }

    let rho = ps.rho.values();
    let psi = ps.psi.values();
    let phi = ps.phi.values();
    let l_phi = AnisotropicOperator { d1: p.d1, d2: p.d2, grid }.apply(&ps.phi)?;
    let dy_phi = d_dy(&ps.phi);
    let wx = 1.0 / (grid.dx() * grid.dx());
    let wy = 1.0 / (grid.dy() * grid.dy());
    let wd = 0.5 / grid.dy();

    // Neighbor in the frame of the centre node: rho_nb e^{i (psi_nb - psi_c)}.
    let rel = |k: Option<usize>, psi_c: f64| -> Complex64 {
        match k {
            Some(k) => Complex64::from_polar(rho[k], psi[k] - psi_c),
            None => Complex64::new(0.0, 0.0),
        }
    };

    let mut drho = RealField::zeros(grid);
    let mut dpsi = RealField::zeros(grid);
    let mut dphi = RealField::zeros(grid);
    let inv_tau = 1.0 / p.tau;
    for i in 0..nx {
        for j in 0..ny {
            let c = i * ny + j;
            let (rc, pc, fc) = (rho[c], psi[c], phi[c]);
            let xm = rel((i > 0).then(|| c - ny), pc);
            let xp = rel((i + 1 < nx).then(|| c + ny), pc);
            let ym = rel((j > 0).then(|| c - 1), pc);
            let yp = rel((j + 1 < ny).then(|| c + 1), pc);

            // Re: lap rho - rho |grad psi|^2;  Im: rho lap psi + 2 grad rho . grad psi
            let lap = (xp + xm - 2.0 * rc) * wx + (yp + ym - 2.0 * rc) * wy;
            // Re: d_y rho;  Im: rho d_y psi
            let dy = (yp - ym) * wd;

            drho.values_mut()[c] = (lap.re + rc * (1.0 - fc * fc - rc * rc) + 2.0 * p.c1 * fc * dy.im) * inv_tau;
            dpsi.values_mut()[c] = (lap.im / rc - 2.0 * p.c1 * fc * dy.re / rc + p.beta * dy_phi.values()[c]) * inv_tau;
            dphi.values_mut()[c] = l_phi.values()[c] - p.h * fc + fc * rc * rc - p.c2 * rc * dy.im;
        }
    }
    Ok(PolarRhs { drho, dpsi, dphi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ComplexField;
    use crate::grid::Grid2D;
    use crate::pde::rhs;
    use crate::reduced::{rhs_phase_grad, ReducedParams};
    use std::f64::consts::PI;

    fn smooth_state(g: Grid2D, s: f64) -> SimState {
        let a = ComplexField::from_fn(g, |x, y| {
            let r = 1.0 + 0.4 * (2.0 * PI * x + s).sin() * (PI * y).cos();
            Complex64::from_polar(r, 3.0 * (x + s) * y + s * x * x + 2.0 * s)
        });
        let phi = RealField::from_fn(g, |x, y| 0.7 * (PI * x).sin() * (2.0 * PI * y + s).cos());
        SimState::new(a, phi, 0.0).unwrap()
    }

    #[test]
    fn trivial_conversions() {
        let g = Grid2D::unit_square(4).unwrap();
        let one = SimState::new(ComplexField::constant(g, Complex64::new(1.0, 0.0)), RealField::zeros(g), 0.0).unwrap();
        let ps = to_polar(&one);
        assert!(ps.rho.values().iter().all(|&r| r == 1.0) && ps.psi.values().iter().all(|&p| p == 0.0));
        let i = SimState { a: ComplexField::constant(g, Complex64::i()), ..one.clone() };
        assert!(to_polar(&i).psi.values().iter().all(|&p| (p - PI / 2.0).abs() < 1e-15));
        assert!(to_polar(&SimState::zeros(g)).psi.values().iter().all(|&p| p == 0.0));

        let back = from_polar(&PolarState {
            rho: RealField::constant(g, 2.0),
            psi: RealField::constant(g, PI),
            phi: RealField::zeros(g),
            t: 0.0,
        })
        .unwrap();
        assert!(back.a.values().iter().all(|z| (z - Complex64::new(-2.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn round_trip_and_negative_rho() {
        let g = Grid2D::new(9, 7, 1.0, 2.0).unwrap();
        let s = smooth_state(g, 0.3);
        let back = from_polar(&to_polar(&s)).unwrap();
        for (a, b) in s.a.values().iter().zip(back.a.values()) {
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0));
        }
        let mut ps = to_polar(&s);
        ps.rho.values_mut()[3] = -0.1;
        assert!(from_polar(&ps).is_err());
    }

    #[test]
    fn singular_modulus_is_refused() {
        let g = Grid2D::unit_square(6).unwrap();
        let mut s = smooth_state(g, 0.1);
        s.a.values_mut()[g.index(2, 3)] = Complex64::new(1e-8, 0.0);
        match rhs_polar(&to_polar(&s), &ChevronParams::default()) {
            Err(ChevronError::PhaseSingularity { i, j, .. }) => assert_eq!((i, j), (2, 3)),
            other => panic!("expected phase singularity, got {other:?}"),
        }
    }

    #[test]
    fn chain_rule_matches_cartesian_rhs() {
        let g = Grid2D::new(24, 20, 1.0, 1.3).unwrap();
        let p = ChevronParams { beta: 0.7, ..ChevronParams::default() };
        for s in [0.0, 0.4, 1.1] {
            let st = smooth_state(g, s);
            let cart = rhs(&st, &p).unwrap();
            let pol = rhs_polar(&to_polar(&st), &p).unwrap();
            for k in 0..g.len() {
                let a = st.a.values()[k];
                let w = a.conj() * cart.da_dt.values()[k];
                let (dr, dp) = (w.re / a.norm(), w.im / a.norm_sqr());
                let scale = 1.0 + dr.abs().max(dp.abs());
                assert!((dr - pol.drho.values()[k]).abs() < 1e-10 * scale);
                assert!((dp - pol.dpsi.values()[k]).abs() < 1e-10 * scale);
                assert!((cart.dphi_dt.values()[k] - pol.dphi.values()[k]).abs() < 1e-10 * scale);
            }
        }
    }

    #[test]
    fn constant_phase_shift_is_invisible() {
        let g = Grid2D::unit_square(12).unwrap();
        let p = ChevronParams::default();
        let ps = to_polar(&smooth_state(g, 0.2));
        let base = rhs_polar(&ps, &p).unwrap();
        let shifted = PolarState { psi: ps.psi.map(|v| v + 1.234), ..ps.clone() };
        let other = rhs_polar(&shifted, &p).unwrap();
        for (x, y) in [(&base.drho, &other.drho), (&base.dpsi, &other.dpsi), (&base.dphi, &other.dphi)] {
            for (a, b) in x.values().iter().zip(y.values()) {
                assert!((a - b).abs() < 1e-11 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn unit_modulus_equilibrium_in_the_interior() {
        let g = Grid2D::unit_square(9).unwrap();
        let ps = PolarState {
            rho: RealField::constant(g, 1.0),
            psi: RealField::zeros(g),
            phi: RealField::zeros(g),
            t: 0.0,
        };
        let r = rhs_polar(&ps, &ChevronParams::default()).unwrap();
        for i in 1..8 {
            for j in 1..8 {
                assert!(r.drho.get(i, j).abs() < 1e-12);
            }
        }
        // The boundary-adjacent ring sees the zero ghost values.
        assert!(r.drho.get(0, 4) < -1.0);
    }

    #[test]
    fn linear_phase_reduces_to_phase_gradient_system() {
        let n = 201;
        let g = Grid2D::unit_square(n).unwrap();
        let p = ChevronParams { tau: 1.3, c1: 0.6, c2: 0.8, h: 0.4, ..ChevronParams::default() };
        let (rho0, phi0, chi) = (0.8, 0.3, 0.9);
        let ps = PolarState {
            rho: RealField::constant(g, rho0),
            psi: RealField::from_fn(g, |_, y| chi * y),
            phi: RealField::constant(g, phi0),
            t: 0.0,
        };
        let r = rhs_polar(&ps, &p).unwrap();
        let rp = ReducedParams { tau: p.tau, c1: p.c1, c2: p.c2, h: p.h, chi };
        let (fr, fp) = rhs_phase_grad(rho0, phi0, &rp);
        let c = (n / 2, n / 2);
        let tol = 10.0 * chi * chi * g.dy() * g.dy();
        assert!((r.drho.get(c.0, c.1) - fr).abs() < tol);
        assert!((r.dphi.get(c.0, c.1) - fp).abs() < tol);
        assert!(r.dpsi.get(c.0, c.1).abs() < 1e-9);
    }
}
