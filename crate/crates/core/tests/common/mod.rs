//! Independent oracles shared by the integration tests. Nothing here calls the
//! code under test except for plain data types.

#![allow(dead_code)]

use std::f64::consts::PI;

use chevron_core::{ComplexField, Grid2D, RealField};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nontrivial (`rho > 0`) equilibria of the phase-gradient system, found by
/// eliminating phi by hand and scanning the resulting polynomial in `u = rho^2`
/// for sign changes on `(0, R^2]` with `subdivisions` cells, then bisecting.
///
/// With `s = phi - c1 chi`, `R^2 = 1 - (1 - c1^2) chi^2`:
///   rho-equation  ->  s^2 = R^2 - u
///   phi-equation  ->  phi (u - h) = c2 chi u
/// so `(u - h)^2 (R^2 - u) - (c2 chi u - c1 chi (u - h))^2 = 0`.
pub fn phase_grad_roots(c1: f64, c2: f64, h: f64, chi: f64, subdivisions: usize) -> Vec<(f64, f64)> {
    let r2 = 1.0 - (1.0 - c1 * c1) * chi * chi;
    if r2 <= 0.0 {
        return Vec::new();
    }
    let p = |u: f64| {
        let w = c2 * chi * u - c1 * chi * (u - h);
        (u - h).powi(2) * (r2 - u) - w * w
    };
    let mut roots = Vec::new();
    let du = r2 / subdivisions as f64;
    let mut push = |u: f64| {
        if u > 0.0 && (u - h).abs() > 1e-12 {
            let phi = c2 * chi * u / (u - h);
            roots.push((u.sqrt(), phi));
        } else if u > 0.0 && c2 * chi == 0.0 {
            // u = h with c2 chi = 0: phi is fixed by the rho-equation instead.
            let s = (r2 - u).max(0.0).sqrt();
            roots.push((u.sqrt(), c1 * chi + s));
            roots.push((u.sqrt(), c1 * chi - s));
        }
    };
    for k in 0..subdivisions {
        let (mut a, mut b) = (k as f64 * du, (k + 1) as f64 * du);
        let (fa, fb) = (p(a), p(b));
        if fa == 0.0 && k > 0 {
            push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if p(m) * p(a) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        push(0.5 * (a + b));
    }
    if p(r2) == 0.0 {
        push(r2);
    }
    // Each root must also satisfy the sign of s implied by the elimination.
    roots.retain(|&(rho, phi)| {
        let s = phi - c1 * chi;
        (s * s - (r2 - rho * rho)).abs() < 1e-8
    });
    roots
}

/// Composite Simpson rule on `[0, lx] x [0, ly]` with `n` (even) panels per axis.
pub fn simpson_2d(f: impl Fn(f64, f64) -> f64, lx: f64, ly: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let w = |k: usize| if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
    let (hx, hy) = (lx / n as f64, ly / n as f64);
    let mut s = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            s += w(i) * w(j) * f(i as f64 * hx, j as f64 * hy);
        }
    }
    s * hx * hy / 9.0
}

/// Discrete Dirichlet eigenvalue of `d^2/dx^2` for mode `k` on `n` interior nodes.
pub fn dirichlet_eigenvalue(k: usize, n: usize, h: f64) -> f64 {
    -4.0 / (h * h) * (k as f64 * PI / (2.0 * (n + 1) as f64)).sin().powi(2)
}

pub fn sine_mode(grid: Grid2D, k: usize, m: usize) -> RealField {
    RealField::from_fn(grid, |x, y| {
        (k as f64 * PI * x / grid.lx()).sin() * (m as f64 * PI * y / grid.ly()).sin()
    })
}

pub fn random_real(grid: Grid2D, rng: &mut ChaCha8Rng, amplitude: f64) -> RealField {
    let v = (0..grid.len()).map(|_| amplitude * (2.0 * rng.random::<f64>() - 1.0)).collect();
    RealField::from_values(grid, v).unwrap()
}

pub fn random_complex(grid: Grid2D, rng: &mut ChaCha8Rng, amplitude: f64) -> ComplexField {
    let v = (0..grid.len())
        .map(|_| Complex64::new(2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0) * amplitude)
        .collect();
    ComplexField::from_values(grid, v).unwrap()
}

/// Smooth nowhere-small amplitude: modulus in `[0.5, 1.5]`, phase a random
/// low-order trigonometric polynomial, so there are no vortices.
pub fn vortex_free(grid: Grid2D, rng: &mut ChaCha8Rng) -> ComplexField {
    let c: Vec<f64> = (0..8).map(|_| 2.0 * rng.random::<f64>() - 1.0).collect();
    let (lx, ly) = (grid.lx(), grid.ly());
    ComplexField::from_fn(grid, |x, y| {
        let (u, v) = (2.0 * PI * x / lx, 2.0 * PI * y / ly);
        let rho = 1.0 + 0.4 * (c[0] * u.sin() * v.cos() + c[1] * (u + v).cos()) * 0.5;
        let psi = 2.0 * c[2] * u.cos() + 1.5 * c[3] * v.sin() + c[4] * (u - 2.0 * v).sin() + 3.0 * c[5];
        Complex64::from_polar(rho, psi)
    })
}

/// Ladyzhenskaya audit corpus: 100 Dirichlet fields, half random nodal noise
/// on assorted grids, half structured (sine modes, bumps, near-step profiles).
pub fn ladyzhenskaya_corpus() -> Vec<RealField> {
    let mut r = rng(2024);
    let mut out = Vec::with_capacity(100);
    for k in 0..50 {
        let n = 8 + 4 * (k % 10);
        let g = Grid2D::new(n, n + k % 3, 1.0 + (k % 4) as f64 * 0.5, 1.0).unwrap();
        out.push(random_real(g, &mut r, 1.0));
    }
    let g = Grid2D::unit_square(48).unwrap();
    for k in 1..=5 {
        for m in 1..=4 {
            out.push(sine_mode(g, k, m));
        }
    }
    for k in 0..15 {
        let (cx, cy) = (0.2 + 0.04 * k as f64, 0.7 - 0.03 * k as f64);
        let w = 0.02 + 0.01 * k as f64;
        out.push(RealField::from_fn(g, |x, y| {
            let b = (-((x - cx).powi(2) + (y - cy).powi(2)) / w).exp();
            b * x * (1.0 - x) * y * (1.0 - y)
        }));
    }
    for k in 0..15 {
        let steep = 5.0 + 10.0 * k as f64;
        out.push(RealField::from_fn(g, |x, y| {
            (steep * (x - 0.5)).tanh() * (PI * x).sin() * (PI * y).sin() + 0.1 * (k as f64 * y).cos() * (PI * y).sin()
        }));
    }
    assert_eq!(out.len(), 100);
    out
}
