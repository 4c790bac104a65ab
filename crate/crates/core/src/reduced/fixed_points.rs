//! Equilibria of the reduced systems with `rho >= 0`.
//!
//! Nontrivial equilibria of the phase-gradient system lie on the circle
//! `rho^2 + (phi - c1 chi)^2 = R^2`, `R^2 = 1 + (c1^2 - 1) chi^2`, and on the
//! curve `phi = c2 chi rho^2 / (rho^2 - h)`. With `u = rho^2` the intersection
//! is a root of the cubic
//!
//! ```text
//! P(u) = u (u - h)^2 + chi^2 (c2 u - c1 (u - h))^2 - R^2 (u - h)^2,
//! ```
//!
//! and only `u` in `[0, R^2]` can be admissible.

use crate::error::{ChevronError, Result};

use super::{classify, jacobian, residual, FixedPoint, ReducedParams, ReducedSystem};

pub const DEFAULT_SCAN_SUBDIVISIONS: usize = 1000;

/// Points closer than this are reported once.
const DEDUP_TOL: f64 = 1e-9;
/// Roots with `|u - h|` at most this sit on the asymptote and are dropped.
const ASYMPTOTE_TOL: f64 = 1e-9;

/// Coefficients `[a0, a1, a2, a3]` of `P(u) = a3 u^3 + a2 u^2 + a1 u + a0`.
pub fn fixed_point_cubic(p: &ReducedParams) -> [f64; 4] {
    let (c1, c2, h, chi) = (p.c1, p.c2, p.h, p.chi);
    let r2 = p.radius_sq();
    let x2 = chi * chi;
    let d = c2 - c1;
    [
        x2 * c1 * c1 * h * h - r2 * h * h,
        h * h + 2.0 * x2 * d * c1 * h + 2.0 * r2 * h,
        -2.0 * h + x2 * d * d - r2,
        1.0,
    ]
}

fn eval(c: &[f64; 4], u: f64) -> f64 {
    ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
}

/// All equilibria with `rho >= 0`, the origin included, each classified.
pub fn fixed_points(system: ReducedSystem, p: &ReducedParams) -> Result<Vec<FixedPoint>> {
    fixed_points_with_resolution(system, p, DEFAULT_SCAN_SUBDIVISIONS)
}

/// As [`fixed_points`], with the root bracketing of the cubic done on
/// `subdivisions` uniform cells of `[0, R^2]` in addition to its monotone
/// pieces. The result does not depend on the resolution.
pub fn fixed_points_with_resolution(
    system: ReducedSystem,
    p: &ReducedParams,
    subdivisions: usize,
) -> Result<Vec<FixedPoint>> {
    p.validate()?;
    if p.h == 0.0 {
        return Err(ChevronError::Degenerate(
            "h = 0 has continua of equilibria: the segment rho = 0, phi in (-1, 1) consists of degenerate \
             unstable critical points, the segments phi = +-1 of degenerate stable ones, and (rho, phi) = (1, 0) \
             is the remaining isolated point; no isolated catalog is returned"
                .into(),
        ));
    }
    if p.h < 0.0 {
        return Err(ChevronError::Regime(format!(
            "h = {} < 0: the dampening is negative and equilibria are not bounded; fixed points need h > 0",
            p.h
        )));
    }

    let mut candidates = vec![(0.0, 0.0)];
    match system {
        ReducedSystem::Uniform => {
            candidates.push((1.0, 0.0));
            if p.h < 1.0 {
                let (r, q) = (p.h.sqrt(), (1.0 - p.h).sqrt());
                candidates.push((r, q));
                candidates.push((r, -q));
            }
        }
        ReducedSystem::PhaseGrad if p.c2 * p.chi == 0.0 => candidates.extend(decoupled_branches(p)),
        ReducedSystem::PhaseGrad => {
            for u in cubic_roots(p, subdivisions) {
                if u <= 1e-12 || (u - p.h).abs() <= ASYMPTOTE_TOL {
                    continue;
                }
                let phi = p.c2 * p.chi * u / (u - p.h);
                candidates.push(newton(system, p, (u.sqrt(), phi)));
            }
        }
    }

    let mut out: Vec<FixedPoint> = Vec::new();
    for (rho, phi) in candidates {
        if !(rho >= 0.0) || out.iter().any(|f| (f.rho - rho).abs() <= DEDUP_TOL && (f.phi - phi).abs() <= DEDUP_TOL) {
            continue;
        }
        out.push(classify(system, p, rho, phi)?);
    }
    out.sort_by(|a, b| a.rho.total_cmp(&b.rho).then(a.phi.total_cmp(&b.phi)));
    Ok(out)
}

/// Equilibria when `c2 chi = 0`: the phi equation factors as `phi (rho^2 - h) = 0`.
fn decoupled_branches(p: &ReducedParams) -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    let chi = p.chi;
    // phi = 0: rho^2 = 1 - chi^2.
    let u = 1.0 - chi * chi;
    if u > 0.0 {
        v.push((u.sqrt(), 0.0));
    }
    // rho^2 = h: (phi - c1 chi)^2 = R^2 - h.
    let s = p.radius_sq() - p.h;
    if s >= 0.0 {
        let w = s.sqrt();
        v.push((p.h.sqrt(), p.c1 * chi + w));
        v.push((p.h.sqrt(), p.c1 * chi - w));
    }
    v
}

/// Real roots of the cubic in `[0, R^2]`.
fn cubic_roots(p: &ReducedParams, subdivisions: usize) -> Vec<f64> {
    let r2 = p.radius_sq();
    if r2 < 0.0 {
        return Vec::new();
    }
    let c = fixed_point_cubic(p);
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs())) * (1.0 + r2).powi(3);
    let zero_tol = 1e-13 * scale;

    let mut breaks: Vec<f64> = (0..=subdivisions.max(1)).map(|k| r2 * k as f64 / subdivisions.max(1) as f64).collect();
    // Critical points of P split [0, R^2] into monotone pieces.
    let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
    let disc = qb * qb - 4.0 * qa * qc;
    let mut crit = Vec::new();
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * s);
        for r in [q / qa, if q != 0.0 { qc / q } else { f64::NAN }] {
            if r.is_finite() && (0.0..=r2).contains(&r) {
                crit.push(r);
            }
        }
    }
    breaks.extend(&crit);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut roots = Vec::new();
    for &b in &breaks {
        if eval(&c, b) == 0.0 {
            roots.push(b);
        }
    }
    for w in breaks.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (eval(&c, a), eval(&c, b));
        if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = eval(&c, m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    // Tangential (double) roots do not change sign.
    for &u in &crit {
        if eval(&c, u).abs() <= zero_tol && !roots.iter().any(|&r| (r - u).abs() <= 1e-7 * (1.0 + r2)) {
            roots.push(u);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Bivariate Newton polish on the full right-hand side. Falls back to the
/// starting point if an iterate does not improve the residual.
fn newton(system: ReducedSystem, p: &ReducedParams, start: (f64, f64)) -> (f64, f64) {
    let (mut r, mut q) = start;
    let mut res = residual(system, r, q, p);
    for _ in 0..50 {
        if res == 0.0 {
            break;
        }
        let (f, g) = super::rhs(system, r, q, p);
        let j = jacobian(system, r, q, p);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dr = (j[1][1] * f - j[0][1] * g) / det;
        let dq = (j[0][0] * g - j[1][0] * f) / det;
        let (nr, nq) = (r - dr, q - dq);
        let nres = residual(system, nr, nq, p);
        if !(nres < res) {
            break;
        }
        (r, q, res) = (nr, nq, nres);
    }
    (r, q)
}

#[cfg(test)]
mod tests {
    use super::super::FixedPointKind;
    use super::*;

    fn pg(c1: f64, c2: f64, h: f64, chi: f64) -> ReducedParams {
        ReducedParams { tau: 1.0, c1, c2, h, chi }
    }

    fn nontrivial(v: &[FixedPoint]) -> usize {
        v.iter().filter(|f| f.rho > 0.0).count()
    }

    #[test]
    fn cubic_vanishes_at_known_equilibria() {
        let p = pg(1.5, 1.0, 0.5, 2.0);
        for f in fixed_points(ReducedSystem::PhaseGrad, &p).unwrap() {
            if f.rho > 0.0 {
                let c = fixed_point_cubic(&p);
                assert!(eval(&c, f.rho * f.rho).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn uniform_catalog() {
        let v = fixed_points(ReducedSystem::Uniform, &pg(0.0, 0.0, 0.25, 0.0)).unwrap();
        let kinds: Vec<_> = v.iter().map(|f| (f.rho, f.phi, f.kind)).collect();
        let s = 0.75f64.sqrt();
        assert_eq!(kinds.len(), 4);
        assert_eq!(kinds[0], (0.0, 0.0, FixedPointKind::Saddle));
        assert_eq!(kinds[1], (0.5, -s, FixedPointKind::SpiralSink));
        assert_eq!(kinds[2], (0.5, s, FixedPointKind::SpiralSink));
        assert_eq!(kinds[3], (1.0, 0.0, FixedPointKind::Saddle));
        assert_eq!(fixed_points(ReducedSystem::Uniform, &pg(0.0, 0.0, 1.5, 0.0)).unwrap().len(), 2);
    }

    #[test]
    fn zero_chi_phase_grad_equals_uniform() {
        for h in [0.1, 0.25, 0.7, 1.0, 2.0] {
            let p = pg(0.6, 1.0, h, 0.0);
            let a = fixed_points(ReducedSystem::Uniform, &p).unwrap();
            let b = fixed_points(ReducedSystem::PhaseGrad, &p).unwrap();
            assert_eq!(a.len(), b.len(), "h = {h}");
            for (x, y) in a.iter().zip(&b) {
                assert!((x.rho - y.rho).abs() < 1e-12 && (x.phi - y.phi).abs() < 1e-12);
                assert_eq!(x.kind, y.kind);
            }
        }
    }

    #[test]
    fn nonpositive_dampening_is_refused() {
        let e = fixed_points(ReducedSystem::Uniform, &pg(0.0, 0.0, 0.0, 0.0)).unwrap_err();
        assert!(e.to_string().contains("rho = 0, phi in (-1, 1)"));
        assert!(fixed_points(ReducedSystem::PhaseGrad, &pg(0.5, 1.0, -0.2, 0.3)).is_err());
    }

    #[test]
    fn residuals_after_polish() {
        for (c1, chi) in [(1.5, 0.5), (1.5, 1.0), (1.5, 2.0), (1.5, 5.0), (0.6, 0.8), (0.2, 0.5), (2.5, 3.0)] {
            let p = pg(c1, 1.0, 0.5, chi);
            for f in fixed_points(ReducedSystem::PhaseGrad, &p).unwrap() {
                assert!(residual(ReducedSystem::PhaseGrad, f.rho, f.phi, &p) <= 1e-10, "{c1} {chi} {f:?}");
            }
        }
    }

    #[test]
    fn subcritical_collapse_beyond_critical_chi() {
        let chi_star = super::super::critical_chi(0.6).unwrap();
        for k in 1..40 {
            let chi = chi_star + 0.05 * k as f64;
            let v = fixed_points(ReducedSystem::PhaseGrad, &pg(0.6, 1.0, 0.5, chi)).unwrap();
            assert_eq!(v.len(), 1, "chi = {chi}");
            assert_eq!((v[0].rho, v[0].phi), (0.0, 0.0));
        }
    }

    #[test]
    fn supercritical_persistence() {
        for chi in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let v = fixed_points(ReducedSystem::PhaseGrad, &pg(1.5, 1.0, 0.5, chi)).unwrap();
            assert!(nontrivial(&v) >= 1, "chi = {chi}");
        }
    }

    #[test]
    fn resolution_does_not_change_the_set() {
        for (c1, chi) in [(1.5, 2.0), (0.6, 0.9), (1.2, 0.7), (2.0, 1.3)] {
            let p = pg(c1, 1.0, 0.5, chi);
            let a = fixed_points_with_resolution(ReducedSystem::PhaseGrad, &p, 100).unwrap();
            let b = fixed_points_with_resolution(ReducedSystem::PhaseGrad, &p, 1000).unwrap();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.rho - y.rho).abs() < 1e-9 && (x.phi - y.phi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mirror_symmetry_without_phase_gradient() {
        let p = pg(0.6, 1.0, 0.3, 0.0);
        let v = fixed_points(ReducedSystem::PhaseGrad, &p).unwrap();
        for f in &v {
            let m = v.iter().find(|g| (g.rho - f.rho).abs() < 1e-9 && (g.phi + f.phi).abs() < 1e-9).unwrap();
            assert_eq!(m.kind, f.kind);
        }
    }

    #[test]
    fn decoupled_branch_without_c2() {
        // c2 = 0: rho^2 = h branch with phi = c1 chi +- sqrt(R^2 - h), and phi = 0 branch.
        let p = pg(0.5, 0.0, 0.3, 0.6);
        let v = fixed_points(ReducedSystem::PhaseGrad, &p).unwrap();
        assert_eq!(nontrivial(&v), 3);
        for f in &v {
            assert!(residual(ReducedSystem::PhaseGrad, f.rho, f.phi, &p) < 1e-14);
        }
    }
}
