//! Phase portraits and the `(c1, chi)` equilibrium-count scan. Both are
//! independent per seed or per cell and run on the rayon pool.

use rayon::prelude::*;

use crate::error::Result;

use super::{fixed_points, integrate_sampled, FixedPoint, Orbit, ReducedParams, ReducedSystem};

/// Distance within which an orbit's end point is attributed to an equilibrium.
pub const BASIN_TOL: f64 = 1e-2;

/// Samples kept per orbit, roughly.
const PORTRAIT_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basin {
    Point { rho: f64, phi: f64 },
    Unresolved,
}

impl std::fmt::Display for Basin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basin::Point { rho, phi } => write!(f, "({rho:.6},{phi:.6})"),
            Basin::Unresolved => f.write_str("UNRESOLVED"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitOrbit {
    pub seed: (f64, f64),
    pub orbit: Orbit,
    pub basin: Basin,
}

fn basin_of(end: (f64, f64), equilibria: &[FixedPoint]) -> Basin {
    equilibria
        .iter()
        .map(|f| (f, (f.rho - end.0).hypot(f.phi - end.1)))
        .filter(|&(_, d)| d <= BASIN_TOL)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map_or(Basin::Unresolved, |(f, _)| Basin::Point { rho: f.rho, phi: f.phi })
}

/// Integrates every seed to `t_end` and attributes its end point to the
/// nearest equilibrium within [`BASIN_TOL`]. Output order follows `seeds`.
pub fn portrait(
    system: ReducedSystem,
    p: &ReducedParams,
    seeds: &[(f64, f64)],
    t_end: f64,
    dt: f64,
) -> Result<Vec<PortraitOrbit>> {
    // Without an isolated catalog (h <= 0) every basin is unresolved.
    let equilibria = fixed_points(system, p).unwrap_or_default();
    let steps = (t_end / dt).ceil().max(1.0) as usize;
    let stride = steps.div_ceil(PORTRAIT_SAMPLES);
    seeds
        .par_iter()
        .map(|&seed| {
            let orbit = integrate_sampled(system, p, seed, t_end, dt, stride)?;
            let (_, r, q) = orbit.last().expect("orbit has its initial sample");
            Ok(PortraitOrbit { seed, basin: basin_of((r, q), &equilibria), orbit })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BifurcationCell {
    pub c1: f64,
    pub chi: f64,
    /// Number of equilibria with `rho > 0`.
    pub count: usize,
}

/// Equilibrium counts of the phase-gradient system on the `c1 x chi` grid,
/// row-major in `c1`.
pub fn bifurcation_scan(c1_values: &[f64], chi_values: &[f64], c2: f64, h: f64, tau: f64) -> Result<Vec<BifurcationCell>> {
    let cells: Vec<(f64, f64)> = c1_values.iter().flat_map(|&c1| chi_values.iter().map(move |&chi| (c1, chi))).collect();
    cells
        .par_iter()
        .map(|&(c1, chi)| {
            let p = ReducedParams { tau, c1, c2, h, chi };
            let count = fixed_points(ReducedSystem::PhaseGrad, &p)?.iter().filter(|f| f.rho > 0.0).count();
            Ok(BifurcationCell { c1, chi, count })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::critical_chi;
    use super::*;

    #[test]
    fn empty_seed_list() {
        let p = ReducedParams { h: 0.25, ..ReducedParams::default() };
        assert!(portrait(ReducedSystem::Uniform, &p, &[], 10.0, 0.01).unwrap().is_empty());
    }

    #[test]
    fn first_quadrant_seeds_reach_the_upper_sink() {
        let p = ReducedParams { h: 0.25, ..ReducedParams::default() };
        let seeds: Vec<_> = (1..=4).flat_map(|a| (1..=4).map(move |b| (0.35 * a as f64, 0.35 * b as f64))).collect();
        let out = portrait(ReducedSystem::Uniform, &p, &seeds, 200.0, 0.01).unwrap();
        assert_eq!(out.len(), seeds.len());
        for o in &out {
            match o.basin {
                Basin::Point { rho, phi } => {
                    assert!((rho - 0.5).abs() < 1e-12 && (phi - 0.75f64.sqrt()).abs() < 1e-12, "{:?}", o.seed)
                }
                Basin::Unresolved => panic!("unresolved seed {:?}", o.seed),
            }
            assert!(o.orbit.samples.len() <= PORTRAIT_SAMPLES + 2);
        }
    }

    #[test]
    fn supercritical_dampening_sends_seeds_to_unit_state() {
        let p = ReducedParams { h: 1.5, ..ReducedParams::default() };
        let seeds = [(0.2, 0.5), (1.2, 1.0), (0.6, 0.1)];
        for o in portrait(ReducedSystem::Uniform, &p, &seeds, 200.0, 0.01).unwrap() {
            assert_eq!(o.basin, Basin::Point { rho: 1.0, phi: 0.0 });
        }
    }

    #[test]
    fn counts_vanish_past_critical_chi_for_subcritical_c1() {
        let chis: Vec<f64> = (0..=40).map(|k| 0.05 * k as f64).collect();
        let c1s = [0.0, 0.3, 0.6, 0.9];
        let table = bifurcation_scan(&c1s, &chis, 1.0, 0.5, 1.0).unwrap();
        assert_eq!(table.len(), c1s.len() * chis.len());
        for c in &table {
            if c.chi > critical_chi(c.c1).unwrap() {
                assert_eq!(c.count, 0, "{c:?}");
            }
        }
        // chi = 0 column: the uniform catalog, (1,0) and the two sinks.
        assert!(table.iter().filter(|c| c.chi == 0.0).all(|c| c.count == 3));
    }

    #[test]
    fn supercritical_row_keeps_an_equilibrium() {
        let chis: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
        for c in bifurcation_scan(&[1.5], &chis, 1.0, 0.5, 1.0).unwrap() {
            assert!(c.count >= 1, "{c:?}");
        }
    }
}
