use super::{Stepper, StepperConfig};
use crate::error::{ChevronError, Result};
use crate::params::ChevronParams;
use crate::state::SimState;

/// Receives read-only snapshots at the observation cadence.
pub trait Observer {
    fn observe(&mut self, state: &SimState) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(&SimState) -> Result<()>,
{
    fn observe(&mut self, state: &SimState) -> Result<()> {
        self(state)
    }
}

/// Advances `initial` to `t_end`, notifying every observer at `initial.t`,
/// at `initial.t + k * observe_every` and at `t_end`.
///
/// Steps are shortened to land exactly on each observation time, so the
/// stepping sequence restarted from any observed state reproduces the rest of
/// the trajectory.
pub fn run(
    initial: SimState,
    p: &ChevronParams,
    cfg: &StepperConfig,
    t_end: f64,
    observe_every: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<SimState> {
    let stepper = Stepper::new(*p, *initial.grid(), *cfg)?;
    run_with(&stepper, initial, t_end, observe_every, observers)
}

pub(crate) fn run_with(
    stepper: &Stepper,
    initial: SimState,
    t_end: f64,
    observe_every: f64,
    observers: &mut [&mut dyn Observer],
) -> Result<SimState> {
    let t0 = initial.t;
    if !(t_end.is_finite() && t_end >= t0) {
        return Err(ChevronError::InvalidParameter(format!("t_end = {t_end} precedes the initial time {t0}")));
    }
    if !(observe_every.is_finite() && observe_every > 0.0) {
        return Err(ChevronError::InvalidParameter(format!("observe_every must be > 0, got {observe_every}")));
    }
    notify(observers, &initial)?;
    if t_end == t0 {
        return Ok(initial);
    }
    let intervals = (((t_end - t0) / observe_every) - 1e-9).ceil().max(1.0) as u64;
    let mut state = initial;
    for k in 1..=intervals {
        let target = if k == intervals { t_end } else { t0 + k as f64 * observe_every };
        state = advance_to(stepper, state, target)?;
        notify(observers, &state)?;
    }
    Ok(state)
}

fn notify(observers: &mut [&mut dyn Observer], state: &SimState) -> Result<()> {
    observers.iter_mut().try_for_each(|o| o.observe(state))
}

fn advance_to(stepper: &Stepper, mut state: SimState, target: f64) -> Result<SimState> {
    let dt = stepper.config().dt;
    let eps = 1e-12 * target.abs().max(1.0);
    loop {
        let remaining = target - state.t;
        if remaining <= eps {
            state.t = target;
            return Ok(state);
        }
        if remaining <= dt * (1.0 + 1e-9) {
            state = stepper.step_by(&state, remaining)?;
            state.t = target;
            return Ok(state);
        }
        state = stepper.step_by(&state, dt)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ComplexField, RealField};
    use crate::grid::Grid2D;
    use crate::pde::Scheme;

    fn setup() -> (SimState, ChevronParams, StepperConfig) {
        let g = Grid2D::unit_square(8).unwrap();
        let a = RealField::from_fn(g, |x, y| x * y * (1.0 - x) * (1.0 - y) * 4.0).to_complex();
        let phi = RealField::from_fn(g, |x, y| (x * 3.0).sin() * y * (1.0 - y));
        (
            SimState::new(a, phi, 0.0).unwrap(),
            ChevronParams::default(),
            StepperConfig::new(Scheme::ImexEuler, 0.013).unwrap(),
        )
    }

    #[test]
    fn zero_duration_returns_initial() {
        let (s, p, cfg) = setup();
        let mut count = 0;
        let mut obs = |_: &SimState| -> Result<()> {
            count += 1;
            Ok(())
        };
        let out = run(s.clone(), &p, &cfg, 0.0, 0.1, &mut [&mut obs]).unwrap();
        assert_eq!(out, s);
        assert_eq!(count, 1);
    }

    #[test]
    fn observer_count_and_times() {
        let (s, p, cfg) = setup();
        for (t_end, every) in [(1.0, 0.1), (0.95, 0.1), (0.3, 0.25), (0.05, 1.0)] {
            let mut times = Vec::new();
            let mut obs = |st: &SimState| -> Result<()> {
                times.push(st.t);
                Ok(())
            };
            let out = run(s.clone(), &p, &cfg, t_end, every, &mut [&mut obs]).unwrap();
            let expected = ((t_end - 0.0) / every - 1e-9_f64).ceil() as usize + 1;
            assert_eq!(times.len(), expected, "t_end {t_end} every {every}");
            assert_eq!(out.t, t_end);
            assert_eq!(*times.last().unwrap(), t_end);
            assert!(times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn backwards_run_is_rejected() {
        let (mut s, p, cfg) = setup();
        s.t = 1.0;
        assert!(run(s, &p, &cfg, 0.5, 0.1, &mut []).is_err());
    }

    #[test]
    fn observer_errors_propagate() {
        let (s, p, cfg) = setup();
        let mut obs = |st: &SimState| -> Result<()> {
            if st.t > 0.2 {
                Err(ChevronError::Format("stop".into()))
            } else {
                Ok(())
            }
        };
        assert!(run(s, &p, &cfg, 1.0, 0.1, &mut [&mut obs]).is_err());
    }

    #[test]
    fn decoupled_amplitude_keeps_phi_zero() {
        let g = Grid2D::unit_square(10).unwrap();
        let p = ChevronParams { c1: 0.0, c2: 0.0, beta: 0.0, ..ChevronParams::default() };
        let a = ComplexField::from_fn(g, |x, y| num_complex::Complex64::new(x * (1.0 - x), y * (1.0 - y)) * 3.0);
        let s = SimState::new(a, RealField::zeros(g), 0.0).unwrap();
        for scheme in [Scheme::Rk4Explicit, Scheme::ImexEuler] {
            let cfg = StepperConfig::new(scheme, 1e-4).unwrap();
            let out = run(s.clone(), &p, &cfg, 0.01, 0.005, &mut []).unwrap();
            assert_eq!(out.phi.max_abs(), 0.0);
        }
    }
}
