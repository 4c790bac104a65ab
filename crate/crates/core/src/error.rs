use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum ChevronError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid mismatch: fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in {what} at node ({i}, {j})")]
    NonFinite { what: &'static str, i: usize, j: usize },

    #[error("blow-up at t = {t}: max |A| = {max_abs_a:e}, max |phi| = {max_abs_phi:e}")]
    BlowUp { t: f64, max_abs_a: f64, max_abs_phi: f64 },

    #[error("parameter regime: {0}")]
    Regime(String),

    #[error("phase singularity at node ({i}, {j}): rho = {rho:e} below rho_min")]
    PhaseSingularity { i: usize, j: usize, rho: f64 },

    #[error("({rho}, {phi}) is not an equilibrium: residual {residual:e}")]
    NotAnEquilibrium { rho: f64, phi: f64, residual: f64 },

    #[error("orbit diverged at t = {t}: |state| = {norm:e}")]
    Divergence { t: f64, norm: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ChevronError> = std::result::Result<T, E>;
