//! Numerical laboratory for the chevron-pattern amplitude equations
//!
//! ```text
//! tau dA/dt   = A + lap A - phi^2 A - |A|^2 A - 2 i c1 phi d_y A + i beta A d_y phi
//! dphi/dt     = D1 d_xx phi + D2 d_yy phi - h phi + phi |A|^2 - c2 Im(conj(A) d_y A)
//! ```
//!
//! on a rectangle with homogeneous Dirichlet conditions, together with the
//! energy diagnostics of the system and its reduced two-dimensional ODEs.

// `!(x >= y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod energy;
pub mod error;
pub mod fdops;
pub mod field;
pub mod grid;
pub mod params;
pub mod pde;
pub mod polar;
pub mod reduced;
pub mod snapshot;
pub mod state;

pub use error::{ChevronError, Result};
pub use field::{ComplexField, Field, RealField};
pub use grid::Grid2D;
pub use params::ChevronParams;
pub use state::SimState;
