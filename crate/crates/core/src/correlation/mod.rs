//! Second-order correlation of the reflected field under weak coherent drive.
//!
//! [`g2_reflected`] works with the truncated amplitude hierarchy (ground,
//! single and double excitation). [`g2_master_equation_oracle`] solves the full
//! two-atom Lindblad equation and applies the quantum regression theorem.

mod hierarchy;
mod master;

pub use hierarchy::{g2_reflected, steady_state_hierarchy, TwoExcitationState};
pub use master::g2_master_equation_oracle;

use crate::linalg::{Vec2, C64};
use crate::params::SystemParams;

/// Flux at or below which g2 is undefined.
pub const MIN_FLUX: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTrace {
    pub taus: Vec<f64>,
    pub g2: Vec<f64>,
    /// Steady-state reflected photon flux used to normalise `g2`.
    pub flux_ss: f64,
}

/// Reflected-output weights `sqrt(G_j / 2) e^{i k_a x_j}`.
pub(crate) fn reflected_weights(params: &SystemParams) -> Vec2 {
    [
        C64::new((0.5 * params.gamma_1d_1).sqrt(), 0.0),
        C64::from_polar((0.5 * params.gamma_1d_2).sqrt(), params.kad),
    ]
}

/// Drive phases `e^{i k_a x_j}`.
pub(crate) fn drive_phases(params: &SystemParams) -> Vec2 {
    [C64::new(1.0, 0.0), C64::from_polar(1.0, params.kad)]
}
