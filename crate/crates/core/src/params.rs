//! Dimensionless system description.
//!
//! Rates are in units of a reference waveguide decay rate, times in its
//! inverse. Atom 1 sits at `x = 0` and atom 2 at `x = d`; geometry enters
//! only through `kad = k_a d` and `d_over_l = d / L`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `k_a d` at Bragg spacing.
pub const BRAGG_KAD: f64 = PI;
/// `k_a d` at anti-Bragg spacing.
pub const ANTI_BRAGG_KAD: f64 = PI / 2.0;

/// Fraction of the larger waveguide rate that the drive may reach before
/// the weak-drive expansion is considered invalid.
pub const WEAK_DRIVE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Waveguide decay rate of atom 1.
    pub gamma_1d_1: f64,
    /// Waveguide decay rate of atom 2.
    pub gamma_1d_2: f64,
    /// Free-space decay rate, same for both atoms.
    pub gamma_prime: f64,
    /// Bound-state mediated interaction strength.
    pub j_strength: f64,
    pub kad: f64,
    pub d_over_l: f64,
    /// Drive Rabi amplitude.
    pub omega_p_amp: f64,
    /// Probe detuning `omega_p - omega_a`.
    pub delta: f64,
}

impl Default for SystemParams {
    /// Bragg spacing, `J = 1`, `d/L = 0.1`, lossless, undriven.
    fn default() -> Self {
        SystemParams {
            gamma_1d_1: 1.0,
            gamma_1d_2: 1.0,
            gamma_prime: 0.0,
            j_strength: 1.0,
            kad: BRAGG_KAD,
            d_over_l: 0.1,
            omega_p_amp: 0.0,
            delta: 0.0,
        }
    }
}

impl SystemParams {
    /// Equal waveguide rates on both atoms.
    pub fn symmetric(gamma_1d: f64, gamma_prime: f64, j_strength: f64, kad: f64, d_over_l: f64) -> Self {
        SystemParams {
            gamma_1d_1: gamma_1d,
            gamma_1d_2: gamma_1d,
            gamma_prime,
            j_strength,
            kad,
            d_over_l,
            omega_p_amp: 0.0,
            delta: 0.0,
        }
    }

    /// Symmetric system with the bound-state length held at `L = ka_l / k_a`,
    /// so `d/L = kad / ka_l` (the figures use `ka_l = 10 pi`).
    pub fn with_fixed_length(gamma_1d: f64, gamma_prime: f64, j_strength: f64, kad: f64, ka_l: f64) -> Self {
        Self::symmetric(gamma_1d, gamma_prime, j_strength, kad, kad / ka_l)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_drive(mut self, omega_p_amp: f64) -> Self {
        self.omega_p_amp = omega_p_amp;
        self
    }

    pub fn with_kad(mut self, kad: f64) -> Self {
        self.kad = kad;
        self
    }

    pub fn with_rates(mut self, gamma_1d_1: f64, gamma_1d_2: f64) -> Self {
        self.gamma_1d_1 = gamma_1d_1;
        self.gamma_1d_2 = gamma_1d_2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("gamma_1d_1", self.gamma_1d_1),
            ("gamma_1d_2", self.gamma_1d_2),
            ("gamma_prime", self.gamma_prime),
            ("j_strength", self.j_strength),
            ("omega_p_amp", self.omega_p_amp),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if !self.kad.is_finite() || self.kad < 0.0 {
            return Err(Error::invalid("kad", format!("must be finite and >= 0, got {}", self.kad)));
        }
        if !self.d_over_l.is_finite() || self.d_over_l < 0.0 {
            return Err(Error::invalid(
                "d_over_l",
                format!("must be finite and >= 0, got {}", self.d_over_l),
            ));
        }
        if !self.delta.is_finite() {
            return Err(Error::invalid("delta", "must be finite"));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.gamma_1d_1 == self.gamma_1d_2
    }

    pub fn require_symmetric(&self) -> Result<f64> {
        if self.is_symmetric() {
            Ok(self.gamma_1d_1)
        } else {
            Err(Error::AsymmetricInput {
                gamma_1d_1: self.gamma_1d_1,
                gamma_1d_2: self.gamma_1d_2,
            })
        }
    }

    /// `e^{-d/L}`.
    pub fn bound_state_overlap(&self) -> f64 {
        (-self.d_over_l).exp()
    }

    /// `J e^{-d/L}`, the inter-atomic bound-state coupling magnitude.
    pub fn exchange(&self) -> f64 {
        self.j_strength * self.bound_state_overlap()
    }

    /// Drive limit below which the weak-drive expansion holds, measured
    /// against the largest decay rate present.
    pub fn weak_drive_limit(&self) -> f64 {
        let scale = self.gamma_1d_1.max(self.gamma_1d_2).max(self.gamma_prime);
        WEAK_DRIVE_FRACTION * if scale > 0.0 { scale } else { 1.0 }
    }

    pub fn is_weak_drive(&self) -> bool {
        self.omega_p_amp <= self.weak_drive_limit()
    }

    pub(crate) fn require_weak_drive(&self) -> Result<()> {
        if self.is_weak_drive() {
            Ok(())
        } else {
            Err(Error::WeakDriveViolated {
                omega_p: self.omega_p_amp,
                limit: self.weak_drive_limit(),
            })
        }
    }
}

/// Band-edge description used to derive the bound-state length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdgeParams {
    /// Band curvature at the edge.
    pub alpha: f64,
    /// Detuning of the atom from the band edge, `omega_0 - omega_a`.
    pub delta_edge: f64,
    /// Unit-cell length.
    pub d_cell: f64,
}
