use rayon::prelude::*;

use super::{drive_phases, reflected_weights, CorrelationTrace, MIN_FLUX};
use crate::dynamics::time_grid;
use crate::error::{Error, Result};
use crate::linalg::{bilinear, scale_vec, Vec2, C64, ONE};
use crate::model::build_hamiltonian;
use crate::params::SystemParams;

/// Leading-order steady state with the ground amplitude fixed at one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoExcitationState {
    pub c_g: C64,
    pub c_1: C64,
    pub c_2: C64,
    pub c_ee: C64,
}

impl TwoExcitationState {
    pub fn single(&self) -> Vec2 {
        [self.c_1, self.c_2]
    }

    /// `|c_ee| <= 10 max(|c_1|, |c_2|)^2 / |c_g|`.
    pub fn satisfies_scaling(&self) -> bool {
        let m = self.c_1.norm().max(self.c_2.norm());
        self.c_ee.norm() <= 10.0 * m * m / self.c_g.norm()
    }
}

/// Two-excitation energy `-2 Delta + 2 J - i (G_1 + G_2 + 2 G') / 2`.
fn double_excitation_energy(p: &SystemParams) -> C64 {
    C64::new(
        -2.0 * p.delta + 2.0 * p.j_strength,
        -0.5 * (p.gamma_1d_1 + p.gamma_1d_2 + 2.0 * p.gamma_prime),
    )
}

pub fn steady_state_hierarchy(params: &SystemParams) -> Result<TwoExcitationState> {
    params.validate()?;
    params.require_weak_drive()?;
    let omega = params.omega_p_amp;
    let h = build_hamiltonian(params)?;
    let v = drive_phases(params);
    let c = h
        .matrix
        .solve(&scale_vec(&v, C64::new(omega, 0.0)))
        .ok_or(Error::SingularSteadyState("single-excitation block is singular"))?;
    let e_ee = double_excitation_energy(params);
    if e_ee.norm() == 0.0 {
        return Err(Error::SingularSteadyState("two-excitation energy is zero"));
    }
    let c_ee = omega * (v[1] * c[0] + v[0] * c[1]) / e_ee;
    Ok(TwoExcitationState {
        c_g: ONE,
        c_1: c[0],
        c_2: c[1],
        c_ee,
    })
}

/// Normalised reflected-field `g2(tau)` with the drive kept on during the
/// delay, to leading order in the drive.
pub fn g2_reflected(params: &SystemParams, tau_max: f64, n: usize) -> Result<CorrelationTrace> {
    let taus = time_grid(tau_max, n)?;
    let state = steady_state_hierarchy(params)?;
    let m = build_hamiltonian(params)?.matrix;
    let w = reflected_weights(params);
    let c = state.single();
    // Output amplitude b_R|psi>: ground part from the single excitations,
    // single-excitation part from |ee>.
    let c_out = bilinear(&w, &c);
    let flux_ss = c_out.norm_sqr();
    if !(flux_ss > MIN_FLUX) {
        return Err(Error::ZeroFlux);
    }
    let after: Vec2 = [state.c_ee * w[1], state.c_ee * w[0]];
    let settled = scale_vec(&c, c_out);
    let offset = [after[0] - settled[0], after[1] - settled[1]];
    let norm = flux_ss * flux_ss;
    let g2 = taus
        .par_iter()
        .map(|&tau| {
            let moved = m.propagator(tau).mul_vec(&offset);
            let d = [settled[0] + moved[0], settled[1] + moved[1]];
            bilinear(&w, &d).norm_sqr() / norm
        })
        .collect();
    Ok(CorrelationTrace { taus, g2, flux_ss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ANTI_BRAGG_KAD, BRAGG_KAD};
    use std::f64::consts::PI;

    fn driven(kad: f64, j: f64) -> SystemParams {
        SystemParams::with_fixed_length(1.0, 0.0, j, kad, 10.0 * PI).with_drive(1e-4)
    }

    #[test]
    fn zero_drive_leaves_ground_state() {
        let s = steady_state_hierarchy(&driven(BRAGG_KAD, 1.0).with_drive(0.0)).unwrap();
        assert_eq!(s.c_g, ONE);
        assert_eq!(s.c_1.norm() + s.c_2.norm() + s.c_ee.norm(), 0.0);
    }

    #[test]
    fn perturbative_scaling() {
        let p = driven(ANTI_BRAGG_KAD, 3.0).with_delta(3.0);
        let a = steady_state_hierarchy(&p).unwrap();
        let b = steady_state_hierarchy(&p.with_drive(2e-4)).unwrap();
        assert!((b.c_1 - 2.0 * a.c_1).norm() <= 1e-12 * b.c_1.norm());
        assert!((b.c_2 - 2.0 * a.c_2).norm() <= 1e-12 * b.c_2.norm());
        assert!((b.c_ee - 4.0 * a.c_ee).norm() <= 1e-12 * b.c_ee.norm());
        assert!(a.satisfies_scaling());
    }

    #[test]
    fn strong_drive_rejected() {
        let err = steady_state_hierarchy(&driven(BRAGG_KAD, 1.0).with_drive(0.1)).unwrap_err();
        assert!(matches!(err, Error::WeakDriveViolated { .. }));
    }

    #[test]
    fn decoupled_point_has_no_reflected_flux() {
        let j = 0.5 * 0.05f64.exp();
        let p = SystemParams::symmetric(1.0, 0.0, j, ANTI_BRAGG_KAD, 0.05)
            .with_drive(1e-4)
            .with_delta(j);
        assert_eq!(g2_reflected(&p, 10.0, 11).unwrap_err(), Error::ZeroFlux);
    }

    #[test]
    fn bragg_resonance_closed_form() {
        // g2(0) = G^2 / (G^2 + 4 J^2 e^{-2d/L}) on the superradiant line.
        for j in [0.0, 1.5, 3.0] {
            let p = driven(BRAGG_KAD, j);
            let p = p.with_delta(j + p.exchange());
            let tr = g2_reflected(&p, 10.0, 3).unwrap();
            let je = p.exchange();
            let expected = 1.0 / (1.0 + 4.0 * je * je);
            assert!((tr.g2[0] - expected).abs() < 1e-9, "J = {j}: {}", tr.g2[0]);
        }
    }

    #[test]
    fn long_delay_factorises() {
        let p = driven(ANTI_BRAGG_KAD, 3.0).with_delta(3.0);
        let tr = g2_reflected(&p, 40.0, 401).unwrap();
        for (tau, g) in tr.taus.iter().zip(&tr.g2) {
            assert!(*g >= -1e-10);
            if *tau >= 20.0 {
                assert!((g - 1.0).abs() < 0.01);
            }
        }
    }
}
