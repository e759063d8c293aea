//! Lindblad master equation for two two-level atoms, used as an independent
//! check of the amplitude hierarchy.
//!
//! Local basis per atom is (e, g); the product basis is |ee>, |eg>, |ge>, |gg>
//! and superoperators act on column-stacked density matrices. At weak drive
//! the populations span many orders of magnitude, so every element
//! `rho_mn` is stored divided by `s^(n_m + n_n)` with `s` the drive strength
//! and `n` the excitation number. This diagonal similarity transform leaves
//! the spectrum unchanged and keeps all entries of order one.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{drive_phases, reflected_weights, CorrelationTrace, MIN_FLUX};
use crate::dynamics::time_grid;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::build_hamiltonian;
use crate::params::SystemParams;

const DIM: usize = 4;
const EXCITATIONS: [i32; DIM] = [2, 1, 1, 0];
const GROUND: usize = 3;
/// Singular values below this fraction of the largest span the kernel.
const KERNEL_TOL: f64 = 1e-10;

type Op = DMatrix<C64>;

fn lowering(atom: usize) -> Op {
    let sm = Op::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let id = Op::identity(2, 2);
    if atom == 0 {
        sm.kronecker(&id)
    } else {
        id.kronecker(&sm)
    }
}

fn dagger(a: &Op) -> Op {
    a.adjoint()
}

/// `vec(A X B) = (B^T kron A) vec(X)` for column stacking.
fn liouvillian(h: &Op, jumps: &[Op]) -> Op {
    let id = Op::identity(DIM, DIM);
    let mi = C64::new(0.0, -1.0);
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * mi;
    for c in jumps {
        let cdc = dagger(c) * c;
        l += c.conjugate().kronecker(c);
        l -= id.kronecker(&cdc) * C64::new(0.5, 0.0);
        l -= cdc.transpose().kronecker(&id) * C64::new(0.5, 0.0);
    }
    l
}

struct Scaled {
    /// Scaled Liouvillian `D^{-1} L D`.
    l: Op,
    weights: Vec<f64>,
}

impl Scaled {
    fn new(l: &Op, s: f64) -> Self {
        let weights: Vec<f64> = (0..DIM * DIM)
            .map(|k| {
                let (i, j) = (k % DIM, k / DIM);
                s.powi(EXCITATIONS[i] + EXCITATIONS[j])
            })
            .collect();
        let scaled = Op::from_fn(DIM * DIM, DIM * DIM, |a, b| l[(a, b)] * (weights[b] / weights[a]));
        Scaled { l: scaled, weights }
    }

    fn to_scaled(&self, x: &Op) -> DVector<C64> {
        DVector::from_fn(DIM * DIM, |k, _| x[(k % DIM, k / DIM)] / self.weights[k])
    }

    fn unscale(&self, v: &DVector<C64>) -> Op {
        Op::from_fn(DIM, DIM, |i, j| v[i + DIM * j] * self.weights[i + DIM * j])
    }
}

/// Long-time limit of `e^{L t} |gg><gg|`, via the biorthogonal projector onto
/// the Liouvillian kernel. The kernel can be larger than one-dimensional when
/// a dark state decouples from every channel.
fn steady_state(sc: &Scaled) -> Result<Op> {
    let svd = sc.l.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let s_max = svd.singular_values.max();
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= KERNEL_TOL * s_max)
        .collect();
    if kernel.is_empty() {
        return Err(Error::NonConvergedSteadyState(format!(
            "no singular value below {KERNEL_TOL:e} of the largest"
        )));
    }
    let k = kernel.len();
    let right = Op::from_fn(DIM * DIM, k, |a, c| v_t[(kernel[c], a)].conj());
    let left = Op::from_fn(DIM * DIM, k, |a, c| u[(a, kernel[c])]);
    let gram = left.adjoint() * &right;
    let gram_inv = gram
        .try_inverse()
        .ok_or_else(|| Error::NonConvergedSteadyState("kernel projector is singular".into()))?;
    let mut rho0 = DVector::<C64>::zeros(DIM * DIM);
    rho0[GROUND + DIM * GROUND] = C64::new(1.0, 0.0);
    let proj = &right * (gram_inv * (left.adjoint() * rho0));
    let rho = sc.unscale(&proj);
    let tr = rho.trace();
    if tr.norm() == 0.0 || !tr.re.is_finite() {
        return Err(Error::NonConvergedSteadyState("steady state has zero trace".into()));
    }
    Ok(rho / tr)
}

pub fn g2_master_equation_oracle(params: &SystemParams, tau_max: f64, n: usize) -> Result<CorrelationTrace> {
    let taus = time_grid(tau_max, n)?;
    params.validate()?;
    params.require_weak_drive()?;
    let omega = params.omega_p_amp;
    if omega <= 0.0 {
        return Err(Error::ZeroFlux);
    }
    let m = build_hamiltonian(params)?.matrix;
    let sigma = [lowering(0), lowering(1)];
    let raise = [dagger(&sigma[0]), dagger(&sigma[1])];

    // Hermitian part of the effective matrix plus the coherent drive.
    let mut h = Op::zeros(DIM, DIM);
    for j in 0..2 {
        for k in 0..2 {
            let herm = 0.5 * (m.get(j, k) + m.get(k, j).conj());
            h += &raise[j] * &sigma[k] * herm;
        }
    }
    let phase = drive_phases(params);
    for j in 0..2 {
        h -= (&raise[j] * phase[j] + &sigma[j] * phase[j].conj()) * C64::new(omega, 0.0);
    }

    let w = reflected_weights(params);
    let b_r = &sigma[0] * w[0] + &sigma[1] * w[1];
    let b_l = &sigma[0] * w[0].conj() + &sigma[1] * w[1].conj();
    let loss = C64::new(params.gamma_prime.sqrt(), 0.0);
    let jumps = [b_r.clone(), b_l, &sigma[0] * loss, &sigma[1] * loss];

    let sc = Scaled::new(&liouvillian(&h, &jumps), omega);
    let rho = steady_state(&sc)?;
    let number = dagger(&b_r) * &b_r;
    let flux_ss = (&number * &rho).trace().re;
    if !(flux_ss > MIN_FLUX) {
        return Err(Error::ZeroFlux);
    }
    let kicked = sc.to_scaled(&(&b_r * &rho * dagger(&b_r)));
    let norm = flux_ss * flux_ss;
    let g2 = taus
        .par_iter()
        .map(|&tau| {
            let moved = (&sc.l * C64::new(tau, 0.0)).exp() * &kicked;
            (&number * sc.unscale(&moved)).trace().re / norm
        })
        .collect();
    Ok(CorrelationTrace { taus, g2, flux_ss })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::g2_reflected;
    use crate::params::{ANTI_BRAGG_KAD, BRAGG_KAD};
    use std::f64::consts::PI;

    #[test]
    fn liouvillian_preserves_trace() {
        let h = lowering(0).adjoint() * lowering(1) * C64::new(0.3, 0.0);
        let l = liouvillian(&(h.clone() + h.adjoint()), &[lowering(0), lowering(1) * C64::new(0.5, 0.2)]);
        // Tr(L rho) = 0 for every rho: the row picking out the trace vanishes.
        for col in 0..DIM * DIM {
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..DIM {
                tr += l[(i + DIM * i, col)];
            }
            assert!(tr.norm() < 1e-15);
        }
    }

    #[test]
    fn agrees_with_hierarchy_at_bragg_resonance() {
        let j = 1.5;
        let p = SystemParams::with_fixed_length(1.0, 0.0, j, BRAGG_KAD, 10.0 * PI).with_drive(1e-4);
        let p = p.with_delta(j + p.exchange());
        let a = g2_reflected(&p, 10.0, 41).unwrap();
        let b = g2_master_equation_oracle(&p, 10.0, 41).unwrap();
        for (x, y) in a.g2.iter().zip(&b.g2) {
            assert!((x - y).abs() <= 1e-5 * y.abs().max(1.0), "{x} vs {y}");
        }
        assert!((a.flux_ss - b.flux_ss).abs() < 1e-6 * a.flux_ss);
    }

    #[test]
    fn single_emitter_antibunches() {
        let p = SystemParams::symmetric(1.0, 0.1, 0.0, 1.0, 0.1)
            .with_rates(1.0, 0.0)
            .with_drive(1e-4);
        let tr = g2_master_equation_oracle(&p, 5.0, 3).unwrap();
        assert!(tr.g2[0].abs() < 1e-6, "{}", tr.g2[0]);
        let h = g2_reflected(&p, 5.0, 3).unwrap();
        assert!(h.g2[0].abs() < 1e-12);
    }

    #[test]
    fn no_waveguide_coupling_no_flux() {
        let p = SystemParams::symmetric(0.0, 0.5, 1.0, ANTI_BRAGG_KAD, 0.05).with_drive(1e-4);
        assert_eq!(g2_master_equation_oracle(&p, 1.0, 3).unwrap_err(), Error::ZeroFlux);
        assert_eq!(g2_reflected(&p, 1.0, 3).unwrap_err(), Error::ZeroFlux);
    }
}
