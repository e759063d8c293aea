//! Single-photon transmission and reflection.
//!
//! Two routes are provided: the spectral sum over the biorthogonal
//! eigenmodes, and a direct linear solve of the driven single-excitation
//! steady state. They agree wherever both are defined; the spectral route
//! falls back to the resolvent solve when the spectrum is degenerate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, inner, Mat2, Vec2, C64, I, ONE};
use crate::model::{build_hamiltonian, eigensolve};
use crate::params::SystemParams;
use crate::signal::{find_peaks, linspace, unwrap_phase, Peak};

/// Minimum prominence of a reflection peak in [`peak_analysis`].
pub const DEFAULT_PROMINENCE: f64 = 0.01;

/// Relative size below which an eigenvalue counts as a pole on the real axis.
const POLE_TOL: f64 = 1e-13;
/// Relative residue below which such a pole is treated as decoupled.
const RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub delta: f64,
    pub t_amp: C64,
    pub r_amp: C64,
    /// `|t|^2`
    pub transmission: f64,
    /// `|r|^2`
    pub reflection: f64,
    /// `arg t` in `(-pi, pi]`.
    pub phase: f64,
    /// `1 - T - R`, the fraction scattered into free space.
    pub loss: f64,
    /// False for a point sitting on a real pole of the resolvent.
    pub valid: bool,
}

impl ScatterPoint {
    pub fn from_amplitudes(delta: f64, t_amp: C64, r_amp: C64) -> Self {
        let transmission = t_amp.norm_sqr();
        let reflection = r_amp.norm_sqr();
        ScatterPoint {
            delta,
            t_amp,
            r_amp,
            transmission,
            reflection,
            phase: t_amp.arg(),
            loss: 1.0 - transmission - reflection,
            valid: true,
        }
    }

    pub fn invalid(delta: f64) -> Self {
        let nan = C64::new(f64::NAN, f64::NAN);
        ScatterPoint {
            delta,
            t_amp: nan,
            r_amp: nan,
            transmission: f64::NAN,
            reflection: f64::NAN,
            phase: f64::NAN,
            loss: f64::NAN,
            valid: false,
        }
    }
}

/// Waveguide coupling vector `W_j = sqrt(Gamma_j) e^{i k_a x_j}` with
/// `x_1 = 0`, `x_2 = d`. For equal rates this is `sqrt(Gamma) V`.
pub fn coupling_vector(params: &SystemParams) -> Vec2 {
    [
        C64::new(params.gamma_1d_1.sqrt(), 0.0),
        C64::from_polar(params.gamma_1d_2.sqrt(), params.kad),
    ]
}

fn params_at(params: &SystemParams, delta: f64) -> Result<SystemParams> {
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    Ok(params.with_delta(delta))
}

/// `t = 1 + (i/2) sum_j (W^dag psi_j^R)(psi_j^L W)/E_j`,
/// `r = (i/2) sum_j (W^T psi_j^R)(psi_j^L W)/E_j`.
pub fn scatter_amplitudes(params: &SystemParams, delta: f64) -> Result<ScatterPoint> {
    let p = params_at(params, delta)?;
    let h = build_hamiltonian(&p)?;
    let w = coupling_vector(&p);
    let es = eigensolve(&h);
    if es.degenerate {
        return resolvent_amplitudes(&h.matrix, &w, delta);
    }
    let half_i = I * 0.5;
    let mut t = ONE;
    let mut r = C64::new(0.0, 0.0);
    let pole_tol = POLE_TOL * (h.matrix.norm() + 1.0);
    let w_scale = inner(&w, &w).re;
    for (e, right, left) in es.pairs() {
        let into_mode = bilinear(&left, &w);
        let out_t = inner(&w, &right);
        let out_r = bilinear(&w, &right);
        if e.norm() <= pole_tol {
            // A mode on the real axis is dark to the waveguide; it only
            // matters if it still has a residue.
            let residue = into_mode.norm() * out_t.norm().max(out_r.norm());
            if residue > RESIDUE_TOL * w_scale {
                return Err(Error::SingularResolvent { delta });
            }
            continue;
        }
        t += half_i * out_t * into_mode / e;
        r += half_i * out_r * into_mode / e;
    }
    Ok(ScatterPoint::from_amplitudes(delta, t, r))
}

/// Same amplitudes from `x = M^{-1} W` without any spectral decomposition.
fn resolvent_amplitudes(m: &Mat2, w: &Vec2, delta: f64) -> Result<ScatterPoint> {
    let x = m.solve(w).ok_or(Error::SingularResolvent { delta })?;
    let t = ONE + I * 0.5 * inner(w, &x);
    let r = I * 0.5 * bilinear(w, &x);
    Ok(ScatterPoint::from_amplitudes(delta, t, r))
}

/// Input-output route: drive the dimer with a weak coherent field entering
/// from the left and read the forward and backward output fields from the
/// steady-state atomic amplitudes.
pub fn scatter_via_steady_state(params: &SystemParams, delta: f64) -> Result<ScatterPoint> {
    let p = params_at(params, delta)?;
    let (t, r) = steady_state_route(&p, delta, false)?;
    Ok(ScatterPoint::from_amplitudes(delta, t, r))
}

/// Transmission for a photon entering from the right; equals the left-incident
/// `t` by reciprocity.
pub fn scatter_from_right(params: &SystemParams, delta: f64) -> Result<ScatterPoint> {
    let p = params_at(params, delta)?;
    let (t, r) = steady_state_route(&p, delta, true)?;
    Ok(ScatterPoint::from_amplitudes(delta, t, r))
}

fn steady_state_route(p: &SystemParams, delta: f64, from_right: bool) -> Result<(C64, C64)> {
    let h = build_hamiltonian(p)?;
    // Amplitudes are linear in the drive; any positive strength gives the
    // same t, r.
    let omega = if p.omega_p_amp > 0.0 { p.omega_p_amp } else { 1.0 };
    let sign = if from_right { -1.0 } else { 1.0 };
    let root = [p.gamma_1d_1.sqrt(), p.gamma_1d_2.sqrt()];
    let position_phase = [0.0, p.kad];
    // H_drive = -Omega sum_j sqrt(G_j) (e^{+-ik x_j} sigma_eg^j + h.c.).
    let drive: Vec2 = [0, 1].map(|j| -omega * C64::from_polar(root[j], sign * position_phase[j]));
    // i dc/dt = M c + drive = 0
    let rhs = [-drive[0], -drive[1]];
    let c = h.matrix.solve(&rhs).ok_or(Error::SingularResolvent { delta })?;
    let mut forward = C64::new(0.0, 0.0);
    let mut backward = C64::new(0.0, 0.0);
    for j in 0..2 {
        forward += C64::from_polar(root[j], -sign * position_phase[j]) * c[j];
        backward += C64::from_polar(root[j], sign * position_phase[j]) * c[j];
    }
    let t = ONE + I * 0.5 * forward / omega;
    let r = I * 0.5 * backward / omega;
    Ok((t, r))
}

/// Uniformly sampled spectrum over `[delta_min, delta_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub deltas: Vec<f64>,
    pub points: Vec<ScatterPoint>,
    /// `arg t` continued across branch cuts from the left endpoint.
    pub phase_unwrapped: Vec<f64>,
}

impl SpectrumGrid {
    pub fn reflection(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.reflection).collect()
    }

    pub fn transmission(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.transmission).collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phase).collect()
    }

    pub fn invalid_count(&self) -> usize {
        self.points.iter().filter(|p| !p.valid).count()
    }
}

pub fn spectrum(params: &SystemParams, delta_min: f64, delta_max: f64, n: usize) -> Result<SpectrumGrid> {
    params.validate()?;
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 points, got {n}")));
    }
    if !(delta_min < delta_max) || !delta_min.is_finite() || !delta_max.is_finite() {
        return Err(Error::invalid("delta_min", "require finite delta_min < delta_max"));
    }
    let deltas = linspace(delta_min, delta_max, n);
    let points = deltas
        .par_iter()
        .map(|&d| match scatter_amplitudes(params, d) {
            Ok(p) => Ok(p),
            Err(Error::SingularResolvent { .. }) => Ok(ScatterPoint::invalid(d)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let phase: Vec<f64> = points.iter().map(|p| p.phase).collect();
    let phase_unwrapped = unwrap_phase(&phase);
    Ok(SpectrumGrid {
        deltas,
        points,
        phase_unwrapped,
    })
}

/// Reflection peaks with prominence at least [`DEFAULT_PROMINENCE`].
///
/// Returns an empty list when nothing clears the threshold and
/// [`Error::EmptySpectrum`] when the grid holds no valid samples.
pub fn peak_analysis(grid: &SpectrumGrid) -> Result<Vec<Peak>> {
    peak_analysis_with(grid, DEFAULT_PROMINENCE)
}

pub fn peak_analysis_with(grid: &SpectrumGrid, min_prominence: f64) -> Result<Vec<Peak>> {
    if grid.points.iter().all(|p| !p.valid) {
        return Err(Error::EmptySpectrum);
    }
    Ok(find_peaks(&grid.deltas, &grid.reflection(), min_prominence))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ANTI_BRAGG_KAD, BRAGG_KAD};
    use std::f64::consts::PI;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn perfect_transmission_with_pi_phase() {
        let j = 0.5 * 0.05f64.exp();
        let p = SystemParams::symmetric(1.0, 0.0, j, ANTI_BRAGG_KAD, 0.05);
        let s = scatter_amplitudes(&p, j).unwrap();
        assert!(close(s.t_amp, C64::new(-1.0, 0.0), 1e-12));
        assert!((s.transmission - 1.0).abs() < 1e-12);
        assert!((s.phase.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn uncoupled_atoms_are_transparent() {
        let p = SystemParams::symmetric(0.0, 0.3, 2.0, 1.1, 0.2);
        for d in [-3.0, 0.0, 0.4, 5.0] {
            let s = scatter_amplitudes(&p, d).unwrap();
            assert_eq!(s.t_amp, ONE);
            assert_eq!(s.r_amp, C64::new(0.0, 0.0));
            let s2 = scatter_via_steady_state(&p, d).unwrap();
            assert!(close(s2.t_amp, ONE, 1e-15));
        }
    }

    #[test]
    fn bragg_superradiant_resonance_reflects() {
        let p = SystemParams::with_fixed_length(1.0, 0.0, 1.0, BRAGG_KAD, 10.0 * PI);
        let d = p.j_strength + p.exchange();
        for s in [scatter_amplitudes(&p, d).unwrap(), scatter_via_steady_state(&p, d).unwrap()] {
            assert!(s.t_amp.norm() < 1e-12);
            assert!((s.reflection - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupling_point_never_reflects() {
        let j = 0.5 * 0.05f64.exp();
        let p = SystemParams::symmetric(1.0, 0.3, j, ANTI_BRAGG_KAD, 0.05);
        for k in 0..41 {
            let d = -10.0 + 0.5 * k as f64;
            assert!(scatter_amplitudes(&p, d).unwrap().r_amp.norm() < 1e-12);
        }
    }

    #[test]
    fn single_atom_limit_sets_convention() {
        // Atom 2 detached: t = Delta / (Delta + i G/2).
        let p = SystemParams::symmetric(1.0, 0.0, 0.0, 1.0, 0.1).with_rates(1.0, 0.0);
        for d in [-1.0, 0.0, 0.3] {
            let s = scatter_amplitudes(&p, d).unwrap();
            let expected = C64::new(d, 0.0) / C64::new(d, 0.5);
            assert!(close(s.t_amp, expected, 1e-14));
        }
    }

    #[test]
    fn dark_pole_is_skipped() {
        // Bragg, lossless: |B> has a real eigenvalue -Delta + J - J e^{-d/L}
        // that vanishes at Delta = 0 but does not couple to the guide.
        let p = SystemParams::symmetric(1.0, 0.0, 0.0, BRAGG_KAD, 0.1);
        let s = scatter_amplitudes(&p, 0.0).unwrap();
        assert!(s.valid);
        assert!(s.t_amp.norm() < 1e-12);
        assert!((s.reflection - 1.0).abs() < 1e-12);
        let grid = spectrum(&p, -1.0, 1.0, 3).unwrap();
        assert_eq!(grid.invalid_count(), 0);
    }

    #[test]
    fn singular_linear_solve_is_reported() {
        // Exactly singular M on the direct route.
        let p = SystemParams::symmetric(1.0, 0.0, 0.0, 1.0, 0.1).with_rates(1.0, 0.0);
        let err = scatter_via_steady_state(&p.with_rates(0.0, 0.0), 0.0).unwrap_err();
        assert!(matches!(err, Error::SingularResolvent { .. }));
    }

    #[test]
    fn spectrum_grid_shape() {
        let p = SystemParams::default();
        let g = spectrum(&p, -6.0, 6.0, 1201).unwrap();
        assert_eq!(g.deltas.len(), 1201);
        assert!(g.deltas.windows(2).all(|w| w[1] > w[0]));
        for (u, pt) in g.phase_unwrapped.iter().zip(&g.points) {
            let k = (u - pt.phase) / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-9);
        }
        assert!(spectrum(&p, 1.0, 1.0, 10).is_err());
        assert!(spectrum(&p, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn flat_spectrum_without_coupling() {
        let p = SystemParams::symmetric(0.0, 0.0, 1.0, 1.0, 0.1);
        let g = spectrum(&p, -2.0, 2.0, 101).unwrap();
        assert!(g.points.iter().all(|s| s.t_amp == ONE));
        assert!(peak_analysis(&g).unwrap().is_empty());
    }

    #[test]
    fn bragg_single_lorentzian_peak() {
        let p = SystemParams::with_fixed_length(1.0, 0.0, 1.0, BRAGG_KAD, 10.0 * PI);
        let g = spectrum(&p, -6.0, 6.0, 2401).unwrap();
        let peaks = peak_analysis(&g).unwrap();
        assert_eq!(peaks.len(), 1);
        let expected = 1.0 + (-0.1f64).exp();
        assert!((peaks[0].position - expected).abs() < 1e-3);
        assert!((expected - 1.9048).abs() < 5e-5);
        assert!((peaks[0].height - 1.0).abs() < 1e-4);
        assert!((peaks[0].fwhm - 2.0).abs() < 0.01 * 2.0);
    }

    #[test]
    fn anti_bragg_peak_count() {
        for (j, count) in [(1.0, 1usize), (1.5, 2)] {
            let p = SystemParams::with_fixed_length(1.0, 0.0, j, ANTI_BRAGG_KAD, 10.0 * PI);
            let g = spectrum(&p, -6.0, 6.0, 1201).unwrap();
            assert_eq!(peak_analysis(&g).unwrap().len(), count, "J = {j}");
        }
    }

    #[test]
    fn anti_bragg_reflection_maxima_closed_form() {
        // Lossless anti-Bragg: |r|^2 = o^2 / ((x^2 - 1/4 - o^2)^2 + x^2),
        // x = Delta - J, o = J e^{-d/L} - 1/2, maximal at x = +-sqrt(o^2 - 1/4).
        let p = SystemParams::with_fixed_length(1.0, 0.0, 1.5, ANTI_BRAGG_KAD, 10.0 * PI);
        let o = p.exchange() - 0.5;
        let x_peak = (o * o - 0.25).sqrt();
        let g = spectrum(&p, -2.0, 5.0, 70001).unwrap();
        let peaks = peak_analysis(&g).unwrap();
        assert_eq!(peaks.len(), 2);
        let split = peaks[1].position - peaks[0].position;
        assert!((split - 2.0 * x_peak).abs() < 1e-6, "{split}");
        assert!((2.0 * x_peak - 1.5608).abs() < 1e-4);
        for pk in &peaks {
            assert!((pk.height - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn reciprocity_for_symmetric_rates() {
        let p = SystemParams::symmetric(1.0, 0.2, 1.3, 2.2, 0.4);
        for d in [-2.0, 0.1, 1.7] {
            let a = scatter_via_steady_state(&p, d).unwrap().t_amp;
            let b = scatter_from_right(&p, d).unwrap().t_amp;
            assert!(close(a, b, 1e-13));
        }
    }

    #[test]
    fn lossy_system_leaks() {
        let p = SystemParams::symmetric(1.0, 0.4, 1.0, 1.0, 0.1);
        for d in [-1.0, 0.0, 2.0] {
            assert!(scatter_amplitudes(&p, d).unwrap().loss > 0.0);
        }
    }
}
