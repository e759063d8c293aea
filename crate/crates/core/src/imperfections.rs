//! Departures from the ideal geometry: a spacing error around the Bragg
//! condition and unequal waveguide decay rates.

use std::f64::consts::PI;

use crate::dynamics::{evolve, evolve_in_basis, time_grid, InitialState, TimeSeries};
use crate::error::{Error, Result};
use crate::linalg::{inner, Mat2, Vec2, C64, ONE, ZERO};
use crate::model::build_hamiltonian;
use crate::params::{SystemParams, BRAGG_KAD};
use crate::scattering::{scatter_amplitudes, spectrum, SpectrumGrid};
use crate::signal::{exponential_rate, linspace};

/// Largest spacing error accepted by [`DeviationParams`].
pub const MAX_ETA: f64 = 0.2;
/// Half-width of the local Fano search, in units of the dark-mode rate.
pub const FANO_WINDOW: f64 = 5.0;
/// Samples in the refined local Fano scan.
pub const FANO_SAMPLES: usize = 4001;
/// Reflection contrast below which no feature is reported.
pub const FANO_NOISE_FLOOR: f64 = 1e-9;

/// Spacing `k_a d = (1 + eta) pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationParams {
    pub eta: f64,
}

impl DeviationParams {
    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta.abs() > MAX_ETA {
            return Err(Error::invalid("eta", format!("|eta| must be <= {MAX_ETA}, got {eta}")));
        }
        Ok(DeviationParams { eta })
    }

    pub fn kad(&self) -> f64 {
        (1.0 + self.eta) * PI
    }

    /// `params` with the spacing replaced; `d/L` is left untouched.
    pub fn apply(&self, params: &SystemParams) -> SystemParams {
        params.with_kad(self.kad())
    }

    /// Decay rate of the nearly dark state, `G (1 + cos k_a d) + G'`.
    pub fn gamma_b(&self, params: &SystemParams) -> Result<f64> {
        let g = params.require_symmetric()?;
        Ok(g * (1.0 + self.kad().cos()) + params.gamma_prime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanoAsymmetry {
    DipThenPeak,
    PeakThenDip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoFeature {
    /// Point of steepest reflection slope.
    pub position: f64,
    /// `J - J e^{-d/L} + (G/2) sin k_a d`.
    pub predicted: f64,
    pub asymmetry: FanoAsymmetry,
    /// Full width of the peak at half its height above the local minimum.
    pub width: f64,
    pub dip: f64,
    pub peak: f64,
    /// Waveguide part of the dark-mode decay rate.
    pub gamma_b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanoScan {
    pub grid: SpectrumGrid,
    pub feature: FanoFeature,
}

/// Predicted centre of the narrow feature.
pub fn fano_position(params: &SystemParams) -> Result<f64> {
    let g = params.require_symmetric()?;
    Ok(params.j_strength - params.exchange() + 0.5 * g * params.kad.sin())
}

/// Reflection spectrum at `k_a d = (1 + eta) pi` and the narrow feature
/// near its predicted position.
pub fn fano_scan(
    params: &SystemParams,
    dev: DeviationParams,
    delta_min: f64,
    delta_max: f64,
    n: usize,
) -> Result<FanoScan> {
    let p = dev.apply(params);
    p.validate()?;
    let grid = spectrum(&p, delta_min, delta_max, n)?;
    let feature = locate_fano(&p)?;
    Ok(FanoScan { grid, feature })
}

fn locate_fano(p: &SystemParams) -> Result<FanoFeature> {
    let g = p.require_symmetric()?;
    let predicted = fano_position(p)?;
    let not_found = Error::FeatureNotFound { expected: predicted };
    let gamma_b = g * (1.0 + p.kad.cos());
    if !(gamma_b > 0.0) {
        return Err(not_found);
    }
    let half = FANO_WINDOW * gamma_b;
    let xs = linspace(predicted - half, predicted + half, FANO_SAMPLES);
    let mut r = Vec::with_capacity(xs.len());
    for &x in &xs {
        match scatter_amplitudes(p, x) {
            Ok(s) => r.push(s.reflection),
            Err(Error::SingularResolvent { .. }) => return Err(not_found),
            Err(e) => return Err(e),
        }
    }
    let (i_min, dip) = extreme(&r, |a, b| a < b);
    let (i_max, peak) = extreme(&r, |a, b| a > b);
    if peak - dip < FANO_NOISE_FLOOR || i_max == 0 || i_max == xs.len() - 1 {
        return Err(not_found);
    }
    let mut steepest = (0, 0.0);
    for k in 1..xs.len() - 1 {
        let slope = ((r[k + 1] - r[k - 1]) / (xs[k + 1] - xs[k - 1])).abs();
        if slope > steepest.1 {
            steepest = (k, slope);
        }
    }
    let level = dip + 0.5 * (peak - dip);
    let width = half_level_width(&xs, &r, i_max, level).ok_or(not_found)?;
    Ok(FanoFeature {
        position: xs[steepest.0],
        predicted,
        asymmetry: if i_min < i_max {
            FanoAsymmetry::DipThenPeak
        } else {
            FanoAsymmetry::PeakThenDip
        },
        width,
        dip,
        peak,
        gamma_b,
    })
}

fn extreme(v: &[f64], better: impl Fn(f64, f64) -> bool) -> (usize, f64) {
    let mut best = (0, v[0]);
    for (k, &x) in v.iter().enumerate().skip(1) {
        if better(x, best.1) {
            best = (k, x);
        }
    }
    best
}

fn half_level_width(xs: &[f64], y: &[f64], top: usize, level: f64) -> Option<f64> {
    let mut lo = top;
    while lo > 0 && y[lo] >= level {
        lo -= 1;
    }
    let mut hi = top;
    while hi + 1 < y.len() && y[hi] >= level {
        hi += 1;
    }
    if y[lo] >= level || y[hi] >= level {
        return None;
    }
    let cross = |a: usize, b: usize| xs[a] + (level - y[a]) / (y[b] - y[a]) * (xs[b] - xs[a]);
    Some(cross(hi - 1, hi) - cross(lo, lo + 1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationDynamics {
    pub series: TimeSeries,
    /// `p_b` decay rate from a log-linear fit over `[t_max/2, t_max]`.
    pub pb_decay_rate: f64,
    pub gamma_b: f64,
}

/// Free decay from the left atom at `k_a d = (1 + eta) pi`.
pub fn deviation_dynamics(
    params: &SystemParams,
    dev: DeviationParams,
    t_max: f64,
    n: usize,
) -> Result<DeviationDynamics> {
    let p = dev.apply(params);
    let series = evolve(&p, InitialState::Left, t_max, n)?;
    let tail: Vec<usize> = (0..series.len()).filter(|&i| series.times[i] >= 0.5 * t_max).collect();
    let xs: Vec<f64> = tail.iter().map(|&i| series.times[i]).collect();
    let ys: Vec<f64> = tail.iter().map(|&i| series.p_b[i]).collect();
    let pb_decay_rate = if xs.len() >= 2 && ys.iter().all(|&y| y > 0.0) && t_max > 0.0 {
        exponential_rate(&xs, &ys)
    } else {
        f64::NAN
    };
    Ok(DeviationDynamics {
        series,
        pb_decay_rate,
        gamma_b: dev.gamma_b(&p)?,
    })
}

/// Waveguide rates of the two atoms and their asymmetry factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetryParams {
    pub gamma_1d_1: f64,
    pub gamma_1d_2: f64,
    /// `|G_1 - G_2| / (G_1 + G_2)`
    pub xi: f64,
}

impl AsymmetryParams {
    pub fn new(gamma_1d_1: f64, gamma_1d_2: f64) -> Result<Self> {
        for (name, g) in [("gamma_1d_1", gamma_1d_1), ("gamma_1d_2", gamma_1d_2)] {
            if !(g > 0.0) || !g.is_finite() {
                return Err(Error::invalid(name, format!("must be positive and finite, got {g}")));
            }
        }
        let a = AsymmetryParams {
            gamma_1d_1,
            gamma_1d_2,
            xi: (gamma_1d_1 - gamma_1d_2).abs() / (gamma_1d_1 + gamma_1d_2),
        };
        a.check()?;
        Ok(a)
    }

    /// Rates `(total/2)(1 + xi)` and `(total/2)(1 - xi)`, larger one on atom 1.
    pub fn from_xi(xi: f64, total: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::invalid("xi", format!("must lie in [0, 1), got {xi}")));
        }
        AsymmetryParams::new(0.5 * total * (1.0 + xi), 0.5 * total * (1.0 - xi))
    }

    /// Recomputes `xi` from the rates and checks it against the stored value.
    pub fn check(&self) -> Result<()> {
        let sum = self.gamma_1d_1 + self.gamma_1d_2;
        let xi = (self.gamma_1d_1 - self.gamma_1d_2).abs() / sum;
        if (xi - self.xi).abs() > 1e-12 {
            return Err(Error::invalid("xi", format!("stored {} but rates give {xi}", self.xi)));
        }
        if !(0.0..1.0).contains(&xi) {
            return Err(Error::invalid("xi", format!("must lie in [0, 1), got {xi}")));
        }
        Ok(())
    }

    pub fn apply(&self, params: &SystemParams) -> SystemParams {
        params.with_rates(self.gamma_1d_1, self.gamma_1d_2)
    }
}

/// Bright and dark combinations weighted by the square roots of the rates.
pub fn asymmetric_dressed_basis(asym: &AsymmetryParams) -> (Vec2, Vec2) {
    let (r1, r2) = (asym.gamma_1d_1.sqrt(), asym.gamma_1d_2.sqrt());
    let n = (asym.gamma_1d_1 + asym.gamma_1d_2).sqrt();
    (
        [C64::new(-r1 / n, 0.0), C64::new(r2 / n, 0.0)],
        [C64::new(r2 / n, 0.0), C64::new(r1 / n, 0.0)],
    )
}

/// Exchange coupling between the redefined dressed states,
/// `J e^{-d/L} (G_1 - G_2) / (G_1 + G_2)`.
pub fn dressed_coupling(asym: &AsymmetryParams, params: &SystemParams) -> f64 {
    params.exchange() * (asym.gamma_1d_1 - asym.gamma_1d_2) / (asym.gamma_1d_1 + asym.gamma_1d_2)
}

/// Bragg-spaced undriven matrix written directly in the redefined dressed
/// basis (energies measured from the atomic frequency).
pub fn dressed_bragg_matrix(asym: &AsymmetryParams, params: &SystemParams) -> Mat2 {
    let (g1, g2) = (asym.gamma_1d_1, asym.gamma_1d_2);
    let je = params.exchange();
    let gm = (g1 * g2).sqrt();
    let shift = je * (g1 - g2).powi(2) / (2.0 * gm * (g1 + g2));
    let exch = je * (g1 + g2) / (2.0 * gm);
    let j = params.j_strength;
    let gp = params.gamma_prime;
    let h_a = C64::new(j - shift + exch, -0.5 * (g1 + g2 + gp));
    let h_b = C64::new(j + shift - exch, -0.5 * gp);
    let h_ab = C64::new(dressed_coupling(asym, params), 0.0);
    Mat2::new(h_a, h_ab, h_ab, h_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymmetricDynamics {
    /// Bare populations plus `p_a`, `p_b` in the redefined basis.
    pub series: TimeSeries,
    pub coupling_ab: f64,
    /// Largest element-wise gap between the rotated bare matrix and
    /// [`dressed_bragg_matrix`].
    pub matrix_residual: f64,
    /// Largest population gap between bare- and dressed-basis propagation.
    pub route_deviation: f64,
}

/// Free decay from the left atom with unequal rates at Bragg spacing.
pub fn asymmetric_bragg_dynamics(
    asym: &AsymmetryParams,
    params: &SystemParams,
    t_max: f64,
    n: usize,
) -> Result<AsymmetricDynamics> {
    asym.check()?;
    if (params.kad - BRAGG_KAD).abs() > 1e-12 {
        return Err(Error::WrongCase {
            requested: "bragg",
            kad: params.kad,
        });
    }
    let times = time_grid(t_max, n)?;
    let p = asym.apply(params).with_delta(0.0).with_drive(0.0);
    let bare = build_hamiltonian(&p)?.matrix;
    let basis = asymmetric_dressed_basis(asym);
    let c0: Vec2 = [ONE, ZERO];
    let series = evolve_in_basis(&bare, &c0, &times, &basis);

    let dressed = dressed_bragg_matrix(asym, &p);
    let rotated = rotate(&bare, &basis);
    let mut matrix_residual: f64 = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            matrix_residual = matrix_residual.max((rotated.get(r, c) - dressed.get(r, c)).norm());
        }
    }
    let d0: Vec2 = [inner(&basis.0, &c0), inner(&basis.1, &c0)];
    let mut route_deviation: f64 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let d = dressed.propagator(t).mul_vec(&d0);
        route_deviation = route_deviation
            .max((d[0].norm_sqr() - series.p_a[i]).abs())
            .max((d[1].norm_sqr() - series.p_b[i]).abs());
    }
    Ok(AsymmetricDynamics {
        series,
        coupling_ab: dressed_coupling(asym, &p),
        matrix_residual,
        route_deviation,
    })
}

/// `U M U^T` with the rows of `U` the (real) basis vectors.
fn rotate(m: &Mat2, basis: &(Vec2, Vec2)) -> Mat2 {
    let rows = [basis.0, basis.1];
    let mut out = Mat2::zeros();
    for r in 0..2 {
        for c in 0..2 {
            let mv = m.mul_vec(&rows[c]);
            out.0[r][c] = rows[r][0] * mv[0] + rows[r][1] * mv[1];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve;
    use crate::linalg::norm_sqr;

    fn fig7(j: f64, kad: f64) -> SystemParams {
        SystemParams::with_fixed_length(1.0, 0.0, j, kad, 10.0 * PI)
    }

    #[test]
    fn eta_guard() {
        assert!(DeviationParams::new(0.21).is_err());
        assert!(DeviationParams::new(f64::NAN).is_err());
        assert!((DeviationParams::new(0.05).unwrap().kad() - 1.05 * PI).abs() < 1e-15);
    }

    #[test]
    fn fano_near_prediction() {
        let dev = DeviationParams::new(0.05).unwrap();
        let p = fig7(3.0, dev.kad());
        let scan = fano_scan(&p, dev, -6.0, 6.0, 1201).unwrap();
        let f = scan.feature;
        assert!((f.predicted - 0.221).abs() < 1e-3, "{}", f.predicted);
        assert!((f.position - f.predicted).abs() < f.gamma_b);
        assert!(f.width > 0.5 * f.gamma_b && f.width < 2.0 * f.gamma_b, "{}", f.width);
        assert_eq!(f.asymmetry, FanoAsymmetry::DipThenPeak);
    }

    #[test]
    fn no_fano_at_exact_bragg() {
        let dev = DeviationParams::new(0.0).unwrap();
        let err = fano_scan(&fig7(3.0, PI), dev, -6.0, 6.0, 101).unwrap_err();
        assert!(matches!(err, Error::FeatureNotFound { .. }));
    }

    #[test]
    fn fano_position_follows_sine() {
        for eta in [0.02, 0.05, 0.1] {
            let up = fig7(3.0, (1.0 + eta) * PI).with_kad((1.0 + eta) * PI);
            let down = up.with_kad((1.0 - eta) * PI);
            let a = fano_position(&up).unwrap() - up.j_strength + up.exchange();
            let b = fano_position(&down).unwrap() - down.j_strength + down.exchange();
            assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn deviation_slow_decay() {
        let dev = DeviationParams::new(0.05).unwrap();
        let p = fig7(3.0, dev.kad());
        let d = deviation_dynamics(&p, dev, 10.0, 2001).unwrap();
        assert!((d.gamma_b - 0.01231).abs() < 1e-5);
        assert!((d.pb_decay_rate - d.gamma_b).abs() < 0.05 * d.gamma_b);
        let ideal = deviation_dynamics(&p, DeviationParams::new(0.0).unwrap(), 10.0, 2001).unwrap();
        assert!(ideal.pb_decay_rate.abs() < 1e-12);
        // The p_b gap is 0.5 (1 - e^{-G_B t}), largest at the end.
        let bound = 0.5 * (1.0 - (-10.0 * d.gamma_b).exp()) + 1e-12;
        for i in 0..d.series.len() {
            assert!((d.series.p_b[i] - ideal.series.p_b[i]).abs() <= bound);
        }
    }

    #[test]
    fn asymmetry_factor() {
        let a = AsymmetryParams::from_xi(0.14, 2.0).unwrap();
        assert!((a.gamma_1d_1 / a.gamma_1d_2 - 1.3256).abs() < 1e-4);
        assert!((a.xi - 0.14).abs() < 1e-15);
        assert!(AsymmetryParams::new(1.0, 0.0).is_err());
        let bad = AsymmetryParams { xi: 0.3, ..a };
        assert!(bad.check().is_err());
    }

    #[test]
    fn asymmetric_basis_values() {
        let (a, b) = asymmetric_dressed_basis(&AsymmetryParams::from_xi(0.14, 2.0).unwrap());
        assert!((a[0].re + 0.7550).abs() < 5e-5 && (a[1].re - 0.6557).abs() < 5e-5);
        assert!((b[0].re - 0.6557).abs() < 5e-5 && (b[1].re - 0.7550).abs() < 5e-5);
        assert!(inner(&a, &b).norm() < 1e-15);
        assert!((norm_sqr(&a) - 1.0).abs() < 1e-15);
        let (a0, b0) = asymmetric_dressed_basis(&AsymmetryParams::new(0.7, 0.7).unwrap());
        assert!((a0[0].re + 0.5f64.sqrt()).abs() < 1e-15 && (b0[1].re - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dressed_coupling_value() {
        let a = AsymmetryParams::from_xi(0.07, 2.0).unwrap();
        let p = SystemParams::symmetric(1.0, 0.0, 3.0, PI, 0.1);
        let expected = 3.0 * (-0.1f64).exp() * 0.07;
        assert!((dressed_coupling(&a, &p) - expected).abs() < 1e-15);
        assert!((expected - 0.19002).abs() < 1e-5);
    }

    #[test]
    fn dressed_matrix_is_rotated_bare_matrix() {
        for xi in [0.0, 0.07, 0.14, 0.5] {
            let a = AsymmetryParams::from_xi(xi, 2.0).unwrap();
            let d = asymmetric_bragg_dynamics(&a, &fig7(3.0, PI).with_drive(0.0), 10.0, 501).unwrap();
            assert!(d.matrix_residual < 1e-12, "xi {xi}: {}", d.matrix_residual);
            assert!(d.route_deviation < 1e-10);
            let s = &d.series;
            for i in 0..s.len() {
                assert!((s.p_a[i] + s.p_b[i] - s.p_left[i] - s.p_right[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_limit_matches_dynamics() {
        let a = AsymmetryParams::from_xi(0.0, 2.0).unwrap();
        let p = fig7(3.0, PI);
        let d = asymmetric_bragg_dynamics(&a, &p, 10.0, 201).unwrap();
        let s = evolve(&p, InitialState::Left, 10.0, 201).unwrap();
        for i in 0..s.len() {
            assert!((d.series.p_a[i] - s.p_a[i]).abs() < 1e-14);
            assert!((d.series.p_b[i] - s.p_b[i]).abs() < 1e-14);
            assert!((d.series.p_b[i] - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_requires_bragg() {
        let a = AsymmetryParams::from_xi(0.1, 2.0).unwrap();
        let err = asymmetric_bragg_dynamics(&a, &fig7(3.0, 0.5 * PI), 1.0, 3).unwrap_err();
        assert!(matches!(err, Error::WrongCase { .. }));
    }
}
