//! Free decay of a single excitation shared by the two atoms.

use crate::error::{Error, Result};
use crate::linalg::{inner, Mat2, Vec2, ONE, ZERO};
use crate::model::{build_hamiltonian, DRESSED_A, DRESSED_B};
use crate::params::{SystemParams, ANTI_BRAGG_KAD, BRAGG_KAD};
use crate::signal::linspace;

/// Tolerance on `kad` when a closed form is tied to a specific spacing.
const CASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Left,
    Right,
    A,
    B,
    /// Amplitudes on (|eg>, |ge>) with total weight at most one.
    Custom(Vec2),
}

impl InitialState {
    pub fn amplitudes(&self) -> Result<Vec2> {
        match *self {
            InitialState::Left => Ok([ONE, ZERO]),
            InitialState::Right => Ok([ZERO, ONE]),
            InitialState::A => Ok(DRESSED_A),
            InitialState::B => Ok(DRESSED_B),
            InitialState::Custom(c) => {
                if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::invalid("initial", "amplitudes must be finite"));
                }
                let w = c[0].norm_sqr() + c[1].norm_sqr();
                if w > 1.0 + 1e-12 {
                    return Err(Error::invalid("initial", format!("total weight {w} exceeds 1")));
                }
                Ok(c)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub p_left: Vec<f64>,
    pub p_right: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
    pub norm: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, c: &Vec2, basis: &(Vec2, Vec2)) {
        self.times.push(t);
        self.p_left.push(c[0].norm_sqr());
        self.p_right.push(c[1].norm_sqr());
        self.p_a.push(inner(&basis.0, c).norm_sqr());
        self.p_b.push(inner(&basis.1, c).norm_sqr());
        self.norm.push(c[0].norm_sqr() + c[1].norm_sqr());
    }
}

/// Undriven effective matrix at `Delta = 0`.
pub fn undriven_matrix(params: &SystemParams) -> Result<Mat2> {
    Ok(build_hamiltonian(&params.with_delta(0.0).with_drive(0.0))?.matrix)
}

/// `e^{-iHt}` of the undriven dimer.
pub fn propagator(params: &SystemParams, t: f64) -> Result<Mat2> {
    Ok(undriven_matrix(params)?.propagator(t))
}

pub fn evolve(params: &SystemParams, initial: InitialState, t_max: f64, n: usize) -> Result<TimeSeries> {
    let times = time_grid(t_max, n)?;
    let m = undriven_matrix(params)?;
    Ok(evolve_matrix(&m, &initial.amplitudes()?, &times))
}

pub(crate) fn time_grid(t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("t_max", format!("must be finite and >= 0, got {t_max}")));
    }
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 samples, got {n}")));
    }
    Ok(linspace(0.0, t_max, n))
}

/// Propagate `c0` under an arbitrary 2x2 effective matrix, reporting
/// populations in the bare and symmetric/antisymmetric bases.
pub fn evolve_matrix(m: &Mat2, c0: &Vec2, times: &[f64]) -> TimeSeries {
    evolve_in_basis(m, c0, times, &(DRESSED_A, DRESSED_B))
}

/// As [`evolve_matrix`], with `p_a`, `p_b` taken against an arbitrary
/// orthonormal pair.
pub fn evolve_in_basis(m: &Mat2, c0: &Vec2, times: &[f64], basis: &(Vec2, Vec2)) -> TimeSeries {
    let mut out = TimeSeries::default();
    for &t in times {
        out.push(t, &m.propagator(t).mul_vec(c0), basis);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Bragg,
    AntiBragg,
}

impl Case {
    pub fn kad(self) -> f64 {
        match self {
            Case::Bragg => BRAGG_KAD,
            Case::AntiBragg => ANTI_BRAGG_KAD,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Case::Bragg => "bragg",
            Case::AntiBragg => "anti-bragg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Populations {
    pub p_left: f64,
    pub p_right: f64,
    pub p_a: f64,
    pub p_b: f64,
}

/// Analytic populations after starting in the left atom.
///
/// The growing `e^{G t}` factors of the Bragg expressions are folded into the
/// envelope so nothing overflows at long times.
pub fn closed_form_populations(params: &SystemParams, case: Case, t: f64) -> Result<Populations> {
    params.validate()?;
    let g = params.require_symmetric()?;
    if (params.kad - case.kad()).abs() > CASE_TOL {
        return Err(Error::WrongCase {
            requested: case.name(),
            kad: params.kad,
        });
    }
    let gp = params.gamma_prime;
    let je = params.exchange();
    let pops = match case {
        Case::Bragg => {
            let slow = (-gp * t).exp();
            let fast = (-(2.0 * g + gp) * t).exp();
            let cross = 2.0 * (-(g + gp) * t).exp() * (2.0 * je * t).cos();
            Populations {
                p_left: 0.25 * (slow + fast + cross),
                p_right: 0.25 * (slow + fast - cross),
                p_a: 0.5 * fast,
                p_b: 0.5 * slow,
            }
        }
        Case::AntiBragg => {
            let env = (-(g + gp) * t).exp();
            let c = ((2.0 * je - g) * t).cos();
            Populations {
                p_left: 0.25 * env * (2.0 + 2.0 * c),
                p_right: 0.25 * env * (2.0 - 2.0 * c),
                p_a: 0.5 * env,
                p_b: 0.5 * env,
            }
        }
    };
    Ok(pops)
}
