//! Effective non-Hermitian Hamiltonian of the dimer and its single-excitation
//! eigenproblem.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, norm_sqr, scale_vec, Mat2, Vec2, C64, I, ONE, ZERO};
use crate::params::{BandEdgeParams, SystemParams};

/// Relative eigenvalue gap below which a spectrum is flagged degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// `|A> = (-|eg> + |ge>)/sqrt 2`.
pub const DRESSED_A: Vec2 = [C64::new(-FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];
/// `|B> = (|eg> + |ge>)/sqrt 2`.
pub const DRESSED_B: Vec2 = [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)];

/// Single-excitation block of the effective Hamiltonian in the bare basis
/// `(|eg>, |ge>)`, split as `matrix = coherent_part - (i/2) decay_matrix`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub matrix: Mat2,
    pub coherent_part: Mat2,
    pub decay_matrix: Mat2,
}

impl EffectiveHamiltonian {
    /// Eigenvalues of the (real symmetric) decay matrix, ascending.
    pub fn decay_eigenvalues(&self) -> [f64; 2] {
        let p = self.decay_matrix.get(0, 0).re;
        let q = self.decay_matrix.get(1, 1).re;
        let r = self.decay_matrix.get(0, 1).norm();
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + r * r).sqrt();
        [mid - rad, mid + rad]
    }
}

/// Builds the effective Hamiltonian at the detuning stored in `params`.
///
/// Diagonal: `-Delta + J - i(Gamma' + Gamma_j)/2`. Off-diagonal:
/// `-(i/2) sqrt(Gamma_1 Gamma_2) e^{i kad} - J e^{-d/L}`; the bound-state
/// sign `(-1)^{theta_12}` is `-1` for atoms at `0` and `d`.
pub fn build_hamiltonian(params: &SystemParams) -> Result<EffectiveHamiltonian> {
    params.validate()?;
    let g1 = params.gamma_1d_1;
    let g2 = params.gamma_1d_2;
    let gp = params.gamma_prime;
    let g12 = (g1 * g2).sqrt();
    let (sin, cos) = params.kad.sin_cos();

    let onsite = C64::new(-params.delta + params.j_strength, 0.0);
    let coupling = C64::new(0.5 * g12 * sin - params.exchange(), 0.0);
    let coherent_part = Mat2::new(onsite, coupling, coupling, onsite);

    let gamma_off = C64::new(g12 * cos, 0.0);
    let decay_matrix = Mat2::new(C64::new(gp + g1, 0.0), gamma_off, gamma_off, C64::new(gp + g2, 0.0));

    let matrix = coherent_part - decay_matrix.scale(I * 0.5);
    Ok(EffectiveHamiltonian {
        matrix,
        coherent_part,
        decay_matrix,
    })
}

/// Eigenvalues with right and left eigenvectors of a 2x2 complex matrix.
///
/// Left vectors are rows `l_j` with `l_j M = E_j l_j`, normalized so the
/// bilinear pairing `l_j . r_k = delta_jk` (no conjugation). For
/// complex-symmetric input they are the plain transposes of the right vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub e1: C64,
    pub e2: C64,
    pub psi1_r: Vec2,
    pub psi2_r: Vec2,
    pub psi1_l: Vec2,
    pub psi2_l: Vec2,
    /// `|E1 - E2| < 1e-10 ||M||`; spectral sums should not be trusted.
    pub degenerate: bool,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> [C64; 2] {
        [self.e1, self.e2]
    }

    pub fn pairs(&self) -> [(C64, Vec2, Vec2); 2] {
        [
            (self.e1, self.psi1_r, self.psi1_l),
            (self.e2, self.psi2_r, self.psi2_l),
        ]
    }
}

pub fn eigensolve(h: &EffectiveHamiltonian) -> EigenSystem {
    eigensolve_matrix(&h.matrix)
}

/// Closed-form (quadratic formula) eigen-decomposition.
pub fn eigensolve_matrix(m: &Mat2) -> EigenSystem {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let scale = m.norm();
    let is_degenerate = |e1: C64, e2: C64| (e1 - e2).norm() <= DEGENERACY_TOL * scale;

    if a == d && b == c {
        // Equal diagonals, complex-symmetric: the dressed states are exact.
        let (e1, e2) = (a - b, a + b);
        return EigenSystem {
            e1,
            e2,
            psi1_r: DRESSED_A,
            psi2_r: DRESSED_B,
            psi1_l: DRESSED_A,
            psi2_l: DRESSED_B,
            degenerate: is_degenerate(e1, e2),
        };
    }

    let half_trace = (a + d) * 0.5;
    let half_diff = (a - d) * 0.5;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let lam = [half_trace + disc, half_trace - disc];
    let right = lam.map(|l| right_vector(a, b, c, d, l));

    // Label the root closer to |A> as E1 so the symmetric limit is continuous.
    let overlap_a = |v: &Vec2| bilinear(&DRESSED_A, v).norm_sqr();
    let (i1, i2) = if overlap_a(&right[0]) >= overlap_a(&right[1]) { (0, 1) } else { (1, 0) };
    let (e1, e2) = (lam[i1], lam[i2]);
    let (r1, r2) = (right[i1], right[i2]);
    let degenerate = is_degenerate(e1, e2);

    let (l1, l2) = left_vectors(m, &r1, &r2, e1, e2);
    EigenSystem {
        e1,
        e2,
        psi1_r: r1,
        psi2_r: r2,
        psi1_l: l1,
        psi2_l: l2,
        degenerate,
    }
}

fn right_vector(a: C64, b: C64, c: C64, d: C64, lam: C64) -> Vec2 {
    // Null vector of (M - lam) from whichever row is better conditioned.
    let from_row0 = [b, lam - a];
    let from_row1 = [lam - d, c];
    let v = if norm_sqr(&from_row0) >= norm_sqr(&from_row1) { from_row0 } else { from_row1 };
    let n = norm_sqr(&v).sqrt();
    if n == 0.0 {
        // M = lam I on this row pair: any vector works, pick the bare basis.
        return [ONE, ZERO];
    }
    scale_vec(&v, ONE / n)
}

fn left_vectors(m: &Mat2, r1: &Vec2, r2: &Vec2, e1: C64, e2: C64) -> (Vec2, Vec2) {
    let r = Mat2::new(r1[0], r2[0], r1[1], r2[1]);
    if let Some(inv) = r.inverse().filter(|_| r.det().norm() > 1e-14) {
        return (inv.0[0], inv.0[1]);
    }
    // Exceptional point: right vectors coalesce. Left vectors of M^T, paired
    // as well as possible.
    let mt = m.transpose();
    let (a, b, c, d) = (mt.get(0, 0), mt.get(0, 1), mt.get(1, 0), mt.get(1, 1));
    let pair = |l: Vec2, rv: &Vec2| {
        let p = bilinear(&l, rv);
        if p.norm() > 1e-300 { scale_vec(&l, ONE / p) } else { l }
    };
    (
        pair(right_vector(a, b, c, d, e1), r1),
        pair(right_vector(a, b, c, d, e2), r2),
    )
}

/// Closed-form eigenvalues of the symmetric-rate Hamiltonian:
/// `E_{1,2} = -Delta + J +- [J e^{-d/L} - (G/2) sin kad] - i Gamma^{A,B}/2`.
pub fn closed_form_eigenvalues(params: &SystemParams) -> Result<(C64, C64)> {
    let s = dressed_scheme(params)?;
    let e1 = C64::new(s.omega_a_level - params.delta, -0.5 * s.gamma_a);
    let e2 = C64::new(s.omega_b_level - params.delta, -0.5 * s.gamma_b);
    Ok((e1, e2))
}

/// Energy levels (relative to `omega_a`) and waveguide decay rates of the
/// dressed states `|A>`, `|B>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedLevelScheme {
    pub omega_a_level: f64,
    pub omega_b_level: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub delta_ab: f64,
}

pub fn dressed_scheme(params: &SystemParams) -> Result<DressedLevelScheme> {
    params.validate()?;
    let g = params.require_symmetric()?;
    let (sin, cos) = params.kad.sin_cos();
    let shift = params.exchange() - 0.5 * g * sin;
    let omega_a_level = params.j_strength + shift;
    let omega_b_level = params.j_strength - shift;
    Ok(DressedLevelScheme {
        omega_a_level,
        omega_b_level,
        gamma_a: g + params.gamma_prime - g * cos,
        gamma_b: g + params.gamma_prime + g * cos,
        delta_ab: omega_a_level - omega_b_level,
    })
}

/// Bound-state localization length `L = d sqrt(alpha / delta)`.
pub fn bound_state_length(band: &BandEdgeParams) -> Result<f64> {
    if !(band.alpha > 0.0) || !band.alpha.is_finite() {
        return Err(Error::invalid("alpha", "band curvature must be positive"));
    }
    if !(band.delta_edge > 0.0) || !band.delta_edge.is_finite() {
        return Err(Error::invalid("delta_edge", "atom frequency must lie inside the gap (delta > 0)"));
    }
    if !(band.d_cell >= 0.0) || !band.d_cell.is_finite() {
        return Err(Error::invalid("d_cell", "unit-cell length must be >= 0"));
    }
    Ok(band.d_cell * (band.alpha / band.delta_edge).sqrt())
}
