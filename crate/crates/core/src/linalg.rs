//! Closed-form complex 2x2 linear algebra for the single-excitation block.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

/// Complex 2-vector in the bare basis (|eg>, |ge>).
pub type Vec2 = [C64; 2];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zeros() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.0[0][0], self.0[1][0], self.0[0][1], self.0[1][1])
    }

    pub fn adjoint(&self) -> Self {
        Mat2::new(
            self.0[0][0].conj(),
            self.0[1][0].conj(),
            self.0[0][1].conj(),
            self.0[1][1].conj(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn mul_vec(&self, v: &Vec2) -> Vec2 {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Row vector times matrix, `u^T M` (no conjugation).
    pub fn vec_mul(&self, u: &Vec2) -> Vec2 {
        let m = &self.0;
        [u[0] * m[0][0] + u[1] * m[1][0], u[0] * m[0][1] + u[1] * m[1][1]]
    }

    /// Solve `M x = b` by Cramer's rule. `None` when the determinant is exactly zero.
    pub fn solve(&self, b: &Vec2) -> Option<Vec2> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        let m = &self.0;
        Some([
            (m[1][1] * b[0] - m[0][1] * b[1]) / det,
            (m[0][0] * b[1] - m[1][0] * b[0]) / det,
        ])
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1], -m[0][1], -m[1][0], m[0][0]).scale(ONE / det))
    }

    /// Propagator `exp(-i M t)`.
    ///
    /// Written as `e^{-i l t} [cos(s t) I - i sin(s t)/s N]` with `l = tr/2`,
    /// `N = M - l I` and `s^2 = -det N`, i.e. the sum over the two spectral
    /// projectors `(I +- N/s)/2`. At `s = 0` (exceptional point or scalar
    /// matrix) it reduces to the Jordan form `e^{-i l t}(I - i t N)`.
    pub fn propagator(&self, t: f64) -> Self {
        let half_trace = self.trace() * 0.5;
        let n = *self - Mat2::identity().scale(half_trace);
        // N^2 = s^2 I for traceless 2x2 N.
        let s2 = -n.det();
        let s = s2.sqrt();
        let st = s * t;
        let (cos_st, sinc_t) = if st.norm() < 1e-4 {
            // Series keeps the s -> 0 limit exact.
            let x2 = st * st;
            (
                ONE - x2 / 2.0 + x2 * x2 / 24.0,
                (ONE - x2 / 6.0 + x2 * x2 / 120.0) * t,
            )
        } else {
            (st.cos(), st.sin() / s)
        };
        let phase = (-I * half_trace * t).exp();
        (Mat2::identity().scale(cos_st) - n.scale(I * sinc_t)).scale(phase)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Bilinear product `u^T v` (no conjugation).
pub fn bilinear(u: &Vec2, v: &Vec2) -> C64 {
    u[0] * v[0] + u[1] * v[1]
}

/// Hermitian product `u^dag v`.
pub fn inner(u: &Vec2, v: &Vec2) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm_sqr(v: &Vec2) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

pub fn scale_vec(v: &Vec2, s: C64) -> Vec2 {
    [v[0] * s, v[1] * s]
}

pub fn outer(u: &Vec2, v: &Vec2) -> Mat2 {
    Mat2::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn taylor_exp(m: &Mat2, t: f64) -> Mat2 {
        // Plain power series for small |M t|; independent of the closed form.
        let a = m.scale(-I * t);
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..60 {
            term = (term * a).scale(ONE / k as f64);
            sum = sum + term;
        }
        sum
    }

    #[test]
    fn solve_matches_inverse() {
        let m = Mat2::new(c(1.0, -0.5), c(0.3, 0.2), c(-0.7, 0.1), c(2.0, -1.0));
        let b = [c(1.0, 2.0), c(-0.5, 0.25)];
        let x = m.solve(&b).unwrap();
        let back = m.mul_vec(&x);
        assert!((back[0] - b[0]).norm() < 1e-14 && (back[1] - b[1]).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        assert!(((m * inv) - Mat2::identity()).norm() < 1e-14);
    }

    #[test]
    fn singular_solve_is_none() {
        let m = Mat2::new(ONE, ONE, ONE, ONE);
        assert!(m.solve(&[ONE, ZERO]).is_none());
    }

    #[test]
    fn propagator_matches_power_series() {
        let m = Mat2::new(c(0.4, -0.6), c(-0.9, 0.5), c(-0.9, 0.5), c(0.4, -0.6));
        for &t in &[0.0, 0.3, 1.0, 2.5] {
            let d = (m.propagator(t) - taylor_exp(&m, t)).norm();
            assert!(d < 1e-12, "t = {t}: {d}");
        }
    }

    #[test]
    fn propagator_at_exceptional_point_uses_jordan_form() {
        // Nilpotent part: [[1, 1], [-1, -1]] squares to zero.
        let l = c(0.2, -0.3);
        let m = Mat2::new(l + ONE, ONE, -ONE, l - ONE);
        let t = 1.7;
        let n = m - Mat2::identity().scale(l);
        let expected = (Mat2::identity() - n.scale(I * t)).scale((-I * l * t).exp());
        assert!((m.propagator(t) - expected).norm() < 1e-13);
        assert!((m.propagator(t) - taylor_exp(&m, t)).norm() < 1e-11);
    }
}
