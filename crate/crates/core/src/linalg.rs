// Copyright 2026 The mirrorcool Authors
// SPDX-License-Identifier: Apache-2.0

//! Small dense helpers for the two-dimensional linear stochastic system.

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Steady covariance Σ of dx = A x dt + dW with ⟨dW dWᵀ⟩ = C dt, i.e. the
/// solution of A Σ + Σ Aᵀ + C = 0.
///
/// For 2×2 matrices the solution is
/// Σ = −[det(A)·C + B C Bᵀ] / (2·tr(A)·det(A)) with B = A − tr(A)·I,
/// which is singular exactly when tr(A)·det(A) = 0.
pub fn lyapunov_2x2(a: &Matrix2<f64>, c: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let tr = a.trace();
    let det = a.determinant();
    if tr == 0.0 || det == 0.0 {
        return Err(Error::StabilityBoundary);
    }
    if !(tr < 0.0 && det > 0.0) {
        return Err(Error::Unstable {
            margin_damping: -tr,
            margin_spring: det,
        });
    }
    let b = a - Matrix2::identity() * tr;
    let num = c * det + b * c * b.transpose();
    let sigma = num / (-2.0 * tr * det);
    // Exact symmetry; the two off-diagonal evaluations differ by rounding only.
    let off = 0.5 * (sigma[(0, 1)] + sigma[(1, 0)]);
    Ok(Matrix2::new(sigma[(0, 0)], off, off, sigma[(1, 1)]))
}

/// Exact one-step propagator and noise covariance over `dt` via Van Loan's
/// block exponential: exp([[−A, C], [0, Aᵀ]]·dt) = [[·, Φ⁻¹Q], [0, Φᵀ]].
pub fn exact_step(a: &Matrix2<f64>, c: &Matrix2<f64>, dt: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    let mut block = Matrix4::zeros();
    block.fixed_view_mut::<2, 2>(0, 0).copy_from(&(-a * dt));
    block.fixed_view_mut::<2, 2>(0, 2).copy_from(&(c * dt));
    block.fixed_view_mut::<2, 2>(2, 2).copy_from(&(a.transpose() * dt));
    let e = block.exp();
    let phi = e.fixed_view::<2, 2>(2, 2).transpose();
    let q = phi * e.fixed_view::<2, 2>(0, 2);
    let off = 0.5 * (q[(0, 1)] + q[(1, 0)]);
    (phi, Matrix2::new(q[(0, 0)], off, off, q[(1, 1)]))
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
pub fn sym_eigenvalues(m: &Matrix2<f64>) -> (f64, f64) {
    let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let half_diff = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let r = half_diff.hypot(m[(0, 1)]);
    (mean - r, mean + r)
}

/// Lower-triangular factor L with L Lᵀ = m for a positive semidefinite 2×2 `m`.
pub fn psd_cholesky(m: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let (lo, hi) = sym_eigenvalues(m);
    if lo < -1e-12 * hi.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NonPositiveNoise { min_eigenvalue: lo });
    }
    let l11 = m[(0, 0)].max(0.0).sqrt();
    let l21 = if l11 > 0.0 { m[(1, 0)] / l11 } else { 0.0 };
    let l22 = (m[(1, 1)] - l21 * l21).max(0.0).sqrt();
    Ok(Matrix2::new(l11, 0.0, l21, l22))
}

/// Largest real part among the eigenvalues of a 2×2 matrix.
pub fn max_real_eigenvalue(a: &Matrix2<f64>) -> f64 {
    let half_tr = 0.5 * a.trace();
    let disc = half_tr * half_tr - a.determinant();
    if disc >= 0.0 {
        half_tr + disc.sqrt()
    } else {
        half_tr
    }
}

/// Smallest |Re λ| over the eigenvalues of a 2×2 matrix: the slowest relaxation rate.
pub fn slowest_rate(a: &Matrix2<f64>) -> f64 {
    max_real_eigenvalue(a).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Vector3};

    // Vectorized solve of A Σ + Σ Aᵀ = −C over (Σxx, Σxp, Σpp).
    fn lyapunov_by_elimination(a: &Matrix2<f64>, c: &Matrix2<f64>) -> Matrix2<f64> {
        let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        let k = Matrix3::new(
            2.0 * a11, 2.0 * a12, 0.0,
            a21, a11 + a22, a12,
            0.0, 2.0 * a21, 2.0 * a22,
        );
        let rhs = -Vector3::new(c[(0, 0)], c[(0, 1)], c[(1, 1)]);
        let s = k.lu().solve(&rhs).unwrap();
        Matrix2::new(s[0], s[1], s[1], s[2])
    }

    #[test]
    fn isotropic_fixed_point() {
        let s = lyapunov_2x2(&(-Matrix2::identity()), &(Matrix2::identity() * 2.0)).unwrap();
        assert_relative_eq!(s, Matrix2::identity(), epsilon = 1e-15);
    }

    #[test]
    fn brownian_oscillator_equipartition() {
        let (w, g, d) = (3.0, 0.2, 0.7);
        let s = lyapunov_2x2(&Matrix2::new(0.0, w, -w, -g), &Matrix2::new(0.0, 0.0, 0.0, d)).unwrap();
        assert_relative_eq!(s, Matrix2::identity() * (d / (2.0 * g)), epsilon = 1e-14);
    }

    #[test]
    fn closed_formula_matches_elimination() {
        let cases = [
            (Matrix2::new(-1.0, 2.0, -3.0, -0.5), Matrix2::new(1.0, 0.3, 0.3, 2.0)),
            (Matrix2::new(-50.0, 62.8, -62.8, -1.0), Matrix2::new(3.125, 0.0, 0.0, 150.0)),
            (Matrix2::new(-0.1, 0.0, 0.0, -4.0), Matrix2::new(1.0, -0.5, -0.5, 1.0)),
        ];
        for (a, c) in cases {
            let s = lyapunov_2x2(&a, &c).unwrap();
            assert_relative_eq!(s, lyapunov_by_elimination(&a, &c), max_relative = 1e-12);
            let residual = a * s + s * a.transpose() + c;
            assert!(residual.norm() < 1e-12 * c.norm());
        }
    }

    #[test]
    fn boundary_and_unstable_are_refused() {
        let c = Matrix2::identity();
        let centre = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        assert!(matches!(lyapunov_2x2(&centre, &c), Err(Error::StabilityBoundary)));
        let growing = Matrix2::new(0.5, 1.0, -1.0, 0.0);
        assert!(matches!(lyapunov_2x2(&growing, &c), Err(Error::Unstable { .. })));
    }

    #[test]
    fn exact_step_semigroup_and_stationarity() {
        let a = Matrix2::new(-2.0, 5.0, -5.0, -0.3);
        let c = Matrix2::new(0.4, 0.1, 0.1, 1.5);
        let h = 0.01;
        let (phi_h, q_h) = exact_step(&a, &c, h);
        let (phi_2h, q_2h) = exact_step(&a, &c, 2.0 * h);
        assert_relative_eq!(phi_2h, phi_h * phi_h, max_relative = 1e-12);
        assert_relative_eq!(q_2h, phi_h * q_h * phi_h.transpose() + q_h, max_relative = 1e-12);
        // Q ≈ C·h for short steps.
        let (_, q_short) = exact_step(&a, &c, 1e-5);
        assert_relative_eq!(q_short / 1e-5, c, max_relative = 1e-3);
        // Q → Σ_∞ over long horizons.
        let (_, q_long) = exact_step(&a, &c, 40.0);
        assert_relative_eq!(q_long, lyapunov_2x2(&a, &c).unwrap(), max_relative = 1e-10);
    }

    #[test]
    fn cholesky_of_semidefinite() {
        let m = Matrix2::new(0.0, 0.0, 0.0, 4.0);
        let l = psd_cholesky(&m).unwrap();
        assert_relative_eq!(l * l.transpose(), m);
        let m = Matrix2::new(2.0, 0.5, 0.5, 1.0);
        let l = psd_cholesky(&m).unwrap();
        assert_relative_eq!(l * l.transpose(), m, epsilon = 1e-15);
        let bad = Matrix2::new(1.0, 0.0, 0.0, -0.1);
        assert!(matches!(psd_cholesky(&bad), Err(Error::NonPositiveNoise { min_eigenvalue }) if (min_eigenvalue + 0.1).abs() < 1e-15));
    }

    #[test]
    fn slowest_rate_of_underdamped_and_overdamped() {
        assert_relative_eq!(slowest_rate(&Matrix2::new(-50.0, 62.8, -62.8, -1.0)), 25.5);
        let over: Matrix2<f64> = Matrix2::new(-1000.0, 62.8, -62.8, -1.0);
        let tr = over.trace();
        let det = over.determinant();
        let expected = (-tr - (tr * tr - 4.0 * det).sqrt()) / 2.0;
        assert_relative_eq!(slowest_rate(&over), expected, max_relative = 1e-9);
    }
}
