//! Weighted Chebyshev basis on the aperture and the wavenumber-independent
//! Galerkin matrices built from it.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::greens::interior::{mode, smooth_difference_log, smooth_sum_log, tail_kernel_with, EXPLICIT_MODES, TAIL_TERMS};
use crate::linalg::{CMat, RMat};
use crate::special::{gauss_legendre, PolylogTable};

pub const DEFAULT_BASIS: usize = 16;
pub const DEFAULT_QUADRATURE: usize = 128;

/// Densities `w_n(Y) = T_n(2Y)/√(¼ − Y²)` with a Gauss–Chebyshev rule.
#[derive(Debug, Clone)]
pub struct ApertureBasis {
    pub n: usize,
    pub nq: usize,
    pub separation: f64,
    /// Quadrature nodes `Y_q = cos(θ_q)/2`.
    pub nodes: Vec<f64>,
    /// `∫ w_i f ≈ Σ_q proj[i, q] f(Y_q)`.
    pub proj: RMat,
    /// Galerkin matrix of `(1/π) ln|X − Y|`.
    pub log_self: RMat,
    /// Galerkin matrix of the full same-slit log operator `S`.
    pub s: RMat,
    /// Galerkin matrices of `(1/π) ln|X − Y − ℓ|` and `(1/π) ln|X − Y + ℓ|`.
    pub s_minus: RMat,
    pub s_plus: RMat,
    /// Mode projections `∫ w_i cos(mπ(Y+½))`, row `m−1`.
    pub modes: RMat,
    /// Galerkin matrices of `Σ_{m>M} cc_m / m^{2j+1}`, `j = 1..`.
    pub tails: Vec<RMat>,
}

/// `∫ w_i(X) ln|X − c| dX` for `|2c| ≥ 1`, written with `gap = |2c| − 1`.
fn log_moment(i: usize, sign: f64, gap: f64) -> f64 {
    let rho = 1.0 + gap + (gap * (2.0 + gap)).sqrt();
    if i == 0 {
        PI * (rho / 4.0).ln()
    } else {
        let s = if i % 2 == 1 { sign } else { 1.0 };
        -(PI / i as f64) * s * rho.powi(-(i as i32))
    }
}

impl ApertureBasis {
    pub fn new(n: usize, nq: usize, separation: f64) -> Result<Self> {
        if n < 2 || nq < 2 * n {
            return Err(Error::InvalidConfig(format!("basis size {n} with {nq} nodes is too small")));
        }
        if separation <= 1.0 {
            return Err(Error::InvalidConfig("separation must exceed 1".into()));
        }
        let thetas: Vec<f64> = (0..nq).map(|q| (q as f64 + 0.5) * PI / nq as f64).collect();
        let nodes: Vec<f64> = thetas.iter().map(|t| 0.5 * t.cos()).collect();
        let proj = RMat::from_fn(n, nq, |i, q| PI / nq as f64 * (i as f64 * thetas[q]).cos());

        let log_self = RMat::from_fn(n, n, |i, j| {
            if i != j {
                0.0
            } else if i == 0 {
                -2.0 * PI * LN_2
            } else {
                -PI / (2.0 * i as f64)
            }
        });

        // Reflection logs ln(1+X+Y) and ln(1−X−Y): analytic in X, Gauss–Legendre in φ.
        let n_outer = nq.max(64);
        let (gx, gw) = gauss_legendre(n_outer);
        let mut reflect = RMat::zeros(n, n);
        for (x, w) in gx.iter().zip(&gw) {
            let phi = 0.5 * PI * (x + 1.0);
            let wphi = 0.5 * PI * w;
            let half = 0.5 * phi;
            // 1 + 2Y and 1 − 2Y with Y = cos(φ)/2
            let gap_lo = 2.0 * half.cos().powi(2);
            let gap_hi = 2.0 * half.sin().powi(2);
            for i in 0..n {
                let val = log_moment(i, -1.0, gap_lo) + log_moment(i, 1.0, gap_hi);
                for j in 0..n {
                    reflect[(i, j)] += wphi * (j as f64 * phi).cos() * val;
                }
            }
        }
        reflect /= PI;

        // Smooth remainders of the log-sine factors by tensor quadrature.
        let smooth_kernel = RMat::from_fn(nq, nq, |q, r| {
            let (x, y) = (nodes[q], nodes[r]);
            (smooth_difference_log(x - y) + smooth_sum_log(x + y + 1.0)) / PI
        });
        let smooth = &proj * smooth_kernel * proj.transpose();
        let s = 2.0 * &log_self + reflect + smooth;

        // Shifted logs: (1/π) ln|X − c| with c = Y ± ℓ, analytic in X.
        let shifted = |shift: f64| {
            let mut m = RMat::zeros(n, n);
            for (r, &y) in nodes.iter().enumerate() {
                let c2 = 2.0 * (y + shift);
                let gap = c2.abs() - 1.0;
                for i in 0..n {
                    let val = log_moment(i, c2.signum(), gap) / PI;
                    for j in 0..n {
                        m[(i, j)] += proj[(j, r)] * val;
                    }
                }
            }
            m
        };
        let s_minus = shifted(separation);
        let s_plus = shifted(-separation);

        let modes = RMat::from_fn(EXPLICIT_MODES, n, |m, i| {
            (0..nq).map(|q| proj[(i, q)] * mode(m + 1, nodes[q])).sum()
        });

        let tails = (1..=TAIL_TERMS)
            .map(|j| {
                let table = PolylogTable::new(2 * j + 1, PI);
                let k = RMat::from_fn(nq, nq, |q, r| tail_kernel_with(&table, nodes[q], nodes[r], EXPLICIT_MODES));
                &proj * k * proj.transpose()
            })
            .collect();

        Ok(Self { n, nq, separation, nodes, proj, log_self, s, s_minus, s_plus, modes, tails })
    }

    pub fn with_defaults(separation: f64) -> Result<Self> {
        Self::new(DEFAULT_BASIS, DEFAULT_QUADRATURE, separation)
    }

    /// Projections `∫ w_i(Y) e^{i a Y} dY`.
    pub fn exp_moments(&self, a: f64) -> Vec<Complex64> {
        let phases: Vec<Complex64> = self.nodes.iter().map(|y| Complex64::from_polar(1.0, a * y)).collect();
        (0..self.n)
            .map(|i| (0..self.nq).map(|q| phases[q] * self.proj[(i, q)]).sum())
            .collect()
    }

    /// Galerkin matrix of a pointwise kernel by tensor quadrature.
    pub fn galerkin<F: Fn(f64, f64) -> Complex64>(&self, kernel: F) -> CMat {
        let k = CMat::from_fn(self.nq, self.nq, |q, r| kernel(self.nodes[q], self.nodes[r]));
        let p = crate::linalg::to_complex(&self.proj);
        &p * k * p.transpose()
    }

    /// Galerkin matrix of the rank-one projector `P`.
    pub fn projector(&self) -> RMat {
        let mut p = RMat::zeros(self.n, self.n);
        p[(0, 0)] = PI * PI;
        p
    }

    /// Evaluate a density given by basis coefficients at `Y` (interior point).
    pub fn density_at(&self, coeffs: &[Complex64], y: f64) -> Complex64 {
        let x = 2.0 * y;
        let weight = 1.0 / (0.25 - y * y).sqrt();
        let (mut t0, mut t1) = (1.0, x);
        let mut acc = coeffs[0] * t0;
        if coeffs.len() > 1 {
            acc += coeffs[1] * t1;
        }
        for c in coeffs.iter().skip(2) {
            let t2 = 2.0 * x * t1 - t0;
            acc += c * t2;
            t0 = t1;
            t1 = t2;
        }
        acc * weight
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_moment_matches_quadrature() {
        // ∫ w_i(X) ln|X − c| dX by a fine Gauss–Chebyshev rule, c well outside I
        let nq = 4000;
        for &c in &[0.9, -1.3, 2.5] {
            for i in 0..5 {
                let mut acc = 0.0;
                for q in 0..nq {
                    let th = (q as f64 + 0.5) * PI / nq as f64;
                    acc += PI / nq as f64 * (i as f64 * th).cos() * (0.5 * th.cos() - c).abs().ln();
                }
                let c2: f64 = 2.0 * c;
                let exact = log_moment(i, c2.signum(), c2.abs() - 1.0);
                assert!((acc - exact).abs() < 1e-12, "c={c} i={i}: {acc} vs {exact}");
            }
        }
    }

    #[test]
    fn s_is_symmetric_and_shifts_mirror() {
        let b = ApertureBasis::with_defaults(2.0).unwrap();
        let asym = (&b.s - b.s.transpose()).amax();
        assert!(asym < 1e-12, "{asym}");
        // parity: w_i(−Y) = (−1)^i w_i(Y) maps S^+ onto S^−
        for i in 0..b.n {
            for j in 0..b.n {
                let sgn = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((b.s_plus[(i, j)] - sgn * b.s_minus[(i, j)]).abs() < 1e-12);
            }
        }
    }
}
