//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Ratio of extreme singular values (infinite for a singular matrix).
pub fn condition_number(a: &CMat) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn spectral_norm(a: &CMat) -> f64 {
    a.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// LU factorisation guarded by a condition-number bound.
pub struct GuardedLu {
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    pub cond: f64,
}

impl GuardedLu {
    pub fn new(a: &CMat, max_cond: f64) -> Result<Self> {
        let cond = condition_number(a);
        if !cond.is_finite() || cond > max_cond {
            return Err(Error::IllConditioned { cond });
        }
        Ok(Self { lu: a.clone().lu(), cond })
    }

    pub fn solve(&self, b: &CMat) -> Result<CMat> {
        self.lu.solve(b).ok_or(Error::IllConditioned { cond: f64::INFINITY })
    }
}

/// A 2×2 complex matrix in row-major order.
pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat2_det(a: &Mat2) -> Complex64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat2_solve(a: &Mat2, rhs: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let det = mat2_det(a);
    if det.norm() == 0.0 {
        return None;
    }
    Some([
        (a[1][1] * rhs[0] - a[0][1] * rhs[1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ])
}

/// Eigen-pairs of a 2×2 matrix with unit-norm eigenvectors.
pub fn eig2(a: &Mat2) -> [(Complex64, [Complex64; 2]); 2] {
    let half_tr = 0.5 * (a[0][0] + a[1][1]);
    let disc = (0.25 * (a[0][0] - a[1][1]) * (a[0][0] - a[1][1]) + a[0][1] * a[1][0]).sqrt();
    let lams = [half_tr + disc, half_tr - disc];
    let vec_for = |lam: Complex64| {
        let v1 = [a[0][1], lam - a[0][0]];
        let v2 = [lam - a[1][1], a[1][0]];
        let n1 = (v1[0].norm_sqr() + v1[1].norm_sqr()).sqrt();
        let n2 = (v2[0].norm_sqr() + v2[1].norm_sqr()).sqrt();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        if n == 0.0 {
            // scalar multiple of the identity
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
        } else {
            [v[0] / n, v[1] / n]
        }
    };
    [(lams[0], vec_for(lams[0])), (lams[1], vec_for(lams[1]))]
}

/// `|⟨v, t⟩| / (|v| |t|)` with the Hermitian inner product.
pub fn overlap(v: &[Complex64; 2], t: &[Complex64; 2]) -> f64 {
    let ip = v[0].conj() * t[0] + v[1].conj() * t[1];
    let nv = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let nt = (t[0].norm_sqr() + t[1].norm_sqr()).sqrt();
    ip.norm() / (nv * nt)
}
