//! Special-function helpers: integer zeta values, polylogarithms on the unit
//! circle and Gauss–Legendre rules.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

/// Riemann zeta at an integer `s ≥ 2`.
pub fn zeta_int(s: u32) -> f64 {
    assert!(s >= 2, "zeta_int needs s >= 2");
    let sf = s as f64;
    let n = 20u32;
    let mut sum = 0.0;
    for k in (1..n).rev() {
        sum += (k as f64).powf(-sf);
    }
    let nf = n as f64;
    let p = nf.powf(-sf);
    sum + nf * p / (sf - 1.0) + 0.5 * p + sf * p / nf / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * p / nf.powi(3) / 720.0
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) * p / nf.powi(5) / 30240.0
        - (0..7).map(|i| sf + i as f64).product::<f64>() * p / nf.powi(7) / 1_209_600.0
        + (0..9).map(|i| sf + i as f64).product::<f64>() * p / nf.powi(9) / 47_900_160.0
}

/// `ζ(s) / j!` for integer `s ≠ 1` and `j ≥ max(0, 1 − s)`.
///
/// Negative arguments are evaluated through the functional equation in
/// logarithmic form so large `j` does not overflow.
pub fn zeta_over_factorial(s: i64, j: usize) -> f64 {
    assert!(s != 1);
    if s >= 2 {
        let mut f = 1.0;
        for t in 2..=j {
            f *= t as f64;
        }
        return zeta_int(s as u32) / f;
    }
    if s == 0 {
        let mut f = 1.0;
        for t in 2..=j {
            f *= t as f64;
        }
        return -0.5 / f;
    }
    let q = (-s) as usize;
    if q.is_multiple_of(2) {
        return 0.0;
    }
    // ζ(1−2m) = (−1)^m 2 (2m−1)! ζ(2m) / (2π)^{2m}
    let m = q.div_ceil(2);
    assert!(j > q, "zeta_over_factorial: need j > -s");
    let mut log = LN_2 + zeta_int(2 * m as u32).ln() - (2 * m) as f64 * (2.0 * PI).ln();
    for t in (2 * m)..=j {
        log -= (t as f64).ln();
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * log.exp()
}

/// Harmonic number `H_n`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Coefficients of the small-`u` representation of `Li_p(e^{iu})`:
/// `Σ_j a_j (iu)^j + (iu)^{p−1}/(p−1)! · (−ln(−iu))`.
///
/// `a_{p−1}` carries `H_{p−1}/(p−1)!`.
pub fn polylog_unit_coeffs(p: usize, terms: usize) -> Vec<f64> {
    assert!(p >= 1);
    (0..terms)
        .map(|j| {
            if j + 1 == p {
                let mut f = 1.0;
                for t in 2..=j {
                    f *= t as f64;
                }
                harmonic(j) / f
            } else {
                zeta_over_factorial(p as i64 - j as i64, j)
            }
        })
        .collect()
}

/// Number of series terms needed for `|u| ≤ u_max < 2π` at double precision.
pub fn polylog_terms(p: usize, u_max: f64) -> usize {
    let ratio = (u_max / (2.0 * PI)).max(1e-3);
    assert!(ratio < 1.0, "polylog series needs |u| < 2π");
    let n = (-38.0 / ratio.ln()).ceil() as usize;
    (n + p + 4).min(2000)
}

/// `Li_p(e^{iu})` for real `0 < |u| < 2π`.
pub fn polylog_unit(p: usize, u: f64) -> Complex64 {
    PolylogTable::new(p, u.abs()).eval(u)
}

/// Precomputed series for `Li_p(e^{iu})` on `|u| ≤ u_max`.
#[derive(Debug, Clone)]
pub struct PolylogTable {
    p: usize,
    coeffs: Vec<f64>,
    inv_fact: f64,
}

impl PolylogTable {
    pub fn new(p: usize, u_max: f64) -> Self {
        let terms = polylog_terms(p, u_max);
        let coeffs = polylog_unit_coeffs(p, terms);
        let mut f = 1.0;
        for t in 2..p {
            f *= t as f64;
        }
        Self { p, coeffs, inv_fact: 1.0 / f }
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn eval(&self, u: f64) -> Complex64 {
        let iu = Complex64::new(0.0, u);
        let mut sum = Complex64::new(0.0, 0.0);
        for aj in self.coeffs.iter().rev() {
            sum = sum * iu + aj;
        }
        if u == 0.0 {
            return if self.p >= 2 { Complex64::new(zeta_int(self.p as u32), 0.0) } else { sum };
        }
        let log = Complex64::new(u.abs().ln(), -0.5 * PI * u.signum());
        sum - iu.powu(self.p as u32 - 1) * self.inv_fact * log
    }

    /// `Re Li_p(e^{iθ}) = Σ cos(mθ)/m^p` for any real `θ` (needs `u_max ≥ π`).
    pub fn cos_series(&self, theta: f64) -> f64 {
        let mut t = theta.rem_euclid(2.0 * PI);
        if t > PI {
            t -= 2.0 * PI;
        }
        self.eval(t).re
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
