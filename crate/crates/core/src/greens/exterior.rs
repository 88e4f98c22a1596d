//! Quasi-periodic exterior kernel on the rescaled aperture.
//!
//! Orders `|n| ≤ N` are summed explicitly. Beyond `N` each coefficient
//! `1/(iζ_n)` is expanded in powers of `1/(bn)` and the resulting sums
//! `Σ e^{inu}/n^p` are resummed through polylogarithms on the unit circle,
//! whose small-argument series separates the logarithmic singularity.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::{explicit_order_bound, zeta_n, GratingConfig};
use crate::error::{Error, Result};
use crate::special::{polylog_terms, polylog_unit_coeffs, zeta_int};

/// Number of large-order expansion terms.
const EXPANSION_ORDER: usize = 10;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone)]
pub struct ExteriorKernel {
    pub kappa: f64,
    pub k: Complex64,
    pub eps: f64,
    pub b: f64,
    pub d: f64,
    /// Largest explicitly summed order.
    pub n_max: i64,
    /// Reduced coefficients `ŝ_n`, indexed by `n + n_max`.
    s_hat: Vec<Complex64>,
    /// Power-series coefficients of the regular part.
    power: Vec<Complex64>,
    /// Coefficients of `u^{p-1} ln|u|`, `p ≥ 2` (index `p-1`).
    log_poly: Vec<Complex64>,
    /// Coefficients of `u^{p-1} sgn(u)` (index `p-1`).
    sgn_poly: Vec<Complex64>,
    pub beta_e: Complex64,
    /// Estimated truncation error of the large-order expansion.
    pub tail_estimate: f64,
}

fn binomial_inverse_sqrt(kappa: f64, k: Complex64, terms: usize) -> Vec<Complex64> {
    // Taylor coefficients of (1 + 2κt + (κ² − k²)t²)^{-1/2}.
    let a1 = Complex64::new(2.0 * kappa, 0.0);
    let a2 = kappa * kappa - k * k;
    let alpha = -0.5;
    let mut g = vec![Complex64::new(0.0, 0.0); terms + 1];
    g[0] = Complex64::new(1.0, 0.0);
    for j in 0..terms {
        let jf = j as f64;
        let mut next = a1 * (alpha - jf) * g[j];
        if j >= 1 {
            next += a2 * (2.0 * alpha - jf + 1.0) * g[j - 1];
        }
        g[j + 1] = next / (jf + 1.0);
    }
    g
}

impl ExteriorKernel {
    /// Build the kernel; `z_max` bounds `|X − Y ± ℓ|` over all uses.
    pub fn new(cfg: &GratingConfig, kappa: f64, k: Complex64, z_max: f64, tol: f64) -> Result<Self> {
        let b = cfg.reciprocal();
        let d = cfg.period;
        let eps = cfg.aperture;
        let n_max = explicit_order_bound(kappa, k.norm(), b);
        let p_max = EXPANSION_ORDER;

        let g = binomial_inverse_sqrt(kappa, k, p_max);
        // c_p^± = −g_{p−1} (±1)^{p−1} / b^p
        let mut c_plus = vec![Complex64::new(0.0, 0.0); p_max + 1];
        let mut c_minus = vec![Complex64::new(0.0, 0.0); p_max + 1];
        for p in 1..=p_max {
            let bp = b.powi(p as i32);
            c_plus[p] = -g[p - 1] / bp;
            c_minus[p] = if (p - 1) % 2 == 0 { c_plus[p] } else { -c_plus[p] };
        }

        let mut s_hat = Vec::with_capacity((2 * n_max + 1) as usize);
        let mut s0 = Complex64::new(0.0, 0.0);
        let mut explicit_sum = Complex64::new(0.0, 0.0);
        for n in -n_max..=n_max {
            let zeta = zeta_n(kappa, k, n, b)?;
            let s = 1.0 / (I * zeta);
            if n == 0 {
                s0 = s;
                s_hat.push(s);
                continue;
            }
            let na = n.unsigned_abs() as f64;
            let c = if n > 0 { &c_plus } else { &c_minus };
            let mut expansion = Complex64::new(0.0, 0.0);
            for p in (1..=p_max).rev() {
                expansion = (expansion + c[p]) / na;
            }
            s_hat.push(s - expansion);
            explicit_sum += s - c[1] / na;
        }

        // β_e: constant term of the kernel at coincident points.
        let mut tail_const = Complex64::new(0.0, 0.0);
        for p in 2..=p_max {
            let partial: f64 = (1..=n_max).map(|n| (n as f64).powi(-(p as i32))).sum();
            tail_const += (c_plus[p] + c_minus[p]) * (zeta_int(p as u32) - partial);
        }
        let beta_e = Complex64::new((eps * b).ln() / PI, 0.0) + (s0 + explicit_sum + tail_const) / d;

        let nf = n_max as f64;
        let tail_estimate = 2.0 * g[p_max].norm() / (b.powi(p_max as i32 + 1) * p_max as f64 * nf.powi(p_max as i32));
        let scale = beta_e.norm().max(1.0);
        if tail_estimate > tol * scale {
            return Err(Error::SeriesTruncation { tail: tail_estimate, tol: tol * scale });
        }

        let u_max = b * eps * z_max * 1.000_001 + 1e-12;
        if u_max >= 2.0 * PI * 0.98 {
            return Err(Error::InvalidConfig(format!(
                "aperture too large for the lattice-sum series (b*eps*|Z| = {u_max})"
            )));
        }
        let terms = polylog_terms(p_max, u_max);
        let mut power = vec![Complex64::new(0.0, 0.0); terms];
        let mut log_poly = vec![Complex64::new(0.0, 0.0); p_max];
        let mut sgn_poly = vec![Complex64::new(0.0, 0.0); p_max];
        let mut fact = 1.0;
        for p in 1..=p_max {
            if p >= 2 {
                fact *= (p - 1) as f64;
            }
            let a = polylog_unit_coeffs(p, terms);
            let mut ip = Complex64::new(1.0, 0.0);
            let mut im = Complex64::new(1.0, 0.0);
            for (j, aj) in a.iter().enumerate() {
                power[j] += (c_plus[p] * ip + c_minus[p] * im) * *aj;
                ip *= I;
                im *= -I;
            }
            let ip = I.powu(p as u32 - 1);
            let im = (-I).powu(p as u32 - 1);
            if p >= 2 {
                log_poly[p - 1] = -(c_plus[p] * ip + c_minus[p] * im) / fact;
            }
            sgn_poly[p - 1] = I * (0.5 * PI) * (c_plus[p] * ip - c_minus[p] * im) / fact;
        }

        Ok(Self {
            kappa,
            k,
            eps,
            b,
            d,
            n_max,
            s_hat,
            power,
            log_poly,
            sgn_poly,
            beta_e,
            tail_estimate,
        })
    }

    /// Regular part of the resummed large-order sum, as a function of `u = bεZ`.
    fn regular(&self, u: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.power.iter().rev() {
            acc = acc * u + c;
        }
        if u != 0.0 {
            let mut lp = Complex64::new(0.0, 0.0);
            for c in self.log_poly.iter().rev() {
                lp = lp * u + c;
            }
            let mut sp = Complex64::new(0.0, 0.0);
            for c in self.sgn_poly.iter().rev() {
                sp = sp * u + c;
            }
            acc += lp * u.abs().ln() + sp * u.signum();
        }
        acc
    }

    /// Explicit order sum `Σ_{|n|≤N} ŝ_n e^{inu}`.
    fn explicit(&self, u: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, u);
        let mut ph = Complex64::from_polar(1.0, -u * self.n_max as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in &self.s_hat {
            acc += s * ph;
            ph *= step;
        }
        acc
    }

    /// `G^e` at separation `Z ≠ 0` (scaled units).
    pub fn kernel(&self, z: f64) -> Complex64 {
        let u = self.b * self.eps * z;
        let pre = Complex64::from_polar(1.0, self.kappa * self.eps * z);
        pre * ((self.explicit(u) + self.regular(u)) / self.d + (u.abs()).ln() / PI)
    }

    /// `r_e(Z) = G^e(Z) − β_e − (1/π) ln|Z|`, continuous through `Z = 0`.
    pub fn remainder(&self, z: f64) -> Complex64 {
        let u = self.b * self.eps * z;
        let pre = Complex64::from_polar(1.0, self.kappa * self.eps * z);
        let mut v = pre * ((self.explicit(u) + self.regular(u)) / self.d + (self.b * self.eps).ln() / PI)
            - self.beta_e;
        if z != 0.0 {
            v += (pre - 1.0) * z.abs().ln() / PI;
        }
        v
    }

    /// Part of the kernel that is not a finite exponential sum, with the
    /// `(1/π) ln|Z|` singularity removed when `strip_log` is set.
    pub fn nonseparable(&self, z: f64, strip_log: bool) -> Complex64 {
        let u = self.b * self.eps * z;
        let pre = Complex64::from_polar(1.0, self.kappa * self.eps * z);
        let mut v = pre * self.regular(u) / self.d;
        if z != 0.0 {
            let lz = z.abs().ln() / PI;
            v += if strip_log { (pre - 1.0) * lz } else { pre * lz };
        }
        v
    }

    /// Separable part as `(wavenumber, coefficient)` pairs: the kernel
    /// contribution is `Σ coeff · e^{i wavenumber ε Z}`.
    pub fn separable_terms(&self) -> Vec<(f64, Complex64)> {
        let log_const = (self.b * self.eps).ln() / PI;
        (-self.n_max..=self.n_max)
            .zip(self.s_hat.iter())
            .map(|(n, s)| {
                let mut c = s / self.d;
                if n == 0 {
                    c += log_const;
                }
                (self.kappa + n as f64 * self.b, c)
            })
            .collect()
    }
}

/// Direct partial sum `−(i/d) Σ_{|n|≤N} e^{iκ_n ε Z}/ζ_n` (reference only).
pub fn direct_partial_sum(cfg: &GratingConfig, kappa: f64, k: Complex64, z: f64, n_terms: i64) -> Result<Complex64> {
    let b = cfg.reciprocal();
    let eps = cfg.aperture;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in -n_terms..=n_terms {
        let zeta = zeta_n(kappa, k, n, b)?;
        let kn = kappa + n as f64 * b;
        acc += Complex64::from_polar(1.0, kn * eps * z) / zeta;
    }
    Ok(-I * acc / cfg.period)
}
