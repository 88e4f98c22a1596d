//! Slit-waveguide kernels in modal form.
//!
//! The same-end kernel has a logarithmic singularity that is split off in
//! closed form; the remaining modal series converges like `1/m³` and is summed
//! explicitly for low modes with a polylogarithmic tail. The cross-end kernel
//! is exponentially convergent.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::PolylogTable;

/// Modes summed explicitly before the tail expansion takes over.
pub const EXPLICIT_MODES: usize = 24;

/// Smallest admissible `|sin k|` before the waveguide pole is declared.
pub const WAVEGUIDE_POLE_GUARD: f64 = 1e-10;

/// Maximum number of tail kernels `Σ_{m>M} cc_m / m^{2j+1}`.
pub const TAIL_TERMS: usize = 16;

#[derive(Debug, Clone)]
pub struct InteriorKernel {
    pub k: Complex64,
    pub eps: f64,
    pub beta_i: Complex64,
    pub beta_tilde: Complex64,
    /// `ε/(mπ) − coth(γ_m)/γ_m` for `m = 1..=EXPLICIT_MODES` (index `m−1`).
    pub same_modes: Vec<Complex64>,
    /// `−1/(γ_m sinh γ_m)` for the cross-end kernel.
    pub cross_modes: Vec<Complex64>,
    /// Coefficients of the tail kernels `Σ_{m>M} cc_m / m^{2j+1}`, `j ≥ 1`.
    pub tail: Vec<Complex64>,
}

fn coth_over(g: Complex64) -> Complex64 {
    if g.re > 20.0 {
        let e = (-2.0 * g).exp();
        (1.0 + e) / (1.0 - e) / g
    } else {
        g.cosh() / g.sinh() / g
    }
}

fn inv_sinh_over(g: Complex64) -> Complex64 {
    if g.re > 20.0 {
        2.0 * (-g).exp() / (1.0 - (-2.0 * g).exp()) / g
    } else {
        1.0 / (g * g.sinh())
    }
}

/// Cosine mode profile on the rescaled aperture.
#[inline]
pub fn mode(m: usize, x: f64) -> f64 {
    (m as f64 * PI * (x + 0.5)).cos()
}

impl InteriorKernel {
    pub fn new(k: Complex64, eps: f64) -> Result<Self> {
        let m0 = EXPLICIT_MODES;
        let ratio = k.norm() * eps / (m0 as f64 * PI);
        if ratio >= 0.2 {
            return Err(Error::InvalidConfig(format!(
                "k*eps = {} too large for the slit mode expansion",
                k.norm() * eps
            )));
        }
        let sin_k = k.sin();
        if sin_k.norm() < WAVEGUIDE_POLE_GUARD {
            return Err(Error::WaveguidePole { k, sin_abs: sin_k.norm() });
        }
        let beta_i = k.cos() / (sin_k * k * eps) + 2.0 * LN_2 / PI;
        let beta_tilde = 1.0 / (eps * k * sin_k);

        let mut same_modes = Vec::with_capacity(m0);
        let mut cross_modes = Vec::with_capacity(m0);
        for m in 1..=m0 {
            let q = m as f64 * PI / eps;
            let g = (q * q - k * k).sqrt();
            same_modes.push(eps / (m as f64 * PI) - coth_over(g));
            cross_modes.push(-inv_sinh_over(g));
        }

        // ε/(mπ) − 1/γ_m = −Σ_j e_j k^{2j} (ε/π)^{2j+1} / m^{2j+1}
        let mut tail = Vec::new();
        let x = eps / PI;
        let k2 = k * k;
        let mut e_j = 1.0;
        let mut kpow = Complex64::new(1.0, 0.0);
        for j in 1..=TAIL_TERMS {
            e_j *= (2 * j - 1) as f64 / (2 * j) as f64;
            kpow *= k2;
            let coeff = -(2.0 / eps) * e_j * kpow * x.powi(2 * j as i32 + 1);
            let size = coeff.norm() / (m0 as f64 + 1.0).powi(2 * j as i32 + 1);
            tail.push(coeff);
            if size < 1e-18 {
                break;
            }
        }

        Ok(Self { k, eps, beta_i, beta_tilde, same_modes, cross_modes, tail })
    }

    /// Smooth remainder `r_i(X, Y)` of the same-end kernel.
    pub fn remainder(&self, x: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, dm) in self.same_modes.iter().enumerate() {
            let m = i + 1;
            acc += dm * (mode(m, x) * mode(m, y));
        }
        acc *= 2.0 / self.eps;
        for (j, c) in self.tail.iter().enumerate() {
            acc += c * tail_kernel(2 * j + 3, x, y, EXPLICIT_MODES);
        }
        acc
    }

    /// Smooth cross-end remainder `r̃_i(X, Y)`.
    pub fn cross_remainder(&self, x: f64, y: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.cross_modes.iter().enumerate() {
            let m = i + 1;
            acc += c * (mode(m, x) * mode(m, y));
        }
        acc * (2.0 / self.eps)
    }

    /// Full same-end kernel at distinct points.
    pub fn kernel(&self, x: f64, y: f64) -> Complex64 {
        self.beta_i + Complex64::new(log_part(x, y), 0.0) + self.remainder(x, y)
    }

    /// Full cross-end kernel.
    pub fn cross_kernel(&self, x: f64, y: f64) -> Complex64 {
        self.beta_tilde + self.cross_remainder(x, y)
    }
}

/// `Σ_{m > m0} cos(mπ(X+½)) cos(mπ(Y+½)) / m^p` for `p ≥ 2`.
pub fn tail_kernel(p: usize, x: f64, y: f64, m0: usize) -> f64 {
    tail_kernel_with(&PolylogTable::new(p, PI), x, y, m0)
}

/// As [`tail_kernel`] with a prebuilt series table of order `p`.
pub fn tail_kernel_with(table: &PolylogTable, x: f64, y: f64, m0: usize) -> f64 {
    let p = table.order();
    let full = 0.5 * (table.cos_series(PI * (x - y)) + table.cos_series(PI * (x + y + 1.0)));
    let head: f64 = (1..=m0).map(|m| mode(m, x) * mode(m, y) / (m as f64).powi(p as i32)).sum();
    full - head
}

fn ln_sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        -x * x / 6.0
    } else {
        (x.sin() / x).ln()
    }
}

/// `ln(sin(πt/2)/t)` for `|t| < 2`, extended evenly.
pub fn smooth_difference_log(t: f64) -> f64 {
    (0.5 * PI).ln() + ln_sinc(0.5 * PI * t)
}

/// `ln(sin(πs/2) / (s(2 − s)))` for `0 ≤ s ≤ 2`.
pub fn smooth_sum_log(s: f64) -> f64 {
    if s <= 1.0 {
        (0.5 * PI).ln() + ln_sinc(0.5 * PI * s) - (2.0 - s).ln()
    } else {
        (0.5 * PI).ln() + ln_sinc(0.5 * PI * (2.0 - s)) - s.ln()
    }
}

/// Singular part `(1/π)[ln|X−Y| + ln(1+X+Y) + ln(1−X−Y) + smooth logs]`.
pub fn log_part(x: f64, y: f64) -> f64 {
    let s = x + y + 1.0;
    ((x - y).abs().ln()
        + s.ln()
        + (2.0 - s).ln()
        + smooth_difference_log(x - y)
        + smooth_sum_log(s))
        / PI
}

/// Direct truncated modal sum of the same-end kernel (reference only).
pub fn direct_modal_sum(k: Complex64, eps: f64, x: f64, y: f64, modes: usize) -> Complex64 {
    let mut acc = k.cos() / (k.sin() * k) / eps;
    for m in 1..=modes {
        let q = m as f64 * PI / eps;
        let g = (q * q - k * k).sqrt();
        acc -= (2.0 / eps) * coth_over(g) * (mode(m, x) * mode(m, y));
    }
    acc
}
