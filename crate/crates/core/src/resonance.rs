//! Asymptotic resonance seeds, complex root refinement of the reduced
//! eigenvalues and `ε`-scaling studies.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{classify, Region};
use crate::error::{Error, Result};
use crate::greens::ExteriorKernel;
use crate::operators::{Branch, Discretisation, Parity};

pub const MAX_ITERATIONS: usize = 50;
/// Radius of the disc around the seed that the iterates must stay in.
pub const BASIN_RADIUS: f64 = 0.3;
/// Convergence threshold on both `|λ|` and the step.
pub const ROOT_TOL: f64 = 1e-12;
/// Accept a stagnated iteration when `|λ|` is below this floor.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;
/// `|Im k|` below which a root in the first continuum is reported as bound.
pub const BIC_TOL: f64 = 1e-9;
/// Largest admissible `mε`.
pub const MODE_EPS_LIMIT: f64 = 0.2;
/// Minimum distance between the two seeds of one mode.
pub const SEED_SEPARATION: f64 = 1e-6;

/// `γ = 2β_e + (2/π) ln 2 − (2/π) ln ε − β₀` at `(κ, k)`.
pub fn gamma(disc: &Discretisation, kappa: f64, k: Complex64) -> Result<Complex64> {
    let cfg = &disc.cfg;
    let ext = ExteriorKernel::new(cfg, kappa, k, 1.0 + cfg.separation, disc.series_tol)?;
    Ok(2.0 * ext.beta_e + 2.0 * LN_2 / PI - 2.0 * cfg.aperture.ln() / PI - disc.beta0())
}

/// Starting point for a root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceSeed {
    pub m: u32,
    /// Branch `j ∈ {1, 2}`.
    pub branch: usize,
    pub parity: Parity,
    pub kappa: f64,
    pub k_hat: Complex64,
}

/// Leading-order predictions `k̂₁` (complex) and `k̂₂` (real) near `mπ`.
pub fn asymptotic_resonances(disc: &Discretisation, kappa: f64, m: u32) -> Result<[ResonanceSeed; 2]> {
    let eps = disc.cfg.aperture;
    if m == 0 || m as f64 * eps >= MODE_EPS_LIMIT {
        return Err(Error::InvalidConfig(format!("mode {m} with aperture {eps} violates m*eps < {MODE_EPS_LIMIT}")));
    }
    let r = &disc.reference;
    let (sum, diff) = (r.alpha + r.alpha_tilde, r.alpha - r.alpha_tilde);
    if sum == 0.0 || diff == 0.0 {
        return Err(Error::SingularReference { beta0: r.beta0, cond: f64::INFINITY });
    }
    let base = m as f64 * PI;
    let g = gamma(disc, kappa, Complex64::new(base, 0.0))?;
    let k1 = base + 2.0 * base * ((2.0 / PI) * eps * eps.ln() + (1.0 / sum + g) * eps);
    let k2 = Complex64::new(base + 2.0 * base * (1.0 / diff + 2.0 * LN_2 / PI - r.beta0) * eps, 0.0);
    if (k1 - k2).norm() < SEED_SEPARATION {
        return Err(Error::ResonanceOverlap(k1, k2));
    }
    let parity = Parity::for_mode(m);
    Ok([
        ResonanceSeed { m, branch: 1, parity, kappa, k_hat: k1 },
        ResonanceSeed { m, branch: 2, parity, kappa, k_hat: k2 },
    ])
}

/// Eigenvalue of `𝕄_σ(k)` on branch `j`, tracked by `previous` when given.
pub fn lambda_eval(
    disc: &Discretisation,
    kappa: f64,
    k: Complex64,
    parity: Parity,
    branch: usize,
    previous: Option<&[Complex64; 2]>,
) -> Result<Branch> {
    disc.reduced(kappa, k, parity)?.branch(branch, previous)
}

/// A refined resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceResult {
    pub m: u32,
    pub branch: usize,
    pub parity: Parity,
    pub kappa: f64,
    pub k: Complex64,
    pub k_hat: Complex64,
    pub residual: f64,
    pub iterations: usize,
    pub region: Region,
    /// Real root in the first continuum.
    pub bound: bool,
}

/// Muller iteration on `λ_{j,σ}` started from the seed.
pub fn refine_root(disc: &Discretisation, seed: &ResonanceSeed) -> Result<ResonanceResult> {
    let eval = |k: Complex64, prev: Option<&[Complex64; 2]>| lambda_eval(disc, seed.kappa, k, seed.parity, seed.branch, prev);
    let h = Complex64::new(1e-3 * (1.0 + seed.k_hat.norm()), 0.0);
    let first = eval(seed.k_hat, None)?;
    let mut track = first.vector;
    let mut xs = [seed.k_hat - h, seed.k_hat + h, seed.k_hat];
    let mut fs = [Complex64::new(0.0, 0.0); 3];
    for (i, x) in xs.iter().enumerate().take(2) {
        fs[i] = eval(*x, Some(&track))?.lambda;
    }
    fs[2] = first.lambda;

    let mut best = (seed.k_hat, first.lambda.norm());
    for it in 1..=MAX_ITERATIONS {
        let (x0, x1, x2) = (xs[0], xs[1], xs[2]);
        let (f0, f1, f2) = (fs[0], fs[1], fs[2]);
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc_root = (b * b - 4.0 * f2 * a).sqrt();
        let den = if (b + disc_root).norm() >= (b - disc_root).norm() { b + disc_root } else { b - disc_root };
        let step = if den.norm() == 0.0 { Complex64::new(1e-8, 0.0) } else { -2.0 * f2 / den };
        let x3 = x2 + step;
        if (x3 - seed.k_hat).norm() > BASIN_RADIUS {
            return Err(Error::BasinEscape { k: x3, seed: seed.k_hat, radius: BASIN_RADIUS });
        }
        let br = eval(x3, Some(&track))?;
        track = br.vector;
        let res = br.lambda.norm();
        if res < best.1 {
            best = (x3, res);
        }
        let stalled = step.norm() <= 4.0 * f64::EPSILON * x3.norm();
        if (res < ROOT_TOL && step.norm() < ROOT_TOL) || (stalled && res < ROUNDOFF_FLOOR) {
            return Ok(finish(disc, seed, x3, res, it));
        }
        xs = [x1, x2, x3];
        fs = [f1, f2, br.lambda];
    }
    if best.1 < ROUNDOFF_FLOOR {
        return Ok(finish(disc, seed, best.0, best.1, MAX_ITERATIONS));
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: best.1 })
}

fn finish(disc: &Discretisation, seed: &ResonanceSeed, k: Complex64, residual: f64, iterations: usize) -> ResonanceResult {
    let region = classify(seed.kappa, k.re, disc.cfg.reciprocal());
    ResonanceResult {
        m: seed.m,
        branch: seed.branch,
        parity: seed.parity,
        kappa: seed.kappa,
        k,
        k_hat: seed.k_hat,
        residual,
        iterations,
        region,
        bound: region == Region::D1 && k.im.abs() < BIC_TOL,
    }
}

/// Seeds and refines both branches for every mode, in parallel; results keep
/// the order `(m, j)` of the input.
pub fn find_resonances(disc: &Discretisation, kappa_of_mode: impl Fn(u32) -> f64 + Sync, modes: &[u32]) -> Vec<(u32, usize, Result<ResonanceResult>)> {
    let jobs: Vec<(u32, usize)> = modes.iter().flat_map(|&m| [(m, 1), (m, 2)]).collect();
    jobs.par_iter()
        .map(|&(m, j)| {
            let res = asymptotic_resonances(disc, kappa_of_mode(m), m).and_then(|seeds| refine_root(disc, &seeds[j - 1]));
            (m, j, res)
        })
        .collect()
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return Err(Error::InvalidConfig("line fit needs at least two paired points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("line fit needs distinct abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, slope_stderr })
}

/// Imaginary parts of both branches over an aperture list, with log–log fits.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub m: u32,
    pub kappa: f64,
    pub region: Region,
    pub apertures: Vec<f64>,
    /// Refined roots per aperture, branches 1 and 2.
    pub roots: Vec<[Complex64; 2]>,
    /// `|k − k̂|` for branch 1.
    pub seed_error: Vec<f64>,
    /// Fits of `ln|Im k^{(j)}|` against `ln ε`.
    pub fits: [LineFit; 2],
    /// Fit of `ln|k^{(1)} − k̂^{(1)}|` against `ln ε`.
    pub seed_error_fit: LineFit,
}

pub fn scaling_study(disc: &Discretisation, kappa: f64, m: u32, apertures: &[f64]) -> Result<ScalingReport> {
    if apertures.len() < 4 {
        return Err(Error::InvalidConfig("scaling study needs at least four apertures".into()));
    }
    let runs: Vec<Result<[ResonanceResult; 2]>> = apertures
        .par_iter()
        .map(|&eps| {
            let d = disc.with_aperture(eps)?;
            let seeds = asymptotic_resonances(&d, kappa, m)?;
            Ok([refine_root(&d, &seeds[0])?, refine_root(&d, &seeds[1])?])
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let region = runs[0][0].region;
    for (eps, r) in apertures.iter().zip(&runs) {
        if r.iter().any(|x| x.region != region) {
            return Err(Error::RegionMismatch(format!("aperture {eps} leaves region {}", region.as_str())));
        }
    }
    let lx: Vec<f64> = apertures.iter().map(|e| e.ln()).collect();
    let fit_branch = |j: usize| fit_line(&lx, &runs.iter().map(|r| r[j].k.im.abs().ln()).collect::<Vec<_>>());
    let seed_error: Vec<f64> = runs.iter().map(|r| (r[0].k - r[0].k_hat).norm()).collect();
    let seed_error_fit = fit_line(&lx, &seed_error.iter().map(|v| v.ln()).collect::<Vec<_>>())?;
    Ok(ScalingReport {
        m,
        kappa,
        region,
        apertures: apertures.to_vec(),
        roots: runs.iter().map(|r| [r[0].k, r[1].k]).collect(),
        seed_error,
        fits: [fit_branch(0)?, fit_branch(1)?],
        seed_error_fit,
    })
}
