//! Helpers shared by the integration test targets.

#![allow(dead_code)]

pub mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slitgrate::linalg::Mat2;
use slitgrate::operators::perturbation_ratios;
use slitgrate::Complex64;

pub const PERTURBATION_DRAWS: usize = 1000;
pub const PERTURBATION_CONSTANT_LIMIT: f64 = 10.0;

fn complex(rng: &mut ChaCha8Rng, re: (f64, f64), im: (f64, f64)) -> Complex64 {
    Complex64::new(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Largest ratio `|λ_j − λ̂_j| / (τ|λ̂_j| + ετ)` over random 2×2 instances.
///
/// `Q̂` is real symmetric Toeplitz with eigenvalues bounded away from zero,
/// `B` is complex symmetric Toeplitz, and `ΔQ` is a random complex matrix
/// rescaled to spectral norm `τ`.
pub fn fitted_perturbation_constant(seed: u64, draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let alpha = rng.gen_range(-2.0..-0.8);
        let alpha_tilde = rng.gen_range(-0.4..0.4);
        let q_hat: Mat2 = [
            [Complex64::new(alpha, 0.0), Complex64::new(alpha_tilde, 0.0)],
            [Complex64::new(alpha_tilde, 0.0), Complex64::new(alpha, 0.0)],
        ];
        let diag = complex(&mut rng, (-4.0, 1.0), (-1.5, 0.0));
        let off = complex(&mut rng, (-3.0, 1.0), (-1.5, 0.0));
        let b: Mat2 = [[diag, off], [off, diag]];
        let eps = log_uniform(&mut rng, 1e-3, 5e-2);
        let tau = log_uniform(&mut rng, 1e-7, 1e-3);
        let raw: Mat2 = [
            [complex(&mut rng, (-1.0, 1.0), (-1.0, 1.0)), complex(&mut rng, (-1.0, 1.0), (-1.0, 1.0))],
            [complex(&mut rng, (-1.0, 1.0), (-1.0, 1.0)), complex(&mut rng, (-1.0, 1.0), (-1.0, 1.0))],
        ];
        let frob = raw.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let delta_q = raw.map(|row| row.map(|z| z * (tau / frob)));
        for r in perturbation_ratios(&q_hat, &delta_q, &b, eps) {
            worst = worst.max(r);
        }
    }
    worst
}
