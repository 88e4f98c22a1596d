//! Independent reference computations for the kernels, the Galerkin matrices
//! and the two linear solvers.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slitgrate::domain::{build_table, zeta_n};
use slitgrate::greens::{ExteriorKernel, InteriorKernel, SERIES_TOL};
use slitgrate::operators::{ApertureBasis, Discretisation};
use slitgrate::scattering::{diffraction_amplitudes, solve_direct, solve_reduced_exact};
use slitgrate::{Complex64, GratingConfig};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `Σ_{n≥M} z^n f(n)` by the Euler transform `z^M/(1−z) Σ_j (z/(1−z))^j Δ^j f(M)`.
fn euler_tail(z: Complex64, m: i64, f: impl Fn(i64) -> Complex64, terms: usize) -> Complex64 {
    let vals: Vec<Complex64> = (0..=terms as i64).map(|j| f(m + j)).collect();
    let ratio = z / (1.0 - z);
    let mut diffs = vals;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for _ in 0..=terms {
        acc += pow * diffs[0];
        pow *= ratio;
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.is_empty() {
            break;
        }
    }
    z.powi(m as i32) / (1.0 - z) * acc
}

/// `G^e(Z)` from `|n| ≤ N` plus Euler-transformed tails of the exact summand.
fn exterior_reference(cfg: &GratingConfig, kappa: f64, k: f64, z: f64, n_terms: i64) -> Complex64 {
    let b = cfg.reciprocal();
    let eps = cfg.aperture;
    let kc = Complex64::new(k, 0.0);
    let coeff = |n: i64| 1.0 / zeta_n(kappa, kc, n, b).unwrap();
    let mut head = Complex64::new(0.0, 0.0);
    for n in -n_terms..=n_terms {
        head += Complex64::from_polar(1.0, (kappa + n as f64 * b) * eps * z) * coeff(n);
    }
    let u = b * eps * z;
    let up = euler_tail(Complex64::from_polar(1.0, u), n_terms + 1, coeff, 4);
    let down = euler_tail(Complex64::from_polar(1.0, -u), n_terms + 1, |n| coeff(-n), 4);
    let total = head + Complex64::from_polar(1.0, kappa * eps * z) * (up + down);
    -I * total / cfg.period
}

/// Worst relative error of the accelerated exterior kernel against a
/// 10⁶-term lattice sum over 20 random draws.
pub fn exterior_kernel_error() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    let mut draws = 0;
    while draws < 20 {
        let d = rng.gen_range(1.0..2.0);
        let eps = rng.gen_range(0.005..0.05);
        let cfg = GratingConfig::new(d, eps, 2.0).unwrap();
        let b = cfg.reciprocal();
        let kappa = rng.gen_range(-0.49 * b..0.49 * b);
        let k = rng.gen_range(kappa.abs() + 0.1..9.0);
        let near_cut = (-6..=6).any(|n| (k - (kappa + n as f64 * b).abs()).abs() < 1e-3);
        if near_cut {
            continue;
        }
        let z = rng.gen_range(0.05..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let fast = ExteriorKernel::new(&cfg, kappa, Complex64::new(k, 0.0), 3.0, SERIES_TOL).unwrap().kernel(z);
        let reference = exterior_reference(&cfg, kappa, k, z, 1_000_000);
        let rel = (fast - reference).norm() / reference.norm();
        worst = worst.max(rel);
        draws += 1;
    }
    worst
}

/// `Σ_{n=0}^{N} a_n s^n / (k² − q² − n²π²)` with `a_0 = 1`, `a_n = 2`, `s = ±1`.
fn mode_series(k: Complex64, q: f64, sign: f64, n_terms: usize) -> Complex64 {
    let g2 = q * q - k * k;
    let term = |n: usize| {
        let a = if n == 0 { 1.0 } else { 2.0 };
        let s = if sign < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
        -a * s / (g2 + (n as f64 * PI).powi(2))
    };
    let partial: Complex64 = (0..=n_terms).map(term).sum();
    if sign > 0.0 {
        // Σ_{n>N} 2/(n²π² + γ²) ≈ 2/(π²X) − 2γ²/(3π⁴X³) + 2γ⁴/(5π⁶X⁵), X = N + ½
        let x = n_terms as f64 + 0.5;
        partial - (2.0 / (PI * PI * x) - 2.0 * g2 / (3.0 * PI.powi(4) * x.powi(3)) + 2.0 * g2 * g2 / (5.0 * PI.powi(6) * x.powi(5)))
    } else {
        // averaging consecutive partial sums of the alternating tail
        partial + 0.5 * term(n_terms + 1)
    }
}

/// Worst relative error of the closed-form interior mode sums against the
/// truncated double series.
pub fn interior_modes_error() -> f64 {
    let n_terms = 100_000;
    let mut worst: f64 = 0.0;
    let mut track = |got: Complex64, want: Complex64, scale: f64| worst = worst.max((got - want).norm() / scale);
    for &(k, eps) in &[(2.5, 0.05), (3.06, 0.02), (6.2, 0.005)] {
        let kc = Complex64::new(k, 0.0);
        let ker = InteriorKernel::new(kc, eps).unwrap();
        // m = 0: cot(k)/k and 1/(k sin k)
        let p0 = mode_series(kc, 0.0, 1.0, n_terms);
        track(p0, kc.cos() / (kc * kc.sin()), p0.norm());
        let pt0 = mode_series(kc, 0.0, -1.0, n_terms);
        track(pt0, 1.0 / (kc * kc.sin()), pt0.norm());
        for m in 1..=ker.same_modes.len() {
            let q = m as f64 * PI / eps;
            let same = mode_series(kc, q, 1.0, n_terms);
            let closed = ker.same_modes[m - 1] - eps / (m as f64 * PI);
            track(same, closed, closed.norm());
            let cross = mode_series(kc, q, -1.0, n_terms);
            let closed_cross = ker.cross_modes[m - 1];
            track(cross, closed_cross, closed.norm());
        }
        // full cross kernel from the double series
        for &(x, y) in &[(0.1, -0.3), (-0.45, 0.2), (0.0, 0.0)] {
            let mut direct = mode_series(kc, 0.0, -1.0, n_terms);
            for m in 1..=8 {
                let cc = (m as f64 * PI * (x + 0.5)).cos() * (m as f64 * PI * (y + 0.5)).cos();
                direct += 2.0 * cc * mode_series(kc, m as f64 * PI / eps, -1.0, n_terms);
            }
            direct /= eps;
            let fast = ker.cross_kernel(x, y);
            track(fast, direct, fast.norm());
        }
    }
    worst
}

/// Worst amplitude disagreement between the reduced and direct solvers over
/// 20 random `(κ, k)`.
pub fn solver_disagreement() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = GratingConfig::new(1.3, 0.02, 2.0).unwrap();
    let disc = Discretisation::with_defaults(&cfg).unwrap();
    let b = cfg.reciprocal();
    let mut draws = 0;
    let mut worst: f64 = 0.0;
    while draws < 20 {
        let kappa = rng.gen_range(-0.49 * b..0.49 * b);
        let k = rng.gen_range(kappa.abs() + 0.05..7.0);
        let table = build_table(&cfg, kappa, k).unwrap();
        if table.cutoff_distance < 1e-3 || (k / PI - (k / PI).round()).abs() < 1e-3 {
            continue;
        }
        let ops = disc.operators(kappa, Complex64::new(k, 0.0)).unwrap();
        let a = solve_reduced_exact(&ops, &disc.basis, disc.beta0()).unwrap();
        let c = solve_direct(&ops, &disc.basis).unwrap();
        let ra = diffraction_amplitudes(&a, &table, &disc.basis, cfg.period, true, disc.beta0()).unwrap();
        let rc = diffraction_amplitudes(&c, &table, &disc.basis, cfg.period, true, disc.beta0()).unwrap();
        for (x, y) in ra.r.iter().zip(&rc.r).chain(ra.t.iter().zip(&rc.t)) {
            worst = worst.max((x - y).norm());
        }
        draws += 1;
    }
    worst
}

/// Tanh–sinh rule on `[a, b]`, refined until two levels agree.
fn tanh_sinh(a: f64, b: f64, f: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let sample = |t: f64| {
        let u = 0.5 * PI * t.sinh();
        let q = (-2.0 * u.abs()).exp();
        let gap = half * 2.0 * q / (1.0 + q);
        let x = if t >= 0.0 { b - gap } else { a + gap };
        if x <= a || x >= b {
            return 0.0;
        }
        let w = half * 0.5 * PI * t.cosh() * 4.0 * q / ((1.0 + q) * (1.0 + q));
        w * f(x)
    };
    let t_max = 4.0;
    let mut step = 0.5;
    let mut sum: f64 = sample(0.0);
    let mut t = step;
    while t <= t_max {
        sum += sample(t) + sample(-t);
        t += step;
    }
    let mut prev = sum * step;
    for _ in 0..9 {
        step *= 0.5;
        let mut t = step;
        while t <= t_max {
            sum += sample(t) + sample(-t);
            t += 2.0 * step;
        }
        let est = sum * step;
        if (est - prev).abs() < tol * est.abs().max(1.0) {
            return est;
        }
        prev = est;
    }
    prev
}

/// `∫∫ w_i(X) w_j(Y) K(θ, φ)` with `X = cos θ / 2`, `Y = cos φ / 2`, splitting
/// the inner integral at the diagonal.
fn galerkin_reference(i: usize, j: usize, kernel: &dyn Fn(f64, f64) -> f64, split: bool) -> f64 {
    let outer = |th: f64| {
        let inner = |ph: f64| (j as f64 * ph).cos() * kernel(th, ph);
        let v = if split {
            tanh_sinh(0.0, th, &inner, 1e-11) + tanh_sinh(th, PI, &inner, 1e-11)
        } else {
            tanh_sinh(0.0, PI, &inner, 1e-11)
        };
        (i as f64 * th).cos() * v
    };
    tanh_sinh(0.0, PI, &outer, 1e-11)
}

/// `X − Y` without cancellation near the diagonal.
fn angle_gap(th: f64, ph: f64) -> f64 {
    -(0.5 * (th + ph)).sin() * (0.5 * (th - ph)).sin()
}

/// `sin(π(X + Y + 1)/2)` without cancellation near the aperture corners.
fn corner_sine(th: f64, ph: f64) -> f64 {
    let low = (0.5 * th).cos().powi(2) + (0.5 * ph).cos().powi(2);
    let high = (0.5 * th).sin().powi(2) + (0.5 * ph).sin().powi(2);
    if low < high {
        (0.5 * PI * low).sin()
    } else {
        (0.5 * PI * high).sin()
    }
}

/// Worst absolute error of the log-kernel Galerkin entries against nested
/// tanh–sinh quadrature.
pub fn log_galerkin_error() -> f64 {
    let ell = 2.0;
    let basis = ApertureBasis::with_defaults(ell).unwrap();
    let same = |th: f64, ph: f64| {
        let t = angle_gap(th, ph);
        (t.abs().ln() + (0.5 * PI * t).sin().abs().ln() + corner_sine(th, ph).ln()) / PI
    };
    let shifted = |th: f64, ph: f64| (angle_gap(th, ph) - ell).abs().ln() / PI;
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i..4 {
            let want = galerkin_reference(i, j, &same, true);
            worst = worst.max((basis.s[(i, j)] - want).abs());
            let want = galerkin_reference(i, j, &shifted, false);
            worst = worst.max((basis.s_minus[(i, j)] - want).abs());
        }
    }
    worst
}
