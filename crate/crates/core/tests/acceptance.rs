//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::oracles;
use slitgrate::domain::{cutoffs_in, Region};
use slitgrate::operators::{build_reduced, Discretisation, Parity};
use slitgrate::resonance::{asymptotic_resonances, refine_root, scaling_study, ScalingReport};
use slitgrate::scattering::{analyze_spectrum, solve, w_diagnostic, FeatureKind, SpectrumAnalysis, SweepSpec};
use slitgrate::{Complex64, GratingConfig, Incidence};

const FANO_GRID: usize = 201;
const CUTOFF_GUARD: f64 = 1e-6;
const SCALING_APERTURES: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

struct Sweep {
    disc: Discretisation,
    incidence: Incidence,
    spec: SweepSpec,
    analysis: SpectrumAnalysis,
    elapsed: Duration,
}

fn run_sweep(d: f64, eps: f64, ell: f64, incidence: Incidence, k_min: f64, k_max: f64, n: usize) -> Sweep {
    let disc = Discretisation::with_defaults(&GratingConfig::new(d, eps, ell).unwrap()).unwrap();
    let spec = SweepSpec::new(k_min, k_max, n).unwrap();
    let start = Instant::now();
    let analysis = analyze_spectrum(&disc, &incidence, &spec, CUTOFF_GUARD, FANO_GRID).unwrap();
    Sweep { disc, incidence, spec, analysis, elapsed: start.elapsed() }
}

fn fig3() -> &'static Sweep {
    static S: OnceLock<Sweep> = OnceLock::new();
    S.get_or_init(|| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        pool.install(|| run_sweep(1.3, 0.02, 2.0, Incidence::Angle(FRAC_PI_6), 2.0, 7.0, 500))
    })
}

fn fig4() -> &'static Sweep {
    static S: OnceLock<Sweep> = OnceLock::new();
    S.get_or_init(|| run_sweep(1.5, 0.005, 2.0, Incidence::Angle(3.0 * PI / 8.0), 2.0, 7.0, 500))
}

fn fig5() -> &'static Sweep {
    static S: OnceLock<Sweep> = OnceLock::new();
    S.get_or_init(|| run_sweep(1.5, 0.005, 2.0, Incidence::Angle(FRAC_PI_6), 2.0, 10.0, 800))
}

fn fig2() -> &'static Sweep {
    static S: OnceLock<Sweep> = OnceLock::new();
    S.get_or_init(|| run_sweep(1.0, 0.05, 9.0, Incidence::Bloch(0.1), 2.0, 4.0, 500))
}

fn scaling_base() -> &'static Discretisation {
    static D: OnceLock<Discretisation> = OnceLock::new();
    D.get_or_init(|| Discretisation::with_defaults(&GratingConfig::new(1.5, 0.02, 2.0).unwrap()).unwrap())
}

/// `d = 1.5`, `θ = π/6`, `m = 1`: the seed Bloch number `π sin θ` lies in D2.
fn d2_scaling() -> &'static ScalingReport {
    static R: OnceLock<ScalingReport> = OnceLock::new();
    R.get_or_init(|| scaling_study(scaling_base(), PI * FRAC_PI_6.sin(), 1, &SCALING_APERTURES).unwrap())
}

fn verdict(n: u32, pass: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

/// Closest feature of `kind` to `target`, if within `tol`.
fn feature_near(sweep: &Sweep, kind: FeatureKind, target: f64, tol: f64) -> Option<(f64, Region)> {
    sweep
        .analysis
        .features
        .iter()
        .filter(|f| f.kind == kind)
        .map(|f| (f.center, f.region))
        .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
        .filter(|(c, _)| (c - target).abs() <= tol)
}

fn describe(kind: FeatureKind, target: f64, hit: Option<(f64, Region)>) -> String {
    match hit {
        Some((c, region)) => format!("{}@{target:.4}→{c:.4}({region})", kind.as_str()),
        None => format!("{}@{target:.4}→missing", kind.as_str()),
    }
}

fn check_fano(n: u32, sweep: &Sweep, targets: &[f64], tol: f64, region: Option<Region>) -> bool {
    let hits: Vec<_> = targets.iter().map(|&t| (t, feature_near(sweep, FeatureKind::Fano, t, tol))).collect();
    let pass = hits.iter().all(|(_, h)| matches!(h, Some((_, r)) if region.is_none_or(|want| *r == want)));
    let detail: Vec<String> = hits.iter().map(|&(t, h)| describe(FeatureKind::Fano, t, h)).collect();
    verdict(n, pass, &detail.join(" "));
    pass
}

#[test]
fn criterion_01_two_slit_spectrum_at_d_1_3() {
    let sweep = fig3();
    let mut notes = Vec::new();
    let mut pass = true;
    for (kind, targets, tol) in [
        (FeatureKind::Fano, vec![3.06, 6.12], 0.05),
        (FeatureKind::FabryPerot, vec![2.8, 5.9], 0.1),
    ] {
        for t in targets {
            let hit = feature_near(sweep, kind, t, tol);
            pass &= hit.is_some();
            notes.push(describe(kind, t, hit));
        }
    }
    let cutoffs = cutoffs_in(&sweep.incidence, sweep.disc.cfg.reciprocal(), sweep.spec.k_min, sweep.spec.k_max);
    pass &= cutoffs.len() == 2;
    for c in cutoffs {
        let hit = feature_near(sweep, FeatureKind::Rayleigh, c, 0.05);
        pass &= hit.is_some();
        notes.push(describe(FeatureKind::Rayleigh, c, hit));
    }
    let fast = sweep.elapsed < Duration::from_secs(60);
    pass &= fast;
    notes.push(format!("single-thread {:.1}s", sweep.elapsed.as_secs_f64()));
    verdict(1, pass, &notes.join(" "));
    assert!(pass);
}

#[test]
fn criterion_02_fano_pair_in_second_continuum() {
    assert!(check_fano(2, fig4(), &[3.12, 6.24], 0.03, Some(Region::D2)));
}

#[test]
fn criterion_03_three_fano_features() {
    assert!(check_fano(3, fig5(), &[3.12, 6.24, 9.36], 0.03, None));
}

#[test]
fn criterion_04_weakly_coupled_fano() {
    assert!(check_fano(4, fig2(), &[2.83], 0.05, None));
}

#[test]
fn criterion_05_imaginary_part_scaling() {
    let d2 = d2_scaling();
    let first = d2.fits[0].slope;
    let second = d2.fits[1].slope;
    let first_ok = (0.85..=1.15).contains(&first);
    let second_ok = d2.region == Region::D2 && (1.8..=2.2).contains(&second);
    let d1: Vec<ScalingReport> =
        [0.05, 0.1].iter().map(|&kappa| scaling_study(scaling_base(), kappa, 1, &SCALING_APERTURES).unwrap()).collect();
    let ratios: Vec<f64> = (0..SCALING_APERTURES.len()).map(|i| d1[1].roots[i][1].im.abs() / d1[0].roots[i][1].im.abs()).collect();
    let ratio_ok = d1.iter().all(|r| r.region == Region::D1) && ratios.iter().all(|r| (1.7..=2.3).contains(r));
    let pass = first_ok && second_ok && ratio_ok;
    verdict(
        5,
        pass,
        &format!(
            "slope Im k1 {first:.3} [{}] ({}); slope Im k2 {second:.3} [{}]; D1 Im k2 ratio κ=0.1/0.05 {:?} [{}]",
            if first_ok { "ok" } else { "out" },
            d2.region,
            if second_ok { "ok" } else { "out" },
            ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>(),
            if ratio_ok { "ok" } else { "out" },
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_bound_state_at_normal_incidence() {
    let disc = scaling_base();
    let seeds = asymptotic_resonances(disc, 0.0, 1).unwrap();
    let root = refine_root(disc, &seeds[1]).unwrap();
    let pass = root.region == Region::D1 && root.k.im.abs() < 1e-9 && root.bound;
    verdict(6, pass, &format!("k2 = {} ({}), |Im k2| = {:.2e}", root.k, root.region, root.k.im.abs()));
    assert!(pass);
}

#[test]
fn criterion_07_asymptotic_agreement_rate() {
    let r = d2_scaling();
    let slope = r.seed_error_fit.slope;
    let pass = slope >= 1.7;
    let errors: Vec<String> = r.seed_error.iter().map(|e| format!("{e:.3e}")).collect();
    verdict(7, pass, &format!("|k1 − k̂1| = {errors:?}, fitted exponent {slope:.3}"));
    assert!(pass);
}

#[test]
fn criterion_08_energy_conservation() {
    let mut worst: f64 = 0.0;
    let mut resolved = 0;
    for sweep in [fig3(), fig4(), fig5(), fig2()] {
        for rec in sweep.analysis.records.iter().filter(|r| !r.near_cutoff) {
            worst = worst.max(rec.energy_defect);
            resolved += 1;
        }
    }
    let pass = worst < 1e-8;
    verdict(8, pass, &format!("worst defect {worst:.2e} over {resolved} points"));
    assert!(pass);
}

#[test]
fn criterion_09_oracle_equivalences() {
    let a = oracles::exterior_kernel_error();
    let b = oracles::interior_modes_error();
    let c = oracles::solver_disagreement();
    let d = oracles::log_galerkin_error();
    let pass = a < 1e-10 && b < 1e-8 && c < 1e-8 && d < 1e-10;
    verdict(9, pass, &format!("(a) {a:.2e} (b) {b:.2e} (c) {c:.2e} (d) {d:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_10_eigenvalue_perturbation_bound() {
    let c = common::fitted_perturbation_constant(2024, common::PERTURBATION_DRAWS);
    let pass = c < common::PERTURBATION_CONSTANT_LIMIT;
    verdict(10, pass, &format!("fitted C = {c:.3} over {} draws", common::PERTURBATION_DRAWS));
    assert!(pass);
}

/// `|w₁ + w₂| / δ` at the refined `j = 2` root for a shrinking aperture.
fn w_ratios(kappa: f64, delta_of: impl Fn(f64) -> f64) -> Vec<f64> {
    SCALING_APERTURES
        .iter()
        .map(|&eps| {
            let disc = scaling_base().with_aperture(eps).unwrap();
            let seeds = asymptotic_resonances(&disc, kappa, 1).unwrap();
            let root = refine_root(&disc, &seeds[1]).unwrap();
            let ops = disc.operators(kappa, Complex64::new(root.k.re, 0.0)).unwrap();
            let sol = solve(&ops, &disc.basis, disc.beta0()).unwrap();
            let reduced = build_reduced(&ops, &disc.basis, disc.beta0(), Parity::Even).unwrap();
            let (w1, w2) = w_diagnostic(sol.moments[0], &reduced).unwrap();
            (w1 + w2).norm() / delta_of(eps)
        })
        .collect()
}

#[test]
fn criterion_11_dipole_cancellation() {
    let d2 = w_ratios(FRAC_PI_2, |eps| eps);
    let d1 = w_ratios(0.3, |eps| 0.3 * eps);
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let pass = decreasing(&d2) && decreasing(&d1);
    let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.2e}")).collect::<Vec<_>>().join(", ");
    verdict(11, pass, &format!("D2 δ=ε: [{}]; D1 δ=κε: [{}]", fmt(&d2), fmt(&d1)));
    assert!(pass);
}
