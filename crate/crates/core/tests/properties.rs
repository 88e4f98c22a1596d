//! Randomised invariants of the branch conventions, the 2×2 eigen-solver,
//! the eigenvalue perturbation bound and the scattering solution.

mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use slitgrate::domain::{branch_sqrt, reduce_kappa};
use slitgrate::linalg::{eig2, Mat2};
use slitgrate::operators::Discretisation;
use slitgrate::scattering::spectrum_point;
use slitgrate::{Complex64, GratingConfig, Incidence};

fn grating() -> &'static Discretisation {
    static DISC: OnceLock<Discretisation> = OnceLock::new();
    DISC.get_or_init(|| Discretisation::with_defaults(&GratingConfig::new(1.5, 0.02, 2.0).unwrap()).unwrap())
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn branch_sqrt_squares_back_and_avoids_cut(z in complex()) {
        prop_assume!(!(z.re == 0.0 && z.im <= 0.0));
        let w = branch_sqrt(z).unwrap();
        prop_assert!((w * w - z).norm() <= 1e-12 * z.norm().max(1.0));
        // the image of the cut plane is the sector arg ∈ (−π/4, 3π/4)
        let arg = w.im.atan2(w.re);
        prop_assert!(arg > -std::f64::consts::FRAC_PI_4 - 1e-12);
        prop_assert!(arg < 3.0 * std::f64::consts::FRAC_PI_4 + 1e-12);
    }

    #[test]
    fn branch_sqrt_positive_on_positive_axis(x in 1e-6..1e6f64) {
        let w = branch_sqrt(Complex64::new(x, 0.0)).unwrap();
        prop_assert!((w.re - x.sqrt()).abs() <= 1e-14 * x.sqrt());
        prop_assert_eq!(w.im, 0.0);
    }

    #[test]
    fn reduced_kappa_lies_in_first_zone(kappa in -50.0..50.0f64, b in 0.5..10.0f64) {
        let r = reduce_kappa(kappa, b);
        prop_assert!(r > -b / 2.0 && r <= b / 2.0);
        let shift = (kappa - r) / b;
        prop_assert!((shift - shift.round()).abs() < 1e-9);
    }

    #[test]
    fn eig2_returns_eigenpairs(a in complex(), b in complex(), c in complex(), d in complex()) {
        let m: Mat2 = [[a, b], [c, d]];
        let pairs = eig2(&m);
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (lam, v) in pairs {
            let r0 = m[0][0] * v[0] + m[0][1] * v[1] - lam * v[0];
            let r1 = m[1][0] * v[0] + m[1][1] * v[1] - lam * v[1];
            prop_assert!((r0.norm() + r1.norm()) < 1e-10 * scale);
        }
        prop_assert!((pairs[0].0 + pairs[1].0 - a - d).norm() < 1e-12 * scale);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn transmission_is_reciprocal_in_bloch_number(kappa in 0.01..1.5f64, k in 0.3..4.0f64) {
        let disc = grating();
        let plus = spectrum_point(disc, &Incidence::Bloch(kappa), k, 1e-6);
        let minus = spectrum_point(disc, &Incidence::Bloch(-kappa), k, 1e-6);
        if let (Ok(p), Ok(m)) = (plus, minus) {
            prop_assert!((p.abs_t - m.abs_t).abs() < 1e-9);
            prop_assert!(p.energy_defect < 1e-8);
        }
    }
}

#[test]
fn eigenvalue_perturbation_constant_is_bounded() {
    let c = common::fitted_perturbation_constant(2024, common::PERTURBATION_DRAWS);
    println!("fitted perturbation constant C = {c:.4}");
    assert!(c < common::PERTURBATION_CONSTANT_LIMIT, "C = {c}");
}
