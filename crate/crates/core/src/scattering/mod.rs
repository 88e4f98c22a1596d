//! Forced scattering solves, diffraction amplitudes and spectral features.

pub mod features;
pub mod sweep;

use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{build_table_complex, DiffractionTable, Incidence, Region};
use crate::error::{Error, Result};
use crate::linalg::{mat2_det, mat2_mul, mat2_solve, CMat, GuardedLu, Mat2};
use crate::operators::{build_reduced, ApertureBasis, Discretisation, OperatorSet, Parity, ReducedSystem, BLOCK_COND_GUARD};

pub use features::{analyze_spectrum, classify_window, fano_scan, FeatureKind, FeatureReport, SpectrumAnalysis};
pub use sweep::{spectrum_sweep, SweepSpec};

/// `|det 𝕄_σ|` below which the reduced solve is declared singular.
pub const DET_GUARD: f64 = 1e-14;
/// The direct solver takes over when `|det 𝕄_σ|` is below this multiple of the guard.
pub const DIRECT_FALLBACK_FACTOR: f64 = 1e3;

/// Which linear solver produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    ReducedExact,
    Direct,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverKind::ReducedExact => "reduced-exact",
            SolverKind::Direct => "direct",
        }
    }
}

/// Galerkin projections of the aperture forcing `f^± = −e^{iκε(X ± ℓ/2)}`.
#[derive(Debug, Clone)]
pub struct ForcingData {
    pub minus: Vec<Complex64>,
    pub plus: Vec<Complex64>,
}

impl ForcingData {
    pub fn new(basis: &ApertureBasis, kappa: f64, eps: f64) -> Self {
        let a = kappa * eps;
        let f = basis.exp_moments(a);
        let half = 0.5 * a * basis.separation;
        let ph_minus = -Complex64::from_polar(1.0, -half);
        let ph_plus = -Complex64::from_polar(1.0, half);
        Self {
            minus: f.iter().map(|v| v * ph_minus).collect(),
            plus: f.iter().map(|v| v * ph_plus).collect(),
        }
    }

    /// Stacked `[f^−, f^+]` scaled by `scale`.
    fn stacked(&self, scale: f64) -> CMat {
        let n = self.minus.len();
        CMat::from_fn(2 * n, 1, |i, _| if i < n { self.minus[i] * scale } else { self.plus[i - n] * scale })
    }
}

/// Aperture densities of one forced solve, as basis coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct ScatteringSolution {
    pub kappa: f64,
    pub k: f64,
    pub eps: f64,
    pub separation: f64,
    /// Lower-aperture densities `φ₁^−`, `φ₁^+`.
    pub lower_minus: Vec<Complex64>,
    pub lower_plus: Vec<Complex64>,
    /// Upper-aperture densities `φ₂^−`, `φ₂^+`.
    pub upper_minus: Vec<Complex64>,
    pub upper_plus: Vec<Complex64>,
    /// Moments `⟨φ_σ, e_1⟩`, `⟨φ_σ, e_2⟩` for even then odd parity.
    pub moments: [[Complex64; 2]; 2],
    /// Smallest `|det 𝕄_σ|` over both parities (reduced solver only).
    pub min_det: Option<f64>,
    pub solver: SolverKind,
}

impl ScatteringSolution {
    /// Flux moments `⟨φ, 1⟩` of `φ₁^−`, `φ₁^+`.
    pub fn lower_flux(&self) -> [Complex64; 2] {
        [self.lower_minus[0] * std::f64::consts::PI, self.lower_plus[0] * std::f64::consts::PI]
    }

    /// Flux moments `⟨φ, 1⟩` of `φ₂^−`, `φ₂^+`.
    pub fn upper_flux(&self) -> [Complex64; 2] {
        [self.upper_minus[0] * std::f64::consts::PI, self.upper_plus[0] * std::f64::consts::PI]
    }
}

/// One parity solve of the reduced moment system.
struct ParitySolve {
    density: CMat,
    moments: [Complex64; 2],
    det: f64,
}

fn solve_parity(rs: &ReducedSystem, forcing: &ForcingData, k: f64) -> Result<ParitySolve> {
    let n = rs.n;
    let (x, g) = rs.apply_inverse(&forcing.stacked(1.0))?;
    let det = mat2_det(&rs.m).norm();
    if det < DET_GUARD {
        return Err(Error::ResonantSingularity { det, k });
    }
    let m = mat2_solve(&rs.m, g).ok_or(Error::ResonantSingularity { det, k })?;
    let bm = mat2_mul(&rs.b, &[[m[0], Complex64::new(0.0, 0.0)], [m[1], Complex64::new(0.0, 0.0)]]);
    let mut density = x / Complex64::new(rs.eps, 0.0);
    for (col, row) in bm.iter().enumerate() {
        let coeff = row[0];
        for i in 0..2 * n {
            density[(i, 0)] -= coeff * rs.l_inv_e[(i, col)];
        }
    }
    Ok(ParitySolve { density, moments: m, det })
}

fn recompose(
    ops: &OperatorSet,
    basis: &ApertureBasis,
    even: &CMat,
    odd: &CMat,
    moments: [[Complex64; 2]; 2],
    min_det: Option<f64>,
    solver: SolverKind,
) -> ScatteringSolution {
    let n = basis.n;
    let col = |m: &CMat, off: usize| (0..n).map(|i| m[(off + i, 0)]).collect::<Vec<_>>();
    let add = |a: Vec<Complex64>, b: Vec<Complex64>, s: f64| a.iter().zip(&b).map(|(x, y)| x + y * s).collect::<Vec<_>>();
    ScatteringSolution {
        kappa: ops.kappa,
        k: ops.k.re,
        eps: ops.eps,
        separation: basis.separation,
        lower_minus: add(col(even, 0), col(odd, 0), 1.0),
        lower_plus: add(col(even, n), col(odd, n), 1.0),
        upper_minus: add(col(even, 0), col(odd, 0), -1.0),
        upper_plus: add(col(even, n), col(odd, n), -1.0),
        moments,
        min_det,
        solver,
    }
}

/// Exact solve through the parity-reduced 2×2 moment systems.
pub fn solve_reduced_exact(ops: &OperatorSet, basis: &ApertureBasis, beta0: f64) -> Result<ScatteringSolution> {
    let forcing = ForcingData::new(basis, ops.kappa, ops.eps);
    let even = solve_parity(&build_reduced(ops, basis, beta0, Parity::Even)?, &forcing, ops.k.re)?;
    let odd = solve_parity(&build_reduced(ops, basis, beta0, Parity::Odd)?, &forcing, ops.k.re)?;
    Ok(recompose(
        ops,
        basis,
        &even.density,
        &odd.density,
        [even.moments, odd.moments],
        Some(even.det.min(odd.det)),
        SolverKind::ReducedExact,
    ))
}

/// Dense solve of the full coupled aperture system.
pub fn solve_direct(ops: &OperatorSet, basis: &ApertureBasis) -> Result<ScatteringSolution> {
    let n = basis.n;
    let forcing = ForcingData::new(basis, ops.kappa, ops.eps);
    let t = ops.full_operator(basis);
    let lu = GuardedLu::new(&t, BLOCK_COND_GUARD)?;
    let mut rhs = CMat::zeros(4 * n, 1);
    let top = forcing.stacked(2.0 / ops.eps);
    rhs.view_mut((0, 0), (2 * n, 1)).copy_from(&top);
    let phi = lu.solve(&rhs)?;
    // φ_even = (φ₁ + φ₂)/2, φ_odd = (φ₁ − φ₂)/2
    let lower = phi.rows(0, 2 * n).into_owned();
    let upper = phi.rows(2 * n, 2 * n).into_owned();
    let even = (&lower + &upper) * Complex64::new(0.5, 0.0);
    let odd = (&lower - &upper) * Complex64::new(0.5, 0.0);
    let pi = std::f64::consts::PI;
    let moments = [
        [even[(0, 0)] * pi, even[(n, 0)] * pi],
        [odd[(0, 0)] * pi, odd[(n, 0)] * pi],
    ];
    Ok(recompose(ops, basis, &even, &odd, moments, None, SolverKind::Direct))
}

/// Reduced-exact solve, falling back to the direct solver near a singular `𝕄_σ`.
pub fn solve(ops: &OperatorSet, basis: &ApertureBasis, beta0: f64) -> Result<ScatteringSolution> {
    match solve_reduced_exact(ops, basis, beta0) {
        Ok(sol) if sol.min_det.is_some_and(|d| d >= DIRECT_FALLBACK_FACTOR * DET_GUARD) => Ok(sol),
        Ok(_) | Err(Error::ResonantSingularity { .. }) => solve_direct(ops, basis),
        Err(e) => Err(e),
    }
}

/// Diffraction amplitudes and energy balance at one real `k`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumRecord {
    pub k: f64,
    pub kappa: f64,
    pub region: Region,
    /// Propagating orders, ascending.
    pub orders: Vec<i64>,
    pub r: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub abs_r2: f64,
    pub abs_t2: f64,
    pub abs_t: f64,
    pub energy_defect: f64,
    /// Set inside the guard band of a Rayleigh cutoff.
    pub near_cutoff: bool,
    pub solver: SolverKind,
    pub beta0: f64,
}

impl SpectrumRecord {
    /// Amplitude pair for order `n`, if propagating.
    pub fn order(&self, n: i64) -> Option<(Complex64, Complex64)> {
        self.orders.iter().position(|&o| o == n).map(|i| (self.r[i], self.t[i]))
    }

    /// Placeholder for a point that sits exactly on a cutoff.
    pub fn unresolved(k: f64, kappa: f64, region: Region, beta0: f64) -> Self {
        Self {
            k,
            kappa,
            region,
            orders: Vec::new(),
            r: Vec::new(),
            t: Vec::new(),
            abs_r2: f64::NAN,
            abs_t2: f64::NAN,
            abs_t: f64::NAN,
            energy_defect: f64::NAN,
            near_cutoff: true,
            solver: SolverKind::ReducedExact,
            beta0,
        }
    }
}

/// Reflection and transmission coefficients of every propagating order.
///
/// With `exact` the aperture moments are integrated against the full
/// densities; otherwise only the flux moments `⟨φ, 1⟩` are kept.
pub fn diffraction_amplitudes(
    sol: &ScatteringSolution,
    table: &DiffractionTable,
    basis: &ApertureBasis,
    period: f64,
    exact: bool,
    beta0: f64,
) -> Result<SpectrumRecord> {
    if table.propagating.is_empty() {
        return Err(Error::InvalidConfig(format!("no propagating order at k = {}", sol.k)));
    }
    let eps = sol.eps;
    let zeta0 = table.zeta_of(0).ok_or_else(|| Error::InvalidConfig("order 0 missing".into()))?.re;
    let mut orders = table.propagating.clone();
    orders.sort_unstable();
    let dot = |c: &[Complex64], f: &[Complex64]| -> Complex64 { c.iter().zip(f).map(|(a, b)| a * b.conj()).sum() };
    let (mut r, mut t) = (Vec::with_capacity(orders.len()), Vec::with_capacity(orders.len()));
    let (mut abs_r2, mut abs_t2) = (0.0, 0.0);
    for &n in &orders {
        let kn = sol.kappa + n as f64 * table.b;
        let zeta = table.zeta_of(n).ok_or_else(|| Error::InvalidConfig(format!("order {n} missing")))?;
        let a = kn * eps;
        let half = Complex64::from_polar(1.0, 0.5 * a * sol.separation);
        let (lower, upper) = if exact {
            let f = basis.exp_moments(a);
            (
                dot(&sol.lower_minus, &f) * half + dot(&sol.lower_plus, &f) / half,
                dot(&sol.upper_minus, &f) * half + dot(&sol.upper_plus, &f) / half,
            )
        } else {
            let lf = sol.lower_flux();
            let uf = sol.upper_flux();
            (lf[0] * half + lf[1] / half, uf[0] * half + uf[1] / half)
        };
        let scale = Complex64::new(0.0, eps) / (zeta * period);
        let delta = if n == 0 { 1.0 } else { 0.0 };
        let rn = delta - scale * lower;
        let tn = -scale * upper;
        let w = zeta.re / zeta0;
        abs_r2 += w * rn.norm_sqr();
        abs_t2 += w * tn.norm_sqr();
        r.push(rn);
        t.push(tn);
    }
    Ok(SpectrumRecord {
        k: sol.k,
        kappa: sol.kappa,
        region: table.region,
        orders,
        r,
        t,
        abs_r2,
        abs_t2,
        abs_t: abs_t2.sqrt(),
        energy_defect: (abs_r2 + abs_t2 - 1.0).abs(),
        near_cutoff: table.near_cutoff,
        solver: sol.solver,
        beta0,
    })
}

/// Solve and post-process one point of a spectrum.
pub fn spectrum_point(disc: &Discretisation, incidence: &Incidence, k: f64, cutoff_guard: f64) -> Result<SpectrumRecord> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!("wavenumber must be positive, got {k}")));
    }
    let kappa = incidence.kappa_at(k);
    let kc = Complex64::new(k, 0.0);
    let b = disc.cfg.reciprocal();
    let table = match build_table_complex(&disc.cfg, kappa, kc, cutoff_guard) {
        Ok(t) => t,
        Err(Error::RayleighCutoff { .. }) => {
            return Ok(SpectrumRecord::unresolved(k, kappa, crate::domain::classify(kappa, k, b), disc.beta0()))
        }
        Err(e) => return Err(e),
    };
    let ops = match disc.operators(kappa, kc) {
        Ok(o) => o,
        Err(Error::RayleighCutoff { .. }) if table.near_cutoff => {
            return Ok(SpectrumRecord::unresolved(k, kappa, table.region, disc.beta0()))
        }
        Err(e) => return Err(e),
    };
    let sol = solve(&ops, &disc.basis, disc.beta0())?;
    diffraction_amplitudes(&sol, &table, &disc.basis, disc.cfg.period, true, disc.beta0())
}

/// Eigen-decomposition of the moment vector: `(w₁, w₂)` is `λ₂` times the
/// component of the moments along the second branch.
pub fn w_diagnostic(moments: [Complex64; 2], reduced: &ReducedSystem) -> Result<(Complex64, Complex64)> {
    let [b1, b2] = reduced.branches;
    let basis: Mat2 = [[b1.vector[0], b2.vector[0]], [b1.vector[1], b2.vector[1]]];
    let det = mat2_det(&basis).norm();
    if det < 1e-8 {
        return Err(Error::DiagnosticUnavailable(format!("eigenvectors nearly parallel (det {det:e})")));
    }
    let c = mat2_solve(&basis, moments).ok_or_else(|| Error::DiagnosticUnavailable("singular eigenbasis".into()))?;
    let scale = b2.lambda * c[1];
    Ok((scale * b2.vector[0], scale * b2.vector[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::GratingConfig;

    fn disc() -> Discretisation {
        Discretisation::with_defaults(&GratingConfig::new(1.3, 0.02, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn forcing_is_unimodular_and_trivial_at_normal_incidence() {
        let d = disc();
        let f = ForcingData::new(&d.basis, 0.0, 0.02);
        assert!((f.minus[0] + std::f64::consts::PI).norm() < 1e-13);
        assert!(f.minus.iter().skip(1).all(|v| v.norm() < 1e-13));
        assert_eq!(f.minus, f.plus);
    }

    #[test]
    fn reduced_and_direct_agree() {
        let d = disc();
        let kappa = 0.6;
        let ops = d.operators(kappa, Complex64::new(2.7, 0.0)).unwrap();
        let a = solve_reduced_exact(&ops, &d.basis, d.beta0()).unwrap();
        let b = solve_direct(&ops, &d.basis).unwrap();
        let scale = a.lower_minus.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.lower_minus.iter().zip(&b.lower_minus).chain(a.upper_plus.iter().zip(&b.upper_plus)) {
            assert!((x - y).norm() < 1e-8 * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn energy_is_conserved() {
        let d = disc();
        let inc = Incidence::Angle(std::f64::consts::FRAC_PI_6);
        for &k in &[2.3, 2.8, 3.06, 4.5, 6.12] {
            let rec = spectrum_point(&d, &inc, k, 1e-6).unwrap();
            assert!(rec.energy_defect < 1e-8, "k={k}: defect {}", rec.energy_defect);
        }
    }
}
