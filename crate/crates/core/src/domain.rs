//! Geometry, incidence and Rayleigh–Bloch order bookkeeping.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative guard band around Rayleigh cutoffs.
pub const DEFAULT_CUTOFF_GUARD: f64 = 1e-6;

/// Geometry of one grating period (slab thickness is 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GratingConfig {
    /// Period length `d`.
    pub period: f64,
    /// Slit aperture width `ε`.
    pub aperture: f64,
    /// Separation parameter `ℓ`: slit centres sit at `∓ℓε/2`.
    pub separation: f64,
}

impl GratingConfig {
    pub fn new(period: f64, aperture: f64, separation: f64) -> Result<Self> {
        let cfg = Self { period, aperture, separation };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.period.is_finite() && self.period > 0.0) {
            return bad(format!("period must be positive, got {}", self.period));
        }
        if !(self.aperture.is_finite() && self.aperture > 0.0) {
            return bad(format!("aperture must be positive, got {}", self.aperture));
        }
        if !(self.separation.is_finite() && self.separation > 1.0) {
            return bad(format!("separation must exceed 1, got {}", self.separation));
        }
        if (self.separation + 1.0) * self.aperture >= self.period {
            return bad(format!(
                "slits do not fit in one period: (ell+1)*eps = {} >= d = {}",
                (self.separation + 1.0) * self.aperture,
                self.period
            ));
        }
        Ok(())
    }

    /// Reciprocal lattice constant `2π/d`.
    pub fn reciprocal(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Same geometry with a different aperture.
    pub fn with_aperture(&self, aperture: f64) -> Result<Self> {
        Self::new(self.period, aperture, self.separation)
    }
}

/// How the Bloch wavenumber is tied to the incident wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Incidence {
    /// Fixed incidence angle; `κ = k sin θ` at every wavenumber.
    Angle(f64),
    /// Fixed Bloch wavenumber.
    Bloch(f64),
}

impl Incidence {
    pub fn validate(&self, cfg: &GratingConfig) -> Result<()> {
        match *self {
            Incidence::Angle(theta) => {
                if !(theta.is_finite() && theta.abs() < FRAC_PI_2) {
                    return Err(Error::InvalidConfig(format!(
                        "incidence angle must lie in (-pi/2, pi/2), got {theta}"
                    )));
                }
            }
            Incidence::Bloch(kappa) => {
                let half = cfg.reciprocal() / 2.0;
                if !(kappa.is_finite() && kappa > -half && kappa <= half) {
                    return Err(Error::InvalidConfig(format!(
                        "Bloch wavenumber must lie in (-b/2, b/2] = ({}, {}], got {kappa}",
                        -half, half
                    )));
                }
            }
        }
        Ok(())
    }

    /// Bloch wavenumber at real wavenumber `k`.
    pub fn kappa_at(&self, k: f64) -> f64 {
        match *self {
            Incidence::Angle(theta) => k * theta.sin(),
            Incidence::Bloch(kappa) => kappa,
        }
    }
}

/// Position of `(κ, k)` relative to the radiation continuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// Exactly one propagating order.
    D1,
    /// More than one propagating order.
    D2,
    /// No propagating order.
    BelowContinuum,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::D1 => "D1",
            Region::D2 => "D2",
            Region::BelowContinuum => "below",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Square root analytic on `ℂ \ {-it : t ≥ 0}` with `√1 = 1`.
pub fn branch_sqrt(z: Complex64) -> Result<Complex64> {
    if z.re == 0.0 && z.im <= 0.0 {
        return Err(Error::BranchCut(z));
    }
    let mut arg = z.im.atan2(z.re);
    if arg < -FRAC_PI_2 {
        arg += 2.0 * PI;
    }
    Ok(Complex64::from_polar(z.norm().sqrt(), 0.5 * arg))
}

/// `ζ_n = √(k² − (κ + n b)²)` on the branch of [`branch_sqrt`].
pub fn zeta_n(kappa: f64, k: Complex64, n: i64, b: f64) -> Result<Complex64> {
    let kn = kappa + n as f64 * b;
    let arg = k * k - kn * kn;
    if arg.norm() == 0.0 {
        return Err(Error::RayleighCutoff { order: n, k });
    }
    branch_sqrt(arg).map_err(|_| Error::RayleighCutoff { order: n, k })
}

/// Shift `κ` into the first Brillouin zone `(-b/2, b/2]`.
pub fn reduce_kappa(kappa: f64, b: f64) -> f64 {
    let mut r = kappa - b * (kappa / b).round();
    if r <= -b / 2.0 {
        r += b;
    }
    if r > b / 2.0 {
        r -= b;
    }
    r
}

/// Continuum region of `(κ, k)` for real `k`, using the reduced Bloch number.
pub fn classify(kappa: f64, k: f64, b: f64) -> Region {
    let kr = reduce_kappa(kappa, b).abs();
    if k <= kr {
        Region::BelowContinuum
    } else if k < b - kr {
        Region::D1
    } else {
        Region::D2
    }
}

/// Rayleigh cutoff wavenumbers in `(k_lo, k_hi)`.
///
/// For angle incidence these solve `k = |k sin θ + n b|`; for fixed `κ` they
/// are `|κ + n b|`.
pub fn cutoffs_in(incidence: &Incidence, b: f64, k_lo: f64, k_hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let n_max = ((k_hi.abs() + b) / b).ceil() as i64 * 2 + 2;
    for n in -n_max..=n_max {
        let nb = n as f64 * b;
        let candidates: Vec<f64> = match *incidence {
            Incidence::Bloch(kappa) => vec![(kappa + nb).abs()],
            Incidence::Angle(theta) => {
                let s = theta.sin();
                // k = ±(k s + n b)
                let mut v = Vec::new();
                if (1.0 - s).abs() > 1e-14 {
                    v.push(nb / (1.0 - s));
                }
                if (1.0 + s).abs() > 1e-14 {
                    v.push(-nb / (1.0 + s));
                }
                v
            }
        };
        for c in candidates {
            if c > k_lo && c < k_hi && !out.iter().any(|&o: &f64| (o - c).abs() < 1e-12) {
                out.push(c);
            }
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Orders `|n| ≤ N` kept explicitly in lattice sums for wavenumber modulus
/// `k_abs`; beyond `N` the large-order expansion is used.
pub fn explicit_order_bound(kappa: f64, k_abs: f64, b: f64) -> i64 {
    let reach = (kappa.abs() + k_abs) / b;
    (20.0 * reach).ceil() as i64 + 10
}

/// Diffraction orders and dispersion data at one `(κ, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffractionTable {
    pub kappa: f64,
    pub k: Complex64,
    pub b: f64,
    /// Orders `-N..=N`.
    pub orders: Vec<i64>,
    /// `κ_n` for each order.
    pub kappa_n: Vec<f64>,
    /// `ζ_n` for each order.
    pub zeta: Vec<Complex64>,
    /// Propagating orders, `|κ_n| < Re k`.
    pub propagating: Vec<i64>,
    /// Evanescent orders within the table.
    pub evanescent: Vec<i64>,
    pub region: Region,
    /// `min_n | Re k − |κ_n| |`.
    pub cutoff_distance: f64,
    /// Set when `cutoff_distance` is inside the guard band.
    pub near_cutoff: bool,
}

impl DiffractionTable {
    /// `ζ_n` for an order inside the table.
    pub fn zeta_of(&self, n: i64) -> Option<Complex64> {
        let n_max = *self.orders.last()?;
        if n.abs() > n_max {
            return None;
        }
        Some(self.zeta[(n + n_max) as usize])
    }
}

/// Build the order table at (possibly complex) `k`.
pub fn build_table_complex(
    cfg: &GratingConfig,
    kappa: f64,
    k: Complex64,
    guard: f64,
) -> Result<DiffractionTable> {
    let b = cfg.reciprocal();
    let n_max = explicit_order_bound(kappa, k.norm(), b);
    let mut orders = Vec::with_capacity((2 * n_max + 1) as usize);
    let mut kappa_n = Vec::with_capacity(orders.capacity());
    let mut zeta = Vec::with_capacity(orders.capacity());
    let mut propagating = Vec::new();
    let mut evanescent = Vec::new();
    let mut cutoff_distance = f64::INFINITY;
    for n in -n_max..=n_max {
        let kn = kappa + n as f64 * b;
        orders.push(n);
        kappa_n.push(kn);
        zeta.push(zeta_n(kappa, k, n, b)?);
        let gap = k.re - kn.abs();
        cutoff_distance = cutoff_distance.min(gap.abs());
        if gap > 0.0 {
            propagating.push(n);
        } else {
            evanescent.push(n);
        }
    }
    let region = classify(kappa, k.re, b);
    Ok(DiffractionTable {
        kappa,
        k,
        b,
        orders,
        kappa_n,
        zeta,
        propagating,
        evanescent,
        region,
        cutoff_distance,
        near_cutoff: cutoff_distance < guard * k.norm(),
    })
}

/// Build the order table at real `k > 0`.
pub fn build_table(cfg: &GratingConfig, kappa: f64, k: f64) -> Result<DiffractionTable> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidConfig(format!("wavenumber must be positive, got {k}")));
    }
    build_table_complex(cfg, kappa, Complex64::new(k, 0.0), DEFAULT_CUTOFF_GUARD)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_of_one_is_one() {
        assert_eq!(branch_sqrt(c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn sqrt_of_negative_real_from_above() {
        let r = branch_sqrt(c(-4.0, 1e-300)).unwrap();
        assert!((r - c(0.0, 2.0)).norm() < 1e-14);
        let r = branch_sqrt(c(-4.0, 0.0)).unwrap();
        assert!((r - c(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_of_2i() {
        let r = branch_sqrt(c(0.0, 2.0)).unwrap();
        assert!((r - c(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn sqrt_rejects_cut() {
        assert!(matches!(branch_sqrt(c(0.0, -1.0)), Err(Error::BranchCut(_))));
        assert!(branch_sqrt(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn sqrt_continuous_across_negative_real_axis() {
        let above = branch_sqrt(c(-2.0, 1e-9)).unwrap();
        let below = branch_sqrt(c(-2.0, -1e-9)).unwrap();
        assert!((above - below).norm() < 1e-8);
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_n(0.0, c(2.0, 0.0), 0, 2.0 * PI).unwrap();
        assert!((z - c(2.0, 0.0)).norm() < 1e-15);
        let z = zeta_n(0.0, c(1.0, 0.0), 1, 2.0 * PI).unwrap();
        let want = (4.0 * PI * PI - 1.0).sqrt();
        assert!((z - c(0.0, want)).norm() < 1e-13);
        let b = 2.0 * PI / 1.3;
        let z = zeta_n(1.53, c(3.06, 0.0), -1, b).unwrap();
        let km1: f64 = 1.53 - b;
        assert!(z.re.abs() < 1e-15);
        assert!((z.im - (km1 * km1 - 3.06 * 3.06).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn zeta_rejects_exact_cutoff() {
        assert!(matches!(
            zeta_n(1.0, c(1.0, 0.0), 0, 2.0 * PI),
            Err(Error::RayleighCutoff { order: 0, .. })
        ));
    }

    #[test]
    fn table_examples() {
        let cfg = GratingConfig::new(1.3, 0.02, 2.0).unwrap();
        let theta = PI / 6.0;
        let k = 3.06;
        let t = build_table(&cfg, k * theta.sin(), k).unwrap();
        assert_eq!(t.propagating, vec![0]);
        assert_eq!(t.region, Region::D1);
        let k = 6.12;
        let t = build_table(&cfg, k * theta.sin(), k).unwrap();
        assert_eq!(t.propagating, vec![-1, 0]);
        assert_eq!(t.region, Region::D2);
        let t = build_table(&cfg, 0.3, 0.1).unwrap();
        assert!(t.propagating.is_empty());
        assert_eq!(t.region, Region::BelowContinuum);
    }

    #[test]
    fn config_validation() {
        assert!(GratingConfig::new(1.0, 0.05, 9.0).is_ok());
        assert!(GratingConfig::new(1.0, 0.1, 9.0).is_err());
        assert!(GratingConfig::new(1.0, 0.05, 1.0).is_err());
        assert!(GratingConfig::new(-1.0, 0.05, 2.0).is_err());
        assert!(Incidence::Bloch(4.0).validate(&GratingConfig::new(1.0, 0.05, 2.0).unwrap()).is_err());
        assert!(Incidence::Angle(2.0).validate(&GratingConfig::new(1.0, 0.05, 2.0).unwrap()).is_err());
    }

    #[test]
    fn cutoffs_for_angle_incidence() {
        let b = 2.0 * PI / 1.3;
        let cs = cutoffs_in(&Incidence::Angle(PI / 6.0), b, 2.0, 7.0);
        assert_eq!(cs.len(), 2);
        assert!((cs[0] - 2.0 * b / 3.0).abs() < 1e-12);
        assert!((cs[1] - 4.0 * b / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduce_kappa_into_zone() {
        let b = 2.0;
        assert!((reduce_kappa(2.5, b) - 0.5).abs() < 1e-15);
        assert!((reduce_kappa(-1.0, b) - 1.0).abs() < 1e-15);
        assert!((reduce_kappa(1.0, b) - 1.0).abs() < 1e-15);
    }
}
