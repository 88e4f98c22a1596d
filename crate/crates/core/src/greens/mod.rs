//! Green's functions for the exterior half-spaces and the slit interiors.

pub mod exterior;
pub mod interior;

use num_complex::Complex64;

pub use exterior::ExteriorKernel;
pub use interior::InteriorKernel;

use crate::domain::GratingConfig;
use crate::error::Result;

/// Relative tolerance on the exterior series truncation.
pub const SERIES_TOL: f64 = 1e-12;

/// All kernels needed at one `(κ, k)` point.
#[derive(Debug, Clone)]
pub struct KernelSet {
    pub cfg: GratingConfig,
    pub kappa: f64,
    pub k: Complex64,
    pub exterior: ExteriorKernel,
    pub interior: InteriorKernel,
}

impl KernelSet {
    pub fn new(cfg: &GratingConfig, kappa: f64, k: Complex64) -> Result<Self> {
        Self::with_tolerance(cfg, kappa, k, SERIES_TOL)
    }

    /// Same as [`KernelSet::new`] with an explicit lattice-sum tolerance.
    pub fn with_tolerance(cfg: &GratingConfig, kappa: f64, k: Complex64, series_tol: f64) -> Result<Self> {
        cfg.validate()?;
        let z_max = 1.0 + cfg.separation;
        let exterior = ExteriorKernel::new(cfg, kappa, k, z_max, series_tol)?;
        let interior = InteriorKernel::new(k, cfg.aperture)?;
        Ok(Self { cfg: *cfg, kappa, k, exterior, interior })
    }

    pub fn beta_e(&self) -> Complex64 {
        self.exterior.beta_e
    }

    pub fn beta_i(&self) -> Complex64 {
        self.interior.beta_i
    }

    pub fn beta_tilde(&self) -> Complex64 {
        self.interior.beta_tilde
    }

    /// `G^e` between points of the same slit.
    pub fn exterior_same(&self, x: f64, y: f64) -> Complex64 {
        self.exterior.kernel(x - y)
    }

    /// `G^e(X − Y + sign·ℓ)` between the two slits.
    pub fn exterior_shifted(&self, x: f64, y: f64, sign: f64) -> Complex64 {
        self.exterior.kernel(x - y + sign * self.cfg.separation)
    }

    pub fn interior_same(&self, x: f64, y: f64) -> Complex64 {
        self.interior.kernel(x, y)
    }

    pub fn interior_cross(&self, x: f64, y: f64) -> Complex64 {
        self.interior.cross_kernel(x, y)
    }
}
