//! Parallel wavenumber sweeps with deterministic output order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{spectrum_point, SpectrumRecord};
use crate::domain::{classify, Incidence};
use crate::error::{Error, Result};
use crate::operators::Discretisation;

/// Uniform grid of `n_points` wavenumbers on `[k_min, k_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub k_min: f64,
    pub k_max: f64,
    pub n_points: usize,
}

impl SweepSpec {
    pub fn new(k_min: f64, k_max: f64, n_points: usize) -> Result<Self> {
        let s = Self { k_min, k_max, n_points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_min.is_finite() && self.k_max.is_finite() && self.k_min > 0.0 && self.k_min < self.k_max) {
            return Err(Error::InvalidConfig(format!("empty sweep range [{}, {}]", self.k_min, self.k_max)));
        }
        if self.n_points < 2 {
            return Err(Error::InvalidConfig(format!("sweep needs at least 2 points, got {}", self.n_points)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.k_max - self.k_min) / (self.n_points - 1) as f64;
        (0..self.n_points).map(|i| self.k_min + step * i as f64).collect()
    }
}

/// Solve every grid point; records come back sorted by `k`.
///
/// Points on a Rayleigh cutoff or a slit-waveguide pole are emitted as
/// flagged placeholders instead of aborting the sweep.
pub fn spectrum_sweep(disc: &Discretisation, incidence: &Incidence, spec: &SweepSpec, cutoff_guard: f64) -> Result<Vec<SpectrumRecord>> {
    spec.validate()?;
    incidence.validate(&disc.cfg)?;
    spec.points()
        .par_iter()
        .map(|&k| match spectrum_point(disc, incidence, k, cutoff_guard) {
            Err(Error::WaveguidePole { .. }) | Err(Error::RayleighCutoff { .. }) => {
                let kappa = incidence.kappa_at(k);
                Ok(SpectrumRecord::unresolved(k, kappa, classify(kappa, k, disc.cfg.reciprocal()), disc.beta0()))
            }
            other => other,
        })
        .collect()
}
