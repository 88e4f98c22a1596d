//! Run configuration: TOML file, presets and command-line overrides.

use std::f64::consts::{FRAC_PI_6, PI};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;
use slitgrate::domain::DEFAULT_CUTOFF_GUARD;
use slitgrate::greens::SERIES_TOL;
use slitgrate::operators::basis::{DEFAULT_BASIS, DEFAULT_QUADRATURE};
use slitgrate::operators::Discretisation;
use slitgrate::scattering::SweepSpec;
use slitgrate::{GratingConfig, Incidence};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub d: f64,
    pub eps: f64,
    #[serde(default = "default_ell")]
    pub ell: f64,
}

fn default_ell() -> f64 {
    2.0
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IncidenceBlock {
    pub theta_rad: Option<f64>,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub k_min: f64,
    pub k_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizationBlock {
    pub n_basis: usize,
    pub n_quad: usize,
    pub tol_series: f64,
    pub cutoff_guard: f64,
}

impl Default for DiscretizationBlock {
    fn default() -> Self {
        Self { n_basis: DEFAULT_BASIS, n_quad: DEFAULT_QUADRATURE, tol_series: SERIES_TOL, cutoff_guard: DEFAULT_CUTOFF_GUARD }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ResonanceBlock {
    pub m_list: Vec<u32>,
    pub eps_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FanoBlock {
    pub windows: Vec<[f64; 2]>,
    #[serde(default = "default_fano_grid")]
    pub grid: usize,
}

fn default_fano_grid() -> usize {
    201
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<Geometry>,
    pub incidence: Option<IncidenceBlock>,
    pub sweep: Option<SweepBlock>,
    #[serde(default)]
    pub discretization: DiscretizationBlock,
    pub resonance: Option<ResonanceBlock>,
    pub fano: Option<FanoBlock>,
    #[serde(default)]
    pub output: OutputBlock,
    pub beta0_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Preset {
    /// Geometry, incidence, sweep, resonance modes and Fano windows of the preset.
    // 6.28 is a window edge in k, not 2π.
    #[allow(clippy::approx_constant)]
    pub fn config(self) -> RunConfig {
        let (d, eps, ell, incidence, (k_min, k_max, n_points), m_list, windows): (_, _, _, _, _, Vec<u32>, Vec<[f64; 2]>) = match self {
            Preset::Fig2 => (1.0, 0.05, 9.0, IncidenceBlock { theta_rad: None, kappa: Some(0.1) }, (2.0, 4.0, 500), vec![1], vec![[2.78, 2.88]]),
            Preset::Fig3 => (
                1.3,
                0.02,
                2.0,
                IncidenceBlock { theta_rad: Some(FRAC_PI_6), kappa: None },
                (2.0, 7.0, 500),
                vec![1, 2],
                vec![[3.0, 3.12], [6.05, 6.2]],
            ),
            Preset::Fig4 => (
                1.5,
                0.005,
                2.0,
                IncidenceBlock { theta_rad: Some(3.0 * PI / 8.0), kappa: None },
                (2.0, 7.0, 500),
                vec![1, 2],
                vec![[3.08, 3.16], [6.2, 6.28]],
            ),
            Preset::Fig5 => (
                1.5,
                0.005,
                2.0,
                IncidenceBlock { theta_rad: Some(FRAC_PI_6), kappa: None },
                (2.0, 10.0, 800),
                vec![1, 2, 3],
                vec![[3.08, 3.16], [6.2, 6.28], [9.32, 9.4]],
            ),
        };
        RunConfig {
            geometry: Some(Geometry { d, eps, ell }),
            incidence: Some(incidence),
            sweep: Some(SweepBlock { k_min, k_max, n_points }),
            resonance: Some(ResonanceBlock { m_list, eps_list: None }),
            fano: Some(FanoBlock { windows, grid: default_fano_grid() }),
            ..RunConfig::default()
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Replace the physical sections with those of `preset`.
    pub fn apply_preset(&mut self, preset: Preset) {
        let p = preset.config();
        self.geometry = p.geometry;
        self.incidence = p.incidence;
        self.sweep = p.sweep;
        self.resonance = Some(match self.resonance.take() {
            Some(r) => ResonanceBlock { m_list: p.resonance.unwrap().m_list, eps_list: r.eps_list },
            None => p.resonance.unwrap(),
        });
        self.fano = p.fano;
    }

    pub fn grating(&self) -> Result<GratingConfig, CliError> {
        let g = self.geometry.as_ref().ok_or_else(|| CliError::Config("missing [geometry] section".into()))?;
        Ok(GratingConfig::new(g.d, g.eps, g.ell)?)
    }

    pub fn incidence(&self) -> Result<Incidence, CliError> {
        let inc = self.incidence.as_ref().ok_or_else(|| CliError::Config("missing [incidence] section".into()))?;
        match (inc.theta_rad, inc.kappa) {
            (Some(theta), None) => Ok(Incidence::Angle(theta)),
            (None, Some(kappa)) => Ok(Incidence::Bloch(kappa)),
            _ => Err(CliError::Config("[incidence] needs exactly one of theta_rad or kappa".into())),
        }
    }

    pub fn sweep(&self) -> Result<SweepSpec, CliError> {
        let s = self.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
        Ok(SweepSpec::new(s.k_min, s.k_max, s.n_points)?)
    }

    pub fn discretisation(&self) -> Result<Discretisation, CliError> {
        let dz = &self.discretization;
        if !(dz.tol_series > 0.0 && dz.cutoff_guard > 0.0) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        let cfg = self.grating()?;
        let disc = Discretisation::new(&cfg, dz.n_basis, dz.n_quad)?.with_series_tol(dz.tol_series)?;
        match self.beta0_override {
            Some(beta0) => Ok(disc.with_beta0(beta0)?),
            None => Ok(disc),
        }
    }
}
