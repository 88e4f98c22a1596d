//! The `spectrum`, `resonances` and `fano` commands.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde_json::json;
use slitgrate::resonance::{find_resonances, scaling_study};
use slitgrate::scattering::{classify_window, spectrum_sweep};
use slitgrate::Incidence;

use crate::config::{Format, RunConfig};
use crate::emit;
use crate::error::CliError;

fn output_path(cfg: &RunConfig, default: &str) -> PathBuf {
    cfg.output.path.clone().unwrap_or_else(|| PathBuf::from(default))
}

/// `<path>.orders.json` next to the CSV.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".orders.json");
    csv.with_file_name(name)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let spec = cfg.sweep()?;
    let incidence = cfg.incidence()?;
    let disc = cfg.discretisation()?;
    let records = spectrum_sweep(&disc, &incidence, &spec, cfg.discretization.cutoff_guard)?;
    match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let path = output_path(cfg, "spectrum.csv");
            let sidecar = sidecar_path(&path);
            emit::write_file(&path, &emit::spectrum_csv(&records))?;
            emit::write_file(&sidecar, &emit::to_text(&emit::orders_sidecar(&records)))?;
            Ok(vec![path, sidecar])
        }
        Format::Json => {
            let path = output_path(cfg, "spectrum.json");
            emit::write_file(&path, &emit::to_text(&emit::spectrum_json(&records)))?;
            Ok(vec![path])
        }
    }
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.output.format {
        Some(Format::Csv) => Err(CliError::Config(format!("{command} output is JSON only"))),
        _ => Ok(()),
    }
}

/// Bloch number used to seed mode `m`: fixed, or `mπ sin θ` for angle incidence.
fn seed_kappa(incidence: Incidence, m: u32) -> f64 {
    incidence.kappa_at(m as f64 * PI)
}

pub fn resonances(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    json_only(cfg, "resonances")?;
    let incidence = cfg.incidence()?;
    let block = cfg.resonance.as_ref().ok_or_else(|| CliError::Config("missing [resonance] section".into()))?;
    if block.m_list.is_empty() || block.m_list.contains(&0) {
        return Err(CliError::Config("m_list must hold positive mode numbers".into()));
    }
    if let Some(eps) = &block.eps_list {
        if eps.len() < 4 || eps.iter().any(|&e| e.is_nan() || e <= 0.0) {
            return Err(CliError::Config("eps_list needs at least four positive apertures".into()));
        }
    }
    let disc = cfg.discretisation()?;
    let found = find_resonances(&disc, |m| seed_kappa(incidence, m), &block.m_list);
    let mut roots = Vec::new();
    let mut failures = Vec::new();
    for (m, j, res) in &found {
        match res {
            Ok(r) => roots.push(emit::resonance_json(r)),
            Err(e) => failures.push(emit::failure_json(*m, *j, e)),
        }
    }
    if roots.is_empty() {
        return Err(CliError::AllSeedsFailed);
    }
    let mut scaling = Vec::new();
    if let Some(eps) = &block.eps_list {
        for &m in &block.m_list {
            scaling.push(match scaling_study(&disc, seed_kappa(incidence, m), m, eps) {
                Ok(s) => emit::scaling_json(&s),
                Err(e) => json!({ "m": m, "error": e.to_string() }),
            });
        }
    }
    let doc = json!({
        "beta0": emit::num(disc.beta0()),
        "resonances": roots,
        "failures": failures,
        "scaling": scaling,
    });
    let path = output_path(cfg, "resonances.json");
    emit::write_file(&path, &emit::to_text(&doc))?;
    Ok(vec![path])
}

pub fn fano(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    json_only(cfg, "fano")?;
    let incidence = cfg.incidence()?;
    let block = cfg.fano.as_ref().ok_or_else(|| CliError::Config("missing [fano] section".into()))?;
    if block.windows.is_empty() {
        return Err(CliError::Config("[fano] windows is empty".into()));
    }
    let disc = cfg.discretisation()?;
    let mut features = Vec::new();
    for w in &block.windows {
        let report = classify_window(&disc, &incidence, (w[0], w[1]), block.grid)?;
        features.push(emit::feature_json(&report));
    }
    let doc = json!({ "beta0": emit::num(disc.beta0()), "features": features });
    let path = output_path(cfg, "fano.json");
    emit::write_file(&path, &emit::to_text(&doc))?;
    Ok(vec![path])
}
