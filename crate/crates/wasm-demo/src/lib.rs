//! Browser front end: spectrum sweep, resonance search and Fano scan.

#![cfg_attr(not(target_arch = "wasm32"), allow(dead_code, unused_imports))]

use std::f64::consts::PI;

use slitgrate::operators::Discretisation;
use slitgrate::resonance::find_resonances;
use slitgrate::scattering::{classify_window, spectrum_sweep, FeatureKind, SweepSpec};
use slitgrate::{GratingConfig, Incidence};

const CUTOFF_GUARD: f64 = 1e-6;
const FANO_GRID: usize = 201;

fn setup(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64) -> Result<(Discretisation, Incidence), String> {
    let cfg = GratingConfig::new(d, eps, ell).map_err(|e| e.to_string())?;
    let disc = Discretisation::with_defaults(&cfg).map_err(|e| e.to_string())?;
    let inc = if angle_mode { Incidence::Angle(incidence) } else { Incidence::Bloch(incidence) };
    inc.validate(&cfg).map_err(|e| e.to_string())?;
    Ok((disc, inc))
}

/// `[k, |T|, flagged]` triples, flattened.
#[allow(clippy::too_many_arguments)]
fn sweep(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let (disc, inc) = setup(d, eps, ell, angle_mode, incidence)?;
    let spec = SweepSpec::new(k_min, k_max, n).map_err(|e| e.to_string())?;
    let recs = spectrum_sweep(&disc, &inc, &spec, CUTOFF_GUARD).map_err(|e| e.to_string())?;
    Ok(recs.iter().flat_map(|r| [r.k, r.abs_t, f64::from(u8::from(r.near_cutoff))]).collect())
}

/// `[m, j, Re k, Im k]` for both branches of modes `1..=m_max`, flattened;
/// failed seeds are skipped.
fn resonances(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, m_max: u32) -> Result<Vec<f64>, String> {
    let (disc, inc) = setup(d, eps, ell, angle_mode, incidence)?;
    let modes: Vec<u32> = (1..=m_max).collect();
    let found = find_resonances(&disc, |m| inc.kappa_at(m as f64 * PI), &modes);
    Ok(found
        .into_iter()
        .filter_map(|(m, j, r)| r.ok().map(|r| [m as f64, j as f64, r.k.re, r.k.im]))
        .flatten()
        .collect())
}

/// Feature in `[lo, hi]` followed by a `|T|` trace of the window:
/// `[kind, center, peak, dip, contrast, k₀, |T|₀, k₁, |T|₁, …]` with kind
/// 0 none, 1 Fano, 2 Fabry–Perot, 3 Rayleigh and NaN for absent extrema.
fn fano(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, lo: f64, hi: f64) -> Result<Vec<f64>, String> {
    let (disc, inc) = setup(d, eps, ell, angle_mode, incidence)?;
    let f = classify_window(&disc, &inc, (lo, hi), FANO_GRID).map_err(|e| e.to_string())?;
    let kind = match f.kind {
        FeatureKind::None => 0.0,
        FeatureKind::Fano => 1.0,
        FeatureKind::FabryPerot => 2.0,
        FeatureKind::Rayleigh => 3.0,
    };
    let (a, b) = match (f.peak_k, f.dip_k) {
        (Some(p), Some(q)) => {
            let span = 3.0 * (p - q).abs().max(1e-6);
            (f.center - span, f.center + span)
        }
        _ => (lo, hi),
    };
    let spec = SweepSpec::new(a, b, FANO_GRID).map_err(|e| e.to_string())?;
    let recs = spectrum_sweep(&disc, &inc, &spec, CUTOFF_GUARD).map_err(|e| e.to_string())?;
    let mut out = vec![kind, f.center, f.peak_k.unwrap_or(f64::NAN), f.dip_k.unwrap_or(f64::NAN), f.contrast];
    out.extend(recs.iter().flat_map(|r| [r.k, r.abs_t]));
    Ok(out)
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    #[allow(clippy::too_many_arguments)]
    pub fn spectrum_sweep(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, k_min: f64, k_max: f64, n: usize) -> Result<Vec<f64>, JsValue> {
        super::sweep(d, eps, ell, angle_mode, incidence, k_min, k_max, n).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn find_resonances(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, m_max: u32) -> Result<Vec<f64>, JsValue> {
        super::resonances(d, eps, ell, angle_mode, incidence, m_max).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn fano_scan(d: f64, eps: f64, ell: f64, angle_mode: bool, incidence: f64, lo: f64, hi: f64) -> Result<Vec<f64>, JsValue> {
        super::fano(d, eps, ell, angle_mode, incidence, lo, hi).map_err(|e| JsValue::from_str(&e))
    }
}
