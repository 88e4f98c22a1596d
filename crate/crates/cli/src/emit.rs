//! Deterministic CSV and JSON writers with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Number, Value};
use slitgrate::resonance::{ResonanceResult, ScalingReport};
use slitgrate::scattering::{FeatureReport, SpectrumRecord};
use slitgrate::{Complex64, Error};

use crate::error::CliError;

pub const SPECTRUM_HEADER: &str =
    "k,kappa,region,absT,absT2,absR2,energy_defect,re_t0,im_t0,re_r0,im_r0,n_orders,near_cutoff,solver,beta0";

/// Scientific notation with 17 significant digits; non-finite
/// values are spelled `NaN`, `inf` or `-inf`.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// JSON number with 17 significant digits, `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(sig17(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn pair(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn spectrum_csv(records: &[SpectrumRecord]) -> String {
    let mut out = String::with_capacity(200 * (records.len() + 1));
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for r in records {
        let (r0, t0) = r.order(0).unwrap_or((Complex64::new(f64::NAN, f64::NAN), Complex64::new(f64::NAN, f64::NAN)));
        let fields = [
            sig17(r.k),
            sig17(r.kappa),
            r.region.as_str().to_string(),
            sig17(r.abs_t),
            sig17(r.abs_t2),
            sig17(r.abs_r2),
            sig17(r.energy_defect),
            sig17(t0.re),
            sig17(t0.im),
            sig17(r0.re),
            sig17(r0.im),
            r.orders.len().to_string(),
            u8::from(r.near_cutoff).to_string(),
            r.solver.as_str().to_string(),
            sig17(r.beta0),
        ];
        writeln!(out, "{}", fields.join(",")).unwrap();
    }
    out
}

fn record_json(r: &SpectrumRecord, with_summary: bool) -> Value {
    let mut m = Map::new();
    m.insert("k".into(), num(r.k));
    if with_summary {
        m.insert("kappa".into(), num(r.kappa));
        m.insert("region".into(), json!(r.region.as_str()));
        m.insert("absT".into(), num(r.abs_t));
        m.insert("absT2".into(), num(r.abs_t2));
        m.insert("absR2".into(), num(r.abs_r2));
        m.insert("energy_defect".into(), num(r.energy_defect));
        m.insert("near_cutoff".into(), json!(r.near_cutoff));
        m.insert("solver".into(), json!(r.solver.as_str()));
        m.insert("beta0".into(), num(r.beta0));
    }
    m.insert("orders".into(), json!(r.orders));
    m.insert("r".into(), Value::Array(r.r.iter().map(|&z| pair(z)).collect()));
    m.insert("t".into(), Value::Array(r.t.iter().map(|&z| pair(z)).collect()));
    Value::Object(m)
}

/// Per-order amplitudes keyed by wavenumber, for the CSV sidecar.
pub fn orders_sidecar(records: &[SpectrumRecord]) -> Value {
    json!({ "points": records.iter().map(|r| record_json(r, false)).collect::<Vec<_>>() })
}

pub fn spectrum_json(records: &[SpectrumRecord]) -> Value {
    json!({ "points": records.iter().map(|r| record_json(r, true)).collect::<Vec<_>>() })
}

pub fn resonance_json(r: &ResonanceResult) -> Value {
    json!({
        "m": r.m,
        "j": r.branch,
        "parity": r.parity.as_str(),
        "kappa": num(r.kappa),
        "re_k": num(r.k.re),
        "im_k": num(r.k.im),
        "k_hat_re": num(r.k_hat.re),
        "k_hat_im": num(r.k_hat.im),
        "residual": num(r.residual),
        "iterations": r.iterations,
        "region": r.region.as_str(),
        "bic": r.bound,
    })
}

pub fn failure_json(m: u32, j: usize, err: &Error) -> Value {
    json!({ "m": m, "j": j, "error": err.to_string() })
}

pub fn scaling_json(s: &ScalingReport) -> Value {
    let fit = |f: &slitgrate::resonance::LineFit| json!({ "slope": num(f.slope), "intercept": num(f.intercept), "slope_stderr": num(f.slope_stderr) });
    json!({
        "m": s.m,
        "kappa": num(s.kappa),
        "region": s.region.as_str(),
        "eps": s.apertures.iter().map(|&e| num(e)).collect::<Vec<_>>(),
        "k1": s.roots.iter().map(|r| pair(r[0])).collect::<Vec<_>>(),
        "k2": s.roots.iter().map(|r| pair(r[1])).collect::<Vec<_>>(),
        "k1_seed_error": s.seed_error.iter().map(|&e| num(e)).collect::<Vec<_>>(),
        "im_k1_fit": fit(&s.fits[0]),
        "im_k2_fit": fit(&s.fits[1]),
        "k1_seed_error_fit": fit(&s.seed_error_fit),
    })
}

pub fn feature_json(f: &FeatureReport) -> Value {
    let opt = |x: Option<f64>| x.map_or(Value::Null, num);
    json!({
        "window": [num(f.window[0]), num(f.window[1])],
        "classification": f.kind.as_str(),
        "center": num(f.center),
        "peak_k": opt(f.peak_k),
        "dip_k": opt(f.dip_k),
        "contrast": num(f.contrast),
        "region": f.region.as_str(),
        "mode": f.mode,
        "resonance": f.resonance.map_or(Value::Null, pair),
    })
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}
