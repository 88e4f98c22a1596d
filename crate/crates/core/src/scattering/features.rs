//! Detection of Fano, Fabry–Perot and Rayleigh features in `|T|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::sweep::{spectrum_sweep, SweepSpec};
use super::{spectrum_point, SpectrumRecord};
use crate::domain::{classify, cutoffs_in, Incidence, Region};
use crate::error::{Error, Result};
use crate::operators::Discretisation;
use crate::resonance::{asymptotic_resonances, refine_root, ResonanceResult, ResonanceSeed, BIC_TOL, MODE_EPS_LIMIT};

/// Fine-scan half-width in units of `|Im k^{(2)}|`.
pub const FANO_HALF_WIDTH: f64 = 20.0;
/// Required ratio of the peak–dip excursion to the background-slope change.
pub const FANO_BACKGROUND_RATIO: f64 = 3.0;
/// Step of the one-sided difference quotients used to confirm a kink.
pub const KINK_STEP: f64 = 1e-4;
/// Required ratio of the slope jump to the smooth slope scale at a cutoff.
pub const KINK_RATIO: f64 = 3.0;
/// Fixed-point updates of `κ = k sin θ` when locating a resonance for angle incidence.
const KAPPA_UPDATES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FeatureKind {
    Fano,
    FabryPerot,
    Rayleigh,
    #[serde(rename = "none")]
    None,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Fano => "Fano",
            FeatureKind::FabryPerot => "FabryPerot",
            FeatureKind::Rayleigh => "Rayleigh",
            FeatureKind::None => "none",
        }
    }
}

/// One detected spectral feature.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureReport {
    pub kind: FeatureKind,
    pub window: [f64; 2],
    /// Feature location: peak–dip midpoint, peak or kink.
    pub center: f64,
    pub peak_k: Option<f64>,
    pub dip_k: Option<f64>,
    /// `|T|` excursion (peak minus dip, or slope jump at a kink).
    pub contrast: f64,
    pub region: Region,
    pub mode: Option<u32>,
    pub resonance: Option<Complex64>,
}

fn abs_t(disc: &Discretisation, incidence: &Incidence, k: f64) -> Result<f64> {
    spectrum_point(disc, incidence, k, 0.0).map(|r| r.abs_t)
}

fn abs_t_many(disc: &Discretisation, incidence: &Incidence, ks: &[f64]) -> Result<Vec<f64>> {
    ks.par_iter().map(|&k| abs_t(disc, incidence, k)).collect()
}

/// Refined branch-`j` resonances with `Re k` inside `[lo, hi]`.
///
/// For angle incidence the Bloch wavenumber is updated to `Re k · sin θ`
/// until it is consistent with the root.
pub fn resonances_in(disc: &Discretisation, incidence: &Incidence, lo: f64, hi: f64, branch: usize) -> Result<Vec<ResonanceResult>> {
    let eps = disc.cfg.aperture;
    let m_lo = ((lo - 0.5) / PI).ceil().max(1.0) as u32;
    let m_hi = ((hi + 0.5) / PI).floor() as u32;
    let modes: Vec<u32> = (m_lo..=m_hi).filter(|&m| (m as f64) * eps < MODE_EPS_LIMIT).collect();
    let found: Vec<Option<ResonanceResult>> = modes
        .par_iter()
        .map(|&m| {
            let base = m as f64 * PI;
            let seeds = asymptotic_resonances(disc, incidence.kappa_at(base), m)?;
            let mut root = refine_root(disc, &seeds[branch - 1])?;
            if let Incidence::Angle(_) = incidence {
                for _ in 0..KAPPA_UPDATES {
                    let seed = ResonanceSeed { kappa: incidence.kappa_at(root.k.re), k_hat: root.k, ..seeds[branch - 1] };
                    root = refine_root(disc, &seed)?;
                }
                root.k_hat = seeds[branch - 1].k_hat;
            }
            Ok((root.k.re >= lo && root.k.re <= hi).then_some(root))
        })
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Locate the Fano peak–dip pair of the single branch-2 resonance in `window`.
pub fn fano_scan(disc: &Discretisation, incidence: &Incidence, window: (f64, f64), grid: usize) -> Result<FeatureReport> {
    let (lo, hi) = window;
    if lo.is_nan() || hi.is_nan() || lo >= hi || grid < 8 {
        return Err(Error::InvalidConfig(format!("bad fano window [{lo}, {hi}] with {grid} points")));
    }
    let roots = resonances_in(disc, incidence, lo, hi, 2)?;
    let root = match roots.as_slice() {
        [] => return Err(Error::NoFeature(lo, hi)),
        [r] => *r,
        _ => return Err(Error::InvalidConfig(format!("window [{lo}, {hi}] holds {} branch-2 resonances", roots.len()))),
    };
    if root.k.im.abs() < BIC_TOL {
        return Err(Error::NoFeature(lo, hi));
    }
    let center = root.k.re;
    let half = (FANO_HALF_WIDTH * root.k.im.abs()).min(0.5 * (hi - lo));
    let ks: Vec<f64> = (0..grid).map(|i| center - half + 2.0 * half * i as f64 / (grid - 1) as f64).collect();
    let ts = abs_t_many(disc, incidence, &ks)?;
    let bg = abs_t_many(disc, incidence, &[(center - 10.0 * half).max(lo), (center + 10.0 * half).min(hi)])?;
    let (i_max, i_min) = extrema(&ts);
    let (k_peak, k_dip) = (ks[i_max], ks[i_min]);
    let excursion = ts[i_max] - ts[i_min];
    let bg_span = ((center + 10.0 * half).min(hi) - (center - 10.0 * half).max(lo)).max(f64::MIN_POSITIVE);
    let slope = (bg[1] - bg[0]) / bg_span;
    let interior = |i: usize| i > 0 && i + 1 < grid;
    let is_fano = interior(i_max)
        && interior(i_min)
        && (k_peak - k_dip).abs() < disc.cfg.aperture
        && excursion > FANO_BACKGROUND_RATIO * slope.abs() * (k_peak - k_dip).abs();
    Ok(FeatureReport {
        kind: if is_fano { FeatureKind::Fano } else { FeatureKind::None },
        window: [lo, hi],
        center: 0.5 * (k_peak + k_dip),
        peak_k: Some(k_peak),
        dip_k: Some(k_dip),
        contrast: excursion,
        region: classify(incidence.kappa_at(center), center, disc.cfg.reciprocal()),
        mode: Some(root.m),
        resonance: Some(root.k),
    })
}

fn extrema(ts: &[f64]) -> (usize, usize) {
    let mut i_max = 0;
    let mut i_min = 0;
    for (i, &t) in ts.iter().enumerate() {
        if t > ts[i_max] {
            i_max = i;
        }
        if t < ts[i_min] {
            i_min = i;
        }
    }
    (i_max, i_min)
}

fn usable(r: &SpectrumRecord) -> bool {
    !r.near_cutoff && r.abs_t.is_finite()
}

/// Broad peaks of `|T|` attached to branch-1 resonances, read off a sweep.
pub fn fabry_perot_peaks(disc: &Discretisation, incidence: &Incidence, records: &[SpectrumRecord]) -> Result<Vec<FeatureReport>> {
    let (lo, hi) = match (records.first(), records.last()) {
        (Some(a), Some(b)) if records.len() >= 3 => (a.k, b.k),
        _ => return Ok(Vec::new()),
    };
    let sharp = resonances_in(disc, incidence, lo, hi, 2)?;
    let spacing = (hi - lo) / (records.len() - 1) as f64;
    let near_sharp = |k: f64| sharp.iter().any(|r| (k - r.k.re).abs() < 50.0 * r.k.im.abs() + 2.0 * spacing);
    let mut out = Vec::new();
    for root in resonances_in(disc, incidence, lo, hi, 1)? {
        let reach = (4.0 * root.k.im.abs()).max(0.1);
        let best = (1..records.len() - 1)
            .filter(|&i| {
                let (a, b, c) = (&records[i - 1], &records[i], &records[i + 1]);
                usable(a) && usable(b) && usable(c) && b.abs_t > a.abs_t && b.abs_t >= c.abs_t
            })
            .filter(|&i| (records[i].k - root.k.re).abs() < reach && !near_sharp(records[i].k))
            .max_by(|&a, &b| records[a].abs_t.total_cmp(&records[b].abs_t));
        let Some(i) = best else { continue };
        let (t0, t1, t2) = (records[i - 1].abs_t, records[i].abs_t, records[i + 1].abs_t);
        let curv = t0 - 2.0 * t1 + t2;
        let shift = if curv != 0.0 { 0.5 * (t0 - t2) / curv } else { 0.0 };
        let peak = records[i].k + shift.clamp(-1.0, 1.0) * spacing;
        let floor = records
            .iter()
            .filter(|r| usable(r) && (r.k - peak).abs() < reach)
            .map(|r| r.abs_t)
            .fold(f64::INFINITY, f64::min);
        out.push(FeatureReport {
            kind: FeatureKind::FabryPerot,
            window: [peak - reach, peak + reach],
            center: peak,
            peak_k: Some(peak),
            dip_k: None,
            contrast: t1 - floor,
            region: records[i].region,
            mode: Some(root.m),
            resonance: Some(root.k),
        });
    }
    Ok(out)
}

/// Kinks of `|T|` at Rayleigh cutoffs inside the sweep, confirmed by a jump
/// in the one-sided slopes.
pub fn rayleigh_kinks(disc: &Discretisation, incidence: &Incidence, records: &[SpectrumRecord]) -> Result<Vec<FeatureReport>> {
    let (lo, hi) = match (records.first(), records.last()) {
        (Some(a), Some(b)) if records.len() >= 3 => (a.k, b.k),
        _ => return Ok(Vec::new()),
    };
    let spacing = (hi - lo) / (records.len() - 1) as f64;
    let mut out = Vec::new();
    for c in cutoffs_in(incidence, disc.cfg.reciprocal(), lo + 4.0 * spacing, hi - 4.0 * spacing) {
        let h = KINK_STEP;
        let ks = [c - 2.0 * h, c - h, c + h, c + 2.0 * h];
        let ts = abs_t_many(disc, incidence, &ks)?;
        let left = (ts[1] - ts[0]) / h;
        let right = (ts[3] - ts[2]) / h;
        // smooth slope scale from the sweep, away from the cutoff
        let scale = records
            .windows(2)
            .filter(|w| usable(&w[0]) && usable(&w[1]) && (w[0].k - c).abs() > 3.0 * spacing && (w[0].k - c).abs() < 10.0 * spacing)
            .map(|w| ((w[1].abs_t - w[0].abs_t) / spacing).abs())
            .fold(0.0, f64::max);
        let jump = (right - left).abs();
        if jump <= KINK_RATIO * scale {
            continue;
        }
        // kink location on the sweep grid: largest second difference near the cutoff
        let located = (1..records.len() - 1)
            .filter(|&i| (records[i].k - c).abs() <= 2.0 * spacing)
            .filter(|&i| records[i - 1].abs_t.is_finite() && records[i].abs_t.is_finite() && records[i + 1].abs_t.is_finite())
            .max_by(|&a, &b| {
                let d2 = |i: usize| (records[i - 1].abs_t - 2.0 * records[i].abs_t + records[i + 1].abs_t).abs();
                d2(a).total_cmp(&d2(b))
            })
            .map(|i| records[i].k)
            .unwrap_or(c);
        out.push(FeatureReport {
            kind: FeatureKind::Rayleigh,
            window: [c - 2.0 * h, c + 2.0 * h],
            center: located,
            peak_k: None,
            dip_k: None,
            contrast: jump,
            region: classify(incidence.kappa_at(c + h), c + h, disc.cfg.reciprocal()),
            mode: None,
            resonance: None,
        });
    }
    Ok(out)
}

/// Classify the dominant feature of `window`: a Fano pair if the branch-2
/// resonance produces one, else a Rayleigh kink, else the strongest
/// Fabry–Perot peak on a `grid`-point sweep, else [`FeatureKind::None`].
pub fn classify_window(disc: &Discretisation, incidence: &Incidence, window: (f64, f64), grid: usize) -> Result<FeatureReport> {
    let (lo, hi) = window;
    match fano_scan(disc, incidence, window, grid) {
        Ok(f) if f.kind == FeatureKind::Fano => return Ok(f),
        Ok(_) | Err(Error::NoFeature(..)) => {}
        Err(e) => return Err(e),
    }
    let records = spectrum_sweep(disc, incidence, &SweepSpec::new(lo, hi, grid)?, 0.0)?;
    let strongest = |v: Vec<FeatureReport>| v.into_iter().max_by(|a, b| a.contrast.total_cmp(&b.contrast));
    if let Some(f) = strongest(rayleigh_kinks(disc, incidence, &records)?) {
        return Ok(f);
    }
    if let Some(f) = strongest(fabry_perot_peaks(disc, incidence, &records)?) {
        return Ok(f);
    }
    let mid = 0.5 * (lo + hi);
    Ok(FeatureReport {
        kind: FeatureKind::None,
        window: [lo, hi],
        center: mid,
        peak_k: None,
        dip_k: None,
        contrast: 0.0,
        region: classify(incidence.kappa_at(mid), mid, disc.cfg.reciprocal()),
        mode: None,
        resonance: None,
    })
}

/// A sweep together with every feature found in it.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumAnalysis {
    pub records: Vec<SpectrumRecord>,
    pub features: Vec<FeatureReport>,
}

/// Sweep `spec` and report Fabry–Perot peaks, Fano pairs and Rayleigh kinks,
/// sorted by location.
pub fn analyze_spectrum(disc: &Discretisation, incidence: &Incidence, spec: &SweepSpec, cutoff_guard: f64, fano_grid: usize) -> Result<SpectrumAnalysis> {
    let records = spectrum_sweep(disc, incidence, spec, cutoff_guard)?;
    let mut features = fabry_perot_peaks(disc, incidence, &records)?;
    for root in resonances_in(disc, incidence, spec.k_min, spec.k_max, 2)? {
        let c = root.k.re;
        let half = 0.05f64.min(c - spec.k_min).min(spec.k_max - c);
        match fano_scan(disc, incidence, (c - half, c + half), fano_grid) {
            Ok(f) => features.push(f),
            Err(Error::NoFeature(..)) => {}
            Err(e) => return Err(e),
        }
    }
    features.extend(rayleigh_kinks(disc, incidence, &records)?);
    features.sort_by(|a, b| a.center.total_cmp(&b.center));
    Ok(SpectrumAnalysis { records, features })
}
