//! Envelope checks `sup |d^j psi_k| (1+|t|)^{-j} e^{-Re Phi_k}` and the
//! polynomial bound on the cofactor quotients.

use serde::{Deserialize, Serialize};

use crate::config::{Config, Window};
use crate::error::Result;
use crate::numerics::{basis_on_path, wronskians, BasisJet, OdeModel, Path};
use crate::scalar::C64;

/// Window extension used for the stability test.
pub const EXTENSION: f64 = 5.0;
/// Allowed change of an envelope sup under extension.
pub const STABILITY_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEntry {
    pub k: usize,
    pub j: usize,
    pub sup: f64,
    pub inf: f64,
    pub extended_sup: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientEntry {
    pub l: usize,
    /// fitted power of t in `|h_l| e^{Re Phi_l}`
    pub exponent: f64,
    /// worst deviation from the fitted power law, in log units
    pub max_deviation: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEstimates {
    /// ray angle; 0 is the positive real axis
    pub theta: f64,
    pub envelopes: Vec<EnvelopeEntry>,
    pub quotients: Vec<QuotientEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub paths: Vec<PathEstimates>,
    pub pass: bool,
}

fn sup_inf(v: &[f64]) -> (f64, f64) {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    (hi.exp(), lo.exp())
}

fn extended(window: &Window) -> Result<Window> {
    let step = (window.t1 - window.t0) / (window.points - 1) as f64;
    let extra = (EXTENSION / step).round() as usize;
    Window::new(window.t0, window.t1 + extra as f64 * step, window.points + extra)
}

/// Envelope sups for every k and `j = 0..=n` on one basis, against its extension.
pub fn envelope_entries(basis: &BasisJet, ext: &BasisJet) -> Vec<EnvelopeEntry> {
    let n = basis.n();
    let mut out = Vec::new();
    for k in 0..n {
        for j in 0..=n {
            let (sup, inf) = sup_inf(&basis.envelope_logs(k, j));
            let (extended_sup, _) = sup_inf(&ext.envelope_logs(k, j));
            let stable = extended_sup <= STABILITY_FACTOR * sup && sup <= STABILITY_FACTOR * extended_sup;
            out.push(EnvelopeEntry { k, j, sup, inf, extended_sup, pass: sup.is_finite() && sup > 0.0 && stable });
        }
    }
    out
}

/// Power-law fit of `log(|h_l| e^{Re Phi_l})` against `log t`.
pub fn quotient_entries(basis: &BasisJet) -> Result<Vec<QuotientEntry>> {
    let w = wronskians(basis)?;
    let n = basis.n();
    let mut out = Vec::new();
    for l in 0..n {
        let pts: Vec<(f64, f64)> = basis
            .t_grid
            .iter()
            .enumerate()
            .map(|(i, &t)| (t.norm().ln(), w.h[l][i].log_abs(0) + basis.expo.phi(l, t).re))
            .collect();
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let exponent = sxy / sxx;
        let max_deviation = pts.iter().map(|p| (p.1 - my - exponent * (p.0 - mx)).abs()).fold(0.0, f64::max);
        out.push(QuotientEntry { l, exponent, max_deviation, pass: exponent.is_finite() && max_deviation < 0.5 });
    }
    Ok(out)
}

fn path_estimates(model: &OdeModel, theta: f64, window: &Window, cfg: &Config) -> Result<PathEstimates> {
    let path = Path::ray(C64::new(0.0, 0.0), theta);
    let b = basis_on_path(model, path, &window.grid(), cfg)?;
    let e = basis_on_path(model, path, &extended(window)?.grid(), cfg)?;
    let quotients = if theta == 0.0 { quotient_entries(&b)? } else { vec![] };
    Ok(PathEstimates { theta, envelopes: envelope_entries(&b, &e), quotients })
}

/// Real-window report; `rays` adds the sector samples `-h, h` for the configured half angle.
pub fn estimate_report(model: &OdeModel, window: &Window, cfg: &Config, rays: bool) -> Result<EstimateReport> {
    let mut thetas = vec![0.0];
    if rays {
        thetas.push(-cfg.sector_half_angle);
        thetas.push(cfg.sector_half_angle);
    }
    let paths = thetas.into_iter().map(|th| path_estimates(model, th, window, cfg)).collect::<Result<Vec<_>>>()?;
    let pass = paths.iter().all(|p| p.envelopes.iter().all(|e| e.pass) && p.quotients.iter().all(|q| q.pass));
    Ok(EstimateReport { paths, pass })
}
