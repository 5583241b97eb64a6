//! Ratio checks for the Gaussian integral bounds
//! `int_0^t e^{g s^2 + a s}(1+s)^p ds <~ e^{g t^2 + a t}(1+t)^{p+1}` and
//! `int_t^inf e^{-g s^2 + a s}(1+s)^p ds <~ e^{-g t^2 + a t}(1+t)^p`.

use quadrature::double_exponential::integrate;
use serde::{Deserialize, Serialize};

use crate::error::{HsolvError, Result};

/// Grid spacing in t for the sup over `[0, t_max]`.
pub const T_STEP: f64 = 0.05;
/// Number of alpha samples across `[-alpha0, alpha0]`.
pub const ALPHA_SAMPLES: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSup {
    pub alpha: f64,
    pub growth: f64,
    pub decay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub gamma: f64,
    pub a: f64,
    pub t_max: f64,
    pub alpha0: f64,
    /// sups at the requested alpha
    pub at_alpha: RatioSup,
    pub sweep: Vec<RatioSup>,
    pub sweep_growth_sup: f64,
    pub sweep_decay_sup: f64,
    /// sweep sups relative to the `alpha = 0` sups
    pub growth_uniformity: f64,
    pub decay_uniformity: f64,
}

impl HarnessReport {
    pub fn finite(&self) -> bool {
        self.sweep.iter().all(|r| r.growth.is_finite() && r.decay.is_finite())
    }

    pub fn uniform_within(&self, factor: f64) -> bool {
        self.growth_uniformity <= factor && self.decay_uniformity <= factor
    }
}

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let out = integrate(f, a, b, 1e-13);
    if !out.integral.is_finite() {
        return Err(HsolvError::Numerical(format!("quadrature failed on [{a}, {b}]")));
    }
    Ok(out.integral)
}

fn grid(t_max: f64) -> Vec<f64> {
    let m = (t_max / T_STEP).round().max(1.0) as usize;
    (0..=m).map(|i| t_max * i as f64 / m as f64).collect()
}

/// `sup_t` of the growth ratio, accumulated in normalized form to stay in range.
pub fn growth_sup(gamma: f64, alpha: f64, a: f64, t_max: f64) -> Result<f64> {
    let f = |s: f64| gamma * s * s + alpha * s;
    let ts = grid(t_max);
    // i = int_0^t e^{f(s) - f(t)} (1+s)^a ds
    let mut i = 0.0;
    let mut sup: f64 = 0.0;
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let piece = quad(|s| (f(s) - f(t1)).exp() * (1.0 + s).powf(a), t0, t1)?;
        i = i * (f(t0) - f(t1)).exp() + piece;
        sup = sup.max(i / (1.0 + t1).powf(a + 1.0));
    }
    Ok(sup)
}

/// `sup_t` of the decay ratio; the tail is cut where the integrand is below roundoff.
pub fn decay_sup(gamma: f64, alpha: f64, a: f64, t_max: f64) -> Result<f64> {
    let g = |s: f64| -gamma * s * s + alpha * s;
    let peak = (alpha / (2.0 * gamma)).max(t_max);
    let cut = peak + (80.0 / gamma).sqrt() + 2.0;
    let tail = quad(|s| (g(s) - g(t_max)).exp() * (1.0 + s).powf(a), t_max, cut)?;
    let ts = grid(t_max);
    // j = int_t^inf e^{g(s) - g(t)} (1+s)^a ds, swept downward
    let mut j = tail;
    let mut sup = j / (1.0 + t_max).powf(a);
    for w in ts.windows(2).rev() {
        let (t0, t1) = (w[0], w[1]);
        let piece = quad(|s| (g(s) - g(t0)).exp() * (1.0 + s).powf(a), t0, t1)?;
        j = j * (g(t1) - g(t0)).exp() + piece;
        sup = sup.max(j / (1.0 + t0).powf(a));
    }
    Ok(sup)
}

pub fn integral_bound_harness(gamma: f64, alpha: f64, a: f64, t_max: f64, alpha0: f64) -> Result<HarnessReport> {
    if !(gamma > 0.0) || a < 0.0 || !(t_max > 0.0) || alpha0 < 0.0 || alpha.abs() > alpha0 {
        return Err(HsolvError::InvalidArgument(format!(
            "harness needs gamma > 0, a >= 0, t_max > 0, |alpha| <= alpha0; got {gamma}, {a}, {t_max}, {alpha}, {alpha0}"
        )));
    }
    let at = |al: f64| -> Result<RatioSup> {
        Ok(RatioSup { alpha: al, growth: growth_sup(gamma, al, a, t_max)?, decay: decay_sup(gamma, al, a, t_max)? })
    };
    let at_alpha = at(alpha)?;
    let zero = at(0.0)?;
    let sweep = (0..ALPHA_SAMPLES)
        .map(|i| at(-alpha0 + 2.0 * alpha0 * i as f64 / (ALPHA_SAMPLES - 1) as f64))
        .collect::<Result<Vec<_>>>()?;
    let sweep_growth_sup = sweep.iter().map(|r| r.growth).fold(0.0, f64::max);
    let sweep_decay_sup = sweep.iter().map(|r| r.decay).fold(0.0, f64::max);
    Ok(HarnessReport {
        gamma,
        a,
        t_max,
        alpha0,
        at_alpha,
        sweep,
        sweep_growth_sup,
        sweep_decay_sup,
        growth_uniformity: sweep_growth_sup / zero.growth,
        decay_uniformity: sweep_decay_sup / zero.decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_ratio_matches_closed_form() {
        // gamma = 1, alpha = 0, a = 0 at t = 1: int_0^1 e^{s^2} ds = 1.4626517459071816
        let sup = growth_sup(1.0, 0.0, 0.0, 1.0).unwrap();
        let at_one = 1.462_651_745_907_181_6 / (1f64.exp() * 2.0);
        assert!(sup >= at_one - 1e-12);
    }

    #[test]
    fn decay_ratio_at_zero_is_half_gaussian() {
        // int_0^inf e^{-s^2} ds = sqrt(pi)/2 is the ratio at t = 0
        let sup = decay_sup(1.0, 0.0, 0.0, 5.0).unwrap();
        assert!((sup - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-10, "{sup}");
    }

    #[test]
    fn sups_are_finite_and_settle() {
        let s30 = growth_sup(1.0, 0.0, 0.0, 30.0).unwrap();
        let s40 = growth_sup(1.0, 0.0, 0.0, 40.0).unwrap();
        assert!(s30.is_finite() && s40 >= s30 && (s40 / s30 - 1.0) < 0.01);
        let d30 = decay_sup(1.0, 2.0, 2.0, 30.0).unwrap();
        let d40 = decay_sup(1.0, 2.0, 2.0, 40.0).unwrap();
        assert!(d40 >= d30 && (d40 / d30 - 1.0) < 0.01);
    }

    #[test]
    fn harness_validates_inputs() {
        assert!(integral_bound_harness(-1.0, 0.0, 0.0, 10.0, 4.0).is_err());
        assert!(integral_bound_harness(1.0, 5.0, 0.0, 10.0, 4.0).is_err());
    }
}
