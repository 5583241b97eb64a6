use serde::{Deserialize, Serialize};

use crate::error::{HsolvError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// |P_n(iz,0) coefficient of z^n minus 1|
    pub monic_defect: f64,
    /// floor on pairwise root distance
    pub root_gap: f64,
    /// relative agreement of the two root finders
    pub root_agreement: f64,
    /// |Re gamma_j| below this counts as zero
    pub re_threshold: f64,
    /// sigma_min below this signals a Schwartz intersection candidate
    pub sigma: f64,
    /// refinement confirmation level for scan dips
    pub sigma_confirm: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            monic_defect: 1e-12,
            root_gap: 1e-8,
            root_agreement: 1e-9,
            re_threshold: 1e-8,
            sigma: 1e-6,
            sigma_confirm: 1e-8,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t0: f64,
    pub t1: f64,
    pub points: usize,
}

impl Default for Window {
    fn default() -> Self {
        Window { t0: 5.0, t1: 15.0, points: 600 }
    }
}

impl Window {
    pub fn new(t0: f64, t1: f64, points: usize) -> Result<Self> {
        let w = Window { t0, t1, points };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.t0 < self.t1 && self.t1.is_finite()) {
            return Err(HsolvError::InvalidArgument(format!(
                "window needs 0 < t0 < T, got {}:{}",
                self.t0, self.t1
            )));
        }
        if self.points < 5 {
            return Err(HsolvError::InvalidArgument("window needs at least 5 grid points".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = (self.t1 - self.t0) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.t0 + h * k as f64).collect()
    }

    /// Parses `t0:T`.
    pub fn parse(s: &str, points: usize) -> Result<Self> {
        let bad = || HsolvError::InvalidArgument(format!("window must be t0:T, got {s:?}"));
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        let t0 = a.trim().parse::<f64>().map_err(|_| bad())?;
        let t1 = b.trim().parse::<f64>().map_err(|_| bad())?;
        Window::new(t0, t1, points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRange {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Default for GammaRange {
    fn default() -> Self {
        GammaRange { lo: 1.0, hi: 10.0, steps: 64 }
    }
}

impl GammaRange {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || steps < 2 {
            return Err(HsolvError::InvalidArgument(format!(
                "gamma range needs 0 < lo < hi and steps >= 2, got {lo}:{hi}:{steps}"
            )));
        }
        Ok(GammaRange { lo, hi, steps })
    }

    /// Parses `lo:hi:steps`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || HsolvError::InvalidArgument(format!("gamma range must be lo:hi:steps, got {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let steps = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        GammaRange::new(lo, hi, steps)
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| self.lo + h * k as f64).collect()
    }
}

/// Everything a numerical verdict depends on; echoed into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub tol: Tolerances,
    pub window: Window,
    pub gamma_range: GammaRange,
    /// sector half-angle for ray checks
    pub sector_half_angle: f64,
    /// far seeding point as a multiple of the window end
    pub far_factor: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: Tolerances::default(),
            window: Window::default(),
            gamma_range: GammaRange::default(),
            sector_half_angle: std::f64::consts::PI / 16.0,
            far_factor: 2.0,
        }
    }
}
