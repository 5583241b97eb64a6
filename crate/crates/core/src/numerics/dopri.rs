//! Dormand-Prince 5(4) with Hairer's dense output, for complex vector ODEs
//! in a real independent variable (either direction).

use crate::error::{HsolvError, Result};
use crate::scalar::C64;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-10, atol: 1e-12, h_init: None, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
    pub last_h: f64,
}

/// One accepted step's interpolant.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub x0: f64,
    pub h: f64,
    pub r: [Vec<C64>; 5],
}

impl DenseSegment {
    pub fn eval(&self, x: f64, out: &mut [C64]) {
        let th = (x - self.x0) / self.h;
        let th1 = 1.0 - th;
        for i in 0..out.len() {
            out[i] = self.r[0][i]
                + (self.r[1][i] + (self.r[2][i] + (self.r[3][i] + self.r[4][i] * th1) * th) * th1) * th;
        }
    }
}

/// Continuous solution assembled from dense segments.
#[derive(Debug, Clone, Default)]
pub struct DenseSolution {
    pub segments: Vec<DenseSegment>,
}

impl DenseSolution {
    pub fn eval(&self, x: f64) -> Vec<C64> {
        let dim = self.segments.first().map(|s| s.r[0].len()).unwrap_or(0);
        let mut out = vec![C64::new(0.0, 0.0); dim];
        if self.segments.is_empty() {
            return out;
        }
        // segments are in integration order; locate by bisection on the covered interval
        let key = |s: &DenseSegment| s.x0.min(s.x0 + s.h);
        let forward = self.segments[0].h > 0.0;
        let idx = if forward {
            self.segments.partition_point(|s| key(s) <= x).saturating_sub(1)
        } else {
            self.segments.partition_point(|s| s.x0.max(s.x0 + s.h) > x).saturating_sub(1)
        };
        self.segments[idx].eval(x, &mut out);
        out
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        let a = self.segments.first()?.x0;
        let l = self.segments.last()?;
        Some((a, l.x0 + l.h))
    }
}

fn err_norm(y0: &[C64], y1: &[C64], err: &[C64], opts: &Dopri5Options) -> f64 {
    let mut s = 0.0;
    for i in 0..y0.len() {
        let sc = opts.atol + opts.rtol * y0[i].norm().max(y1[i].norm());
        let e = err[i].norm() / sc;
        s += e * e;
    }
    (s / y0.len().max(1) as f64).sqrt()
}

/// Integrates `y' = f(x, y)` from `x0` to `x1`, reporting the state at each
/// of `outputs` (monotone in the integration direction, inside `[x0, x1]`).
/// If `dense` is given, every accepted step's interpolant is appended.
pub fn integrate<F>(
    mut f: F,
    x0: f64,
    y0: &[C64],
    x1: f64,
    outputs: &[f64],
    opts: &Dopri5Options,
    mut dense: Option<&mut DenseSolution>,
) -> Result<(Vec<C64>, Vec<Vec<C64>>, Stats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let dim = y0.len();
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    let zero = C64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut stats = Stats::default();
    let mut out = Vec::with_capacity(outputs.len());
    let mut next_out = 0;
    while next_out < outputs.len() && (outputs[next_out] - x0) * dir <= 0.0 {
        out.push(y.clone());
        next_out += 1;
    }
    if span == 0.0 {
        while next_out < outputs.len() {
            out.push(y.clone());
            next_out += 1;
        }
        return Ok((y, out, stats));
    }
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![zero; dim]).collect();
    let mut tmp = vec![zero; dim];
    let mut y1 = vec![zero; dim];
    let mut err = vec![zero; dim];
    f(x0, &y, &mut k[0]);
    stats.evals += 1;
    let mut h = match opts.h_init {
        Some(h) => h.abs().min(span),
        None => initial_step(&mut f, x0, &y, &k[0], dir, opts, &mut stats).min(span),
    };
    h = h.min(opts.h_max);
    let mut x = x0;
    let mut fac_old: f64 = 1e-4;
    let mut reject = false;
    loop {
        if stats.accepted + stats.rejected > opts.max_steps {
            return Err(HsolvError::Numerical(format!("step budget exhausted at x = {x}")));
        }
        let last = (x + dir * h * 1.01 - x1) * dir >= 0.0;
        if last {
            h = (x1 - x).abs();
        }
        let hs = dir * h;
        if h < 1e-14 * x.abs().max(1.0) {
            return Err(HsolvError::StepUnderflow(x));
        }
        let stage = |tmp: &mut [C64], y: &[C64], k: &[Vec<C64>], coefs: &[(usize, f64)]| {
            for i in 0..dim {
                let mut acc = y[i];
                for &(s, a) in coefs {
                    acc += k[s][i] * (a * hs);
                }
                tmp[i] = acc;
            }
        };
        stage(&mut tmp, &y, &k, &[(0, A21)]);
        f(x + C2 * hs, &tmp, &mut k[1]);
        stage(&mut tmp, &y, &k, &[(0, A31), (1, A32)]);
        f(x + C3 * hs, &tmp, &mut k[2]);
        stage(&mut tmp, &y, &k, &[(0, A41), (1, A42), (2, A43)]);
        f(x + C4 * hs, &tmp, &mut k[3]);
        stage(&mut tmp, &y, &k, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
        f(x + C5 * hs, &tmp, &mut k[4]);
        stage(&mut tmp, &y, &k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
        f(x + hs, &tmp, &mut k[5]);
        stage(&mut y1, &y, &k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)]);
        f(x + hs, &y1, &mut k[6]);
        stats.evals += 6;
        for i in 0..dim {
            err[i] = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * hs;
        }
        let en = err_norm(&y, &y1, &err, opts);
        if !en.is_finite() {
            h *= 0.2;
            reject = true;
            stats.rejected += 1;
            continue;
        }
        // PI step-size control as in Hairer's dopri5
        let fac11 = en.powf(0.2 - 0.04 * 0.75);
        let mut fac = fac11 / fac_old.powf(0.04);
        fac = (fac / 0.9).clamp(0.1, 5.0);
        let hnew = h / fac;
        if en <= 1.0 {
            fac_old = en.max(1e-4);
            stats.accepted += 1;
            let xnew = x + hs;
            let want_dense = dense.is_some() || (next_out < outputs.len() && (outputs[next_out] - xnew) * dir <= 0.0);
            if want_dense {
                let seg = make_segment(x, hs, &y, &y1, &k);
                while next_out < outputs.len() && (outputs[next_out] - xnew) * dir <= 0.0 {
                    let mut v = vec![zero; dim];
                    seg.eval(outputs[next_out], &mut v);
                    out.push(v);
                    next_out += 1;
                }
                if let Some(d) = dense.as_deref_mut() {
                    d.segments.push(seg);
                }
            }
            // FSAL
            k.swap(0, 6);
            std::mem::swap(&mut y, &mut y1);
            x = xnew;
            stats.last_h = h;
            if last {
                break;
            }
            let mut hn = hnew.min(opts.h_max);
            if reject {
                hn = hn.min(h);
            }
            reject = false;
            h = hn;
        } else {
            h /= (fac11 / 0.9).clamp(1.0, 10.0);
            reject = true;
            stats.rejected += 1;
        }
    }
    while next_out < outputs.len() {
        out.push(y.clone());
        next_out += 1;
    }
    Ok((y, out, stats))
}

fn make_segment(x: f64, hs: f64, y: &[C64], y1: &[C64], k: &[Vec<C64>]) -> DenseSegment {
    let dim = y.len();
    let mut r: [Vec<C64>; 5] = Default::default();
    r[0] = y.to_vec();
    r[1] = (0..dim).map(|i| y1[i] - y[i]).collect();
    r[2] = (0..dim).map(|i| k[0][i] * hs - r[1][i]).collect();
    r[3] = (0..dim).map(|i| r[1][i] - k[6][i] * hs - r[2][i]).collect();
    r[4] = (0..dim)
        .map(|i| (k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k[6][i] * D7) * hs)
        .collect();
    DenseSegment { x0: x, h: hs, r }
}

fn initial_step<F>(f: &mut F, x0: f64, y0: &[C64], f0: &[C64], dir: f64, opts: &Dopri5Options, stats: &mut Stats) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let dim = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| opts.atol + opts.rtol * y.norm()).collect();
    let norm = |v: &[C64]| (v.iter().zip(&sc).map(|(a, s)| (a.norm() / s).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(opts.h_max);
    let y1: Vec<C64> = (0..dim).map(|i| y0[i] + f0[i] * (dir * h0)).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); dim];
    f(x0 + dir * h0, &y1, &mut f1);
    stats.evals += 1;
    let diff: Vec<C64> = (0..dim).map(|i| f1[i] - f0[i]).collect();
    let d2 = norm(&diff) / h0;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
    (100.0 * h0).min(h1).min(opts.h_max)
}
