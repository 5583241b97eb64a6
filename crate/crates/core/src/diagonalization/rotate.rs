use crate::algebra::order_roots;
use crate::error::{HsolvError, Result};
use crate::realization::CoeffTable;
use crate::scalar::{Scalar, C64};

/// Operator seen along `t = zeta e^{i alpha}`, multiplied by `e^{n i alpha}`:
/// the monomial `t^a d^b` picks up `e^{i alpha (n + a - b)}`, the symbol
/// stays monic and the roots become `gamma_j e^{2 i alpha}`.
pub fn rotate<S: Scalar>(table: &CoeffTable<S>, roots: &[C64], alpha: f64) -> Result<(Vec<C64>, CoeffTable<C64>)> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&alpha) {
        return Err(HsolvError::InvalidArgument(format!("rotation angle {alpha} outside [0, pi/2]")));
    }
    let n = table.n as i64;
    let phase = |a: usize, b: usize| C64::from_polar(1.0, alpha * (n + a as i64 - b as i64) as f64);
    let t = table.to_c64();
    let d = t.d.iter().map(|(&(l, j), c)| ((l, j), c * phase(l - j, j))).collect();
    let e = t.e.iter().map(|(&(l, j, m), c)| ((l, j, m), c * phase(l - j - 2 * m, j))).collect();
    let rotated: Vec<C64> = roots.iter().map(|g| g * C64::from_polar(1.0, 2.0 * alpha)).collect();
    let (ordered, _) = order_roots(&rotated)?;
    Ok((ordered, CoeffTable { n: table.n, d, e }))
}
