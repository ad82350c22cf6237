//! `e^{Gτ} v` without forming `e^{Gτ}`: truncated Taylor series on substeps
//! short enough that `‖hG‖ ≤ 2`, so terms never exceed twice the vector and
//! the series needs about twenty-five products per substep.

use crate::error::{Error, Result};
use crate::generators::LinearOperator;
use crate::operator::{c64, Vector};

const MAX_TERMS: usize = 60;
const THETA: f64 = 2.0;

fn taylor_step<G: LinearOperator + ?Sized>(
    g: &G,
    v: &mut Vector,
    h: f64,
    term: &mut Vector,
    next: &mut Vector,
) {
    term.copy_from(v);
    let mut small = 0;
    for k in 1..=MAX_TERMS {
        g.apply_into(term, next);
        *next *= c64::new(h / k as f64, 0.0);
        std::mem::swap(term, next);
        *v += &*term;
        // two consecutive negligible terms: the tail is below rounding
        if term.norm() <= f64::EPSILON * 0.5 * v.norm() {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
}

/// `e^{Gτ} v0` at every entry of the ascending grid `taus`.
pub(crate) fn exponential_action<G: LinearOperator + ?Sized>(
    g: &G,
    v0: &Vector,
    taus: &[f64],
) -> Result<Vec<Vector>> {
    if v0.len() != g.size() {
        return Err(Error::DimensionMismatch {
            context: "exponential action initial vector",
            left: v0.len(),
            right: g.size(),
        });
    }
    let norm = g.norm_bound();
    if !norm.is_finite() {
        return Err(Error::Overflow { norm });
    }
    let n = v0.len();
    let (mut term, mut next) = (Vector::zeros(n), Vector::zeros(n));
    let mut v = v0.clone();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let gap = tau - t;
        if gap > 0.0 {
            let substeps = (norm * gap / THETA).ceil().max(1.0);
            let h = gap / substeps;
            for _ in 0..substeps as u64 {
                taylor_step(g, &mut v, h, &mut term, &mut next);
            }
            if !v.iter().all(|x| x.re.is_finite() && x.im.is_finite()) {
                return Err(Error::Overflow { norm: v.norm() });
            }
        }
        t = tau;
        out.push(v.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{expm, Operator};

    #[test]
    fn matches_dense_exponential() {
        let g = Operator::from_fn(5, 5, |i, j| {
            c64::new(
                ((i * 7 + j * 3) % 5) as f64 - 2.0,
                ((i + 2 * j) % 3) as f64 - 1.0,
            )
        });
        let v0 = Vector::from_fn(5, |i, _| c64::new(1.0 / (i + 1) as f64, 0.5));
        let taus = [0.0, 0.3, 1.7];
        let out = exponential_action(&g, &v0, &taus).unwrap();
        for (t, v) in taus.iter().zip(out) {
            let exact = expm(&g, *t).unwrap() * &v0;
            assert!((v - &exact).norm() <= 1e-12 * exact.norm().max(1.0));
        }
    }
}
