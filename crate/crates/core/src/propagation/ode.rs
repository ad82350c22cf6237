//! Adaptive Dormand–Prince 5(4) integration of `dv/dτ = G·v`.

use crate::error::{Error, Result};
use crate::generators::LinearOperator;
use crate::operator::{c64, Vector};

// the generator is autonomous, so the stage nodes never enter
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; these are fifth minus fourth order
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 50_000_000;

// max-norm: RMS lets the absolute error grow with the dimension
fn error_norm(err: &Vector, y0: &Vector, y1: &Vector, tol: f64) -> f64 {
    err.iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| e.norm() / (tol + tol * a.norm().max(b.norm())))
        .fold(0.0, f64::max)
}

fn check_grid(taus: &[f64]) -> Result<()> {
    if let Some(bad) = taus.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau grid entries must be finite and nonnegative, got {bad}"
        )));
    }
    if taus.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("tau grid must be ascending".into()));
    }
    Ok(())
}

/// Solves `dv/dτ = G·v` from `v(0) = v0`, returning `v(τ)` for every entry of
/// the ascending grid `taus`. Local error is controlled with absolute and
/// relative tolerance `tol`.
pub fn integrate_ode<G: LinearOperator + ?Sized>(
    g: &G,
    v0: &Vector,
    taus: &[f64],
    tol: f64,
) -> Result<Vec<Vector>> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ODE tolerance must be positive, got {tol}"
        )));
    }
    if v0.len() != g.size() {
        return Err(Error::DimensionMismatch {
            context: "integrate_ode initial vector",
            left: v0.len(),
            right: g.size(),
        });
    }
    check_grid(taus)?;

    let n = v0.len();
    let mut k: Vec<Vector> = (0..7).map(|_| Vector::zeros(n)).collect();
    let mut stage = Vector::zeros(n);
    let mut y = v0.clone();
    let mut t = 0.0_f64;
    g.apply_into(&y, &mut k[0]);

    // Hairer's first-step guess
    let y_norm = y.norm().max(1e-300);
    let f_norm = k[0].norm();
    let mut h = if f_norm <= 1e-14 * y_norm {
        1e-2
    } else {
        0.01 * y_norm / f_norm
    };

    let mut out = Vec::with_capacity(taus.len());
    let mut steps = 0usize;
    for &target in taus {
        while t < target {
            if steps >= MAX_STEPS {
                return Err(Error::StepUnderflow { tau: t });
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };

            for s in 1..7 {
                stage.copy_from(&y);
                for (j, &a) in A[s][..s].iter().enumerate() {
                    if a != 0.0 {
                        stage.axpy(c64::new(step * a, 0.0), &k[j], c64::new(1.0, 0.0));
                    }
                }
                g.apply_into(&stage, &mut k[s]);
            }
            // stage now holds the fifth-order solution y + h Σ b_j k_j (FSAL)
            let mut err = Vector::zeros(n);
            for (j, &e) in E.iter().enumerate() {
                if e != 0.0 {
                    err.axpy(c64::new(step * e, 0.0), &k[j], c64::new(1.0, 0.0));
                }
            }
            let en = error_norm(&err, &y, &stage, tol);
            if !en.is_finite() {
                return Err(Error::Overflow { norm: y.norm() });
            }
            if en <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut stage);
                k.swap(0, 6);
                let factor = if en == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a clipped final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    h = step * factor;
                }
            } else {
                h = step * (SAFETY * en.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepUnderflow { tau: t });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{expm, sigma_x, Operator, I};

    #[test]
    fn zero_generator_keeps_the_state() {
        let g = Operator::zeros(3, 3);
        let v0 = Vector::from_vec(vec![
            c64::new(1.0, 2.0),
            c64::new(0.0, -1.0),
            c64::new(3.0, 0.0),
        ]);
        let out = integrate_ode(&g, &v0, &[0.0, 1.0, 10.0], 1e-10).unwrap();
        for v in out {
            assert_eq!(v, v0);
        }
    }

    #[test]
    fn scalar_decay() {
        let g = Operator::from_element(1, 1, c64::new(-1.0, 0.0));
        let v0 = Vector::from_element(1, c64::new(1.0, 0.0));
        let taus = [0.0, 0.5, 1.0, 3.0];
        let out = integrate_ode(&g, &v0, &taus, 1e-10).unwrap();
        for (t, v) in taus.iter().zip(out) {
            assert!((v[0].re - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn oscillation_matches_exponential() {
        let g = sigma_x() * I;
        let v0 = Vector::from_vec(vec![c64::new(1.0, 0.0), c64::new(0.0, 0.0)]);
        let out = integrate_ode(&g, &v0, &[2.0], 1e-12).unwrap();
        let exact = expm(&g, 2.0).unwrap() * &v0;
        assert!((&out[0] - exact).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = Operator::zeros(1, 1);
        let v0 = Vector::zeros(1);
        assert!(integrate_ode(&g, &v0, &[1.0], 0.0).is_err());
        assert!(integrate_ode(&g, &v0, &[1.0, 0.5], 1e-8).is_err());
        assert!(integrate_ode(&g, &Vector::zeros(2), &[1.0], 1e-8).is_err());
    }
}
