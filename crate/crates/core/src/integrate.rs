//! Adaptive Dormand–Prince 5(4) integration of linear complex ODE systems.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: 1e-8,
            absolute: 1e-12,
        }
    }
}

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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 10_000_000;

/// Integrates `dy/dt = f(t, y)` from `t0` and returns the state at each of `times`
/// (which must be non-decreasing and not before `t0`).
pub fn dopri5<F>(
    mut f: F,
    t0: f64,
    y0: &DVector<Complex64>,
    times: &[f64],
    tol: Tolerance,
) -> Result<Vec<DVector<Complex64>>>
where
    F: FnMut(f64, &DVector<Complex64>, &mut DVector<Complex64>),
{
    let n = y0.len();
    let mut out = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0.clone();
    let mut k: Vec<DVector<Complex64>> = (0..7).map(|_| DVector::zeros(n)).collect();
    let mut stage = DVector::zeros(n);
    let mut y_new = DVector::zeros(n);

    let initial = {
        let mut dy = DVector::zeros(n);
        f(t, &y, &mut dy);
        let scale = dy.camax().max(1e-300);
        (0.01 * (y.camax().max(1.0)) / scale).min(1.0)
    };
    let mut h = initial;
    let mut steps = 0usize;

    for &target in times {
        if target < t {
            return Err(Error::Integrator {
                time: t,
                reason: format!("output time {target} precedes current time"),
            });
        }
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Integrator {
                    time: t,
                    reason: format!("exceeded {MAX_STEPS} steps"),
                });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };

            f(t, &y, &mut k[0]);
            combine(&mut stage, &y, step, &[(A21, &k[0])]);
            f(t + C2 * step, &stage, &mut k[1]);
            combine(&mut stage, &y, step, &[(A31, &k[0]), (A32, &k[1])]);
            f(t + C3 * step, &stage, &mut k[2]);
            combine(&mut stage, &y, step, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])]);
            f(t + C4 * step, &stage, &mut k[3]);
            combine(
                &mut stage,
                &y,
                step,
                &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])],
            );
            f(t + C5 * step, &stage, &mut k[4]);
            combine(
                &mut stage,
                &y,
                step,
                &[(A61, &k[0]), (A62, &k[1]), (A63, &k[2]), (A64, &k[3]), (A65, &k[4])],
            );
            f(t + step, &stage, &mut k[5]);
            combine(
                &mut y_new,
                &y,
                step,
                &[(B1, &k[0]), (B3, &k[2]), (B4, &k[3]), (B5, &k[4]), (B6, &k[5])],
            );
            f(t + step, &y_new, &mut k[6]);

            let mut err: f64 = 0.0;
            for i in 0..n {
                let e = step
                    * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                        + E7 * k[6][i]);
                let scale = tol.absolute + tol.relative * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::Integrator {
                    time: t,
                    reason: "non-finite error estimate".into(),
                });
            }

            if err <= 1.0 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut y_new);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 && last {
                // keep the free step size; the shortened final step says nothing about it
                h = h.max(step * factor);
            } else {
                h = step * factor;
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integrator {
                    time: t,
                    reason: format!("step size underflow (h = {h:e}, error ratio {err:e})"),
                });
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn combine(
    dst: &mut DVector<Complex64>,
    y: &DVector<Complex64>,
    h: f64,
    terms: &[(f64, &DVector<Complex64>)],
) {
    dst.copy_from(y);
    for (a, k) in terms {
        dst.axpy(Complex64::from(h * a), k, Complex64::from(1.0));
    }
}
