//! Embedded Dormand-Prince 5(4) integrator for small complex linear systems.

use nalgebra::{allocator::Allocator, DefaultAllocator, Dim, OMatrix};

use crate::error::{Error, Result};
use crate::model3::C64;

const MAX_STEPS: usize = 10_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Vector-space operations the integrator needs from a state.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn scaled(&self, a: f64) -> Self;
    /// Magnitudes of the components, in a fixed order.
    fn component_norms(&self) -> Vec<f64>;
    fn all_finite(&self) -> bool;
}

impl<R: Dim, C: Dim> OdeState for OMatrix<C64, R, C>
where
    DefaultAllocator: Allocator<R, C>,
{
    fn axpy(&mut self, a: f64, x: &Self) {
        self.zip_apply(x, |s, xi| *s += xi * a);
    }

    fn scaled(&self, a: f64) -> Self {
        self * C64::new(a, 0.0)
    }

    fn component_norms(&self) -> Vec<f64> {
        self.iter().map(|c| c.norm()).collect()
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn error_norm<S: OdeState>(err: &S, y0: &S, y1: &S, tol: f64) -> f64 {
    let e = err.component_norms();
    let a = y0.component_norms();
    let b = y1.component_norms();
    let n = e.len() as f64;
    let sum: f64 = e
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(ei, (ai, bi))| {
            let sc = tol + tol * ai.max(*bi);
            (ei / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn combine<S: OdeState>(y: &S, h: f64, terms: &[(f64, &S)]) -> S {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.axpy(h * c, k);
        }
    }
    out
}

/// Per-step error target relative to the requested tolerance; local errors add
/// up over a protocol, so each step is held to a fraction of `tol`.
pub const LOCAL_TOL_FACTOR: f64 = 0.1;

/// Integrate `dy/dt = f(t, y)` from `times[0]` and return the state at every entry
/// of `times`, which must be strictly increasing. The step never crosses an
/// output time, so results do not depend on interpolation.
pub fn dopri5<S, F>(f: F, y0: S, times: &[f64], tol: f64) -> Result<Vec<S>>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let tol = tol * LOCAL_TOL_FACTOR;
    let mut out = Vec::with_capacity(times.len());
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    out.push(y0.clone());
    if times.len() == 1 {
        return Ok(out);
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, times[times.len() - 1] - t0, tol);
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepUnderflow { t, h });
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step < 1e-13 * t.abs().max(1.0) && !clipped {
                return Err(Error::StepUnderflow { t, h: step });
            }

            let k2 = f(t + step / 5.0, &combine(&y, step, &[(1.0 / 5.0, &k1)]));
            let k3 = f(t + 3.0 * step / 10.0, &combine(&y, step, &[(3.0 / 40.0, &k1), (9.0 / 40.0, &k2)]));
            let k4 = f(
                t + 4.0 * step / 5.0,
                &combine(&y, step, &[(44.0 / 45.0, &k1), (-56.0 / 15.0, &k2), (32.0 / 9.0, &k3)]),
            );
            let k5 = f(
                t + 8.0 * step / 9.0,
                &combine(
                    &y,
                    step,
                    &[
                        (19372.0 / 6561.0, &k1),
                        (-25360.0 / 2187.0, &k2),
                        (64448.0 / 6561.0, &k3),
                        (-212.0 / 729.0, &k4),
                    ],
                ),
            );
            let k6 = f(
                t + step,
                &combine(
                    &y,
                    step,
                    &[
                        (9017.0 / 3168.0, &k1),
                        (-355.0 / 33.0, &k2),
                        (46732.0 / 5247.0, &k3),
                        (49.0 / 176.0, &k4),
                        (-5103.0 / 18656.0, &k5),
                    ],
                ),
            );
            let y_new = combine(
                &y,
                step,
                &[
                    (35.0 / 384.0, &k1),
                    (500.0 / 1113.0, &k3),
                    (125.0 / 192.0, &k4),
                    (-2187.0 / 6784.0, &k5),
                    (11.0 / 84.0, &k6),
                ],
            );
            let t_new = if clipped { target } else { t + step };
            let k7 = f(t_new, &y_new);

            let mut err = k1.scaled(step * 71.0 / 57600.0);
            for (c, k) in [
                (-71.0 / 16695.0, &k3),
                (71.0 / 1920.0, &k4),
                (-17253.0 / 339200.0, &k5),
                (22.0 / 525.0, &k6),
                (-1.0 / 40.0, &k7),
            ] {
                err.axpy(step * c, k);
            }
            let e = error_norm(&err, &y, &y_new, tol);
            if !e.is_finite() {
                return Err(Error::NonFinite { t });
            }

            let fac = if e == 0.0 { FAC_MAX } else { (SAFETY * e.powf(-0.2)).clamp(FAC_MIN, FAC_MAX) };
            if e <= 1.0 {
                if !y_new.all_finite() {
                    return Err(Error::NonFinite { t: t_new });
                }
                t = t_new;
                y = y_new;
                k1 = k7;
                // a step shortened to hit an output time says nothing about h
                let grown = step * fac;
                h = if clipped { h.max(grown) } else { grown };
            } else {
                h = step * fac.min(1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn initial_step<S: OdeState>(y: &S, dy: &S, span: f64, tol: f64) -> f64 {
    let ny = y.component_norms().iter().map(|v| v * v).sum::<f64>().sqrt();
    let nd = dy.component_norms().iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = if nd > 1e-12 && ny > 1e-12 { 0.01 * ny / nd } else { 1e-3 * span };
    // fifth-order method: shrink the first guess for tight tolerances
    (h * (tol / 1e-6).powf(0.2)).min(span).max(1e-10 * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector2;

    #[test]
    fn exponential_decay() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let y0 = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let out = dopri5(|_, y: &Vector2<C64>| y * C64::new(-0.7, 0.0), y0, &times, 1e-10).unwrap();
        for (t, y) in times.iter().zip(&out) {
            let exact = (-0.7 * t).exp();
            assert!((y[0].re - exact).abs() < 1e-9);
            assert!((y[1].im - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_preserves_norm() {
        let times = [0.0, 50.0];
        let y0 = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let out = dopri5(
            |_, y: &Vector2<C64>| Vector2::new(-C64::i() * y[1] * 3.0, -C64::i() * y[0] * 3.0),
            y0,
            &times,
            1e-10,
        )
        .unwrap();
        let n = out[1].norm();
        assert!((n - 1.0).abs() < 1e-8, "norm {n}");
        assert!((out[1][0].re - (150.0f64).cos()).abs() < 1e-7);
    }

    #[test]
    fn single_time_returns_initial() {
        let y0 = Vector2::new(C64::new(2.0, 0.0), C64::new(0.0, 0.0));
        let out = dopri5(|_, y: &Vector2<C64>| *y, y0, &[1.0], 1e-8).unwrap();
        assert_eq!(out, vec![y0]);
    }

    #[test]
    fn blow_up_is_reported() {
        let y0 = Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let err = dopri5(|_, y: &Vector2<C64>| y.map(|c| c * c * c.norm() * 1e3), y0, &[0.0, 10.0], 1e-8)
            .unwrap_err();
        assert!(matches!(err, Error::StepUnderflow { .. } | Error::NonFinite { .. }), "{err:?}");
    }
}
