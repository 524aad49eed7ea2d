//! Dormand–Prince 5(4) with classic step-size control.
//!
//! Steps are clipped so that every requested output time is hit exactly;
//! no dense output is used.

use std::ops::ControlFlow;

use nalgebra::SVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size.
    pub max_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 100_000_000,
            max_step: f64::INFINITY,
        }
    }
}

impl Tolerances {
    /// Relative tolerance `tol`, absolute tolerance `tol / 100`.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-2,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepFailure {
    /// Step size fell below the floating-point resolution of `t`.
    Underflow { t: f64, h: f64 },
    /// The step budget ran out.
    Exhausted { t: f64, h: f64 },
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A21: f64 = 1.0 / 5.0;
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
// Fifth-order weights; also the last stage row (FSAL).
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Fifth minus fourth order weights.
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
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn error_norm<const N: usize>(
    err: &SVector<f64, N>,
    y0: &SVector<f64, N>,
    y1: &SVector<f64, N>,
    tol: &Tolerances,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrates `dy/dt = f(t, y)` from `(t0, y0)` through the increasing
/// `targets`, calling `observe(t, y)` at each. The observer may stop early
/// by returning `ControlFlow::Break`.
pub fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: SVector<f64, N>,
    targets: impl IntoIterator<Item = f64>,
    tol: &Tolerances,
    mut observe: O,
) -> Result<(), StepFailure>
where
    F: Fn(f64, &SVector<f64, N>) -> SVector<f64, N>,
    O: FnMut(f64, &SVector<f64, N>) -> ControlFlow<()>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = initial_step(&y, &k1, tol).min(tol.max_step);
    let mut steps = 0usize;

    for target in targets {
        while t < target {
            let remaining = target - t;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };

            if h_try <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                return Err(StepFailure::Underflow { t, h: h_try });
            }
            steps += 1;
            if steps > tol.max_steps {
                return Err(StepFailure::Exhausted { t, h: h_try });
            }

            let k2 = f(t + C[1] * h_try, &(y + k1 * (A21 * h_try)));
            let k3 = f(t + C[2] * h_try, &(y + (k1 * A3[0] + k2 * A3[1]) * h_try));
            let k4 = f(
                t + C[3] * h_try,
                &(y + (k1 * A4[0] + k2 * A4[1] + k3 * A4[2]) * h_try),
            );
            let k5 = f(
                t + C[4] * h_try,
                &(y + (k1 * A5[0] + k2 * A5[1] + k3 * A5[2] + k4 * A5[3]) * h_try),
            );
            let k6 = f(
                t + C[5] * h_try,
                &(y + (k1 * A6[0] + k2 * A6[1] + k3 * A6[2] + k4 * A6[3] + k5 * A6[4]) * h_try),
            );
            let y_new =
                y + (k1 * B[0] + k3 * B[2] + k4 * B[3] + k5 * B[4] + k6 * B[5]) * h_try;
            let t_new = if last { target } else { t + h_try };
            let k7 = f(t_new, &y_new);

            let err = (k1 * E[0] + k3 * E[2] + k4 * E[3] + k5 * E[4] + k6 * E[5] + k7 * E[6])
                * h_try;
            let en = error_norm(&err, &y, &y_new, tol);

            let fac = if en == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * en.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };

            if en <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                // A clipped final step says nothing about the natural step size.
                h = if last { h.max(h_try * fac) } else { h_try * fac };
                h = h.min(tol.max_step);
            } else {
                h = h_try * fac.min(1.0);
            }
        }
        if let ControlFlow::Break(()) = observe(t, &y) {
            return Ok(());
        }
    }
    Ok(())
}

fn initial_step<const N: usize>(y: &SVector<f64, N>, f0: &SVector<f64, N>, tol: &Tolerances) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f0[i] / sc).powi(2);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}
