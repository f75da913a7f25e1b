//! Adaptive Dormand–Prince 5(4) integration for small first-order systems,
//! plus bracketed bisection.

use crate::error::{LabError, Result};

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-10, atol: 1e-14, h_init: 1e-3, h_min: 1e-300, max_steps: 2_000_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y′ = f(t, y)` from `t0` to `t1` (either direction).
///
/// `abort` is checked after every accepted step; returning `Some(err)` stops
/// the integration with that error.
pub fn integrate<F, G>(f: F, t0: f64, y0: &[f64], t1: f64, ctl: StepControl, mut abort: G) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: FnMut(f64, &[f64]) -> Option<LabError>,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = ctl.h_init.abs().min((t1 - t0).abs()).max(f64::MIN_POSITIVE) * dir;
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut out = Trajectory { t: vec![t], y: vec![y.clone()] };
    let mut steps = 0;
    f(t, &y, &mut k[0]);
    while (t1 - t) * dir > 0.0 {
        if steps >= ctl.max_steps {
            return Err(LabError::StepFailure(format!("step budget exhausted at t={t}")));
        }
        steps += 1;
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            f(t + C[s] * h, &tmp, &mut tail[0]);
        }
        let mut err = 0.0f64;
        let mut y_new = vec![0.0; n];
        for i in 0..n {
            let mut y5 = y[i];
            let mut y4 = y[i];
            for s in 0..7 {
                y5 += h * B5[s] * k[s][i];
                y4 += h * B4[s] * k[s][i];
            }
            y_new[i] = y5;
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(y5.abs());
            err = err.max(((y5 - y4) / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            if h.abs() < ctl.h_min {
                return Err(LabError::StepFailure(format!("non-finite step at t={t}")));
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y_new;
            // FSAL: last stage is f at the new point
            k.swap(0, 6);
            out.t.push(t);
            out.y.push(y.clone());
            if let Some(e) = abort(t, &y) {
                return Err(e);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < ctl.h_min {
                return Err(LabError::StepFailure(format!("step size underflow at t={t}")));
            }
        }
    }
    Ok(out)
}

/// Bisection on a bracketing interval `[a, b]` down to width `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(LabError::Domain(format!("interval [{a}, {b}] does not bracket a root")));
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
