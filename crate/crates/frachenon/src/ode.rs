//! Small adaptive Runge-Kutta integrator (Dormand-Prince 5(4)) for the
//! two-dimensional linear systems used by the special-function cross-checks.

use crate::error::{Error, Result};

const MAX_STEPS: usize = 200_000;

// Dormand-Prince coefficients.
const A: [[f64; 6]; 6] = [
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &[f64; 2], h: f64, coeffs: &[f64], k: &[[f64; 2]]) -> [f64; 2] {
    let mut out = *y;
    for (c, kv) in coeffs.iter().zip(k.iter()) {
        out[0] += h * c * kv[0];
        out[1] += h * c * kv[1];
    }
    out
}

struct Step {
    t: f64,
    h: f64,
    y: [f64; 2],
    dy: [f64; 2],
    y_next: [f64; 2],
    dy_next: [f64; 2],
}

/// Adaptive integration, returning only the terminal state.
pub fn integrate_rk45<F>(f: F, t0: f64, y0: [f64; 2], t_end: f64, abs_tol: f64, rel_tol: f64) -> Result<[f64; 2]>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    Ok(drive(f, t0, y0, t_end, abs_tol, rel_tol, None)?)
}

/// Adaptive integration with stored steps for later dense evaluation.
pub fn solve_rk45_dense<F>(
    f: F,
    t0: f64,
    y0: [f64; 2],
    t_end: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<DenseSolution>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let mut steps = Vec::new();
    let y_end = drive(f, t0, y0, t_end, abs_tol, rel_tol, Some(&mut steps))?;
    Ok(DenseSolution { steps, t_end, y_end })
}

fn drive<F>(
    f: F,
    t0: f64,
    y0: [f64; 2],
    t_end: f64,
    abs_tol: f64,
    rel_tol: f64,
    mut record: Option<&mut Vec<Step>>,
) -> Result<[f64; 2]>
where
    F: Fn(f64, &[f64; 2]) -> [f64; 2],
{
    let mut t = t0;
    let mut y = y0;
    let mut h = ((t_end - t0) * 1e-4).max(1e-10);
    let mut k = [[0.0_f64; 2]; 7];
    k[0] = f(t, &y);
    for _ in 0..MAX_STEPS {
        if t >= t_end {
            return Ok(y);
        }
        h = h.min(t_end - t);
        for i in 0..6 {
            let yi = axpy(&y, h, &A[i][..=i], &k[..=i]);
            k[i + 1] = f(t + h * [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][i], &yi);
        }
        let y5 = axpy(&y, h, &B5, &k);
        let y4 = axpy(&y, h, &B4, &k);
        let mut err: f64 = 0.0;
        for j in 0..2 {
            let scale = abs_tol + rel_tol * y[j].abs().max(y5[j].abs());
            err = err.max(((y5[j] - y4[j]) / scale).abs());
        }
        if err <= 1.0 {
            let dy_next = f(t + h, &y5);
            if let Some(rec) = record.as_deref_mut() {
                rec.push(Step {
                    t,
                    h,
                    y,
                    dy: k[0],
                    y_next: y5,
                    dy_next,
                });
            }
            t += h;
            y = y5;
            k[0] = dy_next;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Convergence("RK45 step size underflow".into()));
        }
    }
    Err(Error::Convergence("RK45 exceeded the step budget".into()))
}

/// Piecewise cubic Hermite reconstruction of an adaptive RK45 trajectory.
pub struct DenseSolution {
    steps: Vec<Step>,
    t_end: f64,
    y_end: [f64; 2],
}

impl DenseSolution {
    /// Evaluate (y, y') at a point inside the integration range.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t >= self.t_end || self.steps.is_empty() {
            return (self.y_end[0], self.y_end[1]);
        }
        let idx = self
            .steps
            .partition_point(|s| s.t + s.h < t)
            .min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let u = ((t - s.t) / s.h).clamp(0.0, 1.0);
        // Cubic Hermite in y; its derivative reproduces y' consistently.
        let (h00, h10, h01, h11) = (
            2.0 * u * u * u - 3.0 * u * u + 1.0,
            u * u * u - 2.0 * u * u + u,
            -2.0 * u * u * u + 3.0 * u * u,
            u * u * u - u * u,
        );
        let val = h00 * s.y[0] + h10 * s.h * s.dy[0] + h01 * s.y_next[0] + h11 * s.h * s.dy_next[0];
        let (d00, d10, d01, d11) = (
            (6.0 * u * u - 6.0 * u) / s.h,
            3.0 * u * u - 4.0 * u + 1.0,
            (-6.0 * u * u + 6.0 * u) / s.h,
            3.0 * u * u - 2.0 * u,
        );
        let deriv =
            d00 * s.y[0] + d10 * s.dy[0] + d01 * s.y_next[0] + d11 * s.dy_next[0];
        (val, deriv)
    }
}
