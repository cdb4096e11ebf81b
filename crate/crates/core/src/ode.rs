//! Dormand–Prince 5(4) embedded Runge–Kutta pair for small autonomous systems.
//!
//! The propagated solution is the fifth-order one (local extrapolation); the
//! embedded fourth-order solution only feeds the error estimate. The last stage
//! is evaluated at the new point, so accepted steps reuse it as the next first
//! stage.

use crate::error::Result;

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

// b - b*, fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Order of the propagated solution.
pub const ORDER: u32 = 5;

/// Result of one trial step.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub y: [f64; N],
    /// Derivative at the new point.
    pub dy: [f64; N],
    /// Difference between the fifth- and fourth-order solutions.
    pub err: [f64; N],
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h` from `y` with known derivative `k1`.
pub fn dopri_step<const N: usize, F>(f: &F, y: &[f64; N], k1: &[f64; N], h: f64) -> Result<Step<N>>
where
    F: Fn(&[f64; N]) -> Result<[f64; N]>,
{
    let k2 = f(&axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(&axpy(
        y,
        h,
        &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)],
    ))?;
    let k6 = f(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ))?;
    let y_new = axpy(
        y,
        h,
        &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
    );
    let k7 = f(&y_new)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok(Step {
        y: y_new,
        dy: k7,
        err,
    })
}

/// Weighted RMS norm of a local error estimate.
pub fn error_norm<const N: usize>(
    err: &[f64; N],
    y0: &[f64; N],
    y1: &[f64; N],
    tol_abs: f64,
    tol_rel: f64,
) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = tol_abs + tol_rel * y0[i].abs().max(y1[i].abs());
        let q = err[i] / sc;
        acc += q * q;
    }
    (acc / N as f64).sqrt()
}

/// Step-size factor after a trial step with normalized error `err`.
pub fn step_factor(err: f64, after_reject: bool) -> f64 {
    let fac = if err == 0.0 {
        5.0
    } else {
        0.9 * err.powf(-1.0 / ORDER as f64)
    };
    let hi = if after_reject { 1.0 } else { 5.0 };
    fac.clamp(0.2, hi)
}

/// Cubic Hermite interpolation on `[0, h]` at `theta * h`.
pub fn hermite<const N: usize>(
    y0: &[f64; N],
    d0: &[f64; N],
    y1: &[f64; N],
    d1: &[f64; N],
    h: f64,
    theta: f64,
) -> [f64; N] {
    let t = theta;
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h * h10 * d0[i] + h01 * y1[i] + h * h11 * d1[i];
    }
    out
}
