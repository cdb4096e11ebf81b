//! Additive constants of the ends `V(r) = r^2 / (2(n-1)) - ln r + C + O(1/r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile_ode::{graph_view, GraphProfile, WingSolution};

/// Abscissae per fit, uniform in `log r`.
pub const FIT_POINTS: usize = 200;

/// Smallest accepted ratio `window.1 / window.0`.
pub const MIN_WINDOW_RATIO: f64 = 2.0;

/// RMS fit residual above which the `C + K/r` model is rejected.
pub const MISMATCH_RMS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub slope: f64,
    pub window: (f64, f64),
    pub rms_residual: f64,
}

/// Smallest admissible window start for an end based at `r_star`.
pub fn min_window_start(r_star: f64) -> f64 {
    10.0 * (r_star + 1.0)
}

pub fn c_est(n: usize, r: f64, v: f64) -> f64 {
    v - r * r / (2.0 * (n as f64 - 1.0)) + r.ln()
}

fn log_grid(window: (f64, f64), points: usize) -> Vec<f64> {
    let (a, b) = (window.0.ln(), window.1.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                window.0
            } else if i + 1 == points {
                window.1
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

fn check_window(g: &GraphProfile, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad window [{lo}, {hi}]")));
    }
    if lo < g.r_min() || hi > g.r_max() {
        return Err(Error::Range(format!(
            "window [{lo}, {hi}] outside profile extent [{}, {}]",
            g.r_min(),
            g.r_max()
        )));
    }
    if hi < MIN_WINDOW_RATIO * lo {
        return Err(Error::Fit(format!(
            "window [{lo}, {hi}] spans a factor below {MIN_WINDOW_RATIO}"
        )));
    }
    Ok(())
}

/// `(r, C_est(r))` on the fit abscissae.
pub fn c_est_series(g: &GraphProfile, window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    check_window(g, window)?;
    log_grid(window, FIT_POINTS)
        .into_iter()
        .map(|r| Ok((r, c_est(g.n, r, g.v_at(r)?))))
        .collect()
}

pub fn estimate_constant(g: &GraphProfile, window: (f64, f64)) -> Result<AsymptoticFit> {
    estimate_constant_as(g, window, g.n)
}

/// Fits with the quadratic term of dimension `n_model`, which may differ from the profile's.
pub fn estimate_constant_as(
    g: &GraphProfile,
    window: (f64, f64),
    n_model: usize,
) -> Result<AsymptoticFit> {
    if n_model < 2 {
        return Err(Error::InvalidParameter(format!(
            "n must be >= 2, got {n_model}"
        )));
    }
    check_window(g, window)?;
    let rs = log_grid(window, FIT_POINTS);
    let ys: Vec<f64> = rs
        .iter()
        .map(|&r| Ok(c_est(n_model, r, g.v_at(r)?)))
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rs.iter().map(|r| 1.0 / r).collect();
    let (c, k) = ols(&xs, &ys)?;
    let len = xs.len() as f64;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - c - k * x).powi(2))
        .sum::<f64>()
        / len)
        .sqrt();
    if !(rms <= MISMATCH_RMS * c.abs().max(1.0)) {
        return Err(Error::ModelMismatch(format!(
            "C_est is not of the form C + K/r on [{}, {}] (rms residual {rms:e}); wrong dimension?",
            window.0, window.1
        )));
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = rs
        .iter()
        .zip(&ys)
        .filter(|(_, y)| (*y - c).abs() > 0.0)
        .map(|(r, y)| (r.ln(), (y - c).abs().ln()))
        .unzip();
    if lx.len() < 2 {
        return Err(Error::Fit(
            "remainder vanishes identically; no decay exponent".into(),
        ));
    }
    let (_, slope) = ols(&lx, &ly)?;
    if !slope.is_finite() {
        return Err(Error::Fit("non-finite decay exponent".into()));
    }
    Ok(AsymptoticFit {
        c,
        k,
        slope,
        window,
        rms_residual: rms,
    })
}

// Least squares line y = a + b x.
fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("degenerate regressor".into()));
    }
    let b = sxy / sxx;
    Ok((my - b * mx, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndSeparation {
    #[serde(rename = "C_plus")]
    pub c_plus: AsymptoticFit,
    #[serde(rename = "C_minus")]
    pub c_minus: AsymptoticFit,
    pub delta: f64,
}

/// Constants of both ends of a wing, normalised by `V(R) = 0`.
pub fn end_separation(w: &WingSolution, window: (f64, f64)) -> Result<EndSeparation> {
    if window.0 < min_window_start(w.r_star) {
        return Err(Error::Fit(format!(
            "window starts at {} < 10 (R* + 1) = {}",
            window.0,
            min_window_start(w.r_star)
        )));
    }
    let fit = |curve| -> Result<AsymptoticFit> {
        estimate_constant(&graph_view(curve, 0.5 * window.0)?, window)
    };
    let (plus, minus) = rayon::join(|| fit(&w.upper), || fit(&w.lower));
    let (c_plus, c_minus) = (plus?, minus?);
    Ok(EndSeparation {
        delta: c_plus.c - c_minus.c,
        c_plus,
        c_minus,
    })
}
