//! Adaptive quadrature rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Equal panels the adaptive refinement starts from.
pub const SEED_PANELS: usize = 32;

/// Panel budget for [`simpson`].
pub const MAX_PANELS: usize = 2_000_000;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    flm: f64,
    frm: f64,
    value: f64,
    err: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Panel {
        let m = 0.5 * (a + b);
        let flm = f(0.5 * (a + m));
        let frm = f(0.5 * (m + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let value = (b - a) / 12.0 * (fa + 4.0 * flm + 2.0 * fm + 4.0 * frm + fb);
        // panels this narrow only see rounding noise in the integrand
        let narrow = (b - a).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        let err = if narrow {
            0.0
        } else {
            (value - whole).abs() / 15.0
        };
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            flm,
            frm,
            value,
            err,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integral of `f` over `[a, b]` by globally adaptive composite Simpson.
///
/// The panel with the largest error estimate `|S_2 - S_1| / 15` is bisected
/// until the estimates sum to at most `tol`. The returned value is the plain
/// two-half Simpson sum, so the actual error tracks `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    simpson_seeded(f, a, b, tol, SEED_PANELS)
}

/// [`simpson`] starting from `seed` equal panels.
pub fn simpson_seeded<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    seed: usize,
) -> Result<f64> {
    let seed = seed.max(1);
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(
            "quadrature tolerance must be > 0".into(),
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let x = |i: usize| a + (b - a) * i as f64 / (2 * seed) as f64;
    let fx: Vec<f64> = (0..=2 * seed).map(|i| f(x(i))).collect();
    let mut heap: BinaryHeap<Panel> = (0..seed)
        .map(|k| {
            Panel::new(
                &f,
                x(2 * k),
                x(2 * k + 2),
                fx[2 * k],
                fx[2 * k + 1],
                fx[2 * k + 2],
            )
        })
        .collect();
    let mut err: f64 = heap.iter().map(|q| q.err).sum();
    let mut splits = 0usize;
    while err > tol {
        if !err.is_finite() {
            return Err(Error::Quadrature(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        let Some(p) = heap.pop() else { break };
        if p.err == 0.0 {
            heap.push(p);
            break;
        }
        splits += 1;
        if splits > MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "no convergence on [{a}, {b}] within {MAX_PANELS} panels (error estimate {err:e})"
            )));
        }
        let m = 0.5 * (p.a + p.b);
        let l = Panel::new(&f, p.a, m, p.fa, p.flm, p.fm);
        let r = Panel::new(&f, m, p.b, p.fm, p.frm, p.fb);
        err += l.err + r.err - p.err;
        heap.push(l);
        heap.push(r);
        if splits % 4096 == 0 {
            err = heap.iter().map(|q| q.err).sum();
        }
    }
    let total: f64 = heap.iter().map(|q| q.value).sum();
    if !total.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integral on [{a}, {b}]"
        )));
    }
    Ok(total)
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre rule on `[a, b]`; smooth in both endpoints.
pub fn gauss_legendre5<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL5_NODES
        .iter()
        .zip(&GL5_WEIGHTS)
        .map(|(x, w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}
