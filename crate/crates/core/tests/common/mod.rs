//! Reference computations for integration tests, written without the library's solver.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

pub fn rk4<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    f: &F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> [f64; N] {
    let add = |y: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *y;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, &add(y, &k1, h / 2.0));
    let k3 = f(t + h / 2.0, &add(y, &k2, h / 2.0));
    let k4 = f(t + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn arc(n: usize) -> impl Fn(f64, &[f64; 3]) -> [f64; 3] {
    let m = n as f64 - 1.0;
    move |_, y| [y[2].cos(), y[2].sin(), y[2].cos() - m * y[2].sin() / y[0]]
}

fn graph(n: usize) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let m = n as f64 - 1.0;
    move |r, y| [y[1], (1.0 + y[1] * y[1]) * (1.0 - m * y[1] / r)]
}

/// Arc-length step in the vertical phase.
pub const ARC_STEP: f64 = 2e-4;
/// Radial step in the graph phase.
pub const GRAPH_STEP: f64 = 1e-3;

/// Marches `(V, phi)` over `r` from `r0` to `r1`, landing exactly on `r1`.
pub fn march_graph(
    n: usize,
    r0: f64,
    y0: [f64; 2],
    r1: f64,
    h: f64,
    mut visit: impl FnMut(f64, &[f64; 2]),
) -> [f64; 2] {
    let f = graph(n);
    let steps = ((r1 - r0) / h).ceil().max(1.0) as usize;
    let h = (r1 - r0) / steps as f64;
    let mut y = y0;
    visit(r0, &y);
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        y = rk4(&f, r, &y, h);
        visit(r + h, &y);
    }
    y
}

/// Bowl height and slope at `r` from the series start `phi = r/n + r^3/(n^3 (n+2))`.
pub fn bowl(n: usize, r: f64) -> [f64; 2] {
    let nf = n as f64;
    let r0 = 1e-3;
    let (a, b) = (1.0 / nf, 1.0 / (nf.powi(3) * (nf + 2.0)));
    let y0 = [
        a * r0 * r0 / 2.0 + b * r0.powi(4) / 4.0,
        a * r0 + b * r0.powi(3),
    ];
    march_graph(n, r0, y0, r, GRAPH_STEP, |_, _| {})
}

/// One wing branch started at `(R, 0)` with `alpha = sign * pi/2`,
/// followed in arc length until `r >= R + 1`. Returns `(r, V, alpha)` at every step.
pub fn vertical_phase(n: usize, aperture: f64, sign: f64) -> Vec<[f64; 3]> {
    let f = arc(n);
    let mut y = [aperture, 0.0, sign * FRAC_PI_2];
    let mut out = vec![y];
    while y[0] < aperture + 1.0 {
        y = rk4(&f, 0.0, &y, ARC_STEP);
        out.push(y);
    }
    out
}

/// Radius and depth where the lower branch turns horizontal.
pub fn turning(n: usize, aperture: f64) -> (f64, f64) {
    let f = arc(n);
    let mut y = [aperture, 0.0, -FRAC_PI_2];
    loop {
        let next = rk4(&f, 0.0, &y, ARC_STEP);
        if next[2] >= 0.0 {
            let h = bisect(|h| rk4(&f, 0.0, &y, h)[2], 0.0, ARC_STEP, 1e-16);
            let z = rk4(&f, 0.0, &y, h);
            return (z[0], -z[1]);
        }
        y = next;
    }
}

/// Height on a wing branch (`sign = -1` lower, `+1` upper) at radius `r >= R + 1`.
pub fn wing_height(n: usize, aperture: f64, sign: f64, r: f64) -> [f64; 2] {
    let last = *vertical_phase(n, aperture, sign).last().unwrap();
    march_graph(
        n,
        last[0],
        [last[1], last[2].tan()],
        r,
        GRAPH_STEP,
        |_, _| {},
    )
}

/// `V` and `phi` of a wing branch on a uniform radial grid from the end of the vertical phase.
pub fn wing_graph(n: usize, aperture: f64, sign: f64, r_max: f64) -> Vec<(f64, f64, f64)> {
    let last = *vertical_phase(n, aperture, sign).last().unwrap();
    let mut out = Vec::new();
    march_graph(
        n,
        last[0],
        [last[1], last[2].tan()],
        r_max,
        GRAPH_STEP,
        |r, y| out.push((r, y[0], y[1])),
    );
    out
}

pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) <= 0.0, "no sign change on [{a}, {b}]");
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if (f(mid) > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Minimiser of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Ordinary least squares `y = a + b x`.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Direct transcription of the lower funnel wall.
pub fn lower_wall(n: usize, r0: f64, lambda: f64, r: f64) -> f64 {
    let m = n as f64 - 1.0;
    let t = r - r0 - 2.0;
    t * t / (2.0 * m)
        - lambda * (1.0 + t * t).ln() / 2.0
        - (std::f64::consts::PI * (r0 + FRAC_PI_2) + 4.0) / (2.0 * m)
}

pub fn upper_wall(n: usize, r: f64) -> f64 {
    r * r / (2.0 * (n as f64 - 1.0)) + 1.0
}

/// Heights of a wing branch at increasing radii `rs`, all beyond `R + 1`.
pub fn wing_heights_at(n: usize, aperture: f64, sign: f64, rs: &[f64]) -> Vec<f64> {
    let last = *vertical_phase(n, aperture, sign).last().unwrap();
    let (mut r, mut y) = (last[0], [last[1], last[2].tan()]);
    rs.iter()
        .map(|&target| {
            y = march_graph(n, r, y, target, GRAPH_STEP, |_, _| {});
            r = target;
            y[0]
        })
        .collect()
}

/// Log-uniform abscissae with exact endpoints.
pub fn log_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == count => hi,
            _ => (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// `C + K/r` fit of `V - r^2/(2(n-1)) + ln r` over 200 log-uniform radii.
pub fn constant_fit(n: usize, rs: &[f64], vs: &[f64]) -> (f64, f64) {
    let m = n as f64 - 1.0;
    let xs: Vec<f64> = rs.iter().map(|r| 1.0 / r).collect();
    let ys: Vec<f64> = rs
        .iter()
        .zip(vs)
        .map(|(r, v)| v - r * r / (2.0 * m) + r.ln())
        .collect();
    line_fit(&xs, &ys)
}

/// Bowl states `(r, V, alpha)` at increasing arc lengths, by arc-length RK4 with
/// steps of at most `h` from a series start at `r = 1e-3`.
pub fn bowl_arc(n: usize, targets: &[f64], h: f64) -> Vec<[f64; 3]> {
    let f = arc(n);
    let nf = n as f64;
    let r0 = 1e-3;
    let (a, b) = (1.0 / nf, 1.0 / (nf.powi(3) * (nf + 2.0)));
    let phi0 = a * r0 + b * r0.powi(3);
    let mut s = r0 + a * a * r0.powi(3) / 6.0;
    let mut y = [r0, a * r0 * r0 / 2.0 + b * r0.powi(4) / 4.0, phi0.atan()];
    targets
        .iter()
        .map(|&t| {
            let steps = ((t - s) / h).ceil().max(1.0) as usize;
            let dh = (t - s) / steps as f64;
            for _ in 0..steps {
                y = rk4(&f, 0.0, &y, dh);
            }
            s = t;
            y
        })
        .collect()
}
