//! Generating curves of rotationally symmetric translators.
//!
//! A meridian `(r(s), V(s))` parametrized by arc length with tangent angle
//! `alpha` translates in the `e_{n+1}` direction exactly when
//!
//! ```text
//! r' = cos(alpha),  V' = sin(alpha),  alpha' = cos(alpha) - (n - 1) sin(alpha) / r.
//! ```
//!
//! This single system replaces the graph equation for `phi = V'(r) = tan(alpha)`,
//! the equation for `r(V)` on the upper branch and its reflected variant, and it
//! passes through the vertical tangent at the waist of a wing without a chart
//! change. The system is invariant under reversal of orientation
//! (`s -> -s`, `alpha -> alpha + pi`), so the upper branch traversed backwards
//! continues smoothly into the lower branch.

use std::f64::consts::FRAC_PI_2;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::{ode, quad};

/// Integration settings shared by every profile solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    /// First trial step in arc length (the constant step when `fixed_step` is set).
    pub step_init: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    /// Integration stops after the first accepted step with `r >= r_max`.
    pub r_max: f64,
    pub max_steps: usize,
    /// Radius at which the bowl hands over from its power series to the integrator
    /// (at most 0.5).
    pub axis_eps: f64,
    /// Upper bound on the arc-length step.
    pub max_step: f64,
    /// Step bound in units of the bending length `1 / (|cos α| + (n - 1) / max(r, 0.1))`;
    /// keeps sample spacing fine enough for finite-difference audits.
    pub max_step_per_bend: f64,
    /// Optional arc-length cutoff; the last step is clipped to land on it.
    pub s_max: Option<f64>,
    /// Disable error control and march with `step_init`.
    pub fixed_step: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_init: 1e-3,
            tol_abs: 1e-10,
            tol_rel: 1e-10,
            r_max: 100.0,
            max_steps: 5_000_000,
            axis_eps: 0.2,
            max_step: f64::INFINITY,
            max_step_per_bend: 0.01,
            s_max: None,
            fixed_step: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol_abs = tol;
        self.tol_rel = tol;
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.step_init) {
            return Err(Error::InvalidParameter("step_init must be > 0".into()));
        }
        if !positive(self.tol_abs) || !positive(self.tol_rel) {
            return Err(Error::InvalidParameter("tolerances must be > 0".into()));
        }
        if !(self.r_max > 0.0) {
            return Err(Error::InvalidParameter("r_max must be > 0".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be > 0".into()));
        }
        if !positive(self.axis_eps) || self.axis_eps > 0.5 {
            return Err(Error::InvalidParameter(
                "axis_eps must lie in (0, 0.5]".into(),
            ));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParameter("max_step must be > 0".into()));
        }
        if !(self.max_step_per_bend > 0.0) {
            return Err(Error::InvalidParameter(
                "max_step_per_bend must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// One accepted point of a generating curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub s: f64,
    pub r: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub alpha: f64,
}

impl Sample {
    fn state(&self) -> [f64; 3] {
        [self.r, self.v, self.alpha]
    }
}

/// Arc-length sampled generating curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub n: usize,
    pub samples: Vec<Sample>,
}

impl ProfileCurve {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest radius reached.
    pub fn r_extent(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| p.r)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn polyline(&self) -> Vec<(f64, f64)> {
        self.samples.iter().map(|p| (p.r, p.v)).collect()
    }

    /// Cubic Hermite dense output at arc length `s`.
    pub fn state_at(&self, s: f64) -> Result<Sample> {
        let pts = &self.samples;
        let (first, last) = match (pts.first(), pts.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Range("empty curve".into())),
        };
        if s < first.s || s > last.s {
            return Err(Error::Range(format!(
                "s = {s} outside [{}, {}]",
                first.s, last.s
            )));
        }
        let j = pts.partition_point(|p| p.s <= s).clamp(1, pts.len() - 1);
        let (a, b) = (&pts[j - 1], &pts[j]);
        let h = b.s - a.s;
        let da = rhs_or_axis(self.n, &a.state());
        let db = rhs_or_axis(self.n, &b.state());
        let y = ode::hermite(&a.state(), &da, &b.state(), &db, h, (s - a.s) / h);
        Ok(Sample {
            s,
            r: y[0],
            v: y[1],
            alpha: y[2],
        })
    }

    /// Writes `s,r,V,alpha` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "s,r,V,alpha")?;
        for p in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                p.s, p.r, p.v, p.alpha
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(n: usize, input: R) -> Result<ProfileCurve> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        let expected = ["s", "r", "V", "alpha"];
        if headers.iter().map(str::trim).ne(expected.iter().copied()) {
            return Err(Error::Parse(format!(
                "expected header s,r,V,alpha, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|t| t.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("row {}: bad field {k}", line + 2)))
            };
            samples.push(Sample {
                s: field(0)?,
                r: field(1)?,
                v: field(2)?,
                alpha: field(3)?,
            });
        }
        Ok(ProfileCurve { n, samples })
    }
}

/// A two-ended winglike translator with vertical tangent at `(aperture, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WingSolution {
    pub n: usize,
    pub aperture: f64,
    /// Radius where the lower branch has horizontal tangent.
    pub r_star: f64,
    /// `-V(r_star)`.
    pub depth: f64,
    /// Starts at `(aperture, 0)` heading down (`alpha = -pi/2`); contains the turning sample.
    pub lower: ProfileCurve,
    /// Starts at `(aperture, 0)` heading up (`alpha = pi/2`).
    pub upper: ProfileCurve,
}

impl WingSolution {
    /// Index of the turning sample on the lower branch.
    pub fn turning_index(&self) -> usize {
        self.lower
            .samples
            .iter()
            .position(|p| p.r == self.r_star)
            .expect("lower branch holds its turning sample")
    }

    /// Whole meridian as one curve: upper branch reversed, then the lower branch.
    pub fn meridian(&self) -> ProfileCurve {
        let mut samples: Vec<Sample> = self
            .upper
            .samples
            .iter()
            .rev()
            .map(|p| Sample {
                s: -p.s,
                r: p.r,
                v: p.v,
                alpha: p.alpha - std::f64::consts::PI,
            })
            .collect();
        samples.pop();
        samples.extend(self.lower.samples.iter().copied());
        ProfileCurve { n: self.n, samples }
    }
}

/// Arc-length right-hand side for the state `(r, V, alpha)`.
pub fn translator_rhs(n: usize, state: &[f64; 3]) -> Result<[f64; 3]> {
    let [r, _v, alpha] = *state;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r = {r} is on or across the axis")));
    }
    let (sin, cos) = alpha.sin_cos();
    Ok([cos, sin, cos - (n as f64 - 1.0) * sin / r])
}

// At the axis the curvature term has the removable limit (n-1)/n * cos(alpha) for alpha -> 0.
fn rhs_or_axis(n: usize, state: &[f64; 3]) -> [f64; 3] {
    translator_rhs(n, state).unwrap_or([1.0, 0.0, 1.0 / n as f64])
}

/// `d phi / d r` of the graph equation.
pub fn graph_slope_rhs(n: usize, r: f64, phi: f64) -> f64 {
    if r == 0.0 {
        return 1.0 / n as f64;
    }
    (1.0 + phi * phi) * (1.0 - (n as f64 - 1.0) * phi / r)
}

struct Run {
    samples: Vec<Sample>,
    turning: Option<usize>,
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension n = {n} must be >= 2"
        )));
    }
    Ok(())
}

fn integrate(
    n: usize,
    s0: f64,
    y0: [f64; 3],
    cfg: &SolverConfig,
    watch_turning: bool,
) -> Result<Run> {
    let f = |y: &[f64; 3]| translator_rhs(n, y);
    let mut s = s0;
    let mut y = y0;
    let mut k = f(&y)?;
    let mut samples = vec![Sample {
        s,
        r: y[0],
        v: y[1],
        alpha: y[2],
    }];
    let mut turning = None;
    let nm1 = n as f64 - 1.0;
    let cap = |y: &[f64; 3]| {
        let bend = y[2].cos().abs() + nm1 / y[0].max(0.1);
        cfg.max_step.min(cfg.max_step_per_bend / bend)
    };
    let mut h = if cfg.fixed_step {
        cfg.step_init
    } else {
        cfg.step_init.min(cap(&y0))
    };
    let mut rejected = false;
    let mut steps = 0usize;

    let fail = |reason: String, s: f64, y: &[f64; 3]| Error::Integration {
        reason,
        last: [s, y[0], y[1], y[2]],
    };

    while y[0] < cfg.r_max {
        if let Some(s_max) = cfg.s_max {
            let left = s_max - s;
            if left <= 1e-14 * s_max.abs().max(1.0) {
                break;
            }
            h = h.min(left);
        }
        steps += 1;
        if steps > cfg.max_steps {
            return Err(fail(format!("exceeded {} steps", cfg.max_steps), s, &y));
        }
        let trial = ode::dopri_step(&f, &y, &k, h)
            .ok()
            .filter(|st| st.y.iter().chain(st.dy.iter()).all(|v| v.is_finite()));
        let st = match trial {
            Some(st) => st,
            None => {
                if cfg.fixed_step {
                    return Err(fail(
                        "stage left the domain with a fixed step".into(),
                        s,
                        &y,
                    ));
                }
                h *= 0.25;
                rejected = true;
                if h < 1e-13 * s.abs().max(1.0) {
                    return Err(fail("step size underflow".into(), s, &y));
                }
                continue;
            }
        };
        let err = if cfg.fixed_step {
            0.0
        } else {
            ode::error_norm(&st.err, &y, &st.y, cfg.tol_abs, cfg.tol_rel)
        };
        if err > 1.0 {
            h *= ode::step_factor(err, true);
            rejected = true;
            if h < 1e-13 * s.abs().max(1.0) {
                return Err(fail("step size underflow".into(), s, &y));
            }
            continue;
        }

        if watch_turning && turning.is_none() && y[2] < 0.0 && st.y[2] >= 0.0 {
            let ev = locate_turning(&f, s, &y, &k, h)?;
            if ev.s < s + h - 1e-13 {
                samples.push(ev);
                turning = Some(samples.len() - 1);
            } else {
                turning = Some(samples.len());
            }
        }

        s += h;
        y = st.y;
        k = st.dy;
        samples.push(Sample {
            s,
            r: y[0],
            v: y[1],
            alpha: y[2],
        });

        h = if cfg.fixed_step {
            cfg.step_init
        } else {
            (h * ode::step_factor(err, rejected)).min(cap(&y))
        };
        rejected = false;
    }
    Ok(Run { samples, turning })
}

// Bisection on the sign of alpha along re-taken partial steps from the step start.
fn locate_turning<F>(f: &F, s: f64, y: &[f64; 3], k: &[f64; 3], h: f64) -> Result<Sample>
where
    F: Fn(&[f64; 3]) -> Result<[f64; 3]>,
{
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        if (hi - lo) * h <= 1e-13 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let st = ode::dopri_step(f, y, k, mid * h)?;
        if st.y[2] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let st = ode::dopri_step(f, y, k, hi * h)?;
    Ok(Sample {
        s: s + hi * h,
        r: st.y[0],
        v: st.y[1],
        alpha: st.y[2],
    })
}

/// Coefficients `c_k` of `phi(r) / r = sum c_k r^(2k)` for the bowl.
fn bowl_series(n: usize, terms: usize) -> Vec<f64> {
    let m = n as f64 - 1.0;
    let mut c: Vec<f64> = Vec::with_capacity(terms);
    let mut sq: Vec<f64> = Vec::with_capacity(terms);
    let mut cube: Vec<f64> = Vec::with_capacity(terms);
    for k in 0..terms {
        if k == 0 {
            c.push(1.0 / (1.0 + m));
            continue;
        }
        let j = k - 1;
        sq.push((0..=j).map(|i| c[i] * c[j - i]).sum());
        cube.push((0..=j).map(|i| sq[i] * c[j - i]).sum());
        c.push((sq[j] - m * cube[j]) / (2.0 * k as f64 + 1.0 + m));
    }
    c
}

const SERIES_TERMS: usize = 30;
const SERIES_SAMPLES: usize = 40;

/// `(V, phi)` of the bowl at `r` from its series.
fn bowl_series_eval(c: &[f64], r: f64) -> (f64, f64) {
    let x = r * r;
    let (mut v, mut psi, mut p) = (0.0, 0.0, 1.0);
    for (k, ck) in c.iter().enumerate() {
        psi += ck * p;
        v += ck * p * x / (2.0 * k as f64 + 2.0);
        p *= x;
    }
    (v, r * psi)
}

/// The entire rotationally symmetric graph through the origin (the bowl).
///
/// Up to `r = cfg.axis_eps` the curve is the convergent power series of the
/// bowl, sampled densely; the integrator takes over from there.
pub fn solve_bowl(n: usize, cfg: &SolverConfig) -> Result<ProfileCurve> {
    check_dimension(n)?;
    cfg.validate()?;
    let c = bowl_series(n, SERIES_TERMS);
    let eps = cfg.axis_eps;
    let mut samples = Vec::with_capacity(SERIES_SAMPLES + 1);
    samples.push(Sample {
        s: 0.0,
        r: 0.0,
        v: 0.0,
        alpha: 0.0,
    });
    let mut s = 0.0;
    for i in 1..=SERIES_SAMPLES {
        let (a, b) = (
            eps * (i - 1) as f64 / SERIES_SAMPLES as f64,
            eps * i as f64 / SERIES_SAMPLES as f64,
        );
        s += quad::gauss_legendre5(|r| bowl_series_eval(&c, r).1.hypot(1.0), a, b);
        let (v, phi) = bowl_series_eval(&c, b);
        samples.push(Sample {
            s,
            r: b,
            v,
            alpha: phi.atan(),
        });
    }
    let last = samples[SERIES_SAMPLES];
    let run = integrate(n, last.s, [last.r, last.v, last.alpha], cfg, false)?;
    samples.extend(run.samples.into_iter().skip(1));
    Ok(ProfileCurve { n, samples })
}

/// The winglike translator with waist radius `aperture`.
pub fn solve_wing(n: usize, aperture: f64, cfg: &SolverConfig) -> Result<WingSolution> {
    check_dimension(n)?;
    cfg.validate()?;
    if !(aperture > 0.0) || !aperture.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "aperture R = {aperture} must be > 0 (R = 0 is the bowl)"
        )));
    }
    let lower = integrate(n, 0.0, [aperture, 0.0, -FRAC_PI_2], cfg, true)?;
    let idx = lower.turning.ok_or_else(|| {
        Error::Construction(format!(
            "no horizontal tangent on the lower branch before r_max = {}",
            cfg.r_max
        ))
    })?;
    let turn = lower.samples[idx];
    let upper = integrate(n, 0.0, [aperture, 0.0, FRAC_PI_2], cfg, false)?;
    Ok(WingSolution {
        n,
        aperture,
        r_star: turn.r,
        depth: -turn.v,
        lower: ProfileCurve {
            n,
            samples: lower.samples,
        },
        upper: ProfileCurve {
            n,
            samples: upper.samples,
        },
    })
}

/// A curve written as a graph `V(r)` with slope `phi`.
///
/// Values between grid radii come from cubic Hermite interpolation: `V` uses
/// `V' = phi`, and `phi` uses `dphi` with a Fritsch–Carlson limiter so that
/// monotone data stay monotone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphProfile {
    pub n: usize,
    pub r: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

impl GraphProfile {
    pub fn new(n: usize, r: Vec<f64>, v: Vec<f64>, phi: Vec<f64>, dphi: Vec<f64>) -> Result<Self> {
        let len = r.len();
        if len < 2 || v.len() != len || phi.len() != len || dphi.len() != len {
            return Err(Error::InvalidParameter(
                "graph needs >= 2 radii and equally long columns".into(),
            ));
        }
        if let Some(w) = r.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Reparametrization(format!(
                "radii not strictly increasing near r = {}",
                w[0]
            )));
        }
        Ok(GraphProfile { n, r, v, phi, dphi })
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    fn locate(&self, r: f64) -> Result<(usize, f64, f64)> {
        let (lo, hi) = (self.r_min(), self.r_max());
        let slack = 1e-12 * hi.abs().max(1.0);
        if !(r >= lo - slack && r <= hi + slack) {
            return Err(Error::Range(format!(
                "r = {r} outside graph extent [{lo}, {hi}]"
            )));
        }
        let r = r.clamp(lo, hi);
        let j = self
            .r
            .partition_point(|&x| x <= r)
            .clamp(1, self.r.len() - 1);
        let h = self.r[j] - self.r[j - 1];
        Ok((j - 1, h, (r - self.r[j - 1]) / h))
    }

    /// Height at radius `r`.
    pub fn v_at(&self, r: f64) -> Result<f64> {
        let (i, h, t) = self.locate(r)?;
        Ok(ode::hermite(
            &[self.v[i]],
            &[self.phi[i]],
            &[self.v[i + 1]],
            &[self.phi[i + 1]],
            h,
            t,
        )[0])
    }

    /// Slope at radius `r`.
    pub fn phi_at(&self, r: f64) -> Result<f64> {
        let (i, h, t) = self.locate(r)?;
        let (mut d0, mut d1) = (self.dphi[i], self.dphi[i + 1]);
        let secant = (self.phi[i + 1] - self.phi[i]) / h;
        if secant == 0.0 {
            d0 = 0.0;
            d1 = 0.0;
        } else if d0 * secant >= 0.0 && d1 * secant >= 0.0 {
            let (a, b) = (d0 / secant, d1 / secant);
            let q = a * a + b * b;
            if q > 9.0 {
                let tau = 3.0 / q.sqrt();
                d0 *= tau;
                d1 *= tau;
            }
        }
        Ok(ode::hermite(&[self.phi[i]], &[d0], &[self.phi[i + 1]], &[d1], h, t)[0])
    }
}

/// Rewrites the part of `curve` with `r >= r_lo` as a graph over `r`.
pub fn graph_view(curve: &ProfileCurve, r_lo: f64) -> Result<GraphProfile> {
    let pts = &curve.samples;
    let start = pts
        .iter()
        .position(|p| p.r >= r_lo)
        .ok_or_else(|| Error::Range(format!("curve never reaches r = {r_lo}")))?;
    let tail = &pts[start..];
    if tail.iter().any(|p| p.r < r_lo) {
        return Err(Error::Reparametrization(format!(
            "curve re-enters r < {r_lo}; not a graph"
        )));
    }
    let n = curve.n;
    let (mut r, mut v, mut phi, mut dphi) = (vec![], vec![], vec![], vec![]);
    for p in tail {
        if p.alpha.abs() >= FRAC_PI_2 - 1e-9 {
            return Err(Error::Reparametrization(format!(
                "vertical tangent at r = {}, V = {}",
                p.r, p.v
            )));
        }
        let slope = p.alpha.tan();
        r.push(p.r);
        v.push(p.v);
        phi.push(slope);
        dphi.push(graph_slope_rhs(n, p.r, slope));
    }
    GraphProfile::new(n, r, v, phi, dphi)
}

// Finite-difference weights (Fornberg) for derivatives 0..=2 at z over nodes x.
fn fd_weights(z: f64, x: &[f64]) -> [Vec<f64>; 3] {
    let m = 2usize;
    let len = x.len();
    let mut c = vec![vec![0.0; m + 1]; len];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..len {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    let col = |k: usize| c.iter().map(|row| row[k]).collect::<Vec<_>>();
    [col(0), col(1), col(2)]
}

/// Pointwise defect of the translator equation at each interior sample, as `(s, residual)`.
///
/// Tangent and curvature come from finite differences of `(r, V)` in `s`
/// (five-point stencils when the curve has at least five samples, three-point
/// otherwise), so errors in either coordinate show up in the residual
/// `kappa + (n - 1) sin(theta) / r - cos(theta)`.
pub fn residual_profile(curve: &ProfileCurve) -> Result<Vec<(f64, f64)>> {
    let pts = &curve.samples;
    if pts.len() < 3 {
        return Err(Error::InvalidParameter(
            "residual needs at least 3 samples".into(),
        ));
    }
    let half = if pts.len() >= 5 { 2 } else { 1 };
    let nm1 = curve.n as f64 - 1.0;
    let mut out = Vec::with_capacity(pts.len() - 2 * half);
    for i in half..pts.len() - half {
        let win = &pts[i - half..=i + half];
        let p = &pts[i];
        if !(p.r > 0.0) {
            return Err(Error::Domain(format!("sample {i} has r = {}", p.r)));
        }
        let xs: Vec<f64> = win.iter().map(|q| q.s).collect();
        let w = fd_weights(p.s, &xs);
        let dot = |k: usize, f: &dyn Fn(&Sample) -> f64| -> f64 {
            win.iter().zip(&w[k]).map(|(q, c)| c * f(q)).sum()
        };
        let (r1, v1) = (dot(1, &|q| q.r), dot(1, &|q| q.v));
        let (r2, v2) = (dot(2, &|q| q.r), dot(2, &|q| q.v));
        let speed = r1.hypot(v1);
        let kappa = (r1 * v2 - v1 * r2) / speed.powi(3);
        let (cos, sin) = (r1 / speed, v1 / speed);
        out.push((p.s, kappa + nm1 * sin / p.r - cos));
    }
    Ok(out)
}

/// Largest absolute value of [`residual_profile`].
pub fn translator_residual(curve: &ProfileCurve) -> Result<f64> {
    Ok(residual_profile(curve)?
        .iter()
        .fold(0.0f64, |m, &(_, r)| m.max(r.abs())))
}
