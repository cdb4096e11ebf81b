//! Sampled verification of the global slope and height bounds along computed
//! profiles.
//!
//! Lower-branch bounds are stated relative to the turning point `R*`, where
//! `phi(R*) = 0`; heights are measured from `V(R*)`. Upper-branch bounds use the
//! raw samples of the upper branch, which starts vertical at `(R, 0)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile_ode::{graph_slope_rhs, graph_view, GraphProfile, WingSolution};
use crate::quad::{gauss_legendre5, simpson, simpson_seeded};
use crate::report::{BoundReport, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundId {
    PhiEnvelope,
    MonotonicityIdentity,
    CauchySchwarz,
    FirstLower,
    RatioIntegral,
    BetaLogLower,
    RefinedLower,
    VQuadraticLower,
    VLogLower,
    SupRatio,
    UpperBranchHeight,
    UpperBranchRadius,
    RStarWindow,
    DepthBound,
    SlopeLimit,
}

impl BoundId {
    pub const ALL: [BoundId; 15] = [
        BoundId::PhiEnvelope,
        BoundId::MonotonicityIdentity,
        BoundId::CauchySchwarz,
        BoundId::FirstLower,
        BoundId::RatioIntegral,
        BoundId::BetaLogLower,
        BoundId::RefinedLower,
        BoundId::VQuadraticLower,
        BoundId::VLogLower,
        BoundId::SupRatio,
        BoundId::UpperBranchHeight,
        BoundId::UpperBranchRadius,
        BoundId::RStarWindow,
        BoundId::DepthBound,
        BoundId::SlopeLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::PhiEnvelope => "PHI_ENVELOPE",
            BoundId::MonotonicityIdentity => "MONOTONICITY_IDENTITY",
            BoundId::CauchySchwarz => "CAUCHY_SCHWARZ",
            BoundId::FirstLower => "FIRST_LOWER",
            BoundId::RatioIntegral => "RATIO_INTEGRAL",
            BoundId::BetaLogLower => "BETA_LOG_LOWER",
            BoundId::RefinedLower => "REFINED_LOWER",
            BoundId::VQuadraticLower => "V_QUADRATIC_LOWER",
            BoundId::VLogLower => "V_LOG_LOWER",
            BoundId::SupRatio => "SUP_RATIO",
            BoundId::UpperBranchHeight => "UPPER_BRANCH_HEIGHT",
            BoundId::UpperBranchRadius => "UPPER_BRANCH_RADIUS",
            BoundId::RStarWindow => "R_STAR_WINDOW",
            BoundId::DepthBound => "DEPTH_BOUND",
            BoundId::SlopeLimit => "SLOPE_LIMIT",
        }
    }

    /// Needs the whole wing rather than a graph.
    pub fn is_wing_level(self) -> bool {
        matches!(
            self,
            BoundId::UpperBranchHeight
                | BoundId::UpperBranchRadius
                | BoundId::RStarWindow
                | BoundId::DepthBound
        )
    }

    fn on_upper_branch(self) -> bool {
        matches!(
            self,
            BoundId::UpperBranchHeight | BoundId::UpperBranchRadius
        )
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        BoundId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound id {s:?}")))
    }
}

/// `1 - 1/sqrt(2(n-1))`.
pub fn alpha_n(n: usize) -> f64 {
    1.0 - 1.0 / (2.0 * (n as f64 - 1.0)).sqrt()
}

/// `alpha_n / (n-1)`.
pub fn beta_n(n: usize) -> f64 {
    alpha_n(n) / (n as f64 - 1.0)
}

/// Frozen nonlinearity `(1 + phi^2) / r^2`.
pub fn frozen_nonlinearity(phi: f64, r: f64) -> f64 {
    (1.0 + phi * phi) / (r * r)
}

/// What a bound is evaluated on.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Wing(&'a WingSolution),
    /// A graph whose first radius plays the role of `R*`.
    Graph(&'a GraphProfile),
}

// Running integral of `f(t, phi(t))` from the first node of a graph, tabulated at
// its nodes to the requested tolerance and completed between nodes by a fixed
// Gauss rule, so that it is a smooth function of the upper limit.
struct Cumulative<'a, F: Fn(f64, f64) -> f64> {
    g: &'a GraphProfile,
    f: F,
    table: Vec<f64>,
}

impl<'a, F: Fn(f64, f64) -> f64> Cumulative<'a, F> {
    fn new(g: &'a GraphProfile, upto: f64, f: F, tol: f64) -> Result<Self> {
        let last = g.r.partition_point(|&x| x < upto).min(g.r.len() - 1);
        let span = (g.r[last] - g.r[0]).max(f64::MIN_POSITIVE);
        let mut table = Vec::with_capacity(last + 1);
        table.push(0.0);
        let mut acc = 0.0;
        for k in 0..last {
            let (a, b) = (g.r[k], g.r[k + 1]);
            acc += simpson_seeded(|t| f(t, phi(g, t)), a, b, tol * (b - a) / span, 1)?;
            table.push(acc);
        }
        Ok(Cumulative { g, f, table })
    }

    fn at(&self, t: f64) -> Result<f64> {
        let k = self.g.r.partition_point(|&x| x <= t).saturating_sub(1);
        if k >= self.table.len() {
            return Err(Error::Range(format!("r = {t} beyond tabulated integral")));
        }
        let a = self.g.r[k];
        if t == a {
            return Ok(self.table[k]);
        }
        Ok(self.table[k] + gauss_legendre5(|s| (self.f)(s, phi(self.g, s)), a, t))
    }
}

fn phi(g: &GraphProfile, r: f64) -> f64 {
    g.phi_at(r).unwrap_or(f64::NAN)
}

struct Ctx<'a> {
    n: usize,
    m: f64,
    graph: Option<GraphProfile>,
    wing: Option<&'a WingSolution>,
    r_star: f64,
}

impl<'a> Ctx<'a> {
    fn new(target: Target<'a>, needs_graph: bool) -> Result<Self> {
        match target {
            Target::Wing(w) => {
                let graph = if needs_graph {
                    Some(graph_view(&w.lower, w.r_star)?)
                } else {
                    None
                };
                Ok(Ctx {
                    n: w.n,
                    m: w.n as f64 - 1.0,
                    graph,
                    wing: Some(w),
                    r_star: w.r_star,
                })
            }
            Target::Graph(g) => Ok(Ctx {
                n: g.n,
                m: g.n as f64 - 1.0,
                r_star: g.r_min(),
                graph: Some(g.clone()),
                wing: None,
            }),
        }
    }

    fn graph(&self) -> &GraphProfile {
        self.graph.as_ref().expect("graph requested")
    }
}

fn grid_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Checks one bound on `r_range` sampled at `grid` equally spaced radii.
///
/// Integrals use adaptive quadrature at `quad_tol` over the monotone cubic
/// interpolant of `phi`. Upper-branch ids use every upper-branch sample in range
/// instead of the grid; wing-level scalar ids ignore the range.
pub fn check_bound(
    target: Target<'_>,
    id: BoundId,
    r_range: (f64, f64),
    grid: usize,
    quad_tol: f64,
) -> Result<BoundReport> {
    if id.is_wing_level() && matches!(target, Target::Graph(_)) {
        return Err(Error::InvalidParameter(format!(
            "{id} needs a wing solution"
        )));
    }
    if grid == 0 {
        return Err(Error::InvalidParameter(
            "grid must have at least one point".into(),
        ));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::InvalidParameter("quad_tol must be > 0".into()));
    }
    let (lo, hi) = r_range;
    if !(lo <= hi) {
        return Err(Error::Range(format!("empty range [{lo}, {hi}]")));
    }
    let tol = DEFAULT_TOLERANCE;
    let needs_graph = !id.is_wing_level();
    let ctx = Ctx::new(target, needs_graph)?;
    let (n, m, rs) = (ctx.n, ctx.m, ctx.r_star);

    if let Some(w) = ctx.wing.filter(|_| id.is_wing_level()) {
        if id.on_upper_branch() {
            let extent = w.upper.r_extent();
            if lo < w.aperture - 1e-12 || hi > extent {
                return Err(Error::Range(format!(
                    "range [{lo}, {hi}] outside upper branch [{}, {extent}]",
                    w.aperture
                )));
            }
        }
        return Ok(wing_level(w, id, r_range, tol));
    }

    let g = ctx.graph();
    if lo < rs - 1e-12 || hi > g.r_max() {
        return Err(Error::Range(format!(
            "range [{lo}, {hi}] outside graph [{rs}, {}]",
            g.r_max()
        )));
    }
    let phi0 = phi(g, rs);
    let v0 = g.v_at(rs)?;
    let (a, b) = (alpha_n(n), beta_n(n));
    let radii = grid_points(lo.max(rs), hi, grid);
    let name = id.name();

    let report = match id {
        BoundId::PhiEnvelope => BoundReport::from_margins(
            name,
            r_range,
            tol,
            radii.iter().map(|&r| {
                let p = phi(g, r);
                let slope = if r > 0.0 {
                    graph_slope_rhs(n, r, p)
                } else {
                    1.0 / n as f64
                };
                (r, (p - phi0).min(r / m - p).min(slope))
            }),
        ),
        BoundId::MonotonicityIdentity => {
            if !(rs > 0.0) {
                return Err(Error::Domain(
                    "the integral identity needs a base radius > 0".into(),
                ));
            }
            let expo = Cumulative::new(g, hi, |t, p| m * t * frozen_nonlinearity(p, t), quad_tol)?;
            let mut out = Vec::with_capacity(radii.len());
            for &r in &radii {
                let gr = expo.at(r)?;
                let inner = simpson(
                    |t| {
                        let p = phi(g, t);
                        let gt = expo.at(t).unwrap_or(f64::NAN);
                        (gt - gr).exp() * (1.0 + p * p)
                    },
                    rs,
                    r,
                    quad_tol,
                )?;
                let rhs = inner + (-gr).exp() * phi0;
                out.push((r, -(phi(g, r) - rhs).abs()));
            }
            BoundReport::from_margins(name, r_range, tol, out)
        }
        BoundId::CauchySchwarz | BoundId::RatioIntegral | BoundId::BetaLogLower => {
            let ratio = Cumulative::new(g, hi, |t, p| t / (1.0 + p * p), quad_tol)?;
            let mut out = Vec::with_capacity(radii.len());
            for &r in &radii {
                let x = r - rs;
                let margin = match id {
                    BoundId::CauchySchwarz => {
                        let i = ratio.at(r)?.max(0.0);
                        phi(g, r) - (x / m - (m / 2.0).sqrt() * i.sqrt())
                    }
                    BoundId::RatioIntegral => {
                        let rhs = (b * b * x * x).ln_1p() / (2.0 * b * b) + rs / b * (b * x).atan();
                        rhs - ratio.at(r)?
                    }
                    _ => {
                        let inner = (b * b * x * x).ln_1p() / (2.0 * b * b) + PI * rs / (2.0 * b);
                        phi(g, r) - (x / m - (m / 2.0).sqrt() * inner.sqrt())
                    }
                };
                out.push((r, margin));
            }
            BoundReport::from_margins(name, r_range, tol, out)
        }
        BoundId::FirstLower => BoundReport::from_margins(
            name,
            r_range,
            tol,
            radii.iter().map(|&r| (r, phi(g, r) - a * (r - rs) / m)),
        ),
        BoundId::RefinedLower => {
            let start = rs.max(1.0);
            let pts: Vec<f64> = radii.iter().copied().filter(|&r| r >= start).collect();
            let skipped = radii.len() - pts.len();
            let rep = vacuous_or(
                name,
                r_range,
                tol,
                pts.iter()
                    .map(|&r| (r, phi(g, r) - ((r - 4.0 * rs) / m - 24.0 / r))),
            );
            if skipped > 0 {
                rep.with_note(format!(
                    "{skipped} grid radii below max(R*, 1) = {start} skipped"
                ))
            } else {
                rep
            }
        }
        BoundId::VQuadraticLower => BoundReport::from_margins(
            name,
            r_range,
            tol,
            radii.iter().map(|&r| {
                let h = g.v_at(r).unwrap_or(f64::NAN) - v0;
                (r, h - a * (r - rs).powi(2) / (2.0 * m))
            }),
        ),
        BoundId::VLogLower => BoundReport::from_margins(
            name,
            r_range,
            tol,
            radii.iter().map(|&r| {
                let h = g.v_at(r).unwrap_or(f64::NAN) - v0;
                let rhs =
                    (r - rs).powi(2) / (2.0 * m) - 24.0 * (r / rs).ln() - 9.0 * rs * rs / (2.0 * m);
                (
                    r,
                    if rhs == f64::NEG_INFINITY {
                        f64::INFINITY
                    } else {
                        h - rhs
                    },
                )
            }),
        ),
        BoundId::SupRatio => BoundReport::from_margins(
            name,
            r_range,
            tol,
            radii.iter().map(|&r| {
                let p = phi(g, r);
                (r, rs + 1.0 - r / (1.0 + p * p))
            }),
        ),
        BoundId::SlopeLimit => {
            let start = 10.0 * rs;
            let pts = radii.iter().copied().filter(|&r| r >= start && r > 0.0);
            vacuous_or(
                name,
                r_range,
                tol,
                pts.map(|r| (r, 2.0 * m / (r * r) - (m * phi(g, r) / r - 1.0).abs())),
            )
            .with_note(format!("checked for r >= 10 R* = {start}"))
        }
        _ => unreachable!("wing-level ids handled above"),
    };
    Ok(report)
}

fn vacuous_or<I: Iterator<Item = (f64, f64)>>(
    name: &str,
    r_range: (f64, f64),
    tol: f64,
    margins: I,
) -> BoundReport {
    let mut it = margins.peekable();
    if it.peek().is_none() {
        let mut rep = BoundReport::from_margins(name, r_range, tol, [(r_range.0, f64::INFINITY)]);
        rep.grid_size = 0;
        return rep.with_note("no grid radius in the bound's domain");
    }
    BoundReport::from_margins(name, r_range, tol, it)
}

fn wing_level(w: &WingSolution, id: BoundId, r_range: (f64, f64), tol: f64) -> BoundReport {
    let m = w.n as f64 - 1.0;
    let rr = w.aperture;
    let name = id.name();
    match id {
        BoundId::RStarWindow => BoundReport::from_margins(
            name,
            r_range,
            tol,
            [(w.r_star, (rr + FRAC_PI_2 - w.r_star).min(w.r_star - rr))],
        ),
        BoundId::DepthBound => BoundReport::from_margins(
            name,
            r_range,
            tol,
            [(w.r_star, (FRAC_PI_2 * w.r_star / m - w.depth).min(w.depth))],
        ),
        BoundId::UpperBranchHeight => BoundReport::from_margins(
            name,
            r_range,
            tol,
            upper_samples(w, r_range).map(|(r, v, _)| (r, (r * r - rr * rr) / (2.0 * m) + 1.0 - v)),
        ),
        BoundId::UpperBranchRadius => BoundReport::from_margins(
            name,
            r_range,
            tol,
            upper_samples(w, r_range).map(|(r, x, alpha)| {
                let floor = (2.0 * m * (x - 1.0 + (-x).exp()) + rr * rr).sqrt();
                // dr/dx = cot(alpha) along the upper branch
                let drdx = alpha.cos() / alpha.sin();
                (r, (r - floor).min(drdx))
            }),
        ),
        _ => unreachable!("graph-level ids are handled by check_bound"),
    }
}

fn upper_samples(
    w: &WingSolution,
    (lo, hi): (f64, f64),
) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    w.upper
        .samples
        .iter()
        .filter(move |p| p.r >= lo && p.r <= hi)
        .map(|p| (p.r, p.v, p.alpha))
}

/// Default grid for [`check_all`].
pub const DEFAULT_GRID: usize = 400;

/// One report per [`BoundId`] in enumeration order. Errors become failed reports.
pub fn check_all(w: &WingSolution, r_max: f64, quad_tol: f64) -> Vec<BoundReport> {
    check_all_with_grid(w, r_max, quad_tol, DEFAULT_GRID)
}

pub fn check_all_with_grid(
    w: &WingSolution,
    r_max: f64,
    quad_tol: f64,
    grid: usize,
) -> Vec<BoundReport> {
    let graph = graph_view(&w.lower, w.r_star);
    BoundId::ALL
        .iter()
        .map(|&id| check_on(w, graph.as_ref(), id, r_max, quad_tol, grid))
        .collect()
}

/// Radius range on which `id` is checked along `w` up to `r_max`.
pub fn default_range(w: &WingSolution, id: BoundId, r_max: f64) -> (f64, f64) {
    if id.on_upper_branch() {
        (w.aperture, r_max)
    } else if id.is_wing_level() {
        (w.aperture, w.r_star)
    } else {
        (w.r_star, r_max)
    }
}

/// A single bound over its [`default_range`]; errors become a failed report.
pub fn check_one(
    w: &WingSolution,
    id: BoundId,
    r_max: f64,
    quad_tol: f64,
    grid: usize,
) -> BoundReport {
    let graph = graph_view(&w.lower, w.r_star);
    check_on(w, graph.as_ref(), id, r_max, quad_tol, grid)
}

fn check_on(
    w: &WingSolution,
    graph: std::result::Result<&GraphProfile, &Error>,
    id: BoundId,
    r_max: f64,
    quad_tol: f64,
    grid: usize,
) -> BoundReport {
    let range = default_range(w, id, r_max);
    let res = if id.is_wing_level() {
        check_bound(Target::Wing(w), id, range, grid, quad_tol)
    } else {
        match graph {
            Ok(g) => check_bound(Target::Graph(g), id, range, grid, quad_tol),
            Err(e) => Err(e.clone()),
        }
    };
    res.unwrap_or_else(|e| BoundReport::failed(id.name(), range, DEFAULT_TOLERANCE, e.to_string()))
}
