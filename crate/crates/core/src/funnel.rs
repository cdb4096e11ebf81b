//! Solid parabolic funnels around the vertical axis.
//!
//! A funnel of aperture `R0` and logarithmic parameter `lambda` is the closed set
//! of points at horizontal distance `|p| >= R0` from its center whose height lies
//! between the walls `f_-(|p|)` and `f_+(|p|)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile_ode::WingSolution;
use crate::report::BoundReport;

/// Radii past which an excess crossing is declared unbracketed.
pub const CROSSING_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Funnel {
    pub n: usize,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub lambda: f64,
    /// Horizontal part of the center, `n` components.
    pub y0_horizontal: Vec<f64>,
    pub y0_vertical: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub r_max: f64,
    #[serde(rename = "V_min")]
    pub v_min: f64,
    #[serde(rename = "V_max")]
    pub v_max: f64,
}

impl Funnel {
    /// Funnel centered at the origin.
    pub fn new(n: usize, r0: f64, lambda: f64) -> Result<Self> {
        Funnel {
            n,
            r0,
            lambda,
            y0_horizontal: vec![0.0; n],
            y0_vertical: 0.0,
        }
        .validated()
    }

    pub fn with_center(mut self, horizontal: Vec<f64>, vertical: f64) -> Result<Self> {
        self.y0_horizontal = horizontal;
        self.y0_vertical = vertical;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!(
                "n must be >= 2, got {}",
                self.n
            )));
        }
        if !(self.r0 >= 0.0) || !self.r0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "R0 must be >= 0, got {}",
                self.r0
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if self.y0_horizontal.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "center needs {} horizontal components, got {}",
                self.n,
                self.y0_horizontal.len()
            )));
        }
        if !self.y0_vertical.is_finite() || self.y0_horizontal.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("center must be finite".into()));
        }
        Ok(self)
    }

    pub fn upper_wall(&self, r: f64) -> f64 {
        upper_wall(self.n, r)
    }

    pub fn lower_wall(&self, r: f64) -> f64 {
        lower_wall(self.n, self.r0, self.lambda, r)
    }

    /// `(f_-(r), f_+(r))` in the funnel's own frame.
    pub fn walls(&self, r: f64) -> Result<(f64, f64)> {
        if !(r >= self.r0) {
            return Err(Error::Domain(format!(
                "r = {r} lies inside the aperture R0 = {}",
                self.r0
            )));
        }
        Ok((self.lower_wall(r), self.upper_wall(r)))
    }

    // (|p|, height) relative to the center.
    fn local(&self, point: &[f64]) -> Result<(f64, f64)> {
        if point.len() != self.n + 1 {
            return Err(Error::InvalidParameter(format!(
                "point needs {} coordinates, got {}",
                self.n + 1,
                point.len()
            )));
        }
        let r = point[..self.n]
            .iter()
            .zip(&self.y0_horizontal)
            .map(|(x, c)| (x - c) * (x - c))
            .sum::<f64>()
            .sqrt();
        Ok((r, point[self.n] - self.y0_vertical))
    }

    /// Closed-set membership; boundary points are contained.
    pub fn contains(&self, point: &[f64]) -> Result<bool> {
        let (r, x) = self.local(point)?;
        Ok(r >= self.r0 && self.lower_wall(r) <= x && x <= self.upper_wall(r))
    }

    /// Smallest of `|p| - R0`, `x - f_-` and `f_+ - x`; nonnegative iff contained.
    pub fn signed_margin(&self, point: &[f64]) -> Result<f64> {
        let (r, x) = self.local(point)?;
        Ok(self.margin_at(r, x))
    }

    fn margin_at(&self, r: f64, x: f64) -> f64 {
        let hole = r - self.r0;
        if hole < 0.0 {
            return hole;
        }
        (x - self.lower_wall(r)).min(self.upper_wall(r) - x)
    }

    /// Radius and value of the global minimum of `f_-` over `r >= R0`.
    pub fn lower_wall_minimum(&self) -> (f64, f64) {
        let m = self.n as f64 - 1.0;
        // critical points of u^2/(2m) - lambda log(1+u^2)/2 with u = r - R0 - 2 >= -2
        let mut cands = vec![-2.0, 0.0];
        let q = self.lambda * m - 1.0;
        if q > 0.0 {
            let u = q.sqrt();
            cands.push(u);
            if -u >= -2.0 {
                cands.push(-u);
            }
        }
        cands
            .into_iter()
            .map(|u| {
                let r = self.r0 + 2.0 + u;
                (r, self.lower_wall(r))
            })
            .fold(
                (f64::NAN, f64::INFINITY),
                |a, b| if b.1 < a.1 { b } else { a },
            )
    }
}

pub fn upper_wall(n: usize, r: f64) -> f64 {
    r * r / (2.0 * (n as f64 - 1.0)) + 1.0
}

pub fn lower_wall(n: usize, r0: f64, lambda: f64, r: f64) -> f64 {
    let m = n as f64 - 1.0;
    let u = r - r0 - 2.0;
    u * u / (2.0 * m) - 0.5 * lambda * (u * u).ln_1p() - (PI * (r0 + FRAC_PI_2) + 4.0) / (2.0 * m)
}

/// `(f_-(r), f_+(r))` for a funnel centered at the origin.
pub fn funnel_walls(f: &Funnel, r: f64) -> Result<(f64, f64)> {
    f.walls(r)
}

/// Checks that both branches of `w` stay between the walls of the centered funnel
/// of aperture `w.aperture` on `[R, r_max]`.
///
/// The margin at each sample is `min(V - f_-, f_+ - V)`; the verdict uses zero slack.
pub fn verify_wing_containment(w: &WingSolution, lambda: f64, r_max: f64) -> Result<BoundReport> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let extent = w.lower.r_extent().min(w.upper.r_extent());
    if !(r_max <= extent) {
        return Err(Error::Range(format!(
            "r_max = {r_max} exceeds computed extent {extent}"
        )));
    }
    if !(r_max >= w.aperture) {
        return Err(Error::Range(format!(
            "r_max = {r_max} is below the aperture {}",
            w.aperture
        )));
    }
    let f = Funnel::new(w.n, w.aperture, lambda)?;
    let margins = w
        .lower
        .samples
        .iter()
        .chain(&w.upper.samples)
        .filter(|p| p.r >= w.aperture && p.r <= r_max)
        .map(|p| (p.r, f.margin_at(p.r, p.v)));
    let report = BoundReport::from_margins("WING_IN_FUNNEL", (w.aperture, r_max), 0.0, margins);
    Ok(report.with_note(format!(
        "n = {}, R = {}, lambda = {lambda}",
        w.n, w.aperture
    )))
}

/// Largest radius `r >= R` where `f_-` of aperture `R = r_small` lies strictly
/// below `f_-` of aperture `R0` (`R` itself when there is none). Both wall formulas
/// are evaluated on the whole ray.
pub fn crossing_radius(n: usize, lambda: f64, r_small: f64, r0: f64) -> Result<f64> {
    if !(0.0..=r0).contains(&r_small) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= R <= R0, got R = {r_small}, R0 = {r0}"
        )));
    }
    let gap = |r: f64| lower_wall(n, r_small, lambda, r) - lower_wall(n, r0, lambda, r);
    if r_small == r0 {
        return Ok(r_small);
    }
    // for r >= R0 + 3 both shifted arguments exceed 1, where u/(1+u^2) decreases,
    // so the gap is increasing there
    let knee = r0 + 3.0;
    let (mut lo, mut hi);
    if gap(knee) < 0.0 {
        lo = knee;
        hi = knee + 1.0;
        while gap(hi) < 0.0 {
            lo = hi;
            hi = knee + 2.0 * (hi - knee);
            if hi > CROSSING_CAP {
                return Err(Error::Construction(format!(
                    "wall crossing not bracketed below {CROSSING_CAP}"
                )));
            }
        }
    } else {
        const SCAN: usize = 4000;
        let step = (knee - r_small) / SCAN as f64;
        let last_neg = (0..=SCAN)
            .rev()
            .map(|i| r_small + i as f64 * step)
            .find(|&r| gap(r) < 0.0);
        match last_neg {
            None => return Ok(r_small),
            Some(r) => {
                lo = r;
                hi = (r + step).min(knee);
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Box containing every funnel of aperture `R <= R0` minus the funnel of aperture `R0`.
///
/// The radius bound is the largest wall crossing over a grid of apertures in
/// `[0, R0)`; heights span the lowest lower wall and the upper wall at that radius.
/// The certificate is empirical.
pub fn excess_region_bound(n: usize, lambda: f64, r0: f64) -> Result<BoundingBox> {
    if !(r0 > 0.0) || !r0.is_finite() {
        return Err(Error::InvalidParameter(format!("R0 must be > 0, got {r0}")));
    }
    let outer = Funnel::new(n, r0, lambda)?;
    const GRID: usize = 200;
    let mut r_max = r0;
    for i in 0..GRID {
        // apertures below R0 leave the hole [R, R0) in the excess as well
        let r = r0 * i as f64 / GRID as f64;
        r_max = r_max.max(crossing_radius(n, lambda, r, r0)?);
    }
    // the lower wall's shape is independent of the aperture and its offset decreases
    // with it, so the aperture R0 wall bounds every other one from below
    let (_, v_min) = outer.lower_wall_minimum();
    Ok(BoundingBox {
        r_max,
        v_min,
        v_max: upper_wall(n, r_max),
    })
}

const AUDIT_SIDE: usize = 100;

// Samples AUDIT_SIDE^2 funnel points on a radius/height lattice.
fn audit_points(f: &Funnel) -> impl Iterator<Item = (f64, f64)> + '_ {
    (0..AUDIT_SIDE).flat_map(move |i| {
        let r = f.r0 + 50.0 * i as f64 / (AUDIT_SIDE - 1) as f64;
        let (lo, hi) = (f.lower_wall(r), f.upper_wall(r));
        (0..AUDIT_SIDE).map(move |j| {
            let t = j as f64 / (AUDIT_SIDE - 1) as f64;
            (r, f.y0_vertical + lo + t * (hi - lo))
        })
    })
}

/// Funnel whose points all have `|p| >= rho` and height `> h0`.
///
/// The funnel is lifted so that its lowest wall point sits one unit above `h0`,
/// then audited on a lattice of funnel points.
pub fn funnel_avoiding_half_cylinder(n: usize, rho: f64, h0: f64, lambda: f64) -> Result<Funnel> {
    if !(rho > 0.0) || !rho.is_finite() || !h0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need rho > 0 and finite h0, got {rho}, {h0}"
        )));
    }
    let base = Funnel::new(n, rho, lambda)?;
    let (_, lowest) = base.lower_wall_minimum();
    let f = base.with_center(vec![0.0; n], h0 - lowest + 1.0)?;
    if let Some((r, x)) = audit_points(&f).find(|&(r, x)| !(x > h0 && r >= rho)) {
        return Err(Error::Construction(format!(
            "audit point ({r}, {x}) enters the half-cylinder"
        )));
    }
    Ok(f)
}

/// Funnel centered at the origin avoiding the open cylinder of radius `rho`.
pub fn funnel_avoiding_cylinder(n: usize, rho: f64, lambda: f64) -> Result<Funnel> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "rho must be > 0, got {rho}"
        )));
    }
    Funnel::new(n, rho, lambda)
}
