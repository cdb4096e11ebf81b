//! First and last contact of one-parameter translator families with an obstacle.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile_ode::{graph_view, solve_bowl, solve_wing, GraphProfile, SolverConfig};

pub type Point = (f64, f64);

/// A polyline `(r, x)` in the half-plane `r >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstacleProfile {
    samples: Vec<Point>,
}

impl ObstacleProfile {
    pub fn new(samples: Vec<Point>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter(
                "obstacle needs at least one vertex".into(),
            ));
        }
        if let Some(p) = samples
            .iter()
            .find(|p| !(p.0.is_finite() && p.1.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "non-finite obstacle vertex {p:?}"
            )));
        }
        if let Some(p) = samples.iter().find(|p| p.0 < 0.0) {
            return Err(Error::Domain(format!("obstacle vertex {p:?} has r < 0")));
        }
        if let Some((i, j)) = self_crossing(&samples) {
            return Err(Error::InvalidParameter(format!(
                "obstacle polyline is not simple: segments {i} and {j} meet"
            )));
        }
        Ok(ObstacleProfile { samples })
    }

    pub fn point(r: f64, x: f64) -> Result<Self> {
        Self::new(vec![(r, x)])
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn shifted(&self, dx: f64) -> Self {
        ObstacleProfile {
            samples: self.samples.iter().map(|&(r, x)| (r, x + dx)).collect(),
        }
    }

    /// `(r_min, r_max, x_min, x_max)`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        bbox(&self.samples)
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.iter().map(str::trim).ne(["r", "x"]) {
            return Err(Error::Parse(format!(
                "expected header r,x, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut pts = vec![];
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|t| t.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("row {}: bad field {k}", line + 2)))
            };
            pts.push((field(0)?, field(1)?));
        }
        Self::new(pts)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,x")?;
        for (r, x) in &self.samples {
            writeln!(out, "{r:.16e},{x:.16e}")?;
        }
        Ok(())
    }
}

fn bbox(pts: &[Point]) -> (f64, f64, f64, f64) {
    pts.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), &(r, x)| (a.min(r), b.max(r), c.min(x), d.max(x)),
    )
}

fn cross(a: Point, b: Point) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Closest point of segment `ab` to `p`.
fn project(p: Point, a: Point, b: Point) -> Point {
    let d = sub(b, a);
    let len2 = d.0 * d.0 + d.1 * d.1;
    if len2 == 0.0 {
        return a;
    }
    let t = (((p.0 - a.0) * d.0 + (p.1 - a.1) * d.1) / len2).clamp(0.0, 1.0);
    lerp(a, b, t)
}

enum SegHit {
    None,
    Point(Point),
    Overlap(Point, Point),
}

fn segment_hit(p: Point, p2: Point, q: Point, q2: Point) -> SegHit {
    let (d1, d2, w) = (sub(p2, p), sub(q2, q), sub(q, p));
    let den = cross(d1, d2);
    let scale = d1.0.hypot(d1.1) * d2.0.hypot(d2.1);
    if den.abs() > 1e-14 * scale {
        let t = cross(w, d2) / den;
        let u = cross(w, d1) / den;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            return SegHit::Point(lerp(p, p2, t));
        }
        return SegHit::None;
    }
    let len1 = d1.0.hypot(d1.1);
    if len1 == 0.0 || cross(w, d1).abs() > 1e-14 * len1 * w.0.hypot(w.1).max(len1) {
        return SegHit::None;
    }
    let l2 = len1 * len1;
    let proj = |v: Point| ((v.0 - p.0) * d1.0 + (v.1 - p.1) * d1.1) / l2;
    let (t0, t1) = {
        let (a, b) = (proj(q), proj(q2));
        (a.min(b), a.max(b))
    };
    let (lo, hi) = (t0.max(0.0), t1.min(1.0));
    if lo > hi {
        SegHit::None
    } else if lo == hi {
        SegHit::Point(lerp(p, p2, lo))
    } else {
        SegHit::Overlap(lerp(p, p2, lo), lerp(p, p2, hi))
    }
}

// Buckets segment ids of a polyline by their r-span.
struct SegmentIndex {
    r0: f64,
    width: f64,
    buckets: Vec<Vec<usize>>,
}

impl SegmentIndex {
    fn new(pts: &[Point], pad: f64) -> Self {
        let (lo, hi, _, _) = bbox(pts);
        let count = (pts.len() / 4).clamp(1, 4096);
        let width = ((hi - lo + 2.0 * pad) / count as f64).max(f64::MIN_POSITIVE);
        let mut buckets = vec![vec![]; count];
        let r0 = lo - pad;
        let mut idx = SegmentIndex {
            r0,
            width,
            buckets: vec![],
        };
        for i in 0..pts.len().saturating_sub(1) {
            let (a, b) = (pts[i].0.min(pts[i + 1].0), pts[i].0.max(pts[i + 1].0));
            let (ka, kb) = (idx.bucket(a - pad, count), idx.bucket(b + pad, count));
            for bucket in &mut buckets[ka..=kb] {
                bucket.push(i);
            }
        }
        idx.buckets = buckets;
        idx
    }

    fn bucket(&self, r: f64, count: usize) -> usize {
        (((r - self.r0) / self.width).floor().max(0.0) as usize).min(count - 1)
    }

    fn candidates(&self, lo: f64, hi: f64, out: &mut Vec<usize>) {
        out.clear();
        let count = self.buckets.len();
        for bucket in &self.buckets[self.bucket(lo, count)..=self.bucket(hi, count)] {
            out.extend_from_slice(bucket);
        }
        out.sort_unstable();
        out.dedup();
    }
}

/// Common points of two polylines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intersection {
    pub points: Vec<Point>,
    /// Set when the polylines share a segment of positive length.
    pub overlap: bool,
}

impl Intersection {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && !self.overlap
    }
}

/// Transversal crossings of `a` and `b`, plus vertices of either within `tol` of the other.
pub fn intersect(a: &[Point], b: &[Point], tol: f64) -> Intersection {
    let mut points = vec![];
    let mut overlap = false;
    if a.is_empty() || b.is_empty() {
        return Intersection { points, overlap };
    }
    let tol = tol.max(0.0);
    let index = SegmentIndex::new(b, tol);
    let mut cand = vec![];
    for i in 0..a.len().saturating_sub(1) {
        let (p, p2) = (a[i], a[i + 1]);
        index.candidates(p.0.min(p2.0) - tol, p.0.max(p2.0) + tol, &mut cand);
        for &j in &cand {
            let (q, q2) = (b[j], b[j + 1]);
            let (plo, phi) = (p.1.min(p2.1), p.1.max(p2.1));
            if q.1.max(q2.1) < plo - tol || q.1.min(q2.1) > phi + tol {
                continue;
            }
            match segment_hit(p, p2, q, q2) {
                SegHit::None => {}
                SegHit::Point(x) => points.push(x),
                SegHit::Overlap(x, y) => {
                    overlap = true;
                    points.push(x);
                    points.push(y);
                }
            }
        }
    }
    near_vertices(a, b, &index, tol, &mut points);
    let index_a = SegmentIndex::new(a, tol);
    near_vertices(b, a, &index_a, tol, &mut points);
    points.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    points.dedup_by(|x, y| dist(*x, *y) <= tol.max(1e-12));
    Intersection { points, overlap }
}

fn near_vertices(a: &[Point], b: &[Point], index: &SegmentIndex, tol: f64, out: &mut Vec<Point>) {
    let mut cand = vec![];
    for &v in a {
        if b.len() == 1 {
            if dist(v, b[0]) <= tol {
                out.push(b[0]);
            }
            continue;
        }
        index.candidates(v.0 - tol, v.0 + tol, &mut cand);
        for &j in &cand {
            let c = project(v, b[j], b[j + 1]);
            if dist(v, c) <= tol {
                out.push(c);
            }
        }
    }
}

fn self_crossing(pts: &[Point]) -> Option<(usize, usize)> {
    let segs = pts.len().saturating_sub(1);
    let index = SegmentIndex::new(pts, 0.0);
    let mut cand = vec![];
    for i in 0..segs {
        let (p, p2) = (pts[i], pts[i + 1]);
        index.candidates(p.0.min(p2.0), p.0.max(p2.0), &mut cand);
        for &j in cand.iter().filter(|&&j| j > i) {
            let touching = if j == i + 1 {
                // neighbours share a vertex; they only meet again by folding back
                let (d1, d2) = (sub(p2, p), sub(pts[j + 1], pts[j]));
                let scale = d1.0.hypot(d1.1) * d2.0.hypot(d2.1);
                cross(d1, d2).abs() <= 1e-14 * scale && d1.0 * d2.0 + d1.1 * d2.1 < 0.0
            } else {
                !matches!(segment_hit(p, p2, pts[j], pts[j + 1]), SegHit::None)
            };
            if touching {
                return Some((i, j));
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCase {
    /// No member of the family meets the obstacle.
    NoContact,
    /// Largest parameter with contact, approached from above.
    LastTouch,
    /// Smallest translate with contact.
    FirstTouch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub case: SweepCase,
    pub critical_value: Option<f64>,
    pub touching_point: Option<Point>,
    pub iterations: usize,
    /// Predicate grid used before bisection (aperture sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_size: Option<usize>,
}

/// Knobs shared by both sweeps.
#[derive(Debug, Clone)]
pub struct SweepSetup {
    pub solver: SolverConfig,
    /// Uniform aperture grid on `[0, R0)` preceding the bisection.
    pub grid: usize,
    /// Height added to the family's start data.
    pub offset: f64,
}

impl Default for SweepSetup {
    fn default() -> Self {
        SweepSetup {
            solver: SolverConfig::default(),
            grid: 64,
            offset: 0.0,
        }
    }
}

fn member_polyline(
    n: usize,
    aperture: f64,
    obstacle: &ObstacleProfile,
    setup: &SweepSetup,
) -> Result<Vec<Point>> {
    let bb = obstacle.bbox();
    let cfg = setup
        .solver
        .clone()
        .with_r_max(setup.solver.r_max.max(bb.1 + 1.0));
    let curve = if aperture == 0.0 {
        solve_bowl(n, &cfg)?
    } else {
        solve_wing(n, aperture, &cfg)?.meridian()
    };
    Ok(curve
        .polyline()
        .into_iter()
        .map(|(r, v)| (r, v + setup.offset))
        .collect())
}

fn contact(
    n: usize,
    aperture: f64,
    obstacle: &ObstacleProfile,
    tol: f64,
    setup: &SweepSetup,
) -> Result<Intersection> {
    let poly = member_polyline(n, aperture, obstacle, setup)?;
    Ok(intersect(&poly, obstacle.samples(), tol))
}

/// Supremum of the apertures `R <= R0` whose member meets the obstacle.
///
/// `R = 0` is the bowl. A uniform grid of `setup.grid` apertures on `[0, R0)`
/// is scanned, then the gap above the largest hit is bisected to width `tol`.
pub fn sweep_aperture(
    obstacle: &ObstacleProfile,
    n: usize,
    r0: f64,
    tol: f64,
) -> Result<SweepResult> {
    sweep_aperture_with(obstacle, n, r0, tol, &SweepSetup::default())
}

pub fn sweep_aperture_with(
    obstacle: &ObstacleProfile,
    n: usize,
    r0: f64,
    tol: f64,
    setup: &SweepSetup,
) -> Result<SweepResult> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::InvalidParameter(format!("R0 = {r0} must be > 0")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be > 0")));
    }
    if setup.grid == 0 {
        return Err(Error::InvalidParameter(
            "sweep grid must be nonempty".into(),
        ));
    }
    if !contact(n, r0, obstacle, tol, setup)?.is_empty() {
        return Err(Error::Hypothesis(format!(
            "obstacle meets the member with aperture R0 = {r0}"
        )));
    }
    let grid: Vec<f64> = (0..setup.grid)
        .map(|i| r0 * i as f64 / setup.grid as f64)
        .collect();
    let hits = grid
        .par_iter()
        .map(|&r| Ok(!contact(n, r, obstacle, tol, setup)?.is_empty()))
        .collect::<Result<Vec<bool>>>()?;
    let mut iterations = grid.len() + 1;
    let Some(top) = hits.iter().rposition(|&h| h) else {
        return Ok(SweepResult {
            case: SweepCase::NoContact,
            critical_value: None,
            touching_point: None,
            iterations,
            grid_size: Some(setup.grid),
        });
    };
    let (mut lo, mut hi) = (grid[top], grid.get(top + 1).copied().unwrap_or(r0));
    let mut touch = contact(n, lo, obstacle, tol, setup)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let c = contact(n, mid, obstacle, tol, setup)?;
        iterations += 1;
        if c.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            touch = c;
        }
    }
    Ok(SweepResult {
        case: SweepCase::LastTouch,
        critical_value: Some(0.5 * (lo + hi)),
        touching_point: touch.points.first().copied(),
        iterations,
        grid_size: Some(setup.grid),
    })
}

// Vertical distance from the bowl to the obstacle on the requested side.
struct Gap<'a> {
    bowl: &'a GraphProfile,
    sign: f64,
    offset: f64,
}

impl Gap<'_> {
    fn at(&self, p: Point) -> Result<f64> {
        let u = self.bowl.v_at(p.0.max(self.bowl.r_min()))? + self.offset;
        Ok(self.sign * (p.1 - u))
    }

    // Smallest gap along a segment, with its location. The gap is convex in the
    // segment parameter when the obstacle lies below the convex bowl and
    // concave above it; golden-section search covers the convex case.
    fn segment_min(&self, a: Point, b: Point) -> Result<(f64, Point)> {
        let (ga, gb) = (self.at(a)?, self.at(b)?);
        let mut best = if ga <= gb { (ga, a) } else { (gb, b) };
        if self.sign < 0.0 && a.0 != b.0 {
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let mut f1 = self.at(lerp(a, b, x1))?;
            let mut f2 = self.at(lerp(a, b, x2))?;
            while hi - lo > 1e-12 {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = self.at(lerp(a, b, x1))?;
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = self.at(lerp(a, b, x2))?;
                }
            }
            let t = 0.5 * (lo + hi);
            let g = self.at(lerp(a, b, t))?;
            if g < best.0 {
                best = (g, lerp(a, b, t));
            }
        }
        Ok(best)
    }

    /// First point of the obstacle inside the region swept by translates up to `s`.
    fn swept_contact(&self, pts: &[Point], s: f64) -> Result<Option<Point>> {
        if pts.len() == 1 {
            let g = self.at(pts[0])?;
            return Ok((g <= s).then_some(pts[0]));
        }
        for w in pts.windows(2) {
            let (ga, gb) = (self.at(w[0])?, self.at(w[1])?);
            if ga <= s {
                return Ok(Some(w[0]));
            }
            if gb <= s {
                return Ok(Some(w[1]));
            }
            let (g, p) = self.segment_min(w[0], w[1])?;
            if g <= s {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }
}

/// Smallest vertical translate of the bowl that reaches the obstacle.
///
/// `sign = -1` sweeps downward into an obstacle below the bowl, `+1` upward.
pub fn sweep_translate(
    obstacle: &ObstacleProfile,
    n: usize,
    sign: i32,
    tol: f64,
) -> Result<SweepResult> {
    sweep_translate_with(obstacle, n, sign, tol, &SweepSetup::default())
}

pub fn sweep_translate_with(
    obstacle: &ObstacleProfile,
    n: usize,
    sign: i32,
    tol: f64,
    setup: &SweepSetup,
) -> Result<SweepResult> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!(
            "sign must be +1 or -1, got {sign}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be > 0")));
    }
    let bb = obstacle.bbox();
    let cfg = setup
        .solver
        .clone()
        .with_r_max(setup.solver.r_max.max(bb.1 + 1.0));
    let bowl = graph_view(&solve_bowl(n, &cfg)?, 0.0)?;
    let gap = Gap {
        bowl: &bowl,
        sign: sign as f64,
        offset: setup.offset,
    };
    let pts = obstacle.samples();
    for &p in pts {
        if !(gap.at(p)? > 0.0) {
            return Err(Error::Hypothesis(format!(
                "obstacle vertex {p:?} is not strictly {} the bowl",
                if sign < 0 { "below" } else { "above" }
            )));
        }
    }
    if pts.len() > 1 && gap.swept_contact(pts, 0.0)?.is_some() {
        return Err(Error::Hypothesis("obstacle crosses the bowl".into()));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iterations = 0;
    let mut touch = loop {
        iterations += 1;
        if let Some(p) = gap.swept_contact(pts, hi)? {
            break p;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Hypothesis(
                "obstacle out of reach of the translates".into(),
            ));
        }
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        match gap.swept_contact(pts, mid)? {
            Some(p) => {
                hi = mid;
                touch = p;
            }
            None => lo = mid,
        }
    }
    Ok(SweepResult {
        case: SweepCase::FirstTouch,
        critical_value: Some(0.5 * (lo + hi)),
        touching_point: Some(touch),
        iterations,
        grid_size: None,
    })
}
