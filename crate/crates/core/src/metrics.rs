//! Distances between step functions on `[0, 1]`.
//!
//! The M2 distance is the Hausdorff distance between completed graphs under
//! the plane metric `|t1 - t2| ∨ |z1 - z2|`. Completed graphs of step
//! functions are orthogonal polylines, and the L∞ distance from a point to an
//! axis-aligned segment is the larger of the two coordinate gaps. Along a
//! source segment each target segment therefore contributes a convex
//! piecewise-linear distance profile with slopes in {-1, 0, 1}; the lower
//! envelope of those profiles attains its maximum either at a segment
//! endpoint or where two profiles cross, so enumerating crossings is exact.
//! When a source segment sees too many candidate targets the maximum is
//! instead bracketed by branch and bound on the 1-Lipschitz envelope.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::cadlag::{merged_partition, CompletedGraph, Segment, StepFunction};
use crate::error::{domain, Result};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Above this many candidate targets per source segment, subdivision is used.
const EXACT_TARGET_LIMIT: usize = 96;

/// Strategy for the directed Hausdorff sup along each source segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum M2Method {
    #[default]
    Auto,
    Exact,
    Subdivision,
}

/// `sup_t |f(t) - g(t)|`, exact over the merged jump partition.
pub fn d_uniform(f: &StepFunction, g: &StepFunction) -> f64 {
    merged_partition(f, g).fold((f.initial() - g.initial()).abs(), |acc, (_, a, b)| {
        acc.max((a - b).abs())
    })
}

/// Skorokhod M2 distance, accurate to within `tol`.
pub fn d_m2(f: &StepFunction, g: &StepFunction, tol: f64) -> Result<f64> {
    d_m2_with(f, g, tol, M2Method::Auto)
}

pub fn d_m2_with(f: &StepFunction, g: &StepFunction, tol: f64, method: M2Method) -> Result<f64> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if f == g {
        return Ok(0.0);
    }
    let (a, b) = (f.completed_graph(), g.completed_graph());
    let ab = directed_hausdorff(&a, &b, tol, method);
    let ba = directed_hausdorff(&b, &a, tol, method);
    Ok(ab.max(ba))
}

/// `d*_M1` for nondecreasing step functions. The oscillation part of the
/// metric vanishes on monotone paths, leaving the M2 distance.
pub fn d_m1_monotone(f: &StepFunction, g: &StepFunction, tol: f64) -> Result<f64> {
    f.check_nondecreasing()?;
    g.check_nondecreasing()?;
    d_m2(f, g, tol)
}

/// Max of the componentwise [`d_m1_monotone`] distances.
pub fn d_product(
    f: (&StepFunction, &StepFunction),
    g: (&StepFunction, &StepFunction),
    tol: f64,
) -> Result<f64> {
    Ok(d_m1_monotone(f.0, g.0, tol)?.max(d_m1_monotone(f.1, g.1, tol)?))
}

/// Oscillation of `f` over the window `[t - rho, t + rho] ∩ [0, 1]`: the
/// largest distance from `f(t2)` to the interval spanned by `f(t1)` and `f(t3)`
/// over `t1 < t2 < t3` in the window.
pub fn oscillation(f: &StepFunction, t: f64, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("time {t} outside [0, 1]"));
    }
    if !(rho > 0.0) {
        return domain(format!("rho must be positive, got {rho}"));
    }
    let lo = (t - rho).max(0.0);
    let hi = (t + rho).min(1.0);
    // values on consecutive pieces of the window; every piece holds at least one point
    let mut levels = vec![f.value_at(lo)];
    levels.extend(
        f.jumps()
            .iter()
            .filter(|j| j.t > lo && j.t <= hi)
            .map(|j| j.value),
    );
    let m = levels.len();
    if m < 3 {
        return Ok(0.0);
    }
    let mut suffix_min = vec![f64::INFINITY; m + 1];
    let mut suffix_max = vec![f64::NEG_INFINITY; m + 1];
    for i in (0..m).rev() {
        suffix_min[i] = suffix_min[i + 1].min(levels[i]);
        suffix_max[i] = suffix_max[i + 1].max(levels[i]);
    }
    let (mut pmin, mut pmax) = (levels[0], levels[0]);
    let mut best: f64 = 0.0;
    for b in 1..m - 1 {
        let v = levels[b];
        // v above both ends: v - max(u, w) is largest with u, w at their minima
        best = best.max(v - pmin.max(suffix_min[b + 1]));
        best = best.max(pmax.min(suffix_max[b + 1]) - v);
        pmin = pmin.min(v);
        pmax = pmax.max(v);
    }
    Ok(best.max(0.0))
}

/// `sup_{a ∈ A} inf_{b ∈ B} |a - b|_∞`, exact or within `tol`.
pub fn directed_hausdorff(a: &CompletedGraph, b: &CompletedGraph, tol: f64, method: M2Method) -> f64 {
    let targets: Vec<Rect> = b.segments().iter().map(Rect::from).collect();
    let mut best = 0.0f64;
    for seg in a.segments() {
        let path = Path::new(&seg);
        // every profile's maximum bounds the envelope from above
        let upper = targets
            .iter()
            .map(|r| path.profile(r).max_on(path.len))
            .fold(f64::INFINITY, f64::min);
        if upper <= best {
            continue;
        }
        let profiles: Vec<Profile> = targets
            .iter()
            .map(|r| path.profile(r))
            .filter(|p| p.min_on(path.len) <= upper)
            .collect();
        let exact = match method {
            M2Method::Exact => true,
            M2Method::Subdivision => false,
            M2Method::Auto => profiles.len() <= EXACT_TARGET_LIMIT,
        };
        let v = if exact {
            envelope_max_exact(&profiles, path.len)
        } else {
            envelope_max_bnb(&profiles, path.len, tol, best)
        };
        best = best.max(v);
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    t0: f64,
    t1: f64,
    z0: f64,
    z1: f64,
}

impl From<&Segment> for Rect {
    fn from(s: &Segment) -> Self {
        Rect {
            t0: s.start.0.min(s.end.0),
            t1: s.start.0.max(s.end.0),
            z0: s.start.1.min(s.end.1),
            z1: s.start.1.max(s.end.1),
        }
    }
}

fn gap(x: f64, lo: f64, hi: f64) -> f64 {
    (lo - x).max(x - hi).max(0.0)
}

/// A source segment `p(s) = start + s * dir`, `s ∈ [0, len]`, moving along one axis.
struct Path {
    start: (f64, f64),
    along_t: bool,
    sign: f64,
    len: f64,
}

impl Path {
    fn new(s: &Segment) -> Self {
        let dt = s.end.0 - s.start.0;
        let dz = s.end.1 - s.start.1;
        let along_t = dt != 0.0;
        let d = if along_t { dt } else { dz };
        Path {
            start: s.start,
            along_t,
            sign: if d < 0.0 { -1.0 } else { 1.0 },
            len: d.abs(),
        }
    }

    fn profile(&self, r: &Rect) -> Profile {
        let (x0, lo, hi, fixed) = if self.along_t {
            (self.start.0, r.t0, r.t1, gap(self.start.1, r.z0, r.z1))
        } else {
            (self.start.1, r.z0, r.z1, gap(self.start.0, r.t0, r.t1))
        };
        // max(lo - x(s), x(s) - hi, fixed) with x(s) = x0 + sign * s
        Profile {
            lines: [
                Line { c: lo - x0, m: -self.sign },
                Line { c: x0 - hi, m: self.sign },
                Line { c: fixed, m: 0.0 },
            ],
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Line {
    c: f64,
    m: f64,
}

impl Line {
    fn at(&self, s: f64) -> f64 {
        self.c + self.m * s
    }
}

/// Distance from `p(s)` to one target segment: a max of three lines.
#[derive(Debug, Clone, Copy)]
struct Profile {
    lines: [Line; 3],
}

impl Profile {
    fn at(&self, s: f64) -> f64 {
        self.lines.iter().map(|l| l.at(s)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn active(&self, s: f64) -> Line {
        *self
            .lines
            .iter()
            .max_by(|a, b| a.at(s).total_cmp(&b.at(s)))
            .unwrap()
    }

    fn max_on(&self, len: f64) -> f64 {
        self.at(0.0).max(self.at(len))
    }

    fn min_on(&self, len: f64) -> f64 {
        let mut m = self.at(0.0).min(self.at(len));
        for s in self.breakpoints(len) {
            m = m.min(self.at(s));
        }
        m
    }

    fn breakpoints(&self, len: f64) -> impl Iterator<Item = f64> + '_ {
        let l = &self.lines;
        [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .filter_map(move |(i, j)| crossing(l[i], l[j]))
            .filter(move |&s| s > 0.0 && s < len)
    }
}

fn crossing(a: Line, b: Line) -> Option<f64> {
    let dm = a.m - b.m;
    (dm != 0.0).then(|| (b.c - a.c) / dm)
}

fn envelope(profiles: &[Profile], s: f64) -> f64 {
    profiles.iter().map(|p| p.at(s)).fold(f64::INFINITY, f64::min)
}

/// Maximum of the lower envelope over `[0, len]`, by crossing enumeration.
fn envelope_max_exact(profiles: &[Profile], len: f64) -> f64 {
    let mut best = envelope(profiles, 0.0).max(envelope(profiles, len));
    let mut cuts = Vec::with_capacity(8);
    for (i, p) in profiles.iter().enumerate() {
        for q in &profiles[i + 1..] {
            cuts.clear();
            cuts.push(0.0);
            cuts.push(len);
            cuts.extend(p.breakpoints(len));
            cuts.extend(q.breakpoints(len));
            cuts.sort_by(f64::total_cmp);
            for w in cuts.windows(2) {
                let (u, v) = (w[0], w[1]);
                if v <= u {
                    continue;
                }
                let mid = 0.5 * (u + v);
                if let Some(s) = crossing(p.active(mid), q.active(mid)) {
                    if s > u && s < v {
                        best = best.max(envelope(profiles, s));
                    }
                }
            }
        }
    }
    best
}

#[derive(Debug, PartialEq)]
struct Cell {
    upper: f64,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

fn cell(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Cell {
    // the envelope is 1-Lipschitz in s
    let upper = 0.5 * (f_lo + f_hi + (hi - lo));
    Cell { upper, lo, hi, f_lo, f_hi }
}

/// Maximum of the lower envelope over `[0, len]` to within `tol`, never
/// overestimating. Cells whose bound cannot beat `floor` are discarded.
fn envelope_max_bnb(profiles: &[Profile], len: f64, tol: f64, floor: f64) -> f64 {
    let f0 = envelope(profiles, 0.0);
    let f1 = envelope(profiles, len);
    let mut best = f0.max(f1);
    let mut heap = BinaryHeap::new();
    heap.push(cell(0.0, len, f0, f1));
    while let Some(c) = heap.pop() {
        if c.upper <= best.max(floor) + tol {
            break;
        }
        let mid = 0.5 * (c.lo + c.hi);
        if mid <= c.lo || mid >= c.hi {
            continue;
        }
        let fm = envelope(profiles, mid);
        best = best.max(fm);
        heap.push(cell(c.lo, mid, c.f_lo, fm));
        heap.push(cell(mid, c.hi, fm, c.f_hi));
    }
    best
}
