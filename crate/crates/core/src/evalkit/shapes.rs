//! Box-composite objects: sampled surfaces for the traces and an analytic
//! relation classifier for the ground truth.

use rand::Rng;

use crate::config::Config;
use crate::geometry::{Aabb, Point3};
use crate::relations::SsrLabel;

/// Axis-aligned rectangle (one axis collapsed) in object coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub lo: Point3,
    pub hi: Point3,
    /// Sample spacing override for surfaces other objects rest against.
    pub spacing: Option<f64>,
}

impl Rect {
    fn new(lo: [f64; 3], hi: [f64; 3]) -> Rect {
        Rect { lo: Point3::from_array(lo), hi: Point3::from_array(hi), spacing: None }
    }

    fn dense(mut self, s: f64) -> Rect {
        self.spacing = Some(s);
        self
    }

    fn area(&self) -> f64 {
        let e = self.hi - self.lo;
        let [a, b, c] = e.to_array();
        a * b + b * c + a * c
    }

    fn at(&self, p: Point3) -> Aabb {
        Aabb::new(self.lo + p, self.hi + p)
    }
}

/// An object as a box with surface rectangles; its convex hull is the box.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub size: Point3,
    pub rects: Vec<Rect>,
}

/// Top-face cut-out `[x0, x1] x [z0, z1]` in object coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Opening {
    pub x: (f64, f64),
    pub z: (f64, f64),
}

const WALL_SPACING: f64 = 0.008;

/// The face at `y` with `cut` removed, as up to four rectangles.
fn face_minus(sx: f64, sz: f64, y: f64, cut: Option<Opening>) -> Vec<Rect> {
    match cut {
        None => vec![Rect::new([0.0, y, 0.0], [sx, y, sz])],
        Some(o) => vec![
            Rect::new([0.0, y, 0.0], [o.x.0, y, sz]),
            Rect::new([o.x.1, y, 0.0], [sx, y, sz]),
            Rect::new([o.x.0, y, 0.0], [o.x.1, y, o.z.0]),
            Rect::new([o.x.0, y, o.z.1], [o.x.1, y, sz]),
        ],
    }
}

fn sides(sx: f64, sy: f64, sz: f64) -> Vec<Rect> {
    vec![
        Rect::new([0.0, 0.0, 0.0], [0.0, sy, sz]),
        Rect::new([sx, 0.0, 0.0], [sx, sy, sz]),
        Rect::new([0.0, 0.0, 0.0], [sx, sy, 0.0]),
        Rect::new([0.0, 0.0, sz], [sx, sy, sz]),
    ]
}

/// Four walls of a vertical shaft through `o` between heights `y0` and `y1`.
fn shaft(o: Opening, y0: f64, y1: f64) -> Vec<Rect> {
    vec![
        Rect::new([o.x.0, y0, o.z.0], [o.x.0, y1, o.z.1]).dense(WALL_SPACING),
        Rect::new([o.x.1, y0, o.z.0], [o.x.1, y1, o.z.1]).dense(WALL_SPACING),
        Rect::new([o.x.0, y0, o.z.0], [o.x.1, y1, o.z.0]).dense(WALL_SPACING),
        Rect::new([o.x.0, y0, o.z.1], [o.x.1, y1, o.z.1]).dense(WALL_SPACING),
    ]
}

impl Shape {
    pub fn solid(size: [f64; 3]) -> Shape {
        let [sx, sy, sz] = size;
        let mut rects = sides(sx, sy, sz);
        rects.extend(face_minus(sx, sz, 0.0, None));
        rects.extend(face_minus(sx, sz, sy, None));
        Shape { size: Point3::from_array(size), rects }
    }

    /// Open-top container with a raised inner floor at `floor`.
    pub fn open_top(size: [f64; 3], floor: f64, floor_spacing: f64) -> Shape {
        let [sx, sy, sz] = size;
        let mut rects = sides(sx, sy, sz);
        rects.extend(face_minus(sx, sz, 0.0, None));
        rects.push(Rect::new([0.0, floor, 0.0], [sx, floor, sz]).dense(floor_spacing));
        Shape { size: Point3::from_array(size), rects }
    }

    /// Solid with a blind hole of `depth` under `o`.
    pub fn with_hole(size: [f64; 3], o: Opening, depth: f64) -> Shape {
        let [sx, sy, sz] = size;
        let mut rects = sides(sx, sy, sz);
        rects.extend(face_minus(sx, sz, 0.0, None));
        rects.extend(face_minus(sx, sz, sy, Some(o)));
        rects.extend(shaft(o, sy - depth, sy));
        rects.push(Rect::new([o.x.0, sy - depth, o.z.0], [o.x.1, sy - depth, o.z.1]));
        Shape { size: Point3::from_array(size), rects }
    }

    /// Solid with a through slit under `o`.
    pub fn with_slit(size: [f64; 3], o: Opening) -> Shape {
        let [sx, sy, sz] = size;
        let mut rects = sides(sx, sy, sz);
        rects.extend(face_minus(sx, sz, 0.0, Some(o)));
        rects.extend(face_minus(sx, sz, sy, Some(o)));
        rects.extend(shaft(o, 0.0, sy));
        Shape { size: Point3::from_array(size), rects }
    }

    /// Regular grid samples, about `target` on the ordinary surfaces.
    /// Returns each point with a flag telling whether it may be jittered.
    pub fn samples(&self, target: usize) -> Vec<(Point3, Option<(usize, Rect)>)> {
        let plain: f64 = self.rects.iter().filter(|r| r.spacing.is_none()).map(Rect::area).sum();
        let base = (plain / target.max(8) as f64).sqrt().max(1e-4);
        let mut out: Vec<(Point3, Option<(usize, Rect)>)> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for r in &self.rects {
            let step = r.spacing.unwrap_or(base);
            let e = r.hi - r.lo;
            let axes: Vec<usize> = (0..3).filter(|&i| e.axis(i) > 1e-12).collect();
            let counts: Vec<usize> = axes.iter().map(|&i| ((e.axis(i) / step).ceil() as usize).max(1) + 1).collect();
            let (na, nb) = (counts.first().copied().unwrap_or(1), counts.get(1).copied().unwrap_or(1));
            for i in 0..na {
                for j in 0..nb {
                    let mut p = r.lo.to_array();
                    let idx = [i, j];
                    let n = [na, nb];
                    for (k, &ax) in axes.iter().enumerate() {
                        p[ax] += e.axis(ax) * idx[k] as f64 / (n[k] - 1) as f64;
                    }
                    let key = p.map(|v| (v * 1e9).round() as i64);
                    if !seen.insert(key) {
                        continue;
                    }
                    let interior = axes.len() == 2 && i > 0 && j > 0 && i + 1 < na && j + 1 < nb;
                    let jitter = interior.then(|| (axes[0] * 3 + axes[1], *r));
                    out.push((Point3::from_array(p), jitter));
                }
            }
        }
        out
    }
}

/// Tangential jitter of interior samples, kept inside their rectangle.
pub fn jitter<R: Rng>(samples: &[(Point3, Option<(usize, Rect)>)], amp: f64, rng: &mut R) -> Vec<Point3> {
    samples
        .iter()
        .map(|(p, j)| match j {
            Some((code, r)) if amp > 0.0 => {
                let mut q = p.to_array();
                for ax in [code / 3, code % 3] {
                    q[ax] = (q[ax] + rng.gen_range(-amp..=amp)).clamp(r.lo.axis(ax), r.hi.axis(ax));
                }
                Point3::from_array(q)
            }
            _ => *p,
        })
        .collect()
}

/// A shape placed in the world by its minimum corner.
#[derive(Debug, Clone, Copy)]
pub struct Placed<'a> {
    pub shape: &'a Shape,
    pub at: Point3,
}

impl Placed<'_> {
    pub fn bbox(&self) -> Aabb {
        Aabb::new(self.at, self.at + self.shape.size)
    }

    fn rects(&self) -> impl Iterator<Item = Aabb> + '_ {
        self.shape.rects.iter().map(|r| r.at(self.at))
    }

    /// Some surface of `self` meets the open interior of `b`.
    fn enters(&self, b: &Aabb) -> bool {
        self.rects().any(|r| (0..3).all(|i| r.min(i) < b.max(i) && b.min(i) < r.max(i)))
    }

    fn leaves(&self, b: &Aabb) -> bool {
        self.rects().any(|r| (0..3).any(|i| r.min(i) < b.min(i) - 1e-12 || r.max(i) > b.max(i) + 1e-12))
    }

    fn surface_distance(&self, b: &Aabb) -> f64 {
        self.rects().map(|r| r.distance(b)).fold(f64::INFINITY, f64::min)
    }
}

/// Analytic static relation of `a` to `b` from the box description alone.
pub fn truth_ssr(a: Placed, b: Placed, cfg: &Config) -> SsrLabel {
    let (ba, bb) = (a.bbox(), b.bbox());
    let tol = cfg.eps_touch;
    let (a_in, b_in) = (a.enters(&bb), b.enters(&ba));
    let alias = |l: SsrLabel| match (cfg.in_su_alias, l) {
        (true, SsrLabel::In) => SsrLabel::Wi,
        (true, SsrLabel::Su) => SsrLabel::Co,
        _ => l,
    };
    if a_in && b_in {
        return SsrLabel::Cr;
    }
    if a_in {
        if a.leaves(&bb) {
            return SsrLabel::Pwi;
        }
        return alias(if b.surface_distance(&ba) <= tol { SsrLabel::In } else { SsrLabel::Wi });
    }
    if b_in {
        if b.leaves(&ba) {
            return SsrLabel::Pco;
        }
        return alias(if a.surface_distance(&bb) <= tol { SsrLabel::Su } else { SsrLabel::Co });
    }
    let touching = ba.distance(&bb) <= tol;
    let xz = ba.overlaps_on(&bb, 0) && ba.overlaps_on(&bb, 2);
    let up = ba.min(1) - bb.max(1);
    let down = bb.min(1) - ba.max(1);
    if touching {
        if xz && up.abs() <= tol && (down.abs() > tol || up >= down) {
            SsrLabel::To
        } else if xz && down.abs() <= tol {
            SsrLabel::Bo
        } else {
            SsrLabel::ArT
        }
    } else if xz && up > 0.0 {
        SsrLabel::Ab
    } else if xz && down > 0.0 {
        SsrLabel::Be
    } else if ba.distance(&bb) <= cfg.relation.theta_near {
        SsrLabel::Ar
    } else {
        SsrLabel::NoRelation
    }
}
