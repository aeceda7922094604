#![allow(dead_code)]

use manipsem::geometry::{Point3, RegionClass};

/// Outward supporting planes through every non-degenerate triple of `pts`,
/// found by exhaustive enumeration. Each plane is `(unit normal, offset)`.
pub fn brute_force_planes(pts: &[Point3], eps: f64) -> Vec<(Point3, f64)> {
    let mut planes = Vec::new();
    let n = pts.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nn = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                let len = nn.norm();
                if len < 1e-12 {
                    continue;
                }
                let nrm = nn * (1.0 / len);
                let d = -nrm.dot(pts[i]);
                let (mut pos, mut neg) = (false, false);
                for p in pts {
                    let s = nrm.dot(*p) + d;
                    pos |= s > eps;
                    neg |= s < -eps;
                }
                match (pos, neg) {
                    (false, true) => planes.push((nrm, d)),
                    (true, false) => planes.push((-nrm, -d)),
                    _ => {}
                }
            }
        }
    }
    planes
}

/// Points lying on some supporting plane that are not strictly between
/// other such points: the hull vertex set for clouds in general position.
pub fn brute_force_vertices(pts: &[Point3], eps: f64) -> Vec<Point3> {
    let planes = brute_force_planes(pts, eps);
    pts.iter()
        .copied()
        .filter(|p| planes.iter().any(|(n, d)| (n.dot(*p) + d).abs() <= eps))
        .collect()
}

pub fn brute_force_classify(planes: &[(Point3, f64)], p: Point3, tol: f64) -> RegionClass {
    let d = planes.iter().map(|(n, d)| n.dot(p) + d).fold(f64::NEG_INFINITY, f64::max);
    if d > tol {
        RegionClass::Exterior
    } else if d >= -tol {
        RegionClass::Boundary
    } else {
        RegionClass::Interior
    }
}

pub fn cube(lo: [f64; 3], hi: [f64; 3]) -> Vec<Point3> {
    let mut v = Vec::new();
    for x in [lo[0], hi[0]] {
        for y in [lo[1], hi[1]] {
            for z in [lo[2], hi[2]] {
                v.push(Point3::new(x, y, z));
            }
        }
    }
    v
}

/// Cube corners plus a regular interior lattice so that every region of the
/// box is sampled.
pub fn solid_box(lo: [f64; 3], hi: [f64; 3], per_axis: usize) -> Vec<Point3> {
    let mut v = Vec::new();
    for i in 0..=per_axis {
        for j in 0..=per_axis {
            for k in 0..=per_axis {
                let f = |a: usize, t: usize| lo[a] + (hi[a] - lo[a]) * t as f64 / per_axis as f64;
                v.push(Point3::new(f(0, i), f(1, j), f(2, k)));
            }
        }
    }
    v
}

use manipsem::geometry::ObjectModel;
use manipsem::relations::SsrLabel;

pub fn model(lo: [f64; 3], hi: [f64; 3], per_axis: usize) -> ObjectModel {
    ObjectModel::new(solid_box(lo, hi, per_axis), 5e-3).unwrap()
}

/// One constructed cube pair per static relation label.
pub fn relation_catalogue() -> Vec<(SsrLabel, ObjectModel, ObjectModel)> {
    use SsrLabel::*;
    let unit = |lo: [f64; 3]| model(lo, [lo[0] + 1.0, lo[1] + 1.0, lo[2] + 1.0], 3);
    let big = || model([0.0; 3], [3.0; 3], 3);
    let mut v = vec![
        (Ab, unit([0.0, 2.0, 0.0]), unit([0.0; 3])),
        (Be, unit([0.0; 3]), unit([0.0, 2.0, 0.0])),
        (To, unit([0.0, 1.0, 0.0]), unit([0.0; 3])),
        (Bo, unit([0.0; 3]), unit([0.0, 1.0, 0.0])),
        (Ar, unit([1.1, 0.0, 0.0]), unit([0.0; 3])),
        (ArT, unit([1.0, 0.0, 0.0]), unit([0.0; 3])),
        (In, model([0.8, 0.0, 0.8], [1.4, 0.6, 1.4], 3), big()),
        (Su, big(), model([0.8, 0.0, 0.8], [1.4, 0.6, 1.4], 3)),
        (Wi, model([1.2; 3], [1.8; 3], 3), big()),
        (Co, big(), model([1.2; 3], [1.8; 3], 3)),
        (Pwi, model([1.2, 2.5, 1.2], [1.8, 3.5, 1.8], 3), big()),
        (Pco, big(), model([1.2, 2.5, 1.2], [1.8, 3.5, 1.8], 3)),
        (Cr, model([0.0; 3], [1.0; 3], 4), model([0.5; 3], [1.5; 3], 4)),
    ];
    v.push((NoRelation, unit([5.0, 0.0, 0.0]), unit([0.0; 3])));
    v
}

use manipsem::grammar::{Bindings, MappingLibrary, SubjectPat, Value};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const IDS: [&str; 8] = ["cup", "bowl", "spoon", "knife", "board", "plate", "sponge", "box"];

pub fn random_bindings(lib: &MappingLibrary, name: &str, rng: &mut ChaCha8Rng) -> Bindings {
    let p = lib.get(name).unwrap();
    let places = p.place_variables();
    let mut ids: Vec<&str> = IDS.to_vec();
    ids.shuffle(rng);
    let mut ground_free = true;
    let mut b = Bindings::new();
    for v in p.variables() {
        let subject = p.templates.iter().any(|t| matches!(&t.subject, SubjectPat::Me(x) if *x == v));
        if ground_free && places.contains(&v) && !subject && rng.gen_bool(0.5) {
            ground_free = false;
            b.insert(v, Value::Ground);
        } else {
            b.insert(v, Value::Object(ids.pop().unwrap().to_string()));
        }
    }
    b
}
