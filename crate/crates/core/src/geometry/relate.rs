use super::{classify_point, compute_aabb, Aabb, ConvexHull, Point3, RegionClass};

const DEFAULT_BND: f64 = 1e-7;

/// Non-emptiness of the six intersections between two objects.
///
/// Row one records where the points of `a` fall relative to `b`; row two
/// records which regions of `a` receive points of `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RelMatrix {
    pub a_in_b0: bool,
    pub a_on_db: bool,
    pub a_in_bminus: bool,
    pub a0_has_b: bool,
    pub da_has_b: bool,
    pub aminus_has_b: bool,
}

impl RelMatrix {
    pub fn row1(&self) -> [bool; 3] {
        [self.a_in_b0, self.a_on_db, self.a_in_bminus]
    }

    pub fn row2(&self) -> [bool; 3] {
        [self.a0_has_b, self.da_has_b, self.aminus_has_b]
    }

    pub fn transpose(&self) -> RelMatrix {
        RelMatrix {
            a_in_b0: self.a0_has_b,
            a_on_db: self.da_has_b,
            a_in_bminus: self.aminus_has_b,
            a0_has_b: self.a_in_b0,
            da_has_b: self.a_on_db,
            aminus_has_b: self.a_in_bminus,
        }
    }
}

fn hull_box(h: &ConvexHull) -> Aabb {
    compute_aabb(&h.vertices).expect("hull has vertices")
}

/// Region flags `[interior, boundary, exterior]` hit by `cloud` w.r.t. `hull`.
fn regions_hit(cloud: &[Point3], hull: &ConvexHull, tol: f64) -> [bool; 3] {
    let bx = hull_box(hull);
    let mut hit = [false; 3];
    for &p in cloud {
        let class = if bx.contains(p, tol) { classify_point(hull, p, tol) } else { RegionClass::Exterior };
        let k = match class {
            RegionClass::Interior => 0,
            RegionClass::Boundary => 1,
            RegionClass::Exterior => 2,
        };
        hit[k] = true;
        if hit == [true; 3] {
            break;
        }
    }
    hit
}

pub fn relation_matrix(cloud_a: &[Point3], hull_a: &ConvexHull, cloud_b: &[Point3], hull_b: &ConvexHull) -> RelMatrix {
    relation_matrix_tol(cloud_a, hull_a, cloud_b, hull_b, DEFAULT_BND)
}

pub fn relation_matrix_tol(
    cloud_a: &[Point3],
    hull_a: &ConvexHull,
    cloud_b: &[Point3],
    hull_b: &ConvexHull,
    tol: f64,
) -> RelMatrix {
    let r1 = regions_hit(cloud_a, hull_b, tol);
    let r2 = regions_hit(cloud_b, hull_a, tol);
    RelMatrix {
        a_in_b0: r1[0],
        a_on_db: r1[1],
        a_in_bminus: r1[2],
        a0_has_b: r2[0],
        da_has_b: r2[1],
        aminus_has_b: r2[2],
    }
}

/// Euclidean distance from `p` to triangle `abc`.
pub fn point_triangle_distance(p: Point3, a: Point3, b: Point3, c: Point3) -> f64 {
    p.distance(closest_on_triangle(p, a, b, c))
}

fn closest_on_triangle(p: Point3, a: Point3, b: Point3, c: Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Distance from `p` to the closed hull (zero inside).
pub fn point_hull_distance(hull: &ConvexHull, p: Point3) -> f64 {
    if hull.max_plane_distance(p) <= 0.0 {
        return 0.0;
    }
    hull.faces
        .iter()
        .map(|f| point_triangle_distance(p, hull.vertices[f[0]], hull.vertices[f[1]], hull.vertices[f[2]]))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest distance from a point of `cloud` to `hull`, stopping early once
/// it drops to `stop` or below.
fn min_cloud_distance(cloud: &[Point3], hull: &ConvexHull, mut best: f64, stop: f64) -> f64 {
    let bx = hull_box(hull);
    for &p in cloud {
        if bx.distance_to_point(p) >= best {
            continue;
        }
        best = best.min(point_hull_distance(hull, p));
        if best <= stop {
            break;
        }
    }
    best
}

/// Minimum distance between the two surfaces, measured from each cloud to
/// the other hull.
pub fn surface_gap(cloud_a: &[Point3], hull_a: &ConvexHull, cloud_b: &[Point3], hull_b: &ConvexHull) -> f64 {
    let g = min_cloud_distance(cloud_a, hull_b, f64::INFINITY, 0.0);
    min_cloud_distance(cloud_b, hull_a, g, 0.0)
}

pub fn touch(cloud_a: &[Point3], hull_a: &ConvexHull, cloud_b: &[Point3], hull_b: &ConvexHull, tol: f64) -> bool {
    let rm = relation_matrix(cloud_a, hull_a, cloud_b, hull_b);
    touch_from_matrix(&rm, cloud_a, hull_a, cloud_b, hull_b, tol)
}

/// Touch given an already computed relation matrix.
///
/// Disjoint interiors touch when the surface gap is within `tol`. When one
/// object sits inside the other without the reverse, they touch when some
/// point of the container lies within `tol` of the inner object's hull.
/// Mutual interpenetration never touches.
pub fn touch_from_matrix(
    rm: &RelMatrix,
    cloud_a: &[Point3],
    hull_a: &ConvexHull,
    cloud_b: &[Point3],
    hull_b: &ConvexHull,
    tol: f64,
) -> bool {
    if hull_box(hull_a).distance(&hull_box(hull_b)) > tol {
        return false;
    }
    match (rm.a_in_b0, rm.a0_has_b) {
        (false, false) => {
            let g = min_cloud_distance(cloud_a, hull_b, f64::INFINITY, tol);
            g <= tol || min_cloud_distance(cloud_b, hull_a, g, tol) <= tol
        }
        (true, false) => min_cloud_distance(cloud_b, hull_a, f64::INFINITY, tol) <= tol,
        (false, true) => min_cloud_distance(cloud_a, hull_b, f64::INFINITY, tol) <= tol,
        (true, true) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::compute_convex_hull;

    fn cube(lo: [f64; 3], side: f64) -> Vec<Point3> {
        Aabb::new(Point3::from_array(lo), Point3::from_array(lo) + Point3::new(side, side, side)).corners().to_vec()
    }

    fn rel(a: &[Point3], b: &[Point3]) -> RelMatrix {
        relation_matrix(a, &compute_convex_hull(a).unwrap(), b, &compute_convex_hull(b).unwrap())
    }

    fn touches(a: &[Point3], b: &[Point3]) -> bool {
        touch(a, &compute_convex_hull(a).unwrap(), b, &compute_convex_hull(b).unwrap(), 5e-3)
    }

    #[test]
    fn nested_cubes() {
        let a = cube([1.0, 1.0, 1.0], 1.0);
        let b = cube([0.0, 0.0, 0.0], 3.0);
        let m = rel(&a, &b);
        assert_eq!(m.row1(), [true, false, false]);
        assert_eq!(m.row2(), [false, false, true]);
    }

    #[test]
    fn far_cubes() {
        let m = rel(&cube([0.0; 3], 1.0), &cube([5.0; 3], 1.0));
        assert_eq!(m.row1(), [false, false, true]);
        assert_eq!(m.row2(), [false, false, true]);
    }

    #[test]
    fn coincident_cubes_need_interior_samples() {
        let mut a = cube([0.0; 3], 1.0);
        a.push(Point3::new(0.5, 0.5, 0.5));
        let m = rel(&a, &a);
        assert!(m.a_in_b0 && m.a0_has_b);
    }

    #[test]
    fn transposition() {
        let a = cube([0.0; 3], 1.0);
        let mut b = cube([0.5, 0.2, 0.3], 1.0);
        b.push(Point3::new(0.9, 0.9, 0.9));
        assert_eq!(rel(&a, &b), rel(&b, &a).transpose());
    }

    #[test]
    fn touch_cases() {
        assert!(touches(&cube([0.0; 3], 1.0), &cube([1.0, 0.0, 0.0], 1.0)));
        assert!(!touches(&cube([0.0; 3], 1.0), &cube([1.5, 0.0, 0.0], 1.0)));
        let mut a = cube([0.0; 3], 1.0);
        a.push(Point3::new(0.9, 0.5, 0.5));
        let mut b = cube([0.8, 0.0, 0.0], 1.0);
        b.push(Point3::new(0.9, 0.5, 0.5));
        assert!(!touches(&a, &b));
    }

    #[test]
    fn triangle_distance() {
        let (a, b, c) = (Point3::ZERO, Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0));
        assert!((point_triangle_distance(Point3::new(0.2, 0.2, 2.0), a, b, c) - 2.0).abs() < 1e-12);
        assert!((point_triangle_distance(Point3::new(-1.0, 0.0, 0.0), a, b, c) - 1.0).abs() < 1e-12);
        let d = point_triangle_distance(Point3::new(1.0, 1.0, 0.0), a, b, c);
        assert!((d - 0.5f64.sqrt()).abs() < 1e-12);
    }
}
