//! 3D gift wrapping.
//!
//! The hull is wrapped face by face: starting from one supporting plane, the
//! plane is rotated about each open boundary edge until it meets the next
//! point of the cloud. All points lying on a supporting plane form one
//! planar polygon, which is fan-triangulated, so coplanar samples on a flat
//! face never become spurious vertices.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{GeometryError, Plane, Point3, RegionClass};

/// Boundary representation of a convex polytope with outward face planes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    pub vertices: Vec<Point3>,
    /// Counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
    /// One outward plane per face.
    pub face_planes: Vec<Plane>,
}

impl ConvexHull {
    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// Enclosed volume via the divergence theorem.
    pub fn volume(&self) -> f64 {
        let o = self.vertices[0];
        self.faces
            .iter()
            .map(|f| {
                let (a, b, c) = (self.vertices[f[0]] - o, self.vertices[f[1]] - o, self.vertices[f[2]] - o);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    /// Each undirected edge used by exactly two faces, once in each direction.
    pub fn is_closed(&self) -> bool {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                *directed.entry((f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        directed.iter().all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// Largest signed distance of any point from any face plane.
    pub fn max_plane_distance(&self, p: Point3) -> f64 {
        self.face_planes.iter().map(|pl| pl.signed_distance(p)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Interior if strictly inside every face plane by more than `tol`,
/// Exterior if outside some plane by more than `tol`, Boundary otherwise.
pub fn classify_point(hull: &ConvexHull, p: Point3, tol: f64) -> RegionClass {
    let d = hull.max_plane_distance(p);
    if d > tol {
        RegionClass::Exterior
    } else if d >= -tol {
        RegionClass::Boundary
    } else {
        RegionClass::Interior
    }
}

/// Builds the convex hull of `points` by gift wrapping.
///
/// Fails with `DegenerateCloud` for fewer than four distinct points or a
/// coplanar cloud.
pub fn compute_convex_hull(points: &[Point3]) -> Result<ConvexHull, GeometryError> {
    if points.is_empty() {
        return Err(GeometryError::EmptyCloud);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    // Lexicographic order fixes every tie-break below.
    let mut pts: Vec<Point3> = points.to_vec();
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 4 {
        return Err(GeometryError::DegenerateCloud("fewer than 4 distinct points"));
    }
    Wrapper::new(pts)?.run()
}

struct Face {
    polygon: Vec<usize>,
    plane: Plane,
}

struct Wrapper {
    pts: Vec<Point3>,
    centroid: Point3,
    eps: f64,
}

impl Wrapper {
    fn new(pts: Vec<Point3>) -> Result<Self, GeometryError> {
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let eps = 1e-9 * (hi - lo).norm().max(1.0);
        let w = Wrapper { centroid: Point3::centroid(&pts), pts, eps };
        w.check_volume()?;
        Ok(w)
    }

    fn check_volume(&self) -> Result<(), GeometryError> {
        let a = self.pts[0];
        let b = *self
            .pts
            .iter()
            .max_by(|p, q| p.distance(a).total_cmp(&q.distance(a)))
            .unwrap();
        if b.distance(a) <= self.eps {
            return Err(GeometryError::DegenerateCloud("all points coincide"));
        }
        let u = (b - a).normalized();
        let off_line = |p: Point3| {
            let w = p - a;
            (w - u * w.dot(u)).norm()
        };
        let c = *self.pts.iter().max_by(|p, q| off_line(**p).total_cmp(&off_line(**q))).unwrap();
        if off_line(c) <= self.eps {
            return Err(GeometryError::DegenerateCloud("collinear points"));
        }
        let n = u.cross(c - a).normalized();
        if self.pts.iter().all(|p| (*p - a).dot(n).abs() <= self.eps) {
            return Err(GeometryError::DegenerateCloud("coplanar points"));
        }
        Ok(())
    }

    fn off_axis(&self, a: Point3, u: Point3, p: Point3) -> bool {
        let w = p - a;
        (w - u * w.dot(u)).norm() > self.eps
    }

    /// Rotates the supporting plane `(a, n)` about the axis through `a` with
    /// direction `u`, moving its far side (direction `m`) inward, and returns
    /// the first point it meets.
    fn wrap(&self, a: Point3, u: Point3, n: Point3, m: Point3) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (i, &p) in self.pts.iter().enumerate() {
            if !self.off_axis(a, u, p) {
                continue;
            }
            let w = p - a;
            let s = w.dot(n);
            let t = w.dot(m);
            let psi = (-s).max(0.0).atan2(t);
            if best.is_none_or(|(b, _)| psi < b) {
                best = Some((psi, i));
            }
        }
        best.map(|(_, i)| i)
    }

    /// Outward unit normal of the plane containing `a`, direction `u` and `p`.
    fn outward_normal(&self, a: Point3, u: Point3, p: Point3) -> Point3 {
        let n = u.cross(p - a).normalized();
        if (self.centroid - a).dot(n) > 0.0 {
            -n
        } else {
            n
        }
    }

    fn on_plane(&self, a: Point3, n: Point3) -> Vec<usize> {
        (0..self.pts.len()).filter(|&i| (self.pts[i] - a).dot(n).abs() <= self.eps).collect()
    }

    fn initial_plane(&self) -> Result<(Point3, Point3), GeometryError> {
        let a = self.pts[0];
        let mut n = Point3::new(-1.0, 0.0, 0.0);
        let mut u = Point3::new(0.0, 0.0, 1.0);
        for _ in 0..3 {
            let on = self.on_plane(a, n);
            let far = on
                .iter()
                .copied()
                .max_by(|&i, &j| self.pts[i].distance(a).total_cmp(&self.pts[j].distance(a)))
                .unwrap_or(0);
            if self.pts[far].distance(a) > self.eps {
                u = (self.pts[far] - a).normalized();
                if on.iter().any(|&i| self.off_axis(a, u, self.pts[i])) {
                    return Ok((a, n));
                }
            }
            let m = u.cross(n);
            let hit = self.wrap(a, u, n, m).ok_or(GeometryError::DegenerateCloud("no wrap candidate"))?;
            n = self.outward_normal(a, u, self.pts[hit]);
        }
        let on = self.on_plane(a, n);
        if on.len() >= 3 {
            Ok((a, n))
        } else {
            Err(GeometryError::DegenerateCloud("no initial face"))
        }
    }

    /// All cloud points on the supporting plane, reduced to their strictly
    /// convex polygon (counter-clockwise about `n`).
    fn face(&self, a: Point3, n: Point3) -> Face {
        let on = self.on_plane(a, n);
        let e1 = {
            let t = if n.x.abs() < 0.9 { Point3::new(1.0, 0.0, 0.0) } else { Point3::new(0.0, 1.0, 0.0) };
            (t - n * t.dot(n)).normalized()
        };
        let e2 = n.cross(e1);
        let proj: Vec<(f64, f64)> = on
            .iter()
            .map(|&i| {
                let w = self.pts[i] - a;
                (w.dot(e1), w.dot(e2))
            })
            .collect();
        let polygon: Vec<usize> = self.jarvis(&proj).into_iter().map(|k| on[k]).collect();

        // Newell normal over the polygon refines the wrapped plane.
        let mut nn = Point3::ZERO;
        for k in 0..polygon.len() {
            let p = self.pts[polygon[k]];
            let q = self.pts[polygon[(k + 1) % polygon.len()]];
            nn = nn + Point3::new((p.y - q.y) * (p.z + q.z), (p.z - q.z) * (p.x + q.x), (p.x - q.x) * (p.y + q.y));
        }
        let mut normal = if nn.norm() > 0.0 { nn.normalized() } else { n };
        if normal.dot(n) < 0.0 {
            normal = -normal;
        }
        let center = Point3::centroid(&polygon.iter().map(|&i| self.pts[i]).collect::<Vec<_>>());
        Face { polygon, plane: Plane::from_normal(normal, center) }
    }

    /// Counter-clockwise strictly convex polygon of planar points, by 2D
    /// gift wrapping. Near-collinear candidates resolve to the farthest one,
    /// so points along an edge never become corners whatever their order.
    fn jarvis(&self, q: &[(f64, f64)]) -> Vec<usize> {
        let n = q.len();
        let (cx, cy) = q.iter().fold((0.0, 0.0), |s, p| (s.0 + p.0 / n as f64, s.1 + p.1 / n as f64));
        let d2 = |i: usize, x: f64, y: f64| (q[i].0 - x).powi(2) + (q[i].1 - y).powi(2);
        // The point farthest from the centroid is a strict corner.
        let start = (0..n).max_by(|&i, &j| d2(i, cx, cy).total_cmp(&d2(j, cx, cy)).then(j.cmp(&i))).unwrap();
        let mut out = vec![start];
        let mut p = start;
        for _ in 0..n {
            let mut best: Option<usize> = None;
            for r in (0..n).filter(|&r| r != p) {
                let Some(b) = best else {
                    best = Some(r);
                    continue;
                };
                let (ux, uy) = (q[b].0 - q[p].0, q[b].1 - q[p].1);
                let len = ux.hypot(uy);
                let side = (ux * (q[r].1 - q[p].1) - uy * (q[r].0 - q[p].0)) / len.max(self.eps);
                if side < -self.eps || (side <= self.eps && d2(r, q[p].0, q[p].1) > d2(b, q[p].0, q[p].1)) {
                    best = Some(r);
                }
            }
            match best {
                Some(b) if b != start => {
                    out.push(b);
                    p = b;
                }
                _ => break,
            }
        }
        out
    }

    fn run(self) -> Result<ConvexHull, GeometryError> {
        let (a0, n0) = self.initial_plane()?;
        let first = self.face(a0, n0);
        if first.polygon.len() < 3 {
            return Err(GeometryError::DegenerateCloud("initial face collapsed"));
        }

        let mut faces: Vec<Face> = Vec::new();
        let mut keys: HashSet<Vec<usize>> = HashSet::new();
        let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();

        let mut add = |f: Face,
                       faces: &mut Vec<Face>,
                       edge_face: &mut HashMap<(usize, usize), usize>,
                       queue: &mut VecDeque<(usize, usize)>| {
            let mut key = f.polygon.clone();
            key.sort_unstable();
            if !keys.insert(key) {
                return;
            }
            let id = faces.len();
            let k = f.polygon.len();
            for j in 0..k {
                let e = (f.polygon[j], f.polygon[(j + 1) % k]);
                edge_face.insert(e, id);
                queue.push_back(e);
            }
            faces.push(f);
        };
        add(first, &mut faces, &mut edge_face, &mut queue);

        let limit = 4 * self.pts.len() * self.pts.len() + 16;
        let mut steps = 0;
        while let Some((ia, ib)) = queue.pop_front() {
            steps += 1;
            if steps > limit {
                return Err(GeometryError::DegenerateCloud("wrapping did not close"));
            }
            if edge_face.contains_key(&(ib, ia)) {
                continue;
            }
            let fid = edge_face[&(ia, ib)];
            let n = faces[fid].plane.normal();
            let (a, b) = (self.pts[ia], self.pts[ib]);
            let u = (b - a).normalized();
            let m = u.cross(n);
            let hit = self.wrap(a, u, n, m).ok_or(GeometryError::DegenerateCloud("no wrap candidate"))?;
            let n_new = self.outward_normal(a, u, self.pts[hit]);
            let mut f = self.face(a, n_new);
            if f.polygon.len() < 3 {
                return Err(GeometryError::DegenerateCloud("collapsed face"));
            }
            if !f.polygon.contains(&ia) || !f.polygon.contains(&ib) {
                // Rounding dropped an edge endpoint; keep the shared edge explicit.
                f = self.face_with_edge(f, ia, ib);
            }
            add(f, &mut faces, &mut edge_face, &mut queue);
        }

        let mut used: Vec<usize> = faces.iter().flat_map(|f| f.polygon.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let vertices = used.iter().map(|&i| self.pts[i]).collect();
        let mut tris = Vec::new();
        let mut planes = Vec::new();
        for f in &faces {
            let p = &f.polygon;
            for k in 1..p.len() - 1 {
                tris.push([remap[&p[0]], remap[&p[k]], remap[&p[k + 1]]]);
                planes.push(f.plane);
            }
        }
        Ok(ConvexHull { vertices, faces: tris, face_planes: planes })
    }

    fn face_with_edge(&self, f: Face, ia: usize, ib: usize) -> Face {
        let mut poly: Vec<usize> = f.polygon.into_iter().filter(|&i| i != ia && i != ib).collect();
        // Insert b then a in counter-clockwise position: the pair is the
        // edge (b, a) of this face.
        let n = f.plane.normal();
        let c = Point3::centroid(&poly.iter().map(|&i| self.pts[i]).chain([self.pts[ia], self.pts[ib]]).collect::<Vec<_>>());
        poly.push(ia);
        poly.push(ib);
        let e1 = (self.pts[poly[0]] - c).normalized();
        let e2 = n.cross(e1);
        poly.sort_by(|&i, &j| {
            let ang = |k: usize| {
                let w = self.pts[k] - c;
                w.dot(e2).atan2(w.dot(e1))
            };
            ang(i).total_cmp(&ang(j))
        });
        Face { polygon: poly, plane: f.plane }
    }
}
