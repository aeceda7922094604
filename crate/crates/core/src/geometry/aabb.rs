use super::{GeometryError, Point3};

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min_corner: Point3,
    pub max_corner: Point3,
}

/// Componentwise min/max of the cloud.
pub fn compute_aabb(points: &[Point3]) -> Result<Aabb, GeometryError> {
    let first = *points.first().ok_or(GeometryError::EmptyCloud)?;
    let mut bb = Aabb { min_corner: first, max_corner: first };
    for p in &points[1..] {
        bb.min_corner = Point3::new(bb.min_corner.x.min(p.x), bb.min_corner.y.min(p.y), bb.min_corner.z.min(p.z));
        bb.max_corner = Point3::new(bb.max_corner.x.max(p.x), bb.max_corner.y.max(p.y), bb.max_corner.z.max(p.z));
    }
    Ok(bb)
}

impl Aabb {
    pub fn new(min_corner: Point3, max_corner: Point3) -> Self {
        Aabb { min_corner, max_corner }
    }

    pub fn min(&self, axis: usize) -> f64 {
        self.min_corner.axis(axis)
    }

    pub fn max(&self, axis: usize) -> f64 {
        self.max_corner.axis(axis)
    }

    pub fn extent(&self) -> Point3 {
        self.max_corner - self.min_corner
    }

    pub fn center(&self) -> Point3 {
        (self.min_corner + self.max_corner) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        (0..3).all(|i| p.axis(i) >= self.min(i) - tol && p.axis(i) <= self.max(i) + tol)
    }

    pub fn inflate(&self, by: f64) -> Aabb {
        let d = Point3::new(by, by, by);
        Aabb { min_corner: self.min_corner - d, max_corner: self.max_corner + d }
    }

    /// Euclidean distance from `p` to the box (0 inside).
    pub fn distance_to_point(&self, p: Point3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            let v = p.axis(i);
            let d = (self.min(i) - v).max(0.0).max(v - self.max(i));
            s += d * d;
        }
        s.sqrt()
    }

    /// Euclidean distance between two boxes (0 when they overlap or touch).
    pub fn distance(&self, o: &Aabb) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            let g = self.gap(o, i).max(0.0);
            s += g * g;
        }
        s.sqrt()
    }

    /// Separation along one axis; negative when the projections overlap.
    pub fn gap(&self, o: &Aabb, axis: usize) -> f64 {
        (o.min(axis) - self.max(axis)).max(self.min(axis) - o.max(axis))
    }

    /// Open-interval overlap of the projections on `axis`.
    pub fn overlaps_on(&self, o: &Aabb, axis: usize) -> bool {
        self.min(axis) < o.max(axis) && o.min(axis) < self.max(axis)
    }

    pub fn corners(&self) -> [Point3; 8] {
        let (a, b) = (self.min_corner, self.max_corner);
        [
            Point3::new(a.x, a.y, a.z),
            Point3::new(b.x, a.y, a.z),
            Point3::new(a.x, b.y, a.z),
            Point3::new(b.x, b.y, a.z),
            Point3::new(a.x, a.y, b.z),
            Point3::new(b.x, a.y, b.z),
            Point3::new(a.x, b.y, b.z),
            Point3::new(b.x, b.y, b.z),
        ]
    }

    /// `self` lies inside `o` (closed).
    pub fn within(&self, o: &Aabb) -> bool {
        (0..3).all(|i| self.min(i) >= o.min(i) && self.max(i) <= o.max(i))
    }
}
