use super::{compute_aabb, compute_convex_hull, Aabb, ConvexHull, GeometryError, Point3};

/// A point cloud together with its hull and bounding box.
///
/// Flat or linear clouds have no volumetric hull; they get the hull of their
/// bounding box thickened by `eps_touch` along each collapsed axis and are
/// marked `degenerate`.
#[derive(Debug, Clone)]
pub struct ObjectModel {
    pub points: Vec<Point3>,
    pub hull: ConvexHull,
    pub aabb: Aabb,
    pub degenerate: bool,
}

impl ObjectModel {
    pub fn new(points: Vec<Point3>, eps_touch: f64) -> Result<Self, GeometryError> {
        let aabb = compute_aabb(&points)?;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        match compute_convex_hull(&points) {
            Ok(hull) => Ok(ObjectModel { points, hull, aabb, degenerate: false }),
            Err(GeometryError::DegenerateCloud(why)) => {
                log::debug!("degenerate cloud ({why}), using inflated box");
                let proxy = inflate_null_axes(&aabb, eps_touch);
                let hull = compute_convex_hull(&proxy.corners())?;
                Ok(ObjectModel { points, hull, aabb: proxy, degenerate: true })
            }
            Err(e) => Err(e),
        }
    }

    /// Model of a solid box given by two corners (used for the ground).
    pub fn from_box(b: Aabb) -> Result<Self, GeometryError> {
        let corners = b.corners().to_vec();
        let hull = compute_convex_hull(&corners)?;
        Ok(ObjectModel { points: corners, hull, aabb: b, degenerate: false })
    }

    pub fn centroid(&self) -> Point3 {
        Point3::centroid(&self.points)
    }
}

fn inflate_null_axes(b: &Aabb, eps: f64) -> Aabb {
    let ext = b.extent();
    let mut grow = [0.0; 3];
    let mut any = false;
    for (i, g) in grow.iter_mut().enumerate() {
        if ext.axis(i) <= eps {
            *g = eps;
            any = true;
        }
    }
    // A tilted sheet has no collapsed axis but still no volume.
    if !any {
        grow = [eps; 3];
    }
    let g = Point3::from_array(grow);
    Aabb::new(b.min_corner - g, b.max_corner + g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_sheet_falls_back() {
        let pts: Vec<Point3> = (0..25).map(|i| Point3::new((i % 5) as f64 * 0.1, 0.3, (i / 5) as f64 * 0.1)).collect();
        let m = ObjectModel::new(pts, 5e-3).unwrap();
        assert!(m.degenerate);
        assert!((m.aabb.min(1) - 0.295).abs() < 1e-12);
        assert!((m.aabb.max(1) - 0.305).abs() < 1e-12);
        assert_eq!(m.hull.vertices.len(), 8);
    }

    #[test]
    fn solid_cloud_is_not_degenerate() {
        let b = Aabb::new(Point3::ZERO, Point3::new(1.0, 1.0, 1.0));
        let m = ObjectModel::new(b.corners().to_vec(), 5e-3).unwrap();
        assert!(!m.degenerate);
        assert_eq!(m.aabb, b);
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(ObjectModel::new(vec![], 5e-3), Err(GeometryError::EmptyCloud)));
    }
}
