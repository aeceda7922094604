//! Static (SSR) and dynamic (DSR) spatial relations between object pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, RelationConfig};
use crate::geometry::{relation_matrix_tol, touch_from_matrix, Aabb, ObjectModel, Point3, RelMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SsrLabel {
    Ab,
    Be,
    To,
    Bo,
    Ar,
    ArT,
    In,
    Su,
    Cr,
    Wi,
    Pwi,
    Co,
    Pco,
    #[serde(rename = "Nr")]
    NoRelation,
}

impl SsrLabel {
    pub const ALL: [SsrLabel; 14] = [
        SsrLabel::Ab,
        SsrLabel::Be,
        SsrLabel::To,
        SsrLabel::Bo,
        SsrLabel::Ar,
        SsrLabel::ArT,
        SsrLabel::In,
        SsrLabel::Su,
        SsrLabel::Cr,
        SsrLabel::Wi,
        SsrLabel::Pwi,
        SsrLabel::Co,
        SsrLabel::Pco,
        SsrLabel::NoRelation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SsrLabel::Ab => "Ab",
            SsrLabel::Be => "Be",
            SsrLabel::To => "To",
            SsrLabel::Bo => "Bo",
            SsrLabel::Ar => "Ar",
            SsrLabel::ArT => "ArT",
            SsrLabel::In => "In",
            SsrLabel::Su => "Su",
            SsrLabel::Cr => "Cr",
            SsrLabel::Wi => "Wi",
            SsrLabel::Pwi => "Pwi",
            SsrLabel::Co => "Co",
            SsrLabel::Pco => "Pco",
            SsrLabel::NoRelation => "Nr",
        }
    }

    /// Labels only a volumetric model can separate.
    pub fn needs_hull(self) -> bool {
        matches!(self, SsrLabel::Cr | SsrLabel::Wi | SsrLabel::Pwi | SsrLabel::Co | SsrLabel::Pco)
    }
}

impl fmt::Display for SsrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SsrLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SsrLabel::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| format!("unknown relation `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DsrLabel {
    Gc,
    Ma,
    Mt,
    Ht,
    Fmt,
    S,
}

impl DsrLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            DsrLabel::Gc => "Gc",
            DsrLabel::Ma => "Ma",
            DsrLabel::Mt => "Mt",
            DsrLabel::Ht => "Ht",
            DsrLabel::Fmt => "Fmt",
            DsrLabel::S => "S",
        }
    }
}

impl fmt::Display for DsrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RelationError {
    #[error("window needs at least 2 frames, got {0}")]
    WindowTooShort(usize),
    #[error("track lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Object model used for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModelKind {
    #[default]
    Hull,
    Aabb,
}

pub fn ssr_dual(l: SsrLabel) -> SsrLabel {
    use SsrLabel::*;
    match l {
        Ab => Be,
        Be => Ab,
        To => Bo,
        Bo => To,
        Wi => Co,
        Co => Wi,
        Pwi => Pco,
        Pco => Pwi,
        In => Su,
        Su => In,
        Ar | ArT | Cr | NoRelation => l,
    }
}

/// SSR label plus the touch flag it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairRelation {
    pub ssr: SsrLabel,
    pub touching: bool,
    pub matrix: Option<RelMatrix>,
}

pub fn classify_ssr(a: &ObjectModel, b: &ObjectModel, cfg: &Config) -> SsrLabel {
    relate(a, b, cfg, ModelKind::Hull).ssr
}

pub fn relate(a: &ObjectModel, b: &ObjectModel, cfg: &Config, kind: ModelKind) -> PairRelation {
    match kind {
        ModelKind::Hull => relate_hull(a, b, cfg),
        ModelKind::Aabb => relate_aabb(&a.aabb, &b.aabb, cfg),
    }
}

fn relate_hull(a: &ObjectModel, b: &ObjectModel, cfg: &Config) -> PairRelation {
    let far = a.aabb.distance(&b.aabb) > cfg.eps_touch;
    let rm = if far {
        // Disjoint boxes: every point lies outside the other hull.
        RelMatrix { a_in_bminus: true, aminus_has_b: true, ..RelMatrix::default() }
    } else {
        relation_matrix_tol(&a.points, &a.hull, &b.points, &b.hull, cfg.eps_bnd)
    };
    let touching = !far && touch_from_matrix(&rm, &a.points, &a.hull, &b.points, &b.hull, cfg.eps_touch);
    let ssr = match (rm.a_in_b0, rm.a0_has_b) {
        (true, true) => SsrLabel::Cr,
        (true, false) if !rm.a_in_bminus => {
            if touching && !cfg.in_su_alias {
                SsrLabel::In
            } else {
                SsrLabel::Wi
            }
        }
        (true, false) => SsrLabel::Pwi,
        (false, true) if !rm.aminus_has_b => {
            if touching && !cfg.in_su_alias {
                SsrLabel::Su
            } else {
                SsrLabel::Co
            }
        }
        (false, true) => SsrLabel::Pco,
        (false, false) => disjoint_label(&a.aabb, &b.aabb, touching, cfg),
    };
    PairRelation { ssr, touching, matrix: Some(rm) }
}

fn relate_aabb(a: &Aabb, b: &Aabb, cfg: &Config) -> PairRelation {
    let tol = cfg.eps_bnd;
    let overlap = (0..3).all(|i| a.gap(b, i) < -tol);
    if overlap {
        let (ain, bin) = (a.within(b), b.within(a));
        let ssr = match (ain, bin) {
            (true, false) => SsrLabel::In,
            (false, true) => SsrLabel::Su,
            _ => SsrLabel::ArT,
        };
        return PairRelation { ssr, touching: true, matrix: None };
    }
    let touching = a.distance(b) <= cfg.eps_touch;
    PairRelation { ssr: disjoint_label(a, b, touching, cfg), touching, matrix: None }
}

/// Directional labels for objects whose interiors do not meet.
fn disjoint_label(a: &Aabb, b: &Aabb, touching: bool, cfg: &Config) -> SsrLabel {
    let xz = a.overlaps_on(b, 0) && a.overlaps_on(b, 2);
    if touching {
        let up = a.min(1) - b.max(1);
        let down = b.min(1) - a.max(1);
        let tol = cfg.eps_touch;
        if xz && up.abs() <= tol && (down.abs() > tol || up >= down) {
            SsrLabel::To
        } else if xz && down.abs() <= tol {
            SsrLabel::Bo
        } else {
            SsrLabel::ArT
        }
    } else if xz && a.min(1) > b.max(1) {
        SsrLabel::Ab
    } else if xz && b.min(1) > a.max(1) {
        SsrLabel::Be
    } else if a.distance(b) <= cfg.relation.theta_near {
        SsrLabel::Ar
    } else {
        SsrLabel::NoRelation
    }
}

/// Kinetic label for two centroid tracks over one window.
///
/// Movement is the net centroid displacement per frame and the relative rate
/// is the net change of centroid distance per frame, so per-frame jitter
/// cancels out.
pub fn classify_dsr(
    track_a: &[Point3],
    track_b: &[Point3],
    touching: &[bool],
    cfg: &RelationConfig,
) -> Result<DsrLabel, RelationError> {
    let n = track_a.len();
    if track_b.len() != n {
        return Err(RelationError::LengthMismatch(n, track_b.len()));
    }
    if touching.len() != n {
        return Err(RelationError::LengthMismatch(n, touching.len()));
    }
    if n < 2 {
        return Err(RelationError::WindowTooShort(n));
    }
    let steps = (n - 1) as f64;
    let move_a = track_a[n - 1].distance(track_a[0]) / steps;
    let move_b = track_b[n - 1].distance(track_b[0]) / steps;
    let rate = (track_a[n - 1].distance(track_b[n - 1]) - track_a[0].distance(track_b[0])) / steps;
    let (ma, mb) = (move_a > cfg.delta_move, move_b > cfg.delta_move);
    if touching.iter().all(|t| *t) {
        match (ma, mb) {
            (true, true) if rate.abs() < cfg.delta_rel => return Ok(DsrLabel::Mt),
            (true, false) | (false, true) => return Ok(DsrLabel::Fmt),
            (false, false) => return Ok(DsrLabel::Ht),
            _ => {}
        }
    }
    Ok(if rate < -cfg.delta_rel {
        DsrLabel::Gc
    } else if rate > cfg.delta_rel {
        DsrLabel::Ma
    } else {
        DsrLabel::S
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rc() -> RelationConfig {
        Config::default().relation
    }

    #[test]
    fn duals() {
        assert_eq!(ssr_dual(SsrLabel::Wi), SsrLabel::Co);
        assert_eq!(ssr_dual(SsrLabel::Cr), SsrLabel::Cr);
        assert_eq!(ssr_dual(SsrLabel::NoRelation), SsrLabel::NoRelation);
        for l in SsrLabel::ALL {
            assert_eq!(ssr_dual(ssr_dual(l)), l);
            assert_eq!(l.as_str().parse::<SsrLabel>().unwrap(), l);
        }
    }

    #[test]
    fn moving_together() {
        let a: Vec<Point3> = (0..10).map(|i| Point3::new(0.05 * i as f64, 0.0, 0.0)).collect();
        let b: Vec<Point3> = a.iter().map(|p| *p + Point3::new(0.0, 0.1, 0.0)).collect();
        assert_eq!(classify_dsr(&a, &b, &[true; 10], &rc()), Ok(DsrLabel::Mt));
    }

    #[test]
    fn orbit_is_fixed_moving() {
        let bowl = vec![Point3::ZERO; 10];
        let hand: Vec<Point3> = (0..10)
            .map(|i| {
                let t = std::f64::consts::FRAC_PI_2 * i as f64 / 9.0;
                Point3::new(0.1 * t.cos(), 0.05, 0.1 * t.sin())
            })
            .collect();
        assert_eq!(classify_dsr(&hand, &bowl, &[true; 10], &rc()), Ok(DsrLabel::Fmt));
    }

    #[test]
    fn static_and_approach() {
        let a = vec![Point3::ZERO; 5];
        let b = vec![Point3::new(1.0, 0.0, 0.0); 5];
        assert_eq!(classify_dsr(&a, &b, &[false; 5], &rc()), Ok(DsrLabel::S));
        assert_eq!(classify_dsr(&a, &b, &[true; 5], &rc()), Ok(DsrLabel::Ht));
        let c: Vec<Point3> = (0..5).map(|i| Point3::new(1.0 - 0.1 * i as f64, 0.0, 0.0)).collect();
        assert_eq!(classify_dsr(&a, &c, &[false; 5], &rc()), Ok(DsrLabel::Gc));
        assert_eq!(classify_dsr(&c, &a, &[false; 5], &rc()), Ok(DsrLabel::Gc));
        let d: Vec<Point3> = c.iter().rev().copied().collect();
        assert_eq!(classify_dsr(&a, &d, &[false; 5], &rc()), Ok(DsrLabel::Ma));
    }

    #[test]
    fn short_window() {
        assert_eq!(
            classify_dsr(&[Point3::ZERO], &[Point3::ZERO], &[false], &rc()),
            Err(RelationError::WindowTooShort(1))
        );
    }
}
