//! Trace ingestion, the per-frame touch graph, atomic-action extraction and
//! snippet segmentation.

mod extract;
mod segment;
mod trace;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Aabb, GeometryError, Point3};
use crate::relations::SsrLabel;

pub(crate) use extract::build_model;
pub use extract::{extract_atomic_actions, touch_graph, HandActions, TraceAnalysis};
pub use segment::{assign_slots, segment_actions, Segmentation, Snippet, MAX_SLOTS};
pub use trace::{load_trace, write_trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn word(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Side::Left => "HL",
            Side::Right => "HR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Role {
    HandLeft,
    HandRight,
    Object,
    Ground,
}

impl Role {
    pub fn parse(s: &str) -> Option<Role> {
        Some(match s {
            "hand_left" => Role::HandLeft,
            "hand_right" => Role::HandRight,
            "object" => Role::Object,
            "ground" => Role::Ground,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::HandLeft => "hand_left",
            Role::HandRight => "hand_right",
            Role::Object => "object",
            Role::Ground => "ground",
        }
    }

    pub fn hand(self) -> Option<Side> {
        match self {
            Role::HandLeft => Some(Side::Left),
            Role::HandRight => Some(Side::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectInstance {
    pub id: String,
    pub label: String,
    pub role: Role,
    pub points: Vec<Point3>,
    /// Set when the object was given as a box rather than points.
    pub bbox: Option<Aabb>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub objects: Vec<ObjectInstance>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneTrace {
    pub id: String,
    pub rate_hz: f64,
    pub frames: Vec<Frame>,
}

impl SceneTrace {
    /// Label of an object id, from its first appearance.
    pub fn label_of(&self, id: &str) -> Option<&str> {
        self.frames.iter().flat_map(|f| &f.objects).find(|o| o.id == id).map(|o| o.label.as_str())
    }

    pub fn role_of(&self, id: &str) -> Option<Role> {
        self.frames.iter().flat_map(|f| &f.objects).find(|o| o.id == id).map(|o| o.role)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Subject {
    Hand(Side),
    /// A hand merged with the object it carries.
    Me(Side, String),
}

impl Subject {
    pub fn side(&self) -> Side {
        match self {
            Subject::Hand(s) | Subject::Me(s, _) => *s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Primitive {
    T,
    U,
    Mt,
    Fmt,
}

impl Primitive {
    pub fn as_str(self) -> &'static str {
        match self {
            Primitive::T => "T",
            Primitive::U => "U",
            Primitive::Mt => "Mt",
            Primitive::Fmt => "Fmt",
        }
    }

    pub fn parse(s: &str) -> Option<Primitive> {
        Some(match s {
            "T" => Primitive::T,
            "U" => Primitive::U,
            "Mt" => Primitive::Mt,
            "Fmt" => Primitive::Fmt,
            _ => return None,
        })
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Entity {
    Object(String),
    Ground,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum Place {
    Object(String),
    Ground,
    Air,
}

/// The quintuple (subject, primitive, object, relation, place) over a frame
/// span. `object` is `None` for motion through free space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicAction {
    pub subject: Subject,
    pub primitive: Primitive,
    pub object: Option<Entity>,
    pub relation: SsrLabel,
    pub place: Place,
    pub frame_span: (usize, usize),
}

#[derive(Debug, Error)]
pub enum EventError {
    #[error("line {line}: parse error: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: schema error: {msg}")]
    Schema { line: usize, msg: String },
    #[error("line {line}: timestamp {t} does not increase")]
    Monotonicity { line: usize, t: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("frame {frame}, object `{id}`: {source}")]
    Geometry { frame: usize, id: String, source: GeometryError },
}
