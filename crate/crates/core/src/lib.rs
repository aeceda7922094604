//! Qualitative spatial relations, atomic-action extraction, action grammar
//! parsing and multi-granularity sentence generation for time-stamped 3D
//! object traces of manipulation scenes.
//!
//! The pipeline runs in stages, each living in its own module:
//!
//! * [`geometry`]: convex hulls, AABBs, point/region tests, the 2x3
//!   relation matrix and touch detection.
//! * [`relations`]: static (SSR) and dynamic (DSR) spatial relation labels.
//! * [`events`]: trace ingestion, the per-frame touch graph, atomic-action
//!   extraction and snippet segmentation.
//! * [`grammar`]: the action grammar, the library of action mappings,
//!   parsing and complex-action recognition.
//! * [`realizer`]: template-based descriptions at selectable granularity.
//! * [`evalkit`]: BLEU, the synthetic scenario generator and the hull vs
//!   AABB comparison study.

pub mod config;
pub mod evalkit;
pub mod events;
pub mod exec;
pub mod geometry;
pub mod grammar;
pub mod pipeline;
pub mod realizer;
pub mod relations;

pub use config::Config;
pub use exec::Execution;
