//! End-to-end run: trace, relations, atomic actions, snippets, recognized
//! actions and descriptions.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::config::Config;
use crate::events::{segment_actions, AtomicAction, EventError, SceneTrace, Segmentation, Side, TraceAnalysis};
use crate::exec::Execution;
use crate::grammar::{recognize, MappingLibrary, RecognizedAction};
use crate::realizer::{describe_hand, hand_levels, Description, Labels, RealizerError, TemplateSet};
use crate::relations::{DsrLabel, ModelKind, SsrLabel};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Realizer(#[from] RealizerError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HandReport {
    pub side: Side,
    pub actions: Vec<AtomicAction>,
    pub segmentation: Segmentation,
    /// One recognition per snippet.
    pub recognized: Vec<Vec<RecognizedAction>>,
}

impl HandReport {
    pub fn levels(&self) -> BTreeSet<usize> {
        hand_levels(&self.recognized)
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub frame_count: usize,
    pub labels: Labels,
    pub hands: Vec<HandReport>,
}

impl Analysis {
    pub fn hand(&self, side: Side) -> &HandReport {
        self.hands.iter().find(|h| h.side == side).expect("both hands are analysed")
    }

    pub fn describe(&self, side: Side, k: usize, ts: &TemplateSet, lib: &MappingLibrary) -> Result<Description, RealizerError> {
        let h = self.hand(side);
        describe_hand(&h.segmentation, &h.recognized, k, ts, lib, &self.labels)
    }
}

pub fn analyze(
    trace: &SceneTrace,
    cfg: &Config,
    lib: &MappingLibrary,
    exec: Execution,
) -> Result<Analysis, EventError> {
    analyze_with(trace, cfg, lib, exec, ModelKind::Hull)
}

pub fn analyze_with(
    trace: &SceneTrace,
    cfg: &Config,
    lib: &MappingLibrary,
    exec: Execution,
    kind: ModelKind,
) -> Result<Analysis, EventError> {
    let ta = TraceAnalysis::with_kind(trace, cfg, exec, kind)?;
    let n = ta.frame_count();
    let hands = [Side::Left, Side::Right]
        .into_iter()
        .map(|side| {
            let actions = ta.hand_actions(side);
            let segmentation = segment_actions(&actions, side, n);
            let recognized = segmentation.snippets.iter().map(|s| recognize(&s.actions, lib)).collect();
            HandReport { side, actions, segmentation, recognized }
        })
        .collect();
    Ok(Analysis { frame_count: n, labels: Labels::from_trace(trace), hands })
}

/// One row of the per-frame relation table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationRow {
    pub frame: usize,
    pub a: String,
    pub b: String,
    pub ssr: SsrLabel,
    /// Kinetic label over the window ending at `frame`; `None` before the
    /// first full window or when either object is missing.
    pub dsr: Option<DsrLabel>,
}

/// SSR and DSR of every unordered pair present in each frame.
pub fn relation_table(trace: &SceneTrace, cfg: &Config, exec: Execution) -> Result<Vec<RelationRow>, EventError> {
    let ta = TraceAnalysis::new(trace, cfg, exec)?;
    let n = ta.ids().len();
    let w = cfg.relation.window.max(2);
    let rows = exec.map_range(ta.frame_count(), |f| {
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if ta.model(f, a).is_none() || ta.model(f, b).is_none() {
                    continue;
                }
                let dsr = if f + 1 >= w { ta.window_dsr(a, b, f + 1 - w, f) } else { None };
                out.push(RelationRow { frame: f, a: ta.id(a).to_string(), b: ta.id(b).to_string(), ssr: ta.ssr(f, a, b), dsr });
            }
        }
        out
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Descriptions of both hands at level `k`.
pub fn run(
    trace: &SceneTrace,
    cfg: &Config,
    lib: &MappingLibrary,
    ts: &TemplateSet,
    k: usize,
    exec: Execution,
) -> Result<Vec<Description>, PipelineError> {
    let a = analyze(trace, cfg, lib, exec)?;
    Ok([Side::Left, Side::Right].into_iter().map(|s| a.describe(s, k, ts, lib)).collect::<Result<_, _>>()?)
}
