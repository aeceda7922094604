//! Evaluation tooling: BLEU, synthetic scenes with known ground truth and
//! the hull vs AABB relation study.

mod bleu;
mod compare;
mod scenario;
mod shapes;

use thiserror::Error;

pub use bleu::{bleu, bleu_tokens, BleuScore};
pub use compare::{
    action_recovery, compare_labeled, compare_models, corpus, read_manifest, recognized_action, write_manifest,
    AccuracyReport, ModelScore, Recovery,
};
pub use scenario::{
    generate_synthetic_trace, FrameTruth, GroundTruth, PairTruth, ScenarioSpec, Synthetic, SCENARIOS, TRUTH_STRIDE,
};
pub use shapes::{truth_ssr, Opening, Placed, Shape};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("BLEU order must be at least 1, got {0}")]
    BleuOrder(usize),
    #[error("no reference sentences")]
    NoReferences,
    #[error("empty candidate sentence")]
    EmptyCandidate,
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("trace `{id}`: {msg}")]
    Trace { id: String, msg: String },
}
