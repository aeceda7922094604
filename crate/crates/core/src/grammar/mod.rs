//! The action grammar, the library of action mappings, parsing of
//! atomic-action strings and complex-action recognition.

mod cfg;
mod constraints;
mod library;
mod recognize;

use thiserror::Error;

pub use cfg::{action_tokens, tokenize, Grammar, NonTerminal, ParseTree, Production, Sym};
pub use constraints::{ActionShape, ConstraintTable};
pub use library::{
    decompose, load_mapping_library, ActionPattern, Bindings, MappingLibrary, ObjectPat, PlacePat, RelationPat,
    SubjectPat, Template, Value, MAX_PATTERN_LEN,
};
pub use recognize::{recognize, RecognizedAction, UNKNOWN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrammarError {
    #[error("no parse: failed at token {position}{}", .token.as_ref().map(|t| format!(" (`{t}`)")).unwrap_or_default())]
    NoParse { position: usize, token: Option<String> },
    #[error("library line {line}: {msg}")]
    PatternParse { line: usize, msg: String },
    #[error("action `{name}` is not derivable: {msg}")]
    NonCfgPattern { name: String, msg: String },
    #[error("duplicate action `{0}`")]
    DuplicateName(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("action `{action}`: variable `?{var}` is unbound")]
    UnboundVariable { action: String, var: String },
    #[error("action `{action}`: invalid value for `?{var}`")]
    InvalidBinding { action: String, var: String },
}
