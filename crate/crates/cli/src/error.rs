use std::fmt;
use std::path::Path;

use manipsem::events::EventError;
use manipsem::grammar::GrammarError;
use manipsem::realizer::RealizerError;

pub const IO: i32 = 1;
pub const PARSE: i32 = 2;
pub const SCHEMA: i32 = 3;
pub const LEVEL: i32 = 4;
pub const EMPTY_CORPUS: i32 = 5;
pub const NO_PARSE: i32 = 6;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn new(code: i32, msg: impl Into<String>) -> CliError {
        CliError { code, msg: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::new(IO, format!("{}: {e}", path.display()))
    }

    pub fn trace(path: &Path, e: EventError) -> CliError {
        let code = match e {
            EventError::Io(_) => IO,
            EventError::Parse { .. } => PARSE,
            EventError::Schema { .. } | EventError::Monotonicity { .. } | EventError::Geometry { .. } => SCHEMA,
        };
        CliError::new(code, format!("{}: {e}", path.display()))
    }

    pub fn grammar(path: &Path, e: GrammarError) -> CliError {
        let code = match e {
            GrammarError::PatternParse { .. } | GrammarError::NoParse { .. } => PARSE,
            _ => SCHEMA,
        };
        CliError::new(code, format!("{}: {e}", path.display()))
    }

    pub fn realizer(e: RealizerError) -> CliError {
        let code = match e {
            RealizerError::Parse { .. } => PARSE,
            RealizerError::InvalidLevel(_) => LEVEL,
            _ => SCHEMA,
        };
        CliError::new(code, e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.msg)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(IO, e.to_string())
    }
}
