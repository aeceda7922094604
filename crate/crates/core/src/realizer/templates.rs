use std::collections::BTreeMap;
use std::io::BufRead;

use super::RealizerError;
use crate::events::Primitive;
use crate::grammar::MappingLibrary;
use crate::relations::SsrLabel;

const DEFAULT_TEMPLATES: &str = include_str!("../../data/default.templates");

/// Keyed sentence templates. Immutable once loaded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    entries: BTreeMap<String, String>,
}

impl TemplateSet {
    pub fn default_templates() -> TemplateSet {
        TemplateSet::parse(DEFAULT_TEMPLATES).expect("shipped templates are valid")
    }

    pub fn parse(text: &str) -> Result<TemplateSet, RealizerError> {
        let mut entries = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RealizerError::Parse { line: k + 1, msg: "expected `key = value`".into() });
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(RealizerError::Parse { line: k + 1, msg: format!("bad key `{key}`") });
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(RealizerError::Parse { line: k + 1, msg: format!("duplicate key `{key}`") });
            }
        }
        Ok(TemplateSet { entries })
    }

    pub fn load<R: BufRead>(mut reader: R) -> Result<TemplateSet, RealizerError> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| RealizerError::Parse { line: 0, msg: e.to_string() })?;
        TemplateSet::parse(&text)
    }

    pub fn get(&self, key: &str) -> Result<&str, RealizerError> {
        self.entries.get(key).map(String::as_str).ok_or_else(|| RealizerError::MissingTemplate(key.to_string()))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Singular or plural form of a `verb.*` or `keep.*` entry.
    pub fn verb(&self, key: &str, plural: bool) -> Result<&str, RealizerError> {
        let v = self.get(key)?;
        let (one, many) = v.split_once('/').unwrap_or((v, v));
        Ok(if plural { many.trim() } else { one.trim() })
    }

    pub fn relation(&self, p: Primitive, l: SsrLabel) -> Result<&str, RealizerError> {
        self.get(&format!("rel.{}.{}", p.as_str(), l.as_str())).or_else(|_| self.get(&format!("rel.{}", l.as_str())))
    }

    /// Every template key the library and the atomic forms need that is absent.
    pub fn missing(&self, lib: &MappingLibrary) -> Vec<String> {
        let mut keys = vec!["subject.me".to_string(), "place.prep".into(), "place.air".into()];
        for p in ["T", "U", "Mt", "Fmt"] {
            keys.push(format!("verb.{p}"));
            keys.push(format!("keep.{p}"));
        }
        keys.extend(SsrLabel::ALL.iter().map(|l| format!("rel.{}", l.as_str())));
        for e in &lib.entries {
            keys.push(format!("action.{}", e.name));
            if e.groups.len() > 1 {
                keys.extend(e.groups.iter().map(|g| format!("group.{}.{g}", e.name)));
            }
        }
        keys.retain(|k| !self.contains(k));
        keys
    }
}
