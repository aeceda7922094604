use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use serde::Serialize;

use super::cfg::{action_tokens, Grammar};
use super::constraints::ConstraintTable;
use super::GrammarError;
use crate::events::{AtomicAction, Entity, Place, Primitive, Side, Subject};
use crate::relations::SsrLabel;

const DEFAULT_LIBRARY: &str = include_str!("../../data/default.lib");

/// Upper bound on the length of one pattern.
pub const MAX_PATTERN_LEN: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubjectPat {
    Hand,
    Me(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjectPat {
    Var(String),
    Ground,
    Nothing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationPat {
    Is(SsrLabel),
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacePat {
    Var(String),
    Ground,
    Air,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub subject: SubjectPat,
    pub primitive: Primitive,
    pub object: ObjectPat,
    pub relation: RelationPat,
    pub place: PlacePat,
    pub repeat: bool,
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionPattern {
    pub name: String,
    pub hands: u8,
    pub groups: Vec<String>,
    pub templates: Vec<Template>,
}

/// What a pattern variable is bound to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Value {
    Ground,
    Object(String),
}

pub type Bindings = BTreeMap<String, Value>;

impl ActionPattern {
    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |v: &String| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        for t in &self.templates {
            if let SubjectPat::Me(v) = &t.subject {
                push(v);
            }
            if let ObjectPat::Var(v) = &t.object {
                push(v);
            }
            if let PlacePat::Var(v) = &t.place {
                push(v);
            }
        }
        out
    }

    /// Variables that occur as a place and may therefore bind the ground.
    pub fn place_variables(&self) -> BTreeSet<String> {
        self.templates
            .iter()
            .filter_map(|t| match &t.place {
                PlacePat::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn template_range(&self, group: usize) -> std::ops::Range<usize> {
        let first = self.templates.iter().position(|t| t.group == group).unwrap_or(0);
        let last = self.templates.iter().rposition(|t| t.group == group).map_or(0, |i| i + 1);
        first..last
    }

    /// Checks a binding set: every variable bound, values distinct, ground
    /// only for place variables.
    pub fn check_bindings(&self, b: &Bindings) -> Result<(), GrammarError> {
        let places = self.place_variables();
        let mut seen = BTreeSet::new();
        for v in self.variables() {
            let val = b.get(&v).ok_or_else(|| GrammarError::UnboundVariable { action: self.name.clone(), var: v.clone() })?;
            if *val == Value::Ground && !places.contains(&v) {
                return Err(GrammarError::InvalidBinding { action: self.name.clone(), var: v.clone() });
            }
            if !seen.insert(val.clone()) {
                return Err(GrammarError::InvalidBinding { action: self.name.clone(), var: v.clone() });
            }
        }
        Ok(())
    }

    /// Instantiates the pattern. `reps[k]` is the count for the k-th
    /// repeated template (missing entries count as one).
    pub fn instantiate(&self, b: &Bindings, side: Side, reps: &[usize]) -> Result<Vec<AtomicAction>, GrammarError> {
        self.check_bindings(b)?;
        let obj = |v: &String| match &b[v] {
            Value::Ground => Entity::Ground,
            Value::Object(id) => Entity::Object(id.clone()),
        };
        let mut out = Vec::new();
        let mut rep_index = 0;
        for t in &self.templates {
            let n = if t.repeat {
                rep_index += 1;
                reps.get(rep_index - 1).copied().unwrap_or(1).max(1)
            } else {
                1
            };
            let subject = match &t.subject {
                SubjectPat::Hand => Subject::Hand(side),
                SubjectPat::Me(v) => match &b[v] {
                    Value::Object(id) => Subject::Me(side, id.clone()),
                    Value::Ground => return Err(GrammarError::InvalidBinding { action: self.name.clone(), var: v.clone() }),
                },
            };
            let object = match &t.object {
                ObjectPat::Var(v) => Some(obj(v)),
                ObjectPat::Ground => Some(Entity::Ground),
                ObjectPat::Nothing => None,
            };
            let relation = match t.relation {
                RelationPat::Is(l) => l,
                RelationPat::Any => SsrLabel::NoRelation,
            };
            let place = match &t.place {
                PlacePat::Var(v) => match &b[v] {
                    Value::Ground => Place::Ground,
                    Value::Object(id) => Place::Object(id.clone()),
                },
                PlacePat::Ground => Place::Ground,
                PlacePat::Air => Place::Air,
            };
            for _ in 0..n {
                let k = out.len();
                out.push(AtomicAction {
                    subject: subject.clone(),
                    primitive: t.primitive,
                    object: object.clone(),
                    relation,
                    place: place.clone(),
                    frame_span: (k, k),
                });
            }
        }
        Ok(out)
    }

    /// Bindings using the ground for the first place variable and `o1`,
    /// `o2`, ... for the rest.
    pub fn canonical_bindings(&self) -> Bindings {
        let places = self.place_variables();
        let mut ground_used = false;
        let mut k = 0;
        let mut b = Bindings::new();
        for v in self.variables() {
            if !ground_used && places.contains(&v) && !self.binds_subject(&v) {
                ground_used = true;
                b.insert(v, Value::Ground);
            } else {
                k += 1;
                b.insert(v, Value::Object(format!("o{k}")));
            }
        }
        b
    }

    fn binds_subject(&self, v: &str) -> bool {
        self.templates.iter().any(|t| matches!(&t.subject, SubjectPat::Me(x) if x == v))
    }

    pub fn repeat_count(&self) -> usize {
        self.templates.iter().filter(|t| t.repeat).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingLibrary {
    pub entries: Vec<ActionPattern>,
}

impl MappingLibrary {
    pub fn default_library() -> MappingLibrary {
        load_mapping_library(DEFAULT_LIBRARY.as_bytes()).expect("shipped library is valid")
    }

    pub fn get(&self, name: &str) -> Option<&ActionPattern> {
        self.entries.iter().find(|e| e.name.eq_ignore_ascii_case(name))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }
}

pub fn decompose(
    lib: &MappingLibrary,
    name: &str,
    bindings: &Bindings,
    side: Side,
    reps: &[usize],
) -> Result<Vec<AtomicAction>, GrammarError> {
    lib.get(name)
        .ok_or_else(|| GrammarError::UnknownAction(name.to_string()))?
        .instantiate(bindings, side, reps)
}

fn parse_var(tok: &str, line: usize) -> Result<String, GrammarError> {
    match tok.strip_prefix('?') {
        Some(v) if !v.is_empty() && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => Ok(v.to_string()),
        _ => Err(GrammarError::PatternParse { line, msg: format!("bad variable `{tok}`") }),
    }
}

fn parse_template(fields: &[&str], line: usize, group: usize) -> Result<Template, GrammarError> {
    let err = |msg: String| GrammarError::PatternParse { line, msg };
    let (fields, repeat) = match fields {
        [rest @ .., "+"] => (rest, true),
        _ => (fields, false),
    };
    let [subj, prim, obj, rel, place] = fields else {
        return Err(err(format!("expected 5 fields, found {}", fields.len())));
    };
    let subject = match *subj {
        "H" => SubjectPat::Hand,
        s => match s.strip_prefix("Me:") {
            Some(v) => SubjectPat::Me(parse_var(v, line)?),
            None => return Err(err(format!("bad subject `{s}`"))),
        },
    };
    let primitive = Primitive::parse(prim).ok_or_else(|| err(format!("unknown primitive `{prim}`")))?;
    let object = match *obj {
        "G" => ObjectPat::Ground,
        "-" => ObjectPat::Nothing,
        v => ObjectPat::Var(parse_var(v, line)?),
    };
    let relation = match *rel {
        "*" => RelationPat::Any,
        r => RelationPat::Is(r.parse().map_err(err)?),
    };
    let place = match *place {
        "G" => PlacePat::Ground,
        "Air" => PlacePat::Air,
        v => PlacePat::Var(parse_var(v, line)?),
    };
    if repeat && !matches!(primitive, Primitive::Mt | Primitive::Fmt) {
        return Err(err("only Mt and Fmt steps may repeat".into()));
    }
    Ok(Template { subject, primitive, object, relation, place, repeat, group })
}

/// Parses and validates a library.
pub fn load_mapping_library<R: BufRead>(reader: R) -> Result<MappingLibrary, GrammarError> {
    let mut entries: Vec<ActionPattern> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| GrammarError::PatternParse { line: line_no, msg: e.to_string() })?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        let err = |msg: &str| GrammarError::PatternParse { line: line_no, msg: msg.to_string() };
        match fields[0] {
            "action" => {
                let [_, name] = fields[..] else { return Err(err("expected `action <name>`")) };
                if entries.iter().any(|e| e.name.eq_ignore_ascii_case(name)) {
                    return Err(GrammarError::DuplicateName(name.to_string()));
                }
                entries.push(ActionPattern { name: name.to_string(), hands: 1, groups: Vec::new(), templates: Vec::new() });
            }
            "hands" => {
                let e = entries.last_mut().ok_or_else(|| err("`hands` outside an action"))?;
                e.hands = match fields[..] {
                    [_, n] => n.parse().ok().filter(|n| (1..=2).contains(n)).ok_or_else(|| err("hands must be 1 or 2"))?,
                    _ => return Err(err("expected `hands <n>`")),
                };
            }
            "group" => {
                let e = entries.last_mut().ok_or_else(|| err("`group` outside an action"))?;
                let [_, name] = fields[..] else { return Err(err("expected `group <name>`")) };
                e.groups.push(name.to_string());
            }
            _ => {
                let e = entries.last_mut().ok_or_else(|| err("template outside an action"))?;
                if e.groups.is_empty() {
                    e.groups.push(e.name.to_lowercase());
                }
                let t = parse_template(&fields, line_no, e.groups.len() - 1)?;
                e.templates.push(t);
            }
        }
    }
    let grammar = Grammar::standard();
    let table = ConstraintTable::default_table();
    for e in &entries {
        validate(e, &grammar, &table)?;
    }
    Ok(MappingLibrary { entries })
}

fn validate(e: &ActionPattern, g: &Grammar, table: &ConstraintTable) -> Result<(), GrammarError> {
    let bad = |msg: String| GrammarError::NonCfgPattern { name: e.name.clone(), msg };
    if e.templates.is_empty() {
        return Err(bad("no templates".into()));
    }
    if e.templates.len() > MAX_PATTERN_LEN {
        return Err(bad(format!("{} templates, at most {MAX_PATTERN_LEN}", e.templates.len())));
    }
    let b = e.canonical_bindings();
    let actions = e.instantiate(&b, Side::Left, &[]).map_err(|x| bad(x.to_string()))?;
    let slots = crate::events::assign_slots(&actions);
    if slots.len() > crate::events::MAX_SLOTS {
        return Err(bad(format!("{} objects, at most {}", slots.len(), crate::events::MAX_SLOTS)));
    }
    for (a, t) in actions.iter().zip(&e.templates) {
        if t.relation != RelationPat::Any && !table.allows(a) {
            return Err(bad(format!("step `{}` is not a valid atomic action", action_tokens(std::slice::from_ref(a), &slots).join(" "))));
        }
    }
    let tokens = action_tokens(&actions, &slots);
    g.parse(&tokens).map_err(|x| bad(x.to_string()))?;
    Ok(())
}
