//! Template-based descriptions of a hand's activity at several levels of
//! detail: one sentence per atomic action, per action group, or per action.

mod templates;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::events::{AtomicAction, Entity, Place, Role, SceneTrace, Segmentation, Side, Snippet, Subject};
use crate::grammar::{Bindings, MappingLibrary, RecognizedAction, Value};

pub use templates::TemplateSet;

/// Deepest level any library entry can produce.
pub const MAX_LEVEL: usize = 14;
pub const IDLE: &str = "Idle.";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RealizerError {
    #[error("template line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing template `{0}`")]
    MissingTemplate(String),
    #[error("template slot `{{{0}}}` has no value")]
    UnboundSlot(String),
    #[error("level {0} is out of range")]
    InvalidLevel(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sentence {
    pub text: String,
    /// Inclusive frame span.
    pub frame_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Description {
    pub hand: Side,
    pub level: usize,
    pub sentences: Vec<Sentence>,
}

/// Display names of object ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Labels {
    names: BTreeMap<String, String>,
    ground: String,
}

impl Labels {
    pub fn new(names: BTreeMap<String, String>, ground: impl Into<String>) -> Labels {
        Labels { names, ground: ground.into() }
    }

    pub fn from_trace(trace: &SceneTrace) -> Labels {
        let mut names = BTreeMap::new();
        let mut ground = String::from("ground");
        for o in trace.frames.iter().flat_map(|f| &f.objects) {
            let label = o.label.replace('_', " ");
            if o.role == Role::Ground {
                ground = label.clone();
            }
            names.entry(o.id.clone()).or_insert(label);
        }
        Labels { names, ground }
    }

    pub fn name<'a>(&'a self, id: &'a str) -> &'a str {
        self.names.get(id).map_or(id, String::as_str)
    }
}

/// Noun phrases with first-mention articles.
pub struct Mentions<'a> {
    labels: &'a Labels,
    seen: HashSet<String>,
}

impl<'a> Mentions<'a> {
    pub fn new(labels: &'a Labels) -> Mentions<'a> {
        Mentions { labels, seen: HashSet::new() }
    }

    pub fn object(&mut self, id: &str) -> String {
        let name = self.labels.name(id);
        if self.seen.insert(id.to_string()) {
            let an = name.starts_with(|c: char| "aeiouAEIOU".contains(c));
            format!("{} {name}", if an { "an" } else { "a" })
        } else {
            format!("the {name}")
        }
    }

    pub fn ground(&self) -> String {
        format!("the {}", self.labels.ground)
    }

    fn entity(&mut self, e: &Entity) -> String {
        match e {
            Entity::Ground => self.ground(),
            Entity::Object(id) => self.object(id),
        }
    }

    fn value(&mut self, v: &Value) -> String {
        match v {
            Value::Ground => self.ground(),
            Value::Object(id) => self.object(id),
        }
    }
}

fn hand_phrase(side: Side) -> String {
    format!("the {} hand", side.word())
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn same_place(object: &Option<Entity>, place: &Place) -> bool {
    matches!((object, place), (Some(Entity::Ground), Place::Ground))
        || matches!((object, place), (Some(Entity::Object(a)), Place::Object(b)) if a == b)
}

/// One sentence for one atomic action. `prev` selects the continuation form
/// when the same action repeats.
pub fn realize_atomic(
    aa: &AtomicAction,
    prev: Option<&AtomicAction>,
    ts: &TemplateSet,
    names: &mut Mentions,
) -> Result<String, RealizerError> {
    use crate::events::Primitive::*;
    let plural = matches!(aa.subject, Subject::Me(..));
    let subject = match &aa.subject {
        Subject::Hand(s) => hand_phrase(*s),
        Subject::Me(..) => ts.get("subject.me")?.to_string(),
    };
    let repeated = prev.is_some_and(|p| {
        p.subject == aa.subject && p.primitive == aa.primitive && p.object == aa.object && p.relation == aa.relation
    });
    let prim = aa.primitive.as_str();
    let verb = ts.verb(&format!("{}.{prim}", if repeated { "keep" } else { "verb" }), plural)?;
    let mut rel = ts.relation(aa.primitive, aa.relation)?;
    if matches!(aa.primitive, T | U) && aa.object == Some(Entity::Ground) {
        rel = "";
    }
    let mut text = format!("{subject} {verb}");
    match &aa.object {
        Some(o) => {
            if !rel.is_empty() {
                text.push(' ');
                text.push_str(rel);
            }
            text.push(' ');
            text.push_str(&names.entity(o));
            if !same_place(&aa.object, &aa.place) {
                match &aa.place {
                    Place::Air => text.push_str(&format!(" {}", ts.get("place.air")?)),
                    Place::Ground => text.push_str(&format!(" {} {}", ts.get("place.prep")?, names.ground())),
                    Place::Object(id) => text.push_str(&format!(" {} {}", ts.get("place.prep")?, names.object(id))),
                }
            }
        }
        None if rel.is_empty() => text.push_str(&format!(" {}", ts.get("place.air")?)),
        None => text.push_str(&format!(" {rel} {}", names.ground())),
    }
    text.push('.');
    Ok(capitalize(&text))
}

fn fill(template: &str, side: Side, bindings: &Bindings, names: &mut Mentions) -> Result<String, RealizerError> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').map(|c| open + c).ok_or_else(|| RealizerError::UnboundSlot(rest[open..].to_string()))?;
        let slot = &rest[open + 1..close];
        let phrase = match slot {
            "hand" | "subject" => hand_phrase(side),
            "ground" => names.ground(),
            v => names.value(bindings.get(v).ok_or_else(|| RealizerError::UnboundSlot(v.to_string()))?),
        };
        out.push_str(&phrase);
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(capitalize(&out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Atomic(usize),
    Group { rec: usize, group: usize },
    Action { rec: usize },
}

fn units(recognized: &[RecognizedAction], k: usize) -> Vec<(Unit, (usize, usize))> {
    let mut out = Vec::new();
    for (ri, r) in recognized.iter().enumerate() {
        if r.is_unknown() || k == 1 {
            out.extend((r.span.0..r.span.1).map(|i| (Unit::Atomic(i), (i, i + 1))));
        } else if k == 2 && r.groups.len() > 1 {
            out.extend(r.groups.iter().enumerate().map(|(gi, g)| (Unit::Group { rec: ri, group: gi }, g.1)));
        } else {
            out.push((Unit::Action { rec: ri }, r.span));
        }
    }
    out
}

/// Levels that group the actions differently from every lower level.
pub fn available_levels(recognized: &[RecognizedAction]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    if recognized.is_empty() {
        return out;
    }
    let mut last: Vec<(usize, usize)> = Vec::new();
    for k in 1..=3 {
        let spans: Vec<(usize, usize)> = units(recognized, k).into_iter().map(|u| u.1).collect();
        if spans != last {
            out.insert(k);
            last = spans;
        }
    }
    out
}

/// Sentences for one snippet at level `k`.
pub fn realize_level(
    snippet: &Snippet,
    recognized: &[RecognizedAction],
    k: usize,
    ts: &TemplateSet,
    lib: &MappingLibrary,
    labels: &Labels,
) -> Result<Description, RealizerError> {
    if !(1..=MAX_LEVEL).contains(&k) {
        return Err(RealizerError::InvalidLevel(k));
    }
    let acts = &snippet.actions;
    let mut names = Mentions::new(labels);
    let mut texts = Vec::new();
    let plan = units(recognized, k);
    for (unit, span) in &plan {
        let text = match *unit {
            Unit::Atomic(i) => realize_atomic(&acts[i], i.checked_sub(1).map(|j| &acts[j]), ts, &mut names)?,
            Unit::Group { rec, group } => {
                let r = &recognized[rec];
                let key = format!("group.{}.{}", canonical_name(lib, &r.name), r.groups[group].0);
                fill(ts.get(&key)?, snippet.hand, &r.bindings, &mut names)?
            }
            Unit::Action { rec } => {
                let r = &recognized[rec];
                let key = format!("action.{}", canonical_name(lib, &r.name));
                fill(ts.get(&key)?, snippet.hand, &r.bindings, &mut names)?
            }
        };
        texts.push((text, *span));
    }
    let starts: Vec<usize> = texts
        .iter()
        .enumerate()
        .map(|(n, (_, span))| if n == 0 { snippet.frame_span.0 } else { acts[span.0].frame_span.0 })
        .collect();
    let sentences = texts
        .into_iter()
        .enumerate()
        .map(|(n, (text, _))| {
            let s = starts[n];
            let e = match starts.get(n + 1) {
                Some(&next) if next > s => next - 1,
                Some(_) => s,
                None => snippet.frame_span.1.max(s),
            };
            Sentence { text, frame_span: (s, e) }
        })
        .collect();
    Ok(Description { hand: snippet.hand, level: k, sentences })
}

fn canonical_name<'a>(lib: &'a MappingLibrary, name: &'a str) -> &'a str {
    lib.get(name).map_or(name, |e| e.name.as_str())
}

/// A hand's whole timeline at level `k`: snippets in order, with idle
/// stretches rendered as `Idle.`. `recognized[i]` belongs to snippet `i`.
pub fn describe_hand(
    seg: &Segmentation,
    recognized: &[Vec<RecognizedAction>],
    k: usize,
    ts: &TemplateSet,
    lib: &MappingLibrary,
    labels: &Labels,
) -> Result<Description, RealizerError> {
    if !(1..=MAX_LEVEL).contains(&k) {
        return Err(RealizerError::InvalidLevel(k));
    }
    let mut sentences: Vec<Sentence> =
        seg.idle.iter().map(|&span| Sentence { text: IDLE.to_string(), frame_span: span }).collect();
    for (sn, rec) in seg.snippets.iter().zip(recognized) {
        sentences.extend(realize_level(sn, rec, k, ts, lib, labels)?.sentences);
    }
    sentences.sort_by_key(|s| s.frame_span.0);
    Ok(Description { hand: seg.hand, level: k, sentences })
}

/// Levels available for a hand across all its snippets.
pub fn hand_levels(recognized: &[Vec<RecognizedAction>]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for r in recognized {
        out.extend(available_levels(r));
    }
    out
}
