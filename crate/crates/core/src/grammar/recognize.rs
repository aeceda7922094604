use serde::Serialize;

use super::library::{ActionPattern, Bindings, MappingLibrary, ObjectPat, PlacePat, RelationPat, SubjectPat, Template, Value};
use crate::events::{AtomicAction, Entity, Place, Side, Subject};

pub const UNKNOWN: &str = "Unknown";

/// One recognized span of a hand's atomic actions. `span` is a half-open
/// range of action indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecognizedAction {
    pub name: String,
    pub bindings: Bindings,
    pub span: (usize, usize),
    pub hand: Side,
    /// Named groups with their half-open action ranges.
    pub groups: Vec<(String, (usize, usize))>,
}

impl RecognizedAction {
    pub fn is_unknown(&self) -> bool {
        self.name == UNKNOWN
    }
}

struct Matcher<'a> {
    pattern: &'a ActionPattern,
    places: std::collections::BTreeSet<String>,
    actions: &'a [AtomicAction],
}

impl Matcher<'_> {
    fn bind(&self, b: &mut Bindings, var: &str, val: Value) -> bool {
        if let Some(v) = b.get(var) {
            return *v == val;
        }
        if val == Value::Ground && !self.places.contains(var) {
            return false;
        }
        if b.values().any(|v| *v == val) {
            return false;
        }
        b.insert(var.to_string(), val);
        true
    }

    fn step(&self, t: &Template, a: &AtomicAction, b: &mut Bindings) -> bool {
        if t.primitive != a.primitive {
            return false;
        }
        if let RelationPat::Is(l) = t.relation {
            if l != a.relation {
                return false;
            }
        }
        let subject_ok = match (&t.subject, &a.subject) {
            (SubjectPat::Hand, Subject::Hand(_)) => true,
            (SubjectPat::Me(v), Subject::Me(_, id)) => self.bind(b, v, Value::Object(id.clone())),
            _ => false,
        };
        if !subject_ok {
            return false;
        }
        let object_ok = match (&t.object, &a.object) {
            (ObjectPat::Nothing, None) => true,
            (ObjectPat::Ground, Some(Entity::Ground)) => true,
            (ObjectPat::Var(v), Some(Entity::Ground)) => self.bind(b, v, Value::Ground),
            (ObjectPat::Var(v), Some(Entity::Object(id))) => self.bind(b, v, Value::Object(id.clone())),
            _ => false,
        };
        if !object_ok {
            return false;
        }
        match (&t.place, &a.place) {
            (PlacePat::Air, Place::Air) | (PlacePat::Ground, Place::Ground) => true,
            (PlacePat::Var(v), Place::Ground) => self.bind(b, v, Value::Ground),
            (PlacePat::Var(v), Place::Object(id)) => self.bind(b, v, Value::Object(id.clone())),
            _ => false,
        }
    }

    /// Matches templates `ti..` from action `pos`; repeated steps try the
    /// longest run first. Returns the end position and per-template counts.
    fn go(&self, ti: usize, pos: usize, b: &Bindings, counts: &mut Vec<usize>) -> Option<(usize, Bindings)> {
        let Some(t) = self.pattern.templates.get(ti) else {
            return Some((pos, b.clone()));
        };
        if !t.repeat {
            let a = self.actions.get(pos)?;
            let mut nb = b.clone();
            if !self.step(t, a, &mut nb) {
                return None;
            }
            counts.push(1);
            let r = self.go(ti + 1, pos + 1, &nb, counts);
            if r.is_none() {
                counts.pop();
            }
            return r;
        }
        let mut nb = b.clone();
        let mut run = 0;
        let mut states = Vec::new();
        while let Some(a) = self.actions.get(pos + run) {
            if !self.step(t, a, &mut nb) {
                break;
            }
            run += 1;
            states.push(nb.clone());
        }
        for n in (1..=run).rev() {
            counts.push(n);
            if let Some(r) = self.go(ti + 1, pos + n, &states[n - 1], counts) {
                return Some(r);
            }
            counts.pop();
        }
        None
    }
}

fn match_at(p: &ActionPattern, actions: &[AtomicAction], start: usize) -> Option<(usize, Bindings, Vec<usize>)> {
    let m = Matcher { pattern: p, places: p.place_variables(), actions };
    let mut counts = Vec::new();
    m.go(0, start, &Bindings::new(), &mut counts).map(|(end, b)| (end, b, counts))
}

fn groups_for(p: &ActionPattern, start: usize, counts: &[usize]) -> Vec<(String, (usize, usize))> {
    let mut out: Vec<(String, (usize, usize))> = Vec::new();
    let mut pos = start;
    for (t, &n) in p.templates.iter().zip(counts) {
        let name = &p.groups[t.group];
        match out.last_mut() {
            Some((g, span)) if g == name => span.1 = pos + n,
            _ => out.push((name.clone(), (pos, pos + n))),
        }
        pos += n;
    }
    out
}

/// Greedy left-to-right recognition: at each position the library entry
/// with the longest match wins (ties go to the earlier entry). Positions no
/// entry matches are collected into `Unknown` spans.
pub fn recognize(actions: &[AtomicAction], lib: &MappingLibrary) -> Vec<RecognizedAction> {
    let mut out: Vec<RecognizedAction> = Vec::new();
    let hand = actions.first().map_or(Side::Left, |a| a.subject.side());
    let mut i = 0;
    while i < actions.len() {
        let mut best: Option<(&ActionPattern, usize, Bindings, Vec<usize>)> = None;
        for p in &lib.entries {
            if let Some((end, b, counts)) = match_at(p, actions, i) {
                if best.as_ref().is_none_or(|x| end > x.1) {
                    best = Some((p, end, b, counts));
                }
            }
        }
        match best {
            Some((p, end, bindings, counts)) => {
                out.push(RecognizedAction {
                    name: p.name.clone(),
                    bindings,
                    span: (i, end),
                    hand,
                    groups: groups_for(p, i, &counts),
                });
                i = end;
            }
            None => {
                match out.last_mut() {
                    Some(r) if r.is_unknown() && r.span.1 == i => {
                        r.span.1 = i + 1;
                        r.groups[0].1 .1 = i + 1;
                    }
                    _ => out.push(RecognizedAction {
                        name: UNKNOWN.to_string(),
                        bindings: Bindings::new(),
                        span: (i, i + 1),
                        hand,
                        groups: vec![(UNKNOWN.to_lowercase(), (i, i + 1))],
                    }),
                }
                i += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::decompose;

    #[test]
    fn lift_round_trip() {
        let lib = MappingLibrary::default_library();
        let mut b = Bindings::new();
        b.insert("obj".into(), Value::Object("cup".into()));
        b.insert("place".into(), Value::Ground);
        let acts = decompose(&lib, "Lift", &b, Side::Left, &[3]).unwrap();
        assert_eq!(acts.len(), 7);
        let r = recognize(&acts, &lib);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].name, "Lift");
        assert_eq!(r[0].bindings, b);
        assert_eq!(r[0].groups.iter().map(|g| g.0.as_str()).collect::<Vec<_>>(), ["pick", "carry", "put"]);
    }

    #[test]
    fn empty_and_unknown() {
        let lib = MappingLibrary::default_library();
        assert!(recognize(&[], &lib).is_empty());
        let mut b = Bindings::new();
        b.insert("obj".into(), Value::Object("cup".into()));
        b.insert("place".into(), Value::Ground);
        let acts = decompose(&lib, "Lift", &b, Side::Left, &[1]).unwrap();
        let r = recognize(&acts[1..3], &lib);
        assert_eq!(r.len(), 1);
        assert!(r[0].is_unknown());
        assert_eq!(r[0].span, (0, 2));
    }
}
