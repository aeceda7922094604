use std::collections::BTreeSet;

use serde::Serialize;

use super::{AtomicAction, Entity, Place, Primitive, Side, Subject};

/// Maximum number of distinct object roles in one snippet.
pub const MAX_SLOTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snippet {
    pub hand: Side,
    pub frame_span: (usize, usize),
    pub actions: Vec<AtomicAction>,
    /// Still open when the trace ended.
    pub open: bool,
    /// Object ids in slot order; ids past the third share the last slot.
    pub slots: Vec<String>,
}

impl Snippet {
    /// Zero-based slot of an object id.
    pub fn slot(&self, id: &str) -> Option<usize> {
        self.slots.iter().position(|s| s == id).map(|k| k.min(MAX_SLOTS - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Segmentation {
    pub hand: Side,
    pub snippets: Vec<Snippet>,
    /// Inclusive frame spans where the hand is free.
    pub idle: Vec<(usize, usize)>,
}

/// Object ids in order of first appearance (carried object, object, place).
pub fn assign_slots(actions: &[AtomicAction]) -> Vec<String> {
    let mut slots: Vec<String> = Vec::new();
    let mut push = |id: &str| {
        if !slots.iter().any(|s| s == id) {
            if slots.len() == MAX_SLOTS {
                log::warn!("more than {MAX_SLOTS} objects in one snippet; `{id}` shares slot O{MAX_SLOTS}");
            }
            slots.push(id.to_string());
        }
    };
    for a in actions {
        if let Subject::Me(_, x) = &a.subject {
            push(x);
        }
        if let Some(Entity::Object(x)) = &a.object {
            push(x);
        }
        if let Place::Object(x) = &a.place {
            push(x);
        }
    }
    slots
}

/// Splits one hand's actions into snippets, from a touch by the free hand to
/// the untouch that frees it again.
pub fn segment_actions(actions: &[AtomicAction], hand: Side, frame_count: usize) -> Segmentation {
    let mut snippets = Vec::new();
    let mut held: BTreeSet<Entity> = BTreeSet::new();
    let mut current: Option<(usize, Vec<AtomicAction>)> = None;
    for a in actions {
        let direct = matches!(a.subject, Subject::Hand(_));
        let start = a.frame_span.0;
        if direct && a.primitive == Primitive::T && held.is_empty() {
            current = Some((start, Vec::new()));
        }
        let Some((_, acts)) = current.as_mut() else { continue };
        acts.push(a.clone());
        if direct {
            if let Some(o) = &a.object {
                match a.primitive {
                    Primitive::T => {
                        held.insert(o.clone());
                    }
                    Primitive::U => {
                        held.remove(o);
                    }
                    _ => {}
                }
            }
            if a.primitive == Primitive::U && held.is_empty() {
                let (s, acts) = current.take().unwrap();
                let slots = assign_slots(&acts);
                snippets.push(Snippet { hand, frame_span: (s, a.frame_span.1), actions: acts, open: false, slots });
            }
        }
    }
    if let Some((s, acts)) = current {
        let slots = assign_slots(&acts);
        let end = frame_count.saturating_sub(1).max(s);
        snippets.push(Snippet { hand, frame_span: (s, end), actions: acts, open: true, slots });
    }
    let mut idle = Vec::new();
    let mut cursor = 0usize;
    for sn in &snippets {
        if sn.frame_span.0 > cursor {
            idle.push((cursor, sn.frame_span.0 - 1));
        }
        cursor = sn.frame_span.1 + 1;
    }
    if cursor < frame_count {
        idle.push((cursor, frame_count - 1));
    }
    Segmentation { hand, snippets, idle }
}

impl PartialOrd for Entity {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entity {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self, other) {
            (Entity::Ground, Entity::Ground) => std::cmp::Ordering::Equal,
            (Entity::Ground, _) => std::cmp::Ordering::Less,
            (_, Entity::Ground) => std::cmp::Ordering::Greater,
            (Entity::Object(a), Entity::Object(b)) => a.cmp(b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::SsrLabel;

    fn aa(subject: Subject, p: Primitive, obj: &str, f: usize) -> AtomicAction {
        AtomicAction {
            subject,
            primitive: p,
            object: Some(Entity::Object(obj.into())),
            relation: SsrLabel::To,
            place: Place::Ground,
            frame_span: (f, f),
        }
    }

    #[test]
    fn one_snippet_and_idle() {
        let h = Subject::Hand(Side::Left);
        let acts = vec![
            aa(h.clone(), Primitive::T, "cup", 5),
            aa(Subject::Me(Side::Left, "cup".into()), Primitive::U, "plate", 8),
            aa(h, Primitive::U, "cup", 20),
        ];
        let s = segment_actions(&acts, Side::Left, 30);
        assert_eq!(s.snippets.len(), 1);
        assert_eq!(s.snippets[0].frame_span, (5, 20));
        assert_eq!(s.snippets[0].slots, vec!["cup", "plate"]);
        assert_eq!(s.idle, vec![(0, 4), (21, 29)]);
    }

    #[test]
    fn never_touching_is_idle() {
        let s = segment_actions(&[], Side::Right, 10);
        assert!(s.snippets.is_empty());
        assert_eq!(s.idle, vec![(0, 9)]);
    }

    #[test]
    fn open_at_end() {
        let s = segment_actions(&[aa(Subject::Hand(Side::Left), Primitive::T, "cup", 3)], Side::Left, 10);
        assert!(s.snippets[0].open);
        assert_eq!(s.snippets[0].frame_span, (3, 9));
    }
}
