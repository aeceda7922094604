use std::collections::{BTreeMap, BTreeSet};

use manipsem::events::{assign_slots, Side, Snippet};
use manipsem::grammar::{decompose, recognize, Bindings, MappingLibrary, Value};
use manipsem::realizer::{available_levels, realize_level, Labels, TemplateSet};
use proptest::prelude::*;

fn labels() -> Labels {
    let names: BTreeMap<String, String> = [("sd", "screwdriver"), ("hd", "hard disk"), ("sp", "sponge"), ("cup", "cup")]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    Labels::new(names, "table")
}

fn snippet(name: &str, binds: &[(&str, Option<&str>)], reps: &[usize]) -> Snippet {
    let lib = MappingLibrary::default_library();
    let b: Bindings = binds
        .iter()
        .map(|(k, v)| (k.to_string(), v.map_or(Value::Ground, |id| Value::Object(id.to_string()))))
        .collect();
    let mut acts = decompose(&lib, name, &b, Side::Left, reps).unwrap();
    for (i, a) in acts.iter_mut().enumerate() {
        a.frame_span = (10 + 3 * i, 10 + 3 * i);
    }
    let end = acts.last().unwrap().frame_span.1;
    let slots = assign_slots(&acts);
    Snippet { hand: Side::Left, frame_span: (10, end), actions: acts, open: false, slots }
}

fn screw() -> Snippet {
    snippet("Screw", &[("tool", Some("sd")), ("obj", Some("hd")), ("place", None)], &[2, 2, 2])
}

#[test]
fn screwing_levels() {
    let lib = MappingLibrary::default_library();
    let ts = TemplateSet::default_templates();
    let sn = screw();
    let rec = recognize(&sn.actions, &lib);
    assert_eq!(rec.len(), 1);
    assert_eq!(available_levels(&rec), BTreeSet::from([1, 2, 3]));
    let top = realize_level(&sn, &rec, 3, &ts, &lib, &labels()).unwrap();
    assert_eq!(top.sentences.len(), 1);
    assert_eq!(top.sentences[0].text, "The left hand performs screwing inside of a hard disk on the table by a screwdriver.");
    let mid = realize_level(&sn, &rec, 2, &ts, &lib, &labels()).unwrap();
    let texts: Vec<&str> = mid.sentences.iter().map(|s| s.text.as_str()).collect();
    assert_eq!(
        texts,
        [
            "The left hand picks up a screwdriver from the table and places it on a hard disk.",
            "They perform screwing in the inside of the hard disk on the table.",
            "The left hand leaves the screwdriver on the table.",
        ]
    );
    let detailed = realize_level(&sn, &rec, 1, &ts, &lib, &labels()).unwrap();
    assert_eq!(detailed.sentences.len(), sn.actions.len());
    assert_eq!(detailed.sentences[0].text, "The left hand touches the top of a screwdriver on the table.");
    assert_eq!(detailed.sentences[3].text, "They keep moving together above the table.");
}

#[test]
fn wiping_top_level() {
    let lib = MappingLibrary::default_library();
    let ts = TemplateSet::default_templates();
    let sn = snippet("Wipe", &[("tool", Some("sp")), ("place", None)], &[6]);
    let rec = recognize(&sn.actions, &lib);
    let top = realize_level(&sn, &rec, 3, &ts, &lib, &labels()).unwrap();
    assert_eq!(top.sentences[0].text, "The left hand wipes the table by a sponge.");
    let mid = realize_level(&sn, &rec, 2, &ts, &lib, &labels()).unwrap();
    assert_eq!(mid.sentences[1].text, "It wipes the table.");
}

#[test]
fn unknown_stays_detailed() {
    let lib = MappingLibrary::default_library();
    let ts = TemplateSet::default_templates();
    let mut sn = screw();
    sn.actions.truncate(4);
    let rec = recognize(&sn.actions, &lib);
    assert!(rec.iter().all(|r| r.is_unknown()));
    assert_eq!(available_levels(&rec), BTreeSet::from([1]));
    let d = realize_level(&sn, &rec, 3, &ts, &lib, &labels()).unwrap();
    assert_eq!(d.sentences.len(), 4);
}

#[test]
fn single_action_has_one_level() {
    let lib = MappingLibrary::default_library();
    let sn = screw();
    let rec = recognize(&sn.actions[..1], &lib);
    assert_eq!(available_levels(&rec), BTreeSet::from([1]));
}

#[test]
fn invalid_level() {
    let lib = MappingLibrary::default_library();
    let ts = TemplateSet::default_templates();
    let sn = screw();
    let rec = recognize(&sn.actions, &lib);
    assert!(realize_level(&sn, &rec, 0, &ts, &lib, &labels()).is_err());
    assert!(realize_level(&sn, &rec, 99, &ts, &lib, &labels()).is_err());
}

proptest! {
    #[test]
    fn levels_compress_and_cover(r1 in 1usize..5, r2 in 1usize..5, r3 in 1usize..5, cut in 0usize..4) {
        let lib = MappingLibrary::default_library();
        let ts = TemplateSet::default_templates();
        let mut sn = snippet("Screw", &[("tool", Some("sd")), ("obj", Some("hd")), ("place", None)], &[r1, r2, r3]);
        let n = sn.actions.len() - cut;
        sn.actions.truncate(n);
        sn.frame_span.1 = sn.actions[n - 1].frame_span.1;
        let rec = recognize(&sn.actions, &lib);
        let mut prev = usize::MAX;
        for k in 1..=3 {
            let d = realize_level(&sn, &rec, k, &ts, &lib, &labels()).unwrap();
            prop_assert!(d.sentences.len() <= prev);
            prev = d.sentences.len();
            if k == 1 {
                prop_assert_eq!(d.sentences.len(), n);
            }
            prop_assert_eq!(d.sentences[0].frame_span.0, sn.frame_span.0);
            prop_assert_eq!(d.sentences.last().unwrap().frame_span.1, sn.frame_span.1);
            for w in d.sentences.windows(2) {
                prop_assert_eq!(w[0].frame_span.1 + 1, w[1].frame_span.0);
            }
            let again = realize_level(&sn, &rec, k, &ts, &lib, &labels()).unwrap();
            prop_assert_eq!(d, again);
        }
    }
}
