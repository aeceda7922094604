mod common;

use common::random_bindings;
use manipsem::events::{assign_slots, AtomicAction, Entity, Place, Primitive, Side, Subject};
use manipsem::grammar::{
    action_tokens, decompose, load_mapping_library, recognize, tokenize, Bindings, Grammar, GrammarError,
    MappingLibrary, Value, MAX_PATTERN_LEN,
};
use manipsem::relations::SsrLabel;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn library_round_trip() {
    let lib = MappingLibrary::default_library();
    assert_eq!(lib.entries.len(), 14);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in &lib.entries {
        for _ in 0..20 {
            let b = random_bindings(&lib, &p.name, &mut rng);
            let reps: Vec<usize> = (0..p.repeat_count()).map(|_| rng.gen_range(1..=5)).collect();
            let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
            let acts = decompose(&lib, &p.name, &b, side, &reps).unwrap();
            let r = recognize(&acts, &lib);
            assert_eq!(r.len(), 1, "{}: {:?}", p.name, r);
            assert_eq!(r[0].name, p.name);
            assert_eq!(r[0].bindings, b, "{}", p.name);
            assert_eq!(r[0].span, (0, acts.len()));
            assert_eq!(r[0].hand, side);
            let slots = assign_slots(&acts);
            assert!(Grammar::standard().accepts(&action_tokens(&acts, &slots)));
        }
    }
}

#[test]
fn patterns_are_short() {
    for p in &MappingLibrary::default_library().entries {
        assert!(p.templates.len() <= MAX_PATTERN_LEN, "{}", p.name);
    }
}

#[test]
fn push_tree() {
    let o1 = || Some(Entity::Object("o1".into()));
    let aa = |subject, primitive, object, relation| AtomicAction {
        subject,
        primitive,
        object,
        relation,
        place: Place::Ground,
        frame_span: (0, 0),
    };
    let acts = vec![
        aa(Subject::Hand(Side::Left), Primitive::T, o1(), SsrLabel::ArT),
        aa(Subject::Me(Side::Left, "o1".into()), Primitive::Fmt, Some(Entity::Ground), SsrLabel::To),
        aa(Subject::Hand(Side::Left), Primitive::U, o1(), SsrLabel::Ar),
    ];
    let tokens = action_tokens(&acts, &assign_slots(&acts));
    assert_eq!(tokens.join(" "), "HL T O1 ArT G HL O1 Fmt G To G HL U O1 Ar G");
    let tree = Grammar::standard().parse(&tokens).unwrap();
    let expected = "(S (S_p (S_p (S_p (Sub (Hand HL)) (A_p (A T) (O_p (O O1) (SR_p (SR ArT) (P G))))) \
                    (Sub (Me (Hand HL) (O O1))) (A_p (A Fmt) (O_p (O G) (SR_p (SR To) (P G))))) \
                    (Sub (Hand HL)) (A_p (A U) (O_p (O O1) (SR_p (SR Ar) (P G))))))";
    assert_eq!(tree.bracketed(), expected);
}

#[test]
fn library_errors() {
    let bad_prim = "action Foo\nhands 1\nH Q ?x To ?p\n";
    assert!(matches!(load_mapping_library(bad_prim.as_bytes()), Err(GrammarError::PatternParse { line: 3, .. })));
    let dup = "action Foo\nH T ?x To ?p\nH U ?x Ab ?p\naction foo\nH T ?x To ?p\n";
    assert!(matches!(load_mapping_library(dup.as_bytes()), Err(GrammarError::DuplicateName(_))));
    let bad_shape = "action Foo\nH Mt ?x To ?p +\n";
    assert!(matches!(load_mapping_library(bad_shape.as_bytes()), Err(GrammarError::NonCfgPattern { .. })));
    let bad_repeat = "action Foo\nH T ?x To ?p +\n";
    assert!(matches!(load_mapping_library(bad_repeat.as_bytes()), Err(GrammarError::PatternParse { .. })));
    let lib = MappingLibrary::default_library();
    assert!(matches!(decompose(&lib, "Juggle", &Bindings::new(), Side::Left, &[]), Err(GrammarError::UnknownAction(_))));
    assert!(matches!(
        decompose(&lib, "Lift", &Bindings::new(), Side::Left, &[1]),
        Err(GrammarError::UnboundVariable { .. })
    ));
}

#[test]
fn unknown_between_actions() {
    let lib = MappingLibrary::default_library();
    let mut b = Bindings::new();
    b.insert("obj".into(), Value::Object("cup".into()));
    b.insert("place".into(), Value::Ground);
    let mut acts = decompose(&lib, "Hold", &b, Side::Left, &[]).unwrap();
    let stray = acts[1].clone();
    acts.push(stray.clone());
    acts.push(stray);
    acts.extend(decompose(&lib, "Hold", &b, Side::Left, &[]).unwrap());
    let r = recognize(&acts, &lib);
    let names: Vec<&str> = r.iter().map(|x| x.name.as_str()).collect();
    assert_eq!(names, ["Hold", "Unknown", "Hold"]);
    assert_eq!(r[1].span, (2, 4));
}

proptest! {
    #[test]
    fn no_parse_prefix_is_monotone(toks in prop::collection::vec(
        prop::sample::select(vec!["HL", "HR", "T", "U", "Mt", "Fmt", "O1", "O2", "G", "-", "To", "Ab", "Air", "Pwi"]),
        0..16,
    )) {
        let g = Grammar::standard();
        let text = toks.join(" ");
        let tokens = tokenize(&text);
        if let Err(GrammarError::NoParse { position, .. }) = g.parse(&tokens) {
            prop_assert!(position <= tokens.len());
            // Extending past the failure point cannot move it earlier.
            let mut longer = tokens.clone();
            longer.push("G".into());
            if let Err(GrammarError::NoParse { position: p2, .. }) = g.parse(&longer) {
                prop_assert!(p2 >= position);
            }
        }
    }
}
