use manipsem::events::{AtomicAction, Side, TraceAnalysis};
use manipsem::evalkit::{compare_models, corpus, generate_synthetic_trace, ScenarioSpec, Synthetic, SCENARIOS, TRUTH_STRIDE};
use manipsem::relations::SsrLabel;
use manipsem::grammar::MappingLibrary;
use manipsem::pipeline::analyze;
use manipsem::{Config, Execution};

fn show(a: &AtomicAction) -> String {
    format!("{:?} {} {:?} {} {:?} {:?}", a.subject, a.primitive, a.object, a.relation, a.place, a.frame_span)
}

fn diff(got: &[AtomicAction], want: &[AtomicAction]) -> String {
    let mut s = String::new();
    for i in 0..got.len().max(want.len()) {
        let g = got.get(i).map(show).unwrap_or_default();
        let w = want.get(i).map(show).unwrap_or_default();
        s += &format!("{} {:<70} | {}\n", if g == w { " " } else { "*" }, g, w);
    }
    s
}

fn gen(name: &str, seed: u64, noise: f64) -> Synthetic {
    generate_synthetic_trace(&ScenarioSpec::new(name, seed).with_noise(noise), &Config::default()).unwrap()
}

/// Name of the single action recognised for the acting hand, if exactly one.
fn recovered(s: &Synthetic) -> Option<String> {
    let cfg = Config::default();
    let lib = MappingLibrary::default_library();
    let a = analyze(&s.trace, &cfg, &lib, Execution::Sequential).unwrap();
    let names: Vec<String> =
        a.hand(s.truth.side).recognized.iter().flatten().filter(|r| !r.is_unknown()).map(|r| r.name.clone()).collect();
    let unknown = a.hand(s.truth.side).recognized.iter().flatten().any(|r| r.is_unknown());
    (names.len() == 1 && !unknown).then(|| names[0].clone())
}

#[test]
fn noise_free_closure() {
    let cfg = Config::default();
    let lib = MappingLibrary::default_library();
    for name in SCENARIOS {
        for seed in 0..20 {
            let s = gen(name, seed, 0.0);
            let a = analyze(&s.trace, &cfg, &lib, Execution::Sequential).unwrap();
            for side in [Side::Left, Side::Right] {
                let got = &a.hand(side).actions;
                let want = s.truth.actions.side(side);
                assert!(got == want, "{name} seed {seed} {side:?}\n{}", diff(got, want));
            }
            let rec = &a.hand(s.truth.side).recognized;
            let hits: Vec<_> = rec.iter().flatten().collect();
            assert_eq!(hits.len(), 1, "{name} seed {seed}: {hits:?}");
            assert_eq!(hits[0].name, name);
            assert_eq!(hits[0].bindings, s.truth.bindings, "{name} seed {seed}");
        }
    }
}

#[test]
fn generation_is_deterministic() {
    for name in SCENARIOS {
        assert_eq!(gen(name, 7, 0.01), gen(name, 7, 0.01));
    }
    assert_ne!(gen("Stir", 1, 0.01).trace, gen("Stir", 2, 0.01).trace);
}

#[test]
fn unknown_scenario() {
    let spec = ScenarioSpec::new("Juggle", 0);
    assert!(generate_synthetic_trace(&spec, &Config::default()).is_err());
}

#[test]
fn mild_noise_recovery() {
    let mut ok = 0;
    let mut total = 0;
    for name in SCENARIOS {
        for seed in 0..10 {
            total += 1;
            if recovered(&gen(name, seed, 0.01)).as_deref() == Some(name) {
                ok += 1;
            }
        }
    }
    assert!(ok as f64 >= 0.9 * total as f64, "{ok}/{total}");
}

#[test]
fn touch_graph_survives_noise() {
    let cfg = Config::default();
    for name in SCENARIOS {
        for seed in 0..3 {
            let clean = gen(name, seed, 0.0);
            let noisy = gen(name, seed, 0.02);
            let a = TraceAnalysis::new(&clean.trace, &cfg, Execution::Sequential).unwrap();
            let b = TraceAnalysis::new(&noisy.trace, &cfg, Execution::Sequential).unwrap();
            for f in 0..a.frame_count() {
                assert_eq!(a.touch_pairs(f), b.touch_pairs(f), "{name} seed {seed} frame {f}");
            }
        }
    }
}

#[test]
fn hull_beats_aabb() {
    let cfg = Config::default();
    let scenes: Vec<Synthetic> = corpus(28, 0.005, 3).iter().map(|s| generate_synthetic_trace(s, &cfg).unwrap()).collect();
    let r = compare_models(&scenes, &cfg, Execution::Parallel).unwrap();
    assert!(r.hull.accuracy > r.aabb.accuracy, "{} vs {}", r.hull.accuracy, r.aabb.accuracy);
    assert!(r.aabb.emitted.iter().all(|l| !l.needs_hull()), "{:?}", r.aabb.emitted);
    assert!(r.hull.distinguishes[&SsrLabel::Pwi] && r.hull.distinguishes[&SsrLabel::Pco]);
    assert_eq!(r.hull.total, r.aabb.total);
    assert!(compare_models(&[], &cfg, Execution::Sequential).is_err());
}

#[test]
fn truth_is_sampled_on_stride() {
    let s = gen("Cut", 4, 0.0);
    let n = s.trace.frames.len();
    assert_eq!(s.truth.relations.len(), n.div_ceil(TRUTH_STRIDE));
    let objects = s.trace.frames[0].objects.len();
    assert!(s.truth.relations.iter().all(|ft| ft.frame % TRUTH_STRIDE == 0 && ft.pairs.len() == objects * (objects - 1) / 2));
}

#[test]
fn padding_extends_trace() {
    let mut spec = ScenarioSpec::new("Hold", 1);
    spec.frames = Some(400);
    let s = generate_synthetic_trace(&spec, &Config::default()).unwrap();
    assert_eq!(s.trace.frames.len(), 400);
    assert_eq!(recovered(&s).as_deref(), Some("Hold"));
}
