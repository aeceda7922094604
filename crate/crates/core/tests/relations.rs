mod common;

use common::{model, relation_catalogue};
use manipsem::config::Config;
use manipsem::geometry::ObjectModel;
use manipsem::relations::{classify_ssr, relate, ssr_dual, ModelKind, SsrLabel};
use proptest::prelude::*;

#[test]
fn catalogue_each_label_fires() {
    let cfg = Config::default();
    for (want, a, b) in relation_catalogue() {
        assert_eq!(classify_ssr(&a, &b, &cfg), want, "forward {want}");
        assert_eq!(classify_ssr(&b, &a, &cfg), ssr_dual(want), "reverse {want}");
    }
}

#[test]
fn alias_maps_in_su_to_wi_co() {
    let cfg = Config { in_su_alias: true, ..Config::default() };
    let cat = relation_catalogue();
    let (_, a, b) = cat.iter().find(|c| c.0 == SsrLabel::In).unwrap();
    assert_eq!(classify_ssr(a, b, &cfg), SsrLabel::Wi);
    assert_eq!(classify_ssr(b, a, &cfg), SsrLabel::Co);
}

#[test]
fn aabb_mode_never_needs_hull_labels() {
    let cfg = Config::default();
    for (_, a, b) in relation_catalogue() {
        let r = relate(&a, &b, &cfg, ModelKind::Aabb).ssr;
        assert!(!r.needs_hull(), "{r}");
        assert_eq!(relate(&b, &a, &cfg, ModelKind::Aabb).ssr, ssr_dual(r));
    }
}

fn boxed(p: (f64, f64, f64, f64, f64, f64), shift: [f64; 3]) -> ObjectModel {
    let lo = [p.0 + shift[0], p.1 + shift[1], p.2 + shift[2]];
    model(lo, [lo[0] + p.3, lo[1] + p.4, lo[2] + p.5], 2)
}

fn quantized() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
    // Quarter-unit grid makes contacts and nestings frequent.
    let c = || (0i32..8).prop_map(|v| v as f64 * 0.25);
    let s = || (1i32..6).prop_map(|v| v as f64 * 0.25);
    (c(), c(), c(), s(), s(), s())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn duality_and_invariance(pa in quantized(), pb in quantized(), dx in -4i32..4, dy in -4i32..4, dz in -4i32..4) {
        let cfg = Config::default();
        for kind in [ModelKind::Hull, ModelKind::Aabb] {
            let (a, b) = (boxed(pa, [0.0; 3]), boxed(pb, [0.0; 3]));
            let ab = relate(&a, &b, &cfg, kind).ssr;
            prop_assert_eq!(ab, ssr_dual(relate(&b, &a, &cfg, kind).ssr));
            let s = [dx as f64 * 0.5, dy as f64 * 0.5, dz as f64 * 0.5];
            let (ta, tb) = (boxed(pa, s), boxed(pb, s));
            prop_assert_eq!(relate(&ta, &tb, &cfg, kind).ssr, ab);
            prop_assert_eq!(relate(&a, &b, &cfg, kind), relate(&a, &b, &cfg, kind));
        }
    }
}
