use proptest::prelude::*;

use wcapos::dot::{export_cart_dot, export_dot};
use wcapos::json::{cart_doc, export_json, import_json, reexport, render};
use wcapos_core::cart::build_cart;
use wcapos_core::context::build_context;
use wcapos_core::eval::{loocv, Learner, Model};
use wcapos_core::fixtures::{balloons, watermelon};
use wcapos_core::structure::{build_structure, BuildParams};
use wcapos_core::{BinarizeOptions, FormalDecisionContext};

fn context() -> impl Strategy<Value = FormalDecisionContext> {
    (1usize..=40, 1usize..=8).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), m), n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(rows, d)| {
                FormalDecisionContext::new(
                    (1..=n).map(|i| format!("o{i}")).collect(),
                    (0..m).map(|j| format!("attr \"{j}\"")).collect(),
                    &rows,
                    &d,
                )
                .unwrap()
            })
    })
}

fn params() -> impl Strategy<Value = BuildParams> {
    prop_oneof![Just(BuildParams::default()), Just(BuildParams::strict())]
}

#[test]
fn dot_parses_for_fixtures() {
    let s = build_structure(&watermelon(), &BuildParams::default()).unwrap();
    graphviz_rust::parse(&export_dot(&s)).unwrap();
    let (ctx, _) = build_context(&balloons(), &BinarizeOptions::default()).unwrap();
    let s = build_structure(&ctx, &BuildParams::default()).unwrap();
    graphviz_rust::parse(&export_dot(&s)).unwrap();
    graphviz_rust::parse(&export_cart_dot(
        &build_cart(&ctx, &BuildParams::strict()).unwrap(),
    ))
    .unwrap();
}

#[test]
fn threshold_names_survive_dot_and_json() {
    let raw = wcapos_core::RawDataset::new(
        vec!["age".into()],
        vec![wcapos_core::RawColumn::Continuous(vec![
            30.0, 40.0, 50.0, 60.0, 70.0, 80.0,
        ])],
        "y".into(),
        vec![false, false, true, false, true, true],
        None,
    )
    .unwrap();
    let (ctx, map) = build_context(&raw, &BinarizeOptions::default()).unwrap();
    let s = build_structure(&ctx, &BuildParams::strict())
        .unwrap()
        .with_binarization(map)
        .unwrap();
    let dot = export_dot(&s);
    assert!(dot.contains("age\u{2265}"));
    graphviz_rust::parse(&dot).unwrap();
    let text = export_json(&s, None);
    assert_eq!(reexport(&import_json(&text).unwrap()), text);
}

#[test]
fn evaluation_block_round_trips() {
    let raw = balloons();
    let (ctx, map) = build_context(&raw, &BinarizeOptions::default()).unwrap();
    let s = build_structure(&ctx, &BuildParams::default())
        .unwrap()
        .with_binarization(map)
        .unwrap();
    let r = loocv(
        &raw,
        &BuildParams::default(),
        Learner::Causal,
        &BinarizeOptions::default(),
    )
    .unwrap();
    let text = export_json(&s, Some(&r));
    let back = import_json(&text).unwrap();
    let ev = back.doc.evaluation.as_ref().unwrap();
    assert_eq!(ev.folds.len(), 20);
    assert_eq!(ev.acc, 1.0);
    assert_eq!(reexport(&back), text);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dot_is_well_formed(ctx in context(), p in params()) {
        let s = build_structure(&ctx, &p).unwrap();
        let dot = export_dot(&s);
        prop_assert!(graphviz_rust::parse(&dot).is_ok(), "{}", dot);
        prop_assert_eq!(dot.matches("->").count(), 2 * s.nodes().iter().filter(|n| !n.is_leaf()).count());
        let t = build_cart(&ctx, &p).unwrap();
        prop_assert!(graphviz_rust::parse(&export_cart_dot(&t)).is_ok());
    }

    #[test]
    fn json_round_trip_is_byte_identical(ctx in context(), p in params()) {
        let s = build_structure(&ctx, &p).unwrap();
        let text = export_json(&s, None);
        let back = import_json(&text).unwrap();
        prop_assert_eq!(reexport(&back), text.clone());
        match back.model {
            Model::Causal(t) => {
                prop_assert_eq!(t.nodes().len(), s.nodes().len());
                for (a, b) in t.nodes().iter().zip(s.nodes()) {
                    prop_assert_eq!(a.region, b.region);
                    prop_assert_eq!(a.split_attribute(), b.split_attribute());
                    prop_assert_eq!(a.split.and_then(|x| x.cf()).map(f64::to_bits), b.split.and_then(|x| x.cf()).map(f64::to_bits));
                    prop_assert_eq!(a.split.and_then(|x| x.nc()).map(f64::to_bits), b.split.and_then(|x| x.nc()).map(f64::to_bits));
                }
            }
            Model::Cart(_) => prop_assert!(false, "wrong model kind"),
        }

        let c = build_cart(&ctx, &p).unwrap();
        let text = render(&cart_doc(&c, ctx.n_objects(), None));
        prop_assert_eq!(reexport(&import_json(&text).unwrap()), text);
    }

    #[test]
    fn export_is_pure(ctx in context()) {
        let s = build_structure(&ctx, &BuildParams::default()).unwrap();
        prop_assert_eq!(export_json(&s, None), export_json(&s, None));
        prop_assert_eq!(export_dot(&s), export_dot(&s));
    }
}
