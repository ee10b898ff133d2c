//! Wire format round trips and corpus reproducibility.

use std::sync::OnceLock;

use proptest::prelude::*;

use kleislikit::abskl1::{AbsKL1, AbsKL1Data};
use kleislikit::abskl2::{AbsKL2, AbsKL2Data};
use kleislikit::fincat::{CategoryData, FinCategory};
use kleislikit::instances::{
    check_instance, comorphism_from_data, comorphism_to_data, from_json_lines, generate_corpus, to_json_lines,
    ComorphismData, CorpusConfig, CorpusInstance, Kind,
};
use kleislikit::monadkit::{Monad, MonadData};
use kleislikit::pseudomonadkit::{Pseudomonad, PseudomonadData};
use kleislikit::twocat::{Fin2Category, Fin2CategoryData};
use kleislikit::Guard;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn corpus() -> &'static [CorpusInstance] {
    static C: OnceLock<Vec<CorpusInstance>> = OnceLock::new();
    C.get_or_init(|| generate_corpus(&CorpusConfig::default(), &Guard::default()).expect("default corpus"))
}

fn instance() -> impl Strategy<Value = &'static CorpusInstance> {
    (0..corpus().len()).prop_map(|i| &corpus()[i])
}

fn small() -> CorpusConfig {
    CorpusConfig {
        max_poset: 3,
        max_objects: 2,
        max_morphisms: 3,
        ..CorpusConfig::default()
    }
}

/// Text round trip of the wire type, then through the engine and back.
fn round_trip<D, V>(payload: &serde_json::Value, build: impl Fn(&D) -> V, print: impl Fn(&V) -> D) -> Result<(), TestCaseError>
where
    D: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug,
{
    let d: D = serde_json::from_value(payload.clone()).unwrap();
    let text = serde_json::to_string(&d).unwrap();
    let again: D = serde_json::from_str(&text).unwrap();
    prop_assert_eq!(&again, &d);
    prop_assert_eq!(print(&build(&again)), d);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_print_is_identity(inst in instance()) {
        let p = &inst.payload;
        match inst.kind {
            Kind::Category => round_trip(p, |d: &CategoryData| FinCategory::new(d).unwrap(), |c| c.to_data())?,
            Kind::Fin2cat => round_trip(p, |d: &Fin2CategoryData| Fin2Category::from_data(d).unwrap(), |c| c.to_data())?,
            Kind::Monad => round_trip(p, |d: &MonadData| Monad::from_data(d).unwrap(), |m| m.to_data())?,
            Kind::Abskl1 => round_trip(p, |d: &AbsKL1Data| AbsKL1::from_data(d).unwrap(), |s| s.to_data())?,
            Kind::Pseudomonad => round_trip(p, |d: &PseudomonadData| Pseudomonad::from_data(d).unwrap(), |m| m.to_data())?,
            Kind::Abskl2 => round_trip(p, |d: &AbsKL2Data| AbsKL2::from_data(d).unwrap(), |s| s.to_data())?,
            Kind::Comorphism => round_trip(
                p,
                |d: &ComorphismData| {
                    let (_, _, g) = comorphism_from_data(d).unwrap();
                    let target = AbsKL1::from_data(&d.target).unwrap();
                    (g, target)
                },
                |(g, target)| comorphism_to_data(g, target),
            )?,
        }
        let line = to_json_lines(std::slice::from_ref(inst));
        prop_assert_eq!(&from_json_lines(&line).unwrap()[0], inst);
    }
}

#[test]
fn regeneration_is_byte_for_byte_deterministic() {
    let g = Guard::default();
    let a = to_json_lines(&generate_corpus(&small(), &g).unwrap());
    let b = to_json_lines(&generate_corpus(&small(), &g).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn every_expected_record_is_reproduced() {
    let g = Guard::default();
    let mut failures = Vec::new();
    for inst in corpus() {
        assert!(inst.expected.is_some(), "{} has no expected record", inst.name);
        match check_instance(inst, &g) {
            Ok(r) if r.is_valid() => {}
            Ok(r) => failures.push(format!("{}: {r}", inst.name)),
            Err(e) => failures.push(format!("{}: {e}", inst.name)),
        }
    }
    assert!(failures.is_empty(), "{} failures, first: {:?}", failures.len(), failures.first());
}

#[test]
fn corpus_covers_the_required_instances() {
    let names: Vec<&str> = corpus().iter().map(|i| i.name.as_str()).collect();
    for want in [
        "terminal_cat",
        "walking_arrow",
        "span_to_terminal",
        "identity_terminal",
        "identity_walking_arrow",
        "identity_span",
        "const_terminal",
        "chain2_top_closure",
    ] {
        assert!(names.contains(&want), "missing {want}");
    }
    for kind in [Kind::Category, Kind::Monad, Kind::Abskl1, Kind::Fin2cat, Kind::Pseudomonad, Kind::Abskl2, Kind::Comorphism] {
        assert!(corpus().iter().any(|i| i.kind == kind), "no {kind:?}");
    }
    assert!(names.iter().any(|n| n.ends_with("/twist")));
}

#[test]
fn a_tampered_record_is_reported() {
    let mut inst = corpus().iter().find(|i| i.kind == Kind::Monad).unwrap().clone();
    let e = inst.expected.as_mut().unwrap();
    let p = e.profile.as_mut().unwrap();
    p[0] = !p[0];
    let r = check_instance(&inst, &Guard::default()).unwrap();
    assert_eq!(r.violations_of("expected_record").count(), 1);
}
