//! The serialized instance corpus: every named value the engine is checked
//! against, with the results it is expected to reproduce.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abskl1::{self, factor_through_unit, kleisli_abskl, reflect, AbsKL1, AbsKL1Data, ImageMonad};
use crate::abskl2::{abskl2_of_pseudomonad, build_b_theta_2, check_bidescent_profile, AbsKL2, AbsKL2Data};
use crate::corpus::{self, LiftBounds, MonadInstance};
use crate::error::{Error, Result};
use crate::fincat::{CategoryData, FinCategory, Functor, FunctorData};
use crate::guard::Guard;
use crate::monadkit::{kleisli, Monad, MonadData};
use crate::pseudomonadkit::{Pseudomonad, PseudomonadData};
use crate::report::{ValidationReport, Violation};
use crate::twocat::{locally_discrete, Fin2Category, Fin2CategoryData};

/// Candidate functors allowed in the uniqueness search of a factorisation.
pub const UNIQUENESS_BOUND: u128 = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Category,
    Monad,
    Abskl1,
    Fin2cat,
    Pseudomonad,
    Abskl2,
    Comorphism,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<[bool; 5]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile2: Option<[bool; 3]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusInstance {
    pub name: String,
    pub kind: Kind,
    pub payload: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

/// A co-morphism from a monad into the monad of an abstract Kleisli
/// structure's thunkable subcategory. `f` maps the source base into the
/// thunkable subcategory; `fbar` maps the source Kleisli category into the
/// Kleisli category of the induced monad.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComorphismData {
    pub source: MonadData,
    pub target: AbsKL1Data,
    pub f: FunctorData,
    pub fbar: FunctorData,
}

/// What [`generate_corpus`] emits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    /// Posets up to this many elements, with all their closure operators.
    pub max_poset: usize,
    /// Exhaustive monads on categories within these bounds.
    pub max_objects: usize,
    pub max_morphisms: usize,
    pub lift: LiftBounds,
    /// Co-morphisms are generated between monads whose bases have at most
    /// this many morphisms.
    pub comorphism_max_morphisms: usize,
    pub comorphisms_per_pair: usize,
    /// Attach expected-result records.
    pub expected: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_poset: 4,
            max_objects: 2,
            max_morphisms: 5,
            lift: LiftBounds::default(),
            comorphism_max_morphisms: 3,
            comorphisms_per_pair: 4,
            expected: true,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("wire types serialize")
}

fn counts<const N: usize>(pairs: [(&str, usize); N]) -> BTreeMap<String, usize> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn category_expected(c: &FinCategory) -> Expected {
    Expected {
        counts: counts([("objects", c.n_objects()), ("morphisms", c.n_morphisms())]),
        ..Default::default()
    }
}

fn fin2_expected(c: &Fin2Category) -> Expected {
    Expected {
        counts: counts([
            ("objects", c.n_objects()),
            ("onecells", c.n_onecells()),
            ("twocells", c.n_twocells()),
        ]),
        ..Default::default()
    }
}

fn monad_expected(m: &Monad, guard: &Guard) -> Result<Expected> {
    let p = abskl1::check_codescent_profile(m, guard)?;
    Ok(Expected {
        profile: Some(p.as_array()),
        counts: counts([("kleisli_morphisms", kleisli(m).category.n_morphisms())]),
        ..Default::default()
    })
}

fn abskl1_expected(s: &AbsKL1) -> Expected {
    let thunkable = (0..s.base.n_morphisms()).filter(|&f| s.thunkable(f)).count();
    Expected {
        counts: counts([("morphisms", s.base.n_morphisms()), ("thunkable", thunkable)]),
        ..Default::default()
    }
}

fn pseudomonad_expected(pm: &Pseudomonad, guard: &Guard) -> Result<Expected> {
    let p = check_bidescent_profile(pm, guard)?;
    Ok(Expected {
        profile2: Some(p.as_array()),
        ..Default::default()
    })
}

fn abskl2_expected(s: &AbsKL2, guard: &Guard) -> Result<Expected> {
    let bt = build_b_theta_2(s, guard)?;
    Ok(Expected {
        counts: counts([
            ("thunked_onecells", bt.thunked.len()),
            ("thunkable_twocells", bt.cells.len()),
        ]),
        ..Default::default()
    })
}

fn comorphism_expected(d: &ComorphismData, guard: &Guard) -> Result<Expected> {
    let (r, t, g) = comorphism_from_data(d)?;
    let (_, unique) = factor_through_unit(&r, &t, &g, &Guard::new(UNIQUENESS_BOUND.min(guard.bound)))?;
    Ok(Expected {
        counts: counts([("factorisations", usize::from(unique))]),
        ..Default::default()
    })
}

/// Rebuild a co-morphism with the reflection of its source and the image
/// monad of its target.
pub fn comorphism_from_data(d: &ComorphismData) -> Result<(abskl1::Reflection, ImageMonad, abskl1::CoMorphism)> {
    let m = Monad::from_data(&d.source)?;
    let r = reflect(&m);
    let t = ImageMonad::new(&AbsKL1::from_data(&d.target)?);
    let f = Functor::from_data(&m.base, &t.btheta.category, &d.f)?;
    let fbar = Functor::from_data(&r.kleisli.category, &t.kleisli.category, &d.fbar)?;
    let g = abskl1::CoMorphism::new(r.kleisli.clone(), t.kleisli.clone(), m, t.monad().clone(), f, fbar)?;
    Ok((r, t, g))
}

pub fn comorphism_to_data(g: &abskl1::CoMorphism, target: &AbsKL1) -> ComorphismData {
    ComorphismData {
        source: g.source.to_data(),
        target: target.to_data(),
        f: g.f.to_data(),
        fbar: g.fbar.to_data(),
    }
}

struct Emitter<'a> {
    out: Vec<CorpusInstance>,
    guard: &'a Guard,
    expected: bool,
}

impl Emitter<'_> {
    fn push(&mut self, name: String, kind: Kind, payload: Value, expected: impl FnOnce(&Guard) -> Result<Expected>) -> Result<()> {
        let expected = if self.expected { Some(expected(self.guard)?) } else { None };
        self.out.push(CorpusInstance {
            name,
            kind,
            payload,
            expected,
        });
        Ok(())
    }
}

/// The deterministic corpus described by `config`.
pub fn generate_corpus(config: &CorpusConfig, guard: &Guard) -> Result<Vec<CorpusInstance>> {
    let mut e = Emitter {
        out: Vec::new(),
        guard,
        expected: config.expected,
    };
    let mut cats: Vec<(String, FinCategory)> = vec![
        ("terminal_cat".into(), corpus::terminal_cat()),
        ("walking_arrow".into(), corpus::walking_arrow()),
        ("span_to_terminal".into(), corpus::span_to_terminal()),
    ];
    cats.extend(corpus::small_categories(config.max_objects, config.max_morphisms));
    for (name, c) in &cats {
        e.push(name.clone(), Kind::Category, to_value(&c.to_data()), |_| Ok(category_expected(c)))?;
    }
    for (name, c) in &cats {
        let d = locally_discrete(c);
        e.push(format!("{name}/discrete"), Kind::Fin2cat, to_value(&d.to_data()), |_| Ok(fin2_expected(&d)))?;
        if c.n_objects() <= config.lift.max_objects
            && c.n_morphisms() <= config.lift.max_onecells
            && 2 * c.n_morphisms() <= config.lift.max_twocells
        {
            let z = corpus::z2(c);
            e.push(format!("{name}/z2"), Kind::Fin2cat, to_value(&z.to_data()), |_| Ok(fin2_expected(&z)))?;
        }
    }

    let monads = corpus::monad_corpus(config.max_poset, config.max_objects, config.max_morphisms, guard)?;
    for inst in &monads {
        let m = &inst.monad;
        e.push(inst.name.clone(), Kind::Monad, to_value(&m.to_data()), |g| monad_expected(m, g))?;
    }
    for inst in &monads {
        let (s, _) = kleisli_abskl(&inst.monad);
        e.push(format!("{}/kleisli", inst.name), Kind::Abskl1, to_value(&s.to_data()), |_| {
            Ok(abskl1_expected(&s))
        })?;
    }

    let lifts = corpus::pseudomonad_corpus(&monads, config.lift)?;
    for inst in &lifts {
        let pm = &inst.pm;
        e.push(inst.name.clone(), Kind::Pseudomonad, to_value(&pm.to_data()), |g| pseudomonad_expected(pm, g))?;
    }
    for inst in &lifts {
        let (s, _) = abskl2_of_pseudomonad(&inst.pm, guard)?;
        e.push(format!("{}/kleisli", inst.name), Kind::Abskl2, to_value(&s.to_data()), |g| {
            abskl2_expected(&s, g)
        })?;
    }

    for (name, d) in comorphisms(&monads, config, guard)? {
        e.push(name, Kind::Comorphism, to_value(&d), |g| comorphism_expected(&d, g))?;
    }
    Ok(e.out)
}

/// Co-morphisms between small corpus monads and the images of their
/// Kleisli structures, restricted to those whose uniqueness search fits
/// [`UNIQUENESS_BOUND`].
fn comorphisms(monads: &[MonadInstance], config: &CorpusConfig, guard: &Guard) -> Result<Vec<(String, ComorphismData)>> {
    let small: Vec<&MonadInstance> = monads
        .iter()
        .filter(|m| m.monad.base.n_morphisms() <= config.comorphism_max_morphisms)
        .collect();
    let bound = Guard::new(UNIQUENESS_BOUND.min(guard.bound));
    let mut out = Vec::new();
    for src in &small {
        let r = reflect(&src.monad);
        for tgt in &small {
            let (s, _) = kleisli_abskl(&tgt.monad);
            let t = ImageMonad::new(&s);
            let found = match abskl1::comorphisms_into(&r, &t, usize::MAX, guard) {
                Ok(found) => found,
                Err(Error::SizeGuard { .. }) => continue,
                Err(err) => return Err(err),
            };
            let mut k = 0;
            for g in found {
                if k == config.comorphisms_per_pair {
                    break;
                }
                match factor_through_unit(&r, &t, &g, &bound) {
                    Ok(_) => {}
                    Err(Error::SizeGuard { .. }) => continue,
                    Err(err) => return Err(err),
                }
                out.push((format!("{}->{}/{k}", src.name, tgt.name), comorphism_to_data(&g, &s)));
                k += 1;
            }
        }
    }
    Ok(out)
}

/// Deserialize the payload for its kind, validate it, and compare the
/// recomputed results against the expected record.
pub fn check_instance(inst: &CorpusInstance, guard: &Guard) -> Result<ValidationReport> {
    let p = &inst.payload;
    let got = match inst.kind {
        Kind::Category => {
            let d: CategoryData = serde_json::from_value(p.clone())?;
            let c = FinCategory::new(&d)?;
            category_expected(&c)
        }
        Kind::Fin2cat => {
            let d: Fin2CategoryData = serde_json::from_value(p.clone())?;
            fin2_expected(&Fin2Category::from_data(&d)?)
        }
        Kind::Monad => {
            let d: MonadData = serde_json::from_value(p.clone())?;
            monad_expected(&Monad::from_data(&d)?, guard)?
        }
        Kind::Abskl1 => {
            let d: AbsKL1Data = serde_json::from_value(p.clone())?;
            abskl1_expected(&AbsKL1::from_data(&d)?)
        }
        Kind::Pseudomonad => {
            let d: PseudomonadData = serde_json::from_value(p.clone())?;
            pseudomonad_expected(&Pseudomonad::from_data(&d)?, guard)?
        }
        Kind::Abskl2 => {
            let d: AbsKL2Data = serde_json::from_value(p.clone())?;
            abskl2_expected(&AbsKL2::from_data(&d)?, guard)?
        }
        Kind::Comorphism => {
            let d: ComorphismData = serde_json::from_value(p.clone())?;
            comorphism_expected(&d, guard)?
        }
    };
    let mut r = ValidationReport::new();
    if let Some(want) = &inst.expected {
        if *want != got {
            r.push(
                Violation::new("expected_record", vec![inst.name.clone()])
                    .with_detail(format!("expected {}, got {}", to_value(want), to_value(&got))),
            );
        }
    }
    Ok(r)
}

/// One JSON document per line.
pub fn to_json_lines(instances: &[CorpusInstance]) -> String {
    let mut s = String::new();
    for i in instances {
        s.push_str(&serde_json::to_string(i).expect("corpus instances serialize"));
        s.push('\n');
    }
    s
}

pub fn from_json_lines(text: &str) -> Result<Vec<CorpusInstance>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

/// The monad of the instance if it is a `Monad`.
pub fn monad_of(inst: &CorpusInstance) -> Option<Monad> {
    if inst.kind != Kind::Monad {
        return None;
    }
    let d: MonadData = serde_json::from_value(inst.payload.clone()).ok()?;
    Monad::from_data(&d).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> CorpusConfig {
        CorpusConfig {
            max_poset: 2,
            max_objects: 1,
            max_morphisms: 2,
            lift: LiftBounds {
                max_objects: 1,
                max_onecells: 2,
                max_twocells: 4,
            },
            comorphism_max_morphisms: 2,
            comorphisms_per_pair: 2,
            expected: true,
        }
    }

    #[test]
    fn tiny_corpus_reproduces_expected() {
        let g = Guard::default();
        let c = generate_corpus(&tiny(), &g).unwrap();
        for kind in [Kind::Category, Kind::Monad, Kind::Abskl1, Kind::Fin2cat, Kind::Pseudomonad, Kind::Abskl2, Kind::Comorphism] {
            assert!(c.iter().any(|i| i.kind == kind), "{kind:?}");
        }
        for i in &c {
            let r = check_instance(i, &g).unwrap();
            assert!(r.is_valid(), "{}: {r}", i.name);
        }
    }

    #[test]
    fn regeneration_is_byte_identical() {
        let g = Guard::default();
        let a = to_json_lines(&generate_corpus(&tiny(), &g).unwrap());
        let b = to_json_lines(&generate_corpus(&tiny(), &g).unwrap());
        assert_eq!(a, b);
        assert_eq!(to_json_lines(&from_json_lines(&a).unwrap()), a);
    }

    #[test]
    fn tampered_expectation_is_reported() {
        let g = Guard::default();
        let mut c = generate_corpus(&tiny(), &g).unwrap();
        let i = c.iter_mut().find(|i| i.kind == Kind::Monad).unwrap();
        let e = i.expected.as_mut().unwrap();
        e.profile = e.profile.map(|p| p.map(|b| !b));
        assert!(!check_instance(i, &g).unwrap().is_valid());
    }
}
