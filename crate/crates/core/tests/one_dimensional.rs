//! Law invariants of categories, monads and abstract Kleisli structures,
//! sampled from the generated corpus.

use std::collections::HashSet;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use kleislikit::abskl1::{
    build_b_theta, equaliser_condition, kleisli_abskl, pointwise_equaliser_condition, thunkable_full_condition,
};
use kleislikit::corpus::{self, MonadInstance};
use kleislikit::fincat::{enumerate_functors, factor_bo_ff, validate_category, FinCategory};
use kleislikit::monadkit::{eilenberg_moore, induced_comonad, induced_monad, kleisli, kleisli_comparison};
use kleislikit::Guard;

fn categories() -> &'static [(String, Arc<FinCategory>)] {
    static C: OnceLock<Vec<(String, Arc<FinCategory>)>> = OnceLock::new();
    C.get_or_init(|| {
        corpus::small_categories(2, 5)
            .into_iter()
            .map(|(n, c)| (n, Arc::new(c)))
            .collect()
    })
}

fn monads() -> &'static [MonadInstance] {
    static M: OnceLock<Vec<MonadInstance>> = OnceLock::new();
    M.get_or_init(|| corpus::monad_corpus(4, 2, 5, &Guard::default()).expect("corpus fits the default guard"))
}

fn category() -> impl Strategy<Value = &'static (String, Arc<FinCategory>)> {
    (0..categories().len()).prop_map(|i| &categories()[i])
}

fn monad() -> impl Strategy<Value = &'static MonadInstance> {
    (0..monads().len()).prop_map(|i| &monads()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_categories_validate((name, c) in category()) {
        prop_assert!(validate_category(&c.to_data()).is_valid(), "{}", name);
    }

    #[test]
    fn enumerated_functors_are_lawful_and_distinct((_, c) in category(), (_, d) in category()) {
        let fs = enumerate_functors(c, d, &Guard::default()).unwrap();
        let mut seen = HashSet::new();
        for f in &fs {
            prop_assert!(f.validate().is_valid());
            prop_assert!(seen.insert((f.obj.clone(), f.mor.clone())));
        }
    }

    #[test]
    fn bo_ff_factorisation_composes_back((_, c) in category(), (_, d) in category(), pick in any::<prop::sample::Index>()) {
        let fs = enumerate_functors(c, d, &Guard::default()).unwrap();
        prop_assume!(!fs.is_empty());
        let f = &fs[pick.index(fs.len())];
        let (bo, ff) = factor_bo_ff(f);
        prop_assert!(bo.validate().is_valid() && ff.validate().is_valid());
        prop_assert!(bo.is_bijective_on_objects());
        prop_assert!(ff.is_full() && ff.is_faithful());
        let h = bo.then(&ff);
        prop_assert_eq!(&h.obj, &f.obj);
        prop_assert_eq!(&h.mor, &f.mor);
    }

    /// Rewriting a unit-law composite always breaks the identity law. Other
    /// entries can be rewritten into a different lawful table (an
    /// idempotent becoming an involution), so they are not sampled.
    #[test]
    fn corrupting_a_unit_composite_is_detected((_, c) in category(), row in any::<prop::sample::Index>(), to in any::<prop::sample::Index>()) {
        let mut d = c.to_data();
        let rows: Vec<usize> = (0..d.compose.len())
            .filter(|&i| {
                let [f, g, _] = &d.compose[i];
                c.is_identity(c.morphism(f).unwrap()) || c.is_identity(c.morphism(g).unwrap())
            })
            .collect();
        let i = rows[row.index(rows.len())];
        let [f, g, h] = d.compose[i].clone();
        let (src, tgt) = (c.src(c.morphism(&f).unwrap()), c.tgt(c.morphism(&g).unwrap()));
        let candidates = c.hom(src, tgt);
        let k = c.morphism_id(candidates[to.index(candidates.len())]).to_string();
        prop_assume!(k != h);
        d.compose[i] = [f, g, k];
        let r = validate_category(&d);
        prop_assert!(r.violations_of("identity").next().is_some(), "{}", r);
    }

    #[test]
    fn kleisli_adjunction_recovers_the_monad(m in monad()) {
        let kl = kleisli(&m.monad);
        prop_assert_eq!(&induced_monad(&kl.adjunction), &m.monad);
        prop_assert!(kl.category.validate().is_valid());
    }

    #[test]
    fn algebras_validate_and_free_algebras_embed(m in monad()) {
        let kl = kleisli(&m.monad);
        let em = eilenberg_moore(&m.monad, &Guard::default()).unwrap();
        prop_assert!(em.category.validate().is_valid());
        prop_assert_eq!(&induced_monad(&em.adjunction), &m.monad);
        let k = kleisli_comparison(&m.monad, &kl, &em);
        prop_assert!(k.is_full() && k.is_faithful(), "{}", m.name);
    }

    #[test]
    fn thunkable_subcategory_recovers_the_comonad(m in monad()) {
        let (s, _) = kleisli_abskl(&m.monad);
        let bt = build_b_theta(&s);
        prop_assert_eq!(&induced_comonad(&bt.adjunction), &s.comonad);
        prop_assert!(bt.adjunction.left.is_faithful());
        prop_assert!(bt.adjunction.left.is_bijective_on_objects());
    }

    #[test]
    fn equaliser_condition_matches_independent_readings(m in monad()) {
        prop_assume!(m.monad.base.n_objects() <= 2);
        let e = equaliser_condition(&m.monad, &Guard::default()).unwrap();
        prop_assert_eq!(e, thunkable_full_condition(&m.monad), "{}", m.name);
        if e {
            prop_assert!(pointwise_equaliser_condition(&m.monad), "{}", m.name);
        }
    }
}
