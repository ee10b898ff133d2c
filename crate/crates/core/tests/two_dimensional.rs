//! Invariants of the 2-dimensional layer: strict 2-categories, pasting,
//! pseudomonads and their Kleisli constructions.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use kleislikit::abskl1::equaliser_condition;
use kleislikit::abskl2::{abskl2_of_pseudomonad, build_b_theta_2, check_isobidescent, theta_induced_comonad};
use kleislikit::corpus::{self, Lift, LiftBounds, MonadInstance, PseudomonadInstance};
use kleislikit::pexpr::{fixture, Instance, Value, COHERENCE};
use kleislikit::pseudomonadkit::{check_pseudomonad, free_algebras, is_pseudomorphism, strict_as_pseudo, twist, twist_inverse};
use kleislikit::twocat::{eval_pasting, locally_discrete, random_rewrite};
use kleislikit::Guard;

fn monads() -> &'static [MonadInstance] {
    static M: OnceLock<Vec<MonadInstance>> = OnceLock::new();
    M.get_or_init(|| corpus::monad_corpus(3, 2, 5, &Guard::default()).expect("corpus fits the default guard"))
}

fn lifts() -> &'static [PseudomonadInstance] {
    static P: OnceLock<Vec<PseudomonadInstance>> = OnceLock::new();
    P.get_or_init(|| corpus::pseudomonad_corpus(monads(), LiftBounds::default()).expect("lifts build"))
}

fn monad() -> impl Strategy<Value = &'static MonadInstance> {
    (0..monads().len()).prop_map(|i| &monads()[i])
}

fn lift() -> impl Strategy<Value = &'static PseudomonadInstance> {
    (0..lifts().len()).prop_map(|i| &lifts()[i])
}

fn z2_lift() -> impl Strategy<Value = &'static PseudomonadInstance> {
    let z: Vec<usize> = (0..lifts().len()).filter(|&i| lifts()[i].lift == Lift::Z2).collect();
    prop::sample::select(z).prop_map(|i| &lifts()[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn thickened_bases_satisfy_interchange(m in monad()) {
        let c = &m.monad.base;
        prop_assert!(locally_discrete(c).validate().is_valid());
        prop_assert!(corpus::z2(c).validate().is_valid());
    }

    #[test]
    fn locally_discrete_is_a_full_embedding(m in monad()) {
        let c = &m.monad.base;
        let d = locally_discrete(c);
        for f in 0..d.n_onecells() {
            for g in 0..d.n_onecells() {
                let n = (0..d.n_twocells()).filter(|&a| d.src2(a) == f && d.tgt2(a) == g).count();
                prop_assert_eq!(n, usize::from(f == g));
            }
        }
    }

    #[test]
    fn strict_lifts_are_coherent(m in monad()) {
        let r = check_pseudomonad(&strict_as_pseudo(&m.monad));
        prop_assert!(r.is_valid(), "{}: {}", m.name, r);
    }

    #[test]
    fn corpus_lifts_are_coherent(p in lift()) {
        prop_assert!(check_pseudomonad(&p.pm).is_valid(), "{}", p.name);
    }

    #[test]
    fn twisting_back_restores_the_tables(p in z2_lift(), at in prop::collection::vec(any::<bool>(), 2)) {
        let c = &*p.pm.base;
        let w: Vec<usize> = (0..c.n_objects())
            .map(|x| {
                let mu = p.pm.mu(x);
                let swap = c.isos(mu, mu).find(|&a| !c.is_id2(a));
                match swap {
                    Some(a) if at[x] => a,
                    _ => c.id2(mu),
                }
            })
            .collect();
        let twisted = twist(&p.pm, &w).unwrap();
        prop_assert!(check_pseudomonad(&twisted).is_valid());
        let back = twist(&twisted, &twist_inverse(&p.pm, &w).unwrap()).unwrap();
        prop_assert_eq!(back, p.pm.clone());
    }

    #[test]
    fn pasting_value_survives_random_rewrites(p in lift(), seed in any::<u64>(), which in any::<prop::sample::Index>()) {
        let pm = &p.pm;
        let c = &*pm.base;
        let sig = pm.signature();
        let x = which.index(c.n_objects());
        let name = COHERENCE[which.index(COHERENCE.len())];
        let sides = match fixture(name).instantiate(&sig, &[Value::Obj(x)]).unwrap() {
            Instance::Equation(Value::Two { expr: l, .. }, Value::Two { expr: r, .. }) => vec![l, r],
            Instance::Value(Value::Two { expr, .. }) => vec![expr],
            _ => vec![],
        };
        let mut rng = StdRng::seed_from_u64(seed);
        for e in sides {
            let want = eval_pasting(c, &e).unwrap();
            let mut cur = e.clone();
            for _ in 0..20 {
                cur = random_rewrite(c, &cur, &mut rng);
                prop_assert_eq!(eval_pasting(c, &cur).unwrap(), want);
            }
        }
    }

    #[test]
    fn free_pseudoalgebra_morphisms_pass_their_laws(p in lift()) {
        prop_assume!(p.pm.base.n_onecells() <= 6);
        let fa = free_algebras(&p.pm, &Guard::default()).unwrap();
        prop_assert!(fa.cat.validate().is_valid());
        for m in &fa.morphisms {
            prop_assert!(is_pseudomorphism(&p.pm, m).unwrap());
        }
    }

    #[test]
    fn thunked_subcategory_recovers_the_pseudocomonad(p in lift()) {
        prop_assume!(p.pm.base.n_onecells() <= 6);
        let g = Guard::default();
        let (s, _) = abskl2_of_pseudomonad(&p.pm, &g).unwrap();
        let bt = build_b_theta_2(&s, &g).unwrap();
        prop_assert_eq!(theta_induced_comonad(&s, &bt).unwrap(), s.comonad.clone());
    }

    #[test]
    fn strictification_preserves_the_equaliser_condition(m in monad()) {
        prop_assume!(m.monad.base.n_morphisms() <= 6);
        let g = Guard::default();
        let pm = strict_as_pseudo(&m.monad);
        prop_assert_eq!(check_isobidescent(&pm, &g).unwrap(), equaliser_condition(&m.monad, &g).unwrap(), "{}", m.name);
    }
}
