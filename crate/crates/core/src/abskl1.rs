//! One-dimensional abstract Kleisli structures: a comonad with a chosen
//! coalgebra on every object, thunkable morphisms, and the reflection of a
//! monad into structures of this kind.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{enumerate_functors, enumerate_functors_over, enumerate_nat_trans, FinCategory, Functor, NatTrans};
use crate::guard::Guard;
use crate::monadkit::{
    coalgebras, eilenberg_moore, induced_comonad, induced_monad, kleisli, Adjunction, Comonad, ComonadData, Kleisli,
    Monad,
};
use crate::report::{ValidationReport, Violation};

/// A comonad `(Q, ε, δ)` on `base` with a coalgebra `θ_X: X → QX` per
/// object, such that `θ_{QX} = δ_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsKL1 {
    pub base: Arc<FinCategory>,
    pub comonad: Comonad,
    pub theta: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsKL1Data {
    pub comonad: ComonadData,
    pub theta: std::collections::BTreeMap<String, String>,
}

impl AbsKL1 {
    pub fn new(comonad: Comonad, theta: Vec<usize>) -> Result<AbsKL1> {
        let s = AbsKL1 {
            base: comonad.base.clone(),
            comonad,
            theta,
        };
        let r = s.validate();
        if r.is_valid() {
            Ok(s)
        } else {
            Err(Error::Invalid {
                kind: "abstract Kleisli structure",
                report: r,
            })
        }
    }

    pub fn from_data(data: &AbsKL1Data) -> Result<AbsKL1> {
        let comonad = Comonad::from_data(&data.comonad)?;
        let b = comonad.base.clone();
        let mut theta = Vec::with_capacity(b.n_objects());
        for o in b.objects() {
            let m = data
                .theta
                .get(o)
                .ok_or_else(|| Error::structure(format!("missing theta at `{o}`")))?;
            theta.push(b.morphism(m)?);
        }
        AbsKL1::new(comonad, theta)
    }

    pub fn to_data(&self) -> AbsKL1Data {
        AbsKL1Data {
            comonad: self.comonad.to_data(),
            theta: self
                .theta
                .iter()
                .enumerate()
                .map(|(x, &t)| (self.base.object_id(x).to_string(), self.base.morphism_id(t).to_string()))
                .collect(),
        }
    }

    /// The identity comonad with identity coalgebras.
    pub fn trivial(base: &Arc<FinCategory>) -> AbsKL1 {
        let q = Comonad::identity(base);
        let theta = (0..base.n_objects()).map(|x| base.id(x)).collect();
        AbsKL1::new(q, theta).expect("trivial structure")
    }

    pub fn validate(&self) -> ValidationReport {
        let b = &*self.base;
        let q = &self.comonad;
        let mut r = ValidationReport::new();
        if self.theta.len() != b.n_objects() {
            r.structural("theta must have one component per object");
            return r;
        }
        for x in 0..b.n_objects() {
            let t = self.theta[x];
            let at = vec![b.object_id(x).to_string()];
            if b.src(t) != x || b.tgt(t) != q.q(x) {
                r.push(Violation::new("boundary", at));
                continue;
            }
            if b.then(t, q.eps(x)) != b.id(x) {
                r.push(Violation::new("coalgebra_counit", at.clone()));
            }
            if b.then(t, q.delta(x)) != b.then(t, q.qf(t)) {
                r.push(Violation::new("coalgebra_coassociativity", at.clone()));
            }
            if self.theta[q.q(x)] != q.delta(x) {
                r.push(Violation::new("lifting", at));
            }
        }
        r
    }

    /// `Qf ∘ θ_X = θ_Y ∘ f`.
    pub fn thunkable(&self, f: usize) -> bool {
        let b = &*self.base;
        let (x, y) = (b.src(f), b.tgt(f));
        b.then(self.theta[x], self.comonad.qf(f)) == b.then(f, self.theta[y])
    }

    pub fn thunkable_id(&self, id: &str) -> Result<bool> {
        Ok(self.thunkable(self.base.morphism(id)?))
    }
}

/// The subcategory of thunkable morphisms, the adjunction `F_θ ⊣ U_θ`
/// and the monad it induces on it.
#[derive(Clone, Debug)]
pub struct BTheta {
    pub category: Arc<FinCategory>,
    pub adjunction: Adjunction,
    pub monad: Monad,
    /// Base morphism underlying each morphism of the subcategory.
    pub incl: Vec<usize>,
}

pub fn build_b_theta(s: &AbsKL1) -> BTheta {
    let b = &*s.base;
    let q = &s.comonad;
    let thunkable: Vec<usize> = (0..b.n_morphisms()).filter(|&f| s.thunkable(f)).collect();
    let mut pos = vec![usize::MAX; b.n_morphisms()];
    for (i, &f) in thunkable.iter().enumerate() {
        pos[f] = i;
    }
    let morphisms = thunkable
        .iter()
        .map(|&f| (b.morphism_id(f).to_string(), b.src(f), b.tgt(f)))
        .collect();
    let cat = Arc::new(
        FinCategory::from_parts(
            b.objects().to_vec(),
            morphisms,
            |x| pos[b.id(x)],
            |f, g| pos[b.then(thunkable[f], thunkable[g])],
        )
        .expect("thunkable morphisms form a subcategory"),
    );
    let left = Functor {
        source: cat.clone(),
        target: s.base.clone(),
        obj: (0..b.n_objects()).collect(),
        mor: thunkable.clone(),
    };
    let right = Functor {
        source: s.base.clone(),
        target: cat.clone(),
        obj: q.endo.obj.clone(),
        mor: q.endo.mor.iter().map(|&f| pos[f]).collect(),
    };
    let unit = NatTrans {
        source: Functor::identity(&cat),
        target: left.then(&right),
        comp: s.theta.iter().map(|&t| pos[t]).collect(),
    };
    let counit = NatTrans {
        source: right.then(&left),
        target: Functor::identity(&s.base),
        comp: q.counit.comp.clone(),
    };
    let adjunction = Adjunction::new(left, right, unit, counit).expect("thunkable adjunction");
    let monad = induced_monad(&adjunction);
    BTheta {
        category: cat,
        adjunction,
        monad,
        incl: thunkable,
    }
}

/// The structure on a Kleisli category given by `θ_X = F η_X`.
pub fn kleisli_abskl(m: &Monad) -> (AbsKL1, Kleisli) {
    let kl = kleisli(m);
    let q = induced_comonad(&kl.adjunction);
    let theta = m.unit.comp.iter().map(|&e| kl.adjunction.left.mor[e]).collect();
    let s = AbsKL1::new(q, theta).expect("Kleisli categories carry an abstract Kleisli structure");
    (s, kl)
}

/// Kleisli thunkability read off the monad alone: `g: X → TY` is thunkable
/// iff `η_{TY} ∘ g = Tη_Y ∘ g`.
pub fn kleisli_thunkable(m: &Monad, g: usize, y: usize) -> bool {
    let b = &*m.base;
    b.then(g, m.eta(m.t(y))) == b.then(g, m.tf(m.eta(y)))
}

/// A pair `(F, F̄)` with `F̄ ∘ F_S = F_T ∘ F` on the nose.
#[derive(Clone, Debug)]
pub struct CoMorphism {
    pub source: Monad,
    pub target: Monad,
    pub f: Functor,
    pub fbar: Functor,
    pub source_kl: Arc<Kleisli>,
    pub target_kl: Arc<Kleisli>,
}

impl PartialEq for CoMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.f == other.f && self.fbar == other.fbar
    }
}

impl CoMorphism {
    pub fn new(
        source_kl: Arc<Kleisli>,
        target_kl: Arc<Kleisli>,
        source: Monad,
        target: Monad,
        f: Functor,
        fbar: Functor,
    ) -> Result<CoMorphism> {
        let c = CoMorphism {
            source,
            target,
            f,
            fbar,
            source_kl,
            target_kl,
        };
        let r = c.validate();
        if r.is_valid() {
            Ok(c)
        } else {
            Err(Error::Invalid {
                kind: "co-morphism",
                report: r,
            })
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = self.f.validate().scoped("f");
        r.extend(self.fbar.validate().scoped("fbar"));
        if !r.is_valid() {
            return r;
        }
        let lhs = self.source_kl.adjunction.left.then(&self.fbar);
        let rhs = self.f.then(&self.target_kl.adjunction.left);
        for o in 0..lhs.source.n_objects() {
            if lhs.obj[o] != rhs.obj[o] {
                r.push(Violation::new("commutes_with_left_adjoints", vec![lhs.source.object_id(o).into()]));
            }
        }
        for m in 0..lhs.source.n_morphisms() {
            if lhs.mor[m] != rhs.mor[m] {
                r.push(Violation::new("commutes_with_left_adjoints", vec![lhs.source.morphism_id(m).into()]));
            }
        }
        r
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CoMorphism) -> CoMorphism {
        CoMorphism {
            source: self.source.clone(),
            target: next.target.clone(),
            f: self.f.then(&next.f),
            fbar: self.fbar.then(&next.fbar),
            source_kl: self.source_kl.clone(),
            target_kl: next.target_kl.clone(),
        }
    }

    pub fn identity(m: &Monad, kl: &Arc<Kleisli>) -> CoMorphism {
        CoMorphism {
            source: m.clone(),
            target: m.clone(),
            f: Functor::identity(&m.base),
            fbar: Functor::identity(&kl.category),
            source_kl: kl.clone(),
            target_kl: kl.clone(),
        }
    }
}

/// A tight 2-cell `(φ, φ̄)` with `F_T ∘ φ = φ̄ ∘ F_S`.
#[derive(Clone, Debug)]
pub struct TightTwoCell {
    pub source: CoMorphism,
    pub target: CoMorphism,
    pub phi: NatTrans,
    pub phibar: NatTrans,
}

impl TightTwoCell {
    pub fn validate(&self) -> ValidationReport {
        let mut r = self.phi.validate().scoped("phi");
        r.extend(self.phibar.validate().scoped("phibar"));
        let ft = &self.source.target_kl.adjunction.left;
        for x in 0..self.phi.comp.len() {
            if ft.mor[self.phi.comp[x]] != self.phibar.comp[x] {
                r.push(Violation::new(
                    "commutes_with_left_adjoints",
                    vec![self.phi.source.source.object_id(x).into()],
                ));
            }
        }
        r
    }

    /// The loose 2-cell underlying a tight one.
    pub fn loose(&self) -> &NatTrans {
        &self.phibar
    }
}

/// The five conditions of the codescent characterisation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodescentProfile {
    /// The reflection unit is an isomorphism of monads.
    pub unit_iso: bool,
    /// `η` is the equaliser of `Tη` and `η_T` among endofunctors.
    pub equaliser: bool,
    /// `F_T` is faithful and full on thunkable morphisms.
    pub thunkable_full: bool,
    /// The comparison into coalgebras over algebras is fully faithful.
    pub em_comparison: bool,
    /// The comparison into coalgebras over the Kleisli category is fully faithful.
    pub kleisli_comparison: bool,
}

impl CodescentProfile {
    pub fn as_array(&self) -> [bool; 5] {
        [
            self.unit_iso,
            self.equaliser,
            self.thunkable_full,
            self.em_comparison,
            self.kleisli_comparison,
        ]
    }

    pub fn agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&b| b == a[0])
    }
}

/// Compute the five conditions independently of each other.
pub fn check_codescent_profile(m: &Monad, guard: &Guard) -> Result<CodescentProfile> {
    let r = reflect(m);
    let unit_iso = unit_is_iso(&r);
    let equaliser = equaliser_condition(m, guard).map_err(|e| tag_guard(e, "equaliser condition"))?;
    let thunkable_full = thunkable_full_condition(m);
    let em_comparison = em_comparison_condition(m, guard).map_err(|e| tag_guard(e, "algebra comparison"))?;
    let kleisli_comparison = kleisli_comparison_condition(m, guard).map_err(|e| tag_guard(e, "Kleisli comparison"))?;
    Ok(CodescentProfile {
        unit_iso,
        equaliser,
        thunkable_full,
        em_comparison,
        kleisli_comparison,
    })
}

fn tag_guard(e: Error, cond: &str) -> Error {
    match e {
        Error::SizeGuard { what, space, bound } => Error::SizeGuard {
            what: format!("{cond}: {what}"),
            space,
            bound,
        },
        e => e,
    }
}

/// The reflection unit `(J, 1)` is an isomorphism of monads.
pub fn unit_is_iso(r: &Reflection) -> bool {
    let j = &r.unit.f;
    let sbar = &r.monad;
    let m = &r.unit.source;
    if !j.is_isomorphism() {
        return false;
    }
    let endo_commutes = j.then(&sbar.endo) == m.endo.then(j);
    let unit_commutes = (0..m.base.n_objects()).all(|x| j.mor[m.eta(x)] == sbar.eta(j.obj[x]));
    let mult_commutes = (0..m.base.n_objects()).all(|x| j.mor[m.mu(x)] == sbar.mu(j.obj[x]));
    endo_commutes && unit_commutes && mult_commutes
}

/// For every endofunctor `F` and `φ: F ⇒ T` with `Tη ∘ φ = η_T ∘ φ` there
/// is exactly one `ψ: F ⇒ 1` with `η ∘ ψ = φ`.
pub fn equaliser_condition(m: &Monad, guard: &Guard) -> Result<bool> {
    let b = &m.base;
    let id = Functor::identity(b);
    for f in enumerate_functors(b, b, guard)? {
        let to_id = enumerate_nat_trans(&f, &id, guard)?;
        for phi in enumerate_nat_trans(&f, &m.endo, guard)? {
            let forks = (0..b.n_objects()).all(|x| {
                let p = phi.comp[x];
                b.then(p, m.tf(m.eta(x))) == b.then(p, m.eta(m.t(x)))
            });
            if !forks {
                continue;
            }
            let n = to_id
                .iter()
                .filter(|psi| (0..b.n_objects()).all(|x| b.then(psi.comp[x], m.eta(x)) == phi.comp[x]))
                .count();
            if n != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The equaliser property object by object: every `h: Z → TX` with
/// `Tη_X ∘ h = η_{TX} ∘ h` factors uniquely through `η_X`.
pub fn pointwise_equaliser_condition(m: &Monad) -> bool {
    let b = &*m.base;
    (0..b.n_objects()).all(|x| {
        (0..b.n_objects()).all(|z| {
            b.hom(z, m.t(x)).iter().all(|&h| {
                if b.then(h, m.tf(m.eta(x))) != b.then(h, m.eta(m.t(x))) {
                    return true;
                }
                b.hom(z, x).iter().filter(|&&k| b.then(k, m.eta(x)) == h).count() == 1
            })
        })
    })
}

/// Hom-set counting: `f ↦ η_Y ∘ f` is injective, and hits every Kleisli
/// morphism that is thunkable.
pub fn thunkable_full_condition(m: &Monad) -> bool {
    let b = &*m.base;
    (0..b.n_objects()).all(|x| {
        (0..b.n_objects()).all(|y| {
            let mut image: Vec<usize> = b.hom(x, y).iter().map(|&f| b.then(f, m.eta(y))).collect();
            let n = image.len();
            image.sort_unstable();
            image.dedup();
            let faithful = image.len() == n;
            let thunkables = b
                .hom(x, m.t(y))
                .iter()
                .filter(|&&g| kleisli_thunkable(m, g, y))
                .count();
            faithful && thunkables == image.len()
        })
    })
}

fn em_comparison_condition(m: &Monad, guard: &Guard) -> Result<bool> {
    let b = &*m.base;
    let em = eilenberg_moore(m, guard)?;
    let tbar = induced_comonad(&em.adjunction);
    let co = coalgebras(&tbar, guard)?;
    let ft = &em.adjunction.left;
    let obj: Vec<usize> = (0..b.n_objects())
        .map(|x| {
            co.object_of(ft.obj[x], ft.mor[m.eta(x)])
                .expect("free algebras carry the comparison coalgebra")
        })
        .collect();
    let k = comparison_into(&m.base, &co.category, &co.under, &obj, |f| ft.mor[f])?;
    Ok(k.is_full() && k.is_faithful())
}

fn kleisli_comparison_condition(m: &Monad, guard: &Guard) -> Result<bool> {
    let b = &*m.base;
    let kl = kleisli(m);
    let q = induced_comonad(&kl.adjunction);
    let co = coalgebras(&q, guard)?;
    let ft = &kl.adjunction.left;
    let obj: Vec<usize> = (0..b.n_objects())
        .map(|x| co.object_of(x, ft.mor[m.eta(x)]).expect("θ is a coalgebra"))
        .collect();
    let k = comparison_into(&m.base, &co.category, &co.under, &obj, |f| ft.mor[f])?;
    Ok(k.is_full() && k.is_faithful())
}

/// Functor into a category of structures given on objects and by the
/// underlying morphism of each image.
fn comparison_into(
    b: &Arc<FinCategory>,
    target: &Arc<FinCategory>,
    under: &[usize],
    obj: &[usize],
    mor_under: impl Fn(usize) -> usize,
) -> Result<Functor> {
    let mut mor = Vec::with_capacity(b.n_morphisms());
    for f in 0..b.n_morphisms() {
        let u = mor_under(f);
        let hit = target
            .hom(obj[b.src(f)], obj[b.tgt(f)])
            .iter()
            .find(|&&k| under[k] == u)
            .copied()
            .ok_or_else(|| Error::defect(format!("comparison image of `{}` is not a structure map", b.morphism_id(f))))?;
        mor.push(hit);
    }
    Ok(Functor {
        source: b.clone(),
        target: target.clone(),
        obj: obj.to_vec(),
        mor,
    })
}

/// The reflection of a monad `(A, S)` into abstract Kleisli structures.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub abskl: AbsKL1,
    pub kleisli: Arc<Kleisli>,
    pub btheta: BTheta,
    /// The monad induced on the thunkable subcategory.
    pub monad: Monad,
    pub monad_kleisli: Arc<Kleisli>,
    /// `(J, 1)`, with the Kleisli category of `monad` identified with `A_S`.
    pub unit: CoMorphism,
}

pub fn reflect(m: &Monad) -> Reflection {
    let (s, kl) = kleisli_abskl(m);
    let kl = Arc::new(kl);
    let bt = build_b_theta(&s);
    let sbar = bt.monad.clone();
    let skl = Arc::new(kleisli(&sbar));
    let a = &*m.base;
    let pos = |f: usize| bt.category.morphism(kl.category.morphism_id(f)).expect("free maps are thunkable");
    let j = Functor {
        source: m.base.clone(),
        target: bt.category.clone(),
        obj: (0..a.n_objects()).collect(),
        mor: (0..a.n_morphisms()).map(|f| pos(kl.adjunction.left.mor[f])).collect(),
    };
    let fbar = image_iso(&s, &bt, &skl);
    let unit = CoMorphism::new(kl.clone(), skl.clone(), m.clone(), sbar.clone(), j, fbar)
        .expect("the reflection unit is a co-morphism");
    Reflection {
        abskl: s,
        kleisli: kl,
        btheta: bt,
        monad: sbar,
        monad_kleisli: skl,
        unit,
    }
}

/// `B ≅ Kl(τ)`, `h ↦ Qh ∘ θ_X`, for a structure and its thunkable subcategory.
pub fn image_iso(s: &AbsKL1, bt: &BTheta, tkl: &Kleisli) -> Functor {
    let b = &*s.base;
    let q = &s.comonad;
    let pos = |f: usize| bt.category.morphism(b.morphism_id(f)).expect("thunkable");
    Functor {
        source: s.base.clone(),
        target: tkl.category.clone(),
        obj: (0..b.n_objects()).collect(),
        mor: (0..b.n_morphisms())
            .map(|h| {
                let (x, y) = (b.src(h), b.tgt(h));
                tkl.morphism(pos(b.then(s.theta[x], q.qf(h))), y)
            })
            .collect(),
    }
}

/// The target side of a factorisation problem: a structure, its
/// thunkable subcategory and the Kleisli category of the induced monad.
#[derive(Clone, Debug)]
pub struct ImageMonad {
    pub abskl: AbsKL1,
    pub btheta: BTheta,
    pub kleisli: Arc<Kleisli>,
    /// `B ≅ Kl(τ)`
    pub iso: Functor,
}

impl ImageMonad {
    pub fn new(s: &AbsKL1) -> ImageMonad {
        let bt = build_b_theta(s);
        let kl = Arc::new(kleisli(&bt.monad));
        let iso = image_iso(s, &bt, &kl);
        ImageMonad {
            abskl: s.clone(),
            btheta: bt,
            kleisli: kl,
            iso,
        }
    }

    pub fn monad(&self) -> &Monad {
        &self.btheta.monad
    }

    /// The co-morphism `τ(s) → τ(s)` determined by an endofunctor of the
    /// base that preserves thunkability.
    pub fn endo_comorphism(&self, h: &Functor) -> Result<CoMorphism> {
        let bt = &self.btheta;
        let b = &*self.abskl.base;
        let restricted = Functor {
            source: bt.category.clone(),
            target: bt.category.clone(),
            obj: h.obj.clone(),
            mor: bt
                .incl
                .iter()
                .map(|&f| {
                    bt.category
                        .morphism(b.morphism_id(h.mor[f]))
                        .map_err(|_| Error::structure("functor does not preserve thunkability"))
                })
                .collect::<Result<_>>()?,
        };
        let inv = self.iso.inverse().expect("iso");
        let fbar = inv.then(h).then(&self.iso);
        CoMorphism::new(
            self.kleisli.clone(),
            self.kleisli.clone(),
            self.monad().clone(),
            self.monad().clone(),
            restricted,
            fbar,
        )
    }
}

/// Factor a co-morphism `g: (A,S) → τ(t)` through the reflection unit.
///
/// Returns the factorisation and whether it is the only one among all
/// functors with the same object map (bounded exhaustive search).
pub fn factor_through_unit(r: &Reflection, t: &ImageMonad, g: &CoMorphism, guard: &Guard) -> Result<(CoMorphism, bool)> {
    let src_cat = &r.btheta.category;
    let tgt_cat = &t.btheta.category;
    let phi_inv = r.unit.fbar.inverse().ok_or_else(|| Error::defect("reflection unit is not iso on Kleisli side"))?;
    let gbar = phi_inv.then(&g.fbar);
    let fs = &r.monad_kleisli.adjunction.left;
    let ft = &t.kleisli.adjunction.left;
    let obj: Vec<usize> = g.f.obj.clone();
    let mut mor = Vec::with_capacity(src_cat.n_morphisms());
    for h in 0..src_cat.n_morphisms() {
        let want = gbar.mor[fs.mor[h]];
        let (x, y) = (src_cat.src(h), src_cat.tgt(h));
        let hit = tgt_cat
            .hom(obj[x], obj[y])
            .iter()
            .copied()
            .find(|&u| ft.mor[u] == want)
            .ok_or_else(|| {
                Error::defect(format!(
                    "no factorisation: image of `{}` is not thunkable",
                    src_cat.morphism_id(h)
                ))
            })?;
        mor.push(hit);
    }
    let gprime = Functor {
        source: src_cat.clone(),
        target: tgt_cat.clone(),
        obj: obj.clone(),
        mor,
    };
    let factor = CoMorphism::new(
        r.monad_kleisli.clone(),
        t.kleisli.clone(),
        r.monad.clone(),
        t.monad().clone(),
        gprime,
        gbar.clone(),
    )?;
    if r.unit.then(&factor) != *g {
        return Err(Error::defect("factorisation does not recover the co-morphism"));
    }
    let unique = enumerate_functors_over(src_cat, tgt_cat, &obj, guard)?
        .into_iter()
        .filter(|cand| {
            r.unit.f.then(cand) == g.f
                && (0..src_cat.n_morphisms()).all(|h| ft.mor[cand.mor[h]] == gbar.mor[fs.mor[h]])
        })
        .count()
        == 1;
    Ok((factor, unique))
}

/// Co-morphisms from the monad of `r` into `τ(t)`, at most `limit` of them.
///
/// Enumerates the Kleisli-side functors `Ḡ` and keeps those for which the
/// base-side functor forced by `F_τ G = Ḡ F_S` exists.
pub fn comorphisms_into(r: &Reflection, t: &ImageMonad, limit: usize, guard: &Guard) -> Result<Vec<CoMorphism>> {
    let m = &r.unit.source;
    let a = &m.base;
    let fs = &r.kleisli.adjunction.left;
    let ft = &t.kleisli.adjunction.left;
    let bt = &t.btheta.category;
    let mut out = Vec::new();
    for gbar in enumerate_functors(&r.kleisli.category, &t.kleisli.category, guard)? {
        if out.len() == limit {
            break;
        }
        let obj: Vec<usize> = (0..a.n_objects()).map(|x| gbar.obj[fs.obj[x]]).collect();
        let mor: Option<Vec<usize>> = (0..a.n_morphisms())
            .map(|f| {
                let want = gbar.mor[fs.mor[f]];
                bt.hom(obj[a.src(f)], obj[a.tgt(f)]).iter().copied().find(|&u| ft.mor[u] == want)
            })
            .collect();
        let Some(mor) = mor else { continue };
        let g = Functor {
            source: a.clone(),
            target: bt.clone(),
            obj,
            mor,
        };
        out.push(CoMorphism::new(r.kleisli.clone(), t.kleisli.clone(), m.clone(), t.monad().clone(), g, gbar)?);
    }
    Ok(out)
}

/// A loose 2-cell `φ̄` into `τ(t)` lifts to a tight one through the unit
/// iff every component, read in the base of `t`, is thunkable.
pub fn factor_loose_2cell(t: &ImageMonad, phibar: &NatTrans) -> Option<NatTrans> {
    let inv = t.iso.inverse()?;
    let b = &*t.abskl.base;
    let bt = &t.btheta;
    let mut comp = Vec::with_capacity(phibar.comp.len());
    for &k in &phibar.comp {
        let under = inv.mor[k];
        if !t.abskl.thunkable(under) {
            return None;
        }
        comp.push(bt.category.morphism(b.morphism_id(under)).ok()?);
    }
    Some(NatTrans {
        source: phibar.source.clone(),
        target: phibar.target.clone(),
        comp,
    })
}

/// Whether a functor between bases maps thunkable morphisms to thunkable ones.
pub fn check_preserves_thunkability(h: &Functor, src: &AbsKL1, tgt: &AbsKL1) -> bool {
    (0..src.base.n_morphisms()).all(|f| !src.thunkable(f) || tgt.thunkable(h.mor[f]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn g() -> Guard {
        Guard::default()
    }

    #[test]
    fn identities_and_free_maps_are_thunkable() {
        for inst in corpus::small_monads(&g()) {
            let (s, _) = kleisli_abskl(&inst.monad);
            let b = &s.base;
            for x in 0..b.n_objects() {
                assert!(s.thunkable(b.id(x)));
            }
            for f in 0..b.n_morphisms() {
                assert!(s.thunkable(s.comonad.qf(f)), "{}", inst.name);
            }
        }
    }

    #[test]
    fn const_terminal_kleisli_arrow_is_thunkable() {
        let (s, kl) = kleisli_abskl(&corpus::const_terminal_monad());
        let c = &kl.category;
        let (x, y) = (c.object("x").unwrap(), c.object("y").unwrap());
        let k = c.hom(x, y)[0];
        assert!(s.thunkable(k));
        // Oracle: both composites land in hom(x, Q y), a singleton.
        assert_eq!(c.hom(x, s.comonad.q(y)).len(), 1);
    }

    #[test]
    fn trivial_structure_b_theta_is_base() {
        let w = Arc::new(corpus::walking_arrow());
        let s = AbsKL1::trivial(&w);
        let bt = build_b_theta(&s);
        assert_eq!(*bt.category, *w);
        assert_eq!(bt.monad, Monad::identity(&bt.category));
    }

    #[test]
    fn identity_monad_structure() {
        let w = Arc::new(corpus::walking_arrow());
        let (s, _) = kleisli_abskl(&Monad::identity(&w));
        assert!((0..w.n_objects()).all(|x| s.theta[x] == s.base.id(x)));
        let bt = build_b_theta(&s);
        assert_eq!(*bt.category, *w);
    }

    #[test]
    fn const_terminal_has_more_thunkables_than_free_maps() {
        let m = corpus::const_terminal_monad();
        let (s, kl) = kleisli_abskl(&m);
        let bt = build_b_theta(&s);
        let mut image: Vec<usize> = kl.adjunction.left.mor.clone();
        image.sort_unstable();
        image.dedup();
        assert!(bt.category.n_morphisms() > image.len());
    }

    #[test]
    fn const_terminal_theta_reads_off_tables() {
        let m = corpus::const_terminal_monad();
        let (s, kl) = kleisli_abskl(&m);
        let b = &m.base;
        let x = b.object("x").unwrap();
        let one = b.object("1").unwrap();
        let bang = b.morphism("!x").unwrap();
        assert_eq!(kl.under[s.theta[x]], b.then(bang, m.eta(one)));
    }

    #[test]
    fn top_closure_theta_is_inequality() {
        let m = corpus::chain2_top_closure();
        let (s, kl) = kleisli_abskl(&m);
        let b = &m.base;
        for p in 0..b.n_objects() {
            // θ_p is p ≤ c p, composed with the (identity) unit at c p.
            assert_eq!(kl.under[s.theta[p]], b.hom(p, m.t(p))[0]);
        }
    }

    #[test]
    fn b_theta_induces_original_comonad() {
        for inst in corpus::small_monads(&g()) {
            let (s, _) = kleisli_abskl(&inst.monad);
            let bt = build_b_theta(&s);
            assert_eq!(induced_comonad(&bt.adjunction), s.comonad, "{}", inst.name);
            assert!(bt.adjunction.left.is_faithful());
            assert!(bt.adjunction.left.is_bijective_on_objects());
        }
    }

    #[test]
    fn profiles_of_named_monads() {
        let w = Arc::new(corpus::walking_arrow());
        let p = check_codescent_profile(&Monad::identity(&w), &g()).unwrap();
        assert_eq!(p.as_array(), [true; 5]);
        let p = check_codescent_profile(&corpus::const_terminal_monad(), &g()).unwrap();
        assert_eq!(p.as_array(), [false; 5]);
        let m = corpus::chain2_top_closure();
        let p = check_codescent_profile(&m, &g()).unwrap();
        assert!(p.agree());
        assert_eq!(p.equaliser, pointwise_equaliser_condition(&m));
    }

    #[test]
    fn reflection_of_identity_is_iso() {
        let w = Arc::new(corpus::walking_arrow());
        let r = reflect(&Monad::identity(&w));
        assert!(r.unit.f.is_isomorphism());
    }

    #[test]
    fn reflection_of_const_terminal_is_not_full() {
        let r = reflect(&corpus::const_terminal_monad());
        let a = &r.unit.source.base;
        let (x, y) = (a.object("x").unwrap(), a.object("y").unwrap());
        assert_eq!(a.hom(x, y).len(), 0);
        assert_eq!(r.btheta.category.hom(x, y).len(), 1);
        assert!(!r.unit.f.is_full());
    }

    #[test]
    fn unit_factors_as_identity() {
        for inst in corpus::small_monads(&g()) {
            let r = reflect(&inst.monad);
            let t = ImageMonad::new(&r.abskl);
            let (f, unique) = factor_through_unit(&r, &t, &r.unit, &g()).unwrap();
            assert!(unique, "{}", inst.name);
            assert!(f.f.is_identity());
        }
    }

    #[test]
    fn generated_comorphisms_factor_uniquely() {
        let ms = corpus::small_monads(&g());
        let mut seen = 0;
        for src in &ms {
            let r = reflect(&src.monad);
            for tgt in &ms {
                let t = ImageMonad::new(&kleisli_abskl(&tgt.monad).0);
                for c in comorphisms_into(&r, &t, 50, &g()).unwrap() {
                    let (f, unique) = factor_through_unit(&r, &t, &c, &g()).unwrap();
                    assert!(unique, "{} -> {}", src.name, tgt.name);
                    assert_eq!(r.unit.then(&f), c);
                    seen += 1;
                }
            }
        }
        assert!(seen > 20);
    }

    #[test]
    fn unit_followed_by_endo_factors_as_endo() {
        let m = corpus::const_terminal_monad();
        let r = reflect(&m);
        let t = ImageMonad::new(&r.abskl);
        let b = &r.abskl.base;
        let mut hits = 0;
        for h in enumerate_functors(b, b, &g()).unwrap() {
            if !check_preserves_thunkability(&h, &r.abskl, &r.abskl) {
                continue;
            }
            let e = t.endo_comorphism(&h).unwrap();
            let (f, unique) = factor_through_unit(&r, &t, &r.unit.then(&e), &g()).unwrap();
            assert!(unique);
            assert_eq!(f, e);
            hits += 1;
        }
        assert!(hits > 1);
    }

    #[test]
    fn finite_monads_have_no_unthunkable_kleisli_maps() {
        // In a finite category a split mono endomorphism is invertible, which
        // forces `η_T = Tη`; so every Kleisli morphism is thunkable and every
        // functor between finite structures preserves thunkability.
        for inst in corpus::monad_corpus(3, 2, 4, &g()).unwrap() {
            let m = &inst.monad;
            assert!((0..m.base.n_objects()).all(|y| m.eta(m.t(y)) == m.tf(m.eta(y))), "{}", inst.name);
            let (s, _) = kleisli_abskl(m);
            assert!((0..s.base.n_morphisms()).all(|f| s.thunkable(f)), "{}", inst.name);
        }
    }

    #[test]
    fn identity_comorphism_preserves_thunkability() {
        let (s, _) = kleisli_abskl(&corpus::const_terminal_monad());
        assert!(check_preserves_thunkability(&Functor::identity(&s.base), &s, &s));
    }
}
