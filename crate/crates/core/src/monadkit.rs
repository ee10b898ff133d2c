//! Monads and comonads on finite categories, with their Kleisli,
//! Eilenberg–Moore and coalgebra constructions.

use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{same_category, CategoryData, FinCategory, Functor, FunctorData, NatTrans, NatTransData};
use crate::guard::Guard;
use crate::report::{ValidationReport, Violation};

/// A monad `(T, η, μ)` on a finite category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monad {
    pub base: Arc<FinCategory>,
    pub endo: Functor,
    pub unit: NatTrans,
    pub mult: NatTrans,
}

/// A comonad `(Q, ε, δ)` on a finite category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comonad {
    pub base: Arc<FinCategory>,
    pub endo: Functor,
    pub counit: NatTrans,
    pub comult: NatTrans,
}

/// `left ⊣ right`, with `left: C → D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjunction {
    pub left: Functor,
    pub right: Functor,
    /// `1_C ⇒ left ; right`
    pub unit: NatTrans,
    /// `right ; left ⇒ 1_D`
    pub counit: NatTrans,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadData {
    pub base: CategoryData,
    pub endo: FunctorData,
    pub unit: NatTransData,
    pub mult: NatTransData,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComonadData {
    pub base: CategoryData,
    pub endo: FunctorData,
    pub counit: NatTransData,
    pub comult: NatTransData,
}

impl Monad {
    /// Assemble and validate.
    pub fn new(endo: Functor, unit: NatTrans, mult: NatTrans) -> Result<Monad> {
        let m = Monad {
            base: endo.source.clone(),
            endo,
            unit,
            mult,
        };
        let r = m.validate();
        if r.is_valid() {
            Ok(m)
        } else {
            Err(Error::Invalid {
                kind: "monad",
                report: r,
            })
        }
    }

    pub fn identity(base: &Arc<FinCategory>) -> Monad {
        let id = Functor::identity(base);
        let n = NatTrans::identity(&id);
        Monad::new(id, n.clone(), n).expect("identity monad")
    }

    pub fn from_data(data: &MonadData) -> Result<Monad> {
        let base = Arc::new(FinCategory::new(&data.base)?);
        let endo = Functor::from_data(&base, &base, &data.endo)?;
        let id = Functor::identity(&base);
        let tt = endo.then(&endo);
        let unit = NatTrans::from_data_unchecked(&id, &endo, &data.unit)?;
        let mult = NatTrans::from_data_unchecked(&tt, &endo, &data.mult)?;
        Monad::new(endo, unit, mult)
    }

    pub fn to_data(&self) -> MonadData {
        MonadData {
            base: self.base.to_data(),
            endo: self.endo.to_data(),
            unit: self.unit.to_data(),
            mult: self.mult.to_data(),
        }
    }

    pub fn t(&self, x: usize) -> usize {
        self.endo.obj[x]
    }

    pub fn tf(&self, f: usize) -> usize {
        self.endo.mor[f]
    }

    pub fn eta(&self, x: usize) -> usize {
        self.unit.comp[x]
    }

    pub fn mu(&self, x: usize) -> usize {
        self.mult.comp[x]
    }

    pub fn validate(&self) -> ValidationReport {
        let b = &*self.base;
        let mut r = ValidationReport::new();
        let id = Functor::identity(&self.base);
        let tt = self.endo.then(&self.endo);
        if !same_category(&self.endo.source, &self.base) || !same_category(&self.endo.target, &self.base) {
            r.structural("endofunctor is not on the base category");
            return r;
        }
        if self.unit.source != id || self.unit.target != self.endo {
            r.structural("unit has the wrong boundary");
        }
        if self.mult.source != tt || self.mult.target != self.endo {
            r.structural("multiplication has the wrong boundary");
        }
        if !r.is_valid() {
            return r;
        }
        r.extend(self.endo.validate().scoped("endo"));
        r.extend(self.unit.validate().scoped("unit"));
        r.extend(self.mult.validate().scoped("mult"));
        if !r.is_valid() {
            return r;
        }
        for x in 0..b.n_objects() {
            let tx = self.t(x);
            let at = vec![b.object_id(x).to_string()];
            let idt = b.id(tx);
            if b.then(self.tf(self.eta(x)), self.mu(x)) != idt {
                r.push(Violation::new("right_unit", at.clone()));
            }
            if b.then(self.eta(tx), self.mu(x)) != idt {
                r.push(Violation::new("left_unit", at.clone()));
            }
            if b.then(self.tf(self.mu(x)), self.mu(x)) != b.then(self.mu(tx), self.mu(x)) {
                r.push(Violation::new("associativity", at));
            }
        }
        r
    }
}

impl Comonad {
    pub fn new(endo: Functor, counit: NatTrans, comult: NatTrans) -> Result<Comonad> {
        let c = Comonad {
            base: endo.source.clone(),
            endo,
            counit,
            comult,
        };
        let r = c.validate();
        if r.is_valid() {
            Ok(c)
        } else {
            Err(Error::Invalid {
                kind: "comonad",
                report: r,
            })
        }
    }

    pub fn identity(base: &Arc<FinCategory>) -> Comonad {
        let id = Functor::identity(base);
        let n = NatTrans::identity(&id);
        Comonad::new(id, n.clone(), n).expect("identity comonad")
    }

    pub fn from_data(data: &ComonadData) -> Result<Comonad> {
        let base = Arc::new(FinCategory::new(&data.base)?);
        Self::from_data_on(&base, data)
    }

    /// Resolve against an already-built base.
    pub fn from_data_on(base: &Arc<FinCategory>, data: &ComonadData) -> Result<Comonad> {
        let endo = Functor::from_data(base, base, &data.endo)?;
        let id = Functor::identity(base);
        let qq = endo.then(&endo);
        let counit = NatTrans::from_data_unchecked(&endo, &id, &data.counit)?;
        let comult = NatTrans::from_data_unchecked(&endo, &qq, &data.comult)?;
        Comonad::new(endo, counit, comult)
    }

    pub fn to_data(&self) -> ComonadData {
        ComonadData {
            base: self.base.to_data(),
            endo: self.endo.to_data(),
            counit: self.counit.to_data(),
            comult: self.comult.to_data(),
        }
    }

    pub fn q(&self, x: usize) -> usize {
        self.endo.obj[x]
    }

    pub fn qf(&self, f: usize) -> usize {
        self.endo.mor[f]
    }

    pub fn eps(&self, x: usize) -> usize {
        self.counit.comp[x]
    }

    pub fn delta(&self, x: usize) -> usize {
        self.comult.comp[x]
    }

    pub fn validate(&self) -> ValidationReport {
        let b = &*self.base;
        let mut r = ValidationReport::new();
        let id = Functor::identity(&self.base);
        let qq = self.endo.then(&self.endo);
        if !same_category(&self.endo.source, &self.base) || !same_category(&self.endo.target, &self.base) {
            r.structural("endofunctor is not on the base category");
            return r;
        }
        if self.counit.source != self.endo || self.counit.target != id {
            r.structural("counit has the wrong boundary");
        }
        if self.comult.source != self.endo || self.comult.target != qq {
            r.structural("comultiplication has the wrong boundary");
        }
        if !r.is_valid() {
            return r;
        }
        r.extend(self.endo.validate().scoped("endo"));
        r.extend(self.counit.validate().scoped("counit"));
        r.extend(self.comult.validate().scoped("comult"));
        if !r.is_valid() {
            return r;
        }
        for x in 0..b.n_objects() {
            let qx = self.q(x);
            let at = vec![b.object_id(x).to_string()];
            let idq = b.id(qx);
            if b.then(self.delta(x), self.qf(self.eps(x))) != idq {
                r.push(Violation::new("right_counit", at.clone()));
            }
            if b.then(self.delta(x), self.eps(qx)) != idq {
                r.push(Violation::new("left_counit", at.clone()));
            }
            if b.then(self.delta(x), self.qf(self.delta(x))) != b.then(self.delta(x), self.delta(qx)) {
                r.push(Violation::new("coassociativity", at));
            }
        }
        r
    }
}

impl Adjunction {
    pub fn new(left: Functor, right: Functor, unit: NatTrans, counit: NatTrans) -> Result<Adjunction> {
        let a = Adjunction {
            left,
            right,
            unit,
            counit,
        };
        let r = a.validate();
        if r.is_valid() {
            Ok(a)
        } else {
            Err(Error::Invalid {
                kind: "adjunction",
                report: r,
            })
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let c = &*self.left.source;
        let d = &*self.left.target;
        r.extend(self.unit.validate().scoped("unit"));
        r.extend(self.counit.validate().scoped("counit"));
        if !r.is_valid() {
            return r;
        }
        for x in 0..c.n_objects() {
            let fx = self.left.obj[x];
            if d.then(self.left.mor[self.unit.comp[x]], self.counit.comp[fx]) != d.id(fx) {
                r.push(Violation::new("left_triangle", vec![c.object_id(x).into()]));
            }
        }
        for y in 0..d.n_objects() {
            let uy = self.right.obj[y];
            if c.then(self.unit.comp[uy], self.right.mor[self.counit.comp[y]]) != c.id(uy) {
                r.push(Violation::new("right_triangle", vec![d.object_id(y).into()]));
            }
        }
        r
    }
}

/// The monad `left ; right` on the source of the left adjoint.
pub fn induced_monad(a: &Adjunction) -> Monad {
    let endo = a.left.then(&a.right);
    let tt = endo.then(&endo);
    let mult = NatTrans {
        source: tt,
        target: endo.clone(),
        comp: a.left.obj.iter().map(|&fx| a.right.mor[a.counit.comp[fx]]).collect(),
    };
    Monad::new(endo, a.unit.clone(), mult).expect("an adjunction induces a monad")
}

/// The comonad `right ; left` on the target of the left adjoint.
pub fn induced_comonad(a: &Adjunction) -> Comonad {
    let endo = a.right.then(&a.left);
    let qq = endo.then(&endo);
    let comult = NatTrans {
        source: endo.clone(),
        target: qq,
        comp: a.right.obj.iter().map(|&uy| a.left.mor[a.unit.comp[uy]]).collect(),
    };
    Comonad::new(endo, a.counit.clone(), comult).expect("an adjunction induces a comonad")
}

/// The Kleisli category with bookkeeping: Kleisli morphism `k: X → Y`
/// is the base morphism `under[k]: X → TY`.
#[derive(Clone, Debug)]
pub struct Kleisli {
    pub category: Arc<FinCategory>,
    pub adjunction: Adjunction,
    pub under: Vec<usize>,
    lookup: FxHashMap<(usize, usize), usize>,
}

impl Kleisli {
    /// The Kleisli morphism with underlying `g: X → TY`.
    pub fn morphism(&self, g: usize, y: usize) -> usize {
        self.lookup[&(g, y)]
    }

    pub fn try_morphism(&self, g: usize, y: usize) -> Option<usize> {
        self.lookup.get(&(g, y)).copied()
    }
}

/// Kleisli category and the adjunction `F_T ⊣ U_T`.
///
/// Morphism ids are the underlying base ids when `T` is injective on
/// objects, and `g>Y` otherwise.
pub fn kleisli(m: &Monad) -> Kleisli {
    let b = &*m.base;
    let tag = !m.endo.is_injective_on_objects();
    let no = b.n_objects();
    let mut morphisms = Vec::new();
    let mut under = Vec::new();
    let mut lookup = FxHashMap::default();
    for x in 0..no {
        for y in 0..no {
            for &g in b.hom(x, m.t(y)) {
                let id = if tag {
                    format!("{}>{}", b.morphism_id(g), b.object_id(y))
                } else {
                    b.morphism_id(g).to_string()
                };
                lookup.insert((g, y), morphisms.len());
                morphisms.push((id, x, y));
                under.push(g);
            }
        }
    }
    let (cat, _, perm) = FinCategory::from_parts_indexed(
        b.objects().to_vec(),
        morphisms.clone(),
        |x| lookup[&(m.eta(x), x)],
        |k, l| {
            let z = morphisms[l].2;
            lookup[&(b.then_all(&[under[k], m.tf(under[l]), m.mu(z)]), z)]
        },
    )
    .expect("Kleisli construction yields a category");
    let lookup: FxHashMap<(usize, usize), usize> = lookup.into_iter().map(|(k, v)| (k, perm[v])).collect();
    let mut sorted_under = vec![0; under.len()];
    for (i, &u) in under.iter().enumerate() {
        sorted_under[perm[i]] = u;
    }
    let under = sorted_under;
    let cat = Arc::new(cat);
    let left = Functor {
        source: m.base.clone(),
        target: cat.clone(),
        obj: (0..no).collect(),
        mor: (0..b.n_morphisms())
            .map(|f| lookup[&(b.then(f, m.eta(b.tgt(f))), b.tgt(f))])
            .collect(),
    };
    let right = Functor {
        source: cat.clone(),
        target: m.base.clone(),
        obj: (0..no).map(|y| m.t(y)).collect(),
        mor: (0..cat.n_morphisms())
            .map(|k| b.then(m.tf(under[k]), m.mu(cat.tgt(k))))
            .collect(),
    };
    let unit = NatTrans {
        source: Functor::identity(&m.base),
        target: left.then(&right),
        comp: m.unit.comp.clone(),
    };
    let counit = NatTrans {
        source: right.then(&left),
        target: Functor::identity(&cat),
        comp: (0..no).map(|x| lookup[&(b.id(m.t(x)), x)]).collect(),
    };
    let adjunction = Adjunction::new(left, right, unit, counit).expect("Kleisli adjunction");
    Kleisli {
        category: cat,
        adjunction,
        under,
        lookup,
    }
}

/// Category of structures `(X, s)` for an endofunctor, with bookkeeping.
#[derive(Clone, Debug)]
pub struct StructureCategory {
    pub category: Arc<FinCategory>,
    pub adjunction: Adjunction,
    /// `(carrier, structure map)` per object.
    pub structures: Vec<(usize, usize)>,
    /// Underlying base morphism per morphism.
    pub under: Vec<usize>,
}

impl StructureCategory {
    pub fn object_of(&self, carrier: usize, structure: usize) -> Option<usize> {
        self.structures.iter().position(|&s| s == (carrier, structure))
    }
}

fn reorder<T: Copy + Default>(items: &[T], perm: &[usize]) -> Vec<T> {
    let mut out = vec![T::default(); items.len()];
    for (i, &x) in items.iter().enumerate() {
        out[perm[i]] = x;
    }
    out
}

fn structure_id(b: &FinCategory, x: usize, s: usize) -> String {
    format!("({},{})", b.object_id(x), b.morphism_id(s))
}

/// Assemble a category whose objects are `(X, s)` pairs and whose morphisms
/// are base morphisms satisfying `is_map`.
fn structure_category(
    b: &FinCategory,
    structures: &[(usize, usize)],
    is_map: impl Fn(usize, usize, usize) -> bool,
) -> (Arc<FinCategory>, Vec<usize>, FxHashMap<(usize, usize, usize), usize>, Vec<usize>) {
    let ids: Vec<String> = structures.iter().map(|&(x, s)| structure_id(b, x, s)).collect();
    let mut morphisms = Vec::new();
    let mut under = Vec::new();
    let mut lookup = FxHashMap::default();
    for (i, &(x, _)) in structures.iter().enumerate() {
        for (j, &(y, _)) in structures.iter().enumerate() {
            for &h in b.hom(x, y) {
                if is_map(i, j, h) {
                    lookup.insert((i, j, h), morphisms.len());
                    morphisms.push((format!("{}@{},{}", b.morphism_id(h), ids[i], ids[j]), i, j));
                    under.push(h);
                }
            }
        }
    }
    let (cat, operm, mperm) = FinCategory::from_parts_indexed(
        ids,
        morphisms.clone(),
        |i| lookup[&(i, i, b.id(structures[i].0))],
        |k, l| lookup[&(morphisms[k].1, morphisms[l].2, b.then(under[k], under[l]))],
    )
    .expect("structure maps form a category");
    let mut sorted_under = vec![0; under.len()];
    for (i, &u) in under.iter().enumerate() {
        sorted_under[mperm[i]] = u;
    }
    let lookup = lookup
        .into_iter()
        .map(|((i, j, h), v)| ((operm[i], operm[j], h), mperm[v]))
        .collect();
    (Arc::new(cat), sorted_under, lookup, operm)
}

/// Eilenberg–Moore category, algebras enumerated exhaustively, with `F^T ⊣ U^T`.
pub fn eilenberg_moore(m: &Monad, guard: &Guard) -> Result<StructureCategory> {
    let b = &*m.base;
    let no = b.n_objects();
    let space: u128 = (0..no).map(|x| b.hom(m.t(x), x).len() as u128).sum();
    guard.check("algebra enumeration", space)?;
    let mut structures = Vec::new();
    for x in 0..no {
        for &a in b.hom(m.t(x), x) {
            let unit = b.then(m.eta(x), a) == b.id(x);
            let assoc = b.then(m.tf(a), a) == b.then(m.mu(x), a);
            if unit && assoc {
                structures.push((x, a));
            }
        }
    }
    let (cat, under, lookup, operm) = structure_category(b, &structures, |i, j, h| {
        let (_, a) = structures[i];
        let (_, c) = structures[j];
        b.then(a, h) == b.then(m.tf(h), c)
    });
    let structures = reorder(&structures, &operm);
    let index = |x: usize, a: usize| structures.iter().position(|&s| s == (x, a)).unwrap();
    let free: Vec<usize> = (0..no).map(|x| index(m.t(x), m.mu(x))).collect();
    let left = Functor {
        source: m.base.clone(),
        target: cat.clone(),
        obj: free.clone(),
        mor: (0..b.n_morphisms())
            .map(|f| lookup[&(free[b.src(f)], free[b.tgt(f)], m.tf(f))])
            .collect(),
    };
    let right = Functor {
        source: cat.clone(),
        target: m.base.clone(),
        obj: structures.iter().map(|&(x, _)| x).collect(),
        mor: under.clone(),
    };
    let unit = NatTrans {
        source: Functor::identity(&m.base),
        target: left.then(&right),
        comp: m.unit.comp.clone(),
    };
    let counit = NatTrans {
        source: right.then(&left),
        target: Functor::identity(&cat),
        comp: structures
            .iter()
            .enumerate()
            .map(|(i, &(x, a))| lookup[&(free[x], i, a)])
            .collect(),
    };
    let adjunction = Adjunction::new(left, right, unit, counit)?;
    Ok(StructureCategory {
        category: cat,
        adjunction,
        structures,
        under,
    })
}

/// Category of coalgebras, with `U^Q ⊣ F^Q` (forgetful functor on the left).
pub fn coalgebras(c: &Comonad, guard: &Guard) -> Result<StructureCategory> {
    let b = &*c.base;
    let no = b.n_objects();
    let space: u128 = (0..no).map(|x| b.hom(x, c.q(x)).len() as u128).sum();
    guard.check("coalgebra enumeration", space)?;
    let mut structures = Vec::new();
    for x in 0..no {
        for &s in b.hom(x, c.q(x)) {
            let counit = b.then(s, c.eps(x)) == b.id(x);
            let coassoc = b.then(s, c.qf(s)) == b.then(s, c.delta(x));
            if counit && coassoc {
                structures.push((x, s));
            }
        }
    }
    let (cat, under, lookup, operm) = structure_category(b, &structures, |i, j, h| {
        let (_, s) = structures[i];
        let (_, t) = structures[j];
        b.then(s, c.qf(h)) == b.then(h, t)
    });
    let structures = reorder(&structures, &operm);
    let index = |x: usize, s: usize| structures.iter().position(|&p| p == (x, s)).unwrap();
    let cofree: Vec<usize> = (0..no).map(|x| index(c.q(x), c.delta(x))).collect();
    let forget = Functor {
        source: cat.clone(),
        target: c.base.clone(),
        obj: structures.iter().map(|&(x, _)| x).collect(),
        mor: under.clone(),
    };
    let cofree_f = Functor {
        source: c.base.clone(),
        target: cat.clone(),
        obj: cofree.clone(),
        mor: (0..b.n_morphisms())
            .map(|f| lookup[&(cofree[b.src(f)], cofree[b.tgt(f)], c.qf(f))])
            .collect(),
    };
    let unit = NatTrans {
        source: Functor::identity(&cat),
        target: forget.then(&cofree_f),
        comp: structures
            .iter()
            .enumerate()
            .map(|(i, &(x, s))| lookup[&(i, cofree[x], s)])
            .collect(),
    };
    let counit = NatTrans {
        source: cofree_f.then(&forget),
        target: Functor::identity(&c.base),
        comp: c.counit.comp.clone(),
    };
    let adjunction = Adjunction::new(forget, cofree_f, unit, counit)?;
    Ok(StructureCategory {
        category: cat,
        adjunction,
        structures,
        under,
    })
}

/// The comparison `B_T → B^T`, `X ↦ (TX, μ_X)`.
pub fn kleisli_comparison(m: &Monad, kl: &Kleisli, em: &StructureCategory) -> Functor {
    let b = &*m.base;
    let free: Vec<usize> = (0..b.n_objects())
        .map(|x| em.object_of(m.t(x), m.mu(x)).expect("free algebra"))
        .collect();
    let emc = &em.category;
    Functor {
        source: kl.category.clone(),
        target: emc.clone(),
        obj: free.clone(),
        mor: (0..kl.category.n_morphisms())
            .map(|k| {
                let (x, y) = (kl.category.src(k), kl.category.tgt(k));
                let h = b.then(m.tf(kl.under[k]), m.mu(y));
                *emc.hom(free[x], free[y])
                    .iter()
                    .find(|&&e| em.under[e] == h)
                    .expect("Kleisli maps are algebra maps")
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn g() -> Guard {
        Guard::default()
    }

    #[test]
    fn identity_monad_kleisli_is_base() {
        let w = Arc::new(corpus::walking_arrow());
        let kl = kleisli(&Monad::identity(&w));
        assert_eq!(*kl.category, *w);
    }

    #[test]
    fn const_terminal_kleisli_hom() {
        let m = corpus::const_terminal_monad();
        let kl = kleisli(&m);
        let c = &kl.category;
        let (x, y) = (c.object("x").unwrap(), c.object("y").unwrap());
        assert_eq!(c.hom(x, y).len(), 1);
    }

    #[test]
    fn top_closure_kleisli_hom() {
        let m = corpus::chain2_top_closure();
        let kl = kleisli(&m);
        let c = &kl.category;
        let zero = c.object("0").unwrap();
        assert_eq!(c.hom(zero, zero).len(), 1);
    }

    #[test]
    fn kleisli_round_trip() {
        for inst in corpus::small_monads(&g()) {
            let kl = kleisli(&inst.monad);
            assert_eq!(induced_monad(&kl.adjunction), inst.monad, "{}", inst.name);
            assert!(kl.category.validate().is_valid());
        }
    }

    #[test]
    fn identity_em_is_base() {
        let t = Arc::new(corpus::terminal_cat());
        let em = eilenberg_moore(&Monad::identity(&t), &g()).unwrap();
        assert_eq!(em.category.n_objects(), 1);
        assert_eq!(em.category.n_morphisms(), 1);
        let w = Arc::new(corpus::walking_arrow());
        let em = eilenberg_moore(&Monad::identity(&w), &g()).unwrap();
        assert!(em.adjunction.left.is_isomorphism());
    }

    #[test]
    fn const_terminal_algebras_by_brute_force() {
        let m = corpus::const_terminal_monad();
        let em = eilenberg_moore(&m, &g()).unwrap();
        let b = &m.base;
        // Independent oracle: all (X, a: 1 → X) with the two laws.
        let mut expected = Vec::new();
        for x in 0..b.n_objects() {
            for a in 0..b.n_morphisms() {
                if b.src(a) != m.t(x) || b.tgt(a) != x {
                    continue;
                }
                let ok1 = b.try_then(m.eta(x), a) == Some(b.id(x));
                let ok2 = b.try_then(m.tf(a), a) == b.try_then(m.mu(x), a);
                if ok1 && ok2 {
                    expected.push((x, a));
                }
            }
        }
        assert_eq!(em.structures, expected);
        assert_eq!(expected.len(), 1);
    }

    #[test]
    fn identity_coalgebras_are_base() {
        let w = Arc::new(corpus::walking_arrow());
        let co = coalgebras(&Comonad::identity(&w), &g()).unwrap();
        assert!(co.adjunction.left.is_isomorphism());
    }

    #[test]
    fn induced_comonads_are_comonads() {
        for inst in corpus::small_monads(&g()) {
            let kl = kleisli(&inst.monad);
            let q = induced_comonad(&kl.adjunction);
            assert!(q.validate().is_valid());
            let em = eilenberg_moore(&inst.monad, &g()).unwrap();
            assert!(induced_comonad(&em.adjunction).validate().is_valid());
        }
    }

    #[test]
    fn identity_kleisli_comonad_is_identity() {
        let w = Arc::new(corpus::walking_arrow());
        let kl = kleisli(&Monad::identity(&w));
        let q = induced_comonad(&kl.adjunction);
        assert_eq!(q, Comonad::identity(&kl.category));
        let co = coalgebras(&q, &g()).unwrap();
        assert!(co.adjunction.left.is_isomorphism());
    }

    #[test]
    fn const_terminal_kleisli_coalgebras_by_brute_force() {
        let m = corpus::const_terminal_monad();
        let kl = kleisli(&m);
        let q = induced_comonad(&kl.adjunction);
        let co = coalgebras(&q, &g()).unwrap();
        let c = &*kl.category;
        let mut n = 0;
        for x in 0..c.n_objects() {
            for s in 0..c.n_morphisms() {
                if c.src(s) == x && c.tgt(s) == q.q(x)
                    && c.then(s, q.eps(x)) == c.id(x)
                    && c.then(s, q.qf(s)) == c.then(s, q.delta(x))
                {
                    n += 1;
                }
            }
        }
        assert_eq!(co.structures.len(), n);
    }

    #[test]
    fn comparison_is_fully_faithful() {
        for inst in corpus::small_monads(&g()) {
            let kl = kleisli(&inst.monad);
            let em = eilenberg_moore(&inst.monad, &g()).unwrap();
            let k = kleisli_comparison(&inst.monad, &kl, &em);
            assert!(k.validate().is_valid());
            assert!(k.is_full() && k.is_faithful(), "{}", inst.name);
        }
    }

    #[test]
    fn monad_json_round_trip() {
        let m = corpus::const_terminal_monad();
        let s = serde_json::to_string(&m.to_data()).unwrap();
        let back = Monad::from_data(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
