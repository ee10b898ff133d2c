//! Two-dimensional abstract Kleisli structures: thunkings, thunkable
//! 2-cells, descent cones, and the comparison `J: 𝓑 → (𝓑_T)_θ`.
//!
//! A structure on `𝓑` is a pseudocomonad `Q` with a pseudocoalgebra
//! `(θ_X, u_X, m_X)` on every object, `u_X: 1 ⇒ ε_X∘θ_X`,
//! `m_X: δ_X∘θ_X ⇒ Qθ_X∘θ_X`. Pseudocoalgebra and thunking laws are
//! checked as their pseudoalgebra duals on the 1-cell opposite.

use std::collections::BTreeMap;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor};
use crate::guard::Guard;
use crate::pexpr::{fixture, Value};
use crate::pseudomonadkit::{
    compose_pseudo, free_algebras, free_functor, induced_pseudocomonad, is_algebra_2cell, is_pseudomorphism,
    read_constraint, write_constraint, Constraint, FreeAlgebras, PseudoMorphism, Pseudocomonad, PseudocomonadData,
    Pseudomonad, Structured,
};
use crate::report::{ValidationReport, Violation};
use crate::twocat::{Fin2Category, Fin2CategoryData, TwoFunctor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsKL2 {
    pub base: Arc<Fin2Category>,
    pub comonad: Pseudocomonad,
    pub theta: Vec<usize>,
    pub u: Constraint,
    pub m: Constraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsKL2Data {
    pub base: Fin2CategoryData,
    pub comonad: PseudocomonadData,
    pub theta: BTreeMap<String, String>,
    pub u: crate::twocat::ModificationData,
    pub m: crate::twocat::ModificationData,
}

impl AbsKL2 {
    /// The pseudomonad on the 1-cell opposite whose pseudoalgebras are the
    /// pseudocoalgebras of `comonad`. Its 2-cell indices are those of `base`.
    pub fn dual(&self) -> Pseudomonad {
        self.comonad.op1()
    }

    /// `(a, a0, a1)` of the dual pseudoalgebra at `x`.
    fn algebra(&self, x: usize) -> [Value; 3] {
        [
            Value::One(self.theta[x]),
            Value::cell(self.u.comp[x]),
            Value::cell(self.m.inv[x]),
        ]
    }

    pub fn validate(&self) -> ValidationReport {
        let c = &*self.base;
        let mut r = ValidationReport::new();
        let n = c.n_objects();
        if self.theta.len() != n || self.u.comp.len() != n || self.u.inv.len() != n || self.m.comp.len() != n || self.m.inv.len() != n
        {
            r.structural("one coalgebra per object is required");
            return r;
        }
        r.extend(crate::pseudomonadkit::check_pseudocomonad(&self.comonad).scoped("comonad"));
        if !r.is_valid() {
            return r;
        }
        let q = &self.comonad;
        for x in 0..n {
            let at = || vec![c.object_id(x).to_string()];
            let th = self.theta[x];
            if c.src1(th) != x || c.tgt1(th) != q.q(x) {
                r.push(Violation::new("boundary", at()).with_detail("theta"));
                continue;
            }
            let typed = |k: &Constraint, s: usize, t: usize| {
                let (a, b) = (k.comp[x], k.inv[x]);
                c.src2(a) == s && c.tgt2(a) == t && c.try_then2(a, b) == Some(c.id2(s)) && c.try_then2(b, a) == Some(c.id2(t))
            };
            if !typed(&self.u, c.id1(x), c.then1(th, q.eps(x))) {
                r.push(Violation::new("invertibility", at()).with_detail("counitor"));
            }
            if !typed(&self.m, c.then1(th, q.delta(x)), c.then1(th, q.endo.one[th])) {
                r.push(Violation::new("invertibility", at()).with_detail("coassociator"));
            }
        }
        if !r.is_valid() {
            return r;
        }
        let dual = self.dual();
        let sig = dual.signature();
        for x in 0..n {
            let [a, a0, a1] = self.algebra(x);
            let args = [Value::Obj(x), a, a0, a1];
            for (law, fx) in [("coalgebra_unit", "pseudoalgebra_unit"), ("coalgebra_assoc", "pseudoalgebra_assoc")] {
                match fixture(fx).holds(&sig, &args) {
                    Ok(true) => {}
                    Ok(false) => r.push(Violation::new(law, vec![c.object_id(x).into()])),
                    Err(e) => r.push(Violation::new(law, vec![c.object_id(x).into()]).with_detail(e.to_string())),
                }
            }
        }
        for x in 0..n {
            let qx = q.q(x);
            let lifted = self.theta[qx] == q.delta(x)
                && self.u.comp[qx] == q.rho.comp[x]
                && self.m.comp[qx] == q.alf.comp[x];
            if !lifted {
                r.push(Violation::new("lifting", vec![c.object_id(x).into()]));
            }
        }
        r
    }

    /// Whether `tf: f;θ_Y ⇒ θ_X;Qf` is a thunking of `f: X → Y`.
    pub fn is_thunking(&self, dual: &Pseudomonad, f: usize, tf: usize) -> Result<bool> {
        let c = &*self.base;
        let (x, y) = (c.src1(f), c.tgt1(f));
        if c.src2(tf) != c.then1(f, self.theta[y]) || c.tgt2(tf) != c.then1(self.theta[x], self.comonad.endo.one[f]) {
            return Ok(false);
        }
        let Some(tinv) = c.inv(tf) else {
            return Ok(false);
        };
        let sig = dual.signature();
        let [a, a0, a1] = self.algebra(y);
        let [b, b0, b1] = self.algebra(x);
        let args = [
            Value::Obj(y),
            Value::Obj(x),
            a,
            a0,
            a1,
            b,
            b0,
            b1,
            Value::One(f),
            Value::cell(tinv),
        ];
        Ok(fixture("pseudomorphism_unit").holds(&sig, &args)? && fixture("pseudomorphism_assoc").holds(&sig, &args)?)
    }

    /// Whether `phi: f ⇒ g` is thunkable for thunkings `tf`, `tg`.
    pub fn is_thunkable(&self, dual: &Pseudomonad, (f, tf): (usize, usize), (g, tg): (usize, usize), phi: usize) -> Result<bool> {
        let c = &*self.base;
        if c.src2(phi) != f || c.tgt2(phi) != g {
            return Ok(false);
        }
        let (x, y) = (c.src1(f), c.tgt1(f));
        let (Some(fi), Some(gi)) = (c.inv(tf), c.inv(tg)) else {
            return Ok(false);
        };
        let sig = dual.signature();
        fixture("algebra_2cell").holds(
            &sig,
            &[
                Value::Obj(y),
                Value::Obj(x),
                Value::One(self.theta[y]),
                Value::One(self.theta[x]),
                Value::One(f),
                Value::cell(fi),
                Value::One(g),
                Value::cell(gi),
                Value::cell(phi),
            ],
        )
    }

    pub fn to_data(&self) -> AbsKL2Data {
        let c = &*self.base;
        AbsKL2Data {
            base: c.to_data(),
            comonad: self.comonad.to_data(),
            theta: self
                .theta
                .iter()
                .enumerate()
                .map(|(x, &t)| (c.object_id(x).to_string(), c.onecell_id(t).to_string()))
                .collect(),
            u: write_constraint(c, &self.u),
            m: write_constraint(c, &self.m),
        }
    }

    pub fn from_data_unchecked(d: &AbsKL2Data) -> Result<AbsKL2> {
        let base = Arc::new(Fin2Category::unchecked(&d.base)?);
        let comonad = Pseudocomonad::from_data_on(&base, &d.comonad)?;
        let mut theta = vec![usize::MAX; base.n_objects()];
        for (o, t) in &d.theta {
            theta[base.object(o)?] = base.onecell(t)?;
        }
        if theta.contains(&usize::MAX) {
            return Err(Error::structure("theta needs a 1-cell at every object"));
        }
        let u = read_constraint(&base, &d.u, "u")?;
        let m = read_constraint(&base, &d.m, "m")?;
        Ok(AbsKL2 {
            base,
            comonad,
            theta,
            u,
            m,
        })
    }

    pub fn from_data(d: &AbsKL2Data) -> Result<AbsKL2> {
        let s = Self::from_data_unchecked(d)?;
        let r = s.base.validate();
        if !r.is_valid() {
            return Err(Error::Invalid {
                kind: "2-category",
                report: r,
            });
        }
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
}

/// The structure on the free pseudoalgebras of `pm`: `θ_X = (Tη_X, μ_{η_X})`,
/// counitor `ρ_X`, coassociator `Tη_{η_X}`.
pub fn abskl2_of_pseudomonad(pm: &Pseudomonad, guard: &Guard) -> Result<(AbsKL2, FreeAlgebras)> {
    let bt = free_algebras(pm, guard)?;
    let s = abskl2_on(pm, &bt)?;
    Ok((s, bt))
}

fn abskl2_on(pm: &Pseudomonad, bt: &FreeAlgebras) -> Result<AbsKL2> {
    let c = &*pm.base;
    let b = &*bt.cat;
    let comonad = induced_pseudocomonad(pm, bt)?;
    let mut theta = Vec::new();
    let mut u = Constraint {
        comp: vec![],
        inv: vec![],
    };
    let mut m = u.clone();
    for x in 0..c.n_objects() {
        let tx = pm.t(x);
        let ex = pm.eta(x);
        let th = bt.expect1(
            &PseudoMorphism {
                source: x,
                target: tx,
                p: pm.t1(ex),
                pbar: pm.mu_f(ex),
            },
            "thunk",
        )?;
        theta.push(th);
        let (s, t) = (b.id1(x), b.then1(th, comonad.eps(x)));
        let rho = &pm.rho;
        let rho_inv = rho.inv.as_ref().expect("pseudomonad unitors carry inverses");
        u.comp.push(bt.expect2(s, t, rho.comp[x], "counitor")?);
        u.inv.push(bt.expect2(t, s, rho_inv[x], "counitor")?);
        let (s, t) = (b.then1(th, comonad.delta(x)), b.then1(th, comonad.endo.one[th]));
        m.comp.push(bt.expect2(s, t, pm.t2(pm.eta_f(ex)), "coassociator")?);
        m.inv.push(bt.expect2(t, s, pm.t2(pm.eta.inv[ex]), "coassociator")?);
    }
    Ok(AbsKL2 {
        base: bt.cat.clone(),
        comonad,
        theta,
        u,
        m,
    })
}

/// The 2-category of thunked 1-cells and thunkable 2-cells, with the
/// forgetful `F_θ` and the cofree `U_θ: X ↦ QX, f ↦ (Qf, δ_f)`.
#[derive(Clone, Debug)]
pub struct BTheta2 {
    pub cat: Arc<Fin2Category>,
    /// `(f, θ_f)` behind each 1-cell.
    pub thunked: Vec<(usize, usize)>,
    /// Base 2-cell behind each 2-cell.
    pub cells: Vec<usize>,
    pub forget: TwoFunctor,
    pub cofree: TwoFunctor,
    one_lookup: FxHashMap<(usize, usize), usize>,
    two_lookup: FxHashMap<(usize, usize, usize), usize>,
}

impl BTheta2 {
    pub fn find1(&self, f: usize, tf: usize) -> Option<usize> {
        self.one_lookup.get(&(f, tf)).copied()
    }

    pub fn find2(&self, src: usize, tgt: usize, phi: usize) -> Option<usize> {
        self.two_lookup.get(&(src, tgt, phi)).copied()
    }
}

pub fn build_b_theta_2(s: &AbsKL2, guard: &Guard) -> Result<BTheta2> {
    let c = &*s.base;
    let q = &s.comonad;
    let dual = s.dual();
    let n = c.n_objects();
    let mut space = 0u128;
    for f in 0..c.n_onecells() {
        let (x, y) = (c.src1(f), c.tgt1(f));
        space += c.hom2(c.then1(f, s.theta[y]), c.then1(s.theta[x], q.endo.one[f])).len() as u128;
    }
    guard.check("thunkings", space)?;
    let mut ones = Vec::new();
    for f in 0..c.n_onecells() {
        let (x, y) = (c.src1(f), c.tgt1(f));
        for tf in c.isos(c.then1(f, s.theta[y]), c.then1(s.theta[x], q.endo.one[f])) {
            if s.is_thunking(&dual, f, tf)? {
                ones.push((format!("({},{})", c.onecell_id(f), c.twocell_id(tf)), x, y, (f, tf)));
            }
        }
    }
    let space2: u128 = ones
        .iter()
        .map(|o| ones.iter().filter(|p| (p.1, p.2) == (o.1, o.2)).count() as u128)
        .sum();
    guard.check("thunkable 2-cells", space2)?;
    let mut twos = Vec::new();
    for (i, (si, _, _, a)) in ones.iter().enumerate() {
        for (j, (sj, _, _, b)) in ones.iter().enumerate() {
            if c.src1(a.0) != c.src1(b.0) || c.tgt1(a.0) != c.tgt1(b.0) {
                continue;
            }
            for &phi in c.hom2(a.0, b.0) {
                if s.is_thunkable(&dual, *a, *b, phi)? {
                    twos.push((format!("{}:{}=>{}", c.twocell_id(phi), si, sj), i, j, phi));
                }
            }
        }
    }
    let st = Structured {
        objects: c.objects().to_vec(),
        ones,
        twos,
    };
    let (cat, one_lookup, two_lookup) = st.build(
        |x| (c.id1(x), c.id2(s.theta[x])),
        |&(f, tf), &(g, tg)| (c.then1(f, g), c.then2(c.whisk_l(f, tg), c.whisk_r(tf, q.endo.one[g]))),
        c,
        |k| k.0,
    )?;
    let cat = Arc::new(cat);
    let thunked: Vec<(usize, usize)> = st.ones.iter().map(|o| o.3).collect();
    let cells: Vec<usize> = st.twos.iter().map(|t| t.3).collect();
    let forget = TwoFunctor {
        source: cat.clone(),
        target: s.base.clone(),
        obj: (0..n).collect(),
        one: thunked.iter().map(|t| t.0).collect(),
        two: cells.clone(),
    };
    let mut cone = Vec::new();
    for f in 0..c.n_onecells() {
        cone.push(
            one_lookup
                .get(&(q.endo.one[f], q.delta.cell[f]))
                .copied()
                .ok_or_else(|| Error::defect(format!("Q{} with its comultiplication cell is not thunked", c.onecell_id(f))))?,
        );
    }
    let mut ctwo = Vec::new();
    for a in 0..c.n_twocells() {
        ctwo.push(
            two_lookup
                .get(&(cone[c.src2(a)], cone[c.tgt2(a)], q.endo.two[a]))
                .copied()
                .ok_or_else(|| Error::defect(format!("Q{} is not thunkable", c.twocell_id(a))))?,
        );
    }
    let cofree = TwoFunctor {
        source: s.base.clone(),
        target: cat.clone(),
        obj: q.endo.obj.clone(),
        one: cone,
        two: ctwo,
    };
    Ok(BTheta2 {
        cat,
        thunked,
        cells,
        forget,
        cofree,
        one_lookup,
        two_lookup,
    })
}

/// The pseudocomonad induced on the base by `F_θ ⊣ U_θ`: unit `(θ_X, m_X)`,
/// counit `ε`. Fails if the adjunction data is not thunked/thunkable.
pub fn theta_induced_comonad(s: &AbsKL2, bth: &BTheta2) -> Result<Pseudocomonad> {
    let c = &*s.base;
    let b = &*bth.cat;
    let q = &s.comonad;
    let n = c.n_objects();
    let mut unit = Vec::new();
    for x in 0..n {
        unit.push(
            bth.find1(s.theta[x], s.m.comp[x])
                .ok_or_else(|| Error::defect(format!("unit at {} is not thunked", c.object_id(x))))?,
        );
    }
    let endo = bth.cofree.then(&bth.forget);
    let eps = crate::twocat::PseudoNat {
        source: endo.clone(),
        target: q.eps.target.clone(),
        comp: q.eps.comp.clone(),
        cell: q.eps.cell.clone(),
        inv: q.eps.inv.clone(),
    };
    let delta = crate::twocat::PseudoNat {
        source: endo.clone(),
        target: endo.then(&endo),
        comp: (0..n).map(|x| bth.forget.one[unit[q.q(x)]]).collect(),
        cell: (0..c.n_onecells()).map(|f| bth.thunked[bth.cofree.one[f]].1).collect(),
        inv: (0..c.n_onecells())
            .map(|f| c.inv(bth.thunked[bth.cofree.one[f]].1).expect("thunkings are invertible"))
            .collect(),
    };
    let mut lam = Constraint {
        comp: vec![],
        inv: vec![],
    };
    for x in 0..n {
        // U ε_X after the unit at UX, against the identity on UX
        let composite = b.then1(unit[q.q(x)], bth.cofree.one[q.eps(x)]);
        let ux = b.id1(q.q(x));
        let lam_inv = q.lam.inv.as_ref().expect("comonad unitors carry inverses");
        let a = bth
            .find2(composite, ux, q.lam.comp[x])
            .ok_or_else(|| Error::defect(format!("left unitor at {} is not thunkable", c.object_id(x))))?;
        let ai = bth
            .find2(ux, composite, lam_inv[x])
            .ok_or_else(|| Error::defect(format!("left unitor at {} is not thunkable", c.object_id(x))))?;
        lam.comp.push(bth.cells[a]);
        lam.inv.push(bth.cells[ai]);
    }
    let lifted = |k: &Constraint| Constraint {
        comp: (0..n).map(|x| k.comp[q.q(x)]).collect(),
        inv: (0..n).map(|x| k.inv[q.q(x)]).collect(),
    };
    Ok(Pseudocomonad::new(
        s.base.clone(),
        endo,
        eps,
        delta,
        &lam,
        &lifted(&s.m),
        &lifted(&s.u),
    ))
}

/// Everything built from one pseudomonad: `𝓑_T`, its structure, `(𝓑_T)_θ`
/// and `J`.
#[derive(Clone, Debug)]
pub struct Kleisli2 {
    pub pm: Pseudomonad,
    pub free: FreeAlgebras,
    pub free_functor: TwoFunctor,
    pub abskl: AbsKL2,
    pub theta: BTheta2,
    pub j: TwoFunctor,
    dual: Pseudomonad,
}

impl Kleisli2 {
    pub fn new(pm: &Pseudomonad, guard: &Guard) -> Result<Kleisli2> {
        let free = free_algebras(pm, guard)?;
        let abskl = abskl2_on(pm, &free)?;
        let theta = build_b_theta_2(&abskl, guard)?;
        let free_functor = free_functor(pm, &free)?;
        let dual = abskl.dual();
        let mut k = Kleisli2 {
            pm: pm.clone(),
            j: free_functor.clone(),
            free,
            free_functor,
            abskl,
            theta,
            dual,
        };
        k.j = k.build_j()?;
        Ok(k)
    }

    fn build_j(&self) -> Result<TwoFunctor> {
        let c = &*self.pm.base;
        let b = &*self.free.cat;
        let s = &self.abskl;
        let mut one = Vec::new();
        for f in 0..c.n_onecells() {
            let (x, y) = (c.src1(f), c.tgt1(f));
            let ff = self.free_functor.one[f];
            let src = b.then1(ff, s.theta[y]);
            let tgt = b.then1(s.theta[x], s.comonad.endo.one[ff]);
            let tf = self.free.expect2(src, tgt, self.pm.t2(self.pm.eta_f(f)), "J thunking")?;
            one.push(
                self.theta
                    .find1(ff, tf)
                    .ok_or_else(|| Error::defect(format!("J({}) is not a thunked 1-cell", c.onecell_id(f))))?,
            );
        }
        let mut two = Vec::new();
        for a in 0..c.n_twocells() {
            two.push(
                self.theta
                    .find2(one[c.src2(a)], one[c.tgt2(a)], self.free_functor.two[a])
                    .ok_or_else(|| Error::defect(format!("J({}) is not thunkable", c.twocell_id(a))))?,
            );
        }
        Ok(TwoFunctor {
            source: self.pm.base.clone(),
            target: self.theta.cat.clone(),
            obj: (0..c.n_objects()).collect(),
            one,
            two,
        })
    }

    pub fn dual(&self) -> &Pseudomonad {
        &self.dual
    }

    /// `J̲(g, ḡ)`: the pseudomorphism `(μ_Y, α_Y)∘(Tg, μ_g)` with the
    /// thunking built from the cone. Every claim along the way is checked.
    pub fn underline_j(&self, x: usize, y: usize, g: usize, gbar: usize) -> Result<usize> {
        let pm = &self.pm;
        let c = &*pm.base;
        let sig = pm.signature();
        let args = [Value::Obj(x), Value::Obj(y), Value::One(g)];
        let p = PseudoMorphism {
            source: x,
            target: y,
            p: c.then1(pm.t1(g), pm.mu(y)),
            pbar: fixture("induced_pseudomorphism").cell(&sig, &args)?,
        };
        let mut r = ValidationReport::new();
        let at = || vec![c.onecell_id(g).to_string(), c.twocell_id(gbar).to_string()];
        if !is_pseudomorphism(pm, &p)? {
            r.push(Violation::new("pseudomorphism", at()));
            return Err(Error::Invalid {
                kind: "lifted cone",
                report: r,
            });
        }
        let pi = self.free.expect1(&p, "lifted cone")?;
        let t = fixture("cone_thunking").cell(&sig, &[Value::Obj(x), Value::Obj(y), Value::One(g), Value::cell(gbar)])?;
        let b = &*self.free.cat;
        let s = &self.abskl;
        let th = |z: usize| self.free.morphisms[s.theta[z]];
        let lhs = compose_pseudo(pm, &p, &th(y));
        let rhs = compose_pseudo(pm, &th(x), &self.free.morphisms[s.comonad.endo.one[pi]]);
        if !is_algebra_2cell(pm, &lhs, &rhs, t)? {
            r.push(Violation::new("algebra_2cell", at()));
            return Err(Error::Invalid {
                kind: "lifted cone",
                report: r,
            });
        }
        let ti = self.free.expect2(
            b.then1(pi, s.theta[y]),
            b.then1(s.theta[x], s.comonad.endo.one[pi]),
            t,
            "cone thunking",
        )?;
        if !s.is_thunking(&self.dual, pi, ti)? {
            r.push(Violation::new("thunking", at()));
            return Err(Error::Invalid {
                kind: "lifted cone",
                report: r,
            });
        }
        self.theta
            .find1(pi, ti)
            .ok_or_else(|| Error::defect("validated thunking missing from the thunked 2-category"))
    }

    /// `J̲` on cone morphisms: `φ ↦ μ_Y∘Tφ`.
    pub fn underline_j_cell(&self, src: usize, tgt: usize, phi: usize) -> Result<usize> {
        let pm = &self.pm;
        let (p, q) = (self.theta.thunked[src].0, self.theta.thunked[tgt].0);
        let y = self.free.morphisms[p].target;
        let under = pm.base.whisk_r(pm.t2(phi), pm.mu(y));
        let chi = self
            .free
            .find2(p, q, under)
            .ok_or_else(|| Error::defect("lifted cone morphism is not a 2-cell of pseudoalgebras"))?;
        self.theta
            .find2(src, tgt, chi)
            .ok_or_else(|| Error::defect("lifted cone morphism is not thunkable"))
    }

    /// The functor `J̲: Cone(X, Y) → (𝓑_T)_θ(X, Y)`.
    pub fn underline_j_functor(&self, cones: &Cones) -> Result<(Functor, crate::twocat::HomView)> {
        let hv = self.theta.cat.hom_view(cones.x, cones.y);
        let mut obj = Vec::new();
        let mut ones = Vec::new();
        for &(g, gbar) in &cones.cones {
            let t = self.underline_j(cones.x, cones.y, g, gbar)?;
            ones.push(t);
            obj.push(hv.object_of(t).expect("hom view covers the hom"));
        }
        let mut mor = Vec::new();
        for (m, &phi) in cones.cells.iter().enumerate() {
            let (s, t) = (cones.cat.src(m), cones.cat.tgt(m));
            let a = self.underline_j_cell(ones[s], ones[t], phi)?;
            mor.push(hv.morphism_of(a).expect("hom view covers the hom"));
        }
        let f = Functor {
            source: cones.cat.clone(),
            target: hv.cat.clone(),
            obj,
            mor,
        };
        Ok((f, hv))
    }

    /// The cone `(p∘η_X, …)` of a thunked pseudomorphism.
    pub fn cone_from_thunked(&self, t: usize) -> Result<(usize, usize)> {
        let pm = &self.pm;
        let c = &*pm.base;
        let (pi, ti) = self.theta.thunked[t];
        let p = self.free.morphisms[pi];
        let tp = self.free.cells[ti];
        let (x, y) = (p.source, p.target);
        let g = c.then1(pm.eta(x), p.p);
        let gbar = fixture("thunked_cone").cell(
            &pm.signature(),
            &[Value::Obj(x), Value::Obj(y), Value::One(p.p), Value::cell(tp)],
        )?;
        if !is_cone(pm, x, y, g, gbar)? {
            let mut r = ValidationReport::new();
            r.push(Violation::new("cone", vec![self.theta.cat.onecell_id(t).to_string()]));
            return Err(Error::Invalid {
                kind: "cone of a thunked pseudomorphism",
                report: r,
            });
        }
        Ok((g, gbar))
    }

    /// `J̲` is an equivalence on `Cone(X, Y)`, and every thunked
    /// pseudomorphism is isomorphic to the image of its own cone through a
    /// thunkable invertible 2-cell.
    pub fn check_equivalence_j_underline(&self, x: usize, y: usize, guard: &Guard) -> Result<bool> {
        let cones = cone_category(&self.pm, x, y, guard)?;
        let (f, _) = self.underline_j_functor(&cones)?;
        let eq = f.is_equivalence();
        let pm = &self.pm;
        let b = &*self.theta.cat;
        let mut witnesses = true;
        for &t in b.hom1(x, y) {
            let (g, gbar) = self.cone_from_thunked(t)?;
            let t2 = self.underline_j(x, y, g, gbar)?;
            let p = self.free.morphisms[self.theta.thunked[t].0];
            let w = fixture("reconstruction_witness").cell(
                &pm.signature(),
                &[Value::Obj(x), Value::Obj(y), Value::One(p.p), Value::cell(p.pbar)],
            )?;
            let ok = self
                .free
                .find2(self.theta.thunked[t].0, self.theta.thunked[t2].0, w)
                .and_then(|chi| self.theta.find2(t, t2, chi))
                .is_some_and(|a| b.is_invertible(a));
            witnesses &= ok;
        }
        Ok(eq && witnesses)
    }

    /// `ρ_Y∘Tg: J(g) ⇒ J̲(η_Y∘g, η_{η_Y}∘g)` is a thunkable invertible
    /// 2-cell for every `g`, natural in `g`.
    pub fn check_rho_iso(&self, x: usize, y: usize) -> Result<bool> {
        let pm = &self.pm;
        let c = &*pm.base;
        let b = &*self.theta.cat;
        let sig = pm.signature();
        let mut comps = FxHashMap::default();
        let mut cans = FxHashMap::default();
        for &g in c.hom1(x, y) {
            let (cg, cbar) = canonical_cone(pm, x, y, g)?;
            let jg = self.j.one[g];
            let ug = self.underline_j(x, y, cg, cbar)?;
            let w = fixture("unit_comparison").cell(&sig, &[Value::Obj(x), Value::Obj(y), Value::One(g)])?;
            let Some(a) = self
                .free
                .find2(self.theta.thunked[jg].0, self.theta.thunked[ug].0, w)
                .and_then(|chi| self.theta.find2(jg, ug, chi))
            else {
                return Ok(false);
            };
            if !b.is_invertible(a) {
                return Ok(false);
            }
            comps.insert(g, a);
            cans.insert(g, ug);
        }
        for &g in c.hom1(x, y) {
            for &h in c.hom1(x, y) {
                for &phi in c.hom2(g, h) {
                    let cphi = c.whisk_r(phi, pm.eta(y));
                    let uphi = self.underline_j_cell(cans[&g], cans[&h], cphi)?;
                    if b.then2(self.j.two[phi], comps[&h]) != b.then2(comps[&g], uphi) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// The hom-functor `J: 𝓑(X, Y) → (𝓑_T)_θ(X, Y)`.
    pub fn j_hom(&self, x: usize, y: usize) -> Functor {
        let src = self.pm.base.hom_view(x, y);
        let tgt = self.theta.cat.hom_view(x, y);
        Functor {
            source: src.cat.clone(),
            target: tgt.cat.clone(),
            obj: src.ones.iter().map(|&f| tgt.object_of(self.j.one[f]).expect("J preserves homs")).collect(),
            mor: src.cells.iter().map(|&a| tgt.morphism_of(self.j.two[a]).expect("J preserves homs")).collect(),
        }
    }
}

/// `J: 𝓑 → (𝓑_T)_θ`.
#[allow(non_snake_case)]
pub fn J2(pm: &Pseudomonad, guard: &Guard) -> Result<TwoFunctor> {
    Ok(Kleisli2::new(pm, guard)?.j)
}

pub fn is_cone(pm: &Pseudomonad, x: usize, y: usize, g: usize, gbar: usize) -> Result<bool> {
    let c = &*pm.base;
    let ty = pm.t(y);
    if c.src1(g) != x || c.tgt1(g) != ty {
        return Ok(false);
    }
    if c.src2(gbar) != c.then1(g, pm.eta(ty)) || c.tgt2(gbar) != c.then1(g, pm.t1(pm.eta(y))) || !c.is_invertible(gbar) {
        return Ok(false);
    }
    let sig = pm.signature();
    let args = [Value::Obj(x), Value::Obj(y), Value::One(g), Value::cell(gbar)];
    Ok(fixture("cone_unit").holds(&sig, &args)? && fixture("cone_cocycle").holds(&sig, &args)?)
}

/// The category of descent cones from `x` to `y`.
#[derive(Clone, Debug)]
pub struct Cones {
    pub x: usize,
    pub y: usize,
    pub cat: Arc<FinCategory>,
    /// `(g, ḡ)` behind each object.
    pub cones: Vec<(usize, usize)>,
    /// 2-cell behind each morphism.
    pub cells: Vec<usize>,
    obj_of: FxHashMap<(usize, usize), usize>,
    mor_of: FxHashMap<(usize, usize, usize), usize>,
}

impl Cones {
    pub fn object_of(&self, g: usize, gbar: usize) -> Option<usize> {
        self.obj_of.get(&(g, gbar)).copied()
    }

    pub fn morphism_of(&self, src: usize, tgt: usize, phi: usize) -> Option<usize> {
        self.mor_of.get(&(src, tgt, phi)).copied()
    }
}

pub fn cone_category(pm: &Pseudomonad, x: usize, y: usize, guard: &Guard) -> Result<Cones> {
    let c = &*pm.base;
    let ty = pm.t(y);
    let candidates: Vec<(usize, usize, usize)> = c
        .hom1(x, ty)
        .iter()
        .map(|&g| (g, c.then1(g, pm.eta(ty)), c.then1(g, pm.t1(pm.eta(y)))))
        .collect();
    guard.check(
        "descent cones",
        candidates.iter().map(|&(_, s, t)| c.hom2(s, t).len() as u128).sum(),
    )?;
    let mut cones = Vec::new();
    for &(g, s, t) in &candidates {
        for gbar in c.isos(s, t) {
            if is_cone(pm, x, y, g, gbar)? {
                cones.push((g, gbar));
            }
        }
    }
    let sig = pm.signature();
    let name = |(g, gbar): (usize, usize)| format!("({},{})", c.onecell_id(g), c.twocell_id(gbar));
    let mut mors = Vec::new();
    let mut cells = Vec::new();
    for (i, &(g, gbar)) in cones.iter().enumerate() {
        for (j, &(h, hbar)) in cones.iter().enumerate() {
            for &phi in c.hom2(g, h) {
                let args = [
                    Value::Obj(x),
                    Value::Obj(y),
                    Value::One(g),
                    Value::cell(gbar),
                    Value::One(h),
                    Value::cell(hbar),
                    Value::cell(phi),
                ];
                if fixture("cone_morphism").holds(&sig, &args)? {
                    mors.push((format!("{}:{}=>{}", c.twocell_id(phi), name((g, gbar)), name((h, hbar))), i, j));
                    cells.push(phi);
                }
            }
        }
    }
    let index: FxHashMap<(usize, usize, usize), usize> =
        mors.iter().zip(&cells).enumerate().map(|(k, ((_, i, j), &a))| ((*i, *j, a), k)).collect();
    let missing = std::cell::Cell::new(false);
    let look = |k: (usize, usize, usize)| {
        index.get(&k).copied().unwrap_or_else(|| {
            missing.set(true);
            0
        })
    };
    let (cat, obj, mor) = FinCategory::from_parts_indexed(
        cones.iter().map(|&k| name(k)).collect(),
        mors.clone(),
        |i| look((i, i, c.id2(cones[i].0))),
        |a, b| look((mors[a].1, mors[b].2, c.then2(cells[a], cells[b]))),
    )?;
    if missing.get() {
        return Err(Error::defect("cone morphisms are not closed under composition"));
    }
    let mut by_obj = vec![(0, 0); cones.len()];
    for (i, &o) in obj.iter().enumerate() {
        by_obj[o] = cones[i];
    }
    let mut by_mor = vec![0; cells.len()];
    let mut mor_of = FxHashMap::default();
    for (i, &m) in mor.iter().enumerate() {
        by_mor[m] = cells[i];
    }
    let obj_of: FxHashMap<(usize, usize), usize> = by_obj.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    for (i, &m) in mor.iter().enumerate() {
        mor_of.insert((obj[mors[i].1], obj[mors[i].2], cells[i]), m);
    }
    Ok(Cones {
        x,
        y,
        cat: Arc::new(cat),
        cones: by_obj,
        cells: by_mor,
        obj_of,
        mor_of,
    })
}

/// `(η_Y∘g, η_{η_Y}∘g)`.
pub fn canonical_cone(pm: &Pseudomonad, x: usize, y: usize, g: usize) -> Result<(usize, usize)> {
    let c = &*pm.base;
    let gbar = fixture("canonical_cone").cell(&pm.signature(), &[Value::Obj(x), Value::Obj(y), Value::One(g)])?;
    Ok((c.then1(g, pm.eta(y)), gbar))
}

/// The canonical functor `𝓑(X, Y) → Cone(X, Y)`.
pub fn canonical_cone_functor(pm: &Pseudomonad, cones: &Cones) -> Result<Functor> {
    let c = &*pm.base;
    let (x, y) = (cones.x, cones.y);
    let hv = c.hom_view(x, y);
    let mut obj = Vec::new();
    for &g in &hv.ones {
        let (cg, cbar) = canonical_cone(pm, x, y, g)?;
        obj.push(cones.object_of(cg, cbar).ok_or_else(|| {
            Error::defect(format!("canonical cone of {} fails the cone laws", c.onecell_id(g)))
        })?);
    }
    let mut mor = Vec::new();
    for (m, &phi) in hv.cells.iter().enumerate() {
        let (s, t) = (obj[hv.cat.src(m)], obj[hv.cat.tgt(m)]);
        mor.push(
            cones
                .morphism_of(s, t, c.whisk_r(phi, pm.eta(y)))
                .ok_or_else(|| Error::defect("canonical image of a 2-cell is not a cone morphism"))?,
        );
    }
    Ok(Functor {
        source: hv.cat.clone(),
        target: cones.cat.clone(),
        obj,
        mor,
    })
}

/// Every canonical functor into cones is an equivalence.
pub fn check_isobidescent(pm: &Pseudomonad, guard: &Guard) -> Result<bool> {
    let n = pm.base.n_objects();
    for x in 0..n {
        for y in 0..n {
            let cones = cone_category(pm, x, y, guard)?;
            if !canonical_cone_functor(pm, &cones)?.is_equivalence() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The three characterisations of isobidescent, computed independently.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile2 {
    /// Every hom-functor of `J` is an equivalence.
    pub biequivalence: bool,
    pub isobidescent: bool,
    /// `F_T` is faithful on 2-cells, full on thunkable 2-cells and
    /// essentially surjective on 1-cells admitting a thunking.
    pub free_functor: bool,
}

impl Profile2 {
    pub fn as_array(&self) -> [bool; 3] {
        [self.biequivalence, self.isobidescent, self.free_functor]
    }

    pub fn agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&b| b == a[0])
    }
}

pub fn check_bidescent_profile(pm: &Pseudomonad, guard: &Guard) -> Result<Profile2> {
    let k = Kleisli2::new(pm, guard)?;
    let n = pm.base.n_objects();
    let biequivalence = (0..n).all(|x| (0..n).all(|y| k.j_hom(x, y).is_equivalence()));
    let isobidescent = check_isobidescent(pm, guard)?;
    let free_functor = free_functor_condition(&k)?;
    Ok(Profile2 {
        biequivalence,
        isobidescent,
        free_functor,
    })
}

/// Read off `𝓑_T` and the thunking validators alone, without the
/// thunked 2-category.
fn free_functor_condition(k: &Kleisli2) -> Result<bool> {
    let pm = &k.pm;
    let c = &*pm.base;
    let b = &*k.free.cat;
    let s = &k.abskl;
    let dual = k.dual();
    let ff = &k.free_functor;
    let j_thunking = |f: usize| -> Result<usize> {
        let (x, y) = (c.src1(f), c.tgt1(f));
        k.free.expect2(
            b.then1(ff.one[f], s.theta[y]),
            b.then1(s.theta[x], s.comonad.endo.one[ff.one[f]]),
            pm.t2(pm.eta_f(f)),
            "J thunking",
        )
    };
    let n = c.n_objects();
    for x in 0..n {
        for y in 0..n {
            let hom = c.hom1(x, y);
            for &f in hom {
                for &g in hom {
                    let images: Vec<usize> = c.hom2(f, g).iter().map(|&a| pm.t2(a)).collect();
                    let mut dedup = images.clone();
                    dedup.sort_unstable();
                    dedup.dedup();
                    if dedup.len() != images.len() {
                        return Ok(false);
                    }
                    let (tf, tg) = (j_thunking(f)?, j_thunking(g)?);
                    for &chi in b.hom2(ff.one[f], ff.one[g]) {
                        if s.is_thunkable(dual, (ff.one[f], tf), (ff.one[g], tg), chi)? && !images.contains(&k.free.cells[chi]) {
                            return Ok(false);
                        }
                    }
                }
            }
            for &p in b.hom1(x, y) {
                let src = b.then1(p, s.theta[y]);
                let tgt = b.then1(s.theta[x], s.comonad.endo.one[p]);
                for tp in b.isos(src, tgt) {
                    if !s.is_thunking(dual, p, tp)? {
                        continue;
                    }
                    let mut reached = false;
                    'search: for &f in hom {
                        let tf = j_thunking(f)?;
                        for chi in b.isos(ff.one[f], p) {
                            if s.is_thunkable(dual, (ff.one[f], tf), (p, tp), chi)? {
                                reached = true;
                                break 'search;
                            }
                        }
                    }
                    if !reached {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abskl1::{build_b_theta, equaliser_condition, kleisli_abskl};
    use crate::corpus;
    use crate::pseudomonadkit::{identity_pseudomonad, strict_as_pseudo, strict_on_z2, twist};

    fn g() -> Guard {
        Guard::default()
    }

    fn twisted(m: &crate::monadkit::Monad) -> Pseudomonad {
        let pm = strict_on_z2(m);
        let c = &pm.base;
        let w: Vec<usize> = (0..c.n_objects())
            .map(|x| {
                let mu = pm.mu(x);
                if x == 0 {
                    *c.hom2(mu, mu).iter().find(|&&a| !c.is_id2(a)).unwrap()
                } else {
                    c.id2(mu)
                }
            })
            .collect();
        twist(&pm, &w).unwrap()
    }

    fn instances() -> Vec<(String, Pseudomonad)> {
        let mut out = Vec::new();
        for inst in corpus::small_monads(&g()) {
            out.push((format!("{}/discrete", inst.name), strict_as_pseudo(&inst.monad)));
            out.push((format!("{}/z2", inst.name), strict_on_z2(&inst.monad)));
            out.push((format!("{}/twist", inst.name), twisted(&inst.monad)));
        }
        out
    }

    #[test]
    fn structures_of_pseudomonads_validate() {
        for (name, pm) in instances() {
            let (s, _) = abskl2_of_pseudomonad(&pm, &g()).unwrap();
            let r = s.validate();
            assert!(r.is_valid(), "{name}: {r}");
        }
    }

    #[test]
    fn identity_structure_is_trivial() {
        let base = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let pm = identity_pseudomonad(&base);
        let (s, bt) = abskl2_of_pseudomonad(&pm, &g()).unwrap();
        for x in 0..base.n_objects() {
            assert_eq!(bt.morphisms[s.theta[x]].p, base.id1(x));
            assert!(s.base.is_id2(s.u.comp[x]));
            assert!(s.base.is_id2(s.m.comp[x]));
        }
        let k = Kleisli2::new(&pm, &g()).unwrap();
        let n = base.n_objects();
        assert!((0..n).all(|x| (0..n).all(|y| k.j_hom(x, y).is_isomorphism())));
    }

    #[test]
    fn thunked_cells_match_one_dimensional_thunkables() {
        for inst in corpus::small_monads(&g()) {
            let k = Kleisli2::new(&strict_as_pseudo(&inst.monad), &g()).unwrap();
            let (s1, _) = kleisli_abskl(&inst.monad);
            let bt1 = build_b_theta(&s1);
            assert_eq!(k.theta.cat.n_onecells(), bt1.category.n_morphisms(), "{}", inst.name);
        }
    }

    #[test]
    fn theta_adjunction_induces_the_comonad() {
        for (name, pm) in instances() {
            let k = Kleisli2::new(&pm, &g()).unwrap();
            let q = theta_induced_comonad(&k.abskl, &k.theta).unwrap();
            assert_eq!(q, k.abskl.comonad, "{name}");
        }
    }

    #[test]
    fn twisting_keeps_counts() {
        for inst in corpus::small_monads(&g()) {
            let a = Kleisli2::new(&strict_on_z2(&inst.monad), &g()).unwrap();
            let b = Kleisli2::new(&twisted(&inst.monad), &g()).unwrap();
            assert_eq!(a.theta.cat.n_onecells(), b.theta.cat.n_onecells(), "{}", inst.name);
            assert_eq!(a.theta.cat.n_twocells(), b.theta.cat.n_twocells(), "{}", inst.name);
            let n = a.pm.base.n_objects();
            for x in 0..n {
                for y in 0..n {
                    let ca = cone_category(&a.pm, x, y, &g()).unwrap();
                    let cb = cone_category(&b.pm, x, y, &g()).unwrap();
                    assert_eq!(ca.cat.n_objects(), cb.cat.n_objects(), "{}", inst.name);
                    assert_eq!(ca.cat.n_morphisms(), cb.cat.n_morphisms(), "{}", inst.name);
                }
            }
        }
    }

    #[test]
    fn identity_pseudomonad_cones_are_homs() {
        let base = Arc::new(corpus::z2(&corpus::span_to_terminal()));
        let pm = identity_pseudomonad(&base);
        for x in 0..base.n_objects() {
            for y in 0..base.n_objects() {
                let cones = cone_category(&pm, x, y, &g()).unwrap();
                let f = canonical_cone_functor(&pm, &cones).unwrap();
                assert!(f.is_equivalence());
            }
        }
        assert!(check_isobidescent(&pm, &g()).unwrap());
    }

    #[test]
    fn strict_canonical_cones_have_identity_cells() {
        for inst in corpus::small_monads(&g()) {
            let pm = strict_as_pseudo(&inst.monad);
            let n = pm.base.n_objects();
            for x in 0..n {
                for y in 0..n {
                    for &f in pm.base.hom1(x, y) {
                        let (_, gbar) = canonical_cone(&pm, x, y, f).unwrap();
                        assert!(pm.base.is_id2(gbar));
                    }
                }
            }
        }
    }

    #[test]
    fn isobidescent_matches_one_dimensional_equaliser() {
        for inst in corpus::small_monads(&g()) {
            let pm = strict_as_pseudo(&inst.monad);
            let one_d = equaliser_condition(&inst.monad, &g()).unwrap();
            assert_eq!(check_isobidescent(&pm, &g()).unwrap(), one_d, "{}", inst.name);
        }
        let pm = strict_as_pseudo(&corpus::const_terminal_monad());
        assert!(!check_isobidescent(&pm, &g()).unwrap());
    }

    #[test]
    fn profiles_agree() {
        for (name, pm) in instances() {
            let p = check_bidescent_profile(&pm, &g()).unwrap();
            assert!(p.agree(), "{name}: {p:?}");
        }
    }

    #[test]
    fn lifted_cones_and_reconstruction() {
        for (name, pm) in instances() {
            let k = Kleisli2::new(&pm, &g()).unwrap();
            let n = pm.base.n_objects();
            for x in 0..n {
                for y in 0..n {
                    assert!(k.check_equivalence_j_underline(x, y, &g()).unwrap(), "{name}");
                    assert!(k.check_rho_iso(x, y).unwrap(), "{name}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pm = twisted(&corpus::chain2_top_closure());
        let (s, _) = abskl2_of_pseudomonad(&pm, &g()).unwrap();
        let text = serde_json::to_string(&s.to_data()).unwrap();
        let back = AbsKL2::from_data(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
