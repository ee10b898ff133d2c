//! Morphisms, tight 2-cells and tight 3-cells between pseudomonads in their
//! Kleisli-extension form, the lifting of such data along `J`, and an
//! exhaustive check that precomposition with `(J, 1)` is bijective.
//!
//! The target is always the pseudomonad of a structure `(𝓑, T, π)`: its
//! base is `𝓑_π` and its free 2-category is `𝓑` itself, with `F_π` the
//! forgetful 2-functor.

use serde::{Deserialize, Serialize};

use crate::abskl2::{build_b_theta_2, AbsKL2, AbsKL2Data, BTheta2, Kleisli2};
use crate::error::{Error, Result};
use crate::guard::Guard;
use crate::pexpr::{fixture, Signature, Value};
use crate::pseudomonadkit::{Pseudomonad, PseudomonadData};
use crate::report::{ValidationReport, Violation};
use crate::twocat::{
    check_modification, check_pseudonatural, search_2functors, Candidates, Fin2Category, Modification, PseudoNat,
    TwoFunctor, TwoFunctorData,
};

/// `(G, Ḡ)` with `Ḡ∘F = F_π∘G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KLExtMorphism {
    pub g: TwoFunctor,
    pub gbar: TwoFunctor,
}

/// A loose 2-cell has no `phi`; a tight one satisfies `F_π∘φ = φ̄∘F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KLExt2Cell {
    pub phi: Option<PseudoNat>,
    pub phibar: PseudoNat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KLExt3Cell {
    pub omega: Option<Modification>,
    pub omegabar: Modification,
}

/// The target side of a Kleisli extension: a structure and its thunked
/// 2-category.
#[derive(Clone, Debug)]
pub struct Target {
    pub structure: AbsKL2,
    pub theta: BTheta2,
}

impl Target {
    pub fn new(structure: AbsKL2, guard: &Guard) -> Result<Target> {
        let theta = build_b_theta_2(&structure, guard)?;
        Ok(Target { structure, theta })
    }
}

/// Whether `(g, gbar)` is a morphism out of a pseudomonad with free
/// 2-functor `free` into `target`.
pub fn is_morphism(free: &TwoFunctor, target: &Target, m: &KLExtMorphism) -> bool {
    m.g.validate().is_valid()
        && m.gbar.validate().is_valid()
        && free.then(&m.gbar) == m.g.then(&target.theta.forget)
}

pub fn is_tight(free: &TwoFunctor, target: &Target, c: &KLExt2Cell) -> bool {
    let Some(phi) = &c.phi else {
        return false;
    };
    check_pseudonatural(phi).is_valid()
        && check_pseudonatural(&c.phibar).is_valid()
        && phi.post(&target.theta.forget) == c.phibar.pre(free)
}

/// `Ω∘H` for a 2-functor `H` into the source of `Ω`.
pub fn modification_pre(m: &Modification, h: &TwoFunctor) -> Modification {
    Modification {
        source: m.source.pre(h),
        target: m.target.pre(h),
        comp: h.obj.iter().map(|&x| m.comp[x]).collect(),
        inv: m.inv.as_ref().map(|v| h.obj.iter().map(|&x| v[x]).collect()),
    }
}

fn invalid(kind: &'static str, law: &str, at: Vec<String>) -> Error {
    let mut r = ValidationReport::new();
    r.push(Violation::new(law, at));
    Error::Invalid { kind, report: r }
}

/// The thunking of `Ḡ(p, p̄)` built from the data of `t`.
pub fn lifted_thunking(k: &Kleisli2, target: &Target, m: &KLExtMorphism, t: usize) -> Result<usize> {
    let s = &target.structure;
    let b = &*s.base;
    let src = &k.abskl;
    let gb = &m.gbar;
    let (pi, tp) = k.theta.thunked[t];
    let (x, y) = (k.free.morphisms[pi].source, k.free.morphisms[pi].target);
    let p = k.free.morphisms[pi].p;
    let (sx, sy) = (k.pm.t(x), k.pm.t(y));
    let thunk_of = |f: usize| target.theta.thunked[m.g.one[f]].1;
    let sig = Signature::new(b).functor("T", &s.comonad.endo);
    let one = |f: usize| Value::One(f);
    let two = |a: usize| Value::cell(a);
    let args = [
        one(s.theta[gb.obj[x]]),
        one(s.theta[gb.obj[y]]),
        one(s.theta[gb.obj[sx]]),
        one(s.theta[gb.obj[sy]]),
        one(gb.one[pi]),
        one(gb.one[src.theta[x]]),
        one(gb.one[src.theta[y]]),
        one(gb.one[src.comonad.eps(x)]),
        one(gb.one[src.comonad.eps(y)]),
        two(gb.two[src.u.comp[x]]),
        two(gb.two[src.u.comp[y]]),
        two(gb.two[tp]),
        two(gb.two[src.comonad.eps.cell[pi]]),
        two(thunk_of(p)),
        two(thunk_of(k.pm.eta(x))),
        two(thunk_of(k.pm.eta(y))),
    ];
    fixture("lifted_thunking").cell(&sig, &args)
}

/// The unique `G'` with `G'∘J = G` and `F_π∘G' = Ḡ∘F_θ`.
pub fn lift_morphism(k: &Kleisli2, target: &Target, m: &KLExtMorphism) -> Result<TwoFunctor> {
    let s = &target.structure;
    let dual = s.dual();
    let b = &*s.base;
    let bth = &target.theta;
    let src = &*k.theta.cat;
    let mut one = Vec::new();
    for t in 0..src.n_onecells() {
        let f = m.gbar.one[k.theta.thunked[t].0];
        let th = lifted_thunking(k, target, m, t)?;
        let at = || vec![src.onecell_id(t).to_string()];
        let (x, y) = (b.src1(f), b.tgt1(f));
        if b.src2(th) != b.then1(f, s.theta[y]) || b.tgt2(th) != b.then1(s.theta[x], s.comonad.endo.one[f]) {
            return Err(invalid("lifted morphism", "boundary", at()));
        }
        if !s.is_thunking(&dual, f, th)? {
            return Err(invalid("lifted morphism", "thunking", at()));
        }
        one.push(bth.find1(f, th).ok_or_else(|| Error::defect("validated thunking missing from the thunked 2-category"))?);
    }
    let mut two = Vec::new();
    for a in 0..src.n_twocells() {
        let under = m.gbar.two[k.theta.cells[a]];
        two.push(
            bth.find2(one[src.src2(a)], one[src.tgt2(a)], under)
                .ok_or_else(|| invalid("lifted morphism", "thunkable", vec![src.twocell_id(a).to_string()]))?,
        );
    }
    let g = TwoFunctor {
        source: k.theta.cat.clone(),
        target: bth.cat.clone(),
        obj: m.gbar.obj.clone(),
        one,
        two,
    };
    let r = g.validate();
    if !r.is_valid() {
        return Err(Error::Invalid {
            kind: "lifted morphism",
            report: r,
        });
    }
    if k.j.then(&g) != m.g || g.then(&bth.forget) != k.theta.forget.then(&m.gbar) {
        return Err(Error::defect("lifted morphism does not restrict along J"));
    }
    Ok(g)
}

/// `φ'` with components `φ_X` and cells `φ̄_{F_θ t}`.
pub fn lift_2cell(k: &Kleisli2, target: &Target, gl: &TwoFunctor, hl: &TwoFunctor, c: &KLExt2Cell) -> Result<PseudoNat> {
    let phi = c.phi.as_ref().ok_or_else(|| Error::structure("only tight 2-cells lift"))?;
    let bth = &target.theta;
    let d = &*bth.cat;
    let src = &*k.theta.cat;
    let mut cell = Vec::new();
    let mut inv = Vec::new();
    for t in 0..src.n_onecells() {
        let (x, y) = (src.src1(t), src.tgt1(t));
        let f = k.theta.thunked[t].0;
        let s = d.then1(gl.one[t], phi.comp[y]);
        let u = d.then1(phi.comp[x], hl.one[t]);
        let at = || vec![src.onecell_id(t).to_string()];
        cell.push(bth.find2(s, u, c.phibar.cell[f]).ok_or_else(|| invalid("lifted 2-cell", "thunkable", at()))?);
        inv.push(bth.find2(u, s, c.phibar.inv[f]).ok_or_else(|| invalid("lifted 2-cell", "thunkable", at()))?);
    }
    let out = PseudoNat {
        source: gl.clone(),
        target: hl.clone(),
        comp: phi.comp.clone(),
        cell,
        inv,
    };
    let r = check_pseudonatural(&out);
    if !r.is_valid() {
        return Err(Error::Invalid {
            kind: "lifted 2-cell",
            report: r,
        });
    }
    Ok(out)
}

/// `Ω'` with components `Ω_X`.
pub fn lift_3cell(phil: &PseudoNat, psil: &PseudoNat, o: &KLExt3Cell) -> Result<Modification> {
    let omega = o.omega.as_ref().ok_or_else(|| Error::structure("only tight 3-cells lift"))?;
    let out = Modification {
        source: phil.clone(),
        target: psil.clone(),
        comp: omega.comp.clone(),
        inv: omega.inv.clone(),
    };
    let r = check_modification(&out);
    if !r.is_valid() {
        return Err(Error::Invalid {
            kind: "lifted 3-cell",
            report: r,
        });
    }
    Ok(out)
}

/// Every pseudonatural transformation `f ⇒ g`, by backtracking over
/// components and invertible cells.
pub fn enumerate_pseudonats(f: &TwoFunctor, g: &TwoFunctor, guard: &Guard) -> Result<Vec<PseudoNat>> {
    let c = &*f.source;
    let d = &*f.target;
    let comps: Vec<&[usize]> = (0..c.n_objects()).map(|x| d.hom1(f.obj[x], g.obj[x])).collect();
    guard.check("pseudonatural components", Guard::space(comps.iter().map(|v| v.len())))?;
    let mut out = Vec::new();
    let mut nodes = 0u128;
    let mut comp = Vec::new();
    enumerate_comps(f, g, &comps, &mut comp, &mut out, &mut nodes, guard)?;
    Ok(out)
}

fn enumerate_comps(
    f: &TwoFunctor,
    g: &TwoFunctor,
    comps: &[&[usize]],
    comp: &mut Vec<usize>,
    out: &mut Vec<PseudoNat>,
    nodes: &mut u128,
    guard: &Guard,
) -> Result<()> {
    if comp.len() == comps.len() {
        let mut cells = Vec::new();
        return enumerate_cells(f, g, comp, &mut cells, out, nodes, guard);
    }
    for &s in comps[comp.len()] {
        comp.push(s);
        enumerate_comps(f, g, comps, comp, out, nodes, guard)?;
        comp.pop();
    }
    Ok(())
}

fn enumerate_cells(
    f: &TwoFunctor,
    g: &TwoFunctor,
    comp: &[usize],
    cells: &mut Vec<usize>,
    out: &mut Vec<PseudoNat>,
    nodes: &mut u128,
    guard: &Guard,
) -> Result<()> {
    let c = &*f.source;
    let d = &*f.target;
    let h = cells.len();
    if h == c.n_onecells() {
        let p = PseudoNat {
            source: f.clone(),
            target: g.clone(),
            comp: comp.to_vec(),
            cell: cells.clone(),
            inv: cells.iter().map(|&a| d.inv(a).expect("cells are chosen invertible")).collect(),
        };
        if check_pseudonatural(&p).is_valid() {
            out.push(p);
        }
        return Ok(());
    }
    let (x, y) = (c.src1(h), c.tgt1(h));
    let s = d.then1(f.one[h], comp[y]);
    let t = d.then1(comp[x], g.one[h]);
    let options: Vec<usize> = if c.id1(x) == h {
        if s == t {
            vec![d.id2(s)]
        } else {
            vec![]
        }
    } else {
        d.isos(s, t).collect()
    };
    for a in options {
        *nodes += 1;
        guard.check("pseudonatural transformation search", *nodes)?;
        cells.push(a);
        if consistent(f, g, comp, cells) {
            enumerate_cells(f, g, comp, cells, out, nodes, guard)?;
        }
        cells.pop();
    }
    Ok(())
}

/// Composition and naturality equations whose 1-cells are all assigned.
fn consistent(f: &TwoFunctor, g: &TwoFunctor, comp: &[usize], cells: &[usize]) -> bool {
    let c = &*f.source;
    let d = &*f.target;
    let n = cells.len();
    let h = n - 1;
    for k in 0..n {
        for (a, b) in [(h, k), (k, h)] {
            if let Some(ab) = c.try_then1(a, b) {
                if ab < n {
                    let rhs = d.then2(d.whisk_l(f.one[a], cells[b]), d.whisk_r(cells[a], g.one[b]));
                    if cells[ab] != rhs {
                        return false;
                    }
                }
            }
        }
        for (u, v) in [(h, k), (k, h)] {
            for &a in c.hom2(u, v) {
                let (x, y) = (c.src1(u), c.tgt1(u));
                let lhs = d.then2(d.whisk_r(f.two[a], comp[y]), cells[v]);
                let rhs = d.then2(cells[u], d.whisk_l(comp[x], g.two[a]));
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Every `φ: gl ⇒ hl` into `𝓑_π` lying over `under` along `F_π`.
pub fn lifts_of_pseudonat(target: &Target, gl: &TwoFunctor, hl: &TwoFunctor, under: &PseudoNat) -> Vec<PseudoNat> {
    let bth = &target.theta;
    let d = &*bth.cat;
    let c = &*gl.source;
    let options: Vec<Vec<usize>> = (0..c.n_objects())
        .map(|x| {
            d.hom1(gl.obj[x], hl.obj[x])
                .iter()
                .copied()
                .filter(|&t| bth.thunked[t].0 == under.comp[x])
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; options.len()];
    if options.iter().any(|o| o.is_empty()) {
        return out;
    }
    loop {
        let comp: Vec<usize> = idx.iter().enumerate().map(|(x, &i)| options[x][i]).collect();
        let mut cell = Vec::new();
        let mut inv = Vec::new();
        let mut ok = true;
        for h in 0..c.n_onecells() {
            let (x, y) = (c.src1(h), c.tgt1(h));
            let s = d.then1(gl.one[h], comp[y]);
            let t = d.then1(comp[x], hl.one[h]);
            match (bth.find2(s, t, under.cell[h]), bth.find2(t, s, under.inv[h])) {
                (Some(a), Some(b)) => {
                    cell.push(a);
                    inv.push(b);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let p = PseudoNat {
                source: gl.clone(),
                target: hl.clone(),
                comp,
                cell,
                inv,
            };
            if check_pseudonatural(&p).is_valid() {
                out.push(p);
            }
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return out;
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Every modification `s ⇛ t`.
pub fn enumerate_modifications(s: &PseudoNat, t: &PseudoNat, guard: &Guard) -> Result<Vec<Modification>> {
    let d = &**s.target_cat();
    let options: Vec<&[usize]> = s.comp.iter().zip(&t.comp).map(|(&a, &b)| d.hom2(a, b)).collect();
    guard.check("modification components", Guard::space(options.iter().map(|o| o.len())))?;
    let mut out = Vec::new();
    if options.iter().any(|o| o.is_empty()) {
        return Ok(out);
    }
    let mut idx = vec![0usize; options.len()];
    loop {
        let m = Modification {
            source: s.clone(),
            target: t.clone(),
            comp: idx.iter().enumerate().map(|(x, &i)| options[x][i]).collect(),
            inv: None,
        };
        if check_modification(&m).is_valid() {
            out.push(m);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < options[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// The modification `phi ⇛ psi` into `𝓑_π` over `under`, if one exists.
fn lift_modification(target: &Target, phi: &PseudoNat, psi: &PseudoNat, under: &Modification) -> Option<Modification> {
    let comp: Option<Vec<usize>> = (0..phi.comp.len())
        .map(|x| target.theta.find2(phi.comp[x], psi.comp[x], under.comp[x]))
        .collect();
    let m = Modification {
        source: phi.clone(),
        target: psi.clone(),
        comp: comp?,
        inv: None,
    };
    check_modification(&m).is_valid().then_some(m)
}

/// Every 2-functor `source → 𝓑_π` lying over `over` along `F_π`.
fn functors_over(source: &std::sync::Arc<Fin2Category>, target: &Target, over: &TwoFunctor, guard: &Guard) -> Result<Vec<TwoFunctor>> {
    let bth = &target.theta;
    let d = &*bth.cat;
    let c = &**source;
    let cands = Candidates {
        obj: Box::new(|x| vec![over.obj[x]]),
        one: Box::new(|obj, f| {
            d.hom1(obj[c.src1(f)], obj[c.tgt1(f)])
                .iter()
                .copied()
                .filter(|&t| bth.thunked[t].0 == over.one[f])
                .collect()
        }),
        two: Box::new(|_, one, a| {
            d.hom2(one[c.src2(a)], one[c.tgt2(a)])
                .iter()
                .copied()
                .filter(|&b| bth.cells[b] == over.two[a])
                .collect()
        }),
    };
    search_2functors(source, &bth.cat, &cands, guard)
}

/// Sizes of the hom-data compared by [`verify_gray_unit`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrayUnitReport {
    pub morphisms: usize,
    pub tight_2cells: usize,
    pub tight_3cells: usize,
    pub failures: Vec<String>,
}

impl GrayUnitReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Precomposition with `(J, 1)` from the hom out of `((𝒜_S)_θ, S')` to
/// the hom out of `(𝒜, S)`, both into the pseudomonad of `target`, is
/// bijective on morphisms, tight 2-cells and tight 3-cells, with
/// `lift_*` as inverse. Loose 2- and 3-cells are the same data on both
/// sides and are not enumerated.
pub fn verify_gray_unit_report(pm: &Pseudomonad, target: &AbsKL2, guard: &Guard) -> Result<GrayUnitReport> {
    let k = Kleisli2::new(pm, guard)?;
    let tgt = Target::new(target.clone(), guard)?;
    let mut rep = GrayUnitReport::default();
    if k.j.then(&k.theta.forget) != k.free_functor {
        rep.failures.push("F_θ∘J differs from F_S".into());
        return Ok(rep);
    }
    let fs = &k.free_functor;
    let fth = &k.theta.forget;
    let gbars = search_2functors(&k.free.cat, &tgt.structure.base, &Candidates::all(&k.free.cat, &tgt.structure.base), guard)?;
    // (Ḡ index, G'', G)
    let mut morphisms: Vec<(usize, TwoFunctor, TwoFunctor)> = Vec::new();
    for (gi, gbar) in gbars.iter().enumerate() {
        let lower = functors_over(&k.pm.base, &tgt, &fs.then(gbar), guard)?;
        let upper = functors_over(&k.theta.cat, &tgt, &fth.then(gbar), guard)?;
        let images: Vec<TwoFunctor> = upper.iter().map(|u| k.j.then(u)).collect();
        for (i, a) in images.iter().enumerate() {
            if images[..i].contains(a) {
                rep.failures.push(format!("precomposition identifies two morphisms over Ḡ#{gi}"));
            }
        }
        for g in &lower {
            let m = KLExtMorphism {
                g: g.clone(),
                gbar: gbar.clone(),
            };
            match lift_morphism(&k, &tgt, &m) {
                Ok(up) => {
                    if !upper.contains(&up) {
                        rep.failures.push(format!("lift of a morphism over Ḡ#{gi} is not enumerated"));
                    }
                }
                Err(e) => rep.failures.push(format!("lift over Ḡ#{gi}: {e}")),
            }
            if !images.contains(g) {
                rep.failures.push(format!("morphism over Ḡ#{gi} has no preimage"));
            }
        }
        if images.iter().any(|g| !lower.contains(g)) {
            rep.failures.push(format!("precomposition leaves the morphisms over Ḡ#{gi}"));
        }
        rep.morphisms += lower.len();
        for (u, g) in upper.into_iter().zip(images) {
            morphisms.push((gi, u, g));
        }
    }
    for (gi, gu, gl) in &morphisms {
        for (hi, hu, hl) in &morphisms {
            let (gbar, hbar) = (&gbars[*gi], &gbars[*hi]);
            // (φ̄, φ', φ'∘J) for every tight 2-cell between the pair
            let mut tight: Vec<(PseudoNat, PseudoNat, PseudoNat)> = Vec::new();
            for phibar in enumerate_pseudonats(gbar, hbar, guard)? {
                let lower = lifts_of_pseudonat(&tgt, gl, hl, &phibar.pre(fs));
                let upper = lifts_of_pseudonat(&tgt, gu, hu, &phibar.pre(fth));
                let images: Vec<PseudoNat> = upper.iter().map(|p| p.pre(&k.j)).collect();
                let bijective = images.len() == lower.len() && lower.iter().all(|p| images.contains(p));
                if !bijective {
                    rep.failures.push(format!("tight 2-cells Ḡ#{gi} ⇒ Ḡ#{hi} are not in bijection"));
                    continue;
                }
                for phi in &lower {
                    let cell = KLExt2Cell {
                        phi: Some(phi.clone()),
                        phibar: phibar.clone(),
                    };
                    if !is_tight(fs, &tgt, &cell) {
                        rep.failures.push("enumerated tight 2-cell fails tightness".into());
                    }
                    match lift_2cell(&k, &tgt, gu, hu, &cell) {
                        Ok(up) if upper.contains(&up) && up.pre(&k.j) == *phi => {
                            tight.push((phibar.clone(), up, phi.clone()));
                        }
                        Ok(_) => rep.failures.push(format!("lift of a tight 2-cell Ḡ#{gi} ⇒ Ḡ#{hi} is not its preimage")),
                        Err(e) => rep.failures.push(format!("lift of a tight 2-cell: {e}")),
                    }
                }
                rep.tight_2cells += lower.len();
            }
            check_3cells(&k, &tgt, &tight, guard, &mut rep)?;
        }
    }
    Ok(rep)
}

fn check_3cells(
    k: &Kleisli2,
    tgt: &Target,
    tight: &[(PseudoNat, PseudoNat, PseudoNat)],
    guard: &Guard,
    rep: &mut GrayUnitReport,
) -> Result<()> {
    for (sbar, su, sl) in tight {
        for (tbar, tu, tl) in tight {
            for obar in enumerate_modifications(sbar, tbar, guard)? {
                let down = lift_modification(tgt, sl, tl, &obar);
                let up = lift_modification(tgt, su, tu, &obar);
                match (&down, &up) {
                    (Some(d), Some(u)) => {
                        let cell = KLExt3Cell {
                            omega: Some(d.clone()),
                            omegabar: obar.clone(),
                        };
                        match lift_3cell(su, tu, &cell) {
                            Ok(l) if l == *u && modification_pre(&l, &k.j) == *d => {}
                            _ => rep.failures.push("lift of a tight 3-cell is not its preimage".into()),
                        }
                        rep.tight_3cells += 1;
                    }
                    (None, None) => {}
                    _ => rep.failures.push("tight 3-cells are not in bijection".into()),
                }
            }
        }
    }
    Ok(())
}

pub fn verify_gray_unit(pm: &Pseudomonad, target: &AbsKL2, guard: &Guard) -> Result<bool> {
    Ok(verify_gray_unit_report(pm, target, guard)?.holds())
}

/// Serialized input of a lift: the source pseudomonad, the target
/// structure, and `(G, Ḡ)` by ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftInput {
    pub source: PseudomonadData,
    pub target: AbsKL2Data,
    pub g: TwoFunctorData,
    pub gbar: TwoFunctorData,
}

/// Read a lift input and return the lifted 2-functor.
pub fn lift_from_data(d: &LiftInput, guard: &Guard) -> Result<(Kleisli2, Target, TwoFunctor)> {
    let pm = Pseudomonad::from_data(&d.source)?;
    let s = AbsKL2::from_data(&d.target)?;
    let k = Kleisli2::new(&pm, guard)?;
    let tgt = Target::new(s, guard)?;
    let g = TwoFunctor::from_data(&k.pm.base, &tgt.theta.cat, &d.g)?;
    let gbar = TwoFunctor::from_data(&k.free.cat, &tgt.structure.base, &d.gbar)?;
    let m = KLExtMorphism { g, gbar };
    if !is_morphism(&k.free_functor, &tgt, &m) {
        return Err(invalid("Kleisli extension", "morphism", vec![]));
    }
    let lifted = lift_morphism(&k, &tgt, &m)?;
    Ok((k, tgt, lifted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abskl2::abskl2_of_pseudomonad;
    use crate::corpus;
    use crate::pseudomonadkit::{identity_pseudomonad, strict_as_pseudo, strict_on_z2};
    use std::sync::Arc;

    fn g() -> Guard {
        Guard::default()
    }

    #[test]
    fn identity_pair_holds() {
        let base = Arc::new(corpus::z2(&corpus::terminal_cat()));
        let pm = identity_pseudomonad(&base);
        let (s, _) = abskl2_of_pseudomonad(&pm, &g()).unwrap();
        let rep = verify_gray_unit_report(&pm, &s, &g()).unwrap();
        assert!(rep.holds(), "{:?}", rep.failures);
        assert!(rep.morphisms > 0 && rep.tight_2cells > 0 && rep.tight_3cells > 0);
    }

    #[test]
    fn unit_lifts_to_identity() {
        // (J, 1) out of (𝒜, S) into its own reflection lifts to the identity
        let pm = strict_on_z2(&corpus::const_terminal_monad());
        let k = Kleisli2::new(&pm, &g()).unwrap();
        let tgt = Target::new(k.abskl.clone(), &g()).unwrap();
        let m = KLExtMorphism {
            g: k.j.clone(),
            gbar: TwoFunctor::identity(&k.free.cat),
        };
        assert!(is_morphism(&k.free_functor, &tgt, &m));
        let lifted = lift_morphism(&k, &tgt, &m).unwrap();
        assert_eq!(lifted.one, (0..k.theta.cat.n_onecells()).collect::<Vec<_>>());
    }

    #[test]
    fn small_strict_pairs_hold() {
        let src = strict_as_pseudo(&crate::monadkit::Monad::identity(&Arc::new(corpus::walking_arrow())));
        let tgt_pm = strict_as_pseudo(&corpus::const_terminal_monad());
        let (s, _) = abskl2_of_pseudomonad(&tgt_pm, &g()).unwrap();
        let rep = verify_gray_unit_report(&src, &s, &g()).unwrap();
        assert!(rep.holds(), "{:?}", rep.failures);
    }

    #[test]
    fn pseudonat_enumeration_finds_identity() {
        let base = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let id = TwoFunctor::identity(&base);
        let all = enumerate_pseudonats(&id, &id, &g()).unwrap();
        assert!(all.contains(&PseudoNat::identity(&id)));
    }

    #[test]
    fn perturbed_modification_is_rejected() {
        let base = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let id = TwoFunctor::identity(&base);
        let p = PseudoNat::identity(&id);
        let mods = enumerate_modifications(&p, &p, &g()).unwrap();
        assert_eq!(mods.len(), 2);
        let mut bad = Modification::identity(&p);
        bad.comp[0] = *base.hom2(base.id1(0), base.id1(0)).iter().find(|&&a| !base.is_id2(a)).unwrap();
        bad.inv = None;
        assert!(!check_modification(&bad).is_valid());
    }
}
