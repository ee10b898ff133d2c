//! Finite categories given by composition tables, functors and natural
//! transformations between them.
//!
//! Objects and morphisms are stored sorted by id, so index order is
//! lexicographic id order and every enumeration below is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::Guard;
use crate::report::{ValidationReport, Violation};

/// Wire form of a morphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorphismData {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Wire form of a category. `compose` holds `[first, second, composite]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryData {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismData>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite category.
///
/// Values built through [`FinCategory::new`] satisfy the category laws.
/// [`FinCategory::unchecked`] only resolves ids and is what the validator
/// runs on.
#[derive(Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<usize>,
    /// `compose[f * n + g]` is `f ; g` when defined.
    compose: Vec<Option<usize>>,
    homs: Vec<Vec<usize>>,
    obj_index: FxHashMap<String, usize>,
    mor_index: FxHashMap<String, usize>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identity == other.identity
            && self.compose == other.compose
    }
}
impl Eq for FinCategory {}

impl fmt::Debug for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.len())
            .finish()
    }
}

impl FinCategory {
    /// Resolve ids without checking any law. Fails only on dangling or
    /// duplicate ids and on conflicting compose entries.
    pub fn unchecked(data: &CategoryData) -> Result<Self> {
        let mut objects = data.objects.clone();
        objects.sort();
        if objects.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::structure("duplicate object id"));
        }
        let obj_index: FxHashMap<String, usize> = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), i))
            .collect();
        let mut raw = data.morphisms.clone();
        raw.sort();
        if raw.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::structure("duplicate morphism id"));
        }
        let mut morphisms = Vec::with_capacity(raw.len());
        for m in &raw {
            let src = *obj_index
                .get(&m.src)
                .ok_or_else(|| Error::unknown("object", &m.src))?;
            let tgt = *obj_index
                .get(&m.tgt)
                .ok_or_else(|| Error::unknown("object", &m.tgt))?;
            morphisms.push(Morphism {
                id: m.id.clone(),
                src,
                tgt,
            });
        }
        let mor_index: FxHashMap<String, usize> = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        let lookup = |id: &str| {
            mor_index
                .get(id)
                .copied()
                .ok_or_else(|| Error::unknown("morphism", id))
        };
        let mut identity = vec![usize::MAX; objects.len()];
        for (o, m) in &data.identities {
            let oi = *obj_index
                .get(o)
                .ok_or_else(|| Error::unknown("object", o))?;
            identity[oi] = lookup(m)?;
        }
        if let Some(i) = identity.iter().position(|&m| m == usize::MAX) {
            return Err(Error::structure(format!(
                "object `{}` has no identity",
                objects[i]
            )));
        }
        let n = morphisms.len();
        let mut compose = vec![None; n * n];
        for [f, g, h] in &data.compose {
            let (f, g, h) = (lookup(f)?, lookup(g)?, lookup(h)?);
            match compose[f * n + g] {
                Some(old) if old != h => {
                    return Err(Error::structure(format!(
                        "conflicting composites for ({}, {})",
                        morphisms[f].id, morphisms[g].id
                    )))
                }
                _ => compose[f * n + g] = Some(h),
            }
        }
        let no = objects.len();
        let mut homs = vec![Vec::new(); no * no];
        for (i, m) in morphisms.iter().enumerate() {
            homs[m.src * no + m.tgt].push(i);
        }
        Ok(FinCategory {
            objects,
            morphisms,
            identity,
            compose,
            homs,
            obj_index,
            mor_index,
        })
    }

    /// Build and validate.
    pub fn new(data: &CategoryData) -> Result<Self> {
        let c = Self::unchecked(data)?;
        let report = c.validate();
        if report.is_valid() {
            Ok(c)
        } else {
            Err(Error::Invalid {
                kind: "category",
                report,
            })
        }
    }

    /// Build from index-level data produced by the engine itself. The caller
    /// supplies ids (need not be sorted) and a composition function on
    /// positions in `morphisms`.
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: impl Fn(usize) -> usize,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut data = CategoryData {
            objects: objects.clone(),
            ..Default::default()
        };
        for (id, s, t) in &morphisms {
            data.morphisms.push(MorphismData {
                id: id.clone(),
                src: objects[*s].clone(),
                tgt: objects[*t].clone(),
            });
        }
        for (i, o) in objects.iter().enumerate() {
            data.identities
                .insert(o.clone(), morphisms[identity(i)].0.clone());
        }
        for (f, (fid, _, ft)) in morphisms.iter().enumerate() {
            for (g, (gid, gs, _)) in morphisms.iter().enumerate() {
                if ft == gs {
                    let h = compose(f, g);
                    data.compose
                        .push([fid.clone(), gid.clone(), morphisms[h].0.clone()]);
                }
            }
        }
        Self::new(&data)
    }

    /// Like [`FinCategory::from_parts`], also returning where each input
    /// object and morphism ended up after sorting by id.
    pub fn from_parts_indexed(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: impl Fn(usize) -> usize,
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<(Self, Vec<usize>, Vec<usize>)> {
        let c = Self::from_parts(objects.clone(), morphisms.clone(), identity, compose)?;
        let obj = objects.iter().map(|o| c.obj_index[o]).collect();
        let mor = morphisms.iter().map(|(m, _, _)| c.mor_index[m]).collect();
        Ok((c, obj, mor))
    }

    pub fn to_data(&self) -> CategoryData {
        let mut data = CategoryData {
            objects: self.objects.clone(),
            ..Default::default()
        };
        for m in &self.morphisms {
            data.morphisms.push(MorphismData {
                id: m.id.clone(),
                src: self.objects[m.src].clone(),
                tgt: self.objects[m.tgt].clone(),
            });
        }
        for (i, o) in self.objects.iter().enumerate() {
            data.identities
                .insert(o.clone(), self.morphisms[self.identity[i]].id.clone());
        }
        let n = self.morphisms.len();
        for f in 0..n {
            for g in 0..n {
                if let Some(h) = self.compose[f * n + g] {
                    data.compose.push([
                        self.morphisms[f].id.clone(),
                        self.morphisms[g].id.clone(),
                        self.morphisms[h].id.clone(),
                    ]);
                }
            }
        }
        data
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_id(&self, o: usize) -> &str {
        &self.objects[o]
    }

    pub fn morphism_id(&self, f: usize) -> &str {
        &self.morphisms[f].id
    }

    pub fn object(&self, id: &str) -> Result<usize> {
        self.obj_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::unknown("object", id))
    }

    pub fn morphism(&self, id: &str) -> Result<usize> {
        self.mor_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::unknown("morphism", id))
    }

    pub fn src(&self, f: usize) -> usize {
        self.morphisms[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.morphisms[f].tgt
    }

    pub fn id(&self, o: usize) -> usize {
        self.identity[o]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.src(f)] == f
    }

    /// `f ; g`, i.e. `g ∘ f`. Panics when not composable.
    pub fn then(&self, f: usize, g: usize) -> usize {
        self.try_then(f, g).unwrap_or_else(|| {
            panic!(
                "morphisms {} and {} are not composable",
                self.morphisms[f].id, self.morphisms[g].id
            )
        })
    }

    pub fn try_then(&self, f: usize, g: usize) -> Option<usize> {
        self.compose[f * self.morphisms.len() + g]
    }

    /// `g ∘ f`.
    pub fn after(&self, g: usize, f: usize) -> usize {
        self.then(f, g)
    }

    /// Compose a path given in diagrammatic order.
    pub fn then_all(&self, path: &[usize]) -> usize {
        let mut it = path.iter().copied();
        let first = it.next().expect("empty path");
        it.fold(first, |acc, g| self.then(acc, g))
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        &self.homs[x * self.objects.len() + y]
    }

    /// Exhaustive law check.
    /// Two-sided inverse of `f`, if any.
    pub fn inverse_of(&self, f: usize) -> Option<usize> {
        let (x, y) = (self.src(f), self.tgt(f));
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.then(f, g) == self.id(x) && self.then(g, f) == self.id(y))
    }

    pub fn is_iso(&self, f: usize) -> bool {
        self.inverse_of(f).is_some()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let n = self.morphisms.len();
        let name = |f: usize| self.morphisms[f].id.clone();
        for (o, &i) in self.identity.iter().enumerate() {
            if self.src(i) != o || self.tgt(i) != o {
                r.push(
                    Violation::new("typing", vec![name(i)])
                        .with_detail(format!("identity of `{}` is not an endomorphism of it", self.objects[o])),
                );
            }
        }
        for f in 0..n {
            for g in 0..n {
                let composable = self.tgt(f) == self.src(g);
                match (composable, self.compose[f * n + g]) {
                    (true, None) => r.push(Violation::new("totality", vec![name(f), name(g)])),
                    (false, Some(_)) => r.push(
                        Violation::new("typing", vec![name(f), name(g)])
                            .with_detail("composite given for a non-composable pair"),
                    ),
                    (true, Some(h)) => {
                        if self.src(h) != self.src(f) || self.tgt(h) != self.tgt(g) {
                            r.push(
                                Violation::new("typing", vec![name(f), name(g)])
                                    .with_detail(format!("composite `{}` has the wrong boundary", name(h))),
                            );
                        }
                    }
                    (false, None) => {}
                }
            }
        }
        for f in 0..n {
            let (x, y) = (self.src(f), self.tgt(f));
            let left = self.identity[x];
            if self.compose[left * n + f] != Some(f) {
                r.push(Violation::new("identity", vec![name(left), name(f)]));
            }
            let right = self.identity[y];
            if self.compose[f * n + right] != Some(f) {
                r.push(Violation::new("identity", vec![name(f), name(right)]));
            }
        }
        for f in 0..n {
            for g in 0..n {
                let Some(fg) = self.compose[f * n + g] else { continue };
                if self.tgt(f) != self.src(g) {
                    continue;
                }
                for h in 0..n {
                    if self.tgt(g) != self.src(h) {
                        continue;
                    }
                    let Some(gh) = self.compose[g * n + h] else { continue };
                    let lhs = self.compose[fg * n + h];
                    let rhs = self.compose[f * n + gh];
                    if lhs != rhs {
                        r.push(Violation::new("associativity", vec![name(f), name(g), name(h)]));
                    }
                }
            }
        }
        r
    }

    /// The empty category.
    pub fn empty() -> Self {
        Self::new(&CategoryData::default()).expect("empty category is valid")
    }

    /// Opposite category; ids are kept.
    pub fn opposite(&self) -> FinCategory {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| (m.id.clone(), m.tgt, m.src))
            .collect();
        FinCategory::from_parts(
            self.objects.clone(),
            morphisms,
            |o| self.identity[o],
            |f, g| self.then(g, f),
        )
        .expect("opposite of a category is a category")
    }
}

/// Validate raw data: structural problems and law violations, reported apart.
pub fn validate_category(data: &CategoryData) -> ValidationReport {
    match FinCategory::unchecked(data) {
        Ok(c) => c.validate(),
        Err(e) => {
            let mut r = ValidationReport::new();
            r.structural(e.to_string());
            r
        }
    }
}

/// A functor between finite categories, stored as index maps.
#[derive(Clone, Debug)]
pub struct Functor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub obj: Vec<usize>,
    pub mor: Vec<usize>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.obj == other.obj
            && self.mor == other.mor
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}
impl Eq for Functor {}

pub(crate) fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Wire form of a functor; source and target are given by context.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctorData {
    pub object_map: BTreeMap<String, String>,
    pub morphism_map: BTreeMap<String, String>,
}

/// Wire form of a natural transformation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatTransData {
    pub components: BTreeMap<String, String>,
}

impl Functor {
    pub fn identity(c: &Arc<FinCategory>) -> Functor {
        Functor {
            source: c.clone(),
            target: c.clone(),
            obj: (0..c.n_objects()).collect(),
            mor: (0..c.n_morphisms()).collect(),
        }
    }

    /// Constant functor at object `o` of `d`.
    pub fn constant(c: &Arc<FinCategory>, d: &Arc<FinCategory>, o: usize) -> Functor {
        Functor {
            source: c.clone(),
            target: d.clone(),
            obj: vec![o; c.n_objects()],
            mor: vec![d.id(o); c.n_morphisms()],
        }
    }

    /// Resolve wire data against the given source and target, then check laws.
    pub fn from_data(
        source: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        data: &FunctorData,
    ) -> Result<Functor> {
        let f = Self::from_data_unchecked(source, target, data)?;
        let r = f.validate();
        if r.is_valid() {
            Ok(f)
        } else {
            Err(Error::Invalid {
                kind: "functor",
                report: r,
            })
        }
    }

    pub fn from_data_unchecked(
        source: &Arc<FinCategory>,
        target: &Arc<FinCategory>,
        data: &FunctorData,
    ) -> Result<Functor> {
        let mut obj = Vec::with_capacity(source.n_objects());
        for o in source.objects() {
            let img = data
                .object_map
                .get(o)
                .ok_or_else(|| Error::structure(format!("functor does not map object `{o}`")))?;
            obj.push(target.object(img)?);
        }
        let mut mor = Vec::with_capacity(source.n_morphisms());
        for m in source.morphisms() {
            let img = data
                .morphism_map
                .get(&m.id)
                .ok_or_else(|| Error::structure(format!("functor does not map morphism `{}`", m.id)))?;
            mor.push(target.morphism(img)?);
        }
        Ok(Functor {
            source: source.clone(),
            target: target.clone(),
            obj,
            mor,
        })
    }

    pub fn to_data(&self) -> FunctorData {
        FunctorData {
            object_map: self
                .obj
                .iter()
                .enumerate()
                .map(|(i, &o)| (self.source.object_id(i).to_string(), self.target.object_id(o).to_string()))
                .collect(),
            morphism_map: self
                .mor
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    (
                        self.source.morphism_id(i).to_string(),
                        self.target.morphism_id(m).to_string(),
                    )
                })
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let (c, d) = (&*self.source, &*self.target);
        let mut r = ValidationReport::new();
        for f in 0..c.n_morphisms() {
            let g = self.mor[f];
            if d.src(g) != self.obj[c.src(f)] || d.tgt(g) != self.obj[c.tgt(f)] {
                r.push(Violation::new("boundary", vec![c.morphism_id(f).into()]));
            }
        }
        if !r.is_valid() {
            return r;
        }
        for o in 0..c.n_objects() {
            if self.mor[c.id(o)] != d.id(self.obj[o]) {
                r.push(Violation::new("identity", vec![c.object_id(o).into()]));
            }
        }
        for f in 0..c.n_morphisms() {
            for g in 0..c.n_morphisms() {
                if let Some(h) = c.try_then(f, g) {
                    if d.try_then(self.mor[f], self.mor[g]) != Some(self.mor[h]) {
                        r.push(Violation::new(
                            "composition",
                            vec![c.morphism_id(f).into(), c.morphism_id(g).into()],
                        ));
                    }
                }
            }
        }
        r
    }

    /// `self ; other`, i.e. `other ∘ self`.
    pub fn then(&self, other: &Functor) -> Functor {
        assert!(
            same_category(&self.target, &other.source),
            "functors are not composable"
        );
        Functor {
            source: self.source.clone(),
            target: other.target.clone(),
            obj: self.obj.iter().map(|&o| other.obj[o]).collect(),
            mor: self.mor.iter().map(|&m| other.mor[m]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        same_category(&self.source, &self.target)
            && self.obj.iter().enumerate().all(|(i, &o)| i == o)
            && self.mor.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.target.n_objects()];
        self.obj.iter().all(|&o| !std::mem::replace(&mut seen[o], true))
    }

    pub fn is_bijective_on_objects(&self) -> bool {
        self.source.n_objects() == self.target.n_objects() && self.is_injective_on_objects()
    }

    /// Injective on every hom-set.
    pub fn is_faithful(&self) -> bool {
        let c = &*self.source;
        (0..c.n_objects()).all(|x| {
            (0..c.n_objects()).all(|y| {
                let mut imgs: Vec<usize> = c.hom(x, y).iter().map(|&f| self.mor[f]).collect();
                let n = imgs.len();
                imgs.sort_unstable();
                imgs.dedup();
                imgs.len() == n
            })
        })
    }

    /// Surjective on every hom-set.
    pub fn is_full(&self) -> bool {
        let (c, d) = (&*self.source, &*self.target);
        (0..c.n_objects()).all(|x| {
            (0..c.n_objects()).all(|y| {
                let imgs: Vec<usize> = c.hom(x, y).iter().map(|&f| self.mor[f]).collect();
                d.hom(self.obj[x], self.obj[y])
                    .iter()
                    .all(|g| imgs.contains(g))
            })
        })
    }

    /// For every target object an isomorphism from the image of some
    /// source object: `(source object, iso F(c) → d)`.
    pub fn essential_preimages(&self) -> Option<Vec<(usize, usize)>> {
        let d = &*self.target;
        (0..d.n_objects())
            .map(|y| {
                (0..self.source.n_objects()).find_map(|c| {
                    d.hom(self.obj[c], y)
                        .iter()
                        .copied()
                        .find(|&f| d.is_iso(f))
                        .map(|f| (c, f))
                })
            })
            .collect()
    }

    pub fn is_essentially_surjective(&self) -> bool {
        self.essential_preimages().is_some()
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_faithful() && self.is_full() && self.is_essentially_surjective()
    }

    /// A quasi-inverse `G` built from chosen preimages, with `G` on
    /// morphisms determined by full faithfulness.
    pub fn quasi_inverse(&self) -> Option<Functor> {
        if !(self.is_faithful() && self.is_full()) {
            return None;
        }
        let pre = self.essential_preimages()?;
        let (c, d) = (&*self.source, &*self.target);
        let mut mor = Vec::with_capacity(d.n_morphisms());
        for g in 0..d.n_morphisms() {
            let (cx, ix) = pre[d.src(g)];
            let (cy, iy) = pre[d.tgt(g)];
            // F(G g) = ix ; g ; iy⁻¹
            let want = d.then_all(&[ix, g, d.inverse_of(iy)?]);
            mor.push(c.hom(cx, cy).iter().copied().find(|&h| self.mor[h] == want)?);
        }
        Some(Functor {
            source: self.target.clone(),
            target: self.source.clone(),
            obj: pre.iter().map(|p| p.0).collect(),
            mor,
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_bijective_on_objects() && self.is_full() && self.is_faithful()
    }

    /// Inverse of an isomorphism of categories.
    pub fn inverse(&self) -> Option<Functor> {
        if !self.is_isomorphism() {
            return None;
        }
        let mut obj = vec![0; self.target.n_objects()];
        for (i, &o) in self.obj.iter().enumerate() {
            obj[o] = i;
        }
        let mut mor = vec![0; self.target.n_morphisms()];
        for (i, &m) in self.mor.iter().enumerate() {
            mor[m] = i;
        }
        Some(Functor {
            source: self.target.clone(),
            target: self.source.clone(),
            obj,
            mor,
        })
    }
}

/// A natural transformation, one component per source object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans {
    pub source: Functor,
    pub target: Functor,
    pub comp: Vec<usize>,
}

impl NatTrans {
    pub fn identity(f: &Functor) -> NatTrans {
        NatTrans {
            source: f.clone(),
            target: f.clone(),
            comp: f.obj.iter().map(|&o| f.target.id(o)).collect(),
        }
    }

    pub fn from_data(source: &Functor, target: &Functor, data: &NatTransData) -> Result<NatTrans> {
        let n = Self::from_data_unchecked(source, target, data)?;
        let r = n.validate();
        if r.is_valid() {
            Ok(n)
        } else {
            Err(Error::Invalid {
                kind: "natural transformation",
                report: r,
            })
        }
    }

    pub fn from_data_unchecked(source: &Functor, target: &Functor, data: &NatTransData) -> Result<NatTrans> {
        let c = &source.source;
        let mut comp = Vec::with_capacity(c.n_objects());
        for o in c.objects() {
            let m = data
                .components
                .get(o)
                .ok_or_else(|| Error::structure(format!("missing component at `{o}`")))?;
            comp.push(source.target.morphism(m)?);
        }
        Ok(NatTrans {
            source: source.clone(),
            target: target.clone(),
            comp,
        })
    }

    pub fn to_data(&self) -> NatTransData {
        let c = &self.source.source;
        let d = &self.source.target;
        NatTransData {
            components: self
                .comp
                .iter()
                .enumerate()
                .map(|(i, &m)| (c.object_id(i).to_string(), d.morphism_id(m).to_string()))
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let (f, g) = (&self.source, &self.target);
        let (c, d) = (&*f.source, &*f.target);
        for o in 0..c.n_objects() {
            let a = self.comp[o];
            if d.src(a) != f.obj[o] || d.tgt(a) != g.obj[o] {
                r.push(Violation::new("boundary", vec![c.object_id(o).into()]));
            }
        }
        if !r.is_valid() {
            return r;
        }
        for m in 0..c.n_morphisms() {
            let (x, y) = (c.src(m), c.tgt(m));
            if d.then(f.mor[m], self.comp[y]) != d.then(self.comp[x], g.mor[m]) {
                r.push(Violation::new("naturality", vec![c.morphism_id(m).into()]));
            }
        }
        r
    }

    /// Vertical composite `self ; other`.
    pub fn then(&self, other: &NatTrans) -> NatTrans {
        let d = &self.source.target;
        NatTrans {
            source: self.source.clone(),
            target: other.target.clone(),
            comp: self
                .comp
                .iter()
                .zip(&other.comp)
                .map(|(&a, &b)| d.then(a, b))
                .collect(),
        }
    }

    /// Whisker by a functor on the left: `H ; self`, components `self_{H x}`.
    pub fn pre(&self, h: &Functor) -> NatTrans {
        NatTrans {
            source: h.then(&self.source),
            target: h.then(&self.target),
            comp: h.obj.iter().map(|&o| self.comp[o]).collect(),
        }
    }

    /// Whisker by a functor on the right: `self ; K`, components `K(self_x)`.
    pub fn post(&self, k: &Functor) -> NatTrans {
        NatTrans {
            source: self.source.then(k),
            target: self.target.then(k),
            comp: self.comp.iter().map(|&m| k.mor[m]).collect(),
        }
    }
}

/// Every functor `c → d`, in lexicographic order of (object images, morphism images).
pub fn enumerate_functors(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    guard: &Guard,
) -> Result<Vec<Functor>> {
    guard.check(
        "functor enumeration",
        Guard::power(d.n_objects(), c.n_objects()),
    )?;
    let mut out = Vec::new();
    let mut obj = vec![0usize; c.n_objects()];
    enumerate_object_maps(c, d, &mut obj, 0, &mut |obj| {
        let mut mor = vec![usize::MAX; c.n_morphisms()];
        extend_morphisms(c, d, obj, &mut mor, 0, &mut |mor| {
            out.push(Functor {
                source: c.clone(),
                target: d.clone(),
                obj: obj.to_vec(),
                mor: mor.to_vec(),
            });
        });
    });
    Ok(out)
}

/// Every functor `c → d` with a fixed object map.
pub fn enumerate_functors_over(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    obj: &[usize],
    guard: &Guard,
) -> Result<Vec<Functor>> {
    let space = Guard::space((0..c.n_morphisms()).map(|f| {
        if c.is_identity(f) {
            1
        } else {
            d.hom(obj[c.src(f)], obj[c.tgt(f)]).len()
        }
    }));
    guard.check("functor enumeration", space)?;
    let mut out = Vec::new();
    let mut mor = vec![usize::MAX; c.n_morphisms()];
    extend_morphisms(c, d, obj, &mut mor, 0, &mut |mor| {
        out.push(Functor {
            source: c.clone(),
            target: d.clone(),
            obj: obj.to_vec(),
            mor: mor.to_vec(),
        });
    });
    Ok(out)
}

fn enumerate_object_maps(
    c: &FinCategory,
    d: &FinCategory,
    obj: &mut Vec<usize>,
    i: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if i == c.n_objects() {
        emit(obj);
        return;
    }
    for o in 0..d.n_objects() {
        obj[i] = o;
        enumerate_object_maps(c, d, obj, i + 1, emit);
    }
}

fn extend_morphisms(
    c: &FinCategory,
    d: &FinCategory,
    obj: &[usize],
    mor: &mut Vec<usize>,
    i: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if i == c.n_morphisms() {
        emit(mor);
        return;
    }
    let (x, y) = (c.src(i), c.tgt(i));
    let candidates: Vec<usize> = if c.is_identity(i) {
        vec![d.id(obj[x])]
    } else {
        d.hom(obj[x], obj[y]).to_vec()
    };
    for g in candidates {
        mor[i] = g;
        if consistent_upto(c, d, mor, i) {
            extend_morphisms(c, d, obj, mor, i + 1, emit);
        }
    }
    mor[i] = usize::MAX;
}

/// Check every composition instance that involves morphism `i` and only
/// already-assigned morphisms (indices `≤ i`).
fn consistent_upto(c: &FinCategory, d: &FinCategory, mor: &[usize], i: usize) -> bool {
    for a in 0..=i {
        for (f, g) in [(a, i), (i, a)] {
            if let Some(h) = c.try_then(f, g) {
                if h <= i && d.try_then(mor[f], mor[g]) != Some(mor[h]) {
                    return false;
                }
            }
        }
    }
    // Instances whose composite is `i` but whose factors were assigned earlier.
    for f in 0..i {
        for g in 0..i {
            if c.try_then(f, g) == Some(i) && d.try_then(mor[f], mor[g]) != Some(mor[i]) {
                return false;
            }
        }
    }
    true
}

/// Every natural transformation `f ⇒ g`, lexicographic in components.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor, guard: &Guard) -> Result<Vec<NatTrans>> {
    let c = &*f.source;
    let d = &*f.target;
    let choices: Vec<&[usize]> = (0..c.n_objects()).map(|o| d.hom(f.obj[o], g.obj[o])).collect();
    guard.check(
        "natural transformation enumeration",
        Guard::space(choices.iter().map(|h| h.len())),
    )?;
    let mut out = Vec::new();
    let mut comp = vec![usize::MAX; c.n_objects()];
    fn go(
        c: &FinCategory,
        d: &FinCategory,
        f: &Functor,
        g: &Functor,
        choices: &[&[usize]],
        comp: &mut Vec<usize>,
        i: usize,
        out: &mut Vec<NatTrans>,
    ) {
        if i == c.n_objects() {
            out.push(NatTrans {
                source: f.clone(),
                target: g.clone(),
                comp: comp.clone(),
            });
            return;
        }
        for &a in choices[i] {
            comp[i] = a;
            let ok = c.morphisms().iter().enumerate().all(|(m, mm)| {
                if mm.src > i || mm.tgt > i || (mm.src != i && mm.tgt != i) {
                    return true;
                }
                d.then(f.mor[m], comp[mm.tgt]) == d.then(comp[mm.src], g.mor[m])
            });
            if ok {
                go(c, d, f, g, choices, comp, i + 1, out);
            }
        }
    }
    go(c, d, f, g, &choices, &mut comp, 0, &mut out);
    Ok(out)
}

/// Factor `f = θ' ; K` with θ' bijective on objects and K fully faithful.
///
/// The middle category has the objects of `f.source` and full hom-sets
/// `hom(FX, FY)`. When `f` is injective on objects the target's morphism
/// ids are reused; otherwise they are tagged `g@X,Y`.
pub fn factor_bo_ff(f: &Functor) -> (Functor, Functor) {
    let c = &f.source;
    let d = &f.target;
    let injective = f.is_injective_on_objects();
    let no = c.n_objects();
    let mut morphisms = Vec::new();
    let mut lookup: FxHashMap<(usize, usize, usize), usize> = FxHashMap::default();
    let mut under = Vec::new();
    for x in 0..no {
        for y in 0..no {
            for &g in d.hom(f.obj[x], f.obj[y]) {
                let id = if injective {
                    d.morphism_id(g).to_string()
                } else {
                    format!("{}@{},{}", d.morphism_id(g), c.object_id(x), c.object_id(y))
                };
                lookup.insert((x, y, g), morphisms.len());
                morphisms.push((id, x, y));
                under.push(g);
            }
        }
    }
    let mid = FinCategory::from_parts(
        c.objects().to_vec(),
        morphisms.clone(),
        |x| lookup[&(x, x, d.id(f.obj[x]))],
        |a, b| {
            let (_, x, _) = &morphisms[a];
            let (_, _, z) = &morphisms[b];
            lookup[&(*x, *z, d.then(under[a], under[b]))]
        },
    )
    .expect("image factorisation is a category");
    let mid = Arc::new(mid);
    let theta = Functor {
        source: c.clone(),
        target: mid.clone(),
        obj: (0..no).collect(),
        mor: (0..c.n_morphisms())
            .map(|m| {
                let id = if injective {
                    d.morphism_id(f.mor[m]).to_string()
                } else {
                    format!(
                        "{}@{},{}",
                        d.morphism_id(f.mor[m]),
                        c.object_id(c.src(m)),
                        c.object_id(c.tgt(m))
                    )
                };
                mid.morphism(&id).expect("image morphism present")
            })
            .collect(),
    };
    let k = Functor {
        source: mid.clone(),
        target: d.clone(),
        obj: f.obj.clone(),
        mor: (0..mid.n_morphisms())
            .map(|m| d.morphism(strip_tag(mid.morphism_id(m), injective)).unwrap())
            .collect(),
    };
    (theta, k)
}

fn strip_tag(id: &str, injective: bool) -> &str {
    if injective {
        id
    } else {
        &id[..id.rfind('@').unwrap()]
    }
}
