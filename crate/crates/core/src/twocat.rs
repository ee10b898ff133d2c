//! Finite strict 2-categories, strict 2-functors, pseudonatural
//! transformations, modifications and pasting expressions.
//!
//! Composition is written diagrammatically throughout: `then1(f, g)` is
//! `f` followed by `g`; `whisk_l(f, a)` precomposes the 2-cell `a` with
//! the 1-cell `f`, `whisk_r(a, g)` postcomposes it with `g`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::FinCategory;
use crate::report::{ValidationReport, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellData {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Wire form of a 2-category. Every table holds `[left, right, result]`
/// triples: `compose` and `vcompose` in diagrammatic order, `lwhisker`
/// as `[1-cell, 2-cell, result]`, `rwhisker` as `[2-cell, 1-cell, result]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fin2CategoryData {
    pub objects: Vec<String>,
    pub onecells: Vec<CellData>,
    pub twocells: Vec<CellData>,
    pub identities: BTreeMap<String, String>,
    pub identities_2: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
    pub vcompose: Vec<[String; 3]>,
    pub lwhisker: Vec<[String; 3]>,
    pub rwhisker: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
}

/// A finite strict 2-category.
#[derive(Clone)]
pub struct Fin2Category {
    objects: Vec<String>,
    onecells: Vec<Cell>,
    twocells: Vec<Cell>,
    id1: Vec<usize>,
    id2: Vec<usize>,
    comp1: FxHashMap<(usize, usize), usize>,
    vcomp: FxHashMap<(usize, usize), usize>,
    lwhisk: FxHashMap<(usize, usize), usize>,
    rwhisk: FxHashMap<(usize, usize), usize>,
    hom1: Vec<Vec<usize>>,
    hom2: FxHashMap<(usize, usize), Vec<usize>>,
    inverse: Vec<Option<usize>>,
    obj_index: FxHashMap<String, usize>,
    one_index: FxHashMap<String, usize>,
    two_index: FxHashMap<String, usize>,
}

impl PartialEq for Fin2Category {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.onecells == other.onecells
            && self.twocells == other.twocells
            && self.id1 == other.id1
            && self.id2 == other.id2
            && self.comp1 == other.comp1
            && self.vcomp == other.vcomp
            && self.lwhisk == other.lwhisk
            && self.rwhisk == other.rwhisk
    }
}
impl Eq for Fin2Category {}

impl fmt::Debug for Fin2Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fin2Category")
            .field("objects", &self.objects.len())
            .field("onecells", &self.onecells.len())
            .field("twocells", &self.twocells.len())
            .finish()
    }
}

/// Collects cells, then fills every table from composition functions.
#[derive(Default)]
pub struct Fin2Builder {
    objects: Vec<String>,
    onecells: Vec<Cell>,
    twocells: Vec<Cell>,
}

impl Fin2Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, id: impl Into<String>) -> usize {
        self.objects.push(id.into());
        self.objects.len() - 1
    }

    pub fn onecell(&mut self, id: impl Into<String>, src: usize, tgt: usize) -> usize {
        self.onecells.push(Cell {
            id: id.into(),
            src,
            tgt,
        });
        self.onecells.len() - 1
    }

    pub fn twocell(&mut self, id: impl Into<String>, src: usize, tgt: usize) -> usize {
        self.twocells.push(Cell {
            id: id.into(),
            src,
            tgt,
        });
        self.twocells.len() - 1
    }

    pub fn n_onecells(&self) -> usize {
        self.onecells.len()
    }

    pub fn n_twocells(&self) -> usize {
        self.twocells.len()
    }

    /// Fill the tables. The closures are only called on composable
    /// arguments; they return positions in this builder.
    pub fn build(
        self,
        id1: impl Fn(usize) -> usize,
        id2: impl Fn(usize) -> usize,
        comp1: impl Fn(usize, usize) -> usize,
        vcomp: impl Fn(usize, usize) -> usize,
        lwhisk: impl Fn(usize, usize) -> usize,
        rwhisk: impl Fn(usize, usize) -> usize,
    ) -> Result<Fin2Category> {
        let no = self.objects.len();
        let id1v: Vec<usize> = (0..no).map(&id1).collect();
        let id2v: Vec<usize> = (0..self.onecells.len()).map(&id2).collect();
        let mut out_of = vec![Vec::new(); no];
        let mut into = vec![Vec::new(); no];
        for (i, c) in self.onecells.iter().enumerate() {
            out_of[c.src].push(i);
            into[c.tgt].push(i);
        }
        let mut comp1m = FxHashMap::default();
        for y in 0..no {
            for &f in &into[y] {
                for &g in &out_of[y] {
                    comp1m.insert((f, g), comp1(f, g));
                }
            }
        }
        let mut hom2: FxHashMap<(usize, usize), Vec<usize>> = FxHashMap::default();
        for (i, c) in self.twocells.iter().enumerate() {
            hom2.entry((c.src, c.tgt)).or_default().push(i);
        }
        let mut by_src: FxHashMap<usize, Vec<usize>> = FxHashMap::default();
        for (i, c) in self.twocells.iter().enumerate() {
            by_src.entry(c.src).or_default().push(i);
        }
        let mut vcompm = FxHashMap::default();
        for (a, c) in self.twocells.iter().enumerate() {
            if let Some(bs) = by_src.get(&c.tgt) {
                for &b in bs {
                    vcompm.insert((a, b), vcomp(a, b));
                }
            }
        }
        let mut lw = FxHashMap::default();
        let mut rw = FxHashMap::default();
        for (a, c) in self.twocells.iter().enumerate() {
            let cell = &self.onecells[c.src];
            for &f in &into[cell.src] {
                lw.insert((f, a), lwhisk(f, a));
            }
            for &g in &out_of[cell.tgt] {
                rw.insert((a, g), rwhisk(a, g));
            }
        }
        Fin2Category::assemble(
            self.objects,
            self.onecells,
            self.twocells,
            id1v,
            id2v,
            comp1m,
            vcompm,
            lw,
            rw,
        )
    }
}

impl Fin2Category {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        objects: Vec<String>,
        onecells: Vec<Cell>,
        twocells: Vec<Cell>,
        id1: Vec<usize>,
        id2: Vec<usize>,
        comp1: FxHashMap<(usize, usize), usize>,
        vcomp: FxHashMap<(usize, usize), usize>,
        lwhisk: FxHashMap<(usize, usize), usize>,
        rwhisk: FxHashMap<(usize, usize), usize>,
    ) -> Result<Fin2Category> {
        let index = |ids: Vec<&String>, kind: &str| -> Result<FxHashMap<String, usize>> {
            let mut m = FxHashMap::default();
            for (i, id) in ids.into_iter().enumerate() {
                if m.insert(id.clone(), i).is_some() {
                    return Err(Error::structure(format!("duplicate {kind} id `{id}`")));
                }
            }
            Ok(m)
        };
        let obj_index = index(objects.iter().collect(), "object")?;
        let one_index = index(onecells.iter().map(|c| &c.id).collect(), "1-cell")?;
        let two_index = index(twocells.iter().map(|c| &c.id).collect(), "2-cell")?;
        let no = objects.len();
        let mut hom1 = vec![Vec::new(); no * no];
        for (i, c) in onecells.iter().enumerate() {
            hom1[c.src * no + c.tgt].push(i);
        }
        let mut hom2: FxHashMap<(usize, usize), Vec<usize>> = FxHashMap::default();
        for (i, c) in twocells.iter().enumerate() {
            hom2.entry((c.src, c.tgt)).or_default().push(i);
        }
        let mut c = Fin2Category {
            objects,
            onecells,
            twocells,
            id1,
            id2,
            comp1,
            vcomp,
            lwhisk,
            rwhisk,
            hom1,
            hom2,
            inverse: Vec::new(),
            obj_index,
            one_index,
            two_index,
        };
        c.inverse = (0..c.twocells.len()).map(|a| c.find_inverse(a)).collect();
        Ok(c)
    }

    fn find_inverse(&self, a: usize) -> Option<usize> {
        let (f, g) = (self.twocells[a].src, self.twocells[a].tgt);
        self.hom2(g, f).iter().copied().find(|&b| {
            self.vcomp.get(&(a, b)) == Some(&self.id2[f]) && self.vcomp.get(&(b, a)) == Some(&self.id2[g])
        })
    }

    /// Resolve ids; no law is checked.
    pub fn unchecked(data: &Fin2CategoryData) -> Result<Fin2Category> {
        let obj_index: FxHashMap<&str, usize> =
            data.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        let obj = |id: &str| obj_index.get(id).copied().ok_or_else(|| Error::unknown("object", id));
        let mut onecells = Vec::new();
        for c in &data.onecells {
            onecells.push(Cell {
                id: c.id.clone(),
                src: obj(&c.src)?,
                tgt: obj(&c.tgt)?,
            });
        }
        let one_index: FxHashMap<&str, usize> =
            onecells.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let one = |id: &str| one_index.get(id).copied().ok_or_else(|| Error::unknown("1-cell", id));
        let mut twocells = Vec::new();
        for c in &data.twocells {
            let (s, t) = (one(&c.src)?, one(&c.tgt)?);
            if onecells[s].src != onecells[t].src || onecells[s].tgt != onecells[t].tgt {
                return Err(Error::structure(format!("2-cell `{}` joins non-parallel 1-cells", c.id)));
            }
            twocells.push(Cell {
                id: c.id.clone(),
                src: s,
                tgt: t,
            });
        }
        let two_index: FxHashMap<&str, usize> =
            twocells.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let two = |id: &str| two_index.get(id).copied().ok_or_else(|| Error::unknown("2-cell", id));
        let mut id1 = vec![usize::MAX; data.objects.len()];
        for (o, f) in &data.identities {
            id1[obj(o)?] = one(f)?;
        }
        if id1.contains(&usize::MAX) {
            return Err(Error::structure("object without identity 1-cell"));
        }
        let mut id2 = vec![usize::MAX; onecells.len()];
        for (f, a) in &data.identities_2 {
            id2[one(f)?] = two(a)?;
        }
        if id2.contains(&usize::MAX) {
            return Err(Error::structure("1-cell without identity 2-cell"));
        }
        let table = |rows: &[[String; 3]], l: &dyn Fn(&str) -> Result<usize>, r: &dyn Fn(&str) -> Result<usize>, res: &dyn Fn(&str) -> Result<usize>| -> Result<FxHashMap<(usize, usize), usize>> {
            let mut m = FxHashMap::default();
            for [a, b, c] in rows {
                let key = (l(a)?, r(b)?);
                let v = res(c)?;
                if let Some(old) = m.insert(key, v) {
                    if old != v {
                        return Err(Error::structure(format!("conflicting entries for ({a}, {b})")));
                    }
                }
            }
            Ok(m)
        };
        let comp1 = table(&data.compose, &one, &one, &one)?;
        let vcomp = table(&data.vcompose, &two, &two, &two)?;
        let lwhisk = table(&data.lwhisker, &one, &two, &two)?;
        let rwhisk = table(&data.rwhisker, &two, &one, &two)?;
        Fin2Category::assemble(
            data.objects.clone(),
            onecells,
            twocells,
            id1,
            id2,
            comp1,
            vcomp,
            lwhisk,
            rwhisk,
        )
    }

    pub fn from_data(data: &Fin2CategoryData) -> Result<Fin2Category> {
        let c = Self::unchecked(data)?;
        let r = c.validate();
        if r.is_valid() {
            Ok(c)
        } else {
            Err(Error::Invalid {
                kind: "2-category",
                report: r,
            })
        }
    }

    pub fn to_data(&self) -> Fin2CategoryData {
        let o = |i: usize| self.objects[i].clone();
        let one = |i: usize| self.onecells[i].id.clone();
        let two = |i: usize| self.twocells[i].id.clone();
        let sorted = |m: &FxHashMap<(usize, usize), usize>| {
            let mut v: Vec<_> = m.iter().map(|(&(a, b), &c)| (a, b, c)).collect();
            v.sort_unstable();
            v
        };
        Fin2CategoryData {
            objects: self.objects.clone(),
            onecells: self
                .onecells
                .iter()
                .map(|c| CellData {
                    id: c.id.clone(),
                    src: o(c.src),
                    tgt: o(c.tgt),
                })
                .collect(),
            twocells: self
                .twocells
                .iter()
                .map(|c| CellData {
                    id: c.id.clone(),
                    src: one(c.src),
                    tgt: one(c.tgt),
                })
                .collect(),
            identities: self.id1.iter().enumerate().map(|(x, &f)| (o(x), one(f))).collect(),
            identities_2: self.id2.iter().enumerate().map(|(f, &a)| (one(f), two(a))).collect(),
            compose: sorted(&self.comp1).into_iter().map(|(a, b, c)| [one(a), one(b), one(c)]).collect(),
            vcompose: sorted(&self.vcomp).into_iter().map(|(a, b, c)| [two(a), two(b), two(c)]).collect(),
            lwhisker: sorted(&self.lwhisk).into_iter().map(|(a, b, c)| [one(a), two(b), two(c)]).collect(),
            rwhisker: sorted(&self.rwhisk).into_iter().map(|(a, b, c)| [two(a), one(b), two(c)]).collect(),
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }
    pub fn n_onecells(&self) -> usize {
        self.onecells.len()
    }
    pub fn n_twocells(&self) -> usize {
        self.twocells.len()
    }
    pub fn objects(&self) -> &[String] {
        &self.objects
    }
    pub fn onecells(&self) -> &[Cell] {
        &self.onecells
    }
    pub fn twocells(&self) -> &[Cell] {
        &self.twocells
    }
    pub fn object_id(&self, x: usize) -> &str {
        &self.objects[x]
    }
    pub fn onecell_id(&self, f: usize) -> &str {
        &self.onecells[f].id
    }
    pub fn twocell_id(&self, a: usize) -> &str {
        &self.twocells[a].id
    }
    pub fn object(&self, id: &str) -> Result<usize> {
        self.obj_index.get(id).copied().ok_or_else(|| Error::unknown("object", id))
    }
    pub fn onecell(&self, id: &str) -> Result<usize> {
        self.one_index.get(id).copied().ok_or_else(|| Error::unknown("1-cell", id))
    }
    pub fn twocell(&self, id: &str) -> Result<usize> {
        self.two_index.get(id).copied().ok_or_else(|| Error::unknown("2-cell", id))
    }
    /// Source object of a 1-cell.
    pub fn src1(&self, f: usize) -> usize {
        self.onecells[f].src
    }
    pub fn tgt1(&self, f: usize) -> usize {
        self.onecells[f].tgt
    }
    /// Source 1-cell of a 2-cell.
    pub fn src2(&self, a: usize) -> usize {
        self.twocells[a].src
    }
    pub fn tgt2(&self, a: usize) -> usize {
        self.twocells[a].tgt
    }
    pub fn id1(&self, x: usize) -> usize {
        self.id1[x]
    }
    pub fn id2(&self, f: usize) -> usize {
        self.id2[f]
    }
    pub fn is_id2(&self, a: usize) -> bool {
        self.id2[self.src2(a)] == a
    }
    pub fn hom1(&self, x: usize, y: usize) -> &[usize] {
        &self.hom1[x * self.objects.len() + y]
    }
    pub fn hom2(&self, f: usize, g: usize) -> &[usize] {
        self.hom2.get(&(f, g)).map(|v| v.as_slice()).unwrap_or(&[])
    }
    pub fn inv(&self, a: usize) -> Option<usize> {
        self.inverse[a]
    }
    pub fn is_invertible(&self, a: usize) -> bool {
        self.inverse[a].is_some()
    }
    /// Invertible 2-cells `f ⇒ g`.
    pub fn isos(&self, f: usize, g: usize) -> impl Iterator<Item = usize> + '_ {
        self.hom2(f, g).iter().copied().filter(move |&a| self.inverse[a].is_some())
    }

    pub fn try_then1(&self, f: usize, g: usize) -> Option<usize> {
        self.comp1.get(&(f, g)).copied()
    }
    pub fn then1(&self, f: usize, g: usize) -> usize {
        self.try_then1(f, g)
            .unwrap_or_else(|| panic!("1-cells {} and {} do not compose", self.onecells[f].id, self.onecells[g].id))
    }
    /// Compose a diagrammatic path of 1-cells.
    pub fn path1(&self, path: &[usize]) -> usize {
        let mut it = path.iter().copied();
        let first = it.next().expect("empty path");
        it.fold(first, |acc, g| self.then1(acc, g))
    }
    pub fn try_then2(&self, a: usize, b: usize) -> Option<usize> {
        self.vcomp.get(&(a, b)).copied()
    }
    pub fn then2(&self, a: usize, b: usize) -> usize {
        self.try_then2(a, b)
            .unwrap_or_else(|| panic!("2-cells {} and {} do not compose", self.twocells[a].id, self.twocells[b].id))
    }
    /// Vertical composite of a sequence, first to last.
    pub fn path2(&self, path: &[usize]) -> usize {
        let mut it = path.iter().copied();
        let first = it.next().expect("empty path");
        it.fold(first, |acc, b| self.then2(acc, b))
    }
    pub fn try_whisk_l(&self, f: usize, a: usize) -> Option<usize> {
        self.lwhisk.get(&(f, a)).copied()
    }
    pub fn whisk_l(&self, f: usize, a: usize) -> usize {
        self.try_whisk_l(f, a)
            .unwrap_or_else(|| panic!("cannot whisker {} by {}", self.twocells[a].id, self.onecells[f].id))
    }
    pub fn try_whisk_r(&self, a: usize, g: usize) -> Option<usize> {
        self.rwhisk.get(&(a, g)).copied()
    }
    pub fn whisk_r(&self, a: usize, g: usize) -> usize {
        self.try_whisk_r(a, g)
            .unwrap_or_else(|| panic!("cannot whisker {} by {}", self.twocells[a].id, self.onecells[g].id))
    }
    /// Horizontal composite, `a` on the left: `(a ◁ g) ; (f' ▷ b)`.
    pub fn hcomp(&self, a: usize, b: usize) -> usize {
        let g = self.src2(b);
        let f2 = self.tgt2(a);
        self.then2(self.whisk_r(a, g), self.whisk_l(f2, b))
    }

    /// The underlying 1-category of objects and 1-cells.
    pub fn underlying(&self) -> FinCategory {
        FinCategory::from_parts(
            self.objects.clone(),
            self.onecells.iter().map(|c| (c.id.clone(), c.src, c.tgt)).collect(),
            |x| self.id1[x],
            |f, g| self.then1(f, g),
        )
        .expect("underlying category")
    }

    /// Exhaustive check of the strict 2-category laws.
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::new();
        let one = |f: usize| self.onecells[f].id.clone();
        let two = |a: usize| self.twocells[a].id.clone();
        let n1 = self.onecells.len();
        let n2 = self.twocells.len();
        // 1-cells.
        for (x, &i) in self.id1.iter().enumerate() {
            if self.src1(i) != x || self.tgt1(i) != x {
                r.push(Violation::new("typing", vec![one(i)]));
            }
        }
        for f in 0..n1 {
            for &g in self.out_of(self.tgt1(f)).iter() {
                match self.try_then1(f, g) {
                    None => r.push(Violation::new("totality", vec![one(f), one(g)])),
                    Some(h) => {
                        if self.src1(h) != self.src1(f) || self.tgt1(h) != self.tgt1(g) {
                            r.push(Violation::new("typing", vec![one(f), one(g)]));
                        }
                    }
                }
            }
        }
        if !r.is_valid() {
            return r;
        }
        for f in 0..n1 {
            if self.then1(self.id1[self.src1(f)], f) != f || self.then1(f, self.id1[self.tgt1(f)]) != f {
                r.push(Violation::new("identity", vec![one(f)]));
            }
        }
        for f in 0..n1 {
            for &g in &self.out_of(self.tgt1(f)) {
                let fg = self.then1(f, g);
                for &h in &self.out_of(self.tgt1(g)) {
                    if self.then1(fg, h) != self.then1(f, self.then1(g, h)) {
                        r.push(Violation::new("associativity", vec![one(f), one(g), one(h)]));
                    }
                }
            }
        }
        // Vertical structure.
        for (f, &i) in self.id2.iter().enumerate() {
            if self.src2(i) != f || self.tgt2(i) != f {
                r.push(Violation::new("typing_2", vec![two(i)]));
            }
        }
        for a in 0..n2 {
            for &b in &self.starting_at(self.tgt2(a)) {
                match self.try_then2(a, b) {
                    None => r.push(Violation::new("totality_2", vec![two(a), two(b)])),
                    Some(c) => {
                        if self.src2(c) != self.src2(a) || self.tgt2(c) != self.tgt2(b) {
                            r.push(Violation::new("typing_2", vec![two(a), two(b)]));
                        }
                    }
                }
            }
            let cell = &self.onecells[self.src2(a)];
            for &f in &self.into(cell.src) {
                match self.try_whisk_l(f, a) {
                    None => r.push(Violation::new("totality_whisker", vec![one(f), two(a)])),
                    Some(c) => {
                        if self.src2(c) != self.then1(f, self.src2(a)) || self.tgt2(c) != self.then1(f, self.tgt2(a)) {
                            r.push(Violation::new("typing_whisker", vec![one(f), two(a)]));
                        }
                    }
                }
            }
            for &g in &self.out_of(cell.tgt) {
                match self.try_whisk_r(a, g) {
                    None => r.push(Violation::new("totality_whisker", vec![two(a), one(g)])),
                    Some(c) => {
                        if self.src2(c) != self.then1(self.src2(a), g) || self.tgt2(c) != self.then1(self.tgt2(a), g) {
                            r.push(Violation::new("typing_whisker", vec![two(a), one(g)]));
                        }
                    }
                }
            }
        }
        if !r.is_valid() {
            return r;
        }
        for a in 0..n2 {
            let (f, g) = (self.src2(a), self.tgt2(a));
            if self.then2(self.id2[f], a) != a || self.then2(a, self.id2[g]) != a {
                r.push(Violation::new("identity_2", vec![two(a)]));
            }
            for &b in &self.starting_at(g) {
                let ab = self.then2(a, b);
                for &c in &self.starting_at(self.tgt2(b)) {
                    if self.then2(ab, c) != self.then2(a, self.then2(b, c)) {
                        r.push(Violation::new("associativity_2", vec![two(a), two(b), two(c)]));
                    }
                }
            }
        }
        // Whiskering.
        for f in 0..n1 {
            let x = self.src1(f);
            let y = self.tgt1(f);
            for &k in &self.out_of(y) {
                if self.whisk_l(f, self.id2[k]) != self.id2[self.then1(f, k)] {
                    r.push(Violation::new("whisker_identity", vec![one(f), one(k)]));
                }
                if self.whisk_r(self.id2[f], k) != self.id2[self.then1(f, k)] {
                    r.push(Violation::new("whisker_identity", vec![one(f), one(k)]));
                }
            }
            let _ = x;
        }
        for a in 0..n2 {
            let cell = self.onecells[self.src2(a)].clone();
            if self.whisk_l(self.id1[cell.src], a) != a || self.whisk_r(a, self.id1[cell.tgt]) != a {
                r.push(Violation::new("whisker_unit", vec![two(a)]));
            }
            for &b in &self.starting_at(self.tgt2(a)) {
                let ab = self.then2(a, b);
                for &f in &self.into(cell.src) {
                    if self.whisk_l(f, ab) != self.then2(self.whisk_l(f, a), self.whisk_l(f, b)) {
                        r.push(Violation::new("whisker_functor", vec![one(f), two(a), two(b)]));
                    }
                }
                for &g in &self.out_of(cell.tgt) {
                    if self.whisk_r(ab, g) != self.then2(self.whisk_r(a, g), self.whisk_r(b, g)) {
                        r.push(Violation::new("whisker_functor", vec![two(a), two(b), one(g)]));
                    }
                }
            }
            for &f in &self.into(cell.src) {
                for &e in &self.into(self.src1(f)) {
                    if self.whisk_l(self.then1(e, f), a) != self.whisk_l(e, self.whisk_l(f, a)) {
                        r.push(Violation::new("whisker_assoc", vec![one(e), one(f), two(a)]));
                    }
                }
                for &g in &self.out_of(cell.tgt) {
                    if self.whisk_r(self.whisk_l(f, a), g) != self.whisk_l(f, self.whisk_r(a, g)) {
                        r.push(Violation::new("whisker_assoc", vec![one(f), two(a), one(g)]));
                    }
                }
            }
            for &g in &self.out_of(cell.tgt) {
                for &h in &self.out_of(self.tgt1(g)) {
                    if self.whisk_r(a, self.then1(g, h)) != self.whisk_r(self.whisk_r(a, g), h) {
                        r.push(Violation::new("whisker_assoc", vec![two(a), one(g), one(h)]));
                    }
                }
            }
        }
        // Interchange: a: f ⇒ f' then b: g ⇒ g' along the common object.
        for a in 0..n2 {
            let (f, f2) = (self.src2(a), self.tgt2(a));
            let y = self.tgt1(f);
            for b in 0..n2 {
                let (g, g2) = (self.src2(b), self.tgt2(b));
                if self.src1(g) != y {
                    continue;
                }
                let lr = self.then2(self.whisk_r(a, g), self.whisk_l(f2, b));
                let rl = self.then2(self.whisk_l(f, b), self.whisk_r(a, g2));
                if lr != rl {
                    r.push(Violation::new("interchange", vec![two(a), two(b)]));
                }
            }
        }
        r
    }

    fn out_of(&self, x: usize) -> Vec<usize> {
        (0..self.objects.len()).flat_map(|y| self.hom1(x, y).to_vec()).collect()
    }

    fn into(&self, y: usize) -> Vec<usize> {
        (0..self.objects.len()).flat_map(|x| self.hom1(x, y).to_vec()).collect()
    }

    fn starting_at(&self, f: usize) -> Vec<usize> {
        let (x, y) = (self.src1(f), self.tgt1(f));
        self.hom1(x, y).iter().flat_map(|&g| self.hom2(f, g).to_vec()).collect()
    }

    /// The same cells with 1-cells reversed. 2-cells keep their direction;
    /// left and right whiskering trade places.
    pub fn op1(&self) -> Fin2Category {
        let swap = |m: &FxHashMap<(usize, usize), usize>| m.iter().map(|(&(a, b), &c)| ((b, a), c)).collect();
        Fin2Category::assemble(
            self.objects.clone(),
            self.onecells
                .iter()
                .map(|c| Cell {
                    id: c.id.clone(),
                    src: c.tgt,
                    tgt: c.src,
                })
                .collect(),
            self.twocells.clone(),
            self.id1.clone(),
            self.id2.clone(),
            swap(&self.comp1),
            self.vcomp.clone(),
            swap(&self.rwhisk),
            swap(&self.lwhisk),
        )
        .expect("opposite of a 2-category")
    }
}

/// A 1-category viewed as a 2-category with identity 2-cells only.
pub fn locally_discrete(c: &FinCategory) -> Fin2Category {
    let mut b = Fin2Builder::new();
    for o in c.objects() {
        b.object(o.clone());
    }
    for m in c.morphisms() {
        b.onecell(m.id.clone(), m.src, m.tgt);
    }
    for m in c.morphisms() {
        b.twocell(format!("1_{}", m.id), b.n_twocells(), b.n_twocells());
    }
    b.build(
        |x| c.id(x),
        |f| f,
        |f, g| c.then(f, g),
        |a, _| a,
        |f, a| c.then(f, a),
        |a, g| c.then(a, g),
    )
    .expect("locally discrete 2-category")
}

/// A strict 2-functor.
#[derive(Clone, Debug)]
pub struct TwoFunctor {
    pub source: Arc<Fin2Category>,
    pub target: Arc<Fin2Category>,
    pub obj: Vec<usize>,
    pub one: Vec<usize>,
    pub two: Vec<usize>,
}

impl PartialEq for TwoFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.obj == other.obj
            && self.one == other.one
            && self.two == other.two
            && same2(&self.source, &other.source)
            && same2(&self.target, &other.target)
    }
}
impl Eq for TwoFunctor {}

pub fn same2(a: &Arc<Fin2Category>, b: &Arc<Fin2Category>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoFunctorData {
    pub object_map: BTreeMap<String, String>,
    pub onecell_map: BTreeMap<String, String>,
    pub twocell_map: BTreeMap<String, String>,
}

impl TwoFunctor {
    pub fn identity(c: &Arc<Fin2Category>) -> TwoFunctor {
        TwoFunctor {
            source: c.clone(),
            target: c.clone(),
            obj: (0..c.n_objects()).collect(),
            one: (0..c.n_onecells()).collect(),
            two: (0..c.n_twocells()).collect(),
        }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &TwoFunctor) -> TwoFunctor {
        TwoFunctor {
            source: self.source.clone(),
            target: next.target.clone(),
            obj: self.obj.iter().map(|&x| next.obj[x]).collect(),
            one: self.one.iter().map(|&x| next.one[x]).collect(),
            two: self.two.iter().map(|&x| next.two[x]).collect(),
        }
    }

    pub fn from_data(source: &Arc<Fin2Category>, target: &Arc<Fin2Category>, data: &TwoFunctorData) -> Result<TwoFunctor> {
        let f = Self::from_data_unchecked(source, target, data)?;
        let r = f.validate();
        if r.is_valid() {
            Ok(f)
        } else {
            Err(Error::Invalid {
                kind: "2-functor",
                report: r,
            })
        }
    }

    pub fn from_data_unchecked(
        source: &Arc<Fin2Category>,
        target: &Arc<Fin2Category>,
        data: &TwoFunctorData,
    ) -> Result<TwoFunctor> {
        let get = |m: &BTreeMap<String, String>, k: &str| {
            m.get(k)
                .cloned()
                .ok_or_else(|| Error::structure(format!("2-functor does not map `{k}`")))
        };
        let obj = source
            .objects()
            .iter()
            .map(|o| target.object(&get(&data.object_map, o)?))
            .collect::<Result<_>>()?;
        let one = source
            .onecells()
            .iter()
            .map(|c| target.onecell(&get(&data.onecell_map, &c.id)?))
            .collect::<Result<_>>()?;
        let two = source
            .twocells()
            .iter()
            .map(|c| target.twocell(&get(&data.twocell_map, &c.id)?))
            .collect::<Result<_>>()?;
        Ok(TwoFunctor {
            source: source.clone(),
            target: target.clone(),
            obj,
            one,
            two,
        })
    }

    pub fn to_data(&self) -> TwoFunctorData {
        let (s, t) = (&self.source, &self.target);
        TwoFunctorData {
            object_map: self
                .obj
                .iter()
                .enumerate()
                .map(|(i, &x)| (s.object_id(i).into(), t.object_id(x).into()))
                .collect(),
            onecell_map: self
                .one
                .iter()
                .enumerate()
                .map(|(i, &x)| (s.onecell_id(i).into(), t.onecell_id(x).into()))
                .collect(),
            twocell_map: self
                .two
                .iter()
                .enumerate()
                .map(|(i, &x)| (s.twocell_id(i).into(), t.twocell_id(x).into()))
                .collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let (c, d) = (&*self.source, &*self.target);
        let mut r = ValidationReport::new();
        for f in 0..c.n_onecells() {
            let g = self.one[f];
            if d.src1(g) != self.obj[c.src1(f)] || d.tgt1(g) != self.obj[c.tgt1(f)] {
                r.push(Violation::new("boundary", vec![c.onecell_id(f).into()]));
            }
        }
        for a in 0..c.n_twocells() {
            let b = self.two[a];
            if d.src2(b) != self.one[c.src2(a)] || d.tgt2(b) != self.one[c.tgt2(a)] {
                r.push(Violation::new("boundary", vec![c.twocell_id(a).into()]));
            }
        }
        if !r.is_valid() {
            return r;
        }
        for x in 0..c.n_objects() {
            if self.one[c.id1(x)] != d.id1(self.obj[x]) {
                r.push(Violation::new("identity", vec![c.object_id(x).into()]));
            }
        }
        for f in 0..c.n_onecells() {
            if self.two[c.id2(f)] != d.id2(self.one[f]) {
                r.push(Violation::new("identity_2", vec![c.onecell_id(f).into()]));
            }
        }
        for (&(f, g), &h) in &c.comp1 {
            if d.try_then1(self.one[f], self.one[g]) != Some(self.one[h]) {
                r.push(Violation::new("composition", vec![c.onecell_id(f).into(), c.onecell_id(g).into()]));
            }
        }
        for (&(a, b), &h) in &c.vcomp {
            if d.try_then2(self.two[a], self.two[b]) != Some(self.two[h]) {
                r.push(Violation::new("vertical", vec![c.twocell_id(a).into(), c.twocell_id(b).into()]));
            }
        }
        for (&(f, a), &h) in &c.lwhisk {
            if d.try_whisk_l(self.one[f], self.two[a]) != Some(self.two[h]) {
                r.push(Violation::new("whisker", vec![c.onecell_id(f).into(), c.twocell_id(a).into()]));
            }
        }
        for (&(a, g), &h) in &c.rwhisk {
            if d.try_whisk_r(self.two[a], self.one[g]) != Some(self.two[h]) {
                r.push(Violation::new("whisker", vec![c.twocell_id(a).into(), c.onecell_id(g).into()]));
            }
        }
        r
    }

    /// The same functor between 1-cell opposites.
    pub fn op1(&self, source: &Arc<Fin2Category>, target: &Arc<Fin2Category>) -> TwoFunctor {
        TwoFunctor {
            source: source.clone(),
            target: target.clone(),
            obj: self.obj.clone(),
            one: self.one.clone(),
            two: self.two.clone(),
        }
    }
}

/// A pseudonatural transformation `σ: F ⇒ G` with components
/// `σ_X: FX → GX` and invertible cells `σ_f: Ff ; σ_Y ⇒ σ_X ; Gf`.
#[derive(Clone, Debug)]
pub struct PseudoNat {
    pub source: TwoFunctor,
    pub target: TwoFunctor,
    pub comp: Vec<usize>,
    pub cell: Vec<usize>,
    /// Inverse witness of each `cell`.
    pub inv: Vec<usize>,
}

impl PartialEq for PseudoNat {
    fn eq(&self, other: &Self) -> bool {
        self.comp == other.comp
            && self.cell == other.cell
            && self.inv == other.inv
            && self.source == other.source
            && self.target == other.target
    }
}
impl Eq for PseudoNat {}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoNatData {
    pub components: BTreeMap<String, String>,
    pub cells: BTreeMap<String, String>,
    pub inverses: BTreeMap<String, String>,
}

impl PseudoNat {
    pub fn target_cat(&self) -> &Arc<Fin2Category> {
        &self.source.target
    }

    /// Identity transformation with identity cells.
    pub fn identity(f: &TwoFunctor) -> PseudoNat {
        let d = &f.target;
        let c = &f.source;
        let cell: Vec<usize> = (0..c.n_onecells()).map(|g| d.id2(f.one[g])).collect();
        PseudoNat {
            source: f.clone(),
            target: f.clone(),
            comp: f.obj.iter().map(|&x| d.id1(x)).collect(),
            inv: cell.clone(),
            cell,
        }
    }

    /// Vertical composite `self ; next`.
    pub fn then(&self, next: &PseudoNat) -> PseudoNat {
        let d = &**self.target_cat();
        let c = &*self.source.source;
        let comp: Vec<usize> = (0..c.n_objects()).map(|x| d.then1(self.comp[x], next.comp[x])).collect();
        let mut cell = Vec::new();
        let mut inv = Vec::new();
        for f in 0..c.n_onecells() {
            let (x, y) = (c.src1(f), c.tgt1(f));
            // Ff;σY;τY ⇒ σX;Gf;τY ⇒ σX;τX;Hf
            let a = d.then2(d.whisk_r(self.cell[f], next.comp[y]), d.whisk_l(self.comp[x], next.cell[f]));
            let b = d.then2(d.whisk_l(self.comp[x], next.inv[f]), d.whisk_r(self.inv[f], next.comp[y]));
            cell.push(a);
            inv.push(b);
        }
        PseudoNat {
            source: self.source.clone(),
            target: next.target.clone(),
            comp,
            cell,
            inv,
        }
    }

    /// `H ; self`: components `σ_{HX}`.
    pub fn pre(&self, h: &TwoFunctor) -> PseudoNat {
        PseudoNat {
            source: h.then(&self.source),
            target: h.then(&self.target),
            comp: h.obj.iter().map(|&x| self.comp[x]).collect(),
            cell: h.one.iter().map(|&f| self.cell[f]).collect(),
            inv: h.one.iter().map(|&f| self.inv[f]).collect(),
        }
    }

    /// `self ; K`: components `K(σ_X)`.
    pub fn post(&self, k: &TwoFunctor) -> PseudoNat {
        PseudoNat {
            source: self.source.then(k),
            target: self.target.then(k),
            comp: self.comp.iter().map(|&f| k.one[f]).collect(),
            cell: self.cell.iter().map(|&a| k.two[a]).collect(),
            inv: self.inv.iter().map(|&a| k.two[a]).collect(),
        }
    }

    pub fn from_data(source: &TwoFunctor, target: &TwoFunctor, data: &PseudoNatData) -> Result<PseudoNat> {
        let c = &source.source;
        let d = &source.target;
        let get = |m: &BTreeMap<String, String>, k: &str| {
            m.get(k)
                .cloned()
                .ok_or_else(|| Error::structure(format!("pseudonatural data missing at `{k}`")))
        };
        let comp = c
            .objects()
            .iter()
            .map(|o| d.onecell(&get(&data.components, o)?))
            .collect::<Result<_>>()?;
        let cell = c
            .onecells()
            .iter()
            .map(|f| d.twocell(&get(&data.cells, &f.id)?))
            .collect::<Result<_>>()?;
        let inv = c
            .onecells()
            .iter()
            .map(|f| d.twocell(&get(&data.inverses, &f.id)?))
            .collect::<Result<_>>()?;
        Ok(PseudoNat {
            source: source.clone(),
            target: target.clone(),
            comp,
            cell,
            inv,
        })
    }

    pub fn to_data(&self) -> PseudoNatData {
        let c = &self.source.source;
        let d = &self.source.target;
        PseudoNatData {
            components: self
                .comp
                .iter()
                .enumerate()
                .map(|(x, &f)| (c.object_id(x).into(), d.onecell_id(f).into()))
                .collect(),
            cells: self
                .cell
                .iter()
                .enumerate()
                .map(|(f, &a)| (c.onecell_id(f).into(), d.twocell_id(a).into()))
                .collect(),
            inverses: self
                .inv
                .iter()
                .enumerate()
                .map(|(f, &a)| (c.onecell_id(f).into(), d.twocell_id(a).into()))
                .collect(),
        }
    }

    /// The transformation `G° ⇒ F°` between 1-cell opposites, cells inverted.
    pub fn op1(&self, source: &TwoFunctor, target: &TwoFunctor) -> PseudoNat {
        PseudoNat {
            source: source.clone(),
            target: target.clone(),
            comp: self.comp.clone(),
            cell: self.inv.clone(),
            inv: self.cell.clone(),
        }
    }
}

/// Every violated pseudonaturality equation.
pub fn check_pseudonatural(p: &PseudoNat) -> ValidationReport {
    let (f, g) = (&p.source, &p.target);
    let c = &*f.source;
    let d = &*f.target;
    let mut r = ValidationReport::new();
    if p.comp.len() != c.n_objects() || p.cell.len() != c.n_onecells() || p.inv.len() != c.n_onecells() {
        r.structural("component counts do not match the source 2-category");
        return r;
    }
    for x in 0..c.n_objects() {
        let s = p.comp[x];
        if d.src1(s) != f.obj[x] || d.tgt1(s) != g.obj[x] {
            r.push(Violation::new("boundary", vec![c.object_id(x).into()]));
        }
    }
    if !r.is_valid() {
        return r;
    }
    for h in 0..c.n_onecells() {
        let (x, y) = (c.src1(h), c.tgt1(h));
        let src = d.then1(f.one[h], p.comp[y]);
        let tgt = d.then1(p.comp[x], g.one[h]);
        let a = p.cell[h];
        if d.src2(a) != src || d.tgt2(a) != tgt {
            r.push(Violation::new("boundary", vec![c.onecell_id(h).into()]));
            continue;
        }
        let b = p.inv[h];
        if d.src2(b) != tgt || d.tgt2(b) != src || d.then2(a, b) != d.id2(src) || d.then2(b, a) != d.id2(tgt) {
            r.push(Violation::new("invertibility", vec![c.onecell_id(h).into()]));
        }
    }
    if !r.is_valid() {
        return r;
    }
    for x in 0..c.n_objects() {
        if p.cell[c.id1(x)] != d.id2(p.comp[x]) {
            r.push(Violation::new("unit", vec![c.object_id(x).into()]));
        }
    }
    for (&(h, k), &hk) in &c.comp1 {
        let z = c.tgt1(k);
        let _ = z;
        let y = c.tgt1(h);
        let x = c.src1(h);
        let _ = (x, y);
        let lhs = p.cell[hk];
        let rhs = d.then2(
            d.whisk_l(f.one[h], p.cell[k]),
            d.whisk_r(p.cell[h], g.one[k]),
        );
        if lhs != rhs {
            r.push(Violation::new("composition", vec![c.onecell_id(h).into(), c.onecell_id(k).into()]));
        }
    }
    for a in 0..c.n_twocells() {
        let (h, h2) = (c.src2(a), c.tgt2(a));
        let (x, y) = (c.src1(h), c.tgt1(h));
        let lhs = d.then2(d.whisk_r(f.two[a], p.comp[y]), p.cell[h2]);
        let rhs = d.then2(p.cell[h], d.whisk_l(p.comp[x], g.two[a]));
        if lhs != rhs {
            r.push(Violation::new("naturality", vec![c.twocell_id(a).into()]));
        }
    }
    r
}

/// A modification `Γ: σ ⇛ τ` with components `Γ_X: σ_X ⇒ τ_X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modification {
    pub source: PseudoNat,
    pub target: PseudoNat,
    pub comp: Vec<usize>,
    /// Inverse witnesses, present for invertible modifications.
    pub inv: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModificationData {
    pub components: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub inverses: BTreeMap<String, String>,
}

impl Modification {
    pub fn identity(p: &PseudoNat) -> Modification {
        let d = p.target_cat();
        let comp: Vec<usize> = p.comp.iter().map(|&f| d.id2(f)).collect();
        Modification {
            source: p.clone(),
            target: p.clone(),
            inv: Some(comp.clone()),
            comp,
        }
    }

    pub fn to_data(&self) -> ModificationData {
        let c = &self.source.source.source;
        let d = self.source.target_cat();
        let m = |v: &[usize]| {
            v.iter()
                .enumerate()
                .map(|(x, &a)| (c.object_id(x).to_string(), d.twocell_id(a).to_string()))
                .collect()
        };
        ModificationData {
            components: m(&self.comp),
            inverses: self.inv.as_deref().map(m).unwrap_or_default(),
        }
    }

    pub fn from_data(source: &PseudoNat, target: &PseudoNat, data: &ModificationData) -> Result<Modification> {
        let c = &source.source.source;
        let d = source.target_cat();
        let read = |m: &BTreeMap<String, String>| -> Result<Vec<usize>> {
            c.objects()
                .iter()
                .map(|o| {
                    let id = m
                        .get(o)
                        .ok_or_else(|| Error::structure(format!("modification missing component at `{o}`")))?;
                    d.twocell(id)
                })
                .collect()
        };
        let comp = read(&data.components)?;
        let inv = if data.inverses.is_empty() {
            None
        } else {
            Some(read(&data.inverses)?)
        };
        Ok(Modification {
            source: source.clone(),
            target: target.clone(),
            comp,
            inv,
        })
    }

    /// The inverse modification, when witnesses are present.
    pub fn inverse(&self) -> Option<Modification> {
        Some(Modification {
            source: self.target.clone(),
            target: self.source.clone(),
            comp: self.inv.clone()?,
            inv: Some(self.comp.clone()),
        })
    }
}

/// Every violated modification equation.
pub fn check_modification(m: &Modification) -> ValidationReport {
    let (s, t) = (&m.source, &m.target);
    let (f, g) = (&s.source, &s.target);
    let c = &*f.source;
    let d = &*f.target;
    let mut r = ValidationReport::new();
    for x in 0..c.n_objects() {
        let a = m.comp[x];
        if d.src2(a) != s.comp[x] || d.tgt2(a) != t.comp[x] {
            r.push(Violation::new("boundary", vec![c.object_id(x).into()]));
        }
        if let Some(inv) = &m.inv {
            let b = inv[x];
            let ok = d.src2(b) == t.comp[x]
                && d.tgt2(b) == s.comp[x]
                && d.try_then2(a, b) == Some(d.id2(s.comp[x]))
                && d.try_then2(b, a) == Some(d.id2(t.comp[x]));
            if !ok {
                r.push(Violation::new("invertibility", vec![c.object_id(x).into()]));
            }
        }
    }
    if !r.is_valid() {
        return r;
    }
    for h in 0..c.n_onecells() {
        let (x, y) = (c.src1(h), c.tgt1(h));
        let lhs = d.then2(s.cell[h], d.whisk_r(m.comp[x], g.one[h]));
        let rhs = d.then2(d.whisk_l(f.one[h], m.comp[y]), t.cell[h]);
        if lhs != rhs {
            r.push(Violation::new("modification", vec![c.onecell_id(h).into()]));
        }
    }
    r
}

/// A pasting expression over cells of a fixed 2-category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PastingExpr {
    Cell2(usize),
    Id2(usize),
    /// First, then second.
    VComp(Box<PastingExpr>, Box<PastingExpr>),
    /// Precompose with a 1-cell.
    LWhisk(usize, Box<PastingExpr>),
    /// Postcompose with a 1-cell.
    RWhisk(Box<PastingExpr>, usize),
}

/// Wire form of a pasting expression.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum PastingExprData {
    Cell { id: String },
    Id2 { onecell: String },
    Vcomp { first: Box<PastingExprData>, second: Box<PastingExprData> },
    Lwhisk { onecell: String, expr: Box<PastingExprData> },
    Rwhisk { expr: Box<PastingExprData>, onecell: String },
}

impl PastingExpr {
    pub fn vcomp(a: PastingExpr, b: PastingExpr) -> PastingExpr {
        PastingExpr::VComp(Box::new(a), Box::new(b))
    }

    pub fn lwhisk(f: usize, a: PastingExpr) -> PastingExpr {
        PastingExpr::LWhisk(f, Box::new(a))
    }

    pub fn rwhisk(a: PastingExpr, g: usize) -> PastingExpr {
        PastingExpr::RWhisk(Box::new(a), g)
    }

    pub fn size(&self) -> usize {
        match self {
            PastingExpr::Cell2(_) | PastingExpr::Id2(_) => 1,
            PastingExpr::VComp(a, b) => 1 + a.size() + b.size(),
            PastingExpr::LWhisk(_, a) | PastingExpr::RWhisk(a, _) => 1 + a.size(),
        }
    }

    pub fn from_data(c: &Fin2Category, d: &PastingExprData) -> Result<PastingExpr> {
        Ok(match d {
            PastingExprData::Cell { id } => PastingExpr::Cell2(c.twocell(id)?),
            PastingExprData::Id2 { onecell } => PastingExpr::Id2(c.onecell(onecell)?),
            PastingExprData::Vcomp { first, second } => {
                PastingExpr::vcomp(Self::from_data(c, first)?, Self::from_data(c, second)?)
            }
            PastingExprData::Lwhisk { onecell, expr } => PastingExpr::lwhisk(c.onecell(onecell)?, Self::from_data(c, expr)?),
            PastingExprData::Rwhisk { expr, onecell } => PastingExpr::rwhisk(Self::from_data(c, expr)?, c.onecell(onecell)?),
        })
    }

    pub fn to_data(&self, c: &Fin2Category) -> PastingExprData {
        match self {
            PastingExpr::Cell2(a) => PastingExprData::Cell {
                id: c.twocell_id(*a).into(),
            },
            PastingExpr::Id2(f) => PastingExprData::Id2 {
                onecell: c.onecell_id(*f).into(),
            },
            PastingExpr::VComp(a, b) => PastingExprData::Vcomp {
                first: Box::new(a.to_data(c)),
                second: Box::new(b.to_data(c)),
            },
            PastingExpr::LWhisk(f, a) => PastingExprData::Lwhisk {
                onecell: c.onecell_id(*f).into(),
                expr: Box::new(a.to_data(c)),
            },
            PastingExpr::RWhisk(a, g) => PastingExprData::Rwhisk {
                expr: Box::new(a.to_data(c)),
                onecell: c.onecell_id(*g).into(),
            },
        }
    }
}

/// Source and target 1-cells of a well-typed expression.
pub fn type_of(c: &Fin2Category, e: &PastingExpr) -> Result<(usize, usize)> {
    let mut path = vec!["root"];
    type_at(c, e, &mut path)
}

/// `path` names the current node; it is only rendered on error.
fn type_at(c: &Fin2Category, e: &PastingExpr, path: &mut Vec<&'static str>) -> Result<(usize, usize)> {
    let ill = |path: &[&str], reason: String| Error::IllTyped {
        node: path.join("."),
        reason,
    };
    let child = |a: &PastingExpr, step: &'static str, path: &mut Vec<&'static str>| {
        path.push(step);
        let r = type_at(c, a, path);
        path.pop();
        r
    };
    match e {
        PastingExpr::Cell2(a) => {
            if *a >= c.n_twocells() {
                return Err(ill(path, format!("no 2-cell with index {a}")));
            }
            Ok((c.src2(*a), c.tgt2(*a)))
        }
        PastingExpr::Id2(f) => {
            if *f >= c.n_onecells() {
                return Err(ill(path, format!("no 1-cell with index {f}")));
            }
            Ok((*f, *f))
        }
        PastingExpr::VComp(a, b) => {
            let (s, m) = child(a, "first", path)?;
            let (m2, t) = child(b, "second", path)?;
            if m != m2 {
                return Err(ill(
                    path,
                    format!(
                        "vertical composite of `{}` with a cell out of `{}`",
                        c.onecell_id(m),
                        c.onecell_id(m2)
                    ),
                ));
            }
            Ok((s, t))
        }
        PastingExpr::LWhisk(f, a) => {
            let (s, t) = child(a, "expr", path)?;
            match (c.try_then1(*f, s), c.try_then1(*f, t)) {
                (Some(fs), Some(ft)) => Ok((fs, ft)),
                _ => Err(ill(
                    path,
                    format!("`{}` does not precompose with `{}`", c.onecell_id(*f), c.onecell_id(s)),
                )),
            }
        }
        PastingExpr::RWhisk(a, g) => {
            let (s, t) = child(a, "expr", path)?;
            match (c.try_then1(s, *g), c.try_then1(t, *g)) {
                (Some(sg), Some(tg)) => Ok((sg, tg)),
                _ => Err(ill(
                    path,
                    format!("`{}` does not postcompose with `{}`", c.onecell_id(*g), c.onecell_id(s)),
                )),
            }
        }
    }
}

/// Evaluate a pasting expression to a 2-cell.
pub fn eval_pasting(c: &Fin2Category, e: &PastingExpr) -> Result<usize> {
    type_of(c, e)?;
    Ok(eval_typed(c, e))
}

/// Evaluate an expression already known to be well typed.
pub fn eval_typed(c: &Fin2Category, e: &PastingExpr) -> usize {
    match e {
        PastingExpr::Cell2(a) => *a,
        PastingExpr::Id2(f) => c.id2(*f),
        PastingExpr::VComp(a, b) => c.then2(eval_typed(c, a), eval_typed(c, b)),
        PastingExpr::LWhisk(f, a) => c.whisk_l(*f, eval_typed(c, a)),
        PastingExpr::RWhisk(a, g) => c.whisk_r(eval_typed(c, a), *g),
    }
}

/// Apply one random value-preserving rewrite somewhere in `e`:
/// reassociation, distributing whiskers over composites, unit insertion or
/// removal, whisker merging, and interchange.
pub fn random_rewrite<R: Rng>(c: &Fin2Category, e: &PastingExpr, rng: &mut R) -> PastingExpr {
    let mut out = e.clone();
    random_rewrite_in_place(c, &mut out, rng);
    out
}

/// [`random_rewrite`] without copying the untouched parts of `e`.
pub fn random_rewrite_in_place<R: Rng>(c: &Fin2Category, e: &mut PastingExpr, rng: &mut R) {
    let target = rng.gen_range(0..e.size());
    let node = nth_node(e, target);
    *node = rewrite_here(c, node, rng);
}

/// The `n`-th node in pre-order.
fn nth_node(e: &mut PastingExpr, mut n: usize) -> &mut PastingExpr {
    use PastingExpr::*;
    let mut cur = e;
    loop {
        if n == 0 {
            return cur;
        }
        n -= 1;
        cur = match cur {
            Cell2(_) | Id2(_) => unreachable!("index within size"),
            VComp(a, b) => {
                let k = a.size();
                if n < k {
                    a
                } else {
                    n -= k;
                    b
                }
            }
            LWhisk(_, a) | RWhisk(a, _) => a,
        };
    }
}

fn rewrite_here<R: Rng>(c: &Fin2Category, e: &PastingExpr, rng: &mut R) -> PastingExpr {
    use PastingExpr::*;
    let mut options: Vec<PastingExpr> = Vec::new();
    let (s, t) = type_of(c, e).expect("rewrites only run on typed expressions");
    options.push(PastingExpr::vcomp(Id2(s), e.clone()));
    options.push(PastingExpr::vcomp(e.clone(), Id2(t)));
    match e {
        VComp(a, b) => {
            if let VComp(a1, a2) = &**a {
                options.push(PastingExpr::vcomp((**a1).clone(), PastingExpr::vcomp((**a2).clone(), (**b).clone())));
            }
            if let VComp(b1, b2) = &**b {
                options.push(PastingExpr::vcomp(PastingExpr::vcomp((**a).clone(), (**b1).clone()), (**b2).clone()));
            }
            if let Id2(_) = &**a {
                options.push((**b).clone());
            }
            if let Id2(_) = &**b {
                options.push((**a).clone());
            }
            // Interchange: (α ◁ g) ; (f' ▷ β)  ↔  (f ▷ β) ; (α ◁ g').
            if let (RWhisk(alpha, g), LWhisk(f2, beta)) = (&**a, &**b) {
                if let (Ok((f, ft)), Ok((gs, g2))) = (type_of(c, alpha), type_of(c, beta)) {
                    if gs == *g && ft == *f2 {
                        options.push(PastingExpr::vcomp(
                            PastingExpr::lwhisk(f, (**beta).clone()),
                            PastingExpr::rwhisk((**alpha).clone(), g2),
                        ));
                    }
                }
            }
            if let (LWhisk(f, beta), RWhisk(alpha, g2)) = (&**a, &**b) {
                if let (Ok((fs, f2)), Ok((g, gt))) = (type_of(c, alpha), type_of(c, beta)) {
                    if fs == *f && gt == *g2 {
                        options.push(PastingExpr::vcomp(
                            PastingExpr::rwhisk((**alpha).clone(), g),
                            PastingExpr::lwhisk(f2, (**beta).clone()),
                        ));
                    }
                }
            }
        }
        LWhisk(f, a) => {
            if let VComp(a1, a2) = &**a {
                options.push(PastingExpr::vcomp(
                    PastingExpr::lwhisk(*f, (**a1).clone()),
                    PastingExpr::lwhisk(*f, (**a2).clone()),
                ));
            }
            if let LWhisk(g, inner) = &**a {
                options.push(PastingExpr::lwhisk(c.then1(*f, *g), (**inner).clone()));
            }
            if let RWhisk(inner, g) = &**a {
                options.push(PastingExpr::rwhisk(PastingExpr::lwhisk(*f, (**inner).clone()), *g));
            }
            if let Id2(g) = &**a {
                options.push(Id2(c.then1(*f, *g)));
            }
        }
        RWhisk(a, g) => {
            if let VComp(a1, a2) = &**a {
                options.push(PastingExpr::vcomp(
                    PastingExpr::rwhisk((**a1).clone(), *g),
                    PastingExpr::rwhisk((**a2).clone(), *g),
                ));
            }
            if let RWhisk(inner, f) = &**a {
                options.push(PastingExpr::rwhisk((**inner).clone(), c.then1(*f, *g)));
            }
            if let LWhisk(f, inner) = &**a {
                options.push(PastingExpr::lwhisk(*f, PastingExpr::rwhisk((**inner).clone(), *g)));
            }
            if let Id2(f) = &**a {
                options.push(Id2(c.then1(*f, *g)));
            }
        }
        Cell2(_) | Id2(_) => {
            let x = c.src1(s);
            let y = c.tgt1(s);
            options.push(PastingExpr::lwhisk(c.id1(x), e.clone()));
            options.push(PastingExpr::rwhisk(e.clone(), c.id1(y)));
        }
    }
    let k = rng.gen_range(0..options.len());
    options.swap_remove(k)
}

/// A hom-category `C(x, y)` with the cells behind its objects and
/// morphisms.
#[derive(Clone, Debug)]
pub struct HomView {
    pub cat: Arc<FinCategory>,
    /// 1-cell behind each object.
    pub ones: Vec<usize>,
    /// 2-cell behind each morphism.
    pub cells: Vec<usize>,
    obj_of: FxHashMap<usize, usize>,
    mor_of: FxHashMap<usize, usize>,
}

impl HomView {
    pub fn object_of(&self, f: usize) -> Option<usize> {
        self.obj_of.get(&f).copied()
    }

    pub fn morphism_of(&self, a: usize) -> Option<usize> {
        self.mor_of.get(&a).copied()
    }
}

impl Fin2Category {
    pub fn hom_view(&self, x: usize, y: usize) -> HomView {
        let ones = self.hom1(x, y).to_vec();
        let pos: FxHashMap<usize, usize> = ones.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut mors = Vec::new();
        let mut cells = Vec::new();
        for &f in &ones {
            for &g in &ones {
                for &a in self.hom2(f, g) {
                    mors.push((self.twocell_id(a).to_string(), pos[&f], pos[&g]));
                    cells.push(a);
                }
            }
        }
        let index: FxHashMap<usize, usize> = cells.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let (cat, obj, mor) = FinCategory::from_parts_indexed(
            ones.iter().map(|&f| self.onecell_id(f).to_string()).collect(),
            mors,
            |i| index[&self.id2(ones[i])],
            |a, b| index[&self.then2(cells[a], cells[b])],
        )
        .expect("hom-category of a valid 2-category");
        let mut by_obj = vec![0; ones.len()];
        for (i, &o) in obj.iter().enumerate() {
            by_obj[o] = ones[i];
        }
        let mut by_mor = vec![0; cells.len()];
        for (i, &m) in mor.iter().enumerate() {
            by_mor[m] = cells[i];
        }
        HomView {
            cat: Arc::new(cat),
            obj_of: by_obj.iter().enumerate().map(|(i, &f)| (f, i)).collect(),
            mor_of: by_mor.iter().enumerate().map(|(i, &a)| (a, i)).collect(),
            ones: by_obj,
            cells: by_mor,
        }
    }
}

/// Candidate images for a constrained 2-functor search. Each closure sees
/// the assignment made so far.
pub struct Candidates<'a> {
    pub obj: Box<dyn Fn(usize) -> Vec<usize> + 'a>,
    pub one: Box<dyn Fn(&[usize], usize) -> Vec<usize> + 'a>,
    pub two: Box<dyn Fn(&[usize], &[usize], usize) -> Vec<usize> + 'a>,
}

impl<'a> Candidates<'a> {
    /// Every type-correct image.
    pub fn all(source: &'a Fin2Category, target: &'a Fin2Category) -> Self {
        Candidates {
            obj: Box::new(move |_| (0..target.n_objects()).collect()),
            one: Box::new(move |obj, f| target.hom1(obj[source.src1(f)], obj[source.tgt1(f)]).to_vec()),
            two: Box::new(move |_, one, a| target.hom2(one[source.src2(a)], one[source.tgt2(a)]).to_vec()),
        }
    }
}

/// Every strict 2-functor `source → target` whose images are drawn from
/// `cands`, by backtracking with early checks of the preserved
/// structure. The guard bounds the number of search nodes.
pub fn search_2functors(
    source: &Arc<Fin2Category>,
    target: &Arc<Fin2Category>,
    cands: &Candidates,
    guard: &crate::guard::Guard,
) -> Result<Vec<TwoFunctor>> {
    let (c, d) = (&**source, &**target);
    let top = |xs: &[usize]| xs.iter().copied().max().unwrap_or(0);
    let mut comp_at: Vec<Vec<[usize; 3]>> = vec![Vec::new(); c.n_onecells()];
    for (&(f, g), &h) in &c.comp1 {
        comp_at[top(&[f, g, h])].push([f, g, h]);
    }
    let mut id1_at: FxHashMap<usize, usize> = FxHashMap::default();
    for x in 0..c.n_objects() {
        id1_at.insert(c.id1(x), x);
    }
    // (kind, a, b, result): 0 vertical, 1 left whisker (a is a 1-cell), 2 right whisker (b is a 1-cell)
    let mut two_at: Vec<Vec<(u8, usize, usize, usize)>> = vec![Vec::new(); c.n_twocells()];
    for (&(a, b), &r) in &c.vcomp {
        two_at[top(&[a, b, r])].push((0, a, b, r));
    }
    for (&(f, a), &r) in &c.lwhisk {
        two_at[top(&[a, r])].push((1, f, a, r));
    }
    for (&(a, g), &r) in &c.rwhisk {
        two_at[top(&[a, r])].push((2, a, g, r));
    }
    let mut id2_at: FxHashMap<usize, usize> = FxHashMap::default();
    for f in 0..c.n_onecells() {
        id2_at.insert(c.id2(f), f);
    }

    struct St {
        obj: Vec<usize>,
        one: Vec<usize>,
        two: Vec<usize>,
        nodes: u128,
        out: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)>,
    }
    let mut st = St {
        obj: Vec::new(),
        one: Vec::new(),
        two: Vec::new(),
        nodes: 0,
        out: Vec::new(),
    };
    let tick = |st: &mut St| -> Result<()> {
        st.nodes += 1;
        guard.check("2-functor search", st.nodes)
    };

    fn rec_two(
        st: &mut St,
        a: usize,
        c: &Fin2Category,
        d: &Fin2Category,
        cands: &Candidates,
        two_at: &[Vec<(u8, usize, usize, usize)>],
        id2_at: &FxHashMap<usize, usize>,
        tick: &dyn Fn(&mut St) -> Result<()>,
    ) -> Result<()> {
        if a == c.n_twocells() {
            st.out.push((st.obj.clone(), st.one.clone(), st.two.clone()));
            return Ok(());
        }
        let (s, t) = (st.one[c.src2(a)], st.one[c.tgt2(a)]);
        for b in (cands.two)(&st.obj, &st.one, a) {
            tick(st)?;
            if d.src2(b) != s || d.tgt2(b) != t {
                continue;
            }
            if let Some(&f) = id2_at.get(&a) {
                if b != d.id2(st.one[f]) {
                    continue;
                }
            }
            st.two.push(b);
            let ok = two_at[a].iter().all(|&(k, x, y, r)| match k {
                0 => d.try_then2(st.two[x], st.two[y]) == Some(st.two[r]),
                1 => d.try_whisk_l(st.one[x], st.two[y]) == Some(st.two[r]),
                _ => d.try_whisk_r(st.two[x], st.one[y]) == Some(st.two[r]),
            });
            if ok {
                rec_two(st, a + 1, c, d, cands, two_at, id2_at, tick)?;
            }
            st.two.pop();
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn rec_one(
        st: &mut St,
        f: usize,
        c: &Fin2Category,
        d: &Fin2Category,
        cands: &Candidates,
        comp_at: &[Vec<[usize; 3]>],
        id1_at: &FxHashMap<usize, usize>,
        two_at: &[Vec<(u8, usize, usize, usize)>],
        id2_at: &FxHashMap<usize, usize>,
        tick: &dyn Fn(&mut St) -> Result<()>,
    ) -> Result<()> {
        if f == c.n_onecells() {
            return rec_two(st, 0, c, d, cands, two_at, id2_at, tick);
        }
        let (s, t) = (st.obj[c.src1(f)], st.obj[c.tgt1(f)]);
        for g in (cands.one)(&st.obj, f) {
            tick(st)?;
            if d.src1(g) != s || d.tgt1(g) != t {
                continue;
            }
            if let Some(&x) = id1_at.get(&f) {
                if g != d.id1(st.obj[x]) {
                    continue;
                }
            }
            st.one.push(g);
            let ok = comp_at[f]
                .iter()
                .all(|&[a, b, h]| d.try_then1(st.one[a], st.one[b]) == Some(st.one[h]));
            if ok {
                rec_one(st, f + 1, c, d, cands, comp_at, id1_at, two_at, id2_at, tick)?;
            }
            st.one.pop();
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn rec_obj(
        st: &mut St,
        x: usize,
        c: &Fin2Category,
        d: &Fin2Category,
        cands: &Candidates,
        comp_at: &[Vec<[usize; 3]>],
        id1_at: &FxHashMap<usize, usize>,
        two_at: &[Vec<(u8, usize, usize, usize)>],
        id2_at: &FxHashMap<usize, usize>,
        tick: &dyn Fn(&mut St) -> Result<()>,
    ) -> Result<()> {
        if x == c.n_objects() {
            return rec_one(st, 0, c, d, cands, comp_at, id1_at, two_at, id2_at, tick);
        }
        for y in (cands.obj)(x) {
            tick(st)?;
            st.obj.push(y);
            rec_obj(st, x + 1, c, d, cands, comp_at, id1_at, two_at, id2_at, tick)?;
            st.obj.pop();
        }
        Ok(())
    }

    rec_obj(&mut st, 0, c, d, cands, &comp_at, &id1_at, &two_at, &id2_at, &tick)?;
    Ok(st
        .out
        .into_iter()
        .map(|(obj, one, two)| TwoFunctor {
            source: source.clone(),
            target: target.clone(),
            obj,
            one,
            two,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    #[test]
    fn search_counts_small_2functors() {
        let g = crate::guard::Guard::default();
        let w = Arc::new(locally_discrete(&corpus::walking_arrow()));
        let fs = search_2functors(&w, &w, &Candidates::all(&w, &w), &g).unwrap();
        assert_eq!(fs.len(), 3);
        let z = Arc::new(corpus::z2(&corpus::terminal_cat()));
        let fs = search_2functors(&z, &z, &Candidates::all(&z, &z), &g).unwrap();
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|f| f.validate().is_valid()));
    }

    #[test]
    fn hom_view_tracks_cells() {
        let z = corpus::z2(&corpus::walking_arrow());
        let (a, b) = (z.object("a").unwrap(), z.object("b").unwrap());
        let h = z.hom_view(a, b);
        assert_eq!(h.cat.n_objects(), 1);
        assert_eq!(h.cat.n_morphisms(), 2);
        for (m, &cell) in h.cells.iter().enumerate() {
            assert_eq!(h.morphism_of(cell), Some(m));
        }
    }

    #[test]
    fn locally_discrete_sizes() {
        let t = locally_discrete(&corpus::terminal_cat());
        assert_eq!((t.n_objects(), t.n_onecells(), t.n_twocells()), (1, 1, 1));
        let w = locally_discrete(&corpus::walking_arrow());
        assert_eq!(w.n_objects(), 2);
        assert!(w.validate().is_valid());
        let s = locally_discrete(&corpus::span_to_terminal());
        assert!(s.validate().is_valid());
        for f in 0..s.n_onecells() {
            for g in 0..s.n_onecells() {
                assert_eq!(s.hom2(f, g).len(), usize::from(f == g));
            }
        }
    }

    #[test]
    fn unit_laws_of_evaluation() {
        let w = locally_discrete(&corpus::walking_arrow());
        let f = w.onecell("f").unwrap();
        assert_eq!(eval_pasting(&w, &PastingExpr::Id2(f)).unwrap(), w.id2(f));
        let beta = w.id2(f);
        let e = PastingExpr::vcomp(PastingExpr::Id2(f), PastingExpr::Cell2(beta));
        assert_eq!(eval_pasting(&w, &e).unwrap(), beta);
    }

    #[test]
    fn ill_typed_expression_names_the_node() {
        let w = locally_discrete(&corpus::walking_arrow());
        let f = w.onecell("f").unwrap();
        let ida = w.onecell("id_a").unwrap();
        let e = PastingExpr::vcomp(PastingExpr::Id2(f), PastingExpr::Id2(ida));
        match eval_pasting(&w, &e) {
            Err(Error::IllTyped { node, .. }) => assert_eq!(node, "root"),
            other => panic!("expected a typing error, got {other:?}"),
        }
        let e = PastingExpr::lwhisk(f, PastingExpr::Id2(f));
        assert!(matches!(eval_pasting(&w, &e), Err(Error::IllTyped { .. })));
    }

    #[test]
    fn z2_categories_satisfy_interchange() {
        for c in [corpus::z2(&corpus::terminal_cat()), corpus::z2(&corpus::walking_arrow())] {
            assert!(c.validate().is_valid());
        }
    }

    #[test]
    fn nesting_does_not_change_value() {
        let c = corpus::z2(&corpus::walking_arrow());
        let f = c.onecell("f").unwrap();
        let s = c.twocell("f^1").unwrap();
        let left = PastingExpr::vcomp(PastingExpr::vcomp(PastingExpr::Cell2(s), PastingExpr::Cell2(s)), PastingExpr::Cell2(s));
        let right = PastingExpr::vcomp(PastingExpr::Cell2(s), PastingExpr::vcomp(PastingExpr::Cell2(s), PastingExpr::Cell2(s)));
        assert_eq!(eval_pasting(&c, &left).unwrap(), eval_pasting(&c, &right).unwrap());
        assert_eq!(eval_pasting(&c, &left).unwrap(), s);
        let _ = f;
    }

    #[test]
    fn random_rewrites_preserve_value() {
        let c = corpus::z2(&corpus::walking_arrow());
        let f = c.onecell("f").unwrap();
        let ida = c.onecell("id_a").unwrap();
        let s = c.twocell("f^1").unwrap();
        let sa = c.twocell("id_a^1").unwrap();
        let e = PastingExpr::vcomp(
            PastingExpr::lwhisk(ida, PastingExpr::Cell2(s)),
            PastingExpr::rwhisk(PastingExpr::Cell2(sa), f),
        );
        let v = eval_pasting(&c, &e).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut cur = e;
        for _ in 0..200 {
            cur = random_rewrite(&c, &cur, &mut rng);
            if cur.size() > 60 {
                cur = PastingExpr::Cell2(eval_pasting(&c, &cur).unwrap());
            }
            assert_eq!(eval_pasting(&c, &cur).unwrap(), v);
        }
    }

    #[test]
    fn identity_pseudonatural_is_valid() {
        let c = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let id = TwoFunctor::identity(&c);
        assert!(id.validate().is_valid());
        let p = PseudoNat::identity(&id);
        assert!(check_pseudonatural(&p).is_valid());
        assert!(check_modification(&Modification::identity(&p)).is_valid());
    }

    #[test]
    fn perturbed_pseudonatural_is_reported() {
        let c = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let id = TwoFunctor::identity(&c);
        let mut p = PseudoNat::identity(&id);
        let f = c.onecell("f").unwrap();
        // Replace σ_f by a cell whose recorded inverse is wrong.
        p.cell[f] = c.twocell("f^1").unwrap();
        let r = check_pseudonatural(&p);
        assert!(r.violations_of("invertibility").any(|v| v.at == vec!["f".to_string()]));
    }

    #[test]
    fn perturbed_modification_is_reported() {
        let c = Arc::new(corpus::z2(&corpus::walking_arrow()));
        let id = TwoFunctor::identity(&c);
        let p = PseudoNat::identity(&id);
        let mut m = Modification::identity(&p);
        let a = c.object("a").unwrap();
        m.comp[a] = c.twocell("id_a^1").unwrap();
        m.inv = None;
        let r = check_modification(&m);
        assert!(r.violations_of("modification").any(|v| v.at == vec!["f".to_string()]));
    }

    #[test]
    fn op1_is_involutive_and_valid() {
        let c = corpus::z2(&corpus::walking_arrow());
        let o = c.op1();
        assert!(o.validate().is_valid());
        assert_eq!(o.op1(), c);
    }

    #[test]
    fn json_round_trip() {
        let c = corpus::z2(&corpus::walking_arrow());
        let s = serde_json::to_string(&c.to_data()).unwrap();
        let back = Fin2Category::from_data(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, c);
        let e = PastingExpr::lwhisk(c.onecell("f").unwrap(), PastingExpr::Cell2(c.twocell("id_b^1").unwrap()));
        let d = e.to_data(&c);
        let txt = serde_json::to_string(&d).unwrap();
        assert!(txt.contains("\"op\":\"lwhisk\""));
        let back: PastingExprData = serde_json::from_str(&txt).unwrap();
        assert_eq!(PastingExpr::from_data(&c, &back).unwrap(), e);
    }
}
