//! Named small instances and exhaustive generators.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fincat::{enumerate_functors, enumerate_nat_trans, CategoryData, FinCategory, Functor, MorphismData, NatTrans};
use crate::guard::Guard;
use crate::monadkit::Monad;
use crate::pseudomonadkit::{strict_as_pseudo, strict_on_z2, twist, Pseudomonad};
use crate::twocat::{Fin2Builder, Fin2Category};

/// A named monad of the corpus.
#[derive(Clone, Debug)]
pub struct MonadInstance {
    pub name: String,
    pub monad: Monad,
}

fn cat(objects: &[&str], morphisms: &[(&str, &str, &str)], compose: &[(&str, &str, &str)]) -> FinCategory {
    let mut data = CategoryData {
        objects: objects.iter().map(|s| s.to_string()).collect(),
        ..Default::default()
    };
    for o in objects {
        let id = format!("id_{o}");
        data.morphisms.push(MorphismData {
            id: id.clone(),
            src: o.to_string(),
            tgt: o.to_string(),
        });
        data.identities.insert(o.to_string(), id);
    }
    for (id, s, t) in morphisms {
        data.morphisms.push(MorphismData {
            id: id.to_string(),
            src: s.to_string(),
            tgt: t.to_string(),
        });
    }
    // Identity composites are filled in; only non-trivial ones are listed.
    for m in data.morphisms.clone() {
        data.compose.push([format!("id_{}", m.src), m.id.clone(), m.id.clone()]);
        if m.src != m.tgt || !m.id.starts_with("id_") {
            data.compose.push([m.id.clone(), format!("id_{}", m.tgt), m.id.clone()]);
        }
    }
    for (f, g, h) in compose {
        data.compose.push([f.to_string(), g.to_string(), h.to_string()]);
    }
    FinCategory::new(&data).expect("hand-written corpus category")
}

/// One object, one morphism.
pub fn terminal_cat() -> FinCategory {
    cat(&["pt"], &[], &[])
}

/// `f: a → b`.
pub fn walking_arrow() -> FinCategory {
    cat(&["a", "b"], &[("f", "a", "b")], &[])
}

/// `x → 1 ← y`.
pub fn span_to_terminal() -> FinCategory {
    cat(&["1", "x", "y"], &[("!x", "x", "1"), ("!y", "y", "1")], &[])
}

/// The monad constant at `1` on [`span_to_terminal`].
pub fn const_terminal_monad() -> Monad {
    let b = Arc::new(span_to_terminal());
    let one = b.object("1").unwrap();
    let endo = Functor::constant(&b, &b, one);
    let id = Functor::identity(&b);
    let unit = NatTrans {
        source: id,
        target: endo.clone(),
        comp: (0..b.n_objects())
            .map(|x| *b.hom(x, one).first().expect("every object maps to 1"))
            .collect(),
    };
    let mult = NatTrans {
        source: endo.then(&endo),
        target: endo.clone(),
        comp: vec![b.id(one); b.n_objects()],
    };
    Monad::new(endo, unit, mult).expect("constant monad")
}

/// Poset on `0..n` as a category; `le[i][j]` means `i ≤ j`.
pub fn poset(le: &[Vec<bool>]) -> FinCategory {
    let n = le.len();
    let objects: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut morphisms = Vec::new();
    let mut index = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        for j in 0..n {
            if le[i][j] {
                index[i][j] = morphisms.len();
                morphisms.push((format!("{i}<={j}"), i, j));
            }
        }
    }
    FinCategory::from_parts(
        objects,
        morphisms.clone(),
        |i| index[i][i],
        |f, g| index[morphisms[f].1][morphisms[g].2],
    )
    .expect("a partial order is a category")
}

/// The monad of a closure operator `c` on a poset.
pub fn poset_closure(le: &[Vec<bool>], c: &[usize]) -> Monad {
    let b = Arc::new(poset(le));
    let arrow = |i: usize, j: usize| b.hom(i, j)[0];
    let endo = Functor {
        source: b.clone(),
        target: b.clone(),
        obj: c.to_vec(),
        mor: b
            .morphisms()
            .iter()
            .map(|m| arrow(c[m.src], c[m.tgt]))
            .collect(),
    };
    let unit = NatTrans {
        source: Functor::identity(&b),
        target: endo.clone(),
        comp: (0..c.len()).map(|i| arrow(i, c[i])).collect(),
    };
    let mult = NatTrans {
        source: endo.then(&endo),
        target: endo.clone(),
        comp: (0..c.len()).map(|i| arrow(c[i], c[i])).collect(),
    };
    Monad::new(endo, unit, mult).expect("closure operator")
}

pub fn chain(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect()
}

/// Chain `0 ≤ 1` with everything sent to the top.
pub fn chain2_top_closure() -> Monad {
    poset_closure(&chain(2), &[1, 1])
}

/// Closure operators (monotone, inflationary, idempotent) of a poset.
pub fn closure_operators(le: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = le.len();
    let mut out = Vec::new();
    let mut c = vec![0; n];
    fn go(le: &[Vec<bool>], c: &mut Vec<usize>, i: usize, out: &mut Vec<Vec<usize>>) {
        let n = le.len();
        if i == n {
            let monotone = (0..n).all(|a| (0..n).all(|b| !le[a][b] || le[c[a]][c[b]]));
            let idem = (0..n).all(|a| c[c[a]] == c[a]);
            if monotone && idem {
                out.push(c.clone());
            }
            return;
        }
        for v in 0..n {
            if le[i][v] {
                c[i] = v;
                go(le, c, i + 1, out);
            }
        }
    }
    go(le, &mut c, 0, &mut out);
    out
}

/// Partial orders on `0..n` up to isomorphism, each in a naturally labelled form.
pub fn posets_upto_iso(n: usize) -> Vec<Vec<Vec<bool>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let mut le: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                le[i][j] = true;
            }
        }
        let transitive = (0..n).all(|a| {
            (0..n).all(|b| (0..n).all(|c| !(le[a][b] && le[b][c]) || le[a][c]))
        });
        if !transitive {
            continue;
        }
        let canon = permutations(n)
            .into_iter()
            .map(|p| {
                let mut bits = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        bits.push(le[p[i]][p[j]]);
                    }
                }
                bits
            })
            .min()
            .unwrap_or_default();
        if seen.insert(canon) {
            out.push(le);
        }
    }
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k % 2 == 0 {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out.sort();
    out
}

/// Every monad on `c`, in enumeration order of (T, η, μ).
pub fn enumerate_monads(c: &Arc<FinCategory>, guard: &Guard) -> Result<Vec<Monad>> {
    let mut out = Vec::new();
    let id = Functor::identity(c);
    for t in enumerate_functors(c, c, guard)? {
        let tt = t.then(&t);
        let units = enumerate_nat_trans(&id, &t, guard)?;
        if units.is_empty() {
            continue;
        }
        let mults = enumerate_nat_trans(&tt, &t, guard)?;
        for eta in &units {
            for mu in &mults {
                let m = Monad {
                    base: c.clone(),
                    endo: t.clone(),
                    unit: eta.clone(),
                    mult: mu.clone(),
                };
                if m.validate().is_valid() {
                    out.push(m);
                }
            }
        }
    }
    Ok(out)
}

/// Categories with at most `max_obj ≤ 2` objects and `max_mor` morphisms, up to isomorphism.
///
/// Objects are `a`, `b`; non-identity morphisms are named per hom-set:
/// `e*` on `a`, `h*` on `b`, `f*: a → b`, `g*: b → a`.
pub fn small_categories(max_obj: usize, max_mor: usize) -> Vec<(String, FinCategory)> {
    assert!(max_obj <= 2, "only up to two objects are generated");
    let mut out = Vec::new();
    if max_obj >= 1 {
        for n in 1..=max_mor {
            for (k, c) in categories_with_homs(&[[n, 0], [0, 0]], 1).into_iter().enumerate() {
                out.push((format!("mon{n}_{k}"), c));
            }
        }
    }
    if max_obj >= 2 {
        let mut shapes = BTreeSet::new();
        for aa in 1..=max_mor {
            for bb in 1..=max_mor {
                for ab in 0..=max_mor {
                    for ba in 0..=max_mor {
                        if aa + bb + ab + ba <= max_mor {
                            // Up to swapping the two objects.
                            let s = [[aa, ab], [ba, bb]];
                            let t = [[bb, ba], [ab, aa]];
                            shapes.insert(s.min(t));
                        }
                    }
                }
            }
        }
        for s in shapes {
            for (k, c) in categories_with_homs(&s, 2).into_iter().enumerate() {
                out.push((
                    format!("cat{}{}{}{}_{k}", s[0][0], s[0][1], s[1][0], s[1][1]),
                    c,
                ));
            }
        }
    }
    out
}

/// All categories with the given hom-set sizes, up to isomorphism.
fn categories_with_homs(homs: &[[usize; 2]; 2], n_obj: usize) -> Vec<FinCategory> {
    let names = ["a", "b"];
    let prefix = [["e", "f"], ["g", "h"]];
    let mut mors: Vec<(usize, usize)> = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    let mut identity = [usize::MAX; 2];
    for x in 0..n_obj {
        for y in 0..n_obj {
            for k in 0..homs[x][y] {
                if x == y && k == 0 {
                    identity[x] = mors.len();
                    ids.push(format!("id_{}", names[x]));
                } else {
                    let k = if x == y { k } else { k + 1 };
                    ids.push(format!("{}{k}", prefix[x][y]));
                }
                mors.push((x, y));
            }
        }
    }
    let n = mors.len();
    let hom_members = |x: usize, y: usize| -> Vec<usize> { (0..n).filter(|&m| mors[m] == (x, y)).collect() };
    // Table over composable pairs of non-identity morphisms.
    let is_id = |m: usize| identity.contains(&m);
    let mut slots = Vec::new();
    for f in 0..n {
        for g in 0..n {
            if mors[f].1 == mors[g].0 && !is_id(f) && !is_id(g) {
                slots.push((f, g));
            }
        }
    }
    let mut table = vec![usize::MAX; n * n];
    for f in 0..n {
        for g in 0..n {
            if mors[f].1 == mors[g].0 {
                if is_id(f) {
                    table[f * n + g] = g;
                } else if is_id(g) {
                    table[f * n + g] = f;
                }
            }
        }
    }
    let candidates: Vec<Vec<usize>> = slots
        .iter()
        .map(|&(f, g)| hom_members(mors[f].0, mors[g].1))
        .collect();
    let mut found = Vec::new();
    search_tables(&mors, &slots, &candidates, &mut table, 0, &mut found);

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let obj_perms: Vec<Vec<usize>> = if n_obj == 2 && homs[0] == [homs[1][1], homs[1][0]] && homs[0][1] == homs[1][0] {
        vec![vec![0, 1], vec![1, 0]]
    } else {
        vec![(0..n_obj).collect()]
    };
    let relabelings = relabelings(&mors, &identity, n_obj, &obj_perms);
    for t in found {
        let canon = relabelings
            .iter()
            .map(|p| {
                let mut enc = vec![usize::MAX; n * n];
                for f in 0..n {
                    for g in 0..n {
                        let h = t[f * n + g];
                        if h != usize::MAX {
                            enc[p[f] * n + p[g]] = p[h];
                        }
                    }
                }
                enc
            })
            .min()
            .unwrap();
        if seen.insert(canon) {
            let morphisms: Vec<(String, usize, usize)> =
                (0..n).map(|m| (ids[m].clone(), mors[m].0, mors[m].1)).collect();
            let objects = names[..n_obj].iter().map(|s| s.to_string()).collect();
            out.push(
                FinCategory::from_parts(objects, morphisms, |x| identity[x], |f, g| t[f * n + g])
                    .expect("search only yields categories"),
            );
        }
    }
    out
}

fn search_tables(
    mors: &[(usize, usize)],
    slots: &[(usize, usize)],
    candidates: &[Vec<usize>],
    table: &mut Vec<usize>,
    i: usize,
    found: &mut Vec<Vec<usize>>,
) {
    let n = mors.len();
    if i == slots.len() {
        found.push(table.clone());
        return;
    }
    let (f, g) = slots[i];
    for &h in &candidates[i] {
        table[f * n + g] = h;
        if assoc_ok(mors, table) {
            search_tables(mors, slots, candidates, table, i + 1, found);
        }
    }
    table[f * n + g] = usize::MAX;
}

/// Associativity on every triple whose needed entries are all defined.
fn assoc_ok(mors: &[(usize, usize)], t: &[usize]) -> bool {
    let n = mors.len();
    for f in 0..n {
        for g in 0..n {
            let fg = t[f * n + g];
            if fg == usize::MAX {
                continue;
            }
            for h in 0..n {
                if mors[g].1 != mors[h].0 {
                    continue;
                }
                let gh = t[g * n + h];
                if gh == usize::MAX {
                    continue;
                }
                let l = t[fg * n + h];
                let r = t[f * n + gh];
                if l != usize::MAX && r != usize::MAX && l != r {
                    return false;
                }
            }
        }
    }
    true
}

/// Bijections of morphisms that fix identities and respect hom-sets
/// (after permuting objects by one of `obj_perms`).
fn relabelings(
    mors: &[(usize, usize)],
    identity: &[usize; 2],
    n_obj: usize,
    obj_perms: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    let n = mors.len();
    let mut out = Vec::new();
    for op in obj_perms {
        // For each hom (x,y), its non-identity members map onto those of (op x, op y).
        let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for x in 0..n_obj {
            for y in 0..n_obj {
                let from: Vec<usize> = (0..n).filter(|&m| mors[m] == (x, y) && !identity.contains(&m)).collect();
                let to: Vec<usize> = (0..n)
                    .filter(|&m| mors[m] == (op[x], op[y]) && !identity.contains(&m))
                    .collect();
                blocks.push((from, to));
            }
        }
        let mut partial = vec![vec![usize::MAX; n]];
        for x in 0..n_obj {
            for p in &mut partial {
                p[identity[x]] = identity[op[x]];
            }
        }
        for (from, to) in &blocks {
            let mut next = Vec::new();
            for p in &partial {
                for perm in permutations(from.len()) {
                    let mut q = p.clone();
                    for (k, &m) in from.iter().enumerate() {
                        q[m] = to[perm[k]];
                    }
                    next.push(q);
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

/// Hand-picked monads used throughout the unit tests.
pub fn small_monads(_guard: &Guard) -> Vec<MonadInstance> {
    let t = Arc::new(terminal_cat());
    let w = Arc::new(walking_arrow());
    let s = Arc::new(span_to_terminal());
    vec![
        MonadInstance {
            name: "identity_terminal".into(),
            monad: Monad::identity(&t),
        },
        MonadInstance {
            name: "identity_walking_arrow".into(),
            monad: Monad::identity(&w),
        },
        MonadInstance {
            name: "identity_span".into(),
            monad: Monad::identity(&s),
        },
        MonadInstance {
            name: "const_terminal".into(),
            monad: const_terminal_monad(),
        },
        MonadInstance {
            name: "chain2_top_closure".into(),
            monad: chain2_top_closure(),
        },
    ]
}

/// Every 1-dimensional monad of the corpus.
pub fn monad_corpus(max_poset: usize, max_obj: usize, max_mor: usize, guard: &Guard) -> Result<Vec<MonadInstance>> {
    let mut out = small_monads(guard);
    for n in 1..=max_poset {
        for (k, le) in posets_upto_iso(n).into_iter().enumerate() {
            for (j, c) in closure_operators(&le).into_iter().enumerate() {
                out.push(MonadInstance {
                    name: format!("poset{n}_{k}_closure{j}"),
                    monad: poset_closure(&le, &c),
                });
            }
        }
    }
    for (name, c) in small_categories(max_obj, max_mor) {
        let c = Arc::new(c);
        for (k, m) in enumerate_monads(&c, guard)?.into_iter().enumerate() {
            out.push(MonadInstance {
                name: format!("{name}_monad{k}"),
                monad: m,
            });
        }
    }
    Ok(out)
}

/// How a pseudomonad of the corpus arises from a 1-d monad.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lift {
    LocallyDiscrete,
    Z2,
    /// The Z/2 lift with its multiplication moved along the non-identity
    /// automorphism at the listed objects.
    Twist,
}

/// A named pseudomonad of the corpus with the monad it lifts.
#[derive(Clone, Debug)]
pub struct PseudomonadInstance {
    pub name: String,
    pub lift: Lift,
    pub monad: Monad,
    pub pm: Pseudomonad,
}

/// Bounds on the bases lifted to dimension two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftBounds {
    pub max_objects: usize,
    pub max_onecells: usize,
    pub max_twocells: usize,
}

impl Default for LiftBounds {
    fn default() -> Self {
        LiftBounds {
            max_objects: 2,
            max_onecells: 6,
            max_twocells: 20,
        }
    }
}

/// The twist of `pm` (a Z/2 lift) at the objects in `at`.
pub fn twist_at(pm: &Pseudomonad, at: &[usize]) -> Result<Pseudomonad> {
    let c = &pm.base;
    let w: Vec<usize> = (0..c.n_objects())
        .map(|x| {
            let mu = pm.mu(x);
            if at.contains(&x) {
                c.isos(mu, mu).find(|&a| !c.is_id2(a)).unwrap_or(c.id2(mu))
            } else {
                c.id2(mu)
            }
        })
        .collect();
    twist(pm, &w)
}

/// Locally discrete lifts of every monad; Z/2 lifts and their twists for
/// monads whose thickened base is within `bounds`.
pub fn pseudomonad_corpus(monads: &[MonadInstance], bounds: LiftBounds) -> Result<Vec<PseudomonadInstance>> {
    let mut out = Vec::new();
    for m in monads {
        out.push(PseudomonadInstance {
            name: format!("{}/discrete", m.name),
            lift: Lift::LocallyDiscrete,
            monad: m.monad.clone(),
            pm: strict_as_pseudo(&m.monad),
        });
        let c = &m.monad.base;
        if c.n_objects() > bounds.max_objects
            || c.n_morphisms() > bounds.max_onecells
            || 2 * c.n_morphisms() > bounds.max_twocells
        {
            continue;
        }
        let z = strict_on_z2(&m.monad);
        let mut variants = vec![(format!("{}/z2", m.name), Lift::Z2, z.clone())];
        variants.push((format!("{}/twist", m.name), Lift::Twist, twist_at(&z, &(0..c.n_objects()).collect::<Vec<_>>())?));
        if c.n_objects() > 1 {
            variants.push((format!("{}/twist0", m.name), Lift::Twist, twist_at(&z, &[0])?));
        }
        for (name, lift, pm) in variants {
            out.push(PseudomonadInstance {
                name,
                lift,
                monad: m.monad.clone(),
                pm,
            });
        }
    }
    Ok(out)
}

/// Index pairs of instances small enough to check the unit of the
/// reflection exhaustively: both bases have at most `max_onecells` 1-cells.
pub fn gray_pairs(instances: &[PseudomonadInstance], max_onecells: usize) -> Vec<(usize, usize)> {
    let small: Vec<usize> = (0..instances.len())
        .filter(|&i| instances[i].pm.base.n_onecells() <= max_onecells)
        .collect();
    small.iter().flat_map(|&a| small.iter().map(move |&b| (a, b))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain2_has_two_closures() {
        let cs = closure_operators(&chain(2));
        assert_eq!(cs, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn poset_counts() {
        let counts: Vec<usize> = (0..=4).map(|n| posets_upto_iso(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16]);
    }

    #[test]
    fn terminal_has_only_identity_monad() {
        let t = Arc::new(terminal_cat());
        let ms = enumerate_monads(&t, &Guard::default()).unwrap();
        assert_eq!(ms, vec![Monad::identity(&t)]);
    }

    #[test]
    fn walking_arrow_monads_by_brute_force() {
        let w = Arc::new(walking_arrow());
        let ms = enumerate_monads(&w, &Guard::default()).unwrap();
        // Independent count: T is one of the three endofunctors; η and μ are
        // forced by thinness when they exist. Monads = idempotent closures of
        // the chain a ≤ b: identity and the constant at b.
        assert_eq!(ms.len(), closure_operators(&chain(2)).len());
        assert!(ms.contains(&Monad::identity(&w)));
    }

    #[test]
    fn monoid_counts() {
        // Monoids of order 1..=4 up to isomorphism.
        let counts: Vec<usize> = (1..=4)
            .map(|n| categories_with_homs(&[[n, 0], [0, 0]], 1).len())
            .collect();
        assert_eq!(counts, vec![1, 2, 7, 35]);
    }

    #[test]
    fn small_categories_are_valid() {
        for (name, c) in small_categories(2, 4) {
            assert!(c.validate().is_valid(), "{name}");
        }
    }
}

/// `c` with every hom-category replaced by the discrete-to-Z/2 thickening:
/// each 1-cell `f` carries the identity `f^0` and one automorphism `f^1`,
/// composing by addition mod 2. Whiskering keeps the exponent.
pub fn z2(c: &FinCategory) -> Fin2Category {
    let mut b = Fin2Builder::new();
    for o in c.objects() {
        b.object(o.clone());
    }
    for m in c.morphisms() {
        b.onecell(m.id.clone(), m.src, m.tgt);
    }
    let n = c.n_morphisms();
    for e in 0..2 {
        for (i, m) in c.morphisms().iter().enumerate() {
            b.twocell(format!("{}^{e}", m.id), i, i);
        }
    }
    let cell = |f: usize, e: usize| e * n + f;
    b.build(
        |x| c.id(x),
        |f| cell(f, 0),
        |f, g| c.then(f, g),
        |a, bb| cell(a % n, (a / n + bb / n) % 2),
        |f, a| cell(c.then(f, a % n), a / n),
        |a, g| cell(c.then(a % n, g), a / n),
    )
    .expect("z2 thickening")
}
