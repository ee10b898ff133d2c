//! Symbolic pasting fixtures.
//!
//! A fixture is a small s-expression file naming either an equation
//! between two pastings or a single pasting. Terms are written
//! applicatively: `(o a b)` is `a∘b` (so `b` acts first) and
//! `(then a b ...)` stacks 2-cells vertically in time order. A signature
//! supplies the named 2-functors, transformations and per-object cell
//! families a fixture may mention, e.g. `T`, `eta`, `mu`, `lam`.
//!
//! ```text
//! (fixture name
//!   (params (X obj) (g cell1) (gbar cell2))
//!   (lhs ...) (rhs ...))          ; or (value ...)
//! ```

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::twocat::{Fin2Category, PastingExpr, PseudoNat, TwoFunctor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parse a sequence of s-expressions; `;` starts a line comment.
pub fn parse_sexps(src: &str) -> std::result::Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut atom = String::new();
    let flush = |atom: &mut String, stack: &mut Vec<Vec<Sexp>>| {
        if !atom.is_empty() {
            stack.last_mut().unwrap().push(Sexp::Atom(std::mem::take(atom)));
        }
    };
    for (lineno, line) in src.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        for ch in line.chars() {
            match ch {
                '(' => {
                    flush(&mut atom, &mut stack);
                    stack.push(Vec::new());
                }
                ')' => {
                    flush(&mut atom, &mut stack);
                    if stack.len() < 2 {
                        return Err(format!("line {}: unbalanced `)`", lineno + 1));
                    }
                    let done = stack.pop().unwrap();
                    stack.last_mut().unwrap().push(Sexp::List(done));
                }
                c if c.is_whitespace() => flush(&mut atom, &mut stack),
                c => atom.push(c),
            }
        }
        flush(&mut atom, &mut stack);
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Obj,
    Cell1,
    Cell2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Equation(Sexp, Sexp),
    Value(Sexp),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: String,
    pub params: Vec<(String, Kind)>,
    pub body: Body,
}

/// A fixture term evaluated in a concrete 2-category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Obj(usize),
    One(usize),
    /// A 2-cell with the pasting that produced it.
    Two { expr: PastingExpr, cell: usize },
}

impl Value {
    pub fn cell(a: usize) -> Value {
        Value::Two {
            expr: PastingExpr::Cell2(a),
            cell: a,
        }
    }

    pub fn as_cell(&self) -> Option<usize> {
        match self {
            Value::Two { cell, .. } => Some(*cell),
            _ => None,
        }
    }
}

/// Named structure a fixture can refer to.
pub struct Signature<'a> {
    pub cat: &'a Fin2Category,
    functors: Vec<(&'a str, &'a TwoFunctor)>,
    transformations: Vec<(&'a str, &'a PseudoNat)>,
    families: Vec<(&'a str, &'a [usize])>,
    arrows: Vec<(&'a str, &'a [usize])>,
}

impl<'a> Signature<'a> {
    pub fn new(cat: &'a Fin2Category) -> Self {
        Signature {
            cat,
            functors: Vec::new(),
            transformations: Vec::new(),
            families: Vec::new(),
            arrows: Vec::new(),
        }
    }

    /// An endo-2-functor of `cat`.
    pub fn functor(mut self, name: &'a str, f: &'a TwoFunctor) -> Self {
        self.functors.push((name, f));
        self
    }

    /// A pseudonatural transformation between endo-2-functors of `cat`.
    pub fn transformation(mut self, name: &'a str, p: &'a PseudoNat) -> Self {
        self.transformations.push((name, p));
        self
    }

    /// A 2-cell per object, e.g. the components of a modification.
    pub fn family(mut self, name: &'a str, cells: &'a [usize]) -> Self {
        self.families.push((name, cells));
        self
    }

    /// A 1-cell per object.
    pub fn arrows(mut self, name: &'a str, cells: &'a [usize]) -> Self {
        self.arrows.push((name, cells));
        self
    }
}

/// Result of instantiating a fixture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Equation(Value, Value),
    Value(Value),
}

impl Fixture {
    pub fn parse(src: &str) -> Result<Fixture> {
        let bad = |reason: String| Error::Fixture {
            name: "<source>".into(),
            reason,
        };
        let sexps = parse_sexps(src).map_err(bad)?;
        let [Sexp::List(items)] = sexps.as_slice() else {
            return Err(bad("expected exactly one top-level form".into()));
        };
        let name = match items.as_slice() {
            [Sexp::Atom(head), Sexp::Atom(name), ..] if head == "fixture" => name.clone(),
            _ => return Err(bad("expected `(fixture NAME ...)`".into())),
        };
        let bad = |reason: String| Error::Fixture {
            name: name.clone(),
            reason,
        };
        let mut params = Vec::new();
        let mut lhs = None;
        let mut rhs = None;
        let mut value = None;
        for clause in &items[2..] {
            let Sexp::List(parts) = clause else {
                return Err(bad("stray atom in fixture".into()));
            };
            let Some(Sexp::Atom(head)) = parts.first() else {
                return Err(bad("clause without a head".into()));
            };
            match (head.as_str(), &parts[1..]) {
                ("params", ps) => {
                    for p in ps {
                        match p {
                            Sexp::List(v) => match v.as_slice() {
                                [Sexp::Atom(n), Sexp::Atom(k)] => {
                                    let kind = match k.as_str() {
                                        "obj" => Kind::Obj,
                                        "cell1" => Kind::Cell1,
                                        "cell2" => Kind::Cell2,
                                        other => return Err(bad(format!("unknown kind `{other}`"))),
                                    };
                                    params.push((n.clone(), kind));
                                }
                                _ => return Err(bad("parameter must be `(name kind)`".into())),
                            },
                            _ => return Err(bad("parameter must be `(name kind)`".into())),
                        }
                    }
                }
                ("lhs", [e]) => lhs = Some(e.clone()),
                ("rhs", [e]) => rhs = Some(e.clone()),
                ("value", [e]) => value = Some(e.clone()),
                (other, _) => return Err(bad(format!("unknown clause `{other}`"))),
            }
        }
        let body = match (lhs, rhs, value) {
            (Some(l), Some(r), None) => Body::Equation(l, r),
            (None, None, Some(v)) => Body::Value(v),
            _ => return Err(bad("need either lhs and rhs, or value".into())),
        };
        Ok(Fixture { name, params, body })
    }

    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Fixture {
            name: self.name.clone(),
            reason: reason.into(),
        }
    }

    pub fn instantiate(&self, sig: &Signature, args: &[Value]) -> Result<Instance> {
        if args.len() != self.params.len() {
            return Err(self.err(format!("expected {} arguments, got {}", self.params.len(), args.len())));
        }
        let mut env: BTreeMap<&str, &Value> = BTreeMap::new();
        for ((n, k), v) in self.params.iter().zip(args) {
            let ok = matches!(
                (k, v),
                (Kind::Obj, Value::Obj(_)) | (Kind::Cell1, Value::One(_)) | (Kind::Cell2, Value::Two { .. })
            );
            if !ok {
                return Err(self.err(format!("argument `{n}` has the wrong kind")));
            }
            env.insert(n.as_str(), v);
        }
        let ev = Evaluator { fx: self, sig, env };
        match &self.body {
            Body::Equation(l, r) => {
                let (l, r) = (ev.eval(l)?, ev.eval(r)?);
                let ty = |v: &Value| match v {
                    Value::Two { cell, .. } => Ok((sig.cat.src2(*cell), sig.cat.tgt2(*cell))),
                    _ => Err(self.err("equation sides must be 2-cells")),
                };
                if ty(&l)? != ty(&r)? {
                    return Err(self.err("the two sides are not parallel"));
                }
                Ok(Instance::Equation(l, r))
            }
            Body::Value(e) => Ok(Instance::Value(ev.eval(e)?)),
        }
    }

    /// Whether an equation fixture holds at the given arguments.
    pub fn holds(&self, sig: &Signature, args: &[Value]) -> Result<bool> {
        match self.instantiate(sig, args)? {
            Instance::Equation(l, r) => Ok(l.as_cell() == r.as_cell()),
            Instance::Value(_) => Err(self.err("not an equation")),
        }
    }

    /// The 2-cell produced by a value fixture.
    pub fn cell(&self, sig: &Signature, args: &[Value]) -> Result<usize> {
        match self.instantiate(sig, args)? {
            Instance::Value(v) => v.as_cell().ok_or_else(|| self.err("value is not a 2-cell")),
            Instance::Equation(..) => Err(self.err("not a value fixture")),
        }
    }
}

struct Evaluator<'s, 'a> {
    fx: &'s Fixture,
    sig: &'s Signature<'a>,
    env: BTreeMap<&'s str, &'s Value>,
}

impl Evaluator<'_, '_> {
    fn eval(&self, e: &Sexp) -> Result<Value> {
        let c = self.sig.cat;
        match e {
            Sexp::Atom(a) => self
                .env
                .get(a.as_str())
                .map(|v| (*v).clone())
                .ok_or_else(|| self.fx.err(format!("unbound name `{a}`"))),
            Sexp::List(items) => {
                let Some(Sexp::Atom(head)) = items.first() else {
                    return Err(self.fx.err("application without an operator"));
                };
                let args = items[1..].iter().map(|x| self.eval(x)).collect::<Result<Vec<_>>>()?;
                match head.as_str() {
                    "o" => {
                        let mut it = args.into_iter().rev();
                        let first = it.next().ok_or_else(|| self.fx.err("empty `o`"))?;
                        it.try_fold(first, |acc, outer| self.compose(outer, acc))
                    }
                    "then" => {
                        let mut it = args.into_iter();
                        let first = it.next().ok_or_else(|| self.fx.err("empty `then`"))?;
                        let first = self.as_two(first)?;
                        it.try_fold(first, |acc, next| {
                            let next = self.as_two(next)?;
                            self.vcomp(acc, next)
                        })
                    }
                    "id" => match args.as_slice() {
                        [Value::Obj(x)] => Ok(Value::One(c.id1(*x))),
                        [Value::One(f)] => Ok(Value::Two {
                            expr: PastingExpr::Id2(*f),
                            cell: c.id2(*f),
                        }),
                        _ => Err(self.fx.err("`id` takes an object or a 1-cell")),
                    },
                    "inv" => match args.as_slice() {
                        [Value::Two { expr, cell }] => {
                            let inv = c
                                .inv(*cell)
                                .ok_or_else(|| self.fx.err(format!("`{}` is not invertible", c.twocell_id(*cell))))?;
                            Ok(Value::Two {
                                expr: self.invert(expr)?,
                                cell: inv,
                            })
                        }
                        _ => Err(self.fx.err("`inv` takes a 2-cell")),
                    },
                    name => self.apply(name, args),
                }
            }
        }
    }

    fn as_two(&self, v: Value) -> Result<Value> {
        match v {
            Value::One(f) => Ok(Value::Two {
                expr: PastingExpr::Id2(f),
                cell: self.sig.cat.id2(f),
            }),
            Value::Two { .. } => Ok(v),
            Value::Obj(_) => Err(self.fx.err("objects cannot be composed")),
        }
    }

    fn vcomp(&self, a: Value, b: Value) -> Result<Value> {
        let c = self.sig.cat;
        let (Value::Two { expr: ea, cell: ca }, Value::Two { expr: eb, cell: cb }) = (a, b) else {
            unreachable!()
        };
        let cell = c.try_then2(ca, cb).ok_or_else(|| {
            self.fx.err(format!(
                "vertical mismatch: `{}` ends at `{}` but `{}` starts at `{}`",
                c.twocell_id(ca),
                c.onecell_id(c.tgt2(ca)),
                c.twocell_id(cb),
                c.onecell_id(c.src2(cb))
            ))
        })?;
        Ok(Value::Two {
            expr: PastingExpr::vcomp(ea, eb),
            cell,
        })
    }

    /// `outer ∘ inner`.
    fn compose(&self, outer: Value, inner: Value) -> Result<Value> {
        let c = self.sig.cat;
        let mismatch = || self.fx.err("horizontal composite of non-composable cells");
        match (outer, inner) {
            (Value::One(g), Value::One(f)) => c.try_then1(f, g).map(Value::One).ok_or_else(mismatch),
            (Value::Two { expr, cell }, Value::One(f)) => {
                let r = c.try_whisk_l(f, cell).ok_or_else(mismatch)?;
                Ok(Value::Two {
                    expr: PastingExpr::lwhisk(f, expr),
                    cell: r,
                })
            }
            (Value::One(g), Value::Two { expr, cell }) => {
                let r = c.try_whisk_r(cell, g).ok_or_else(mismatch)?;
                Ok(Value::Two {
                    expr: PastingExpr::rwhisk(expr, g),
                    cell: r,
                })
            }
            (Value::Two { expr: eo, cell: co }, Value::Two { expr: ei, cell: ci }) => {
                // inner first: (ci ◁ src co) ; (tgt ci ▷ co)
                let g = c.src2(co);
                let f2 = c.tgt2(ci);
                let a = c.try_whisk_r(ci, g).ok_or_else(mismatch)?;
                let b = c.try_whisk_l(f2, co).ok_or_else(mismatch)?;
                Ok(Value::Two {
                    expr: PastingExpr::vcomp(PastingExpr::rwhisk(ei, g), PastingExpr::lwhisk(f2, eo)),
                    cell: c.then2(a, b),
                })
            }
            _ => Err(self.fx.err("objects cannot be composed")),
        }
    }

    fn invert(&self, e: &PastingExpr) -> Result<PastingExpr> {
        let c = self.sig.cat;
        Ok(match e {
            PastingExpr::Cell2(a) => PastingExpr::Cell2(
                c.inv(*a)
                    .ok_or_else(|| self.fx.err(format!("`{}` is not invertible", c.twocell_id(*a))))?,
            ),
            PastingExpr::Id2(f) => PastingExpr::Id2(*f),
            PastingExpr::VComp(a, b) => PastingExpr::vcomp(self.invert(b)?, self.invert(a)?),
            PastingExpr::LWhisk(f, a) => PastingExpr::lwhisk(*f, self.invert(a)?),
            PastingExpr::RWhisk(a, g) => PastingExpr::rwhisk(self.invert(a)?, *g),
        })
    }

    fn apply(&self, name: &str, args: Vec<Value>) -> Result<Value> {
        let [arg] = <[Value; 1]>::try_from(args).map_err(|_| self.fx.err(format!("`{name}` takes one argument")))?;
        if let Some((_, f)) = self.sig.functors.iter().find(|(n, _)| *n == name) {
            return Ok(match arg {
                Value::Obj(x) => Value::Obj(f.obj[x]),
                Value::One(g) => Value::One(f.one[g]),
                Value::Two { expr, cell } => Value::Two {
                    expr: map_expr(f, &expr),
                    cell: f.two[cell],
                },
            });
        }
        if let Some((_, p)) = self.sig.transformations.iter().find(|(n, _)| *n == name) {
            return match arg {
                Value::Obj(x) => Ok(Value::One(p.comp[x])),
                Value::One(g) => Ok(Value::cell(p.cell[g])),
                Value::Two { .. } => Err(self.fx.err(format!("`{name}` applies to objects and 1-cells"))),
            };
        }
        if let Some((_, v)) = self.sig.families.iter().find(|(n, _)| *n == name) {
            return match arg {
                Value::Obj(x) => Ok(Value::cell(v[x])),
                _ => Err(self.fx.err(format!("`{name}` applies to objects"))),
            };
        }
        if let Some((_, v)) = self.sig.arrows.iter().find(|(n, _)| *n == name) {
            return match arg {
                Value::Obj(x) => Ok(Value::One(v[x])),
                _ => Err(self.fx.err(format!("`{name}` applies to objects"))),
            };
        }
        Err(self.fx.err(format!("unknown operator `{name}`")))
    }
}

/// Push a 2-functor through a pasting expression node by node.
pub fn map_expr(f: &TwoFunctor, e: &PastingExpr) -> PastingExpr {
    match e {
        PastingExpr::Cell2(a) => PastingExpr::Cell2(f.two[*a]),
        PastingExpr::Id2(g) => PastingExpr::Id2(f.one[*g]),
        PastingExpr::VComp(a, b) => PastingExpr::vcomp(map_expr(f, a), map_expr(f, b)),
        PastingExpr::LWhisk(g, a) => PastingExpr::lwhisk(f.one[*g], map_expr(f, a)),
        PastingExpr::RWhisk(a, g) => PastingExpr::rwhisk(map_expr(f, a), f.one[*g]),
    }
}

macro_rules! fixture_files {
    ($($name:literal),* $(,)?) => {
        const SOURCES: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../fixtures/", $name, ".pexpr")))),*
        ];
    };
}

fixture_files!(
    "coherence_1",
    "coherence_2",
    "coherence_3",
    "coherence_4",
    "coherence_5",
    "pseudoalgebra_assoc",
    "pseudoalgebra_unit",
    "pseudomorphism_assoc",
    "pseudomorphism_unit",
    "algebra_2cell",
    "cone_unit",
    "cone_cocycle",
    "cone_morphism",
    "canonical_cone",
    "cone_thunking",
    "induced_pseudomorphism",
    "thunked_cone",
    "reconstruction_witness",
    "unit_comparison",
    "lifted_thunking",
);

/// The shipped fixtures, by name.
pub fn fixtures() -> &'static BTreeMap<String, Fixture> {
    static CELL: OnceLock<BTreeMap<String, Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        SOURCES
            .iter()
            .map(|(name, src)| {
                let f = Fixture::parse(src).unwrap_or_else(|e| panic!("shipped fixture {name}: {e}"));
                assert_eq!(&f.name, name, "fixture name must match its file");
                (f.name.clone(), f)
            })
            .collect()
    })
}

pub fn fixture(name: &str) -> &'static Fixture {
    fixtures()
        .get(name)
        .unwrap_or_else(|| panic!("no shipped fixture `{name}`"))
}

/// Names of the pseudomonad coherence axioms.
pub const COHERENCE: [&str; 5] = ["coherence_1", "coherence_2", "coherence_3", "coherence_4", "coherence_5"];
