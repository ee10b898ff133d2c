use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use kleislikit::abskl1::{self, AbsKL1, AbsKL1Data};
use kleislikit::abskl2::{self, AbsKL2, AbsKL2Data, Kleisli2};
use kleislikit::fincat::{self, CategoryData};
use kleislikit::instances::{self, ComorphismData, CorpusInstance};
use kleislikit::klext::{self, LiftInput};
use kleislikit::monadkit::{self, Comonad, ComonadData, Monad, MonadData};
use kleislikit::pseudomonadkit::{Pseudomonad, PseudomonadData};
use kleislikit::twocat::{Fin2Category, Fin2CategoryData};
use kleislikit::{Error, Guard, Result, ValidationReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Config;
use crate::report::Report;
use crate::{Command, CorpusAction, InputKind};

pub fn name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Kleisli { .. } => "kleisli",
        Command::Em { .. } => "em",
        Command::Thunkable { .. } => "thunkable",
        Command::Check { .. } => "check",
        Command::Reflect { .. } => "reflect",
        Command::Check2 { .. } => "check2",
        Command::Cones { .. } => "cones",
        Command::Isobidescent { .. } => "isobidescent",
        Command::Lift { .. } => "lift",
        Command::Corpus { .. } => "corpus",
    }
}

pub fn dispatch(c: &Command, config: &Config, guard: &Guard) -> Result<Report> {
    match c {
        Command::Validate { file, kind } => validate(file, *kind, guard),
        Command::Kleisli { monad, out } => kleisli(monad, out.as_deref()),
        Command::Em { monad } => em(monad, guard),
        Command::Thunkable { abskl, morphism } => thunkable(abskl, morphism),
        Command::Check { profile, monad } => check(monad, *profile, guard),
        Command::Reflect { monad, out } => reflect(monad, out),
        Command::Check2 { profile, pseudomonad } => check2(pseudomonad, *profile, guard),
        Command::Cones { pseudomonad, x, y } => cones(pseudomonad, x, y, guard),
        Command::Isobidescent { pseudomonad } => isobidescent(pseudomonad, guard),
        Command::Lift { input } => lift(input, guard),
        Command::Corpus { action } => match action {
            CorpusAction::Generate { out } => corpus_generate(out.as_deref(), config, guard),
            CorpusAction::Check { file } => corpus_check(file, guard),
        },
    }
}

fn read_value(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::structure(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_value(read_value(path)?)?)
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").map_err(|e| Error::structure(format!("{}: {e}", path.display())))
}

fn monad(path: &Path) -> Result<Monad> {
    Monad::from_data(&read::<MonadData>(path)?)
}

fn pseudomonad(path: &Path) -> Result<Pseudomonad> {
    Pseudomonad::from_data(&read::<PseudomonadData>(path)?)
}

/// Guess the kind of a document from its top-level keys.
fn detect(v: &Value) -> Option<InputKind> {
    let o = v.as_object()?;
    let has = |k: &str| o.contains_key(k);
    let kind = if has("kind") && has("payload") {
        InputKind::Instance
    } else if has("fbar") {
        InputKind::Comorphism
    } else if has("vcompose") {
        InputKind::Fin2cat
    } else if has("lam") {
        InputKind::Pseudomonad
    } else if has("theta") && has("u") {
        InputKind::Abskl2
    } else if has("theta") {
        InputKind::Abskl1
    } else if has("mult") {
        InputKind::Monad
    } else if has("comult") {
        InputKind::Comonad
    } else if has("compose") {
        InputKind::Category
    } else {
        return None;
    };
    Some(kind)
}

/// Law failures become a false condition; anything else propagates.
fn validated<T>(r: &mut Report, built: Result<T>) -> Result<Option<T>> {
    match built {
        Ok(t) => {
            r.condition = Some(true);
            Ok(Some(t))
        }
        Err(Error::Invalid { report, .. }) => {
            *r = std::mem::replace(r, Report::new(r.command)).condition(false).violations(report);
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn validate(path: &Path, kind: Option<InputKind>, guard: &Guard) -> Result<Report> {
    let v = read_value(path)?;
    let kind = match kind.or_else(|| detect(&v)) {
        Some(k) => k,
        None => return Err(Error::structure("cannot tell what kind of document this is; pass --kind")),
    };
    let mut r = Report::new("validate");
    let label = format!("{kind:?}").to_lowercase();
    match kind {
        InputKind::Category => {
            let d: CategoryData = serde_json::from_value(v)?;
            let rep = fincat::validate_category(&d);
            r = r.condition(rep.is_valid()).violations(rep);
        }
        InputKind::Fin2cat => {
            let d: Fin2CategoryData = serde_json::from_value(v)?;
            let rep = Fin2Category::unchecked(&d)?.validate();
            r = r.condition(rep.is_valid()).violations(rep);
        }
        InputKind::Monad => {
            let d: MonadData = serde_json::from_value(v)?;
            validated(&mut r, Monad::from_data(&d))?;
        }
        InputKind::Comonad => {
            let d: ComonadData = serde_json::from_value(v)?;
            validated(&mut r, Comonad::from_data(&d))?;
        }
        InputKind::Abskl1 => {
            let d: AbsKL1Data = serde_json::from_value(v)?;
            validated(&mut r, AbsKL1::from_data(&d))?;
        }
        InputKind::Pseudomonad => {
            let d: PseudomonadData = serde_json::from_value(v)?;
            validated(&mut r, Pseudomonad::from_data(&d))?;
        }
        InputKind::Abskl2 => {
            let d: AbsKL2Data = serde_json::from_value(v)?;
            validated(&mut r, AbsKL2::from_data(&d))?;
        }
        InputKind::Comorphism => {
            let d: ComorphismData = serde_json::from_value(v)?;
            validated(&mut r, instances::comorphism_from_data(&d))?;
        }
        InputKind::Instance => {
            let inst: CorpusInstance = serde_json::from_value(v)?;
            let mut rep = ValidationReport::new();
            match instances::check_instance(&inst, guard) {
                Ok(x) => rep.extend(x),
                Err(Error::Invalid { report, .. }) => rep.extend(report),
                Err(e) => return Err(e),
            }
            r = r.condition(rep.is_valid()).violations(rep.scoped(&inst.name));
        }
    }
    Ok(r.witness(json!({ "kind": label })))
}

fn kleisli(path: &Path, out: Option<&Path>) -> Result<Report> {
    let m = monad(path)?;
    let (s, kl) = abskl1::kleisli_abskl(&m);
    let s = s.to_data();
    if let Some(out) = out {
        write_json(out, &s)?;
    }
    Ok(Report::new("kleisli").witness(json!({
        "kleisli": kl.category.to_data(),
        "abskl": s,
    })))
}

fn em(path: &Path, guard: &Guard) -> Result<Report> {
    let m = monad(path)?;
    let em = monadkit::eilenberg_moore(&m, guard)?;
    let b = &*m.base;
    let algebras: Vec<Value> = em
        .structures
        .iter()
        .zip(em.category.objects())
        .map(|(&(x, a), id)| json!({ "object": id, "carrier": b.object_id(x), "structure": b.morphism_id(a) }))
        .collect();
    Ok(Report::new("em").witness(json!({
        "category": em.category.to_data(),
        "algebras": algebras,
    })))
}

fn thunkable(path: &Path, morphism: &str) -> Result<Report> {
    let s = AbsKL1::from_data(&read(path)?)?;
    let holds = s.thunkable_id(morphism)?;
    let all: Vec<&str> = (0..s.base.n_morphisms())
        .filter(|&f| s.thunkable(f))
        .map(|f| s.base.morphism_id(f))
        .collect();
    Ok(Report::new("thunkable")
        .condition(holds)
        .witness(json!({ "morphism": morphism, "thunkable": all })))
}

fn check(path: &Path, profile: bool, guard: &Guard) -> Result<Report> {
    let m = monad(path)?;
    if profile {
        let p = abskl1::check_codescent_profile(&m, guard)?;
        return Ok(Report::new("check").profile(&p.as_array()).witness(p));
    }
    let r = abskl1::reflect(&m);
    Ok(Report::new("check")
        .condition(abskl1::unit_is_iso(&r))
        .witness(json!({
            "kleisli_morphisms": r.kleisli.category.n_morphisms(),
            "thunkable": r.btheta.category.n_morphisms(),
        })))
}

fn reflect(path: &Path, out: &Path) -> Result<Report> {
    let m = monad(path)?;
    let r = abskl1::reflect(&m);
    fs::create_dir_all(out).map_err(|e| Error::structure(format!("{}: {e}", out.display())))?;
    let files = [
        ("abskl1.json", serde_json::to_value(r.abskl.to_data())?),
        ("monad.json", serde_json::to_value(r.monad.to_data())?),
        ("unit.json", serde_json::to_value(instances::comorphism_to_data(&r.unit, &r.abskl))?),
    ];
    let mut written = Vec::new();
    for (name, v) in &files {
        let p = out.join(name);
        write_json(&p, v)?;
        written.push(p.display().to_string());
    }
    Ok(Report::new("reflect")
        .condition(abskl1::unit_is_iso(&r))
        .witness(json!({ "files": written })))
}

fn check2(path: &Path, profile: bool, guard: &Guard) -> Result<Report> {
    let pm = pseudomonad(path)?;
    if profile {
        let p = abskl2::check_bidescent_profile(&pm, guard)?;
        return Ok(Report::new("check2").profile(&p.as_array()).witness(p));
    }
    let k = Kleisli2::new(&pm, guard)?;
    let n = pm.base.n_objects();
    let failing: Vec<Value> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| !k.j_hom(x, y).is_equivalence())
        .map(|(x, y)| json!({ "x": pm.base.object_id(x), "y": pm.base.object_id(y) }))
        .collect();
    let mut r = Report::new("check2").condition(failing.is_empty());
    r.witnesses = failing;
    Ok(r)
}

fn cones(path: &Path, x: &str, y: &str, guard: &Guard) -> Result<Report> {
    let pm = pseudomonad(path)?;
    let c = &*pm.base;
    let cones = abskl2::cone_category(&pm, c.object(x)?, c.object(y)?, guard)?;
    let equivalence = abskl2::canonical_cone_functor(&pm, &cones)?.is_equivalence();
    let mut r = Report::new("cones").condition(equivalence);
    r.witnesses = cones
        .cones
        .iter()
        .map(|&(g, gbar)| json!({ "g": c.onecell_id(g), "gbar": c.twocell_id(gbar) }))
        .collect();
    Ok(r)
}

fn isobidescent(path: &Path, guard: &Guard) -> Result<Report> {
    let pm = pseudomonad(path)?;
    let c = &*pm.base;
    let n = c.n_objects();
    let mut failing = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let cones = abskl2::cone_category(&pm, x, y, guard)?;
            if !abskl2::canonical_cone_functor(&pm, &cones)?.is_equivalence() {
                failing.push(json!({ "x": c.object_id(x), "y": c.object_id(y) }));
            }
        }
    }
    let mut r = Report::new("isobidescent").condition(failing.is_empty());
    r.witnesses = failing;
    Ok(r)
}

/// A pseudomonad and a target structure, without a chosen morphism.
#[derive(Deserialize)]
struct HomInput {
    source: PseudomonadData,
    target: AbsKL2Data,
}

fn lift(path: &Path, guard: &Guard) -> Result<Report> {
    let v = read_value(path)?;
    if v.get("g").is_some() {
        let d: LiftInput = serde_json::from_value(v)?;
        let (_, _, lifted) = klext::lift_from_data(&d, guard)?;
        let rep = lifted.validate();
        return Ok(Report::new("lift")
            .condition(rep.is_valid())
            .violations(rep)
            .witness(lifted.to_data()));
    }
    let d: HomInput = serde_json::from_value(v)?;
    let pm = Pseudomonad::from_data(&d.source)?;
    let s = AbsKL2::from_data(&d.target)?;
    let rep = klext::verify_gray_unit_report(&pm, &s, guard)?;
    let holds = rep.holds();
    let r = Report::new("lift").condition(holds).witness(&rep);
    Ok(if holds {
        r
    } else {
        r.defect("precomposition with the unit is not a bijection")
    })
}

fn corpus_generate(out: Option<&Path>, config: &Config, guard: &Guard) -> Result<Report> {
    let corpus = instances::generate_corpus(&config.corpus, guard)?;
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    for i in &corpus {
        let k = serde_json::to_value(i.kind)?;
        *kinds.entry(k.as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    let mut w = json!({ "instances": corpus.len(), "kinds": kinds });
    if let Some(out) = out {
        fs::write(out, instances::to_json_lines(&corpus))
            .map_err(|e| Error::structure(format!("{}: {e}", out.display())))?;
        w["file"] = json!(out.display().to_string());
    }
    Ok(Report::new("corpus").witness(w))
}

fn corpus_check(path: &Path, guard: &Guard) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::structure(format!("{}: {e}", path.display())))?;
    let corpus = instances::from_json_lines(&text)?;
    let mut rep = ValidationReport::new();
    for inst in &corpus {
        match instances::check_instance(inst, guard) {
            Ok(r) => rep.extend(r.scoped(&inst.name)),
            Err(Error::Invalid { report, .. }) => rep.extend(report.scoped(&inst.name)),
            Err(e) if e.is_structural() => rep.structural(format!("{}: {e}", inst.name)),
            Err(e) => return Err(e),
        }
    }
    Ok(Report::new("corpus")
        .condition(rep.is_valid())
        .violations(rep)
        .witness(json!({ "instances": corpus.len() })))
}
