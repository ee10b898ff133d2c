use std::path::{Path, PathBuf};
use std::process::Command;

use kleislikit::abskl2::Kleisli2;
use kleislikit::klext::LiftInput;
use kleislikit::pseudomonadkit::{Pseudomonad, PseudomonadData};
use kleislikit::twocat::TwoFunctor;
use kleislikit::Guard;
use serde_json::Value;

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    repo().join("fixtures").join(name)
}

fn kleislikit() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kleislikit"));
    c.current_dir(repo()).env_remove("KLEISLIKIT_GUARD");
    c
}

/// Run and return (exit code, report); every report must fit the schema.
fn run(c: &mut Command) -> (i32, Value) {
    let out = c.output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"));
    conforms(&report);
    (out.status.code().unwrap(), report)
}

fn conforms(report: &Value) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(repo().join("schema/report.schema.json")).unwrap()).unwrap();
    let o = report.as_object().expect("report is an object");
    for k in schema["required"].as_array().unwrap() {
        assert!(o.contains_key(k.as_str().unwrap()), "missing {k}");
    }
    let props = schema["properties"].as_object().unwrap();
    for k in o.keys() {
        assert!(props.contains_key(k), "unexpected key {k}");
    }
    assert!(report["condition"].is_boolean() || report["condition"].is_null());
    for v in report["violations"].as_array().unwrap() {
        assert!(v["law"].is_string() && v["at"].is_array());
    }
}

fn bools(v: &Value) -> Vec<bool> {
    v.as_array().unwrap().iter().map(|b| b.as_bool().unwrap()).collect()
}

#[test]
fn identity_monad_profile_is_all_true() {
    let (code, r) = run(kleislikit().args(["check", "--profile"]).arg(fixture("identity_monad.json")));
    assert_eq!(code, 0);
    assert_eq!(bools(&r["conditions"]), vec![true; 5]);
    assert_eq!(r["agree"], true);
}

#[test]
fn const_terminal_profile_is_all_false_and_still_succeeds() {
    let (code, r) = run(kleislikit().args(["check", "--profile"]).arg(fixture("const_terminal.json")));
    assert_eq!(code, 0);
    assert_eq!(bools(&r["conditions"]), vec![false; 5]);
    assert_eq!(r["agree"], true);
    assert_eq!(r["condition"], false);
}

#[test]
fn plain_check_matches_the_profile() {
    for f in ["identity_monad.json", "const_terminal.json", "chain2_top_closure.json"] {
        let (_, plain) = run(kleislikit().arg("check").arg(fixture(f)));
        let (_, full) = run(kleislikit().args(["check", "--profile"]).arg(fixture(f)));
        assert_eq!(plain["condition"], full["condition"], "{f}");
    }
}

#[test]
fn broken_category_exits_with_violations() {
    let (code, r) = run(kleislikit().arg("validate").arg(fixture("broken_category.json")));
    assert_eq!(code, 1);
    assert_eq!(r["condition"], false);
    let laws: Vec<&str> = r["violations"].as_array().unwrap().iter().map(|v| v["law"].as_str().unwrap()).collect();
    assert!(laws.contains(&"identity"), "{laws:?}");
}

#[test]
fn valid_fixtures_validate() {
    for f in [
        "walking_arrow.json",
        "identity_monad.json",
        "const_terminal_abskl1.json",
        "twisted_pseudomonad.json",
        "terminal_abskl2.json",
    ] {
        let (code, r) = run(kleislikit().arg("validate").arg(fixture(f)));
        assert_eq!((code, &r["condition"]), (0, &Value::Bool(true)), "{f}: {r}");
    }
}

#[test]
fn size_guard_flag_exits_two() {
    let (code, r) = run(kleislikit().args(["check", "--profile", "--guard", "1"]).arg(fixture("chain2_top_closure.json")));
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("size guard"));
}

#[test]
fn guard_flag_beats_environment() {
    let f = fixture("chain2_top_closure.json");
    let (code, _) = run(kleislikit().env("KLEISLIKIT_GUARD", "1").args(["check", "--profile"]).arg(&f));
    assert_eq!(code, 2);
    let (code, _) = run(kleislikit()
        .env("KLEISLIKIT_GUARD", "1")
        .args(["check", "--profile", "--guard", "1000000"])
        .arg(&f));
    assert_eq!(code, 0);
}

#[test]
fn config_file_supplies_the_guard() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.toml");
    std::fs::write(&cfg, "[guard]\nbound = 1\n").unwrap();
    let (code, _) = run(kleislikit()
        .arg("--config")
        .arg(&cfg)
        .args(["check", "--profile"])
        .arg(fixture("chain2_top_closure.json")));
    assert_eq!(code, 2);
}

#[test]
fn unknown_morphism_is_structural() {
    let (code, r) = run(kleislikit().arg("thunkable").arg(fixture("const_terminal_abskl1.json")).arg("nope"));
    assert_eq!(code, 2);
    assert!(r["condition"].is_null());
}

#[test]
fn kleisli_output_feeds_thunkable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("abskl.json");
    let (code, _) = run(kleislikit().arg("kleisli").arg(fixture("const_terminal.json")).arg("--out").arg(&out));
    assert_eq!(code, 0);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let f = s["comonad"]["base"]["morphisms"][0]["id"].as_str().unwrap().to_string();
    let (code, r) = run(kleislikit().arg("thunkable").arg(&out).arg(&f));
    assert_eq!(code, 0);
    assert!(r["condition"].is_boolean());
}

#[test]
fn reflect_writes_valid_documents() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = run(kleislikit().arg("reflect").arg(fixture("chain2_top_closure.json")).arg("--out").arg(dir.path()));
    assert_eq!(code, 0);
    assert_eq!(r["condition"], false);
    for f in ["abskl1.json", "monad.json", "unit.json"] {
        let (code, r) = run(kleislikit().arg("validate").arg(dir.path().join(f)));
        assert_eq!((code, &r["condition"]), (0, &Value::Bool(true)), "{f}: {r}");
    }
}

#[test]
fn two_dimensional_commands_agree_on_a_twisted_pseudomonad() {
    let f = fixture("twisted_pseudomonad.json");
    let (code, r) = run(kleislikit().args(["check2", "--profile"]).arg(&f));
    assert_eq!(code, 0);
    assert_eq!(r["agree"], true);
    let (_, iso) = run(kleislikit().arg("isobidescent").arg(&f));
    assert_eq!(iso["condition"], r["conditions"][1]);
    let pm: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let x = pm["base"]["objects"][0].as_str().unwrap();
    let (code, cones) = run(kleislikit().arg("cones").arg(&f).args([x, x]));
    assert_eq!(code, 0);
    assert!(!cones["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn lift_verifies_hom_bijection() {
    let (code, r) = run(kleislikit().arg("lift").arg(fixture("hom_twisted_to_terminal.json")));
    assert_eq!(code, 0);
    assert_eq!(r["condition"], true);
}

#[test]
fn lift_of_the_unit_morphism_is_valid() {
    let d: PseudomonadData =
        serde_json::from_str(&std::fs::read_to_string(fixture("twisted_pseudomonad.json")).unwrap()).unwrap();
    let pm = Pseudomonad::from_data(&d).unwrap();
    let k = Kleisli2::new(&pm, &Guard::default()).unwrap();
    let input = LiftInput {
        source: d,
        target: k.abskl.to_data(),
        g: k.j.to_data(),
        gbar: TwoFunctor::identity(&k.free.cat).to_data(),
    };
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("lift.json");
    std::fs::write(&p, serde_json::to_string(&input).unwrap()).unwrap();
    let (code, r) = run(kleislikit().arg("lift").arg(&p));
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["condition"], true);
}

#[test]
fn small_corpus_round_trips_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("k.toml");
    std::fs::write(
        &cfg,
        "[corpus]\nmax_poset = 2\nmax_objects = 1\nmax_morphisms = 2\ncomorphism_max_morphisms = 1\n\n[corpus.lift]\nmax_objects = 1\nmax_onecells = 2\nmax_twocells = 4\n",
    )
    .unwrap();
    let out = dir.path().join("corpus.jsonl");
    let (code, r) = run(kleislikit().arg("--config").arg(&cfg).args(["corpus", "generate", "--out"]).arg(&out));
    assert_eq!(code, 0);
    assert!(r["witnesses"][0]["instances"].as_u64().unwrap() > 0);

    let (code, r) = run(kleislikit().args(["corpus", "check"]).arg(&out));
    assert_eq!((code, &r["condition"]), (0, &Value::Bool(true)), "{r}");

    let text = std::fs::read_to_string(&out).unwrap();
    let tampered = text.replacen("\"objects\":1", "\"objects\":7", 1);
    assert_ne!(text, tampered);
    std::fs::write(&out, tampered).unwrap();
    let (code, r) = run(kleislikit().args(["corpus", "check"]).arg(&out));
    assert_eq!(code, 1);
    assert!(r["violations"][0]["law"].as_str().unwrap().ends_with("expected_record"));
}

#[test]
fn undetectable_document_is_structural() {
    let (code, _) = run(kleislikit().arg("validate").arg(fixture("hom_twisted_to_terminal.json")));
    assert_eq!(code, 2);
}
