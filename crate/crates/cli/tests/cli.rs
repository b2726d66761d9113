use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use galrefl_core::invariants::Poly;
use galrefl_core::{CycMatrix, Cyclotomic};
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn galrefl(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_galrefl"))
        .args(args)
        .env("GALREFL_DATA", root().join("data"))
        .current_dir(root())
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_ok(args: &[&str]) -> Value {
    let (code, out, err) = galrefl(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn tmp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("galrefl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn group_info_for_g312() {
    let v = json_ok(&["group", "info", "--imprimitive", "3", "1", "2"]);
    // |G(de,e,r)| = d^r e^(r-1) r!, |Z| = d gcd(e,r)
    assert_eq!(v["order"], 3 * 3 * 2);
    assert_eq!(v["center"], 3);
    assert_eq!(v["group"]["d"], 3);
    let refl = json_ok(&["group", "reflections", "--imprimitive", "3", "1", "2"]);
    assert_eq!(refl["count"], v["reflections"]);
}

#[test]
fn m_is_the_root_of_unity_order() {
    let v = json_ok(&["group", "info", "--imprimitive", "4", "2", "2"]);
    assert_eq!(v["group"]["d"], 2);
    assert_eq!(v["group"]["e"], 2);
    assert_eq!(v["order"], 16);
}

#[test]
fn nbar_of_g422() {
    let (code, out, _) = galrefl(&["aut", "nbar", "--imprimitive", "4", "2", "2"]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap(), serde_json::json!({ "order": 2 }));
}

#[test]
fn g9_descent_from_the_cyclotomic_24_model() {
    for tower in ["auto", "17;23,5"] {
        let v = json_ok(&["descent", "solve", "--group", "data/G9_start.json", "--tower", tower]);
        assert_eq!(v["report"]["equivariant"], true);
        assert_eq!(v["report"]["field_conductor"], 8);
        assert_eq!(v["character_matches"], true);
        let model: BTreeMap<String, CycMatrix> = serde_json::from_value(v["model"].clone()).unwrap();
        assert!(model.values().all(|m| 8 % m.conductor() == 0));
    }
}

#[test]
fn shipped_g9_is_already_equivariant() {
    let v = json_ok(&["descent", "solve", "--group", "data/G9.json", "--tower", "auto"]);
    assert_eq!(v["report"]["equivariant"], true);
    let c = json_ok(&["descent", "cocycle", "--group", "G9"]);
    assert_eq!(c["exact"], true);
}

#[test]
fn obstruction_witness_files() {
    let v = json_ok(&["descent", "obstruction", "--group", "G9_start"]);
    assert_eq!(v["witness_verified"], true);
    let good = tmp("good.json", &serde_json::json!({ "witness": v["witness"] }).to_string());
    let w = json_ok(&["descent", "obstruction", "--group", "G9_start", "--witness", good.to_str().unwrap()]);
    assert_eq!(w["witness_verified"], true);
    let zero = serde_json::to_value(Cyclotomic::from_i64(0)).unwrap();
    let bad = tmp("bad.json", &serde_json::json!({ "witness": zero }).to_string());
    let (code, out, _) = galrefl(&["descent", "obstruction", "--group", "G9_start", "--witness", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["witness_verified"], false);
    let (code, _, _) = galrefl(&["descent", "obstruction", "--group", "G9_start", "--witness", "/nonexistent.json"]);
    assert_eq!(code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(galrefl(&["frobnicate"]).0, 2);
    assert_eq!(galrefl(&["group", "info"]).0, 2);
    assert_eq!(galrefl(&["group", "info", "--imprimitive", "3", "2", "2"]).0, 2);
    assert_eq!(galrefl(&["group", "info", "--group", "G99"]).0, 2);
    assert_eq!(galrefl(&["group", "info", "--imprimitive", "4", "1", "5"]).0, 3);
    assert_eq!(galrefl(&["aut", "search", "--imprimitive", "3", "1", "3", "--aut-bound", "10"]).0, 3);
    assert_eq!(galrefl(&["aut", "verify-structure", "--imprimitive", "2", "2", "2"]).0, 1);
    assert_eq!(galrefl(&["aut", "verify-structure", "--imprimitive", "3", "1", "2"]).0, 0);
    assert_eq!(galrefl(&["--help"]).0, 0);
}

#[test]
fn iota_assignments() {
    let data: Value = serde_json::from_str(&std::fs::read_to_string(root().join("data/G4.json")).unwrap()).unwrap();
    let good = tmp("g4.json", &data["iota"].to_string());
    let v = json_ok(&["iota", "verify", "--group", "G4", "--assignment", good.to_str().unwrap()]);
    assert_eq!(v["homomorphism"], true);
    let swapped = tmp("swap.json", r#"[{"conductor": 3, "exponent": 2, "images": {"s": "t", "t": "s"}}]"#);
    let (code, out, _) = galrefl(&["iota", "verify", "--group", "G4", "--assignment", swapped.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["character_equivariant"], false);
}

#[test]
fn chartable_round_trips() {
    let (_, a, _) = galrefl(&["chartable", "--imprimitive", "3", "1", "2"]);
    let (_, b, _) = galrefl(&["chartable", "--imprimitive", "3", "1", "2"]);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let vals: Vec<Cyclotomic> = serde_json::from_value(row["values"].clone()).unwrap();
        assert_eq!(serde_json::to_value(&vals).unwrap(), row["values"]);
    }
}

#[test]
fn rep_models() {
    let v = json_ok(&["rep", "model", "--imprimitive", "3", "1", "2", "--tuple", "[[1],[1],[]]"]);
    assert_eq!(v["irreducible"], true);
    let images: BTreeMap<String, CycMatrix> = serde_json::from_value(v["images"].clone()).unwrap();
    assert!(images.values().all(|m| m.rows() == 2));
    let w = json_ok(&["rep", "model", "--imprimitive", "4", "2", "2", "--tuple", "[[1],[],[1],[]]", "--omega", "1"]);
    assert_eq!(w["irreducible"], true);
    assert_eq!(galrefl(&["rep", "model", "--imprimitive", "3", "1", "2", "--tuple", "[[1],[2],[]]"]).0, 2);
    assert_eq!(galrefl(&["rep", "model", "--imprimitive", "3", "1", "2", "--tuple", "[[1,2],[],[]]"]).0, 2);
    let o = json_ok(&["rep", "reflection-orbit", "--imprimitive", "3", "3", "3"]);
    assert_eq!(o["equal"], true);
}

#[test]
fn galois_orbits_stay_in_the_table() {
    let v = json_ok(&["galois", "orbit", "--imprimitive", "4", "1", "2", "--char", "3"]);
    assert!(v["orbit"].as_array().unwrap().iter().all(|x| x.is_u64()));
}

#[test]
fn equivariant_bundles() {
    let v = json_ok(&["equivariant", "build", "--imprimitive", "3", "1", "2"]);
    assert_eq!(v["entries"].as_array().unwrap().len(), 9);
    let l = json_ok(&["equivariant", "algorithm-l", "--imprimitive", "1", "1", "3"]);
    assert_eq!(l["complete"], true);
    assert_eq!(l["rounds"], 1);
}

#[test]
fn invariants_are_rational() {
    let v = json_ok(&["invariants", "compute", "--imprimitive", "4", "4", "2"]);
    let polys: Vec<Poly> = serde_json::from_value(v["rational"].clone()).unwrap();
    assert_eq!(polys.len(), 2);
    assert!(polys.iter().all(|p| p.is_rational()));
    assert_eq!(serde_json::to_value(&polys).unwrap(), v["rational"]);
    let d = json_ok(&["invariants", "discriminant", "--imprimitive", "1", "1", "2"]);
    let delta: Poly = serde_json::from_value(d["rational"].clone()).unwrap();
    assert_eq!(delta.degree(), Some(2));
}

#[test]
fn output_file() {
    let p = std::env::temp_dir().join(format!("galrefl-out-{}.json", std::process::id()));
    let (code, out, _) = galrefl(&["-o", p.to_str().unwrap(), "group", "center", "--imprimitive", "4", "2", "2"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // d gcd(e,r) with d = e = r = 2
    assert_eq!(v["order"], 4);
    assert_eq!(v["formula"], 4);
}

#[test]
fn verify_all_runs_the_battery() {
    let (code, out, err) = galrefl(&["verify-all"]);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    let statuses: Vec<&str> = v["criteria"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert_eq!(statuses.len(), 13);
    assert!(statuses.iter().all(|s| *s == "PASS"));
    assert_eq!(v["criteria"][4]["details"]["exception"]["status"], "EXPECTED-FAIL");
    let (_, again, _) = galrefl(&["verify-all"]);
    assert_eq!(out, again);
}

#[test]
fn tiny_bound_skips() {
    let v = json_ok(&["verify-all", "--enumeration-bound", "10"]);
    assert_eq!(v["summary"]["1"], "SKIPPED");
    assert_eq!(v["passed"], true);
}
