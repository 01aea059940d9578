use std::process::Command;

use jsonschema::JSONSchema;
use kstack::expr::{eval_integer, parse};
use proptest::prelude::*;
use serde_json::{json, Value};

fn kstack(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kstack"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn kstack_json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, out, _) = kstack(&all);
    (code, serde_json::from_str(&out).expect("stdout is JSON"))
}

fn schema() -> JSONSchema {
    let text = include_str!("../schema/output.schema.json");
    let v: Value = serde_json::from_str(text).unwrap();
    JSONSchema::compile(&v).expect("schema compiles")
}

fn write_temp(name: &str, body: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("kstack-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn eval_gl3_quotient() {
    let (code, out, _) = kstack(&["eval", "L^10 / GL(3)"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "L^7 / ((L - 1) * (L^2 - 1) * (L^3 - 1))");
}

#[test]
fn exit_codes() {
    let (code, v) = kstack_json(&["eval", "L +"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "ParseError");
    assert_eq!(v["offset"], 3);

    let (code, v) = kstack_json(&["eval", "1/(L-2)"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "NotInvertible");

    let (code, v) = kstack_json(&["count", "1/(L^2-1)", "--q", "1"]);
    assert_eq!(code, 3);
    assert!(v["error"].is_string());

    let (code, v) = kstack_json(&["oracle", "gl", "--n", "5", "--q", "7"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "BudgetExceeded");

    let (code, v) = kstack_json(&["eval", "B(Mu(2) )"]);
    assert_eq!(code, 0, "{v}");

    let (code, v) = kstack_json(&["eval", "B(GL(2)) / Pic"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "UnknownSymbol");
}

fn as_f64(v: &Value) -> f64 {
    v["num"].as_i64().unwrap() as f64 / v["den"].as_i64().unwrap() as f64
}

#[test]
fn truncated_count_of_classifying_space() {
    // The caller's certificate is taken at its word: (0,0,1) understates the
    // linear growth of this series, so its bound is too small.
    let (code, v) = kstack_json(&["count", "B(GL(2))", "--q", "2", "--floor", "-30", "--growth", "0,0,1"]);
    assert_eq!(code, 0);
    let err = (as_f64(&v["value"]) - 1.0 / 6.0).abs();
    assert!(err < 1e-7);
    assert_eq!(v["bound"], json!({"num": 1, "den": 1u64 << 30}));
    assert!(err > as_f64(&v["bound"]));

    let (code, v) = kstack_json(&["count", "B(GL(2))", "--q", "2", "--floor", "-30"]);
    assert_eq!(code, 0);
    let err = (as_f64(&v["value"]) - 1.0 / 6.0).abs();
    assert!(err <= as_f64(&v["bound"]));
    assert!(as_f64(&v["bound"]) < 1e-5);

    let (_, oracle) = kstack_json(&["oracle", "gl", "--n", "2", "--q", "2"]);
    assert_eq!(oracle["mass"], json!({"num": 6, "den": 1}));
}

#[test]
fn oracle_outputs() {
    let (code, v) = kstack_json(&["oracle", "monomial", "--k", "3", "--q", "2", "--stratum", "origin"]);
    assert_eq!(code, 0);
    assert_eq!(v["mass"], json!({"num": 8, "den": 21}));
    let (_, v) = kstack_json(&["oracle", "mass-m13", "--q", "2"]);
    assert_eq!(v["mass"], json!({"num": 2, "den": 1}));
    let (_, v) = kstack_json(&["oracle", "cubics", "--q", "2"]);
    assert_eq!(v["mass"], json!({"num": 336, "den": 1}));
}

#[test]
fn bun_from_flags_and_file() {
    let (code, v) = kstack_json(&["bun", "sl2", "--genus", "0", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["semistable_mass"], json!({"num": 1, "den": 6}));

    let curve = write_temp("elliptic.json", r#"{"q": 2, "g": 1, "P": [1, 0, 2]}"#);
    let (code, v) = kstack_json(&["bun", "sl2", "--curve", curve.to_str().unwrap(), "--floor", "-40"]);
    assert_eq!(code, 0);
    assert_eq!(v["unstable_sum"], json!({"num": 1, "den": 1}));
    assert!(v["series"]["terms"].as_array().unwrap().len() > 10);

    let (code, v) = kstack_json(&["bun", "sl2", "--genus", "1", "--q", "2", "--zeta", "1,0,3"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "InvalidCurve");
}

#[test]
fn symbols_from_manifest() {
    let m = write_temp(
        "symbols.json",
        r#"{"symbols": [
            {"name": "E", "dimension": 1, "counts": {"2": "3", "3": "4"},
             "weights": {"0": 1, "1": 2, "2": 1}},
            {"name": "T", "dimension": 1, "closed_form": "L - 1", "invertible": true}
        ]}"#,
    );
    let m = m.to_str().unwrap();
    let (code, v) = kstack_json(&["--symbols", m, "count", "E * L + T", "--q", "3"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["value"], json!({"num": 14, "den": 1}));
    let (code, v) = kstack_json(&["--symbols", m, "weights", "E * L"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["multiplicities"][0], json!({"weight": 4, "mult": 1}));
    let (code, _) = kstack_json(&["--symbols", m, "count", "1 / T", "--q", "3"]);
    assert_eq!(code, 0);
    let (code, v) = kstack_json(&["--symbols", m, "count", "E", "--q", "5"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"], "MissingSymbolData");
}

#[test]
fn json_outputs_match_schema() {
    let schema = schema();
    let curve = write_temp("p1.json", r#"{"q": 3, "g": 0, "P": [1]}"#);
    let runs: Vec<Vec<&str>> = vec![
        vec!["eval", "L^10 / GL(3)"],
        vec!["eval", "L +"],
        vec!["eval", "1/(L-2)"],
        vec!["expand", "B(GL(2))", "--floor", "-8"],
        vec!["count", "P(3)", "--q", "5"],
        vec!["count", "B(GL(2))", "--q", "2", "--floor", "-30", "--growth", "0,0,1"],
        vec!["count", "B(Mon(3))", "--q", "3", "--floor", "-20"],
        vec!["weights", "GL(2)"],
        vec!["weights", "B(Gm)", "--floor", "-5"],
        vec!["oracle", "gl", "--n", "2", "--q", "3"],
        vec!["oracle", "monomial", "--k", "2", "--q", "3", "--stratum", "zeros=1"],
        vec!["oracle", "mass-m13", "--q", "2"],
        vec!["oracle", "cubics", "--q", "11"],
        vec!["bun", "sl2", "--genus", "1", "--q", "2", "--zeta", "1,0,2", "--floor", "-12"],
        vec!["bun", "sl2", "--curve", curve.to_str().unwrap()],
    ];
    for args in runs {
        let (_, v) = kstack_json(&args);
        let msgs: Vec<String> = match schema.validate(&v) {
            Ok(()) => continue,
            Err(errors) => errors.map(|e| e.to_string()).collect(),
        };
        panic!("{args:?} -> {v} fails schema: {msgs:?}");
    }
    assert!(!schema.is_valid(&json!({"mass": 1, "method": "x", "elapsed_ms": 0})));
}

fn division_free() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("L".to_string()),
        (0u32..6).prop_map(|n| n.to_string()),
        (1u32..4).prop_map(|n| format!("GL({n})")),
        (1u32..4).prop_map(|n| format!("SL({n})")),
        (0u32..4).prop_map(|n| format!("P({n})")),
        Just("Gm".to_string()),
        (1u32..5).prop_map(|n| format!("Sigma({n})")),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            (inner.clone(), 0i64..4).prop_map(|(a, n)| format!("({a})^{n}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn count_of_division_free_matches_integer_evaluation(text in division_free(), q in prop::sample::select(vec![2u64, 3, 4, 5, 7])) {
        let want = eval_integer(&parse(&text).unwrap(), q).unwrap();
        let (code, v) = kstack_json(&["count", &text, "--q", &q.to_string()]);
        prop_assert_eq!(code, 0);
        prop_assert_eq!(&v["value"]["den"], &json!(1));
        let got = v["value"]["num"].to_string();
        prop_assert_eq!(got.trim_matches('"'), want.to_string());
    }
}
