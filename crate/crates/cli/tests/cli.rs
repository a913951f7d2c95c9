use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).to_string_lossy().into_owned()
}

fn skewcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewcert")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = skewcert(&all);
    (o.status.code().unwrap(), serde_json::from_slice(&o.stdout).expect("JSON report"))
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn temp(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("skewcert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn direct_iso_on_e1_over_z2() {
    let o = skewcert(&["verify", "direct-iso", "-g", &fixture("e1.json"), "-G", &fixture("z2.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS direct-iso on e1 over z2, dims 16/16, signature {4}"), "{}", stdout(&o));
}

#[test]
fn skew_over_trivial_group_is_the_input() {
    let (code, r) = json(&["graph", "skew", "-g", &fixture("e1.json"), "-G", &fixture("trivial.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["passed"], true);
    let g = &r["details"]["graph"];
    assert_eq!(g["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(g["edges"].as_array().unwrap().len(), 1);
}

#[test]
fn every_fixture_certifies() {
    let (e1, chain2, pair) = (fixture("e1.json"), fixture("chain2.json"), fixture("pair-groupoid.json"));
    let groups = ["z2.json", "z3.json", "z4.json"].map(fixture);
    let mut runs: Vec<Vec<String>> = Vec::new();
    for g in &groups {
        for graph in [&e1, &chain2] {
            for cmd in ["eqvt-iso", "direct-iso", "diagram"] {
                runs.push(vec!["verify".into(), cmd.into(), "-g".into(), graph.clone(), "-G".into(), g.clone()]);
            }
            runs.push(vec!["verify".into(), "free-action".into(), "-g".into(), graph.clone(), "-G".into(), g.clone()]);
        }
    }
    for cmd in ["gpd-iso", "semi-cross", "equivalence", "bimodule"] {
        runs.push(vec!["verify".into(), cmd.into(), "-q".into(), pair.clone(), "-G".into(), fixture("z2.json")]);
    }
    runs.push(vec!["algebra".into(), "ck".into(), "-g".into(), chain2.clone()]);
    for args in runs {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = skewcert(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}{}", stdout(&o), stderr(&o));
        assert!(stdout(&o).starts_with("PASS"), "{args:?}");
    }
}

#[test]
fn klein_fixture_with_klein_labels() {
    let graph = temp(
        "e1-klein.json",
        r#"{ "vertices": ["v", "w", "x"], "edges": [
        { "id": "f", "src": "v", "rng": "w", "label": "a" }, { "id": "h", "src": "x", "rng": "w", "label": "ab" } ] }"#,
    );
    let (code, r) = json(&["verify", "direct-iso", "-g", &graph, "-G", &fixture("klein.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["dims"], serde_json::json!([9 * 16, 9 * 16]));
    assert_eq!(r["signatures"][0], serde_json::json!([12]));
}

#[test]
fn gross_tucker_recovers_e1() {
    let (code, r) = json(&["graph", "gross-tucker", "-g", &fixture("e1.json"), "-G", &fixture("z2.json")]);
    assert_eq!(code, 0);
    let q = &r["details"]["quotient"];
    assert_eq!(q["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(q["edges"][0]["label"], "g");
    assert_eq!(r["details"]["iso"]["vertices"].as_object().unwrap().len(), 4);
}

#[test]
fn swap_on_two_copies_has_a_two_vertex_quotient() {
    let args =
        ["graph", "quotient", "-g", &fixture("two-e1.json"), "-G", &fixture("z2.json"), "-a", &fixture("swap.json")];
    let (code, r) = json(&args);
    assert_eq!(code, 0);
    let q = &r["details"]["quotient"];
    assert_eq!((q["vertices"].as_array().unwrap().len(), q["edges"].as_array().unwrap().len()), (2, 1));
}

#[test]
fn quotient_writes_a_loadable_graph() {
    let out = temp("quotient.json", "");
    let o = skewcert(&["graph", "quotient", "-g", &fixture("chain2.json"), "-G", &fixture("z3.json"), "-o", &out]);
    assert_eq!(o.status.code(), Some(0));
    let o = skewcert(&["verify", "eqvt-iso", "-g", &out, "-G", &fixture("z3.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn convert_round_trips_cell_names() {
    let sk = json(&["graph", "skew", "-g", &fixture("e1.json"), "-G", &fixture("z2.json")]).1;
    let names = |g: &Value| -> Vec<String> {
        let mut v: Vec<String> =
            g["vertices"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
        v.extend(g["edges"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap().to_string()));
        v.sort();
        v
    };
    let skew_names = names(&sk["details"]["graph"]);
    for to in ["kumjian-pask", "gross-tucker"] {
        let (code, r) = json(&["convert", "-g", &fixture("e1.json"), "-G", &fixture("z2.json"), "--to", to]);
        assert_eq!(code, 0);
        let map = r["details"]["to_skew"].as_object().unwrap();
        let converted = names(&r["details"]["graph"]);
        let mut image: Vec<String> = converted.iter().map(|n| map[n].as_str().unwrap().to_string()).collect();
        image.sort();
        assert_eq!(image, skew_names, "{to}");
    }
    let (_, same) = json(&["convert", "-g", &fixture("e1.json"), "-G", &fixture("z2.json"), "--to", "skew"]);
    assert_eq!(same["details"]["graph"], sk["details"]["graph"]);
}

#[test]
fn convert_over_trivial_group_keeps_the_shape() {
    let (code, r) =
        json(&["convert", "-g", &fixture("chain2.json"), "-G", &fixture("trivial.json"), "--to", "kumjian-pask"]);
    assert_eq!(code, 0);
    let g = &r["details"]["graph"];
    assert_eq!((g["vertices"].as_array().unwrap().len(), g["edges"].as_array().unwrap().len()), (3, 2));
}

#[test]
fn suite_run_seed_42() {
    let o = skewcert(&["suite", "run", "--seed", "42", "--cases", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("graph 50/50 pass"), "{}", stdout(&o));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "eqvt-iso", "-g", &fixture("chain2.json"), "-G", &fixture("z2.json")];
    let (mut a, mut b) = (json(&args).1, json(&args).1);
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());

    let suite = ["suite", "run", "--seed", "7", "--cases", "4", "--groupoid-cases", "3", "--free-cases", "2"];
    let (mut a, mut b) = (json(&suite).1, json(&suite).1);
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn equivalence_kinds() {
    let pair = fixture("pair-groupoid.json");
    for kind in ["stable", "kernel"] {
        let (code, r) = json(&["verify", "equivalence", "-q", &pair, "-G", "z2", "--kind", kind]);
        assert_eq!(code, 0);
        assert_eq!(r["details"][kind]["passed"], true);
    }
    let o = skewcert(&["verify", "equivalence", "-q", &pair, "-G", "z2", "--kind", "other"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2_and_name_the_source() {
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec!["verify".into(), "direct-iso".into(), "-g".into(), "missing.json".into(), "-G".into(), "z2".into()],
            "missing.json",
        ),
        (
            vec![
                "verify".into(),
                "direct-iso".into(),
                "-g".into(),
                temp("broken.json", "{ \"vertices\": ["),
                "-G".into(),
                "z2".into(),
            ],
            "broken.json",
        ),
        (
            vec![
                "graph".into(),
                "skew".into(),
                "-g".into(),
                temp(
                    "dangling.json",
                    r#"{ "vertices": ["v"], "edges": [{ "id": "f", "src": "v", "rng": "x", "label": "g" }] }"#,
                ),
                "-G".into(),
                "z2".into(),
            ],
            "unknown vertex `x`",
        ),
        (vec!["algebra".into(), "ck".into(), "-g".into(), fixture("cycle.json")], "cycle through edges"),
        (
            vec!["verify".into(), "direct-iso".into(), "-g".into(), fixture("two-e1.json"), "-G".into(), "z2".into()],
            "edge `f1` has no label",
        ),
        (
            vec![
                "verify".into(),
                "diagram".into(),
                "-g".into(),
                fixture("e1.json"),
                "-G".into(),
                fixture("klein.json"),
            ],
            "unknown group element",
        ),
        (
            vec![
                "verify".into(),
                "free-action".into(),
                "-g".into(),
                fixture("two-e1.json"),
                "-G".into(),
                "z2".into(),
                "-a".into(),
                temp("id.json", "{}"),
            ],
            "not free",
        ),
        (
            vec![
                "verify".into(),
                "gpd-iso".into(),
                "-q".into(),
                temp("badgpd.json", r#"{ "units": ["u"], "arrows": [{ "id": "x", "src": "u", "rng": "u" }] }"#),
                "-G".into(),
                "z2".into(),
            ],
            "badgpd.json",
        ),
    ];
    for (args, needle) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let o = skewcert(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn certification_failure_exits_1() {
    let o = skewcert(&["--max-dim", "4", "verify", "direct-iso", "-g", &fixture("e1.json"), "-G", "z2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL direct-iso"));
}
