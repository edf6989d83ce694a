use std::path::PathBuf;

use alexsheaf_cli::document;
use alexsheaf_cli::model::Model;
use alexsheaf_cli::normalize::normalize;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn run(args: &[&str]) -> alexsheaf_cli::Outcome {
    alexsheaf_cli::run(std::iter::once("alexsheaf").chain(args.iter().copied()))
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let json = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    (out.code, json)
}

fn dim(file: &str, open: &str, extra: &[&str]) -> u64 {
    let path = fixture(file);
    let mut args = vec!["sections", path.as_str(), "--open", open];
    args.extend_from_slice(extra);
    let (code, json) = run_json(&args);
    assert_eq!(code, 0, "{json}");
    json["data"]["dim"].as_u64().unwrap()
}

#[test]
fn sections_over_a_star_are_the_value_at_its_point() {
    assert_eq!(dim("example1_square.sheaf", "star:p", &[]), 1);
    assert_eq!(dim("example1_square.sheaf", "star:q1", &[]), 2);
    assert_eq!(dim("example4_fan.sheaf", "star:q", &[]), 2);
}

#[test]
fn constant_sheaf_on_a_connected_open_has_one_dimensional_sections() {
    for open in ["star:q1,star:q2", "open:U", "star:p", "r"] {
        assert_eq!(dim("constant.sheaf", open, &[]), 1, "{open}");
    }
}

#[test]
fn sheaf_is_selected_by_name() {
    assert_eq!(dim("constant.sheaf", "open:U", &["--sheaf", "K"]), 1);
    let path = fixture("constant.sheaf");
    let out = run(&["sections", &path, "--open", "open:U", "--sheaf", "nope"]);
    assert_eq!(out.code, 2);
}

#[test]
fn stalk_at_every_point_matches_the_value() {
    let path = fixture("example1_square.sheaf");
    let (code, json) = run_json(&["stalk", &path]);
    assert_eq!(code, 0);
    assert_eq!(json["data"]["stalks"].as_array().unwrap().len(), 4);
    let (code, _) = run_json(&["stalk", &path, "--point", "r"]);
    assert_eq!(code, 0);
}

#[test]
fn quotient_of_a_poset_is_all_singletons() {
    let (code, json) = run_json(&["quotient", &fixture("example1_square.sheaf")]);
    assert_eq!(code, 0);
    assert_eq!(json["data"]["all_singletons"], true);
    assert_eq!(json["data"]["classes"].as_array().unwrap().len(), 4);
}

#[test]
fn quotient_collapses_cycles() {
    let (code, json) = run_json(&["quotient", &fixture("preorder.sheaf")]);
    assert_eq!(code, 0);
    assert_eq!(json["data"]["all_singletons"], false);
    assert_eq!(json["data"]["classes"].as_array().unwrap().len(), 2);
}

#[test]
fn identity_and_scaling_are_isomorphisms() {
    let path = fixture("constant.sheaf");
    for name in ["id", "double"] {
        let (code, json) = run_json(&["morphism", &path, "--name", name]);
        assert_eq!(code, 0, "{json}");
        assert_eq!(json["data"]["isomorphism"], true);
        assert_eq!(json["data"]["injective"], true);
        assert_eq!(json["data"]["surjective"], true);
    }
    let text = run(&["morphism", &path, "--name", "id"]).stdout;
    assert!(text.contains("isomorphism: true"), "{text}");
}

#[test]
fn scaling_by_the_characteristic_is_zero() {
    let path = fixture("constant.sheaf");
    let (code, json) = run_json(&["morphism", &path, "--name", "double", "--field", "fp:2"]);
    assert_eq!(code, 0);
    assert_eq!(json["data"]["isomorphism"], false);
    assert_eq!(json["data"]["injective"], false);
}

#[test]
fn opens_of_the_square() {
    let (code, json) = run_json(&["opens", &fixture("example1_square.sheaf")]);
    assert_eq!(code, 0);
    let opens = json["data"]["opens"].as_array().unwrap();
    assert_eq!(opens.len(), 6);
    assert!(opens.contains(&serde_json::json!([])));
    assert!(opens.contains(&serde_json::json!(["p", "q1", "q2", "r"])));
    assert!(opens.contains(&serde_json::json!(["q1", "q2", "r"])));
}

#[test]
fn glue_of_compatible_sections() {
    let (code, json) = run_json(&[
        "glue",
        &fixture("example1_square.sheaf"),
        "--sections",
        "s1,s2",
    ]);
    assert_eq!(code, 0, "{json}");
    let open: Vec<&str> = json["data"]["open"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(open, ["q1", "q2", "r"]);
}

#[test]
fn check_passes_on_every_well_formed_example() {
    for f in [
        "example1_square.sheaf",
        "example2_span.sheaf",
        "example3_two_targets.sheaf",
        "example4_fan.sheaf",
        "constant.sheaf",
        "glue_conflict.sheaf",
    ] {
        let out = run(&["check", &fixture(f)]);
        assert_eq!(out.code, 0, "{f}: {}", out.stdout);
        assert!(out.stdout.ends_with("result: PASS\n"));
    }
}

#[test]
fn same_seed_gives_identical_output() {
    for args in [
        vec!["check", "--seed", "7"],
        vec!["check", "--seed", "7", "--json"],
        vec!["stalk", "--json"],
    ] {
        let mut a = args.clone();
        let path = fixture("example3_two_targets.sheaf");
        a.insert(1, &path);
        assert_eq!(run(&a), run(&a));
    }
    let path = fixture("example3_two_targets.sheaf");
    let seed3 = run(&["check", &path, "--seed", "3", "--json"]).stdout;
    assert!(seed3.contains("\"seed\": 3"));
}

fn model_of(text: &str) -> Model {
    Model::new(document::parse(text).unwrap(), None).unwrap()
}

#[test]
fn normalized_document_round_trips() {
    for f in [
        "example1_square.sheaf",
        "example4_fan.sheaf",
        "constant.sheaf",
        "preorder.sheaf",
        "glue_conflict.sheaf",
    ] {
        let original = model_of(&std::fs::read_to_string(fixture(f)).unwrap());
        let once = normalize(&original).unwrap();
        let reparsed = model_of(&once);
        assert_eq!(
            normalize(&reparsed).unwrap(),
            once,
            "{f}: normalization is not idempotent"
        );
        if let Ok(poset) = original.poset() {
            let again = reparsed.poset().unwrap();
            for block in &original.doc.sheaves {
                let name = block.name.value.as_str();
                let a = original.sheaf(&poset, block).unwrap();
                let b = reparsed
                    .sheaf(&again, reparsed.sheaf_block(Some(name)).unwrap())
                    .unwrap();
                assert_eq!(a, b, "{f}: sheaf {name}");
            }
        }
    }
}

#[test]
fn check_embeds_the_normalized_document() {
    let path = fixture("example2_span.sheaf");
    let (_, json) = run_json(&["check", &path]);
    let embedded = json["data"]["normalized_document"].as_str().unwrap();
    let direct = normalize(&model_of(&std::fs::read_to_string(&path).unwrap())).unwrap();
    assert_eq!(embedded, direct);
}

#[test]
fn json_reports_share_one_shape() {
    let path = fixture("example1_square.sheaf");
    let (_, json) = run_json(&["sections", &path, "--open", "open:U"]);
    let obj = json.as_object().unwrap();
    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    assert_eq!(keys, ["checks", "command", "data", "seed"]);
    assert_eq!(json["command"], "sections");
    for c in json["checks"].as_array().unwrap() {
        assert!(c["name"].is_string() && c["detail"].is_string());
        assert!(["pass", "fail", "error"].contains(&c["status"].as_str().unwrap()));
    }
    // exact scalars are strings
    let basis = json["data"]["rref_basis"].as_array().unwrap();
    assert!(basis
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .all(Value::is_string));
}

#[test]
fn failed_checks_exit_one() {
    assert_eq!(run(&["check", &fixture("path_dependent.sheaf")]).code, 1);
    assert_eq!(
        run(&["check", &fixture("unnatural_morphism.sheaf")]).code,
        1
    );
    let (code, json) = run_json(&["check", &fixture("preorder.sheaf")]);
    assert_eq!(code, 1);
    assert_eq!(json["data"]["witnesses"][0]["witness"]["kind"], "cycle");
    assert_eq!(
        run(&["sections", &fixture("example1_square.sheaf"), "--open", "p"]).code,
        1
    );
    let out = run(&[
        "glue",
        &fixture("glue_conflict.sheaf"),
        "--sections",
        "left,right",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.ends_with("result: FAIL\n"));
}

#[test]
fn malformed_input_reports_its_location() {
    let path = fixture("malformed_shape.sheaf");
    let out = run(&["check", &path]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 9, column 11"), "{}", out.stderr);
    assert!(out.stderr.contains("expected a 2x1 matrix, found 1x2"));
    let (code, json) = run_json(&["check", &path]);
    assert_eq!(code, 2);
    assert_eq!(
        json["data"]["location"],
        serde_json::json!({"line": 9, "column": 11})
    );
    assert_eq!(json["checks"][0]["status"], "error");
}

#[test]
fn usage_errors_exit_two() {
    let path = fixture("example1_square.sheaf");
    assert_eq!(run(&["stalk", &path, "--point", "nowhere"]).code, 2);
    assert_eq!(run(&["check", &path, "--field", "fp:4"]).code, 2);
    assert_eq!(run(&["check", "/nonexistent/file.sheaf"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}
