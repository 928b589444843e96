use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pslab(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pslab"))
        .args(args)
        .env("PSLAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs")
        .join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn full_suite_at_level_one_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = pslab(
        &[
            "verify",
            "--k",
            "1",
            "--i",
            "all",
            "--max-weight",
            "10",
            "--checks",
            "all",
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_valid(&schema("report.schema.json"), &report);
    assert_eq!(report["passed"], true);
    assert_eq!(report["first_counterexample"], Value::Null);
    let checks: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    for name in [
        "presentation",
        "primed",
        "ideals",
        "lifting",
        "tau",
        "chain",
        "annihilation",
        "charge-bound",
        "characters",
    ] {
        assert!(checks.contains(&name), "{name} missing");
    }
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["cases"].as_u64().unwrap() > 0 || c["check"] == "pattern"));
}

#[test]
fn zero_weight_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pslab(
        &["verify", "--k", "1", "--max-weight", "0"],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(2));
    for bad in [
        &["verify", "--k", "0", "--max-weight", "3"][..],
        &["verify", "--k", "2", "--i", "5", "--max-weight", "3"],
        &["dump", "kernel", "--k", "1"],
    ] {
        assert_eq!(
            pslab(bad, &dir.path().join("c.json")).status.code(),
            Some(2),
            "{bad:?}"
        );
    }
}

#[test]
fn annihilation_at_level_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = pslab(
        &[
            "verify",
            "--k",
            "2",
            "--checks",
            "annihilation",
            "--max-weight",
            "8",
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["checks"][0]["check"], "annihilation");
    assert_eq!(report["checks"][0]["passed"], true);
}

#[test]
fn reports_do_not_depend_on_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.json");
    for format in ["json", "csv", "table"] {
        let base = [
            "verify",
            "--k",
            "2",
            "--max-weight",
            "7",
            "--checks",
            "presentation,chain,lifting",
            "--format",
            format,
        ];
        let one = pslab(&[&base[..], &["--jobs", "1"]].concat(), &cache);
        let many = pslab(&[&base[..], &["--jobs", "4"]].concat(), &cache);
        assert_eq!(one.status.code(), Some(0));
        assert_eq!(one.stdout, many.stdout, "{format}");
    }
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.json");
    let plain: Value = serde_json::from_str(&stdout(&pslab(
        &["verify", "--k", "1", "--max-weight", "4"],
        &cache,
    )))
    .unwrap();
    assert!(plain.get("timing_ms").is_none());
    let timed: Value = serde_json::from_str(&stdout(&pslab(
        &["verify", "--k", "1", "--max-weight", "4", "--timing"],
        &cache,
    )))
    .unwrap();
    assert!(timed["timing_ms"].is_u64());
    assert_valid(&schema("report.schema.json"), &timed);
}

#[test]
fn csv_is_a_projection_of_json() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.json");
    let args = [
        "verify",
        "--k",
        "2",
        "--i",
        "1",
        "--max-weight",
        "6",
        "--checks",
        "presentation,tau",
    ];
    let json: Value = serde_json::from_str(&stdout(&pslab(&args, &cache))).unwrap();
    let csv = stdout(&pslab(&[&args[..], &["--format", "csv"]].concat(), &cache));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("check,k,i,weight,charge"));
    let expected =
        json["checks"].as_array().unwrap().len() + json["pieces"].as_array().unwrap().len();
    assert_eq!(lines.len() - 1, expected);
    let piece = &json["pieces"][5];
    let row = format!(
        "presentation,2,1,{},{},{},{},{},true,1,",
        piece["weight"],
        piece["charge"],
        piece["dim_monomials"],
        piece["dim_ideal"],
        piece["dim_kernel"]
    );
    assert!(lines.contains(&row.as_str()), "{row}");
}

#[test]
fn wrong_convention_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.json");
    let out = pslab(
        &[
            "verify",
            "--k",
            "2",
            "--i",
            "1",
            "--max-weight",
            "6",
            "--checks",
            "characters",
            "--convention",
            "first-i",
        ],
        &cache,
    );
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["passed"], false);
    assert_eq!(report["first_counterexample"]["check"], "characters");
    assert_valid(&schema("report.schema.json"), &report);

    let out = pslab(
        &[
            "char",
            "--k",
            "1",
            "--i",
            "1",
            "--max-weight",
            "6",
            "--convention",
            "from-i-plus-one",
        ],
        &cache,
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("report.json");
    let out = pslab(
        &[
            "verify",
            "--k",
            "1",
            "--max-weight",
            "3",
            "--output",
            target.to_str().unwrap(),
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = pslab(
        &[
            "verify",
            "--k",
            "1",
            "--max-weight",
            "5",
            "--output",
            target.to_str().unwrap(),
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

/// Partitions of `n` whose parts differ pairwise by at least 2, by brute force.
fn difference_two_partitions(n: u32) -> usize {
    fn go(n: u32, max: u32) -> Vec<Vec<u32>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in 1..=n.min(max) {
            for mut rest in go(n - p, p) {
                rest.insert(0, p);
                out.push(rest);
            }
        }
        out
    }
    go(n, n)
        .into_iter()
        .filter(|p| p.windows(2).all(|w| w[0] - w[1] >= 2))
        .count()
}

#[test]
fn rogers_ramanujan_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = pslab(
        &[
            "char",
            "--k",
            "1",
            "--i",
            "0",
            "--max-weight",
            "8",
            "--format",
            "table",
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .filter(|cols| cols.len() == 5 && cols[0].parse::<u32>().is_ok())
        .collect();
    assert_eq!(rows.len(), 9);
    for cols in rows {
        let n: u32 = cols[0].parse().unwrap();
        let expected = difference_two_partitions(n).to_string();
        assert_eq!(cols[1], expected, "dimension at weight {n}");
        assert_eq!(cols[2], expected, "difference-two column at weight {n}");
        assert_eq!(cols[4], "yes");
    }
}

#[test]
fn char_json_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = pslab(
        &[
            "char",
            "--k",
            "3",
            "--i",
            "2",
            "--max-weight",
            "10",
            "--format",
            "json",
        ],
        &dir.path().join("c.json"),
    );
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_valid(&schema("char.schema.json"), &doc);
    assert_eq!(
        doc["tables"][0]["dimension"][0],
        serde_json::json!([0, [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]])
    );
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("nested").join("dims.json");
    let args = ["char", "--k", "2", "--i", "all", "--max-weight", "9"];
    let first = pslab(&args, &cache);
    assert_eq!(first.status.code(), Some(0));
    assert!(cache.exists());
    let second = pslab(&args, &cache);
    assert_eq!(first.stdout, second.stdout);
    let fresh = pslab(&[&args[..], &["--no-cache"]].concat(), &cache);
    assert_eq!(first.stdout, fresh.stdout);

    let listing = stdout(&pslab(&["cache", "inspect"], &cache));
    assert!(listing.contains("entries: 3"), "{listing}");
    assert!(listing.contains("k=2 i=1 max-weight=9"));

    // a tampered entry is served as-is, which shows the second run really read the cache
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cache).unwrap()).unwrap();
    doc["entries"]["k2/i0/n9"]["dimension"][0][1][0] = serde_json::json!(7);
    std::fs::write(&cache, doc.to_string()).unwrap();
    let tampered = pslab(&args, &cache);
    assert_eq!(tampered.status.code(), Some(1));

    // entries from another version are ignored
    doc["version"] = serde_json::json!("0.0.0+0");
    std::fs::write(&cache, doc.to_string()).unwrap();
    let listing = stdout(&pslab(&["cache", "inspect"], &cache));
    assert!(
        listing.contains("entries: 0") && listing.contains("stale entries from another version: 3"),
        "{listing}"
    );
    let recomputed = pslab(&args, &cache);
    assert_eq!(recomputed.stdout, first.stdout);

    std::fs::write(&cache, "not json").unwrap();
    assert_eq!(pslab(&args, &cache).stdout, first.stdout);

    let cleared = stdout(&pslab(&["cache", "clear"], &cache));
    assert!(cleared.starts_with("removed"));
    assert!(!cache.exists());
    assert!(stdout(&pslab(&["cache", "clear"], &cache)).starts_with("no cache"));
}

#[test]
fn dump_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.json");
    let run = |args: &[&str]| {
        let out = pslab(args, &cache);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        stdout(&out)
    };
    assert_eq!(
        run(&["dump", "generators", "--k", "1", "--t", "3"]),
        "2*x(-2)*x(-1)\n"
    );
    assert_eq!(run(&["dump", "generators", "--k", "1", "--t", "1"]), "");
    assert_eq!(
        run(&["dump", "generators", "--k", "1", "--t", "4", "--primed"]),
        "x(-2)^2\n"
    );
    assert_eq!(
        run(&["dump", "kernel", "--k", "1", "--i", "0", "--weight", "2", "--charge", "2"]),
        "x(-1)^2\n"
    );
    assert_eq!(
        run(&["dump", "basis", "--k", "1", "--i", "0", "--weight", "0", "--charge", "0"]),
        "1\n"
    );
    assert_eq!(
        run(&["dump", "basis", "--k", "1", "--i", "0", "--weight", "3", "--charge", "5"]),
        ""
    );
    assert_eq!(
        run(&["dump", "kernel", "--k", "2", "--weight", "2", "--charge", "2"]),
        ""
    );
    // weight 4, charge 2 at level 1: one relation, one surviving monomial
    assert_eq!(
        run(&["dump", "kernel", "--k", "1", "--weight", "4", "--charge", "2"])
            .lines()
            .count(),
        1
    );
    assert_eq!(
        run(&["dump", "basis", "--k", "1", "--weight", "4", "--charge", "2"])
            .lines()
            .count(),
        1
    );
}
