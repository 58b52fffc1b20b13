use std::path::Path;
use std::process::{Command, Output};

use plegma_core::famkit::FamilySpec;
use plegma_core::smodel::TableRule;
use plegma_core::spaces::Vector;
use serde_json::Value;

fn plegma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plegma")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn enumerates_single_plegma_pair_of_small_cube() {
    let out = plegma(&["plegma", "enum", "--family", "cube:2", "--window", "4", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["count"], 1);
    assert_eq!(r["result"]["tuples"][0], serde_json::json!([[1, 3], [2, 4]]));
    assert_eq!(r["verification"]["passed"], true);
}

#[test]
fn evaluates_tsirelson_norm_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.json");
    std::fs::write(&v, r#"{"3":"1","4":"1","5":"1","6":"1"}"#).unwrap();
    let arg = format!("@{}", v.display());
    let out = plegma(&["norm", "eval", "--oracle", "tsirelson:1/2", "--vec", &arg]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["value"], "3/2");
    assert_eq!(r["result"]["exact"], true);
}

#[test]
fn order_matrix_ranks_lp_below_l1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("order.json");
    let out = plegma(&["order", "matrix", "--catalog", "lp:1,lp:2,c0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = read_json(&path);
    let names: Vec<&str> = r["result"]["order"]["names"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(names, ["lp:1", "lp:2", "c0"]);
    let csv = std::fs::read_to_string(path.with_extension("csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    // Row `lp:2`, column `lp:1`: the square-summable model sits strictly below.
    assert_eq!(rows[2][1], "≺");
    assert_eq!(rows[3][2], "≺");
    assert_eq!(rows[1][3], "≻");
}

#[test]
fn malformed_family_is_a_usage_error_with_position() {
    let out = plegma(&["family", "rank", "--family", "cube:"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("position"), "{}", stderr(&out));
}

#[test]
fn unknown_subcommand_exits_one() {
    assert_eq!(plegma(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(plegma(&["--help"]).status.code(), Some(0));
}

#[test]
fn declared_weakly_null_constant_rule_fails_suppression() {
    let dir = tempfile::tempdir().unwrap();
    let f = FamilySpec::parse_with("cube:1", &|_| unreachable!()).unwrap();
    let rule = dir.path().join("rule.json");
    std::fs::write(&rule, TableRule::constant(&f, 12, &Vector::unit(1)).unwrap().to_json()).unwrap();
    let rule_arg = format!("table:@{}", rule.display());
    let base = ["sm", "check", "--family", "cube:1", "--host", "lp:2", "--rule", &rule_arg, "--k", "3"];

    let undeclared = plegma(&base);
    assert_eq!(undeclared.status.code(), Some(0), "{}", stderr(&undeclared));
    assert_eq!(stdout_json(&undeclared)["result"]["suppression_required"], false);

    let mut args = base.to_vec();
    args.push("--declare-weakly-null");
    let declared = plegma(&args);
    assert_eq!(declared.status.code(), Some(2), "{}", stderr(&declared));
    assert!(stderr(&declared).contains("suppression"));
    let r = stdout_json(&declared);
    assert_eq!(r["verification"]["passed"], false);
    assert_eq!(r["verification"]["failures"][0]["tag"], "suppression");
}

#[test]
fn replay_reproduces_report_except_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let out = plegma(&[
        "sm", "extract", "--family", "cube:1", "--host", "lp:2", "--rule", "unitmax", "--k", "2", "--window", "8",
        "--out", first.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(first.with_extension("csv").exists());

    let out = plegma(&["replay", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (mut a, mut b) = (read_json(&first), read_json(&second));
    a["timestamp"] = Value::Null;
    b["timestamp"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(
        std::fs::read(first.with_extension("csv")).unwrap(),
        std::fs::read(second.with_extension("csv")).unwrap()
    );
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_plegma"))
            .env("PLEGMA_THREADS", threads)
            .args(["family", "rank", "--family", "cube:2", "--window", "6"])
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(stdout_json(&one)["result"]["rank"], "2");
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn ramsey_finds_gapmod_witness() {
    let out = plegma(&[
        "ramsey", "search", "--family", "cube:1", "--coloring", "gapmod:2", "--target", "6", "--window", "12",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    let found = &r["result"]["result"];
    assert_eq!(found["verdict"], "found");
    assert_eq!(found["witness"], serde_json::json!([1, 3, 5, 7, 9, 11]));
}

#[test]
fn join_build_passes_sandwich() {
    let out = plegma(&[
        "join", "build", "--family", "cube:1", "--host", "dsum(sum; lp:1, lp:2)", "--rule", "inject:1(unitmax)",
        "--rule", "inject:2(unitmax)", "--k", "2", "--window", "10",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert_eq!(r["verification"]["passed"], true);
    assert!(r["result"]["sandwich"]["checked"].as_u64().unwrap() > 0);
    assert!(r["result"]["audit"]["prefixes"].as_array().is_some_and(|p| !p.is_empty()));
}

#[test]
fn weighted_join_reports_k_within_bounds() {
    let out = plegma(&[
        "join", "weighted", "--family", "cube:1", "--host", "dsum(sum; lp:1, c0)", "--rule", "inject:1(unitmax)",
        "--rule", "inject:2(unitmax)", "--weights", "1,2", "--truncation", "2", "--window", "12", "--k", "2",
        "--grid", "sampled:6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout_json(&out);
    assert_eq!(r["result"]["bounds"]["holds"], true);
    assert_eq!(r["result"]["scaled_domination"].as_array().unwrap().len(), 2);
}
