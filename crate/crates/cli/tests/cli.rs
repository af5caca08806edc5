use std::path::Path;
use std::process::{Command, Output};

use ffekr_core::{Report, Verdict};

fn ffekr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ffekr"))
        .args(args)
        .env_remove("FFEKR_TIER")
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Report> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("bad report line {l:?}: {e}")))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn malformed_field_is_a_usage_error() {
    for spec in ["4^1", "9^1", "3^0", "x", "2^2/1,0,1"] {
        let out = ffekr(&["field", "info", "--field", spec]);
        assert_eq!(code(&out), 2, "{spec}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&ffekr(&["nonsense"])), 2);
    assert_eq!(code(&ffekr(&[])), 2);
}

#[test]
fn field_info_and_arith() {
    let out = ffekr(&["field", "info", "--field", "3^2"]);
    assert_eq!(code(&out), 0);
    let r = &reports(&out)[0];
    assert_eq!(r.claim_id, "field-info");
    assert_eq!(r.parameters["modulus"], serde_json::json!([1, 0, 1]));
    assert_eq!(r.parameters["q"], serde_json::json!(9));

    let out = ffekr(&["field", "arith", "--field", "2^2", "--op", "mul", "--x", "2", "--y", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(reports(&out)[0].parameters["result"], serde_json::json!(3));
    let out = ffekr(&["field", "arith", "--field", "5^1", "--op", "div", "--x", "1", "--y", "0"]);
    assert_eq!(code(&out), 2);
    let out = ffekr(&["field", "arith", "--field", "5^1", "--op", "add", "--x", "7", "--y", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn poly_commands() {
    let out = ffekr(&["poly", "eval", "--field", "5^1", "--poly", "1,2,1", "--x", "3"]);
    assert_eq!(reports(&out)[0].parameters["value"], serde_json::json!(1));
    let out = ffekr(&["poly", "intersect", "--field", "5^1", "--f", "0,0,1", "--g", "0,1"]);
    assert_eq!(reports(&out)[0].parameters["shared"], serde_json::json!(2));
}

#[test]
fn hm_construction_writes_fifteen_members() {
    let out = ffekr(&["families", "construct", "hm", "--field", "5^1", "--point", "0,1", "--line", "0,0"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "5^1");
    assert_eq!(lines.len(), 16);
    let out = ffekr(&["families", "construct", "hm", "--field", "5^1", "--point", "1,0", "--line", "0,0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_and_extend_family_files() {
    let dir = tempfile::tempdir().unwrap();
    let hm = dir.path().join("hm.txt");
    let pen = dir.path().join("pencil.txt");
    let out = ffekr(&[
        "families", "construct", "hm", "--field", "5^1", "--point", "0,1", "--line", "0,0", "--out", path_str(&hm),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(reports(&out)[0].parameters["size"], serde_json::json!(15));
    let out = ffekr(&["families", "construct", "pencil", "--field", "5^1", "--point", "0,0", "--out", path_str(&pen)]);
    assert_eq!(reports(&out)[0].parameters["size"], serde_json::json!(25));

    let out = ffekr(&["families", "verify", "--t", "1", "--file", path_str(&pen)]);
    assert_eq!(code(&out), 0);
    let r = &reports(&out)[0];
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.parameters["commonPoint"], serde_json::json!([0, 0]));

    let out = ffekr(&["families", "verify", "--file", path_str(&hm)]);
    assert_eq!(code(&out), 0);
    let r = &reports(&out)[0];
    assert_eq!(r.parameters["commonPoint"], serde_json::Value::Null);
    assert!(r.notes.iter().any(|n| n.contains("HM-type")));

    // extension of the pencil minus its first member
    let text = std::fs::read_to_string(&pen).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.remove(1);
    let reduced = dir.path().join("reduced.txt");
    std::fs::write(&reduced, lines.join("\n")).unwrap();
    let restored = dir.path().join("restored.txt");
    let out = ffekr(&["families", "extend", "--file", path_str(&reduced), "--out", path_str(&restored)]);
    assert_eq!(code(&out), 0);
    let r = &reports(&out)[0];
    assert_eq!(r.parameters["unique"], serde_json::json!(true));
    assert_eq!(std::fs::read_to_string(&restored).unwrap(), text);

    let out = ffekr(&["families", "extend", "--file", path_str(&hm)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("common point"));
}

#[test]
fn duplicate_lines_warn_and_bad_lines_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("dup.txt");
    std::fs::write(&f, "5^1\n0,1,0\n0,0,1\n0,1,0\n").unwrap();
    let out = ffekr(&["families", "verify", "--file", path_str(&f)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
    assert_eq!(reports(&out)[0].parameters["size"], serde_json::json!(2));

    std::fs::write(&f, "5^1\n0,1,0\n0,7,1\n").unwrap();
    let out = ffekr(&["families", "verify", "--file", path_str(&f)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    std::fs::write(&f, "5^1\n0,0,1\n1,0,1\n").unwrap();
    let out = ffekr(&["families", "verify", "--file", path_str(&f)]);
    assert_eq!(code(&out), 1);
    let r = &reports(&out)[0];
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.witnesses.is_empty());
}

#[test]
fn threshold_command() {
    let out = ffekr(&["families", "threshold", "--field", "5^2", "--size", "604"]);
    assert_eq!(reports(&out)[0].parameters["exceeds"], serde_json::json!(true));
    let out = ffekr(&["families", "threshold", "--field", "5^2", "--size", "603"]);
    assert_eq!(reports(&out)[0].parameters["exceeds"], serde_json::json!(false));
    let out = ffekr(&["families", "threshold", "--field", "5^2", "--size", "603", "--k", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn search_and_charsum_commands() {
    let out = ffekr(&["search", "ekr", "--field", "3^1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(reports(&out)[0].parameters["maxClique"], serde_json::json!(9));

    let out = ffekr(&["search", "sam0", "--field", "3^1", "--k", "2", "--t", "2"]);
    assert_eq!(code(&out), 0);
    let out = ffekr(&["search", "rootable", "--field", "5^1", "--d", "1", "--w", "2"]);
    assert_eq!(reports(&out)[0].parameters["count"], serde_json::json!(2));
    let out = ffekr(&["search", "probe", "--field", "2^2", "--trials", "200"]);
    assert_eq!(code(&out), 0);

    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("g.txt");
    let out = ffekr(&["search", "clique", "--field", "2^1", "--k", "1", "--export", path_str(&dump)]);
    assert_eq!(code(&out), 0);
    assert_eq!(reports(&out)[0].parameters["size"], serde_json::json!(2));
    assert!(std::fs::read_to_string(&dump).unwrap().starts_with("# ffekr-graph"));
    let out = ffekr(&["search", "clique", "--field", "3^1", "--budget", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(reports(&out)[0].verdict, Verdict::BudgetExceeded);

    let out = ffekr(&["charsum", "weil", "--field", "3^2", "--poly", "0,1,0,1"]);
    assert_eq!(code(&out), 0);
    let out = ffekr(&["charsum", "quad", "--field", "5^1", "--a", "1", "--b", "0", "--c", "0"]);
    assert_eq!(reports(&out)[0].parameters["closedForm"], serde_json::json!(4));
    let out = ffekr(&["charsum", "shortcut", "--field", "3^2"]);
    assert_eq!(code(&out), 2);
    let out = ffekr(&["charsum", "mcconnel", "--field", "3^2", "--delta", "2"]);
    assert_eq!(code(&out), 0);
    let out = ffekr(&["charsum", "square-test", "--field", "5^1", "--poly", "1,2,1"]);
    assert_eq!(reports(&out)[0].parameters["root"], serde_json::json!("1,1"));
    let out = ffekr(&["directions", "carlitz", "--field", "2^2"]);
    assert_eq!(code(&out), 0);
    let out = ffekr(&["directions", "carlitz", "--field", "3^2"]);
    assert_eq!(code(&out), 1);
    let out = ffekr(&["directions", "set", "--field", "5^1", "--values", "0,1,4,4,1"]);
    assert_eq!(reports(&out)[0].parameters["spanDim"], serde_json::json!(1));
}

#[test]
fn output_formats_and_stability() {
    let args = ["--no-timing", "search", "probe", "--field", "5^1", "--trials", "300", "--seed", "4"];
    let a = ffekr(&args);
    let b = ffekr(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = &reports(&a)[0];
    assert_eq!(r.wall_time_ms, 0);
    assert_eq!(r.seed, Some(4));
    let back: Report = serde_json::from_str(&r.to_json_line()).unwrap();
    assert_eq!(&back, r);

    let out = ffekr(&["--format", "csv", "charsum", "square-shape", "--field", "3^2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "claimId,fieldSpec,verdict,primaryCounter,wallTimeMs");
    assert!(lines[1].starts_with("square-shape-coefficients,3^2,pass,6561,"));

    let out = ffekr(&["--format", "human", "search", "ekr", "--field", "2^1"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("[pass] intersecting-family-max-size"));
}

#[test]
fn fast_suite_passes() {
    let started = std::time::Instant::now();
    let out = ffekr(&["suite", "--tier", "fast"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let rs = reports(&out);
    assert!(rs.len() > 40);
    assert!(rs.iter().all(|r| r.verdict.is_ok()));
    assert!(started.elapsed().as_secs() < 120);
}

#[test]
fn tier_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_ffekr"))
        .args(["suite"])
        .env("FFEKR_TIER", "bogus")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}
