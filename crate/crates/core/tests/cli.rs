//! End-to-end command-line coverage: output formats, exit codes, file IO.

use std::sync::Mutex;

use floercable::cli_io::run;

// One test overrides FLOER_CABLE_TABLE; serialize all invocations so the
// others never observe the temporary environment.
static ENV_LOCK: Mutex<()> = Mutex::new(());

fn cli(args: &[&str]) -> (i32, String) {
    let _guard = ENV_LOCK.lock().unwrap();
    let mut v = vec!["floercable".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    run(&v)
}

fn cli_with_table(args: &[&str], table: &std::path::Path) -> (i32, String) {
    let _guard = ENV_LOCK.lock().unwrap();
    std::env::set_var("FLOER_CABLE_TABLE", table);
    let mut v = vec!["floercable".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    let out = run(&v);
    std::env::remove_var("FLOER_CABLE_TABLE");
    out
}

#[test]
fn mr_anchor_format() {
    let (code, out) = cli(&["mr", "--name", "4_1", "-r", "1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.trim(), "[0]: {-1,0,0}");
}

#[test]
fn dinv_lens_format() {
    let (code, out) = cli(&["dinv", "--lens", "4", "1"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.trim(), "3/4, 0, -1/4, 0");
}

#[test]
fn dinv_surgery_table() {
    let (code, out) = cli(&["dinv", "--name", "3_1", "-r", "3"]);
    assert_eq!(code, 0, "{out}");
    // tau = 1: d = lens(3,1,s) - 2 max(V_s, V_{3-s}) = (1/2 - 2, -1/6, -1/6 - 2by..)
    assert!(out.contains("d[0] = -3/2"), "{out}");
}

#[test]
fn obstruct_torus_verdicts() {
    let (code, out) = cli(&["obstruct", "--name", "T2_5"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("r=2 Obstructed"), "{out}");
    assert!(out.contains("r=3 Survives(k=[1], L-space)"), "{out}");
}

#[test]
fn surgery_shows_geometry_and_oracle() {
    let (code, out) = cli(&["surgery", "--name", "6_2", "-r", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[0]: 1 | 1"), "{out}");
    assert!(out.contains("[1]: 3 | 3"), "{out}");
}

#[test]
fn analyze_inline_alexander() {
    let (code, out) = cli(&["analyze", "--alex", "-1 3 -1", "--sigma", "0"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("genus 1 tau 0"), "{out}");
}

#[test]
fn analyze_json_schema() {
    let (code, out) = cli(&["analyze", "--name", "6_2", "--json"]);
    assert_eq!(code, 0, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["descriptor"]["genus"], 2);
    assert_eq!(v["descriptor"]["tau"], 1);
}

#[test]
fn scan_writes_json_report() {
    let dir = std::env::temp_dir().join("floercable_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("knots.csv");
    let out_path = dir.join("report.json");
    std::fs::write(&table, "name,alexander,signature\n4_1,\"-1 3 -1\",0\nT2_5,\"1 -1 1 -1 1\",-4\n").unwrap();
    let (code, out) = cli(&[
        "scan",
        "--table",
        table.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    let knots = report["knots"].as_array().unwrap();
    assert_eq!(knots.len(), 2);
    assert_eq!(knots[0]["name"], "4_1");
    // T(2,5) survives at its maximal slope in the report.
    let t25 = &knots[1];
    let verdicts = t25["states"][0]["verdicts"].as_array().unwrap();
    let survive = verdicts.iter().find(|v| v["outcome"]["kind"] == "survives").unwrap();
    assert_eq!(survive["r"], 3);
    assert_eq!(survive["outcome"]["lspace"], true);
}

#[test]
fn render_writes_deterministic_svg() {
    let dir = std::env::temp_dir().join("floercable_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.svg");
    let b = dir.join("b.svg");
    for p in [&a, &b] {
        let (code, out) = cli(&["render", "--name", "6_2", "-r", "4", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0, "{out}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn table_override_via_env() {
    let dir = std::env::temp_dir().join("floercable_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let table = dir.join("custom.csv");
    std::fs::write(&table, "name,alexander,signature\nmyknot,\"-1 3 -1\",0\n").unwrap();
    let (code, out) = cli_with_table(&["analyze", "--name", "myknot"], &table);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("genus 1 tau 0"), "{out}");
}

#[test]
fn validation_failures_exit_two() {
    let (code, _) = cli(&["analyze", "--alex", "1 2", "--sigma", "0"]);
    assert_eq!(code, 2);
    let (code, _) = cli(&["analyze", "--alex", "1 -1 1", "--sigma", "3"]);
    assert_eq!(code, 2);
    let (code, _) = cli(&["dinv", "--lens", "4", "2"]);
    assert_eq!(code, 2);
}
