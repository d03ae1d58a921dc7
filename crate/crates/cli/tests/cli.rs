use std::process::{Command, Output};

use serde_json::Value;

fn kdvsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvsym"))
        .args(args)
        .env_remove("KDVSYM_FORMAT")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["schema_version"], 1);
    v
}

#[test]
fn tables_json_counts() {
    let out = kdvsym(&["tables", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["commutators"].as_array().unwrap().len(), 49);
    let diffs = v["typo_diffs"].as_array().unwrap();
    assert!(diffs.iter().any(|d| d["cell"] == "(2,6)" && d["status"] == "documented"));
    assert_eq!(v["undocumented_diffs"], 0);
}

#[test]
fn kdvsol7_verifies() {
    let out = kdvsym(&["verify-solution", "kdvsol7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = kdvsym(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(kdvsym(&["reduce", "--subalgebra", "S99"]).status.code(), Some(2));
    assert_eq!(kdvsym(&["verify-solution", "kdvsol7", "--params", "k=1"]).status.code(), Some(2));
    assert_eq!(kdvsym(&["conslaw", "--generator", "S8"]).status.code(), Some(2));
}

#[test]
fn seeded_output_is_reproducible() {
    let a = kdvsym(&["--seed", "5", "optimal", "--format", "json"]);
    let b = kdvsym(&["--seed", "5", "optimal", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn format_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_kdvsym"))
        .args(["verify-sym", "S4"])
        .env("KDVSYM_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["residual"], "0");
}

#[test]
fn derive_reports_terms() {
    let out = kdvsym(&["derive", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["q_form"]["matches_transcription"], true);
    let terms = v["q_form"]["terms"].as_array().unwrap();
    let lead = terms
        .iter()
        .find(|t| {
            let f = &t["factors"][0];
            f["dep"] == "q" && f["index"]["x"] == 4 && f["index"]["y"] == 1 && f["index"]["z"] == 1
        })
        .expect("leading term present");
    assert_eq!(lead["coefficient"], "-1");
}

#[test]
fn non_symmetry_from_file_exits_1() {
    let path = std::env::temp_dir().join(format!("kdvsym-field-{}.txt", std::process::id()));
    std::fs::write(&path, "x*Dx + q*Dq").unwrap();
    let out = kdvsym(&["verify-sym", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduction_reports_lambda() {
    let out = kdvsym(&["reduce", "--subalgebra", "S11", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["comparison"]["lambda"], "T^-3");
}

#[test]
fn conserved_vector_checks() {
    assert_eq!(kdvsym(&["conslaw", "--generator", "S2", "--check"]).status.code(), Some(0));
    let out = kdvsym(&["conslaw", "--generator", "S5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("component,expr\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn grid_is_written() {
    let path = std::env::temp_dir().join(format!("kdvsym-grid-{}.csv", std::process::id()));
    let out = kdvsym(&[
        "emit-grid", "kdvsol7", "--fix", "y=0,z=0", "--range", "x=-20:20:21", "--range", "t=-20:20:11", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "t", "u"]);
    assert_eq!(r.records().count(), 21 * 11);
    std::fs::remove_file(&path).ok();
}

#[test]
fn complex_solution_needs_flag() {
    let args = ["emit-grid", "kdvsol5", "--fix", "y=0,z=0", "--range", "x=-1:1:3", "--range", "t=0.5:1:2", "--format", "csv"];
    assert_eq!(kdvsym(&args).status.code(), Some(2));
    let mut with_flag = args.to_vec();
    with_flag.push("--complex");
    let out = kdvsym(&with_flag);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x,t,re_u,im_u"));
}
