//! End-to-end tests of the `strandpoly` binary: output values, exit codes,
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use strandpoly::json::{ColoredPayload, GraphFile, Provenance, ProvenanceStep};
use strandpoly::stranded::CompactColored;

const MELON: &str = r#"{
  "version": 1,
  "family": "colored_tensor",
  "payload": {
    "rank": 3,
    "vertices": { "0": true, "1": false },
    "edges": { "0": [0, 0, 1], "1": [1, 0, 1], "2": [2, 0, 1], "3": [3, 0, 1] },
    "flags": {}
  }
}"#;

const MELON_T_FRAK: &str =
    "X z^20 s^2 w^8 q^12 t^8 + 4 z^12 s w^5 q^9 t^6 + 6 Y z^11 s w^4 q^6 t^4 \
     + 4 Y^2 z^10 s w^3 q^3 t^2 + Y^3 z^7\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strandpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).expect("writable temp dir");
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn compute_melon_t_frak_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let out = run(&["compute", path_str(&melon), "--invariant", "t-frak"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), MELON_T_FRAK);
}

#[test]
fn compute_edgeless_graph_gives_flag_power() {
    let dir = tempfile::tempdir().unwrap();
    let simple = write_file(
        dir.path(),
        "two_flags.json",
        r#"{"version":1,"family":"simple","payload":{"vertices":[0],"edges":{},"flags":{"0":0,"1":0}}}"#,
    );
    let out = run(&["compute", path_str(&simple), "--invariant", "tutte-flags"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "t^2\n");
}

#[test]
fn compute_classic_tutte_in_standard_basis() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let out = run(&[
        "compute",
        path_str(&melon),
        "--invariant",
        "tutte",
        "--basis",
        "standard",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // Collapsed melon: two vertices joined by four parallel edges.
    assert_eq!(stdout(&out), "y^3 + y^2 + x + y\n");
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(dir.path(), "bad.json", "{ \"version\": 1, ");
    let out = run(&["compute", path_str(&bad), "--invariant", "t-frak"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn missing_file_exits_2() {
    let out = run(&["compute", "/nonexistent/graph.json", "--invariant", "t-frak"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn family_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let out = run(&["compute", path_str(&melon), "--invariant", "br-flags"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("family mismatch"), "{}", stderr(&out));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let args = [
        "compute",
        path_str(&melon),
        "--invariant",
        "multivariate",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).expect("valid JSON output");
    assert_eq!(doc["invariant"], "multivariate");
    assert_eq!(doc["basis"], "shifted");
    assert!(doc["terms"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn expand_round_trips_through_compute() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let expanded = run(&["expand", path_str(&melon)]);
    assert!(expanded.status.success(), "{}", stderr(&expanded));
    let full = write_file(dir.path(), "melon_full.json", &stdout(&expanded));
    let direct = run(&["compute", path_str(&melon), "--invariant", "multivariate"]);
    let via_full = run(&["compute", path_str(&full), "--invariant", "multivariate"]);
    assert!(via_full.status.success(), "{}", stderr(&via_full));
    assert_eq!(direct.stdout, via_full.stdout);
}

/// A contraction script that leaves discs behind: the four-vertex chain with
/// its two chain edges contracted, then a bridge and the trailing self-loop.
fn disc_bearing_file() -> GraphFile {
    let mut c = CompactColored::default();
    c.vertices.insert(0, true);
    c.vertices.insert(1, false);
    c.vertices.insert(2, true);
    c.vertices.insert(3, false);
    c.edges.insert(0, (0, 0, 1));
    c.edges.insert(1, (1, 0, 3));
    c.edges.insert(2, (1, 1, 2));
    c.edges.insert(3, (2, 2, 3));
    c.edges.insert(4, (3, 1, 2));
    c.flags.insert(0, (2, 0));
    c.flags.insert(1, (3, 0));
    c.flags.insert(2, (2, 1));
    c.flags.insert(3, (0, 2));
    c.flags.insert(4, (0, 3));
    c.flags.insert(5, (3, 3));
    GraphFile::from_provenance(Provenance {
        seed: ColoredPayload::from_compact(3, &c),
        steps: vec![
            ProvenanceStep::Contract { edge: 2 },
            ProvenanceStep::Contract { edge: 3 },
            ProvenanceStep::Contract { edge: 1 },
            ProvenanceStep::Contract { edge: 4 },
        ],
    })
    .expect("script replays")
}

#[test]
fn reduce_strips_discs_and_preserves_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let original = write_file(dir.path(), "discs.json", &disc_bearing_file().render());
    let reduced = run(&["reduce", path_str(&original)]);
    assert!(reduced.status.success(), "{}", stderr(&reduced));
    let doc: serde_json::Value = serde_json::from_slice(&reduced.stdout).unwrap();
    assert_eq!(
        doc["payload"]["discs"].as_object().map(|d| d.len()),
        Some(0),
        "reduced file has no discs"
    );

    let reduced_path = write_file(dir.path(), "reduced.json", &stdout(&reduced));
    let twice = run(&["reduce", path_str(&reduced_path)]);
    assert_eq!(twice.stdout, reduced.stdout, "reduction is idempotent");

    let before = run(&["compute", path_str(&original), "--invariant", "t-frak"]);
    let after = run(&["compute", path_str(&reduced_path), "--invariant", "t-frak"]);
    assert!(before.status.success() && after.status.success());
    assert_eq!(before.stdout, after.stdout, "discs do not affect the invariant");
}

#[test]
fn verify_all_passes_and_counts_suites() {
    let out = run(&["verify", "all", "--seed", "1", "--cases", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(
        stdout(&out).contains("total: 13 suites, 0 failures"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn verify_suite_flag_form_and_json_determinism() {
    let args = [
        "verify",
        "--suite",
        "zeta_bounds",
        "--seed",
        "9",
        "--cases",
        "4",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout, "reports are byte-identical");
    let reports: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(reports[0]["suite"], "zeta_bounds");
    assert_eq!(reports[0]["cases"], 4);
}

#[test]
fn verify_unknown_suite_exits_2() {
    let out = run(&["verify", "no_such_suite", "--cases", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_collapsed_dot_lists_all_edges() {
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let out = run(&["export", path_str(&melon), "--target", "collapsed"]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("graph g {"), "{dot}");
    assert_eq!(dot.matches("v0 -- v1").count(), 4, "{dot}");
}

#[test]
fn schema_documents_match_emitted_formats() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let graph_schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(root.join("schemas/graphfile.v1.json")).unwrap(),
    )
    .expect("graph schema is valid JSON");
    assert_eq!(graph_schema["properties"]["version"]["const"], 1);
    let families: Vec<&str> = graph_schema["properties"]["family"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();

    // Emitted files stay within the schema's envelope.
    let dir = tempfile::tempdir().unwrap();
    let melon = write_file(dir.path(), "melon.json", MELON);
    let expanded = run(&["expand", path_str(&melon)]);
    let doc: serde_json::Value = serde_json::from_slice(&expanded.stdout).unwrap();
    assert_eq!(doc["version"], 1);
    assert!(families.contains(&doc["family"].as_str().unwrap()));
    assert!(doc["payload"].is_object());

    let report_schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(root.join("schemas/report.v1.json")).unwrap(),
    )
    .expect("report schema is valid JSON");
    let required: Vec<&str> = report_schema["definitions"]["suiteReport"]["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    let out = run(&["verify", "tutte_recurrence", "--cases", "2", "--format", "json"]);
    let reports: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in required {
        assert!(
            reports[0].get(key).is_some(),
            "emitted report is missing schema-required key {key}"
        );
    }
}

#[test]
fn export_boundary_dot_and_simple_rejection() {
    let dir = tempfile::tempdir().unwrap();
    // One colored edge, six flags: the boundary graph is non-empty.
    let open = write_file(
        dir.path(),
        "open.json",
        r#"{"version":1,"family":"colored_tensor","payload":{"rank":3,"vertices":{"0":true,"1":false},"edges":{"0":[0,0,1]},"flags":{"0":[1,0],"1":[2,0],"2":[3,0],"3":[1,1],"4":[2,1],"5":[3,1]}}}"#,
    );
    let out = run(&["export", path_str(&open), "--target", "boundary"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let dot = stdout(&out);
    assert!(dot.starts_with("graph boundary {"), "{dot}");
    assert!(dot.contains("f0"), "{dot}");
    assert!(dot.contains(" -- "), "{dot}");

    let simple = write_file(
        dir.path(),
        "simple.json",
        r#"{"version":1,"family":"simple","payload":{"vertices":[0],"edges":{},"flags":{}}}"#,
    );
    let rejected = run(&["export", path_str(&simple), "--target", "boundary"]);
    assert_eq!(rejected.status.code(), Some(3));
}
