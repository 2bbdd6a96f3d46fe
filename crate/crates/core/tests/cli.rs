//! End-to-end checks of the binary: exit codes, output formats, and the
//! quotient round trip through the file format.

use qpgraph::catalog::{projective_graph, sphere_graph};
use qpgraph::graph::graph_isomorphic;
use qpgraph::graphfile::{parse_graph, serialize_graph};
use qpgraph::ideal::{quotient_graph, VertexSet};
use qpgraph::ktheory::k_groups;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qpgraph"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_graph(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn parse_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write_graph(&dir, "empty.graph", "");
    let (code, _, err) = run(&["ktheory", &empty]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err:?}");

    let bad = write_graph(&dir, "bad.graph", "vertex a\nedge a b 1\n");
    let (code, _, err) = run(&["ktheory", &bad]);
    assert_eq!(code, 2);
    assert!(err.contains("b"), "{err:?}");

    let missing = dir.path().join("nope.graph");
    let (code, _, _) = run(&["ktheory", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn numerics_preconditions_exit_two_and_failures_exit_one() {
    let base = ["numerics", "--n", "1", "--trunc", "8", "--winding", "3"];
    let with = |extra: &[&'static str]| -> Vec<&'static str> {
        let mut v: Vec<&'static str> = base.to_vec();
        v.extend_from_slice(extra);
        v
    };
    let (code, _, err) = run(&with(&["--q", "1.5"]));
    assert_eq!(code, 2, "{err:?}");
    let (code, _, _) = run(&with(&["--q", "0.0"]));
    assert_eq!(code, 2);
    let (code, _, _) = run(&["numerics", "--n", "1", "--q", "0.5", "--trunc", "3", "--winding", "3"]);
    assert_eq!(code, 2, "truncation below the minimum must be rejected");
    let (code, _, _) = run(&["numerics", "--n", "1", "--q", "0.5", "--trunc", "8", "--winding", "1"]);
    assert_eq!(code, 2, "winding below the minimum must be rejected");

    // a zero tolerance is a legal request that the residuals cannot meet
    let (code, out, _) = run(&with(&["--q", "0.5", "--tol", "0"]));
    assert_eq!(code, 1, "{out:?}");
    assert!(out.contains("verdict: failed"), "{out:?}");

    let (code, out, _) = run(&with(&["--q", "0.5"]));
    assert_eq!(code, 0, "{out:?}");
    assert!(out.contains("verdict: verified"), "{out:?}");
    assert!(out.contains("K0 basis determinant"), "{out:?}");
}

#[test]
fn verify_subcommands_exit_zero() {
    let (code, out, _) = run(&["verify-splitting", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("identity"), "{out:?}");
    assert!(out.contains("verdict: verified"), "{out:?}");

    let (code, out, _) = run(&["verify-kk", "--n", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: verified"), "{out:?}");
}

#[test]
fn verify_kk_trace_names_the_rewrites() {
    let (code, out, _) = run(&["verify-kk", "--n", "2", "--trace"]);
    assert_eq!(code, 0);
    assert!(out.contains("trace:"), "{out:?}");
    assert!(out.contains("via R4(1), R4(2)"), "{out:?}");
    assert!(out.contains("via R2(2)"), "{out:?}");
}

#[test]
fn ideals_lists_the_full_chain() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = write_graph(&dir, "f2.graph", &serialize_graph(&projective_graph(2)));
    let (code, out, _) = run(&["ideals", &f2]);
    assert_eq!(code, 0);
    assert!(out.contains("hereditary saturated subsets: 4"), "{out:?}");
    assert!(out.contains("chain under inclusion: yes"), "{out:?}");
}

#[test]
fn quotient_round_trips_through_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let f3 = write_graph(&dir, "f3.graph", &serialize_graph(&projective_graph(3)));
    let (code, out, err) = run(&["quotient", &f3, "--drop", "w4"]);
    assert_eq!(code, 0, "{err:?}");
    assert!(err.is_empty(), "closed drop set must not warn: {err:?}");
    assert!(!out.contains("verdict"), "output must be a plain graph file: {out:?}");

    let q = parse_graph(&out).expect("output parses back");
    assert!(graph_isomorphic(&q, &projective_graph(2)).unwrap().is_some());

    // feeding the serialized quotient back through the binary matches the
    // in-memory computation
    let h: VertexSet = std::iter::once(qpgraph::graph::VertexId::new("w4")).collect();
    let qg = quotient_graph(&projective_graph(3), &h).unwrap();
    let (k0, k1) = k_groups(&qg);
    let qfile = write_graph(&dir, "q.graph", &out);
    let (code, kout, _) = run(&["ktheory", &qfile]);
    assert_eq!(code, 0);
    assert!(kout.contains(&format!("K0 = {k0}, K1 = {k1}")), "{kout:?}");
}

#[test]
fn quotient_warns_and_closes_a_bad_drop_set() {
    let dir = tempfile::tempdir().unwrap();
    let f2 = write_graph(&dir, "f2.graph", &serialize_graph(&projective_graph(2)));
    let (code, out, err) = run(&["quotient", &f2, "--drop", "w2"]);
    assert_eq!(code, 0);
    assert!(err.contains("warning:"), "{err:?}");
    assert!(err.contains("closure"), "{err:?}");
    let q = parse_graph(&out).unwrap();
    assert_eq!(q.vertex_count(), 1);

    let (code, _, err) = run(&["quotient", &f2, "--drop", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("nope"), "{err:?}");
}

#[test]
fn json_reports_carry_the_pinned_schema() {
    let dir = tempfile::tempdir().unwrap();
    let f3 = write_graph(&dir, "f3.graph", &serialize_graph(&projective_graph(3)));
    let (code, out, _) = run(&["ktheory", &f3, "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(doc["schema"], "qpgraph-report/1");
    assert_eq!(doc["command"], "ktheory");
    assert_eq!(doc["verdict"], "computed");
    assert_eq!(doc["k0"]["display"], "Z^4");
    assert_eq!(doc["k0"]["free_rank"], 4);
    assert_eq!(doc["k1"]["display"], "0");

    let l5 = write_graph(&dir, "l5.graph", &serialize_graph(&sphere_graph(2)));
    let (code, out, _) = run(&["ktheory", &l5, "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(doc["k0"]["display"], "Z");
    assert_eq!(doc["k1"]["display"], "Z");

    let (code, out, _) = run(&["verify-kk", "--n", "1", "--json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(doc["schema"], "qpgraph-report/1");
    assert_eq!(doc["verdict"], "verified");
}
