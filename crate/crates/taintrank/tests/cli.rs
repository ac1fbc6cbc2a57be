//! End-to-end tests of the command-line binary: exit codes, output file
//! bytes, and the JSON summary line on stdout.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = concat!(
    r#"{"tx_id":"t1","timestamp":100,"inputs":[{"address":"A","value":10}],"outputs":[{"address":"B","value":6},{"address":"C","value":4}]}"#,
    "\n",
    r#"{"tx_id":"t2","timestamp":200,"inputs":[{"address":"B","value":6}],"outputs":[{"address":"C","value":6}]}"#,
    "\n",
    r#"{"tx_id":"t3","timestamp":300,"inputs":[],"outputs":[{"address":"D","value":50}]}"#,
    "\n",
);

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taintrank"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad summary {text:?}: {e}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ingest_fixture(dir: &Path) -> std::path::PathBuf {
    let input = dir.join("records.jsonl");
    fs::write(&input, FIXTURE).unwrap();
    let out = dir.join("graph");
    let result = run(&[
        "ingest",
        "--input",
        path_str(&input),
        "--out-dir",
        path_str(&out),
    ]);
    assert!(result.status.success(), "ingest failed: {result:?}");
    out
}

#[test]
fn ingest_writes_exact_graph_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("records.jsonl");
    fs::write(&input, FIXTURE).unwrap();
    let out = dir.path().join("graph");

    let result = run(&["ingest", "--input", path_str(&input), "--out-dir", path_str(&out)]);
    assert!(result.status.success(), "{result:?}");

    let edges = fs::read_to_string(out.join("edges.tsv")).unwrap();
    assert_eq!(edges, "0\t1\t6\t1\n0\t2\t4\t1\n1\t2\t6\t1\n");
    let labels = fs::read_to_string(out.join("labels.tsv")).unwrap();
    assert_eq!(labels, "0\tA\n1\tB\n2\tC\n3\tD\n");

    let summary = stdout_json(&result);
    assert_eq!(summary["command"], "ingest");
    assert_eq!(summary["records"], 3);
    assert_eq!(summary["nodes"], 4);
    assert_eq!(summary["links"], 3);
    assert_eq!(summary["average_degree"], 1.5);
    assert_eq!(summary["coinbase_records"], 1);
    assert_eq!(summary["clusters"], Value::Null);

    // The run directory must be byte-stable across reruns.
    let manifest_before = fs::read(out.join("manifest.json")).unwrap();
    let again = run(&["ingest", "--input", path_str(&input), "--out-dir", path_str(&out)]);
    assert!(again.status.success());
    assert_eq!(fs::read(out.join("manifest.json")).unwrap(), manifest_before);
    assert_eq!(fs::read_to_string(out.join("edges.tsv")).unwrap(), edges);
    assert_eq!(result.stdout, again.stdout);
}

#[test]
fn missing_input_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let result = run(&[
        "ingest",
        "--input",
        path_str(&dir.path().join("absent.jsonl")),
        "--out-dir",
        path_str(&dir.path().join("out")),
    ]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("error:"));
}

#[test]
fn malformed_line_exits_2_in_strict_mode_and_skips_otherwise() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("records.jsonl");
    let mut text = FIXTURE.to_string();
    text.push_str("{\"tx_id\":\"bad\"\n");
    fs::write(&input, text).unwrap();

    let strict = run(&[
        "ingest",
        "--input",
        path_str(&input),
        "--out-dir",
        path_str(&dir.path().join("s")),
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("line 4"));

    let lenient = run(&[
        "ingest",
        "--input",
        path_str(&input),
        "--out-dir",
        path_str(&dir.path().join("l")),
    ]);
    assert!(lenient.status.success());
    let summary = stdout_json(&lenient);
    assert_eq!(summary["skipped_lines"], 1);
    assert_eq!(summary["records"], 3);
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("line 4"));
}

#[test]
fn unknown_root_exits_3_naming_the_label() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ingest_fixture(dir.path());
    let result = run(&[
        "taint",
        "--edges",
        path_str(&graph.join("edges.tsv")),
        "--labels",
        path_str(&graph.join("labels.tsv")),
        "--root",
        "nosuch",
        "--out-dir",
        path_str(&dir.path().join("t")),
    ]);
    assert_eq!(result.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&result.stderr).contains("nosuch"));
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    let missing = run(&["taint"]);
    assert_eq!(missing.status.code(), Some(3));

    let unknown = run(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(3));

    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("Usage"));

    let version = run(&["--version"]);
    assert_eq!(version.status.code(), Some(0));

    let bad_value = run(&["ingest", "--input", "x", "--out-dir", "y", "--unit", "euros"]);
    assert_eq!(bad_value.status.code(), Some(3));
}

#[test]
fn clustering_merges_co_spending_inputs() {
    let records = concat!(
        r#"{"tx_id":"t1","inputs":[{"address":"A","value":5},{"address":"B","value":5}],"outputs":[{"address":"X","value":10}]}"#,
        "\n",
        r#"{"tx_id":"t2","inputs":[{"address":"B","value":2}],"outputs":[{"address":"Y","value":2}]}"#,
        "\n",
    );
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("records.jsonl");
    fs::write(&input, records).unwrap();

    let plain = run(&[
        "ingest",
        "--input",
        path_str(&input),
        "--out-dir",
        path_str(&dir.path().join("plain")),
    ]);
    assert!(plain.status.success());
    assert_eq!(stdout_json(&plain)["nodes"], 4);

    let clustered = run(&[
        "ingest",
        "--input",
        path_str(&input),
        "--out-dir",
        path_str(&dir.path().join("clustered")),
        "--cluster",
    ]);
    assert!(clustered.status.success());
    let summary = stdout_json(&clustered);
    assert_eq!(summary["nodes"], 3);
    assert_eq!(summary["clusters"], 1);
    let labels = fs::read_to_string(dir.path().join("clustered").join("labels.tsv")).unwrap();
    assert!(labels.contains("\tA\n"));
    assert!(!labels.contains("\tB\n"));
}

#[test]
fn method_all_writes_one_score_file_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let graph = ingest_fixture(dir.path());
    let out = dir.path().join("scores");
    let edges = graph.join("edges.tsv");
    let labels = graph.join("labels.tsv");
    let args = [
        "taint",
        "--edges",
        path_str(&edges),
        "--labels",
        path_str(&labels),
        "--root",
        "A",
        "--method",
        "all",
        "--pairing",
        "proportional",
        "--out-dir",
        path_str(&out),
    ];
    let result = run(&args);
    assert!(result.status.success(), "{result:?}");
    let summary = stdout_json(&result);
    assert_eq!(summary["outputs"].as_array().unwrap().len(), 7);

    let expected = [
        "scores_fixed.tsv",
        "scores_weight_in.tsv",
        "scores_weight_out.tsv",
        "scores_distance.tsv",
        "scores_combined_avg.tsv",
        "scores_combined_max.tsv",
        "scores_pagerank_like.tsv",
    ];
    let mut node_sets = Vec::new();
    for name in expected {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(text.starts_with("# method="), "{name} missing header");
        assert!(text.contains("pairing=proportional"), "{name} missing pairing note");
        let mut ids: Vec<String> = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').next().unwrap().to_string())
            .collect();
        ids.sort_unstable();
        node_sets.push(ids);
    }
    for set in &node_sets[1..] {
        assert_eq!(set, &node_sets[0], "methods disagree on the node universe");
    }

    let first: Vec<u8> = fs::read(out.join("scores_weight_out.tsv")).unwrap();
    let rerun = run(&args);
    assert!(rerun.status.success());
    assert_eq!(fs::read(out.join("scores_weight_out.tsv")).unwrap(), first);
}

#[test]
fn scenario_taint_report_pipeline_produces_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(&spec, "kind = \"peel_chain\"\nlength = 6\nvalue = 100000\npeel = 500\n").unwrap();

    let scen = dir.path().join("scen");
    let generated = run(&[
        "scenario",
        "--spec",
        path_str(&spec),
        "--seed",
        "7",
        "--out-dir",
        path_str(&scen),
    ]);
    assert!(generated.status.success(), "{generated:?}");
    let summary = stdout_json(&generated);
    assert_eq!(summary["kind"], "peel_chain");
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["root"], "thief");
    assert_eq!(summary["truth_nodes"], 13);
    assert!(scen.join("truth.tsv").exists());

    let tainted = run(&[
        "taint",
        "--edges",
        path_str(&scen.join("edges.tsv")),
        "--labels",
        path_str(&scen.join("labels.tsv")),
        "--root",
        "thief",
        "--method",
        "weight_out",
        "--out-dir",
        path_str(&scen),
    ]);
    assert!(tainted.status.success(), "{tainted:?}");

    let rep = dir.path().join("rep");
    let reported = run(&[
        "report",
        "--scores",
        path_str(&scen.join("scores_weight_out.tsv")),
        "--edges",
        path_str(&scen.join("edges.tsv")),
        "--labels",
        path_str(&scen.join("labels.tsv")),
        "--top",
        "5",
        "--bins",
        "6",
        "--scale",
        "log",
        "--out-dir",
        path_str(&rep),
    ]);
    assert!(reported.status.success(), "{reported:?}");
    let summary = stdout_json(&reported);
    assert_eq!(summary["method"], "weight_out");
    assert_eq!(summary["root"], "thief");

    let degree = fs::read_to_string(rep.join("degree.csv")).unwrap();
    assert!(degree.starts_with("direction,degree,count,fraction\n"));
    let top = fs::read_to_string(rep.join("top_k.csv")).unwrap();
    assert!(top.starts_with("rank,label,score\n1,thief,1\n"));
    assert_eq!(top.lines().count(), 6);
    let hist = fs::read_to_string(rep.join("histogram.csv")).unwrap();
    assert!(hist.starts_with("bin_lo,bin_hi,count\n"));
}

#[test]
fn report_without_inputs_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let result = run(&["report", "--out-dir", path_str(&dir.path().join("rep"))]);
    assert_eq!(result.status.code(), Some(3));
}

#[test]
fn scenario_seed_controls_random_output() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(
        &spec,
        "kind = \"random_cyclic\"\nnodes = 40\nedges = 120\nmax_weight = 9\nseed = 5\n",
    )
    .unwrap();

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    for (out, seed) in [(&a, None), (&b, None), (&c, Some("6"))] {
        let mut args = vec!["scenario", "--spec", path_str(&spec), "--out-dir", path_str(out)];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        let result = run(&args);
        assert!(result.status.success(), "{result:?}");
    }
    let ea = fs::read(a.join("edges.tsv")).unwrap();
    assert_eq!(ea, fs::read(b.join("edges.tsv")).unwrap());
    assert_ne!(ea, fs::read(c.join("edges.tsv")).unwrap());
}
