//! The whole pipeline through the same entry points the binary uses:
//! generate a scenario, score it with every method, and report on the
//! results, leaving a run directory of TSV/CSV files behind.

use std::error::Error;
use std::fs;

use taintrank::analysis::HistogramScale;
use taintrank::commands::{
    run_report, run_scenario, run_taint, MethodArg, ReportConfig, ScenarioConfig, TaintConfig,
};

fn main() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let spec_path = dir.path().join("spec.toml");
    fs::write(
        &spec_path,
        "kind = \"peel_chain\"\nlength = 12\nvalue = 50000000\npeel = 250000\n",
    )?;

    let out = dir.path().join("run");
    let scen = run_scenario(&ScenarioConfig {
        spec: spec_path,
        seed: None,
        out_dir: out.clone(),
    })?;
    println!(
        "scenario: {} with {} nodes, {} truly tainted",
        scen.kind, scen.nodes, scen.truth_nodes
    );

    let taint = run_taint(&TaintConfig {
        edges: out.join("edges.tsv"),
        labels: out.join("labels.tsv"),
        root: scen.root.clone(),
        method: MethodArg::All,
        sweeps: 1,
        iterations: 1,
        out_dir: out.clone(),
        pairing: "proportional".to_string(),
    })?;
    println!("taint: wrote {} score files from root {}", taint.outputs.len(), taint.root);

    let report = run_report(&ReportConfig {
        scores: Some(out.join("scores_weight_out.tsv")),
        edges: Some(out.join("edges.tsv")),
        labels: Some(out.join("labels.tsv")),
        top: 8,
        bins: 10,
        scale: HistogramScale::Log,
        out_dir: out.clone(),
    })?;
    println!("report: wrote {:?}, knee at rank {:?}", report.files, report.knee_rank);

    println!();
    println!("run directory holds:");
    let mut names: Vec<String> = fs::read_dir(&out)?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in names {
        println!("  {name}");
    }

    println!();
    println!("top of the value-weighted ranking:");
    let top = fs::read_to_string(out.join("top_k.csv"))?;
    for line in top.lines().take(6) {
        println!("  {line}");
    }
    Ok(())
}
