//! Score files and the reports derived from them.
//!
//! Writes a score table to an in-memory buffer, reads it back, and then
//! derives the ranking table, a log-scale histogram, and the knee point
//! (where the descending score curve drops hardest).

use taintrank::analysis::{knee_point, score_histogram, top_k_rows, HistogramScale};
use taintrank::graph::ValueMode;
use taintrank::scenario::{generate, ScenarioSpec};
use taintrank::taint::{read_score_file, taint_weight, write_score_file};

fn main() {
    let spec = ScenarioSpec::RandomDag { nodes: 60, edges: 150, max_weight: 10_000, seed: 3 };
    let s = generate(&spec).unwrap();
    let scores = taint_weight(&s.graph, s.root, ValueMode::Out, 1).unwrap();

    let mut buf = Vec::new();
    write_score_file(&mut buf, &s.graph, &scores, "proportional").unwrap();
    println!("score file starts with:");
    for line in String::from_utf8(buf.clone()).unwrap().lines().take(4) {
        println!("  {line}");
    }

    let (meta, rows) = read_score_file(&buf[..]).unwrap();
    println!(
        "read back: method={} root={} sweeps={} ({} rows)",
        meta.method,
        meta.root_label,
        meta.sweeps,
        rows.len()
    );

    println!();
    println!("top 5 by score:");
    for (rank, row) in top_k_rows(rows.clone(), 5).iter().enumerate() {
        println!("  {}. {:>4}  {:.6}", rank + 1, row.label, row.score);
    }

    let values: Vec<f64> = rows.iter().map(|r| r.score).collect();
    match knee_point(&values) {
        Some(k) => println!("knee after rank {k}: scores fall off hardest there"),
        None => println!("no knee: too few distinct positive scores"),
    }

    let hist = score_histogram(&values, HistogramScale::Log, 6).unwrap();
    println!();
    println!("log-scale histogram ({} zero score(s) kept apart):", hist.zero_count);
    for b in &hist.bins {
        println!("  [{:>12.6}, {:>12.6}]  {}", b.lo, b.hi, b.count);
    }
}
