//! Degree statistics for a generated graph, as CSV on stdout.

use std::io;

use taintrank::analysis::{degree_distribution, write_degree_csv};
use taintrank::scenario::{generate, ScenarioSpec};

fn main() {
    let spec = ScenarioSpec::RandomCyclic { nodes: 500, edges: 1_400, max_weight: 1_000, seed: 11 };
    let s = generate(&spec).unwrap();

    let stats = degree_distribution(&s.graph);
    eprintln!(
        "{} nodes, {} links, average degree {:.3}",
        stats.node_count,
        stats.edge_count,
        stats.avg_degree.unwrap()
    );
    write_degree_csv(&stats, io::stdout().lock()).unwrap();
}
