//! Assemble a small transaction graph by hand and inspect it.
//!
//! The builder interns addresses in first-seen order, aggregates repeated
//! transfers between the same pair, and silently drops self-payments.

use taintrank::graph::{GraphBuilder, ValueMode};

fn main() {
    let mut b = GraphBuilder::new();
    b.add_transfer("alice", "bob", 60);
    b.add_transfer("alice", "carol", 40);
    b.add_transfer("bob", "carol", 25);
    b.add_transfer("bob", "carol", 35); // aggregates with the line above
    b.add_transfer("carol", "carol", 10); // self-payment, dropped
    b.add_transfer("carol", "dave", 90);

    println!("self-payments dropped: {}", b.self_loops_dropped());
    let g = b.finalize();

    println!("{} nodes, {} links", g.node_count(), g.edge_count());
    for e in g.edges() {
        println!(
            "  {} -> {}  total {} over {} transfer(s)",
            g.label(e.src).unwrap(),
            g.label(e.dst).unwrap(),
            e.weight,
            e.tx_count
        );
    }

    for n in g.nodes() {
        println!(
            "  {}: in {} / out {}, received {} / spent {}",
            g.label(n).unwrap(),
            g.in_degree(n).unwrap(),
            g.out_degree(n).unwrap(),
            g.node_value(n, ValueMode::In).unwrap(),
            g.node_value(n, ValueMode::Out).unwrap(),
        );
    }
}
