//! Hop distances from a root and the induced forward-closure subgraph.

use taintrank::graph::GraphBuilder;
use taintrank::taint::{distances, reachable_subgraph};

fn main() {
    // Two components: money flows root -> a -> {b, c} -> d, while x -> y
    // is unrelated. An edge back into the root (d -> root) keeps the
    // closure cyclic but changes nothing about membership.
    let mut builder = GraphBuilder::new();
    builder.add_transfer("root", "a", 100);
    builder.add_transfer("a", "b", 60);
    builder.add_transfer("a", "c", 40);
    builder.add_transfer("b", "d", 60);
    builder.add_transfer("c", "d", 40);
    builder.add_transfer("d", "root", 10);
    builder.add_transfer("x", "y", 999);
    let g = builder.finalize();

    let root = g.node_id("root").unwrap();
    let dist = distances(&g, root).unwrap();
    println!("hop distances from root (unreached nodes omitted):");
    for n in g.nodes() {
        if let Some(d) = dist.get(n) {
            println!("  {}: {}", g.label(n).unwrap(), d);
        }
    }
    println!(
        "{} of {} nodes reachable, deepest at {} hop(s)",
        dist.reachable_count(),
        g.node_count(),
        dist.max_finite().unwrap()
    );

    let (kept, sub) = reachable_subgraph(&g, root).unwrap();
    println!(
        "induced subgraph: {} nodes, {} links (dropped the x -> y component)",
        sub.node_count(),
        sub.edge_count()
    );
    // Node ids are re-numbered densely but labels carry over.
    for (new_idx, old) in kept.iter().enumerate() {
        println!("  subgraph id {} = original node {}", new_idx, g.label(*old).unwrap());
    }
}
