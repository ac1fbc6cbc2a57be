//! The degree-ratio method: initialization and iteration.
//!
//! Unlike the sweep methods this one runs on the whole graph, not just
//! the root's forward closure. A node starts at the fraction of its
//! incoming edges that originate inside the closure, then each round
//! replaces its score with the sum over in-edges of the source's score
//! divided by the source's count of tainted out-edges.

use taintrank::graph::GraphBuilder;
use taintrank::taint::{label_tainted_edges, taint_pagerank};

fn main() {
    let mut b = GraphBuilder::new();
    // Tainted flow from the root plus a clean payer into the same shop.
    b.add_transfer("root", "mixer", 500);
    b.add_transfer("mixer", "shop", 300);
    b.add_transfer("mixer", "exchange", 200);
    b.add_transfer("clean_payer", "shop", 900);
    b.add_transfer("exchange", "shop", 50);
    let g = b.finalize();
    let root = g.node_id("root").unwrap();

    let labels = label_tainted_edges(&g, root).unwrap();
    println!("per-node edge tallies (in tainted/total, out tainted/total):");
    for n in g.nodes() {
        let i = n.index();
        println!(
            "  {:>12}: in {}/{}  out {}/{}",
            g.label(n).unwrap(),
            labels.tainted_in_degree[i],
            labels.in_degree[i],
            labels.tainted_out_degree[i],
            labels.out_degree[i],
        );
    }

    println!();
    println!("scores per iteration count:");
    print!("{:>12}", "node");
    for iters in 0..=3 {
        print!("  iter {iters:>7}");
    }
    println!();
    let runs: Vec<_> =
        (0..=3).map(|iters| taint_pagerank(&g, &labels, iters).unwrap()).collect();
    for n in g.nodes() {
        print!("{:>12}", g.label(n).unwrap());
        for r in &runs {
            print!("  {:>12.4}", r.score(n).unwrap());
        }
        println!();
    }
    println!();
    println!("the shop starts at 2/3 because two of its three suppliers sit");
    println!("inside the tainted flow, clean_payer being the third.");
}
