//! All propagation methods side by side on one laundering pattern.
//!
//! The graph is a peel chain: the thief forwards the loot hop by hop,
//! shedding a small "peel" payment at each step. The methods disagree in
//! instructive ways: the flat rule marks every touched address equally,
//! value weighting tracks how much of the loot actually moved where, and
//! distance damping fades with each hop no matter the amounts.

use taintrank::commands::run_method;
use taintrank::scenario::{generate, ScenarioSpec};
use taintrank::taint::TaintMethod;

fn main() {
    let spec = ScenarioSpec::PeelChain { length: 4, value: 1_000_000, peel: 10_000, seed: 1 };
    let s = generate(&spec).unwrap();
    let g = &s.graph;

    // Column per method, row per node, in id order.
    let runs: Vec<_> = TaintMethod::ALL
        .iter()
        .map(|&m| run_method(g, s.root, m, 1, 1).unwrap())
        .collect();

    print!("{:>8}", "node");
    for m in TaintMethod::ALL {
        print!("  {:>13}", m.id());
    }
    println!();
    for n in g.nodes() {
        print!("{:>8}", g.label(n).unwrap());
        for r in &runs {
            print!("  {:>13.6}", r.score(n).unwrap());
        }
        println!();
    }

    println!();
    println!("flat counts every touched address the same;");
    println!("weight_out at peel4 is tiny because almost no loot went there;");
    println!("distance at hop4 is 1/4! regardless of the amounts involved.");
}
