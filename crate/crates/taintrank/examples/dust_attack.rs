//! Why flat reachability overreacts to dust.
//!
//! The thief mails one satoshi of "dust" to a thousand bystander
//! addresses and moves the rest of the loot to a single spend address.
//! Every bystander now technically holds stolen value, and the flat rule
//! scores each of them 1.0, identical to the spend address. Value
//! weighting keeps each bystander at the dust's actual share of the loot
//! and leaves the spend address close to 1.

use taintrank::graph::ValueMode;
use taintrank::scenario::{generate, ScenarioSpec};
use taintrank::taint::{taint_fixed, taint_weight};

fn main() {
    let value = 100_000_000u64;
    let spec = ScenarioSpec::DustAttack { victims: 1_000, dust: 1, value, seed: 1 };
    let s = generate(&spec).unwrap();
    let g = &s.graph;

    let flat = taint_fixed(g, s.root).unwrap();
    let weighted = taint_weight(g, s.root, ValueMode::Out, 1).unwrap();

    let victim = g.node_id("victim0").unwrap();
    let spend = g.node_id("spend").unwrap();
    println!("scores for one dusted bystander vs the real spend address:");
    println!(
        "  flat:     victim {:>14.10}  spend {:>14.10}",
        flat.score(victim).unwrap(),
        flat.score(spend).unwrap()
    );
    println!(
        "  weighted: victim {:>14.10}  spend {:>14.10}",
        weighted.score(victim).unwrap(),
        weighted.score(spend).unwrap()
    );

    // An investigator freezing every address above a threshold would act
    // on wildly different sets under the two rules.
    let threshold = 0.0001;
    let flagged = |scores: &taintrank::taint::TaintScores| {
        scores.scores.iter().filter(|&&v| v >= threshold).count()
    };
    println!();
    println!("addresses scoring at least {threshold}:");
    println!("  flat:     {:>5} (the thief plus all 1001 recipients)", flagged(&flat));
    println!("  weighted: {:>5} (the thief and the spend address)", flagged(&weighted));
}
