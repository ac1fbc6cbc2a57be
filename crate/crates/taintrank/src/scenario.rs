//! Synthetic transfer patterns with known ground truth.
//!
//! Each generator builds a graph around a designated root (the "thief")
//! and tracks, transfer by transfer, how much stolen value reaches every
//! node: a node's outgoing transfer carries stolen satoshi in proportion
//! to the stolen share of its balance at that moment, with integer
//! arithmetic throughout. Ground truth is the set of nodes that ever held
//! at least one satoshi of stolen value. Generation is deterministic given
//! the spec, including its seed; the designed kinds ignore the seed.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, NodeId, TxGraph};
use crate::taint::{rank_order, TaintScores};

fn default_seed() -> u64 {
    1
}

/// Declarative scenario description. Parses from a small TOML document
/// with a `kind` key plus the kind's parameters, e.g.
///
/// ```toml
/// kind = "dust_attack"
/// victims = 50
/// dust = 1
/// value = 100000000
/// ```
///
/// TOML integers are signed 64-bit, so spec files can only express seeds
/// up to `i64::MAX`; larger seeds still work through [`Self::set_seed`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSpec {
    /// `length` hops forwarding the full `value` each step.
    LongChain {
        length: u64,
        value: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// A chain that sheds `peel` satoshi to a fresh address at every hop
    /// while the remainder moves on.
    PeelChain {
        length: u64,
        value: u64,
        peel: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// `value` split equally over `splits` chains of `depth` hops that
    /// merge into `rejoin` collector nodes.
    FanOutFanIn {
        splits: u64,
        depth: u64,
        rejoin: u64,
        value: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// `dust` satoshi mailed to each of `victims` addresses; the rest of
    /// `value` moves to a single spend address.
    DustAttack {
        victims: u64,
        dust: u64,
        value: u64,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Random acyclic graph: edges point from lower to higher node index.
    RandomDag { nodes: u64, edges: u64, max_weight: u64, seed: u64 },
    /// Random directed graph, cycles allowed.
    RandomCyclic { nodes: u64, edges: u64, max_weight: u64, seed: u64 },
}

impl ScenarioSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScenarioSpec::LongChain { .. } => "long_chain",
            ScenarioSpec::PeelChain { .. } => "peel_chain",
            ScenarioSpec::FanOutFanIn { .. } => "fan_out_fan_in",
            ScenarioSpec::DustAttack { .. } => "dust_attack",
            ScenarioSpec::RandomDag { .. } => "random_dag",
            ScenarioSpec::RandomCyclic { .. } => "random_cyclic",
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            ScenarioSpec::LongChain { seed, .. }
            | ScenarioSpec::PeelChain { seed, .. }
            | ScenarioSpec::FanOutFanIn { seed, .. }
            | ScenarioSpec::DustAttack { seed, .. }
            | ScenarioSpec::RandomDag { seed, .. }
            | ScenarioSpec::RandomCyclic { seed, .. } => seed,
        }
    }

    pub fn set_seed(&mut self, new_seed: u64) {
        match self {
            ScenarioSpec::LongChain { seed, .. }
            | ScenarioSpec::PeelChain { seed, .. }
            | ScenarioSpec::FanOutFanIn { seed, .. }
            | ScenarioSpec::DustAttack { seed, .. }
            | ScenarioSpec::RandomDag { seed, .. }
            | ScenarioSpec::RandomCyclic { seed, .. } => *seed = new_seed,
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("bad scenario spec: {0}")]
    Spec(String),
}

/// Parses a TOML scenario spec.
pub fn parse_spec(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    toml::from_str(text).map_err(|e| ScenarioError::Spec(e.to_string()))
}

/// A generated scenario: the graph, the root, and the nodes that ever held
/// stolen value (sorted by id).
#[derive(Debug, Clone)]
pub struct Scenario {
    pub graph: TxGraph,
    pub root: NodeId,
    pub ground_truth: Vec<NodeId>,
}

struct Build {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    transfers: Vec<(u32, u32, u64)>,
}

impl Build {
    fn new() -> Self {
        Build { labels: Vec::new(), index: HashMap::new(), transfers: Vec::new() }
    }

    fn node(&mut self, label: String) -> u32 {
        if let Some(&id) = self.index.get(label.as_str()) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.index.insert(label.clone(), id);
        self.labels.push(label);
        id
    }

    fn transfer(&mut self, src: u32, dst: u32, value: u64) {
        debug_assert_ne!(src, dst);
        debug_assert!(value >= 1);
        self.transfers.push((src, dst, value));
    }

    /// Runs the stolen-value accounting over the transfer list in order,
    /// aggregates transfers into edges, and assembles the graph.
    fn assemble(self, root: u32, initial_stolen: u64) -> Scenario {
        let n = self.labels.len();
        let mut stolen = vec![0u64; n];
        let mut clean = vec![0u64; n];
        let mut ever_stolen = vec![0u64; n];
        stolen[root as usize] = initial_stolen;
        ever_stolen[root as usize] = initial_stolen;

        let mut edges: HashMap<(u32, u32), (u64, u32)> = HashMap::new();
        for &(u, v, w) in &self.transfers {
            let (u_us, v_us) = (u as usize, v as usize);
            let balance = stolen[u_us] + clean[u_us];
            if balance < w {
                // The sender tops up with clean funds from outside the model.
                clean[u_us] += w - balance;
            }
            let total = stolen[u_us] + clean[u_us];
            let moved_stolen = ((w as u128 * stolen[u_us] as u128) / total as u128) as u64;
            let moved_clean = w - moved_stolen;
            stolen[u_us] -= moved_stolen;
            clean[u_us] -= moved_clean;
            stolen[v_us] += moved_stolen;
            clean[v_us] += moved_clean;
            ever_stolen[v_us] += moved_stolen;

            let slot = edges.entry((u, v)).or_insert((0, 0));
            slot.0 += w;
            slot.1 += 1;
        }

        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|((s, d), (w, c))| Edge {
                src: NodeId::new(s),
                dst: NodeId::new(d),
                weight: w,
                tx_count: c,
            })
            .collect();
        let graph = TxGraph::from_edge_list(self.labels, edges)
            .expect("generated scenarios satisfy graph invariants");
        let ground_truth: Vec<NodeId> = (0..n)
            .filter(|&i| ever_stolen[i] >= 1)
            .map(|i| NodeId::new(i as u32))
            .collect();
        Scenario { graph, root: NodeId::new(root), ground_truth }
    }
}

fn require(cond: bool, msg: &str) -> Result<(), ScenarioError> {
    if cond {
        Ok(())
    } else {
        Err(ScenarioError::InvalidParameter(msg.to_string()))
    }
}

pub fn generate(spec: &ScenarioSpec) -> Result<Scenario, ScenarioError> {
    match *spec {
        ScenarioSpec::LongChain { length, value, .. } => {
            require(length >= 1, "length must be at least 1")?;
            require(value >= 1, "value must be at least 1")?;
            let mut b = Build::new();
            let root = b.node("thief".to_string());
            let mut cur = root;
            for hop in 1..=length {
                let next = b.node(format!("hop{hop}"));
                b.transfer(cur, next, value);
                cur = next;
            }
            Ok(b.assemble(root, value))
        }
        ScenarioSpec::PeelChain { length, value, peel, .. } => {
            require(length >= 1, "length must be at least 1")?;
            require(peel >= 1, "peel must be at least 1")?;
            require(
                value > length * peel,
                "value must exceed length * peel so the chain never runs dry",
            )?;
            let mut b = Build::new();
            let root = b.node("thief".to_string());
            let mut cur = root;
            let mut remaining = value;
            for hop in 1..=length {
                let peeled = b.node(format!("peel{hop}"));
                b.transfer(cur, peeled, peel);
                remaining -= peel;
                let next = b.node(format!("hop{hop}"));
                b.transfer(cur, next, remaining);
                cur = next;
            }
            Ok(b.assemble(root, value))
        }
        ScenarioSpec::FanOutFanIn { splits, depth, rejoin, value, .. } => {
            require(splits >= 1, "splits must be at least 1")?;
            require(depth >= 1, "depth must be at least 1")?;
            require(rejoin >= 1 && rejoin <= splits, "rejoin must be in 1..=splits")?;
            require(value >= splits, "value must be at least splits")?;
            let shares = crate::ingest::apportion_equal(splits as usize, value);
            let mut b = Build::new();
            let root = b.node("thief".to_string());
            let joins: Vec<u32> =
                (0..rejoin).map(|j| b.node(format!("join{j}"))).collect();
            for (i, &share) in shares.iter().enumerate() {
                let mut cur = root;
                for d in 1..=depth {
                    let next = b.node(format!("s{i}h{d}"));
                    b.transfer(cur, next, share);
                    cur = next;
                }
                b.transfer(cur, joins[i % joins.len()], share);
            }
            Ok(b.assemble(root, value))
        }
        ScenarioSpec::DustAttack { victims, dust, value, .. } => {
            require(victims >= 1, "victims must be at least 1")?;
            require(dust >= 1, "dust must be at least 1")?;
            require(value >= victims * dust, "value must cover victims * dust")?;
            let mut b = Build::new();
            let root = b.node("thief".to_string());
            for i in 0..victims {
                let v = b.node(format!("victim{i}"));
                b.transfer(root, v, dust);
            }
            let reserve = value - victims * dust;
            if reserve >= 1 {
                let sink = b.node("spend".to_string());
                b.transfer(root, sink, reserve);
            }
            Ok(b.assemble(root, value))
        }
        ScenarioSpec::RandomDag { nodes, edges, max_weight, seed } => {
            require(nodes >= 2, "nodes must be at least 2")?;
            require(max_weight >= 1, "max_weight must be at least 1")?;
            let cap = nodes * (nodes - 1) / 2;
            require(edges >= 1 && edges <= cap, "edges must be in 1..=n*(n-1)/2")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = std::collections::HashSet::new();
            let mut list: Vec<(u32, u32)> = Vec::with_capacity(edges as usize);
            let mut attempts = 0u64;
            let attempt_cap = 1000 + edges * 200;
            while (list.len() as u64) < edges {
                attempts += 1;
                if attempts > attempt_cap {
                    return Err(ScenarioError::InvalidParameter(
                        "edge density too high to sample".to_string(),
                    ));
                }
                let a = rng.gen_range(0..nodes as u32);
                let b = rng.gen_range(0..nodes as u32);
                if a == b {
                    continue;
                }
                let pair = (a.min(b), a.max(b));
                if seen.insert(pair) {
                    list.push(pair);
                }
            }
            // Ascending (src, dst) is a topological order for accounting.
            list.sort_unstable();
            let mut b = Build::new();
            for i in 0..nodes {
                b.node(format!("n{i}"));
            }
            let initial = max_weight * nodes;
            for (u, v) in list {
                b.transfer(u, v, rng.gen_range(1..=max_weight));
            }
            Ok(b.assemble(0, initial))
        }
        ScenarioSpec::RandomCyclic { nodes, edges, max_weight, seed } => {
            require(nodes >= 2, "nodes must be at least 2")?;
            require(max_weight >= 1, "max_weight must be at least 1")?;
            let cap = nodes * (nodes - 1);
            require(edges >= 1 && edges <= cap, "edges must be in 1..=n*(n-1)")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut seen = std::collections::HashSet::new();
            let mut b = Build::new();
            for i in 0..nodes {
                b.node(format!("n{i}"));
            }
            let mut attempts = 0u64;
            let attempt_cap = 1000 + edges * 200;
            let mut placed = 0u64;
            while placed < edges {
                attempts += 1;
                if attempts > attempt_cap {
                    return Err(ScenarioError::InvalidParameter(
                        "edge density too high to sample".to_string(),
                    ));
                }
                let u = rng.gen_range(0..nodes as u32);
                let v = rng.gen_range(0..nodes as u32);
                if u == v || !seen.insert((u, v)) {
                    continue;
                }
                b.transfer(u, v, rng.gen_range(1..=max_weight));
                placed += 1;
            }
            let initial = max_weight * nodes;
            Ok(b.assemble(0, initial))
        }
    }
}

/// How well a score ranking recovers the ground truth in its top `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub k: usize,
    pub truth_total: usize,
    pub truth_in_top_k: usize,
    /// Top-k nodes that never held stolen value.
    pub collateral_in_top_k: usize,
    pub truth_captured: f64,
}

pub fn evaluate_top_k(scores: &TaintScores, ground_truth: &[NodeId], k: usize) -> Evaluation {
    let mut order: Vec<u32> = (0..scores.scores.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        rank_order((scores.scores[a as usize], a), (scores.scores[b as usize], b))
    });
    order.truncate(k);
    let truth: std::collections::HashSet<u32> = ground_truth.iter().map(|n| n.raw()).collect();
    let truth_in_top_k = order.iter().filter(|&&id| truth.contains(&id)).count();
    Evaluation {
        k,
        truth_total: truth.len(),
        truth_in_top_k,
        collateral_in_top_k: order.len() - truth_in_top_k,
        truth_captured: if truth.is_empty() {
            0.0
        } else {
            truth_in_top_k as f64 / truth.len() as f64
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ValueMode;
    use crate::taint;

    #[test]
    fn long_chain_taints_every_node() {
        let spec = ScenarioSpec::LongChain { length: 5, value: 1_000, seed: 1 };
        let s = generate(&spec).unwrap();
        assert_eq!(s.graph.node_count(), 6);
        assert_eq!(s.graph.edge_count(), 5);
        assert_eq!(s.ground_truth.len(), 6);
        assert_eq!(s.graph.label(s.root).unwrap(), "thief");
    }

    #[test]
    fn peel_chain_sheds_dust_and_keeps_moving() {
        let spec = ScenarioSpec::PeelChain { length: 3, value: 100, peel: 10, seed: 1 };
        let s = generate(&spec).unwrap();
        // thief + 3 hops + 3 peels
        assert_eq!(s.graph.node_count(), 7);
        assert_eq!(s.ground_truth.len(), 7);
        let hop3 = s.graph.node_id("hop3").unwrap();
        assert_eq!(s.graph.node_value(hop3, ValueMode::In).unwrap(), 70);
    }

    #[test]
    fn dust_attack_reaches_every_victim() {
        let spec = ScenarioSpec::DustAttack { victims: 5, dust: 2, value: 1_000, seed: 1 };
        let s = generate(&spec).unwrap();
        assert_eq!(s.graph.node_count(), 7); // thief + 5 victims + spend
        assert_eq!(s.ground_truth.len(), 7);
        let fixed = taint::taint_fixed(&s.graph, s.root).unwrap();
        for i in 0..5 {
            let v = s.graph.node_id(&format!("victim{i}")).unwrap();
            assert_eq!(fixed.score(v), Some(1.0));
        }
    }

    #[test]
    fn fan_out_fan_in_rejoins_all_shares() {
        let spec = ScenarioSpec::FanOutFanIn { splits: 4, depth: 2, rejoin: 1, value: 400, seed: 1 };
        let s = generate(&spec).unwrap();
        let join = s.graph.node_id("join0").unwrap();
        assert_eq!(s.graph.node_value(join, ValueMode::In).unwrap(), 400);
        assert_eq!(s.graph.in_degree(join).unwrap(), 4);
        assert!(s.ground_truth.contains(&join));
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let spec = ScenarioSpec::RandomCyclic { nodes: 30, edges: 80, max_weight: 9, seed: 42 };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        let ea: Vec<_> = a.graph.edges().map(|e| (e.src.raw(), e.dst.raw(), e.weight)).collect();
        let eb: Vec<_> = b.graph.edges().map(|e| (e.src.raw(), e.dst.raw(), e.weight)).collect();
        assert_eq!(ea, eb);
        assert_eq!(a.ground_truth, b.ground_truth);

        let other = generate(&ScenarioSpec::RandomCyclic {
            nodes: 30,
            edges: 80,
            max_weight: 9,
            seed: 43,
        })
        .unwrap();
        let eo: Vec<_> =
            other.graph.edges().map(|e| (e.src.raw(), e.dst.raw(), e.weight)).collect();
        assert_ne!(ea, eo);
    }

    #[test]
    fn random_dag_has_no_cycles() {
        let spec = ScenarioSpec::RandomDag { nodes: 40, edges: 100, max_weight: 5, seed: 7 };
        let s = generate(&spec).unwrap();
        for e in s.graph.edges() {
            assert!(e.src.raw() < e.dst.raw(), "edge {} -> {}", e.src, e.dst);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(generate(&ScenarioSpec::LongChain { length: 0, value: 1, seed: 1 }).is_err());
        assert!(generate(&ScenarioSpec::PeelChain { length: 5, value: 10, peel: 2, seed: 1 })
            .is_err());
        assert!(generate(&ScenarioSpec::RandomDag { nodes: 3, edges: 10, max_weight: 1, seed: 1 })
            .is_err());
        assert!(
            generate(&ScenarioSpec::FanOutFanIn { splits: 2, depth: 1, rejoin: 3, value: 10, seed: 1 })
                .is_err()
        );
    }

    #[test]
    fn spec_parses_from_toml() {
        let spec = parse_spec(
            "kind = \"dust_attack\"\nvictims = 50\ndust = 1\nvalue = 100000000\n",
        )
        .unwrap();
        assert_eq!(
            spec,
            ScenarioSpec::DustAttack { victims: 50, dust: 1, value: 100_000_000, seed: 1 }
        );
        assert!(parse_spec("kind = \"unknown\"").is_err());
    }

    #[test]
    fn evaluation_counts_truth_and_collateral() {
        let spec = ScenarioSpec::DustAttack { victims: 3, dust: 1, value: 100, seed: 1 };
        let s = generate(&spec).unwrap();
        let fixed = taint::taint_fixed(&s.graph, s.root).unwrap();
        let eval = evaluate_top_k(&fixed, &s.ground_truth, 5);
        assert_eq!(eval.truth_total, 5);
        assert_eq!(eval.truth_in_top_k, 5);
        assert_eq!(eval.collateral_in_top_k, 0);
        assert!((eval.truth_captured - 1.0).abs() < 1e-12);
    }
}
