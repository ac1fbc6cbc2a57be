//! Taint propagation over the transaction graph.
//!
//! All methods start from a single root node whose score is pinned at 1 and
//! never recomputed. The first six methods assign scores only inside the
//! set of nodes reachable from the root along directed edges; the
//! pagerank-like method runs on the full graph but its mass still stays
//! inside the reachable set because edge taint follows source reachability.
//!
//! # Sweep semantics
//!
//! The weight, distance and combined methods process nodes level by level
//! in ascending hop distance from the root, nodes within a level in
//! ascending id. A level's new scores are computed from the values as of
//! the start of that level and committed together, so results do not depend
//! on any parallel schedule within a level: an in-neighbor in an earlier
//! level contributes its freshly assigned value, while one in the same or a
//! later level contributes its value from the previous sweep (0 on the
//! first sweep). `sweeps` repeats the whole pass; cycles feed back one
//! sweep at a time.
//!
//! # Determinism
//!
//! Scores are bit-reproducible: per-node accumulation runs over in-neighbors
//! in ascending id order and every term is evaluated as
//! `score * weight as f64 / value as f64` (or `score / distance`), so
//! identical inputs give identical floating-point results on every run.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::graph::{GraphError, NodeId, TxGraph, ValueMode};

/// Propagation method identifiers, used in score-file headers and output
/// file names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaintMethod {
    Fixed,
    WeightIn,
    WeightOut,
    Distance,
    CombinedAvg,
    CombinedMax,
    PagerankLike,
}

impl TaintMethod {
    pub const ALL: [TaintMethod; 7] = [
        TaintMethod::Fixed,
        TaintMethod::WeightIn,
        TaintMethod::WeightOut,
        TaintMethod::Distance,
        TaintMethod::CombinedAvg,
        TaintMethod::CombinedMax,
        TaintMethod::PagerankLike,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TaintMethod::Fixed => "fixed",
            TaintMethod::WeightIn => "weight_in",
            TaintMethod::WeightOut => "weight_out",
            TaintMethod::Distance => "distance",
            TaintMethod::CombinedAvg => "combined_avg",
            TaintMethod::CombinedMax => "combined_max",
            TaintMethod::PagerankLike => "pagerank_like",
        }
    }
}

/// How [`taint_combined`] merges its two constituent scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineMode {
    Average,
    Max,
}

/// Directed hop distances from a root, `None` for unreachable nodes.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    root: NodeId,
    dist: Vec<u32>,
}

const UNREACHED: u32 = u32::MAX;

impl DistanceMap {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn get(&self, n: NodeId) -> Option<u32> {
        match self.dist.get(n.index()) {
            Some(&d) if d != UNREACHED => Some(d),
            _ => None,
        }
    }

    pub fn is_reachable(&self, n: NodeId) -> bool {
        self.get(n).is_some()
    }

    pub fn reachable_count(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNREACHED).count()
    }

    /// Largest finite hop distance, `None` on an empty map.
    pub fn max_finite(&self) -> Option<u32> {
        self.dist.iter().filter(|&&d| d != UNREACHED).max().copied()
    }
}

/// Breadth-first hop distances along out-edges from `root`.
pub fn distances(g: &TxGraph, root: NodeId) -> Result<DistanceMap, GraphError> {
    g.label(root)?;
    let n = g.node_count();
    let mut dist = vec![UNREACHED; n];
    dist[root.index()] = 0;
    let mut frontier = vec![root.index()];
    let mut next = Vec::new();
    let mut depth = 0u32;
    while !frontier.is_empty() {
        depth += 1;
        for &u in &frontier {
            for &(v, _) in g.out_slice(u) {
                let v = v.index();
                if dist[v] == UNREACHED {
                    dist[v] = depth;
                    next.push(v);
                }
            }
        }
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    Ok(DistanceMap { root, dist })
}

/// Membership mask of the forward closure of `root` (root included).
pub fn reachable_set(g: &TxGraph, root: NodeId) -> Result<Vec<bool>, GraphError> {
    let d = distances(g, root)?;
    Ok(d.dist.iter().map(|&x| x != UNREACHED).collect())
}

/// Extracts the subgraph induced by the forward closure of `root`.
///
/// Returns the reachable node ids (ascending, in the original graph) and a
/// new graph over them with dense ids in the same relative order and the
/// original labels.
pub fn reachable_subgraph(g: &TxGraph, root: NodeId) -> Result<(Vec<NodeId>, TxGraph), GraphError> {
    let mask = reachable_set(g, root)?;
    let mut old_ids = Vec::new();
    let mut new_id = vec![u32::MAX; g.node_count()];
    for (i, &keep) in mask.iter().enumerate() {
        if keep {
            new_id[i] = old_ids.len() as u32;
            old_ids.push(NodeId::new(i as u32));
        }
    }
    let labels: Vec<String> =
        old_ids.iter().map(|&n| g.label(n).unwrap().to_string()).collect();
    let mut edges = Vec::new();
    for e in g.edges() {
        // Forward closure: a reachable source implies a reachable target.
        if mask[e.src.index()] {
            edges.push(crate::graph::Edge {
                src: NodeId::new(new_id[e.src.index()]),
                dst: NodeId::new(new_id[e.dst.index()]),
                weight: e.weight,
                tx_count: e.tx_count,
            });
        }
    }
    let sub = TxGraph::from_edge_list(labels, edges).expect("induced subgraph preserves invariants");
    Ok((old_ids, sub))
}

/// Per-node scores from one propagation run.
#[derive(Debug, Clone)]
pub struct TaintScores {
    pub method: TaintMethod,
    pub root: NodeId,
    /// Update passes for the pagerank-like method; 1 otherwise.
    pub iterations: u32,
    /// Sweep passes for the level-ordered methods; 1 otherwise.
    pub sweeps: u32,
    /// Indexed by node id; 0 outside the reachable set.
    pub scores: Vec<f64>,
    /// Forward closure of the root, indexed by node id.
    pub reachable: Vec<bool>,
}

impl TaintScores {
    pub fn score(&self, n: NodeId) -> Option<f64> {
        self.scores.get(n.index()).copied()
    }

    pub fn reachable_count(&self) -> usize {
        self.reachable.iter().filter(|&&r| r).count()
    }
}

/// Nodes grouped by hop distance; each level ascending by id. Level 0 is
/// the root alone.
fn sweep_levels(dist: &[u32]) -> Vec<Vec<u32>> {
    let max = dist.iter().filter(|&&d| d != UNREACHED).max().copied().unwrap_or(0);
    let mut levels = vec![Vec::new(); max as usize + 1];
    for (i, &d) in dist.iter().enumerate() {
        if d != UNREACHED {
            levels[d as usize].push(i as u32);
        }
    }
    levels
}

/// Runs `sweeps` level-ordered passes, committing each level as a block.
/// `term` sees the scores as of the level start.
fn run_sweeps<F>(g: &TxGraph, levels: &[Vec<u32>], reachable: &[bool], scores: &mut [f64], sweeps: u32, term: F)
where
    F: Fn(&[f64], usize, u64, usize) -> f64,
{
    let mut pending: Vec<(usize, f64)> = Vec::new();
    for _ in 0..sweeps {
        for level in levels.iter().skip(1) {
            pending.clear();
            for &i in level {
                let i = i as usize;
                let mut acc = 0.0;
                for &(j, w) in g.in_slice(i) {
                    let j = j.index();
                    if reachable[j] {
                        acc += term(scores, j, w, i);
                    }
                }
                pending.push((i, acc));
            }
            for &(i, v) in &pending {
                scores[i] = v;
            }
        }
    }
}

/// Hop distances, reachability flags, and the initial score vector
/// (everything 0 except the root at 1).
type BaseState = (Vec<u32>, Vec<bool>, Vec<f64>);

fn base_state(g: &TxGraph, root: NodeId) -> Result<BaseState, GraphError> {
    let d = distances(g, root)?;
    let reachable: Vec<bool> = d.dist.iter().map(|&x| x != UNREACHED).collect();
    let mut scores = vec![0.0; g.node_count()];
    scores[root.index()] = 1.0;
    Ok((d.dist, reachable, scores))
}

/// Marks every reachable node with score 1. The coarsest method: any node
/// that ever received tainted value, however little, scores the same as
/// the root.
pub fn taint_fixed(g: &TxGraph, root: NodeId) -> Result<TaintScores, GraphError> {
    let (_, reachable, _) = base_state(g, root)?;
    let scores: Vec<f64> = reachable.iter().map(|&r| if r { 1.0 } else { 0.0 }).collect();
    Ok(TaintScores { method: TaintMethod::Fixed, root, iterations: 1, sweeps: 1, scores, reachable })
}

/// Spreads taint proportionally to edge weight: a node receives each
/// in-neighbor's score scaled by `weight / neighbor value`, where the
/// neighbor's value sums its in-edges or out-edges (within the reachable
/// subgraph) per `mode`. Neighbors with zero value contribute nothing.
pub fn taint_weight(
    g: &TxGraph,
    root: NodeId,
    mode: ValueMode,
    sweeps: u32,
) -> Result<TaintScores, GraphError> {
    let (dist, reachable, mut scores) = base_state(g, root)?;
    let levels = sweep_levels(&dist);
    let n = g.node_count();
    let mut value = vec![0u64; n];
    for i in 0..n {
        if !reachable[i] {
            continue;
        }
        value[i] = match mode {
            // Out-edges of a reachable node always stay inside the closure.
            ValueMode::Out => g.out_slice(i).iter().map(|&(_, w)| w).sum(),
            ValueMode::In => g
                .in_slice(i)
                .iter()
                .filter(|&&(j, _)| reachable[j.index()])
                .map(|&(_, w)| w)
                .sum(),
        };
    }
    run_sweeps(g, &levels, &reachable, &mut scores, sweeps, |t, j, w, _| {
        let v = value[j];
        if v == 0 {
            0.0
        } else {
            t[j] * w as f64 / v as f64
        }
    });
    let method = match mode {
        ValueMode::In => TaintMethod::WeightIn,
        ValueMode::Out => TaintMethod::WeightOut,
    };
    Ok(TaintScores { method, root, iterations: 1, sweeps, scores, reachable })
}

/// Spreads taint damped by hop distance: a node at distance `d` receives
/// the sum of its in-neighbors' scores divided by `d`. Along a simple
/// chain this yields `1/d!`.
pub fn taint_distance(g: &TxGraph, root: NodeId, sweeps: u32) -> Result<TaintScores, GraphError> {
    let (dist, reachable, mut scores) = base_state(g, root)?;
    let levels = sweep_levels(&dist);
    let dist_f: Vec<f64> = dist.iter().map(|&d| if d == UNREACHED { 0.0 } else { d as f64 }).collect();
    run_sweeps(g, &levels, &reachable, &mut scores, sweeps, |t, j, _, i| t[j] / dist_f[i]);
    Ok(TaintScores { method: TaintMethod::Distance, root, iterations: 1, sweeps, scores, reachable })
}

/// Per-node combination of the distance method and the out-value weight
/// method: arithmetic mean or maximum. The root stays exactly 1.
pub fn taint_combined(
    g: &TxGraph,
    root: NodeId,
    mode: CombineMode,
    sweeps: u32,
) -> Result<TaintScores, GraphError> {
    let d = taint_distance(g, root, sweeps)?;
    let w = taint_weight(g, root, ValueMode::Out, sweeps)?;
    let scores: Vec<f64> = d
        .scores
        .iter()
        .zip(&w.scores)
        .map(|(&a, &b)| match mode {
            CombineMode::Average => (a + b) / 2.0,
            CombineMode::Max => a.max(b),
        })
        .collect();
    let method = match mode {
        CombineMode::Average => TaintMethod::CombinedAvg,
        CombineMode::Max => TaintMethod::CombinedMax,
    };
    Ok(TaintScores { method, root, iterations: 1, sweeps, scores, reachable: d.reachable })
}

/// Edge taint flags plus the per-node degree tallies the pagerank-like
/// method consumes. An edge is tainted exactly when its source lies in the
/// root's forward closure. Computed over the full graph.
#[derive(Debug, Clone)]
pub struct TaintedEdgeLabels {
    pub root: NodeId,
    pub reachable: Vec<bool>,
    /// Parallel to [`TxGraph::edges`] order.
    pub edge_tainted: Vec<bool>,
    pub in_degree: Vec<u32>,
    pub tainted_in_degree: Vec<u32>,
    pub out_degree: Vec<u32>,
    pub tainted_out_degree: Vec<u32>,
}

pub fn label_tainted_edges(g: &TxGraph, root: NodeId) -> Result<TaintedEdgeLabels, GraphError> {
    let reachable = reachable_set(g, root)?;
    let n = g.node_count();
    let mut labels = TaintedEdgeLabels {
        root,
        reachable,
        edge_tainted: Vec::with_capacity(g.edge_count()),
        in_degree: vec![0; n],
        tainted_in_degree: vec![0; n],
        out_degree: vec![0; n],
        tainted_out_degree: vec![0; n],
    };
    for i in 0..n {
        labels.out_degree[i] = g.out_slice(i).len() as u32;
        if labels.reachable[i] {
            labels.tainted_out_degree[i] = labels.out_degree[i];
        }
        labels.in_degree[i] = g.in_slice(i).len() as u32;
        labels.tainted_in_degree[i] =
            g.in_slice(i).iter().filter(|&&(j, _)| labels.reachable[j.index()]).count() as u32;
    }
    for e in g.edges() {
        labels.edge_tainted.push(labels.reachable[e.src.index()]);
    }
    Ok(labels)
}

/// Degree-ratio propagation on the full graph. Every node starts at its
/// tainted-in-edge fraction (0 when it has no in-edges); each synchronous
/// pass replaces a node's score with the sum over in-neighbors of
/// `score / tainted out-degree`, neighbors without tainted out-edges
/// contributing nothing. With `iterations = 0` the initial ratios are
/// returned. Scores can exceed 1; they are never normalized.
pub fn taint_pagerank(
    g: &TxGraph,
    labels: &TaintedEdgeLabels,
    iterations: u32,
) -> Result<TaintScores, GraphError> {
    let n = g.node_count();
    if labels.reachable.len() != n {
        return Err(GraphError::NodeCountMismatch { expected: n, got: labels.reachable.len() });
    }
    let mut t: Vec<f64> = (0..n)
        .map(|i| {
            if labels.in_degree[i] == 0 {
                0.0
            } else {
                labels.tainted_in_degree[i] as f64 / labels.in_degree[i] as f64
            }
        })
        .collect();
    let mut next = vec![0.0; n];
    for _ in 0..iterations {
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = 0.0;
            for &(j, _) in g.in_slice(i) {
                let j = j.index();
                let k = labels.tainted_out_degree[j];
                if k > 0 {
                    acc += t[j] / k as f64;
                }
            }
            *slot = acc;
        }
        std::mem::swap(&mut t, &mut next);
    }
    Ok(TaintScores {
        method: TaintMethod::PagerankLike,
        root: labels.root,
        iterations,
        sweeps: 1,
        scores: t,
        reachable: labels.reachable.clone(),
    })
}

/// One row of a score file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub id: NodeId,
    pub label: String,
    pub score: f64,
}

/// Score-file header contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreFileMeta {
    pub method: String,
    pub root_label: String,
    pub iterations: u32,
    pub sweeps: u32,
    pub pairing: String,
}

#[derive(Debug, Error)]
pub enum ScoreFileError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Descending score, ties broken by ascending node id.
pub(crate) fn rank_order(a: (f64, u32), b: (f64, u32)) -> std::cmp::Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// Writes the per-node score table: a `#`-prefixed metadata header, then
/// `node_id<TAB>label<TAB>score` rows sorted by descending score with ties
/// on ascending node id.
pub fn write_score_file<W: Write>(
    mut w: W,
    g: &TxGraph,
    scores: &TaintScores,
    pairing: &str,
) -> Result<(), ScoreFileError> {
    let root_label = g.label(scores.root)?;
    if scores.scores.len() != g.node_count() {
        return Err(ScoreFileError::Graph(GraphError::NodeCountMismatch {
            expected: g.node_count(),
            got: scores.scores.len(),
        }));
    }
    writeln!(
        w,
        "# method={}\troot={}\titerations={}\tsweeps={}\tpairing={}",
        scores.method.id(),
        root_label,
        scores.iterations,
        scores.sweeps,
        pairing
    )?;
    let mut order: Vec<u32> = (0..g.node_count() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        rank_order((scores.scores[a as usize], a), (scores.scores[b as usize], b))
    });
    for id in order {
        let n = NodeId::new(id);
        writeln!(w, "{}\t{}\t{}", id, g.label(n).unwrap(), scores.scores[id as usize])?;
    }
    Ok(())
}

/// Reads a score file written by [`write_score_file`].
pub fn read_score_file<R: BufRead>(r: R) -> Result<(ScoreFileMeta, Vec<ScoreRow>), ScoreFileError> {
    let mut meta: Option<ScoreFileMeta> = None;
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix("# ") {
            let mut fields: std::collections::HashMap<&str, &str> = std::collections::HashMap::new();
            for part in header.split('\t') {
                if let Some((k, v)) = part.split_once('=') {
                    fields.insert(k, v);
                }
            }
            let get = |k: &str| {
                fields.get(k).copied().ok_or(ScoreFileError::Parse {
                    line: lineno,
                    reason: format!("header missing {k}"),
                })
            };
            let parse_u32 = |k: &str, raw: &str| {
                raw.parse::<u32>().map_err(|_| ScoreFileError::Parse {
                    line: lineno,
                    reason: format!("bad {k} {raw:?}"),
                })
            };
            meta = Some(ScoreFileMeta {
                method: get("method")?.to_string(),
                root_label: get("root")?.to_string(),
                iterations: parse_u32("iterations", get("iterations")?)?,
                sweeps: parse_u32("sweeps", get("sweeps")?)?,
                pairing: get("pairing")?.to_string(),
            });
            continue;
        }
        let mut parts = line.split('\t');
        let bad = |reason: String| ScoreFileError::Parse { line: lineno, reason };
        let id: u32 = parts
            .next()
            .ok_or_else(|| bad("missing node id".into()))?
            .parse()
            .map_err(|_| bad("bad node id".into()))?;
        let label = parts.next().ok_or_else(|| bad("missing label".into()))?.to_string();
        let score: f64 = parts
            .next()
            .ok_or_else(|| bad("missing score".into()))?
            .parse()
            .map_err(|_| bad("bad score".into()))?;
        rows.push(ScoreRow { id: NodeId::new(id), label, score });
    }
    let meta = meta.ok_or(ScoreFileError::Parse { line: 1, reason: "missing header".into() })?;
    Ok((meta, rows))
}
