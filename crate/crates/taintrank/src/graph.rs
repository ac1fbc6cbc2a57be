//! Weighted directed transaction graph.
//!
//! Nodes are addresses (or cluster representatives) with dense integer ids
//! assigned in first-seen order. Edges are aggregated transfers: parallel
//! transfers between the same ordered pair collapse into one edge whose
//! weight is the summed satoshi value and whose `tx_count` records the
//! multiplicity. Self-loops are dropped at build time. After [`GraphBuilder::finalize`]
//! the graph is immutable and safe to share across threads.
//!
//! All values are integer satoshi. Adjacency is stored compressed in both
//! directions with neighbor lists sorted by node id, so iteration order is
//! deterministic.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

/// Dense integer handle for a graph node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn new(id: u32) -> Self {
        NodeId(id)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Aggregated directed transfer between two distinct nodes.
///
/// Invariants: `src != dst`, `weight >= 1`, at most one edge per ordered pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Total transferred value in satoshi.
    pub weight: u64,
    /// Number of raw transfers aggregated into this edge.
    pub tx_count: u32,
}

/// Which incident edge set to sum when measuring a node's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueMode {
    /// Sum of incoming edge weights.
    In,
    /// Sum of outgoing edge weights.
    Out,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown node id {0}")]
    UnknownNode(u32),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("edge {src}->{dst} references a node id >= node count {node_count}")]
    EdgeOutOfRange { src: u32, dst: u32, node_count: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(u32),
    #[error("edge {src}->{dst} has zero weight")]
    ZeroWeight { src: u32, dst: u32 },
    #[error("edge {src}->{dst} has zero tx_count")]
    ZeroTxCount { src: u32, dst: u32 },
    #[error("duplicate edge {src}->{dst}")]
    DuplicateEdge { src: u32, dst: u32 },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("label {0:?} is empty or contains tab/newline")]
    InvalidLabel(String),
    #[error("expected {expected} nodes, got {got}")]
    NodeCountMismatch { expected: usize, got: usize },
}

fn label_ok(label: &str) -> bool {
    !label.is_empty() && !label.bytes().any(|b| b == b'\t' || b == b'\n' || b == b'\r')
}

/// Immutable weighted directed graph with string labels.
#[derive(Clone, Debug)]
pub struct TxGraph {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    out_offsets: Vec<usize>,
    out_entries: Vec<(NodeId, u64)>,
    out_tx_counts: Vec<u32>,
    in_offsets: Vec<usize>,
    in_entries: Vec<(NodeId, u64)>,
}

impl TxGraph {
    /// Builds a graph from explicit labels and edges, validating every
    /// structural invariant. Node ids are the indices into `labels`.
    pub fn from_edge_list(labels: Vec<String>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        let n = labels.len();
        let mut label_index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if !label_ok(label) {
                return Err(GraphError::InvalidLabel(label.clone()));
            }
            if label_index.insert(label.clone(), NodeId(i as u32)).is_some() {
                return Err(GraphError::DuplicateLabel(label.clone()));
            }
        }

        edges.sort_unstable_by_key(|e| (e.src.0, e.dst.0));
        for (i, e) in edges.iter().enumerate() {
            if e.src.index() >= n || e.dst.index() >= n {
                return Err(GraphError::EdgeOutOfRange {
                    src: e.src.0,
                    dst: e.dst.0,
                    node_count: n,
                });
            }
            if e.src == e.dst {
                return Err(GraphError::SelfLoop(e.src.0));
            }
            if e.weight == 0 {
                return Err(GraphError::ZeroWeight { src: e.src.0, dst: e.dst.0 });
            }
            if e.tx_count == 0 {
                return Err(GraphError::ZeroTxCount { src: e.src.0, dst: e.dst.0 });
            }
            if i > 0 {
                let prev = &edges[i - 1];
                if prev.src == e.src && prev.dst == e.dst {
                    return Err(GraphError::DuplicateEdge { src: e.src.0, dst: e.dst.0 });
                }
            }
        }

        let mut out_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src.index() + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
        }
        let out_entries: Vec<(NodeId, u64)> = edges.iter().map(|e| (e.dst, e.weight)).collect();
        let out_tx_counts: Vec<u32> = edges.iter().map(|e| e.tx_count).collect();

        let mut in_pairs: Vec<(u32, u32, u64)> =
            edges.iter().map(|e| (e.dst.0, e.src.0, e.weight)).collect();
        in_pairs.sort_unstable();
        let mut in_offsets = vec![0usize; n + 1];
        for &(dst, _, _) in &in_pairs {
            in_offsets[dst as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
        }
        let in_entries: Vec<(NodeId, u64)> =
            in_pairs.iter().map(|&(_, src, w)| (NodeId(src), w)).collect();

        Ok(TxGraph {
            labels,
            label_index,
            out_offsets,
            out_entries,
            out_tx_counts,
            in_offsets,
            in_entries,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_entries.len()
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    pub fn label(&self, n: NodeId) -> Result<&str, GraphError> {
        self.labels
            .get(n.index())
            .map(String::as_str)
            .ok_or(GraphError::UnknownNode(n.0))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.labels.len() as u32).map(NodeId)
    }

    /// Edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            let lo = self.out_offsets[i];
            let hi = self.out_offsets[i + 1];
            (lo..hi).map(move |k| Edge {
                src: NodeId(i as u32),
                dst: self.out_entries[k].0,
                weight: self.out_entries[k].1,
                tx_count: self.out_tx_counts[k],
            })
        })
    }

    fn check(&self, n: NodeId) -> Result<usize, GraphError> {
        let i = n.index();
        if i < self.labels.len() {
            Ok(i)
        } else {
            Err(GraphError::UnknownNode(n.0))
        }
    }

    /// Outgoing `(neighbor, weight)` pairs in ascending neighbor id order.
    pub fn out_neighbors(&self, n: NodeId) -> Result<&[(NodeId, u64)], GraphError> {
        let i = self.check(n)?;
        Ok(self.out_slice(i))
    }

    /// Incoming `(neighbor, weight)` pairs in ascending neighbor id order.
    pub fn in_neighbors(&self, n: NodeId) -> Result<&[(NodeId, u64)], GraphError> {
        let i = self.check(n)?;
        Ok(self.in_slice(i))
    }

    pub fn out_degree(&self, n: NodeId) -> Result<usize, GraphError> {
        Ok(self.out_neighbors(n)?.len())
    }

    pub fn in_degree(&self, n: NodeId) -> Result<usize, GraphError> {
        Ok(self.in_neighbors(n)?.len())
    }

    /// Total incident weight on one side of the node, in satoshi.
    pub fn node_value(&self, n: NodeId, mode: ValueMode) -> Result<u64, GraphError> {
        let entries = match mode {
            ValueMode::In => self.in_neighbors(n)?,
            ValueMode::Out => self.out_neighbors(n)?,
        };
        Ok(entries.iter().map(|&(_, w)| w).sum())
    }

    pub(crate) fn out_slice(&self, i: usize) -> &[(NodeId, u64)] {
        &self.out_entries[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    pub(crate) fn in_slice(&self, i: usize) -> &[(NodeId, u64)] {
        &self.in_entries[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    /// Writes `src_id<TAB>dst_id<TAB>weight<TAB>tx_count` lines sorted by `(src, dst)`.
    pub fn write_edgelist<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in self.edges() {
            writeln!(w, "{}\t{}\t{}\t{}", e.src, e.dst, e.weight, e.tx_count)?;
        }
        Ok(())
    }

    /// Writes `node_id<TAB>label` lines sorted by node id.
    pub fn write_labels<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (i, label) in self.labels.iter().enumerate() {
            writeln!(w, "{i}\t{label}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EdgelistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{file}: line {line}: {reason}")]
    Parse { file: &'static str, line: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Reads the edgelist/label file pair written by [`TxGraph::write_edgelist`]
/// and [`TxGraph::write_labels`]. Round-trips exactly.
pub fn read_edgelist<E: BufRead, L: BufRead>(edges: E, labels: L) -> Result<TxGraph, EdgelistError> {
    let mut slots: Vec<(u32, String)> = Vec::new();
    for (lineno, line) in labels.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let (id, label) = line.split_once('\t').ok_or(EdgelistError::Parse {
            file: "labels",
            line: lineno,
            reason: "expected node_id<TAB>label".into(),
        })?;
        let id: u32 = id.parse().map_err(|_| EdgelistError::Parse {
            file: "labels",
            line: lineno,
            reason: format!("bad node id {id:?}"),
        })?;
        slots.push((id, label.to_string()));
    }
    let n = slots.len();
    let mut label_vec: Vec<Option<String>> = vec![None; n];
    for (id, label) in slots {
        let idx = id as usize;
        if idx >= n || label_vec[idx].is_some() {
            return Err(EdgelistError::Parse {
                file: "labels",
                line: 0,
                reason: format!("node ids must be dense 0..{n}, saw {id} twice or out of range"),
            });
        }
        label_vec[idx] = Some(label);
    }
    let label_vec: Vec<String> = label_vec.into_iter().map(|l| l.unwrap()).collect();

    let mut edge_vec = Vec::new();
    for (lineno, line) in edges.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let mut parts = line.split('\t');
        let mut field = |name: &str| {
            parts.next().ok_or(EdgelistError::Parse {
                file: "edgelist",
                line: lineno,
                reason: format!("missing field {name}"),
            })
        };
        let src = field("src_id")?;
        let dst = field("dst_id")?;
        let weight = field("weight")?;
        let tx_count = field("tx_count")?;
        let parse_err = |what: &str, raw: &str| EdgelistError::Parse {
            file: "edgelist",
            line: lineno,
            reason: format!("bad {what} {raw:?}"),
        };
        let edge = Edge {
            src: NodeId(src.parse().map_err(|_| parse_err("src_id", src))?),
            dst: NodeId(dst.parse().map_err(|_| parse_err("dst_id", dst))?),
            weight: weight.parse().map_err(|_| parse_err("weight", weight))?,
            tx_count: tx_count.parse().map_err(|_| parse_err("tx_count", tx_count))?,
        };
        if parts.next().is_some() {
            return Err(EdgelistError::Parse {
                file: "edgelist",
                line: lineno,
                reason: "expected exactly four tab-separated fields".into(),
            });
        }
        edge_vec.push(edge);
    }

    Ok(TxGraph::from_edge_list(label_vec, edge_vec)?)
}

pub fn write_edgelist_files(g: &TxGraph, edge_path: &Path, label_path: &Path) -> io::Result<()> {
    let mut ew = BufWriter::new(File::create(edge_path)?);
    g.write_edgelist(&mut ew)?;
    ew.flush()?;
    let mut lw = BufWriter::new(File::create(label_path)?);
    g.write_labels(&mut lw)?;
    lw.flush()
}

pub fn read_edgelist_files(edge_path: &Path, label_path: &Path) -> Result<TxGraph, EdgelistError> {
    let edges = BufReader::new(File::open(edge_path)?);
    let labels = BufReader::new(File::open(label_path)?);
    read_edgelist(edges, labels)
}

/// Accumulates transfers and interns labels; [`GraphBuilder::finalize`]
/// produces the immutable graph.
///
/// Labels must be non-empty and free of tab/newline; record parsing rejects
/// other address strings before they reach the builder.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    edges: HashMap<(u32, u32), (u64, u32)>,
    self_loops_dropped: u64,
    self_loop_weight_dropped: u64,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `label`, assigning the next dense id on first sight.
    pub fn ensure_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.label_index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.label_index.insert(label.to_string(), id);
        id
    }

    /// Records one transfer. Transfers between the same pair aggregate
    /// (weights sum, `tx_count` increments). Self-loops are dropped
    /// silently; zero values never reach this point when records come
    /// through ingest, and are ignored here to keep the weight invariant.
    pub fn add_transfer(&mut self, src: &str, dst: &str, value: u64) {
        if value == 0 {
            return;
        }
        let s = self.ensure_node(src);
        let d = self.ensure_node(dst);
        if s == d {
            self.self_loops_dropped += 1;
            self.self_loop_weight_dropped += value;
            return;
        }
        let slot = self.edges.entry((s.0, d.0)).or_insert((0, 0));
        slot.0 += value;
        slot.1 += 1;
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn self_loops_dropped(&self) -> u64 {
        self.self_loops_dropped
    }

    pub fn self_loop_weight_dropped(&self) -> u64 {
        self.self_loop_weight_dropped
    }

    pub fn finalize(self) -> TxGraph {
        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|((s, d), (w, c))| Edge {
                src: NodeId(s),
                dst: NodeId(d),
                weight: w,
                tx_count: c,
            })
            .collect();
        TxGraph::from_edge_list(self.labels, edges).expect("builder maintains graph invariants")
    }
}
