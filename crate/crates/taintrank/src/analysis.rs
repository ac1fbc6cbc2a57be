//! Descriptive statistics and report emitters.
//!
//! Everything here is read-only over a finished graph or score table and
//! writes plain CSV with a header row. The knee heuristic is informational
//! output only; nothing gates behavior on it.

use std::collections::BTreeMap;
use std::io::{self, Write};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::TxGraph;
use crate::taint::{rank_order, ScoreRow, TaintScores};

/// Mean total degree `2L / N`, or `None` for an empty graph.
pub fn average_degree(node_count: usize, edge_count: usize) -> Option<f64> {
    if node_count == 0 {
        None
    } else {
        Some(2.0 * edge_count as f64 / node_count as f64)
    }
}

/// Degree tallies for both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStats {
    pub node_count: usize,
    pub edge_count: usize,
    /// in-degree -> number of nodes with that in-degree.
    pub in_counts: BTreeMap<usize, usize>,
    pub out_counts: BTreeMap<usize, usize>,
    pub avg_degree: Option<f64>,
}

pub fn degree_distribution(g: &TxGraph) -> DegreeStats {
    let mut in_counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out_counts: BTreeMap<usize, usize> = BTreeMap::new();
    for n in g.nodes() {
        *in_counts.entry(g.in_degree(n).unwrap()).or_insert(0) += 1;
        *out_counts.entry(g.out_degree(n).unwrap()).or_insert(0) += 1;
    }
    DegreeStats {
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        in_counts,
        out_counts,
        avg_degree: average_degree(g.node_count(), g.edge_count()),
    }
}

/// CSV rows `(direction, degree, count, fraction)`, in-direction first,
/// degrees ascending.
pub fn write_degree_csv<W: Write>(stats: &DegreeStats, mut w: W) -> io::Result<()> {
    writeln!(w, "direction,degree,count,fraction")?;
    let n = stats.node_count as f64;
    for (direction, counts) in [("in", &stats.in_counts), ("out", &stats.out_counts)] {
        for (&degree, &count) in counts {
            writeln!(w, "{direction},{degree},{count},{}", count as f64 / n)?;
        }
    }
    Ok(())
}

/// The `k` highest-scoring `(label, score)` pairs, descending by score with
/// ties broken by ascending node id. Shorter than `k` when the graph has
/// fewer nodes.
pub fn top_k<'a>(scores: &TaintScores, g: &'a TxGraph, k: usize) -> Vec<(&'a str, f64)> {
    let mut order: Vec<u32> = (0..scores.scores.len() as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        rank_order((scores.scores[a as usize], a), (scores.scores[b as usize], b))
    });
    order.truncate(k);
    order
        .into_iter()
        .map(|id| {
            (g.label(crate::graph::NodeId::new(id)).unwrap(), scores.scores[id as usize])
        })
        .collect()
}

/// Same ranking over score-file rows (for reports that never load a graph).
pub fn top_k_rows(mut rows: Vec<ScoreRow>, k: usize) -> Vec<ScoreRow> {
    rows.sort_by(|a, b| rank_order((a.score, a.id.raw()), (b.score, b.id.raw())));
    rows.truncate(k);
    rows
}

/// CSV rows `(rank, label, score)`, rank starting at 1.
pub fn write_top_k_csv<W: Write>(rows: &[ScoreRow], mut w: W) -> io::Result<()> {
    writeln!(w, "rank,label,score")?;
    for (i, row) in rows.iter().enumerate() {
        writeln!(w, "{},{},{}", i + 1, row.label, row.score)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Binned score counts. With [`HistogramScale::Log`], zero scores cannot
/// sit on a geometric grid and are reported separately in `zero_count`;
/// with a linear scale `zero_count` stays 0 and zeros bin normally.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub scale: HistogramScale,
    pub zero_count: usize,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    /// Total mass including the zero bin; equals the input length.
    pub fn total_count(&self) -> usize {
        self.zero_count + self.bins.iter().map(|b| b.count).sum::<usize>()
    }
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("bin count must be at least 1")]
    ZeroBins,
}

/// Bins every value into exactly one bin (plus the zero bin under the log
/// scale). The bin range spans the observed min..max; a degenerate range
/// collapses to a single bin.
pub fn score_histogram(
    values: &[f64],
    scale: HistogramScale,
    bin_count: usize,
) -> Result<Histogram, AnalysisError> {
    if bin_count == 0 {
        return Err(AnalysisError::ZeroBins);
    }
    match scale {
        HistogramScale::Linear => {
            if values.is_empty() {
                return Ok(Histogram { scale, zero_count: 0, bins: Vec::new() });
            }
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                return Ok(Histogram {
                    scale,
                    zero_count: 0,
                    bins: vec![HistogramBin { lo, hi, count: values.len() }],
                });
            }
            let width = (hi - lo) / bin_count as f64;
            let mut counts = vec![0usize; bin_count];
            for &v in values {
                let idx = (((v - lo) / width) as usize).min(bin_count - 1);
                counts[idx] += 1;
            }
            let bins = counts
                .into_iter()
                .enumerate()
                .map(|(i, count)| HistogramBin {
                    lo: lo + width * i as f64,
                    hi: if i + 1 == bin_count { hi } else { lo + width * (i + 1) as f64 },
                    count,
                })
                .collect();
            Ok(Histogram { scale, zero_count: 0, bins })
        }
        HistogramScale::Log => {
            let positives: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
            let zero_count = values.len() - positives.len();
            if positives.is_empty() {
                return Ok(Histogram { scale, zero_count, bins: Vec::new() });
            }
            let lo = positives.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = positives.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo == hi {
                return Ok(Histogram {
                    scale,
                    zero_count,
                    bins: vec![HistogramBin { lo, hi, count: positives.len() }],
                });
            }
            let log_lo = lo.ln();
            let log_span = hi.ln() - log_lo;
            let mut counts = vec![0usize; bin_count];
            for &v in &positives {
                let idx = (((v.ln() - log_lo) / log_span * bin_count as f64) as usize)
                    .min(bin_count - 1);
                counts[idx] += 1;
            }
            let edge = |i: usize| {
                if i == 0 {
                    lo
                } else if i == bin_count {
                    hi
                } else {
                    (log_lo + log_span * i as f64 / bin_count as f64).exp()
                }
            };
            let bins = counts
                .into_iter()
                .enumerate()
                .map(|(i, count)| HistogramBin { lo: edge(i), hi: edge(i + 1), count })
                .collect();
            Ok(Histogram { scale, zero_count, bins })
        }
    }
}

/// CSV rows `(bin_lo, bin_hi, count)`. A non-empty zero bin is emitted
/// first as `0,0,count`.
pub fn write_histogram_csv<W: Write>(h: &Histogram, mut w: W) -> io::Result<()> {
    writeln!(w, "bin_lo,bin_hi,count")?;
    if h.zero_count > 0 {
        writeln!(w, "0,0,{}", h.zero_count)?;
    }
    for b in &h.bins {
        writeln!(w, "{},{},{}", b.lo, b.hi, b.count)?;
    }
    Ok(())
}

/// Informational cutoff: the number of top scores before the largest
/// relative drop in the descending positive-score curve. `None` when fewer
/// than two distinct positive scores exist.
pub fn knee_point(values: &[f64]) -> Option<usize> {
    let mut pos: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    pos.sort_by(|a, b| b.total_cmp(a));
    if pos.len() < 2 {
        return None;
    }
    let mut best_ratio = 0.0;
    let mut best_idx = None;
    for i in 0..pos.len() - 1 {
        let ratio = pos[i] / pos[i + 1];
        if ratio > best_ratio {
            best_ratio = ratio;
            best_idx = Some(i + 1);
        }
    }
    // All scores equal: no drop at all.
    if best_ratio <= 1.0 {
        None
    } else {
        best_idx
    }
}
