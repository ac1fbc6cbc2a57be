//! Parsing of line-delimited transaction records and graph construction.
//!
//! Input is one JSON object per line with fields `tx_id`, `inputs`,
//! `outputs` and an optional integer `timestamp`; each entry carries an
//! `address` and a `value`. Values are integer satoshi by default, or
//! decimal BTC with [`ValueUnit::Btc`] (1 BTC = 10^8 satoshi, rounded to
//! the nearest satoshi). Zero-value entries are dropped and counted.
//!
//! A transaction turns into edges by routing each output across the
//! transaction's inputs under a [`PairingRule`]. Apportionment is exact:
//! for every output, the integer shares sum to the output value, so graph
//! weight is conserved per transaction up to dropped self-loops.

use std::collections::HashMap;
use std::io::{self, BufRead};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterMap;
use crate::graph::{GraphBuilder, TxGraph};

pub const SATOSHI_PER_BTC: u64 = 100_000_000;

/// One side of a transaction entry, value in satoshi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TxEntry {
    pub address: String,
    pub value: u64,
}

/// A parsed transaction. Inputs may be empty (coinbase); outputs are
/// non-empty as parsed, though zero-value filtering can leave them empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionRecord {
    pub tx_id: String,
    pub timestamp: Option<i64>,
    pub inputs: Vec<TxEntry>,
    pub outputs: Vec<TxEntry>,
}

/// Unit of the `value` fields in the input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueUnit {
    Satoshi,
    Btc,
}

/// How one transaction's outputs are routed across its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PairingRule {
    /// Each output is split across inputs in proportion to input values.
    Proportional,
    /// Each output is split equally across all inputs.
    FullMeshEqual,
}

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    pub unit: ValueUnit,
    /// Abort on the first malformed line instead of skipping it.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { unit: ValueUnit::Satoshi, strict: false }
    }
}

#[derive(Debug, Clone)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

/// Parse result plus per-line diagnostics.
#[derive(Debug, Default)]
pub struct ParsedRecords {
    pub records: Vec<TransactionRecord>,
    /// Malformed lines skipped in lenient mode (empty in strict mode).
    pub skipped: Vec<LineError>,
    pub zero_entries_dropped: u64,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
}

#[derive(Deserialize)]
struct RawEntry {
    address: String,
    value: serde_json::Number,
}

#[derive(Deserialize)]
struct RawRecord {
    tx_id: String,
    #[serde(default)]
    timestamp: Option<i64>,
    inputs: Vec<RawEntry>,
    outputs: Vec<RawEntry>,
}

fn convert_value(value: &serde_json::Number, unit: ValueUnit) -> Result<u64, String> {
    match unit {
        ValueUnit::Satoshi => value
            .as_u64()
            .ok_or_else(|| format!("value {value} is not a non-negative integer satoshi amount")),
        ValueUnit::Btc => {
            let v = value
                .as_f64()
                .ok_or_else(|| format!("value {value} is not a finite number"))?;
            if !v.is_finite() || v < 0.0 {
                return Err(format!("value {value} is not a non-negative BTC amount"));
            }
            let sat = (v * SATOSHI_PER_BTC as f64).round();
            if sat > u64::MAX as f64 {
                return Err(format!("value {value} BTC overflows the satoshi range"));
            }
            Ok(sat as u64)
        }
    }
}

fn check_address(address: &str) -> Result<(), String> {
    if address.is_empty() {
        return Err("empty address".to_string());
    }
    if address.bytes().any(|b| b == b'\t' || b == b'\n' || b == b'\r') {
        return Err(format!("address {address:?} contains tab or newline"));
    }
    Ok(())
}

fn convert_record(
    raw: RawRecord,
    unit: ValueUnit,
    zero_dropped: &mut u64,
) -> Result<TransactionRecord, String> {
    if raw.outputs.is_empty() {
        return Err(format!("transaction {} has no outputs", raw.tx_id));
    }
    let mut convert_side = |raw_entries: Vec<RawEntry>| -> Result<Vec<TxEntry>, String> {
        let mut entries = Vec::with_capacity(raw_entries.len());
        for e in raw_entries {
            check_address(&e.address)?;
            let value = convert_value(&e.value, unit)?;
            if value == 0 {
                *zero_dropped += 1;
                continue;
            }
            entries.push(TxEntry { address: e.address, value });
        }
        Ok(entries)
    };
    Ok(TransactionRecord {
        inputs: convert_side(raw.inputs)?,
        outputs: convert_side(raw.outputs)?,
        tx_id: raw.tx_id,
        timestamp: raw.timestamp,
    })
}

/// Reads line-delimited JSON records. In lenient mode malformed lines are
/// counted and skipped with their line numbers; in strict mode the first
/// malformed line aborts the parse. Blank lines are ignored.
pub fn parse_records<R: BufRead>(input: R, opts: &ParseOptions) -> Result<ParsedRecords, IngestError> {
    let mut out = ParsedRecords::default();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<TransactionRecord, String> = serde_json::from_str::<RawRecord>(&line)
            .map_err(|e| e.to_string())
            .and_then(|raw| convert_record(raw, opts.unit, &mut out.zero_entries_dropped));
        match parsed {
            Ok(record) => out.records.push(record),
            Err(reason) => {
                if opts.strict {
                    return Err(IngestError::Malformed { line: lineno, reason });
                }
                out.skipped.push(LineError { line: lineno, reason });
            }
        }
    }
    Ok(out)
}

/// Keeps records whose timestamp lies in the inclusive `[start, end]`
/// bounds; records without a timestamp are excluded whenever any bound is
/// set. Returns the survivors and the number excluded.
pub fn filter_window(
    records: Vec<TransactionRecord>,
    start: Option<i64>,
    end: Option<i64>,
) -> (Vec<TransactionRecord>, usize) {
    if start.is_none() && end.is_none() {
        return (records, 0);
    }
    let before = records.len();
    let kept: Vec<TransactionRecord> = records
        .into_iter()
        .filter(|r| match r.timestamp {
            Some(t) => start.is_none_or(|s| t >= s) && end.is_none_or(|e| t <= e),
            None => false,
        })
        .collect();
    let excluded = before - kept.len();
    (kept, excluded)
}

/// Splits `value` across `inputs` proportionally to input size. Shares are
/// integers, sum exactly to `value`, and each differs from the ideal real
/// share by less than one satoshi.
pub fn apportion_proportional(inputs: &[u64], value: u64) -> Vec<u64> {
    let total: u128 = inputs.iter().map(|&v| v as u128).sum();
    if total == 0 {
        return vec![0; inputs.len()];
    }
    let v = value as u128;
    let mut shares = Vec::with_capacity(inputs.len());
    let mut prefix: u128 = 0;
    let mut prev = 0u128;
    for &u in inputs {
        prefix += u as u128;
        let cut = v * prefix / total;
        shares.push((cut - prev) as u64);
        prev = cut;
    }
    shares
}

/// Splits `value` into `n` equal integer shares; the remainder goes one
/// satoshi at a time to the earliest shares.
pub fn apportion_equal(n: usize, value: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let base = value / n as u64;
    let rem = (value % n as u64) as usize;
    (0..n).map(|i| base + u64::from(i < rem)).collect()
}

/// Counters reported alongside the built graph.
#[derive(Debug, Default, Clone, Copy)]
pub struct BuildStats {
    pub transfers_added: u64,
    pub self_loops_dropped: u64,
    pub self_loop_weight_dropped: u64,
    pub coinbase_records: u64,
    pub window_excluded: u64,
}

/// Builds the transaction graph from parsed records.
///
/// Addresses are first mapped through `clusters` when given, inputs that
/// land on the same node merge (values summed) before apportionment, and
/// every address seen in a surviving record becomes a node even without
/// incident edges, so coinbase outputs are valid zero-in-degree sources.
/// The optional `window` is an inclusive timestamp range applied before
/// edge creation; callers that also cluster should filter records before
/// building the cluster map so both see the same window.
pub fn build_graph(
    records: &[TransactionRecord],
    clusters: Option<&ClusterMap>,
    window: Option<(i64, i64)>,
    pairing: PairingRule,
) -> (TxGraph, BuildStats) {
    let mut builder = GraphBuilder::new();
    let mut stats = BuildStats::default();

    let in_window = |r: &TransactionRecord| match window {
        None => true,
        Some((s, e)) => r.timestamp.is_some_and(|t| t >= s && t <= e),
    };

    let mut merged: Vec<(String, u64)> = Vec::new();
    let mut position: HashMap<String, usize> = HashMap::new();
    for record in records {
        if !in_window(record) {
            stats.window_excluded += 1;
            continue;
        }

        merged.clear();
        position.clear();
        for entry in &record.inputs {
            let node = match clusters {
                Some(c) => c.representative(&entry.address),
                None => entry.address.as_str(),
            };
            match position.get(node) {
                Some(&i) => merged[i].1 += entry.value,
                None => {
                    position.insert(node.to_string(), merged.len());
                    merged.push((node.to_string(), entry.value));
                }
            }
        }

        for (label, _) in &merged {
            builder.ensure_node(label);
        }
        for entry in &record.outputs {
            let node = match clusters {
                Some(c) => c.representative(&entry.address),
                None => entry.address.as_str(),
            };
            builder.ensure_node(node);
        }

        if merged.is_empty() {
            stats.coinbase_records += 1;
            continue;
        }

        let input_values: Vec<u64> = merged.iter().map(|&(_, v)| v).collect();
        for entry in &record.outputs {
            let dst = match clusters {
                Some(c) => c.representative(&entry.address),
                None => entry.address.as_str(),
            };
            let shares = match pairing {
                PairingRule::Proportional => apportion_proportional(&input_values, entry.value),
                PairingRule::FullMeshEqual => apportion_equal(input_values.len(), entry.value),
            };
            for ((src, _), share) in merged.iter().zip(shares) {
                if share > 0 {
                    builder.add_transfer(src, dst, share);
                    stats.transfers_added += 1;
                }
            }
        }
    }

    stats.self_loops_dropped = builder.self_loops_dropped();
    stats.self_loop_weight_dropped = builder.self_loop_weight_dropped();
    (builder.finalize(), stats)
}
