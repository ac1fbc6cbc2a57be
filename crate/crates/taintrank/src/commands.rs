//! Implementations behind the command-line subcommands.
//!
//! Each `run_*` function takes a plain config struct, writes its output
//! files into the configured directory, and returns a serializable summary
//! for the caller to print. Config structs double as clap argument groups
//! and as the manifest payload, so a run directory always records the
//! exact arguments that produced it. Output bytes depend only on the
//! config and the input files, never on wall-clock time.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{
    self, average_degree, degree_distribution, knee_point, score_histogram, top_k_rows,
    HistogramScale,
};
use crate::cluster::cluster_inputs;
use crate::graph::{
    read_edgelist_files, write_edgelist_files, EdgelistError, GraphError, NodeId, TxGraph,
    ValueMode,
};
use crate::ingest::{self, IngestError, PairingRule, ParseOptions, ValueUnit};
use crate::scenario::{self, ScenarioError};
use crate::taint::{self, CombineMode, ScoreFileError, TaintMethod, TaintScores};

pub const EDGES_FILE: &str = "edges.tsv";
pub const LABELS_FILE: &str = "labels.tsv";
pub const TRUTH_FILE: &str = "truth.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DEGREE_FILE: &str = "degree.csv";
pub const TOP_K_FILE: &str = "top_k.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";

/// Name of the score file a method writes, e.g. `scores_weight_out.tsv`.
pub fn score_file_name(method: TaintMethod) -> String {
    format!("scores_{}.tsv", method.id())
}

/// Command failures, partitioned by exit code: 1 for I/O problems, 2 for
/// malformed input data, 3 for configuration errors.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    BadConfig(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Io(_) => 1,
            CommandError::Malformed(_) => 2,
            CommandError::BadConfig(_) => 3,
        }
    }
}

impl From<IngestError> for CommandError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(e) => CommandError::Io(e.to_string()),
            e @ IngestError::Malformed { .. } => CommandError::Malformed(e.to_string()),
        }
    }
}

impl From<EdgelistError> for CommandError {
    fn from(e: EdgelistError) -> Self {
        match e {
            EdgelistError::Io(e) => CommandError::Io(e.to_string()),
            e @ EdgelistError::Parse { .. } => CommandError::Malformed(e.to_string()),
            EdgelistError::Graph(e) => CommandError::Malformed(e.to_string()),
        }
    }
}

impl From<ScoreFileError> for CommandError {
    fn from(e: ScoreFileError) -> Self {
        match e {
            ScoreFileError::Io(e) => CommandError::Io(e.to_string()),
            e @ ScoreFileError::Parse { .. } => CommandError::Malformed(e.to_string()),
            ScoreFileError::Graph(e) => CommandError::Malformed(e.to_string()),
        }
    }
}

impl From<ScenarioError> for CommandError {
    fn from(e: ScenarioError) -> Self {
        CommandError::BadConfig(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CommandError {
    CommandError::Io(format!("{}: {e}", path.display()))
}

fn open_reader(path: &Path) -> Result<BufReader<File>, CommandError> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(path, e))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, CommandError> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn finish_writer(path: &Path, mut w: BufWriter<File>) -> Result<(), CommandError> {
    w.flush().map_err(|e| io_err(path, e))
}

/// Writes `manifest.json` into `dir`: the command name plus a verbatim
/// echo of the config, compact JSON on a single line.
pub fn write_manifest<C: Serialize>(dir: &Path, command: &str, config: &C) -> Result<(), CommandError> {
    #[derive(Serialize)]
    struct Manifest<'a, C> {
        command: &'a str,
        config: &'a C,
    }
    let mut body = serde_json::to_string(&Manifest { command, config })
        .map_err(|e| CommandError::Io(e.to_string()))?;
    body.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, body).map_err(|e| io_err(&path, e))
}

/// Builds a transaction graph from a file of JSON transfer records and
/// writes the edge list, label table, and manifest.
#[derive(Debug, Clone, Args, Serialize)]
pub struct IngestConfig {
    /// Input file: one JSON transaction record per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Directory for edges.tsv, labels.tsv, and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Unit of the record value fields.
    #[arg(long, value_enum, default_value_t = ValueUnit::Satoshi)]
    pub unit: ValueUnit,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Merge addresses that ever co-spend as inputs into one node.
    #[arg(long)]
    pub cluster: bool,
    /// How each output's value is routed across the inputs.
    #[arg(long, value_enum, default_value_t = PairingRule::Proportional)]
    pub pairing: PairingRule,
    /// Keep only records with timestamps at or after this value.
    #[arg(long)]
    pub window_start: Option<i64>,
    /// Keep only records with timestamps at or before this value.
    #[arg(long)]
    pub window_end: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct IngestSummary {
    pub command: &'static str,
    pub records: usize,
    pub skipped_lines: usize,
    pub zero_entries_dropped: u64,
    pub window_excluded: usize,
    pub coinbase_records: u64,
    pub nodes: usize,
    pub links: usize,
    pub average_degree: Option<f64>,
    pub self_loops_dropped: u64,
    pub clusters: Option<usize>,
}

pub fn run_ingest(cfg: &IngestConfig) -> Result<IngestSummary, CommandError> {
    let reader = open_reader(&cfg.input)?;
    let opts = ParseOptions { unit: cfg.unit, strict: cfg.strict };
    let parsed = ingest::parse_records(reader, &opts)?;
    for bad in &parsed.skipped {
        eprintln!("warning: skipped line {}: {}", bad.line, bad.reason);
    }

    // Window first, then cluster, so co-spend evidence outside the window
    // cannot merge addresses inside it.
    let (records, window_excluded) =
        ingest::filter_window(parsed.records, cfg.window_start, cfg.window_end);
    let clusters = if cfg.cluster { Some(cluster_inputs(&records)) } else { None };
    let (graph, stats) = ingest::build_graph(&records, clusters.as_ref(), None, cfg.pairing);

    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    write_edgelist_files(&graph, &cfg.out_dir.join(EDGES_FILE), &cfg.out_dir.join(LABELS_FILE))
        .map_err(|e| CommandError::Io(e.to_string()))?;
    write_manifest(&cfg.out_dir, "ingest", cfg)?;

    Ok(IngestSummary {
        command: "ingest",
        records: records.len(),
        skipped_lines: parsed.skipped.len(),
        zero_entries_dropped: parsed.zero_entries_dropped,
        window_excluded,
        coinbase_records: stats.coinbase_records,
        nodes: graph.node_count(),
        links: graph.edge_count(),
        average_degree: average_degree(graph.node_count(), graph.edge_count()),
        self_loops_dropped: stats.self_loops_dropped,
        clusters: clusters.map(|c| c.cluster_count()),
    })
}

/// Method selector exposed on the command line; `all` expands to every
/// propagation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    Fixed,
    WeightIn,
    WeightOut,
    Distance,
    CombinedAvg,
    CombinedMax,
    PagerankLike,
    All,
}

impl MethodArg {
    pub fn methods(self) -> Vec<TaintMethod> {
        match self {
            MethodArg::Fixed => vec![TaintMethod::Fixed],
            MethodArg::WeightIn => vec![TaintMethod::WeightIn],
            MethodArg::WeightOut => vec![TaintMethod::WeightOut],
            MethodArg::Distance => vec![TaintMethod::Distance],
            MethodArg::CombinedAvg => vec![TaintMethod::CombinedAvg],
            MethodArg::CombinedMax => vec![TaintMethod::CombinedMax],
            MethodArg::PagerankLike => vec![TaintMethod::PagerankLike],
            MethodArg::All => TaintMethod::ALL.to_vec(),
        }
    }
}

/// Runs one propagation method by its identifier. `sweeps` applies to the
/// sweep-based methods and `iterations` to the degree-ratio method; the
/// irrelevant knob is ignored.
pub fn run_method(
    g: &TxGraph,
    root: NodeId,
    method: TaintMethod,
    sweeps: u32,
    iterations: u32,
) -> Result<TaintScores, GraphError> {
    match method {
        TaintMethod::Fixed => taint::taint_fixed(g, root),
        TaintMethod::WeightIn => taint::taint_weight(g, root, ValueMode::In, sweeps),
        TaintMethod::WeightOut => taint::taint_weight(g, root, ValueMode::Out, sweeps),
        TaintMethod::Distance => taint::taint_distance(g, root, sweeps),
        TaintMethod::CombinedAvg => taint::taint_combined(g, root, CombineMode::Average, sweeps),
        TaintMethod::CombinedMax => taint::taint_combined(g, root, CombineMode::Max, sweeps),
        TaintMethod::PagerankLike => {
            let labels = taint::label_tainted_edges(g, root)?;
            taint::taint_pagerank(g, &labels, iterations)
        }
    }
}

/// Scores every node of a stored graph from a chosen root and writes one
/// score file per requested method.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TaintConfig {
    /// Edge list file (src, dst, weight, tx_count; tab-separated).
    #[arg(long)]
    pub edges: PathBuf,
    /// Node label file matching the edge list.
    #[arg(long)]
    pub labels: PathBuf,
    /// Label of the node taint starts from.
    #[arg(long)]
    pub root: String,
    /// Propagation method, or `all` for one score file per method.
    #[arg(long, value_enum, default_value_t = MethodArg::WeightOut)]
    pub method: MethodArg,
    /// Full passes over the reachable set for the sweep methods.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub sweeps: u32,
    /// Update rounds for the degree-ratio method.
    #[arg(long, default_value_t = 1)]
    pub iterations: u32,
    /// Directory for scores_<method>.tsv files and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Note recorded in score-file headers, typically the pairing rule the
    /// graph was built with.
    #[arg(long, default_value = "unspecified")]
    pub pairing: String,
}

#[derive(Debug, Serialize)]
pub struct MethodOutput {
    pub method: &'static str,
    pub file: String,
    pub reachable: usize,
}

#[derive(Debug, Serialize)]
pub struct TaintSummary {
    pub command: &'static str,
    pub root: String,
    pub nodes: usize,
    pub links: usize,
    pub outputs: Vec<MethodOutput>,
}

pub fn run_taint(cfg: &TaintConfig) -> Result<TaintSummary, CommandError> {
    if cfg.sweeps == 0 {
        return Err(CommandError::BadConfig("sweeps must be at least 1".to_string()));
    }
    let graph = read_edgelist_files(&cfg.edges, &cfg.labels)?;
    let root = graph
        .node_id(&cfg.root)
        .ok_or_else(|| CommandError::BadConfig(format!("unknown root label {:?}", cfg.root)))?;

    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    let mut outputs = Vec::new();
    for method in cfg.method.methods() {
        let scores = run_method(&graph, root, method, cfg.sweeps, cfg.iterations)
            .map_err(|e| CommandError::BadConfig(e.to_string()))?;
        let name = score_file_name(method);
        let path = cfg.out_dir.join(&name);
        let mut w = create_writer(&path)?;
        taint::write_score_file(&mut w, &graph, &scores, &cfg.pairing)?;
        finish_writer(&path, w)?;
        outputs.push(MethodOutput {
            method: method.id(),
            file: name,
            reachable: scores.reachable_count(),
        });
    }
    write_manifest(&cfg.out_dir, "taint", cfg)?;

    Ok(TaintSummary {
        command: "taint",
        root: cfg.root.clone(),
        nodes: graph.node_count(),
        links: graph.edge_count(),
        outputs,
    })
}

/// Produces CSV reports from a score file and/or a stored graph.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportConfig {
    /// Score file to summarize (enables top_k.csv and histogram.csv).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Edge list file; with --labels, enables degree.csv.
    #[arg(long, requires = "labels")]
    pub edges: Option<PathBuf>,
    /// Node label file matching the edge list.
    #[arg(long, requires = "edges")]
    pub labels: Option<PathBuf>,
    /// Rows in top_k.csv.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Bins in histogram.csv.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    /// Histogram bin spacing.
    #[arg(long, value_enum, default_value_t = HistogramScale::Log)]
    pub scale: HistogramScale,
    /// Directory for the CSV reports and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct ReportSummary {
    pub command: &'static str,
    pub files: Vec<&'static str>,
    pub method: Option<String>,
    pub root: Option<String>,
    pub score_rows: Option<usize>,
    pub knee_rank: Option<usize>,
    pub nodes: Option<usize>,
    pub links: Option<usize>,
}

pub fn run_report(cfg: &ReportConfig) -> Result<ReportSummary, CommandError> {
    if cfg.scores.is_none() && cfg.edges.is_none() {
        return Err(CommandError::BadConfig(
            "nothing to report: pass --scores and/or --edges with --labels".to_string(),
        ));
    }
    if cfg.edges.is_some() != cfg.labels.is_some() {
        return Err(CommandError::BadConfig(
            "--edges and --labels must be given together".to_string(),
        ));
    }

    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    let mut summary = ReportSummary {
        command: "report",
        files: Vec::new(),
        method: None,
        root: None,
        score_rows: None,
        knee_rank: None,
        nodes: None,
        links: None,
    };

    if let (Some(edges), Some(labels)) = (&cfg.edges, &cfg.labels) {
        let graph = read_edgelist_files(edges, labels)?;
        let stats = degree_distribution(&graph);
        let path = cfg.out_dir.join(DEGREE_FILE);
        let mut w = create_writer(&path)?;
        analysis::write_degree_csv(&stats, &mut w).map_err(|e| io_err(&path, e))?;
        finish_writer(&path, w)?;
        summary.files.push(DEGREE_FILE);
        summary.nodes = Some(graph.node_count());
        summary.links = Some(graph.edge_count());
    }

    if let Some(scores) = &cfg.scores {
        let reader = open_reader(scores)?;
        let (meta, rows) = taint::read_score_file(reader)?;
        let values: Vec<f64> = rows.iter().map(|r| r.score).collect();

        let hist = score_histogram(&values, cfg.scale, cfg.bins)
            .map_err(|e| CommandError::BadConfig(e.to_string()))?;
        let path = cfg.out_dir.join(HISTOGRAM_FILE);
        let mut w = create_writer(&path)?;
        analysis::write_histogram_csv(&hist, &mut w).map_err(|e| io_err(&path, e))?;
        finish_writer(&path, w)?;
        summary.files.push(HISTOGRAM_FILE);

        let top = top_k_rows(rows.clone(), cfg.top);
        let path = cfg.out_dir.join(TOP_K_FILE);
        let mut w = create_writer(&path)?;
        analysis::write_top_k_csv(&top, &mut w).map_err(|e| io_err(&path, e))?;
        finish_writer(&path, w)?;
        summary.files.push(TOP_K_FILE);

        summary.method = Some(meta.method);
        summary.root = Some(meta.root_label);
        summary.score_rows = Some(rows.len());
        summary.knee_rank = knee_point(&values);
    }

    write_manifest(&cfg.out_dir, "report", cfg)?;
    Ok(summary)
}

/// Generates a synthetic pattern with known ground truth and writes it in
/// the same format `ingest` produces, plus the truth table.
#[derive(Debug, Clone, Args, Serialize)]
pub struct ScenarioConfig {
    /// TOML file describing the pattern to generate.
    #[arg(long)]
    pub spec: PathBuf,
    /// Overrides the seed in the spec file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for edges.tsv, labels.tsv, truth.tsv, and manifest.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct ScenarioSummary {
    pub command: &'static str,
    pub kind: &'static str,
    pub seed: u64,
    pub root: String,
    pub nodes: usize,
    pub links: usize,
    pub truth_nodes: usize,
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioSummary, CommandError> {
    let text = fs::read_to_string(&cfg.spec).map_err(|e| io_err(&cfg.spec, e))?;
    let mut spec = scenario::parse_spec(&text)?;
    if let Some(seed) = cfg.seed {
        spec.set_seed(seed);
    }
    let s = scenario::generate(&spec)?;

    fs::create_dir_all(&cfg.out_dir).map_err(|e| io_err(&cfg.out_dir, e))?;
    write_edgelist_files(&s.graph, &cfg.out_dir.join(EDGES_FILE), &cfg.out_dir.join(LABELS_FILE))
        .map_err(|e| CommandError::Io(e.to_string()))?;

    let path = cfg.out_dir.join(TRUTH_FILE);
    let mut w = create_writer(&path)?;
    for &n in &s.ground_truth {
        writeln!(w, "{}\t{}", n.raw(), s.graph.label(n).unwrap()).map_err(|e| io_err(&path, e))?;
    }
    finish_writer(&path, w)?;
    write_manifest(&cfg.out_dir, "scenario", cfg)?;

    Ok(ScenarioSummary {
        command: "scenario",
        kind: spec.kind_name(),
        seed: spec.seed(),
        root: s.graph.label(s.root).unwrap().to_string(),
        nodes: s.graph.node_count(),
        links: s.graph.edge_count(),
        truth_nodes: s.ground_truth.len(),
    })
}
