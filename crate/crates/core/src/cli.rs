//! Command-line front end. `run` parses arguments, executes a subcommand and
//! returns the process exit code: 0 on success, 2 for usage or input errors,
//! 1 for internal failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::warn;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::baselines::{
    average_degree, aw_ncut_uniform_with, conductance, cut_ratio, flake_odf, modularity, Partition,
    UniformEdgeWeights,
};
use crate::error::AmenError;
use crate::eval::{
    analyze_distributions, default_grid, planted_focus_graph, run_experiment, AnalysisTables, Distribution,
    EvalReport, Method, PerturbationConfig, PerturbationMode, SyntheticConfig,
};
use crate::focus::{rank_neighborhoods, FocusNorm};
use crate::graph::{
    boundary_of, load_graph_files, read_neighborhood_file, AttributeFormat, AttributedGraph, IngestOptions,
    NeighborhoodDef, NodeId,
};
use crate::normality::{relevance_vector, AttributeRelevance, SimilarityKind};

#[derive(Parser, Debug, Serialize)]
#[command(name = "amen", version, about = "Score attributed-graph neighborhoods by normality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Rank neighborhoods from most to least anomalous.
    Rank(RankArgs),
    /// Show the relevance vector of each neighborhood.
    Focus(FocusArgs),
    /// Run a perturbation experiment and report average precision.
    Eval(EvalArgs),
    /// Distributional summaries of relevance and normality.
    Analyze(AnalyzeArgs),
    /// Classic community quality scores per neighborhood.
    Baselines(BaselinesArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttrsFormatArg {
    Sparse,
    DenseCsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityArg {
    Dot,
    Delta,
    BinaryMixed,
}

impl From<SimilarityArg> for SimilarityKind {
    fn from(s: SimilarityArg) -> Self {
        match s {
            SimilarityArg::Dot => SimilarityKind::Dot,
            SimilarityArg::Delta => SimilarityKind::Delta,
            SimilarityArg::BinaryMixed => SimilarityKind::BinaryMixed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    L1,
    L2,
    Topk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Structure,
    Attribute,
    Both,
}

impl From<ModeArg> for PerturbationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Structure => PerturbationMode::Structure,
            ModeArg::Attribute => PerturbationMode::Attribute,
            ModeArg::Both => PerturbationMode::Both,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

/// Significant digits, or `None` for shortest round-trip output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Precision(pub Option<usize>);

fn parse_precision(s: &str) -> Result<Precision, String> {
    if s == "full" {
        return Ok(Precision(None));
    }
    match s.parse::<usize>() {
        Ok(n) if (1..=17).contains(&n) => Ok(Precision(Some(n))),
        _ => Err(format!("expected `full` or an integer in 1..=17, got `{s}`")),
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GraphInput {
    /// Edge list: one `u v` pair per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Attribute file.
    #[arg(long)]
    pub attrs: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sparse")]
    pub attrs_format: AttrsFormatArg,
    /// Keep attribute columns already in [0, 1] unscaled.
    #[arg(long)]
    pub no_rescale: bool,
    /// Accept attribute rows for nodes absent from the edge list.
    #[arg(long)]
    pub allow_isolated: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct NeighborhoodInput {
    /// Circles file: `id member member ...` per line. Takes precedence over --egonets.
    #[arg(long)]
    pub neighborhoods: Option<PathBuf>,
    /// Use the egonet of every node.
    #[arg(long)]
    pub egonets: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Significant digits for numbers, or `full`.
    #[arg(long, default_value = "6", value_parser = parse_precision)]
    pub precision: Precision,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub nbhd: NeighborhoodInput,
    #[arg(long, value_enum, default_value = "l2")]
    pub norm: NormArg,
    /// Number of attributes for --norm topk.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "dot")]
    pub similarity: SimilarityArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct FocusArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub nbhd: NeighborhoodInput,
    #[arg(long, value_enum, default_value = "dot")]
    pub similarity: SimilarityArg,
    /// Keep only the N largest entries per neighborhood.
    #[arg(long)]
    pub top: Option<usize>,
    /// Also list attributes no member exhibits.
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SyntheticArgs {
    /// Generate a planted-focus graph instead of reading files.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 100)]
    pub communities: usize,
    #[arg(long, default_value_t = 30)]
    pub community_min: usize,
    #[arg(long, default_value_t = 100)]
    pub community_max: usize,
    #[arg(long, default_value_t = SyntheticConfig::default().p_in_min)]
    pub p_in_min: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().p_in_max)]
    pub p_in_max: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().inter_degree)]
    pub inter_degree: f64,
    #[arg(long, default_value_t = SyntheticConfig::default().noise)]
    pub noise: f64,
    #[arg(long, default_value_t = 3)]
    pub focus_min: usize,
    #[arg(long, default_value_t = 5)]
    pub focus_max: usize,
    #[arg(long, default_value_t = SyntheticConfig::default().background)]
    pub background: usize,
    #[arg(long, default_value_t = SyntheticConfig::default().background_prob)]
    pub background_prob: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub nbhd: NeighborhoodInput,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    #[arg(long, value_enum, default_value = "attribute")]
    pub mode: ModeArg,
    /// Intensities: `start:stop:step` or a comma list.
    #[arg(long, default_value = "0.05:0.50:0.05")]
    pub grid: String,
    #[arg(long, env = "AMEN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub anomaly_frac: f64,
    #[arg(long, default_value_t = 30)]
    pub size_min: usize,
    #[arg(long, default_value_t = 100)]
    pub size_max: usize,
    /// Comma-separated methods; all when omitted.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long, value_enum, default_value = "dot")]
    pub similarity: SimilarityArg,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub nbhd: NeighborhoodInput,
    #[arg(long, value_enum, default_value = "dot")]
    pub similarity: SimilarityArg,
    /// With CSV, a directory receiving one file per table.
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct BaselinesArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub nbhd: NeighborhoodInput,
    /// Similarity used for aw_ncut edge weights.
    #[arg(long, value_enum, default_value = "dot")]
    pub similarity: SimilarityArg,
    /// `node community` lines; adds the partition's modularity as a column.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(AmenError),
    Internal(String),
}

impl From<AmenError> for CliError {
    fn from(e: AmenError) -> Self {
        if e.is_input_error() {
            CliError::Input(e)
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    command: &'static str,
    argv: Vec<String>,
    flags: &'a Cli,
    inputs: Vec<InputDigest>,
    seed: Option<u64>,
    version: &'static str,
    wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    method_runtimes_seconds: Option<Value>,
}

/// Inputs read so far, with their digests.
#[derive(Default)]
struct Ctx {
    inputs: Vec<InputDigest>,
    extra: Option<Value>,
}

impl Ctx {
    fn digest(&mut self, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path).map_err(|source| AmenError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        Ok(())
    }
}

/// Format a number for output. Rounds to `precision` significant digits,
/// trimming trailing zeros; `None` keeps the shortest round-trip form.
pub fn format_number(v: f64, precision: Precision) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let Some(sig) = precision.0 else {
        return v.to_string();
    };
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&exp) {
        return format!("{:.*e}", sig - 1, v);
    }
    let decimals = sig as i32 - 1 - exp;
    let s = if decimals >= 0 {
        format!("{v:.*}", decimals as usize)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (v / scale).round() * scale)
    };
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

/// Rounded value as a JSON number, `null` when not finite.
fn json_number(v: f64, precision: Precision) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format_number(v, precision).parse().expect("formatted number parses");
    json!(rounded)
}

fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("invalid --grid `{text}`: use start:stop:step or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect()
    } else {
        text.split(',').map(num).collect::<CliResult<Vec<f64>>>()?
    };
    if grid.is_empty() || grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Usage(format!("--grid `{text}` must list intensities in [0, 1]")));
    }
    Ok(grid)
}

fn load_input(input: &GraphInput, ctx: &mut Ctx) -> CliResult<AttributedGraph> {
    let (Some(graph), Some(attrs)) = (&input.graph, &input.attrs) else {
        return Err(CliError::Usage("--graph and --attrs are required".into()));
    };
    ctx.digest(graph)?;
    ctx.digest(attrs)?;
    let options = IngestOptions {
        attribute_format: match input.attrs_format {
            AttrsFormatArg::Sparse => AttributeFormat::Sparse,
            AttrsFormatArg::DenseCsv => AttributeFormat::DenseCsv,
        },
        allow_isolated: input.allow_isolated,
        no_rescale: input.no_rescale,
    };
    let (g, report) = load_graph_files(graph, attrs, &options)?;
    if report.self_loops_dropped > 0 {
        warn!("dropped {} self-loops", report.self_loops_dropped);
    }
    if report.duplicate_edges > 0 {
        warn!("ignored {} duplicate edges", report.duplicate_edges);
    }
    Ok(g)
}

/// Every node's egonet, id = the ego's label.
pub fn egonet_definitions(graph: &AttributedGraph) -> Vec<NeighborhoodDef> {
    (0..graph.node_count() as NodeId)
        .map(|ego| {
            let mut members = vec![ego];
            members.extend_from_slice(graph.neighbors(ego));
            NeighborhoodDef::new(graph.node_label(ego), members)
        })
        .collect()
}

fn load_neighborhoods(
    nbhd: &NeighborhoodInput,
    graph: &AttributedGraph,
    ctx: &mut Ctx,
) -> CliResult<Vec<NeighborhoodDef>> {
    match (&nbhd.neighborhoods, nbhd.egonets) {
        (Some(path), egonets) => {
            if egonets {
                warn!("--neighborhoods given; ignoring --egonets");
            }
            ctx.digest(path)?;
            Ok(read_neighborhood_file(path, graph)?)
        }
        (None, true) => Ok(egonet_definitions(graph)),
        (None, false) => Err(CliError::Usage("one of --neighborhoods FILE or --egonets is required".into())),
    }
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(internal)?;
    for r in rows {
        w.write_record(r).map_err(internal)?;
    }
    String::from_utf8(w.into_inner().map_err(internal)?).map_err(internal)
}

fn json_string(v: &Value) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: &OutputArgs, body: &str) -> CliResult<()> {
    match &out.output {
        Some(path) => fs::write(path, body).map_err(|e| internal(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(internal),
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(internal)?;
    Ok(pool.install(f))
}

fn cmd_rank(args: &RankArgs, ctx: &mut Ctx) -> CliResult<()> {
    let norm = match (args.norm, args.k) {
        (NormArg::L1, _) => FocusNorm::L1,
        (NormArg::L2, _) => FocusNorm::L2,
        (NormArg::Topk, Some(k)) => FocusNorm::TopK(k),
        (NormArg::Topk, None) => return Err(CliError::Usage("--norm topk requires --k".into())),
    };
    let graph = load_input(&args.input, ctx)?;
    // Catches k = 0 or k > d here, before per-row errors would hide it.
    if let FocusNorm::TopK(k) = norm {
        if k == 0 || k > graph.attribute_count() {
            return Err(AmenError::InvalidTopK {
                k,
                d: graph.attribute_count(),
            }
            .into());
        }
    }
    let defs = load_neighborhoods(&args.nbhd, &graph, ctx)?;
    let ranked = with_pool(args.out.jobs, || {
        rank_neighborhoods(&graph, &defs, args.similarity.into(), norm)
    })?;
    let p = args.out.precision;
    let body = match args.out.format {
        FormatArg::Csv => {
            let rows: Vec<Vec<String>> = ranked
                .iter()
                .map(|r| match &r.result {
                    Ok(f) => vec![
                        r.id.clone(),
                        r.size.to_string(),
                        r.boundary_size.to_string(),
                        format_number(f.score, p),
                        f.anomalous.to_string(),
                        f.weights.iter().map(|&(a, _)| graph.attribute_name(a)).collect::<Vec<_>>().join(";"),
                        f.weights.iter().map(|&(_, w)| format_number(w, p)).collect::<Vec<_>>().join(";"),
                        String::new(),
                    ],
                    Err(e) => vec![
                        r.id.clone(),
                        r.size.to_string(),
                        r.boundary_size.to_string(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        e.clone(),
                    ],
                })
                .collect();
            csv_string(
                &[
                    "neighborhood_id",
                    "size",
                    "boundary_size",
                    "normality",
                    "anomalous_flag",
                    "focus_attr_ids",
                    "focus_weights",
                    "error",
                ],
                &rows,
            )?
        }
        FormatArg::Json => {
            let rows: Vec<Value> = ranked
                .iter()
                .map(|r| {
                    let mut obj = json!({
                        "rank": r.rank,
                        "neighborhood_id": r.id,
                        "size": r.size,
                        "boundary_size": r.boundary_size,
                    });
                    match &r.result {
                        Ok(f) => {
                            obj["normality"] = json_number(f.score, p);
                            obj["anomalous"] = json!(f.anomalous);
                            obj["no_focus"] = json!(f.no_focus);
                            obj["focus"] = f
                                .weights
                                .iter()
                                .map(|&(a, w)| json!({"attribute": graph.attribute_name(a), "weight": json_number(w, p)}))
                                .collect();
                        }
                        Err(e) => obj["error"] = json!(e),
                    }
                    obj
                })
                .collect();
            json_string(&json!({ "norm": norm.name(), "similarity": SimilarityKind::from(args.similarity).name(), "neighborhoods": rows }))?
        }
    };
    emit(&args.out, &body)
}

fn cmd_focus(args: &FocusArgs, ctx: &mut Ctx) -> CliResult<()> {
    let graph = load_input(&args.input, ctx)?;
    let defs = load_neighborhoods(&args.nbhd, &graph, ctx)?;
    let sim: SimilarityKind = args.similarity.into();
    let results: Vec<Result<Vec<AttributeRelevance>, String>> = with_pool(args.out.jobs, || {
        use rayon::prelude::*;
        defs.par_iter()
            .map(|def| {
                let nb = boundary_of(&graph, &def.members).map_err(|e| e.to_string())?;
                let rv = relevance_vector(&graph, &nb, sim).map_err(|e| e.to_string())?;
                let mut entries: Vec<AttributeRelevance> = if args.all {
                    (0..graph.attribute_count() as u32).map(|f| rv.get(f)).collect()
                } else {
                    rv.entries().collect()
                };
                entries.sort_by(|a, b| b.x.total_cmp(&a.x).then(a.attr.cmp(&b.attr)));
                if let Some(top) = args.top {
                    entries.truncate(top);
                }
                Ok(entries)
            })
            .collect()
    })?;
    for (def, r) in defs.iter().zip(&results) {
        match r {
            Err(e) => warn!("{}: {e}", def.id),
            Ok(entries) if entries.iter().all(|e| !e.supported) => warn!("{}: no focus found", def.id),
            Ok(_) => {}
        }
    }
    let p = args.out.precision;
    let body = match args.out.format {
        FormatArg::Csv => {
            let mut rows = Vec::new();
            for (def, r) in defs.iter().zip(&results) {
                for e in r.iter().flatten() {
                    rows.push(vec![
                        def.id.clone(),
                        graph.attribute_name(e.attr).to_string(),
                        format_number(e.x, p),
                        format_number(e.hat_internal, p),
                        format_number(e.hat_external, p),
                        e.supported.to_string(),
                    ]);
                }
            }
            csv_string(
                &["neighborhood_id", "attribute", "x", "hat_internal", "hat_external", "supported"],
                &rows,
            )?
        }
        FormatArg::Json => {
            let items: Vec<Value> = defs
                .iter()
                .zip(&results)
                .map(|(def, r)| match r {
                    Err(e) => json!({"neighborhood_id": def.id, "status": "error", "error": e, "attributes": []}),
                    Ok(entries) => {
                        let status = if entries.iter().any(|e| e.supported) { "ok" } else { "no focus found" };
                        let attrs: Vec<Value> = entries
                            .iter()
                            .map(|e| {
                                json!({
                                    "attribute": graph.attribute_name(e.attr),
                                    "x": json_number(e.x, p),
                                    "hat_internal": json_number(e.hat_internal, p),
                                    "hat_external": json_number(e.hat_external, p),
                                    "supported": e.supported,
                                })
                            })
                            .collect();
                        json!({"neighborhood_id": def.id, "status": status, "attributes": attrs})
                    }
                })
                .collect();
            json_string(&json!({ "similarity": sim.name(), "neighborhoods": items }))?
        }
    };
    emit(&args.out, &body)
}

fn synthetic_config(s: &SyntheticArgs, seed: u64) -> SyntheticConfig {
    SyntheticConfig {
        communities: s.communities,
        size_min: s.community_min,
        size_max: s.community_max,
        p_in_min: s.p_in_min,
        p_in_max: s.p_in_max,
        inter_degree: s.inter_degree,
        focus_min: s.focus_min,
        focus_max: s.focus_max,
        noise: s.noise,
        background: s.background,
        background_prob: s.background_prob,
        seed,
    }
}

fn cmd_eval(args: &EvalArgs, ctx: &mut Ctx) -> CliResult<()> {
    let intensities = if args.grid.is_empty() { default_grid() } else { parse_grid(&args.grid)? };
    let (graph, defs) = if args.synthetic.synthetic {
        let planted = planted_focus_graph(&synthetic_config(&args.synthetic, args.seed))?;
        (planted.graph, planted.communities)
    } else {
        let graph = load_input(&args.input, ctx)?;
        let defs = load_neighborhoods(&args.nbhd, &graph, ctx)?;
        (graph, defs)
    };
    let config = PerturbationConfig {
        mode: args.mode.into(),
        intensities,
        anomaly_fraction: args.anomaly_frac,
        size_min: args.size_min,
        size_max: args.size_max,
        seed: args.seed,
        similarity: args.similarity.into(),
    };
    let methods = if args.methods.is_empty() { Method::ALL.to_vec() } else { args.methods.clone() };
    let report = with_pool(args.out.jobs, || run_experiment(&graph, &defs, &config, &methods))??;
    ctx.extra = Some(
        report
            .runtimes
            .iter()
            .map(|(m, secs)| (m.name().to_string(), json!(secs)))
            .collect::<serde_json::Map<_, _>>()
            .into(),
    );
    let body = render_eval(&report, args.out.format, args.out.precision)?;
    emit(&args.out, &body)
}

fn render_eval(report: &EvalReport, format: FormatArg, p: Precision) -> CliResult<String> {
    match format {
        FormatArg::Csv => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.method.name().to_string(),
                        r.mode.name().to_string(),
                        format_number(r.intensity, Precision(None)),
                        format_number(r.ap, p),
                        r.seed.to_string(),
                    ]
                })
                .collect();
            csv_string(&["method", "mode", "intensity", "ap", "seed"], &rows)
        }
        FormatArg::Json => {
            let mut v = serde_json::to_value(report).map_err(internal)?;
            for row in v["rows"].as_array_mut().expect("rows array") {
                let ap = row["ap"].as_f64().unwrap_or(f64::NAN);
                row["ap"] = json_number(ap, p);
            }
            json_string(&v)
        }
    }
}

fn distribution_rows(d: &Distribution, p: Precision) -> Vec<Vec<String>> {
    d.points
        .iter()
        .map(|&(v, prob)| vec![format_number(v, p), format_number(prob, p)])
        .collect()
}

/// The four analysis tables as `(file name, csv)` pairs.
fn analysis_csvs(t: &AnalysisTables, p: Precision) -> CliResult<Vec<(&'static str, String)>> {
    let mut normality = Vec::new();
    for (name, d) in [("l1", &t.normality_l1_ccdf), ("l2", &t.normality_l2_ccdf)] {
        for row in distribution_rows(d, p) {
            normality.push(vec![name.to_string(), row[0].clone(), row[1].clone()]);
        }
    }
    let kth: Vec<Vec<String>> = t
        .kth_positive
        .iter()
        .map(|r| vec![r.k.to_string(), format_number(r.mean_x, p), r.neighborhoods.to_string()])
        .collect();
    Ok(vec![
        (
            "positive_count_cdf.csv",
            csv_string(&["positive_count", "cdf"], &distribution_rows(&t.positive_count_cdf, p))?,
        ),
        (
            "l1_support_ccdf.csv",
            csv_string(&["l1_support_fraction", "ccdf"], &distribution_rows(&t.l1_support_ccdf, p))?,
        ),
        ("normality_ccdf.csv", csv_string(&["norm", "normality", "ccdf"], &normality)?),
        ("kth_positive.csv", csv_string(&["k", "mean_x", "neighborhoods"], &kth)?),
    ])
}

fn cmd_analyze(args: &AnalyzeArgs, ctx: &mut Ctx) -> CliResult<()> {
    let graph = load_input(&args.input, ctx)?;
    let defs = load_neighborhoods(&args.nbhd, &graph, ctx)?;
    let tables = with_pool(args.out.jobs, || analyze_distributions(&graph, &defs, args.similarity.into()))?;
    let p = args.out.precision;
    match args.out.format {
        FormatArg::Json => {
            let dist = |d: &Distribution| -> Value {
                d.points
                    .iter()
                    .map(|&(v, q)| json!([json_number(v, p), json_number(q, p)]))
                    .collect()
            };
            let v = json!({
                "analyzed": tables.analyzed,
                "skipped": tables.skipped,
                "positive_count_cdf": dist(&tables.positive_count_cdf),
                "l1_support_ccdf": dist(&tables.l1_support_ccdf),
                "normality_l1_ccdf": dist(&tables.normality_l1_ccdf),
                "normality_l2_ccdf": dist(&tables.normality_l2_ccdf),
                "kth_positive": tables.kth_positive.iter().map(|r| json!({
                    "k": r.k, "mean_x": json_number(r.mean_x, p), "neighborhoods": r.neighborhoods
                })).collect::<Vec<_>>(),
            });
            emit(&args.out, &json_string(&v)?)
        }
        FormatArg::Csv => {
            let files = analysis_csvs(&tables, p)?;
            match &args.out.output {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(|e| internal(format!("{}: {e}", dir.display())))?;
                    for (name, body) in files {
                        let path = dir.join(name);
                        fs::write(&path, body).map_err(|e| internal(format!("{}: {e}", path.display())))?;
                    }
                    Ok(())
                }
                None => {
                    let mut all = String::new();
                    for (i, (name, body)) in files.iter().enumerate() {
                        if i > 0 {
                            all.push('\n');
                        }
                        let _ = writeln!(all, "# {}", name.trim_end_matches(".csv"));
                        all.push_str(body);
                    }
                    std::io::stdout().write_all(all.as_bytes()).map_err(internal)
                }
            }
        }
    }
}

fn read_partition(path: &Path, graph: &AttributedGraph, ctx: &mut Ctx) -> CliResult<Partition> {
    ctx.digest(path)?;
    let src = fs::read_to_string(path).map_err(|source| AmenError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path.display().to_string();
    let mut labels: std::collections::HashMap<String, usize> = Default::default();
    let mut assignment = vec![None; graph.node_count()];
    for (i, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()).collect();
        let parse_err = |m: String| CliError::Input(AmenError::Parse { source_name: name.clone(), line: i + 1, message: m });
        if toks.len() != 2 {
            return Err(parse_err("expected `node community`".into()));
        }
        let node = graph
            .node_index(toks[0])
            .ok_or_else(|| parse_err(format!("unknown node `{}`", toks[0])))?;
        let next = labels.len();
        let c = *labels.entry(toks[1].to_string()).or_insert(next);
        assignment[node as usize] = Some(c);
    }
    let missing = assignment.iter().position(Option::is_none);
    if let Some(v) = missing {
        return Err(CliError::Input(AmenError::InvalidConfig(format!(
            "partition file {name} assigns no community to node `{}`",
            graph.node_label(v as NodeId)
        ))));
    }
    Ok(Partition(assignment.into_iter().map(|c| c.expect("checked")).collect()))
}

fn cmd_baselines(args: &BaselinesArgs, ctx: &mut Ctx) -> CliResult<()> {
    let graph = load_input(&args.input, ctx)?;
    let defs = load_neighborhoods(&args.nbhd, &graph, ctx)?;
    let partition_q = match &args.partition {
        Some(path) => Some(modularity(&graph, &read_partition(path, &graph, ctx)?)?),
        None => None,
    };
    let sim: SimilarityKind = args.similarity.into();
    type Cell = Result<f64, String>;
    let rows: Vec<Result<[Cell; 5], String>> = with_pool(args.out.jobs, || {
        use rayon::prelude::*;
        let weights = (graph.edge_count() > 0).then(|| UniformEdgeWeights::new(&graph, sim));
        defs.par_iter()
            .map(|def| {
                let nb = boundary_of(&graph, &def.members).map_err(|e| e.to_string())?;
                let s = |r: crate::error::Result<f64>| r.map_err(|e| e.to_string());
                Ok([
                    Ok(average_degree(&nb)),
                    s(cut_ratio(&graph, &nb)),
                    s(conductance(&graph, &nb)),
                    Ok(flake_odf(&graph, &nb)),
                    match &weights {
                        Some(w) => s(aw_ncut_uniform_with(w, &graph, &nb)),
                        None => Err(AmenError::UndefinedNullModel.to_string()),
                    },
                ])
            })
            .collect()
    })?;
    let names = ["avg_degree", "cut_ratio", "conductance", "flake_odf", "aw_ncut"];
    let p = args.out.precision;
    let errors = |r: &Result<[Cell; 5], String>| -> String {
        match r {
            Err(e) => e.clone(),
            Ok(cells) => cells
                .iter()
                .filter_map(|c| c.as_ref().err().cloned())
                .collect::<Vec<_>>()
                .join("; "),
        }
    };
    let body = match args.out.format {
        FormatArg::Csv => {
            let mut header = vec!["neighborhood_id"];
            header.extend(names);
            if partition_q.is_some() {
                header.push("partition_modularity");
            }
            header.push("error");
            let table: Vec<Vec<String>> = defs
                .iter()
                .zip(&rows)
                .map(|(def, r)| {
                    let mut row = vec![def.id.clone()];
                    for i in 0..5 {
                        row.push(match r {
                            Ok(cells) => cells[i].as_ref().map(|&v| format_number(v, p)).unwrap_or_default(),
                            Err(_) => String::new(),
                        });
                    }
                    if let Some(q) = partition_q {
                        row.push(format_number(q, p));
                    }
                    row.push(errors(r));
                    row
                })
                .collect();
            csv_string(&header, &table)?
        }
        FormatArg::Json => {
            let items: Vec<Value> = defs
                .iter()
                .zip(&rows)
                .map(|(def, r)| {
                    let mut obj = json!({"neighborhood_id": def.id});
                    for (i, n) in names.iter().enumerate() {
                        obj[*n] = match r {
                            Ok(cells) => cells[i].as_ref().map(|&v| json_number(v, p)).unwrap_or(Value::Null),
                            Err(_) => Value::Null,
                        };
                    }
                    let e = errors(r);
                    if !e.is_empty() {
                        obj["error"] = json!(e);
                    }
                    obj
                })
                .collect();
            let mut v = json!({ "similarity": sim.name(), "neighborhoods": items });
            if let Some(q) = partition_q {
                v["partition_modularity"] = json_number(q, p);
            }
            json_string(&v)?
        }
    };
    emit(&args.out, &body)
}

fn write_manifest(cli: &Cli, argv: Vec<String>, ctx: Ctx, started: Instant) -> CliResult<()> {
    let (command, seed, output) = match &cli.command {
        Command::Rank(a) => ("rank", None, &a.out.output),
        Command::Focus(a) => ("focus", None, &a.out.output),
        Command::Eval(a) => ("eval", Some(a.seed), &a.out.output),
        Command::Analyze(a) => ("analyze", None, &a.out.output),
        Command::Baselines(a) => ("baselines", None, &a.out.output),
    };
    let manifest = RunManifest {
        command,
        argv,
        flags: cli,
        inputs: ctx.inputs,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        method_runtimes_seconds: ctx.extra,
    };
    let body = serde_json::to_string_pretty(&manifest).map_err(internal)? + "\n";
    match output {
        Some(path) => {
            let mut name = path.as_os_str().to_owned();
            name.push(".manifest.json");
            fs::write(PathBuf::from(&name), body).map_err(internal)
        }
        None => std::io::stderr().write_all(body.as_bytes()).map_err(internal),
    }
}

/// Run the tool on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let started = Instant::now();
    let mut ctx = Ctx::default();
    let result = match &cli.command {
        Command::Rank(a) => cmd_rank(a, &mut ctx),
        Command::Focus(a) => cmd_focus(a, &mut ctx),
        Command::Eval(a) => cmd_eval(a, &mut ctx),
        Command::Analyze(a) => cmd_analyze(a, &mut ctx),
        Command::Baselines(a) => cmd_baselines(a, &mut ctx),
    };
    let result = result.and_then(|_| {
        let argv = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
        write_manifest(&cli, argv, ctx, started)
    });
    match result {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            2
        }
        Err(CliError::Input(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(CliError::Internal(m)) => {
            eprintln!("internal error: {m}");
            1
        }
    }
}
