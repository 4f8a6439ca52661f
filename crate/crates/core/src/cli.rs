//! The `props` command line. Every subcommand writes a JSON manifest with
//! the resolved configuration next to its outputs.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 numeric failure.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{self, Centering, WlAnalysisConfig};
use crate::augment::{augment_corpus, build_synthetic_corpus, default_synthetic_specs, MixupSpec, SynthSpec};
use crate::error::{Error, Result};
use crate::generate::GraphModel;
use crate::graph::Corpus;
use crate::invariants::verify::{connected_graphs_up_to, random_graphs, verify_graphs, ENUMERATION_LIMIT};
use crate::invariants::{self, fit_normalizer, Registry};
use crate::io::{load_corpus, save_jsonl, CorpusFormat};
use crate::linalg::Matrix;
use crate::local;
use crate::model::train::write_metrics_csv;
use crate::model::{fuse, train, EncoderModel, LossWeights, Optimizer, Readout, TrainConfig};
use crate::spectral::{positional_encoding, reconstruct_adjacency, write_encoding_text, EncodingMode};

#[derive(Debug, Parser, Serialize)]
#[command(name = "props", version, about = "Graph invariants, positional encodings and a structural encoder")]
pub struct Cli {
    /// Worker threads for per-graph work; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
enum Command {
    /// Graph-level invariants to CSV, optionally with node and pair properties.
    Compute(ComputeArgs),
    /// Compare fast invariants with brute-force oracles.
    Oracle(OracleArgs),
    /// Laplacian positional encodings as a text dump.
    Encode(EncodeArgs),
    /// Cross-domain mixup or synthetic corpus generation.
    #[command(subcommand)]
    Augment(AugmentCommand),
    /// Train the structural encoder.
    Train(TrainArgs),
    /// Graph and node embeddings from a trained model.
    Embed(EmbedArgs),
    /// Corpus-level structural analyses.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Concatenate external node features with node embeddings.
    Fuse(FuseArgs),
    /// Random graphs from one generator.
    Generate(GenerateArgs),
}

#[derive(Debug, Args, Serialize)]
struct InputArgs {
    /// JSONL file or edge-list directory.
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the path when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum FormatArg {
    Jsonl,
    EdgeListDir,
}

#[derive(Debug, Args, Serialize)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated subset of registered properties.
    #[arg(long, value_delimiter = ',')]
    properties: Vec<String>,
    #[arg(long, default_value_t = invariants::lovasz::DEFAULT_TOL)]
    lovasz_tol: f64,
    /// Also write normalization statistics `{property: {mean, std}}`.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Directory for per-graph node CSVs and pair-matrix dumps.
    #[arg(long)]
    local_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct OracleArgs {
    /// Every connected graph with at most this many nodes.
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    /// Additional random G(n, p) graphs, n in 3..=10, p in {0.2, 0.5, 0.8}.
    #[arg(long, default_value_t = 500)]
    random: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "oracle-report.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ModeArg {
    Full,
    Truncated,
}

#[derive(Debug, Args, Serialize)]
struct EncodeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Full)]
    mode: ModeArg,
    /// Column count for truncated encodings.
    #[arg(long, default_value_t = 16)]
    width: usize,
    /// Invert each full encoding and fail unless the adjacency is recovered.
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Subcommand, Serialize)]
enum AugmentCommand {
    /// Append cross-domain mixup graphs to a corpus.
    Mixup(MixupArgs),
    /// Default three-family synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ResolutionArg {
    Threshold,
    Bernoulli,
}

#[derive(Debug, Args, Serialize)]
struct MixupArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = ResolutionArg::Threshold)]
    resolution: ResolutionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    count: usize,
    #[arg(long, default_value_t = 8)]
    n_min: usize,
    #[arg(long, default_value_t = 24)]
    n_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum OptimizerArg {
    Adam,
    Sgd,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ReadoutArg {
    Mean,
    MeanAndSize,
}

#[derive(Debug, Args, Serialize)]
struct TrainArgs {
    /// Training corpus (JSONL); the default synthetic corpus when omitted.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Size of the default synthetic corpus.
    #[arg(long, default_value_t = 2000)]
    graphs: usize,
    #[arg(long)]
    out: PathBuf,
    /// Metric log; defaults to `<out>.metrics.csv`.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adam)]
    optimizer: OptimizerArg,
    #[arg(long, default_value_t = 1.0)]
    w_graph: f64,
    #[arg(long, default_value_t = 0.1)]
    w_node: f64,
    #[arg(long, default_value_t = 0.1)]
    w_pair: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    validation_fraction: f64,
    #[arg(long, default_value_t = 16)]
    d_in: usize,
    #[arg(long, default_value_t = 32)]
    d_model: usize,
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 4)]
    heads: usize,
    #[arg(long, value_enum, default_value_t = ReadoutArg::Mean)]
    readout: ReadoutArg,
    /// Comma-separated graph properties; all registered when omitted.
    #[arg(long, value_delimiter = ',')]
    properties: Vec<String>,
    /// Comma-separated node targets, or `none`.
    #[arg(long, value_delimiter = ',', default_value = "degree,closeness,betweenness")]
    node_properties: Vec<String>,
    /// Comma-separated pair targets, or `none`.
    #[arg(long, value_delimiter = ',', default_value = "shortest_path,connectivity")]
    pair_properties: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
struct EmbedArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// JSONL with `id`, `graph` and `nodes` per line.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
enum AnalyzeCommand {
    /// WL-kernel embedding similarity with in-/cross-domain block means.
    Wl(WlArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum CenteringArg {
    Rows,
    Columns,
}

#[derive(Debug, Args, Serialize)]
struct WlArgs {
    /// Corpus to analyze; three synthetic families when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Graphs per synthetic family.
    #[arg(long, default_value_t = 50)]
    per_family: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = analysis::DEFAULT_ITERATIONS)]
    iterations: usize,
    /// Fraction of kernel trace kept by the embedding.
    #[arg(long, default_value_t = analysis::DEFAULT_ENERGY)]
    energy: f64,
    #[arg(long, value_enum, default_value_t = CenteringArg::Rows)]
    centering: CenteringArg,
    /// Receives similarity.csv, summary.json, heatmap.svg and manifest.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct FuseArgs {
    #[arg(long)]
    model: PathBuf,
    /// Corpus whose `features` supply E; graphs without features use width 0.
    #[command(flatten)]
    input: InputArgs,
    /// JSONL with `id` and `fused` rows `[e_i | z_i]`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum ModelArg {
    Er,
    Ba,
    Ws,
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// ER edge probability.
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// BA edges per new node.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// WS ring degree.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// WS rewiring probability.
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // Fails harmlessly if a pool already exists in this process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numeric() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Compute(a) => compute(cli, a),
        Command::Oracle(a) => oracle(cli, a),
        Command::Encode(a) => encode(cli, a),
        Command::Augment(AugmentCommand::Mixup(a)) => mixup(cli, a),
        Command::Augment(AugmentCommand::Synth(a)) => synth(cli, a),
        Command::Train(a) => train_cmd(cli, a),
        Command::Embed(a) => embed(cli, a),
        Command::Analyze(AnalyzeCommand::Wl(a)) => analyze_wl(cli, a),
        Command::Fuse(a) => fuse_cmd(cli, a),
        Command::Generate(a) => generate_cmd(cli, a),
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    invocation: &'a Cli,
}

/// `<out>.manifest.json`, or `manifest.json` inside an output directory.
fn manifest_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        return out.join("manifest.json");
    }
    let mut name = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_manifest(cli: &Cli, out: &Path) -> Result<()> {
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        invocation: cli,
    };
    fs::write(manifest_path(out), serde_json::to_string_pretty(&m)? + "\n")?;
    Ok(())
}

fn ensure_distinct(out: &Path, inputs: &[&Path]) -> Result<()> {
    let canon = |p: &Path| fs::canonicalize(p).ok();
    if let Some(o) = canon(out) {
        if inputs.iter().any(|i| canon(i).as_ref() == Some(&o)) {
            return Err(Error::Argument(format!("output {} would overwrite an input", out.display())));
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

fn load_input(path: &Path, format: Option<FormatArg>) -> Result<Corpus> {
    if !path.exists() {
        return Err(Error::Argument(format!("input {} does not exist", path.display())));
    }
    let format = match format {
        Some(FormatArg::Jsonl) => CorpusFormat::Jsonl,
        Some(FormatArg::EdgeListDir) => CorpusFormat::EdgeListDir,
        None if path.is_dir() => CorpusFormat::EdgeListDir,
        None => CorpusFormat::Jsonl,
    };
    load_corpus(path, format)
}

fn registry(names: &[String], lovasz_tol: f64) -> Result<Registry> {
    let mut r = if names.is_empty() {
        Registry::default()
    } else {
        Registry::select(&names.iter().map(String::as_str).collect::<Vec<_>>())?
    };
    if !(lovasz_tol > 0.0) {
        return Err(Error::Argument("lovasz tolerance must be positive".into()));
    }
    r.lovasz_tol = lovasz_tol;
    Ok(r)
}

fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c == '/' || c == '\\' { '_' } else { c }).collect()
}

fn compute(cli: &Cli, a: &ComputeArgs) -> Result<i32> {
    ensure_distinct(&a.out, &[&a.input.input])?;
    let corpus = load_input(&a.input.input, a.input.format)?;
    let reg = registry(&a.properties, a.lovasz_tol)?;
    let vectors = invariants::compute_corpus(&corpus, &reg);
    let ids: Vec<&str> = corpus.graphs().iter().map(|g| g.id()).collect();
    invariants::write_csv(&ids, &vectors, create(&a.out)?)?;
    if let Some(path) = &a.stats {
        let stats = fit_normalizer(&vectors)?;
        fs::write(path, serde_json::to_string_pretty(&stats.to_json())? + "\n")?;
    }
    if let Some(dir) = &a.local_dir {
        fs::create_dir_all(dir)?;
        for g in corpus.graphs() {
            let stem = file_stem(g.id());
            let nodes: Vec<_> = local::NODE_PROPERTIES
                .iter()
                .map(|p| local::node_property(g, p))
                .collect::<Result<_>>()?;
            local::write_node_csv(&nodes, create(&dir.join(format!("{stem}.nodes.csv")))?)?;
            for p in local::PAIR_PROPERTIES {
                let m = local::pair_property(g, p)?;
                local::write_pair_text(&m, create(&dir.join(format!("{stem}.{p}.txt")))?)?;
            }
        }
    }
    let failed = vectors
        .iter()
        .flat_map(|v| &v.status)
        .filter(|s| matches!(s, invariants::PropertyStatus::Failed(_)))
        .count();
    if failed > 0 {
        eprintln!("warning: {failed} property values were masked (size limits or solver failures)");
    }
    write_manifest(cli, &a.out)?;
    println!("wrote {} rows to {}", vectors.len(), a.out.display());
    Ok(0)
}

fn oracle(cli: &Cli, a: &OracleArgs) -> Result<i32> {
    if a.max_n > ENUMERATION_LIMIT {
        return Err(Error::Argument(format!("--max-n is limited to {ENUMERATION_LIMIT}")));
    }
    let reg = Registry::default();
    let mut report = verify_graphs(&connected_graphs_up_to(a.max_n), &reg);
    report.merge(verify_graphs(&random_graphs(a.random, 3, 10, &[0.2, 0.5, 0.8], a.seed)?, &reg));
    fs::write(&a.out, serde_json::to_string_pretty(&report)? + "\n")?;
    write_manifest(cli, &a.out)?;
    match report.mismatches.first() {
        None => {
            println!(
                "all properties matched ({} graphs, {} comparisons)",
                report.graphs, report.comparisons
            );
            Ok(0)
        }
        Some(m) => {
            println!(
                "mismatch in {}: fast {:?}, oracle {:?}{}",
                m.property,
                m.fast,
                m.oracle,
                m.detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
            );
            println!("{}", serde_json::json!({ "id": m.graph, "n": m.n, "edges": m.edges }));
            Ok(1)
        }
    }
}

fn encode(cli: &Cli, a: &EncodeArgs) -> Result<i32> {
    ensure_distinct(&a.out, &[&a.input.input])?;
    let corpus = load_input(&a.input.input, a.input.format)?;
    let mode = match a.mode {
        ModeArg::Full => EncodingMode::Full,
        ModeArg::Truncated => EncodingMode::Truncated(a.width),
    };
    if a.check && mode != EncodingMode::Full {
        return Err(Error::Mode("--check needs a full-rank encoding".into()));
    }
    let mut out = create(&a.out)?;
    let mut worst: f64 = 0.0;
    for g in corpus.graphs() {
        let pe = positional_encoding(g, mode)?;
        if a.check {
            let rec = reconstruct_adjacency(&pe)?;
            if rec.adjacency != g.adjacency() {
                return Err(Error::Data(format!("graph `{}` was not recovered from its encoding", g.id())));
            }
            worst = worst.max(rec.max_deviation);
        }
        write_encoding_text(g.id(), &pe, &mut out)?;
    }
    out.flush()?;
    write_manifest(cli, &a.out)?;
    if a.check {
        println!("recovered {} graphs, max deviation {worst:.3e}", corpus.len());
    }
    Ok(0)
}

fn mixup(cli: &Cli, a: &MixupArgs) -> Result<i32> {
    ensure_distinct(&a.out, &[&a.input.input])?;
    let corpus = load_input(&a.input.input, a.input.format)?;
    let spec = match a.resolution {
        ResolutionArg::Threshold => MixupSpec::threshold(a.lambda),
        ResolutionArg::Bernoulli => MixupSpec::bernoulli(a.lambda, a.seed),
    };
    let out = augment_corpus(&corpus, a.pairs, &spec, a.seed)?;
    save_jsonl(&out, &a.out)?;
    write_manifest(cli, &a.out)?;
    println!("wrote {} graphs ({} mixed) to {}", out.len(), a.pairs, a.out.display());
    Ok(0)
}

fn synth(cli: &Cli, a: &SynthArgs) -> Result<i32> {
    let corpus = build_synthetic_corpus(&default_synthetic_specs(a.count, a.n_min, a.n_max, a.seed))?;
    save_jsonl(&corpus, &a.out)?;
    write_manifest(cli, &a.out)?;
    println!("wrote {} graphs to {}", corpus.len(), a.out.display());
    Ok(0)
}

fn optional_list(names: &[String]) -> Vec<String> {
    if names.len() == 1 && names[0] == "none" {
        Vec::new()
    } else {
        names.to_vec()
    }
}

fn train_cmd(cli: &Cli, a: &TrainArgs) -> Result<i32> {
    let metrics = a.metrics.clone().unwrap_or_else(|| {
        let mut name = a.out.file_name().map(OsString::from).unwrap_or_default();
        name.push(".metrics.csv");
        a.out.with_file_name(name)
    });
    if let Some(c) = &a.corpus {
        ensure_distinct(&a.out, &[c])?;
        ensure_distinct(&metrics, &[c])?;
    }
    let corpus = match &a.corpus {
        Some(path) => load_input(path, None)?,
        None => build_synthetic_corpus(&default_synthetic_specs(a.graphs, 8, 24, a.seed))?,
    };
    let reg = registry(&a.properties, invariants::lovasz::DEFAULT_TOL)?;
    let config = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size,
        learning_rate: a.learning_rate,
        optimizer: match a.optimizer {
            OptimizerArg::Adam => Optimizer::adam(),
            OptimizerArg::Sgd => Optimizer::Sgd,
        },
        weights: LossWeights {
            graph: a.w_graph,
            node: a.w_node,
            pair: a.w_pair,
        },
        seed: a.seed,
        validation_fraction: a.validation_fraction,
        d_in: a.d_in,
        d_model: a.d_model,
        layers: a.layers,
        heads: a.heads,
        readout: match a.readout {
            ReadoutArg::Mean => Readout::Mean,
            ReadoutArg::MeanAndSize => Readout::MeanAndSize,
        },
        node_properties: optional_list(&a.node_properties),
        pair_properties: optional_list(&a.pair_properties),
    };
    let outcome = train(&corpus, &reg, &config)?;
    outcome.model.save(&a.out)?;
    write_metrics_csv(&outcome.model.graph_properties, &outcome.log, create(&metrics)?)?;
    write_manifest(cli, &a.out)?;
    let meta = &outcome.model.metadata;
    println!(
        "trained {} epochs: train loss {:.4}, validation loss {}",
        meta.epochs_completed,
        meta.final_train_loss,
        meta.final_validation_loss.map_or("n/a".to_string(), |v| format!("{v:.4}"))
    );
    if let Some(reason) = &meta.aborted {
        eprintln!("training aborted: {reason}; the last finite checkpoint was saved");
        return Ok(2);
    }
    Ok(0)
}

#[derive(Serialize)]
struct EmbeddingRecord<'a> {
    id: &'a str,
    graph: Vec<f64>,
    nodes: Vec<Vec<f64>>,
}

fn embed(cli: &Cli, a: &EmbedArgs) -> Result<i32> {
    ensure_distinct(&a.out, &[&a.input.input, &a.model])?;
    let model = EncoderModel::load(&a.model)?;
    let corpus = load_input(&a.input.input, a.input.format)?;
    let mut out = create(&a.out)?;
    for g in corpus.graphs() {
        let e = model.embed(g)?;
        let rec = EmbeddingRecord {
            id: g.id(),
            graph: e.graph,
            nodes: e.nodes.to_rows(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    write_manifest(cli, &a.out)?;
    println!("embedded {} graphs (width {})", corpus.len(), model.arch.d_model);
    Ok(0)
}

fn analyze_wl(cli: &Cli, a: &WlArgs) -> Result<i32> {
    let corpus = match &a.input {
        Some(path) => load_input(path, a.format)?,
        None => build_synthetic_corpus(&analysis::domain_family_specs(a.per_family, a.seed))?,
    };
    let config = WlAnalysisConfig {
        iterations: a.iterations,
        energy: a.energy,
        centering: match a.centering {
            CenteringArg::Rows => Centering::Rows,
            CenteringArg::Columns => Centering::Columns,
        },
    };
    let report = analysis::wl_similarity_report(&corpus, &config)?;
    fs::create_dir_all(&a.out_dir)?;
    analysis::write_matrix_csv(&report.similarity, create(&a.out_dir.join("similarity.csv"))?)?;
    let summary = serde_json::json!({
        "graphs": corpus.len(),
        "embedding_rank": report.rank,
        "config": config,
        "summary": report.summary,
    });
    fs::write(a.out_dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    fs::write(
        a.out_dir.join("heatmap.svg"),
        analysis::heatmap_svg(&report.similarity, corpus.domains()),
    )?;
    write_manifest(cli, &a.out_dir)?;
    let s = &report.summary;
    let show = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.4}"));
    println!(
        "in-domain {}  cross-domain {}  ratio {}",
        show(s.in_domain_mean),
        show(s.cross_domain_mean),
        show(s.separation_ratio)
    );
    Ok(0)
}

#[derive(Serialize)]
struct FusedRecord<'a> {
    id: &'a str,
    fused: Vec<Vec<f64>>,
}

fn fuse_cmd(cli: &Cli, a: &FuseArgs) -> Result<i32> {
    ensure_distinct(&a.out, &[&a.input.input, &a.model])?;
    let model = EncoderModel::load(&a.model)?;
    let corpus = load_input(&a.input.input, a.input.format)?;
    let mut out = create(&a.out)?;
    for g in corpus.graphs() {
        let z = model.embed(g)?.nodes;
        let e = g.features().cloned().unwrap_or_else(|| Matrix::zeros(g.n(), 0));
        let x = fuse(&z, &e)?;
        serde_json::to_writer(
            &mut out,
            &FusedRecord {
                id: g.id(),
                fused: x.to_rows(),
            },
        )?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    write_manifest(cli, &a.out)?;
    Ok(0)
}

fn generate_cmd(cli: &Cli, a: &GenerateArgs) -> Result<i32> {
    let model = match a.model {
        ModelArg::Er => GraphModel::ErdosRenyi { n: a.n, p: a.p },
        ModelArg::Ba => GraphModel::BarabasiAlbert { n: a.n, m: a.m },
        ModelArg::Ws => GraphModel::WattsStrogatz {
            n: a.n,
            k: a.k,
            beta: a.beta,
        },
    };
    let spec = SynthSpec {
        model,
        count: a.count,
        n_min: a.n,
        n_max: a.n,
        seed: a.seed,
    };
    let corpus = build_synthetic_corpus(&[spec])?;
    save_jsonl(&corpus, &a.out)?;
    write_manifest(cli, &a.out)?;
    Ok(0)
}
