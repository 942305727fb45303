//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 data or format error, 4 method
//! precondition not met (e.g. no overlapping tokens). Every artifact carries
//! the tool version and a hash of the run configuration; the configuration
//! records input file digests rather than paths.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::benchmark::{ENGLISH_PREAMBLE, POLISH_PREAMBLE};
use crate::io::auxtext::{format_aux, parse_aux};
use crate::io::emb::{emb_from_bytes, emb_to_bytes};
use crate::io::plan::format_plan;
use crate::io::provenance::{sha256_hex, Provenance};
use crate::io::report::{format_csv, LoadFailure, Report};
use crate::io::FormatError;
use crate::metrics::{compare, evaluate, text_stats, CountingConvention, MetricsError, NamedVocabulary, SortKey};
use crate::tokenizer::{train_bpe, PreTokenizerConfig, TokenizerError, Vocabulary, WhitespacePolicy};
use crate::trainplan::{make_freeze_plan, pipeline_manifest, Manifest, Stage, TrainPlanError, DEFAULT_NAME_TEMPLATE};
use crate::transfer::{
    apply_transfer, factorize_ppmi, focus_initialize, fvt_initialize, linear_initialize, random_initialize,
    AuxTrainConfig, AuxiliaryEmbeddings, EmbeddingMatrix, InitOptions, RowOrigin, TransferError, TransferPlan,
};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }
}

impl From<TransferError> for CliError {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::NoOverlap => CliError::Precondition(e.to_string()),
            TransferError::InvalidArgument(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<TrainPlanError> for CliError {
    fn from(e: TrainPlanError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tokswap", version, about = "Tokenizer replacement toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a byte-pair-encoding vocabulary.
    TrainTokenizer(TrainTokenizerArgs),
    /// Compare tokenizers on one text (characters per token, tokens per word).
    Metrics(MetricsArgs),
    /// Initialize target embeddings from source embeddings.
    Transfer(TransferArgs),
    /// Write a staged freeze plan manifest.
    FreezePlan(FreezePlanArgs),
    /// Train or import auxiliary token vectors.
    #[command(subcommand)]
    Aux(AuxCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Whitespace {
    /// A space before a word joins the word's first fragment.
    Attach,
    /// Whitespace runs are fragments of their own.
    Standalone,
}

#[derive(Debug, Args)]
pub struct TrainTokenizerArgs {
    /// Corpus files; each non-empty line is a document.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    #[arg(long)]
    pub vocab_size: usize,
    #[arg(long)]
    pub split_digits: bool,
    #[arg(long)]
    pub isolate_punct: bool,
    #[arg(long)]
    pub byte_fallback: bool,
    #[arg(long)]
    pub lowercase: bool,
    #[arg(long, value_enum, default_value = "attach")]
    pub whitespace: Whitespace,
    /// Reserved token; may be repeated.
    #[arg(long = "special")]
    pub specials: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Polish,
    English,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SortArg {
    #[default]
    Input,
    Name,
    VocabSize,
    Tokens,
    Cpt,
    Tpw,
}

impl From<SortArg> for SortKey {
    fn from(s: SortArg) -> Self {
        match s {
            SortArg::Input => SortKey::Input,
            SortArg::Name => SortKey::Name,
            SortArg::VocabSize => SortKey::VocabSize,
            SortArg::Tokens => SortKey::Tokens,
            SortArg::Cpt => SortKey::Cpt,
            SortArg::Tpw => SortKey::Tpw,
        }
    }
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Vocabulary files; each is named by its file stem.
    #[arg(required = true)]
    pub vocabs: Vec<PathBuf>,
    #[arg(long, required_unless_present = "builtin", conflicts_with = "builtin")]
    pub text: Option<PathBuf>,
    /// Use a bundled benchmark text instead of --text.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long, default_value = "collapse-whitespace")]
    pub convention: CountingConvention,
    #[arg(long, value_enum, default_value = "input")]
    pub sort: SortArg,
    /// Output prefix; writes PREFIX.json and PREFIX.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Focus,
    Fvt,
    Linear,
    Random,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub src_vocab: PathBuf,
    /// Source input embedding (EMB1).
    #[arg(long)]
    pub src_emb: PathBuf,
    /// Untied source output head (EMB1), transferred with the same plan.
    #[arg(long)]
    pub src_head: Option<PathBuf>,
    #[arg(long)]
    pub tgt_vocab: PathBuf,
    /// Auxiliary vectors; required by focus and linear.
    #[arg(long)]
    pub aux: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes PREFIX.emb, PREFIX.plan.jsonl, PREFIX.summary.json
    /// and, with --src-head, PREFIX.head.emb.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum StageArg {
    Pipeline,
    BoundaryAdaptation,
    FullAdaptation,
}

#[derive(Debug, Args)]
pub struct FreezePlanArgs {
    #[arg(long)]
    pub n_layers: usize,
    #[arg(long, value_enum, default_value = "pipeline")]
    pub stage: StageArg,
    /// Token budget override, one per stage in order.
    #[arg(long = "budget")]
    pub budgets: Vec<u64>,
    /// Layer group naming; `{i}` is replaced by the zero-based layer index.
    #[arg(long, default_value = DEFAULT_NAME_TEMPLATE)]
    pub name_template: String,
    /// Manifest path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AuxCommand {
    /// Factorize token co-occurrence statistics of a corpus.
    Train(AuxTrainArgs),
    /// Validate and normalize an external vector file.
    Import(AuxImportArgs),
}

#[derive(Debug, Args)]
pub struct AuxTrainArgs {
    /// Corpus files; each non-empty line is a document.
    #[arg(required = true)]
    pub corpus: Vec<PathBuf>,
    /// Vocabulary used to tokenize the corpus.
    #[arg(long)]
    pub tokenizer: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AuxImportArgs {
    pub input: PathBuf,
    /// Expected vector dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Report how many of this vocabulary's tokens have vectors.
    #[arg(long)]
    pub tokenizer: Option<PathBuf>,
    /// Write the vectors back in canonical form.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    let bytes = read_bytes(path)?;
    String::from_utf8(bytes).map_err(|_| CliError::Data(format!("{}: not valid UTF-8", path.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Reads corpus files as newline-delimited documents, along with their digests.
fn read_corpus(paths: &[PathBuf]) -> Result<(Vec<String>, Vec<String>), CliError> {
    let mut docs = Vec::new();
    let mut digests = Vec::new();
    for p in paths {
        let text = read_text(p)?;
        digests.push(sha256_hex(text.as_bytes()));
        docs.extend(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_owned));
    }
    Ok((docs, digests))
}

fn load_vocab(path: &Path) -> Result<(Vocabulary, String), CliError> {
    let text = read_text(path)?;
    let vocab = Vocabulary::from_json(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok((vocab, sha256_hex(text.as_bytes())))
}

fn load_emb(path: &Path) -> Result<(EmbeddingMatrix, String), CliError> {
    let bytes = read_bytes(path)?;
    let m = emb_from_bytes(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok((m, sha256_hex(&bytes)))
}

fn load_aux(path: &Path) -> Result<(AuxiliaryEmbeddings, String), CliError> {
    let text = read_text(path)?;
    let aux = parse_aux(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok((aux, sha256_hex(text.as_bytes())))
}

fn format_err(e: FormatError) -> CliError {
    CliError::Data(e.to_string())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::TrainTokenizer(a) => train_tokenizer(&a, out),
        Command::Metrics(a) => metrics(&a, out),
        Command::Transfer(a) => transfer(&a, out),
        Command::FreezePlan(a) => freeze_plan(&a, out),
        Command::Aux(AuxCommand::Train(a)) => aux_train(&a, out),
        Command::Aux(AuxCommand::Import(a)) => aux_import(&a, out),
    }
}

#[derive(Serialize)]
struct TrainConfig<'a> {
    command: &'static str,
    corpus_sha256: &'a [String],
    vocab_size: usize,
    pretok: PreTokenizerConfig,
    specials: &'a [String],
}

pub fn train_tokenizer(a: &TrainTokenizerArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (docs, digests) = read_corpus(&a.corpus)?;
    let pretok = PreTokenizerConfig {
        split_digits: a.split_digits,
        isolate_punctuation: a.isolate_punct,
        whitespace_policy: match a.whitespace {
            Whitespace::Attach => WhitespacePolicy::AttachLeadingSpace,
            Whitespace::Standalone => WhitespacePolicy::Standalone,
        },
        lowercase: a.lowercase,
        byte_fallback: a.byte_fallback,
    };
    let prov = Provenance::for_config(&TrainConfig {
        command: "train-tokenizer",
        corpus_sha256: &digests,
        vocab_size: a.vocab_size,
        pretok,
        specials: &a.specials,
    });
    let (vocab, saturated) = match train_bpe(&docs, a.vocab_size, &pretok, &a.specials) {
        Ok(v) => (v, None),
        Err(TokenizerError::CorpusSaturated { partial, target }) => (*partial, Some(target)),
        Err(e) => return Err(CliError::Data(e.to_string())),
    };
    let vocab = vocab.with_provenance(prov);
    write_file(&a.out, vocab.to_json().as_bytes())?;
    writeln!(
        out,
        "vocab_size={} merges={} out={}",
        vocab.len(),
        vocab.merges().len(),
        a.out.display()
    )?;
    match saturated {
        Some(target) => Err(CliError::Data(format!(
            "corpus saturated at {} tokens before reaching {target}; partial vocabulary written to {}",
            vocab.len(),
            a.out.display()
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct MetricsConfig<'a> {
    command: &'static str,
    vocab_sha256: &'a [Option<String>],
    text_sha256: String,
    convention: CountingConvention,
    sort: SortArg,
}

pub fn metrics(a: &MetricsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match (&a.text, a.builtin) {
        (Some(p), _) => read_text(p)?,
        (None, Some(Builtin::Polish)) => POLISH_PREAMBLE.to_owned(),
        (None, Some(Builtin::English)) => ENGLISH_PREAMBLE.to_owned(),
        (None, None) => return Err(CliError::Usage("one of --text or --builtin is required".into())),
    };
    if text_stats(&text, a.convention).word_count == 0 {
        return Err(CliError::Data(MetricsError::EmptyText.to_string()));
    }

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut digests = Vec::new();
    for path in &a.vocabs {
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        let bytes = read_bytes(path);
        digests.push(bytes.as_ref().ok().map(|b| sha256_hex(b)));
        let evaluated = bytes.and_then(|b| {
            let vocab = std::str::from_utf8(&b)
                .map_err(|_| "not valid UTF-8".to_string())
                .and_then(|t| Vocabulary::from_json(t).map_err(|e| e.to_string()))
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            evaluate(
                &NamedVocabulary {
                    name: name.clone(),
                    vocab,
                },
                &text,
                a.convention,
            )
            .map_err(|e| CliError::Data(e.to_string()))
        });
        match evaluated {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("warning: {name}: {e}");
                failures.push(LoadFailure {
                    tokenizer: name,
                    error: e.to_string(),
                });
            }
        }
    }

    let prov = Provenance::for_config(&MetricsConfig {
        command: "metrics",
        vocab_sha256: &digests,
        text_sha256: sha256_hex(text.as_bytes()),
        convention: a.convention,
        sort: a.sort,
    });
    let table = if reports.is_empty() {
        None
    } else {
        Some(compare(&reports, a.sort.into()).map_err(|e| CliError::Data(e.to_string()))?)
    };
    let n_failed = failures.len();
    let report = Report::new(table.as_ref(), failures, &prov);
    let csv = table.as_ref().map(|t| format_csv(t, &prov));
    if let Some(prefix) = &a.out {
        write_file(&with_suffix(prefix, ".json"), report.to_json().as_bytes())?;
        if let Some(csv) = &csv {
            write_file(&with_suffix(prefix, ".csv"), csv.as_bytes())?;
        }
    }
    if let Some(csv) = &csv {
        out.write_all(csv.as_bytes())?;
    }
    if n_failed > 0 {
        return Err(CliError::Data(format!(
            "{n_failed} tokenizer(s) could not be evaluated"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct TransferConfig {
    command: &'static str,
    method: Method,
    src_vocab_sha256: String,
    src_emb_sha256: String,
    src_head_sha256: Option<String>,
    tgt_vocab_sha256: String,
    aux_sha256: Option<String>,
    seed: u64,
}

#[derive(Serialize)]
struct TransferSummary<'a> {
    format_version: u32,
    tool_version: &'a str,
    config_hash: &'a str,
    method: Method,
    rows: usize,
    dim: usize,
    counts: BTreeMap<&'static str, usize>,
    flags: &'a [String],
}

fn origin_counts(plan: &TransferPlan) -> BTreeMap<&'static str, usize> {
    RowOrigin::ALL.iter().map(|&o| (o.as_str(), plan.count(o))).collect()
}

pub fn transfer(a: &TransferArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (src_vocab, src_vocab_sha) = load_vocab(&a.src_vocab)?;
    let (tgt_vocab, tgt_vocab_sha) = load_vocab(&a.tgt_vocab)?;
    let (src_emb, src_emb_sha) = load_emb(&a.src_emb)?;
    let head = a.src_head.as_deref().map(load_emb).transpose()?;
    let aux = a.aux.as_deref().map(load_aux).transpose()?;
    if matches!(a.method, Method::Focus | Method::Linear) && aux.is_none() {
        return Err(CliError::Usage(format!("--aux is required for method {:?}", a.method)));
    }
    let prov = Provenance::for_config(&TransferConfig {
        command: "transfer",
        method: a.method,
        src_vocab_sha256: src_vocab_sha,
        src_emb_sha256: src_emb_sha,
        src_head_sha256: head.as_ref().map(|(_, d)| d.clone()),
        tgt_vocab_sha256: tgt_vocab_sha,
        aux_sha256: aux.as_ref().map(|(_, d)| d.clone()),
        seed: a.seed,
    });

    let opts = InitOptions {
        seed: a.seed,
        freq: None,
    };
    let aux_ref = aux.as_ref().map(|(x, _)| x);
    let (matrix, plan) = match (a.method, aux_ref) {
        (Method::Focus, Some(x)) => focus_initialize(&src_emb, &src_vocab, &tgt_vocab, x, &opts)?,
        (Method::Linear, Some(x)) => linear_initialize(&src_emb, &src_vocab, &tgt_vocab, x, &opts)?,
        (Method::Fvt, _) => fvt_initialize(&src_emb, &src_vocab, &tgt_vocab, &opts)?,
        (Method::Random, _) => random_initialize(&src_emb, &src_vocab, &tgt_vocab, a.seed)?,
        _ => unreachable!("aux presence checked above"),
    };
    let head_matrix = match &head {
        Some((h, _)) => {
            if h.rows() != src_vocab.len() {
                return Err(TransferError::DimensionMismatch {
                    what: "source head rows",
                    expected: src_vocab.len(),
                    found: h.rows(),
                }
                .into());
            }
            apply_transfer(h, None, &plan)?.0.into()
        }
        None => None,
    };

    let method = format!("{:?}", a.method).to_lowercase();
    write_file(
        &with_suffix(&a.out, ".emb"),
        &emb_to_bytes(&matrix).map_err(format_err)?,
    )?;
    if let Some(h) = &head_matrix {
        write_file(&with_suffix(&a.out, ".head.emb"), &emb_to_bytes(h).map_err(format_err)?)?;
    }
    write_file(
        &with_suffix(&a.out, ".plan.jsonl"),
        format_plan(&plan, &method, &prov).as_bytes(),
    )?;
    let summary = TransferSummary {
        format_version: 1,
        tool_version: &prov.tool_version,
        config_hash: &prov.config_hash,
        method: a.method,
        rows: matrix.rows(),
        dim: matrix.dim(),
        counts: origin_counts(&plan),
        flags: &plan.flags,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    write_file(&with_suffix(&a.out, ".summary.json"), json.as_bytes())?;

    for o in RowOrigin::ALL {
        writeln!(out, "{:<18} {}", o.as_str(), plan.count(o))?;
    }
    for f in &plan.flags {
        writeln!(out, "flag {f}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct FreezeConfig<'a> {
    command: &'static str,
    n_layers: usize,
    stage: StageArg,
    budgets: &'a [u64],
    name_template: &'a str,
}

pub fn freeze_plan(a: &FreezePlanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let plans = match a.stage {
        StageArg::Pipeline => {
            let budgets = match a.budgets.as_slice() {
                [] => None,
                &[b1, b2] => Some([b1, b2]),
                _ => return Err(CliError::Usage("pipeline takes zero or two --budget values".into())),
            };
            pipeline_manifest(a.n_layers, budgets)?
        }
        single => {
            let stage = if single == StageArg::BoundaryAdaptation {
                Stage::BoundaryAdaptation
            } else {
                Stage::FullAdaptation
            };
            let budget = match a.budgets.as_slice() {
                [] => None,
                &[b] => Some(b),
                _ => return Err(CliError::Usage("a single stage takes at most one --budget".into())),
            };
            vec![make_freeze_plan(a.n_layers, stage, budget)?]
        }
    };
    let prov = Provenance::for_config(&FreezeConfig {
        command: "freeze-plan",
        n_layers: a.n_layers,
        stage: a.stage,
        budgets: &a.budgets,
        name_template: &a.name_template,
    });
    let manifest = Manifest::new(&plans, &a.name_template, &prov)?;
    let json = manifest.to_json();
    match &a.out {
        Some(p) => {
            write_file(p, json.as_bytes())?;
            for s in &manifest.stages {
                writeln!(
                    out,
                    "{} budget={} trainable={} frozen={}",
                    s.stage,
                    s.token_budget,
                    s.trainable.len(),
                    s.frozen.len()
                )?;
            }
        }
        None => out.write_all(json.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct AuxTrainRun<'a> {
    command: &'static str,
    corpus_sha256: &'a [String],
    tokenizer_sha256: String,
    config: &'a AuxTrainConfig,
}

pub fn aux_train(a: &AuxTrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (docs, digests) = read_corpus(&a.corpus)?;
    let (vocab, vocab_sha) = load_vocab(&a.tokenizer)?;
    let cfg = AuxTrainConfig {
        dim: a.dim,
        window: a.window,
    };
    let prov = Provenance::for_config(&AuxTrainRun {
        command: "aux-train",
        corpus_sha256: &digests,
        tokenizer_sha256: vocab_sha,
        config: &cfg,
    });
    let fact = factorize_ppmi(&docs, &vocab, &cfg)?;
    let aux = fact.embeddings(&vocab)?;
    write_file(&a.out, format_aux(&aux, Some(&prov)).as_bytes())?;
    writeln!(
        out,
        "entries={} dim={} types={} top_eigenvalue={}",
        aux.len(),
        aux.dim(),
        fact.types.len(),
        fact.eigenvalues[0]
    )?;
    Ok(())
}

pub fn aux_import(a: &AuxImportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (aux, digest) = load_aux(&a.input)?;
    if let Some(d) = a.dim {
        if d != aux.dim() {
            return Err(CliError::Data(format!(
                "{}: expected dimension {d}, found {}",
                a.input.display(),
                aux.dim()
            )));
        }
    }
    writeln!(out, "entries={} dim={}", aux.len(), aux.dim())?;
    if let Some(p) = &a.tokenizer {
        let (vocab, _) = load_vocab(p)?;
        let covered = vocab.tokens().iter().filter(|t| aux.get(t).is_some()).count();
        writeln!(out, "coverage={covered}/{}", vocab.len())?;
    }
    if let Some(p) = &a.out {
        #[derive(Serialize)]
        struct ImportConfig<'a> {
            command: &'static str,
            input_sha256: &'a str,
        }
        let prov = Provenance::for_config(&ImportConfig {
            command: "aux-import",
            input_sha256: &digest,
        });
        write_file(p, format_aux(&aux, Some(&prov)).as_bytes())?;
    }
    Ok(())
}
