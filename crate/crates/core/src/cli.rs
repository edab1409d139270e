//! The `atlas` operator command line.
//!
//! Every command works directly on the data directory; none needs the HTTP
//! service. Exit status is 0 on success, 1 when items failed validation and
//! 2 on I/O or parse errors. With `--format json` each command writes
//! exactly one JSON document to stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::api::{self, AppState, TokenTable};
use crate::ingest::{
    ingest_ead, ingest_print_guide, ingest_survey_csv, ColumnMapping, IncomingSubmission, IngestContext, IngestIssue,
};
use crate::model::{lint_dir, lint_text, Tier, Vocabularies};
use crate::search::{compute_stats, IndexHandle, SearchQuery};
use crate::store::{
    export_snapshot, import_snapshot, Catalog, CatalogOptions, Principal, StoreError, Submission, SubmissionState,
};

#[derive(Parser, Debug)]
#[command(name = "atlas", version, about = "Collection-level sound recording metadata catalog")]
pub struct Cli {
    /// Data directory holding the catalog log.
    #[arg(long, env = "ATLAS_DATA_DIR", default_value = "atlas-data", global = true)]
    pub data_dir: PathBuf,
    /// Directory of vocabulary JSON files; the built-in set when omitted.
    #[arg(long, env = "ATLAS_VOCAB", global = true)]
    pub vocab_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Curator name recorded as the author of curation actions.
    #[arg(long, env = "ATLAS_CURATOR", default_value = "cli", global = true)]
    pub curator: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Create the data directory.
    Init,
    /// Queue one submission per row of a survey CSV export.
    ImportSurvey {
        csv: PathBuf,
        /// Column mapping JSON file.
        #[arg(long)]
        mapping: PathBuf,
    },
    /// Queue the collection-level description of EAD finding aids.
    ImportEad {
        #[arg(required = true)]
        xml: Vec<PathBuf>,
    },
    /// Queue the entries of an OCR'd print guide.
    ImportGuide { txt: PathBuf },
    /// Work the curation queue.
    Review {
        #[command(subcommand)]
        action: Review,
    },
    /// Apply a JSON merge patch to a published record.
    Amend {
        id: String,
        /// Inline JSON or @file.
        #[arg(long)]
        changes: String,
    },
    /// Withdraw a record from public view.
    Tombstone { id: String },
    /// Show a record's revisions.
    History { id: String },
    /// Search public records.
    Search(SearchArgs),
    /// Rebuild the search index from the store and report its size.
    Reindex,
    /// Write a dataset snapshot.
    ExportSnapshot { path: PathBuf },
    /// Check a snapshot file's manifest and hash.
    VerifySnapshot { path: PathBuf },
    /// Public aggregate figures.
    Stats,
    /// Vocabulary maintenance.
    Vocab {
        #[command(subcommand)]
        action: Vocab,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "ATLAS_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
        /// JSON file mapping tokens to {role, name}.
        #[arg(long, env = "ATLAS_TOKENS")]
        tokens_file: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Review {
    List {
        #[arg(long, default_value = "pending")]
        state: String,
    },
    Show {
        id: String,
    },
    Approve {
        id: String,
        #[arg(long)]
        tier: Option<Tier>,
        /// Merge patch over the proposed fields: inline JSON or @file.
        #[arg(long)]
        edits: Option<String>,
    },
    Reject {
        id: String,
        #[arg(long)]
        reason: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum Vocab {
    /// Check vocabulary files; defaults to --vocab-dir.
    Lint { dir: Option<PathBuf> },
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(default_value = "")]
    pub q: String,
    /// Facet filter as field=value; repeatable.
    #[arg(long = "facet", value_name = "FIELD=VALUE")]
    pub facets: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub page: usize,
    #[arg(long, default_value_t = 20)]
    pub page_size: usize,
}

/// A command failure and its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    fn io(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
            detail: None,
        }
    }

    fn invalid(message: impl ToString, detail: Option<Value>) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
            detail,
        }
    }
}

impl From<StoreError> for Failure {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::Validation(report) => Failure::invalid(
                StoreError::Validation(report.clone()),
                Some(serde_json::to_value(report).expect("report serializes")),
            ),
            e @ (StoreError::NotFound { .. }
            | StoreError::Conflict(_)
            | StoreError::Tombstoned(_)
            | StoreError::InvalidChange(_)
            | StoreError::Forbidden(_)) => Failure::invalid(e, None),
            StoreError::Locked => Failure::io("data directory is locked by another atlas process (is `atlas serve` running?)"),
            other => Failure::io(other),
        }
    }
}

/// What a successful command prints.
struct Output {
    json: Value,
    text: String,
    /// Per-item lines for stderr.
    report: Vec<String>,
    code: u8,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output {
            json,
            text: text.into(),
            report: Vec::new(),
            code: 0,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    run(cli, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let format = cli.format;
    match execute(cli, err) {
        Ok(output) => {
            for line in &output.report {
                let _ = writeln!(err, "{line}");
            }
            let _ = match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&output.json).expect("json")),
                Format::Text if output.text.is_empty() => Ok(()),
                Format::Text => writeln!(out, "{}", output.text.trim_end()),
            };
            output.code
        }
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            if format == Format::Json {
                let doc = json!({"error": failure.message, "detail": failure.detail});
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            } else if let Some(detail) = &failure.detail {
                let _ = writeln!(err, "{}", serde_json::to_string_pretty(detail).expect("json"));
            }
            failure.code
        }
    }
}

fn load_vocab(dir: Option<&Path>) -> Result<Vocabularies, Failure> {
    match dir {
        Some(dir) => Vocabularies::load_dir(dir).map_err(Failure::io),
        None => Ok(Vocabularies::builtin()),
    }
}

fn read_json_arg(arg: &str) -> Result<Value, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::io(format!("invalid JSON: {e}")))
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli, err: &mut dyn Write) -> Result<Output, Failure> {
    let curator = Principal::curator(cli.curator.clone());
    let vocab = load_vocab(cli.vocab_dir.as_deref())?;
    let dir = cli.data_dir.clone();

    if let Command::Init = cli.command {
        Catalog::init(&dir).map_err(Failure::io)?;
        return Ok(Output::new(
            json!({"data_dir": dir.display().to_string()}),
            format!("initialized {}", dir.display()),
        ));
    }
    if let Command::Vocab {
        action: Vocab::Lint { dir: lint },
    } = &cli.command
    {
        return vocab_lint(lint.as_deref().or(cli.vocab_dir.as_deref()));
    }

    let options = CatalogOptions {
        vocab: Arc::new(vocab),
        ..Default::default()
    };
    let catalog = Catalog::open(&dir, options)?;
    let ctx_for = |detail: &str| IngestContext::new(catalog.vocab(), detail.to_string());

    match cli.command {
        Command::Init | Command::Vocab { .. } => unreachable!("handled above"),
        Command::ImportSurvey { csv, mapping } => {
            let mapping_text = String::from_utf8(read_file(&mapping)?).map_err(Failure::io)?;
            let mapping = ColumnMapping::from_json(&mapping_text).map_err(|e| Failure::io(format!("mapping: {e}")))?;
            let bytes = read_file(&csv)?;
            let name = file_name(&csv);
            let import = ingest_survey_csv(bytes.as_slice(), &mapping, &ctx_for(&name))
                .map_err(|e| Failure::io(format!("{name}: {e}")))?;
            queue(&catalog, import.submissions, import.issues)
        }
        Command::ImportEad { xml } => {
            let mut incoming = Vec::new();
            for path in &xml {
                let name = file_name(path);
                let sub = ingest_ead(&read_file(path)?, &ctx_for(&name)).map_err(|e| Failure::io(format!("{name}: {e}")))?;
                incoming.push(sub);
            }
            queue(&catalog, incoming, Vec::new())
        }
        Command::ImportGuide { txt } => {
            let name = file_name(&txt);
            let text = String::from_utf8(read_file(&txt)?).map_err(|_| Failure::io(format!("{name}: not UTF-8")))?;
            let import = ingest_print_guide(&text, &ctx_for(&name));
            let corrections = import.corrections.len();
            let mut output = queue(&catalog, import.submissions, import.issues)?;
            output.json["ocr_corrections"] = json!(corrections);
            output.text.push_str(&format!("\n{corrections} OCR corrections applied"));
            Ok(output)
        }
        Command::Review { action } => review(&catalog, &curator, action),
        Command::Amend { id, changes } => {
            let changes = read_json_arg(&changes)?;
            let record = catalog.amend(&id, &curator, &changes)?;
            Ok(Output::new(
                serde_json::to_value(&*record).expect("record serializes"),
                format!("{} amended, now revision {}", record.id, record.revision),
            ))
        }
        Command::Tombstone { id } => {
            let record = catalog.tombstone(&id, &curator)?;
            Ok(Output::new(
                serde_json::to_value(&*record).expect("record serializes"),
                format!("{} tombstoned at revision {}", record.id, record.revision),
            ))
        }
        Command::History { id } => {
            let view = catalog.view();
            let history = view.history(&id).ok_or_else(|| Failure::invalid(format!("record {id} not found"), None))?;
            let text = history
                .iter()
                .map(|e| {
                    format!(
                        "r{} {} {:?} by {} ({})",
                        e.revision,
                        e.at.to_rfc3339(),
                        e.change,
                        e.author.name,
                        e.author.role
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::new(json!({"record_id": id, "entries": history}), text))
        }
        Command::Search(args) => search(&catalog, args),
        Command::Reindex => {
            let handle = IndexHandle::from_view(&catalog.view()).map_err(Failure::io)?;
            let index = handle.current();
            Ok(Output::new(
                json!({"indexed": index.len(), "generation": index.generation()}),
                format!("indexed {} public records", index.len()),
            ))
        }
        Command::ExportSnapshot { path } => {
            let bytes = export_snapshot(&catalog.view());
            std::fs::write(&path, &bytes).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            let snapshot = import_snapshot(&bytes).map_err(Failure::io)?;
            Ok(Output::new(
                serde_json::to_value(&snapshot.manifest).expect("manifest serializes"),
                format!(
                    "wrote {} records to {} (content hash {})",
                    snapshot.manifest.record_count,
                    path.display(),
                    snapshot.manifest.content_hash
                ),
            ))
        }
        Command::VerifySnapshot { path } => {
            let snapshot = import_snapshot(&read_file(&path)?).map_err(|e| Failure::invalid(e, None))?;
            Ok(Output::new(
                serde_json::to_value(&snapshot.manifest).expect("manifest serializes"),
                format!("ok: {} records, content hash {}", snapshot.manifest.record_count, snapshot.manifest.content_hash),
            ))
        }
        Command::Stats => {
            let views = catalog.view().public_views();
            let stats = compute_stats(&views);
            let mut text = format!(
                "{} public collections, about {} recordings",
                stats.total_collections, stats.estimated_total_recordings
            );
            for (kind, n) in &stats.by_repository_type {
                text.push_str(&format!("\n  {kind}: {n}"));
            }
            Ok(Output::new(serde_json::to_value(stats).expect("stats serialize"), text))
        }
        Command::Serve { bind, tokens_file } => {
            let tokens = match tokens_file {
                Some(path) => TokenTable::load(&path).map_err(Failure::io)?,
                None => TokenTable::default(),
            };
            let state = AppState::new(catalog, tokens).map_err(Failure::io)?;
            let runtime = tokio::runtime::Runtime::new().map_err(Failure::io)?;
            runtime
                .block_on(async {
                    let listener = tokio::net::TcpListener::bind(&bind).await?;
                    api::serve(listener, state, |addr| {
                        let _ = writeln!(err, "listening on http://{addr}");
                    })
                    .await
                })
                .map_err(Failure::io)?;
            Ok(Output::new(json!({"stopped": true}), ""))
        }
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Serialize)]
struct QueuedItem<'a> {
    submission_id: &'a str,
    source: &'a str,
    title: &'a str,
    errors: usize,
    warnings: usize,
    duplicates: Vec<&'a str>,
}

/// Queues parsed submissions in one commit and reports each item. Items
/// with validation errors are queued too, for a curator to fix on
/// approval, but make the command exit with status 1.
fn queue(catalog: &Catalog, incoming: Vec<IncomingSubmission>, issues: Vec<IngestIssue>) -> Result<Output, Failure> {
    let queued = catalog.submit_all(incoming.into_iter().map(|s| (s, None)).collect())?;
    let mut report = Vec::new();
    for issue in &issues {
        report.push(format!("{}: {} ({})", issue.location, issue.message, issue.code));
    }
    let mut invalid = 0;
    for sub in &queued {
        for f in &sub.report.errors {
            report.push(format!("{} [{}]: error {} {}: {}", sub.submission_id, sub.source.source_detail, f.field, f.code, f.message));
        }
        for f in &sub.report.warnings {
            report.push(format!("{} [{}]: warning {} {}", sub.submission_id, sub.source.source_detail, f.field, f.code));
        }
        invalid += usize::from(!sub.report.errors.is_empty());
    }
    let items: Vec<QueuedItem> = queued
        .iter()
        .map(|s| QueuedItem {
            submission_id: &s.submission_id,
            source: &s.source.source_detail,
            title: &s.proposed.fields.title,
            errors: s.report.errors.len(),
            warnings: s.report.warnings.len(),
            duplicates: s.duplicates.iter().map(|d| d.existing_id.as_str()).collect(),
        })
        .collect();
    let mut text = format!("{} submissions pending", queued.len());
    if invalid > 0 {
        text.push_str(&format!(" ({invalid} with validation errors)"));
    }
    if !issues.is_empty() {
        text.push_str(&format!("\n{} ingest issues", issues.len()));
    }
    let mut output = Output::new(json!({"queued": items, "issues": issues}), text);
    output.report = report;
    output.code = if invalid > 0 { 1 } else { 0 };
    Ok(output)
}

fn review(catalog: &Catalog, curator: &Principal, action: Review) -> Result<Output, Failure> {
    match action {
        Review::List { state } => {
            let state: SubmissionState = state.parse().map_err(Failure::io)?;
            let view = catalog.view();
            let subs: Vec<&Submission> = view.submissions_in(state).map(|s| &**s).collect();
            let text = subs
                .iter()
                .map(|s| {
                    let mut line = format!(
                        "{}  {:<10} {}  [{}]",
                        s.submission_id,
                        s.requested_tier.as_str(),
                        s.proposed.fields.title,
                        s.source.source_detail
                    );
                    if !s.report.errors.is_empty() {
                        line.push_str(&format!("  {} errors", s.report.errors.len()));
                    }
                    if !s.duplicates.is_empty() {
                        line.push_str(&format!("  possible duplicate of {}", s.duplicates[0].existing_id));
                    }
                    line
                })
                .collect::<Vec<_>>()
                .join("\n");
            let text = if subs.is_empty() { format!("no {} submissions", state.as_str()) } else { text };
            Ok(Output::new(json!({"submissions": subs}), text))
        }
        Review::Show { id } => {
            let view = catalog.view();
            let sub = view
                .submission(&id)
                .ok_or_else(|| Failure::invalid(format!("submission {id} not found"), None))?;
            let json = serde_json::to_value(&**sub).expect("submission serializes");
            let text = serde_json::to_string_pretty(&json).expect("json");
            Ok(Output::new(json, text))
        }
        Review::Approve { id, tier, edits } => {
            let edits = edits.as_deref().map(read_json_arg).transpose()?;
            let record = catalog.approve(&id, curator, edits.as_ref(), tier)?;
            Ok(Output::new(
                serde_json::to_value(&*record).expect("record serializes"),
                format!("{id} approved as record {} ({})", record.id, record.tier()),
            ))
        }
        Review::Reject { id, reason } => {
            let sub = catalog.reject(&id, curator, &reason)?;
            Ok(Output::new(
                serde_json::to_value(&*sub).expect("submission serializes"),
                format!("{id} rejected"),
            ))
        }
    }
}

fn search(catalog: &Catalog, args: SearchArgs) -> Result<Output, Failure> {
    let mut query = SearchQuery::text(args.q).page(args.page, args.page_size);
    for facet in &args.facets {
        let (field, value) = facet
            .split_once('=')
            .ok_or_else(|| Failure::io(format!("--facet expects field=value, got {facet:?}")))?;
        query = query.filter(field, value);
    }
    let handle = IndexHandle::from_view(&catalog.view()).map_err(Failure::io)?;
    let result = handle.current().search(&query).map_err(Failure::io)?;
    let mut text = format!("{} hits", result.total_hits);
    for hit in &result.hits {
        text.push_str(&format!(
            "\n{}  {:>7.3}  {}  ({})",
            hit.id,
            hit.score,
            hit.title.as_deref().unwrap_or("-"),
            hit.repository_name.as_deref().unwrap_or("-")
        ));
    }
    Ok(Output::new(serde_json::to_value(result).expect("result serializes"), text))
}

fn vocab_lint(dir: Option<&Path>) -> Result<Output, Failure> {
    let findings = match dir {
        Some(dir) => lint_dir(dir).map_err(Failure::io)?,
        None => Vocabularies::builtin()
            .schemes()
            .flat_map(|s| lint_text(&format!("{}.json", s.field_name()), &s.to_json()))
            .collect(),
    };
    let text = if findings.is_empty() {
        "vocabularies ok".to_string()
    } else {
        findings
            .iter()
            .map(|f| format!("{}: {}", f.file, f.message))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut output = Output::new(json!({"findings": findings}), text);
    output.code = if findings.is_empty() { 0 } else { 1 };
    Ok(output)
}
