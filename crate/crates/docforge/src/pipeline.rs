//! The six pipeline commands behind the CLI: filter-repos, extract,
//! build-dataset, generate, evaluate, and sample-size.
//!
//! Every command writes its artifacts plus a manifest recording input
//! hashes, the seed, a config digest, stage counts, and output hashes —
//! never timestamps — so hermetic reruns are byte-identical and provably
//! so. Per-file and per-function work runs on a bounded worker pool with
//! order-preserving collection; failures are isolated and counted against
//! configurable thresholds (1% malformed metadata, 10% generation
//! failures) instead of killing batch runs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

use crate::backend::{BackendError, HttpBackend};
use crate::compose::{compose_function_docstring_styled, ComposeError};
use crate::config::PipelineConfig;
use crate::dataset::{
    balance, build_formatted, explode, split, DatasetError, ExplodedRecord, FormattedRecord,
};
use crate::directives::{build_bundle, BackendSet, DirectiveError};
use crate::doc_parse::{completeness_rank, has_param_tokens, parse_docstring, Rank};
use crate::jsonl::{
    read_jsonl, read_jsonl_lenient, sha256_hex, sha256_hex_file, write_jsonl, JsonlError,
};
use crate::metrics::{evaluate_label_pairs, evaluate_text_pairs, sample_size, MetricsError, Smoothing};
use crate::py_extract::{
    extract_functions, extract_functions_with_layout, extract_parameters, passes_function_filters,
    FunctionRecord, SourceFile,
};
use crate::repo_filter::{apply_iec, scan_corpus, MetadataError, PartialRepoMetadata, ScanError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Directive(#[from] DirectiveError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("duplicate id {id:?} in {path}")]
    DuplicateId { id: String, path: String },
    #[error(
        "candidate/reference ids disagree; missing from candidates: {missing_from_candidates:?}; \
         missing from references: {missing_from_references:?}"
    )]
    KeyMismatch {
        missing_from_candidates: Vec<String>,
        missing_from_references: Vec<String>,
    },
    #[error("record {id:?} lacks the {field:?} field required by this mode")]
    MissingRecordField { id: String, field: &'static str },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// What a command did: its exit code, machine-readable stage counts, and
/// the human summary lines the CLI prints.
#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub counts: BTreeMap<String, u64>,
    pub lines: Vec<String>,
}

impl CommandOutcome {
    fn count(&mut self, key: &str, value: u64) {
        self.counts.insert(key.to_string(), value);
    }
}

/// Reproducibility sidecar written next to every command's outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// Input name → sha256 of its content.
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub config_digest: String,
    pub counts: BTreeMap<String, u64>,
    /// Output file name → sha256 of its content.
    pub outputs: BTreeMap<String, String>,
}

fn write_manifest(dir: &Path, name: &str, manifest: &Manifest) -> Result<(), PipelineError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(io_error(&path))
}

fn ensure_output_dir(config: &PipelineConfig) -> Result<(), PipelineError> {
    std::fs::create_dir_all(&config.output_dir).map_err(io_error(&config.output_dir))
}

fn hash_outputs(
    dir: &Path,
    names: &[&str],
) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut outputs = BTreeMap::new();
    for name in names {
        outputs.insert(name.to_string(), sha256_hex_file(&dir.join(name))?);
    }
    Ok(outputs)
}

fn worker_pool(config: &PipelineConfig) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .expect("worker pool")
}

// ---------------------------------------------------------------------------
// filter-repos
// ---------------------------------------------------------------------------

/// One line of verdicts.jsonl: either a determinate IEC verdict or an
/// indeterminate marker naming the missing metadata field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub repo_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub included: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triggered_codes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unchecked: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub indeterminate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_field: Option<String>,
}

/// Apply the IEC to a metadata JSONL file, one verdict per parseable line.
/// Lines missing required fields yield indeterminate verdicts; unparseable
/// or invalid lines are counted and, above the malformed threshold, flip
/// the exit code.
pub fn cmd_filter_repos(
    metadata_path: &Path,
    config: &PipelineConfig,
) -> Result<CommandOutcome, PipelineError> {
    ensure_output_dir(config)?;
    let (records, bad_lines) = read_jsonl_lenient::<PartialRepoMetadata>(metadata_path)?;
    let total_lines = records.len() + bad_lines.len();

    let mut outcome = CommandOutcome::default();
    let mut verdicts: Vec<VerdictLine> = Vec::new();
    let mut malformed = bad_lines.len() as u64;
    let mut indeterminate = 0u64;
    let mut included = 0u64;
    let mut excluded = 0u64;
    for record in records {
        let repo_id = record.repo_id.clone().unwrap_or_else(|| "<unknown>".into());
        match record.complete() {
            Ok(meta) => {
                let verdict = apply_iec(&meta, &config.iec);
                if verdict.included {
                    included += 1;
                } else {
                    excluded += 1;
                }
                verdicts.push(VerdictLine {
                    repo_id: meta.repo_id,
                    included: Some(verdict.included),
                    triggered_codes: verdict.triggered_codes,
                    unchecked: verdict.unchecked,
                    indeterminate: false,
                    missing_field: None,
                });
            }
            Err(MetadataError::MissingField(field)) => {
                indeterminate += 1;
                verdicts.push(VerdictLine {
                    repo_id,
                    included: None,
                    triggered_codes: Vec::new(),
                    unchecked: Vec::new(),
                    indeterminate: true,
                    missing_field: Some(field.to_string()),
                });
            }
            Err(MetadataError::FractionSum(_)) => {
                malformed += 1;
            }
        }
    }

    let verdicts_path = config.output_dir.join("verdicts.jsonl");
    write_jsonl(&verdicts_path, &verdicts)?;

    outcome.count("lines", total_lines as u64);
    outcome.count("malformed", malformed);
    outcome.count("indeterminate", indeterminate);
    outcome.count("included", included);
    outcome.count("excluded", excluded);
    let over_threshold = total_lines > 0
        && malformed as f64 / total_lines as f64 > config.malformed_threshold;
    outcome.exit_code = i32::from(over_threshold);
    outcome.lines.push(format!(
        "filter-repos: {included} included, {excluded} excluded, {indeterminate} indeterminate, \
         {malformed} malformed of {total_lines} line(s)"
    ));
    if over_threshold {
        outcome.lines.push(format!(
            "error: malformed fraction exceeds threshold {}",
            config.malformed_threshold
        ));
    }

    let manifest = Manifest {
        command: "filter-repos".into(),
        inputs: BTreeMap::from([(
            metadata_path.display().to_string(),
            sha256_hex_file(metadata_path)?,
        )]),
        seed: config.seed,
        config_digest: config.digest(),
        counts: outcome.counts.clone(),
        outputs: hash_outputs(&config.output_dir, &["verdicts.jsonl"])?,
    };
    write_manifest(&config.output_dir, "filter_repos_manifest.json", &manifest)?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

/// Aggregate digest of the scanned corpus: hash of every (path, file hash)
/// pair in scan order.
fn corpus_digest(files: &[SourceFile]) -> String {
    let mut acc = String::new();
    for file in files {
        acc.push_str(&file.path);
        acc.push('\n');
        acc.push_str(&sha256_hex(file.text.as_bytes()));
        acc.push('\n');
    }
    sha256_hex(acc.as_bytes())
}

/// Walk the corpus and extract every function that survives the function
/// filters (≥1 effective parameter, value-bearing return) and whose
/// docstring carries at least one parameter-documentation token.
pub fn cmd_extract(config: &PipelineConfig) -> Result<CommandOutcome, PipelineError> {
    ensure_output_dir(config)?;
    let scan = scan_corpus(&config.corpus_root)?;

    let pool = worker_pool(config);
    let per_file: Vec<Result<Vec<FunctionRecord>, ()>> = pool.install(|| {
        scan.files
            .par_iter()
            .map(|file| extract_functions(file).map_err(|_| ()))
            .collect()
    });

    let mut outcome = CommandOutcome::default();
    let mut skipped_syntax = 0u64;
    let mut extracted = 0u64;
    let mut after_function_filters = 0u64;
    let mut kept: Vec<FunctionRecord> = Vec::new();
    for result in per_file {
        match result {
            Err(()) => skipped_syntax += 1,
            Ok(records) => {
                extracted += records.len() as u64;
                for record in records {
                    if !passes_function_filters(&record) {
                        continue;
                    }
                    after_function_filters += 1;
                    let has_tokens = record
                        .raw_docstring
                        .as_deref()
                        .map(has_param_tokens)
                        .unwrap_or(false);
                    if has_tokens {
                        kept.push(record);
                    }
                }
            }
        }
    }

    let functions_path = config.output_dir.join("functions.jsonl");
    write_jsonl(&functions_path, &kept)?;

    outcome.count("files_scanned", scan.files.len() as u64);
    outcome.count("files_skipped_undecodable", scan.skipped as u64);
    outcome.count("files_skipped_syntax", skipped_syntax);
    outcome.count("functions_extracted", extracted);
    outcome.count("functions_passing_filters", after_function_filters);
    outcome.count("functions_with_param_tokens", kept.len() as u64);
    outcome.lines.push(format!(
        "extract: {} function(s) kept of {} extracted from {} file(s)",
        kept.len(),
        extracted,
        scan.files.len()
    ));
    if kept.is_empty() {
        outcome
            .lines
            .push("warning: no functions survived the filters".into());
    }

    let manifest = Manifest {
        command: "extract".into(),
        inputs: BTreeMap::from([("corpus".to_string(), corpus_digest(&scan.files))]),
        seed: config.seed,
        config_digest: config.digest(),
        counts: outcome.counts.clone(),
        outputs: hash_outputs(&config.output_dir, &["functions.jsonl"])?,
    };
    write_manifest(&config.output_dir, "extract_manifest.json", &manifest)?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// build-dataset
// ---------------------------------------------------------------------------

/// Build the Formatted/Exploded/PN datasets from extracted functions.
/// Only rank-one functions enter the Formatted dataset; the manifest
/// records the full rank histogram. The PN dataset is re-split after
/// balancing, independently of the Exploded split.
pub fn cmd_build_dataset(
    functions_path: &Path,
    config: &PipelineConfig,
) -> Result<CommandOutcome, PipelineError> {
    ensure_output_dir(config)?;
    let functions: Vec<FunctionRecord> = read_jsonl(functions_path)?;

    let mut histogram: BTreeMap<Rank, u64> = BTreeMap::new();
    let mut rank_one_pairs = Vec::new();
    for function in &functions {
        let parsed = parse_docstring(function.raw_docstring.as_deref().unwrap_or(""));
        let params = extract_parameters(function);
        let rank = completeness_rank(&parsed, &params).rank;
        *histogram.entry(rank).or_insert(0) += 1;
        if rank == Rank::One {
            rank_one_pairs.push((function.clone(), parsed));
        }
    }

    let formatted: Vec<FormattedRecord> = build_formatted(&rank_one_pairs)?;
    let exploded: Vec<ExplodedRecord> = formatted.iter().flat_map(explode).collect();

    let dir = &config.output_dir;
    write_jsonl(&dir.join("formatted.jsonl"), &formatted)?;
    write_jsonl(&dir.join("exploded.jsonl"), &exploded)?;

    let mut outcome = CommandOutcome::default();
    let mut output_names: Vec<&str> = vec!["formatted.jsonl", "exploded.jsonl"];

    if exploded.len() >= 2 {
        let (train, valid) = split(&exploded, config.train_fraction, config.seed)?;
        write_jsonl(&dir.join("exploded_train.jsonl"), &train)?;
        write_jsonl(&dir.join("exploded_valid.jsonl"), &valid)?;
        output_names.extend(["exploded_train.jsonl", "exploded_valid.jsonl"]);
        outcome.count("exploded_train", train.len() as u64);
        outcome.count("exploded_valid", valid.len() as u64);
    } else {
        outcome
            .lines
            .push("warning: too few exploded records to split".into());
    }

    let positives = exploded.iter().filter(|r| r.none_label == 1).count() as u64;
    let negatives = exploded.len() as u64 - positives;
    match balance(&exploded, config.seed) {
        Ok(balanced) => {
            write_jsonl(&dir.join("pn_balanced.jsonl"), &balanced)?;
            output_names.push("pn_balanced.jsonl");
            outcome.count("pn_balanced", balanced.len() as u64);
            // The PN classifier gets its own split, made after balancing.
            if balanced.len() >= 2 {
                let (train, valid) = split(&balanced, config.train_fraction, config.seed)?;
                write_jsonl(&dir.join("pn_train.jsonl"), &train)?;
                write_jsonl(&dir.join("pn_valid.jsonl"), &valid)?;
                output_names.extend(["pn_train.jsonl", "pn_valid.jsonl"]);
                outcome.count("pn_train", train.len() as u64);
                outcome.count("pn_valid", valid.len() as u64);
            }
        }
        Err(DatasetError::MissingClass { label }) => {
            write_jsonl::<ExplodedRecord>(&dir.join("pn_balanced.jsonl"), &[])?;
            output_names.push("pn_balanced.jsonl");
            outcome.count("pn_balanced", 0);
            outcome.lines.push(format!(
                "warning: PN balancing skipped, no records with label {label}"
            ));
        }
        Err(other) => return Err(other.into()),
    }

    for (rank, key) in [
        (Rank::One, "rank_one"),
        (Rank::Two, "rank_two"),
        (Rank::Three, "rank_three"),
        (Rank::Inconsistent, "rank_inconsistent"),
    ] {
        outcome.count(key, histogram.get(&rank).copied().unwrap_or(0));
    }
    outcome.count("functions", functions.len() as u64);
    outcome.count("formatted", formatted.len() as u64);
    outcome.count("exploded", exploded.len() as u64);
    outcome.count("label_positive", positives);
    outcome.count("label_negative", negatives);

    let histogram_line = format!(
        "build-dataset: ranks one={} two={} three={} inconsistent={} → {} formatted, {} exploded",
        outcome.counts["rank_one"],
        outcome.counts["rank_two"],
        outcome.counts["rank_three"],
        outcome.counts["rank_inconsistent"],
        formatted.len(),
        exploded.len()
    );
    outcome.lines.insert(0, histogram_line);
    if formatted.is_empty() {
        outcome.exit_code = 1;
        outcome
            .lines
            .push("error: no rank-one functions; nothing to build".into());
    }

    let manifest = Manifest {
        command: "build-dataset".into(),
        inputs: BTreeMap::from([(
            functions_path.display().to_string(),
            sha256_hex_file(functions_path)?,
        )]),
        seed: config.seed,
        config_digest: config.digest(),
        counts: outcome.counts.clone(),
        outputs: hash_outputs(dir, &output_names)?,
    };
    write_manifest(dir, "manifest.json", &manifest)?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

/// One line of docstrings.jsonl.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedLine {
    pub qualified_name: String,
    pub text: String,
}

struct GenerationEngines {
    generation: Option<HttpBackend>,
    classification: Option<HttpBackend>,
    type_service: Option<HttpBackend>,
}

impl GenerationEngines {
    fn from_config(config: &PipelineConfig) -> Result<Self, PipelineError> {
        let build = |cfg: &Option<crate::backend::BackendConfig>| -> Result<_, PipelineError> {
            cfg.as_ref()
                .map(|c| HttpBackend::new(c.clone()))
                .transpose()
                .map_err(Into::into)
        };
        Ok(GenerationEngines {
            generation: build(&config.backends.generation)?,
            classification: build(&config.backends.classification)?,
            type_service: build(&config.backends.type_service)?,
        })
    }

    fn as_set(&self) -> BackendSet<'_> {
        BackendSet {
            generation: self
                .generation
                .as_ref()
                .map(|b| b as &dyn crate::backend::GenerationBackend),
            classification: self
                .classification
                .as_ref()
                .map(|b| b as &dyn crate::backend::ClassificationBackend),
            type_service: self
                .type_service
                .as_ref()
                .map(|b| b as &dyn crate::backend::TypeServiceClient),
        }
    }
}

enum Generated {
    Done(ComposedLine, String),
    SkippedNoParams(String),
    Failed(String, String),
}

/// Compose one docstring per function via directive bundles. Per-function
/// failures are isolated; the run exits nonzero only when their fraction
/// exceeds the configured threshold. With `rewrite`, source files under
/// the corpus root are updated in place, each docstring installed as its
/// function's leading string literal.
pub fn cmd_generate(
    functions_path: &Path,
    config: &PipelineConfig,
    rewrite: bool,
) -> Result<CommandOutcome, PipelineError> {
    ensure_output_dir(config)?;
    let functions: Vec<FunctionRecord> = read_jsonl(functions_path)?;
    let engines = GenerationEngines::from_config(config)?;

    let pool = worker_pool(config);
    let generated: Vec<Generated> = pool.install(|| {
        functions
            .par_iter()
            .map(|function| {
                let backends = engines.as_set();
                let params = extract_parameters(function);
                if params.is_empty() {
                    return Generated::SkippedNoParams(function.qualified_name.clone());
                }
                let bundles: Result<Vec<_>, DirectiveError> = (1..=params.len())
                    .map(|i| build_bundle(function, i, &backends))
                    .collect();
                let composed = bundles.map_err(PipelineError::from).and_then(|bundles| {
                    compose_function_docstring_styled(&bundles, config.compose_style)
                        .map_err(Into::into)
                });
                match composed {
                    Ok(doc) => Generated::Done(
                        ComposedLine {
                            qualified_name: function.qualified_name.clone(),
                            text: doc.text,
                        },
                        function.file_path.clone(),
                    ),
                    Err(error) => {
                        Generated::Failed(function.qualified_name.clone(), error.to_string())
                    }
                }
            })
            .collect()
    });

    let mut outcome = CommandOutcome::default();
    let mut lines: Vec<ComposedLine> = Vec::new();
    let mut by_file: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut skipped = 0u64;
    let mut failures: Vec<(String, String)> = Vec::new();
    for item in generated {
        match item {
            Generated::Done(line, file_path) => {
                by_file
                    .entry(file_path)
                    .or_default()
                    .insert(line.qualified_name.clone(), line.text.clone());
                lines.push(line);
            }
            Generated::SkippedNoParams(name) => {
                skipped += 1;
                outcome
                    .lines
                    .push(format!("skipped {name}: no parameters (E2)"));
            }
            Generated::Failed(name, reason) => failures.push((name, reason)),
        }
    }

    let docstrings_path = config.output_dir.join("docstrings.jsonl");
    write_jsonl(&docstrings_path, &lines)?;

    outcome.count("functions", functions.len() as u64);
    outcome.count("generated", lines.len() as u64);
    outcome.count("skipped_no_params", skipped);
    outcome.count("failures", failures.len() as u64);
    for (name, reason) in &failures {
        outcome.lines.push(format!("failed {name}: {reason}"));
    }
    let attempted = lines.len() + failures.len();
    let over_threshold = attempted > 0
        && failures.len() as f64 / attempted as f64 > config.generation_failure_threshold;
    outcome.exit_code = i32::from(over_threshold);

    if rewrite {
        let (files, rewritten) = rewrite_sources(&config.corpus_root, &by_file)?;
        outcome.count("files_rewritten", files);
        outcome.count("functions_rewritten", rewritten);
    }

    outcome.lines.insert(
        0,
        format!(
            "generate: {} docstring(s), {} skipped, {} failure(s)",
            lines.len(),
            skipped,
            failures.len()
        ),
    );

    let manifest = Manifest {
        command: "generate".into(),
        inputs: BTreeMap::from([(
            functions_path.display().to_string(),
            sha256_hex_file(functions_path)?,
        )]),
        seed: config.seed,
        config_digest: config.digest(),
        counts: outcome.counts.clone(),
        outputs: hash_outputs(&config.output_dir, &["docstrings.jsonl"])?,
    };
    write_manifest(&config.output_dir, "generate_manifest.json", &manifest)?;
    Ok(outcome)
}

/// Install composed docstrings into their source files. Files are edited
/// bottom-up so earlier replacements don't shift later line numbers;
/// one-liner defs are left alone.
fn rewrite_sources(
    corpus_root: &Path,
    by_file: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<(u64, u64), PipelineError> {
    let mut files_rewritten = 0u64;
    let mut functions_rewritten = 0u64;
    for (relative, docs) in by_file {
        let path = corpus_root.join(relative);
        let text = std::fs::read_to_string(&path).map_err(io_error(&path))?;
        let source = SourceFile {
            path: relative.clone(),
            text,
        };
        let Ok(with_layout) = extract_functions_with_layout(&source) else {
            continue;
        };
        let mut edits: Vec<(&str, crate::py_extract::FunctionLayout)> = Vec::new();
        for (record, layout) in &with_layout {
            if let Some(doc) = docs.get(&record.qualified_name) {
                if !layout.one_liner {
                    edits.push((doc.as_str(), layout.clone()));
                }
            }
        }
        if edits.is_empty() {
            continue;
        }
        edits.sort_by_key(|(_, layout)| std::cmp::Reverse(layout.def_line));
        let mut lines: Vec<String> = source.text.lines().map(str::to_string).collect();
        for (doc, layout) in &edits {
            let indent = " ".repeat(layout.body_indent as usize);
            let mut block: Vec<String> = Vec::new();
            let doc_lines: Vec<&str> = doc.lines().collect();
            if doc_lines.len() == 1 {
                block.push(format!("{indent}\"\"\"{}\"\"\"", doc_lines[0]));
            } else {
                block.push(format!("{indent}\"\"\"{}", doc_lines[0]));
                for line in &doc_lines[1..] {
                    block.push(format!("{indent}{line}"));
                }
                block.push(format!("{indent}\"\"\""));
            }
            match layout.docstring_lines {
                Some((first, last)) => {
                    lines.splice(first as usize - 1..last as usize, block);
                }
                None => {
                    lines.splice(
                        layout.header_last_line as usize..layout.header_last_line as usize,
                        block,
                    );
                }
            }
            functions_rewritten += 1;
        }
        let mut new_text = lines.join("\n");
        if source.text.ends_with('\n') {
            new_text.push('\n');
        }
        std::fs::write(&path, new_text).map_err(io_error(&path))?;
        files_rewritten += 1;
    }
    Ok((files_rewritten, functions_rewritten))
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

/// One line of a candidates/references file: an id plus either generated
/// text or a 0/1 label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyedLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u8>,
}

fn index_keyed(
    path: &Path,
) -> Result<(Vec<String>, BTreeMap<String, KeyedLine>), PipelineError> {
    let records: Vec<KeyedLine> = read_jsonl(path)?;
    let mut order = Vec::with_capacity(records.len());
    let mut map = BTreeMap::new();
    for record in records {
        if map.contains_key(&record.id) {
            return Err(PipelineError::DuplicateId {
                id: record.id,
                path: path.display().to_string(),
            });
        }
        order.push(record.id.clone());
        map.insert(record.id.clone(), record);
    }
    Ok((order, map))
}

/// Join candidates and references by id and score them. When every record
/// on both sides carries a label, the classification metrics (micro-F1,
/// accuracy, kappa) are computed; otherwise the text metrics are.
pub fn cmd_evaluate(
    candidates_path: &Path,
    references_path: &Path,
    config: &PipelineConfig,
) -> Result<CommandOutcome, PipelineError> {
    ensure_output_dir(config)?;
    let (order, candidates) = index_keyed(candidates_path)?;
    let (_, references) = index_keyed(references_path)?;

    let candidate_ids: BTreeSet<&String> = candidates.keys().collect();
    let reference_ids: BTreeSet<&String> = references.keys().collect();
    if candidate_ids != reference_ids {
        return Err(PipelineError::KeyMismatch {
            missing_from_candidates: reference_ids
                .difference(&candidate_ids)
                .map(|s| s.to_string())
                .collect(),
            missing_from_references: candidate_ids
                .difference(&reference_ids)
                .map(|s| s.to_string())
                .collect(),
        });
    }

    let label_mode = !candidates.is_empty()
        && candidates.values().all(|r| r.label.is_some())
        && references.values().all(|r| r.label.is_some());

    let report = if label_mode {
        let mut predictions = Vec::with_capacity(order.len());
        let mut labels = Vec::with_capacity(order.len());
        for id in &order {
            predictions.push(candidates[id].label.unwrap());
            labels.push(references[id].label.unwrap());
        }
        evaluate_label_pairs(&predictions, &labels)?
    } else {
        let mut candidate_texts = Vec::with_capacity(order.len());
        let mut reference_texts = Vec::with_capacity(order.len());
        for id in &order {
            let text_of = |record: &KeyedLine| -> Result<String, PipelineError> {
                record
                    .text
                    .clone()
                    .ok_or(PipelineError::MissingRecordField {
                        id: record.id.clone(),
                        field: "text",
                    })
            };
            candidate_texts.push(text_of(&candidates[id])?);
            reference_texts.push(text_of(&references[id])?);
        }
        let smoothing = match config.bleu_epsilon {
            Some(eps) => Smoothing::AddEpsilon(eps),
            None => Smoothing::None,
        };
        evaluate_text_pairs(&candidate_texts, &reference_texts, smoothing)?
    };

    let report_path = config.output_dir.join("report.json");
    let mut report_text = serde_json::to_string_pretty(&report).expect("report serializes");
    report_text.push('\n');
    std::fs::write(&report_path, report_text).map_err(io_error(&report_path))?;

    let mut outcome = CommandOutcome::default();
    outcome.count("pairs", report.n_samples as u64);
    outcome.lines.push(format!(
        "evaluate: bleu4={:.4} meteor={:.4} over {} pair(s) [exact+stem METEOR]",
        report.bleu4, report.meteor, report.n_samples
    ));
    if let (Some(f1), Some(acc), Some(kappa)) = (report.micro_f1, report.accuracy, report.kappa) {
        outcome.lines.push(format!(
            "evaluate: micro_f1={f1:.4} accuracy={acc:.4} kappa={kappa:.4}"
        ));
    }

    let manifest = Manifest {
        command: "evaluate".into(),
        inputs: BTreeMap::from([
            (
                candidates_path.display().to_string(),
                sha256_hex_file(candidates_path)?,
            ),
            (
                references_path.display().to_string(),
                sha256_hex_file(references_path)?,
            ),
        ]),
        seed: config.seed,
        config_digest: config.digest(),
        counts: outcome.counts.clone(),
        outputs: hash_outputs(&config.output_dir, &["report.json"])?,
    };
    write_manifest(&config.output_dir, "evaluate_manifest.json", &manifest)?;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// sample-size
// ---------------------------------------------------------------------------

/// Finite-population sample size; shells out to the metrics formula.
pub fn cmd_sample_size(
    population: u64,
    confidence: f64,
    margin: f64,
) -> Result<u64, PipelineError> {
    Ok(sample_size(population, confidence, margin)?)
}

/// Convenience runner for the hermetic extract → build-dataset → generate
/// chain used by examples and tests.
pub fn run_hermetic_pipeline(
    config: &PipelineConfig,
) -> Result<Vec<CommandOutcome>, PipelineError> {
    let extract = cmd_extract(config)?;
    let functions = config.output_dir.join("functions.jsonl");
    let build = cmd_build_dataset(&functions, config)?;
    let generate = cmd_generate(&functions, config, false)?;
    Ok(vec![extract, build, generate])
}
