//! docforge mines Python corpora for documented functions and produces
//! structured parameter docstrings.
//!
//! The pipeline has four stages, each usable on its own:
//!
//! 1. **Filter** ([`repo_filter`]) — apply inclusion/exclusion criteria to
//!    repository metadata and walk local corpora for `.py` files.
//! 2. **Extract** ([`py_extract`], [`doc_parse`]) — parse functions,
//!    signatures, and existing docstrings (ReST/Google/NumPy), and rank
//!    docstring completeness.
//! 3. **Build & generate** ([`dataset`], [`directives`], [`compose`],
//!    [`backend`]) — construct the Formatted/Exploded training datasets,
//!    produce the four per-parameter directives (description, datatype,
//!    default, None-acceptance) via pluggable backends or deterministic
//!    baselines, and compose final docstrings.
//! 4. **Evaluate** ([`metrics`]) — corpus BLEU-4, exact+stem METEOR,
//!    micro-F1, Cohen's kappa, and finite-population sample sizes.
//!
//! The `examples/` directory has one runnable example per capability:
//!
//! - `filter_repos` — IEC verdicts over repository metadata
//! - `extract_functions` — signature extraction from Python source
//! - `parse_docstrings` — docstring parsing and completeness ranking
//! - `build_datasets` — Formatted/Exploded/PN dataset construction
//! - `generate_docstrings` — directive bundles composed into docstrings
//! - `evaluate_metrics` — metric computation on candidate/reference pairs
//! - `http_backend` — pointing generation at a JSON-over-HTTP model server
//!
//! The thin `docforge` binary exposes the same pipeline as subcommands
//! (`filter-repos`, `extract`, `build-dataset`, `generate`, `evaluate`,
//! `sample-size`) driven by a TOML config; see [`pipeline`].

pub mod backend;
pub mod compose;
pub mod config;
pub mod dataset;
pub mod directives;
pub mod doc_parse;
pub mod jsonl;
pub mod metrics;
pub mod pipeline;
pub mod py_extract;
pub mod repo_filter;

pub use backend::{
    BackendConfig, BackendError, Classification, ClassificationBackend, ConstantBackend,
    EchoBackend, FailingBackend, GenerationBackend, HttpBackend, ScriptedBackend, TypeCandidate,
    TypeServiceClient,
};
pub use compose::{
    compose_function_docstring, compose_param_block, ComposeStyle, ComposedDocstring,
};
pub use config::{BackendsConfig, ConfigError, PipelineConfig};
pub use dataset::{
    balance, build_formatted, clean_docstring, explode, first_sentence, label_none_acceptance,
    split, DatasetError, ExplodedRecord, FormattedRecord,
};
pub use directives::{
    baseline_description, build_bundle, classify_none, generate_description,
    infer_type_from_literal, predict_type, BackendSet, Directive, DirectiveBundle, Provenance,
    TypePrediction, TypeSource,
};
pub use doc_parse::{
    completeness_rank, has_param_tokens, parse_docstring, CompletenessRank, DocStyle,
    ParamDocEntry, ParsedDocstring, Rank,
};
pub use jsonl::{
    read_jsonl, read_jsonl_lenient, sha256_hex, sha256_hex_file, write_jsonl, JsonlError,
    SkippedLine,
};
pub use metrics::{
    accuracy, bleu4, bleu4_with, cohens_kappa, evaluate_label_pairs, evaluate_text_pairs, meteor,
    meteor_mean, micro_f1, sample_size, tokenize, MetricReport, MetricsError, Smoothing,
};
pub use pipeline::{
    cmd_build_dataset, cmd_evaluate, cmd_extract, cmd_filter_repos, cmd_generate,
    cmd_sample_size, run_hermetic_pipeline, CommandOutcome, ComposedLine, KeyedLine, Manifest,
    PipelineError, VerdictLine,
};
pub use py_extract::{
    extract_defaults, extract_functions, extract_parameters, is_method, passes_function_filters,
    FunctionRecord, ParamKind, ParameterInfo, SourceFile,
};
pub use repo_filter::{
    apply_iec, scan_corpus, CorpusScan, IecConfig, IecVerdict, PartialRepoMetadata, RepoMetadata,
};
