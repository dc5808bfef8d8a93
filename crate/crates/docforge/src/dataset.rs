//! Dataset construction: docstring cleaning, the Formatted dataset
//! (rank-one functions in a unified template), its per-parameter Exploded
//! counterpart, None-acceptance labels, class balancing, and the
//! group-aware train/valid split.
//!
//! The Exploded records pair a `"parameter N: "`-prefixed copy of the
//! function source with the first sentence of the N-th parameter's cleaned
//! description, plus a binary None-acceptance label derived from the full
//! description. Balancing and splitting are seeded and deterministic; the
//! split keeps all records of one source function on the same side so the
//! same source text never appears in both train and valid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use thiserror::Error;

use crate::compose::param_field;
use crate::doc_parse::{completeness_rank, ParamDocEntry, ParsedDocstring, Rank};
use crate::py_extract::{extract_parameters, FunctionRecord};

/// One rank-one function with its unified-format training target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormattedRecord {
    pub function: FunctionRecord,
    pub cleaned_params: Vec<ParamDocEntry>,
    pub target_text: String,
}

/// One (code, "parameter N") → single-sentence description pair, plus the
/// None-acceptance label used for the classifier dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplodedRecord {
    pub input_text: String,
    /// 1-based N, matching the prompt prefix.
    pub param_index: usize,
    pub param_name: String,
    pub target_description: String,
    pub none_label: u8,
    pub full_description: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("{qualified_name} has completeness rank {rank:?}; the Formatted dataset only admits rank one")]
    NotRankOne {
        qualified_name: String,
        rank: Rank,
    },
    #[error("cannot balance: no records with label {label}")]
    MissingClass { label: u8 },
    #[error("train_fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("need at least 2 records to split, got {0}")]
    TooFewRecords(usize),
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z][A-Za-z0-9+.\-]*://\S+").unwrap())
}

fn email_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,}").unwrap())
}

fn none_word_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\bNone\b").unwrap())
}

/// Normalize a raw docstring: drop doctest blocks (runs of lines starting
/// with `>>>`, through the next blank line) and bare "Examples"-style header
/// lines, strip URLs and email addresses, then collapse all whitespace —
/// newlines included — to single spaces.
pub fn clean_docstring(raw: &str) -> String {
    let mut kept: Vec<&str> = Vec::new();
    let mut in_doctest = false;
    for line in raw.lines() {
        let trimmed = line.trim();
        if in_doctest {
            if trimmed.is_empty() {
                in_doctest = false;
            }
            continue;
        }
        if trimmed.starts_with(">>>") {
            in_doctest = true;
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        if matches!(lower.as_str(), "example" | "examples" | "example:" | "examples:") {
            continue;
        }
        kept.push(line);
    }
    let joined = kept.join("\n");
    let no_urls = url_re().replace_all(&joined, "");
    let no_emails = email_re().replace_all(&no_urls, "");
    no_emails.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Abbreviations whose trailing dot never ends a sentence. Compared after
/// lowercasing, so "Fig." and "fig." are both guarded. Extensible via
/// [`first_sentence_with_guards`].
pub const DEFAULT_ABBREVIATIONS: [&str; 7] =
    ["e.g.", "i.e.", "etc.", "cf.", "vs.", "fig.", "eq."];

/// First sentence of `text` under the default abbreviation guard list.
pub fn first_sentence(text: &str) -> String {
    first_sentence_with_guards(text, &[])
}

/// First sentence, guarding both the default abbreviations and `extra`
/// entries (each compared lowercase, including their trailing dot).
///
/// A `.` terminates the sentence when it is followed by whitespace or the
/// end of the text and the whitespace-delimited token it closes — leading
/// punctuation stripped, lowercased — is not a guarded abbreviation. A dot
/// inside a decimal like `3.14` is followed by a digit and so never
/// qualifies. Without any terminator the whole text is the sentence.
pub fn first_sentence_with_guards(text: &str, extra: &[String]) -> String {
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b != b'.' {
            continue;
        }
        let at_end = i + 1 == bytes.len();
        let followed_by_space = !at_end && text[i + 1..].chars().next().unwrap().is_whitespace();
        if !(at_end || followed_by_space) {
            continue;
        }
        if is_guarded_token(text, i, extra) {
            continue;
        }
        return text[..=i].to_string();
    }
    text.to_string()
}

/// Whether the token ending at the dot at byte `dot` is a guarded
/// abbreviation: scan back to the previous whitespace, strip leading
/// non-alphanumeric characters, lowercase, and look it up.
fn is_guarded_token(text: &str, dot: usize, extra: &[String]) -> bool {
    let start = text[..dot]
        .rfind(char::is_whitespace)
        .map(|p| p + text[p..].chars().next().unwrap().len_utf8())
        .unwrap_or(0);
    let token = &text[start..=dot];
    let token = token.trim_start_matches(|c: char| !c.is_alphanumeric());
    if token.is_empty() {
        return false;
    }
    let token = token.to_lowercase();
    DEFAULT_ABBREVIATIONS.iter().any(|a| *a == token)
        || extra.iter().any(|a| a.to_lowercase() == token)
}

/// 1 iff "None" occurs as a whole word (case-sensitive) in the description.
pub fn label_none_acceptance(full_description: &str) -> u8 {
    u8::from(none_word_re().is_match(full_description))
}

/// Build the Formatted dataset from (function, parsed docstring) pairs.
/// Every input must rank one; the first offender aborts the build.
///
/// Documented entries are paired with header parameters by name when the
/// name sets agree exactly, otherwise positionally (the counts match by
/// rank one either way). Entry descriptions are cleaned; the target is the
/// `:param`/`:type` template over all parameters, blocks joined by single
/// spaces.
pub fn build_formatted(
    pairs: &[(FunctionRecord, ParsedDocstring)],
) -> Result<Vec<FormattedRecord>, DatasetError> {
    pairs.iter().map(|(f, p)| format_one(f, p)).collect()
}

fn format_one(
    function: &FunctionRecord,
    parsed: &ParsedDocstring,
) -> Result<FormattedRecord, DatasetError> {
    let params = extract_parameters(function);
    let ranking = completeness_rank(parsed, &params);
    if ranking.rank != Rank::One {
        return Err(DatasetError::NotRankOne {
            qualified_name: function.qualified_name.clone(),
            rank: ranking.rank,
        });
    }

    let header_names: BTreeSet<&str> = params.iter().map(|p| p.name.as_str()).collect();
    let doc_names: BTreeSet<&str> = parsed.params.iter().map(|e| e.name.as_str()).collect();
    let by_name = header_names == doc_names;

    let cleaned_params: Vec<ParamDocEntry> = params
        .iter()
        .enumerate()
        .map(|(i, param)| {
            let entry = if by_name {
                parsed
                    .params
                    .iter()
                    .find(|e| e.name == param.name)
                    .expect("name sets match")
            } else {
                &parsed.params[i]
            };
            ParamDocEntry {
                name: param.name.clone(),
                type_text: entry.type_text.clone(),
                description: clean_docstring(&entry.description),
            }
        })
        .collect();

    let target_text = cleaned_params
        .iter()
        .map(|e| param_field(&e.name, &e.description, e.type_text.as_deref()))
        .collect::<Vec<_>>()
        .join(" ");

    Ok(FormattedRecord {
        function: function.clone(),
        cleaned_params,
        target_text,
    })
}

/// Explode one Formatted record into per-parameter training pairs: the i-th
/// output (1-based) prompts for parameter i and targets the first sentence
/// of its cleaned description; the None label reads the full description.
pub fn explode(record: &FormattedRecord) -> Vec<ExplodedRecord> {
    record
        .cleaned_params
        .iter()
        .enumerate()
        .map(|(i, entry)| ExplodedRecord {
            input_text: format!("parameter {}: {}", i + 1, record.function.source_text),
            param_index: i + 1,
            param_name: entry.name.clone(),
            target_description: first_sentence(&entry.description),
            none_label: label_none_acceptance(&entry.description),
            full_description: entry.description.clone(),
        })
        .collect()
}

/// The function source shared by all records exploded from one function:
/// everything after the "parameter N: " prefix.
fn group_key(record: &ExplodedRecord) -> &str {
    let text = &record.input_text;
    text.strip_prefix("parameter ")
        .and_then(|rest| rest.trim_start_matches(|c: char| c.is_ascii_digit()).strip_prefix(": "))
        .unwrap_or(text)
}

/// Down-sample the majority label uniformly at random (seeded) to match the
/// minority count, then shuffle. Both classes must be present.
pub fn balance(records: &[ExplodedRecord], seed: u64) -> Result<Vec<ExplodedRecord>, DatasetError> {
    let positives: Vec<usize> = indices_with_label(records, 1);
    let negatives: Vec<usize> = indices_with_label(records, 0);
    if positives.is_empty() {
        return Err(DatasetError::MissingClass { label: 1 });
    }
    if negatives.is_empty() {
        return Err(DatasetError::MissingClass { label: 0 });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Sampling positions (not labels) keeps the draw identical when every
    // label is flipped, which is what makes balance label-symmetric.
    let (minority, majority) = if positives.len() <= negatives.len() {
        (&positives, &negatives)
    } else {
        (&negatives, &positives)
    };
    let mut kept: Vec<usize> = minority.clone();
    if minority.len() == majority.len() {
        kept.extend(majority.iter().copied());
    } else {
        let sampled = rand::seq::index::sample(&mut rng, majority.len(), minority.len());
        kept.extend(sampled.iter().map(|i| majority[i]));
    }
    kept.sort_unstable();
    let mut out: Vec<ExplodedRecord> = kept.into_iter().map(|i| records[i].clone()).collect();
    out.shuffle(&mut rng);
    Ok(out)
}

fn indices_with_label(records: &[ExplodedRecord], label: u8) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.none_label == label)
        .map(|(i, _)| i)
        .collect()
}

/// Seeded group-aware split: whole functions are shuffled and dealt to
/// train/valid so that `round(train_fraction · n_functions)` functions land
/// in train and no function straddles the boundary.
pub fn split(
    records: &[ExplodedRecord],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<ExplodedRecord>, Vec<ExplodedRecord>), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::BadFraction(train_fraction));
    }
    if records.len() < 2 {
        return Err(DatasetError::TooFewRecords(records.len()));
    }

    let mut group_order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, record) in records.iter().enumerate() {
        let key = group_key(record);
        let members = groups.entry(key).or_insert_with(|| {
            group_order.push(key);
            Vec::new()
        });
        members.push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    group_order.shuffle(&mut rng);
    let n_train = (train_fraction * group_order.len() as f64).round() as usize;

    let collect = |keys: &[&str]| -> Vec<ExplodedRecord> {
        keys.iter()
            .flat_map(|k| groups[k].iter().map(|&i| records[i].clone()))
            .collect()
    };
    Ok((
        collect(&group_order[..n_train]),
        collect(&group_order[n_train..]),
    ))
}
