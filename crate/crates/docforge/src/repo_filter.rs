//! Repository-level inclusion/exclusion criteria (IEC) and corpus walking.
//!
//! Six criteria apply to repository metadata: English documentation (I1),
//! ≥75% Python (I2), whitelisted license (I3), science topics (I4), recent
//! activity (E1), and non-fork status (E5). A verdict lists *every* failed
//! criterion, never just the first. Notebook exclusion (E4) lives in the
//! corpus walk, which yields `.py` files only; the function-level criteria
//! (E2/E3) live in `py_extract`.
//!
//! The activity rule reads "excluded unless there is a commit on or after
//! the cutoff date": repositories whose last commit predates the cutoff
//! are out. The cutoff defaults to 2023-02-01 and is configurable.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;
use thiserror::Error;

use crate::py_extract::SourceFile;

/// Per-repository facts consumed by the IEC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoMetadata {
    pub repo_id: String,
    /// Language name → fraction of the codebase, each in [0,1], summing to
    /// at most 1 (within float tolerance).
    pub language_fractions: BTreeMap<String, f64>,
    /// SPDX-style identifier, matched exactly against the whitelist.
    pub license_id: String,
    /// Lowercase topic labels.
    pub topics: BTreeSet<String>,
    pub last_commit: NaiveDate,
    pub is_fork: bool,
    pub primary_natural_language: Option<String>,
}

/// Line-level mirror of [`RepoMetadata`] with every field optional, so a
/// record missing a required field yields an explicit indeterminate
/// verdict naming the field instead of a silent default.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct PartialRepoMetadata {
    pub repo_id: Option<String>,
    pub language_fractions: Option<BTreeMap<String, f64>>,
    pub license_id: Option<String>,
    pub topics: Option<BTreeSet<String>>,
    pub last_commit: Option<NaiveDate>,
    pub is_fork: Option<bool>,
    pub primary_natural_language: Option<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MetadataError {
    #[error("metadata field {0:?} is missing; verdict is indeterminate")]
    MissingField(&'static str),
    #[error("language fractions sum to {0}, which exceeds 1")]
    FractionSum(f64),
}

impl PartialRepoMetadata {
    /// Promote to a full record, naming the first missing required field.
    /// `primary_natural_language` stays optional (I1 handles absence).
    pub fn complete(self) -> Result<RepoMetadata, MetadataError> {
        let repo_id = self.repo_id.ok_or(MetadataError::MissingField("repo_id"))?;
        let language_fractions = self
            .language_fractions
            .ok_or(MetadataError::MissingField("language_fractions"))?;
        let sum: f64 = language_fractions.values().sum();
        if sum > 1.0 + 1e-9 {
            return Err(MetadataError::FractionSum(sum));
        }
        let license_id = self
            .license_id
            .ok_or(MetadataError::MissingField("license_id"))?;
        let topics = self.topics.ok_or(MetadataError::MissingField("topics"))?;
        let last_commit = self
            .last_commit
            .ok_or(MetadataError::MissingField("last_commit"))?;
        let is_fork = self.is_fork.ok_or(MetadataError::MissingField("is_fork"))?;
        Ok(RepoMetadata {
            repo_id,
            language_fractions,
            license_id,
            // Topics are matched lowercase; normalize on entry.
            topics: topics.into_iter().map(|t| t.to_lowercase()).collect(),
            last_commit,
            is_fork,
            primary_natural_language: self.primary_natural_language,
        })
    }
}

/// Tunable knobs of the IEC. Fields omitted from a config file keep their
/// defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IecConfig {
    pub python_fraction_threshold: f64,
    pub license_whitelist: BTreeSet<String>,
    pub topic_whitelist: BTreeSet<String>,
    pub activity_cutoff: NaiveDate,
}

impl Default for IecConfig {
    fn default() -> Self {
        // Whitelist seeded with the five accepted license families
        // (Apache 2.0, Creative Commons, BSD Zero-Clause, GPL, MIT) spelled
        // as common SPDX identifiers; extend via config for other members.
        let licenses = [
            "MIT",
            "Apache-2.0",
            "0BSD",
            "GPL-2.0-only",
            "GPL-2.0-or-later",
            "GPL-3.0-only",
            "GPL-3.0-or-later",
            "LGPL-2.1-only",
            "LGPL-3.0-only",
            "AGPL-3.0-only",
            "CC0-1.0",
            "CC-BY-4.0",
            "CC-BY-SA-4.0",
        ];
        let topics = [
            "data-science",
            "machine-learning",
            "deep-learning",
            "statistics",
            "science",
        ];
        IecConfig {
            python_fraction_threshold: 0.75,
            license_whitelist: licenses.iter().map(|s| s.to_string()).collect(),
            topic_whitelist: topics.iter().map(|s| s.to_string()).collect(),
            activity_cutoff: NaiveDate::from_ymd_opt(2023, 2, 1).unwrap(),
        }
    }
}

/// The outcome of applying the IEC to one repository.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IecVerdict {
    pub included: bool,
    /// Every criterion that failed, in I1..E5 order; empty iff included.
    pub triggered_codes: Vec<String>,
    /// Criteria that could not be checked (currently only I1 when the
    /// primary natural language is unrecorded).
    pub unchecked: Vec<String>,
}

/// Apply all six metadata criteria and report every failure.
pub fn apply_iec(meta: &RepoMetadata, config: &IecConfig) -> IecVerdict {
    let mut triggered_codes = Vec::new();
    let mut unchecked = Vec::new();

    // I1: English documentation — checkable only when the metadata records
    // a primary natural language.
    match &meta.primary_natural_language {
        Some(language) => {
            let l = language.to_lowercase();
            if l != "english" && l != "en" {
                triggered_codes.push("I1".to_string());
            }
        }
        None => unchecked.push("I1".to_string()),
    }

    // I2: at least 75% Python (case-insensitive language key).
    let python_fraction = meta
        .language_fractions
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case("python"))
        .map(|(_, &v)| v)
        .unwrap_or(0.0);
    if python_fraction < config.python_fraction_threshold {
        triggered_codes.push("I2".to_string());
    }

    // I3: license on the whitelist, exact SPDX-style match.
    if !config.license_whitelist.contains(&meta.license_id) {
        triggered_codes.push("I3".to_string());
    }

    // I4: at least one whitelisted science topic.
    if meta.topics.is_disjoint(&config.topic_whitelist) {
        triggered_codes.push("I4".to_string());
    }

    // E1: no commit on or after the cutoff → inactive → excluded.
    if meta.last_commit < config.activity_cutoff {
        triggered_codes.push("E1".to_string());
    }

    // E5: forks are excluded.
    if meta.is_fork {
        triggered_codes.push("E5".to_string());
    }

    IecVerdict {
        included: triggered_codes.is_empty(),
        triggered_codes,
        unchecked,
    }
}

/// Result of walking a corpus directory.
#[derive(Debug, Default)]
pub struct CorpusScan {
    /// Decodable `.py` files, in lexicographic order of their relative
    /// `/`-separated paths.
    pub files: Vec<SourceFile>,
    /// Files that were unreadable or not valid UTF-8.
    pub skipped: usize,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("cannot read corpus root {path}: {source}")]
    RootUnreadable {
        path: String,
        source: std::io::Error,
    },
}

/// Walk `root` for Python sources. Yields every `.py` file; `.ipynb`
/// notebooks are never yielded (E4). Unreadable or undecodable files are
/// skipped and counted, not fatal.
pub fn scan_corpus(root: &Path) -> Result<CorpusScan, ScanError> {
    let to_error = |source: std::io::Error| ScanError::RootUnreadable {
        path: root.display().to_string(),
        source,
    };
    let metadata = std::fs::metadata(root).map_err(to_error)?;
    if !metadata.is_dir() {
        return Err(to_error(std::io::Error::new(
            std::io::ErrorKind::NotADirectory,
            "corpus root is not a directory",
        )));
    }

    let mut scan = CorpusScan::default();
    let mut paths: Vec<(String, std::path::PathBuf)> = Vec::new();
    for entry in walkdir::WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(entry) => entry,
            Err(_) => {
                scan.skipped += 1;
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        if entry.path().extension().and_then(|e| e.to_str()) != Some("py") {
            continue;
        }
        let relative = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        paths.push((relative, entry.path().to_path_buf()));
    }
    paths.sort();

    for (relative, absolute) in paths {
        let mut bytes = Vec::new();
        let readable = std::fs::File::open(&absolute)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .is_ok();
        if !readable {
            scan.skipped += 1;
            continue;
        }
        match String::from_utf8(bytes) {
            Ok(text) => scan.files.push(SourceFile {
                path: relative,
                text,
            }),
            Err(_) => scan.skipped += 1,
        }
    }
    Ok(scan)
}
