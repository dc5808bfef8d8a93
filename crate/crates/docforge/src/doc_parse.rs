//! Docstring parsing: parameter-token detection, ReST/Google/NumPy structure
//! extraction, and completeness ranking against the function header.
//!
//! Parsing is total — no input fails, the worst outcome is `style: unknown`
//! with no parameters. The raw docstring stays available on the originating
//! [`crate::FunctionRecord`] for audit.
//!
//! Style-detection notes:
//! - ReST parameter fields are recognized for `:param`/`:parameter(s)`/
//!   `:args`/`:arguments` spellings, and Google section headers for `Args:`/
//!   `Arguments:`/`Parameters:`. These are exactly the spellings whose field
//!   text contains one of the eight filter tokens, which keeps
//!   [`has_param_tokens`]` = false ⟹ no ReST/Google parameters` a theorem
//!   rather than a coincidence.
//! - NumPy `Parameters` sections contain none of the filter tokens; the
//!   parser still handles them for direct library use, but the token filter
//!   runs first in the pipeline, so NumPy-only docstrings are known false
//!   negatives there.

use serde::{Deserialize, Serialize};

use crate::py_extract::ParameterInfo;

/// One documented parameter from a docstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDocEntry {
    pub name: String,
    pub type_text: Option<String>,
    /// May be empty, never absent.
    pub description: String,
}

/// Docstring convention the parser recognized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocStyle {
    Rest,
    Google,
    Numpy,
    Unknown,
}

/// Structured view of a docstring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedDocstring {
    pub short_description: Option<String>,
    pub long_description: Option<String>,
    /// Parameter entries in docstring order.
    pub params: Vec<ParamDocEntry>,
    pub returns_text: Option<String>,
    pub raises_texts: Vec<String>,
    pub style: DocStyle,
}

/// Three-tier completeness rank, plus the artifact's `inconsistent` bucket
/// for docstrings documenting more parameters than the header declares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank {
    One,
    Two,
    Three,
    Inconsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessRank {
    pub rank: Rank,
    pub doc_param_count: usize,
    pub header_param_count: usize,
}

/// The eight parameter-documentation tokens, matched case-insensitively.
const PARAM_TOKENS: [&str; 8] = [
    ":param",
    ":arguments",
    ":args",
    ":parameters",
    "param:",
    "arguments:",
    "args:",
    "parameters:",
];

/// ReST field names treated as parameter entries.
const REST_PARAM_FIELDS: [&str; 5] = ["param", "parameter", "parameters", "args", "arguments"];
/// Google section headers opening a parameter block.
const GOOGLE_PARAM_HEADERS: [&str; 3] = ["args:", "arguments:", "parameters:"];
/// Google section headers that end a previous section without opening a
/// parameter block.
const GOOGLE_OTHER_HEADERS: [&str; 9] = [
    "returns:",
    "yields:",
    "raises:",
    "example:",
    "examples:",
    "note:",
    "notes:",
    "attributes:",
    "see also:",
];

/// True when the docstring contains at least one parameter-documentation
/// token (case-insensitive substring match).
pub fn has_param_tokens(raw: &str) -> bool {
    let lower = raw.to_lowercase();
    PARAM_TOKENS.iter().any(|t| lower.contains(t))
}

/// Parse a docstring, auto-detecting its convention.
pub fn parse_docstring(raw: &str) -> ParsedDocstring {
    let lines: Vec<&str> = raw.lines().collect();
    match detect_style(&lines) {
        DocStyle::Rest => parse_rest(&lines),
        DocStyle::Google => parse_google(&lines),
        DocStyle::Numpy => parse_numpy(&lines),
        DocStyle::Unknown => ParsedDocstring {
            short_description: first_paragraph(&lines),
            long_description: remaining_prose(&lines, lines.len()),
            params: Vec::new(),
            returns_text: None,
            raises_texts: Vec::new(),
            style: DocStyle::Unknown,
        },
    }
}

/// Rank how completely `parsed` documents `header_params` (the effective
/// header parameters, receiver already dropped).
pub fn completeness_rank(
    parsed: &ParsedDocstring,
    header_params: &[ParameterInfo],
) -> CompletenessRank {
    let doc = parsed.params.len();
    let header = header_params.len();
    let rank = if doc > header {
        Rank::Inconsistent
    } else if doc == header {
        // (0, 0) is vacuously complete; zero-parameter functions are
        // excluded upstream by E2 anyway.
        Rank::One
    } else if doc == 0 {
        Rank::Three
    } else {
        Rank::Two
    };
    CompletenessRank {
        rank,
        doc_param_count: doc,
        header_param_count: header,
    }
}

fn detect_style(lines: &[&str]) -> DocStyle {
    let has_rest_field = lines.iter().any(|l| rest_field(l).is_some());
    if has_rest_field {
        return DocStyle::Rest;
    }
    let has_google_header = lines.iter().any(|l| {
        let t = l.trim().to_lowercase();
        GOOGLE_PARAM_HEADERS.contains(&t.as_str())
    });
    if has_google_header {
        return DocStyle::Google;
    }
    if numpy_section_start(lines, "parameters").is_some() {
        return DocStyle::Numpy;
    }
    DocStyle::Unknown
}

/// `(:field args:, body-start)` if the line is a ReST field line.
fn rest_field(line: &str) -> Option<(String, Vec<String>, String)> {
    let t = line.trim_start();
    if !t.starts_with(':') {
        return None;
    }
    let close = t[1..].find(':')? + 1;
    let inside = &t[1..close];
    let mut words = inside.split_whitespace().map(str::to_string);
    let field = words.next()?.to_lowercase();
    let args: Vec<String> = words.collect();
    let body = t[close + 1..].trim().to_string();
    Some((field, args, body))
}

fn parse_rest(lines: &[&str]) -> ParsedDocstring {
    let first_field = lines
        .iter()
        .position(|l| rest_field(l).is_some())
        .unwrap_or(lines.len());

    let mut params: Vec<ParamDocEntry> = Vec::new();
    let mut types: Vec<(String, String)> = Vec::new();
    let mut returns_text = None;
    let mut raises_texts = Vec::new();

    let mut i = first_field;
    while i < lines.len() {
        let Some((field, args, mut body)) = rest_field(lines[i]) else {
            i += 1;
            continue;
        };
        // continuation: following lines that are neither blank nor fields
        let mut j = i + 1;
        while j < lines.len() {
            let t = lines[j].trim();
            if t.is_empty() || rest_field(lines[j]).is_some() {
                break;
            }
            if !body.is_empty() {
                body.push(' ');
            }
            body.push_str(t);
            j += 1;
        }
        match field.as_str() {
            f if REST_PARAM_FIELDS.contains(&f) => {
                if let Some(name) = args.last() {
                    let type_text = if args.len() > 1 {
                        Some(args[..args.len() - 1].join(" "))
                    } else {
                        None
                    };
                    params.push(ParamDocEntry {
                        name: strip_stars(name),
                        type_text,
                        description: body,
                    });
                }
            }
            "type" => {
                if let Some(name) = args.last() {
                    types.push((strip_stars(name), body));
                }
            }
            "returns" | "return" | "rtype" => {
                if returns_text.is_none() && field != "rtype" {
                    returns_text = Some(body);
                }
            }
            "raises" | "raise" | "except" | "exception" => {
                let label = args.join(" ");
                raises_texts.push(if label.is_empty() {
                    body
                } else {
                    format!("{label}: {body}")
                });
            }
            _ => {}
        }
        i = j.max(i + 1);
    }

    for (name, text) in types {
        if let Some(entry) = params.iter_mut().find(|p| p.name == name) {
            if entry.type_text.is_none() && !text.is_empty() {
                entry.type_text = Some(text);
            }
        }
    }

    let prose: Vec<&str> = lines[..first_field].to_vec();
    ParsedDocstring {
        short_description: first_paragraph(&prose),
        long_description: remaining_prose(&prose, prose.len()),
        params,
        returns_text,
        raises_texts,
        style: DocStyle::Rest,
    }
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

fn parse_google(lines: &[&str]) -> ParsedDocstring {
    let is_header = |line: &str| -> Option<(bool, usize)> {
        let t = line.trim().to_lowercase();
        if GOOGLE_PARAM_HEADERS.contains(&t.as_str()) {
            Some((true, indent_of(line)))
        } else if GOOGLE_OTHER_HEADERS.contains(&t.as_str()) {
            Some((false, indent_of(line)))
        } else {
            None
        }
    };

    let first_header = lines
        .iter()
        .position(|l| is_header(l).is_some())
        .unwrap_or(lines.len());

    let mut params = Vec::new();
    let mut returns_text: Option<String> = None;
    let mut raises_texts = Vec::new();

    let mut i = first_header;
    while i < lines.len() {
        let Some((is_params, header_indent)) = is_header(lines[i]) else {
            i += 1;
            continue;
        };
        let header = lines[i].trim().to_lowercase();
        // section body: deeper-indented lines (blank lines allowed inside)
        let mut j = i + 1;
        let mut body: Vec<&str> = Vec::new();
        while j < lines.len() {
            let line = lines[j];
            if line.trim().is_empty() {
                body.push(line);
                j += 1;
                continue;
            }
            if indent_of(line) <= header_indent {
                break;
            }
            body.push(line);
            j += 1;
        }
        if is_params {
            params.extend(google_entries(&body));
        } else if header == "returns:" || header == "yields:" {
            let text = body
                .iter()
                .map(|l| l.trim())
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            if returns_text.is_none() && !text.is_empty() {
                returns_text = Some(text);
            }
        } else if header == "raises:" {
            raises_texts.extend(google_entries(&body).into_iter().map(|e| {
                if e.description.is_empty() {
                    e.name
                } else {
                    format!("{}: {}", e.name, e.description)
                }
            }));
        }
        i = j.max(i + 1);
    }

    let prose: Vec<&str> = lines[..first_header].to_vec();
    ParsedDocstring {
        short_description: first_paragraph(&prose),
        long_description: remaining_prose(&prose, prose.len()),
        params,
        returns_text,
        raises_texts,
        style: DocStyle::Google,
    }
}

/// Parse `name (type): desc` / `name: desc` entries with deeper-indented
/// continuation lines.
fn google_entries(body: &[&str]) -> Vec<ParamDocEntry> {
    let entry_indent = body
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| indent_of(l))
        .min()
        .unwrap_or(0);
    let mut entries: Vec<ParamDocEntry> = Vec::new();
    for line in body {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut matched = false;
        if indent_of(line) == entry_indent {
            if let Some((head, desc)) = t.split_once(':') {
                let head = head.trim();
                let (name, type_text) = match head.split_once('(') {
                    Some((n, ty)) => (
                        n.trim().to_string(),
                        ty.strip_suffix(')').map(|s| s.trim().to_string()),
                    ),
                    None => (head.to_string(), None),
                };
                let valid_name = !name.is_empty()
                    && name
                        .chars()
                        .all(|c| c.is_alphanumeric() || c == '_' || c == '*');
                if valid_name {
                    entries.push(ParamDocEntry {
                        name: strip_stars(&name),
                        type_text: type_text.filter(|s| !s.is_empty()),
                        description: desc.trim().to_string(),
                    });
                    matched = true;
                }
            }
        }
        if !matched {
            if let Some(last) = entries.last_mut() {
                if !last.description.is_empty() {
                    last.description.push(' ');
                }
                last.description.push_str(t);
            }
        }
    }
    entries
}

/// Index of the underline row for a NumPy section named `title`.
fn numpy_section_start(lines: &[&str], title: &str) -> Option<usize> {
    for i in 0..lines.len().saturating_sub(1) {
        if lines[i].trim().to_lowercase() == title {
            let underline = lines[i + 1].trim();
            if underline.len() >= 3 && underline.chars().all(|c| c == '-') {
                return Some(i);
            }
        }
    }
    None
}

fn parse_numpy(lines: &[&str]) -> ParsedDocstring {
    let is_underlined_header = |i: usize| -> bool {
        i + 1 < lines.len() && {
            let u = lines[i + 1].trim();
            !lines[i].trim().is_empty() && u.len() >= 3 && u.chars().all(|c| c == '-')
        }
    };

    let mut params = Vec::new();
    let mut returns_text: Option<String> = None;
    let mut raises_texts = Vec::new();
    let first_header = (0..lines.len())
        .find(|&i| is_underlined_header(i))
        .unwrap_or(lines.len());

    let mut i = first_header;
    while i < lines.len() {
        if !is_underlined_header(i) {
            i += 1;
            continue;
        }
        let title = lines[i].trim().to_lowercase();
        let mut j = i + 2;
        let mut body: Vec<&str> = Vec::new();
        while j < lines.len() && !is_underlined_header(j) {
            body.push(lines[j]);
            j += 1;
        }
        match title.as_str() {
            "parameters" | "other parameters" => params.extend(numpy_entries(&body)),
            "returns" | "yields" => {
                let text = body
                    .iter()
                    .map(|l| l.trim())
                    .filter(|t| !t.is_empty())
                    .collect::<Vec<_>>()
                    .join(" ");
                if returns_text.is_none() && !text.is_empty() {
                    returns_text = Some(text);
                }
            }
            "raises" => {
                raises_texts.extend(numpy_entries(&body).into_iter().map(|e| {
                    if e.description.is_empty() {
                        e.name
                    } else {
                        format!("{}: {}", e.name, e.description)
                    }
                }));
            }
            _ => {}
        }
        i = j;
    }

    let prose: Vec<&str> = lines[..first_header].to_vec();
    ParsedDocstring {
        short_description: first_paragraph(&prose),
        long_description: remaining_prose(&prose, prose.len()),
        params,
        returns_text,
        raises_texts,
        style: DocStyle::Numpy,
    }
}

/// Parse `name : type` / bare `name` header rows with deeper-indented
/// descriptions (NumPy convention).
fn numpy_entries(body: &[&str]) -> Vec<ParamDocEntry> {
    let entry_indent = body
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| indent_of(l))
        .min()
        .unwrap_or(0);
    let mut entries: Vec<ParamDocEntry> = Vec::new();
    for line in body {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if indent_of(line) == entry_indent {
            let (name, type_text) = match t.split_once(':') {
                Some((n, ty)) => (n.trim().to_string(), Some(ty.trim().to_string())),
                None => (t.to_string(), None),
            };
            let valid_name = !name.is_empty()
                && name
                    .chars()
                    .all(|c| c.is_alphanumeric() || c == '_' || c == '*');
            if valid_name {
                entries.push(ParamDocEntry {
                    name: strip_stars(&name),
                    type_text: type_text.filter(|s| !s.is_empty()),
                    description: String::new(),
                });
                continue;
            }
        }
        if let Some(last) = entries.last_mut() {
            if !last.description.is_empty() {
                last.description.push(' ');
            }
            last.description.push_str(t);
        }
    }
    entries
}

fn strip_stars(name: &str) -> String {
    name.trim_start_matches('*').to_string()
}

/// First blank-line-separated paragraph, inner newlines collapsed to spaces.
fn first_paragraph(lines: &[&str]) -> Option<String> {
    let mut out: Vec<&str> = Vec::new();
    let mut started = false;
    for line in lines {
        let t = line.trim();
        if t.is_empty() {
            if started {
                break;
            }
            continue;
        }
        started = true;
        out.push(t);
    }
    if out.is_empty() {
        None
    } else {
        Some(out.join(" "))
    }
}

/// Prose after the first paragraph and before `end`, space-joined.
fn remaining_prose(lines: &[&str], end: usize) -> Option<String> {
    let mut seen_first = false;
    let mut in_gap = false;
    let mut rest: Vec<&str> = Vec::new();
    for line in lines.iter().take(end) {
        let t = line.trim();
        if t.is_empty() {
            if seen_first {
                in_gap = true;
            }
            continue;
        }
        if !seen_first {
            seen_first = true;
            continue;
        }
        if !in_gap {
            continue; // still inside the first paragraph
        }
        rest.push(t);
    }
    if rest.is_empty() {
        None
    } else {
        Some(rest.join(" "))
    }
}
