//! Function and signature extraction from Python source, without executing
//! any code.
//!
//! The extractor walks logical lines produced by [`lexer`], tracks
//! class/function scopes to build `__qualname__`-style names
//! (`Processor.transform`, `outer.<locals>.inner`), parses signatures into
//! [`ParameterInfo`] with verbatim annotation/default source slices, and
//! detects value-bearing `return`/`yield` statements for the E3 filter.
//!
//! Default expressions are never evaluated; `def sample3(x, y=None)` reports
//! the declared default `None` even if the body immediately rebinds `y`.

pub mod lexer;

use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use lexer::{Tok, TokKind};

/// One source file fed to the extractor. `path` should be stable across
/// machines (relative to the corpus root) so downstream manifests hash
/// identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

/// The five Python parameter kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    PositionalOnly,
    PositionalOrKeyword,
    VarPositional,
    KeywordOnly,
    VarKeyword,
}

/// One declared parameter with verbatim annotation/default source text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterInfo {
    pub name: String,
    pub kind: ParamKind,
    pub default_text: Option<String>,
    pub annotation_text: Option<String>,
    /// 0-based index in declaration order.
    pub position: usize,
}

/// One extracted `def` (function, method, or nested function).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionRecord {
    pub qualified_name: String,
    /// Full `def` through the end of the body, sliced verbatim.
    pub source_text: String,
    /// Raw declared parameters, including a `self`/`cls` receiver.
    pub params: Vec<ParameterInfo>,
    pub has_return_value: bool,
    /// Decoded leading string literal of the body, if any.
    pub raw_docstring: Option<String>,
    pub file_path: String,
    /// 1-based line of the `def`/`async` keyword.
    pub start_line: u32,
}

/// Where a function's docstring lives, for source rewriting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionLayout {
    /// 1-based physical line of the `def` keyword.
    pub def_line: u32,
    /// 1-based physical line the header's logical line ends on.
    pub header_last_line: u32,
    /// Column of the first body token (spaces, tabs expanded); for
    /// one-liners, the def line indent + 4.
    pub body_indent: u32,
    /// Physical line range (1-based, inclusive) of the docstring statement.
    pub docstring_lines: Option<(u32, u32)>,
    /// Body written on the `def` line itself.
    pub one_liner: bool,
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("{path}:{line}:{col}: {msg}")]
    Syntax {
        path: String,
        line: u32,
        col: u32,
        msg: String,
    },
}

impl ExtractError {
    fn at(path: &str, tok: &Tok, msg: impl Into<String>) -> Self {
        ExtractError::Syntax {
            path: path.to_string(),
            line: tok.line,
            col: tok.col,
            msg: msg.into(),
        }
    }
}

/// Extract every `def` in the file. Errors are file-level: a syntax problem
/// anywhere skips the whole file (never a partial extraction).
pub fn extract_functions(source: &SourceFile) -> Result<Vec<FunctionRecord>, ExtractError> {
    Ok(extract_functions_with_layout(source)?
        .into_iter()
        .map(|(rec, _)| rec)
        .collect())
}

/// As [`extract_functions`], also returning layout facts used by the
/// docstring rewriter.
pub fn extract_functions_with_layout(
    source: &SourceFile,
) -> Result<Vec<(FunctionRecord, FunctionLayout)>, ExtractError> {
    let toks = lexer::tokenize(&source.text).map_err(|e| ExtractError::Syntax {
        path: source.path.clone(),
        line: e.line,
        col: e.col,
        msg: e.msg,
    })?;
    let lines = lexer::logical_lines(&toks);

    struct Scope {
        indent: u32,
        segment: String,
        is_class: bool,
    }
    struct Draft {
        qualified_name: String,
        params: Vec<ParameterInfo>,
        line_idx: usize,
        end_line_idx: usize,
        indent: u32,
        def_tok: usize,
        colon_tok: usize,
    }

    let mut scopes: Vec<Scope> = Vec::new();
    let mut drafts: Vec<Draft> = Vec::new();

    for (li, line) in lines.iter().enumerate() {
        while let Some(top) = scopes.last() {
            if line.indent <= top.indent {
                scopes.pop();
            } else {
                break;
            }
        }
        let ts = &toks[line.toks.clone()];
        let first = ts[0].kind.as_name();
        if first == Some("class") {
            if let Some(name) = ts.get(1).and_then(|t| t.kind.as_name()) {
                scopes.push(Scope {
                    indent: line.indent,
                    segment: name.to_string(),
                    is_class: true,
                });
            }
            continue;
        }
        let def_off = match first {
            Some("def") => Some(0),
            Some("async") if ts.get(1).and_then(|t| t.kind.as_name()) == Some("def") => Some(1),
            _ => None,
        };
        let Some(def_off) = def_off else { continue };
        let sig = parse_signature(&source.text, &source.path, ts, def_off + 1)?;
        let mut qualified_name = String::new();
        for scope in &scopes {
            qualified_name.push_str(&scope.segment);
            qualified_name.push_str(if scope.is_class { "." } else { ".<locals>." });
        }
        qualified_name.push_str(&sig.name);
        drafts.push(Draft {
            qualified_name,
            params: sig.params,
            line_idx: li,
            end_line_idx: li,
            indent: line.indent,
            def_tok: line.toks.start,
            colon_tok: line.toks.start + sig.colon_idx,
        });
        scopes.push(Scope {
            indent: line.indent,
            segment: sig.name,
            is_class: false,
        });
    }

    // Resolve body extents: consecutive deeper-indented logical lines.
    for d in drafts.iter_mut() {
        let one_liner = d.colon_tok + 1 < lines[d.line_idx].toks.end;
        if one_liner {
            continue;
        }
        let mut end = d.line_idx;
        for (li, line) in lines.iter().enumerate().skip(d.line_idx + 1) {
            if line.indent > d.indent {
                end = li;
            } else {
                break;
            }
        }
        if end == d.line_idx {
            let def_tok = &toks[d.def_tok];
            return Err(ExtractError::at(
                &source.path,
                def_tok,
                format!("expected an indented block after 'def {}'", d.qualified_name),
            ));
        }
        d.end_line_idx = end;
    }

    let nested_ranges: Vec<(usize, usize)> = drafts
        .iter()
        .map(|d| (d.line_idx, d.end_line_idx))
        .collect();

    let mut out = Vec::with_capacity(drafts.len());
    for (di, d) in drafts.iter().enumerate() {
        let one_liner = d.colon_tok + 1 < lines[d.line_idx].toks.end;
        // Token ranges whose statements belong to this function's own body.
        let mut body_tok_ranges: Vec<Range<usize>> = Vec::new();
        if one_liner {
            body_tok_ranges.push(d.colon_tok + 1..lines[d.line_idx].toks.end);
        } else {
            for li in d.line_idx + 1..=d.end_line_idx {
                let nested = nested_ranges
                    .iter()
                    .enumerate()
                    .any(|(dj, &(s, e))| dj != di && s > d.line_idx && e <= d.end_line_idx && li >= s && li <= e);
                if !nested {
                    body_tok_ranges.push(lines[li].toks.clone());
                }
            }
        }

        let has_return_value = body_tok_ranges.iter().any(|r| {
            let ts = &toks[r.clone()];
            ts.iter().enumerate().any(|(i, t)| match t.kind.as_name() {
                Some("return") => ts
                    .get(i + 1)
                    .map(|n| !n.kind.is_op(";"))
                    .unwrap_or(false),
                Some("yield") => true,
                _ => false,
            })
        });

        // Docstring: the first body statement is a string literal (possibly
        // several implicitly concatenated pieces).
        let first_body_range = if one_liner {
            Some(d.colon_tok + 1..lines[d.line_idx].toks.end)
        } else {
            (d.line_idx + 1..=d.end_line_idx)
                .next()
                .map(|li| lines[li].toks.clone())
        };
        let mut raw_docstring = None;
        let mut docstring_lines = None;
        if let Some(r) = first_body_range {
            let ts = &toks[r.clone()];
            let mut value = String::new();
            let mut n_str = 0;
            for t in ts {
                match &t.kind {
                    TokKind::Str { value: v } => {
                        value.push_str(v);
                        n_str += 1;
                    }
                    _ => break,
                }
            }
            let terminated = n_str > 0
                && ts
                    .get(n_str)
                    .map(|t| t.kind.is_op(";"))
                    .unwrap_or(true);
            if terminated {
                raw_docstring = Some(value);
                let last = &ts[n_str - 1];
                let spanned = source.text[last.start..last.end]
                    .bytes()
                    .filter(|&b| b == b'\n')
                    .count() as u32;
                docstring_lines = Some((ts[0].line, last.line + spanned));
            }
        }

        let def_start = toks[d.def_tok].start;
        let last_tok_end = if one_liner {
            toks[lines[d.line_idx].toks.end - 1].end
        } else {
            toks[lines[d.end_line_idx].toks.end - 1].end
        };
        // Extend through the end of the final physical line so a trailing
        // comment is kept.
        let tail = source.text[last_tok_end..]
            .find('\n')
            .map(|i| last_tok_end + i)
            .unwrap_or(source.text.len());
        let source_text = source.text[def_start..tail].to_string();

        let body_indent = if one_liner {
            lines[d.line_idx].indent + 4
        } else {
            lines[d.line_idx + 1].indent
        };

        out.push((
            FunctionRecord {
                qualified_name: d.qualified_name.clone(),
                source_text,
                params: d.params.clone(),
                has_return_value,
                raw_docstring,
                file_path: source.path.clone(),
                start_line: toks[d.def_tok].line,
            },
            FunctionLayout {
                def_line: toks[d.def_tok].line,
                header_last_line: toks[d.colon_tok].line,
                body_indent,
                docstring_lines,
                one_liner,
            },
        ));
    }
    Ok(out)
}

struct ParsedSignature {
    name: String,
    params: Vec<ParameterInfo>,
    /// Index (within the logical line's tokens) of the def-terminating ':'.
    colon_idx: usize,
}

/// Parse `def NAME ( ... ) [-> ann] :` from one logical line's tokens.
/// `name_idx` points at the expected function name.
fn parse_signature(
    src: &str,
    path: &str,
    ts: &[Tok],
    name_idx: usize,
) -> Result<ParsedSignature, ExtractError> {
    let name_tok = ts
        .get(name_idx)
        .ok_or_else(|| ExtractError::at(path, ts.last().unwrap(), "expected function name"))?;
    let name = name_tok
        .kind
        .as_name()
        .ok_or_else(|| ExtractError::at(path, name_tok, "expected function name"))?
        .to_string();
    let open = ts
        .get(name_idx + 1)
        .ok_or_else(|| ExtractError::at(path, name_tok, "expected '(' after function name"))?;
    if !open.kind.is_op("(") {
        return Err(ExtractError::at(path, open, "expected '(' after function name"));
    }

    // Split the parenthesized region into comma-separated segments, tracking
    // bracket depth and a lambda stack so that `x=lambda a, b: a` does not
    // split at the lambda's comma or treat its ':' as an annotation marker.
    struct Segment {
        toks: Vec<usize>,
        colon_at: Option<usize>, // index into toks
        eq_at: Option<usize>,
    }
    let mut segments: Vec<Segment> = Vec::new();
    let mut current = Segment {
        toks: Vec::new(),
        colon_at: None,
        eq_at: None,
    };
    let mut depth = 1u32;
    let mut lambdas: Vec<u32> = Vec::new();
    let mut i = name_idx + 2;
    let close_idx = loop {
        let t = ts
            .get(i)
            .ok_or_else(|| ExtractError::at(path, ts.last().unwrap(), "unterminated signature"))?;
        match &t.kind {
            TokKind::Op(op) => match *op {
                "(" | "[" | "{" => {
                    depth += 1;
                    current.toks.push(i);
                }
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth == 0 {
                        if !current.toks.is_empty() {
                            segments.push(current);
                        }
                        break i;
                    }
                    current.toks.push(i);
                }
                "," if depth == 1 && lambdas.is_empty() => {
                    segments.push(current);
                    current = Segment {
                        toks: Vec::new(),
                        colon_at: None,
                        eq_at: None,
                    };
                }
                ":" => {
                    if lambdas.last() == Some(&depth) {
                        lambdas.pop();
                    } else if depth == 1 && current.eq_at.is_none() && current.colon_at.is_none() {
                        current.colon_at = Some(current.toks.len());
                    }
                    current.toks.push(i);
                }
                "=" if depth == 1 && lambdas.is_empty() && current.eq_at.is_none() => {
                    current.eq_at = Some(current.toks.len());
                    current.toks.push(i);
                }
                _ => current.toks.push(i),
            },
            TokKind::Name(n) if n == "lambda" => {
                lambdas.push(depth);
                current.toks.push(i);
            }
            _ => current.toks.push(i),
        }
        i += 1;
    };

    // Locate the def-terminating ':' after the close paren, skipping a
    // return annotation if present.
    let mut colon_idx = None;
    let mut j = close_idx + 1;
    if ts.get(j).map(|t| t.kind.is_op(":")).unwrap_or(false) {
        colon_idx = Some(j);
    } else if ts.get(j).map(|t| t.kind.is_op("->")).unwrap_or(false) {
        j += 1;
        let mut d = 0u32;
        let mut lam: Vec<u32> = Vec::new();
        while let Some(t) = ts.get(j) {
            match &t.kind {
                TokKind::Op(op) => match *op {
                    "(" | "[" | "{" => d += 1,
                    ")" | "]" | "}" => d = d.saturating_sub(1),
                    ":" if d == 0 => {
                        if lam.last() == Some(&0) {
                            lam.pop();
                        } else {
                            colon_idx = Some(j);
                            break;
                        }
                    }
                    _ => {}
                },
                TokKind::Name(n) if n == "lambda" => lam.push(d),
                _ => {}
            }
            j += 1;
        }
    }
    let colon_idx = colon_idx.ok_or_else(|| {
        ExtractError::at(path, &ts[close_idx], "expected ':' to end function header")
    })?;

    // Turn segments into parameters.
    let mut params: Vec<ParameterInfo> = Vec::new();
    let mut seen_slash = false;
    let mut seen_star = false;
    let mut seen_star_star = false;
    let mut names = HashSet::new();
    let n_segments = segments.len();
    for (si, seg) in segments.into_iter().enumerate() {
        if seg.toks.is_empty() {
            if si == n_segments - 1 {
                continue; // trailing comma
            }
            return Err(ExtractError::at(path, &ts[close_idx], "empty parameter"));
        }
        let first = &ts[seg.toks[0]];
        if seen_star_star {
            return Err(ExtractError::at(path, first, "parameter after **kwargs"));
        }
        let (marker_len, kind) = if first.kind.is_op("/") {
            if seg.toks.len() != 1 {
                return Err(ExtractError::at(path, first, "unexpected tokens after '/'"));
            }
            if seen_slash || seen_star || params.is_empty() {
                return Err(ExtractError::at(path, first, "misplaced '/'"));
            }
            seen_slash = true;
            for p in params.iter_mut() {
                p.kind = ParamKind::PositionalOnly;
            }
            continue;
        } else if first.kind.is_op("*") {
            if seen_star {
                return Err(ExtractError::at(path, first, "duplicate '*'"));
            }
            seen_star = true;
            if seg.toks.len() == 1 {
                continue; // bare '*': keyword-only marker
            }
            (1, ParamKind::VarPositional)
        } else if first.kind.is_op("**") {
            seen_star_star = true;
            (1, ParamKind::VarKeyword)
        } else if seen_star {
            (0, ParamKind::KeywordOnly)
        } else {
            (0, ParamKind::PositionalOrKeyword)
        };

        let colon_at = seg.colon_at.filter(|&c| c >= marker_len);
        let eq_at = seg.eq_at;
        let name_end = colon_at.or(eq_at).unwrap_or(seg.toks.len());
        if name_end != marker_len + 1 {
            return Err(ExtractError::at(path, first, "malformed parameter name"));
        }
        let name_tok = &ts[seg.toks[marker_len]];
        let pname = name_tok
            .kind
            .as_name()
            .ok_or_else(|| ExtractError::at(path, name_tok, "expected parameter name"))?
            .to_string();
        if !names.insert(pname.clone()) {
            return Err(ExtractError::at(
                path,
                name_tok,
                format!("duplicate parameter '{pname}'"),
            ));
        }

        let slice = |from: usize, to: usize| -> Option<String> {
            if from >= to {
                return None;
            }
            let a = &ts[seg.toks[from]];
            let b = &ts[seg.toks[to - 1]];
            Some(src[a.start..b.end].to_string())
        };
        let annotation_text = match colon_at {
            Some(c) => {
                let end = eq_at.unwrap_or(seg.toks.len());
                let text = slice(c + 1, end);
                if text.is_none() {
                    return Err(ExtractError::at(path, &ts[seg.toks[c]], "empty annotation"));
                }
                text
            }
            None => None,
        };
        let default_text = match eq_at {
            Some(e) => {
                let text = slice(e + 1, seg.toks.len());
                if text.is_none() {
                    return Err(ExtractError::at(path, &ts[seg.toks[e]], "empty default"));
                }
                if matches!(kind, ParamKind::VarPositional | ParamKind::VarKeyword) {
                    return Err(ExtractError::at(
                        path,
                        &ts[seg.toks[e]],
                        "var-parameter cannot have a default",
                    ));
                }
                text
            }
            None => None,
        };

        let position = params.len();
        params.push(ParameterInfo {
            name: pname,
            kind,
            default_text,
            annotation_text,
            position,
        });
    }

    Ok(ParsedSignature {
        name,
        params,
        colon_idx,
    })
}

/// True when the qualified name denotes a method (its immediate parent is a
/// class, i.e. the parent segment is not `<locals>` and a parent exists).
pub fn is_method(qualified_name: &str) -> bool {
    let segs: Vec<&str> = qualified_name.split('.').collect();
    segs.len() >= 2 && segs[segs.len() - 2] != "<locals>"
}

/// Effective parameters: declaration order, minus a leading `self`/`cls`
/// receiver when the record is a method.
pub fn extract_parameters(record: &FunctionRecord) -> Vec<ParameterInfo> {
    let mut params = record.params.clone();
    if is_method(&record.qualified_name) {
        if let Some(first) = params.first() {
            let receiver = matches!(
                first.kind,
                ParamKind::PositionalOnly | ParamKind::PositionalOrKeyword
            ) && (first.name == "self" || first.name == "cls");
            if receiver {
                params.remove(0);
                for (i, p) in params.iter_mut().enumerate() {
                    p.position = i;
                }
            }
        }
    }
    params
}

/// Declared defaults by parameter name, values verbatim.
pub fn extract_defaults(record: &FunctionRecord) -> BTreeMap<String, String> {
    record
        .params
        .iter()
        .filter_map(|p| p.default_text.clone().map(|d| (p.name.clone(), d)))
        .collect()
}

/// Function-level E2/E3 filter: at least one effective parameter and a
/// value-bearing return (or yield).
pub fn passes_function_filters(record: &FunctionRecord) -> bool {
    !extract_parameters(record).is_empty() && record.has_return_value
}
