//! The four per-parameter directives: description (PD), datatype (PT),
//! default value (PV), and None acceptance (PN).
//!
//! PD and PN go through pluggable backends with deterministic local
//! fallbacks; PT resolves annotation → default literal → type service →
//! absent; PV reads the declared default verbatim from the header. Every
//! populated directive records where its value came from, and no backend
//! failure ever aborts bundle construction — the affected directive falls
//! back or goes absent instead.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::backend::{ClassificationBackend, GenerationBackend, TypeServiceClient};
use crate::dataset::first_sentence;
use crate::py_extract::{extract_parameters, FunctionRecord, ParameterInfo};

/// The four directive slots of a bundle.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Directive {
    Description,
    Datatype,
    Default,
    NoneAccepted,
}

/// Where a directive's value came from.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Backend,
    Baseline,
    Annotation,
    Literal,
    Service,
    Header,
}

/// Origin of a type prediction, in resolution-priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeSource {
    Annotation,
    Literal,
    Service,
}

impl From<TypeSource> for Provenance {
    fn from(source: TypeSource) -> Self {
        match source {
            TypeSource::Annotation => Provenance::Annotation,
            TypeSource::Literal => Provenance::Literal,
            TypeSource::Service => Provenance::Service,
        }
    }
}

/// One resolved datatype candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypePrediction {
    pub type_text: String,
    pub confidence: f64,
    pub source: TypeSource,
}

/// Per-parameter directive values ready for composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectiveBundle {
    pub param_name: String,
    pub description: String,
    pub datatype: Option<String>,
    pub default_text: Option<String>,
    pub none_accepted: Option<bool>,
    pub provenance: BTreeMap<Directive, Provenance>,
}

/// The optional engines a bundle build may consult. All-`None` (the
/// default) is fully hermetic: baselines everywhere.
#[derive(Default, Clone, Copy)]
pub struct BackendSet<'a> {
    pub generation: Option<&'a dyn GenerationBackend>,
    pub classification: Option<&'a dyn ClassificationBackend>,
    pub type_service: Option<&'a dyn TypeServiceClient>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DirectiveError {
    #[error("parameter index {index} out of range: {qualified_name} has {count} parameter(s) and indexing is 1-based")]
    ParamIndex {
        qualified_name: String,
        index: usize,
        count: usize,
    },
}

/// The generation/classification prompt: "parameter N: " + function source.
pub fn directive_prompt(function: &FunctionRecord, param_index: usize) -> String {
    format!("parameter {param_index}: {}", function.source_text)
}

fn effective_param(
    function: &FunctionRecord,
    param_index: usize,
) -> Result<(Vec<ParameterInfo>, ParameterInfo), DirectiveError> {
    let params = extract_parameters(function);
    if param_index == 0 || param_index > params.len() {
        return Err(DirectiveError::ParamIndex {
            qualified_name: function.qualified_name.clone(),
            index: param_index,
            count: params.len(),
        });
    }
    let param = params[param_index - 1].clone();
    Ok((params, param))
}

/// Mechanical description template: "The " + the name split on underscores
/// and camelCase boundaries, lowercased + "." — obviously non-model output.
pub fn baseline_description(param: &ParameterInfo) -> String {
    let mut words: Vec<String> = Vec::new();
    for chunk in param.name.split('_').filter(|c| !c.is_empty()) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut word = String::new();
        for (i, &c) in chars.iter().enumerate() {
            let prev_lower = i > 0 && (chars[i - 1].is_lowercase() || chars[i - 1].is_ascii_digit());
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            let boundary = c.is_uppercase() && i > 0 && (prev_lower || next_lower);
            if boundary && !word.is_empty() {
                words.push(std::mem::take(&mut word));
            }
            word.extend(c.to_lowercase());
        }
        if !word.is_empty() {
            words.push(word);
        }
    }
    format!("The {}.", words.join(" "))
}

/// PD: ask the generation backend with the "parameter N:" prompt and keep
/// the first sentence of its answer; on failure (or with no backend) fall
/// back to [`baseline_description`]. Returns the text and its provenance.
pub fn generate_description(
    function: &FunctionRecord,
    param_index: usize,
    backend: Option<&dyn GenerationBackend>,
) -> Result<(String, Provenance), DirectiveError> {
    let (_, param) = effective_param(function, param_index)?;
    if let Some(engine) = backend {
        let prompt = directive_prompt(function, param_index);
        if let Ok(text) = engine.generate(&prompt) {
            return Ok((first_sentence(&text), Provenance::Backend));
        }
    }
    Ok((baseline_description(&param), Provenance::Baseline))
}

/// PT fallback: the Python type a default literal spells out, if any.
/// "None" is a value, not a type, and yields nothing.
pub fn infer_type_from_literal(default_text: &str) -> Option<String> {
    let t = default_text.trim();
    if t.is_empty() || t == "None" {
        return None;
    }
    if t == "True" || t == "False" {
        return Some("bool".into());
    }
    if is_int_literal(t) {
        return Some("int".into());
    }
    if is_float_literal(t) {
        return Some("float".into());
    }
    if is_str_literal(t) {
        return Some("str".into());
    }
    if t.starts_with('[') && t.ends_with(']') {
        return Some("list".into());
    }
    if t.starts_with('(') && t.ends_with(')') && t.len() >= 2 {
        return Some("tuple".into());
    }
    if t.starts_with('{') && t.ends_with('}') {
        // "{}" is Python's empty dict; otherwise a top-level colon
        // separates keys from values and marks a dict, else a set.
        let inner = &t[1..t.len() - 1];
        if inner.trim().is_empty() || has_top_level_colon(inner) {
            return Some("dict".into());
        }
        return Some("set".into());
    }
    None
}

fn is_int_literal(t: &str) -> bool {
    let t = t.strip_prefix(['+', '-']).unwrap_or(t);
    if let Some(rest) = t
        .strip_prefix("0x")
        .or_else(|| t.strip_prefix("0X"))
        .or_else(|| t.strip_prefix("0o"))
        .or_else(|| t.strip_prefix("0O"))
        .or_else(|| t.strip_prefix("0b"))
        .or_else(|| t.strip_prefix("0B"))
    {
        return !rest.is_empty() && rest.chars().all(|c| c.is_ascii_hexdigit() || c == '_');
    }
    !t.is_empty()
        && t.chars().all(|c| c.is_ascii_digit() || c == '_')
        && t.starts_with(|c: char| c.is_ascii_digit())
        && t.ends_with(|c: char| c.is_ascii_digit())
}

fn is_float_literal(t: &str) -> bool {
    let t = t.strip_prefix(['+', '-']).unwrap_or(t);
    if t.is_empty() {
        return false;
    }
    let has_dot = t.contains('.');
    let has_exp = t.contains(['e', 'E']);
    if !has_dot && !has_exp {
        return false;
    }
    let mantissa_and_exp: Vec<&str> = t.splitn(2, ['e', 'E']).collect();
    let mantissa = mantissa_and_exp[0];
    let digits_ok = |s: &str| s.chars().all(|c| c.is_ascii_digit() || c == '_');
    let mantissa_ok = match mantissa.split_once('.') {
        Some((whole, frac)) => {
            (!whole.is_empty() || !frac.is_empty()) && digits_ok(whole) && digits_ok(frac)
        }
        None => !mantissa.is_empty() && digits_ok(mantissa),
    };
    let exp_ok = match mantissa_and_exp.get(1) {
        Some(exp) => {
            let exp = exp.strip_prefix(['+', '-']).unwrap_or(exp);
            !exp.is_empty() && exp.chars().all(|c| c.is_ascii_digit())
        }
        None => true,
    };
    mantissa_ok && exp_ok && mantissa.chars().any(|c| c.is_ascii_digit())
}

fn is_str_literal(t: &str) -> bool {
    let prefix_len = t
        .chars()
        .take_while(|c| matches!(c, 'r' | 'R' | 'b' | 'B' | 'u' | 'U' | 'f' | 'F'))
        .count();
    if prefix_len > 2 {
        return false;
    }
    let rest = &t[prefix_len..];
    (rest.len() >= 2 && rest.starts_with('\'') && rest.ends_with('\''))
        || (rest.len() >= 2 && rest.starts_with('"') && rest.ends_with('"'))
}

fn has_top_level_colon(inner: &str) -> bool {
    let mut depth = 0usize;
    let mut quote: Option<char> = None;
    let mut chars = inner.chars().peekable();
    while let Some(c) = chars.next() {
        if let Some(q) = quote {
            if c == '\\' {
                chars.next();
            } else if c == q {
                quote = None;
            }
            continue;
        }
        match c {
            '\'' | '"' => quote = Some(c),
            '[' | '(' | '{' => depth += 1,
            ']' | ')' | '}' => depth = depth.saturating_sub(1),
            ':' if depth == 0 => return true,
            _ => {}
        }
    }
    false
}

/// PT: annotation text, else a type inferred from the default literal, else
/// the type service's best candidate for this parameter, else absent.
/// Service errors degrade to absent; they never abort.
pub fn predict_type(
    function: &FunctionRecord,
    param: &ParameterInfo,
    client: Option<&dyn TypeServiceClient>,
) -> Option<TypePrediction> {
    if let Some(annotation) = &param.annotation_text {
        return Some(TypePrediction {
            type_text: annotation.clone(),
            confidence: 1.0,
            source: TypeSource::Annotation,
        });
    }
    if let Some(default_text) = &param.default_text {
        if let Some(type_text) = infer_type_from_literal(default_text) {
            return Some(TypePrediction {
                type_text,
                confidence: 1.0,
                source: TypeSource::Literal,
            });
        }
    }
    let client = client?;
    let map = client.predict_types(&function.source_text).ok()?;
    // Service responses cover variables too; keep only this parameter's
    // entry, which arrives ordered by confidence descending.
    let best = map.get(&param.name)?.first()?;
    Some(TypePrediction {
        type_text: best.type_text.clone(),
        confidence: best.confidence,
        source: TypeSource::Service,
    })
}

/// PN without a backend: the default is the literal `None`, or the
/// annotation spells `Optional[...]` or a `... | None` union.
pub fn baseline_none_acceptance(param: &ParameterInfo) -> bool {
    if param.default_text.as_deref() == Some("None") {
        return true;
    }
    match &param.annotation_text {
        Some(annotation) => {
            annotation.contains("Optional[")
                || (annotation.contains('|')
                    && annotation.split('|').any(|part| part.trim() == "None"))
        }
        None => false,
    }
}

/// PN: the classification backend's label on the "parameter N:" prompt,
/// falling back to [`baseline_none_acceptance`] when absent or failing.
pub fn classify_none(
    function: &FunctionRecord,
    param_index: usize,
    backend: Option<&dyn ClassificationBackend>,
) -> Result<(bool, Provenance), DirectiveError> {
    let (_, param) = effective_param(function, param_index)?;
    if let Some(engine) = backend {
        let prompt = directive_prompt(function, param_index);
        if let Ok(verdict) = engine.classify(&prompt) {
            return Ok((verdict.label == 1, Provenance::Backend));
        }
    }
    Ok((baseline_none_acceptance(&param), Provenance::Baseline))
}

/// Assemble all four directives for one parameter (1-based index over the
/// effective parameters). PD is always populated; PT/PV/PN carry absence
/// markers instead of failing, and provenance covers every populated slot.
pub fn build_bundle(
    function: &FunctionRecord,
    param_index: usize,
    backends: &BackendSet<'_>,
) -> Result<DirectiveBundle, DirectiveError> {
    let (_, param) = effective_param(function, param_index)?;
    let mut provenance = BTreeMap::new();

    let (description, pd_prov) =
        generate_description(function, param_index, backends.generation)?;
    provenance.insert(Directive::Description, pd_prov);

    let datatype = predict_type(function, &param, backends.type_service).map(|prediction| {
        provenance.insert(Directive::Datatype, prediction.source.into());
        prediction.type_text
    });

    let default_text = param.default_text.clone();
    if default_text.is_some() {
        provenance.insert(Directive::Default, Provenance::Header);
    }

    let (accepts_none, pn_prov) = classify_none(function, param_index, backends.classification)?;
    provenance.insert(Directive::NoneAccepted, pn_prov);

    Ok(DirectiveBundle {
        param_name: param.name,
        description,
        datatype,
        default_text,
        none_accepted: Some(accepts_none),
        provenance,
    })
}
