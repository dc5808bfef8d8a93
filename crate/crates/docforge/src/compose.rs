//! Bit-exact composition of directive bundles into parameter docstrings.
//!
//! The default template is ReST-flavored, one line per parameter:
//!
//! ```text
//! :param <name>: <description> :type <name>: <datatype|unknown>. Defaults to <default|no default>. Can be None: <yes|no|unknown>.
//! ```
//!
//! Absent directives render as explicit sentinels (`unknown`, `no default`)
//! rather than being omitted, so incompleteness is visible in the output. A
//! Google-style renderer is config-selectable; the ReST template is the
//! tested default and the one used for golden files.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::directives::DirectiveBundle;

/// Output convention for composed docstrings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComposeStyle {
    #[default]
    Rest,
    Google,
}

/// A function's composed docstring: one block per parameter, joined with
/// single newlines, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedDocstring {
    pub text: String,
    pub per_param_blocks: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("cannot compose a docstring from zero bundles")]
    Empty,
}

/// The `:param`/`:type` prefix shared between composed docstrings and the
/// Formatted dataset's training targets.
pub fn param_field(name: &str, description: &str, datatype: Option<&str>) -> String {
    format!(
        ":param {name}: {description} :type {name}: {}.",
        datatype.unwrap_or("unknown")
    )
}

/// Render one parameter's directive bundle with the ReST template.
pub fn compose_param_block(bundle: &DirectiveBundle) -> String {
    compose_param_block_styled(bundle, ComposeStyle::Rest)
}

/// Render one parameter's directive bundle with the selected style.
pub fn compose_param_block_styled(bundle: &DirectiveBundle, style: ComposeStyle) -> String {
    let default_text = bundle.default_text.as_deref().unwrap_or("no default");
    let none_text = match bundle.none_accepted {
        Some(true) => "yes",
        Some(false) => "no",
        None => "unknown",
    };
    match style {
        ComposeStyle::Rest => format!(
            "{} Defaults to {default_text}. Can be None: {none_text}.",
            param_field(
                &bundle.param_name,
                &bundle.description,
                bundle.datatype.as_deref()
            )
        ),
        ComposeStyle::Google => format!(
            "{} ({}): {} Defaults to {default_text}. Can be None: {none_text}.",
            bundle.param_name,
            bundle.datatype.as_deref().unwrap_or("unknown"),
            bundle.description,
        ),
    }
}

/// Concatenate per-parameter blocks (declaration order) into the final
/// docstring.
pub fn compose_function_docstring(
    bundles: &[DirectiveBundle],
) -> Result<ComposedDocstring, ComposeError> {
    compose_function_docstring_styled(bundles, ComposeStyle::Rest)
}

pub fn compose_function_docstring_styled(
    bundles: &[DirectiveBundle],
    style: ComposeStyle,
) -> Result<ComposedDocstring, ComposeError> {
    if bundles.is_empty() {
        return Err(ComposeError::Empty);
    }
    let per_param_blocks: Vec<String> = bundles
        .iter()
        .map(|b| compose_param_block_styled(b, style))
        .collect();
    Ok(ComposedDocstring {
        text: per_param_blocks.join("\n"),
        per_param_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directives::{Directive, DirectiveBundle, Provenance};
    use std::collections::BTreeMap;

    fn bundle(
        name: &str,
        description: &str,
        datatype: Option<&str>,
        default_text: Option<&str>,
        none_accepted: Option<bool>,
    ) -> DirectiveBundle {
        let mut provenance = BTreeMap::new();
        provenance.insert(Directive::Description, Provenance::Baseline);
        if datatype.is_some() {
            provenance.insert(Directive::Datatype, Provenance::Annotation);
        }
        if default_text.is_some() {
            provenance.insert(Directive::Default, Provenance::Header);
        }
        if none_accepted.is_some() {
            provenance.insert(Directive::NoneAccepted, Provenance::Baseline);
        }
        DirectiveBundle {
            param_name: name.into(),
            description: description.into(),
            datatype: datatype.map(Into::into),
            default_text: default_text.map(Into::into),
            none_accepted,
            provenance,
        }
    }

    #[test]
    fn full_bundle_renders_exactly() {
        let b = bundle("y", "The y.", Some("int"), Some("3"), Some(false));
        assert_eq!(
            compose_param_block(&b),
            ":param y: The y. :type y: int. Defaults to 3. Can be None: no."
        );
    }

    #[test]
    fn absent_directives_render_sentinels() {
        let b = bundle("x", "The x.", None, None, None);
        assert_eq!(
            compose_param_block(&b),
            ":param x: The x. :type x: unknown. Defaults to no default. Can be None: unknown."
        );
    }

    #[test]
    fn none_default_with_yes() {
        let b = bundle("content", "The content.", None, Some("None"), Some(true));
        assert_eq!(
            compose_param_block(&b),
            ":param content: The content. :type content: unknown. Defaults to None. Can be None: yes."
        );
    }

    #[test]
    fn no_trailing_whitespace_and_name_twice() {
        let b = bundle("frame", "Holds rows.", Some("Frame"), None, Some(true));
        let block = compose_param_block(&b);
        assert_eq!(block.trim_end(), block);
        assert_eq!(block.matches("frame").count(), 2);
        assert_eq!(block.matches(":param frame:").count(), 1);
        assert_eq!(block.matches(":type frame:").count(), 1);
    }

    #[test]
    fn blocks_join_with_single_newlines() {
        let bundles = vec![
            bundle("a", "A.", None, None, Some(false)),
            bundle("b", "B.", None, None, Some(false)),
            bundle("c", "C.", None, None, Some(false)),
        ];
        let doc = compose_function_docstring(&bundles).unwrap();
        assert_eq!(doc.per_param_blocks.len(), 3);
        assert_eq!(doc.text.matches('\n').count(), 2);
        assert_eq!(doc.text, doc.per_param_blocks.join("\n"));
    }

    #[test]
    fn single_bundle_is_its_block() {
        let bundles = vec![bundle("a", "A.", None, None, None)];
        let doc = compose_function_docstring(&bundles).unwrap();
        assert_eq!(doc.text, doc.per_param_blocks[0]);
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(
            compose_function_docstring(&[]).unwrap_err(),
            ComposeError::Empty
        );
    }

    #[test]
    fn permutation_reorders_blocks_structurally() {
        let a = bundle("a", "A.", None, None, None);
        let b = bundle("b", "B.", Some("int"), Some("1"), Some(false));
        let fwd = compose_function_docstring(&[a.clone(), b.clone()]).unwrap();
        let rev = compose_function_docstring(&[b, a]).unwrap();
        assert_eq!(fwd.per_param_blocks[0], rev.per_param_blocks[1]);
        assert_eq!(fwd.per_param_blocks[1], rev.per_param_blocks[0]);
    }

    #[test]
    fn google_style_renders() {
        let b = bundle("y", "The y.", Some("int"), Some("3"), Some(false));
        assert_eq!(
            compose_param_block_styled(&b, ComposeStyle::Google),
            "y (int): The y. Defaults to 3. Can be None: no."
        );
    }
}
