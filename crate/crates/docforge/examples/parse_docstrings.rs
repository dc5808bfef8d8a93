//! Parse docstrings written in the ReST, Google, and NumPy conventions,
//! then rank how completely each documents its function's parameters.
//!
//!     cargo run --example parse_docstrings

use docforge::{
    completeness_rank, extract_functions, extract_parameters, has_param_tokens, parse_docstring,
    SourceFile,
};

const SOURCE: &str = r#"
def rest_style(path, mode="r"):
    """Open a resource.

    :param path: Filesystem location to open.
    :param mode: Access mode. Defaults to read-only.
    :returns: An open handle.
    """
    return _open(path, mode)


def google_style(frame, columns):
    """Project a frame onto columns.

    Args:
        frame: The input table.
        columns: Names to keep, in order.

    Returns:
        The projected table.
    """
    return frame[columns]


def numpy_style(a, b, atol=1e-8):
    """Compare two arrays.

    Parameters
    ----------
    a : array_like
        Left operand.
    b : array_like
        Right operand.

    Returns
    -------
    bool
    """
    return _close(a, b, atol)


def undocumented(x, y):
    """Multiply the inputs."""
    return x * y
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceFile {
        path: "styles.py".to_string(),
        text: SOURCE.to_string(),
    };

    for record in extract_functions(&source)? {
        let raw = record.raw_docstring.as_deref().unwrap_or("");
        let parsed = parse_docstring(raw);
        let params = extract_parameters(&record);
        let rank = completeness_rank(&parsed, &params);

        println!("{}", record.qualified_name);
        println!("  style:        {:?}", parsed.style);
        println!("  param tokens: {}", has_param_tokens(raw));
        println!(
            "  rank:         {:?} ({} of {} documented)",
            rank.rank, rank.doc_param_count, rank.header_param_count
        );
        for entry in &parsed.params {
            println!("    {} -> {:?}", entry.name, entry.description);
        }
        println!();
    }
    Ok(())
}
