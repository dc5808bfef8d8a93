//! Build the three training datasets from documented functions: Formatted
//! (one record per function), Exploded (one record per parameter), and the
//! balanced PN set for the None-acceptance classifier.
//!
//!     cargo run --example build_datasets

use docforge::{
    balance, build_formatted, extract_functions, parse_docstring, split, SourceFile,
};

const SOURCE: &str = r#"
def connect(host, port=5432, timeout=None):
    """Open a connection.

    :param host: Server hostname or address.
    :param port: TCP port to dial. Defaults to 5432.
    :param timeout: Seconds to wait, or None to block forever.
    """
    return _dial(host, port, timeout)


def tail(path, lines=10):
    """Read the end of a file.

    :param path: File to read. See https://example.org/docs for formats.
    :param lines: How many trailing lines to keep.
    """
    return _read_tail(path, lines)


def choose(options, default=None):
    """Pick an option.

    :param options: Candidate values, best first.
    :param default: Fallback when options is empty; None disables it.
    """
    return options[0] if options else default
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceFile {
        path: "demo.py".to_string(),
        text: SOURCE.to_string(),
    };

    let pairs: Vec<_> = extract_functions(&source)?
        .into_iter()
        .map(|record| {
            let parsed = parse_docstring(record.raw_docstring.as_deref().unwrap_or(""));
            (record, parsed)
        })
        .collect();

    let formatted = build_formatted(&pairs)?;
    println!("formatted ({} records):", formatted.len());
    for record in &formatted {
        println!("  {} -> {:?}", record.function.qualified_name, record.target_text);
    }

    // One record per parameter; descriptions are cleaned (URLs dropped,
    // whitespace collapsed) and labeled for None-acceptance.
    let exploded: Vec<_> = formatted.iter().flat_map(docforge::explode).collect();
    println!("\nexploded ({} records):", exploded.len());
    for record in &exploded {
        println!(
            "  [{}] {} {:?} -> {:?}",
            record.none_label, record.param_name, record.input_text.split('\n').next().unwrap(),
            record.target_description
        );
    }

    let seed = 7;
    let balanced = balance(&exploded, seed)?;
    let positives = balanced.iter().filter(|r| r.none_label == 1).count();
    println!(
        "\nbalanced PN set: {} records ({} positive, {} negative)",
        balanced.len(),
        positives,
        balanced.len() - positives
    );

    // The split never separates records of the same function.
    let (train, valid) = split(&exploded, 0.7, seed)?;
    println!("split: {} train / {} valid", train.len(), valid.len());
    Ok(())
}
