//! Produce the four per-parameter directives (description, datatype,
//! default, None-acceptance) and compose them into a docstring — first
//! with deterministic baselines only, then with stub model backends wired
//! in to show where predictions take over.
//!
//!     cargo run --example generate_docstrings

use docforge::{
    build_bundle, compose_function_docstring, extract_functions, extract_parameters, BackendSet,
    ConstantBackend, SourceFile,
};

const SOURCE: &str = r#"
def export_report(frame, path, fmt="csv", columns=None):
    return _write(frame, path, fmt, columns)
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let source = SourceFile {
        path: "report.py".to_string(),
        text: SOURCE.to_string(),
    };
    let record = extract_functions(&source)?.remove(0);
    let n_params = extract_parameters(&record).len();

    // Hermetic run: no backends, so every directive falls back to its
    // deterministic baseline and provenance records that.
    let baselines = BackendSet::default();
    println!("baseline bundles:");
    let mut bundles = Vec::new();
    for index in 1..=n_params {
        let bundle = build_bundle(&record, index, &baselines)?;
        println!(
            "  parameter {index} ({}): {:?}  datatype={:?}  default={:?}  none={:?}",
            bundle.param_name,
            bundle.description,
            bundle.datatype,
            bundle.default_text,
            bundle.none_accepted
        );
        for (directive, provenance) in &bundle.provenance {
            println!("      {directive:?} <- {provenance:?}");
        }
        bundles.push(bundle);
    }
    println!("\ncomposed (baselines):\n{}", compose_function_docstring(&bundles)?.text);

    // The same call with backends attached: a generation model writes the
    // descriptions and a classifier decides None-acceptance. Stubs stand in
    // for real servers here; `HttpBackend` plugs into the same slots.
    let generation = ConstantBackend::new("Serialized copy of the input.", 1, 0.93);
    let classification = ConstantBackend::new("", 1, 0.93);
    let backends = BackendSet {
        generation: Some(&generation),
        classification: Some(&classification),
        type_service: None,
    };
    let bundles: Vec<_> = (1..=n_params)
        .map(|index| build_bundle(&record, index, &backends))
        .collect::<Result<_, _>>()?;
    println!("\ncomposed (with backends):\n{}", compose_function_docstring(&bundles)?.text);
    Ok(())
}
