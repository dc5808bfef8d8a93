//! Apply the repository inclusion/exclusion criteria to a batch of
//! metadata records and print each verdict.
//!
//!     cargo run --example filter_repos

use docforge::{apply_iec, IecConfig, PartialRepoMetadata};

const METADATA: &str = r#"
{"repo_id": "orion-lab/arraykit", "language_fractions": {"Python": 0.92, "Shell": 0.05}, "license_id": "MIT", "topics": ["data-science"], "last_commit": "2023-04-18", "is_fork": false, "primary_natural_language": "en"}
{"repo_id": "quarry/datasets", "language_fractions": {"Python": 0.6, "C": 0.35}, "license_id": "MIT", "topics": ["machine-learning"], "last_commit": "2023-05-01", "is_fork": false, "primary_natural_language": "en"}
{"repo_id": "mudlark/legacy", "language_fractions": {"Python": 0.4, "Fortran": 0.55}, "license_id": "Proprietary", "topics": ["science"], "last_commit": "2021-11-05", "is_fork": false, "primary_natural_language": "en"}
{"repo_id": "pine/edge", "language_fractions": {"Python": 0.75}, "license_id": "CC-BY-4.0", "topics": ["statistics"], "last_commit": "2023-02-01", "is_fork": false}
{"repo_id": "cobalt/unlabeled", "language_fractions": {"Python": 0.95}, "license_id": "CC0-1.0", "topics": ["data-science"], "is_fork": false}
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = IecConfig::default();
    println!(
        "criteria: ≥{}% Python, {} licenses, {} topics, active since {}",
        config.python_fraction_threshold * 100.0,
        config.license_whitelist.len(),
        config.topic_whitelist.len(),
        config.activity_cutoff
    );
    println!();

    for line in METADATA.lines().filter(|l| !l.trim().is_empty()) {
        let partial: PartialRepoMetadata = serde_json::from_str(line)?;
        match partial.complete() {
            Ok(meta) => {
                let verdict = apply_iec(&meta, &config);
                let status = if verdict.included { "include" } else { "exclude" };
                print!("{status:<8} {}", meta.repo_id);
                if !verdict.triggered_codes.is_empty() {
                    print!("  triggered: {}", verdict.triggered_codes.join(", "));
                }
                if !verdict.unchecked.is_empty() {
                    print!("  unchecked: {}", verdict.unchecked.join(", "));
                }
                println!();
            }
            Err(why) => println!("skip     ({why})"),
        }
    }
    Ok(())
}
