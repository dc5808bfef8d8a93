//! Score generated descriptions against references with corpus BLEU-4 and
//! METEOR, score binary predictions with micro-F1 and Cohen's kappa, and
//! size an annotation study.
//!
//!     cargo run --example evaluate_metrics

use docforge::{
    cohens_kappa, evaluate_label_pairs, evaluate_text_pairs, sample_size, Smoothing,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let candidates = [
        "the path to the output file".to_string(),
        "number of retries before giving up".to_string(),
        "whether to overwrite existing data".to_string(),
    ];
    let references = [
        "path to the output file".to_string(),
        "how many retries to attempt before giving up".to_string(),
        "set to overwrite existing data".to_string(),
    ];

    let report = evaluate_text_pairs(&candidates, &references, Smoothing::None)?;
    println!("text metrics over {} pairs:", report.n_samples);
    println!("  corpus BLEU-4: {:.4}", report.bleu4);
    println!("  METEOR:        {:.4}", report.meteor);

    // Short candidates often share no 4-gram with the reference; the
    // epsilon variant keeps those pairs comparable instead of zeroing out.
    let smoothed = evaluate_text_pairs(&candidates, &references, Smoothing::AddEpsilon(0.1))?;
    println!("  BLEU-4 (+0.1): {:.4}", smoothed.bleu4);

    let predicted = [1, 0, 1, 1, 0, 0, 1, 0];
    let actual = [1, 0, 1, 0, 0, 1, 1, 0];
    let labels = evaluate_label_pairs(&predicted, &actual)?;
    println!("\nlabel metrics over {} pairs:", labels.n_samples);
    println!("  micro-F1:  {:.4}", labels.micro_f1.unwrap());
    println!("  accuracy:  {:.4}", labels.accuracy.unwrap());
    println!("  kappa:     {:.4}", labels.kappa.unwrap());

    let rater_a = [1, 1, 0, 0, 1, 0];
    let rater_b = [1, 0, 0, 0, 1, 1];
    println!(
        "\ninter-rater agreement: kappa = {:.4}",
        cohens_kappa(&rater_a, &rater_b)?
    );

    // How many docstrings must be annotated to estimate quality over a
    // corpus of 9112 at 95% confidence with a 5% margin?
    println!("\nsample sizes at 95% / 5% margin:");
    for population in [500u64, 9112, 1_000_000] {
        println!("  population {:>9}: {}", population, sample_size(population, 0.95, 0.05)?);
    }
    Ok(())
}
