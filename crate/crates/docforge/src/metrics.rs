//! Evaluation metrics: corpus BLEU-4, exact+stem METEOR, micro-F1,
//! accuracy, Cohen's kappa, and the finite-population sample-size formula.
//!
//! Both text metrics share one tokenization — lowercase, then whitespace
//! split — so scores are comparable across runs. BLEU is the unsmoothed
//! corpus-level original (any n-gram order with zero matches zeroes the
//! score) with an additive-epsilon smoothing mode behind a flag. METEOR is
//! the exact+stem variant: the synonym stage needs a lexical database and
//! is deliberately omitted; every report labels the variant accordingly.

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {candidates} candidate(s) vs {references} reference(s)")]
    LengthMismatch {
        candidates: usize,
        references: usize,
    },
    #[error("need at least one pair")]
    Empty,
    #[error("labels must be 0 or 1, found {0}")]
    BadLabel(u8),
    #[error("degenerate marginals: chance agreement is 1 but observed agreement is not")]
    DegenerateMarginals,
    #[error("unsupported confidence {0}; use 0.90, 0.95, or 0.99")]
    UnsupportedConfidence(f64),
    #[error("margin must lie strictly between 0 and 1, got {0}")]
    BadMargin(f64),
    #[error("population must be ≥ 1")]
    BadPopulation,
}

/// Scores for one evaluation run. The text metrics are always computed;
/// the classification metrics appear only in label mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub bleu4: f64,
    /// Exact+stem METEOR (no synonym stage), averaged over pairs.
    pub meteor: f64,
    pub micro_f1: Option<f64>,
    pub accuracy: Option<f64>,
    pub kappa: Option<f64>,
    pub n_samples: usize,
}

/// The shared tokenization: lowercase, split on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Zero-match handling for BLEU n-gram precisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    /// The cited original: any order with zero matches → corpus score 0.
    None,
    /// p_n = (matches + ε) / (total + ε), keeping scores nonzero.
    AddEpsilon(f64),
}

/// Unsmoothed corpus BLEU-4 over tokenized pairs.
pub fn bleu4(
    candidates: &[Vec<String>],
    references: &[Vec<String>],
) -> Result<f64, MetricsError> {
    bleu4_with(candidates, references, Smoothing::None)
}

/// Corpus BLEU-4: clipped n-gram counts pooled over the corpus for orders
/// 1–4 with uniform 0.25 weights, times the brevity penalty
/// `exp(1 − r/c)` when the candidate corpus is no longer than the
/// reference corpus.
pub fn bleu4_with(
    candidates: &[Vec<String>],
    references: &[Vec<String>],
    smoothing: Smoothing,
) -> Result<f64, MetricsError> {
    if candidates.len() != references.len() {
        return Err(MetricsError::LengthMismatch {
            candidates: candidates.len(),
            references: references.len(),
        });
    }
    if candidates.is_empty() {
        return Err(MetricsError::Empty);
    }

    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    for (candidate, reference) in candidates.iter().zip(references) {
        for n in 1..=4usize {
            totals[n - 1] += candidate.len().saturating_sub(n - 1);
            let ref_counts = ngram_counts(reference, n);
            for (gram, count) in ngram_counts(candidate, n) {
                matches[n - 1] += count.min(ref_counts.get(gram).copied().unwrap_or(0));
            }
        }
    }

    let c: usize = candidates.iter().map(Vec::len).sum();
    let r: usize = references.iter().map(Vec::len).sum();
    if c == 0 {
        return Ok(0.0);
    }

    let mut log_sum = 0.0;
    for n in 0..4 {
        let p = match smoothing {
            Smoothing::None => {
                if matches[n] == 0 {
                    return Ok(0.0);
                }
                matches[n] as f64 / totals[n] as f64
            }
            Smoothing::AddEpsilon(eps) => {
                (matches[n] as f64 + eps) / (totals[n] as f64 + eps)
            }
        };
        log_sum += 0.25 * p.ln();
    }
    let brevity_penalty = if c > r {
        1.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    Ok(brevity_penalty * log_sum.exp())
}

fn ngram_counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut counts = BTreeMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Exact+stem METEOR for one pair.
///
/// Alignment is two greedy left-to-right stages — exact surface matches,
/// then suffix-stripped (stemmed) matches over the leftovers. With m
/// matched tokens, precision/recall feed the α=0.9 F-mean
/// `P·R / (0.9·P + 0.1·R)`, and the fragmentation penalty is
/// `0.5·(chunks/m)³` where a chunk is a maximal run of matches contiguous
/// on both sides. Score = F-mean · (1 − penalty); no matches → 0.
pub fn meteor(candidate: &[String], reference: &[String]) -> f64 {
    if candidate.is_empty() || reference.is_empty() {
        return 0.0;
    }
    let mut alignment: Vec<Option<usize>> = vec![None; candidate.len()];
    let mut used = vec![false; reference.len()];
    for (i, token) in candidate.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference[j] == *token) {
            alignment[i] = Some(j);
            used[j] = true;
        }
    }
    let stemmer = Stemmer::create(Algorithm::English);
    let reference_stems: Vec<String> = reference
        .iter()
        .map(|t| stemmer.stem(t).to_string())
        .collect();
    for (i, token) in candidate.iter().enumerate() {
        if alignment[i].is_some() {
            continue;
        }
        let stem = stemmer.stem(token).to_string();
        if let Some(j) = (0..reference.len()).find(|&j| !used[j] && reference_stems[j] == stem) {
            alignment[i] = Some(j);
            used[j] = true;
        }
    }

    let matched: Vec<(usize, usize)> = alignment
        .iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect();
    let m = matched.len();
    if m == 0 {
        return 0.0;
    }
    let precision = m as f64 / candidate.len() as f64;
    let recall = m as f64 / reference.len() as f64;
    let f_mean = precision * recall / (0.9 * precision + 0.1 * recall);
    let mut chunks = 1usize;
    for pair in matched.windows(2) {
        let contiguous = pair[1].0 == pair[0].0 + 1 && pair[1].1 == pair[0].1 + 1;
        if !contiguous {
            chunks += 1;
        }
    }
    let penalty = 0.5 * (chunks as f64 / m as f64).powi(3);
    f_mean * (1.0 - penalty)
}

/// Mean METEOR over a corpus of pairs.
pub fn meteor_mean(
    candidates: &[Vec<String>],
    references: &[Vec<String>],
) -> Result<f64, MetricsError> {
    if candidates.len() != references.len() {
        return Err(MetricsError::LengthMismatch {
            candidates: candidates.len(),
            references: references.len(),
        });
    }
    if candidates.is_empty() {
        return Err(MetricsError::Empty);
    }
    let sum: f64 = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| meteor(c, r))
        .sum();
    Ok(sum / candidates.len() as f64)
}

fn validate_labels(a: &[u8], b: &[u8]) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            candidates: a.len(),
            references: b.len(),
        });
    }
    if a.is_empty() {
        return Err(MetricsError::Empty);
    }
    for &label in a.iter().chain(b) {
        if label > 1 {
            return Err(MetricsError::BadLabel(label));
        }
    }
    Ok(())
}

/// Fraction of positions where prediction equals label.
pub fn accuracy(predictions: &[u8], labels: &[u8]) -> Result<f64, MetricsError> {
    validate_labels(predictions, labels)?;
    let correct = predictions
        .iter()
        .zip(labels)
        .filter(|(p, l)| p == l)
        .count();
    Ok(correct as f64 / predictions.len() as f64)
}

/// Micro-averaged F1 over both classes. For single-label binary
/// classification every false positive for one class is a false negative
/// for the other, so micro precision, recall, and F1 all equal accuracy;
/// the pooled computation below keeps that explicit.
pub fn micro_f1(predictions: &[u8], labels: &[u8]) -> Result<f64, MetricsError> {
    validate_labels(predictions, labels)?;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for class in [0u8, 1u8] {
        for (&p, &l) in predictions.iter().zip(labels) {
            match (p == class, l == class) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    let denominator = 2 * tp + fp + fn_;
    if denominator == 0 {
        return Ok(0.0);
    }
    Ok(2.0 * tp as f64 / denominator as f64)
}

/// Cohen's kappa for two binary raters: κ = (p_o − p_e)/(1 − p_e), with
/// chance agreement p_e from the marginal products. Degenerate marginals
/// (p_e = 1) are defined as 1.0 when the raters agree everywhere and are
/// an error otherwise.
pub fn cohens_kappa(rater_a: &[u8], rater_b: &[u8]) -> Result<f64, MetricsError> {
    validate_labels(rater_a, rater_b)?;
    let n = rater_a.len();
    let agreements = rater_a
        .iter()
        .zip(rater_b)
        .filter(|(a, b)| a == b)
        .count();
    let a_ones = rater_a.iter().filter(|&&v| v == 1).count();
    let b_ones = rater_b.iter().filter(|&&v| v == 1).count();
    // Exact integer arithmetic: p_e = 1 ⟺ this numerator equals n².
    let chance_numerator = a_ones * b_ones + (n - a_ones) * (n - b_ones);
    if chance_numerator == n * n {
        return if agreements == n {
            Ok(1.0)
        } else {
            Err(MetricsError::DegenerateMarginals)
        };
    }
    let p_o = agreements as f64 / n as f64;
    let p_e = chance_numerator as f64 / (n * n) as f64;
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Minimum sample size for a proportion estimate at the given confidence
/// and margin of error, with finite-population correction:
/// n₀ = z²·0.25/margin², n = ⌈n₀ / (1 + (n₀−1)/population)⌉.
pub fn sample_size(population: u64, confidence: f64, margin: f64) -> Result<u64, MetricsError> {
    if population == 0 {
        return Err(MetricsError::BadPopulation);
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(MetricsError::BadMargin(margin));
    }
    let z = match (confidence * 100.0).round() as u32 {
        90 => 1.645,
        95 => 1.96,
        99 => 2.576,
        _ => return Err(MetricsError::UnsupportedConfidence(confidence)),
    };
    let n0 = z * z * 0.25 / (margin * margin);
    let corrected = n0 / (1.0 + (n0 - 1.0) / population as f64);
    Ok(corrected.ceil() as u64)
}

/// Text-mode evaluation: corpus BLEU-4 plus mean METEOR over raw strings,
/// tokenized with the shared rule.
pub fn evaluate_text_pairs(
    candidates: &[String],
    references: &[String],
    smoothing: Smoothing,
) -> Result<MetricReport, MetricsError> {
    let candidate_tokens: Vec<Vec<String>> = candidates.iter().map(|s| tokenize(s)).collect();
    let reference_tokens: Vec<Vec<String>> = references.iter().map(|s| tokenize(s)).collect();
    Ok(MetricReport {
        bleu4: bleu4_with(&candidate_tokens, &reference_tokens, smoothing)?,
        meteor: meteor_mean(&candidate_tokens, &reference_tokens)?,
        micro_f1: None,
        accuracy: None,
        kappa: None,
        n_samples: candidates.len(),
    })
}

/// Label-mode evaluation: micro-F1, accuracy, and kappa over 0/1 labels.
/// The text metrics run over the label digits and are degenerate here;
/// the classification fields are the headline numbers.
pub fn evaluate_label_pairs(
    predictions: &[u8],
    labels: &[u8],
) -> Result<MetricReport, MetricsError> {
    let candidate_tokens: Vec<Vec<String>> =
        predictions.iter().map(|v| vec![v.to_string()]).collect();
    let reference_tokens: Vec<Vec<String>> = labels.iter().map(|v| vec![v.to_string()]).collect();
    Ok(MetricReport {
        bleu4: bleu4_with(&candidate_tokens, &reference_tokens, Smoothing::None)?,
        meteor: meteor_mean(&candidate_tokens, &reference_tokens)?,
        micro_f1: Some(micro_f1(predictions, labels)?),
        accuracy: Some(accuracy(predictions, labels)?),
        kappa: Some(cohens_kappa(predictions, labels)?),
        n_samples: predictions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text)
    }

    // -- tokenize -----------------------------------------------------------

    #[test]
    fn tokenize_lowercases_and_splits() {
        assert_eq!(toks("The  Cat\tSAT"), vec!["the", "cat", "sat"]);
        assert!(toks("   ").is_empty());
    }

    // -- bleu4 --------------------------------------------------------------

    #[test]
    fn bleu_identity_is_one() {
        let c = vec![toks("the quick brown fox jumps")];
        assert!((bleu4(&c, &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bleu_no_overlap_is_zero() {
        let c = vec![toks("alpha beta gamma delta")];
        let r = vec![toks("one two three four")];
        assert_eq!(bleu4(&c, &r).unwrap(), 0.0);
    }

    #[test]
    fn bleu_short_candidate_without_fourgrams_is_zero_unsmoothed() {
        let c = vec![toks("the cat sat")];
        let r = vec![toks("the cat sat on the mat")];
        assert_eq!(bleu4(&c, &r).unwrap(), 0.0);
    }

    #[test]
    fn bleu_epsilon_smoothing_rescues_zero_orders() {
        let c = vec![toks("the cat sat")];
        let r = vec![toks("the cat sat on the mat")];
        let smoothed = bleu4_with(&c, &r, Smoothing::AddEpsilon(0.1)).unwrap();
        assert!(smoothed > 0.0);
        assert!(smoothed < 1.0);
    }

    #[test]
    fn bleu_case_insensitive_via_shared_tokenizer() {
        let c = vec![toks("The Cat Sat On The Mat")];
        let r = vec![toks("the cat sat on the mat")];
        assert!((bleu4(&c, &r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bleu_length_mismatch_errors() {
        let c = vec![toks("a b c d")];
        assert_eq!(
            bleu4(&c, &[]).unwrap_err(),
            MetricsError::LengthMismatch { candidates: 1, references: 0 }
        );
    }

    #[test]
    fn bleu_hand_verified_pair() {
        // candidate "the cat sat on mat" vs reference "the cat sat on the mat":
        // p1=5/5, p2=3/4, p3=2/3, p4=1/2, BP=exp(1-6/5)
        // → exp(-0.2)·(0.25)^0.25 = 0.57893006746…
        let c = vec![toks("the cat sat on mat")];
        let r = vec![toks("the cat sat on the mat")];
        let got = bleu4(&c, &r).unwrap();
        assert!((got - 0.5789300674674098).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn bleu_matches_frozen_reference_fixtures() {
        let raw = include_str!("../tests/fixtures/bleu_pairs.json");
        let fixture: serde_json::Value = serde_json::from_str(raw).unwrap();
        let pairs = fixture["pairs"].as_array().unwrap();
        assert_eq!(pairs.len(), 10);
        let mut all_candidates = Vec::new();
        let mut all_references = Vec::new();
        for pair in pairs {
            let candidate = vec![toks(pair["candidate"].as_str().unwrap())];
            let reference = vec![toks(pair["reference"].as_str().unwrap())];
            let want = pair["bleu4"].as_f64().unwrap();
            let got = bleu4(&candidate, &reference).unwrap();
            assert!(
                (got - want).abs() < 1e-6,
                "pair {:?}: got {got}, want {want}",
                pair["candidate"]
            );
            all_candidates.extend(candidate);
            all_references.extend(reference);
        }
        let corpus_want = fixture["corpus_bleu4"].as_f64().unwrap();
        let corpus_got = bleu4(&all_candidates, &all_references).unwrap();
        assert!(
            (corpus_got - corpus_want).abs() < 1e-6,
            "corpus: got {corpus_got}, want {corpus_want}"
        );
    }

    #[test]
    fn bleu_clips_repeated_ngrams() {
        // "the the the the the" against a reference with two "the"s: clipped
        // unigram count is 2, not 5.
        let c = vec![toks("the the the the the")];
        let r = vec![toks("the cat the mat")];
        // p1 = 2/5; higher orders have zero matches → unsmoothed score 0.
        assert_eq!(bleu4(&c, &r).unwrap(), 0.0);
        let smoothed = bleu4_with(&c, &r, Smoothing::AddEpsilon(0.01)).unwrap();
        assert!(smoothed < 0.4);
    }

    #[test]
    fn bleu_stays_within_unit_interval() {
        let cases = [
            ("a b c d e f", "a b c d e f"),
            ("a a a a", "a b c d"),
            ("x", "x"),
            ("one two three four five", "one two three four"),
        ];
        for (c, r) in cases {
            let got = bleu4(&[toks(c)], &[toks(r)]).unwrap();
            assert!((0.0..=1.0).contains(&got), "{c} vs {r} → {got}");
        }
    }

    // -- meteor --------------------------------------------------------------

    #[test]
    fn meteor_identity_matches_closed_form() {
        let tokens = toks("the quick brown fox jumps high");
        assert_eq!(tokens.len(), 6);
        let want = 1.0 - 0.5 * (1.0f64 / 6.0).powi(3);
        let got = meteor(&tokens, &tokens);
        assert!((got - want).abs() < 1e-9, "got {got}, want {want}");
    }

    #[test]
    fn meteor_identity_closed_form_general() {
        for n in 1..=10usize {
            let tokens: Vec<String> = (0..n).map(|i| format!("tok{i}")).collect();
            let want = 1.0 - 0.5 * (1.0 / n as f64).powi(3);
            let got = meteor(&tokens, &tokens);
            assert!((got - want).abs() < 1e-9, "n={n}: got {got}, want {want}");
        }
    }

    #[test]
    fn meteor_zero_matches_is_zero() {
        assert_eq!(meteor(&toks("alpha beta"), &toks("gamma delta")), 0.0);
        assert_eq!(meteor(&[], &toks("a")), 0.0);
    }

    #[test]
    fn meteor_stem_stage_matches_morphology() {
        // "running" vs "runs": no exact match, but both stem to "run" →
        // m=1, P=R=1, F-mean=1, one chunk → penalty 0.5 → score 0.5.
        let got = meteor(&toks("running"), &toks("runs"));
        assert!((got - 0.5).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn meteor_penalizes_fragmentation() {
        // Same multiset of matches, different orderings: the scrambled
        // candidate has more chunks and must score strictly lower.
        let reference = toks("a b c d e f");
        let in_order = toks("a b c d e f");
        let scrambled = toks("b a d c f e");
        let smooth = meteor(&in_order, &reference);
        let ragged = meteor(&scrambled, &reference);
        assert!(ragged < smooth, "{ragged} vs {smooth}");
    }

    #[test]
    fn meteor_alpha_weights_recall_over_precision() {
        // α = 0.9 puts most of the harmonic weight on recall: leaving
        // reference content uncovered hurts more than padding the
        // candidate with extra tokens. Hand-computed F-means: extra
        // candidate tokens (P=2/3, R=1) → 0.9524…; missing reference
        // tokens (P=1, R=2/3) → 0.6897…; the penalty is identical.
        let base = toks("a b c d");
        let longer_candidate = toks("a b c d x y");
        let longer_reference = toks("a b c d x y");
        let precision_hit = meteor(&longer_candidate, &base);
        let recall_hit = meteor(&base, &longer_reference);
        assert!(recall_hit < precision_hit, "{recall_hit} vs {precision_hit}");
        let penalty = 1.0 - 0.5 * (1.0f64 / 4.0).powi(3);
        assert!((precision_hit - (2.0 / 2.1) * penalty).abs() < 1e-9);
        assert!((recall_hit - (2.0 / 2.9) * penalty).abs() < 1e-9);
    }

    // -- micro_f1 / accuracy ---------------------------------------------------

    #[test]
    fn micro_f1_all_correct_and_all_wrong() {
        assert_eq!(micro_f1(&[1, 0, 1], &[1, 0, 1]).unwrap(), 1.0);
        assert_eq!(micro_f1(&[1, 0, 1], &[0, 1, 0]).unwrap(), 0.0);
    }

    #[test]
    fn micro_f1_three_of_four() {
        assert_eq!(micro_f1(&[1, 1, 0, 0], &[1, 1, 0, 1]).unwrap(), 0.75);
    }

    #[test]
    fn micro_f1_equals_accuracy_binary() {
        let p = [1, 0, 1, 1, 0, 0, 1, 0];
        let l = [1, 1, 0, 1, 0, 1, 1, 0];
        assert_eq!(micro_f1(&p, &l).unwrap(), accuracy(&p, &l).unwrap());
    }

    #[test]
    fn micro_f1_symmetric_under_global_label_flip() {
        let p = [1u8, 0, 1, 1, 0];
        let l = [1u8, 1, 0, 1, 0];
        let flipped_p: Vec<u8> = p.iter().map(|v| 1 - v).collect();
        let flipped_l: Vec<u8> = l.iter().map(|v| 1 - v).collect();
        assert_eq!(
            micro_f1(&p, &l).unwrap(),
            micro_f1(&flipped_p, &flipped_l).unwrap()
        );
    }

    #[test]
    fn labels_outside_binary_are_rejected() {
        assert_eq!(
            micro_f1(&[2], &[1]).unwrap_err(),
            MetricsError::BadLabel(2)
        );
        assert_eq!(
            accuracy(&[0], &[3]).unwrap_err(),
            MetricsError::BadLabel(3)
        );
    }

    // -- cohens_kappa -------------------------------------------------------------

    #[test]
    fn kappa_identical_vectors_with_both_classes() {
        assert_eq!(cohens_kappa(&[1, 0, 1, 0], &[1, 0, 1, 0]).unwrap(), 1.0);
    }

    #[test]
    fn kappa_chance_level_is_zero() {
        // p_o = 0.5 and p_e = 0.5 → κ = 0.
        let got = cohens_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn kappa_degenerate_marginals() {
        assert_eq!(cohens_kappa(&[1, 1, 1], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(cohens_kappa(&[0, 0], &[0, 0]).unwrap(), 1.0);
    }

    #[test]
    fn kappa_brute_force_contingency_check() {
        // a=[1,1,0,0,1], b=[1,0,0,0,1]: contingency n11=2, n10=1, n01=0,
        // n00=2 → p_o=4/5; marginals a1=3/5, b1=2/5 →
        // p_e = (3·2 + 2·3)/25 = 12/25 → κ = (20/25 − 12/25)/(13/25) = 8/13.
        let got = cohens_kappa(&[1, 1, 0, 0, 1], &[1, 0, 0, 0, 1]).unwrap();
        assert!((got - 8.0 / 13.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn kappa_stays_in_range() {
        let cases: [(&[u8], &[u8]); 4] = [
            (&[1, 0], &[0, 1]),
            (&[1, 1, 0], &[0, 0, 1]),
            (&[1, 0, 1, 0], &[0, 1, 0, 1]),
            (&[1, 0, 0], &[1, 1, 1]),
        ];
        for (a, b) in cases {
            let got = cohens_kappa(a, b).unwrap();
            assert!((-1.0..=1.0).contains(&got), "{a:?} vs {b:?} → {got}");
        }
    }

    // -- sample_size ------------------------------------------------------------------

    #[test]
    fn sample_size_reproduces_the_validation_draw() {
        assert_eq!(sample_size(9112, 0.95, 0.05).unwrap(), 369);
    }

    #[test]
    fn sample_size_limits() {
        assert_eq!(sample_size(1_000_000_000, 0.95, 0.05).unwrap(), 385);
        assert_eq!(sample_size(100, 0.95, 0.05).unwrap(), 80);
    }

    #[test]
    fn sample_size_other_confidences() {
        // Direct evaluation: z=1.645 → n0=270.6025, z=2.576 → n0=663.5776.
        assert_eq!(sample_size(1_000_000_000, 0.90, 0.05).unwrap(), 271);
        assert_eq!(sample_size(1_000_000_000, 0.99, 0.05).unwrap(), 664);
    }

    #[test]
    fn sample_size_monotone_in_population_and_margin() {
        let mut last = 0;
        for population in [10, 100, 1_000, 10_000, 100_000] {
            let n = sample_size(population, 0.95, 0.05).unwrap();
            assert!(n >= last);
            last = n;
        }
        let coarse = sample_size(9112, 0.95, 0.10).unwrap();
        let fine = sample_size(9112, 0.95, 0.01).unwrap();
        assert!(coarse <= fine);
    }

    #[test]
    fn sample_size_rejects_bad_inputs() {
        assert!(matches!(
            sample_size(9112, 0.80, 0.05).unwrap_err(),
            MetricsError::UnsupportedConfidence(_)
        ));
        assert_eq!(
            sample_size(9112, 0.95, 0.0).unwrap_err(),
            MetricsError::BadMargin(0.0)
        );
        assert_eq!(
            sample_size(0, 0.95, 0.05).unwrap_err(),
            MetricsError::BadPopulation
        );
    }

    // -- report helpers ------------------------------------------------------------------

    #[test]
    fn text_report_identity_corpus() {
        let texts: Vec<String> = vec![
            "the path to the output file".into(),
            "number of grams to build".into(),
        ];
        let report = evaluate_text_pairs(&texts, &texts, Smoothing::None).unwrap();
        assert!((report.bleu4 - 1.0).abs() < 1e-12);
        assert!(report.meteor > 0.99);
        assert_eq!(report.micro_f1, None);
        assert_eq!(report.n_samples, 2);
    }

    #[test]
    fn label_report_populates_classification_fields() {
        let report = evaluate_label_pairs(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(report.micro_f1, Some(0.5));
        assert_eq!(report.accuracy, Some(0.5));
        assert_eq!(report.kappa, Some(0.0));
        assert_eq!(report.n_samples, 4);
    }
}
