//! The release gate: one test per acceptance criterion, each printing a
//! `criterion N (...): pass` line (run with `--nocapture` to see them).
//! Tolerances are pinned here and nowhere else — a change that moves any
//! of these numbers is a behavior change, not a refactor.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use docforge::pipeline::run_hermetic_pipeline;
use docforge::py_extract::{extract_functions, extract_parameters, SourceFile};
use docforge::{
    balance, bleu4, build_bundle, build_formatted, cohens_kappa, completeness_rank, explode,
    label_none_acceptance, meteor, parse_docstring, sample_size, scan_corpus, BackendConfig,
    BackendError, BackendSet, ExplodedRecord, GenerationBackend, HttpBackend, PipelineConfig,
    Provenance, Rank,
};

fn fixture(path: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(path)
}

#[test]
fn c01_pinned_sample_sizes() {
    let cases = [
        ((9_112u64, 0.95, 0.05), 369u64),
        ((1_000_000_000, 0.95, 0.05), 385),
        ((100, 0.95, 0.05), 80),
        ((9_112, 0.90, 0.05), 263),
        ((9_112, 0.99, 0.05), 619),
    ];
    for ((population, confidence, margin), expected) in cases {
        assert_eq!(
            sample_size(population, confidence, margin).unwrap(),
            expected,
            "sample_size({population}, {confidence}, {margin})"
        );
    }
    println!("criterion 1 (pinned sample sizes): pass");
}

#[test]
fn c02_completeness_ranks_on_reference_signature() {
    let partial = r#"
def precook(s, n=4, out=False):
    """Takes a string as input and returns an object that can be given to
    either cook_refs or cook_test.

    :param s: string : sentence to be converted into ngrams
    :param n: int    : number of ngrams for which representation is calculated
    :return: term frequency vector for occurring ngrams
    """
    return _counts(s, n, out)
"#;
    let fully = r#"
def precook(s, n=4, out=False):
    """Takes a string as input and returns an object.

    :param s: string : sentence to be converted into ngrams
    :param n: int    : number of ngrams for which representation is calculated
    :param out: bool : whether to return the raw counts
    """
    return _counts(s, n, out)
"#;
    for (source, expected) in [(partial, Rank::Two), (fully, Rank::One)] {
        let record = extract_functions(&SourceFile {
            path: "precook.py".into(),
            text: source.into(),
        })
        .unwrap()
        .remove(0);
        let parsed = parse_docstring(record.raw_docstring.as_deref().unwrap());
        let params = extract_parameters(&record);
        assert_eq!(completeness_rank(&parsed, &params).rank, expected);
    }
    println!("criterion 2 (completeness ranks two/one on the reference signature): pass");
}

#[test]
fn c03_default_extraction_matches_interpreter_oracle() {
    #[derive(serde::Deserialize)]
    struct OracleParam {
        name: String,
        default: Option<String>,
    }
    #[derive(serde::Deserialize)]
    struct OracleEntry {
        qualified_name: String,
        params: Vec<OracleParam>,
    }

    let started = Instant::now();
    let text = std::fs::read_to_string(fixture("signatures/signatures.py")).unwrap();
    let oracle: Vec<OracleEntry> =
        serde_json::from_str(&std::fs::read_to_string(fixture("signatures/oracle.json")).unwrap())
            .unwrap();
    assert!(oracle.len() >= 200, "need ≥200 oracle signatures, have {}", oracle.len());

    let records = extract_functions(&SourceFile {
        path: "signatures.py".into(),
        text,
    })
    .unwrap();
    assert_eq!(records.len(), oracle.len());

    let mut compared = 0usize;
    for (record, entry) in records.iter().zip(&oracle) {
        assert_eq!(record.qualified_name, entry.qualified_name);
        let defaults = docforge::extract_defaults(record);
        for param in &entry.params {
            assert_eq!(
                defaults.get(&param.name),
                param.default.as_ref(),
                "{}.{}",
                entry.qualified_name,
                param.name
            );
            compared += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "oracle run took {elapsed:?}");
    println!(
        "criterion 3 (default extraction, {} signatures / {compared} parameters, 100% oracle agreement in {elapsed:?}): pass",
        oracle.len()
    );
}

#[test]
fn c04_explosion_conserves_fixture_corpus() {
    let scan = scan_corpus(&fixture("corpus")).unwrap();
    let mut pairs = Vec::new();
    for file in &scan.files {
        let Ok(records) = extract_functions(file) else { continue };
        for record in records {
            let parsed = parse_docstring(record.raw_docstring.as_deref().unwrap_or(""));
            let params = extract_parameters(&record);
            if !params.is_empty() && completeness_rank(&parsed, &params).rank == Rank::One {
                pairs.push((record, parsed));
            }
        }
    }
    let formatted = build_formatted(&pairs).unwrap();
    let exploded: Vec<ExplodedRecord> = formatted.iter().flat_map(explode).collect();

    let expected: usize = formatted.iter().map(|f| f.cleaned_params.len()).sum();
    assert_eq!(exploded.len(), expected, "one exploded record per documented parameter");
    assert!(!exploded.is_empty());
    for record in &exploded {
        let prefix = format!("parameter {}: ", record.param_index);
        assert!(
            record.input_text.starts_with(&prefix),
            "bad prefix in {:?}",
            record.input_text
        );
    }
    println!(
        "criterion 4 (explosion conserves parameters, {} -> {} records with indexed prefixes): pass",
        formatted.len(),
        exploded.len()
    );
}

#[test]
fn c05_balancing_and_none_labels() {
    // 10 positives among 100 records balance to exactly 10/10.
    let records: Vec<ExplodedRecord> = (0..100)
        .map(|i| ExplodedRecord {
            input_text: format!("parameter 1: def f{i}(a):"),
            param_index: 1,
            param_name: "a".into(),
            target_description: "A value.".into(),
            none_label: u8::from(i < 10),
            full_description: "A value.".into(),
        })
        .collect();
    let balanced = balance(&records, 42).unwrap();
    assert_eq!(balanced.len(), 20);
    assert_eq!(balanced.iter().filter(|r| r.none_label == 1).count(), 10);
    assert_eq!(balanced.iter().filter(|r| r.none_label == 0).count(), 10);

    #[derive(serde::Deserialize)]
    struct Case {
        text: String,
        label: u8,
    }
    let cases: Vec<Case> =
        serde_json::from_str(&std::fs::read_to_string(fixture("none_labels.json")).unwrap())
            .unwrap();
    assert!(cases.len() >= 30);
    for case in &cases {
        assert_eq!(
            label_none_acceptance(&case.text),
            case.label,
            "label for {:?}",
            case.text
        );
    }
    println!(
        "criterion 5 (10/100 balances to 10+10; {} None-acceptance labels 100% correct): pass",
        cases.len()
    );
}

#[test]
fn c06_text_metric_identities_and_frozen_scores() {
    let tokens: Vec<String> = "the path to the output file"
        .split_whitespace()
        .map(str::to_string)
        .collect();
    let identity = bleu4(&[tokens.clone()], &[tokens.clone()]).unwrap();
    assert!((identity - 1.0).abs() < 1e-12, "bleu4 self-score {identity}");

    let m = tokens.len() as f64;
    let expected_meteor = 1.0 - 0.5 * (1.0 / m).powi(3);
    assert!((meteor(&tokens, &tokens) - expected_meteor).abs() < 1e-9);

    #[derive(serde::Deserialize)]
    struct Pair {
        candidate: String,
        reference: String,
        bleu4: f64,
    }
    #[derive(serde::Deserialize)]
    struct Frozen {
        pairs: Vec<Pair>,
        corpus_bleu4: f64,
    }
    let frozen: Frozen =
        serde_json::from_str(&std::fs::read_to_string(fixture("bleu_pairs.json")).unwrap())
            .unwrap();
    assert!(frozen.pairs.len() >= 10);
    let mut candidates = Vec::new();
    let mut references = Vec::new();
    for pair in &frozen.pairs {
        let candidate = docforge::tokenize(&pair.candidate);
        let reference = docforge::tokenize(&pair.reference);
        let scored = bleu4(&[candidate.clone()], &[reference.clone()]).unwrap();
        assert!(
            (scored - pair.bleu4).abs() < 1e-6,
            "{:?}: {scored} vs frozen {}",
            pair.candidate,
            pair.bleu4
        );
        candidates.push(candidate);
        references.push(reference);
    }
    let corpus = bleu4(&candidates, &references).unwrap();
    assert!((corpus - frozen.corpus_bleu4).abs() < 1e-6);
    println!(
        "criterion 6 (BLEU-4/METEOR identities; {} frozen pair scores within 1e-6): pass",
        frozen.pairs.len()
    );
}

#[test]
fn c07_kappa_reference_cases() {
    assert_eq!(cohens_kappa(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap(), 0.0);
    assert_eq!(cohens_kappa(&[1, 0, 1, 0, 1], &[1, 0, 1, 0, 1]).unwrap(), 1.0);
    println!("criterion 7 (kappa 0 on independent raters, 1 on identical): pass");
}

#[test]
fn c08_hermetic_pipeline_is_reproducible_and_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = PipelineConfig::default();
    config.corpus_root = fixture("corpus");
    config.output_dir = dir.path().join("out");

    let started = Instant::now();
    for outcome in run_hermetic_pipeline(&config).unwrap() {
        assert_eq!(outcome.exit_code, 0, "{:?}", outcome.lines);
    }
    let snapshot = read_dir_bytes(&config.output_dir);
    assert!(snapshot.len() >= 10);

    // Second run into the same directory: every byte identical, manifests
    // included.
    for outcome in run_hermetic_pipeline(&config).unwrap() {
        assert_eq!(outcome.exit_code, 0);
    }
    let elapsed = started.elapsed();
    let rerun = read_dir_bytes(&config.output_dir);
    assert_eq!(snapshot.len(), rerun.len());
    for (name, bytes) in &snapshot {
        assert_eq!(bytes, &rerun[name], "{name} changed between identical runs");
    }

    // And the data artifacts match the checked-in golden outputs.
    let golden_dir = fixture("golden");
    let mut goldens = 0;
    for entry in std::fs::read_dir(&golden_dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let golden = std::fs::read(&path).unwrap();
        assert_eq!(
            snapshot.get(&name),
            Some(&golden),
            "{name} diverges from golden"
        );
        goldens += 1;
    }
    assert!(goldens >= 9);
    assert!(elapsed < Duration::from_secs(10), "two pipeline runs took {elapsed:?}");
    println!(
        "criterion 8 (hermetic chain byte-identical across runs; {goldens} golden artifacts match in {elapsed:?}): pass"
    );
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let path = entry.unwrap().path();
            let name = path.file_name().unwrap().to_str().unwrap().to_string();
            (name, std::fs::read(&path).unwrap())
        })
        .collect()
}

/// Single-threaded canned HTTP server: answers every request with the same
/// status/body after `delay`, tracking peak concurrency and request count.
fn canned_server(
    status: &'static str,
    body: &'static str,
    delay: Duration,
) -> (String, Arc<AtomicUsize>, Arc<AtomicUsize>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let served = Arc::new(AtomicUsize::new(0));
    let peak = Arc::new(AtomicUsize::new(0));
    let active = Arc::new(AtomicUsize::new(0));
    let (served_out, peak_out) = (served.clone(), peak.clone());
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { return };
            let served = served.clone();
            let peak = peak.clone();
            let active = active.clone();
            std::thread::spawn(move || {
                let now = active.fetch_add(1, Ordering::SeqCst) + 1;
                peak.fetch_max(now, Ordering::SeqCst);
                let mut buf = Vec::new();
                let mut chunk = [0u8; 1024];
                let header_end = loop {
                    match stream.read(&mut chunk) {
                        Ok(0) | Err(_) => break None,
                        Ok(n) => buf.extend_from_slice(&chunk[..n]),
                    }
                    if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                        break Some(pos + 4);
                    }
                };
                if let Some(header_end) = header_end {
                    let head = String::from_utf8_lossy(&buf[..header_end]).to_lowercase();
                    let need: usize = head
                        .lines()
                        .find_map(|l| l.strip_prefix("content-length:"))
                        .and_then(|v| v.trim().parse().ok())
                        .unwrap_or(0);
                    while buf.len() < header_end + need {
                        match stream.read(&mut chunk) {
                            Ok(0) | Err(_) => break,
                            Ok(n) => buf.extend_from_slice(&chunk[..n]),
                        }
                    }
                    // Count on receipt: the increment happens-before the
                    // response, so a client that has its answer has already
                    // been counted.
                    served.fetch_add(1, Ordering::SeqCst);
                    std::thread::sleep(delay);
                    let response = format!(
                        "HTTP/1.1 {status}\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                        body.len()
                    );
                    let _ = stream.write_all(response.as_bytes());
                }
                active.fetch_sub(1, Ordering::SeqCst);
            });
        }
    });
    (format!("http://{addr}"), served_out, peak_out)
}

#[test]
fn c09_backend_contracts_cover_the_nonreproducible_path() {
    // Retry budget: a persistently failing server sees exactly
    // max_retries + 1 requests, and the caller gets a structured error.
    let (url, served, _) = canned_server("500 Internal Server Error", "{}", Duration::ZERO);
    let mut config = BackendConfig::new(&url);
    config.max_retries = 2;
    config.timeout_ms = 2_000;
    let backend = HttpBackend::new(config).unwrap();
    match backend.generate("parameter 1: def f(a):") {
        Err(BackendError::Unavailable { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("expected Unavailable, got {other:?}"),
    }
    assert_eq!(served.load(Ordering::SeqCst), 3);

    // Backend failure never aborts a bundle: baselines take over and no
    // directive claims backend provenance.
    let record = extract_functions(&SourceFile {
        path: "m.py".into(),
        text: "def save(frame, path, mode=None):\n    return 1\n".into(),
    })
    .unwrap()
    .remove(0);
    let failing = docforge::FailingBackend::new();
    let backends = BackendSet {
        generation: Some(&failing),
        classification: Some(&failing),
        type_service: Some(&failing),
    };
    for index in 1..=3 {
        let bundle = build_bundle(&record, index, &backends).unwrap();
        assert!(!bundle.description.is_empty());
        for (directive, provenance) in &bundle.provenance {
            assert_ne!(provenance, &Provenance::Backend, "{directive:?} claimed backend");
            assert_ne!(provenance, &Provenance::Service, "{directive:?} claimed service");
        }
    }

    // The in-flight semaphore bounds concurrency at max_inflight even with
    // more callers than permits.
    let (url, served, peak) = canned_server(
        "200 OK",
        r#"{"output": "A value."}"#,
        Duration::from_millis(120),
    );
    let mut config = BackendConfig::new(&url);
    config.max_inflight = 2;
    config.timeout_ms = 5_000;
    let backend = Arc::new(HttpBackend::new(config).unwrap());
    let mut handles = Vec::new();
    for _ in 0..5 {
        let backend = backend.clone();
        handles.push(std::thread::spawn(move || {
            backend.generate("parameter 1: def f(a):").unwrap()
        }));
    }
    for handle in handles {
        assert_eq!(handle.join().unwrap(), "A value.");
    }
    assert_eq!(served.load(Ordering::SeqCst), 5);
    let observed_peak = peak.load(Ordering::SeqCst);
    assert!(
        observed_peak <= 2,
        "in-flight bound violated: peak {observed_peak}"
    );
    println!(
        "criterion 9 (retry budget 3 attempts; fallback provenance non-backend; in-flight peak {observed_peak} ≤ 2): pass"
    );
}
