//! Point the pipeline at a JSON-over-HTTP model server. This example
//! starts a tiny in-process server speaking the three endpoints
//! (`/generate`, `/classify`, `/predict`) so it runs with no setup; set
//! `DOCFORGE_BACKEND_URL` to use a real one instead.
//!
//!     cargo run --example http_backend

use std::io::{Read, Write};
use std::net::TcpListener;

use docforge::{
    BackendConfig, ClassificationBackend, GenerationBackend, HttpBackend, TypeServiceClient,
};

/// Serve `n` requests, answering each endpoint with a canned JSON body.
fn spawn_stub_server(n: usize) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let addr = listener.local_addr().expect("addr");
    std::thread::spawn(move || {
        for _ in 0..n {
            let (mut stream, _) = match listener.accept() {
                Ok(pair) => pair,
                Err(_) => return,
            };
            let mut buf = Vec::new();
            let mut chunk = [0u8; 1024];
            // Read headers, then exactly Content-Length body bytes.
            let body_start = loop {
                let read = stream.read(&mut chunk).unwrap_or(0);
                if read == 0 {
                    break None;
                }
                buf.extend_from_slice(&chunk[..read]);
                if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                    break Some(pos + 4);
                }
            };
            let Some(body_start) = body_start else { continue };
            let head = String::from_utf8_lossy(&buf[..body_start]).to_string();
            let content_length: usize = head
                .lines()
                .find_map(|l| l.to_lowercase().strip_prefix("content-length:").map(str::trim).map(str::to_string))
                .and_then(|v| v.parse().ok())
                .unwrap_or(0);
            while buf.len() < body_start + content_length {
                let read = stream.read(&mut chunk).unwrap_or(0);
                if read == 0 {
                    break;
                }
                buf.extend_from_slice(&chunk[..read]);
            }

            let body = if head.starts_with("POST /generate") {
                r#"{"output": "Path of the report file to write."}"#
            } else if head.starts_with("POST /classify") {
                r#"{"label": 1, "score": 0.91}"#
            } else {
                r#"{"path": [{"type_text": "str", "confidence": 0.88}, {"type_text": "os.PathLike", "confidence": 0.64}]}"#
            };
            let response = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\n\r\n{}",
                body.len(),
                body
            );
            let _ = stream.write_all(response.as_bytes());
        }
    });
    format!("http://{addr}")
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let url = std::env::var("DOCFORGE_BACKEND_URL").unwrap_or_else(|_| spawn_stub_server(3));
    println!("backend: {url}");

    // Environment variables override whatever the config file said; the
    // same mechanism picks up DOCFORGE_BACKEND_TOKEN for bearer auth.
    let mut config = BackendConfig::new(&url);
    config.timeout_ms = 3000;
    config.max_retries = 2;
    config.max_inflight = 4;
    config.apply_env_overrides();
    let backend = HttpBackend::new(config)?;

    let description = backend.generate("parameter 2: def export_report(frame, path): ...")?;
    println!("/generate -> {description:?}");

    let verdict = backend.classify("parameter 2: def export_report(frame, path): ...")?;
    println!("/classify -> label {} (score {})", verdict.label, verdict.score);

    let types = backend.predict_types("def export_report(frame, path): ...")?;
    for (name, candidates) in &types {
        let ranked: Vec<String> = candidates
            .iter()
            .map(|c| format!("{} ({:.2})", c.type_text, c.confidence))
            .collect();
        println!("/predict  -> {name}: {}", ranked.join(", "));
    }
    Ok(())
}
