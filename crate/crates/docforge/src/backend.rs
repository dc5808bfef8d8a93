//! Backend contracts for description generation, None-acceptance
//! classification, and type prediction, plus offline stubs.
//!
//! Three traits mirror the three wire endpoints (`/generate`, `/classify`,
//! `/predict`). [`HttpBackend`] speaks JSON-over-HTTP to all three with
//! retries, exponential backoff with jitter, and a bound on in-flight
//! requests. The stub backends ([`EchoBackend`], [`ConstantBackend`],
//! [`ScriptedBackend`], [`FailingBackend`]) run the whole pipeline
//! hermetically and are the defaults; network backends require explicit
//! configuration.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Connection settings for [`HttpBackend`]. In a config file only
/// `base_url` is required; the knobs keep their defaults when omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub base_url: String,
    /// Per-request timeout in milliseconds. Must be > 0.
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Extra attempts after the first failure; total attempts ≤ max_retries + 1.
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    /// Upper bound on concurrently outstanding requests. Must be ≥ 1.
    #[serde(default = "default_max_inflight")]
    pub max_inflight: u32,
    #[serde(default)]
    pub auth_token: Option<String>,
}

fn default_timeout_ms() -> u64 {
    5_000
}

fn default_max_retries() -> u32 {
    2
}

fn default_max_inflight() -> u32 {
    4
}

impl BackendConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        BackendConfig {
            base_url: base_url.into(),
            timeout_ms: default_timeout_ms(),
            max_retries: default_max_retries(),
            max_inflight: default_max_inflight(),
            auth_token: None,
        }
    }

    /// Overlay `DOCFORGE_BACKEND_URL` / `DOCFORGE_BACKEND_TOKEN` when set.
    pub fn apply_env_overrides(&mut self) {
        if let Ok(url) = std::env::var("DOCFORGE_BACKEND_URL") {
            if !url.is_empty() {
                self.base_url = url;
            }
        }
        if let Ok(token) = std::env::var("DOCFORGE_BACKEND_TOKEN") {
            if !token.is_empty() {
                self.auth_token = Some(token);
            }
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.timeout_ms == 0 {
            return Err(BackendError::Config("timeout_ms must be > 0".into()));
        }
        if self.max_inflight == 0 {
            return Err(BackendError::Config("max_inflight must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("input text must be non-empty")]
    EmptyInput,
    #[error("invalid backend config: {0}")]
    Config(String),
    #[error("backend unavailable after {attempts} attempt(s): {message}")]
    Unavailable { attempts: u32, message: String },
    #[error("protocol error: {0}")]
    Protocol(String),
}

/// A `/classify` verdict: binary label plus the server's confidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: u8,
    pub score: f64,
}

/// One `/predict` candidate for an identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCandidate {
    pub type_text: String,
    pub confidence: f64,
}

pub trait GenerationBackend: Send + Sync {
    /// POST {"task":"describe","input":…} → {"output":…}; output verbatim.
    fn generate(&self, input_text: &str) -> Result<String, BackendError>;
}

pub trait ClassificationBackend: Send + Sync {
    /// POST {"task":"classify_none","input":…} → {"label":0|1,"score":[0,1]}.
    fn classify(&self, input_text: &str) -> Result<Classification, BackendError>;
}

pub trait TypeServiceClient: Send + Sync {
    /// POST {"source":…} → map identifier → candidates, confidence descending.
    fn predict_types(
        &self,
        source_text: &str,
    ) -> Result<BTreeMap<String, Vec<TypeCandidate>>, BackendError>;
}

// ---------------------------------------------------------------------------
// Stub backends
// ---------------------------------------------------------------------------

/// Generation stub that returns its input verbatim.
#[derive(Debug, Default)]
pub struct EchoBackend {
    calls: AtomicU32,
}

impl EchoBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl GenerationBackend for EchoBackend {
    fn generate(&self, input_text: &str) -> Result<String, BackendError> {
        if input_text.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(input_text.to_string())
    }
}

/// Stub that answers every request with the same canned values.
#[derive(Debug)]
pub struct ConstantBackend {
    pub output: String,
    pub label: u8,
    pub score: f64,
    pub types: BTreeMap<String, Vec<TypeCandidate>>,
    calls: AtomicU32,
}

impl ConstantBackend {
    pub fn new(output: impl Into<String>, label: u8, score: f64) -> Self {
        ConstantBackend {
            output: output.into(),
            label,
            score,
            types: BTreeMap::new(),
            calls: AtomicU32::new(0),
        }
    }

    pub fn with_types(mut self, types: BTreeMap<String, Vec<TypeCandidate>>) -> Self {
        self.types = types;
        self
    }

    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }

    fn touch(&self, input: &str) -> Result<(), BackendError> {
        if input.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }
}

impl GenerationBackend for ConstantBackend {
    fn generate(&self, input_text: &str) -> Result<String, BackendError> {
        self.touch(input_text)?;
        Ok(self.output.clone())
    }
}

impl ClassificationBackend for ConstantBackend {
    fn classify(&self, input_text: &str) -> Result<Classification, BackendError> {
        self.touch(input_text)?;
        Ok(Classification {
            label: self.label,
            score: self.score,
        })
    }
}

impl TypeServiceClient for ConstantBackend {
    fn predict_types(
        &self,
        source_text: &str,
    ) -> Result<BTreeMap<String, Vec<TypeCandidate>>, BackendError> {
        self.touch(source_text)?;
        Ok(self.types.clone())
    }
}

/// Fixture-driven stub: exact input → canned output; unmatched inputs fail.
#[derive(Debug, Default)]
pub struct ScriptedBackend {
    outputs: BTreeMap<String, String>,
    labels: BTreeMap<String, Classification>,
    types: BTreeMap<String, BTreeMap<String, Vec<TypeCandidate>>>,
    calls: Mutex<Vec<String>>,
}

impl ScriptedBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn script_output(mut self, input: impl Into<String>, output: impl Into<String>) -> Self {
        self.outputs.insert(input.into(), output.into());
        self
    }

    pub fn script_label(mut self, input: impl Into<String>, label: u8, score: f64) -> Self {
        self.labels
            .insert(input.into(), Classification { label, score });
        self
    }

    pub fn script_types(
        mut self,
        source: impl Into<String>,
        types: BTreeMap<String, Vec<TypeCandidate>>,
    ) -> Self {
        self.types.insert(source.into(), types);
        self
    }

    /// Every input this stub has been asked about, in call order.
    pub fn call_log(&self) -> Vec<String> {
        self.calls.lock().unwrap().clone()
    }

    fn log(&self, input: &str) -> Result<(), BackendError> {
        if input.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.calls.lock().unwrap().push(input.to_string());
        Ok(())
    }

    fn miss(input: &str) -> BackendError {
        BackendError::Unavailable {
            attempts: 1,
            message: format!("no scripted response for input starting {:?}", head(input)),
        }
    }
}

fn head(s: &str) -> &str {
    let end = s
        .char_indices()
        .nth(32)
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    &s[..end]
}

impl GenerationBackend for ScriptedBackend {
    fn generate(&self, input_text: &str) -> Result<String, BackendError> {
        self.log(input_text)?;
        self.outputs
            .get(input_text)
            .cloned()
            .ok_or_else(|| Self::miss(input_text))
    }
}

impl ClassificationBackend for ScriptedBackend {
    fn classify(&self, input_text: &str) -> Result<Classification, BackendError> {
        self.log(input_text)?;
        self.labels
            .get(input_text)
            .copied()
            .ok_or_else(|| Self::miss(input_text))
    }
}

impl TypeServiceClient for ScriptedBackend {
    fn predict_types(
        &self,
        source_text: &str,
    ) -> Result<BTreeMap<String, Vec<TypeCandidate>>, BackendError> {
        self.log(source_text)?;
        self.types
            .get(source_text)
            .cloned()
            .ok_or_else(|| Self::miss(source_text))
    }
}

/// Stub that fails every request; exercises fallback paths.
#[derive(Debug, Default)]
pub struct FailingBackend {
    calls: AtomicU32,
}

impl FailingBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn calls(&self) -> u32 {
        self.calls.load(Ordering::SeqCst)
    }

    fn fail(&self, input: &str) -> BackendError {
        if input.is_empty() {
            return BackendError::EmptyInput;
        }
        self.calls.fetch_add(1, Ordering::SeqCst);
        BackendError::Unavailable {
            attempts: 1,
            message: "stub configured to fail".into(),
        }
    }
}

impl GenerationBackend for FailingBackend {
    fn generate(&self, input_text: &str) -> Result<String, BackendError> {
        Err(self.fail(input_text))
    }
}

impl ClassificationBackend for FailingBackend {
    fn classify(&self, input_text: &str) -> Result<Classification, BackendError> {
        Err(self.fail(input_text))
    }
}

impl TypeServiceClient for FailingBackend {
    fn predict_types(
        &self,
        source_text: &str,
    ) -> Result<BTreeMap<String, Vec<TypeCandidate>>, BackendError> {
        Err(self.fail(source_text))
    }
}

// ---------------------------------------------------------------------------
// HTTP client
// ---------------------------------------------------------------------------

/// Counting semaphore bounding concurrently outstanding requests.
struct Inflight {
    state: Mutex<u32>,
    cv: Condvar,
    limit: u32,
}

impl Inflight {
    fn new(limit: u32) -> Self {
        Inflight {
            state: Mutex::new(0),
            cv: Condvar::new(),
            limit,
        }
    }

    fn acquire(&self) -> InflightGuard<'_> {
        let mut n = self.state.lock().unwrap();
        while *n >= self.limit {
            n = self.cv.wait(n).unwrap();
        }
        *n += 1;
        InflightGuard { sem: self }
    }
}

struct InflightGuard<'a> {
    sem: &'a Inflight,
}

impl Drop for InflightGuard<'_> {
    fn drop(&mut self) {
        let mut n = self.sem.state.lock().unwrap();
        *n -= 1;
        self.sem.cv.notify_one();
    }
}

/// JSON-over-HTTP client for the three endpoints.
pub struct HttpBackend {
    config: BackendConfig,
    agent: ureq::Agent,
    inflight: Inflight,
}

impl HttpBackend {
    pub fn new(config: BackendConfig) -> Result<Self, BackendError> {
        config.validate()?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(config.timeout_ms))
            .build();
        let inflight = Inflight::new(config.max_inflight);
        Ok(HttpBackend {
            config,
            agent,
            inflight,
        })
    }

    pub fn config(&self) -> &BackendConfig {
        &self.config
    }

    fn endpoint(&self, path: &str) -> String {
        format!("{}{}", self.config.base_url.trim_end_matches('/'), path)
    }

    /// One POST with the shared retry loop. `parse` validates the body and is
    /// free to reject it; a rejected body counts as a failed attempt.
    fn post<T>(
        &self,
        path: &str,
        body: serde_json::Value,
        parse: impl Fn(serde_json::Value) -> Result<T, String>,
    ) -> Result<T, BackendError> {
        let _guard = self.inflight.acquire();
        let url = self.endpoint(path);
        let attempts = self.config.max_retries + 1;
        let mut last_error = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                backoff_sleep(attempt, self.config.timeout_ms);
            }
            let mut request = self.agent.post(&url);
            if let Some(token) = &self.config.auth_token {
                request = request.set("Authorization", &format!("Bearer {token}"));
            }
            match request.send_json(body.clone()) {
                Ok(response) => match response.into_json::<serde_json::Value>() {
                    Ok(value) => match parse(value) {
                        Ok(parsed) => return Ok(parsed),
                        Err(msg) => last_error = format!("protocol: {msg}"),
                    },
                    Err(err) => last_error = format!("protocol: body is not JSON: {err}"),
                },
                Err(ureq::Error::Status(code, _)) => {
                    last_error = format!("HTTP status {code}");
                }
                Err(err) => last_error = format!("transport: {err}"),
            }
        }
        Err(BackendError::Unavailable {
            attempts,
            message: last_error,
        })
    }
}

/// Exponential backoff with full jitter, capped so the total sleep across a
/// request's retries stays within the timeout budget.
fn backoff_sleep(attempt: u32, timeout_ms: u64) {
    use rand::Rng;
    let ceiling = 50u64
        .saturating_mul(1 << attempt.min(10))
        .min(timeout_ms.max(1));
    let ms = rand::thread_rng().gen_range(0..=ceiling);
    std::thread::sleep(Duration::from_millis(ms));
}

impl GenerationBackend for HttpBackend {
    fn generate(&self, input_text: &str) -> Result<String, BackendError> {
        if input_text.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.post(
            "/generate",
            serde_json::json!({ "task": "describe", "input": input_text }),
            |value| match value.get("output").and_then(|v| v.as_str()) {
                Some(output) => Ok(output.to_string()),
                None => Err("missing string field \"output\"".into()),
            },
        )
    }
}

impl ClassificationBackend for HttpBackend {
    fn classify(&self, input_text: &str) -> Result<Classification, BackendError> {
        if input_text.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.post(
            "/classify",
            serde_json::json!({ "task": "classify_none", "input": input_text }),
            |value| {
                let label = value
                    .get("label")
                    .and_then(|v| v.as_u64())
                    .ok_or("missing integer field \"label\"")?;
                if label > 1 {
                    return Err(format!("label {label} is not 0 or 1"));
                }
                let score = value
                    .get("score")
                    .and_then(|v| v.as_f64())
                    .ok_or("missing number field \"score\"")?;
                if !(0.0..=1.0).contains(&score) {
                    return Err(format!("score {score} outside [0, 1]"));
                }
                Ok(Classification {
                    label: label as u8,
                    score,
                })
            },
        )
    }
}

impl TypeServiceClient for HttpBackend {
    fn predict_types(
        &self,
        source_text: &str,
    ) -> Result<BTreeMap<String, Vec<TypeCandidate>>, BackendError> {
        if source_text.is_empty() {
            return Err(BackendError::EmptyInput);
        }
        self.post(
            "/predict",
            serde_json::json!({ "source": source_text }),
            |value| {
                let object = value.as_object().ok_or("response is not a JSON object")?;
                let mut map = BTreeMap::new();
                for (name, raw) in object {
                    let rows = raw
                        .as_array()
                        .ok_or_else(|| format!("entry {name:?} is not an array"))?;
                    let mut candidates = Vec::with_capacity(rows.len());
                    for row in rows {
                        let type_text = row
                            .get("type_text")
                            .and_then(|v| v.as_str())
                            .ok_or_else(|| format!("entry {name:?} lacks \"type_text\""))?;
                        let confidence = row
                            .get("confidence")
                            .and_then(|v| v.as_f64())
                            .ok_or_else(|| format!("entry {name:?} lacks \"confidence\""))?;
                        if !confidence.is_finite() || !(0.0..=1.0).contains(&confidence) {
                            return Err(format!(
                                "entry {name:?} confidence {confidence} outside [0, 1]"
                            ));
                        }
                        candidates.push(TypeCandidate {
                            type_text: type_text.to_string(),
                            confidence,
                        });
                    }
                    // Enforce the descending-confidence contract regardless of
                    // server ordering; stable, so server order breaks ties.
                    candidates
                        .sort_by(|a, b| b.confidence.partial_cmp(&a.confidence).unwrap());
                    map.insert(name.clone(), candidates);
                }
                Ok(map)
            },
        )
    }
}
