//! Uniform client for chat-completion services plus a deterministic mock
//! backend. All network activity in the workspace lives behind this module.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod http;
pub mod mock;

pub use http::{GeminiBackend, OpenAiBackend};
pub use mock::{MockBackend, MockExchange, MockFixture};

/// Gateway retry attempts per request (distinct from the agent's reprompt
/// budget) and the backoff schedule between them.
pub const GATEWAY_ATTEMPT_CAP: u32 = 3;
pub const BACKOFF_SCHEDULE: [Duration; 2] = [Duration::from_secs(1), Duration::from_secs(2)];
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);
pub const DEFAULT_MAX_TOKENS: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model_id: String,
    pub system_text: String,
    pub user_text: String,
    pub temperature: f32,
    pub max_tokens: u32,
    #[serde(with = "duration_ms")]
    pub timeout: Duration,
}

mod duration_ms {
    use super::Duration;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        (d.as_millis() as u64).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

impl CompletionRequest {
    pub fn new(
        model_id: impl Into<String>,
        user_text: impl Into<String>,
        temperature: f32,
    ) -> Self {
        CompletionRequest {
            model_id: model_id.into(),
            system_text: String::new(),
            user_text: user_text.into(),
            temperature,
            max_tokens: DEFAULT_MAX_TOKENS,
            timeout: DEFAULT_TIMEOUT,
        }
    }

    fn digest(&self) -> String {
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        let mut eat = |bytes: &[u8]| {
            for b in bytes {
                hash ^= u64::from(*b);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.model_id.as_bytes());
        eat(&[0]);
        eat(self.system_text.as_bytes());
        eat(&[0]);
        eat(self.user_text.as_bytes());
        eat(&self.temperature.to_le_bytes());
        eat(&self.max_tokens.to_le_bytes());
        format!("{hash:016x}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GatewayError {
    #[error("request timed out")]
    Timeout,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned status {status}: {message}")]
    Provider { status: u16, message: String },
    #[error("mock fixture mismatch: {0}")]
    FixtureMismatch(String),
    #[error("no gateway configured for llm agents")]
    NotConfigured,
    #[error("missing environment variable {0}")]
    MissingCredentials(String),
}

impl GatewayError {
    /// Transient failures worth retrying with backoff. Fixture mismatches
    /// and client-side provider errors are not.
    pub fn retryable(&self) -> bool {
        match self {
            GatewayError::Timeout | GatewayError::Transport(_) => true,
            GatewayError::Provider { status, .. } => *status == 429 || *status >= 500,
            _ => false,
        }
    }
}

/// One attempt's audit record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatewayRecord {
    pub request_digest: String,
    pub model_id: String,
    pub attempt: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_class: Option<String>,
    pub latency_ms: u64,
}

fn error_class(err: &GatewayError) -> &'static str {
    match err {
        GatewayError::Timeout => "timeout",
        GatewayError::Transport(_) => "transport",
        GatewayError::Provider { .. } => "provider",
        GatewayError::FixtureMismatch(_) => "fixture_mismatch",
        GatewayError::NotConfigured => "not_configured",
        GatewayError::MissingCredentials(_) => "missing_credentials",
    }
}

/// A completion provider. Implementations must not panic on malformed
/// provider responses; map them to `GatewayError`.
pub trait Backend: Send {
    fn complete(&mut self, req: &CompletionRequest) -> Result<String, GatewayError>;
    fn name(&self) -> &'static str;
}

/// Shared gateway: owns the backend, retries transient failures with
/// backoff, and appends one `GatewayRecord` per attempt.
pub struct Gateway {
    backend: Mutex<Box<dyn Backend>>,
    records: Mutex<Vec<GatewayRecord>>,
    sleep: Option<fn(Duration)>,
}

impl Gateway {
    pub fn new(backend: Box<dyn Backend>) -> Gateway {
        Gateway {
            backend: Mutex::new(backend),
            records: Mutex::new(Vec::new()),
            sleep: Some(std::thread::sleep),
        }
    }

    /// Gateway that skips backoff sleeps; used with mock backends so scripted
    /// failures replay instantly.
    pub fn without_backoff(backend: Box<dyn Backend>) -> Gateway {
        Gateway {
            backend: Mutex::new(backend),
            records: Mutex::new(Vec::new()),
            sleep: None,
        }
    }

    pub fn complete(&self, req: &CompletionRequest) -> Result<String, GatewayError> {
        if !(0.0..=2.0).contains(&req.temperature) {
            return Err(GatewayError::Transport(format!(
                "invalid request: temperature {} outside [0, 2]",
                req.temperature
            )));
        }
        if req.timeout.is_zero() {
            return Err(GatewayError::Transport(
                "invalid request: zero timeout".to_string(),
            ));
        }
        let digest = req.digest();
        let mut last_err = GatewayError::Transport("no attempt made".to_string());
        for attempt in 0..GATEWAY_ATTEMPT_CAP {
            let start = Instant::now();
            let result = self
                .backend
                .lock()
                .expect("gateway backend poisoned")
                .complete(req);
            let latency_ms = start.elapsed().as_millis() as u64;
            let mut records = self.records.lock().expect("gateway records poisoned");
            match &result {
                Ok(text) => records.push(GatewayRecord {
                    request_digest: digest.clone(),
                    model_id: req.model_id.clone(),
                    attempt,
                    response_text: Some(text.clone()),
                    error_class: None,
                    latency_ms,
                }),
                Err(err) => records.push(GatewayRecord {
                    request_digest: digest.clone(),
                    model_id: req.model_id.clone(),
                    attempt,
                    response_text: None,
                    error_class: Some(error_class(err).to_string()),
                    latency_ms,
                }),
            }
            drop(records);
            match result {
                Ok(text) => return Ok(text),
                Err(err) => {
                    let retry = err.retryable() && attempt + 1 < GATEWAY_ATTEMPT_CAP;
                    last_err = err;
                    if !retry {
                        return Err(last_err);
                    }
                    if let Some(sleep) = self.sleep {
                        let step = (attempt as usize).min(BACKOFF_SCHEDULE.len() - 1);
                        sleep(BACKOFF_SCHEDULE[step]);
                    }
                }
            }
        }
        Err(last_err)
    }

    /// Takes all records accumulated so far.
    pub fn drain_records(&self) -> Vec<GatewayRecord> {
        std::mem::take(&mut self.records.lock().expect("gateway records poisoned"))
    }
}

#[cfg(test)]
mod tests {
    use super::mock::MockBackend;
    use super::*;

    #[test]
    fn scripted_response_returns_without_retries() {
        let backend = MockBackend::from_exchanges(vec![MockExchange::new("hello", "X")]);
        let gateway = Gateway::without_backoff(Box::new(backend));
        let req = CompletionRequest::new("mock-model", "hello world", 0.7);
        assert_eq!(gateway.complete(&req).unwrap(), "X");
        let records = gateway.drain_records();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].attempt, 0);
        assert_eq!(records[0].response_text.as_deref(), Some("X"));
    }

    #[test]
    fn fail_twice_then_succeed_records_retry_count() {
        let backend = MockBackend::from_exchanges(vec![MockExchange::new("p", "ok").failing(2)]);
        let gateway = Gateway::without_backoff(Box::new(backend));
        let req = CompletionRequest::new("mock-model", "p", 0.7);
        assert_eq!(gateway.complete(&req).unwrap(), "ok");
        let records = gateway.drain_records();
        assert_eq!(records.len(), 3);
        assert_eq!(records[2].attempt, 2);
        assert!(records[0].error_class.is_some());
        assert!(records[2].response_text.is_some());
    }

    #[test]
    fn always_failing_backend_exhausts_attempt_cap() {
        struct AlwaysTimeout;
        impl Backend for AlwaysTimeout {
            fn complete(&mut self, _req: &CompletionRequest) -> Result<String, GatewayError> {
                Err(GatewayError::Timeout)
            }
            fn name(&self) -> &'static str {
                "always_timeout"
            }
        }
        let gateway = Gateway::without_backoff(Box::new(AlwaysTimeout));
        let req = CompletionRequest::new("m", "p", 0.7);
        assert_eq!(gateway.complete(&req), Err(GatewayError::Timeout));
        assert_eq!(gateway.drain_records().len(), GATEWAY_ATTEMPT_CAP as usize);
    }

    #[test]
    fn fixture_mismatch_is_fatal_not_retried() {
        let backend = MockBackend::from_exchanges(vec![MockExchange::new("expected", "X")]);
        let gateway = Gateway::without_backoff(Box::new(backend));
        let req = CompletionRequest::new("m", "something else entirely", 0.7);
        assert!(matches!(
            gateway.complete(&req),
            Err(GatewayError::FixtureMismatch(_))
        ));
        assert_eq!(gateway.drain_records().len(), 1);
    }
}
