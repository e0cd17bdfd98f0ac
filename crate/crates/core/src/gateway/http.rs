//! Thin provider adapters: one OpenAI-style chat-completions shape and one
//! Gemini-style generateContent shape. Credentials come only from
//! environment variables and never appear in configs or logs.

use std::time::Duration;

use serde_json::{json, Value};

use super::{Backend, CompletionRequest, GatewayError};

pub const OPENAI_KEY_VAR: &str = "OPENAI_API_KEY";
pub const OPENAI_BASE_VAR: &str = "OPENAI_BASE_URL";
pub const OPENAI_DEFAULT_BASE: &str = "https://api.openai.com/v1";

pub const GEMINI_KEY_VAR: &str = "GEMINI_API_KEY";
pub const GEMINI_BASE_VAR: &str = "GEMINI_BASE_URL";
pub const GEMINI_DEFAULT_BASE: &str = "https://generativelanguage.googleapis.com";

fn agent_for(timeout: Duration) -> ureq::Agent {
    ureq::Agent::new_with_config(
        ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build(),
    )
}

fn map_ureq_error(err: ureq::Error) -> GatewayError {
    match err {
        ureq::Error::Timeout(_) => GatewayError::Timeout,
        other => GatewayError::Transport(other.to_string()),
    }
}

fn post_json(
    url: &str,
    headers: &[(&str, String)],
    body: &Value,
    timeout: Duration,
) -> Result<Value, GatewayError> {
    let agent = agent_for(timeout);
    let mut request = agent.post(url);
    for (name, value) in headers {
        request = request.header(*name, value);
    }
    let mut response = request.send_json(body).map_err(map_ureq_error)?;
    let status = response.status().as_u16();
    let text = response
        .body_mut()
        .read_to_string()
        .map_err(map_ureq_error)?;
    if !(200..300).contains(&status) {
        return Err(GatewayError::Provider {
            status,
            message: snippet(&text),
        });
    }
    serde_json::from_str(&text)
        .map_err(|e| GatewayError::Transport(format!("invalid provider JSON: {e}")))
}

fn snippet(text: &str) -> String {
    let flat = text.replace('\n', " ");
    if flat.len() > 300 {
        format!("{}...", &flat[..300])
    } else {
        flat
    }
}

fn env_or(var: &str, default: &str) -> String {
    std::env::var(var)
        .ok()
        .filter(|v| !v.is_empty())
        .unwrap_or_else(|| default.to_string())
}

fn require_env(var: &str) -> Result<String, GatewayError> {
    std::env::var(var)
        .ok()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| GatewayError::MissingCredentials(var.to_string()))
}

/// `POST {base}/chat/completions` with a bearer token.
pub struct OpenAiBackend {
    base_url: String,
    api_key: String,
}

impl OpenAiBackend {
    pub fn from_env() -> Result<OpenAiBackend, GatewayError> {
        Ok(OpenAiBackend {
            base_url: env_or(OPENAI_BASE_VAR, OPENAI_DEFAULT_BASE),
            api_key: require_env(OPENAI_KEY_VAR)?,
        })
    }

    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> OpenAiBackend {
        OpenAiBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.into(),
        }
    }
}

impl Backend for OpenAiBackend {
    fn complete(&mut self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let mut messages = Vec::new();
        if !req.system_text.is_empty() {
            messages.push(json!({"role": "system", "content": req.system_text}));
        }
        messages.push(json!({"role": "user", "content": req.user_text}));
        let body = json!({
            "model": req.model_id,
            "messages": messages,
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        });
        let headers = [("Authorization", format!("Bearer {}", self.api_key))];
        let value = post_json(&url, &headers, &body, req.timeout)?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| GatewayError::Transport("no message content in response".to_string()))
    }

    fn name(&self) -> &'static str {
        "openai"
    }
}

/// `POST {base}/v1beta/models/{model}:generateContent` with a key parameter.
pub struct GeminiBackend {
    base_url: String,
    api_key: String,
}

impl GeminiBackend {
    pub fn from_env() -> Result<GeminiBackend, GatewayError> {
        Ok(GeminiBackend {
            base_url: env_or(GEMINI_BASE_VAR, GEMINI_DEFAULT_BASE),
            api_key: require_env(GEMINI_KEY_VAR)?,
        })
    }

    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> GeminiBackend {
        GeminiBackend {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: api_key.into(),
        }
    }
}

impl Backend for GeminiBackend {
    fn complete(&mut self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let url = format!(
            "{}/v1beta/models/{}:generateContent",
            self.base_url.trim_end_matches('/'),
            req.model_id,
        );
        let mut contents = Vec::new();
        if !req.system_text.is_empty() {
            contents.push(json!({"role": "user", "parts": [{"text": req.system_text}]}));
        }
        contents.push(json!({"role": "user", "parts": [{"text": req.user_text}]}));
        let body = json!({
            "contents": contents,
            "generationConfig": {
                "temperature": req.temperature,
                "maxOutputTokens": req.max_tokens,
            },
        });
        let headers = [("x-goog-api-key", self.api_key.clone())];
        let value = post_json(&url, &headers, &body, req.timeout)?;
        let parts = value["candidates"][0]["content"]["parts"]
            .as_array()
            .ok_or_else(|| GatewayError::Transport("no candidate parts in response".to_string()))?;
        let text: String = parts
            .iter()
            .filter_map(|p| p["text"].as_str())
            .collect::<Vec<_>>()
            .join("");
        if text.is_empty() {
            return Err(GatewayError::Transport("empty candidate text".to_string()));
        }
        Ok(text)
    }

    fn name(&self) -> &'static str {
        "gemini"
    }
}

/// Picks an adapter by model id: anything containing "gemini" uses the
/// Gemini shape, everything else the OpenAI shape.
pub fn backend_for_model(model_id: &str) -> Result<Box<dyn Backend>, GatewayError> {
    if model_id.to_ascii_lowercase().contains("gemini") {
        Ok(Box::new(GeminiBackend::from_env()?))
    } else {
        Ok(Box::new(OpenAiBackend::from_env()?))
    }
}

/// Routes each request to the right provider adapter based on its model id,
/// so one gateway can serve a mixed roster.
pub struct MultiProviderBackend;

impl Backend for MultiProviderBackend {
    fn complete(&mut self, req: &CompletionRequest) -> Result<String, GatewayError> {
        backend_for_model(&req.model_id)?.complete(req)
    }

    fn name(&self) -> &'static str {
        "multi_provider"
    }
}
