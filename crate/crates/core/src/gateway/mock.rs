//! Scripted backend for fully offline, deterministic runs. Each exchange
//! asserts the incoming prompt contains an expected substring, then returns
//! the scripted response (optionally after scripted transient failures).

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Backend, CompletionRequest, GatewayError};

/// One scripted prompt/response pair. An empty `expect` matches any prompt.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockExchange {
    pub expect: String,
    pub respond: String,
    /// Transient transport failures to emit before responding.
    #[serde(default)]
    pub fail_times: u32,
}

impl MockExchange {
    pub fn new(expect: impl Into<String>, respond: impl Into<String>) -> MockExchange {
        MockExchange {
            expect: expect.into(),
            respond: respond.into(),
            fail_times: 0,
        }
    }

    pub fn failing(mut self, times: u32) -> MockExchange {
        self.fail_times = times;
        self
    }
}

/// On-disk fixture: either a flat exchange list (one game) or per-game
/// transcripts aligned to tournament game indexes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MockFixture {
    Flat(Vec<MockExchange>),
    PerGame { games: Vec<Vec<MockExchange>> },
}

impl MockFixture {
    pub fn load(path: &Path) -> Result<MockFixture, GatewayError> {
        let text = fs::read_to_string(path)
            .map_err(|e| GatewayError::Transport(format!("reading {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| GatewayError::FixtureMismatch(format!("{}: {e}", path.display())))
    }

    /// Transcript for game `index`.
    pub fn game(&self, index: usize) -> Vec<MockExchange> {
        match self {
            MockFixture::Flat(exchanges) => {
                if index == 0 {
                    exchanges.clone()
                } else {
                    Vec::new()
                }
            }
            MockFixture::PerGame { games } => games.get(index).cloned().unwrap_or_default(),
        }
    }

    pub fn game_count(&self) -> usize {
        match self {
            MockFixture::Flat(_) => 1,
            MockFixture::PerGame { games } => games.len(),
        }
    }
}

pub struct MockBackend {
    script: VecDeque<MockExchange>,
    served: usize,
}

impl MockBackend {
    pub fn from_exchanges(exchanges: Vec<MockExchange>) -> MockBackend {
        MockBackend {
            script: exchanges.into(),
            served: 0,
        }
    }
}

impl Backend for MockBackend {
    fn complete(&mut self, req: &CompletionRequest) -> Result<String, GatewayError> {
        let position = self.served;
        let Some(exchange) = self.script.front_mut() else {
            return Err(GatewayError::FixtureMismatch(format!(
                "transcript exhausted at exchange {position}; unexpected prompt: {}",
                snippet(&req.user_text)
            )));
        };
        if exchange.fail_times > 0 {
            exchange.fail_times -= 1;
            return Err(GatewayError::Transport(
                "scripted transient failure".to_string(),
            ));
        }
        if !exchange.expect.is_empty() && !req.user_text.contains(&exchange.expect) {
            return Err(GatewayError::FixtureMismatch(format!(
                "exchange {position} expected prompt containing {:?}, got: {}",
                exchange.expect,
                snippet(&req.user_text)
            )));
        }
        let response = exchange.respond.clone();
        self.script.pop_front();
        self.served += 1;
        Ok(response)
    }

    fn name(&self) -> &'static str {
        "mock"
    }
}

fn snippet(text: &str) -> String {
    let flat = text.replace('\n', " ");
    if flat.len() > 120 {
        format!("{}...", &flat[..120])
    } else {
        flat
    }
}
