//! Game configuration: seats, agents, seed, and limits.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::DECK_SIZE;

/// Seat index, 0-based. Seat order is the clockwise turn order.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct PlayerId(pub usize);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0 + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Random,
    Oracle,
    Llm,
}

/// One seat's agent. `model_id` and `temperature` only matter for LLM seats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    #[serde(default = "default_temperature")]
    pub temperature: f32,
    pub display_name: String,
}

fn default_temperature() -> f32 {
    0.7
}

impl AgentSpec {
    pub fn random(display_name: impl Into<String>) -> AgentSpec {
        AgentSpec {
            kind: AgentKind::Random,
            model_id: None,
            temperature: default_temperature(),
            display_name: display_name.into(),
        }
    }

    pub fn oracle(display_name: impl Into<String>) -> AgentSpec {
        AgentSpec {
            kind: AgentKind::Oracle,
            model_id: None,
            temperature: default_temperature(),
            display_name: display_name.into(),
        }
    }

    pub fn llm(model_id: impl Into<String>, display_name: impl Into<String>) -> AgentSpec {
        AgentSpec {
            kind: AgentKind::Llm,
            model_id: Some(model_id.into()),
            temperature: default_temperature(),
            display_name: display_name.into(),
        }
    }

    /// Aggregation label for reports: the model id for LLM seats, the agent
    /// kind otherwise. Two seats running the same model share a label.
    pub fn label(&self) -> String {
        match self.kind {
            AgentKind::Llm => self.model_id.clone().unwrap_or_else(|| "llm".to_string()),
            AgentKind::Random => "random".to_string(),
            AgentKind::Oracle => "oracle".to_string(),
        }
    }
}

pub const DEFAULT_ROUND_LIMIT: u32 = 30;

/// Full configuration of a single game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub seed: u64,
    pub num_players: usize,
    #[serde(default = "default_round_limit")]
    pub round_limit: u32,
    pub agent_specs: Vec<AgentSpec>,
    #[serde(default)]
    pub starting_seat: usize,
}

fn default_round_limit() -> u32 {
    DEFAULT_ROUND_LIMIT
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("num_players must be between 2 and {max} (got {0})", max = DECK_SIZE - 3)]
    PlayerCount(usize),
    #[error("agent_specs has {specs} entries but num_players is {players}")]
    AgentCount { specs: usize, players: usize },
    #[error("starting_seat {seat} is out of range for {players} players")]
    StartingSeat { seat: usize, players: usize },
    #[error("round_limit must be at least 1")]
    RoundLimit,
    #[error("agent `{0}` has kind llm but no model_id")]
    MissingModel(String),
    #[error("agent `{0}` has temperature outside [0, 1]")]
    Temperature(String),
    #[error("a roster with llm agents requires an explicit seed")]
    SeedRequired,
}

impl GameConfig {
    pub fn new(seed: u64, agent_specs: Vec<AgentSpec>) -> GameConfig {
        GameConfig {
            seed,
            num_players: agent_specs.len(),
            round_limit: DEFAULT_ROUND_LIMIT,
            agent_specs,
            starting_seat: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        // 18 dealable cards; every player must receive at least one.
        if self.num_players < 2 || self.num_players > DECK_SIZE - 3 {
            return Err(ConfigError::PlayerCount(self.num_players));
        }
        if self.agent_specs.len() != self.num_players {
            return Err(ConfigError::AgentCount {
                specs: self.agent_specs.len(),
                players: self.num_players,
            });
        }
        if self.starting_seat >= self.num_players {
            return Err(ConfigError::StartingSeat {
                seat: self.starting_seat,
                players: self.num_players,
            });
        }
        if self.round_limit < 1 {
            return Err(ConfigError::RoundLimit);
        }
        for spec in &self.agent_specs {
            if spec.kind == AgentKind::Llm
                && spec.model_id.as_deref().unwrap_or("").trim().is_empty()
            {
                return Err(ConfigError::MissingModel(spec.display_name.clone()));
            }
            if !(0.0..=1.0).contains(&spec.temperature) {
                return Err(ConfigError::Temperature(spec.display_name.clone()));
            }
        }
        Ok(())
    }

    pub fn display_names(&self) -> Vec<String> {
        self.agent_specs
            .iter()
            .map(|s| s.display_name.clone())
            .collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.agent_specs.iter().map(AgentSpec::label).collect()
    }
}
