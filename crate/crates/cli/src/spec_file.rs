//! The declarative tournament spec file (TOML): top-level key/values plus an
//! ordered agent list.
//!
//! ```toml
//! tournament_id = "baseline"  # optional; defaults to "tournament"
//! games = 6
//! seed = 1                    # required when any agent kind is "llm"
//! rotation = true             # optional; default true
//! round_limit = 30            # optional; default 30
//! starting_seat = 0           # optional; default 0
//!
//! [[agents]]
//! kind = "random"             # random | oracle | llm
//! display_name = "RANDOM_1"   # optional; generated when omitted
//!
//! [[agents]]
//! kind = "llm"
//! model_id = "gpt-4o-mini"
//! temperature = 0.7           # optional; default 0.7
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use cluesim_core::{AgentKind, AgentSpec, ConfigError, GameConfig, TournamentSpec};

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid spec file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid spec: {0}")]
    Config(#[from] ConfigError),
    #[error("agent {index}: unknown kind `{kind}` (expected random, oracle, or llm)")]
    UnknownKind { index: usize, kind: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    tournament_id: Option<String>,
    games: u32,
    seed: Option<u64>,
    #[serde(default = "default_rotation")]
    rotation: bool,
    round_limit: Option<u32>,
    #[serde(default)]
    starting_seat: usize,
    agents: Vec<AgentEntry>,
}

fn default_rotation() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentEntry {
    kind: String,
    display_name: Option<String>,
    model_id: Option<String>,
    temperature: Option<f32>,
}

/// Loads and validates a tournament spec. A roster with LLM agents must pin
/// an explicit seed so logs stay replayable; for offline rosters a missing
/// seed is drawn from OS entropy (and recorded in every log header).
pub fn load_spec(path: &Path) -> Result<TournamentSpec, SpecError> {
    let text = fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: SpecFile = toml::from_str(&text)?;

    let mut specs = Vec::with_capacity(file.agents.len());
    let mut kind_counts: std::collections::BTreeMap<String, usize> = Default::default();
    for (index, entry) in file.agents.iter().enumerate() {
        let kind = match entry.kind.to_ascii_lowercase().as_str() {
            "random" => AgentKind::Random,
            "oracle" => AgentKind::Oracle,
            "llm" => AgentKind::Llm,
            other => {
                return Err(SpecError::UnknownKind {
                    index,
                    kind: other.to_string(),
                });
            }
        };
        let base_name = match kind {
            AgentKind::Llm => sanitize(entry.model_id.as_deref().unwrap_or("llm")),
            AgentKind::Random => "RANDOM".to_string(),
            AgentKind::Oracle => "ORACLE".to_string(),
        };
        let count = kind_counts.entry(base_name.clone()).or_insert(0);
        *count += 1;
        let display_name = entry
            .display_name
            .clone()
            .unwrap_or_else(|| format!("{base_name}_{count}"));
        specs.push(AgentSpec {
            kind,
            model_id: entry.model_id.clone(),
            temperature: entry.temperature.unwrap_or(0.7),
            display_name,
        });
    }

    let has_llm = specs.iter().any(|s| s.kind == AgentKind::Llm);
    let seed = match file.seed {
        Some(seed) => seed,
        None if has_llm => return Err(SpecError::Config(ConfigError::SeedRequired)),
        None => rand::random(),
    };

    let mut base = GameConfig::new(seed, specs);
    base.starting_seat = file.starting_seat;
    if let Some(limit) = file.round_limit {
        base.round_limit = limit;
    }
    base.validate()?;

    let spec = TournamentSpec {
        tournament_id: file
            .tournament_id
            .unwrap_or_else(|| "tournament".to_string()),
        games: file.games,
        rotation: file.rotation,
        base,
    };
    spec.validate()?;
    Ok(spec)
}

fn sanitize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_uppercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> std::path::PathBuf {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let unique = COUNTER.fetch_add(1, Ordering::Relaxed);
        let dir = std::env::temp_dir();
        let path = dir.join(format!("cluesim_spec_{}_{unique}.toml", std::process::id()));
        let mut file = fs::File::create(&path).unwrap();
        file.write_all(content.as_bytes()).unwrap();
        path
    }

    #[test]
    fn parses_full_spec() {
        let path = write_temp(
            r#"
games = 6
seed = 1
rotation = false
round_limit = 25
starting_seat = 2

[[agents]]
kind = "random"

[[agents]]
kind = "oracle"
display_name = "BRAIN"

[[agents]]
kind = "llm"
model_id = "gpt-4o-mini"

[[agents]]
kind = "llm"
model_id = "gpt-4o-mini"
temperature = 0.3
"#,
        );
        let spec = load_spec(&path).unwrap();
        fs::remove_file(&path).ok();
        assert_eq!(spec.games, 6);
        assert!(!spec.rotation);
        assert_eq!(spec.base.round_limit, 25);
        assert_eq!(spec.base.starting_seat, 2);
        assert_eq!(spec.base.agent_specs[0].display_name, "RANDOM_1");
        assert_eq!(spec.base.agent_specs[1].display_name, "BRAIN");
        assert_eq!(spec.base.agent_specs[2].display_name, "GPT_4O_MINI_1");
        assert_eq!(spec.base.agent_specs[3].display_name, "GPT_4O_MINI_2");
        assert_eq!(spec.base.agent_specs[3].temperature, 0.3);
    }

    #[test]
    fn llm_roster_requires_seed() {
        let path = write_temp(
            r#"
games = 1

[[agents]]
kind = "llm"
model_id = "gpt-4o-mini"

[[agents]]
kind = "random"
"#,
        );
        let err = load_spec(&path).unwrap_err();
        fs::remove_file(&path).ok();
        assert!(matches!(err, SpecError::Config(ConfigError::SeedRequired)));
    }
}
