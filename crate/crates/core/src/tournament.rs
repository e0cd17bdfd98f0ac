//! Multi-game runner: seeds and seats each game from the tournament spec,
//! writes logs and gateway records, and aggregates the report.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{make_agents, PromptTemplates};
use crate::config::{AgentKind, ConfigError, GameConfig};
use crate::engine::{run_game, EngineError};
use crate::gamelog::{write_log, GameLog, LogError};
use crate::gateway::http::MultiProviderBackend;
use crate::gateway::{Gateway, GatewayError, MockBackend, MockFixture};
use crate::metrics::{build_report, MetricsError, TournamentReport};
use crate::rng;

/// A tournament: `games` runs of the base config with derived per-game
/// seeds, optionally rotating the starting seat each game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentSpec {
    pub tournament_id: String,
    pub games: u32,
    pub rotation: bool,
    pub base: GameConfig,
}

impl TournamentSpec {
    pub fn new(tournament_id: impl Into<String>, games: u32, base: GameConfig) -> TournamentSpec {
        TournamentSpec {
            tournament_id: tournament_id.into(),
            games,
            rotation: true,
            base,
        }
    }

    /// The derived config for game `index`: a per-game sub-seed and the
    /// rotated starting seat.
    pub fn game_config(&self, index: u32) -> GameConfig {
        let mut config = self.base.clone();
        config.seed = rng::sub_seed(self.base.seed, &format!("game:{index}"));
        if self.rotation {
            config.starting_seat =
                (self.base.starting_seat + index as usize) % self.base.num_players;
        }
        config
    }

    pub fn has_llm(&self) -> bool {
        self.base
            .agent_specs
            .iter()
            .any(|s| s.kind == AgentKind::Llm)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.games < 1 {
            return Err(ConfigError::RoundLimit);
        }
        self.base.validate()
    }
}

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error("invalid tournament spec: {0}")]
    Config(#[from] ConfigError),
    #[error("game {game} failed: {source}")]
    Engine { game: u32, source: EngineError },
    #[error("log error: {0}")]
    Log(#[from] LogError),
    #[error("gateway error: {0}")]
    Gateway(#[from] GatewayError),
    #[error("metrics error: {0}")]
    Metrics(#[from] MetricsError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub struct TournamentOutcome {
    pub dir: PathBuf,
    pub log_paths: Vec<PathBuf>,
    pub logs: Vec<GameLog>,
    pub report: TournamentReport,
}

/// Runs the whole tournament into `<out_dir>/<tournament_id>/`, writing
/// `game_<k>.jsonl`, `gateway_<k>.jsonl`, and the report files. With a mock
/// fixture the run is fully offline and byte-reproducible; without one, LLM
/// seats use the live provider adapters.
pub fn run_tournament(
    spec: &TournamentSpec,
    out_dir: &Path,
    parallel: usize,
    mock: Option<&MockFixture>,
) -> Result<TournamentOutcome, TournamentError> {
    spec.validate()?;
    let dir = out_dir.join(&spec.tournament_id);
    fs::create_dir_all(&dir)?;
    let templates = Arc::new(PromptTemplates::builtin());

    let parallel = parallel.max(1);
    let mut logs: Vec<Option<GameLog>> = (0..spec.games).map(|_| None).collect();
    let mut log_paths = Vec::with_capacity(spec.games as usize);

    for chunk_start in (0..spec.games).step_by(parallel) {
        let chunk: Vec<u32> =
            (chunk_start..(chunk_start + parallel as u32).min(spec.games)).collect();
        let mut results: Vec<(u32, Result<GameLog, TournamentError>)> = Vec::new();
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for &game_index in &chunk {
                let templates = templates.clone();
                let dir = dir.clone();
                handles.push((
                    game_index,
                    scope.spawn(move || run_one(spec, game_index, &dir, mock, templates)),
                ));
            }
            for (game_index, handle) in handles {
                let result = handle.join().expect("game thread panicked");
                results.push((game_index, result));
            }
        });
        for (game_index, result) in results {
            logs[game_index as usize] = Some(result?);
        }
    }

    let logs: Vec<GameLog> = logs
        .into_iter()
        .map(|l| l.expect("all games ran"))
        .collect();
    for log in &logs {
        log_paths.push(dir.join(format!("game_{}.jsonl", log.header.game_index)));
    }
    let report = build_report(&logs)?;
    report.write_files(&dir)?;
    Ok(TournamentOutcome {
        dir,
        log_paths,
        logs,
        report,
    })
}

fn run_one(
    spec: &TournamentSpec,
    game_index: u32,
    dir: &Path,
    mock: Option<&MockFixture>,
    templates: Arc<PromptTemplates>,
) -> Result<GameLog, TournamentError> {
    let config = spec.game_config(game_index);
    let gateway = if spec.has_llm() {
        Some(match mock {
            Some(fixture) => Arc::new(Gateway::without_backoff(Box::new(
                MockBackend::from_exchanges(fixture.game(game_index as usize)),
            ))),
            None => Arc::new(Gateway::new(Box::new(MultiProviderBackend))),
        })
    } else {
        None
    };

    let mut agents = make_agents(&config, gateway.clone(), templates)?;
    let game = run_game(&config, &mut agents).map_err(|source| TournamentError::Engine {
        game: game_index,
        source,
    })?;
    let log = GameLog::from_completed(&game, spec.tournament_id.clone(), game_index);
    write_log(&dir.join(format!("game_{game_index}.jsonl")), &log)?;

    if let Some(gateway) = gateway {
        let records = gateway.drain_records();
        let mut text = String::new();
        for record in &records {
            text.push_str(&serde_json::to_string(record).expect("gateway records serialize"));
            text.push('\n');
        }
        fs::write(dir.join(format!("gateway_{game_index}.jsonl")), text)?;
    }
    Ok(log)
}

/// Reads every `game_*.jsonl` in a tournament directory, ordered by game
/// index.
pub fn read_tournament_logs(dir: &Path) -> Result<Vec<GameLog>, TournamentError> {
    let mut indexed: Vec<(u32, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        if let Some(index) = name
            .strip_prefix("game_")
            .and_then(|n| n.strip_suffix(".jsonl"))
        {
            if let Ok(index) = index.parse::<u32>() {
                indexed.push((index, path));
            }
        }
    }
    indexed.sort_by_key(|(index, _)| *index);
    let mut logs = Vec::with_capacity(indexed.len());
    for (_, path) in indexed {
        logs.push(crate::gamelog::read_log(&path)?);
    }
    Ok(logs)
}
