//! Canonical persisted game representation: JSON Lines, one record per
//! event, header first, footer with the result, and a sealed ground-truth
//! record last so analysis tooling can stay blind by skipping it.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::CardSet;
use crate::config::GameConfig;
use crate::engine::{CompletedGame, EventRecord, GameResult};
use crate::state::{Hand, Solution};

pub const SCHEMA_VERSION: u32 = 1;
/// Version of the 21-card roster the log was produced against.
pub const ROSTER_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("log schema version {found} is not supported (this build reads {supported})")]
    SchemaMismatch { found: u32, supported: u32 },
    #[error("corrupt log at byte offset {offset}: {detail}")]
    Corrupt { offset: u64, detail: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogHeader {
    pub schema_version: u32,
    pub roster_version: u32,
    pub tournament_id: String,
    pub game_index: u32,
    pub config: GameConfig,
    /// Per-seat aggregation labels.
    pub labels: Vec<String>,
}

/// One line of a log file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LogRecord {
    Header(LogHeader),
    Event(EventRecord),
    Footer {
        result: GameResult,
    },
    /// Sealed section: never read by views, prompts, or metrics.
    GroundTruth {
        solution: Solution,
        hands: Vec<Hand>,
    },
}

/// A parsed log. `solution`/`hands` are the sealed ground truth; only
/// replay and verification tooling should touch them.
#[derive(Clone, Debug, PartialEq)]
pub struct GameLog {
    pub header: LogHeader,
    pub records: Vec<EventRecord>,
    pub result: GameResult,
    pub solution: Solution,
    pub hands: Vec<Hand>,
}

impl GameLog {
    pub fn from_completed(
        game: &CompletedGame,
        tournament_id: impl Into<String>,
        game_index: u32,
    ) -> GameLog {
        GameLog {
            header: LogHeader {
                schema_version: SCHEMA_VERSION,
                roster_version: ROSTER_VERSION,
                tournament_id: tournament_id.into(),
                game_index,
                config: game.config.clone(),
                labels: game.config.labels(),
            },
            records: game.records.clone(),
            result: game.result.clone(),
            solution: game.solution,
            hands: game.hands.clone(),
        }
    }

    pub fn hand(&self, seat: usize) -> CardSet {
        self.hands[seat].cards
    }

    /// Serializes to JSON Lines, ground truth last.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |record: &LogRecord| {
            out.push_str(&serde_json::to_string(record).expect("log records serialize"));
            out.push('\n');
        };
        push(&LogRecord::Header(self.header.clone()));
        for record in &self.records {
            push(&LogRecord::Event(record.clone()));
        }
        push(&LogRecord::Footer {
            result: self.result.clone(),
        });
        push(&LogRecord::GroundTruth {
            solution: self.solution,
            hands: self.hands.clone(),
        });
        out
    }
}

pub fn write_log(path: &Path, log: &GameLog) -> Result<(), LogError> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    writer.write_all(log.to_jsonl().as_bytes())?;
    writer.flush()?;
    Ok(())
}

/// Reads and validates a log: schema version, record order, event sequence
/// contiguity. Errors carry the byte offset of the offending line.
pub fn read_log(path: &Path) -> Result<GameLog, LogError> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_log(&text)
}

pub fn parse_log(text: &str) -> Result<GameLog, LogError> {
    let total_len = text.len() as u64;
    let corrupt = |offset: u64, detail: &str| LogError::Corrupt {
        offset,
        detail: detail.to_string(),
    };

    let mut header: Option<LogHeader> = None;
    let mut records: Vec<EventRecord> = Vec::new();
    let mut result: Option<GameResult> = None;
    let mut ground_truth: Option<(Solution, Vec<Hand>)> = None;

    let mut offset: u64 = 0;
    for line in text.split_inclusive('\n') {
        let line_offset = offset;
        offset += line.len() as u64;
        let trimmed = line.trim_end_matches('\n').trim_end_matches('\r');
        if trimmed.trim().is_empty() {
            continue;
        }

        // Check the schema version before strict field validation so a
        // future format fails with SchemaMismatch, not a field error.
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| corrupt(line_offset, &format!("invalid JSON: {e}")))?;
        if header.is_none() {
            if value.get("type").and_then(|t| t.as_str()) != Some("header") {
                return Err(corrupt(line_offset, "first record must be the header"));
            }
            let found = value
                .get("schema_version")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| corrupt(line_offset, "header lacks schema_version"))?
                as u32;
            if found != SCHEMA_VERSION {
                return Err(LogError::SchemaMismatch {
                    found,
                    supported: SCHEMA_VERSION,
                });
            }
        }

        let record: LogRecord = serde_json::from_str(trimmed)
            .map_err(|e| corrupt(line_offset, &format!("invalid record: {e}")))?;
        match record {
            LogRecord::Header(h) => {
                if header.is_some() {
                    return Err(corrupt(line_offset, "duplicate header"));
                }
                header = Some(h);
            }
            LogRecord::Event(event) => {
                if result.is_some() {
                    return Err(corrupt(line_offset, "event after footer"));
                }
                if event.seq != records.len() as u64 {
                    return Err(corrupt(
                        line_offset,
                        &format!(
                            "event seq {} out of order (expected {})",
                            event.seq,
                            records.len()
                        ),
                    ));
                }
                if let Some(last) = records.last() {
                    if event.event.turn_index() < last.event.turn_index() {
                        return Err(corrupt(line_offset, "turn_index went backwards"));
                    }
                }
                records.push(event);
            }
            LogRecord::Footer { result: r } => {
                if result.is_some() {
                    return Err(corrupt(line_offset, "duplicate footer"));
                }
                result = Some(r);
            }
            LogRecord::GroundTruth { solution, hands } => {
                if ground_truth.is_some() {
                    return Err(corrupt(line_offset, "duplicate ground truth record"));
                }
                ground_truth = Some((solution, hands));
            }
        }
    }

    let header = header.ok_or_else(|| corrupt(total_len, "missing header (truncated log?)"))?;
    let result = result.ok_or_else(|| corrupt(total_len, "missing footer (truncated log?)"))?;
    let (solution, hands) =
        ground_truth.ok_or_else(|| corrupt(total_len, "missing ground truth record"))?;
    if hands.len() != header.config.num_players {
        return Err(corrupt(
            total_len,
            "ground truth hand count disagrees with config",
        ));
    }
    Ok(GameLog {
        header,
        records,
        result,
        solution,
        hands,
    })
}
