//! The five evaluation metrics, per game and aggregated per model label:
//! finishing rank, parse-failure fallbacks, accusation accuracy, deduction
//! quality, and knowledge accumulation. Everything here reads only the blind
//! portion of the log — never the sealed ground truth.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::CardSet;
use crate::config::PlayerId;
use crate::events::GameEvent;
use crate::gamelog::GameLog;

pub const KNOWLEDGE_CAP: u32 = 18;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("malformed log: {0}")]
    MalformedLog(String),
    #[error("logs disagree on configuration: {0}")]
    MixedConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One player's metrics for one game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerGameMetrics {
    pub player: PlayerId,
    pub display_name: String,
    pub label: String,
    pub rank: u32,
    pub accuracy_count: u8,
    pub accuracy_norm: f64,
    pub deductions_correct: u32,
    pub deductions_incorrect: u32,
    pub fallbacks: u32,
    /// Known cards per round; index 0 is the pre-game hand count.
    pub known_by_round: Vec<u32>,
}

/// Known-cards series for one player: hand size plus the deduplicated union
/// of shown cards and engine-verified correct claims through each round,
/// capped at 18. Index 0 is the game start.
pub fn knowledge_series(log: &GameLog, player: PlayerId) -> Result<Vec<u32>, MetricsError> {
    let rounds = log.result.rounds_played;
    let hand_size = hand_size_of(log, player)? as u32;
    let mut gained_by_round: BTreeMap<u32, CardSet> = BTreeMap::new();
    for record in &log.records {
        match &record.event {
            GameEvent::SuggestionMade {
                suggestion,
                outcome,
                ..
            } if suggestion.suggester == player => {
                if let Some(card) = outcome.shown_card {
                    gained_by_round
                        .entry(suggestion.round)
                        .or_default()
                        .insert(card);
                }
            }
            GameEvent::DeductionRecorded {
                round,
                player: p,
                correct,
                ..
            } if *p == player && !correct.is_empty() => {
                let entry = gained_by_round.entry(*round).or_default();
                *entry = entry.union(*correct);
            }
            _ => {}
        }
    }
    let mut series = Vec::with_capacity(rounds as usize + 1);
    let mut gained = CardSet::new();
    series.push(hand_size.min(KNOWLEDGE_CAP));
    for round in 1..=rounds {
        if let Some(cards) = gained_by_round.get(&round) {
            gained = gained.union(*cards);
        }
        series.push((hand_size + gained.len() as u32).min(KNOWLEDGE_CAP));
    }
    Ok(series)
}

/// Round-robin deal arithmetic: how many cards `player` received.
fn hand_size_of(log: &GameLog, player: PlayerId) -> Result<usize, MetricsError> {
    let config = &log.header.config;
    let n = config.num_players;
    if player.0 >= n {
        return Err(MetricsError::MalformedLog(format!(
            "no such player {player}"
        )));
    }
    let dealt = crate::cards::DECK_SIZE - 3;
    let base = dealt / n;
    let extras = dealt % n;
    let offset = (player.0 + n - config.starting_seat % n) % n;
    Ok(base + usize::from(offset < extras))
}

/// Unique correct and incorrect deduction counts across the game; re-claimed
/// cards are not double-counted.
pub fn deduction_tallies(log: &GameLog, player: PlayerId) -> Result<(u32, u32), MetricsError> {
    let mut correct_union = CardSet::new();
    let mut incorrect_union = CardSet::new();
    for record in &log.records {
        if let GameEvent::DeductionRecorded {
            player: p,
            correct,
            incorrect,
            ..
        } = &record.event
        {
            if *p == player {
                correct_union = correct_union.union(*correct);
                incorrect_union = incorrect_union.union(*incorrect);
            }
        }
    }
    Ok((correct_union.len() as u32, incorrect_union.len() as u32))
}

/// Correct components (out of 3) of the player's final accusation, with the
/// count/3 normalization. Players the game ended before they could accuse
/// score 0.
pub fn accusation_accuracy(log: &GameLog, player: PlayerId) -> (u8, f64) {
    let count = log
        .result
        .players
        .get(player.0)
        .and_then(|p| p.accuracy_count)
        .unwrap_or(0);
    (count, f64::from(count) / 3.0)
}

pub fn fallback_count(log: &GameLog, player: PlayerId) -> u32 {
    log.records
        .iter()
        .filter(
            |r| matches!(r.event, GameEvent::FallbackTriggered { player: p, .. } if p == player),
        )
        .count() as u32
}

/// All per-player metrics for one game.
pub fn per_game_metrics(log: &GameLog) -> Result<Vec<PlayerGameMetrics>, MetricsError> {
    let n = log.header.config.num_players;
    if log.result.players.len() != n {
        return Err(MetricsError::MalformedLog(
            "footer player count disagrees with config".into(),
        ));
    }
    (0..n)
        .map(|seat| {
            let player = PlayerId(seat);
            let outcome = &log.result.players[seat];
            let (accuracy_count, accuracy_norm) = accusation_accuracy(log, player);
            let (correct, incorrect) = deduction_tallies(log, player)?;
            Ok(PlayerGameMetrics {
                player,
                display_name: outcome.display_name.clone(),
                label: outcome.label.clone(),
                rank: outcome.rank,
                accuracy_count,
                accuracy_norm,
                deductions_correct: correct,
                deductions_incorrect: incorrect,
                fallbacks: fallback_count(log, player),
                known_by_round: knowledge_series(log, player)?,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub label: String,
    pub wins: u32,
    pub mean_rank: f64,
    pub mean_acc_norm: f64,
    pub ded_correct_mean: f64,
    pub ded_incorrect_mean: f64,
    pub fallbacks_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub display_name: String,
    pub label: String,
    /// Correctly identified solution cards (0-3), one value per game.
    pub values: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub label: String,
    /// Mean known cards at each round index; `None` when no game of this
    /// label reached that round.
    pub values: Vec<Option<f64>>,
}

/// Aggregated tournament report plus plot-ready series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentReport {
    pub games: usize,
    pub rows: Vec<LabelRow>,
    pub heatmap: Vec<HeatmapRow>,
    pub curves: Vec<CurveRow>,
}

/// Aggregates logs into the tournament report. Logs must share a player
/// count and per-seat roster.
pub fn build_report(logs: &[GameLog]) -> Result<TournamentReport, MetricsError> {
    let Some(first) = logs.first() else {
        return Err(MetricsError::MalformedLog("no logs to report on".into()));
    };
    let n = first.header.config.num_players;
    let seat_names = first.header.config.display_names();
    let seat_labels = first.header.labels.clone();
    for log in logs {
        if log.header.config.num_players != n {
            return Err(MetricsError::MixedConfig(format!(
                "game {} has {} players, expected {n}",
                log.header.game_index, log.header.config.num_players
            )));
        }
        if log.header.labels != seat_labels || log.header.config.display_names() != seat_names {
            return Err(MetricsError::MixedConfig(format!(
                "game {} has a different seat roster",
                log.header.game_index
            )));
        }
    }

    let per_game: Vec<Vec<PlayerGameMetrics>> = logs
        .iter()
        .map(per_game_metrics)
        .collect::<Result<_, _>>()?;

    // Label rows in first-appearance seat order.
    let mut label_order: Vec<String> = Vec::new();
    for label in &seat_labels {
        if !label_order.contains(label) {
            label_order.push(label.clone());
        }
    }

    let mut rows = Vec::new();
    for label in &label_order {
        let mut wins = 0u32;
        let mut ranks = Vec::new();
        let mut accs = Vec::new();
        let mut corrects = Vec::new();
        let mut incorrects = Vec::new();
        let mut fallbacks = Vec::new();
        for (log, metrics) in logs.iter().zip(&per_game) {
            if let Some(winner) = log.result.winner {
                if &seat_labels[winner.0] == label {
                    wins += 1;
                }
            }
            for m in metrics.iter().filter(|m| &m.label == label) {
                ranks.push(f64::from(m.rank));
                accs.push(m.accuracy_norm);
                corrects.push(f64::from(m.deductions_correct));
                incorrects.push(f64::from(m.deductions_incorrect));
                fallbacks.push(f64::from(m.fallbacks));
            }
        }
        rows.push(LabelRow {
            label: label.clone(),
            wins,
            mean_rank: mean(&ranks),
            mean_acc_norm: mean(&accs),
            ded_correct_mean: mean(&corrects),
            ded_incorrect_mean: mean(&incorrects),
            fallbacks_mean: mean(&fallbacks),
        });
    }

    let heatmap = (0..n)
        .map(|seat| HeatmapRow {
            display_name: seat_names[seat].clone(),
            label: seat_labels[seat].clone(),
            values: per_game
                .iter()
                .map(|metrics| metrics[seat].accuracy_count)
                .collect(),
        })
        .collect();

    let max_rounds = per_game
        .iter()
        .flat_map(|metrics| metrics.iter().map(|m| m.known_by_round.len()))
        .max()
        .unwrap_or(0);
    let curves = label_order
        .iter()
        .map(|label| {
            let values = (0..max_rounds)
                .map(|round| {
                    let samples: Vec<f64> = per_game
                        .iter()
                        .flat_map(|metrics| metrics.iter())
                        .filter(|m| &m.label == label)
                        .filter_map(|m| m.known_by_round.get(round).copied())
                        .map(f64::from)
                        .collect();
                    if samples.is_empty() {
                        None
                    } else {
                        Some(mean(&samples))
                    }
                })
                .collect();
            CurveRow {
                label: label.clone(),
                values,
            }
        })
        .collect();

    Ok(TournamentReport {
        games: logs.len(),
        rows,
        heatmap,
        curves,
    })
}

fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        0.0
    } else {
        samples.iter().sum::<f64>() / samples.len() as f64
    }
}

pub const SUMMARY_COLUMNS: [&str; 7] = [
    "label",
    "wins",
    "mean_rank",
    "mean_acc_norm",
    "ded_correct_mean",
    "ded_incorrect_mean",
    "fallbacks_mean",
];

impl TournamentReport {
    /// Summary table as CSV; all numeric cells use fixed 6-decimal
    /// formatting so outputs are byte-stable.
    pub fn summary_csv(&self) -> String {
        let mut out = SUMMARY_COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                row.label,
                row.wins,
                row.mean_rank,
                row.mean_acc_norm,
                row.ded_correct_mean,
                row.ded_incorrect_mean,
                row.fallbacks_mean,
            );
        }
        out
    }

    /// Summary as an aligned text table.
    pub fn summary_table(&self) -> String {
        let mut cells: Vec<Vec<String>> =
            vec![SUMMARY_COLUMNS.iter().map(|s| s.to_string()).collect()];
        for row in &self.rows {
            cells.push(vec![
                row.label.clone(),
                row.wins.to_string(),
                format!("{:.6}", row.mean_rank),
                format!("{:.6}", row.mean_acc_norm),
                format!("{:.6}", row.ded_correct_mean),
                format!("{:.6}", row.ded_incorrect_mean),
                format!("{:.6}", row.fallbacks_mean),
            ]);
        }
        let widths: Vec<usize> = (0..SUMMARY_COLUMNS.len())
            .map(|col| cells.iter().map(|row| row[col].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// Accuracy heatmap (players x games), one row per seat.
    pub fn heatmap_csv(&self) -> String {
        let mut out = String::from("display_name,label");
        for game in 1..=self.games {
            let _ = write!(out, ",game_{game}");
        }
        out.push('\n');
        for row in &self.heatmap {
            let _ = write!(out, "{},{}", row.display_name, row.label);
            for value in &row.values {
                let _ = write!(out, ",{value}");
            }
            out.push('\n');
        }
        out
    }

    /// Mean known-cards-by-round curves, one row per label.
    pub fn curves_csv(&self) -> String {
        let rounds = self
            .curves
            .iter()
            .map(|c| c.values.len())
            .max()
            .unwrap_or(0);
        let mut out = String::from("label");
        for round in 0..rounds {
            let _ = write!(out, ",round_{round}");
        }
        out.push('\n');
        for row in &self.curves {
            out.push_str(&row.label);
            for round in 0..rounds {
                match row.values.get(round).copied().flatten() {
                    Some(value) => {
                        let _ = write!(out, ",{value:.6}");
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes summary.csv, summary.txt, accuracy_matrix.csv, and
    /// knowledge_curves.csv into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<(), MetricsError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("summary.csv"), self.summary_csv())?;
        fs::write(dir.join("summary.txt"), self.summary_table())?;
        fs::write(dir.join("accuracy_matrix.csv"), self.heatmap_csv())?;
        fs::write(dir.join("knowledge_curves.csv"), self.curves_csv())?;
        Ok(())
    }
}
