//! Exact replay: re-executes the engine substituting recorded raw agent
//! texts for live agents and asserts every regenerated event equals the
//! recorded one. Classifications, disproofs, and the result are recomputed
//! from scratch, so any tampering or nondeterminism surfaces as divergence.

use std::collections::VecDeque;

use thiserror::Error;

use crate::agents::parse::parse_phase_response;
use crate::agents::{Agent, AgentDecision, AgentFailure, ShowRequest, TurnContext};
use crate::config::{AgentKind, PlayerId};
use crate::engine::{run_game, EngineError, EventRecord, GameResult};
use crate::events::{GameEvent, Phase};
use crate::gamelog::GameLog;
use crate::state::setup_game;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("replay diverged at turn {turn_index}: {field}")]
    Divergence { turn_index: u64, field: String },
    #[error("replay engine failure: {0}")]
    Engine(#[from] EngineError),
}

/// An agent that replays recorded decisions. Raw texts are re-parsed through
/// the live grammar, so the replayed run exercises the same code paths.
struct ReplayAgent {
    queue: VecDeque<AgentDecision>,
}

impl ReplayAgent {
    fn next(&mut self, phase: Phase) -> AgentDecision {
        match self.queue.pop_front() {
            Some(decision) if decision.phase == phase => decision,
            Some(decision) => {
                // Phase mismatch: return it anyway; event comparison reports
                // the divergence with full context.
                decision
            }
            None => AgentDecision::fallback(phase, "<replay transcript exhausted>".to_string()),
        }
    }
}

impl Agent for ReplayAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Random
    }

    fn deduce(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        Ok(self.next(Phase::Deduce))
    }

    fn act(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        Ok(self.next(Phase::Act))
    }

    fn show_card(&mut self, _req: &ShowRequest) -> Result<AgentDecision, AgentFailure> {
        Ok(self.next(Phase::ShowCard))
    }

    fn forced_accusation(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        Ok(self.next(Phase::Act))
    }
}

/// Rebuilds each seat's decision sequence from the recorded event stream,
/// re-parsing raw texts. A non-fallback decision that no longer parses is
/// itself a divergence.
fn decision_queues(log: &GameLog) -> Result<Vec<VecDeque<AgentDecision>>, ReplayError> {
    let n = log.header.config.num_players;
    let mut queues: Vec<VecDeque<AgentDecision>> = (0..n).map(|_| VecDeque::new()).collect();
    for record in &log.records {
        for decision in &record.decisions {
            let seat = owner_of(record, decision).ok_or_else(|| ReplayError::Divergence {
                turn_index: record.event.turn_index(),
                field: format!("unattributable {} decision", phase_name(decision.phase)),
            })?;
            let mut decision = decision.clone();
            if !decision.fell_back {
                match parse_phase_response(decision.phase, &decision.raw_text) {
                    Ok(parsed) => decision.parsed = Some(parsed),
                    Err(e) => {
                        return Err(ReplayError::Divergence {
                            turn_index: record.event.turn_index(),
                            field: format!("recorded raw_text no longer parses: {e}"),
                        })
                    }
                }
            }
            queues[seat.0].push_back(decision);
        }
    }
    Ok(queues)
}

fn phase_name(phase: Phase) -> &'static str {
    match phase {
        Phase::Deduce => "deduce",
        Phase::Act => "act",
        Phase::ShowCard => "show",
    }
}

fn owner_of(record: &EventRecord, decision: &AgentDecision) -> Option<PlayerId> {
    match (&record.event, decision.phase) {
        (GameEvent::DeductionRecorded { player, .. }, Phase::Deduce) => Some(*player),
        (GameEvent::SuggestionMade { suggestion, .. }, Phase::Act) => Some(suggestion.suggester),
        (GameEvent::SuggestionMade { outcome, .. }, Phase::ShowCard) => outcome.disprover,
        (GameEvent::AccusationMade { accusation, .. }, Phase::Act) => Some(accusation.accuser),
        _ => None,
    }
}

/// Replays `log` and returns the recomputed result. Divergence reports the
/// first turn and field where the regenerated game disagrees.
pub fn replay(log: &GameLog) -> Result<GameResult, ReplayError> {
    let config = &log.header.config;

    // The deal must regenerate bit-identically from the recorded seed.
    let (solution, hands, _) = setup_game(config).map_err(EngineError::Config)?;
    if solution != log.solution {
        return Err(ReplayError::Divergence {
            turn_index: 0,
            field: "sealed solution does not match the seeded deal".to_string(),
        });
    }
    if hands != log.hands {
        return Err(ReplayError::Divergence {
            turn_index: 0,
            field: "sealed hands do not match the seeded deal".to_string(),
        });
    }

    let mut agents: Vec<Box<dyn Agent>> = decision_queues(log)?
        .into_iter()
        .map(|queue| Box::new(ReplayAgent { queue }) as Box<dyn Agent>)
        .collect();
    let regenerated = run_game(config, &mut agents)?;

    compare_records(&log.records, &regenerated.records)?;
    if regenerated.result != log.result {
        return Err(ReplayError::Divergence {
            turn_index: log
                .records
                .last()
                .map(|r| r.event.turn_index())
                .unwrap_or(0),
            field: "footer result".to_string(),
        });
    }
    Ok(regenerated.result)
}

fn compare_records(
    recorded: &[EventRecord],
    regenerated: &[EventRecord],
) -> Result<(), ReplayError> {
    for (a, b) in recorded.iter().zip(regenerated.iter()) {
        if a.event != b.event {
            return Err(ReplayError::Divergence {
                turn_index: a.event.turn_index(),
                field: event_diff(&a.event, &b.event),
            });
        }
        if a.decisions.len() != b.decisions.len() {
            return Err(ReplayError::Divergence {
                turn_index: a.event.turn_index(),
                field: "decision count".to_string(),
            });
        }
        for (da, db) in a.decisions.iter().zip(b.decisions.iter()) {
            if da.raw_text != db.raw_text
                || da.attempts != db.attempts
                || da.fell_back != db.fell_back
            {
                return Err(ReplayError::Divergence {
                    turn_index: a.event.turn_index(),
                    field: format!("{} decision", phase_name(da.phase)),
                });
            }
        }
    }
    if recorded.len() != regenerated.len() {
        let turn_index = recorded
            .get(regenerated.len().min(recorded.len().saturating_sub(1)))
            .map(|r| r.event.turn_index())
            .unwrap_or(0);
        return Err(ReplayError::Divergence {
            turn_index,
            field: "event count".to_string(),
        });
    }
    Ok(())
}

fn event_diff(a: &GameEvent, b: &GameEvent) -> String {
    if a.kind_name() != b.kind_name() {
        return format!(
            "event kind: recorded {} vs regenerated {}",
            a.kind_name(),
            b.kind_name()
        );
    }
    match (a, b) {
        (
            GameEvent::SuggestionMade {
                outcome: oa,
                suggestion: sa,
                ..
            },
            GameEvent::SuggestionMade {
                outcome: ob,
                suggestion: sb,
                ..
            },
        ) => {
            if sa != sb {
                format!("{}: suggestion triple", a.kind_name())
            } else if oa.shown_card != ob.shown_card {
                format!("{}: shown_card", a.kind_name())
            } else if oa.disprover != ob.disprover {
                format!("{}: disprover", a.kind_name())
            } else {
                format!("{}: passers", a.kind_name())
            }
        }
        (
            GameEvent::DeductionRecorded {
                claimed: ca,
                correct: xa,
                incorrect: ia,
                ..
            },
            GameEvent::DeductionRecorded {
                claimed: cb,
                correct: xb,
                incorrect: ib,
                ..
            },
        ) => {
            if ca != cb {
                format!("{}: claimed", a.kind_name())
            } else if xa != xb {
                format!("{}: correct set", a.kind_name())
            } else if ia != ib {
                format!("{}: incorrect set", a.kind_name())
            } else {
                format!("{}: player", a.kind_name())
            }
        }
        _ => a.kind_name().to_string(),
    }
}
