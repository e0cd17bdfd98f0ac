//! Shared helpers for the integration and acceptance suites.
// Each test target compiles this module and uses a subset of it.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::sync::Arc;

use cluesim_core::agents::parse::{DeductionClaim, MoveChoice, ParsedResponse, ShowChoice, Triple};
use cluesim_core::agents::{Agent, AgentDecision, AgentFailure, ShowRequest, TurnContext};
use cluesim_core::{
    make_agents, run_game, AgentKind, AgentSpec, Card, CompletedGame, GameConfig, GameEvent,
    Gateway, MockBackend, MockExchange, Phase, PlayerId, PromptTemplates, Solution,
    SuggestionRecord,
};

pub fn random_specs(n: usize) -> Vec<AgentSpec> {
    (0..n)
        .map(|i| AgentSpec::random(format!("RANDOM_{}", i + 1)))
        .collect()
}

pub fn random_config(seed: u64, n: usize) -> GameConfig {
    GameConfig::new(seed, random_specs(n))
}

pub fn oracle_vs_randoms_config(seed: u64) -> GameConfig {
    let mut specs = vec![AgentSpec::oracle("ORACLE_1")];
    specs.extend((1..6).map(|i| AgentSpec::random(format!("RANDOM_{}", i + 1))));
    GameConfig::new(seed, specs)
}

pub fn play_offline(config: &GameConfig) -> CompletedGame {
    let mut agents =
        make_agents(config, None, Arc::new(PromptTemplates::builtin())).expect("offline roster");
    run_game(config, &mut agents).expect("game runs")
}

/// The suggestion history as `viewer` saw it, rebuilt from the event stream.
pub fn view_records(game: &CompletedGame, viewer: PlayerId) -> Vec<SuggestionRecord> {
    let mut records = Vec::new();
    let mut ordinal = 0;
    for record in &game.records {
        if let GameEvent::SuggestionMade {
            turn_index,
            suggestion,
            outcome,
        } = &record.event
        {
            ordinal += 1;
            records.push(SuggestionRecord {
                ordinal,
                round: suggestion.round,
                turn_index: *turn_index,
                suggester: suggestion.suggester,
                suspect: suggestion.suspect,
                weapon: suggestion.weapon,
                room: suggestion.room,
                passers: outcome.passers.clone(),
                disprover: outcome.disprover,
                shown_to_me: if suggestion.suggester == viewer {
                    outcome.shown_card
                } else {
                    None
                },
            });
        }
    }
    records
}

pub fn solution_triple(solution: &Solution) -> Triple {
    Triple {
        suspect: solution.suspect,
        weapon: solution.weapon,
        room: solution.room,
    }
}

pub fn move_raw(m: &MoveChoice) -> String {
    let accusation = match &m.accusation {
        Some(a) => format!("{}, {}, {}", a.suspect, a.weapon, a.room),
        None => "NONE".to_string(),
    };
    format!(
        "SUMMARY: {}\nREASONING: {}\nSUGGESTION: {}, {}, {}\nACCUSATION: {}",
        m.summary,
        m.reasoning,
        m.suggestion.suspect,
        m.suggestion.weapon,
        m.suggestion.room,
        accusation,
    )
}

/// Deterministic test double driven by a queue of scripted moves. Deduces
/// nothing, shows its lowest matching card, and accuses its scripted triple
/// when forced.
pub struct ScriptedAgent {
    pub moves: VecDeque<MoveChoice>,
    pub forced: Triple,
}

impl ScriptedAgent {
    pub fn new(moves: Vec<MoveChoice>, forced: Triple) -> ScriptedAgent {
        ScriptedAgent {
            moves: moves.into(),
            forced,
        }
    }
}

impl Agent for ScriptedAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Random
    }

    fn deduce(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let raw = "ANALYSIS: scripted\nDEDUCED_CARDS: NONE".to_string();
        let parsed = ParsedResponse::Deduction(DeductionClaim {
            analysis: "scripted".to_string(),
            cards: None,
        });
        Ok(AgentDecision::parsed_ok(Phase::Deduce, raw, parsed, 1))
    }

    fn act(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let m = self
            .moves
            .pop_front()
            .expect("scripted agent ran out of moves");
        let raw = move_raw(&m);
        Ok(AgentDecision::parsed_ok(
            Phase::Act,
            raw,
            ParsedResponse::Move(m),
            1,
        ))
    }

    fn show_card(&mut self, req: &ShowRequest) -> Result<AgentDecision, AgentFailure> {
        let card: Card = req.matching.iter().next().expect("matching non-empty");
        let raw = format!("REASONING: scripted\nSHOW: {card}");
        let parsed = ParsedResponse::Show(ShowChoice {
            reasoning: "scripted".to_string(),
            card,
        });
        Ok(AgentDecision::parsed_ok(Phase::ShowCard, raw, parsed, 1))
    }

    fn forced_accusation(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let m = MoveChoice {
            summary: "scripted forced accusation".to_string(),
            reasoning: "scripted".to_string(),
            suggestion: self.forced,
            accusation: Some(self.forced),
        };
        let raw = move_raw(&m);
        Ok(AgentDecision::parsed_ok(
            Phase::Act,
            raw,
            ParsedResponse::Move(m),
            1,
        ))
    }
}

/// Runs a 2-player game: seat 0 is a mock-backed LLM, seat 1 is scripted.
pub fn run_mock_duel(
    config: &GameConfig,
    exchanges: Vec<MockExchange>,
    scripted: ScriptedAgent,
) -> CompletedGame {
    let gateway = Arc::new(Gateway::without_backoff(Box::new(
        MockBackend::from_exchanges(exchanges),
    )));
    let templates = Arc::new(PromptTemplates::builtin());
    let llm = cluesim_core::agents::LlmAgent::new(
        PlayerId(0),
        config.agent_specs[0].clone(),
        gateway,
        templates,
    );
    let mut agents: Vec<Box<dyn Agent>> = vec![Box::new(llm), Box::new(scripted)];
    run_game(config, &mut agents).expect("mock duel runs")
}
