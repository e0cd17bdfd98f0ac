//! The game loop: per-turn deduce/act/show phases, suggestion resolution
//! with ordered disproof, accusations and elimination, the round limit with
//! forced final accusations, and finishing-rank computation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::parse::{MoveChoice, ParsedResponse, Triple};
use crate::agents::{
    show_card_phase, Agent, AgentDecision, AgentFailure, DeductionClaim, ShowRequest, TurnContext,
};
use crate::cards::{Card, CardSet, Category};
use crate::config::{ConfigError, GameConfig, PlayerId};
use crate::deduction::{classify_claims, ClaimContext, DeductionError, DerivedInfo, KnowledgeBase};
use crate::events::{Accusation, DisproofOutcome, GameEvent, Phase, Suggestion};
use crate::rng;
use crate::state::{setup_game, GameState, Hand, Solution};
use crate::view::SuggestionRecord;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("agent infrastructure failure for {player}: {source}")]
    Agent {
        player: PlayerId,
        source: AgentFailure,
    },
    #[error("engine deduction invariant broken: {0}")]
    Deduction(#[from] DeductionError),
    #[error("agent {player} produced an illegal action: {detail}")]
    IllegalAction { player: PlayerId, detail: String },
    #[error("expected {expected} agents, got {got}")]
    AgentCount { expected: usize, got: usize },
}

/// One logged event plus the agent decisions that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventRecord {
    pub seq: u64,
    pub event: GameEvent,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub decisions: Vec<AgentDecision>,
}

/// Per-player final standing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerOutcome {
    pub player: PlayerId,
    pub display_name: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accusation: Option<Accusation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_count: Option<u8>,
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameResult {
    pub winner: Option<PlayerId>,
    pub rounds_played: u32,
    pub players: Vec<PlayerOutcome>,
}

/// Everything a finished game produces: the ground truth, the event stream
/// with attached decisions, and the result.
#[derive(Clone, Debug)]
pub struct CompletedGame {
    pub config: GameConfig,
    pub solution: Solution,
    pub hands: Vec<Hand>,
    pub records: Vec<EventRecord>,
    pub result: GameResult,
}

impl CompletedGame {
    pub fn events(&self) -> impl Iterator<Item = &GameEvent> {
        self.records.iter().map(|r| &r.event)
    }
}

/// Ranking inputs for one player.
#[derive(Clone, Debug)]
pub struct RankInput {
    pub player: PlayerId,
    /// Position in the order of correct accusations, when correct.
    pub solved_position: Option<usize>,
    pub accuracy: Option<u8>,
    pub accusation_round: Option<u32>,
}

/// Finishing order: correct accusers first in the order they solved, then
/// non-solvers by accusation accuracy descending, ties by accusation round
/// ascending (earlier is better), residual ties by seat order. Players the
/// game ended before they could accuse rank as accuracy 0 with no round.
pub fn rank_players(inputs: &[RankInput]) -> Vec<(PlayerId, u32)> {
    let mut order: Vec<&RankInput> = inputs.iter().collect();
    order.sort_by_key(|input| {
        (
            input.solved_position.is_none(),
            input.solved_position.unwrap_or(0),
            std::cmp::Reverse(input.accuracy.unwrap_or(0)),
            input.accusation_round.unwrap_or(u32::MAX),
            input.player.0,
        )
    });
    order
        .into_iter()
        .zip(1u32..)
        .map(|(input, rank)| (input.player, rank))
        .collect()
}

/// Queries players clockwise from the seat after the suggester (the
/// suggester itself is never queried; eliminated players still show). The
/// first player holding any suggested card must disprove with exactly one
/// matching card, chosen by `choose` when they hold several.
pub fn resolve_suggestion(
    state: &GameState,
    suggestion: &Suggestion,
    mut choose: impl FnMut(PlayerId, CardSet) -> Result<Card, EngineError>,
) -> Result<DisproofOutcome, EngineError> {
    let n = state.num_players();
    let suggested = suggestion.card_set();
    let mut passers = Vec::new();
    for offset in 1..n {
        let seat = PlayerId((suggestion.suggester.0 + offset) % n);
        let matching = state.hand(seat).intersection(suggested);
        if matching.is_empty() {
            passers.push(seat);
            continue;
        }
        let card = match matching.only() {
            Some(card) => card,
            None => {
                let card = choose(seat, matching)?;
                if !matching.contains(card) {
                    return Err(EngineError::IllegalAction {
                        player: seat,
                        detail: format!("shown card {card} is not among the matching cards"),
                    });
                }
                card
            }
        };
        return Ok(DisproofOutcome {
            passers,
            disprover: Some(seat),
            shown_card: Some(card),
        });
    }
    Ok(DisproofOutcome {
        passers,
        disprover: None,
        shown_card: None,
    })
}

/// Grades and applies an accusation: correct ends the game with the accuser
/// as winner (outside forced finals), incorrect eliminates the accuser.
pub fn apply_accusation(state: &mut GameState, accusation: Accusation) -> (bool, u8) {
    let correct = state
        .solution()
        .matches(accusation.suspect, accusation.weapon, accusation.room);
    let accuracy = state.solution().accuracy_of(&accusation);
    state.record_accusation(accusation, accuracy, correct);
    if !correct {
        state.eliminate(accusation.accuser);
    }
    (correct, accuracy)
}

struct Engine<'a> {
    state: GameState,
    agents: &'a mut [Box<dyn Agent>],
    kbs: Vec<KnowledgeBase>,
    fallback_rngs: Vec<ChaCha8Rng>,
    records: Vec<EventRecord>,
}

/// Runs a full game. Deterministic given the config and deterministic
/// agents: identical inputs produce identical event streams.
pub fn run_game(
    config: &GameConfig,
    agents: &mut [Box<dyn Agent>],
) -> Result<CompletedGame, EngineError> {
    if agents.len() != config.num_players {
        return Err(EngineError::AgentCount {
            expected: config.num_players,
            got: agents.len(),
        });
    }
    let (solution, hands, state) = setup_game(config)?;
    let hand_sizes = state.hand_sizes();
    let mut kbs = Vec::with_capacity(config.num_players);
    for hand in &hands {
        kbs.push(KnowledgeBase::new(
            hand.owner,
            CardSet::full(),
            hand_sizes.clone(),
            hand.cards,
        )?);
    }
    let fallback_rngs = (0..config.num_players)
        .map(|seat| rng::stream(config.seed, &format!("fallback:{seat}")))
        .collect();

    let mut engine = Engine {
        state,
        agents,
        kbs,
        fallback_rngs,
        records: Vec::new(),
    };
    engine.run()?;

    let result = engine.result();
    Ok(CompletedGame {
        config: config.clone(),
        solution,
        hands,
        records: engine.records,
        result,
    })
}

impl Engine<'_> {
    fn run(&mut self) -> Result<(), EngineError> {
        let n = self.state.num_players();
        let start = self.state.config().starting_seat;
        let round_limit = self.state.config().round_limit;

        'rounds: for round in 1..=round_limit {
            self.state.set_round(round);
            for offset in 0..n {
                let seat = PlayerId((start + offset) % n);
                if self.state.ended() {
                    break 'rounds;
                }
                if !self.state.is_active(seat) {
                    continue;
                }
                self.take_turn(seat)?;
            }
            if self.state.ended() {
                break;
            }
        }

        if !self.state.ended() && self.state.active_count() > 0 {
            // Round limit reached without a correct accusation: every
            // remaining player makes one forced final accusation in seat
            // order from the next seat in the cycle.
            self.state.set_round(round_limit);
            for offset in 0..n {
                let seat = PlayerId((start + offset) % n);
                if !self.state.is_active(seat) {
                    continue;
                }
                self.forced_turn(seat, round_limit)?;
            }
            let turn_index = self.state.current_turn_index().saturating_sub(1);
            self.emit(
                GameEvent::GameEnded {
                    turn_index,
                    winner: self.state.winner(),
                },
                vec![],
            );
            self.state.set_ended();
        }
        Ok(())
    }

    fn emit(&mut self, event: GameEvent, decisions: Vec<AgentDecision>) {
        self.state.push_event(event.clone());
        self.records.push(EventRecord {
            seq: self.records.len() as u64,
            event,
            decisions,
        });
    }

    fn agent_err(seat: PlayerId) -> impl FnOnce(AgentFailure) -> EngineError {
        move |source| EngineError::Agent {
            player: seat,
            source,
        }
    }

    fn uniform_triple(rng: &mut ChaCha8Rng) -> Triple {
        let suspects: Vec<Card> = Card::suspects().collect();
        let weapons: Vec<Card> = Card::weapons().collect();
        let rooms: Vec<Card> = Card::rooms().collect();
        Triple {
            suspect: suspects[rng.random_range(0..suspects.len())],
            weapon: weapons[rng.random_range(0..weapons.len())],
            room: rooms[rng.random_range(0..rooms.len())],
        }
    }

    fn take_turn(&mut self, seat: PlayerId) -> Result<(), EngineError> {
        let turn_index = self.state.next_turn_index();
        self.kbs[seat.0].propagate()?;

        // Phase 1: deduction.
        let view = self.state.player_view(seat);
        let derived = DerivedInfo::compute(&self.kbs[seat.0], &view);
        let ctx = TurnContext {
            view: &view,
            kb: &self.kbs[seat.0],
            derived: &derived,
            unknown_cards: view.unknown_cards(),
            this_turn_claim: None,
        };
        let deduce_decision = self.agents[seat.0]
            .deduce(&ctx)
            .map_err(Self::agent_err(seat))?;
        let claim = match (&deduce_decision.parsed, deduce_decision.fell_back) {
            (Some(ParsedResponse::Deduction(claim)), false) => Some(claim.clone()),
            _ => None,
        };
        if deduce_decision.fell_back {
            self.emit(
                GameEvent::FallbackTriggered {
                    turn_index,
                    player: seat,
                    phase: Phase::Deduce,
                },
                vec![],
            );
        }
        let claimed = claim
            .as_ref()
            .map(DeductionClaim::claimed)
            .unwrap_or_default();
        let truth = self.state.ground_truth();
        let (correct, incorrect) = classify_claims(
            claimed,
            &ClaimContext {
                claimant: seat,
                ground_truth: &truth,
                claimant_hand: view.hand,
                shown_to_claimant: view.shown_card_set(),
            },
        );
        self.state.add_verified_claims(seat, correct);
        self.emit(
            GameEvent::DeductionRecorded {
                turn_index,
                round: self.state.round(),
                player: seat,
                claimed,
                correct,
                incorrect,
            },
            vec![deduce_decision],
        );

        // Phase 2: action, on the view updated with this turn's verified
        // claims.
        let view = self.state.player_view(seat);
        let derived = DerivedInfo::compute(&self.kbs[seat.0], &view);
        let ctx = TurnContext {
            view: &view,
            kb: &self.kbs[seat.0],
            derived: &derived,
            unknown_cards: view.unknown_cards(),
            this_turn_claim: claim.as_ref(),
        };
        let act_decision = self.agents[seat.0]
            .act(&ctx)
            .map_err(Self::agent_err(seat))?;
        let (chosen, fell_back_move) = match (&act_decision.parsed, act_decision.fell_back) {
            (Some(ParsedResponse::Move(m)), false) => (m.clone(), false),
            _ => {
                // Fallback: a random legal suggestion, never an accusation.
                let triple = Self::uniform_triple(&mut self.fallback_rngs[seat.0]);
                let substitute = MoveChoice {
                    summary: String::new(),
                    reasoning: String::new(),
                    suggestion: triple,
                    accusation: None,
                };
                (substitute, true)
            }
        };
        if fell_back_move {
            self.emit(
                GameEvent::FallbackTriggered {
                    turn_index,
                    player: seat,
                    phase: Phase::Act,
                },
                vec![],
            );
        } else {
            self.state
                .set_last_reasoning(seat, chosen.reasoning.clone());
        }

        if let Some(triple) = chosen.accusation {
            let accusation = Accusation {
                accuser: seat,
                suspect: triple.suspect,
                weapon: triple.weapon,
                room: triple.room,
                round: self.state.round(),
                forced: false,
            };
            self.finish_accusation(accusation, act_decision, turn_index, false)?;
            return Ok(());
        }

        let suggestion = Suggestion {
            suggester: seat,
            suspect: chosen.suggestion.suspect,
            weapon: chosen.suggestion.weapon,
            room: chosen.suggestion.room,
            round: self.state.round(),
            turn_index,
        };
        self.run_suggestion(suggestion, act_decision, turn_index)
    }

    fn run_suggestion(
        &mut self,
        suggestion: Suggestion,
        act_decision: AgentDecision,
        turn_index: u64,
    ) -> Result<(), EngineError> {
        let seat = suggestion.suggester;
        let mut show_decision: Option<AgentDecision> = None;
        let mut show_fallback: Option<PlayerId> = None;

        let outcome = {
            let state = &self.state;
            let agents = &mut *self.agents;
            resolve_suggestion(state, &suggestion, |disprover, matching| {
                let req = ShowRequest {
                    view: &state.player_view(disprover),
                    suggestion: &suggestion,
                    matching,
                    show_history: state.show_history(disprover),
                };
                let decision = show_card_phase(agents[disprover.0].as_mut(), &req)
                    .map_err(Self::agent_err(disprover))?;
                let card = match (&decision.parsed, decision.fell_back) {
                    (Some(ParsedResponse::Show(show)), false) => show.card,
                    _ => {
                        show_fallback = Some(disprover);
                        crate::agents::heuristic_show_choice(
                            matching,
                            seat,
                            state.show_history(disprover),
                        )
                    }
                };
                show_decision = Some(decision);
                Ok(card)
            })?
        };

        if let Some(player) = show_fallback {
            self.emit(
                GameEvent::FallbackTriggered {
                    turn_index,
                    player,
                    phase: Phase::ShowCard,
                },
                vec![],
            );
        }
        if let (Some(disprover), Some(card)) = (outcome.disprover, outcome.shown_card) {
            self.state.record_show(disprover, seat, card, turn_index);
        }
        self.state.set_last_suggestion(seat, suggestion);

        let mut decisions = vec![act_decision];
        decisions.extend(show_decision);
        self.emit(
            GameEvent::SuggestionMade {
                turn_index,
                suggestion,
                outcome: outcome.clone(),
            },
            decisions,
        );

        // Everyone folds the public record (plus any privately shown card)
        // into their store.
        for p in 0..self.state.num_players() {
            let record = record_for(PlayerId(p), &suggestion, &outcome);
            self.kbs[p].ingest(&record)?;
        }
        Ok(())
    }

    fn finish_accusation(
        &mut self,
        accusation: Accusation,
        decision: AgentDecision,
        turn_index: u64,
        forced: bool,
    ) -> Result<(), EngineError> {
        let seat = accusation.accuser;
        let (correct, _accuracy) = apply_accusation(&mut self.state, accusation);
        self.emit(
            GameEvent::AccusationMade {
                turn_index,
                accusation,
                correct,
            },
            vec![decision],
        );
        if correct {
            if !forced {
                self.emit(
                    GameEvent::GameEnded {
                        turn_index,
                        winner: Some(seat),
                    },
                    vec![],
                );
                self.state.set_ended();
            }
        } else {
            self.emit(
                GameEvent::PlayerEliminated {
                    turn_index,
                    player: seat,
                },
                vec![],
            );
            if !forced && self.state.active_count() == 0 {
                self.emit(
                    GameEvent::GameEnded {
                        turn_index,
                        winner: None,
                    },
                    vec![],
                );
                self.state.set_ended();
            }
        }
        Ok(())
    }

    fn forced_turn(&mut self, seat: PlayerId, round_limit: u32) -> Result<(), EngineError> {
        let turn_index = self.state.next_turn_index();
        self.kbs[seat.0].propagate()?;
        let view = self.state.player_view(seat);
        let derived = DerivedInfo::compute(&self.kbs[seat.0], &view);
        let ctx = TurnContext {
            view: &view,
            kb: &self.kbs[seat.0],
            derived: &derived,
            unknown_cards: view.unknown_cards(),
            this_turn_claim: None,
        };
        let decision = self.agents[seat.0]
            .forced_accusation(&ctx)
            .map_err(Self::agent_err(seat))?;
        let triple = match (&decision.parsed, decision.fell_back) {
            (Some(ParsedResponse::Move(m)), false) if m.accusation.is_some() => {
                m.accusation.expect("checked above")
            }
            _ => {
                self.emit(
                    GameEvent::FallbackTriggered {
                        turn_index,
                        player: seat,
                        phase: Phase::Act,
                    },
                    vec![],
                );
                self.fallback_accusation_triple(seat)
            }
        };
        let accusation = Accusation {
            accuser: seat,
            suspect: triple.suspect,
            weapon: triple.weapon,
            room: triple.room,
            round: round_limit,
            forced: true,
        };
        self.finish_accusation(accusation, decision, turn_index, true)
    }

    /// Engine-substituted forced accusation: uniform among the candidates
    /// the player's direct observations have not eliminated.
    fn fallback_accusation_triple(&mut self, seat: PlayerId) -> Triple {
        let view = self.state.player_view(seat);
        let seen = view.hand.union(view.shown_card_set());
        let rng = &mut self.fallback_rngs[seat.0];
        let mut pick = |category: Category| {
            let candidates: Vec<Card> = Card::of_category(category)
                .filter(|c| !seen.contains(*c))
                .collect();
            if candidates.is_empty() {
                let all: Vec<Card> = Card::of_category(category).collect();
                all[rng.random_range(0..all.len())]
            } else {
                candidates[rng.random_range(0..candidates.len())]
            }
        };
        Triple {
            suspect: pick(Category::Suspect),
            weapon: pick(Category::Weapon),
            room: pick(Category::Room),
        }
    }

    fn result(&self) -> GameResult {
        let n = self.state.num_players();
        let solve_order = self.state.solve_order();
        let inputs: Vec<RankInput> = (0..n)
            .map(|seat| {
                let player = PlayerId(seat);
                RankInput {
                    player,
                    solved_position: solve_order.iter().position(|p| *p == player),
                    accuracy: self.state.accuracy(player),
                    accusation_round: self.state.accusation(player).map(|a| a.round),
                }
            })
            .collect();
        let ranks = rank_players(&inputs);
        let mut rank_by_seat = vec![0u32; n];
        for (player, rank) in ranks {
            rank_by_seat[player.0] = rank;
        }
        let players = (0..n)
            .map(|seat| {
                let player = PlayerId(seat);
                let spec = &self.state.config().agent_specs[seat];
                PlayerOutcome {
                    player,
                    display_name: spec.display_name.clone(),
                    label: spec.label(),
                    accusation: self.state.accusation(player).copied(),
                    accuracy_count: self.state.accuracy(player),
                    rank: rank_by_seat[seat],
                }
            })
            .collect();
        GameResult {
            winner: self.state.winner(),
            rounds_played: self.state.round(),
            players,
        }
    }
}

/// The suggestion record as `viewer` is allowed to see it.
pub fn record_for(
    viewer: PlayerId,
    suggestion: &Suggestion,
    outcome: &DisproofOutcome,
) -> SuggestionRecord {
    SuggestionRecord {
        ordinal: 0, // ordinal only matters for prompt rendering from views
        round: suggestion.round,
        turn_index: suggestion.turn_index,
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
    }
}
