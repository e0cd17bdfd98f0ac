//! Game events: the persisted record of everything that happens in a game.

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet};
use crate::config::PlayerId;

/// A public hypothesis triple named by the player whose turn it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suggestion {
    pub suggester: PlayerId,
    pub suspect: Card,
    pub weapon: Card,
    pub room: Card,
    pub round: u32,
    pub turn_index: u64,
}

impl Suggestion {
    pub fn cards(&self) -> [Card; 3] {
        [self.suspect, self.weapon, self.room]
    }

    pub fn card_set(&self) -> CardSet {
        self.cards().into_iter().collect()
    }

    pub fn triple_string(&self) -> String {
        format!("{}, {}, {}", self.suspect, self.weapon, self.room)
    }
}

/// How a suggestion resolved: who passed, who disproved, and which card was
/// shown. The shown card identity is private to the suggester; view
/// construction redacts it for everyone else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisproofOutcome {
    pub passers: Vec<PlayerId>,
    pub disprover: Option<PlayerId>,
    pub shown_card: Option<Card>,
}

/// A binding final answer. Wrong means elimination; right ends the game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Accusation {
    pub accuser: PlayerId,
    pub suspect: Card,
    pub weapon: Card,
    pub room: Card,
    pub round: u32,
    /// True when the accusation was forced by the round limit.
    pub forced: bool,
}

impl Accusation {
    pub fn cards(&self) -> [Card; 3] {
        [self.suspect, self.weapon, self.room]
    }

    pub fn triple_string(&self) -> String {
        format!("{}, {}, {}", self.suspect, self.weapon, self.room)
    }
}

/// The reasoning phase an agent was exercising when an event fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Deduce,
    Act,
    ShowCard,
}

/// One entry of the game's event stream. `turn_index` is the player-turn
/// counter; every turn emits at least one event, so the sequence is gap-free.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameEvent {
    DeductionRecorded {
        turn_index: u64,
        round: u32,
        player: PlayerId,
        claimed: CardSet,
        correct: CardSet,
        incorrect: CardSet,
    },
    FallbackTriggered {
        turn_index: u64,
        player: PlayerId,
        phase: Phase,
    },
    SuggestionMade {
        turn_index: u64,
        suggestion: Suggestion,
        outcome: DisproofOutcome,
    },
    AccusationMade {
        turn_index: u64,
        accusation: Accusation,
        correct: bool,
    },
    PlayerEliminated {
        turn_index: u64,
        player: PlayerId,
    },
    GameEnded {
        turn_index: u64,
        winner: Option<PlayerId>,
    },
}

impl GameEvent {
    pub fn turn_index(&self) -> u64 {
        match self {
            GameEvent::DeductionRecorded { turn_index, .. }
            | GameEvent::FallbackTriggered { turn_index, .. }
            | GameEvent::SuggestionMade { turn_index, .. }
            | GameEvent::AccusationMade { turn_index, .. }
            | GameEvent::PlayerEliminated { turn_index, .. }
            | GameEvent::GameEnded { turn_index, .. } => *turn_index,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GameEvent::DeductionRecorded { .. } => "deduction_recorded",
            GameEvent::FallbackTriggered { .. } => "fallback_triggered",
            GameEvent::SuggestionMade { .. } => "suggestion_made",
            GameEvent::AccusationMade { .. } => "accusation_made",
            GameEvent::PlayerEliminated { .. } => "player_eliminated",
            GameEvent::GameEnded { .. } => "game_ended",
        }
    }
}
