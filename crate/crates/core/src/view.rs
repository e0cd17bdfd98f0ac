//! A player's observable knowledge state: private hand, cards shown to them,
//! the complete suggestion history, and their own prior reasoning. Views are
//! the only game-state surface agents ever see.

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet};
use crate::config::PlayerId;
use crate::events::Suggestion;

/// A card privately revealed to `to` by `by`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShownCard {
    pub card: Card,
    pub by: PlayerId,
    pub turn_index: u64,
}

/// A card the owner revealed to `to` (the owner's own show history).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShowRecord {
    pub card: Card,
    pub to: PlayerId,
    pub turn_index: u64,
}

/// One suggestion as a particular viewer saw it. `shown_to_me` is populated
/// only when the viewer was the suggester; everyone else sees just the fact
/// of the disproof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestionRecord {
    /// 1-based suggestion ordinal, the `T<n>` of prompt history lines.
    pub ordinal: u32,
    pub round: u32,
    pub turn_index: u64,
    pub suggester: PlayerId,
    pub suspect: Card,
    pub weapon: Card,
    pub room: Card,
    pub passers: Vec<PlayerId>,
    pub disprover: Option<PlayerId>,
    pub shown_to_me: Option<Card>,
}

impl SuggestionRecord {
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

/// Everything one player can observe at a point in the game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerView {
    pub player: PlayerId,
    pub num_players: usize,
    pub display_names: Vec<String>,
    pub hand_sizes: Vec<usize>,
    pub active: Vec<bool>,
    pub round: u32,
    pub hand: CardSet,
    pub shown_to_me: Vec<ShownCard>,
    pub history: Vec<SuggestionRecord>,
    /// Claims this player made that the engine verified as correct.
    pub verified_claims: CardSet,
    pub last_reasoning: Option<String>,
    pub last_suggestion: Option<Suggestion>,
}

impl PlayerView {
    pub fn display_name(&self, player: PlayerId) -> &str {
        &self.display_names[player.0]
    }

    pub fn shown_card_set(&self) -> CardSet {
        self.shown_to_me.iter().map(|s| s.card).collect()
    }

    /// Cards the player can identify outright: hand, shown cards, and
    /// engine-verified correct deductions.
    pub fn known_cards(&self) -> CardSet {
        self.hand
            .union(self.shown_card_set())
            .union(self.verified_claims)
    }

    /// Deck cards with no direct identification yet.
    pub fn unknown_cards(&self) -> CardSet {
        CardSet::full().difference(self.known_cards())
    }

    pub fn active_players(&self) -> Vec<PlayerId> {
        (0..self.num_players)
            .filter(|i| self.active[*i])
            .map(PlayerId)
            .collect()
    }

    pub fn undisproved(&self) -> Vec<&SuggestionRecord> {
        self.history
            .iter()
            .filter(|r| r.disprover.is_none())
            .collect()
    }
}
