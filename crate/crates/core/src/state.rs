//! Dealt game configuration and live engine state.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet, Category};
use crate::config::{ConfigError, GameConfig, PlayerId};
use crate::deduction::Location;
use crate::events::{Accusation, GameEvent, Suggestion};
use crate::rng;
use crate::view::{PlayerView, ShowRecord, ShownCard, SuggestionRecord};

/// The hidden suspect–weapon–room triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solution {
    pub suspect: Card,
    pub weapon: Card,
    pub room: Card,
}

impl Solution {
    pub fn cards(&self) -> [Card; 3] {
        [self.suspect, self.weapon, self.room]
    }

    pub fn card_set(&self) -> CardSet {
        self.cards().into_iter().collect()
    }

    /// How many components of `accusation` name the right card.
    pub fn accuracy_of(&self, accusation: &Accusation) -> u8 {
        let mut count = 0;
        if accusation.suspect == self.suspect {
            count += 1;
        }
        if accusation.weapon == self.weapon {
            count += 1;
        }
        if accusation.room == self.room {
            count += 1;
        }
        count
    }

    pub fn matches(&self, suspect: Card, weapon: Card, room: Card) -> bool {
        self.suspect == suspect && self.weapon == weapon && self.room == room
    }
}

/// One player's dealt cards.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hand {
    pub owner: PlayerId,
    pub cards: CardSet,
}

/// Seeded deal: envelope drawn uniformly per category, the remaining 18
/// cards shuffled and dealt round-robin starting at `starting_seat`.
pub fn setup_game(config: &GameConfig) -> Result<(Solution, Vec<Hand>, GameState), ConfigError> {
    config.validate()?;
    let mut deal_rng = rng::stream(config.seed, "deal");

    let pick = |rng: &mut rand_chacha::ChaCha8Rng, category: Category| -> Card {
        let cards: Vec<Card> = Card::of_category(category).collect();
        cards[rng.random_range(0..cards.len())]
    };
    let solution = Solution {
        suspect: pick(&mut deal_rng, Category::Suspect),
        weapon: pick(&mut deal_rng, Category::Weapon),
        room: pick(&mut deal_rng, Category::Room),
    };

    let mut rest: Vec<Card> = CardSet::full()
        .difference(solution.card_set())
        .iter()
        .collect();
    rest.shuffle(&mut deal_rng);

    let mut hands: Vec<Hand> = (0..config.num_players)
        .map(|i| Hand {
            owner: PlayerId(i),
            cards: CardSet::new(),
        })
        .collect();
    for (i, card) in rest.into_iter().enumerate() {
        let seat = (config.starting_seat + i) % config.num_players;
        hands[seat].cards.insert(card);
    }

    let state = GameState::new(config.clone(), solution, hands.clone());
    Ok((solution, hands, state))
}

/// Live state of one game. The engine is the only writer; agents only ever
/// see `PlayerView`s derived from it.
#[derive(Clone, Debug)]
pub struct GameState {
    config: GameConfig,
    solution: Solution,
    hands: Vec<Hand>,
    active: Vec<bool>,
    events: Vec<GameEvent>,
    round: u32,
    turn_counter: u64,
    suggestion_count: u32,
    shown_to: Vec<Vec<ShownCard>>,
    show_history: Vec<Vec<ShowRecord>>,
    verified_claims: Vec<CardSet>,
    last_reasoning: Vec<Option<String>>,
    last_suggestion: Vec<Option<Suggestion>>,
    accusations: Vec<Option<Accusation>>,
    accuracy: Vec<Option<u8>>,
    solve_order: Vec<PlayerId>,
    winner: Option<PlayerId>,
    ended: bool,
}

impl GameState {
    pub fn new(config: GameConfig, solution: Solution, hands: Vec<Hand>) -> GameState {
        let n = config.num_players;
        GameState {
            config,
            solution,
            hands,
            active: vec![true; n],
            events: Vec::new(),
            round: 1,
            turn_counter: 0,
            suggestion_count: 0,
            shown_to: vec![Vec::new(); n],
            show_history: vec![Vec::new(); n],
            verified_claims: vec![CardSet::new(); n],
            last_reasoning: vec![None; n],
            last_suggestion: vec![None; n],
            accusations: vec![None; n],
            accuracy: vec![None; n],
            solve_order: Vec::new(),
            winner: None,
            ended: false,
        }
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn num_players(&self) -> usize {
        self.config.num_players
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn hand(&self, player: PlayerId) -> CardSet {
        self.hands[player.0].cards
    }

    pub fn hands(&self) -> &[Hand] {
        &self.hands
    }

    pub fn hand_sizes(&self) -> Vec<usize> {
        self.hands.iter().map(|h| h.cards.len()).collect()
    }

    pub fn is_active(&self, player: PlayerId) -> bool {
        self.active[player.0]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn set_round(&mut self, round: u32) {
        self.round = round;
    }

    pub fn next_turn_index(&mut self) -> u64 {
        let index = self.turn_counter;
        self.turn_counter += 1;
        index
    }

    pub fn current_turn_index(&self) -> u64 {
        self.turn_counter
    }

    pub fn suggestion_ordinal(&mut self) -> u32 {
        self.suggestion_count += 1;
        self.suggestion_count
    }

    pub fn events(&self) -> &[GameEvent] {
        &self.events
    }

    pub fn push_event(&mut self, event: GameEvent) {
        self.events.push(event);
    }

    pub fn eliminate(&mut self, player: PlayerId) {
        self.active[player.0] = false;
    }

    pub fn record_show(&mut self, shower: PlayerId, to: PlayerId, card: Card, turn_index: u64) {
        self.shown_to[to.0].push(ShownCard {
            card,
            by: shower,
            turn_index,
        });
        self.show_history[shower.0].push(ShowRecord {
            card,
            to,
            turn_index,
        });
    }

    pub fn shown_to(&self, player: PlayerId) -> &[ShownCard] {
        &self.shown_to[player.0]
    }

    pub fn show_history(&self, player: PlayerId) -> &[ShowRecord] {
        &self.show_history[player.0]
    }

    pub fn verified_claims(&self, player: PlayerId) -> CardSet {
        self.verified_claims[player.0]
    }

    pub fn add_verified_claims(&mut self, player: PlayerId, cards: CardSet) {
        let merged = self.verified_claims[player.0].union(cards);
        self.verified_claims[player.0] = merged;
    }

    pub fn set_last_reasoning(&mut self, player: PlayerId, reasoning: String) {
        self.last_reasoning[player.0] = Some(reasoning);
    }

    pub fn set_last_suggestion(&mut self, player: PlayerId, suggestion: Suggestion) {
        self.last_suggestion[player.0] = Some(suggestion);
    }

    pub fn record_accusation(&mut self, accusation: Accusation, accuracy: u8, correct: bool) {
        let seat = accusation.accuser.0;
        self.accusations[seat] = Some(accusation);
        self.accuracy[seat] = Some(accuracy);
        if correct {
            self.solve_order.push(accusation.accuser);
            if self.winner.is_none() {
                self.winner = Some(accusation.accuser);
            }
        }
    }

    pub fn accusation(&self, player: PlayerId) -> Option<&Accusation> {
        self.accusations[player.0].as_ref()
    }

    pub fn accuracy(&self, player: PlayerId) -> Option<u8> {
        self.accuracy[player.0]
    }

    pub fn solve_order(&self) -> &[PlayerId] {
        &self.solve_order
    }

    pub fn winner(&self) -> Option<PlayerId> {
        self.winner
    }

    pub fn ended(&self) -> bool {
        self.ended
    }

    pub fn set_ended(&mut self) {
        self.ended = true;
    }

    /// Ground truth card locations, for claim grading and replay checks.
    pub fn ground_truth(&self) -> BTreeMap<Card, Location> {
        let mut truth = BTreeMap::new();
        for card in self.solution.cards() {
            truth.insert(card, Location::Envelope);
        }
        for hand in &self.hands {
            for card in hand.cards.iter() {
                truth.insert(card, Location::Player(hand.owner));
            }
        }
        truth
    }

    /// Exactly the knowledge state a player is entitled to: own hand, cards
    /// shown to them, the public suggestion history (shown-card identities
    /// redacted unless the viewer was the suggester), and their own prior
    /// reasoning. Envelope and other hands never appear.
    pub fn player_view(&self, player: PlayerId) -> PlayerView {
        let mut history = Vec::new();
        let mut ordinal = 0;
        for event in &self.events {
            if let GameEvent::SuggestionMade {
                turn_index,
                suggestion,
                outcome,
            } = event
            {
                ordinal += 1;
                history.push(SuggestionRecord {
                    ordinal,
                    round: suggestion.round,
                    turn_index: *turn_index,
                    suggester: suggestion.suggester,
                    suspect: suggestion.suspect,
                    weapon: suggestion.weapon,
                    room: suggestion.room,
                    passers: outcome.passers.clone(),
                    disprover: outcome.disprover,
                    shown_to_me: if suggestion.suggester == player {
                        outcome.shown_card
                    } else {
                        None
                    },
                });
            }
        }
        PlayerView {
            player,
            num_players: self.num_players(),
            display_names: self.config.display_names(),
            hand_sizes: self.hand_sizes(),
            active: self.active.clone(),
            round: self.round,
            hand: self.hand(player),
            shown_to_me: self.shown_to[player.0].clone(),
            history,
            verified_claims: self.verified_claims[player.0],
            last_reasoning: self.last_reasoning[player.0].clone(),
            last_suggestion: self.last_suggestion[player.0],
        }
    }
}
