//! Constraint store over card locations with fixed-point propagation, plus an
//! exhaustive possible-worlds enumerator. Propagation is the polynomial
//! engine agents use every turn; enumeration is the complete (exponential)
//! oracle reserved for verification and endgame certainty.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::{Card, CardSet, Category};
use crate::config::PlayerId;
use crate::view::{PlayerView, SuggestionRecord};

/// Ground-truth position of a card: some player's hand or the envelope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Location {
    Player(PlayerId),
    Envelope,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Player(p) => write!(f, "{p}"),
            Location::Envelope => write!(f, "envelope"),
        }
    }
}

/// Default node budget for world enumeration.
pub const DEFAULT_WORLD_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeductionError {
    #[error("invalid knowledge base setup: {0}")]
    InvalidSetup(String),
    #[error("event contradicts established knowledge: {0}")]
    InconsistentEvent(String),
    #[error("knowledge base is inconsistent: {0}")]
    Inconsistent(String),
    #[error("world enumeration exceeded the cap of {cap} nodes ({visited} visited)")]
    CapExceeded { cap: u64, visited: u64 },
}

/// Bitmask over possible locations: bit `p` for player `p`, a high bit for
/// the envelope.
#[derive(Clone, Copy, PartialEq, Eq)]
struct LocSet(u32);

const ENVELOPE_BIT: u32 = 1 << 30;

impl LocSet {
    fn all(num_players: usize) -> LocSet {
        LocSet(((1u32 << num_players) - 1) | ENVELOPE_BIT)
    }

    fn only(loc: Location) -> LocSet {
        match loc {
            Location::Player(p) => LocSet(1 << p.0),
            Location::Envelope => LocSet(ENVELOPE_BIT),
        }
    }

    fn contains(self, loc: Location) -> bool {
        self.0 & LocSet::only(loc).0 != 0
    }

    fn remove(&mut self, loc: Location) {
        self.0 &= !LocSet::only(loc).0;
    }

    fn is_empty(self) -> bool {
        self.0 == 0
    }

    fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    fn single(self, num_players: usize) -> Option<Location> {
        if self.len() != 1 {
            return None;
        }
        if self.0 == ENVELOPE_BIT {
            Some(Location::Envelope)
        } else {
            let p = self.0.trailing_zeros() as usize;
            (p < num_players).then_some(Location::Player(PlayerId(p)))
        }
    }

    fn locations(self, num_players: usize) -> Vec<Location> {
        let mut out: Vec<Location> = (0..num_players)
            .filter(|p| self.0 & (1 << p) != 0)
            .map(|p| Location::Player(PlayerId(p)))
            .collect();
        if self.0 & ENVELOPE_BIT != 0 {
            out.push(Location::Envelope);
        }
        out
    }
}

/// "Player holds at least one of these cards" — the constraint a disproof
/// broadcasts to everyone who did not see the shown card.
#[derive(Clone, Debug)]
struct Disjunction {
    player: PlayerId,
    cards: CardSet,
    satisfied: bool,
}

/// One player's constraint store over card locations.
///
/// Facts come in three shapes: pinned locations (`known_locations`),
/// per-player exclusions (encoded as location-domain bits), and disjunctions
/// from observed disproofs. `propagate` closes the store under the deduction
/// rules; `enumerate_worlds` lists every total assignment consistent with it.
#[derive(Clone)]
pub struct KnowledgeBase {
    owner: PlayerId,
    deck: CardSet,
    num_players: usize,
    hand_sizes: Vec<usize>,
    domains: [LocSet; 32],
    pinned: BTreeMap<Card, Location>,
    disjunctions: Vec<Disjunction>,
}

impl KnowledgeBase {
    /// A fresh store for `owner`, who holds `own_hand`. `deck` may be a
    /// reduced roster as long as it has cards in every category and its size
    /// equals the hand sizes plus one envelope card per category.
    pub fn new(
        owner: PlayerId,
        deck: CardSet,
        hand_sizes: Vec<usize>,
        own_hand: CardSet,
    ) -> Result<KnowledgeBase, DeductionError> {
        let num_players = hand_sizes.len();
        if !(2..=18).contains(&num_players) {
            return Err(DeductionError::InvalidSetup(format!(
                "unsupported player count {num_players}"
            )));
        }
        if !own_hand.is_subset(deck) {
            return Err(DeductionError::InvalidSetup(
                "own hand not within deck".into(),
            ));
        }
        let dealt: usize = hand_sizes.iter().sum();
        if dealt + Category::ALL.len() != deck.len() {
            return Err(DeductionError::InvalidSetup(format!(
                "deck of {} cannot split into hands of {} plus one envelope card per category",
                deck.len(),
                dealt
            )));
        }
        for category in Category::ALL {
            if deck.of_category(category).is_empty() {
                return Err(DeductionError::InvalidSetup(format!(
                    "deck has no {category} cards"
                )));
            }
        }
        if own_hand.len() != hand_sizes[owner.0] {
            return Err(DeductionError::InvalidSetup(format!(
                "owner hand has {} cards, expected {}",
                own_hand.len(),
                hand_sizes[owner.0]
            )));
        }

        let mut kb = KnowledgeBase {
            owner,
            deck,
            num_players,
            hand_sizes,
            domains: [LocSet(0); 32],
            pinned: BTreeMap::new(),
            disjunctions: Vec::new(),
        };
        for card in deck.iter() {
            let mut domain = LocSet::all(num_players);
            if !own_hand.contains(card) {
                domain.remove(Location::Player(owner));
            }
            kb.domains[card.index()] = domain;
        }
        for card in own_hand.iter() {
            kb.pin(card, Location::Player(owner))
                .map_err(|e| DeductionError::InvalidSetup(e.to_string()))?;
        }
        Ok(kb)
    }

    /// Builds the store a player is entitled to from their view alone: own
    /// hand, then every suggestion record in order.
    pub fn from_view(view: &PlayerView) -> Result<KnowledgeBase, DeductionError> {
        let mut kb = KnowledgeBase::new(
            view.player,
            CardSet::full(),
            view.hand_sizes.clone(),
            view.hand,
        )?;
        for record in &view.history {
            kb.ingest(record)?;
        }
        Ok(kb)
    }

    pub fn owner(&self) -> PlayerId {
        self.owner
    }

    pub fn deck(&self) -> CardSet {
        self.deck
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    /// All pinned card locations, own hand included.
    pub fn known_locations(&self) -> &BTreeMap<Card, Location> {
        &self.pinned
    }

    pub fn location_of(&self, card: Card) -> Option<Location> {
        self.pinned.get(&card).copied()
    }

    /// Locations still possible for `card`.
    pub fn candidate_locations(&self, card: Card) -> Vec<Location> {
        self.domains[card.index()].locations(self.num_players)
    }

    /// Deck cards whose location is not pinned yet.
    pub fn unknown_count(&self) -> usize {
        self.deck.len() - self.pinned.len()
    }

    /// Envelope candidates for one category.
    pub fn envelope_candidates(&self, category: Category) -> CardSet {
        self.deck
            .of_category(category)
            .iter()
            .filter(|c| self.domains[c.index()].contains(Location::Envelope))
            .collect()
    }

    /// The envelope triple, once every category is pinned.
    pub fn solved_envelope(&self) -> Option<[Card; 3]> {
        let mut cards = [Card::MissScarlet; 3];
        for (slot, category) in Category::ALL.into_iter().enumerate() {
            let locked = self
                .pinned
                .iter()
                .find(|(c, l)| c.category() == category && **l == Location::Envelope)?;
            cards[slot] = *locked.0;
        }
        Some(cards)
    }

    /// Cards pinned in an opponent's hand — the "other players hold" facts a
    /// deduction claim is allowed to name.
    pub fn opponent_held(&self) -> CardSet {
        self.pinned
            .iter()
            .filter(|(_, loc)| matches!(loc, Location::Player(p) if *p != self.owner))
            .map(|(c, _)| *c)
            .collect()
    }

    fn exclude(&mut self, player: PlayerId, card: Card) -> Result<(), DeductionError> {
        if !self.deck.contains(card) {
            return Ok(());
        }
        if self.location_of(card) == Some(Location::Player(player)) {
            return Err(DeductionError::InconsistentEvent(format!(
                "{player} passed on {card} but is known to hold it"
            )));
        }
        self.domains[card.index()].remove(Location::Player(player));
        if self.domains[card.index()].is_empty() {
            return Err(DeductionError::Inconsistent(format!(
                "{card} has no possible location"
            )));
        }
        Ok(())
    }

    fn pin(&mut self, card: Card, loc: Location) -> Result<bool, DeductionError> {
        if let Some(existing) = self.location_of(card) {
            if existing != loc {
                return Err(DeductionError::Inconsistent(format!(
                    "{card} pinned at {existing} and {loc}"
                )));
            }
            return Ok(false);
        }
        if !self.domains[card.index()].contains(loc) {
            return Err(DeductionError::Inconsistent(format!(
                "{card} cannot be at {loc}"
            )));
        }
        self.domains[card.index()] = LocSet::only(loc);
        self.pinned.insert(card, loc);
        if loc == Location::Envelope {
            // Exactly one envelope card per category.
            for other in self.deck.of_category(card.category()).iter() {
                if other != card {
                    self.domains[other.index()].remove(Location::Envelope);
                    if self.domains[other.index()].is_empty() {
                        return Err(DeductionError::Inconsistent(format!(
                            "{other} has no possible location"
                        )));
                    }
                }
            }
        }
        Ok(true)
    }

    /// Folds one observed suggestion into the store.
    ///
    /// Passers exclude all three cards. A disproof seen from outside becomes
    /// a "holds at least one" disjunction; a card shown to the owner pins
    /// outright. An undisproved suggestion needs no special rule: every
    /// queried player passed, so the exclusions already confine each
    /// suggested card to the suggester or the envelope.
    pub fn ingest(&mut self, record: &SuggestionRecord) -> Result<(), DeductionError> {
        let suggested = record.card_set().intersection(self.deck);
        for passer in &record.passers {
            for card in suggested.iter() {
                self.exclude(*passer, card)?;
            }
        }
        match (record.disprover, record.shown_to_me) {
            (Some(disprover), Some(card)) => {
                self.pin(card, Location::Player(disprover))?;
            }
            (Some(disprover), None) if disprover != self.owner => {
                let already = suggested
                    .iter()
                    .any(|c| self.location_of(c) == Some(Location::Player(disprover)));
                if !already {
                    self.disjunctions.push(Disjunction {
                        player: disprover,
                        cards: suggested,
                        satisfied: false,
                    });
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Runs the deduction rules to a fixed point and reports every location
    /// newly pinned by this call:
    ///
    /// * unit resolution — a disjunction with all but one member excluded
    ///   pins the remainder on its player;
    /// * hand-size saturation — a player with all hand cards pinned is
    ///   excluded from every other card;
    /// * category elimination — a category whose envelope candidates shrink
    ///   to one locks that card in the envelope;
    /// * singleton domains pin, and subsumed disjunctions are dropped.
    pub fn propagate(&mut self) -> Result<Vec<(Card, Location)>, DeductionError> {
        let mut new_facts = Vec::new();
        let deck = self.deck;
        loop {
            let mut changed = false;

            // Singleton domains become pins.
            for card in deck.iter() {
                if self.pinned.contains_key(&card) {
                    continue;
                }
                let domain = self.domains[card.index()];
                if domain.is_empty() {
                    return Err(DeductionError::Inconsistent(format!(
                        "{card} has no possible location"
                    )));
                }
                if let Some(loc) = domain.single(self.num_players) {
                    self.pin(card, loc)?;
                    new_facts.push((card, loc));
                    changed = true;
                }
            }

            // Unit resolution over disjunctions.
            let mut disjunctions = std::mem::take(&mut self.disjunctions);
            for disjunction in &mut disjunctions {
                if disjunction.satisfied {
                    continue;
                }
                let player = disjunction.player;
                if disjunction
                    .cards
                    .iter()
                    .any(|c| self.location_of(c) == Some(Location::Player(player)))
                {
                    disjunction.satisfied = true;
                    changed = true;
                    continue;
                }
                let viable: CardSet = disjunction
                    .cards
                    .iter()
                    .filter(|c| self.domains[c.index()].contains(Location::Player(player)))
                    .collect();
                if viable.is_empty() {
                    return Err(DeductionError::Inconsistent(format!(
                        "{player} must hold one of {} but can hold none",
                        disjunction.cards.to_list_string()
                    )));
                }
                if viable != disjunction.cards {
                    disjunction.cards = viable;
                    changed = true;
                }
                if let Some(card) = viable.only() {
                    self.pin(card, Location::Player(player))?;
                    new_facts.push((card, Location::Player(player)));
                    disjunction.satisfied = true;
                    changed = true;
                }
            }
            self.disjunctions = disjunctions;

            // Hand-size saturation.
            for p in 0..self.num_players {
                let player = PlayerId(p);
                let held = self
                    .pinned
                    .values()
                    .filter(|l| **l == Location::Player(player))
                    .count();
                if held > self.hand_sizes[p] {
                    return Err(DeductionError::Inconsistent(format!(
                        "{player} pinned to {held} cards but holds {}",
                        self.hand_sizes[p]
                    )));
                }
                if held == self.hand_sizes[p] {
                    for card in deck.iter() {
                        if self.pinned.contains_key(&card) {
                            continue;
                        }
                        if self.domains[card.index()].contains(Location::Player(player)) {
                            self.domains[card.index()].remove(Location::Player(player));
                            changed = true;
                            if self.domains[card.index()].is_empty() {
                                return Err(DeductionError::Inconsistent(format!(
                                    "{card} has no possible location"
                                )));
                            }
                        }
                    }
                }
            }

            // Category elimination: last standing envelope candidate locks.
            for category in Category::ALL {
                let candidates = self.envelope_candidates(category);
                if candidates.is_empty() {
                    return Err(DeductionError::Inconsistent(format!(
                        "no {category} can be in the envelope"
                    )));
                }
                if let Some(card) = candidates.only() {
                    if self.location_of(card).is_none() {
                        self.pin(card, Location::Envelope)?;
                        new_facts.push((card, Location::Envelope));
                        changed = true;
                    }
                }
            }

            if !changed {
                break;
            }
        }

        // Subset subsumption: keep only minimal unsatisfied disjunctions.
        self.disjunctions.retain(|d| !d.satisfied);
        let mut kept: Vec<Disjunction> = Vec::with_capacity(self.disjunctions.len());
        for d in std::mem::take(&mut self.disjunctions) {
            if kept
                .iter()
                .any(|k| k.player == d.player && k.cards.is_subset(d.cards))
            {
                continue;
            }
            kept.retain(|k| !(k.player == d.player && d.cards.is_subset(k.cards)));
            kept.push(d);
        }
        self.disjunctions = kept;

        Ok(new_facts)
    }
}

/// One complete, consistent card-location assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct World {
    assignments: BTreeMap<Card, Location>,
}

impl World {
    pub fn from_assignments(assignments: BTreeMap<Card, Location>) -> World {
        World { assignments }
    }

    pub fn location_of(&self, card: Card) -> Option<Location> {
        self.assignments.get(&card).copied()
    }

    pub fn assignments(&self) -> &BTreeMap<Card, Location> {
        &self.assignments
    }

    pub fn envelope(&self) -> CardSet {
        self.assignments
            .iter()
            .filter(|(_, l)| **l == Location::Envelope)
            .map(|(c, _)| *c)
            .collect()
    }
}

struct Enumerator<'kb, 'v> {
    kb: &'kb KnowledgeBase,
    order: Vec<Card>,
    capacity: Vec<usize>,
    env_remaining: BTreeMap<Category, usize>,
    assigned: BTreeMap<Card, Location>,
    disjunctions: Vec<(PlayerId, CardSet)>,
    visitor: &'v mut dyn FnMut(&BTreeMap<Card, Location>),
    found: u64,
    visited: u64,
    cap: u64,
}

impl Enumerator<'_, '_> {
    fn disjunctions_feasible(&self) -> bool {
        self.disjunctions.iter().all(|(player, cards)| {
            cards.iter().any(|c| match self.assigned.get(&c) {
                Some(loc) => *loc == Location::Player(*player),
                None => {
                    self.kb.domains[c.index()].contains(Location::Player(*player))
                        && self.capacity[player.0] > 0
                }
            })
        })
    }

    fn disjunctions_satisfied(&self) -> bool {
        self.disjunctions.iter().all(|(player, cards)| {
            cards
                .iter()
                .any(|c| self.assigned.get(&c) == Some(&Location::Player(*player)))
        })
    }

    fn search(&mut self, depth: usize) -> Result<(), DeductionError> {
        if depth == self.order.len() {
            if self.disjunctions_satisfied() {
                self.found += 1;
                (self.visitor)(&self.assigned);
            }
            return Ok(());
        }
        let card = self.order[depth];
        for loc in self.kb.domains[card.index()].locations(self.kb.num_players) {
            self.visited += 1;
            if self.visited > self.cap {
                return Err(DeductionError::CapExceeded {
                    cap: self.cap,
                    visited: self.visited,
                });
            }
            match loc {
                Location::Player(p) => {
                    if self.capacity[p.0] == 0 {
                        continue;
                    }
                    self.capacity[p.0] -= 1;
                }
                Location::Envelope => {
                    let remaining = self.env_remaining.get_mut(&card.category()).unwrap();
                    if *remaining == 0 {
                        continue;
                    }
                    *remaining -= 1;
                }
            }
            self.assigned.insert(card, loc);
            if self.disjunctions_feasible() {
                self.search(depth + 1)?;
            }
            self.assigned.remove(&card);
            match loc {
                Location::Player(p) => self.capacity[p.0] += 1,
                Location::Envelope => {
                    *self.env_remaining.get_mut(&card.category()).unwrap() += 1;
                }
            }
        }
        Ok(())
    }
}

impl KnowledgeBase {
    /// Streams every completion consistent with the store through `visitor`
    /// and returns how many there were. `enumerate_worlds` and
    /// `certain_facts` are thin wrappers; the oracle agent uses the visitor
    /// directly to bound memory.
    pub fn visit_worlds(
        &self,
        cap: u64,
        visitor: &mut dyn FnMut(&BTreeMap<Card, Location>),
    ) -> Result<u64, DeductionError> {
        // Propagation is sound, so closing the store first shrinks the
        // search without changing the world set.
        let mut closed = self.clone();
        match closed.propagate() {
            Ok(_) => {}
            Err(DeductionError::Inconsistent(_)) => return Ok(0),
            Err(e) => return Err(e),
        }

        let mut capacity: Vec<usize> = closed.hand_sizes.clone();
        let mut env_remaining: BTreeMap<Category, usize> =
            Category::ALL.into_iter().map(|c| (c, 1)).collect();
        for (card, loc) in &closed.pinned {
            match loc {
                Location::Player(p) => {
                    if capacity[p.0] == 0 {
                        return Ok(0);
                    }
                    capacity[p.0] -= 1;
                }
                Location::Envelope => {
                    let remaining = env_remaining.get_mut(&card.category()).unwrap();
                    if *remaining == 0 {
                        return Ok(0);
                    }
                    *remaining -= 1;
                }
            }
        }

        let mut order: Vec<Card> = closed
            .deck
            .iter()
            .filter(|c| !closed.pinned.contains_key(c))
            .collect();
        let open_slots: usize =
            capacity.iter().sum::<usize>() + env_remaining.values().sum::<usize>();
        if order.len() != open_slots {
            return Ok(0);
        }
        order.sort_by_key(|c| (closed.domains[c.index()].len(), c.index()));

        let disjunctions = closed
            .disjunctions
            .iter()
            .filter(|d| !d.satisfied)
            .map(|d| (d.player, d.cards))
            .collect();
        let assigned = closed.pinned.clone();
        let mut enumerator = Enumerator {
            kb: &closed,
            order,
            capacity,
            env_remaining,
            assigned,
            disjunctions,
            visitor,
            found: 0,
            visited: 0,
            cap,
        };
        enumerator.search(0)?;
        Ok(enumerator.found)
    }

    /// Backtracking enumeration of every completion consistent with the
    /// store: exact hand sizes, one envelope card per category, all
    /// disjunctions and exclusions honored. Sound and complete; aborts with
    /// `CapExceeded` once `cap` assignment attempts have been made.
    pub fn enumerate_worlds(&self, cap: u64) -> Result<Vec<World>, DeductionError> {
        let mut worlds = Vec::new();
        self.visit_worlds(cap, &mut |assignments| {
            worlds.push(World {
                assignments: assignments.clone(),
            });
        })?;
        Ok(worlds)
    }

    /// Facts true in every possible world. Complete by construction, so this
    /// is always a superset of what `propagate` pins. Runs in constant
    /// memory: worlds are intersected as they stream.
    pub fn certain_facts(&self, cap: u64) -> Result<Vec<(Card, Location)>, DeductionError> {
        let mut common: Option<BTreeMap<Card, Location>> = None;
        self.visit_worlds(cap, &mut |assignments| match &mut common {
            None => common = Some(assignments.clone()),
            Some(facts) => {
                facts.retain(|card, loc| assignments.get(card) == Some(loc));
            }
        })?;
        match common {
            Some(facts) => Ok(facts.into_iter().collect()),
            None => Err(DeductionError::Inconsistent("no possible worlds".into())),
        }
    }
}

/// Engine-precomputed summary of what a store already entails, in the shape
/// prompts consume: envelope candidates, locks, undisproved suggestions, and
/// derived definitive locations.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedInfo {
    pub remaining: BTreeMap<Category, CardSet>,
    pub locked: BTreeMap<Category, Card>,
    pub undisproved: Vec<SuggestionRecord>,
    pub definitive: Vec<(Card, Location)>,
}

impl DerivedInfo {
    /// Summarizes `kb` (already propagated) for the owner of `view`.
    /// `definitive` reports derived pins only: own hand and directly shown
    /// cards are knowledge, not deduction.
    pub fn compute(kb: &KnowledgeBase, view: &PlayerView) -> DerivedInfo {
        let mut remaining = BTreeMap::new();
        let mut locked = BTreeMap::new();
        for category in Category::ALL {
            let candidates = kb.envelope_candidates(category);
            if let Some(card) = candidates.only() {
                locked.insert(category, card);
            }
            remaining.insert(category, candidates);
        }
        let direct = view.hand.union(view.shown_card_set());
        let definitive = kb
            .known_locations()
            .iter()
            .filter(|(card, _)| !direct.contains(**card))
            .map(|(card, loc)| (*card, *loc))
            .collect();
        DerivedInfo {
            remaining,
            locked,
            undisproved: view.undisproved().into_iter().cloned().collect(),
            definitive,
        }
    }

    pub fn locked_triple(&self) -> Option<[Card; 3]> {
        Some([
            *self.locked.get(&Category::Suspect)?,
            *self.locked.get(&Category::Weapon)?,
            *self.locked.get(&Category::Room)?,
        ])
    }
}

/// Inputs needed to grade a deduction claim against ground truth.
pub struct ClaimContext<'a> {
    pub claimant: PlayerId,
    pub ground_truth: &'a BTreeMap<Card, Location>,
    pub claimant_hand: CardSet,
    pub shown_to_claimant: CardSet,
}

/// Grades claimed cards per the deduction contract ("cards other players
/// hold, NOT in the envelope"): a claim is correct when the card sits in an
/// opponent's hand and incorrect when it is in the envelope. Cards from the
/// claimant's own hand or already shown to them are duplicates, filtered out
/// before grading.
pub fn classify_claims(claimed: CardSet, ctx: &ClaimContext) -> (CardSet, CardSet) {
    let duplicates = ctx.claimant_hand.union(ctx.shown_to_claimant);
    let mut correct = CardSet::new();
    let mut incorrect = CardSet::new();
    for card in claimed.difference(duplicates).iter() {
        match ctx.ground_truth.get(&card) {
            Some(Location::Envelope) | None => {
                incorrect.insert(card);
            }
            Some(Location::Player(p)) if *p != ctx.claimant => {
                correct.insert(card);
            }
            Some(Location::Player(_)) => {}
        }
    }
    (correct, incorrect)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(
        ordinal: u32,
        suggester: usize,
        cards: [Card; 3],
        passers: &[usize],
        disprover: Option<usize>,
        shown_to_me: Option<Card>,
    ) -> SuggestionRecord {
        SuggestionRecord {
            ordinal,
            round: 1,
            turn_index: ordinal as u64,
            suggester: PlayerId(suggester),
            suspect: cards[0],
            weapon: cards[1],
            room: cards[2],
            passers: passers.iter().map(|p| PlayerId(*p)).collect(),
            disprover: disprover.map(PlayerId),
            shown_to_me,
        }
    }

    /// 3 suspects, 3 weapons, 3 rooms; 3 players with 2 cards each.
    fn reduced_deck() -> CardSet {
        [
            Card::MissScarlet,
            Card::ColonelMustard,
            Card::MrsWhite,
            Card::Candlestick,
            Card::Knife,
            Card::LeadPipe,
            Card::Kitchen,
            Card::Ballroom,
            Card::Conservatory,
        ]
        .into_iter()
        .collect()
    }

    fn reduced_kb(own_hand: [Card; 2]) -> KnowledgeBase {
        KnowledgeBase::new(
            PlayerId(0),
            reduced_deck(),
            vec![2, 2, 2],
            own_hand.into_iter().collect(),
        )
        .unwrap()
    }

    fn six_player_kb(own_hand: [Card; 3]) -> KnowledgeBase {
        KnowledgeBase::new(
            PlayerId(4),
            CardSet::full(),
            vec![3; 6],
            own_hand.into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn observer_learns_disjunction_and_passer_exclusions() {
        // Player 1 suggests (Mrs. White, Rope, Kitchen); player 2 passes,
        // player 3 disproves. Observed by player 5.
        let mut kb = KnowledgeBase::new(
            PlayerId(4),
            CardSet::full(),
            vec![3; 6],
            [Card::Study, Card::Hall, Card::Revolver]
                .into_iter()
                .collect(),
        )
        .unwrap();
        kb.ingest(&record(
            1,
            0,
            [Card::MrsWhite, Card::Rope, Card::Kitchen],
            &[1],
            Some(2),
            None,
        ))
        .unwrap();
        assert_eq!(kb.disjunctions.len(), 1);
        assert!(!kb
            .candidate_locations(Card::Rope)
            .contains(&Location::Player(PlayerId(1))));
        assert!(!kb
            .candidate_locations(Card::MrsWhite)
            .contains(&Location::Player(PlayerId(1))));
        assert!(!kb
            .candidate_locations(Card::Kitchen)
            .contains(&Location::Player(PlayerId(1))));
    }

    #[test]
    fn shown_card_pins_and_skips_disjunction() {
        let mut kb = six_player_kb([Card::Study, Card::Hall, Card::Revolver]);
        kb.ingest(&record(
            1,
            4,
            [Card::MrsWhite, Card::Rope, Card::Kitchen],
            &[5],
            Some(0),
            Some(Card::Rope),
        ))
        .unwrap();
        assert_eq!(
            kb.location_of(Card::Rope),
            Some(Location::Player(PlayerId(0)))
        );
        assert!(kb.disjunctions.is_empty());
    }

    #[test]
    fn unit_resolution_pins_remaining_card() {
        // Disjunction (P3, {A, B, C}) with A in owner's hand and B pinned at
        // P4 leaves C pinned at P3.
        let mut kb = six_player_kb([Card::MrsWhite, Card::Hall, Card::Revolver]);
        kb.ingest(&record(
            1,
            4,
            [Card::MrsWhite, Card::Rope, Card::Kitchen],
            &[],
            Some(3),
            Some(Card::Rope),
        ))
        .unwrap();
        // From elsewhere, P2 disproved (Mrs. White, Rope, Kitchen).
        kb.ingest(&record(
            2,
            0,
            [Card::MrsWhite, Card::Rope, Card::Kitchen],
            &[1],
            Some(2),
            None,
        ))
        .unwrap();
        let facts = kb.propagate().unwrap();
        assert!(facts.contains(&(Card::Kitchen, Location::Player(PlayerId(2)))));
    }

    #[test]
    fn empty_kb_propagates_nothing() {
        let mut kb = six_player_kb([Card::Study, Card::Hall, Card::Revolver]);
        assert!(kb.propagate().unwrap().is_empty());
    }

    #[test]
    fn five_located_suspects_lock_envelope_suspect() {
        let mut kb = six_player_kb([Card::MissScarlet, Card::ColonelMustard, Card::MrsWhite]);
        kb.ingest(&record(
            1,
            4,
            [Card::MrGreen, Card::Rope, Card::Kitchen],
            &[],
            Some(0),
            Some(Card::MrGreen),
        ))
        .unwrap();
        kb.ingest(&record(
            2,
            4,
            [Card::MrsPeacock, Card::Rope, Card::Kitchen],
            &[0],
            Some(1),
            Some(Card::MrsPeacock),
        ))
        .unwrap();
        let facts = kb.propagate().unwrap();
        assert!(facts.contains(&(Card::ProfessorPlum, Location::Envelope)));
        assert_eq!(
            kb.envelope_candidates(Category::Suspect).only(),
            Some(Card::ProfessorPlum)
        );
    }

    #[test]
    fn undisproved_suggestion_confines_cards_to_suggester_or_envelope() {
        // Reduced 3-player deck. Player 1 suggests; players 0 and 2 pass.
        let mut kb = reduced_kb([Card::MissScarlet, Card::Candlestick]);
        kb.ingest(&record(
            1,
            1,
            [Card::ColonelMustard, Card::Knife, Card::Kitchen],
            &[0, 2],
            None,
            None,
        ))
        .unwrap();
        kb.propagate().unwrap();
        for card in [Card::ColonelMustard, Card::Knife, Card::Kitchen] {
            let locations = kb.candidate_locations(card);
            assert_eq!(
                locations,
                vec![Location::Player(PlayerId(1)), Location::Envelope],
                "{card} should be confined to suggester or envelope"
            );
        }
    }

    /// Independent combinatorial count of worlds for an empty-history
    /// reduced-deck store: envelope choices per category times ways to deal
    /// the remaining cards into the other two hands.
    fn independent_world_count(own_hand: [Card; 2]) -> usize {
        fn choose(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
        }
        let deck = reduced_deck();
        let hand: CardSet = own_hand.into_iter().collect();
        let envelope_choices: usize = Category::ALL
            .into_iter()
            .map(|cat| {
                deck.of_category(cat)
                    .difference(hand.of_category(cat))
                    .len()
            })
            .product();
        // 9 - 2 (hand) - 3 (envelope) = 4 cards across two 2-card hands.
        envelope_choices * choose(4, 2)
    }

    #[test]
    fn world_count_matches_independent_combinatorics() {
        for own_hand in [
            [Card::MissScarlet, Card::Candlestick],
            [Card::MissScarlet, Card::ColonelMustard],
            [Card::Kitchen, Card::Ballroom],
        ] {
            let kb = reduced_kb(own_hand);
            let worlds = kb.enumerate_worlds(DEFAULT_WORLD_CAP).unwrap();
            assert_eq!(worlds.len(), independent_world_count(own_hand));
        }
    }

    #[test]
    fn inconsistent_kb_yields_zero_worlds() {
        // Two undisproved suggestions of the same (suspect, suspect-mate,
        // room) by different suggesters force two suspects into the
        // envelope: unsatisfiable.
        let mut kb = reduced_kb([Card::MissScarlet, Card::Candlestick]);
        kb.ingest(&record(
            1,
            1,
            [Card::ColonelMustard, Card::MrsWhite, Card::Kitchen],
            &[0, 2],
            None,
            None,
        ))
        .unwrap();
        kb.ingest(&record(
            2,
            2,
            [Card::ColonelMustard, Card::MrsWhite, Card::Kitchen],
            &[0, 1],
            None,
            None,
        ))
        .unwrap();
        assert!(kb.enumerate_worlds(DEFAULT_WORLD_CAP).unwrap().is_empty());
    }

    #[test]
    fn fully_determined_kb_has_one_world() {
        // Owner P0 holds Miss Scarlet + Candlestick and has been shown both
        // cards of both opponents; the three leftovers must be the envelope.
        let mut kb = reduced_kb([Card::MissScarlet, Card::Candlestick]);
        kb.ingest(&record(
            1,
            0,
            [Card::ColonelMustard, Card::Knife, Card::Kitchen],
            &[],
            Some(1),
            Some(Card::ColonelMustard),
        ))
        .unwrap();
        kb.ingest(&record(
            2,
            0,
            [Card::MrsWhite, Card::Knife, Card::Kitchen],
            &[],
            Some(1),
            Some(Card::Kitchen),
        ))
        .unwrap();
        kb.ingest(&record(
            3,
            0,
            [Card::MrsWhite, Card::LeadPipe, Card::Ballroom],
            &[1],
            Some(2),
            Some(Card::LeadPipe),
        ))
        .unwrap();
        kb.ingest(&record(
            4,
            0,
            [Card::MrsWhite, Card::Knife, Card::Ballroom],
            &[1],
            Some(2),
            Some(Card::Ballroom),
        ))
        .unwrap();
        kb.propagate().unwrap();
        let worlds = kb.enumerate_worlds(DEFAULT_WORLD_CAP).unwrap();
        assert_eq!(worlds.len(), 1);
        let expected: CardSet = [Card::MrsWhite, Card::Knife, Card::Conservatory]
            .into_iter()
            .collect();
        assert_eq!(worlds[0].envelope(), expected);
        assert_eq!(
            kb.solved_envelope(),
            Some([Card::MrsWhite, Card::Knife, Card::Conservatory])
        );
    }

    #[test]
    fn certain_facts_contain_propagated_pins() {
        let mut kb = reduced_kb([Card::MissScarlet, Card::Candlestick]);
        kb.ingest(&record(
            1,
            1,
            [Card::ColonelMustard, Card::Knife, Card::Kitchen],
            &[0, 2],
            None,
            None,
        ))
        .unwrap();
        let pins = kb.propagate().unwrap();
        let certain = kb.certain_facts(DEFAULT_WORLD_CAP).unwrap();
        for fact in pins {
            assert!(certain.contains(&fact));
        }
        for (card, loc) in kb.known_locations() {
            assert!(certain.contains(&(*card, *loc)));
        }
    }

    #[test]
    fn cap_exceeded_reports_partial_count() {
        let kb = reduced_kb([Card::MissScarlet, Card::Candlestick]);
        let err = kb.enumerate_worlds(10).unwrap_err();
        assert!(matches!(err, DeductionError::CapExceeded { cap: 10, visited } if visited > 10));
    }

    #[test]
    fn classify_claims_filters_duplicates() {
        let mut truth = BTreeMap::new();
        truth.insert(Card::Rope, Location::Player(PlayerId(2)));
        truth.insert(Card::Knife, Location::Envelope);
        truth.insert(Card::Study, Location::Player(PlayerId(0)));
        truth.insert(Card::Hall, Location::Player(PlayerId(3)));
        let ctx = ClaimContext {
            claimant: PlayerId(0),
            ground_truth: &truth,
            claimant_hand: CardSet::single(Card::Study),
            shown_to_claimant: CardSet::single(Card::Hall),
        };
        let claimed: CardSet = [Card::Rope, Card::Knife, Card::Study, Card::Hall]
            .into_iter()
            .collect();
        let (correct, incorrect) = classify_claims(claimed, &ctx);
        assert_eq!(correct, CardSet::single(Card::Rope));
        assert_eq!(incorrect, CardSet::single(Card::Knife));
        // Tally conservation: correct + incorrect + filtered = claimed.
        let filtered = 2;
        assert_eq!(correct.len() + incorrect.len() + filtered, claimed.len());
    }
}
