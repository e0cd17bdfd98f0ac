//! The fixed 21-card roster: six suspects, six weapons, nine rooms.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Card category. Every card belongs to exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Suspect,
    Weapon,
    Room,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Suspect, Category::Weapon, Category::Room];

    pub fn label(self) -> &'static str {
        match self {
            Category::Suspect => "suspect",
            Category::Weapon => "weapon",
            Category::Room => "room",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One of the 21 game cards. Variant order fixes the canonical card index:
/// suspects 0..6, weapons 6..12, rooms 12..21.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Card {
    MissScarlet,
    ColonelMustard,
    MrsWhite,
    MrGreen,
    MrsPeacock,
    ProfessorPlum,
    Candlestick,
    Knife,
    LeadPipe,
    Revolver,
    Rope,
    Wrench,
    Kitchen,
    Ballroom,
    Conservatory,
    DiningRoom,
    BilliardRoom,
    Library,
    Lounge,
    Hall,
    Study,
}

pub const DECK_SIZE: usize = 21;
pub const SUSPECT_COUNT: usize = 6;
pub const WEAPON_COUNT: usize = 6;
pub const ROOM_COUNT: usize = 9;

impl Card {
    pub const ALL: [Card; DECK_SIZE] = [
        Card::MissScarlet,
        Card::ColonelMustard,
        Card::MrsWhite,
        Card::MrGreen,
        Card::MrsPeacock,
        Card::ProfessorPlum,
        Card::Candlestick,
        Card::Knife,
        Card::LeadPipe,
        Card::Revolver,
        Card::Rope,
        Card::Wrench,
        Card::Kitchen,
        Card::Ballroom,
        Card::Conservatory,
        Card::DiningRoom,
        Card::BilliardRoom,
        Card::Library,
        Card::Lounge,
        Card::Hall,
        Card::Study,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Card> {
        Card::ALL.get(index).copied()
    }

    pub fn category(self) -> Category {
        match self.index() {
            0..=5 => Category::Suspect,
            6..=11 => Category::Weapon,
            _ => Category::Room,
        }
    }

    /// Canonical display name, byte-exact across the whole artifact.
    pub fn name(self) -> &'static str {
        match self {
            Card::MissScarlet => "Miss Scarlet",
            Card::ColonelMustard => "Colonel Mustard",
            Card::MrsWhite => "Mrs. White",
            Card::MrGreen => "Mr. Green",
            Card::MrsPeacock => "Mrs. Peacock",
            Card::ProfessorPlum => "Professor Plum",
            Card::Candlestick => "Candlestick",
            Card::Knife => "Knife",
            Card::LeadPipe => "Lead Pipe",
            Card::Revolver => "Revolver",
            Card::Rope => "Rope",
            Card::Wrench => "Wrench",
            Card::Kitchen => "Kitchen",
            Card::Ballroom => "Ballroom",
            Card::Conservatory => "Conservatory",
            Card::DiningRoom => "Dining Room",
            Card::BilliardRoom => "Billiard Room",
            Card::Library => "Library",
            Card::Lounge => "Lounge",
            Card::Hall => "Hall",
            Card::Study => "Study",
        }
    }

    /// Exact canonical-name lookup (used by deserialization).
    pub fn from_name(name: &str) -> Option<Card> {
        Card::ALL.iter().copied().find(|c| c.name() == name)
    }

    pub fn suspects() -> impl Iterator<Item = Card> {
        Card::ALL[0..SUSPECT_COUNT].iter().copied()
    }

    pub fn weapons() -> impl Iterator<Item = Card> {
        Card::ALL[SUSPECT_COUNT..SUSPECT_COUNT + WEAPON_COUNT]
            .iter()
            .copied()
    }

    pub fn rooms() -> impl Iterator<Item = Card> {
        Card::ALL[SUSPECT_COUNT + WEAPON_COUNT..].iter().copied()
    }

    pub fn of_category(category: Category) -> impl Iterator<Item = Card> {
        Card::ALL
            .iter()
            .copied()
            .filter(move |c| c.category() == category)
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

struct CardVisitor;

impl Visitor<'_> for CardVisitor {
    type Value = Card;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a canonical card name")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Card, E> {
        Card::from_name(v).ok_or_else(|| E::custom(format!("unknown card name `{v}`")))
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Card, D::Error> {
        deserializer.deserialize_str(CardVisitor)
    }
}

/// Raised when text does not resolve to any roster card. Upstream this marks
/// a malformed agent response and feeds the reprompt protocol.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown card `{0}`")]
pub struct UnknownCard(pub String);

/// Case-insensitive, whitespace-normalized match against the canonical roster.
///
/// Internal whitespace runs collapse to a single space so `" lead   pipe "`
/// resolves, but punctuation must match the roster spelling exactly.
pub fn parse_card(text: &str) -> Result<Card, UnknownCard> {
    let folded = normalize(text);
    Card::ALL
        .iter()
        .copied()
        .find(|c| normalize(c.name()) == folded)
        .ok_or_else(|| UnknownCard(text.trim().to_string()))
}

fn normalize(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// A set of cards, stored as a 21-bit mask. Iteration order is the canonical
/// card index order, which keeps every downstream serialization deterministic.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardSet(u32);

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);
    const FULL_MASK: u32 = (1 << DECK_SIZE as u32) - 1;

    pub fn new() -> CardSet {
        CardSet(0)
    }

    pub fn full() -> CardSet {
        CardSet(Self::FULL_MASK)
    }

    pub fn single(card: Card) -> CardSet {
        CardSet(1 << card.index())
    }

    pub fn insert(&mut self, card: Card) -> bool {
        let bit = 1 << card.index();
        let added = self.0 & bit == 0;
        self.0 |= bit;
        added
    }

    pub fn remove(&mut self, card: Card) -> bool {
        let bit = 1 << card.index();
        let removed = self.0 & bit != 0;
        self.0 &= !bit;
        removed
    }

    pub fn contains(&self, card: Card) -> bool {
        self.0 & (1 << card.index()) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: CardSet) -> CardSet {
        CardSet(self.0 | other.0)
    }

    pub fn intersection(&self, other: CardSet) -> CardSet {
        CardSet(self.0 & other.0)
    }

    pub fn difference(&self, other: CardSet) -> CardSet {
        CardSet(self.0 & !other.0)
    }

    pub fn is_subset(&self, other: CardSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(&self, other: CardSet) -> bool {
        self.0 & other.0 == 0
    }

    /// The sole member, when the set is a singleton.
    pub fn only(&self) -> Option<Card> {
        if self.len() == 1 {
            Card::from_index(self.0.trailing_zeros() as usize)
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Card> + '_ {
        Card::ALL.iter().copied().filter(move |c| self.contains(*c))
    }

    pub fn of_category(&self, category: Category) -> CardSet {
        self.iter().filter(|c| c.category() == category).collect()
    }

    /// Comma-separated canonical names in index order.
    pub fn to_list_string(&self) -> String {
        self.iter().map(Card::name).collect::<Vec<_>>().join(", ")
    }
}

impl FromIterator<Card> for CardSet {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> CardSet {
        let mut set = CardSet::new();
        for card in iter {
            set.insert(card);
        }
        set
    }
}

impl fmt::Debug for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for CardSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CardSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<CardSet, D::Error> {
        let cards = Vec::<Card>::deserialize(deserializer)?;
        Ok(cards.into_iter().collect())
    }
}

/// The full 21-card deck: 6 suspects, 6 weapons, 9 rooms.
pub fn full_deck() -> CardSet {
    CardSet::full()
}
