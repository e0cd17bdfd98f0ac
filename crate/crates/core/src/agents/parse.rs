//! Line-oriented, label-anchored parsing of phase responses. Lenient on
//! whitespace and markdown fences, strict on labels and card names.

use thiserror::Error;

use crate::cards::{parse_card, Card, CardSet, Category};
use crate::events::Phase;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing label {0}")]
    MissingLabel(&'static str),
    #[error("empty {0} field")]
    EmptyField(&'static str),
    #[error("unknown card `{0}`")]
    UnknownCard(String),
    #[error("{label} must name {expected}, got {got}")]
    WrongArity {
        label: &'static str,
        expected: &'static str,
        got: String,
    },
}

/// Phase-1 payload: free-form analysis plus claimed cards (`None` = NONE).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeductionClaim {
    pub analysis: String,
    pub cards: Option<CardSet>,
}

impl DeductionClaim {
    pub fn claimed(&self) -> CardSet {
        self.cards.unwrap_or_default()
    }
}

/// Phase-2 payload: a suggestion triple and an optional accusation triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveChoice {
    pub summary: String,
    pub reasoning: String,
    pub suggestion: Triple,
    pub accusation: Option<Triple>,
}

/// Phase-3 payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShowChoice {
    pub reasoning: String,
    pub card: Card,
}

/// One card per category, normalized to (suspect, weapon, room).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    pub suspect: Card,
    pub weapon: Card,
    pub room: Card,
}

impl Triple {
    pub fn cards(&self) -> [Card; 3] {
        [self.suspect, self.weapon, self.room]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedResponse {
    Deduction(DeductionClaim),
    Move(MoveChoice),
    Show(ShowChoice),
}

impl ParsedResponse {
    pub fn phase(&self) -> Phase {
        match self {
            ParsedResponse::Deduction(_) => Phase::Deduce,
            ParsedResponse::Move(_) => Phase::Act,
            ParsedResponse::Show(_) => Phase::ShowCard,
        }
    }
}

/// Parses a raw model response for the given phase.
pub fn parse_phase_response(phase: Phase, text: &str) -> Result<ParsedResponse, ParseError> {
    match phase {
        Phase::Deduce => parse_deduction(text).map(ParsedResponse::Deduction),
        Phase::Act => parse_move(text).map(ParsedResponse::Move),
        Phase::ShowCard => parse_show(text).map(ParsedResponse::Show),
    }
}

pub fn parse_deduction(text: &str) -> Result<DeductionClaim, ParseError> {
    let sections = split_sections(text, &["ANALYSIS", "DEDUCED_CARDS"]);
    let analysis = required(&sections, "ANALYSIS")?;
    let cards_text = required(&sections, "DEDUCED_CARDS")?;
    let cards = if is_none_marker(&cards_text) {
        None
    } else {
        Some(parse_card_list(&cards_text)?)
    };
    Ok(DeductionClaim { analysis, cards })
}

pub fn parse_move(text: &str) -> Result<MoveChoice, ParseError> {
    let sections = split_sections(text, &["SUMMARY", "REASONING", "SUGGESTION", "ACCUSATION"]);
    let summary = required(&sections, "SUMMARY")?;
    let reasoning = required(&sections, "REASONING")?;
    let suggestion = parse_triple(&required(&sections, "SUGGESTION")?, "SUGGESTION")?;
    let accusation_text = required(&sections, "ACCUSATION")?;
    let accusation = if is_none_marker(&accusation_text) {
        None
    } else {
        Some(parse_triple(&accusation_text, "ACCUSATION")?)
    };
    Ok(MoveChoice {
        summary,
        reasoning,
        suggestion,
        accusation,
    })
}

pub fn parse_show(text: &str) -> Result<ShowChoice, ParseError> {
    let sections = split_sections(text, &["REASONING", "SHOW"]);
    let reasoning = required(&sections, "REASONING")?;
    let card_text = required(&sections, "SHOW")?;
    let card = parse_card(&card_text).map_err(|e| ParseError::UnknownCard(e.0))?;
    Ok(ShowChoice { reasoning, card })
}

fn is_none_marker(text: &str) -> bool {
    text.trim().eq_ignore_ascii_case("none")
}

fn parse_card_list(text: &str) -> Result<CardSet, ParseError> {
    let mut cards = CardSet::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        cards.insert(parse_card(item).map_err(|e| ParseError::UnknownCard(e.0))?);
    }
    if cards.is_empty() {
        return Err(ParseError::EmptyField("card list"));
    }
    Ok(cards)
}

/// Parses a 3-card list and normalizes it to one card per category,
/// accepting the cards in any order.
fn parse_triple(text: &str, label: &'static str) -> Result<Triple, ParseError> {
    let items: Vec<&str> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.len() != 3 {
        return Err(ParseError::WrongArity {
            label,
            expected: "exactly 3 cards",
            got: format!("{} item(s)", items.len()),
        });
    }
    let mut suspect = None;
    let mut weapon = None;
    let mut room = None;
    for item in items {
        let card = parse_card(item).map_err(|e| ParseError::UnknownCard(e.0))?;
        let slot = match card.category() {
            Category::Suspect => &mut suspect,
            Category::Weapon => &mut weapon,
            Category::Room => &mut room,
        };
        if slot.is_some() {
            return Err(ParseError::WrongArity {
                label,
                expected: "one card per category",
                got: format!("two {}s", card.category()),
            });
        }
        *slot = Some(card);
    }
    match (suspect, weapon, room) {
        (Some(suspect), Some(weapon), Some(room)) => Ok(Triple {
            suspect,
            weapon,
            room,
        }),
        _ => Err(ParseError::WrongArity {
            label,
            expected: "one card per category",
            got: "a missing category".to_string(),
        }),
    }
}

fn required(
    sections: &[(&'static str, String)],
    label: &'static str,
) -> Result<String, ParseError> {
    let value = sections
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, v)| v.trim().to_string())
        .ok_or(ParseError::MissingLabel(label))?;
    if value.is_empty() {
        return Err(ParseError::EmptyField(label));
    }
    Ok(value)
}

/// Splits text into labeled sections. A section starts at a line whose first
/// token is `LABEL:` (case-insensitive, leading whitespace allowed) and runs
/// until the next label. Markdown fence lines are dropped first.
fn split_sections(text: &str, labels: &[&'static str]) -> Vec<(&'static str, String)> {
    let mut sections: Vec<(&'static str, String)> = Vec::new();
    let mut current: Option<usize> = None;
    for line in text.lines() {
        let trimmed = line.trim_start();
        if trimmed.starts_with("```") {
            continue;
        }
        let mut matched = None;
        for label in labels {
            if let Some(rest) = match_label(trimmed, label) {
                matched = Some((*label, rest));
                break;
            }
        }
        match matched {
            Some((label, rest)) => {
                sections.push((label, rest.to_string()));
                current = Some(sections.len() - 1);
            }
            None => {
                if let Some(i) = current {
                    let entry = &mut sections[i].1;
                    if !entry.is_empty() {
                        entry.push('\n');
                    }
                    entry.push_str(line.trim());
                }
            }
        }
    }
    sections
}

fn match_label<'a>(line: &'a str, label: &str) -> Option<&'a str> {
    if line.len() < label.len() + 1 {
        return None;
    }
    let (head, rest) = line.split_at(label.len());
    if head.eq_ignore_ascii_case(label) {
        rest.strip_prefix(':')
    } else {
        None
    }
}
