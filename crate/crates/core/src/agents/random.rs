//! Baseline agent: uniform legal suggestions, claims nothing, accuses only
//! when its own view has eliminated every other candidate.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cards::{Card, CardSet, Category};
use crate::config::{AgentKind, PlayerId};
use crate::events::Phase;
use crate::rng;
use crate::view::PlayerView;

use super::parse::{DeductionClaim, MoveChoice, ParsedResponse, ShowChoice, Triple};
use super::{Agent, AgentDecision, AgentFailure, ShowRequest, TurnContext};

pub struct RandomAgent {
    seat: PlayerId,
    rng: ChaCha8Rng,
}

impl RandomAgent {
    pub fn new(seat: PlayerId, game_seed: u64) -> RandomAgent {
        RandomAgent {
            seat,
            rng: rng::stream(game_seed, &format!("agent:{}", seat.0)),
        }
    }

    fn pick(&mut self, cards: &[Card]) -> Card {
        cards[self.rng.random_range(0..cards.len())]
    }

    fn uniform_triple(&mut self) -> Triple {
        let suspects: Vec<Card> = Card::suspects().collect();
        let weapons: Vec<Card> = Card::weapons().collect();
        let rooms: Vec<Card> = Card::rooms().collect();
        Triple {
            suspect: self.pick(&suspects),
            weapon: self.pick(&weapons),
            room: self.pick(&rooms),
        }
    }
}

/// Envelope candidates a player can justify from direct observation alone:
/// category members minus cards in hand or shown to them.
pub fn direct_elimination_candidates(view: &PlayerView, category: Category) -> CardSet {
    let seen = view.hand.union(view.shown_card_set());
    Card::of_category(category)
        .filter(|c| !seen.contains(*c))
        .collect()
}

/// The envelope triple when direct elimination pins all three categories.
pub fn direct_elimination_triple(view: &PlayerView) -> Option<Triple> {
    let suspect = direct_elimination_candidates(view, Category::Suspect).only()?;
    let weapon = direct_elimination_candidates(view, Category::Weapon).only()?;
    let room = direct_elimination_candidates(view, Category::Room).only()?;
    Some(Triple {
        suspect,
        weapon,
        room,
    })
}

fn move_decision(summary: &str, reasoning: &str, m: MoveChoice) -> AgentDecision {
    let accusation_line = match &m.accusation {
        Some(a) => format!("{}, {}, {}", a.suspect, a.weapon, a.room),
        None => "NONE".to_string(),
    };
    let raw = format!(
        "SUMMARY: {summary}\nREASONING: {reasoning}\nSUGGESTION: {}, {}, {}\nACCUSATION: {accusation_line}",
        m.suggestion.suspect, m.suggestion.weapon, m.suggestion.room,
    );
    AgentDecision::parsed_ok(Phase::Act, raw, ParsedResponse::Move(m), 1)
}

impl Agent for RandomAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Random
    }

    fn deduce(&mut self, _ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let raw = "ANALYSIS: no deduction attempted\nDEDUCED_CARDS: NONE".to_string();
        let parsed = ParsedResponse::Deduction(DeductionClaim {
            analysis: "no deduction attempted".to_string(),
            cards: None,
        });
        Ok(AgentDecision::parsed_ok(Phase::Deduce, raw, parsed, 1))
    }

    fn act(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        if let Some(triple) = direct_elimination_triple(ctx.view) {
            let m = MoveChoice {
                summary: "every other candidate is accounted for".to_string(),
                reasoning: "all but one card per category are in my hand or were shown to me"
                    .to_string(),
                suggestion: triple,
                accusation: Some(triple),
            };
            return Ok(move_decision(
                "every other candidate is accounted for",
                "all but one card per category are in my hand or were shown to me",
                m,
            ));
        }
        let m = MoveChoice {
            summary: "random suggestion".to_string(),
            reasoning: "choosing a suggestion uniformly at random".to_string(),
            suggestion: self.uniform_triple(),
            accusation: None,
        };
        Ok(move_decision(
            "random suggestion",
            "choosing a suggestion uniformly at random",
            m,
        ))
    }

    fn show_card(&mut self, req: &ShowRequest) -> Result<AgentDecision, AgentFailure> {
        let cards: Vec<Card> = req.matching.iter().collect();
        let card = self.pick(&cards);
        let raw = format!("REASONING: picking a matching card at random\nSHOW: {card}");
        let parsed = ParsedResponse::Show(ShowChoice {
            reasoning: "picking a matching card at random".to_string(),
            card,
        });
        Ok(AgentDecision::parsed_ok(Phase::ShowCard, raw, parsed, 1))
    }

    fn forced_accusation(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let mut cards = [Card::MissScarlet; 3];
        for (slot, category) in Category::ALL.into_iter().enumerate() {
            let candidates: Vec<Card> = direct_elimination_candidates(ctx.view, category)
                .iter()
                .collect();
            cards[slot] = if candidates.is_empty() {
                // Degenerate view; fall back to the whole category.
                let all: Vec<Card> = Card::of_category(category).collect();
                self.pick(&all)
            } else {
                self.pick(&candidates)
            };
        }
        let triple = Triple {
            suspect: cards[0],
            weapon: cards[1],
            room: cards[2],
        };
        let m = MoveChoice {
            summary: "forced final accusation".to_string(),
            reasoning: "round limit reached; guessing among unseen candidates".to_string(),
            suggestion: triple,
            accusation: Some(triple),
        };
        Ok(move_decision(
            "forced final accusation",
            "round limit reached; guessing among unseen candidates",
            m,
        ))
    }
}

impl std::fmt::Debug for RandomAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RandomAgent")
            .field("seat", &self.seat)
            .finish()
    }
}
