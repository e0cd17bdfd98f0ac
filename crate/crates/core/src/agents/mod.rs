//! Pluggable agents: random, perfect-deduction oracle, and LLM-backed, plus
//! the shared decision envelope and the reprompt-then-fallback protocol.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::{Card, CardSet};
use crate::config::{AgentKind, GameConfig, PlayerId};
use crate::deduction::{DerivedInfo, KnowledgeBase};
use crate::events::{Phase, Suggestion};
use crate::gateway::{Gateway, GatewayError};
use crate::view::{PlayerView, ShowRecord};

pub mod llm;
pub mod oracle;
pub mod parse;
pub mod prompts;
pub mod random;

pub use llm::LlmAgent;
pub use oracle::OracleAgent;
pub use parse::{
    parse_phase_response, DeductionClaim, MoveChoice, ParseError, ParsedResponse, ShowChoice,
    Triple,
};
pub use prompts::{PromptError, PromptTemplates};
pub use random::RandomAgent;

/// Attempts an agent gets per phase before the engine substitutes a fallback
/// action.
pub const MAX_ATTEMPTS: u32 = 3;

/// One phase decision: the raw response text, how it parsed, how many
/// attempts it took, and whether the fallback protocol fired. `parsed` is
/// present exactly when the agent did not fall back; it is a parse cache
/// over `raw_text`, so serialization and equality ignore it (replay rebuilds
/// it through the live grammar).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDecision {
    pub phase: Phase,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parsed_summary: Option<String>,
    pub attempts: u32,
    pub fell_back: bool,
    #[serde(skip)]
    pub parsed: Option<ParsedResponse>,
}

impl PartialEq for AgentDecision {
    fn eq(&self, other: &Self) -> bool {
        self.phase == other.phase
            && self.raw_text == other.raw_text
            && self.parsed_summary == other.parsed_summary
            && self.attempts == other.attempts
            && self.fell_back == other.fell_back
    }
}

impl AgentDecision {
    pub fn parsed_ok(
        phase: Phase,
        raw_text: String,
        parsed: ParsedResponse,
        attempts: u32,
    ) -> Self {
        AgentDecision {
            phase,
            raw_text,
            parsed_summary: Some(summarize(&parsed)),
            attempts,
            fell_back: false,
            parsed: Some(parsed),
        }
    }

    pub fn fallback(phase: Phase, raw_text: String) -> Self {
        AgentDecision {
            phase,
            raw_text,
            parsed_summary: None,
            attempts: MAX_ATTEMPTS,
            fell_back: true,
            parsed: None,
        }
    }
}

fn summarize(parsed: &ParsedResponse) -> String {
    match parsed {
        ParsedResponse::Deduction(claim) => match claim.cards {
            Some(cards) => format!("deduced: {}", cards.to_list_string()),
            None => "deduced: NONE".to_string(),
        },
        ParsedResponse::Move(m) => match &m.accusation {
            Some(a) => format!("accuse: {}, {}, {}", a.suspect, a.weapon, a.room),
            None => format!(
                "suggest: {}, {}, {}",
                m.suggestion.suspect, m.suggestion.weapon, m.suggestion.room
            ),
        },
        ParsedResponse::Show(s) => format!("show: {}", s.card),
    }
}

/// Engine-assembled context for the deduce/act phases: the player's view
/// plus precomputed derived information over it.
pub struct TurnContext<'a> {
    pub view: &'a PlayerView,
    pub kb: &'a KnowledgeBase,
    pub derived: &'a DerivedInfo,
    /// Deck minus hand, shown cards, and verified correct claims.
    pub unknown_cards: CardSet,
    /// This turn's deduce-phase outcome, available to the act phase.
    pub this_turn_claim: Option<&'a DeductionClaim>,
}

/// Engine-assembled context for the show-card phase. All `matching` cards
/// are in the agent's hand and in the suggestion.
pub struct ShowRequest<'a> {
    pub view: &'a PlayerView,
    pub suggestion: &'a Suggestion,
    pub matching: CardSet,
    pub show_history: &'a [ShowRecord],
}

/// Unrecoverable agent-infrastructure failure. Malformed output is never an
/// error — the fallback protocol absorbs it — but a broken test fixture or
/// unconfigured backend must surface.
#[derive(Debug, Error)]
pub enum AgentFailure {
    #[error("gateway failure: {0}")]
    Gateway(#[from] GatewayError),
    #[error("prompt rendering failed: {0}")]
    Prompt(#[from] PromptError),
}

/// A seat-bound player. Implementations must be deterministic given their
/// seed and the visible game state.
pub trait Agent {
    fn kind(&self) -> AgentKind;

    /// Phase 1: claim cards other players hold.
    fn deduce(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure>;

    /// Phase 2: pick a suggestion and optionally accuse.
    fn act(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure>;

    /// Phase 3: choose which matching card to reveal. Only called with two
    /// or more matching cards; singletons never reach the agent.
    fn show_card(&mut self, req: &ShowRequest) -> Result<AgentDecision, AgentFailure>;

    /// Round-limit forced final accusation; the decision must carry one.
    fn forced_accusation(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure>;
}

/// Runs the show-card phase: a single matching card is returned without
/// consulting the agent, otherwise the choice is delegated.
pub fn show_card_phase(
    agent: &mut dyn Agent,
    req: &ShowRequest,
) -> Result<AgentDecision, AgentFailure> {
    if let Some(card) = req.matching.only() {
        let raw = format!("REASONING: only one card matches the suggestion\nSHOW: {card}");
        let parsed = ParsedResponse::Show(ShowChoice {
            reasoning: "only one card matches the suggestion".to_string(),
            card,
        });
        return Ok(AgentDecision::parsed_ok(Phase::ShowCard, raw, parsed, 1));
    }
    agent.show_card(req)
}

/// Reveal-least-information heuristic: prefer a card already shown to this
/// suggester, then the card shown most often overall, then category priority
/// (suspect before weapon before room), then canonical order.
pub fn heuristic_show_choice(
    matching: CardSet,
    suggester: PlayerId,
    show_history: &[ShowRecord],
) -> Card {
    let mut best: Option<(bool, usize, Card)> = None;
    for card in matching.iter() {
        let shown_to_suggester = show_history
            .iter()
            .any(|r| r.card == card && r.to == suggester);
        let overall = show_history.iter().filter(|r| r.card == card).count();
        let better = match &best {
            None => true,
            Some((best_shown, best_overall, best_card)) => {
                (shown_to_suggester, overall, std::cmp::Reverse(card.index()))
                    > (
                        *best_shown,
                        *best_overall,
                        std::cmp::Reverse(best_card.index()),
                    )
            }
        };
        if better {
            best = Some((shown_to_suggester, overall, card));
        }
    }
    best.expect("matching set is never empty").2
}

/// Builds the roster of agents for a game. LLM seats need a gateway.
pub fn make_agents(
    config: &GameConfig,
    gateway: Option<Arc<Gateway>>,
    templates: Arc<PromptTemplates>,
) -> Result<Vec<Box<dyn Agent>>, GatewayError> {
    let mut agents: Vec<Box<dyn Agent>> = Vec::with_capacity(config.num_players);
    for (seat, spec) in config.agent_specs.iter().enumerate() {
        let seat = PlayerId(seat);
        match spec.kind {
            AgentKind::Random => agents.push(Box::new(RandomAgent::new(seat, config.seed))),
            AgentKind::Oracle => agents.push(Box::new(OracleAgent::new(seat, config.seed))),
            AgentKind::Llm => {
                let gateway = gateway.clone().ok_or(GatewayError::NotConfigured)?;
                agents.push(Box::new(LlmAgent::new(
                    seat,
                    spec.clone(),
                    gateway,
                    templates.clone(),
                )));
            }
        }
    }
    Ok(agents)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heuristic_prefers_cards_shown_to_suggester() {
        let matching: CardSet = [Card::Rope, Card::Kitchen].into_iter().collect();
        let history = vec![ShowRecord {
            card: Card::Rope,
            to: PlayerId(2),
            turn_index: 4,
        }];
        assert_eq!(
            heuristic_show_choice(matching, PlayerId(2), &history),
            Card::Rope
        );
        // Different suggester: falls through to most-shown-overall, which is
        // still Rope.
        assert_eq!(
            heuristic_show_choice(matching, PlayerId(3), &history),
            Card::Rope
        );
    }

    #[test]
    fn heuristic_breaks_ties_by_category_then_index() {
        let matching: CardSet = [Card::MissScarlet, Card::Rope, Card::Kitchen]
            .into_iter()
            .collect();
        assert_eq!(
            heuristic_show_choice(matching, PlayerId(1), &[]),
            Card::MissScarlet
        );
        let matching: CardSet = [Card::Rope, Card::Kitchen].into_iter().collect();
        assert_eq!(
            heuristic_show_choice(matching, PlayerId(1), &[]),
            Card::Rope
        );
        let matching: CardSet = [Card::Rope, Card::Wrench].into_iter().collect();
        assert_eq!(
            heuristic_show_choice(matching, PlayerId(1), &[]),
            Card::Rope
        );
    }
}
