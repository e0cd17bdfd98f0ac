//! Prompt template assets and placeholder rendering.
//!
//! The three phase templates live as plain-text assets with `{name}`
//! placeholders. Placeholder serialization is fixed here so identical inputs
//! always render byte-identical prompts:
//!
//! * `{players}` — comma-separated display names of active players.
//! * `{knowledge}` — own hand, cards shown to you (with shower), verified
//!   deductions; one line each, `(none)` sentinels.
//! * `{candidates}` — per-category envelope candidates, `[LOCKED]` marker
//!   when a category is down to one.
//! * `{history}` — `History: (none)` or numbered lines
//!   `T<n>. <player> suggested: <suspect>, <weapon>, <room> --> disproved by
//!   <player>` / `--> not disproved`.
//! * `{unknown_cards}` — cards not in hand, seen, or correctly deduced.
//! * `{observations}` — undisproved suggestions and derived definitive
//!   locations.
//! * `{last_suggestion}`, `{deduction}`, `{reasoning}` — prior-turn
//!   suggestion, this turn's deduction outcome, prior-turn reasoning.
//! * Phase 3: `{suggester_name}`, `{suggestion.suspect}`,
//!   `{suggestion.weapon}`, `{suggestion.room}`, `{cards}`, `{card_history}`.
//!
//! Text in braces that names no placeholder (the rule text
//! `{Suspect, Weapon, Room}`) passes through untouched.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::cards::Category;
use crate::deduction::Location;
use crate::events::{Phase, Suggestion};
use crate::view::{PlayerView, ShowRecord};

use super::TurnContext;

pub const NONE_SENTINEL: &str = "(none)";

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("missing context for placeholder `{{{0}}}`")]
    MissingContext(String),
    #[error("failed to load template: {0}")]
    Io(#[from] std::io::Error),
}

/// The three phase templates. `builtin()` embeds the repo assets;
/// `from_dir` loads override files with the same names.
#[derive(Clone, Debug)]
pub struct PromptTemplates {
    phase1: String,
    phase2: String,
    phase3: String,
}

impl PromptTemplates {
    pub fn builtin() -> PromptTemplates {
        PromptTemplates {
            phase1: include_str!("../../assets/phase1_deduction.txt").to_string(),
            phase2: include_str!("../../assets/phase2_action.txt").to_string(),
            phase3: include_str!("../../assets/phase3_show_card.txt").to_string(),
        }
    }

    pub fn from_dir(dir: &Path) -> Result<PromptTemplates, PromptError> {
        Ok(PromptTemplates {
            phase1: fs::read_to_string(dir.join("phase1_deduction.txt"))?,
            phase2: fs::read_to_string(dir.join("phase2_action.txt"))?,
            phase3: fs::read_to_string(dir.join("phase3_show_card.txt"))?,
        })
    }

    pub fn template(&self, phase: Phase) -> &str {
        match phase {
            Phase::Deduce => &self.phase1,
            Phase::Act => &self.phase2,
            Phase::ShowCard => &self.phase3,
        }
    }
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates::builtin()
    }
}

/// Substitutes `{name}` placeholders from `values`. A branch of text is a
/// placeholder only when its name is lowercase snake/dotted; anything else is
/// literal template text.
pub fn render_template(
    template: &str,
    values: &BTreeMap<&str, String>,
) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let after = &rest[start + 1..];
        match after.find('}') {
            Some(end) => {
                let name = &after[..end];
                if is_placeholder_name(name) {
                    match values.get(name) {
                        Some(value) => out.push_str(value),
                        None => return Err(PromptError::MissingContext(name.to_string())),
                    }
                } else {
                    out.push('{');
                    out.push_str(name);
                    out.push('}');
                }
                rest = &after[end + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    Ok(out)
}

fn is_placeholder_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '.')
}

fn list_or_none(items: Vec<String>) -> String {
    if items.is_empty() {
        NONE_SENTINEL.to_string()
    } else {
        items.join(", ")
    }
}

fn players_value(view: &PlayerView) -> String {
    list_or_none(
        view.active_players()
            .iter()
            .map(|p| view.display_name(*p).to_string())
            .collect(),
    )
}

fn knowledge_value(view: &PlayerView) -> String {
    let shown: Vec<String> = view
        .shown_to_me
        .iter()
        .map(|s| format!("{} (by {})", s.card, view.display_name(s.by)))
        .collect();
    let claims: Vec<String> = view.verified_claims.iter().map(|c| c.to_string()).collect();
    format!(
        "Your hand: {}\nCards shown to you: {}\nVerified deductions: {}",
        view.hand.to_list_string(),
        list_or_none(shown),
        list_or_none(claims),
    )
}

fn candidates_value(ctx: &TurnContext) -> String {
    let mut lines = Vec::new();
    for (category, heading) in [
        (Category::Suspect, "Suspect candidates"),
        (Category::Weapon, "Weapon candidates"),
        (Category::Room, "Room candidates"),
    ] {
        let candidates = &ctx.derived.remaining[&category];
        let mut line = format!("{heading}: {}", candidates.to_list_string());
        if ctx.derived.locked.contains_key(&category) {
            line.push_str(" [LOCKED]");
        }
        lines.push(line);
    }
    lines.join("\n")
}

fn history_value(view: &PlayerView) -> String {
    if view.history.is_empty() {
        return format!("History: {NONE_SENTINEL}");
    }
    let mut out = String::from("History:");
    for record in &view.history {
        let disproof = match record.disprover {
            Some(d) => format!("disproved by {}", view.display_name(d)),
            None => "not disproved".to_string(),
        };
        out.push_str(&format!(
            "\nT{}. {} suggested: {} --> {}",
            record.ordinal,
            view.display_name(record.suggester),
            record.triple_string(),
            disproof,
        ));
    }
    out
}

fn unknown_value(ctx: &TurnContext) -> String {
    if ctx.unknown_cards.is_empty() {
        NONE_SENTINEL.to_string()
    } else {
        ctx.unknown_cards.to_list_string()
    }
}

fn observations_value(ctx: &TurnContext) -> String {
    let view = ctx.view;
    let undisproved: Vec<String> = ctx
        .derived
        .undisproved
        .iter()
        .map(|r| {
            format!(
                "T{} ({} by {})",
                r.ordinal,
                r.triple_string(),
                view.display_name(r.suggester)
            )
        })
        .collect();
    let definitive: Vec<String> = ctx
        .derived
        .definitive
        .iter()
        .map(|(card, loc)| match loc {
            Location::Player(p) => format!("{} held by {}", card, view.display_name(*p)),
            Location::Envelope => format!("{card} in the envelope"),
        })
        .collect();
    format!(
        "Undisproved suggestions: {}\nDefinitive locations: {}",
        list_or_none(undisproved),
        list_or_none(definitive),
    )
}

fn last_suggestion_value(view: &PlayerView) -> String {
    match &view.last_suggestion {
        None => format!("Your last suggestion: {NONE_SENTINEL}"),
        Some(s) => {
            let outcome = view
                .history
                .iter()
                .rev()
                .find(|r| r.turn_index == s.turn_index && r.suggester == s.suggester)
                .map(|r| match r.disprover {
                    Some(d) => format!(" (disproved by {})", view.display_name(d)),
                    None => " (not disproved)".to_string(),
                })
                .unwrap_or_default();
            format!("Your last suggestion: {}{}", s.triple_string(), outcome)
        }
    }
}

fn deduction_value(ctx: &TurnContext) -> String {
    match ctx.this_turn_claim {
        None => format!("Deduced this turn: {NONE_SENTINEL}"),
        Some(claim) => {
            let cards = match claim.cards {
                Some(cards) if !cards.is_empty() => cards.to_list_string(),
                _ => "NONE".to_string(),
            };
            let analysis = claim.analysis.replace('\n', " ");
            format!("Deduced this turn: {cards}\nDeduction analysis: {analysis}")
        }
    }
}

fn reasoning_value(view: &PlayerView) -> String {
    match &view.last_reasoning {
        None => format!("Your reasoning from your previous turn: {NONE_SENTINEL}"),
        Some(text) => format!("Your reasoning from your previous turn: {text}"),
    }
}

/// Renders the Phase-1 deduction prompt.
pub fn render_phase1(
    templates: &PromptTemplates,
    ctx: &TurnContext,
) -> Result<String, PromptError> {
    let mut values = BTreeMap::new();
    values.insert("players", players_value(ctx.view));
    values.insert("knowledge", knowledge_value(ctx.view));
    values.insert("candidates", candidates_value(ctx));
    values.insert("history", history_value(ctx.view));
    values.insert("unknown_cards", unknown_value(ctx));
    render_template(templates.template(Phase::Deduce), &values)
}

/// Renders the Phase-2 action prompt.
pub fn render_phase2(
    templates: &PromptTemplates,
    ctx: &TurnContext,
) -> Result<String, PromptError> {
    let mut values = BTreeMap::new();
    values.insert("knowledge", knowledge_value(ctx.view));
    values.insert("candidates", candidates_value(ctx));
    values.insert("observations", observations_value(ctx));
    values.insert("history", history_value(ctx.view));
    values.insert("last_suggestion", last_suggestion_value(ctx.view));
    values.insert("deduction", deduction_value(ctx));
    values.insert("reasoning", reasoning_value(ctx.view));
    render_template(templates.template(Phase::Act), &values)
}

/// Directive appended to the Phase-2 prompt when the round limit forces a
/// final accusation.
pub const FORCED_ACCUSATION_DIRECTIVE: &str = "The round limit has been reached. You MUST make \
your final accusation this turn: ACCUSATION cannot be NONE.";

pub fn render_forced_accusation(
    templates: &PromptTemplates,
    ctx: &TurnContext,
) -> Result<String, PromptError> {
    let mut prompt = render_phase2(templates, ctx)?;
    if !prompt.ends_with('\n') {
        prompt.push('\n');
    }
    prompt.push_str(FORCED_ACCUSATION_DIRECTIVE);
    prompt.push('\n');
    Ok(prompt)
}

/// Renders the Phase-3 show-card prompt.
pub fn render_phase3(
    templates: &PromptTemplates,
    view: &PlayerView,
    suggestion: &Suggestion,
    matching: crate::cards::CardSet,
    show_history: &[ShowRecord],
) -> Result<String, PromptError> {
    let history: Vec<String> = show_history
        .iter()
        .map(|r: &ShowRecord| format!("{} (shown to {})", r.card, view.display_name(r.to)))
        .collect();
    let mut values = BTreeMap::new();
    values.insert(
        "suggester_name",
        view.display_name(suggestion.suggester).to_string(),
    );
    values.insert("suggestion.suspect", suggestion.suspect.to_string());
    values.insert("suggestion.weapon", suggestion.weapon.to_string());
    values.insert("suggestion.room", suggestion.room.to_string());
    values.insert("cards", matching.to_list_string());
    values.insert("card_history", list_or_none(history));
    render_template(templates.template(Phase::ShowCard), &values)
}
