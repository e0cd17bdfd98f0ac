//! Frozen copies of the three phase prompt templates, embedded at test
//! authoring time. They guard the shipped assets against drift: the
//! acceptance suite asserts byte equality between these constants and what
//! the engine actually renders around placeholder spans.

pub const PHASE1_REFERENCE: &str = r#"DEDUCTION PHASE: Before you take your turn, carefully analyze the  
game history to deduce what cards other players hold.
Players still in the game: {players}
        + {knowledge}
        + {candidates}
        + {history}
HOW TO DEDUCE:
    - When a player disproves a suggestion of {Suspect, Weapon, Room}, 
      they MUST hold  at least one of those 3 cards.
    - If you already know 2 of the 3 cards in a disproved suggestion 
      are accounted for (in your hand, shown to you, or held by someone 
      else), then the disprover MUST hold the remaining card.
    - If a suggestion was NOT disproved by anyone, the cards not held 
      by the suggester (or by you) must be in the envelope. 
      Remember: the suggester may hold some of those cards themselves.
    - Cross-reference multiple disprovals by the same player to 
      narrow down their cards.
    Unknown cards (not in your hand, seen, or deduced): {unknown_cards}
    Respond in this EXACT format (no markdown):
    ANALYSIS: <step-by-step reasoning about what each disproval tells you, 
               cross-referencing to narrow down cards>
    DEDUCED_CARDS: <comma-separated list of cards you are confident 
                    other players hold (NOT in envelope)> or NONE
"#;

pub const PHASE2_REFERENCE: &str = r#"    It is your turn. Choose a suggestion that maximizes information gain 
    and helps you solve quickly. 
    You can test a deduction, test a combination, or include one of your 
    own cards to narrow other cards.
    If you can accuse confidently, do so this turn.
        + {knowledge}
        + {candidates}
        + {observations}
        + {history}
        + {last_suggestion}
        + {deduction} 
        + {reasoning}
"#;

/// The response-format contract appended to the phase-2 prompt (the
/// reference text for phase 2 does not restate the output format the agents
/// must follow, so the shipped template adds it explicitly).
pub const PHASE2_FORMAT_SUFFIX: &str = r#"    Respond in this EXACT format (no markdown):
    SUMMARY: <1-2 sentence summary>
    REASONING: <step-by-step deduction>
    SUGGESTION: <suspect>, <weapon>, <room>
    ACCUSATION: <suspect>, <weapon>, <room> or NONE
"#;

pub const PHASE3_REFERENCE: &str = r#"Another player ({suggester_name}) has made a suggestion: 
{suggestion.suspect} with {suggestion.weapon} in {suggestion.room}.
You have the following cards that can disprove this suggestion: {cards}
Your show history (cards you have previously shown and to whom): 
{card_history}
Choose ONE card to show to {suggester_name}. 
Consider which card reveals the least new information 
(e.g. a card you have already shown to this player).
Return ONLY:
REASONING: <your reasoning>
SHOW: <exact card name>
"#;
