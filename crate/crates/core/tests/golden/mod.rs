//! The scripted 12-game mock tournament behind the metrics golden test, and
//! its hand-computed expected outputs.
//!
//! Per game (starting seat `s`, rotating): every round-1 turn suggests the
//! solution triple (nobody can disprove it, so no show phases fire), with
//! scripted deductions at fixed offsets from `s`:
//!
//! * seat `s+1`: claims two cards from seat `s`'s hand (2 correct);
//! * seat `s+2`: claims the third card of `s`'s hand plus the envelope
//!   suspect (1 correct, 1 incorrect);
//! * seat `s+3`: three unparseable responses (1 fallback, claims nothing);
//! * everyone else: NONE.
//!
//! In round 2 seat `s` accuses the solution and wins. Every quantity in the
//! report is therefore computable by the plain arithmetic in
//! `expected_outputs`, which never calls the metrics pipeline.

use cluesim_core::agents::parse::MoveChoice;
use cluesim_core::{
    setup_game, AgentSpec, Card, GameConfig, MockExchange, MockFixture, TournamentSpec,
};

use crate::common::{move_raw, solution_triple};

pub const GAMES: usize = 12;
pub const SEATS: usize = 6;

/// Seat -> model label: two seats each for two base models, one seat each
/// for two fine-tuned variants (four labels).
pub const SEAT_MODELS: [&str; SEATS] = [
    "gpt-4o-mini",
    "gpt-4o-mini",
    "gemini-2.5-flash",
    "gemini-2.5-flash",
    "gpt-4o-mini-ft",
    "gemini-2.5-flash-ft",
];

pub const SEAT_NAMES: [&str; SEATS] = [
    "GPT4O_MINI_1",
    "GPT4O_MINI_2",
    "GEMINI_FLASH_1",
    "GEMINI_FLASH_2",
    "GPT4O_MINI_FT_1",
    "GEMINI_FLASH_FT_1",
];

pub struct GamePlan {
    pub starting_seat: usize,
}

pub struct Plan {
    pub spec: TournamentSpec,
    pub fixture: MockFixture,
    pub games: Vec<GamePlan>,
}

fn garbage() -> String {
    "Let me think about what everyone is holding.".to_string()
}

fn deduce_response(cards: &[Card]) -> String {
    if cards.is_empty() {
        "ANALYSIS: nothing certain yet\nDEDUCED_CARDS: NONE".to_string()
    } else {
        let list: Vec<String> = cards.iter().map(|c| c.to_string()).collect();
        format!(
            "ANALYSIS: cross-referencing disprovals\nDEDUCED_CARDS: {}",
            list.join(", ")
        )
    }
}

pub fn plan() -> Plan {
    let specs: Vec<AgentSpec> = SEAT_MODELS
        .iter()
        .zip(SEAT_NAMES.iter())
        .map(|(model, name)| AgentSpec::llm(*model, *name))
        .collect();
    let base = GameConfig::new(99, specs);
    let spec = TournamentSpec::new("golden12", GAMES as u32, base);

    let mut games = Vec::with_capacity(GAMES);
    let mut transcripts = Vec::with_capacity(GAMES);
    for index in 0..GAMES {
        let config = spec.game_config(index as u32);
        let (solution, hands, _) = setup_game(&config).expect("valid golden config");
        let s = config.starting_seat;
        let source_cards: Vec<Card> = hands[s].cards.iter().collect();

        let mut exchanges = Vec::new();
        let suggest = move_raw(&MoveChoice {
            summary: "probe the envelope".into(),
            reasoning: "suggesting my current best envelope guess".into(),
            suggestion: solution_triple(&solution),
            accusation: None,
        });
        for offset in 0..SEATS {
            let seat = (s + offset) % SEATS;
            if offset == 3 {
                for _ in 0..3 {
                    exchanges.push(MockExchange::new("DEDUCTION PHASE", garbage()));
                }
            } else {
                let cards: Vec<Card> = match offset {
                    1 => source_cards[0..2].to_vec(),
                    2 => vec![source_cards[2], solution.suspect],
                    _ => vec![],
                };
                exchanges.push(MockExchange::new(
                    "DEDUCTION PHASE",
                    deduce_response(&cards),
                ));
            }
            let _ = seat;
            exchanges.push(MockExchange::new("It is your turn", suggest.clone()));
        }
        // Round 2: the starting seat accuses the solution.
        exchanges.push(MockExchange::new("DEDUCTION PHASE", deduce_response(&[])));
        exchanges.push(MockExchange::new(
            "It is your turn",
            move_raw(&MoveChoice {
                summary: "accusing".into(),
                reasoning: "the envelope is settled".into(),
                suggestion: solution_triple(&solution),
                accusation: Some(solution_triple(&solution)),
            }),
        ));

        transcripts.push(exchanges);
        games.push(GamePlan { starting_seat: s });
    }

    Plan {
        spec,
        fixture: MockFixture::PerGame { games: transcripts },
        games,
    }
}

pub struct Expected {
    pub summary_csv: String,
    pub heatmap_csv: String,
    pub curves_csv: String,
}

/// Hand-computed report bytes: plain loops over the scripted scenario, no
/// calls into the metrics pipeline.
pub fn expected_outputs(plan: &Plan) -> Expected {
    // Per seat per game: (rank, accuracy, ded_correct, ded_incorrect,
    // fallbacks, series).
    let mut rank = [[0u32; GAMES]; SEATS];
    let mut accuracy = [[0u8; GAMES]; SEATS];
    let mut ded_correct = [[0u32; GAMES]; SEATS];
    let mut ded_incorrect = [[0u32; GAMES]; SEATS];
    let mut fallbacks = [[0u32; GAMES]; SEATS];
    let mut series = vec![vec![[3u32; 3]; GAMES]; SEATS];
    let mut wins_by_seat = [0u32; SEATS];

    for (k, game) in plan.games.iter().enumerate() {
        let s = game.starting_seat;
        wins_by_seat[s] += 1;
        accuracy[s][k] = 3;

        // Winner ranks 1; everyone else never accused, so they tie at
        // accuracy 0 / no round and fall back to seat order.
        rank[s][k] = 1;
        let mut next = 2;
        for seat in 0..SEATS {
            if seat != s {
                rank[seat][k] = next;
                next += 1;
            }
        }

        let claim2 = (s + 1) % SEATS;
        let claim11 = (s + 2) % SEATS;
        let fallback_seat = (s + 3) % SEATS;
        ded_correct[claim2][k] = 2;
        ded_correct[claim11][k] = 1;
        ded_incorrect[claim11][k] = 1;
        fallbacks[fallback_seat][k] = 1;
        series[claim2][k] = [3, 5, 5];
        series[claim11][k] = [3, 4, 4];
    }

    // Label aggregation in first-appearance seat order.
    let mut labels: Vec<&str> = Vec::new();
    for model in SEAT_MODELS {
        if !labels.contains(&model) {
            labels.push(model);
        }
    }

    let mut summary = String::from(
        "label,wins,mean_rank,mean_acc_norm,ded_correct_mean,ded_incorrect_mean,fallbacks_mean\n",
    );
    for label in &labels {
        let seats: Vec<usize> = (0..SEATS)
            .filter(|seat| SEAT_MODELS[*seat] == *label)
            .collect();
        let samples = (seats.len() * GAMES) as f64;
        let wins: u32 = seats.iter().map(|s| wins_by_seat[*s]).sum();
        let mean_rank: f64 = seats
            .iter()
            .flat_map(|s| rank[*s].iter().map(|r| f64::from(*r)))
            .sum::<f64>()
            / samples;
        let mean_acc: f64 = seats
            .iter()
            .flat_map(|s| accuracy[*s].iter().map(|a| f64::from(*a) / 3.0))
            .sum::<f64>()
            / samples;
        let mean_correct: f64 = seats
            .iter()
            .flat_map(|s| ded_correct[*s].iter().map(|d| f64::from(*d)))
            .sum::<f64>()
            / samples;
        let mean_incorrect: f64 = seats
            .iter()
            .flat_map(|s| ded_incorrect[*s].iter().map(|d| f64::from(*d)))
            .sum::<f64>()
            / samples;
        let mean_fallbacks: f64 = seats
            .iter()
            .flat_map(|s| fallbacks[*s].iter().map(|f| f64::from(*f)))
            .sum::<f64>()
            / samples;
        summary.push_str(&format!(
            "{label},{wins},{mean_rank:.6},{mean_acc:.6},{mean_correct:.6},{mean_incorrect:.6},{mean_fallbacks:.6}\n"
        ));
    }

    let mut heatmap = String::from("display_name,label");
    for game in 1..=GAMES {
        heatmap.push_str(&format!(",game_{game}"));
    }
    heatmap.push('\n');
    for seat in 0..SEATS {
        heatmap.push_str(&format!("{},{}", SEAT_NAMES[seat], SEAT_MODELS[seat]));
        for k in 0..GAMES {
            heatmap.push_str(&format!(",{}", accuracy[seat][k]));
        }
        heatmap.push('\n');
    }

    let mut curves = String::from("label,round_0,round_1,round_2\n");
    for label in &labels {
        let seats: Vec<usize> = (0..SEATS)
            .filter(|seat| SEAT_MODELS[*seat] == *label)
            .collect();
        let samples = (seats.len() * GAMES) as f64;
        curves.push_str(label);
        for round in 0..3 {
            let total: f64 = seats
                .iter()
                .flat_map(|s| series[*s].iter().map(|g| f64::from(g[round])))
                .sum();
            curves.push_str(&format!(",{:.6}", total / samples));
        }
        curves.push('\n');
    }

    Expected {
        summary_csv: summary,
        heatmap_csv: heatmap,
        curves_csv: curves,
    }
}
