use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cluesim_bench::{play, random_config};
use cluesim_core::{KnowledgeBase, PlayerId, DEFAULT_WORLD_CAP};

fn kb_from_final_view(seed: u64, seat: usize) -> KnowledgeBase {
    let game = play(&random_config(seed));
    // Rebuild the player's final view from the log records.
    let mut views: Vec<cluesim_core::SuggestionRecord> = Vec::new();
    let mut ordinal = 0;
    for record in &game.records {
        if let cluesim_core::GameEvent::SuggestionMade {
            turn_index,
            suggestion,
            outcome,
        } = &record.event
        {
            ordinal += 1;
            views.push(cluesim_core::SuggestionRecord {
                ordinal,
                round: suggestion.round,
                turn_index: *turn_index,
                suggester: suggestion.suggester,
                suspect: suggestion.suspect,
                weapon: suggestion.weapon,
                room: suggestion.room,
                passers: outcome.passers.clone(),
                disprover: outcome.disprover,
                shown_to_me: if suggestion.suggester == PlayerId(seat) {
                    outcome.shown_card
                } else {
                    None
                },
            });
        }
    }
    let hand_sizes: Vec<usize> = game.hands.iter().map(|h| h.cards.len()).collect();
    let mut kb = KnowledgeBase::new(
        PlayerId(seat),
        cluesim_core::full_deck(),
        hand_sizes,
        game.hands[seat].cards,
    )
    .expect("valid knowledge base");
    for record in &views {
        kb.ingest(record).expect("consistent history");
    }
    kb
}

fn propagation(c: &mut Criterion) {
    let kb = kb_from_final_view(7, 2);
    c.bench_function("propagate_full_game_history", |b| {
        b.iter(|| {
            let mut kb = kb.clone();
            black_box(kb.propagate().expect("consistent"))
        })
    });
}

fn world_enumeration(c: &mut Criterion) {
    let kb = kb_from_final_view(7, 2);
    c.bench_function("enumerate_worlds_endgame", |b| {
        b.iter(|| {
            black_box(
                kb.enumerate_worlds(DEFAULT_WORLD_CAP)
                    .expect("within cap")
                    .len(),
            )
        })
    });
}

criterion_group!(benches, propagation, world_enumeration);
criterion_main!(benches);
