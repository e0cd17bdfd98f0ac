//! Property tests over the engine's structural invariants.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use cluesim_core::{
    classify_claims, parse_card, rank_players, setup_game, Card, CardSet, Category, ClaimContext,
    GameConfig, Location, PlayerId, RankInput,
};
use common::{random_config, random_specs};

fn arb_card() -> impl Strategy<Value = Card> {
    (0..21usize).prop_map(|i| Card::from_index(i).unwrap())
}

fn arb_card_set() -> impl Strategy<Value = CardSet> {
    (0u32..(1 << 21)).prop_map(|bits| {
        let mut set = CardSet::new();
        for card in Card::ALL {
            if bits & (1 << card.index()) != 0 {
                set.insert(card);
            }
        }
        set
    })
}

proptest! {
    /// Hands are pairwise disjoint, disjoint from the solution, and their
    /// union with the solution is the full deck, for every seed, player
    /// count, and starting seat.
    #[test]
    fn deal_partitions_deck(seed in any::<u64>(), players in 2usize..=18, start in 0usize..18) {
        let mut config = GameConfig::new(seed, random_specs(players));
        config.starting_seat = start % players;
        let (solution, hands, _) = setup_game(&config).unwrap();
        let mut union = solution.card_set();
        prop_assert_eq!(union.len(), 3);
        for hand in &hands {
            prop_assert!(union.is_disjoint(hand.cards));
            prop_assert!(!hand.cards.is_empty());
            union = union.union(hand.cards);
        }
        prop_assert_eq!(union, cluesim_core::full_deck());
    }

    /// Identical seeds and configs deal identically.
    #[test]
    fn deal_is_deterministic(seed in any::<u64>(), players in 2usize..=18) {
        let config = GameConfig::new(seed, random_specs(players));
        let (s1, h1, _) = setup_game(&config).unwrap();
        let (s2, h2, _) = setup_game(&config).unwrap();
        prop_assert_eq!(s1, s2);
        prop_assert_eq!(h1, h2);
    }

    /// parse_card is insensitive to case and whitespace runs.
    #[test]
    fn parse_card_survives_mangling(card in arb_card(), upper in any::<bool>(), pad in 0usize..4) {
        let mut text = card.name().to_string();
        if upper {
            text = text.to_uppercase();
        } else {
            text = text.to_lowercase();
        }
        let padding = " ".repeat(pad + 1);
        let mangled = format!("{padding}{}{padding}", text.replace(' ', &padding));
        prop_assert_eq!(parse_card(&mangled).unwrap(), card);
    }

    /// Ranks are a permutation of 1..=n and invariant under input order.
    #[test]
    fn ranks_form_permutation(
        accuracies in proptest::collection::vec(proptest::option::of(0u8..=3), 2..10),
        rounds in proptest::collection::vec(proptest::option::of(1u32..=30), 2..10),
        solver in proptest::option::of(0usize..10),
    ) {
        let n = accuracies.len().min(rounds.len());
        let inputs: Vec<RankInput> = (0..n)
            .map(|seat| RankInput {
                player: PlayerId(seat),
                solved_position: solver.filter(|s| *s == seat).map(|_| 0),
                accuracy: accuracies[seat],
                accusation_round: rounds[seat],
            })
            .collect();
        let ranks = rank_players(&inputs);
        let mut sorted: Vec<u32> = ranks.iter().map(|(_, r)| *r).collect();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (1..=n as u32).collect::<Vec<_>>());

        let mut reversed = inputs.clone();
        reversed.reverse();
        let mut a = ranks;
        let mut b = rank_players(&reversed);
        a.sort_by_key(|(p, _)| p.0);
        b.sort_by_key(|(p, _)| p.0);
        prop_assert_eq!(a, b);
    }

    /// Claim grading conserves cards: correct, incorrect, and filtered
    /// duplicates partition the claim set.
    #[test]
    fn claim_grading_conserves(claimed in arb_card_set(), seed in any::<u64>(), claimant in 0usize..6) {
        let config = random_config(seed, 6);
        let (solution, hands, _) = setup_game(&config).unwrap();
        let mut truth = BTreeMap::new();
        for card in solution.cards() {
            truth.insert(card, Location::Envelope);
        }
        for hand in &hands {
            for card in hand.cards.iter() {
                truth.insert(card, Location::Player(hand.owner));
            }
        }
        let claimant = PlayerId(claimant);
        // Treat one opponent card as already shown.
        let shown: CardSet = hands[(claimant.0 + 1) % 6].cards.iter().take(1).collect();
        let ctx = ClaimContext {
            claimant,
            ground_truth: &truth,
            claimant_hand: hands[claimant.0].cards,
            shown_to_claimant: shown,
        };
        let (correct, incorrect) = classify_claims(claimed, &ctx);
        let duplicates = claimed.intersection(hands[claimant.0].cards.union(shown));
        prop_assert!(correct.is_disjoint(incorrect));
        prop_assert!(correct.union(incorrect).is_disjoint(duplicates));
        prop_assert_eq!(correct.len() + incorrect.len() + duplicates.len(), claimed.len());
        // Correct claims sit in opponents' hands; incorrect ones in the
        // envelope.
        for card in correct.iter() {
            prop_assert!(matches!(truth.get(&card), Some(Location::Player(p)) if *p != claimant));
        }
        for card in incorrect.iter() {
            prop_assert_eq!(truth.get(&card), Some(&Location::Envelope));
        }
    }

    /// Knowledge stores built from honest reduced-deck histories stay
    /// consistent: the ground-truth world is always enumerated and
    /// propagation never pins a fact outside the certain set.
    #[test]
    fn honest_history_stays_consistent(seed in any::<u64>()) {
        use cluesim_core::{KnowledgeBase, SuggestionRecord, World, DEFAULT_WORLD_CAP};
        use rand::Rng;

        let deck: CardSet = [
            Card::MissScarlet, Card::ColonelMustard, Card::MrsWhite,
            Card::Candlestick, Card::Knife, Card::LeadPipe,
            Card::Kitchen, Card::Ballroom, Card::Conservatory,
        ].into_iter().collect();
        let mut rng = cluesim_core::rng::stream(seed, "property");

        let mut solution = Vec::new();
        for category in Category::ALL {
            let cards: Vec<Card> = deck.of_category(category).iter().collect();
            solution.push(cards[rng.random_range(0..cards.len())]);
        }
        let envelope: CardSet = solution.iter().copied().collect();
        let mut rest: Vec<Card> = deck.difference(envelope).iter().collect();
        for i in (1..rest.len()).rev() {
            let j = rng.random_range(0..=i);
            rest.swap(i, j);
        }
        let hands: Vec<CardSet> =
            (0..3).map(|p| [rest[2 * p], rest[2 * p + 1]].into_iter().collect()).collect();
        let owner = PlayerId(rng.random_range(0..3));
        let mut kb = KnowledgeBase::new(owner, deck, vec![2, 2, 2], hands[owner.0]).unwrap();

        for ordinal in 0..rng.random_range(0..8u32) {
            let suggester = PlayerId(rng.random_range(0..3));
            let mut cards = [Card::MissScarlet; 3];
            for (slot, category) in Category::ALL.into_iter().enumerate() {
                let of_cat: Vec<Card> = deck.of_category(category).iter().collect();
                cards[slot] = of_cat[rng.random_range(0..of_cat.len())];
            }
            let triple: CardSet = cards.into_iter().collect();
            let mut passers = Vec::new();
            let mut disprover = None;
            let mut shown = None;
            for offset in 1..3 {
                let seat = PlayerId((suggester.0 + offset) % 3);
                let matching: Vec<Card> = hands[seat.0].intersection(triple).iter().collect();
                if matching.is_empty() {
                    passers.push(seat);
                } else {
                    disprover = Some(seat);
                    shown = Some(matching[rng.random_range(0..matching.len())]);
                    break;
                }
            }
            kb.ingest(&SuggestionRecord {
                ordinal: ordinal + 1,
                round: 1,
                turn_index: u64::from(ordinal),
                suggester,
                suspect: cards[0],
                weapon: cards[1],
                room: cards[2],
                passers,
                disprover,
                shown_to_me: if suggester == owner { shown } else { None },
            }).expect("honest history ingests");
        }

        let worlds = kb.enumerate_worlds(DEFAULT_WORLD_CAP).expect("within cap");
        let mut truth = BTreeMap::new();
        for card in envelope.iter() {
            truth.insert(card, Location::Envelope);
        }
        for (seat, hand) in hands.iter().enumerate() {
            for card in hand.iter() {
                truth.insert(card, Location::Player(PlayerId(seat)));
            }
        }
        prop_assert!(worlds.contains(&World::from_assignments(truth)));

        let certain = kb.certain_facts(DEFAULT_WORLD_CAP).expect("consistent");
        let mut propagated = kb.clone();
        propagated.propagate().expect("consistent");
        for (card, loc) in propagated.known_locations() {
            prop_assert!(certain.contains(&(*card, *loc)));
        }
    }
}
