//! Perfect-deduction agent. Its claims come straight from the knowledge
//! base, its accusations are certainty-gated, and its suggestions probe the
//! cards it knows least about.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cards::{Card, CardSet, Category};
use crate::config::{AgentKind, PlayerId};
use crate::deduction::{KnowledgeBase, Location, World, DEFAULT_WORLD_CAP};
use crate::events::Phase;
use crate::rng;

use super::parse::{DeductionClaim, MoveChoice, ParsedResponse, ShowChoice, Triple};
use super::{heuristic_show_choice, Agent, AgentDecision, AgentFailure, ShowRequest, TurnContext};

/// Only enumerate worlds once this few cards remain unplaced; earlier the
/// state space dwarfs any useful cap.
const ENUMERATE_UNKNOWN_LIMIT: usize = 12;
/// Skip the suggestion minimax when more worlds than this survive.
const POLICY_WORLD_LIMIT: usize = 4000;
/// Candidate suggestion pool size.
const POOL_SIZE: usize = 24;

/// Certain facts plus, when few enough, the full world sample.
type EnumerationSummary = (Vec<(Card, Location)>, Option<Vec<World>>);

pub struct OracleAgent {
    seat: PlayerId,
    rng: ChaCha8Rng,
    world_cap: u64,
}

impl OracleAgent {
    pub fn new(seat: PlayerId, game_seed: u64) -> OracleAgent {
        OracleAgent {
            seat,
            rng: rng::stream(game_seed, &format!("agent:{}", seat.0)),
            world_cap: DEFAULT_WORLD_CAP,
        }
    }

    /// Enumeration pass shared by all phases: certain facts plus up to
    /// `POLICY_WORLD_LIMIT` sample worlds, or `None` when the state space is
    /// still too large to close.
    fn enumerate(&self, kb: &KnowledgeBase) -> Option<EnumerationSummary> {
        if kb.unknown_count() > ENUMERATE_UNKNOWN_LIMIT {
            return None;
        }
        let mut worlds: Vec<BTreeMap<Card, Location>> = Vec::new();
        let mut overflow = false;
        let mut common: Option<BTreeMap<Card, Location>> = None;
        let result = kb.visit_worlds(self.world_cap, &mut |assignments| {
            match &mut common {
                None => common = Some(assignments.clone()),
                Some(facts) => facts.retain(|card, loc| assignments.get(card) == Some(loc)),
            }
            if worlds.len() < POLICY_WORLD_LIMIT {
                worlds.push(assignments.clone());
            } else {
                overflow = true;
            }
        });
        match (result, common) {
            (Ok(_), Some(common)) => {
                let worlds =
                    (!overflow).then(|| worlds.into_iter().map(World::from_assignments).collect());
                Some((common.into_iter().collect(), worlds))
            }
            _ => None,
        }
    }

    /// Cards known to sit in an opponent's hand, by the strongest engine
    /// available: world intersection when affordable, propagation pins
    /// otherwise.
    fn opponent_facts(
        &self,
        ctx: &TurnContext,
    ) -> (CardSet, Option<[Card; 3]>, Option<Vec<World>>) {
        if let Some((facts, worlds)) = self.enumerate(ctx.kb) {
            let mut held = CardSet::new();
            let mut envelope: BTreeMap<Category, Card> = BTreeMap::new();
            for (card, loc) in facts {
                match loc {
                    Location::Player(p) if p != self.seat => {
                        held.insert(card);
                    }
                    Location::Envelope => {
                        envelope.insert(card.category(), card);
                    }
                    _ => {}
                }
            }
            let solved = (envelope.len() == Category::ALL.len()).then(|| {
                [
                    envelope[&Category::Suspect],
                    envelope[&Category::Weapon],
                    envelope[&Category::Room],
                ]
            });
            (held, solved, worlds)
        } else {
            (ctx.kb.opponent_held(), ctx.kb.solved_envelope(), None)
        }
    }

    /// Candidate cards worth probing in a category: envelope candidates not
    /// yet pinned, ordered by how rarely they have been suggested.
    fn probes(&self, ctx: &TurnContext, category: Category) -> Vec<Card> {
        let kb = ctx.kb;
        let mut counts: BTreeMap<Card, usize> = BTreeMap::new();
        for record in &ctx.view.history {
            for card in record.cards() {
                *counts.entry(card).or_insert(0) += 1;
            }
        }
        let mut cards: Vec<Card> = ctx
            .derived
            .remaining
            .get(&category)
            .map(|set| {
                set.iter()
                    .filter(|c| kb.location_of(*c).is_none())
                    .collect()
            })
            .unwrap_or_default();
        if cards.is_empty() {
            cards = ctx.derived.remaining[&category].iter().collect();
        }
        if cards.is_empty() {
            cards = Card::of_category(category).collect();
        }
        cards.sort_by_key(|c| (counts.get(c).copied().unwrap_or(0), c.index()));
        cards
    }

    fn build_pool(&mut self, ctx: &TurnContext) -> Vec<Triple> {
        let suspects = self.probes(ctx, Category::Suspect);
        let weapons = self.probes(ctx, Category::Weapon);
        let rooms = self.probes(ctx, Category::Room);
        let mut pool = Vec::new();
        let push = |pool: &mut Vec<Triple>, t: Triple| {
            if !pool.contains(&t) {
                pool.push(t);
            }
        };

        // Freshest probe per category leads the pool; it doubles as the
        // heuristic choice when the minimax is unaffordable.
        push(
            &mut pool,
            Triple {
                suspect: suspects[0],
                weapon: weapons[0],
                room: rooms[0],
            },
        );

        // Variants that keep one of our own cards in the triple: a disproof
        // then concentrates on the other two cards.
        let own = ctx.view.hand;
        for (category, list) in [
            (Category::Suspect, &suspects),
            (Category::Weapon, &weapons),
            (Category::Room, &rooms),
        ] {
            let _ = list;
            if let Some(mine) = own.of_category(category).iter().next() {
                let mut t = Triple {
                    suspect: suspects[0],
                    weapon: weapons[0],
                    room: rooms[0],
                };
                match category {
                    Category::Suspect => t.suspect = mine,
                    Category::Weapon => t.weapon = mine,
                    Category::Room => t.room = mine,
                }
                push(&mut pool, t);
            }
        }

        while pool.len() < POOL_SIZE {
            let t = Triple {
                suspect: suspects[self.rng.random_range(0..suspects.len())],
                weapon: weapons[self.rng.random_range(0..weapons.len())],
                room: rooms[self.rng.random_range(0..rooms.len())],
            };
            if !pool.contains(&t) {
                pool.push(t);
            } else if pool.len() >= suspects.len() * weapons.len() * rooms.len() {
                break;
            }
        }
        pool
    }

    /// Adversarial outcome split: the largest world group consistent with
    /// any single observable outcome of suggesting `triple`.
    fn worst_case(&self, triple: &Triple, worlds: &[World], num_players: usize) -> usize {
        let mut groups: BTreeMap<(usize, Option<usize>), usize> = BTreeMap::new();
        let cards = triple.cards();
        for world in worlds {
            let mut disproved = false;
            for offset in 1..num_players {
                let seat = PlayerId((self.seat.0 + offset) % num_players);
                let matching: Vec<Card> = cards
                    .iter()
                    .copied()
                    .filter(|c| world.location_of(*c) == Some(Location::Player(seat)))
                    .collect();
                if !matching.is_empty() {
                    for card in matching {
                        *groups.entry((seat.0, Some(card.index()))).or_insert(0) += 1;
                    }
                    disproved = true;
                    break;
                }
            }
            if !disproved {
                *groups.entry((usize::MAX, None)).or_insert(0) += 1;
            }
        }
        groups.values().copied().max().unwrap_or(0)
    }

    fn accusation_move(triple: [Card; 3], forced: bool) -> MoveChoice {
        let triple = Triple {
            suspect: triple[0],
            weapon: triple[1],
            room: triple[2],
        };
        MoveChoice {
            summary: if forced {
                "forced final accusation from the strongest consistent world".to_string()
            } else {
                "the envelope is fully determined".to_string()
            },
            reasoning: if forced {
                "round limit reached; accusing the best-supported envelope triple".to_string()
            } else {
                "every consistent world agrees on the envelope triple".to_string()
            },
            suggestion: triple,
            accusation: Some(triple),
        }
    }

    fn move_decision(m: MoveChoice) -> AgentDecision {
        let accusation_line = match &m.accusation {
            Some(a) => format!("{}, {}, {}", a.suspect, a.weapon, a.room),
            None => "NONE".to_string(),
        };
        let raw = format!(
            "SUMMARY: {}\nREASONING: {}\nSUGGESTION: {}, {}, {}\nACCUSATION: {}",
            m.summary,
            m.reasoning.replace('\n', " "),
            m.suggestion.suspect,
            m.suggestion.weapon,
            m.suggestion.room,
            accusation_line,
        );
        AgentDecision::parsed_ok(Phase::Act, raw, ParsedResponse::Move(m), 1)
    }
}

impl Agent for OracleAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Oracle
    }

    fn deduce(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let (held, _, _) = self.opponent_facts(ctx);
        let new_claims = held.intersection(ctx.unknown_cards);
        let (cards, analysis) = if new_claims.is_empty() {
            (
                None,
                "no new opponent cards are entailed by the history".to_string(),
            )
        } else {
            (
                Some(new_claims),
                "constraint propagation over the suggestion history pins these cards in \
                 opponents' hands"
                    .to_string(),
            )
        };
        let list = match cards {
            Some(set) => set.to_list_string(),
            None => "NONE".to_string(),
        };
        let raw = format!("ANALYSIS: {analysis}\nDEDUCED_CARDS: {list}");
        let parsed = ParsedResponse::Deduction(DeductionClaim { analysis, cards });
        Ok(AgentDecision::parsed_ok(Phase::Deduce, raw, parsed, 1))
    }

    fn act(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let (_, solved, worlds) = self.opponent_facts(ctx);
        if let Some(triple) = solved {
            return Ok(Self::move_decision(Self::accusation_move(triple, false)));
        }
        let pool = self.build_pool(ctx);
        let suggestion = match worlds {
            Some(worlds) if worlds.len() >= 2 => pool
                .iter()
                .copied()
                .min_by_key(|t| self.worst_case(t, &worlds, ctx.view.num_players))
                .unwrap_or(pool[0]),
            _ => pool[0],
        };
        let m = MoveChoice {
            summary: "probe the least-constrained candidates".to_string(),
            reasoning: "suggesting cards whose location is still open maximizes what any \
                        disproof or pass reveals"
                .to_string(),
            suggestion,
            accusation: None,
        };
        Ok(Self::move_decision(m))
    }

    fn show_card(&mut self, req: &ShowRequest) -> Result<AgentDecision, AgentFailure> {
        let card = heuristic_show_choice(req.matching, req.suggestion.suggester, req.show_history);
        let reasoning = "revealing the card that leaks the least new information".to_string();
        let raw = format!("REASONING: {reasoning}\nSHOW: {card}");
        let parsed = ParsedResponse::Show(ShowChoice { reasoning, card });
        Ok(AgentDecision::parsed_ok(Phase::ShowCard, raw, parsed, 1))
    }

    fn forced_accusation(&mut self, ctx: &TurnContext) -> Result<AgentDecision, AgentFailure> {
        let (_, solved, worlds) = self.opponent_facts(ctx);
        let triple = if let Some(triple) = solved {
            triple
        } else if let Some(worlds) = worlds.filter(|w| !w.is_empty()) {
            // Modal envelope card per category across sampled worlds.
            let mut counts: BTreeMap<(Category, Card), usize> = BTreeMap::new();
            for world in &worlds {
                for card in world.envelope().iter() {
                    *counts.entry((card.category(), card)).or_insert(0) += 1;
                }
            }
            let modal = |category: Category| {
                counts
                    .iter()
                    .filter(|((cat, _), _)| *cat == category)
                    .max_by_key(|((_, card), count)| (**count, std::cmp::Reverse(card.index())))
                    .map(|((_, card), _)| *card)
                    .unwrap_or_else(|| self.probes(ctx, category)[0])
            };
            [
                modal(Category::Suspect),
                modal(Category::Weapon),
                modal(Category::Room),
            ]
        } else {
            [
                self.probes(ctx, Category::Suspect)[0],
                self.probes(ctx, Category::Weapon)[0],
                self.probes(ctx, Category::Room)[0],
            ]
        };
        Ok(Self::move_decision(Self::accusation_move(triple, true)))
    }
}

impl std::fmt::Debug for OracleAgent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleAgent")
            .field("seat", &self.seat)
            .finish()
    }
}
