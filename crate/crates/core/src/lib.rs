//! Deterministic, seedable simulator of a boardless Clue variant with
//! pluggable agents (random, perfect-deduction oracle, LLM-backed), a
//! constraint-propagation deduction engine verified against exhaustive
//! possible-worlds enumeration, and a metrics pipeline over structured game
//! logs.

pub mod agents;
pub mod cards;
pub mod config;
pub mod deduction;
pub mod engine;
pub mod events;
pub mod gamelog;
pub mod gateway;
pub mod metrics;
pub mod replay;
pub mod rng;
pub mod state;
pub mod tournament;
pub mod view;

pub use agents::{
    make_agents, Agent, AgentDecision, DeductionClaim, MoveChoice, ParseError, ParsedResponse,
    PromptTemplates, ShowChoice, Triple,
};
pub use cards::{full_deck, parse_card, Card, CardSet, Category, UnknownCard};
pub use config::{AgentKind, AgentSpec, ConfigError, GameConfig, PlayerId};
pub use deduction::{
    classify_claims, ClaimContext, DeductionError, DerivedInfo, KnowledgeBase, Location, World,
    DEFAULT_WORLD_CAP,
};
pub use engine::{
    apply_accusation, rank_players, resolve_suggestion, run_game, CompletedGame, EngineError,
    EventRecord, GameResult, PlayerOutcome, RankInput,
};
pub use events::{Accusation, DisproofOutcome, GameEvent, Phase, Suggestion};
pub use gamelog::{parse_log, read_log, write_log, GameLog, LogError, LogRecord, SCHEMA_VERSION};
pub use gateway::{
    Backend, CompletionRequest, Gateway, GatewayError, GatewayRecord, MockBackend, MockExchange,
    MockFixture,
};
pub use metrics::{
    accusation_accuracy, build_report, deduction_tallies, knowledge_series, MetricsError,
    PlayerGameMetrics, TournamentReport,
};
pub use replay::{replay, ReplayError};
pub use state::{setup_game, GameState, Hand, Solution};
pub use tournament::{
    read_tournament_logs, run_tournament, TournamentError, TournamentOutcome, TournamentSpec,
};
pub use view::{PlayerView, ShowRecord, ShownCard, SuggestionRecord};
