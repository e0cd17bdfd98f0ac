//! Shared fixtures for the benchmark targets.

use std::sync::Arc;

use cluesim_core::{make_agents, run_game, AgentSpec, CompletedGame, GameConfig, PromptTemplates};

pub fn random_config(seed: u64) -> GameConfig {
    GameConfig::new(
        seed,
        (0..6)
            .map(|i| AgentSpec::random(format!("RANDOM_{}", i + 1)))
            .collect(),
    )
}

pub fn oracle_vs_randoms_config(seed: u64) -> GameConfig {
    let mut specs = vec![AgentSpec::oracle("ORACLE_1")];
    specs.extend((1..6).map(|i| AgentSpec::random(format!("RANDOM_{}", i + 1))));
    GameConfig::new(seed, specs)
}

pub fn play(config: &GameConfig) -> CompletedGame {
    let mut agents =
        make_agents(config, None, Arc::new(PromptTemplates::builtin())).expect("offline roster");
    run_game(config, &mut agents).expect("game runs")
}
