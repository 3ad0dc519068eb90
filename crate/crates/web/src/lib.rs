//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes and returns JSON strings so the page needs no
//! generated type bindings. The plain Rust functions are tested natively.

use std::sync::Arc;

use jigsaw_core::agent::{Agent, PolicySpec};
use jigsaw_core::belief::PriorKind;
use jigsaw_core::game::apply_action;
use jigsaw_core::harness::{marginals_demo, parse_action_list};
use jigsaw_core::scenario_gen;
use jigsaw_core::testing::scen_a;
use jigsaw_core::{History, PipConfig, Role, Scenario, Semantics, Vocabulary};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn parse_scenario(json: &str) -> Result<Scenario, String> {
    let s: Scenario = serde_json::from_str(json).map_err(|e| format!("scenario: {e}"))?;
    s.validate().map_err(|e| e.to_string())
}

fn parse_config(json: &str) -> Result<PipConfig, String> {
    let cfg: PipConfig = if json.trim().is_empty() {
        PipConfig::default()
    } else {
        serde_json::from_str(json).map_err(|e| format!("config: {e}"))?
    };
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn parse_role(text: &str) -> Result<Option<Role>, String> {
    match text.trim() {
        "" | "auto" => Ok(None),
        r => Role::parse(r).map(Some).ok_or_else(|| format!("unknown role {r:?}")),
    }
}

/// Scenario JSON: the reference scenario for a negative seed, otherwise a
/// generated one.
pub fn scenario_json(seed: f64) -> Result<String, String> {
    let s = if seed < 0.0 {
        scen_a()
    } else {
        scenario_gen::generate(seed as u64).map_err(|e| e.to_string())?
    };
    serde_json::to_string(&s).map_err(|e| e.to_string())
}

/// Marginal matrices after each action in `actions` (comma separated).
pub fn marginals_json(
    scenario: &str,
    actions: &str,
    viewer: &str,
    config: &str,
    unconstrained: bool,
) -> Result<String, String> {
    let s = parse_scenario(scenario)?;
    let cfg = parse_config(config)?;
    let acts = parse_action_list(actions, &Vocabulary::default()).map_err(|e| e.to_string())?;
    let prior = if unconstrained { PriorKind::Unconstrained } else { PriorKind::Constrained };
    let report = marginals_demo(&s, &acts, parse_role(viewer)?, &cfg, prior).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PolicyView {
    player: Role,
    t: usize,
    policy: String,
    /// Sorted by probability, highest first.
    actions: Vec<(String, f64)>,
}

/// Policy of the player to move after `actions`, evaluated with that
/// player's true private state.
pub fn policy_json(scenario: &str, actions: &str, policy: &str, config: &str) -> Result<String, String> {
    let s = parse_scenario(scenario)?;
    let cfg = parse_config(config)?;
    let spec = PolicySpec::parse(policy, &cfg).map_err(|e| e.to_string())?;
    let sem = Arc::new(Semantics::new(s.clone()));
    let mut h = History::new(s.first_player);
    for (i, a) in parse_action_list(actions, sem.vocabulary())
        .map_err(|e| e.to_string())?
        .into_iter()
        .enumerate()
    {
        h = apply_action(&sem, &h, a).map_err(|e| format!("step {}: {e}", i + 1))?;
    }
    if h.is_terminal() {
        return Err("the game is over".into());
    }
    let player = h.next_player();
    let mut agent = Agent::new(spec, sem).map_err(|e| e.to_string())?;
    let dist = agent.policy(s.private_state(player), &h).map_err(|e| e.to_string())?;
    let mut entries: Vec<(String, f64)> = dist.entries.iter().map(|(a, p)| (a.to_string(), *p)).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    let view = PolicyView { player, t: h.next_t(), policy: spec.to_string(), actions: entries };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = scenario)]
pub fn scenario_js(seed: f64) -> Result<String, JsError> {
    js(scenario_json(seed))
}

#[wasm_bindgen(js_name = marginals)]
pub fn marginals_js(
    scenario: &str,
    actions: &str,
    viewer: &str,
    config: &str,
    unconstrained: bool,
) -> Result<String, JsError> {
    js(marginals_json(scenario, actions, viewer, config, unconstrained))
}

#[wasm_bindgen(js_name = policy)]
pub fn policy_js(scenario: &str, actions: &str, policy: &str, config: &str) -> Result<String, JsError> {
    js(policy_json(scenario, actions, policy, config))
}
