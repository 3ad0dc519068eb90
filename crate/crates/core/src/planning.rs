//! Expected-utility planning with pragmatic inference.
//!
//! A player's policy weighs each legal action by its expected gain over
//! abandoning the game now, raised to the rationality exponent. Gains come
//! from a depth-limited lookahead in which both players follow the same
//! model; beliefs about the partner come from the level-`k` listener in
//! [`crate::belief`].
//!
//! The [`Planner`] memoizes everything per scenario. Histories are interned
//! as nodes of a trie whose edges are `(action, budget)` pairs: the budget
//! records the lookahead the acting player had when the action was chosen,
//! which is also the lookahead the listener assumes when explaining it.
//! Observed actions carry the root budget `f + 1`.

use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::belief::{window_start, PolicyOracle, Posterior, PriorKind};
use crate::error::{BeliefError, PlanError};
use crate::game::{Action, History, Message, PrivateState, Role, UtilityConfig, CELLS, NUM_STATES};
use crate::semantics::{Semantics, StateSet};

/// Model parameters. JSON form:
/// `{"k":1,"f":2,"b":null,"alpha":10,"smoothing":0.01,"action_cost":-50,"reward":100,"penalty":-100}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipConfig {
    /// Pragmatic depth.
    pub k: usize,
    /// Lookahead after the candidate action.
    pub f: usize,
    /// Lookback window; `None` is the full history.
    pub b: Option<usize>,
    pub alpha: f64,
    pub smoothing: f64,
    pub action_cost: f64,
    pub reward: f64,
    pub penalty: f64,
    /// Smooth only policies returned to callers, not those inside the model.
    pub smooth_root_only: bool,
}

impl Default for PipConfig {
    fn default() -> Self {
        let u = UtilityConfig::default();
        PipConfig {
            k: 1,
            f: 2,
            b: None,
            alpha: 10.0,
            smoothing: 0.01,
            action_cost: u.action_cost,
            reward: u.reward,
            penalty: u.penalty,
            smooth_root_only: false,
        }
    }
}

/// Largest supported lookahead; budgets are packed in 3 bits.
pub const MAX_LOOKAHEAD: usize = 6;

impl PipConfig {
    pub fn utility(&self) -> UtilityConfig {
        UtilityConfig { action_cost: self.action_cost, reward: self.reward, penalty: self.penalty }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |field: &str, message: &str| {
            Err(PlanError::InvalidConfig { field: field.into(), message: message.into() })
        };
        if self.k > 8 {
            return bad("k", "pragmatic depth above 8 is not supported");
        }
        if self.f < 1 || self.f > MAX_LOOKAHEAD {
            return bad("f", "lookahead must be between 1 and 6");
        }
        if self.b == Some(0) {
            return bad("b", "lookback must be at least 1 or null");
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad("alpha", "must be finite and non-negative");
        }
        if !(self.smoothing >= 0.0 && self.smoothing.is_finite()) {
            return bad("smoothing", "must be finite and non-negative");
        }
        for (name, v) in
            [("action_cost", self.action_cost), ("reward", self.reward), ("penalty", self.penalty)]
        {
            if !v.is_finite() {
                return bad(name, "must be finite");
            }
        }
        Ok(())
    }

    fn root_budget(&self) -> u8 {
        self.f as u8 + 1
    }
}

/// Full model and its three single-component ablations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ablation {
    Full,
    NoPrag,
    NoPlan,
    NoInfer,
}

impl Ablation {
    pub fn parse(name: &str) -> Result<Ablation, PlanError> {
        match name.to_ascii_lowercase().as_str() {
            "full" => Ok(Ablation::Full),
            "noprag" => Ok(Ablation::NoPrag),
            "noplan" => Ok(Ablation::NoPlan),
            "noinfer" => Ok(Ablation::NoInfer),
            _ => Err(PlanError::UnknownPolicy(name.to_string())),
        }
    }
}

pub fn ablation_config(which: Ablation) -> PipConfig {
    let base = PipConfig::default();
    match which {
        Ablation::Full => base,
        Ablation::NoPrag => PipConfig { k: 0, ..base },
        Ablation::NoPlan => PipConfig { f: 1, ..base },
        Ablation::NoInfer => PipConfig { b: Some(1), ..base },
    }
}

/// Normalized distribution over a legal action set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyDistribution {
    pub entries: Vec<(Action, f64)>,
}

impl PolicyDistribution {
    pub fn uniform(actions: Vec<Action>) -> Self {
        let n = actions.len() as f64;
        PolicyDistribution { entries: actions.into_iter().map(|a| (a, 1.0 / n)).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of `action`, zero when it is not in the legal set.
    pub fn prob(&self, action: &Action) -> f64 {
        self.entries.iter().find(|(a, _)| a == action).map_or(0.0, |(_, p)| *p)
    }

    pub fn contains(&self, action: &Action) -> bool {
        self.entries.iter().any(|(a, _)| a == action)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    pub fn min_prob(&self) -> f64 {
        self.entries.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min)
    }

    /// First action with the largest probability.
    pub fn argmax(&self) -> Option<Action> {
        let mut best: Option<(Action, f64)> = None;
        for &(a, p) in &self.entries {
            if best.is_none_or(|(_, q)| p > q) {
                best = Some((a, p));
            }
        }
        best.map(|(a, _)| a)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let mut u: f64 = rng.gen::<f64>() * self.total();
        for &(a, p) in &self.entries {
            if u < p {
                return a;
            }
            u -= p;
        }
        self.entries.last().expect("empty policy").0
    }

    /// Total-variation distance; actions missing from one side count as zero.
    pub fn total_variation(&self, other: &PolicyDistribution) -> f64 {
        let mut sum = 0.0;
        for (a, p) in &self.entries {
            sum += (p - other.prob(a)).abs();
        }
        for (a, q) in &other.entries {
            if !self.contains(a) {
                sum += q;
            }
        }
        sum / 2.0
    }
}

/// `p_i <- (p_i + eps) / (1 + eps * N)`.
pub fn smooth(dist: &PolicyDistribution, eps: f64) -> PolicyDistribution {
    let n = dist.len() as f64;
    PolicyDistribution {
        entries: dist.entries.iter().map(|&(a, p)| (a, (p + eps) / (1.0 + eps * n))).collect(),
    }
}

fn smooth_in_place(probs: &mut [f64], eps: f64) {
    let norm = 1.0 + eps * probs.len() as f64;
    for p in probs.iter_mut() {
        *p = (*p + eps) / norm;
    }
}

/// Normalized `max(0, E)^alpha`, computed in log space; uniform if no
/// action has positive gain.
pub fn gains_to_probs(gains: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = vec![0.0; gains.len()];
    gains_to_probs_into(gains, alpha, &mut out);
    out
}

fn gains_to_probs_into(gains: &[f64], alpha: f64, out: &mut [f64]) {
    for (w, &e) in out.iter_mut().zip(gains) {
        *w = if e > 0.0 {
            if alpha == 0.0 {
                0.0
            } else {
                alpha * e.ln()
            }
        } else {
            f64::NEG_INFINITY
        };
    }
    let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        out.fill(1.0 / gains.len() as f64);
        return;
    }
    let mut total = 0.0;
    for w in out.iter_mut() {
        *w = (*w - max).exp();
        total += *w;
    }
    out.iter_mut().for_each(|w| *w /= total);
}

#[inline]
fn dot(a: &[f64; CELLS], b: &[f64; CELLS]) -> f64 {
    let mut v = 0.0;
    for c in 0..CELLS {
        v += a[c] * b[c];
    }
    v
}

/// Root policy with the quantities behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolicyDetail {
    pub actions: Vec<Action>,
    /// Expected gain over abandoning, per action.
    pub gains: Vec<f64>,
    /// Before smoothing.
    pub raw: Vec<f64>,
    pub probs: Vec<f64>,
}

impl PolicyDetail {
    pub fn distribution(&self) -> PolicyDistribution {
        PolicyDistribution {
            entries: self.actions.iter().copied().zip(self.probs.iter().copied()).collect(),
        }
    }

    pub fn raw_distribution(&self) -> PolicyDistribution {
        PolicyDistribution {
            entries: self.actions.iter().copied().zip(self.raw.iter().copied()).collect(),
        }
    }
}

struct Policy {
    ids: Vec<u16>,
    probs: Vec<f64>,
}

impl Policy {
    /// Zero off the legal set.
    fn prob(&self, id: u16) -> f64 {
        self.ids.iter().position(|&i| i == id).map_or(0.0, |i| self.probs[i])
    }
}

/// Memoized k-level beliefs by own state.
type PosteriorTable = Box<[Option<Arc<Dist>>]>;

/// Memoized policies of one node and level, by own state.
struct PolicyTable {
    rows: Box<[Option<Arc<Policy>>]>,
    /// `by_id[id * NUM_STATES + s]`, so a belief update reads one
    /// contiguous column.
    by_id: Box<[f64]>,
}

impl PolicyTable {
    fn new(num_actions: usize) -> Self {
        PolicyTable {
            rows: vec![None; NUM_STATES].into_boxed_slice(),
            by_id: vec![0.0; num_actions * NUM_STATES].into_boxed_slice(),
        }
    }
}

type Dist = [f64; NUM_STATES];
type ClickProbs = [f64; CELLS];

/// Nonzero entries of a belief, in state order.
struct Support {
    len: usize,
    items: [(u8, f64); NUM_STATES],
}

impl std::ops::Deref for Support {
    type Target = [(u8, f64)];

    fn deref(&self) -> &[(u8, f64)] {
        &self.items[..self.len]
    }
}

/// `CELL_BITS[s][c]` is 1.0 when state `s` has cell `c`.
const CELL_BITS: [[f64; CELLS]; NUM_STATES] = {
    let mut t = [[0.0; CELLS]; NUM_STATES];
    let mut s = 0;
    while s < NUM_STATES {
        let mut c = 0;
        while c < CELLS {
            t[s][c] = (s >> c & 1) as f64;
            c += 1;
        }
        s += 1;
    }
    t
};

/// Memoized click policies by own state.
#[derive(Clone)]
struct ClickTable {
    present: StateSet,
    probs: Box<[ClickProbs; NUM_STATES]>,
}

impl ClickTable {
    fn new() -> Self {
        ClickTable { present: StateSet::EMPTY, probs: Box::new([[0.0; CELLS]; NUM_STATES]) }
    }

    #[inline]
    fn get(&self, s: u8) -> Option<&ClickProbs> {
        self.present.contains(PrivateState(s)).then(|| &self.probs[s as usize])
    }

    fn set(&mut self, s: u8, p: ClickProbs) {
        self.present.0 |= 1 << s;
        self.probs[s as usize] = p;
    }
}

#[derive(Clone, Copy)]
enum ClickSlot {
    Lit(u32),
    Table(usize),
    Missing,
}

/// Belief over partner states: uniform over a set, or an explicit table.
#[derive(Clone)]
enum Belief {
    Set(StateSet),
    Dist(Arc<Dist>),
}

impl Belief {
    fn support(&self) -> Support {
        let mut out = Support { len: 0, items: [(0, 0.0); NUM_STATES] };
        match self {
            Belief::Set(set) => {
                let p = 1.0 / set.len() as f64;
                for s in set.iter() {
                    out.items[out.len] = (s.0, p);
                    out.len += 1;
                }
            }
            Belief::Dist(d) => {
                for (o, &p) in d.iter().enumerate() {
                    if p > 0.0 {
                        out.items[out.len] = (o as u8, p);
                        out.len += 1;
                    }
                }
            }
        }
        out
    }

    /// `hit` for every cell.
    fn hits(&self, sem: &Semantics) -> [f64; CELLS] {
        match self {
            Belief::Set(_) => std::array::from_fn(|c| self.hit(sem, c)),
            Belief::Dist(d) => {
                // adding the masked-out zeros leaves each sum unchanged
                let mut h = [0.0; CELLS];
                for (o, &p) in d.iter().enumerate() {
                    if p != 0.0 {
                        for (x, bit) in h.iter_mut().zip(&CELL_BITS[o]) {
                            *x += p * bit;
                        }
                    }
                }
                h
            }
        }
    }

    /// Probability that the partner's bit at `cell` is set.
    fn hit(&self, sem: &Semantics, cell: usize) -> f64 {
        match self {
            Belief::Set(set) => {
                set.and(sem.cell_states(cell)).len() as f64 / set.len() as f64
            }
            Belief::Dist(d) => {
                d.iter().enumerate().filter(|(o, _)| o >> cell & 1 == 1).map(|(_, p)| p).sum()
            }
        }
    }

    fn to_dist(&self) -> Dist {
        match self {
            Belief::Set(set) => uniform(*set),
            Belief::Dist(d) => **d,
        }
    }
}

const NO_PARENT: u32 = u32::MAX;
const BUDGET_BITS: u16 = 3;
const DEFAULT_NODE_LIMIT: usize = 60_000;
const NO_TABLE: u32 = u32::MAX;

fn table_key(k: u8, budget: u8) -> u8 {
    k * 8 + budget
}

struct Node {
    parent: u32,
    /// `action_id << BUDGET_BITS | budget` of the edge into this node.
    edge: u16,
    len: u16,
    observed: bool,
    lit_clicks: u32,
    /// What the incoming action says about its speaker's state.
    constraint: StateSet,
    /// Conjunction of constraints on the first (0) and second (1) mover.
    den: [StateSet; 2],
    policies: Vec<(u8, PolicyTable)>,
    clicks: Vec<(u8, ClickTable)>,
    posteriors: Vec<(u8, PosteriorTable)>,
    values: Vec<(u8, Box<[f64]>)>,
}

impl Node {
    fn root() -> Self {
        Node {
            parent: NO_PARENT,
            edge: 0,
            len: 0,
            observed: true,
            lit_clicks: NO_TABLE,
            constraint: StateSet::ALL,
            den: [StateSet::ALL; 2],
            policies: Vec::new(),
            clicks: Vec::new(),
            posteriors: Vec::new(),
            values: Vec::new(),
        }
    }

    fn action_id(&self) -> u16 {
        self.edge >> BUDGET_BITS
    }

    fn budget(&self) -> u8 {
        (self.edge & ((1 << BUDGET_BITS) - 1)) as u8
    }
}

fn find<T>(tables: &[(u8, T)], key: u8) -> Option<&T> {
    tables.iter().find(|(k, _)| *k == key).map(|(_, t)| t)
}

fn find_or_insert<T>(tables: &mut Vec<(u8, T)>, key: u8, make: impl FnOnce() -> T) -> &mut T {
    let i = match tables.iter().position(|(k, _)| *k == key) {
        Some(i) => i,
        None => {
            tables.push((key, make()));
            tables.len() - 1
        }
    };
    &mut tables[i].1
}

/// Counters exposed for tests and diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PlannerStats {
    pub nodes: usize,
    pub policies_computed: usize,
    /// Deepest nesting of policy evaluations seen.
    pub max_policy_depth: usize,
    /// Contradictory beliefs about observed play replaced by a fallback.
    pub fallbacks: usize,
    /// The same inside hypothesized continuations.
    pub hypothetical_fallbacks: usize,
    pub cache_resets: usize,
}

/// Memoizing evaluator of the planning model for one scenario.
pub struct Planner {
    sem: Arc<Semantics>,
    cfg: PipConfig,
    utility: UtilityConfig,
    memoize: bool,
    lenient: bool,
    node_limit: usize,
    nodes: Vec<Node>,
    children: FxHashMap<(u32, u16), u32>,
    /// Level-0 click policies per window constraint, by own state.
    lit_tables: Vec<(StateSet, ClickTable)>,
    lit_index: FxHashMap<u64, u32>,
    depth: usize,
    stats: PlannerStats,
}

impl Planner {
    pub fn new(sem: Arc<Semantics>, cfg: PipConfig) -> Result<Self, PlanError> {
        cfg.validate()?;
        Ok(Planner {
            sem,
            utility: cfg.utility(),
            cfg,
            memoize: true,
            lenient: false,
            node_limit: DEFAULT_NODE_LIMIT,
            nodes: vec![Node::root()],
            children: FxHashMap::default(),
            lit_tables: Vec::new(),
            lit_index: FxHashMap::default(),
            depth: 0,
            stats: PlannerStats::default(),
        })
    }

    /// When set, contradictory beliefs about observed play fall back to the
    /// literal belief over the last action, then to the prior, instead of
    /// failing. Hypothesized continuations always fall back.
    pub fn with_fallback(mut self, lenient: bool) -> Self {
        self.lenient = lenient;
        self
    }

    /// Disables the policy and value caches (beliefs stay cached).
    pub fn with_memoization(mut self, memoize: bool) -> Self {
        self.memoize = memoize;
        self
    }

    /// Cache size, in history nodes, above which the cache is dropped
    /// before the next query.
    pub fn with_node_limit(mut self, limit: usize) -> Self {
        self.node_limit = limit;
        self
    }

    pub fn config(&self) -> &PipConfig {
        &self.cfg
    }

    pub fn semantics(&self) -> &Arc<Semantics> {
        &self.sem
    }

    pub fn stats(&self) -> PlannerStats {
        PlannerStats { nodes: self.nodes.len(), ..self.stats }
    }

    /// Drops all cached work.
    pub fn clear(&mut self) {
        self.nodes.clear();
        self.nodes.push(Node::root());
        self.children.clear();
        self.lit_tables.clear();
        self.lit_index.clear();
    }

    fn begin_query(&mut self) {
        if self.nodes.len() > self.node_limit {
            self.clear();
            self.stats.cache_resets += 1;
        }
    }

    /// Policy of the player to move after `history`, holding `own`.
    pub fn pip_policy(
        &mut self,
        own: PrivateState,
        history: &History,
    ) -> Result<PolicyDistribution, PlanError> {
        Ok(self.pip_policy_detail(own, history)?.distribution())
    }

    pub fn pip_policy_detail(
        &mut self,
        own: PrivateState,
        history: &History,
    ) -> Result<PolicyDetail, PlanError> {
        self.begin_query();
        let node = self.intern(history)?;
        let k = self.cfg.k as u8;
        let budget = self.cfg.root_budget();
        let (ids, gains) = self.gains(k, budget, own.0, node)?;
        let raw = gains_to_probs(&gains, self.cfg.alpha);
        let mut probs = raw.clone();
        smooth_in_place(&mut probs, self.cfg.smoothing);
        Ok(PolicyDetail {
            actions: ids.iter().map(|&id| self.sem.action_of(id)).collect(),
            gains,
            raw,
            probs,
        })
    }

    /// Level-`level` probability that a speaker holding `speaker_state`
    /// takes `action` after the observed `prefix`.
    pub fn observed_action_prob(
        &mut self,
        level: usize,
        speaker_state: PrivateState,
        prefix: &History,
        action: &Action,
    ) -> Result<f64, PlanError> {
        self.begin_query();
        let node = self.intern(prefix)?;
        let id = self
            .sem
            .action_id(action)
            .ok_or_else(|| PlanError::UnknownAction(action.to_string()))?;
        let pol = self.policy(level as u8, self.cfg.root_budget(), speaker_state.0, node)?;
        Ok(pol.prob(id))
    }

    /// The level-`level` belief of `viewer` about the partner, over the
    /// configured lookback window.
    pub fn posterior(
        &mut self,
        viewer: Role,
        own: PrivateState,
        history: &History,
        level: usize,
    ) -> Result<Posterior, PlanError> {
        if history.is_terminal() {
            return Err(BeliefError::TerminalHistory.into());
        }
        self.begin_query();
        let node = self.intern(history)?;
        let parity = if viewer == history.first_player() { 0 } else { 1 };
        let b = self.belief(level as u8, parity, own.0, node, true)?;
        Ok(Posterior::from_probs(b.to_dist()))
    }

    /// Expected utility of `history` when the player to move holds
    /// `mover_state` and the other holds `other_state`, with at most
    /// `budget` further actions ending in a click.
    pub fn expected_value(
        &mut self,
        mover_state: PrivateState,
        other_state: PrivateState,
        history: &History,
        budget: usize,
    ) -> Result<f64, PlanError> {
        if let Some(step) = history.last() {
            if let Action::Click(cell) = step.action {
                // the clicker moved last; correctness is joint consistency
                let c = self.sem.scenario().index_of(cell);
                let correct = mover_state.contains(c) && other_state.contains(c);
                return Ok(self.utility.terminal(history.len(), correct));
            }
        }
        if budget == 0 || budget > MAX_LOOKAHEAD + 1 {
            return Err(PlanError::InvalidConfig {
                field: "budget".into(),
                message: "non-terminal history needs a budget between 1 and 7".into(),
            });
        }
        self.begin_query();
        let node = self.intern(history)?;
        self.value(self.cfg.k as u8, budget as u8, node, mover_state.0, other_state.0)
    }

    fn intern(&mut self, history: &History) -> Result<u32, PlanError> {
        if history.is_terminal() {
            return Err(PlanError::Terminal);
        }
        let budget = self.cfg.root_budget();
        let mut node = 0u32;
        for a in history.actions() {
            let id =
                self.sem.action_id(&a).ok_or_else(|| PlanError::UnknownAction(a.to_string()))?;
            node = self.child(node, id, budget);
            self.nodes[node as usize].observed = true;
        }
        Ok(node)
    }

    fn child(&mut self, node: u32, id: u16, budget: u8) -> u32 {
        let edge = id << BUDGET_BITS | budget as u16;
        if let Some(&c) = self.children.get(&(node, edge)) {
            return c;
        }
        let sem = &*self.sem;
        let parent = &self.nodes[node as usize];
        let constraint = if sem.is_informative_id(id) {
            sem.denotation_of(id)
        } else if id == sem.yes_id() || id == sem.no_id() {
            // unreferenced yes/no only occurs in illegal recorded play
            match (node != 0).then(|| parent.action_id()) {
                Some(prev) if sem.is_informative_id(prev) => {
                    let d = sem.denotation_of(prev);
                    if id == sem.yes_id() {
                        d
                    } else {
                        d.complement()
                    }
                }
                _ => StateSet::ALL,
            }
        } else {
            StateSet::ALL
        };
        let speaker = parent.len as usize % 2;
        let mut den = parent.den;
        den[speaker] = den[speaker].and(constraint);
        let c = self.nodes.len() as u32;
        self.nodes.push(Node {
            parent: node,
            edge,
            len: parent.len + 1,
            observed: false,
            lit_clicks: NO_TABLE,
            constraint,
            den,
            policies: Vec::new(),
            clicks: Vec::new(),
            posteriors: Vec::new(),
            values: Vec::new(),
        });
        self.children.insert((node, edge), c);
        c
    }

    fn ancestor(&self, node: u32, len: u16) -> u32 {
        let mut n = node;
        while self.nodes[n as usize].len > len {
            n = self.nodes[n as usize].parent;
        }
        n
    }

    fn legal_ids(&self, budget: u8, s: u8, node: u32) -> Vec<u16> {
        let sem = &*self.sem;
        let nd = &self.nodes[node as usize];
        let mut ids = Vec::new();
        if budget > 1 {
            ids.extend_from_slice(sem.valid_message_ids(PrivateState(s)));
            if node != 0 && sem.is_informative_id(nd.action_id()) {
                let holds = sem.denotation_of(nd.action_id()).contains(PrivateState(s));
                ids.push(if holds { sem.yes_id() } else { sem.no_id() });
            }
        }
        if nd.len > 0 {
            for c in PrivateState(s).cells() {
                ids.push(sem.click_id(c));
            }
        }
        ids
    }

    fn enter(&mut self) {
        self.depth += 1;
        self.stats.max_policy_depth = self.stats.max_policy_depth.max(self.depth);
    }

    fn policy(&mut self, k: u8, budget: u8, s: u8, node: u32) -> Result<Arc<Policy>, PlanError> {
        let key = table_key(k, budget);
        if self.memoize {
            if let Some(Some(p)) = find(&self.nodes[node as usize].policies, key).map(|t| &t.rows[s as usize]) {
                return Ok(p.clone());
            }
        }
        let (ids, gains) = self.gains(k, budget, s, node)?;
        let mut probs = gains_to_probs(&gains, self.cfg.alpha);
        if !self.cfg.smooth_root_only {
            smooth_in_place(&mut probs, self.cfg.smoothing);
        }
        let pol = Arc::new(Policy { ids, probs });
        self.stats.policies_computed += 1;
        if self.memoize {
            let n = self.sem.num_actions();
            let t = find_or_insert(&mut self.nodes[node as usize].policies, key, || PolicyTable::new(n));
            for (&id, &p) in pol.ids.iter().zip(&pol.probs) {
                t.by_id[id as usize * NUM_STATES + s as usize] = p;
            }
            t.rows[s as usize] = Some(pol.clone());
        }
        Ok(pol)
    }

    fn policy_prob(&mut self, k: u8, budget: u8, s: u8, node: u32, id: u16) -> Result<f64, PlanError> {
        if self.memoize {
            let key = table_key(k, budget);
            if let Some(t) = find(&self.nodes[node as usize].policies, key) {
                if t.rows[s as usize].is_some() {
                    return Ok(t.by_id[id as usize * NUM_STATES + s as usize]);
                }
            }
        }
        Ok(self.policy(k, budget, s, node)?.prob(id))
    }

    /// Legal actions and their expected gains for the mover holding `s`.
    fn gains(
        &mut self,
        k: u8,
        budget: u8,
        s: u8,
        node: u32,
    ) -> Result<(Vec<u16>, Vec<f64>), PlanError> {
        self.enter();
        let out = self.gains_inner(k, budget, s, node);
        self.depth -= 1;
        out
    }

    fn gains_inner(
        &mut self,
        k: u8,
        budget: u8,
        s: u8,
        node: u32,
    ) -> Result<(Vec<u16>, Vec<f64>), PlanError> {
        let len = self.nodes[node as usize].len as usize;
        let parity = (len % 2) as u8;
        let belief = self.belief(k, parity, s, node, true)?;
        let support = belief.support();
        let support = &*support;
        let support_set = StateSet(support.iter().fold(0u64, |m, &(o, _)| m | 1 << o));
        let weight: f64 = support.iter().map(|&(_, p)| p).sum();
        let sel = self.click_weights(len + 1, s);
        let ids = self.legal_ids(budget, s, node);
        let ab = self.utility.abandon(len);
        let win = self.utility.terminal(len + 1, true) - ab;
        let lose = self.utility.terminal(len + 1, false) - ab;
        let mut gains = Vec::with_capacity(ids.len());
        for &id in &ids {
            let e = if self.sem.is_click_id(id) {
                let hit = belief.hit(&self.sem, self.sem.click_cell_of(id));
                hit * win + (1.0 - hit) * lose
            } else {
                let child = self.child(node, id, budget);
                let mut e = 0.0;
                if budget == 2 {
                    // `value` at budget 1 for each partner state, summed
                    // per cell first
                    let slot = self.click_slot(k, child);
                    let present = self.click_table(slot, child).map_or(StateSet::EMPTY, |t| t.present);
                    for o in support_set.and(present.complement()).iter() {
                        self.click_probs(k, o.0, child)?;
                    }
                    let mut mass = [0.0; CELLS];
                    match self.click_table(slot, child) {
                        Some(t) if support_set.is_subset(t.present) => {
                            for &(o, p) in support {
                                let cp = &t.probs[o as usize];
                                for c in 0..CELLS {
                                    mass[c] += p * cp[c];
                                }
                            }
                        }
                        _ => {
                            for &(o, p) in support {
                                let cp = self.click_probs(k, o, child)?;
                                for c in 0..CELLS {
                                    mass[c] += p * cp[c];
                                }
                            }
                        }
                    }
                    e = dot(&mass, &sel) - weight * ab;
                } else {
                    for &(o, p) in support {
                        e += p * (self.value(k, budget - 1, child, o, s)? - ab);
                    }
                }
                e
            };
            gains.push(e);
        }
        Ok((ids, gains))
    }

    /// Click policy when only a click remains (budget 1), by cell.
    #[inline]
    fn click_probs(&mut self, k: u8, s: u8, node: u32) -> Result<ClickProbs, PlanError> {
        if self.memoize {
            let nd = &self.nodes[node as usize];
            let hit = if k == 0 {
                (nd.lit_clicks != NO_TABLE)
                    .then(|| self.lit_tables[nd.lit_clicks as usize].1.get(s).copied())
                    .flatten()
            } else {
                find(&nd.clicks, k).and_then(|t| t.get(s).copied())
            };
            if let Some(p) = hit {
                return Ok(p);
            }
        }
        self.click_probs_miss(k, s, node)
    }

    #[inline(never)]
    fn click_probs_miss(&mut self, k: u8, s: u8, node: u32) -> Result<ClickProbs, PlanError> {
        let len = self.nodes[node as usize].len as usize;
        let parity = (len % 2) as u8;
        if k == 0 {
            return self.literal_click_probs(parity, s, node, len);
        }
        self.enter();
        let belief = self.belief(k, parity, s, node, false);
        let p = belief.map(|b| self.click_probs_for(&b, s, len));
        self.depth -= 1;
        let p = p?;
        if self.memoize {
            find_or_insert(&mut self.nodes[node as usize].clicks, k, ClickTable::new).set(s, p);
        }
        Ok(p)
    }

    /// Level-0 click policies depend on the node only through the partner
    /// constraints in the window, so nodes with equal constraints share a
    /// table.
    fn literal_click_probs(
        &mut self,
        parity: u8,
        s: u8,
        node: u32,
        len: usize,
    ) -> Result<ClickProbs, PlanError> {
        let mut slot = NO_TABLE;
        if self.memoize {
            slot = self.lit_slot(node);
            if let Some(p) = self.lit_tables[slot as usize].1.get(s) {
                return Ok(*p);
            }
        }
        let (set, exact) = match self.literal_set(parity, s, node) {
            Ok(set) => (set, true),
            Err(e) => (self.on_contradiction(e, parity, s, node)?.set(), false),
        };
        self.enter();
        let p = self.click_probs_for(&Belief::Set(set), s, len);
        self.depth -= 1;
        if self.memoize && exact {
            self.lit_tables[slot as usize].1.set(s, p);
        }
        Ok(p)
    }

    /// Shared table of level-0 click policies for `node`.
    fn lit_slot(&mut self, node: u32) -> u32 {
        let slot = self.nodes[node as usize].lit_clicks;
        if slot != NO_TABLE {
            return slot;
        }
        let parity = self.nodes[node as usize].len as usize % 2;
        let den = self.window_den(1 - parity, node);
        let next = self.lit_tables.len() as u32;
        let slot = *self.lit_index.entry(den.0).or_insert(next);
        if slot == next {
            self.lit_tables.push((den, ClickTable::new()));
        }
        self.nodes[node as usize].lit_clicks = slot;
        slot
    }

    /// Where `click_probs` memoizes level-`k` entries for `node`.
    fn click_slot(&mut self, k: u8, node: u32) -> ClickSlot {
        if !self.memoize {
            ClickSlot::Missing
        } else if k == 0 {
            ClickSlot::Lit(self.lit_slot(node))
        } else {
            let tables = &mut self.nodes[node as usize].clicks;
            find_or_insert(tables, k, ClickTable::new);
            ClickSlot::Table(tables.iter().position(|(key, _)| *key == k).unwrap())
        }
    }

    #[inline]
    fn click_table(&self, slot: ClickSlot, node: u32) -> Option<&ClickTable> {
        match slot {
            ClickSlot::Lit(i) => Some(&self.lit_tables[i as usize].1),
            ClickSlot::Table(i) => Some(&self.nodes[node as usize].clicks[i].1),
            ClickSlot::Missing => None,
        }
    }

    fn click_probs_for(&self, belief: &Belief, s: u8, len: usize) -> ClickProbs {
        let ab = self.utility.abandon(len);
        let win = self.utility.terminal(len + 1, true) - ab;
        let lose = self.utility.terminal(len + 1, false) - ab;
        let hits = belief.hits(&self.sem);
        let mut cells = [0usize; CELLS];
        let mut gains = [0.0; CELLS];
        let mut n = 0;
        for c in PrivateState(s).cells() {
            cells[n] = c;
            gains[n] = hits[c] * win + (1.0 - hits[c]) * lose;
            n += 1;
        }
        let mut probs = [0.0; CELLS];
        gains_to_probs_into(&gains[..n], self.cfg.alpha, &mut probs[..n]);
        if !self.cfg.smooth_root_only {
            smooth_in_place(&mut probs[..n], self.cfg.smoothing);
        }
        let mut out = [0.0; CELLS];
        for i in 0..n {
            out[cells[i]] = probs[i];
        }
        out
    }

    /// Expected utility at `node` with `mover` to act and `other` waiting.
    fn value(
        &mut self,
        k: u8,
        budget: u8,
        node: u32,
        mover: u8,
        other: u8,
    ) -> Result<f64, PlanError> {
        debug_assert!(budget >= 1, "continuations must end in a click");
        let len = self.nodes[node as usize].len as usize;
        if budget == 1 {
            let p = self.click_probs(k, mover, node)?;
            return Ok(self.click_value(&p, len, mover, other));
        }
        if !self.memoize {
            return self.value_entry(k, budget, node, mover, other, &mut Vec::new());
        }
        let key = table_key(k, budget);
        let idx = mover as usize * NUM_STATES + other as usize;
        if let Some(t) = find(&self.nodes[node as usize].values, key) {
            if !t[idx].is_nan() {
                return Ok(t[idx]);
            }
        }
        // Belief supports only hold states that share a cell with the
        // believer and satisfy the windowed literal constraints, so fill
        // the row for those movers.
        let parity = len % 2;
        let movers = StateSet::intersecting(other).and(self.window_den(parity, node));
        let row = if movers.contains(PrivateState(mover)) {
            let mut kids = Vec::new();
            let mut row = Vec::with_capacity(movers.len() as usize);
            for x in movers.iter() {
                row.push((x.0, self.value_entry(k, budget, node, x.0, other, &mut kids)?));
            }
            row
        } else {
            vec![(mover, self.value_entry(k, budget, node, mover, other, &mut Vec::new())?)]
        };
        let t = find_or_insert(&mut self.nodes[node as usize].values, key, || {
            vec![f64::NAN; NUM_STATES * NUM_STATES].into_boxed_slice()
        });
        for (x, v) in row {
            t[x as usize * NUM_STATES + other as usize] = v;
        }
        Ok(t[idx])
    }

    /// Utility of a final click drawn from `p` by `mover`.
    #[inline]
    fn click_value(&self, p: &ClickProbs, len: usize, mover: u8, other: u8) -> f64 {
        debug_assert!(p.iter().enumerate().all(|(c, &x)| mover >> c & 1 == 1 || x == 0.0));
        dot(p, &self.click_weights(len, other))
    }

    /// Utility of a click on each cell as action `len + 1`, seen against
    /// the partner holding `other`.
    #[inline(always)]
    fn click_weights(&self, len: usize, other: u8) -> [f64; CELLS] {
        let win = self.utility.terminal(len + 1, true);
        let mut w = [self.utility.terminal(len + 1, false); CELLS];
        for (c, x) in w.iter_mut().enumerate() {
            if other >> c & 1 == 1 {
                *x = win;
            }
        }
        w
    }

    /// One value entry at budget >= 2. When one action remains, `kids`
    /// caches the value of the partner's click after each message, by the
    /// cells the two players share; it is only valid for a fixed
    /// `(node, other)`.
    fn value_entry(
        &mut self,
        k: u8,
        budget: u8,
        node: u32,
        mover: u8,
        other: u8,
        kids: &mut Vec<Option<ClickProbs>>,
    ) -> Result<f64, PlanError> {
        let len = self.nodes[node as usize].len as usize;
        let joint = mover & other;
        let pol = self.policy(k, budget, mover, node)?;
        let sel = self.click_weights(len + 1, mover);
        let mut v = 0.0;
        for (&id, &p) in pol.ids.iter().zip(&pol.probs) {
            if self.sem.is_click_id(id) {
                let cell = self.sem.click_cell_of(id);
                v += p * self.utility.terminal(len + 1, joint >> cell & 1 == 1);
            } else if budget == 2 {
                if kids.is_empty() {
                    kids.resize(self.sem.num_actions(), None);
                }
                let cp = match kids[id as usize] {
                    Some(cp) => cp,
                    None => {
                        let child = self.child(node, id, budget);
                        let cp = self.click_probs(k, other, child)?;
                        kids[id as usize] = Some(cp);
                        cp
                    }
                };
                v += p * dot(&cp, &sel);
            } else {
                let child = self.child(node, id, budget);
                v += p * self.value(k, budget - 1, child, other, mover)?;
            }
        }
        Ok(v)
    }

    fn window(&self, len: usize) -> usize {
        window_start(len, self.cfg.b)
    }

    /// Literal belief set of the player with `parity` holding `s`, over the
    /// lookback window ending at `node`.
    fn literal_set(&self, parity: u8, s: u8, node: u32) -> Result<StateSet, BeliefError> {
        let len = self.nodes[node as usize].len as usize;
        self.literal_set_from(parity, s, node, self.window(len))
    }

    /// Conjunction of the constraints on `partner`'s state in the window.
    fn window_den(&self, partner: usize, node: u32) -> StateSet {
        let len = self.nodes[node as usize].len as usize;
        let start = self.window(len);
        if start == 0 {
            return self.nodes[node as usize].den[partner];
        }
        let mut set = StateSet::ALL;
        let mut n = node;
        while self.nodes[n as usize].len as usize > start {
            let nd = &self.nodes[n as usize];
            if (nd.len as usize - 1) % 2 == partner {
                set = set.and(nd.constraint);
            }
            n = nd.parent;
        }
        set
    }

    fn literal_set_from(
        &self,
        parity: u8,
        s: u8,
        node: u32,
        start: usize,
    ) -> Result<StateSet, BeliefError> {
        let prior = PriorKind::Constrained.support(PrivateState(s));
        if prior.is_empty() {
            return Err(BeliefError::Contradiction { t: 0 });
        }
        let partner = 1 - parity as usize;
        let set = if start == 0 {
            prior.and(self.nodes[node as usize].den[partner])
        } else {
            let mut set = prior;
            let mut n = node;
            while self.nodes[n as usize].len as usize > start {
                let nd = &self.nodes[n as usize];
                if (nd.len as usize - 1) % 2 == partner {
                    set = set.and(nd.constraint);
                }
                n = nd.parent;
            }
            set
        };
        if set.is_empty() {
            return Err(BeliefError::Contradiction { t: self.emptying_step(prior, partner, node) });
        }
        Ok(set)
    }

    /// Time step at which the partner's constraints first empty `prior`.
    fn emptying_step(&self, prior: StateSet, partner: usize, node: u32) -> usize {
        let mut chain = Vec::new();
        let mut n = node;
        while n != 0 {
            chain.push(n);
            n = self.nodes[n as usize].parent;
        }
        let mut set = prior;
        for &n in chain.iter().rev() {
            let nd = &self.nodes[n as usize];
            if (nd.len as usize - 1) % 2 == partner {
                set = set.and(nd.constraint);
                if set.is_empty() {
                    return nd.len as usize;
                }
            }
        }
        self.nodes[node as usize].len as usize
    }

    fn belief(
        &mut self,
        k: u8,
        parity: u8,
        s: u8,
        node: u32,
        store: bool,
    ) -> Result<Belief, PlanError> {
        if k == 0 {
            return match self.literal_set(parity, s, node) {
                Ok(set) => Ok(Belief::Set(set)),
                Err(e) => self.on_contradiction(e, parity, s, node),
            };
        }
        let key = table_key(k, parity);
        if let Some(Some(d)) = find(&self.nodes[node as usize].posteriors, key).map(|t| &t[s as usize]) {
            return Ok(Belief::Dist(d.clone()));
        }
        let len = self.nodes[node as usize].len as usize;
        let b = match self.window_belief(k, parity, s, node, self.window(len)) {
            Ok(b) => b,
            Err(PlanError::Undefined(e @ BeliefError::Contradiction { .. })) => {
                self.on_contradiction(e, parity, s, node)?
            }
            Err(e) => return Err(e),
        };
        if store {
            if let Belief::Dist(d) = &b {
                let t = find_or_insert(&mut self.nodes[node as usize].posteriors, key, || {
                    vec![None; NUM_STATES].into_boxed_slice()
                });
                t[s as usize] = Some(d.clone());
            }
        }
        Ok(b)
    }

    fn on_contradiction(
        &mut self,
        err: BeliefError,
        parity: u8,
        s: u8,
        node: u32,
    ) -> Result<Belief, PlanError> {
        if self.nodes[node as usize].observed {
            if !self.lenient {
                return Err(err.into());
            }
            self.stats.fallbacks += 1;
        } else {
            self.stats.hypothetical_fallbacks += 1;
        }
        let len = self.nodes[node as usize].len as usize;
        if let Ok(set) = self.literal_set_from(parity, s, node, len.saturating_sub(1)) {
            return Ok(Belief::Set(set));
        }
        let prior = PriorKind::Constrained.support(PrivateState(s));
        if prior.is_empty() {
            return Err(BeliefError::Contradiction { t: 0 }.into());
        }
        Ok(Belief::Set(prior))
    }

    fn window_belief(
        &mut self,
        k: u8,
        parity: u8,
        s: u8,
        node: u32,
        start: usize,
    ) -> Result<Belief, PlanError> {
        if k == 0 {
            return Ok(Belief::Set(self.literal_set_from(parity, s, node, start)?));
        }
        let len = self.nodes[node as usize].len as usize;
        // the partner's most recent action is one of the last two
        let last_partner = (len.saturating_sub(2)..len)
            .rev()
            .find(|&i| i >= start && (i % 2) as u8 != parity);
        let Some(i) = last_partner else {
            let prior = PriorKind::Constrained.support(PrivateState(s));
            if prior.is_empty() {
                return Err(BeliefError::Contradiction { t: 0 }.into());
            }
            return Ok(Belief::Set(prior));
        };
        let after = self.ancestor(node, i as u16 + 1);
        let (id, budget) = (self.nodes[after as usize].action_id(), self.nodes[after as usize].budget());
        let prefix = self.nodes[after as usize].parent;
        let before = if start == self.window(i) {
            self.belief(k, parity, s, prefix, true)?
        } else {
            self.window_belief(k, parity, s, prefix, start)?
        };
        let mut probs = [0.0; NUM_STATES];
        let mut total = 0.0;
        let (set, dist) = match &before {
            Belief::Set(set) => (*set, None),
            Belief::Dist(d) => (nonzero(d), Some(d)),
        };
        let even = 1.0 / set.len() as f64;
        for o in set.iter().map(|o| o.0) {
            let w = dist.map_or(even, |d| d[o as usize]);
            let like = self.policy_prob(k - 1, budget, o, prefix, id)?;
            probs[o as usize] = w * like;
            total += probs[o as usize];
        }
        if total <= 0.0 {
            return Err(BeliefError::Contradiction { t: i + 1 }.into());
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(Belief::Dist(Arc::new(probs)))
    }
}

impl Belief {
    fn set(self) -> StateSet {
        match self {
            Belief::Set(s) => s,
            Belief::Dist(d) => {
                let mut bits = 0u64;
                for (o, p) in d.iter().enumerate() {
                    if *p > 0.0 {
                        bits |= 1 << o;
                    }
                }
                StateSet(bits)
            }
        }
    }
}

fn nonzero(d: &Dist) -> StateSet {
    StateSet(d.iter().enumerate().fold(0, |m, (o, &p)| m | ((p > 0.0) as u64) << o))
}

fn uniform(set: StateSet) -> Dist {
    let mut d = [0.0; NUM_STATES];
    let n = set.len() as f64;
    for s in set.iter() {
        d[s.index()] = 1.0 / n;
    }
    d
}

impl PolicyOracle for Planner {
    fn action_prob(
        &mut self,
        level: usize,
        speaker_state: PrivateState,
        prefix: &History,
        action: &Action,
    ) -> Result<f64, PlanError> {
        self.observed_action_prob(level, speaker_state, prefix, action)
    }
}

/// Whether a message action is a verifying reply.
pub fn is_verifying(action: &Action) -> bool {
    matches!(action, Action::Message(Message::Yes | Message::No))
}
