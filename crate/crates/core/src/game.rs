//! Game state: scenarios, private states, actions, histories and utility.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Rule};
use crate::semantics::Semantics;

/// Number of cells on every supported grid (2x3 or 3x2).
pub const CELLS: usize = 6;
/// Number of distinct private states over [`CELLS`] cells.
pub const NUM_STATES: usize = 1 << CELLS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Letters,
    Digits,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Letters => Role::Digits,
            Role::Digits => Role::Letters,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Letters => "letters",
            Role::Digits => "digits",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s.to_ascii_lowercase().as_str() {
            "letters" => Some(Role::Letters),
            "digits" => Some(Role::Digits),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Yellow,
    Green,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Yellow, Color::Green];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Diamond,
    Circle,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Square, Shape::Diamond, Shape::Circle];
}

/// A grid position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub row: u8,
    pub col: u8,
}

impl Cell {
    pub fn new(row: u8, col: u8) -> Self {
        Cell { row, col }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub row: u8,
    pub col: u8,
    pub color: Color,
    pub shape: Shape,
    pub letter: String,
    pub digit: String,
}

impl ObjectSpec {
    pub fn cell(&self) -> Cell {
        Cell::new(self.row, self.col)
    }

    pub fn symbol(&self, role: Role) -> &str {
        match role {
            Role::Letters => &self.letter,
            Role::Digits => &self.digit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Goal {
    pub letter: String,
    pub digit: String,
}

impl Goal {
    pub fn symbol(&self, role: Role) -> &str {
        match role {
            Role::Letters => &self.letter,
            Role::Digits => &self.digit,
        }
    }
}

/// Shared world: public object properties, hidden symbols and the goal.
///
/// Objects are kept in row-major order after [`Scenario::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub rows: u8,
    pub cols: u8,
    pub goal: Goal,
    pub first_player: Role,
    pub objects: Vec<ObjectSpec>,
}

impl Scenario {
    /// Checks structural invariants and sorts objects row-major.
    pub fn validate(mut self) -> Result<Scenario, GameError> {
        let bad = |msg: String| Err(GameError::InvalidScenario(msg));
        if !matches!((self.rows, self.cols), (2, 3) | (3, 2)) {
            return bad(format!("grid must be 2x3 or 3x2, got {}x{}", self.rows, self.cols));
        }
        if self.objects.len() != CELLS {
            return bad(format!("expected {} objects, got {}", CELLS, self.objects.len()));
        }
        let mut seen = [false; CELLS];
        for o in &self.objects {
            if o.row < 1 || o.row > self.rows || o.col < 1 || o.col > self.cols {
                return bad(format!("object at ({},{}) is outside the grid", o.row, o.col));
            }
            let idx = self.index_of(o.cell());
            if seen[idx] {
                return bad(format!("two objects share cell ({},{})", o.row, o.col));
            }
            seen[idx] = true;
        }
        let cols = self.cols;
        self.objects
            .sort_by_key(|o| (o.row as usize - 1) * cols as usize + (o.col as usize - 1));
        if self.goal_cell().is_none() {
            return bad(format!(
                "no object carries the goal combination {}{}",
                self.goal.letter, self.goal.digit
            ));
        }
        Ok(self)
    }

    pub fn num_cells(&self) -> usize {
        self.rows as usize * self.cols as usize
    }

    /// Row-major index of a cell.
    pub fn index_of(&self, cell: Cell) -> usize {
        (cell.row as usize - 1) * self.cols as usize + (cell.col as usize - 1)
    }

    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new((idx / self.cols as usize) as u8 + 1, (idx % self.cols as usize) as u8 + 1)
    }

    pub fn in_range(&self, cell: Cell) -> bool {
        cell.row >= 1 && cell.row <= self.rows && cell.col >= 1 && cell.col <= self.cols
    }

    pub fn object(&self, idx: usize) -> &ObjectSpec {
        &self.objects[idx]
    }

    /// First cell (row-major) whose object carries both goal symbols.
    pub fn goal_cell(&self) -> Option<Cell> {
        self.objects
            .iter()
            .find(|o| o.letter == self.goal.letter && o.digit == self.goal.digit)
            .map(ObjectSpec::cell)
    }

    pub fn is_goal(&self, cell: Cell) -> bool {
        self.objects.iter().any(|o| {
            o.cell() == cell && o.letter == self.goal.letter && o.digit == self.goal.digit
        })
    }

    /// Goal-consistent cells as seen by `role`.
    pub fn private_state(&self, role: Role) -> PrivateState {
        let want = self.goal.symbol(role);
        let mut bits = 0u8;
        for o in &self.objects {
            if o.symbol(role) == want {
                bits |= 1 << self.index_of(o.cell());
            }
        }
        PrivateState(bits)
    }
}

/// Bit matrix over the grid cells (row-major bit order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PrivateState(pub u8);

impl PrivateState {
    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, idx: usize) -> bool {
        self.0 >> idx & 1 == 1
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn cells(self) -> impl Iterator<Item = usize> {
        (0..CELLS).filter(move |&i| self.contains(i))
    }

    pub fn intersects(self, other: PrivateState) -> bool {
        self.0 & other.0 != 0
    }

    pub fn to_matrix(self, rows: u8, cols: u8) -> Vec<Vec<u8>> {
        (0..rows as usize)
            .map(|r| (0..cols as usize).map(|c| (self.0 >> (r * cols as usize + c)) & 1).collect())
            .collect()
    }
}

/// Single grid-position or appearance property a word can name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Color(Color),
    Shape(Shape),
    Top,
    Bottom,
    Left,
    Right,
    Middle,
}

impl Property {
    pub const ALL: [Property; 11] = [
        Property::Color(Color::Blue),
        Property::Color(Color::Yellow),
        Property::Color(Color::Green),
        Property::Shape(Shape::Square),
        Property::Shape(Shape::Diamond),
        Property::Shape(Shape::Circle),
        Property::Top,
        Property::Bottom,
        Property::Left,
        Property::Right,
        Property::Middle,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Property::Color(Color::Blue) => "blue",
            Property::Color(Color::Yellow) => "yellow",
            Property::Color(Color::Green) => "green",
            Property::Shape(Shape::Square) => "square",
            Property::Shape(Shape::Diamond) => "diamond",
            Property::Shape(Shape::Circle) => "circle",
            Property::Top => "top",
            Property::Bottom => "bottom",
            Property::Left => "left",
            Property::Right => "right",
            Property::Middle => "middle",
        }
    }

    pub fn from_word(word: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.word() == word)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

/// A message: one or two informative words, or a verifying yes/no.
///
/// Two-word messages are stored with their words in canonical order, so
/// `blue top` and `top blue` are the same message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Message {
    Inform(Property, Option<Property>),
    Yes,
    No,
}

impl Message {
    pub fn single(p: Property) -> Message {
        Message::Inform(p, None)
    }

    pub fn pair(a: Property, b: Property) -> Message {
        match a.cmp(&b) {
            std::cmp::Ordering::Equal => Message::Inform(a, None),
            std::cmp::Ordering::Less => Message::Inform(a, Some(b)),
            std::cmp::Ordering::Greater => Message::Inform(b, Some(a)),
        }
    }

    pub fn is_informative(self) -> bool {
        matches!(self, Message::Inform(..))
    }

    pub fn word_count(self) -> usize {
        match self {
            Message::Inform(_, Some(_)) => 2,
            _ => 1,
        }
    }

    pub fn words(self) -> Vec<&'static str> {
        match self {
            Message::Inform(a, None) => vec![a.word()],
            Message::Inform(a, Some(b)) => vec![a.word(), b.word()],
            Message::Yes => vec!["yes"],
            Message::No => vec!["no"],
        }
    }

    /// Strict parse of a lowercase space-separated message against the
    /// closed vocabulary.
    pub fn parse(text: &str, vocab: &crate::semantics::Vocabulary) -> Result<Message, GameError> {
        let words: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
        Message::from_words(&words, vocab)
    }

    pub fn from_words<S: AsRef<str>>(
        words: &[S],
        vocab: &crate::semantics::Vocabulary,
    ) -> Result<Message, GameError> {
        let rule = |r| Err(GameError::Rule(r));
        match words.len() {
            0 => return rule(Rule::EmptyMessage),
            1 | 2 => {}
            _ => return rule(Rule::TooManyWords),
        }
        let first = words[0].as_ref();
        if words.len() == 1 {
            match first {
                "yes" => return Ok(Message::Yes),
                "no" => return Ok(Message::No),
                _ => {}
            }
        }
        let mut props = Vec::with_capacity(2);
        for w in words {
            let w = w.as_ref();
            if w == "yes" || w == "no" {
                return rule(Rule::MixedVerifying);
            }
            match vocab.lookup(w) {
                Some(p) => props.push(p),
                None => return Err(GameError::UnknownWord(w.to_string())),
            }
        }
        Ok(match props[..] {
            [a] => Message::single(a),
            [a, b] => Message::pair(a, b),
            _ => unreachable!(),
        })
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.words().join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Message(Message),
    Click(Cell),
}

impl Action {
    pub fn is_click(&self) -> bool {
        matches!(self, Action::Click(_))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ActionJson {
    Message { words: Vec<String> },
    Click { row: u8, col: u8 },
}

/// JSON form `{"type":"message","words":["blue"]}` or
/// `{"type":"click","row":1,"col":2}`.
impl Serialize for Action {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match *self {
            Action::Message(m) => ActionJson::Message {
                words: m.words().into_iter().map(String::from).collect(),
            },
            Action::Click(c) => ActionJson::Click { row: c.row, col: c.col },
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match ActionJson::deserialize(de)? {
            ActionJson::Message { words } => {
                Message::from_words(&words, &crate::semantics::Vocabulary::default())
                    .map(Action::Message)
                    .map_err(serde::de::Error::custom)
            }
            ActionJson::Click { row, col } => Ok(Action::Click(Cell::new(row, col))),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Message(m) => write!(f, "{m}"),
            Action::Click(c) => write!(f, "click{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub role: Role,
    pub action: Action,
}

/// Ordered actions of one game; step `i` happens at time `t = i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct History {
    first_player: Role,
    steps: Vec<Step>,
}

impl History {
    pub fn new(first_player: Role) -> Self {
        History { first_player, steps: Vec::new() }
    }

    /// Builds a history from bare actions, assigning alternating speakers.
    /// No legality checks.
    pub fn from_actions(first_player: Role, actions: impl IntoIterator<Item = Action>) -> Self {
        let mut h = History::new(first_player);
        for a in actions {
            let role = h.next_player();
            h.steps.push(Step { role, action: a });
        }
        h
    }

    pub fn first_player(&self) -> Role {
        self.first_player
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn actions(&self) -> impl Iterator<Item = Action> + '_ {
        self.steps.iter().map(|s| s.action)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Time index of the next action.
    pub fn next_t(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn next_player(&self) -> Role {
        active_player_unchecked(self.next_t(), self.first_player)
    }

    pub fn is_terminal(&self) -> bool {
        self.steps.last().is_some_and(|s| s.action.is_click())
    }

    pub fn last(&self) -> Option<&Step> {
        self.steps.last()
    }

    pub fn prefix(&self, len: usize) -> History {
        History { first_player: self.first_player, steps: self.steps[..len].to_vec() }
    }

    /// Appends without legality checks; see [`apply_action`].
    pub fn push_unchecked(&mut self, action: Action) {
        let role = self.next_player();
        self.steps.push(Step { role, action });
    }

    /// Number of words sent by both players.
    pub fn words_sent(&self) -> usize {
        self.steps
            .iter()
            .map(|s| match s.action {
                Action::Message(m) => m.word_count(),
                Action::Click(_) => 0,
            })
            .sum()
    }
}

fn active_player_unchecked(t: usize, first_player: Role) -> Role {
    if t % 2 == 1 {
        first_player
    } else {
        first_player.other()
    }
}

/// Player acting at time `t` (1-based).
pub fn active_player(t: usize, first_player: Role) -> Result<Role, GameError> {
    if t < 1 {
        return Err(GameError::InvalidArgument("time index starts at 1".into()));
    }
    Ok(active_player_unchecked(t, first_player))
}

/// Reward constants. Defaults: action cost -50, goal +100, wrong object -100.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityConfig {
    pub action_cost: f64,
    pub reward: f64,
    pub penalty: f64,
}

impl Default for UtilityConfig {
    fn default() -> Self {
        UtilityConfig { action_cost: -50.0, reward: 100.0, penalty: -100.0 }
    }
}

impl UtilityConfig {
    /// Utility after `k` actions (the last one a click).
    pub fn terminal(&self, k: usize, correct: bool) -> f64 {
        self.action_cost * k as f64 + if correct { self.reward } else { self.penalty }
    }

    /// Utility of ending a game of `k` actions without finding the goal.
    pub fn abandon(&self, k: usize) -> f64 {
        self.action_cost * k as f64 + self.penalty
    }
}

/// Utility of a terminal history.
pub fn utility(
    history: &History,
    scenario: &Scenario,
    cfg: &UtilityConfig,
) -> Result<f64, GameError> {
    match history.last() {
        Some(Step { action: Action::Click(cell), .. }) => {
            Ok(cfg.terminal(history.len(), scenario.is_goal(*cell)))
        }
        _ => Err(GameError::InvalidArgument("utility requires a history ending in a click".into())),
    }
}

/// Utility of stopping now without a click.
pub fn abandon_utility(history: &History, cfg: &UtilityConfig) -> f64 {
    cfg.abandon(history.len())
}

/// Checks one action against the rules for the player whose turn it is.
pub fn check_action(
    sem: &Semantics,
    history: &History,
    own: PrivateState,
    action: &Action,
) -> Result<(), Rule> {
    if history.is_terminal() {
        return Err(Rule::GameOver);
    }
    match *action {
        Action::Click(cell) => {
            if history.is_empty() {
                return Err(Rule::FirstStepClick);
            }
            if !sem.scenario().in_range(cell) {
                return Err(Rule::ClickOutOfRange);
            }
            if !own.contains(sem.scenario().index_of(cell)) {
                return Err(Rule::ClickNotGoalConsistent);
            }
            Ok(())
        }
        Action::Message(m) => match m {
            Message::Inform(a, b) => {
                if !sem.vocabulary().contains(a) || b.is_some_and(|b| !sem.vocabulary().contains(b))
                {
                    return Err(Rule::UnknownWord);
                }
                if sem.speaker_valid(m, own) {
                    Ok(())
                } else {
                    Err(Rule::NotSpeakerValid)
                }
            }
            Message::Yes | Message::No => {
                let referent = match history.last() {
                    Some(Step { action: Action::Message(prev @ Message::Inform(..)), .. }) => *prev,
                    _ => return Err(Rule::VerifyWithoutReference),
                };
                let holds = sem.speaker_valid(referent, own);
                if holds == (m == Message::Yes) {
                    Ok(())
                } else {
                    Err(Rule::NotSpeakerValid)
                }
            }
        },
    }
}

/// All actions the player to move may take.
pub fn legal_actions(
    sem: &Semantics,
    history: &History,
    own: PrivateState,
) -> Result<Vec<Action>, GameError> {
    if history.is_terminal() {
        return Err(GameError::Rule(Rule::GameOver));
    }
    let mut out: Vec<Action> = sem
        .informative_messages()
        .iter()
        .filter(|m| sem.speaker_valid(**m, own))
        .map(|m| Action::Message(*m))
        .collect();
    if let Some(Step { action: Action::Message(prev @ Message::Inform(..)), .. }) = history.last() {
        out.push(Action::Message(if sem.speaker_valid(*prev, own) {
            Message::Yes
        } else {
            Message::No
        }));
    }
    if !history.is_empty() {
        let scen = sem.scenario();
        out.extend(own.cells().map(|i| Action::Click(scen.cell_at(i))));
    }
    Ok(out)
}

/// Appends `action` for the player to move, enforcing the rules.
pub fn apply_action(
    sem: &Semantics,
    history: &History,
    action: Action,
) -> Result<History, GameError> {
    let role = history.next_player();
    let own = sem.scenario().private_state(role);
    check_action(sem, history, own, &action).map_err(GameError::Rule)?;
    let mut next = history.clone();
    next.steps.push(Step { role, action });
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::scen_a;

    #[test]
    fn active_player_alternates() {
        assert_eq!(active_player(1, Role::Letters).unwrap(), Role::Letters);
        assert_eq!(active_player(2, Role::Letters).unwrap(), Role::Digits);
        assert_eq!(active_player(5, Role::Digits).unwrap(), Role::Digits);
        assert!(active_player(0, Role::Digits).is_err());
    }

    #[test]
    fn utility_table() {
        let u = UtilityConfig::default();
        assert_eq!(u.terminal(3, true), -50.0);
        assert_eq!(u.terminal(2, false), -200.0);
        assert_eq!(u.terminal(2, true), 0.0);
        assert_eq!(u.abandon(1), -150.0);
        assert_eq!(u.abandon(0), -100.0);
        assert_eq!(u.abandon(4), -300.0);
        for k in 1..8 {
            assert!(u.terminal(k + 1, true) < u.terminal(k, true));
            assert_eq!(u.terminal(k, true) - u.terminal(k, false), 200.0);
        }
    }

    #[test]
    fn utility_of_histories() {
        let sem = Semantics::new(scen_a());
        let blue = Action::Message(Message::single(Property::Color(Color::Blue)));
        let h = History::from_actions(Role::Letters, [blue, Action::Click(Cell::new(1, 1))]);
        assert_eq!(utility(&h, sem.scenario(), &UtilityConfig::default()).unwrap(), 0.0);
        let h = History::from_actions(Role::Letters, [blue, Action::Click(Cell::new(1, 3))]);
        assert_eq!(utility(&h, sem.scenario(), &UtilityConfig::default()).unwrap(), -200.0);
        let h = History::from_actions(Role::Letters, [blue, blue, Action::Click(Cell::new(1, 1))]);
        assert_eq!(utility(&h, sem.scenario(), &UtilityConfig::default()).unwrap(), -50.0);
        let open = History::from_actions(Role::Letters, [blue]);
        assert!(utility(&open, sem.scenario(), &UtilityConfig::default()).is_err());
    }

    #[test]
    fn private_states_of_scen_a() {
        let s = scen_a();
        assert_eq!(s.private_state(Role::Letters), PrivateState(0b01_0011));
        assert_eq!(s.private_state(Role::Digits), PrivateState(0b00_1101));
        assert_eq!(s.goal_cell(), Some(Cell::new(1, 1)));
        let both = s.private_state(Role::Letters).0 & s.private_state(Role::Digits).0;
        assert_eq!(both, 1);
    }

    #[test]
    fn first_step_has_no_clicks() {
        let sem = Semantics::new(scen_a());
        for s in 1..NUM_STATES as u8 {
            let acts = legal_actions(&sem, &History::new(Role::Letters), PrivateState(s)).unwrap();
            assert!(acts.iter().all(|a| !a.is_click()));
        }
    }

    #[test]
    fn click_set_equals_bit_set() {
        let sem = Semantics::new(scen_a());
        let blue = Action::Message(Message::single(Property::Color(Color::Blue)));
        let h = History::from_actions(Role::Letters, [blue]);
        let own = sem.scenario().private_state(Role::Digits);
        let clicks: Vec<Cell> = legal_actions(&sem, &h, own)
            .unwrap()
            .into_iter()
            .filter_map(|a| match a {
                Action::Click(c) => Some(c),
                _ => None,
            })
            .collect();
        assert_eq!(clicks, vec![Cell::new(1, 1), Cell::new(1, 3), Cell::new(2, 1)]);
    }

    #[test]
    fn verifying_replies_follow_truth() {
        let sem = Semantics::new(scen_a());
        let blue = Action::Message(Message::single(Property::Color(Color::Blue)));
        let h = History::from_actions(Role::Letters, [blue]);
        // digits state {(1,1),(1,3),(2,1)} holds the blue (1,1)
        let acts = legal_actions(&sem, &h, PrivateState(0b00_1101)).unwrap();
        assert!(acts.contains(&Action::Message(Message::Yes)));
        assert!(!acts.contains(&Action::Message(Message::No)));
        // a state with no blue cell can only deny
        let acts = legal_actions(&sem, &h, PrivateState(0b00_0100)).unwrap();
        assert!(acts.contains(&Action::Message(Message::No)));
        assert!(!acts.contains(&Action::Message(Message::Yes)));
        // no verifying reply to an opening move
        let acts = legal_actions(&sem, &History::new(Role::Letters), PrivateState(63)).unwrap();
        assert!(!acts.iter().any(|a| matches!(a, Action::Message(Message::Yes | Message::No))));
    }

    #[test]
    fn apply_action_rules() {
        let sem = Semantics::new(scen_a());
        let blue = Action::Message(Message::single(Property::Color(Color::Blue)));
        let h0 = History::new(Role::Letters);
        let h1 = apply_action(&sem, &h0, blue).unwrap();
        assert_eq!(h1.len(), 1);
        let h2 = apply_action(&sem, &h1, Action::Click(Cell::new(1, 1))).unwrap();
        assert!(h2.is_terminal());
        assert_eq!(
            apply_action(&sem, &h0, Action::Click(Cell::new(1, 1))).unwrap_err(),
            GameError::Rule(Rule::FirstStepClick)
        );
        assert_eq!(
            apply_action(&sem, &h2, blue).unwrap_err(),
            GameError::Rule(Rule::GameOver)
        );
        // letters state has no green object
        let green = Action::Message(Message::single(Property::Color(Color::Green)));
        assert_eq!(
            apply_action(&sem, &h0, green).unwrap_err(),
            GameError::Rule(Rule::NotSpeakerValid)
        );
    }

    #[test]
    fn message_parsing() {
        let v = crate::semantics::Vocabulary::default();
        assert_eq!(
            Message::parse("top blue", &v).unwrap(),
            Message::parse("blue top", &v).unwrap()
        );
        assert_eq!(Message::parse("blue top left", &v), Err(GameError::Rule(Rule::TooManyWords)));
        assert_eq!(Message::parse("yes", &v).unwrap(), Message::Yes);
        assert_eq!(Message::parse("yes blue", &v), Err(GameError::Rule(Rule::MixedVerifying)));
        assert!(matches!(Message::parse("round", &v), Err(GameError::UnknownWord(_))));
        assert_eq!(Message::parse("", &v), Err(GameError::Rule(Rule::EmptyMessage)));
    }

    #[test]
    fn scenario_validation() {
        let mut s = scen_a();
        s.objects.reverse();
        let s = s.validate().unwrap();
        assert_eq!(s.objects[0].cell(), Cell::new(1, 1));
        let mut bad = scen_a();
        bad.rows = 3;
        bad.cols = 3;
        assert!(bad.validate().is_err());
        let mut dup = scen_a();
        dup.objects[1].col = 1;
        assert!(dup.validate().is_err());
    }
}
