//! Literal, context-independent meaning of messages.
//!
//! Every word names a property with a mask over the grid cells. A message
//! denotes the set of speaker private states it is consistent with, and a
//! set of private states is a 64-bit set indexed by the state's bit pattern.

use rustc_hash::FxHashMap;

use crate::error::SemanticsError;
use crate::game::{Action, Cell, History, Message, PrivateState, Property, Role, Scenario, CELLS};

/// Set of private states, one bit per state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct StateSet(pub u64);

impl StateSet {
    pub const ALL: StateSet = StateSet(u64::MAX);
    pub const EMPTY: StateSet = StateSet(0);

    pub fn contains(self, s: PrivateState) -> bool {
        self.0 >> s.0 & 1 == 1
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn and(self, other: StateSet) -> StateSet {
        StateSet(self.0 & other.0)
    }

    pub fn complement(self) -> StateSet {
        StateSet(!self.0)
    }

    pub fn is_subset(self, other: StateSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = PrivateState> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let s = bits.trailing_zeros() as u8;
            bits &= bits - 1;
            Some(PrivateState(s))
        })
    }

    /// States sharing at least one cell with `mask`.
    pub fn intersecting(mask: u8) -> StateSet {
        let mut bits = 0u64;
        for (c, states) in CELL_STATES.iter().enumerate() {
            if mask >> c & 1 == 1 {
                bits |= states;
            }
        }
        StateSet(bits)
    }
}

/// Bit `s` of entry `c` is set iff state `s` has cell `c`.
const CELL_STATES: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Cells carrying a property (bit `i` = row-major cell `i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PropertyMask(pub u8);

impl PropertyMask {
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Closed vocabulary of informative words; `yes`/`no` are always available.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<(String, Property)>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::from_properties(Property::ALL)
    }
}

impl Vocabulary {
    pub fn from_properties(props: impl IntoIterator<Item = Property>) -> Self {
        let mut words: Vec<(String, Property)> =
            props.into_iter().map(|p| (p.word().to_string(), p)).collect();
        words.sort_by_key(|(_, p)| *p);
        words.dedup_by_key(|(_, p)| *p);
        Vocabulary { words }
    }

    /// Builds a vocabulary from canonical property words, e.g. `["blue", "top"]`.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Result<Self, SemanticsError> {
        let props = words
            .iter()
            .map(|w| {
                Property::from_word(w.as_ref())
                    .ok_or_else(|| SemanticsError::NotInformative(w.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Vocabulary::from_properties(props))
    }

    pub fn lookup(&self, word: &str) -> Option<Property> {
        self.words.iter().find(|(w, _)| w == word).map(|(_, p)| *p)
    }

    pub fn contains(&self, p: Property) -> bool {
        self.words.iter().any(|(_, q)| *q == p)
    }

    pub fn properties(&self) -> impl Iterator<Item = Property> + '_ {
        self.words.iter().map(|(_, p)| *p)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(|(w, _)| w.as_str())
    }

    /// True for vocabulary words and the verifying words.
    pub fn knows(&self, word: &str) -> bool {
        word == "yes" || word == "no" || self.lookup(word).is_some()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Cells of `scenario` that have property `p`.
pub fn property_mask(scenario: &Scenario, p: Property) -> PropertyMask {
    let (rows, cols) = (scenario.rows, scenario.cols);
    let mut bits = 0u8;
    for (i, o) in scenario.objects.iter().enumerate() {
        let hit = match p {
            Property::Color(c) => o.color == c,
            Property::Shape(s) => o.shape == s,
            Property::Top => o.row == 1,
            Property::Bottom => o.row == rows,
            Property::Left => o.col == 1,
            Property::Right => o.col == cols,
            // middle line of the length-3 axis
            Property::Middle => {
                if cols == 3 {
                    o.col == 2
                } else {
                    o.row == 2
                }
            }
        };
        if hit {
            bits |= 1 << i;
        }
    }
    PropertyMask(bits)
}

/// Mask whose intersection with a state decides membership in `⟦m⟧`.
///
/// Overlapping word masks combine by AND, disjoint ones by OR.
fn combined_mask(scenario: &Scenario, a: Property, b: Option<Property>) -> u8 {
    let va = property_mask(scenario, a).0;
    match b {
        None => va,
        Some(b) => {
            let vb = property_mask(scenario, b).0;
            if va & vb != 0 {
                va & vb
            } else {
                va | vb
            }
        }
    }
}

/// Per-scenario lookup tables for message meanings and action ids.
///
/// Action ids: informative messages `0..M`, then `yes`, `no`, then one
/// click per cell.
#[derive(Clone, Debug)]
pub struct Semantics {
    scenario: Scenario,
    vocab: Vocabulary,
    messages: Vec<Message>,
    denotations: Vec<StateSet>,
    index: FxHashMap<Message, usize>,
    cell_states: [StateSet; CELLS],
    valid_by_state: Vec<Vec<u16>>,
}

impl Semantics {
    pub fn new(scenario: Scenario) -> Self {
        Semantics::with_vocabulary(scenario, Vocabulary::default())
    }

    pub fn with_vocabulary(scenario: Scenario, vocab: Vocabulary) -> Self {
        let props: Vec<Property> = vocab.properties().collect();
        let mut messages: Vec<Message> = props.iter().map(|p| Message::single(*p)).collect();
        for (i, a) in props.iter().enumerate() {
            for b in &props[i + 1..] {
                messages.push(Message::pair(*a, *b));
            }
        }
        let denotations: Vec<StateSet> = messages
            .iter()
            .map(|m| match *m {
                Message::Inform(a, b) => StateSet::intersecting(combined_mask(&scenario, a, b)),
                _ => unreachable!(),
            })
            .collect();
        let index = messages.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let cell_states = std::array::from_fn(|c| StateSet::intersecting(1 << c));
        let valid_by_state = (0..64u8)
            .map(|s| {
                denotations
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.contains(PrivateState(s)))
                    .map(|(i, _)| i as u16)
                    .collect()
            })
            .collect();
        Semantics { scenario, vocab, messages, denotations, index, cell_states, valid_by_state }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn informative_messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn num_messages(&self) -> usize {
        self.messages.len()
    }

    pub fn yes_id(&self) -> u16 {
        self.messages.len() as u16
    }

    pub fn no_id(&self) -> u16 {
        self.messages.len() as u16 + 1
    }

    pub fn click_id(&self, cell_idx: usize) -> u16 {
        (self.messages.len() + 2 + cell_idx) as u16
    }

    pub fn num_actions(&self) -> usize {
        self.messages.len() + 2 + CELLS
    }

    pub fn is_click_id(&self, id: u16) -> bool {
        id as usize >= self.messages.len() + 2
    }

    pub fn click_cell_of(&self, id: u16) -> usize {
        id as usize - self.messages.len() - 2
    }

    pub fn is_informative_id(&self, id: u16) -> bool {
        (id as usize) < self.messages.len()
    }

    pub fn action_id(&self, action: &Action) -> Option<u16> {
        match action {
            Action::Message(Message::Yes) => Some(self.yes_id()),
            Action::Message(Message::No) => Some(self.no_id()),
            Action::Message(m) => self.index.get(m).map(|&i| i as u16),
            Action::Click(c) => {
                self.scenario.in_range(*c).then(|| self.click_id(self.scenario.index_of(*c)))
            }
        }
    }

    pub fn action_of(&self, id: u16) -> Action {
        let i = id as usize;
        let m = self.messages.len();
        if i < m {
            Action::Message(self.messages[i])
        } else if i == m {
            Action::Message(Message::Yes)
        } else if i == m + 1 {
            Action::Message(Message::No)
        } else {
            Action::Click(self.scenario.cell_at(i - m - 2))
        }
    }

    /// `⟦m⟧` for the informative message with id `id`.
    pub fn denotation_of(&self, id: u16) -> StateSet {
        self.denotations[id as usize]
    }

    /// States with cell `c` set.
    pub fn cell_states(&self, c: usize) -> StateSet {
        self.cell_states[c]
    }

    /// Ids of informative messages `s` can truthfully send.
    pub fn valid_message_ids(&self, s: PrivateState) -> &[u16] {
        &self.valid_by_state[s.index()]
    }

    pub fn property_mask(&self, p: Property) -> PropertyMask {
        property_mask(&self.scenario, p)
    }

    /// Denotation of an informative message.
    pub fn message_denotation(&self, m: Message) -> Result<StateSet, SemanticsError> {
        match m {
            Message::Inform(a, b) => match self.index.get(&m) {
                Some(&i) => Ok(self.denotations[i]),
                None => Ok(StateSet::intersecting(combined_mask(&self.scenario, a, b))),
            },
            other => Err(SemanticsError::NotInformative(other.to_string())),
        }
    }

    /// Whether `own` lies in `⟦m⟧`; verifying messages are never valid here.
    pub fn speaker_valid(&self, m: Message, own: PrivateState) -> bool {
        self.message_denotation(m).is_ok_and(|d| d.contains(own))
    }

    /// Partner states consistent with everything the partner of `viewer` said.
    pub fn history_denotation(
        &self,
        history: &History,
        viewer: Role,
    ) -> Result<StateSet, SemanticsError> {
        let steps = history.steps();
        let mut set = StateSet::ALL;
        for (i, step) in steps.iter().enumerate() {
            if step.role == viewer {
                continue;
            }
            let Action::Message(m) = step.action else { continue };
            let constraint = match m {
                Message::Inform(..) => self.message_denotation(m)?,
                Message::Yes | Message::No => {
                    let referent = match i.checked_sub(1).map(|j| steps[j].action) {
                        Some(Action::Message(prev @ Message::Inform(..))) => prev,
                        _ => return Err(SemanticsError::MalformedHistory { t: i + 1 }),
                    };
                    let d = self.message_denotation(referent)?;
                    if m == Message::Yes {
                        d
                    } else {
                        d.complement()
                    }
                }
            };
            set = set.and(constraint);
        }
        Ok(set)
    }

    pub fn cell(&self, idx: usize) -> Cell {
        self.scenario.cell_at(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Color, Shape};
    use crate::testing::scen_a;

    fn p(w: &str) -> Property {
        Property::from_word(w).unwrap()
    }

    fn state(cells: &[(u8, u8)]) -> PrivateState {
        PrivateState(cells.iter().fold(0, |acc, &(r, c)| acc | 1 << ((r - 1) * 3 + c - 1)))
    }

    #[test]
    fn intersecting_matches_enumeration() {
        for mask in 0..64u8 {
            let expect = (0..64u64).filter(|&s| s as u8 & mask != 0).fold(0, |b, s| b | 1 << s);
            assert_eq!(StateSet::intersecting(mask).0, expect, "mask {mask:06b}");
        }
    }

    #[test]
    fn masks_on_scen_a() {
        let s = scen_a();
        assert_eq!(property_mask(&s, Property::Color(Color::Blue)).0, state(&[(1, 1), (2, 2)]).0);
        assert_eq!(property_mask(&s, Property::Middle).0, state(&[(1, 2), (2, 2)]).0);
        assert_eq!(property_mask(&s, Property::Top).0, state(&[(1, 1), (1, 2), (1, 3)]).0);
        assert_eq!(property_mask(&s, Property::Right).0, state(&[(1, 3), (2, 3)]).0);
        assert_eq!(property_mask(&s, Property::Shape(Shape::Circle)).0, state(&[(1, 2), (2, 1)]).0);
    }

    #[test]
    fn middle_binds_to_length_three_axis() {
        let mut s = scen_a();
        s.rows = 3;
        s.cols = 2;
        for (i, o) in s.objects.iter_mut().enumerate() {
            o.row = (i / 2) as u8 + 1;
            o.col = (i % 2) as u8 + 1;
        }
        let mask = property_mask(&s, Property::Middle).0;
        assert_eq!(mask, 0b00_1100);
    }

    #[test]
    fn two_word_readings() {
        let sem = Semantics::new(scen_a());
        let or = Message::pair(p("square"), p("circle"));
        assert!(!sem.speaker_valid(or, state(&[(1, 3)])));
        let and = Message::pair(p("blue"), p("top"));
        assert!(sem.speaker_valid(and, state(&[(1, 1)])));
        assert!(!sem.speaker_valid(and, state(&[(2, 2)])));
        assert!(sem.speaker_valid(Message::single(p("blue")), state(&[(2, 2)])));
        assert!(sem.speaker_valid(Message::single(p("circle")), state(&[(1, 1), (1, 3), (2, 1)])));
        assert!(!sem.speaker_valid(Message::single(p("yellow")), state(&[(1, 1)])));
        assert!(sem.speaker_valid(Message::pair(p("square"), p("diamond")), state(&[(2, 2)])));
        assert!(sem.message_denotation(Message::Yes).is_err());
    }

    #[test]
    fn history_denotations() {
        let sem = Semantics::new(scen_a());
        let blue = Action::Message(Message::single(p("blue")));
        let empty = History::new(Role::Letters);
        assert_eq!(sem.history_denotation(&empty, Role::Digits).unwrap().len(), 64);
        let h = History::from_actions(Role::Letters, [blue]);
        assert_eq!(sem.history_denotation(&h, Role::Digits).unwrap().len(), 48);
        // the speaker's own message does not constrain what they believe
        assert_eq!(sem.history_denotation(&h, Role::Letters).unwrap().len(), 64);
        let h = History::from_actions(Role::Letters, [blue, Action::Message(Message::No)]);
        let set = sem.history_denotation(&h, Role::Letters).unwrap();
        assert_eq!(set.len(), 16);
        assert!(set.iter().all(|s| s.0 & 0b01_0001 == 0));
        let bad = History::from_actions(Role::Letters, [Action::Message(Message::Yes)]);
        assert_eq!(
            sem.history_denotation(&bad, Role::Digits),
            Err(SemanticsError::MalformedHistory { t: 1 })
        );
    }

    #[test]
    fn action_ids_round_trip() {
        let sem = Semantics::new(scen_a());
        assert_eq!(sem.num_messages(), 66);
        for id in 0..sem.num_actions() as u16 {
            assert_eq!(sem.action_id(&sem.action_of(id)), Some(id));
        }
    }
}
