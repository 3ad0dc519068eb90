//! Session state and the JSON views sent to the human player.

use std::sync::Arc;

use jigsaw_core::eval::{ActionRecord, Transcript};
use jigsaw_core::game::{utility, Color, Shape, Step};
use jigsaw_core::{Action, Cell, History, PipConfig, Role, Scenario, Semantics};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingHuman,
    AwaitingAgent,
    Finished,
}

/// How the agent picks its reply from its policy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReplyMode {
    #[default]
    Sample,
    Argmax,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Scoreboard {
    pub correct_clicks: u32,
    pub wrong_clicks: u32,
    pub words_sent: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Actor {
    Human,
    Agent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub clicked: Cell,
    pub correct: bool,
    pub utility: f64,
    pub clicked_by: Actor,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventBody {
    Action { t: usize, player: Role, by: Actor, action: Action },
    Outcome { outcome: Outcome, scoreboard: Scoreboard },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub seq: usize,
    #[serde(flatten)]
    pub body: EventBody,
}

impl Event {
    pub fn kind(&self) -> &'static str {
        match self.body {
            EventBody::Action { .. } => "action",
            EventBody::Outcome { .. } => "outcome",
        }
    }
}

pub struct Session {
    pub id: String,
    pub sem: Arc<Semantics>,
    pub human_role: Role,
    pub agent_name: String,
    pub config: PipConfig,
    pub history: History,
    pub status: Status,
    pub scoreboard: Scoreboard,
    pub events: Vec<Event>,
    pub outcome: Option<Outcome>,
    pub debug: bool,
    pub mode: ReplyMode,
}

impl Session {
    pub fn scenario(&self) -> &Scenario {
        self.sem.scenario()
    }

    pub fn agent_role(&self) -> Role {
        self.human_role.other()
    }

    /// Status implied by the history.
    fn derived_status(&self) -> Status {
        if self.history.is_terminal() {
            Status::Finished
        } else if self.history.next_player() == self.human_role {
            Status::AwaitingHuman
        } else {
            Status::AwaitingAgent
        }
    }

    /// Appends an already-checked action, emitting events and updating the
    /// scoreboard.
    pub fn record(&mut self, action: Action, by: Actor) {
        let player = self.history.next_player();
        let t = self.history.next_t();
        self.history.push_unchecked(action);
        self.scoreboard.words_sent = self.history.words_sent() as u32;
        self.push_event(EventBody::Action { t, player, by, action });
        if let Action::Click(cell) = action {
            let correct = self.scenario().is_goal(cell);
            if correct {
                self.scoreboard.correct_clicks += 1;
            } else {
                self.scoreboard.wrong_clicks += 1;
            }
            let utility = utility(&self.history, self.scenario(), &self.config.utility())
                .expect("history ends in a click");
            let outcome = Outcome { clicked: cell, correct, utility, clicked_by: by };
            self.outcome = Some(outcome.clone());
            self.push_event(EventBody::Outcome { outcome, scoreboard: self.scoreboard });
        }
        self.status = self.derived_status();
    }

    fn push_event(&mut self, body: EventBody) {
        let seq = self.events.len();
        self.events.push(Event { seq, body });
    }

    pub fn transcript(&self) -> Transcript {
        Transcript::from_history(self.scenario().clone(), &self.history, false)
    }

    pub fn view(&self) -> SessionView {
        let scen = self.scenario();
        let finished = self.status == Status::Finished;
        SessionView {
            id: self.id.clone(),
            status: self.status,
            human_role: self.human_role,
            agent: self.agent_name.clone(),
            config: self.config,
            mode: self.mode,
            debug: self.debug,
            t: self.history.next_t(),
            next_player: (!finished).then(|| self.history.next_player()),
            board: BoardView::for_role(scen, self.human_role),
            history: self
                .history
                .steps()
                .iter()
                .enumerate()
                .map(|(i, Step { role, action })| ActionRecord::from_action(i + 1, *role, action))
                .collect(),
            scoreboard: self.scoreboard,
            outcome: self.outcome.clone(),
            revealed: finished.then(|| scen.clone()),
        }
    }
}

/// What one player can see: public properties plus their own symbols.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoardView {
    pub rows: u8,
    pub cols: u8,
    pub first_player: Role,
    pub goal_symbol: String,
    pub objects: Vec<ObjectView>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObjectView {
    pub row: u8,
    pub col: u8,
    pub color: Color,
    pub shape: Shape,
    pub symbol: String,
}

impl BoardView {
    pub fn for_role(scen: &Scenario, role: Role) -> BoardView {
        BoardView {
            rows: scen.rows,
            cols: scen.cols,
            first_player: scen.first_player,
            goal_symbol: scen.goal.symbol(role).to_string(),
            objects: scen
                .objects
                .iter()
                .map(|o| ObjectView {
                    row: o.row,
                    col: o.col,
                    color: o.color,
                    shape: o.shape,
                    symbol: o.symbol(role).to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub status: Status,
    pub human_role: Role,
    pub agent: String,
    pub config: PipConfig,
    pub mode: ReplyMode,
    pub debug: bool,
    /// Time step of the next action.
    pub t: usize,
    pub next_player: Option<Role>,
    pub board: BoardView,
    pub history: Vec<ActionRecord>,
    pub scoreboard: Scoreboard,
    pub outcome: Option<Outcome>,
    /// Full scenario, both symbol sets included, once the game is over.
    pub revealed: Option<Scenario>,
}
