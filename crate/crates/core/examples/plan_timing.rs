//! Times root decisions of the full model on the reference scenario.

use std::sync::Arc;
use std::time::Instant;

use jigsaw_core::game::{Action, History, Message, Property};
use jigsaw_core::testing::scen_a;
use jigsaw_core::{PipConfig, Planner, Role, Semantics};

fn main() {
    let sem = Arc::new(Semantics::new(scen_a()));
    let mut planner = Planner::new(sem.clone(), PipConfig::default()).unwrap();
    let letters = sem.scenario().private_state(Role::Letters);
    let digits = sem.scenario().private_state(Role::Digits);
    let blue = Action::Message(Message::single(Property::from_word("blue").unwrap()));
    let cases = [
        (letters, History::new(Role::Letters)),
        (digits, History::from_actions(Role::Letters, [blue])),
        (letters, History::from_actions(Role::Letters, [blue, Action::Message(Message::Yes)])),
    ];
    for (own, h) in cases {
        let t = Instant::now();
        let d = planner.pip_policy(own, &h).unwrap();
        println!(
            "len {} -> {:?} p={:.3} in {:?}; {:?}",
            h.len(),
            d.argmax().map(|a| a.to_string()),
            d.entries.iter().map(|e| e.1).fold(0.0, f64::max),
            t.elapsed(),
            planner.stats()
        );
    }
}
