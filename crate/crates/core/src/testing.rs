//! Shared fixtures for tests, benchmarks and examples.

use crate::game::{Color, Goal, ObjectSpec, Role, Scenario, Shape};

fn obj(row: u8, col: u8, color: Color, shape: Shape, letter: &str, digit: &str) -> ObjectSpec {
    ObjectSpec { row, col, color, shape, letter: letter.into(), digit: digit.into() }
}

/// The 2x3 reference scenario: goal B2 at (1,1), Letters see
/// {(1,1),(1,2),(2,2)} and Digits see {(1,1),(1,3),(2,1)}.
pub fn scen_a() -> Scenario {
    use Color::*;
    use Shape::*;
    Scenario {
        rows: 2,
        cols: 3,
        goal: Goal { letter: "B".into(), digit: "2".into() },
        first_player: Role::Letters,
        objects: vec![
            obj(1, 1, Blue, Square, "B", "2"),
            obj(1, 2, Yellow, Circle, "B", "1"),
            obj(1, 3, Green, Diamond, "A", "2"),
            obj(2, 1, Green, Circle, "A", "2"),
            obj(2, 2, Blue, Diamond, "B", "1"),
            obj(2, 3, Yellow, Square, "A", "1"),
        ],
    }
    .validate()
    .expect("fixture is valid")
}
