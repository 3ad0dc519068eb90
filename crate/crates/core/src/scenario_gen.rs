//! Random scenarios under the three acceptance criteria.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::GameError;
use crate::game::{Color, Goal, ObjectSpec, Property, Role, Scenario, Shape};
use crate::semantics::property_mask;

pub const LETTERS: [&str; 3] = ["A", "B", "C"];
pub const DIGITS: [&str; 3] = ["1", "2", "3"];
pub const MAX_ATTEMPTS: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriteriaReport {
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Checks (i) a unique goal object, (ii) enough goal-consistent objects for
/// both players, (iii) no player's goal-consistent objects all share a
/// color, a shape or a line.
pub fn check_criteria(scenario: &Scenario) -> CriteriaReport {
    let mut failures = Vec::new();
    let goals = scenario
        .objects
        .iter()
        .filter(|o| o.letter == scenario.goal.letter && o.digit == scenario.goal.digit)
        .count();
    if goals != 1 {
        failures.push(format!("(i) {goals} objects carry the goal combination"));
    }

    let letters = scenario.private_state(Role::Letters);
    let digits = scenario.private_state(Role::Digits);
    for (role, s) in [(Role::Letters, letters), (Role::Digits, digits)] {
        if s.count() < 2 {
            failures.push(format!("(ii) {role} has {} goal-consistent objects", s.count()));
        }
    }
    let total = (letters.count() + digits.count()) as usize;
    if total < scenario.num_cells() {
        failures.push(format!(
            "(ii) goal-consistent objects sum to {total}, below {}",
            scenario.num_cells()
        ));
    }

    for (role, s) in [(Role::Letters, letters), (Role::Digits, digits)] {
        if s.0 == 0 {
            continue;
        }
        let objs: Vec<&ObjectSpec> = s.cells().map(|c| scenario.object(c)).collect();
        if objs.iter().all(|o| o.color == objs[0].color) {
            failures.push(format!("(iii) {role} objects are all {}", word(objs[0].color)));
        }
        if objs.iter().all(|o| o.shape == objs[0].shape) {
            failures.push(format!("(iii) {role} objects are all {}s", shape_word(objs[0].shape)));
        }
        for p in [Property::Left, Property::Right, Property::Top, Property::Bottom, Property::Middle]
        {
            let line = property_mask(scenario, p).0;
            if s.0 & !line == 0 {
                failures.push(format!("(iii) {role} objects all lie in the {} line", p.word()));
            }
        }
    }
    CriteriaReport { pass: failures.is_empty(), failures }
}

fn word(c: Color) -> &'static str {
    Property::Color(c).word()
}

fn shape_word(s: Shape) -> &'static str {
    Property::Shape(s).word()
}

/// One unfiltered draw.
pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Scenario {
    let (rows, cols) = if rng.gen::<bool>() { (2, 3) } else { (3, 2) };
    let mut objects = Vec::with_capacity(6);
    for row in 1..=rows {
        for col in 1..=cols {
            objects.push(ObjectSpec {
                row,
                col,
                color: *Color::ALL.choose(rng).unwrap(),
                shape: *Shape::ALL.choose(rng).unwrap(),
                letter: LETTERS.choose(rng).unwrap().to_string(),
                digit: DIGITS.choose(rng).unwrap().to_string(),
            });
        }
    }
    let g = objects.choose(rng).unwrap();
    let goal = Goal { letter: g.letter.clone(), digit: g.digit.clone() };
    let first_player = if rng.gen::<bool>() { Role::Letters } else { Role::Digits };
    Scenario { rows, cols, goal, first_player, objects }
}

/// Rejection-samples a scenario that passes [`check_criteria`].
pub fn generate(seed: u64) -> Result<Scenario, GameError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with(&mut rng)
}

pub fn generate_with<R: Rng + ?Sized>(rng: &mut R) -> Result<Scenario, GameError> {
    for _ in 0..MAX_ATTEMPTS {
        let s = draw(rng);
        if check_criteria(&s).pass {
            return s.validate();
        }
    }
    Err(GameError::InvalidArgument(format!(
        "no scenario passed the criteria in {MAX_ATTEMPTS} attempts"
    )))
}

/// `count` scenarios from consecutive seeds starting at `seed`.
pub fn generate_many(count: usize, seed: u64) -> Result<Vec<Scenario>, GameError> {
    (0..count as u64).map(|i| generate(seed.wrapping_add(i))).collect()
}

/// Fraction of `draws` raw samples that pass the criteria.
pub fn acceptance_rate(seed: u64, draws: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ok = (0..draws).filter(|_| check_criteria(&draw(&mut rng)).pass).count();
    ok as f64 / draws as f64
}
