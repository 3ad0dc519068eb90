//! Times decisions after random prefixes on generated scenarios.
//! Usage: prefix_timing [scenarios] [prefixes]

use std::sync::Arc;
use std::time::Instant;

use jigsaw_core::game::{legal_actions, Action, History};
use jigsaw_core::scenario_gen::generate;
use jigsaw_core::{PipConfig, Planner, Semantics};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let scenarios = args.first().copied().unwrap_or(20);
    let prefixes = args.get(1).copied().unwrap_or(10);
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let all = Instant::now();
    for sc in 0..scenarios {
        let scen = generate(9000 + sc).unwrap();
        let sem = Arc::new(Semantics::new(scen.clone()));
        let mut planner = Planner::new(sem.clone(), PipConfig::default()).unwrap().with_fallback(true);
        for _ in 0..prefixes {
            let len = rng.gen_range(0..=3);
            let mut h = History::new(scen.first_player);
            for _ in 0..len {
                let own = scen.private_state(h.next_player());
                let acts: Vec<Action> =
                    legal_actions(&sem, &h, own).unwrap().into_iter().filter(|a| !a.is_click()).collect();
                h.push_unchecked(*acts.choose(&mut rng).unwrap());
            }
            let t = Instant::now();
            planner.pip_policy(scen.private_state(h.next_player()), &h).unwrap();
            println!("scenario {sc} len {len}: {:?} {:?}", t.elapsed(), planner.stats());
        }
    }
    println!("total {:?}", all.elapsed());
}
