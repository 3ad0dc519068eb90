//! Acceptance checks, one line per criterion. Run with
//! `cargo test --release -p jigsaw-cli --test acceptance`.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use jigsaw_core::agent::PolicySpec;
use jigsaw_core::baselines::{greedy_click_policy, greedy_message_policy, random_policy};
use jigsaw_core::belief::{
    belief_marginals, literal_posterior, literal_posterior_window, pragmatic_posterior,
    BeliefMarginals, Posterior, PriorKind,
};
use jigsaw_core::eval::{self, canonicalize_message, EvalOptions};
use jigsaw_core::game::{check_action, legal_actions, utility, Property, UtilityConfig};
use jigsaw_core::harness::{run_batch, DEFAULT_MAX_TURNS};
use jigsaw_core::planning::{gains_to_probs, Ablation};
use jigsaw_core::scenario_gen::{check_criteria, generate, generate_many};
use jigsaw_core::testing::scen_a;
use jigsaw_core::{
    Action, Cell, History, Message, PipConfig, Planner, PrivateState, Role, Scenario, Semantics,
    StateSet, Vocabulary,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

fn all_properties() -> Vec<Property> {
    Vocabulary::default().properties().collect()
}

fn msg(words: &str) -> Action {
    Action::Message(Message::parse(words, &Vocabulary::default()).unwrap())
}

/// Whether object `idx` has property `p`, read off the definitions.
fn has(s: &Scenario, idx: usize, p: Property) -> bool {
    let o = &s.objects[idx];
    match p {
        Property::Color(c) => o.color == c,
        Property::Shape(sh) => o.shape == sh,
        Property::Top => o.row == 1,
        Property::Bottom => o.row == s.rows,
        Property::Left => o.col == 1,
        Property::Right => o.col == s.cols,
        Property::Middle => {
            if s.rows == 3 {
                o.row == 2
            } else {
                o.col == 2
            }
        }
    }
}

/// Brute-force truth of a message for a goal-consistent set: some held
/// object has the property; for two words, some held object has both unless
/// no object on the board has both, in which case either suffices.
fn brute_truth(s: &Scenario, state: u8, words: &[Property]) -> bool {
    let held = |i: usize| state >> i & 1 == 1;
    let n = s.objects.len();
    match words {
        [x] => (0..n).any(|i| held(i) && has(s, i, *x)),
        [x, y] => {
            let exclusive = !(0..n).any(|i| has(s, i, *x) && has(s, i, *y));
            if exclusive {
                (0..n).any(|i| held(i) && (has(s, i, *x) || has(s, i, *y)))
            } else {
                (0..n).any(|i| held(i) && has(s, i, *x) && has(s, i, *y))
            }
        }
        _ => unreachable!(),
    }
}

fn c1_semantics_oracle() -> Outcome {
    let start = Instant::now();
    let props = all_properties();
    let mut checked = 0usize;
    let scens = generate_many(20, 1000).map_err(|e| e.to_string())?;
    for (si, s) in scens.iter().enumerate() {
        let sem = Semantics::new(s.clone());
        let mut messages: Vec<Vec<Property>> = props.iter().map(|&p| vec![p]).collect();
        for &a in &props {
            for &b in &props {
                if a != b {
                    messages.push(vec![a, b]);
                }
            }
        }
        for words in &messages {
            let m = match words[..] {
                [a] => Message::single(a),
                [a, b] => Message::pair(a, b),
                _ => unreachable!(),
            };
            let den = sem.message_denotation(m).map_err(|e| e.to_string())?;
            for state in 0u8..64 {
                let want = brute_truth(s, state, words);
                ensure(den.contains(PrivateState(state)) == want, || {
                    format!("scenario {si}, {m}, state {state:06b}: mask says {}", !want)
                })?;
                checked += 1;
            }
        }
    }
    let t = within(start, Duration::from_secs(10))?;
    Ok(format!("{checked} (scenario, message, state) triples match in {t:.2?}"))
}

fn c2_literal_posterior() -> Outcome {
    let mut s = scen_a();
    s.first_player = Role::Digits;
    let sem = Semantics::new(s.clone());
    let h = History::from_actions(Role::Digits, [msg("blue")]);
    let own = s.private_state(Role::Letters);
    let post = literal_posterior(&sem, &h, Role::Letters, own).map_err(|e| e.to_string())?;
    let support = post.support();
    ensure(support.len() == 48, || format!("support {}", support.len()))?;
    for st in support.iter() {
        let p = post.prob(st);
        ensure((p - 1.0 / 48.0).abs() <= 1e-12, || format!("state {:06b}: {p}", st.0))?;
    }
    // independent count: states with at least one blue cell
    let blue = (0u8..64).filter(|x| x & 0b01_0001 != 0).count();
    ensure(blue == 48, || format!("enumeration gives {blue}"))?;
    Ok("48 states, each 1/48".into())
}

fn c3_prior_marginals() -> Outcome {
    let post = Posterior::uniform(StateSet::ALL);
    for (rows, cols) in [(2, 3), (3, 2)] {
        let m: BeliefMarginals = belief_marginals(&post, rows, cols);
        for v in &m.values {
            ensure((v - 0.5).abs() <= 1e-12, || format!("{rows}x{cols}: marginal {v}"))?;
        }
    }
    let s = scen_a();
    let sem = Semantics::new(s.clone());
    let h = History::new(s.first_player);
    let p = literal_posterior_window(&sem, &h, Role::Digits, s.private_state(Role::Digits), PriorKind::Unconstrained, 0)
        .map_err(|e| e.to_string())?;
    let m = belief_marginals(&p, 2, 3);
    ensure(m.values.iter().all(|v| (v - 0.5).abs() <= 1e-12), || format!("{:?}", m.values))?;
    Ok("all marginals 0.5 on both grid shapes".into())
}

/// Random nonterminal history of up to `max_len` actions played by the
/// true private states, messages only.
fn random_history(sem: &Semantics, rng: &mut ChaCha8Rng, max_len: usize) -> History {
    let s = sem.scenario();
    let len = rng.gen_range(0..=max_len);
    let mut h = History::new(s.first_player);
    for _ in 0..len {
        let own = s.private_state(h.next_player());
        let acts: Vec<Action> =
            legal_actions(sem, &h, own).unwrap().into_iter().filter(|a| !a.is_click()).collect();
        h.push_unchecked(*acts.choose(rng).unwrap());
    }
    h
}

fn c4_pragmatics() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let cfg1 = PipConfig { k: 1, f: 2, b: None, ..PipConfig::default() };
    let cfg0 = PipConfig { k: 0, ..cfg1 };
    let mut worst = 0.0f64;
    let mut partner_actions = 0usize;
    for case in 0..50u64 {
        let scen = generate(7000 + case / 5).map_err(|e| e.to_string())?;
        let sem = Arc::new(Semantics::new(scen.clone()));
        let h = random_history(&sem, &mut rng, 4);
        let viewer = if rng.gen::<bool>() { Role::Letters } else { Role::Digits };
        let own = scen.private_state(viewer);

        let mut p1 = Planner::new(sem.clone(), cfg1).map_err(|e| e.to_string())?.with_fallback(true);
        let rec = p1.posterior(viewer, own, &h, 1).map_err(|e| e.to_string())?;
        let generic = pragmatic_posterior(&sem, &h, viewer, own, 1, None, &mut p1).map_err(|e| e.to_string())?;

        // single pass: prior times the product of level-0 speaker
        // likelihoods of every partner action, normalized once
        let mut speaker = Planner::new(sem.clone(), cfg0).map_err(|e| e.to_string())?.with_fallback(true);
        let mut w = [0.0f64; 64];
        for s in StateSet::intersecting(own.0).iter() {
            let mut prod = 1.0;
            for (i, step) in h.steps().iter().enumerate() {
                if step.role == viewer {
                    continue;
                }
                let dist = speaker.pip_policy(s, &h.prefix(i)).map_err(|e| e.to_string())?;
                prod *= dist.prob(&step.action);
            }
            w[s.index()] = prod;
        }
        let z: f64 = w.iter().sum();
        ensure(z > 0.0, || format!("case {case}: oracle mass is zero"))?;
        partner_actions += h.steps().iter().filter(|st| st.role != viewer).count();
        for (s, &ws) in w.iter().enumerate() {
            let want = ws / z;
            let d = (rec.probs()[s] - want).abs().max((generic.probs()[s] - want).abs());
            worst = worst.max(d);
        }
        ensure(worst <= 1e-9, || format!("case {case}: deviation {worst:e}"))?;

        // k = 0: the planner's belief is the literal posterior, bit for bit
        let mut p0 = Planner::new(sem.clone(), cfg0).map_err(|e| e.to_string())?;
        let lit = literal_posterior(&sem, &h, viewer, own).map_err(|e| e.to_string())?;
        let via_planner = p0.posterior(viewer, own, &h, 0).map_err(|e| e.to_string())?;
        let via_generic = pragmatic_posterior(&sem, &h, viewer, own, 0, None, &mut p0).map_err(|e| e.to_string())?;
        ensure(via_planner.probs() == lit.probs() && via_generic.probs() == lit.probs(), || {
            format!("case {case}: k=0 belief differs from the literal posterior")
        })?;
    }
    Ok(format!(
        "50 cases ({partner_actions} partner actions), max deviation {worst:.1e}; k=0 equals literal exactly; {:.1?}",
        start.elapsed()
    ))
}

fn c5_planning() -> Outcome {
    let start = Instant::now();
    let cfg = PipConfig::default();
    ensure((cfg.k, cfg.f) == (1, 2), || "default config is not k=1, f=2".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut n = 0;
    let mut worst_sum = 0.0f64;
    for sc in 0..20u64 {
        let scen = generate(9000 + sc).map_err(|e| e.to_string())?;
        let sem = Arc::new(Semantics::new(scen.clone()));
        let mut planner = Planner::new(sem.clone(), cfg).map_err(|e| e.to_string())?.with_fallback(true);
        for _ in 0..10 {
            let h = random_history(&sem, &mut rng, 3);
            let own = scen.private_state(h.next_player());
            let d = planner.pip_policy_detail(own, &h).map_err(|e| e.to_string())?;
            let total: f64 = d.probs.iter().sum();
            worst_sum = worst_sum.max((total - 1.0).abs());
            ensure((total - 1.0).abs() <= 1e-9, || format!("prefix {n}: sum {total}"))?;
            let floor = cfg.smoothing / (1.0 + cfg.smoothing * d.probs.len() as f64);
            let min = d.probs.iter().copied().fold(f64::INFINITY, f64::min);
            ensure(min >= floor, || format!("prefix {n}: min {min} below floor {floor}"))?;
            let argmax = |v: &[f64]| {
                v.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &x)| if x > b.1 { (i, x) } else { b }).0
            };
            ensure(d.raw == gains_to_probs(&d.gains, cfg.alpha), || format!("prefix {n}: raw weights"))?;
            let a1 = argmax(&gains_to_probs(&d.gains, 1.0));
            let a10 = argmax(&gains_to_probs(&d.gains, 10.0));
            ensure(a1 == a10, || format!("prefix {n}: argmax {a1} at alpha 1, {a10} at alpha 10"))?;
            n += 1;
        }
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{n} prefixes, max |sum-1| {worst_sum:.1e}, floors hold, argmax stable, {t:.1?}"))
}

fn c6_ablations() -> Outcome {
    let base = PipConfig::default();
    let full = serde_json::to_value(base).unwrap();
    let mut found = Vec::new();
    for (name, field, which) in [
        ("pip:noprag", "k", Ablation::NoPrag),
        ("pip:noplan", "f", Ablation::NoPlan),
        ("pip:noinfer", "b", Ablation::NoInfer),
    ] {
        let PolicySpec::Pip { config, ablation } = PolicySpec::parse(name, &base).map_err(|e| e.to_string())? else {
            return Err(format!("{name} is not a PIP policy"));
        };
        ensure(ablation == which, || format!("{name} parsed as {ablation:?}"))?;
        let v = serde_json::to_value(config).unwrap();
        let diff: Vec<&String> =
            v.as_object().unwrap().iter().filter(|(k, x)| full[k.as_str()] != **x).map(|(k, _)| k).collect();
        ensure(diff == [field], || format!("{name} differs in {diff:?}"))?;

        // search prefixes for a measurable policy difference
        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let mut hit = None;
        'search: for sc in 0..10u64 {
            let scen = if sc == 0 { scen_a() } else { generate(6000 + sc).unwrap() };
            let sem = Arc::new(Semantics::new(scen.clone()));
            let mut pf = Planner::new(sem.clone(), base).unwrap().with_fallback(true);
            let mut pa = Planner::new(sem.clone(), config).unwrap().with_fallback(true);
            for _ in 0..5 {
                let h = random_history(&sem, &mut rng, 3);
                let own = scen.private_state(h.next_player());
                let a = pf.pip_policy(own, &h).map_err(|e| e.to_string())?;
                let b = pa.pip_policy(own, &h).map_err(|e| e.to_string())?;
                let tv = a.total_variation(&b);
                if tv > 0.01 {
                    hit = Some((sc, h.len(), tv));
                    break 'search;
                }
            }
        }
        let (sc, len, tv) = hit.ok_or_else(|| format!("{name}: no prefix with TV > 0.01"))?;
        found.push(format!("{name} ({field}) TV {tv:.3} at scenario {sc}, t={}", len + 1));
    }
    Ok(found.join("; "))
}

fn c7_baselines() -> Outcome {
    let s = scen_a();
    let sem = Semantics::new(s.clone());
    let own = s.private_state(Role::Letters);
    let h = History::new(Role::Letters);
    let d = greedy_message_policy(&sem, own, &h).map_err(|e| e.to_string())?;
    // unnormalized weights from brute force: 64 minus the denotation size
    let mut total = 0.0;
    let mut blue_w = 0.0;
    for (a, _) in &d.entries {
        let Action::Message(m) = a else { return Err("greedy offered a click at t=1".into()) };
        let props: Vec<Property> = m.words().iter().map(|w| Property::from_word(w).unwrap()).collect();
        let size = (0u8..64).filter(|&st| brute_truth(&s, st, &props)).count();
        let w = (64 - size) as f64;
        total += w;
        if *a == msg("blue") {
            blue_w = w;
        }
    }
    ensure(blue_w == 16.0, || format!("blue removes {blue_w}"))?;
    let recovered = d.prob(&msg("blue")) * total;
    ensure((recovered - 16.0).abs() < 1e-9, || format!("blue weight {recovered}"))?;

    // random: uniform over the independently enumerated legal set
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut checked = 0;
    for sc in 0..10u64 {
        let scen = generate(7700 + sc).unwrap();
        let sem = Semantics::new(scen.clone());
        let h = random_history(&sem, &mut rng, 3);
        let own = scen.private_state(h.next_player());
        let mut all: Vec<Action> = Vec::new();
        let props = all_properties();
        for (i, &a) in props.iter().enumerate() {
            all.push(Action::Message(Message::single(a)));
            for &b in &props[i + 1..] {
                all.push(Action::Message(Message::pair(a, b)));
            }
        }
        all.push(Action::Message(Message::Yes));
        all.push(Action::Message(Message::No));
        for r in 1..=scen.rows {
            for c in 1..=scen.cols {
                all.push(Action::Click(Cell::new(r, c)));
            }
        }
        let legal: BTreeSet<Action> = all.into_iter().filter(|a| check_action(&sem, &h, own, a).is_ok()).collect();
        let r = random_policy(&sem, own, &h, 0.01).map_err(|e| e.to_string())?;
        let got: BTreeSet<Action> = r.entries.iter().map(|(a, _)| *a).collect();
        ensure(got == legal, || format!("scenario {sc}: legal set mismatch"))?;
        let u = 1.0 / legal.len() as f64;
        ensure(r.entries.iter().all(|(_, p)| (p - u).abs() < 1e-12), || format!("scenario {sc}: not uniform"))?;
        checked += 1;
    }

    // click propensity on constructed marginals
    let cases: [(u8, [f64; 6]); 3] = [
        (0b01_0001, [0.6, 0.3, 0.3, 0.3, 0.2, 0.3]),
        (0b00_0111, [0.2, 0.2, 0.6, 0.9, 0.9, 0.9]),
        (0b10_0000, [0.1, 0.1, 0.1, 0.1, 0.1, 0.4]),
    ];
    for (own, vals) in cases {
        let m = BeliefMarginals { rows: 2, cols: 3, values: vals.to_vec() };
        let (dist, gamma) = greedy_click_policy(&sem, PrivateState(own), &m).ok_or("no clicks")?;
        let held: Vec<f64> = (0..6).filter(|c| own >> c & 1 == 1).map(|c| vals[c]).collect();
        let z: f64 = held.iter().sum();
        let max = held.iter().map(|v| v / z).fold(0.0, f64::max);
        ensure((gamma - max).abs() < 1e-12, || format!("gamma {gamma}, max {max}"))?;
        ensure((dist.total() - 1.0).abs() < 1e-12, || "click policy not normalized".into())?;
    }
    Ok(format!("blue weight 16 (64->48); random uniform on {checked} enumerated legal sets; gamma matches on 3 cases"))
}

fn c8_utility() -> Outcome {
    let s = scen_a();
    let cfg = UtilityConfig::default();
    let cases = [
        (vec![msg("blue"), msg("yes"), Action::Click(Cell::new(1, 1))], -50.0),
        (vec![msg("blue"), Action::Click(Cell::new(1, 3))], -200.0),
        (vec![msg("blue"), Action::Click(Cell::new(1, 1))], 0.0),
    ];
    let mut got = Vec::new();
    for (acts, want) in cases {
        let h = History::from_actions(s.first_player, acts);
        let u = utility(&h, &s, &cfg).map_err(|e| e.to_string())?;
        ensure(u == want, || format!("{} actions: {u}, want {want}", h.len()))?;
        got.push(u);
    }
    Ok(format!("{got:?}"))
}

fn c9_generator() -> Outcome {
    let start = Instant::now();
    let a = generate_many(1000, 0).map_err(|e| e.to_string())?;
    let b = generate_many(1000, 0).map_err(|e| e.to_string())?;
    let t = within(start, Duration::from_secs(5))?;
    ensure(a == b, || "generation is not deterministic".into())?;
    let bad = a.iter().filter(|s| !check_criteria(s).pass).count();
    ensure(bad == 0, || format!("{bad} scenarios fail the criteria"))?;
    let wide = a.iter().filter(|s| (s.rows, s.cols) == (2, 3)).count();
    let tall = a.iter().filter(|s| (s.rows, s.cols) == (3, 2)).count();
    ensure(wide > 0 && tall > 0, || format!("orientations {wide} / {tall}"))?;
    Ok(format!("1000 pass; {wide} 2x3, {tall} 3x2; identical on rerun; {t:.2?} for two runs"))
}

fn c10_selfplay() -> Outcome {
    let start = Instant::now();
    let base = PipConfig::default();
    let pip = PolicySpec::parse("pip", &base).unwrap();
    let random = PolicySpec::parse("random", &base).unwrap();
    let scens = generate_many(100, 10_000).map_err(|e| e.to_string())?;
    let p = run_batch(&pip, &pip, &scens, &[1], DEFAULT_MAX_TURNS).map_err(|e| e.to_string())?;
    let r = run_batch(&random, &random, &scens, &[1], DEFAULT_MAX_TURNS).map_err(|e| e.to_string())?;
    let t = within(start, Duration::from_secs(600))?;
    ensure(p.overall.mean_utility > r.overall.mean_utility, || {
        format!("pip {} <= random {}", p.overall.mean_utility, r.overall.mean_utility)
    })?;
    ensure(p.overall.click_rate >= 0.95, || format!("pip click rate {}", p.overall.click_rate))?;
    Ok(format!(
        "pip {:.1} vs random {:.1} mean utility; pip clicks in {:.0}% (correct {:.0}%); {t:.1?}",
        p.overall.mean_utility,
        r.overall.mean_utility,
        100.0 * p.overall.click_rate,
        100.0 * p.overall.correct_rate
    ))
}

/// 50 PIP self-play games over 10 scenarios, as transcript JSONL.
fn synthetic_dataset() -> Result<String, String> {
    let pip = PolicySpec::parse("pip", &PipConfig::default()).unwrap();
    let scens = generate_many(10, 20_000).map_err(|e| e.to_string())?;
    let r = run_batch(&pip, &pip, &scens, &[1, 2, 3, 4, 5], DEFAULT_MAX_TURNS).map_err(|e| e.to_string())?;
    Ok(eval::write_jsonl(&r.transcripts))
}

fn c11_eval(data: &str) -> Outcome {
    let vocab = Vocabulary::default();
    let canon = |s: &str| canonicalize_message(s, &vocab).map(|c| c.message.to_string());
    ensure(canon("middle maybe").as_deref() == Some("middle"), || format!("{:?}", canon("middle maybe")))?;
    ensure(canon("what color").is_none(), || format!("{:?}", canon("what color")))?;

    let ts = eval::read_jsonl(data).map_err(|e| e.to_string())?;
    ensure(ts.len() == 50, || format!("{} games", ts.len()))?;
    let base = PipConfig::default();
    let pip = PolicySpec::parse("pip", &base).unwrap();
    let random = PolicySpec::parse("random", &base).unwrap();
    let opts = EvalOptions::default();
    let rep = eval::evaluate(&ts, &[pip, random], &opts).map_err(|e| e.to_string())?;
    ensure(rep.games_kept == 50, || format!("kept {}", rep.games_kept))?;
    let (p, r) = (&rep.policies[0], &rep.policies[1]);
    ensure(p.mean_ll >= r.mean_ll, || format!("pip {} < random {}", p.mean_ll, r.mean_ll))?;
    let mut worst = 0.0f64;
    for a in &r.per_action {
        let want = -(a.legal_actions as f64).ln();
        worst = worst.max((a.ll - want).abs());
    }
    // p = 1/N then ln(p) differs from -ln(N) by rounding only
    ensure(worst <= 1e-12, || format!("uniform LL off by {worst:e}"))?;
    let again = eval::evaluate(&ts, &[random], &opts).map_err(|e| e.to_string())?;
    ensure(again.policies[0].ci == r.ci, || "bootstrap CI changed on rerun".into())?;
    let lls: Vec<f64> = p.per_action.iter().map(|a| a.ll).collect();
    let ci = eval::bootstrap_ci(&lls, 1000, 0.9, 0).map_err(|e| e.to_string())?;
    ensure(ci == p.ci, || "bootstrap CI differs for the same seed".into())?;
    Ok(format!(
        "{} actions: pip LL {:.3} [{:.3}, {:.3}] vs random {:.3}; uniform LL within {worst:.0e} of -ln N",
        p.actions, p.mean_ll, p.ci.0, p.ci.1, r.mean_ll
    ))
}

fn c12_one_command(data: &str) -> Outcome {
    // ten games keep the six-policy run short
    let first: String = data.lines().take(10).map(|l| format!("{l}\n")).collect();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("games.jsonl");
    std::fs::write(&path, first).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_jigsaw"))
        .args(["eval", "--data"])
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let pols = v["policies"].as_array().ok_or("no policies array")?;
    let names: Vec<&str> = pols.iter().filter_map(|p| p["policy"].as_str()).collect();
    ensure(names == ["pip", "pip:noprag", "pip:noplan", "pip:noinfer", "greedy", "random"], || format!("{names:?}"))?;
    for p in pols {
        ensure(p["mean_ll"].is_number() && p["ci"][0].is_number() && p["ci"][1].is_number(), || format!("{p}"))?;
        ensure(p["mean_rank"].is_number(), || format!("{p}"))?;
    }
    let ent = v["first_step_entropy"].as_array().ok_or("no entropy")?;
    ensure(!ent.is_empty() && ent.iter().all(|e| e["entropy"].is_number()), || format!("{ent:?}"))?;
    Ok(format!("`jigsaw eval` reports LL with 90% CI and ranks for {} policies, entropy for {} scenarios", names.len(), ent.len()))
}

/// Runs every criterion, or only those numbered on the command line
/// (`cargo test --test acceptance -- 5 9`).
fn main() {
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| only.is_empty() || only.contains(&n);
    let mut failed = 0;
    let mut ran = 0;
    let mut report = |n: usize, name: &str, run: &dyn Fn() -> Outcome| {
        if !wanted(n) {
            return;
        }
        ran += 1;
        match run() {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}")
            }
        }
    };
    report(1, "semantics oracle", &c1_semantics_oracle);
    report(2, "literal posterior", &c2_literal_posterior);
    report(3, "prior marginals", &c3_prior_marginals);
    report(4, "pragmatic recursion", &c4_pragmatics);
    report(5, "planning", &c5_planning);
    report(6, "ablation wiring", &c6_ablations);
    report(7, "baselines", &c7_baselines);
    report(8, "utility table", &c8_utility);
    report(9, "scenario generator", &c9_generator);
    report(10, "self-play", &c10_selfplay);
    if wanted(11) || wanted(12) {
        match synthetic_dataset() {
            Ok(data) => {
                report(11, "eval pipeline", &|| c11_eval(&data));
                report(12, "one-command report", &|| c12_one_command(&data));
            }
            Err(e) => {
                report(11, "eval pipeline", &|| Err(format!("dataset: {e}")));
                report(12, "one-command report", &|| Err(format!("dataset: {e}")));
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {ran} criteria failed");
        std::process::exit(1);
    }
    println!("{ran} of 12 criteria run, all pass");
}
