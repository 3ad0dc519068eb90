use jigsaw_web::{marginals_json, policy_json, scenario_json};
use serde_json::Value;

fn scen_a() -> String {
    scenario_json(-1.0).unwrap()
}

#[test]
fn generated_scenarios_are_seeded() {
    assert_eq!(scenario_json(3.0).unwrap(), scenario_json(3.0).unwrap());
    assert_ne!(scenario_json(3.0).unwrap(), scenario_json(4.0).unwrap());
}

#[test]
fn blue_raises_blue_cells() {
    let out = marginals_json(&scen_a(), "blue", "digits", r#"{"k":0}"#, true).unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    let after = v["steps"][1]["marginals"]["values"].as_array().unwrap();
    let x: Vec<f64> = after.iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((x[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!((x[1] - 0.5).abs() < 1e-12);
}

#[test]
fn errors_are_messages() {
    let err = marginals_json(&scen_a(), "blue, round", "", "", false).unwrap_err();
    assert!(err.starts_with("step 2"), "{err}");
    assert!(marginals_json("{}", "", "", "", false).is_err());
    assert!(policy_json(&scen_a(), "", "oracle", "").is_err());
}

#[test]
fn first_policy_is_sorted_messages() {
    let out = policy_json(&scen_a(), "", "greedy", "").unwrap();
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["player"], "letters");
    let acts = v["actions"].as_array().unwrap();
    let probs: Vec<f64> = acts.iter().map(|a| a[1].as_f64().unwrap()).collect();
    assert!(probs.windows(2).all(|w| w[0] >= w[1]));
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(acts.iter().all(|a| !a[0].as_str().unwrap().starts_with("click")));
}
