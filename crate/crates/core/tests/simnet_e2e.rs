use std::time::Instant;

use cryptolab::simnet::{run_scenario, DetectorKind, Scenario, ScenarioParams, TransportKind};

#[test]
fn frame_log_is_one_json_object_per_line() {
    let params = ScenarioParams { duration: 3, transport: TransportKind::Tcp, ..Default::default() };
    let outcome = run_scenario(Scenario::Direct, &params).unwrap();
    let text = outcome.log_jsonl();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), outcome.log.len());
    assert_eq!(lines[0]["direction"], "c2s");
    assert_eq!(lines[0]["frame"]["type"], "auth");
    assert!(lines.iter().any(|l| l["frame"]["type"] == "hash_accept"));
    assert!(lines.windows(2).all(|w| w[0]["ts"].as_f64() <= w[1]["ts"].as_f64()));
}

#[test]
fn virtual_runs_repeat_exactly() {
    let params = ScenarioParams { duration: 5, seed: 17, ..Default::default() };
    let a = run_scenario(Scenario::Relay, &params).unwrap();
    let b = run_scenario(Scenario::Relay, &params).unwrap();
    assert_eq!(a.log_jsonl(), b.log_jsonl());
    assert_eq!(a.report.accepted_hashes, b.report.accepted_hashes);
}

#[test]
fn real_time_mode_paces_against_the_wall_clock() {
    let params = ScenarioParams { duration: 1, real_time: true, ..Default::default() };
    let started = Instant::now();
    let outcome = run_scenario(Scenario::Direct, &params).unwrap();
    assert!(started.elapsed().as_secs_f64() >= 0.9);
    assert!(outcome.report.verdict(DetectorKind::Payload).flagged);
}
