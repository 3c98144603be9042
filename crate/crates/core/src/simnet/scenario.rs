//! Named end-to-end scenarios comparing the blacklist and payload
//! detectors.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::thread;

use serde::Serialize;

use crate::protocol::{difficulty, Direction, LogRecord};

use super::{
    blacklist_detector, payload_detector, run_miner, run_relay, run_server, Blacklist, Clock, DetectorVerdict, MinerConfig,
    Network, ObservedConnection, ObservedFrame, ServerConfig, SimError,
};

/// Endpoint names used by in-process scenarios.
pub const DROPZONE_ENDPOINT: &str = "dropzone.example:443";
pub const RELAY_ENDPOINT: &str = "relay.example:8443";
pub const CHAT_ENDPOINT: &str = "chat.example:443";

/// The site key the server knows.
pub const SITE_KEY: &str = "c0ffee00c0ffee00c0ffee00c0ffee00";
const UNREGISTERED_KEY: &str = "00000000000000000000000000000000";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Miner talks straight to the blacklisted server.
    Direct,
    /// Miner talks to a relay that forwards to the server.
    Relay,
    /// Page opens a socket to the server but has no valid key.
    Keyless,
    /// Ordinary chat traffic to an unlisted endpoint.
    BenignSocket,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Direct, Scenario::Relay, Scenario::Keyless, Scenario::BenignSocket];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Direct => "direct",
            Scenario::Relay => "relay",
            Scenario::Keyless => "keyless",
            Scenario::BenignSocket => "benign-socket",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SimError::UnknownScenario(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportKind {
    InProcess,
    Tcp,
}

#[derive(Debug, Clone)]
pub struct ScenarioParams {
    pub alpha: f64,
    pub h_max: f64,
    pub duration: u64,
    pub seed: u64,
    pub target: String,
    pub transport: TransportKind,
    pub real_time: bool,
    /// Defaults to the server's own endpoint.
    pub blacklist: Option<Blacklist>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            h_max: 1000.0,
            duration: 30,
            seed: 0,
            target: "ffffff00".into(),
            transport: TransportKind::InProcess,
            real_time: false,
            blacklist: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub transport: TransportKind,
    pub alpha: f64,
    pub h_max: f64,
    pub duration: u64,
    /// Modeled CPU duty cycle, `1 − alpha`.
    pub duty_cycle: f64,
    pub target: String,
    pub difficulty: u64,
    pub client_endpoint: String,
    pub sessions: u64,
    /// Server-side credit summed over sessions.
    pub accepted_hashes: u64,
    pub accepted_shares: u64,
    pub attempted_hashes: u64,
    pub achieved_rate: f64,
    pub server_alerts: u64,
    pub relayed_messages: u64,
    pub verdicts: Vec<DetectorVerdict>,
}

impl ScenarioReport {
    pub fn verdict(&self, kind: super::DetectorKind) -> &DetectorVerdict {
        self.verdicts.iter().find(|v| v.detector == kind).expect("both detectors always run")
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    /// Server frame log.
    pub log: Vec<LogRecord>,
    /// Everything the client's connection carried.
    pub client_trace: Vec<ObservedFrame>,
}

impl ScenarioOutcome {
    pub fn log_jsonl(&self) -> String {
        self.log.iter().map(LogRecord::to_json_line).collect()
    }
}

fn bind_addr(transport: TransportKind, name: &str) -> &str {
    match transport {
        TransportKind::InProcess => name,
        TransportKind::Tcp => "127.0.0.1:0",
    }
}

struct ClientRun {
    connection: ObservedConnection,
    trace: Vec<ObservedFrame>,
    attempted: u64,
    rate: f64,
}

/// Runs one scenario to completion. With a virtual clock the report is a
/// pure function of the scenario and params.
pub fn run_scenario(scenario: Scenario, params: &ScenarioParams) -> Result<ScenarioOutcome, SimError> {
    difficulty(&params.target)?;
    let network = match params.transport {
        TransportKind::InProcess => Network::in_process(),
        TransportKind::Tcp => Network::tcp(),
    };
    let clock = if params.real_time { Clock::real_time() } else { Clock::virtual_time() };

    let listener = network.bind(bind_addr(params.transport, DROPZONE_ENDPOINT))?;
    let server_endpoint = listener.endpoint().to_string();
    let registry: HashSet<String> = [SITE_KEY.to_string()].into();
    let server = run_server(
        registry,
        listener,
        ServerConfig {
            target: params.target.clone(),
            seed: params.seed,
        },
        clock.clone(),
    )?;
    let blacklist = params
        .blacklist
        .clone()
        .unwrap_or_else(|| Blacklist::new([server_endpoint.clone()]));

    let mut relay = None;
    let client = match scenario {
        Scenario::Direct | Scenario::Keyless | Scenario::Relay => {
            let endpoint = if scenario == Scenario::Relay {
                let l = network.bind(bind_addr(params.transport, RELAY_ENDPOINT))?;
                let h = run_relay(l, server_endpoint.clone(), network.clone());
                let ep = h.endpoint().to_string();
                relay = Some(h);
                ep
            } else {
                server_endpoint.clone()
            };
            let key = if scenario == Scenario::Keyless { UNREGISTERED_KEY } else { SITE_KEY };
            let cfg = MinerConfig {
                alpha: params.alpha,
                h_max: params.h_max,
                site_key: key.to_string(),
                server_endpoint: endpoint,
                duration: params.duration,
                seed: params.seed,
            };
            let m = run_miner(&cfg, &network, &clock)?;
            ClientRun {
                connection: m.connection,
                trace: m.trace,
                attempted: m.attempted_hashes,
                rate: m.achieved_rate,
            }
        }
        Scenario::BenignSocket => chat_client(&network, params, &clock)?,
    };

    let relayed_messages = relay.map_or(0, |r| r.shutdown());
    let server_report = server.shutdown();
    let verdicts = vec![
        blacklist_detector(std::slice::from_ref(&client.connection), &blacklist),
        payload_detector(&client.trace),
    ];
    let report = ScenarioReport {
        scenario,
        seed: params.seed,
        transport: params.transport,
        alpha: params.alpha,
        h_max: params.h_max,
        duration: params.duration,
        duty_cycle: 1.0 - params.alpha,
        target: params.target.clone(),
        difficulty: difficulty(&params.target)?,
        client_endpoint: client.connection.destination.clone(),
        sessions: server_report.sessions.len() as u64,
        accepted_hashes: server_report.accepted_hashes(),
        accepted_shares: server_report.sessions.iter().map(|s| s.accepted_shares).sum(),
        attempted_hashes: client.attempted,
        achieved_rate: client.rate,
        server_alerts: server_report.sessions.iter().map(|s| s.alerts).sum(),
        relayed_messages,
        verdicts,
    };
    Ok(ScenarioOutcome {
        report,
        log: server_report.log,
        client_trace: client.trace,
    })
}

/// One chat message per slice to an echo service.
fn chat_client(network: &Network, params: &ScenarioParams, clock: &Clock) -> Result<ClientRun, SimError> {
    let listener = network.bind(bind_addr(params.transport, CHAT_ENDPOINT))?;
    let endpoint = listener.endpoint().to_string();
    let closer = listener.closer();
    let echo = thread::spawn(move || {
        let mut workers = Vec::new();
        while let Some(mut c) = listener.accept() {
            workers.push(thread::spawn(move || {
                while let Ok(Some(m)) = c.source.recv() {
                    if c.sink.send(&m).is_err() {
                        break;
                    }
                }
                c.sink.close();
            }));
        }
        for w in workers {
            let _ = w.join();
        }
    });
    let start = clock.now();
    let connection = ObservedConnection {
        ts: start,
        destination: endpoint.clone(),
    };
    let mut trace = Vec::new();
    let mut conn = network.connect(&endpoint)?;
    for i in 0..params.duration {
        let msg = serde_json::json!({"type": "chat", "params": {"text": format!("message {i}")}}).to_string();
        trace.push(ObservedFrame {
            ts: clock.now(),
            direction: Direction::ClientToServer,
            payload: msg.clone().into_bytes(),
        });
        conn.sink.send(msg.as_bytes())?;
        if let Some(reply) = conn.source.recv()? {
            trace.push(ObservedFrame {
                ts: clock.now(),
                direction: Direction::ServerToClient,
                payload: reply,
            });
        }
        clock.advance_to(start + (i + 1) as f64);
    }
    conn.sink.close();
    while conn.source.recv()?.is_some() {}
    closer.close();
    let _ = echo.join();
    Ok(ClientRun {
        connection,
        trace,
        attempted: 0,
        rate: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::super::DetectorKind;
    use super::*;

    fn quick() -> ScenarioParams {
        ScenarioParams {
            duration: 3,
            h_max: 600.0,
            ..Default::default()
        }
    }

    #[test]
    fn names_parse() {
        for s in Scenario::ALL {
            assert_eq!(s.as_str().parse::<Scenario>().unwrap(), s);
        }
        assert!(matches!("mine".parse::<Scenario>(), Err(SimError::UnknownScenario(_))));
    }

    #[test]
    fn benign_socket_is_quiet() {
        let out = run_scenario(Scenario::BenignSocket, &quick()).unwrap();
        let r = &out.report;
        assert!(!r.verdict(DetectorKind::Blacklist).flagged);
        assert!(!r.verdict(DetectorKind::Payload).flagged);
        assert_eq!(r.verdict(DetectorKind::Payload).undecodable_frames, 6);
        assert_eq!(r.accepted_hashes, 0);
        assert_eq!(r.sessions, 0);
    }

    #[test]
    fn direct_is_deterministic() {
        let a = run_scenario(Scenario::Direct, &quick()).unwrap();
        let b = run_scenario(Scenario::Direct, &quick()).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.log_jsonl(), b.log_jsonl());
        assert_eq!(a.report.attempted_hashes, 3 * 540);
        assert_eq!(a.report.accepted_hashes, 256 * a.report.accepted_shares);
    }
}
