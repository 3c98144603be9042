//! Scenario simulator: a mining server, a throttled miner, a verbatim relay
//! and two detectors, wired over in-process or TCP transports.

mod detect;
mod miner;
mod relay;
mod scenario;
mod server;
mod transport;

use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::protocol::ProtocolError;

pub use detect::{blacklist_detector, payload_detector, Blacklist, DetectorKind, DetectorVerdict, ObservedConnection, ObservedFrame, Trigger};
pub use miner::{run_miner, MinerConfig, MinerSummary};
pub use relay::{run_relay, RelayHandle};
pub use scenario::{run_scenario, Scenario, ScenarioOutcome, ScenarioParams, ScenarioReport, TransportKind, DROPZONE_ENDPOINT, RELAY_ENDPOINT, SITE_KEY};
pub use server::{run_server, ServerConfig, ServerHandle, ServerReport, SessionSummary};
pub use transport::{pipe, Connection, FrameSink, FrameSource, Listener, ListenerCloser, Network};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("cannot bind {endpoint}: {source}")]
    Bind { endpoint: String, source: std::io::Error },
    #[error("cannot connect to {endpoint}: {source}")]
    Connect { endpoint: String, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown scenario {0:?} (expected direct, relay, keyless or benign-socket)")]
    UnknownScenario(String),
}

#[derive(Debug)]
enum ClockMode {
    Virtual(Mutex<f64>),
    Real(Instant),
}

/// Shared session clock in seconds. Virtual time moves only when a
/// participant advances it, so runs are reproducible; real time sleeps.
#[derive(Debug, Clone)]
pub struct Clock(Arc<ClockMode>);

impl Clock {
    pub fn virtual_time() -> Self {
        Clock(Arc::new(ClockMode::Virtual(Mutex::new(0.0))))
    }

    pub fn real_time() -> Self {
        Clock(Arc::new(ClockMode::Real(Instant::now())))
    }

    pub fn is_virtual(&self) -> bool {
        matches!(*self.0, ClockMode::Virtual(_))
    }

    pub fn now(&self) -> f64 {
        match &*self.0 {
            ClockMode::Virtual(t) => *t.lock().expect("clock lock"),
            ClockMode::Real(start) => start.elapsed().as_secs_f64(),
        }
    }

    /// Moves the clock to `t` seconds; never backwards.
    pub fn advance_to(&self, t: f64) {
        match &*self.0 {
            ClockMode::Virtual(now) => {
                let mut now = now.lock().expect("clock lock");
                *now = now.max(t);
            }
            ClockMode::Real(start) => {
                let target = *start + Duration::from_secs_f64(t.max(0.0));
                let now = Instant::now();
                if target > now {
                    std::thread::sleep(target - now);
                }
            }
        }
    }
}

/// SplitMix64 finalizer, used to derive independent per-session seeds.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed.wrapping_add(salt.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
