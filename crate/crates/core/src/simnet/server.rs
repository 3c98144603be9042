//! The mining server: one thread per session driving the protocol state
//! machine, with a per-session frame log.

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};

use serde::Serialize;

use crate::protocol::{Direction, Event, Frame, JobSource, LogRecord, Phase, SessionState};

use super::{mix_seed, Clock, Connection, Listener, ListenerCloser, SimError};

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub target: String,
    /// Job blobs, tokens and job ids of session `i` derive from this seed
    /// and `i`, so a session is reproducible regardless of interleaving.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionSummary {
    pub session_id: u64,
    pub site_key: Option<String>,
    pub accepted_hashes: u64,
    pub accepted_shares: u64,
    pub alerts: u64,
    pub undecodable_frames: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServerReport {
    pub sessions: Vec<SessionSummary>,
    /// Records grouped by session in session order, each session in
    /// arrival order.
    pub log: Vec<LogRecord>,
}

impl ServerReport {
    pub fn accepted_hashes(&self) -> u64 {
        self.sessions.iter().map(|s| s.accepted_hashes).sum()
    }
}

type SessionResult = (SessionSummary, Vec<LogRecord>);

pub struct ServerHandle {
    endpoint: String,
    closer: ListenerCloser,
    acceptor: JoinHandle<Vec<JoinHandle<SessionResult>>>,
}

impl ServerHandle {
    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Stops accepting, waits for open sessions to end and returns their
    /// ledgers and logs.
    pub fn shutdown(self) -> ServerReport {
        self.closer.close();
        let workers = self.acceptor.join().expect("acceptor thread");
        let mut results: Vec<SessionResult> = workers.into_iter().map(|w| w.join().expect("session thread")).collect();
        results.sort_by_key(|(s, _)| s.session_id);
        let mut sessions = Vec::with_capacity(results.len());
        let mut log = Vec::new();
        for (s, l) in results {
            sessions.push(s);
            log.extend(l);
        }
        ServerReport { sessions, log }
    }
}

/// Starts serving `listener`. Only auth frames carrying a key in `registry`
/// are served jobs.
pub fn run_server(
    registry: HashSet<String>,
    listener: Listener,
    config: ServerConfig,
    clock: Clock,
) -> Result<ServerHandle, SimError> {
    if registry.is_empty() {
        return Err(SimError::InvalidConfig("key registry is empty"));
    }
    JobSource::new(&config.target, 0)?;
    let endpoint = listener.endpoint().to_string();
    let closer = listener.closer();
    let registry = Arc::new(registry);
    let next_id = Arc::new(AtomicU64::new(0));
    let acceptor = thread::spawn(move || {
        let mut workers = Vec::new();
        while let Some(conn) = listener.accept() {
            let id = next_id.fetch_add(1, Ordering::SeqCst);
            let registry = Arc::clone(&registry);
            let config = config.clone();
            let clock = clock.clone();
            workers.push(thread::spawn(move || serve_session(id, conn, &registry, &config, &clock)));
        }
        workers
    });
    Ok(ServerHandle {
        endpoint,
        closer,
        acceptor,
    })
}

fn serve_session(
    session_id: u64,
    mut conn: Connection,
    registry: &HashSet<String>,
    config: &ServerConfig,
    clock: &Clock,
) -> SessionResult {
    let mut jobs = JobSource::new(&config.target, mix_seed(config.seed, session_id)).expect("target validated at startup");
    let mut state = SessionState::new();
    let mut summary = SessionSummary {
        session_id,
        site_key: None,
        accepted_hashes: 0,
        accepted_shares: 0,
        alerts: 0,
        undecodable_frames: 0,
    };
    let mut log = Vec::new();
    let record = |log: &mut Vec<LogRecord>, direction, frame: &Frame| {
        log.push(LogRecord {
            ts: clock.now(),
            session_id,
            direction,
            frame: frame.clone(),
        })
    };
    'session: loop {
        let bytes = match conn.source.recv() {
            Ok(Some(b)) => b,
            Ok(None) | Err(_) => {
                state.step(Event::ConnectionClosed, registry, &mut jobs);
                break;
            }
        };
        let frame = match Frame::decode(&bytes) {
            Ok(f) => f,
            Err(e) => {
                log::debug!("session {session_id}: undecodable frame: {e}");
                summary.undecodable_frames += 1;
                continue;
            }
        };
        record(&mut log, Direction::ClientToServer, &frame);
        let out = state.step(Event::Received(frame), registry, &mut jobs);
        summary.alerts += out.alerts.len() as u64;
        for alert in &out.alerts {
            log::debug!("session {session_id}: {alert:?}");
        }
        for f in out.emit {
            if matches!(f, Frame::HashAccept { .. }) {
                summary.accepted_shares += 1;
            }
            record(&mut log, Direction::ServerToClient, &f);
            let bytes = f.encode().expect("server frames are valid");
            if conn.sink.send(&bytes).is_err() {
                break 'session;
            }
        }
        if state.phase == Phase::Closed {
            break;
        }
    }
    conn.sink.close();
    summary.site_key = state.site_key.clone();
    summary.accepted_hashes = state.accepted_hashes();
    (summary, log)
}
