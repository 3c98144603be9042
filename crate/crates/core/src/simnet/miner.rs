//! A throttled miner that works in one-second slices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::protocol::{solve, Auth, Direction, Frame, Job, Submit};

use super::{Clock, Connection, Network, ObservedConnection, ObservedFrame, SimError};

#[derive(Debug, Clone)]
pub struct MinerConfig {
    /// Fraction of each slice spent idle, in `[0, 1)`.
    pub alpha: f64,
    /// Peak hashes per second.
    pub h_max: f64,
    pub site_key: String,
    pub server_endpoint: String,
    /// Number of one-second slices.
    pub duration: u64,
    /// Seeds the starting nonce of every job.
    pub seed: u64,
}

impl MinerConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(SimError::InvalidConfig("alpha must be in [0, 1)"));
        }
        if !self.h_max.is_finite() || self.h_max < 0.0 {
            return Err(SimError::InvalidConfig("h_max must be finite and non-negative"));
        }
        Ok(())
    }

    /// `floor(h_max · (1 − alpha))`. A relative nudge of 1e-9 keeps
    /// products like 1000 · (1 − 0.9) = 99.99999999999997 on the integer
    /// they denote.
    pub fn hashes_per_slice(&self) -> u64 {
        let h = self.h_max * (1.0 - self.alpha);
        (h * (1.0 + 1e-9)).floor() as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinerSummary {
    pub attempted_hashes: u64,
    pub accepted_shares: u64,
    /// Latest cumulative credit reported by the server.
    pub credited_hashes: u64,
    /// Attempted hashes per configured second.
    pub achieved_rate: f64,
    /// False if the connection failed or closed before `duration` elapsed.
    pub completed: bool,
    pub connection: ObservedConnection,
    pub trace: Vec<ObservedFrame>,
}

struct Session<'a> {
    conn: Connection,
    clock: &'a Clock,
    trace: Vec<ObservedFrame>,
    credited: u64,
    shares: u64,
}

impl Session<'_> {
    fn send(&mut self, frame: &Frame) -> bool {
        let bytes = frame.encode().expect("miner frames are valid");
        self.trace.push(ObservedFrame {
            ts: self.clock.now(),
            direction: Direction::ClientToServer,
            payload: bytes.clone(),
        });
        self.conn.sink.send(&bytes).is_ok()
    }

    /// Reads until the next job. `None` if the server closed first.
    fn next_job(&mut self) -> Option<Job> {
        loop {
            let bytes = self.conn.source.recv().ok().flatten()?;
            self.trace.push(ObservedFrame {
                ts: self.clock.now(),
                direction: Direction::ServerToClient,
                payload: bytes.clone(),
            });
            match Frame::decode(&bytes) {
                Ok(Frame::Job(job)) => return Some(job),
                Ok(Frame::HashAccept { hashes }) => {
                    self.credited = hashes;
                    self.shares += 1;
                }
                Ok(Frame::Authed { hashes, .. }) => self.credited = hashes,
                Ok(_) => {}
                Err(e) => log::debug!("miner: ignoring frame: {e}"),
            }
        }
    }

    fn finish(mut self) -> (Vec<ObservedFrame>, u64, u64) {
        self.conn.sink.close();
        // Drain so the server has processed everything we sent.
        while self.next_job().is_some() {}
        (self.trace, self.credited, self.shares)
    }
}

/// Connects, authenticates and mines for `duration` slices. Each slice
/// spends exactly `hashes_per_slice` attempts; a found share is submitted
/// and acknowledged before work continues. Connection failures end the run
/// early with partial results.
pub fn run_miner(cfg: &MinerConfig, network: &Network, clock: &Clock) -> Result<MinerSummary, SimError> {
    cfg.validate()?;
    let start = clock.now();
    let connection = ObservedConnection {
        ts: start,
        destination: cfg.server_endpoint.clone(),
    };
    let mut summary = MinerSummary {
        attempted_hashes: 0,
        accepted_shares: 0,
        credited_hashes: 0,
        achieved_rate: 0.0,
        completed: false,
        connection,
        trace: Vec::new(),
    };
    let conn = match network.connect(&cfg.server_endpoint) {
        Ok(c) => c,
        Err(e) => {
            log::warn!("miner: {e}");
            return Ok(summary);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut s = Session {
        conn,
        clock,
        trace: Vec::new(),
        credited: 0,
        shares: 0,
    };
    let auth = Frame::Auth(Auth {
        site_key: cfg.site_key.clone(),
        auth_type: "anonymous".into(),
        user: None,
        goal: 0,
    });
    let per_slice = cfg.hashes_per_slice();
    let mut attempted = 0u64;
    let mut completed = false;
    if s.send(&auth) {
        if let Some(mut job) = s.next_job() {
            let mut nonce: u32 = rng.random();
            completed = 'mining: {
                for slice in 0..cfg.duration {
                    let mut budget = per_slice;
                    while budget > 0 {
                        match solve(&job, nonce, budget)? {
                            Some(sol) => {
                                budget -= sol.attempts;
                                attempted += sol.attempts;
                                let submit = Frame::Submit(Submit {
                                    job_id: job.job_id.clone(),
                                    nonce: sol.nonce,
                                    result: sol.result,
                                });
                                if !s.send(&submit) {
                                    break 'mining false;
                                }
                                match s.next_job() {
                                    Some(j) => {
                                        job = j;
                                        nonce = rng.random();
                                    }
                                    None => break 'mining false,
                                }
                            }
                            None => {
                                attempted += budget;
                                nonce = nonce.wrapping_add(budget as u32);
                                budget = 0;
                            }
                        }
                    }
                    clock.advance_to(start + (slice + 1) as f64);
                }
                true
            };
        }
    }
    let (trace, credited, shares) = s.finish();
    summary.attempted_hashes = attempted;
    summary.accepted_shares = shares;
    summary.credited_hashes = credited;
    summary.achieved_rate = if cfg.duration == 0 { 0.0 } else { attempted as f64 / cfg.duration as f64 };
    summary.completed = completed;
    summary.trace = trace;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(alpha: f64, h_max: f64) -> MinerConfig {
        MinerConfig {
            alpha,
            h_max,
            site_key: "k".repeat(32),
            server_endpoint: "nowhere:1".into(),
            duration: 3,
            seed: 0,
        }
    }

    #[test]
    fn slice_budget() {
        assert_eq!(cfg(0.9, 1000.0).hashes_per_slice(), 100);
        assert_eq!(cfg(0.1, 1000.0).hashes_per_slice(), 900);
        assert_eq!(cfg(0.5, 21.0).hashes_per_slice(), 10);
        assert_eq!(cfg(0.0, 0.0).hashes_per_slice(), 0);
    }

    #[test]
    fn bad_alpha_rejected() {
        assert!(cfg(1.0, 10.0).validate().is_err());
        assert!(cfg(-0.1, 10.0).validate().is_err());
    }

    #[test]
    fn refused_connection_is_partial_not_fatal() {
        let s = run_miner(&cfg(0.0, 10.0), &Network::in_process(), &Clock::virtual_time()).unwrap();
        assert!(!s.completed);
        assert_eq!(s.attempted_hashes, 0);
    }
}
