//! Server side of one mining session.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::pow::{difficulty, verify, RejectReason, Verdict};
use super::{Frame, Job, ProtocolError};

/// Job ids are decimal renderings of a 48-bit counter.
pub const JOB_ID_MASK: u64 = (1 << 48) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    AwaitingAuth,
    Authed,
    JobAssigned,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Received(Frame),
    ConnectionClosed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alert {
    /// A frame that is not legal in the current phase. State is unchanged.
    OutOfOrder { phase: Phase, frame: &'static str },
    UnknownKey(String),
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub emit: Vec<Frame>,
    pub alerts: Vec<Alert>,
}

/// Issues jobs and session tokens for a server. All randomness comes from
/// the seed.
#[derive(Debug, Clone)]
pub struct JobSource {
    rng: ChaCha8Rng,
    next_id: u64,
    target: String,
}

impl JobSource {
    pub fn new(target: &str, seed: u64) -> Result<Self, ProtocolError> {
        difficulty(target)?;
        if target.bytes().any(|b| b.is_ascii_uppercase()) {
            return Err(ProtocolError::InvalidField("target"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let next_id = rng.random::<u64>() & JOB_ID_MASK;
        Ok(Self {
            rng,
            next_id,
            target: target.to_string(),
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn next_job(&mut self) -> Job {
        let job_id = self.next_id.to_string();
        self.next_id = (self.next_id + 1) & JOB_ID_MASK;
        let mut blob = [0u8; 76];
        self.rng.fill(&mut blob[..]);
        Job {
            job_id,
            blob: hex::encode(blob),
            target: self.target.clone(),
        }
    }

    pub fn token(&mut self) -> String {
        let mut t = [0u8; 16];
        self.rng.fill(&mut t);
        hex::encode(t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionState {
    pub phase: Phase,
    pub current_job: Option<Job>,
    pub site_key: Option<String>,
    accepted_hashes: u64,
}

impl Default for SessionState {
    fn default() -> Self {
        Self::new()
    }
}

impl SessionState {
    /// A fresh connection: nothing credited yet.
    pub fn new() -> Self {
        Self {
            phase: Phase::AwaitingAuth,
            current_job: None,
            site_key: None,
            accepted_hashes: 0,
        }
    }

    pub fn accepted_hashes(&self) -> u64 {
        self.accepted_hashes
    }

    /// Advances the session by one event and returns the frames the server
    /// sends back plus any alerts.
    pub fn step(&mut self, event: Event, registry: &HashSet<String>, jobs: &mut JobSource) -> StepOutcome {
        let mut out = StepOutcome::default();
        let frame = match event {
            Event::ConnectionClosed => {
                self.phase = Phase::Closed;
                return out;
            }
            Event::Received(f) => f,
        };
        match (self.phase, frame) {
            (Phase::AwaitingAuth, Frame::Auth(auth)) => {
                if !registry.contains(&auth.site_key) {
                    self.phase = Phase::Closed;
                    out.alerts.push(Alert::UnknownKey(auth.site_key));
                    return out;
                }
                self.site_key = Some(auth.site_key);
                self.phase = Phase::Authed;
                out.emit.push(Frame::Authed {
                    token: jobs.token(),
                    hashes: self.accepted_hashes,
                });
                self.assign_job(jobs, &mut out);
            }
            (Phase::JobAssigned, Frame::Submit(submit)) => {
                let job = self.current_job.as_ref().expect("job assigned");
                match verify(job, &submit) {
                    Verdict::Accept => {
                        self.accepted_hashes += difficulty(&job.target).expect("issued targets are valid");
                        out.emit.push(Frame::HashAccept {
                            hashes: self.accepted_hashes,
                        });
                        self.assign_job(jobs, &mut out);
                    }
                    Verdict::Reject(reason) => out.alerts.push(Alert::Rejected(reason)),
                }
            }
            (phase, f) => out.alerts.push(Alert::OutOfOrder {
                phase,
                frame: f.type_name(),
            }),
        }
        out
    }

    fn assign_job(&mut self, jobs: &mut JobSource, out: &mut StepOutcome) {
        let job = jobs.next_job();
        self.current_job = Some(job.clone());
        self.phase = Phase::JobAssigned;
        out.emit.push(Frame::Job(job));
    }
}

#[cfg(test)]
mod tests {
    use super::super::{solve, Auth, Submit};
    use super::*;

    const KEY: &str = "0123456789abcdef0123456789abcdef";

    fn auth(key: &str) -> Event {
        Event::Received(Frame::Auth(Auth {
            site_key: key.into(),
            auth_type: "anonymous".into(),
            user: None,
            goal: 0,
        }))
    }

    fn registry() -> HashSet<String> {
        [KEY.to_string()].into()
    }

    fn submit_for(job: &Job) -> Event {
        let s = solve(job, 0, u64::MAX).unwrap().unwrap();
        Event::Received(Frame::Submit(Submit {
            job_id: job.job_id.clone(),
            nonce: s.nonce,
            result: s.result,
        }))
    }

    #[test]
    fn happy_path_credits_difficulty() {
        let reg = registry();
        let mut jobs = JobSource::new("ffffff00", 1).unwrap();
        let mut s = SessionState::new();
        let out = s.step(auth(KEY), &reg, &mut jobs);
        assert!(matches!(out.emit[0], Frame::Authed { hashes: 0, ref token } if token.len() == 32));
        let Frame::Job(job) = &out.emit[1] else { panic!() };
        assert_eq!(job.job_id.parse::<u64>().unwrap() & !JOB_ID_MASK, 0);
        assert_eq!(s.phase, Phase::JobAssigned);

        let out = s.step(submit_for(job), &reg, &mut jobs);
        assert_eq!(out.emit[0], Frame::HashAccept { hashes: 256 });
        let Frame::Job(next) = &out.emit[1] else { panic!() };
        assert_ne!(next.job_id, job.job_id);
        assert_eq!(s.accepted_hashes(), 256);

        let out = s.step(submit_for(next), &reg, &mut jobs);
        assert_eq!(out.emit[0], Frame::HashAccept { hashes: 512 });
    }

    #[test]
    fn submit_before_auth_is_alert_only() {
        let reg = registry();
        let mut jobs = JobSource::new("ffffffff", 1).unwrap();
        let mut s = SessionState::new();
        let job = jobs.next_job();
        let before = s.clone();
        let out = s.step(submit_for(&job), &reg, &mut jobs);
        assert!(out.emit.is_empty());
        assert_eq!(out.alerts, vec![Alert::OutOfOrder { phase: Phase::AwaitingAuth, frame: "submit" }]);
        assert_eq!(s, before);
    }

    #[test]
    fn unknown_key_closes_without_jobs() {
        let mut jobs = JobSource::new("ffffffff", 1).unwrap();
        let mut s = SessionState::new();
        let out = s.step(auth(&"z".repeat(32)), &registry(), &mut jobs);
        assert!(out.emit.is_empty());
        assert_eq!(s.phase, Phase::Closed);
        assert_eq!(s.accepted_hashes(), 0);
    }

    #[test]
    fn stale_share_is_rejected() {
        let reg = registry();
        let mut jobs = JobSource::new("ffffffff", 1).unwrap();
        let mut s = SessionState::new();
        let out = s.step(auth(KEY), &reg, &mut jobs);
        let Frame::Job(first) = out.emit[1].clone() else { panic!() };
        s.step(submit_for(&first), &reg, &mut jobs);
        let out = s.step(submit_for(&first), &reg, &mut jobs);
        assert_eq!(out.alerts, vec![Alert::Rejected(RejectReason::WrongJob)]);
        assert_eq!(s.accepted_hashes(), 1);
    }

    #[test]
    fn job_ids_wrap_at_48_bits() {
        let mut jobs = JobSource::new("ffffffff", 0).unwrap();
        jobs.next_id = JOB_ID_MASK;
        assert_eq!(jobs.next_job().job_id, JOB_ID_MASK.to_string());
        assert_eq!(jobs.next_job().job_id, "0");
    }
}
