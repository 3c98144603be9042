//! Two detectors: one that only looks at where a connection goes, and one
//! that reads the frames and waits for a completed mining round.

use std::str::FromStr;

use serde::Serialize;

use crate::protocol::{Direction, Frame};

/// A connection as the client saw it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservedConnection {
    pub ts: f64,
    pub destination: String,
}

/// A raw message on the client's connection.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedFrame {
    pub ts: f64,
    pub direction: Direction,
    pub payload: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    Blacklist,
    Payload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    EndpointMatch,
    MiningSequence,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorVerdict {
    pub detector: DetectorKind,
    pub flagged: bool,
    pub trigger: Trigger,
    pub time_of_flag: Option<f64>,
    /// Payload detector only: messages that were not protocol frames.
    pub undecodable_frames: u64,
}

/// Endpoint patterns. An entry ending in `*` matches any endpoint with that
/// prefix; anything else must match exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Blacklist {
    entries: Vec<String>,
}

impl Blacklist {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(entries: I) -> Self {
        Self {
            entries: entries.into_iter().map(Into::into).collect(),
        }
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn matches(&self, endpoint: &str) -> bool {
        self.entries.iter().any(|e| match e.strip_suffix('*') {
            Some(prefix) => endpoint.starts_with(prefix),
            None => e == endpoint,
        })
    }
}

/// One endpoint per line; blank lines and `#` comments are skipped.
impl FromStr for Blacklist {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Self::new(
            s.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }
}

/// Flags at the first connection whose destination is blacklisted. Payloads
/// are never inspected.
pub fn blacklist_detector(connections: &[ObservedConnection], blacklist: &Blacklist) -> DetectorVerdict {
    let hit = connections.iter().find(|c| blacklist.matches(&c.destination));
    DetectorVerdict {
        detector: DetectorKind::Blacklist,
        flagged: hit.is_some(),
        trigger: if hit.is_some() { Trigger::EndpointMatch } else { Trigger::None },
        time_of_flag: hit.map(|c| c.ts),
        undecodable_frames: 0,
    }
}

const ROUND: [(Direction, &str); 5] = [
    (Direction::ClientToServer, "auth"),
    (Direction::ServerToClient, "authed"),
    (Direction::ServerToClient, "job"),
    (Direction::ClientToServer, "submit"),
    (Direction::ServerToClient, "hash_accept"),
];

/// Follows auth, authed, job, submit, hash_accept in order (other frames in
/// between are ignored) and flags when the round completes.
pub fn payload_detector(frames: &[ObservedFrame]) -> DetectorVerdict {
    let mut stage = 0;
    let mut undecodable = 0;
    let mut flagged_at = None;
    for f in frames {
        let Ok(frame) = Frame::decode(&f.payload) else {
            undecodable += 1;
            continue;
        };
        if flagged_at.is_some() {
            continue;
        }
        let (dir, name) = ROUND[stage];
        if f.direction == dir && frame.type_name() == name {
            stage += 1;
            if stage == ROUND.len() {
                flagged_at = Some(f.ts);
            }
        }
    }
    DetectorVerdict {
        detector: DetectorKind::Payload,
        flagged: flagged_at.is_some(),
        trigger: if flagged_at.is_some() { Trigger::MiningSequence } else { Trigger::None },
        time_of_flag: flagged_at,
        undecodable_frames: undecodable,
    }
}
