//! The five-frame mining wire protocol: JSON codec, proof of work and the
//! server-side session state machine.

mod log;
mod pow;
mod session;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use log::{read_frame, write_frame, Direction, LogRecord, MAX_FRAME_LEN};
pub use pow::{difficulty, hash_blob, share_value, solve, target_value, verify, RejectReason, Solution, Verdict, NONCE_RANGE};
pub use session::{Alert, Event, JobSource, Phase, SessionState, StepOutcome, JOB_ID_MASK};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("unknown frame type {0:?}")]
    UnknownFrame(String),
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error("invalid field `{0}`")]
    InvalidField(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Auth {
    pub site_key: String,
    #[serde(rename = "type")]
    pub auth_type: String,
    pub user: Option<String>,
    pub goal: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub job_id: String,
    pub blob: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Submit {
    pub job_id: String,
    pub nonce: String,
    pub result: String,
}

/// One protocol message. Serializes as `{"type":..,"params":{..}}` with the
/// params in wire order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum Frame {
    Auth(Auth),
    Authed { token: String, hashes: u64 },
    Job(Job),
    Submit(Submit),
    HashAccept { hashes: u64 },
}

pub const FRAME_TYPES: [&str; 5] = ["auth", "authed", "job", "submit", "hash_accept"];

pub const SITE_KEY_LEN: usize = 32;
pub const BLOB_HEX_LEN: usize = 152;
pub const TARGET_HEX_LEN: usize = 8;
pub const NONCE_HEX_LEN: usize = 8;
pub const RESULT_HEX_LEN: usize = 64;

fn is_lower_hex(s: &str, len: usize) -> bool {
    s.len() == len && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

fn is_job_id(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

impl Job {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !is_job_id(&self.job_id) {
            return Err(ProtocolError::InvalidField("job_id"));
        }
        if !is_lower_hex(&self.blob, BLOB_HEX_LEN) {
            return Err(ProtocolError::InvalidField("blob"));
        }
        if !is_lower_hex(&self.target, TARGET_HEX_LEN) {
            return Err(ProtocolError::InvalidField("target"));
        }
        Ok(())
    }
}

impl Frame {
    pub fn type_name(&self) -> &'static str {
        match self {
            Frame::Auth(_) => "auth",
            Frame::Authed { .. } => "authed",
            Frame::Job(_) => "job",
            Frame::Submit(_) => "submit",
            Frame::HashAccept { .. } => "hash_accept",
        }
    }

    /// Checks field formats. The error names the offending field.
    pub fn validate(&self) -> Result<(), ProtocolError> {
        match self {
            Frame::Auth(a) => {
                if a.site_key.chars().count() != SITE_KEY_LEN {
                    return Err(ProtocolError::InvalidField("site_key"));
                }
            }
            Frame::Authed { .. } | Frame::HashAccept { .. } => {}
            Frame::Job(j) => j.validate()?,
            Frame::Submit(s) => {
                if !is_job_id(&s.job_id) {
                    return Err(ProtocolError::InvalidField("job_id"));
                }
                if !is_lower_hex(&s.nonce, NONCE_HEX_LEN) {
                    return Err(ProtocolError::InvalidField("nonce"));
                }
                if !is_lower_hex(&s.result, RESULT_HEX_LEN) {
                    return Err(ProtocolError::InvalidField("result"));
                }
            }
        }
        Ok(())
    }

    /// Compact canonical JSON.
    pub fn encode(&self) -> Result<Vec<u8>, ProtocolError> {
        self.validate()?;
        Ok(serde_json::to_vec(self).expect("frames always serialize"))
    }

    /// Parses any whitespace or key order; types and required params are
    /// strict.
    pub fn decode(bytes: &[u8]) -> Result<Frame, ProtocolError> {
        let value: serde_json::Value =
            serde_json::from_slice(bytes).map_err(|e| ProtocolError::MalformedFrame(e.to_string()))?;
        let ty = value
            .get("type")
            .ok_or_else(|| ProtocolError::MalformedFrame("missing `type`".into()))?;
        let ty = ty
            .as_str()
            .ok_or_else(|| ProtocolError::MalformedFrame("`type` is not a string".into()))?;
        if !FRAME_TYPES.contains(&ty) {
            return Err(ProtocolError::UnknownFrame(ty.to_string()));
        }
        let frame: Frame = serde_json::from_value(value).map_err(|e| ProtocolError::MalformedFrame(e.to_string()))?;
        frame
            .validate()
            .map_err(|e| ProtocolError::MalformedFrame(e.to_string()))?;
        Ok(frame)
    }
}
