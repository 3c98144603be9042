//! Share proof of work: SHA-256 over the 76-byte blob with the nonce
//! spliced in, checked against a 32-bit little-endian target.

use sha2::{Digest, Sha256};

use super::{Job, ProtocolError, Submit, TARGET_HEX_LEN};

/// Hex character range of the nonce inside the blob.
pub const NONCE_RANGE: std::ops::Range<usize> = 78..86;

/// The target read as a little-endian `u32`.
pub fn target_value(target: &str) -> Result<u32, ProtocolError> {
    if target.len() != TARGET_HEX_LEN {
        return Err(ProtocolError::InvalidField("target"));
    }
    let bytes = hex::decode(target).map_err(|_| ProtocolError::InvalidField("target"))?;
    Ok(u32::from_le_bytes(bytes.try_into().expect("4 bytes")))
}

/// Expected attempts per share, `floor(2^32 / (T + 1))`.
pub fn difficulty(target: &str) -> Result<u64, ProtocolError> {
    Ok((1u64 << 32) / (u64::from(target_value(target)?) + 1))
}

/// Hash of `blob` with `nonce` written over its nonce field.
pub fn hash_blob(blob: &str, nonce: &str) -> Result<[u8; 32], ProtocolError> {
    if blob.len() != super::BLOB_HEX_LEN || !blob.is_ascii() {
        return Err(ProtocolError::InvalidField("blob"));
    }
    if nonce.len() != NONCE_RANGE.len() {
        return Err(ProtocolError::InvalidField("nonce"));
    }
    let mut spliced = String::with_capacity(blob.len());
    spliced.push_str(&blob[..NONCE_RANGE.start]);
    spliced.push_str(nonce);
    spliced.push_str(&blob[NONCE_RANGE.end..]);
    let bytes = hex::decode(&spliced).map_err(|_| ProtocolError::InvalidField("blob"))?;
    Ok(Sha256::digest(&bytes).into())
}

/// Last four hash bytes as a little-endian `u32`.
pub fn share_value(hash: &[u8; 32]) -> u32 {
    u32::from_le_bytes([hash[28], hash[29], hash[30], hash[31]])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub nonce: String,
    pub result: String,
    /// Hashes computed, including the successful one.
    pub attempts: u64,
}

fn nonce_hex(n: u32) -> String {
    hex::encode(n.to_le_bytes())
}

/// Tries nonces `start, start+1, ..` (wrapping) until one meets the target
/// or `max_iters` hashes have been spent.
pub fn solve(job: &Job, start_nonce: u32, max_iters: u64) -> Result<Option<Solution>, ProtocolError> {
    let t = target_value(&job.target)?;
    let mut n = start_nonce;
    for attempt in 1..=max_iters {
        let nonce = nonce_hex(n);
        let hash = hash_blob(&job.blob, &nonce)?;
        if share_value(&hash) <= t {
            return Ok(Some(Solution {
                nonce,
                result: hex::encode(hash),
                attempts: attempt,
            }));
        }
        n = n.wrapping_add(1);
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    BadHash,
    AboveTarget,
    WrongJob,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::BadHash => "bad-hash",
            RejectReason::AboveTarget => "above-target",
            RejectReason::WrongJob => "wrong-job",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

/// Recomputes the hash of a submitted share and checks it against the job.
pub fn verify(job: &Job, submit: &Submit) -> Verdict {
    if submit.job_id != job.job_id {
        return Verdict::Reject(RejectReason::WrongJob);
    }
    let Ok(hash) = hash_blob(&job.blob, &submit.nonce) else {
        return Verdict::Reject(RejectReason::BadHash);
    };
    if !hex::encode(hash).eq_ignore_ascii_case(&submit.result) {
        return Verdict::Reject(RejectReason::BadHash);
    }
    match target_value(&job.target) {
        Ok(t) if share_value(&hash) <= t => Verdict::Accept,
        _ => Verdict::Reject(RejectReason::AboveTarget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(target: &str) -> Job {
        Job {
            job_id: "164698158344253".into(),
            blob: "07".repeat(76),
            target: target.into(),
        }
    }

    fn submit(j: &Job, s: &Solution) -> Submit {
        Submit {
            job_id: j.job_id.clone(),
            nonce: s.nonce.clone(),
            result: s.result.clone(),
        }
    }

    #[test]
    fn difficulty_values() {
        assert_eq!(difficulty("ffffff00").unwrap(), 256);
        assert_eq!(difficulty("ffffffff").unwrap(), 1);
        assert_eq!(difficulty("00000080").unwrap(), 1);
        assert_eq!(difficulty("00000000").unwrap(), 1 << 32);
        assert!(difficulty("zzzzzzzz").is_err());
        assert!(difficulty("ffff").is_err());
    }

    #[test]
    fn easiest_target_solves_first_try() {
        let j = job("ffffffff");
        let s = solve(&j, 9, 1).unwrap().unwrap();
        assert_eq!(s.attempts, 1);
        assert_eq!(s.nonce, "09000000");
        assert_eq!(verify(&j, &submit(&j, &s)), Verdict::Accept);
    }

    #[test]
    fn impossible_target_gives_up() {
        assert_eq!(solve(&job("00000000"), 0, 1000).unwrap(), None);
    }

    #[test]
    fn rejections() {
        let j = job("ffffffff");
        let s = solve(&j, 0, 1).unwrap().unwrap();
        let mut flipped = submit(&j, &s);
        let c = flipped.result.remove(0);
        flipped.result.insert(0, if c == '0' { '1' } else { '0' });
        assert_eq!(verify(&j, &flipped), Verdict::Reject(RejectReason::BadHash));

        let hard = job("00000000");
        assert_eq!(verify(&hard, &submit(&j, &s)), Verdict::Reject(RejectReason::AboveTarget));

        let mut other = submit(&j, &s);
        other.job_id = "1".into();
        assert_eq!(verify(&j, &other), Verdict::Reject(RejectReason::WrongJob));
    }

    #[test]
    fn nonce_lands_in_blob() {
        let j = job("ffffffff");
        let a = hash_blob(&j.blob, "00000000").unwrap();
        let b = hash_blob(&j.blob, "00000001").unwrap();
        assert_ne!(a, b);
        let mut blob = j.blob.clone();
        blob.replace_range(NONCE_RANGE, "00000001");
        assert_eq!(hash_blob(&blob, "00000001").unwrap(), b);
    }
}
