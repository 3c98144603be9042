//! Closed-form mining economics: profit from hashing, battery-drain loss,
//! time to earn one coin, per-device tables and per-website estimates.
//!
//! Session lengths are given in minutes and converted to seconds before
//! multiplying by a per-second hash rate.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const PROFILES_JSON: &str = include_str!("../../data/profiles.json");
const WEBSITES_JSON: &str = include_str!("../../data/websites.json");

pub const SECONDS_PER_YEAR: f64 = 31_536_000.0;

#[derive(Debug, Error, PartialEq)]
pub enum EconomicsError {
    #[error("{0}")]
    Domain(&'static str),
    #[error("battery after mining ({b_c}%) exceeds the baseline ({b_n}%)")]
    BatteryGain { b_c: f64, b_n: f64 },
    #[error("device {device} has no row for alpha = {alpha}")]
    MissingAlpha { device: String, alpha: f64 },
    #[error("invalid duration {0:?} (expected MM:SS)")]
    BadDuration(String),
    #[error("invalid target: {0}")]
    BadTarget(&'static str),
    #[error("invalid data file: {0}")]
    Data(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketConstants {
    /// Coins paid per million hashes.
    pub pay_rate: f64,
    /// USD per coin.
    pub xmr_price: f64,
}

impl Default for MarketConstants {
    fn default() -> Self {
        Self {
            pay_rate: 2.894e-5,
            xmr_price: 200.0,
        }
    }
}

impl MarketConstants {
    pub fn validate(&self) -> Result<(), EconomicsError> {
        if self.pay_rate > 0.0 && self.xmr_price > 0.0 && self.pay_rate.is_finite() && self.xmr_price.is_finite() {
            Ok(())
        } else {
            Err(EconomicsError::Domain("market constants must be positive"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Profit {
    pub xmr: f64,
    pub usd: f64,
}

/// Earnings for `hashes` total hashes.
pub fn profit_for_hashes(hashes: f64, c: &MarketConstants) -> Profit {
    let xmr = c.pay_rate * hashes / 1e6;
    Profit {
        xmr,
        usd: xmr * c.xmr_price,
    }
}

/// Earnings of a device hashing at `h` per second for `dt_minutes`.
pub fn profit(h: f64, dt_minutes: f64, c: &MarketConstants) -> Result<Profit, EconomicsError> {
    if !(h >= 0.0 && dt_minutes >= 0.0) {
        return Err(EconomicsError::Domain("hash rate and duration must be non-negative"));
    }
    Ok(profit_for_hashes(h * dt_minutes * 60.0, c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRow {
    pub alpha: f64,
    /// Hashes per second at this throttle.
    pub hash_rate: f64,
    /// Battery % left after the session while mining.
    pub battery_mining: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub name: String,
    /// Power draw in watts.
    pub watts: f64,
    /// Electricity cost, USD per watt-hour.
    pub cost_per_wh: f64,
    /// Hours to recharge 1% of battery.
    pub recharge_hours_per_percent: f64,
    /// Battery % left after the session without mining.
    pub baseline_battery: f64,
    pub session_minutes: f64,
    pub rows: Vec<AlphaRow>,
}

impl DeviceProfile {
    pub fn validate(&self) -> Result<(), EconomicsError> {
        let positive = [self.watts, self.cost_per_wh, self.recharge_hours_per_percent, self.session_minutes];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(EconomicsError::Domain("device parameters must be positive"));
        }
        if !(0.0..=100.0).contains(&self.baseline_battery) {
            return Err(EconomicsError::Domain("baseline battery must be within [0, 100]"));
        }
        Ok(())
    }

    pub fn row(&self, alpha: f64) -> Result<&AlphaRow, EconomicsError> {
        self.rows
            .iter()
            .find(|r| (r.alpha - alpha).abs() < 1e-9)
            .ok_or_else(|| EconomicsError::MissingAlpha {
                device: self.name.clone(),
                alpha,
            })
    }
}

/// Cost in USD of recharging the battery drained by mining:
/// `C · W · t_r · (b_n − b_c)`.
pub fn loss(profile: &DeviceProfile, b_c: f64) -> Result<f64, EconomicsError> {
    profile.validate()?;
    let b_n = profile.baseline_battery;
    if b_c > b_n {
        return Err(EconomicsError::BatteryGain { b_c, b_n });
    }
    if b_c < 0.0 {
        return Err(EconomicsError::Domain("battery level must be non-negative"));
    }
    Ok(profile.cost_per_wh * profile.watts * profile.recharge_hours_per_percent * (b_n - b_c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneXmr {
    pub hashes_needed: f64,
    pub years: f64,
}

pub fn time_to_one_xmr(h: f64, c: &MarketConstants) -> Result<OneXmr, EconomicsError> {
    c.validate()?;
    if !(h > 0.0) {
        return Err(EconomicsError::Domain("hash rate must be positive"));
    }
    let hashes_needed = 1e6 / c.pay_rate;
    Ok(OneXmr {
        hashes_needed,
        years: hashes_needed / h / SECONDS_PER_YEAR,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionEconomics {
    pub device: String,
    pub session_minutes: f64,
    pub baseline_battery: f64,
    pub alpha: f64,
    pub hash_rate: f64,
    pub battery_mining: f64,
    pub watts: f64,
    pub profit_xmr: f64,
    pub profit_usd: f64,
    pub loss_usd: f64,
    /// `loss_usd − profit_usd`.
    pub gap_usd: f64,
    pub years_to_one_xmr: f64,
}

/// One row per device and throttle setting.
pub fn device_table(
    profiles: &[DeviceProfile],
    alphas: &[f64],
    c: &MarketConstants,
) -> Result<Vec<SessionEconomics>, EconomicsError> {
    let mut out = Vec::new();
    for p in profiles {
        for &alpha in alphas {
            let row = p.row(alpha)?;
            let pr = profit(row.hash_rate, p.session_minutes, c)?;
            let l = loss(p, row.battery_mining)?;
            out.push(SessionEconomics {
                device: p.name.clone(),
                session_minutes: p.session_minutes,
                baseline_battery: p.baseline_battery,
                alpha,
                hash_rate: row.hash_rate,
                battery_mining: row.battery_mining,
                watts: p.watts,
                profit_xmr: pr.xmr,
                profit_usd: pr.usd,
                loss_usd: l,
                gap_usd: l - pr.usd,
                years_to_one_xmr: time_to_one_xmr(row.hash_rate, c)?.years,
            });
        }
    }
    Ok(out)
}

/// Four significant figures.
pub fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-3..6).contains(&mag) {
        let decimals = (3 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.3e}")
    }
}

pub fn device_table_csv(rows: &[SessionEconomics]) -> String {
    let mut s = String::from("device,dt_min,b_n,alpha,h,b_c,W,P_usd,L_usd,L_minus_P_usd,T_years\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.device,
            r.session_minutes,
            r.baseline_battery,
            r.alpha,
            r.hash_rate,
            r.battery_mining,
            r.watts,
            sig4(r.profit_usd),
            sig4(r.loss_usd),
            sig4(r.gap_usd),
            sig4(r.years_to_one_xmr)
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WebsiteProfile {
    pub name: String,
    pub monthly_visits: f64,
    /// Average visit duration as `MM:SS`.
    pub avg_duration: String,
    /// Published monthly ad revenue, if any. Reference only.
    pub ad_revenue_monthly_usd: Option<f64>,
}

/// Parses `MM:SS` into seconds. Seconds above 59 are taken at face value
/// (one source row reads `02:98`).
pub fn parse_duration(s: &str) -> Result<f64, EconomicsError> {
    let bad = || EconomicsError::BadDuration(s.to_string());
    let (m, sec) = s.split_once(':').ok_or_else(bad)?;
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !digits(m) || !digits(sec) {
        return Err(bad());
    }
    let m: f64 = m.parse().map_err(|_| bad())?;
    let sec: f64 = sec.parse().map_err(|_| bad())?;
    Ok(m * 60.0 + sec)
}

/// Monthly USD if every visitor hashed at `hash_rate` for the average visit.
pub fn website_profit(visits: f64, duration_seconds: f64, hash_rate: f64, c: &MarketConstants) -> Result<f64, EconomicsError> {
    c.validate()?;
    if !(visits >= 0.0 && duration_seconds >= 0.0 && hash_rate >= 0.0) {
        return Err(EconomicsError::Domain("visits, duration and hash rate must be non-negative"));
    }
    Ok(profit_for_hashes(visits * duration_seconds * hash_rate, c).usd)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WebsiteEstimate {
    pub name: String,
    pub monthly_visits: f64,
    pub avg_duration: String,
    pub hash_rate: f64,
    pub mining_usd: f64,
    pub ad_revenue_usd: Option<f64>,
}

pub fn website_estimates(
    sites: &[WebsiteProfile],
    hash_rate: f64,
    c: &MarketConstants,
) -> Result<Vec<WebsiteEstimate>, EconomicsError> {
    sites
        .iter()
        .map(|s| {
            Ok(WebsiteEstimate {
                name: s.name.clone(),
                monthly_visits: s.monthly_visits,
                avg_duration: s.avg_duration.clone(),
                hash_rate,
                mining_usd: website_profit(s.monthly_visits, parse_duration(&s.avg_duration)?, hash_rate, c)?,
                ad_revenue_usd: s.ad_revenue_monthly_usd,
            })
        })
        .collect()
}

pub fn website_csv(rows: &[WebsiteEstimate]) -> String {
    let mut s = String::from("website,visits,duration,hash_rate,P_CJ_usd,P_Ads_usd\n");
    for r in rows {
        let ads = r.ad_revenue_usd.map(sig4).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.name,
            r.monthly_visits,
            r.avg_duration,
            r.hash_rate,
            sig4(r.mining_usd),
            ads
        );
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockStats {
    /// Chance a single hash meets the target.
    pub probability: f64,
    /// Expected hashes per block.
    pub expected_hashes: f64,
    /// Expected seconds per block at the given network rate.
    pub block_time: f64,
}

/// Parses a 256-bit target given in hex (at most 64 digits).
pub fn parse_target_256(hex: &str) -> Result<f64, EconomicsError> {
    let hex = hex.trim_start_matches("0x");
    if hex.is_empty() || hex.len() > 64 {
        return Err(EconomicsError::BadTarget("expected 1 to 64 hex digits"));
    }
    hex.chars().try_fold(0.0f64, |acc, ch| {
        ch.to_digit(16)
            .map(|d| acc * 16.0 + f64::from(d))
            .ok_or(EconomicsError::BadTarget("not hex"))
    })
}

pub fn block_stats(target: f64, network_hash_rate: f64) -> Result<BlockStats, EconomicsError> {
    let space = 2f64.powi(256);
    if !(target > 0.0) {
        return Err(EconomicsError::BadTarget("target must be positive"));
    }
    if target >= space {
        return Err(EconomicsError::BadTarget("target must be below 2^256"));
    }
    if !(network_hash_rate > 0.0) {
        return Err(EconomicsError::Domain("network hash rate must be positive"));
    }
    let probability = target / space;
    let expected_hashes = 1.0 / probability;
    Ok(BlockStats {
        probability,
        expected_hashes,
        block_time: expected_hashes / network_hash_rate,
    })
}

#[derive(Deserialize)]
struct ProfilesFile {
    devices: Vec<DeviceProfile>,
}

#[derive(Deserialize)]
struct WebsitesFile {
    sites: Vec<WebsiteProfile>,
}

pub fn parse_profiles(json: &str) -> Result<Vec<DeviceProfile>, EconomicsError> {
    let f: ProfilesFile = serde_json::from_str(json).map_err(|e| EconomicsError::Data(e.to_string()))?;
    for d in &f.devices {
        d.validate()?;
    }
    Ok(f.devices)
}

pub fn parse_websites(json: &str) -> Result<Vec<WebsiteProfile>, EconomicsError> {
    let f: WebsitesFile = serde_json::from_str(json).map_err(|e| EconomicsError::Data(e.to_string()))?;
    Ok(f.sites)
}

/// The shipped Windows, Linux and Android profiles.
pub fn builtin_profiles() -> Vec<DeviceProfile> {
    parse_profiles(PROFILES_JSON).expect("shipped profiles are valid")
}

/// The shipped website list with reference ad revenue.
pub fn builtin_websites() -> Vec<WebsiteProfile> {
    parse_websites(WEBSITES_JSON).expect("shipped website data is valid")
}

pub const DEFAULT_ALPHAS: [f64; 3] = [0.1, 0.5, 0.9];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn windows() -> DeviceProfile {
        builtin_profiles().into_iter().find(|d| d.name == "Windows").unwrap()
    }

    #[test]
    fn session_profit() {
        let c = MarketConstants::default();
        let p = profit(21.0, 85.0, &c).unwrap();
        assert_relative_eq!(p.xmr, 3.099474e-6, max_relative = 1e-12);
        assert_eq!(p.usd, p.xmr * 200.0);
        assert_eq!(profit(0.0, 85.0, &c).unwrap().xmr, 0.0);
        let double = profit(42.0, 85.0, &c).unwrap();
        assert_relative_eq!(double.xmr, 2.0 * p.xmr, max_relative = 1e-15);
    }

    #[test]
    fn battery_loss() {
        let w = windows();
        assert_relative_eq!(loss(&w, 10.0).unwrap(), 4.5055e-3, max_relative = 1e-4);
        assert_eq!(loss(&w, 82.0).unwrap(), 0.0);
        assert!(matches!(loss(&w, 90.0), Err(EconomicsError::BatteryGain { .. })));
    }

    #[test]
    fn one_coin() {
        let c = MarketConstants::default();
        let t = time_to_one_xmr(21.0, &c).unwrap();
        assert_relative_eq!(t.hashes_needed, 3.4554e10, max_relative = 1e-4);
        assert_relative_eq!(t.years, 52.18, max_relative = 1e-3);
        assert_relative_eq!(time_to_one_xmr(42.0, &c).unwrap().years, t.years / 2.0, max_relative = 1e-12);
        assert!(time_to_one_xmr(0.0, &c).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = device_table(&builtin_profiles(), &DEFAULT_ALPHAS, &MarketConstants::default()).unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert_eq!(r.gap_usd, r.loss_usd - r.profit_usd);
        }
        let android_09 = rows.iter().find(|r| r.device == "Android" && r.alpha == 0.9).unwrap();
        assert!(android_09.gap_usd > 0.0);
        let err = device_table(&builtin_profiles(), &[0.3], &MarketConstants::default()).unwrap_err();
        assert!(matches!(err, EconomicsError::MissingAlpha { .. }));
        let csv = device_table_csv(&rows);
        assert_eq!(csv.lines().count(), 10);
    }

    #[test]
    fn websites() {
        let c = MarketConstants::default();
        assert_relative_eq!(website_profit(47.09e9, 443.0, 20.0, &c).unwrap(), 2.4149e6, max_relative = 1e-4);
        assert_relative_eq!(website_profit(87.24e6, 272.0, 20.0, &c).unwrap(), 2746.9, max_relative = 1e-3);
        assert_eq!(website_profit(0.0, 272.0, 20.0, &c).unwrap(), 0.0);
        // Folding visits × duration into one session gives the same number.
        let folded = profit(20.0, 87.24e6 * 272.0 / 60.0, &c).unwrap().usd;
        assert_relative_eq!(folded, website_profit(87.24e6, 272.0, 20.0, &c).unwrap(), max_relative = 1e-12);
        let all = website_estimates(&builtin_websites(), 20.0, &c).unwrap();
        assert_eq!(all.len(), 20);
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("07:23").unwrap(), 443.0);
        assert_eq!(parse_duration("02:98").unwrap(), 218.0);
        assert!(parse_duration("7m").is_err());
        assert!(parse_duration(":12").is_err());
    }

    #[test]
    fn blocks() {
        let s = block_stats(2f64.powi(255), 1.0).unwrap();
        assert_eq!((s.probability, s.expected_hashes, s.block_time), (0.5, 2.0, 2.0));
        let s = block_stats(2f64.powi(224), 1e6).unwrap();
        assert_eq!(s.expected_hashes, 2f64.powi(32));
        assert_relative_eq!(s.block_time, 4294.967296, max_relative = 1e-12);
        assert_eq!(block_stats(2f64.powi(224), 2e6).unwrap().block_time, s.block_time / 2.0);
        assert!(block_stats(0.0, 1.0).is_err());
        assert_eq!(parse_target_256(&format!("1{}", "0".repeat(56))).unwrap(), 2f64.powi(224));
        assert!(parse_target_256(&"f".repeat(65)).is_err());
    }

    #[test]
    fn significant_figures() {
        assert_eq!(sig4(4.50549e-3), "0.004505");
        assert_eq!(sig4(52.1845), "52.18");
        assert_eq!(sig4(2_414_906.0), "2.415e6");
        assert_eq!(sig4(6.2e-4), "6.200e-4");
    }
}
