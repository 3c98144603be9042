use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use cryptolab::economics::{
    block_stats, builtin_profiles, builtin_websites, device_table, device_table_csv, parse_duration, parse_profiles,
    parse_target_256, sig4, website_csv, website_estimates, MarketConstants, WebsiteProfile, DEFAULT_ALPHAS,
};
use serde_json::json;

use crate::common::{Common, Format, Summary};

#[derive(clap::Args, Clone)]
pub struct Market {
    /// Coins paid per million hashes.
    #[arg(long, default_value_t = 2.894e-5)]
    pub pay_rate: f64,
    /// USD per coin.
    #[arg(long, default_value_t = 200.0)]
    pub price: f64,
}

impl Market {
    fn constants(&self) -> MarketConstants {
        MarketConstants {
            pay_rate: self.pay_rate,
            xmr_price: self.price,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Profit, loss, gap and years-to-one-coin per device and throttle.
    DeviceTable {
        /// Device profiles JSON (defaults to the shipped profiles).
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
        alphas: Vec<f64>,
        #[command(flatten)]
        market: Market,
        #[command(flatten)]
        common: Common,
    },
    /// Monthly mining revenue for one website.
    Website {
        /// Monthly visits.
        #[arg(long)]
        visits: f64,
        /// Average visit duration, MM:SS.
        #[arg(long)]
        duration: String,
        /// Visitor hash rate (hashes per second).
        #[arg(long, default_value_t = 20.0)]
        hashrate: f64,
        #[arg(long, default_value = "site")]
        name: String,
        #[command(flatten)]
        market: Market,
        #[command(flatten)]
        common: Common,
    },
    /// Monthly mining revenue for the shipped website list, next to
    /// published ad revenue where known.
    Websites {
        #[arg(long, default_value_t = 20.0)]
        hashrate: f64,
        #[command(flatten)]
        market: Market,
        #[command(flatten)]
        common: Common,
    },
    /// Block probability, expected hashes and block time for a target.
    BlockStats {
        /// 256-bit target in hex.
        #[arg(long, conflicts_with = "target_pow2")]
        target: Option<String>,
        /// Target given as a power of two, 2^K.
        #[arg(long)]
        target_pow2: Option<i32>,
        /// Network hash rate (hashes per second).
        #[arg(long)]
        network_hashrate: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn json_line(v: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn run(cmd: Command) -> Result<Summary> {
    match cmd {
        Command::DeviceTable {
            profiles,
            alphas,
            market,
            common,
        } => {
            let profiles = match profiles {
                Some(p) => parse_profiles(&fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => builtin_profiles(),
            };
            let rows = device_table(&profiles, &alphas, &market.constants())?;
            let content = match common.format {
                Format::Csv => device_table_csv(&rows),
                Format::Json => json_line(&json!({"seed": common.seed, "rows": rows}))?,
            };
            common.write(&content)?;
            Ok(Summary::new("economics device-table", &common).field("rows", rows.len()).field("warnings", 0))
        }
        Command::Website {
            visits,
            duration,
            hashrate,
            name,
            market,
            common,
        } => {
            parse_duration(&duration)?;
            let site = WebsiteProfile {
                name,
                monthly_visits: visits,
                avg_duration: duration,
                ad_revenue_monthly_usd: None,
            };
            let rows = website_estimates(&[site], hashrate, &market.constants())?;
            let content = match common.format {
                Format::Csv => website_csv(&rows),
                Format::Json => json_line(&json!({"seed": common.seed, "rows": rows}))?,
            };
            common.write(&content)?;
            Ok(Summary::new("economics website", &common)
                .field("usd_per_month", sig4(rows[0].mining_usd))
                .field("warnings", 0))
        }
        Command::Websites { hashrate, market, common } => {
            let rows = website_estimates(&builtin_websites(), hashrate, &market.constants())?;
            let content = match common.format {
                Format::Csv => website_csv(&rows),
                Format::Json => json_line(&json!({"seed": common.seed, "rows": rows}))?,
            };
            common.write(&content)?;
            Ok(Summary::new("economics websites", &common).field("rows", rows.len()).field("warnings", 0))
        }
        Command::BlockStats {
            target,
            target_pow2,
            network_hashrate,
            common,
        } => {
            let t = match (target, target_pow2) {
                (Some(hex), None) => parse_target_256(&hex)?,
                (None, Some(k)) => 2f64.powi(k),
                _ => bail!("give exactly one of --target or --target-pow2"),
            };
            let s = block_stats(t, network_hashrate)?;
            let content = match common.format {
                Format::Csv => format!(
                    "probability,expected_hashes,block_time_s\n{},{},{}\n",
                    sig4(s.probability),
                    sig4(s.expected_hashes),
                    sig4(s.block_time)
                ),
                Format::Json => json_line(&json!({"seed": common.seed, "stats": s}))?,
            };
            common.write(&content)?;
            Ok(Summary::new("economics block-stats", &common)
                .field("block_time_s", sig4(s.block_time))
                .field("warnings", 0))
        }
    }
}
