use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use cryptolab::simnet::{run_scenario, Blacklist, DetectorKind, Scenario, ScenarioParams, TransportKind};

use crate::common::{write_file, Common, Format, Summary};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Transport {
    InProcess,
    Tcp,
}

#[derive(clap::Args)]
pub struct Args {
    /// direct, relay, keyless or benign-socket.
    #[arg(long)]
    pub scenario: Scenario,
    /// Throttle: fraction of each second spent idle.
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Peak hash rate (hashes per second).
    #[arg(long, default_value_t = 1000.0)]
    pub hmax: f64,
    /// Seconds of simulated mining.
    #[arg(long, default_value_t = 30)]
    pub duration: u64,
    /// Share target, 8 hex digits.
    #[arg(long, default_value = "ffffff00")]
    pub target: String,
    #[arg(long, value_enum, default_value = "in-process")]
    pub transport: Transport,
    /// Pace the run against the wall clock instead of simulated time.
    #[arg(long)]
    pub real_time: bool,
    /// Blacklist file, one endpoint per line (`*` suffix = prefix match).
    #[arg(long)]
    pub blacklist: Option<PathBuf>,
    /// Write the server frame log (JSON lines) here.
    #[arg(long)]
    pub log: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: Args) -> Result<Summary> {
    let blacklist = match &args.blacklist {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Some(text.parse::<Blacklist>().expect("infallible"))
        }
        None => None,
    };
    let params = ScenarioParams {
        alpha: args.alpha,
        h_max: args.hmax,
        duration: args.duration,
        seed: args.common.seed,
        target: args.target.clone(),
        transport: match args.transport {
            Transport::InProcess => TransportKind::InProcess,
            Transport::Tcp => TransportKind::Tcp,
        },
        real_time: args.real_time,
        blacklist,
    };
    let outcome = run_scenario(args.scenario, &params)?;
    let r = &outcome.report;
    let bl = r.verdict(DetectorKind::Blacklist);
    let pl = r.verdict(DetectorKind::Payload);
    let content = match args.common.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r)?;
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "scenario,seed,alpha,h_max,duration,accepted_hashes,attempted_hashes,sessions,blacklist_flagged,payload_flagged,payload_time_of_flag\n{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scenario.as_str(),
            r.seed,
            r.alpha,
            r.h_max,
            r.duration,
            r.accepted_hashes,
            r.attempted_hashes,
            r.sessions,
            bl.flagged,
            pl.flagged,
            pl.time_of_flag.map_or(String::new(), |t| t.to_string()),
        ),
    };
    args.common.write(&content)?;
    if let Some(p) = &args.log {
        write_file(p, &outcome.log_jsonl())?;
    }
    Ok(Summary::new("simulate", &args.common)
        .field("scenario", r.scenario)
        .field("blacklist", if bl.flagged { "flagged" } else { "clear" })
        .field("payload", if pl.flagged { "flagged" } else { "clear" })
        .field("accepted_hashes", r.accepted_hashes)
        .field("attempted_hashes", r.attempted_hashes)
        .field("warnings", 0))
}
