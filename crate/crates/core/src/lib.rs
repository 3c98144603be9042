//! Toolkit for studying in-browser cryptojacking.
//!
//! - [`jsmetrics`]: static complexity features of JavaScript sources
//! - [`featanalysis`]: per-class correlation matrices and significant-feature selection
//! - [`classifier`]: five classifiers and a repeated-holdout evaluation bench
//! - [`protocol`]: the five-frame mining wire protocol, proof of work and session state machine
//! - [`simnet`]: server, throttled miner, relay and detectors wired into scenarios
//! - [`economics`]: profit/loss model of browser mining

pub mod classifier;
pub mod economics;
pub mod featanalysis;
pub mod jsmetrics;
pub mod protocol;
pub mod simnet;
