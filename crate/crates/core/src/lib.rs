//! Coded single-tone signaling over OFDM.
//!
//! Short coordination messages are Reed-Solomon encoded over GF(2^m) and
//! sent as one energized subcarrier per OFDM symbol. This crate provides the
//! field and code arithmetic, a multi-user channel simulator with
//! multi-antenna energy detection, and the Monte Carlo experiments that
//! measure tone miss rates and multi-user decoding.
//!
//! Modules:
//! - [`gf`]: GF(2^m) and polynomials over it
//! - [`codec`]: message packing, encoding onto tones, list decoding
//! - [`channel`]: AWGN / flat Rayleigh / Pedestrian B received grids
//! - [`detector`]: energy combining, thresholds, closed-form CDFs
//! - [`harness`]: experiments, outcome classification, CSV output

pub mod channel;
pub mod codec;
pub mod detector;
pub mod error;
pub mod gf;
pub mod harness;
pub mod stats;

pub use channel::{
    Channel, ChannelConfig, ChannelGains, ChannelModel, InterferenceMode, ReceivedGrid,
    TimeVariation,
};
pub use codec::{
    CodeParams, Codebook, DetectedToneSets, InfoSymbols, RcrMessage, StsCodeword, ToneSchedule,
};
pub use detector::{DetectorConfig, EnergyGrid, Sigma2Mode};
pub use error::{Error, Result};
pub use gf::{Elem, Field, GfPoly};
pub use harness::{ExperimentConfig, ExperimentKind, OutcomeCounts, RunReport};
