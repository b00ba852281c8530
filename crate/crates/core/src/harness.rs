//! Monte Carlo experiments: per-tone miss detection and multi-user decoding.
//!
//! Every trial draws from its own ChaCha stream, keyed by the run seed, the
//! operating point and the trial index, so results do not depend on how
//! trials are scheduled across threads.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, ChannelConfig, ChannelModel, InterferenceMode};
use crate::codec::{max_users, CodeParams, Codebook, DetectedToneSets, ToneSchedule};
use crate::detector::{combine_energy, detect, p_miss, DetectorConfig};
use crate::error::{Error, Result};
use crate::stats::{fmt_sig6, wilson_interval};

/// How SIR maps onto the per-tone model; recorded with every run.
pub const SIR_DEFINITION: &str =
    "SIR = (E_r / S) / sigma_I^2: time-domain per-sample tone energy over per-tone interference variance (unitary DFT, sigma_I^2 = 1)";

const CALIBRATION_SALT: u64 = 0x5EED_CA11_B8A7_E000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    MissDetection,
    MultiuserDecode,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MissDetection => "miss_detection",
            ExperimentKind::MultiuserDecode => "multiuser_decode",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "miss_detection" => Ok(ExperimentKind::MissDetection),
            "multiuser_decode" => Ok(ExperimentKind::MultiuserDecode),
            other => Err(Error::Config(format!("unknown experiment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub m: u32,
}

impl Default for CodeSpec {
    fn default() -> Self {
        Self { n: 14, k: 1, m: 9 }
    }
}

impl CodeSpec {
    pub fn params(&self) -> Result<CodeParams> {
        CodeParams::with_exponent(self.m, self.n, self.k)
    }
}

/// Decoder acceptance threshold: fixed, or calibrated before the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecodeThreshold {
    Fixed(usize),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoTag {
    Auto,
}

impl DecodeThreshold {
    pub const AUTO: DecodeThreshold = DecodeThreshold::Auto(AutoTag::Auto);
}

impl std::str::FromStr for DecodeThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::AUTO);
        }
        s.parse().map(DecodeThreshold::Fixed).map_err(|_| {
            Error::Config(format!(
                "decode threshold {s:?} is neither an integer nor \"auto\""
            ))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationConfig {
    pub trials_per_point: u64,
    /// Error rate the calibrated threshold must stay below at every point.
    pub max_error_rate: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            trials_per_point: 1000,
            max_error_rate: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub sir_points_db: Vec<f64>,
    /// Receive antenna counts to sweep; overrides `channel.n_rx`.
    pub n_rx: Vec<usize>,
    pub n_users: usize,
    pub code: CodeSpec,
    pub decode_threshold: DecodeThreshold,
    pub trials_per_point: u64,
    pub seed: u64,
    /// Skip the channel and hand the decoder exactly the transmitted tones.
    pub perfect_detection: bool,
    pub channel: ChannelConfig,
    pub detector: DetectorConfig,
    pub calibration: CalibrationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::MultiuserDecode,
            sir_points_db: vec![-30.0, -27.0, -24.0, -21.0, -18.0, -15.0],
            n_rx: vec![1, 2, 4],
            n_users: 30,
            code: CodeSpec::default(),
            decode_threshold: DecodeThreshold::AUTO,
            trials_per_point: 1000,
            seed: 1,
            perfect_detection: false,
            channel: ChannelConfig::default(),
            detector: DetectorConfig::default(),
            calibration: CalibrationConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Default sweep for each experiment: 1, 2 and 4 antennas in flat
    /// Rayleigh fading.
    pub fn preset(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::MultiuserDecode => Self::default(),
            ExperimentKind::MissDetection => Self {
                experiment: kind,
                sir_points_db: vec![-20.0, -18.0, -16.0, -14.0, -12.0, -10.0, -8.0, -6.0],
                trials_per_point: 20_000,
                ..Self::default()
            },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_point < 1 {
            return Err(Error::Config("trials_per_point must be at least 1".into()));
        }
        if self.sir_points_db.is_empty() {
            return Err(Error::Config("sir_points_db is empty".into()));
        }
        if self.sir_points_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("sir points must be finite".into()));
        }
        if self.n_rx.is_empty() || self.n_rx.contains(&0) {
            return Err(Error::Config(
                "n_rx must list positive antenna counts".into(),
            ));
        }
        self.channel.validate()?;
        self.detector.validate()?;
        match self.experiment {
            ExperimentKind::MissDetection => {
                if self.channel.s < 2 {
                    return Err(Error::Config("need at least two subcarriers".into()));
                }
            }
            ExperimentKind::MultiuserDecode => {
                let params = self.code.params()?;
                if self.channel.s != params.order() {
                    return Err(Error::Config(format!(
                        "channel has {} subcarriers but GF({}) needs {}",
                        self.channel.s,
                        params.order(),
                        params.order()
                    )));
                }
                if self.channel.n_sym != params.n {
                    return Err(Error::Config(format!(
                        "channel block of {} symbols does not match N={}",
                        self.channel.n_sym, params.n
                    )));
                }
                if self.n_users < 1 || self.n_users as u64 > max_users(&params) {
                    return Err(Error::Config(format!(
                        "{} users outside 1..={} for the ({},{}) code",
                        self.n_users,
                        max_users(&params),
                        params.n,
                        params.k
                    )));
                }
                if let DecodeThreshold::Fixed(t) = self.decode_threshold {
                    if t < 1 || t > params.n {
                        return Err(Error::Config(format!(
                            "decode threshold {t} outside 1..={}",
                            params.n
                        )));
                    }
                }
                if !(self.calibration.max_error_rate > 0.0) || self.calibration.trials_per_point < 1
                {
                    return Err(Error::Config("invalid calibration settings".into()));
                }
            }
        }
        Ok(())
    }

    /// `(sir_db, n_rx)` in output order: ascending SIR, then antennas.
    fn points(&self) -> Vec<(f64, usize)> {
        let mut sirs = self.sir_points_db.clone();
        sirs.sort_by(f64::total_cmp);
        sirs.dedup();
        let mut rx = self.n_rx.clone();
        rx.sort_unstable();
        rx.dedup();
        sirs.iter()
            .flat_map(|&s| rx.iter().map(move |&r| (s, r)))
            .collect()
    }

    fn point_channel(&self, sir_db: f64, n_rx: usize) -> ChannelConfig {
        ChannelConfig {
            sir_db,
            n_rx,
            ..self.channel.clone()
        }
    }

    fn point_detector(&self, n_rx: usize) -> DetectorConfig {
        DetectorConfig {
            n_rx,
            ..self.detector.clone()
        }
    }
}

fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Stream key for an operating point.
fn point_key(sir_db: f64, n_rx: usize) -> u64 {
    mix64(sir_db.to_bits() ^ mix64(n_rx as u64))
}

/// The random stream of one trial: stream `point`, offset `trial * 2^40` words.
pub fn trial_rng(seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point);
    rng.set_word_pos((trial as u128) << 40);
    rng
}

/// Counts for one `(sir_db, n_rx)` point of the miss-detection experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissPoint {
    pub sir_db: f64,
    pub n_rx: usize,
    pub n_trials: u64,
    pub n_miss: u64,
    /// Tone decisions on subcarriers without a tone.
    pub n_fa_opportunities: u64,
    pub n_false_alarm: u64,
    pub p_miss_analytic: f64,
}

impl MissPoint {
    pub fn p_miss(&self) -> f64 {
        self.n_miss as f64 / self.n_trials as f64
    }

    pub fn p_fa(&self) -> f64 {
        self.n_false_alarm as f64 / self.n_fa_opportunities as f64
    }
}

/// Counts for one `(sir_db, n_rx)` point of the multi-user experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodePoint {
    pub sir_db: f64,
    pub n_rx: usize,
    pub n_trials: u64,
    /// Users whose message nobody else sent, summed over trials.
    pub n_user_trials: u64,
    pub n_decoded_correct: u64,
    pub n_erasure: u64,
    /// Missing users to which a wrong decoded message was attributed.
    pub n_error: u64,
    /// Decoded messages that no user sent.
    pub n_error_events: u64,
    /// Users sharing their message with another user.
    pub n_collision: u64,
    pub n_users: usize,
}

impl DecodePoint {
    fn rate(num: u64, den: u64) -> f64 {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    }

    pub fn p_erasure(&self) -> f64 {
        Self::rate(self.n_erasure, self.n_user_trials)
    }

    /// Wrong decodes per non-colliding user transmission.
    pub fn p_error(&self) -> f64 {
        Self::rate(self.n_error_events, self.n_user_trials)
    }

    pub fn p_collision(&self) -> f64 {
        Self::rate(self.n_collision, self.n_trials * self.n_users as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "experiment", content = "points", rename_all = "snake_case")]
pub enum OutcomeCounts {
    MissDetection(Vec<MissPoint>),
    MultiuserDecode(Vec<DecodePoint>),
}

impl OutcomeCounts {
    pub fn len(&self) -> usize {
        match self {
            OutcomeCounts::MissDetection(p) => p.len(),
            OutcomeCounts::MultiuserDecode(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UserOutcome {
    Correct,
    Erasure,
    Error,
    Collision,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// One label per transmitted message, in input order.
    pub labels: Vec<UserOutcome>,
    /// Decoded messages absent from the transmitted set.
    pub error_events: usize,
}

impl TrialOutcome {
    pub fn count(&self, label: UserOutcome) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Labels each transmitted message against the decoder output.
///
/// Messages sent by two or more users are collisions. Each remaining user is
/// correct if its message was decoded; otherwise it takes one of the wrong
/// decoded messages as an error while any are left, and is an erasure after
/// that.
pub fn classify_outcome(decoded: &[u64], truth: &[u64]) -> TrialOutcome {
    let mut multiplicity: HashMap<u64, usize> = HashMap::new();
    for &m in truth {
        *multiplicity.entry(m).or_default() += 1;
    }
    let mut decoded_set: Vec<u64> = decoded.to_vec();
    decoded_set.sort_unstable();
    decoded_set.dedup();
    let error_events = decoded_set
        .iter()
        .filter(|m| !multiplicity.contains_key(m))
        .count();
    let mut unattributed = error_events;
    let labels = truth
        .iter()
        .map(|m| {
            if multiplicity[m] > 1 {
                UserOutcome::Collision
            } else if decoded_set.binary_search(m).is_ok() {
                UserOutcome::Correct
            } else if unattributed > 0 {
                unattributed -= 1;
                UserOutcome::Error
            } else {
                UserOutcome::Erasure
            }
        })
        .collect();
    TrialOutcome {
        labels,
        error_events,
    }
}

pub fn run_miss_detection(cfg: &ExperimentConfig) -> Result<OutcomeCounts> {
    if cfg.experiment != ExperimentKind::MissDetection {
        return Err(Error::Config("experiment is not miss_detection".into()));
    }
    cfg.validate()?;
    let points = cfg
        .points()
        .into_iter()
        .map(|(sir_db, n_rx)| miss_point(cfg, sir_db, n_rx))
        .collect::<Result<Vec<_>>>()?;
    Ok(OutcomeCounts::MissDetection(points))
}

/// One tone per trial in a single OFDM symbol.
fn miss_point(cfg: &ExperimentConfig, sir_db: f64, n_rx: usize) -> Result<MissPoint> {
    let channel_cfg = ChannelConfig {
        n_sym: 1,
        ..cfg.point_channel(sir_db, n_rx)
    };
    let s = channel_cfg.s;
    let er = channel_cfg.tone_energy();
    let interference = channel_cfg.interference;
    let channel = Channel::new(channel_cfg)?;
    let detector = cfg.point_detector(n_rx);
    let nominal_x = crate::detector::threshold_for_pfa(&detector, detector.sigma2_known)?;
    let p_miss_analytic = p_miss(nominal_x, n_rx, detector.sigma2_known, er)?;
    let key = point_key(sir_db, n_rx);

    let (n_miss, n_false_alarm) = (0..cfg.trials_per_point)
        .into_par_iter()
        .map(|trial| -> Result<(u64, u64)> {
            let mut rng = trial_rng(cfg.seed, key, trial);
            let tone = rng.gen_range(0..s);
            let sched = ToneSchedule::new(vec![tone]);
            let gains = channel.gen_gains(1, &mut rng);
            let grid = channel.transmit(std::slice::from_ref(&sched), &gains, &mut rng)?;
            let z = combine_energy(&grid);
            let x = detector.threshold(&z, interference)?;
            let row = z.values();
            let miss = u64::from(row[tone] < x);
            let fa = row
                .iter()
                .enumerate()
                .filter(|&(k, &v)| k != tone && v >= x)
                .count() as u64;
            Ok((miss, fa))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

    Ok(MissPoint {
        sir_db,
        n_rx,
        n_trials: cfg.trials_per_point,
        n_miss,
        n_fa_opportunities: cfg.trials_per_point * (s as u64 - 1),
        n_false_alarm,
        p_miss_analytic,
    })
}

/// What one multi-user trial hands to the decoder.
struct TrialScores {
    truth: Vec<u64>,
    scores: Vec<u16>,
}

fn multiuser_trial(
    cfg: &ExperimentConfig,
    book: &Codebook,
    channel: &Channel,
    detector: &DetectorConfig,
    seed: u64,
    key: u64,
    trial: u64,
) -> Result<TrialScores> {
    let mut rng = trial_rng(seed, key, trial);
    let count = book.len() as u64;
    let truth: Vec<u64> = (0..cfg.n_users).map(|_| rng.gen_range(0..count)).collect();
    let schedules: Vec<ToneSchedule> = truth.iter().map(|&m| book.schedule(m)).collect();
    let detected = if cfg.perfect_detection {
        DetectedToneSets::from_schedules(book.params().n, &schedules)
    } else {
        let gains = channel.gen_gains(schedules.len(), &mut rng);
        let grid = channel.transmit(&schedules, &gains, &mut rng)?;
        let z = combine_energy(&grid);
        let x = detector.threshold(&z, channel.config().interference)?;
        detect(&z, x)
    };
    let scores = book.scores(&detected)?;
    Ok(TrialScores { truth, scores })
}

/// Result of threshold calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub theta: usize,
    /// Worst error rate across calibration points, indexed by `theta - 1`.
    pub worst_error_rate: Vec<f64>,
    pub trials_per_point: u64,
}

/// Picks the smallest acceptance threshold whose error rate stays below the
/// configured limit at every calibration point.
///
/// Calibration runs on streams independent of the main run's.
pub fn calibrate_threshold(cfg: &ExperimentConfig) -> Result<Calibration> {
    cfg.validate()?;
    let params = cfg.code.params()?;
    let book = Codebook::new(&params)?;
    let n = params.n;
    let seed = cfg.seed ^ CALIBRATION_SALT;
    let trials = cfg.calibration.trials_per_point;
    let mut worst = vec![0.0f64; n];

    for (sir_db, n_rx) in cfg.points() {
        let channel = Channel::new(cfg.point_channel(sir_db, n_rx))?;
        let detector = cfg.point_detector(n_rx);
        let key = point_key(sir_db, n_rx);
        let zero = || (vec![0u64; n + 1], 0u64);
        let (hist, user_trials) = (0..trials)
            .into_par_iter()
            .map(|trial| -> Result<(Vec<u64>, u64)> {
                let ts = multiuser_trial(cfg, &book, &channel, &detector, seed, key, trial)?;
                let mut hist = vec![0u64; n + 1];
                let mut sent = ts.truth.clone();
                sent.sort_unstable();
                for (m, &score) in ts.scores.iter().enumerate() {
                    if sent.binary_search(&(m as u64)).is_err() {
                        hist[score as usize] += 1;
                    }
                }
                let singles = classify_outcome(&[], &ts.truth).count(UserOutcome::Erasure);
                Ok((hist, singles as u64))
            })
            .try_reduce(zero, |mut a, b| {
                for (x, y) in a.0.iter_mut().zip(&b.0) {
                    *x += y;
                }
                Ok((a.0, a.1 + b.1))
            })?;
        for theta in 1..=n {
            let events: u64 = hist[theta..].iter().sum();
            let rate = if user_trials == 0 {
                0.0
            } else {
                events as f64 / user_trials as f64
            };
            worst[theta - 1] = worst[theta - 1].max(rate);
        }
    }
    let theta = (1..=n)
        .find(|&t| worst[t - 1] < cfg.calibration.max_error_rate)
        .unwrap_or(n);
    Ok(Calibration {
        theta,
        worst_error_rate: worst,
        trials_per_point: trials,
    })
}

/// Runs the multi-user experiment with the given acceptance threshold.
pub fn run_multiuser_decode_with(cfg: &ExperimentConfig, theta: usize) -> Result<OutcomeCounts> {
    if cfg.experiment != ExperimentKind::MultiuserDecode {
        return Err(Error::Config("experiment is not multiuser_decode".into()));
    }
    cfg.validate()?;
    let params = cfg.code.params()?;
    if theta < 1 || theta > params.n {
        return Err(Error::Config(format!(
            "decode threshold {theta} outside 1..={}",
            params.n
        )));
    }
    let book = Codebook::new(&params)?;
    let mut points = Vec::new();
    for (sir_db, n_rx) in cfg.points() {
        let channel = Channel::new(cfg.point_channel(sir_db, n_rx))?;
        let detector = cfg.point_detector(n_rx);
        let key = point_key(sir_db, n_rx);
        let totals = (0..cfg.trials_per_point)
            .into_par_iter()
            .map(|trial| -> Result<[u64; 6]> {
                let ts = multiuser_trial(cfg, &book, &channel, &detector, cfg.seed, key, trial)?;
                let decoded: Vec<u64> = ts
                    .scores
                    .iter()
                    .enumerate()
                    .filter(|&(_, &sc)| sc as usize >= theta)
                    .map(|(m, _)| m as u64)
                    .collect();
                let out = classify_outcome(&decoded, &ts.truth);
                let correct = out.count(UserOutcome::Correct) as u64;
                let erasure = out.count(UserOutcome::Erasure) as u64;
                let error = out.count(UserOutcome::Error) as u64;
                Ok([
                    correct + erasure + error,
                    correct,
                    erasure,
                    error,
                    out.error_events as u64,
                    out.count(UserOutcome::Collision) as u64,
                ])
            })
            .try_reduce(
                || [0; 6],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )?;
        points.push(DecodePoint {
            sir_db,
            n_rx,
            n_trials: cfg.trials_per_point,
            n_user_trials: totals[0],
            n_decoded_correct: totals[1],
            n_erasure: totals[2],
            n_error: totals[3],
            n_error_events: totals[4],
            n_collision: totals[5],
            n_users: cfg.n_users,
        });
    }
    Ok(OutcomeCounts::MultiuserDecode(points))
}

/// Runs the multi-user experiment, calibrating the threshold first when it
/// is set to `auto`.
pub fn run_multiuser_decode(cfg: &ExperimentConfig) -> Result<OutcomeCounts> {
    Ok(run_multiuser_decode_report(cfg)?.counts)
}

fn run_multiuser_decode_report(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let calibration = match cfg.decode_threshold {
        DecodeThreshold::Fixed(_) => None,
        DecodeThreshold::Auto(_) => Some(calibrate_threshold(cfg)?),
    };
    let theta = match (&calibration, cfg.decode_threshold) {
        (Some(c), _) => c.theta,
        (None, DecodeThreshold::Fixed(t)) => t,
        (None, DecodeThreshold::Auto(_)) => unreachable!(),
    };
    let counts = run_multiuser_decode_with(cfg, theta)?;
    Ok(RunReport {
        config: cfg.clone(),
        counts,
        decode_threshold: Some(theta),
        calibration,
        sir_definition: SIR_DEFINITION,
    })
}

/// Everything a run produces, for the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub counts: OutcomeCounts,
    pub decode_threshold: Option<usize>,
    pub calibration: Option<Calibration>,
    pub sir_definition: &'static str,
}

impl RunReport {
    pub fn interference(&self) -> InterferenceMode {
        self.config.channel.interference
    }

    pub fn channel_model(&self) -> ChannelModel {
        self.config.channel.model
    }
}

/// Dispatches on `cfg.experiment`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    match cfg.experiment {
        ExperimentKind::MissDetection => Ok(RunReport {
            config: cfg.clone(),
            counts: run_miss_detection(cfg)?,
            decode_threshold: None,
            calibration: None,
            sir_definition: SIR_DEFINITION,
        }),
        ExperimentKind::MultiuserDecode => run_multiuser_decode_report(cfg),
    }
}

pub const MISS_COLUMNS: [&str; 11] = [
    "sir_db",
    "n_rx",
    "trials",
    "p_miss_emp",
    "p_miss_emp_ci_low",
    "p_miss_emp_ci_high",
    "p_miss_analytic",
    "p_miss_gap",
    "p_fa_emp",
    "p_fa_emp_ci_low",
    "p_fa_emp_ci_high",
];

pub const DECODE_COLUMNS: [&str; 12] = [
    "sir_db",
    "n_rx",
    "trials",
    "p_erasure",
    "p_erasure_ci_low",
    "p_erasure_ci_high",
    "p_error",
    "p_error_ci_low",
    "p_error_ci_high",
    "p_collision",
    "p_collision_ci_low",
    "p_collision_ci_high",
];

fn push_rate(row: &mut Vec<String>, successes: u64, trials: u64) {
    let (p, lo, hi) = wilson_interval(successes, trials, 0.95);
    row.extend([fmt_sig6(p), fmt_sig6(lo), fmt_sig6(hi)]);
}

/// Writes the CSV form of `counts`: fixed header, one row per point.
pub fn write_csv<W: Write>(counts: &OutcomeCounts, out: W) -> Result<()> {
    if counts.is_empty() {
        return Err(Error::Config("no outcome counts to write".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.into());
    match counts {
        OutcomeCounts::MissDetection(points) => {
            w.write_record(MISS_COLUMNS).map_err(to_io)?;
            for p in points {
                let mut row = vec![
                    fmt_sig6(p.sir_db),
                    p.n_rx.to_string(),
                    p.n_trials.to_string(),
                ];
                push_rate(&mut row, p.n_miss, p.n_trials);
                row.push(fmt_sig6(p.p_miss_analytic));
                row.push(fmt_sig6(p.p_miss() - p.p_miss_analytic));
                push_rate(&mut row, p.n_false_alarm, p.n_fa_opportunities);
                w.write_record(&row).map_err(to_io)?;
            }
        }
        OutcomeCounts::MultiuserDecode(points) => {
            w.write_record(DECODE_COLUMNS).map_err(to_io)?;
            for p in points {
                let mut row = vec![
                    fmt_sig6(p.sir_db),
                    p.n_rx.to_string(),
                    p.n_trials.to_string(),
                ];
                push_rate(&mut row, p.n_erasure, p.n_user_trials);
                // Wrong decodes can in principle outnumber the users.
                let (_, lo, hi) =
                    wilson_interval(p.n_error_events.min(p.n_user_trials), p.n_user_trials, 0.95);
                row.extend([fmt_sig6(p.p_error()), fmt_sig6(lo), fmt_sig6(hi)]);
                push_rate(&mut row, p.n_collision, p.n_trials * p.n_users as u64);
                w.write_record(&row).map_err(to_io)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(counts: &OutcomeCounts, destination: &Path) -> Result<()> {
    if counts.is_empty() {
        return Err(Error::Config("no outcome counts to write".into()));
    }
    let file = std::fs::File::create(destination)?;
    write_csv(counts, std::io::BufWriter::new(file))
}
