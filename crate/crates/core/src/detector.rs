//! Energy detection of signaling tones.
//!
//! Per-antenna tone energies are summed into `z = sum_i |y_i|^2` and
//! compared against an absolute threshold chosen for a target per-tone
//! false-alarm probability. The closed-form distributions of `z` used for
//! threshold selection and validation live here too:
//!
//! * no tone: `F0(x) = 1 - exp(-x / (N_r sigma^2))`
//! * tone present: Erlang with shape `N_r` and scale `sigma^2 + E_r`

use serde::{Deserialize, Serialize};

use crate::channel::{InterferenceMode, ReceivedGrid};
use crate::codec::DetectedToneSets;
use crate::error::{Error, Result};

/// Minimum number of tones for a median-based interference estimate.
pub const MIN_ESTIMATION_TONES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sigma2Mode {
    /// Interference variance supplied by configuration.
    Known,
    /// Interference variance estimated from the received grid.
    Estimated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub target_pfa: f64,
    pub n_rx: usize,
    pub sigma2_mode: Sigma2Mode,
    pub sigma2_known: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            target_pfa: 0.01,
            n_rx: 1,
            sigma2_mode: Sigma2Mode::Known,
            sigma2_known: 1.0,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_pfa > 0.0 && self.target_pfa < 1.0) {
            return Err(Error::Domain(format!(
                "false alarm probability {} outside (0, 1)",
                self.target_pfa
            )));
        }
        if self.n_rx < 1 {
            return Err(Error::Config("n_rx must be at least 1".into()));
        }
        if !(self.sigma2_known > 0.0) {
            return Err(Error::Domain(
                "known interference variance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Threshold for this grid: from the known variance, or from a median
    /// estimate under the given interference model.
    pub fn threshold(&self, z: &EnergyGrid, interference: InterferenceMode) -> Result<f64> {
        let sigma2 = match self.sigma2_mode {
            Sigma2Mode::Known => self.sigma2_known,
            Sigma2Mode::Estimated => estimate_interference_power(z, self.n_rx, interference)?,
        };
        threshold_for_pfa(self, sigma2)
    }
}

/// Combined detection variable indexed (symbol, subcarrier).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    n_sym: usize,
    s: usize,
    z: Vec<f64>,
}

impl EnergyGrid {
    pub fn from_values(n_sym: usize, s: usize, z: Vec<f64>) -> Result<Self> {
        if z.len() != n_sym * s {
            return Err(Error::Domain(format!(
                "{} energies do not fill a {n_sym}x{s} grid",
                z.len()
            )));
        }
        if z.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Domain("energies must be nonnegative".into()));
        }
        Ok(Self { n_sym, s, z })
    }

    pub fn n_sym(&self) -> usize {
        self.n_sym
    }

    pub fn s(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.z[n * self.s + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn scaled(&self, factor: f64) -> EnergyGrid {
        EnergyGrid {
            n_sym: self.n_sym,
            s: self.s,
            z: self.z.iter().map(|v| v * factor).collect(),
        }
    }
}

pub fn combine_energy(grid: &ReceivedGrid) -> EnergyGrid {
    let mut z: Vec<f64> = grid.antenna(0).iter().map(|y| y.norm_sqr()).collect();
    for i in 1..grid.n_rx() {
        for (acc, y) in z.iter_mut().zip(grid.antenna(i)) {
            *acc += y.norm_sqr();
        }
    }
    EnergyGrid {
        n_sym: grid.n_sym(),
        s: grid.s(),
        z,
    }
}

/// `x = -N_r sigma^2 ln(P_F)`.
pub fn threshold_for_pfa(cfg: &DetectorConfig, sigma2: f64) -> Result<f64> {
    if !(cfg.target_pfa > 0.0 && cfg.target_pfa < 1.0) {
        return Err(Error::Domain(format!(
            "false alarm probability {} outside (0, 1)",
            cfg.target_pfa
        )));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "interference variance {sigma2} must be positive"
        )));
    }
    Ok(-(cfg.n_rx as f64) * sigma2 * cfg.target_pfa.ln())
}

/// Tones with `z >= x`, per symbol, in ascending order.
pub fn detect(z: &EnergyGrid, x: f64) -> DetectedToneSets {
    let sets =
        z.z.chunks_exact(z.s)
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v >= x)
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
    DetectedToneSets::new(sets)
}

/// Median of `z` divided by the median of the no-tone distribution at unit
/// variance.
///
/// With common interference, `z = N_r |I|^2` is exponential with mean
/// `N_r sigma^2`, so the divisor is `N_r ln 2`. With independent
/// interference `z` is Erlang(`N_r`, `sigma^2`) and the divisor is that
/// distribution's median.
pub fn estimate_interference_power(
    z: &EnergyGrid,
    n_rx: usize,
    interference: InterferenceMode,
) -> Result<f64> {
    if z.z.len() < MIN_ESTIMATION_TONES {
        return Err(Error::Estimation(format!(
            "need at least {MIN_ESTIMATION_TONES} tones, got {}",
            z.z.len()
        )));
    }
    if n_rx < 1 {
        return Err(Error::Config("n_rx must be at least 1".into()));
    }
    let mut values = z.z.clone();
    let len = values.len();
    let mid = len / 2;
    let (lower, &mut upper_mid, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if len % 2 == 1 {
        upper_mid
    } else {
        let lower_mid = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_mid + upper_mid)
    };
    let unit_median = match interference {
        InterferenceMode::Common => n_rx as f64 * std::f64::consts::LN_2,
        InterferenceMode::Independent => erlang_median(n_rx),
    };
    let estimate = median / unit_median;
    if !(estimate > 0.0) {
        return Err(Error::Estimation("median energy is zero".into()));
    }
    Ok(estimate)
}

/// Median of Erlang(`shape`, 1) by bisection on its CDF.
fn erlang_median(shape: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, shape as f64 + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if erlang_cdf(mid, shape, 1.0) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// CDF of Erlang(`shape`, `scale`) at `x >= 0`.
fn erlang_cdf(x: f64, shape: usize, scale: f64) -> f64 {
    let r = x / scale;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..shape {
        term *= r / k as f64;
        sum += term;
    }
    1.0 - (-r).exp() * sum
}

fn check_level(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("level {x} must be nonnegative")));
    }
    Ok(())
}

/// `P(z < x)` without a tone.
pub fn cdf_no_tone(x: f64, n_rx: usize, sigma2: f64) -> Result<f64> {
    check_level(x)?;
    if !(sigma2 > 0.0) || n_rx < 1 {
        return Err(Error::Domain("need sigma2 > 0 and n_rx >= 1".into()));
    }
    Ok(1.0 - (-x / (n_rx as f64 * sigma2)).exp())
}

/// `P(z < x)` with a tone of energy `er`.
pub fn cdf_tone(x: f64, n_rx: usize, sigma2: f64, er: f64) -> Result<f64> {
    check_level(x)?;
    if !(er >= 0.0) {
        return Err(Error::Domain(format!(
            "tone energy {er} must be nonnegative"
        )));
    }
    if !(sigma2 > 0.0) || n_rx < 1 {
        return Err(Error::Domain("need sigma2 > 0 and n_rx >= 1".into()));
    }
    Ok(erlang_cdf(x, n_rx, sigma2 + er))
}

/// Miss probability at threshold `x`; equal to [`cdf_tone`] there.
pub fn p_miss(x: f64, n_rx: usize, sigma2: f64, er: f64) -> Result<f64> {
    cdf_tone(x, n_rx, sigma2, er)
}
