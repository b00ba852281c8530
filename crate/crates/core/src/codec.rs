//! Coded single-tone signaling: message packing, Reed-Solomon encoding onto
//! tone positions, and list decoding of detected tone sets.
//!
//! A codeword `C_1..C_N` energizes subcarrier `C_n` in OFDM symbol `n`. The
//! code is systematic: `C_1..C_{N-K}` hold the parity and `C_{N-K+1}..C_N`
//! the information symbols `V_1..V_K`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{poly_mod, poly_mul, Elem, Field, GfPoly};

/// Width of the coordination payload in bits.
pub const RCRM_BITS: u32 = 9;
pub const RCRM_VALUES: u64 = 1 << RCRM_BITS;

/// Upper bound on `S^K` for exhaustive list decoding.
pub const MAX_CANDIDATES: u64 = 1 << 20;

/// A resource coordination request: 9 bits split into four fields.
///
/// Packed LSB first as resource id (bits 0-1), traffic priority (2-4),
/// target SINR (5-6) and hashed base-station id (7-8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RcrMessage {
    pub resource_id: u8,
    pub traffic_priority: u8,
    pub target_sinr: u8,
    pub hashed_bs_id: u8,
}

impl RcrMessage {
    pub fn new(
        resource_id: u8,
        traffic_priority: u8,
        target_sinr: u8,
        hashed_bs_id: u8,
    ) -> Result<Self> {
        let fields = [
            ("resource_id", resource_id, 2),
            ("traffic_priority", traffic_priority, 3),
            ("target_sinr", target_sinr, 2),
            ("hashed_bs_id", hashed_bs_id, 2),
        ];
        for (name, value, bits) in fields {
            if value >> bits != 0 {
                return Err(Error::InvalidMessage(format!(
                    "{name}={value} does not fit in {bits} bits"
                )));
            }
        }
        Ok(Self {
            resource_id,
            traffic_priority,
            target_sinr,
            hashed_bs_id,
        })
    }

    pub fn to_bits(self) -> u16 {
        self.resource_id as u16
            | (self.traffic_priority as u16) << 2
            | (self.target_sinr as u16) << 5
            | (self.hashed_bs_id as u16) << 7
    }

    pub fn from_bits(bits: u16) -> Result<Self> {
        if bits as u64 >= RCRM_VALUES {
            return Err(Error::InvalidMessage(format!(
                "payload {bits} exceeds {RCRM_BITS} bits"
            )));
        }
        Ok(Self {
            resource_id: (bits & 0b11) as u8,
            traffic_priority: ((bits >> 2) & 0b111) as u8,
            target_sinr: ((bits >> 5) & 0b11) as u8,
            hashed_bs_id: ((bits >> 7) & 0b11) as u8,
        })
    }
}

/// Time-varying 2-bit hash of a 9-bit base-station id.
pub fn hash_bs_id(bs_id: u16, frame_index: u64) -> u8 {
    let mixed = (bs_id as u64)
        .wrapping_mul(40503)
        .wrapping_add(frame_index.wrapping_mul(2_654_435_761));
    ((mixed & 0xFFFF) >> 14) as u8
}

/// Information symbols `V_1..V_K`; `V_1` is the least significant base-S digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InfoSymbols(pub Vec<Elem>);

impl InfoSymbols {
    /// Base-S digits of `value`, least significant first.
    pub fn from_integer(value: u64, params: &CodeParams) -> Result<Self> {
        let count = params.message_count();
        if count.is_some_and(|c| value >= c) {
            return Err(Error::Capacity(format!(
                "message {value} does not fit in {} symbols over GF({})",
                params.k,
                params.order()
            )));
        }
        let s = params.order() as u64;
        let mut rest = value;
        let digits = (0..params.k)
            .map(|_| {
                let d = rest % s;
                rest /= s;
                d as Elem
            })
            .collect();
        Ok(InfoSymbols(digits))
    }

    /// `V_K S^{K-1} + ... + V_2 S + V_1`, or `None` on overflow.
    pub fn to_integer(&self, s: usize) -> Option<u64> {
        self.0.iter().rev().try_fold(0u64, |acc, &v| {
            acc.checked_mul(s as u64)?.checked_add(v as u64)
        })
    }
}

/// Tone indices `C_1..C_N`, one per OFDM symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StsCodeword(pub Vec<Elem>);

impl StsCodeword {
    /// `c(X) = C_1 + C_2 X + ... + C_N X^{N-1}`.
    pub fn poly(&self) -> GfPoly {
        GfPoly::new(self.0.clone())
    }

    pub fn hamming_distance(&self, other: &StsCodeword) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// Which subcarrier is energized in each OFDM symbol of a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToneSchedule {
    tones: Vec<usize>,
}

impl ToneSchedule {
    pub fn new(tones: Vec<usize>) -> Self {
        Self { tones }
    }

    /// Energized subcarrier of symbol `n` (zero-based).
    pub fn tone(&self, n: usize) -> usize {
        self.tones[n]
    }

    pub fn tones(&self) -> &[usize] {
        &self.tones
    }

    pub fn len(&self) -> usize {
        self.tones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tones.is_empty()
    }
}

pub fn codeword_to_tone_grid(c: &StsCodeword) -> ToneSchedule {
    ToneSchedule::new(c.0.iter().map(|&x| x as usize).collect())
}

/// An `(N, K)` Reed-Solomon code over a binary extension field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    field: Arc<Field>,
    pub n: usize,
    pub k: usize,
}

impl CodeParams {
    pub fn new(field: Arc<Field>, n: usize, k: usize) -> Result<Self> {
        if k < 1 || k > n || n > field.order() - 1 {
            return Err(Error::Config(format!(
                "({n},{k}) code needs 1 <= K <= N <= {}",
                field.order() - 1
            )));
        }
        Ok(Self { field, n, k })
    }

    /// Shorthand for `CodeParams::new(Field::new(m)?, n, k)`.
    pub fn with_exponent(m: u32, n: usize, k: usize) -> Result<Self> {
        Self::new(Arc::new(Field::new(m)?), n, k)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> &Arc<Field> {
        &self.field
    }

    /// Subcarriers per OFDM symbol, `S`.
    pub fn order(&self) -> usize {
        self.field.order()
    }

    /// Number of distinct messages `S^K`, or `None` if it overflows `u64`.
    pub fn message_count(&self) -> Option<u64> {
        (self.order() as u64).checked_pow(self.k as u32)
    }

    /// Error-correction capability `floor((N-K)/2)`.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    /// Error-detection capability `N-K`.
    pub fn rho(&self) -> usize {
        self.n - self.k
    }
}

pub fn error_capability(params: &CodeParams) -> (usize, usize) {
    (params.t(), params.rho())
}

/// Largest number of simultaneous users `U` with `K <= ceil(N/U)`, capped
/// at the number of codewords.
pub fn max_users(params: &CodeParams) -> u64 {
    let codewords = params.message_count().unwrap_or(u64::MAX);
    if params.k == 1 {
        return codewords;
    }
    let n = params.n as u64;
    (1..=n.min(codewords))
        .take_while(|&u| n.div_ceil(u) >= params.k as u64)
        .last()
        .unwrap_or(1)
}

pub fn pack_rcrm(msg: &RcrMessage, params: &CodeParams) -> Result<InfoSymbols> {
    if params.message_count().is_some_and(|c| c < RCRM_VALUES) {
        return Err(Error::Capacity(format!(
            "{RCRM_BITS}-bit payload does not fit in {} symbols over GF({})",
            params.k,
            params.order()
        )));
    }
    InfoSymbols::from_integer(msg.to_bits() as u64, params)
}

pub fn unpack_rcrm(v: &InfoSymbols, params: &CodeParams) -> Result<RcrMessage> {
    let value = v
        .to_integer(params.order())
        .filter(|&x| x < RCRM_VALUES)
        .ok_or_else(|| Error::InvalidMessage(format!("{v:?} is not a {RCRM_BITS}-bit payload")))?;
    RcrMessage::from_bits(value as u16)
}

/// `g(X) = (X - alpha)(X - alpha^2)...(X - alpha^{N-K})`; the constant 1
/// when `N = K`.
pub fn generator_poly(params: &CodeParams) -> GfPoly {
    let f = params.field();
    (1..=params.rho()).fold(GfPoly::one(), |g, j| {
        poly_mul(f, &g, &GfPoly::new(vec![f.exp(j as u64), 1]))
    })
}

fn check_symbols(params: &CodeParams, v: &InfoSymbols) -> Result<()> {
    if v.0.len() != params.k {
        return Err(Error::Domain(format!(
            "expected {} information symbols, got {}",
            params.k,
            v.0.len()
        )));
    }
    if let Some(&bad) = v.0.iter().find(|&&x| !params.field().contains(x)) {
        return Err(Error::Domain(format!(
            "symbol {bad} outside GF({})",
            params.order()
        )));
    }
    Ok(())
}

fn encode_with(params: &CodeParams, g: &GfPoly, v: &InfoSymbols) -> StsCodeword {
    let shifted = GfPoly::new(v.0.clone()).shift(params.rho());
    // g is monic, so the remainder is always defined.
    let parity = poly_mod(params.field(), &shifted, g).expect("generator is nonzero");
    let c = (0..params.n)
        .map(|i| shifted.coeff(i) ^ parity.coeff(i))
        .collect();
    StsCodeword(c)
}

/// Systematic encoding: `c(X) = X^{N-K} m(X) + (X^{N-K} m(X) mod g(X))`.
pub fn rs_encode(params: &CodeParams, v: &InfoSymbols) -> Result<StsCodeword> {
    check_symbols(params, v)?;
    Ok(encode_with(params, &generator_poly(params), v))
}

/// Per-symbol detected subcarrier sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectedToneSets {
    sets: Vec<Vec<usize>>,
}

impl DetectedToneSets {
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        Self { sets }
    }

    /// Exactly the tones of the given schedules: the perfect-detection view.
    pub fn from_schedules<'a>(
        n_sym: usize,
        schedules: impl IntoIterator<Item = &'a ToneSchedule>,
    ) -> Self {
        let mut sets = vec![Vec::new(); n_sym];
        for sched in schedules {
            for (n, set) in sets.iter_mut().enumerate() {
                set.push(sched.tone(n));
            }
        }
        for set in &mut sets {
            set.sort_unstable();
            set.dedup();
        }
        Self { sets }
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    fn validate(&self, params: &CodeParams) -> Result<()> {
        if self.sets.len() != params.n {
            return Err(Error::Domain(format!(
                "expected {} detection sets, got {}",
                params.n,
                self.sets.len()
            )));
        }
        let s = params.order();
        if let Some(&bad) = self.sets.iter().flatten().find(|&&k| k >= s) {
            return Err(Error::Domain(format!("subcarrier {bad} outside 0..{s}")));
        }
        Ok(())
    }
}

/// A list-decoding result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// The message integer `m(S)`.
    pub message: u64,
    pub symbols: InfoSymbols,
    pub score: usize,
}

/// Every codeword of a code, in message order, for exhaustive decoding.
#[derive(Debug, Clone)]
pub struct Codebook {
    params: CodeParams,
    generator: GfPoly,
    /// Row-major: `codewords[m * N + n]` is `C_{n+1}` of message `m`.
    codewords: Vec<Elem>,
}

impl Codebook {
    pub fn new(params: &CodeParams) -> Result<Self> {
        let count = params
            .message_count()
            .filter(|&c| c <= MAX_CANDIDATES)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "GF({})^{} candidates exceed the enumeration bound {MAX_CANDIDATES}",
                    params.order(),
                    params.k
                ))
            })?;
        let generator = generator_poly(params);
        let mut codewords = Vec::with_capacity(count as usize * params.n);
        for m in 0..count {
            let v = InfoSymbols::from_integer(m, params)?;
            codewords.extend(encode_with(params, &generator, &v).0);
        }
        Ok(Self {
            params: params.clone(),
            generator,
            codewords,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn generator(&self) -> &GfPoly {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.codewords.len() / self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Tone indices of message `m`.
    pub fn tones(&self, message: u64) -> &[Elem] {
        let n = self.params.n;
        let start = message as usize * n;
        &self.codewords[start..start + n]
    }

    pub fn codeword(&self, message: u64) -> StsCodeword {
        StsCodeword(self.tones(message).to_vec())
    }

    pub fn schedule(&self, message: u64) -> ToneSchedule {
        ToneSchedule::new(self.tones(message).iter().map(|&x| x as usize).collect())
    }

    /// Match count of every candidate against the detected sets.
    pub fn scores(&self, detected: &DetectedToneSets) -> Result<Vec<u16>> {
        detected.validate(&self.params)?;
        let (n, s) = (self.params.n, self.params.order());
        let mut mask = vec![false; n * s];
        for (sym, set) in detected.sets.iter().enumerate() {
            for &k in set {
                mask[sym * s + k] = true;
            }
        }
        Ok(self
            .codewords
            .chunks_exact(n)
            .map(|cw| {
                cw.iter()
                    .enumerate()
                    .filter(|&(sym, &tone)| mask[sym * s + tone as usize])
                    .count() as u16
            })
            .collect())
    }

    /// All candidates scoring at least `threshold`, best first, ties broken
    /// by ascending message.
    pub fn list_decode(
        &self,
        detected: &DetectedToneSets,
        threshold: usize,
    ) -> Result<Vec<Candidate>> {
        if threshold < 1 || threshold > self.params.n {
            return Err(Error::Config(format!(
                "acceptance threshold {threshold} outside 1..={}",
                self.params.n
            )));
        }
        let scores = self.scores(detected)?;
        let mut out = scores
            .iter()
            .enumerate()
            .filter(|&(_, &sc)| sc as usize >= threshold)
            .map(|(m, &sc)| {
                Ok(Candidate {
                    message: m as u64,
                    symbols: InfoSymbols::from_integer(m as u64, &self.params)?,
                    score: sc as usize,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| b.score.cmp(&a.score).then(a.message.cmp(&b.message)));
        Ok(out)
    }
}

/// One-shot list decoding; builds the codebook on every call.
pub fn list_decode(
    detected: &DetectedToneSets,
    params: &CodeParams,
    threshold: usize,
) -> Result<Vec<Candidate>> {
    Codebook::new(params)?.list_decode(detected, threshold)
}
