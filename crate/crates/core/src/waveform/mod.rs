//! ISAC waveform generators with instantaneous-bandwidth bookkeeping.
//!
//! All generators produce unit-peak complex baseband samples. Baseband is
//! relative to the receiver's current tuning centre, which starts at
//! [`Waveform::carrier`] and moves at each [`Retune`] entry.

mod io;
mod occupancy;

pub use io::{read_binary, write_binary, write_csv, HEADER_LEN};
pub use occupancy::{
    check_instantaneous_bandwidth, BandwidthReport, SegmentOccupancy, OCCUPANCY_HOP,
    OCCUPANCY_POWER_FRACTION, OCCUPANCY_WINDOW,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default receiver instantaneous-bandwidth limit, Hz.
pub const DEFAULT_INST_BANDWIDTH_LIMIT: f64 = 10.0e6;
/// Minimum ratio of sample rate to instantaneous bandwidth.
pub const MIN_OVERSAMPLING: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WaveformKind {
    Tone,
    Lfm,
    Fsk,
    PskLfm,
    FreqHop,
}

impl WaveformKind {
    pub fn code(self) -> u32 {
        match self {
            WaveformKind::Tone => 0,
            WaveformKind::Lfm => 1,
            WaveformKind::Fsk => 2,
            WaveformKind::PskLfm => 3,
            WaveformKind::FreqHop => 4,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Some(match code {
            0 => WaveformKind::Tone,
            1 => WaveformKind::Lfm,
            2 => WaveformKind::Fsk,
            3 => WaveformKind::PskLfm,
            4 => WaveformKind::FreqHop,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Retune {
    pub time_s: f64,
    /// Absolute tuning centre after the retune, Hz.
    pub centre_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub sample_rate: f64,
    pub carrier: f64,
    pub samples: Vec<Complex64>,
    /// Largest instantaneous bandwidth over the burst, Hz.
    pub inst_bandwidth: f64,
    pub retune_schedule: Vec<Retune>,
    pub kind: WaveformKind,
}

/// Contiguous run of samples sharing one tuning centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub centre_hz: f64,
}

impl Waveform {
    pub fn new(
        sample_rate: f64,
        carrier: f64,
        samples: Vec<Complex64>,
        inst_bandwidth: f64,
        retune_schedule: Vec<Retune>,
        kind: WaveformKind,
    ) -> Result<Self> {
        let w = Self {
            sample_rate,
            carrier,
            samples,
            inst_bandwidth,
            retune_schedule,
            kind,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) || !self.sample_rate.is_finite() {
            return Err(Error::Config(format!(
                "sample rate must be > 0, got {}",
                self.sample_rate
            )));
        }
        if !(self.inst_bandwidth >= 0.0) {
            return Err(Error::Config("instantaneous bandwidth must be >= 0".into()));
        }
        let required = MIN_OVERSAMPLING * self.inst_bandwidth;
        if self.sample_rate < required * (1.0 - 1e-12) {
            return Err(Error::Sampling {
                fs_hz: self.sample_rate,
                required_hz: required,
            });
        }
        if self
            .retune_schedule
            .windows(2)
            .any(|w| !(w[1].time_s > w[0].time_s))
        {
            return Err(Error::Config(
                "retune times must be strictly increasing".into(),
            ));
        }
        if self
            .samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Config("waveform contains non-finite samples".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate
    }

    /// Sample index at which a retune at `time_s` takes effect.
    pub fn retune_index(&self, time_s: f64) -> usize {
        (time_s * self.sample_rate - 1e-9).ceil().max(0.0) as usize
    }

    /// Absolute tuning centre in force at sample `n`.
    pub fn centre_at(&self, n: usize) -> f64 {
        self.retune_schedule
            .iter()
            .take_while(|r| self.retune_index(r.time_s) <= n)
            .last()
            .map_or(self.carrier, |r| r.centre_hz)
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.retune_schedule.len() + 1);
        let mut start = 0usize;
        let mut centre = self.carrier;
        for r in &self.retune_schedule {
            let idx = self.retune_index(r.time_s).min(self.len());
            if idx > start {
                out.push(Segment {
                    start,
                    end: idx,
                    centre_hz: centre,
                });
            }
            start = start.max(idx);
            centre = r.centre_hz;
        }
        if start < self.len() || out.is_empty() {
            out.push(Segment {
                start,
                end: self.len(),
                centre_hz: centre,
            });
        }
        out
    }

    /// Moves the carrier (and every retune centre) by `carrier` Hz.
    pub fn with_carrier(mut self, carrier: f64) -> Self {
        let delta = carrier - self.carrier;
        self.carrier = carrier;
        for r in &mut self.retune_schedule {
            r.centre_hz += delta;
        }
        self
    }

    pub fn scaled(mut self, gain: f64) -> Self {
        self.samples.iter_mut().for_each(|z| *z *= gain);
        self
    }

    pub fn peak_envelope(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn sample_count(duration: f64, fs: f64) -> Result<usize> {
    if !(duration > 0.0) || !(fs > 0.0) {
        return Err(Error::Config(format!(
            "duration and sample rate must be > 0 (T = {duration}, fs = {fs})"
        )));
    }
    let n = (duration * fs).round() as usize;
    if n == 0 {
        return Err(Error::Config("waveform shorter than one sample".into()));
    }
    Ok(n)
}

/// Unmodulated carrier at baseband offset `offset` Hz.
pub fn gen_tone(offset: f64, duration: f64, fs: f64) -> Result<Waveform> {
    let n = sample_count(duration, fs)?;
    let samples = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * offset * k as f64 / fs))
        .collect();
    Waveform::new(
        fs,
        0.0,
        samples,
        2.0 * offset.abs(),
        Vec::new(),
        WaveformKind::Tone,
    )
}

/// Phase of the up-chirp sweeping -B/2 → B/2 over `duration`.
pub fn lfm_phase(bandwidth: f64, duration: f64, t: f64) -> f64 {
    PI * (bandwidth / duration) * t * t - PI * bandwidth * t
}

pub fn gen_lfm(bandwidth: f64, duration: f64, fs: f64) -> Result<Waveform> {
    if !(bandwidth >= 0.0) {
        return Err(Error::Config(format!(
            "sweep bandwidth must be >= 0, got {bandwidth}"
        )));
    }
    if fs < MIN_OVERSAMPLING * bandwidth {
        return Err(Error::Sampling {
            fs_hz: fs,
            required_hz: MIN_OVERSAMPLING * bandwidth,
        });
    }
    let n = sample_count(duration, fs)?;
    let samples = (0..n)
        .map(|k| Complex64::from_polar(1.0, lfm_phase(bandwidth, duration, k as f64 / fs)))
        .collect();
    Waveform::new(fs, 0.0, samples, bandwidth, Vec::new(), WaveformKind::Lfm)
}

pub fn gray_encode(v: usize) -> usize {
    v ^ (v >> 1)
}

pub fn gray_decode(mut g: usize) -> usize {
    let mut v = g;
    while g > 0 {
        g >>= 1;
        v ^= g;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FskParams {
    pub order: usize,
    pub symbol_rate: f64,
    pub tone_spacing: f64,
    pub sample_rate: f64,
    /// Permit tone spacing below the symbol rate.
    #[serde(default)]
    pub allow_non_orthogonal: bool,
}

impl FskParams {
    pub fn new(order: usize, symbol_rate: f64, sample_rate: f64) -> Self {
        Self {
            order,
            symbol_rate,
            tone_spacing: symbol_rate,
            sample_rate,
            allow_non_orthogonal: false,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.order.trailing_zeros() as usize
    }

    pub fn samples_per_symbol(&self) -> usize {
        (self.sample_rate / self.symbol_rate).round() as usize
    }

    /// Baseband frequency of tone `m`.
    pub fn tone_offset(&self, m: usize) -> f64 {
        (m as f64 - (self.order as f64 - 1.0) / 2.0) * self.tone_spacing
    }

    pub fn inst_bandwidth(&self) -> f64 {
        (self.order as f64 - 1.0) * self.tone_spacing + 2.0 * self.symbol_rate
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || !self.order.is_power_of_two() {
            return Err(Error::Config(format!(
                "FSK order must be a power of two >= 2, got {}",
                self.order
            )));
        }
        if !(self.symbol_rate > 0.0) || !(self.tone_spacing > 0.0) {
            return Err(Error::Config(
                "symbol rate and tone spacing must be > 0".into(),
            ));
        }
        if self.tone_spacing < self.symbol_rate * (1.0 - 1e-12) && !self.allow_non_orthogonal {
            return Err(Error::Config(format!(
                "tone spacing {} Hz below symbol rate {} Hz is not orthogonal",
                self.tone_spacing, self.symbol_rate
            )));
        }
        let sps = self.sample_rate / self.symbol_rate;
        if (sps - sps.round()).abs() > 1e-9 || sps.round() < 1.0 {
            return Err(Error::Config(format!(
                "sample rate must be an integer multiple of the symbol rate (got {sps} samples/symbol)"
            )));
        }
        let required = MIN_OVERSAMPLING * self.inst_bandwidth();
        if self.sample_rate < required * (1.0 - 1e-12) {
            return Err(Error::Sampling {
                fs_hz: self.sample_rate,
                required_hz: required,
            });
        }
        Ok(())
    }

    /// Gray-mapped tone index for each symbol of `bits` (MSB first).
    pub fn symbols(&self, bits: &[u8]) -> Result<Vec<usize>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(Error::Config(format!(
                "bit count {} not divisible by {k} bits/symbol",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(k)
            .map(|c| {
                gray_decode(
                    c.iter()
                        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1)),
                )
            })
            .collect())
    }

    /// Bits carried by tone index `m`.
    pub fn bits_of(&self, m: usize, out: &mut Vec<u8>) {
        let v = gray_encode(m);
        let k = self.bits_per_symbol();
        out.extend((0..k).rev().map(|i| ((v >> i) & 1) as u8));
    }
}

/// M-FSK with Gray mapping. Tones are referenced to absolute sample time, so
/// consecutive symbols on the same tone are phase continuous.
pub fn gen_fsk(bits: &[u8], params: &FskParams) -> Result<Waveform> {
    params.validate()?;
    let symbols = params.symbols(bits)?;
    let sps = params.samples_per_symbol();
    let fs = params.sample_rate;
    let mut samples = Vec::with_capacity(symbols.len() * sps);
    for &m in &symbols {
        let f = params.tone_offset(m);
        let base = samples.len();
        samples.extend(
            (0..sps).map(|k| Complex64::from_polar(1.0, 2.0 * PI * f * (base + k) as f64 / fs)),
        );
    }
    Waveform::new(
        fs,
        0.0,
        samples,
        params.inst_bandwidth(),
        Vec::new(),
        WaveformKind::Fsk,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PskLfmParams {
    pub chips_per_bit: usize,
    pub bandwidth: f64,
    pub duration: f64,
    pub sample_rate: f64,
}

impl PskLfmParams {
    pub fn sample_count(&self) -> Result<usize> {
        sample_count(self.duration, self.sample_rate)
    }

    /// Index of the bit carried by sample `n` of an `n_total`-sample burst.
    pub fn bit_index(&self, n: usize, n_total: usize, n_bits: usize) -> usize {
        let chips = n_bits * self.chips_per_bit;
        (n * chips / n_total) / self.chips_per_bit
    }
}

/// BPSK over an LFM chirp: every chip of bit `b` is multiplied by `(-1)^b`.
pub fn gen_psk_lfm(bits: &[u8], params: &PskLfmParams) -> Result<Waveform> {
    if bits.is_empty() || params.chips_per_bit == 0 {
        return Err(Error::Config(
            "PSK-LFM needs at least one bit and one chip per bit".into(),
        ));
    }
    let mut w = gen_lfm(params.bandwidth, params.duration, params.sample_rate)?;
    let n = w.len();
    if n < bits.len() * params.chips_per_bit {
        return Err(Error::Config(format!(
            "{} chips do not fit in {n} samples",
            bits.len() * params.chips_per_bit
        )));
    }
    for (k, z) in w.samples.iter_mut().enumerate() {
        if bits[params.bit_index(k, n, bits.len())] & 1 == 1 {
            *z = -*z;
        }
    }
    w.kind = WaveformKind::PskLfm;
    Ok(w)
}

/// Coherent per-bit decisions for a PSK-LFM burst starting at `offset` in `rx`.
/// `phase_ref` is the channel phasor of an unflipped chip.
pub fn demod_psk_lfm(
    rx: &[Complex64],
    offset: usize,
    n_bits: usize,
    params: &PskLfmParams,
    phase_ref: Complex64,
) -> Result<Vec<u8>> {
    let chirp = gen_lfm(params.bandwidth, params.duration, params.sample_rate)?;
    let n = chirp.len();
    if rx.len() < offset + n || n_bits == 0 {
        return Err(Error::Framing(
            "received burst shorter than the PSK-LFM frame".into(),
        ));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); n_bits];
    for (k, c) in chirp.samples.iter().enumerate() {
        acc[params.bit_index(k, n, n_bits)] += rx[offset + k] * c.conj();
    }
    let reference = phase_ref.conj();
    Ok(acc
        .iter()
        .map(|z| u8::from((z * reference).re < 0.0))
        .collect())
}

/// Removes the bit phase pattern from a received PSK-LFM burst at `offset`.
pub fn wipe_psk_lfm(
    rx: &[Complex64],
    offset: usize,
    bits: &[u8],
    params: &PskLfmParams,
) -> Result<Vec<Complex64>> {
    let n = params.sample_count()?;
    let mut out = rx.to_vec();
    for k in 0..n.min(rx.len().saturating_sub(offset)) {
        if bits[params.bit_index(k, n, bits.len())] & 1 == 1 {
            out[offset + k] = -out[offset + k];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopPlan {
    pub steps: usize,
    /// Spacing between consecutive hop frequencies, Hz.
    pub step_spacing: f64,
    /// Dwell per step, s.
    pub dwell: f64,
    /// Instantaneous bandwidth occupied by each step, Hz.
    pub step_bandwidth: f64,
    /// Receiver instantaneous-bandwidth limit (tuning window width), Hz.
    pub receiver_limit: f64,
}

impl HopPlan {
    pub fn synthesized_bandwidth(&self) -> f64 {
        self.steps as f64 * self.step_spacing
    }

    pub fn total_duration(&self) -> f64 {
        self.steps as f64 * self.dwell
    }

    /// Offset of step `i` from the first hop frequency.
    pub fn step_frequency(&self, i: usize) -> f64 {
        i as f64 * self.step_spacing
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || !(self.step_spacing > 0.0) || !(self.dwell > 0.0) {
            return Err(Error::Config(
                "hop plan needs steps >= 1, step spacing > 0 and dwell > 0".into(),
            ));
        }
        if !(self.step_bandwidth >= 0.0) || !(self.receiver_limit > 0.0) {
            return Err(Error::Config(
                "hop plan bandwidths must be non-negative".into(),
            ));
        }
        if self.step_bandwidth > self.receiver_limit {
            return Err(Error::Config(format!(
                "per-step bandwidth {} Hz exceeds receiver limit {} Hz",
                self.step_bandwidth, self.receiver_limit
            )));
        }
        Ok(())
    }
}

/// Stepped-frequency burst. The receiver retunes whenever the next step's
/// occupied band would leave the current tuning window; the baseband tone of
/// each step is its offset from the centre in force.
pub fn gen_freq_hop(plan: &HopPlan, fs: f64) -> Result<Waveform> {
    plan.validate()?;
    let per_step = sample_count(plan.dwell, fs)?;
    let half_window = 0.5 * plan.receiver_limit;
    let mut centre = 0.0;
    let mut retunes = Vec::new();
    let mut samples = Vec::with_capacity(per_step * plan.steps);
    let mut seg_lo = f64::INFINITY;
    let mut seg_hi = f64::NEG_INFINITY;
    let mut inst_bandwidth: f64 = 0.0;
    for i in 0..plan.steps {
        let f = plan.step_frequency(i);
        if (f - centre).abs() + 0.5 * plan.step_bandwidth > half_window {
            centre = f;
            retunes.push(Retune {
                time_s: (i * per_step) as f64 / fs,
                centre_hz: centre,
            });
            seg_lo = f64::INFINITY;
            seg_hi = f64::NEG_INFINITY;
        }
        let offset = f - centre;
        seg_lo = seg_lo.min(offset);
        seg_hi = seg_hi.max(offset);
        inst_bandwidth = inst_bandwidth.max(seg_hi - seg_lo + plan.step_bandwidth);
        let base = samples.len();
        samples.extend(
            (0..per_step)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * offset * (base + k) as f64 / fs)),
        );
    }
    if fs < MIN_OVERSAMPLING * inst_bandwidth {
        return Err(Error::Sampling {
            fs_hz: fs,
            required_hz: MIN_OVERSAMPLING * inst_bandwidth,
        });
    }
    Waveform::new(
        fs,
        0.0,
        samples,
        inst_bandwidth,
        retunes,
        WaveformKind::FreqHop,
    )
}
